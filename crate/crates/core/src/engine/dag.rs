//! Append-only reasoning DAG.
//!
//! Nodes are stored in insertion order and a node may only name strictly
//! earlier, validated nodes as parents, so the graph is acyclic by
//! construction. Rejected candidates are kept in the log as well; they
//! never become parents but stay visible to proposers that want to avoid
//! repeating them.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::EngineError;

/// Opaque node handle. Equal to the node's insertion index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Premise,
    Proposed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeVerdict {
    Validated,
    Rejected,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropositionNode<P> {
    pub id: NodeId,
    pub payload: P,
    pub parents: Vec<NodeId>,
    pub origin: Origin,
    pub verdict: NodeVerdict,
    /// Verifier note for rejected candidates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl<P> PropositionNode<P> {
    pub fn is_validated(&self) -> bool {
        self.verdict == NodeVerdict::Validated
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReasoningDag<P> {
    nodes: Vec<PropositionNode<P>>,
    premise_ids: Vec<NodeId>,
    #[serde(skip)]
    validated_keys: HashMap<String, NodeId>,
}

impl<P> Default for ReasoningDag<P> {
    fn default() -> Self {
        Self {
            nodes: Vec::new(),
            premise_ids: Vec::new(),
            validated_keys: HashMap::new(),
        }
    }
}

impl<P> ReasoningDag<P> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[PropositionNode<P>] {
        &self.nodes
    }

    pub fn premise_ids(&self) -> &[NodeId] {
        &self.premise_ids
    }

    pub fn get(&self, id: NodeId) -> Option<&PropositionNode<P>> {
        self.nodes.get(id.0)
    }

    pub fn node(&self, id: NodeId) -> Result<&PropositionNode<P>, EngineError> {
        self.get(id).ok_or(EngineError::UnknownNode(id))
    }

    pub fn payload(&self, id: NodeId) -> Option<&P> {
        self.get(id).map(|n| &n.payload)
    }

    /// Premises and validated propositions, in insertion order.
    pub fn validated(&self) -> impl Iterator<Item = &PropositionNode<P>> {
        self.nodes.iter().filter(|n| n.is_validated())
    }

    pub fn rejected(&self) -> impl Iterator<Item = &PropositionNode<P>> {
        self.nodes.iter().filter(|n| !n.is_validated())
    }

    /// Validated nodes that are not premises.
    pub fn proposed_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| n.is_validated() && n.origin == Origin::Proposed)
            .count()
    }

    pub fn last_validated(&self) -> Option<&PropositionNode<P>> {
        self.nodes.iter().rev().find(|n| n.is_validated())
    }

    /// Looks up a validated node by its canonical key.
    pub fn find_key(&self, key: &str) -> Option<NodeId> {
        self.validated_keys.get(key).copied()
    }

    pub fn contains_key(&self, key: &str) -> bool {
        self.validated_keys.contains_key(key)
    }

    pub fn add_premise(&mut self, payload: P, key: String) -> NodeId {
        let id = NodeId(self.nodes.len());
        self.nodes.push(PropositionNode {
            id,
            payload,
            parents: Vec::new(),
            origin: Origin::Premise,
            verdict: NodeVerdict::Validated,
            note: None,
        });
        self.premise_ids.push(id);
        self.validated_keys.entry(key).or_insert(id);
        id
    }

    /// Checks that `parents` are distinct, existing, validated nodes.
    pub fn check_parents(&self, parents: &[NodeId]) -> Result<(), EngineError> {
        let mut seen = BTreeSet::new();
        for &p in parents {
            let node = self.node(p)?;
            if !node.is_validated() {
                return Err(EngineError::RejectedParent(p));
            }
            if !seen.insert(p) {
                return Err(EngineError::DuplicateParent(p));
            }
        }
        Ok(())
    }

    pub fn add_validated(
        &mut self,
        payload: P,
        parents: Vec<NodeId>,
        key: String,
    ) -> Result<NodeId, EngineError> {
        self.check_parents(&parents)?;
        let id = NodeId(self.nodes.len());
        debug_assert!(parents.iter().all(|p| p.0 < id.0));
        self.nodes.push(PropositionNode {
            id,
            payload,
            parents,
            origin: Origin::Proposed,
            verdict: NodeVerdict::Validated,
            note: None,
        });
        self.validated_keys.entry(key).or_insert(id);
        Ok(id)
    }

    /// Logs a rejected candidate. Its parents are kept only if they are
    /// valid references, so the log never dangles.
    pub fn add_rejected(&mut self, payload: P, parents: Vec<NodeId>, note: String) -> NodeId {
        let id = NodeId(self.nodes.len());
        let parents = if self.check_parents(&parents).is_ok() {
            parents
        } else {
            Vec::new()
        };
        self.nodes.push(PropositionNode {
            id,
            payload,
            parents,
            origin: Origin::Proposed,
            verdict: NodeVerdict::Rejected,
            note: Some(note),
        });
        id
    }

    /// Re-checks every structural invariant. Used by tests and the
    /// randomized invariant suite.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut premises = Vec::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if node.id.0 != i {
                return Err(format!("node at {i} has id {}", node.id));
            }
            if node.origin == Origin::Premise {
                premises.push(node.id);
                if !node.parents.is_empty() {
                    return Err(format!("premise {} has parents", node.id));
                }
            }
            for p in &node.parents {
                if p.0 >= i {
                    return Err(format!("{} names later parent {p}", node.id));
                }
                if !self.nodes[p.0].is_validated() {
                    return Err(format!("{} names rejected parent {p}", node.id));
                }
            }
        }
        if premises != self.premise_ids {
            return Err("premise id list out of sync".into());
        }
        Ok(())
    }
}

/// Ancestor closure of `target` in topological (insertion) order,
/// including `target` itself.
pub fn extract_derivation<P>(dag: &ReasoningDag<P>, target: NodeId) -> Result<Vec<NodeId>, EngineError> {
    let node = dag.node(target)?;
    if !node.is_validated() {
        return Err(EngineError::RejectedParent(target));
    }
    let mut keep = vec![false; target.0 + 1];
    keep[target.0] = true;
    // Parents always precede children, so one backward sweep suffices.
    for i in (0..=target.0).rev() {
        if keep[i] {
            for p in &dag.nodes[i].parents {
                keep[p.0] = true;
            }
        }
    }
    Ok(keep
        .iter()
        .enumerate()
        .filter(|(_, k)| **k)
        .map(|(i, _)| NodeId(i))
        .collect())
}
