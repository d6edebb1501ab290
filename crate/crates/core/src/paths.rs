//! Cheapest paths under conservative (possibly negative) arc costs.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::netcore::{ArcId, ArcSet, Network, NodeId};
use crate::scalar::Scalar;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathsError {
    #[error("negative-cost cycle reachable during label correction")]
    NegativeCycle,
    #[error("no path from {from} to {to}")]
    NoPath { from: NodeId, to: NodeId },
}

/// A bare directed graph with arc costs. Used for networks augmented with
/// extra terminals whose arcs carry no capacity or transit data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostGraph<T = Rational> {
    pub node_count: usize,
    pub arcs: Vec<(NodeId, NodeId, T)>,
}

impl<T: Scalar> CostGraph<T> {
    pub fn from_network(network: &Network<T>) -> Self {
        CostGraph {
            node_count: network.node_count(),
            arcs: network
                .arcs()
                .iter()
                .map(|a| (a.tail, a.head, a.cost.clone()))
                .collect(),
        }
    }

    fn reversed(&self) -> Self {
        CostGraph {
            node_count: self.node_count,
            arcs: self.arcs.iter().map(|(t, h, c)| (*h, *t, c.clone())).collect(),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Cost of a cheapest path from the root to each node.
    FromRoot,
    /// Cost of a cheapest path from each node to the root.
    ToRoot,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostLabels<T = Rational> {
    pub root: NodeId,
    pub direction: Direction,
    /// `None` marks nodes with no path to or from the root.
    pub labels: Vec<Option<T>>,
}

impl<T: Scalar> CostLabels<T> {
    pub fn get(&self, v: NodeId) -> Option<&T> {
        self.labels[v.0].as_ref()
    }
}

/// Label-correcting shortest paths from `root`.
pub fn labels_from<T: Scalar>(graph: &CostGraph<T>, root: NodeId) -> Result<Vec<Option<T>>, PathsError> {
    let n = graph.node_count;
    let mut label: Vec<Option<T>> = vec![None; n];
    label[root.0] = Some(T::zero());
    for _ in 0..n {
        let mut changed = false;
        for (t, h, c) in &graph.arcs {
            let Some(lt) = &label[t.0] else { continue };
            let cand = lt.clone() + c.clone();
            if label[h.0].as_ref().is_none_or(|lh| cand < *lh) {
                label[h.0] = Some(cand);
                changed = true;
            }
        }
        if !changed {
            return Ok(label);
        }
    }
    // still changing after n rounds
    Err(PathsError::NegativeCycle)
}

/// Cheapest-path costs from `s` to every node.
pub fn cheapest_from<T: Scalar>(network: &Network<T>, s: NodeId) -> Result<CostLabels<T>, PathsError> {
    let labels = labels_from(&CostGraph::from_network(network), s)?;
    Ok(CostLabels {
        root: s,
        direction: Direction::FromRoot,
        labels,
    })
}

/// Cheapest-path costs from every node to `t`.
pub fn cheapest_to<T: Scalar>(network: &Network<T>, t: NodeId) -> Result<CostLabels<T>, PathsError> {
    let labels = labels_from(&CostGraph::from_network(network).reversed(), t)?;
    Ok(CostLabels {
        root: t,
        direction: Direction::ToRoot,
        labels,
    })
}

/// Arcs `(v, w)` with `alpha[v] + c + beta[w] == alpha[t]`, i.e. the arcs on
/// at least one cheapest `s`-`t` path, together with that cheapest cost.
pub fn cheapest_paths_arcs<T: Scalar>(graph: &CostGraph<T>, s: NodeId, t: NodeId) -> Result<(ArcSet, T), PathsError> {
    let alpha = labels_from(graph, s)?;
    let beta = labels_from(&graph.reversed(), t)?;
    let target = alpha[t.0].clone().ok_or(PathsError::NoPath { from: s, to: t })?;
    let arcs = graph
        .arcs
        .iter()
        .enumerate()
        .filter(|(_, (v, w, c))| match (&alpha[v.0], &beta[w.0]) {
            (Some(a), Some(b)) => a.clone() + c.clone() + b.clone() == target,
            _ => false,
        })
        .map(|(i, _)| ArcId(i))
        .collect();
    Ok((arcs, target))
}

/// The cheapest-paths subnetwork between `s` and `t`.
pub fn cheapest_paths_subnetwork<T: Scalar>(network: &Network<T>, s: NodeId, t: NodeId) -> Result<ArcSet, PathsError> {
    cheapest_paths_arcs(&CostGraph::from_network(network), s, t).map(|(arcs, _)| arcs)
}

/// Cheapest-path cost for every source/sink pair joined by some path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairCostMatrix<T = Rational> {
    pub sources: Vec<NodeId>,
    pub sinks: Vec<NodeId>,
    pub costs: BTreeMap<(NodeId, NodeId), T>,
}

impl<T: Scalar> PairCostMatrix<T> {
    pub fn get(&self, s: NodeId, t: NodeId) -> Option<&T> {
        self.costs.get(&(s, t))
    }

    pub fn len(&self) -> usize {
        self.costs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }
}

pub fn pair_costs<T: Scalar>(network: &Network<T>) -> Result<PairCostMatrix<T>, PathsError> {
    let graph = CostGraph::from_network(network);
    let sources = network.sources();
    let sinks = network.sinks();
    let mut costs = BTreeMap::new();
    for &s in &sources {
        let alpha = labels_from(&graph, s)?;
        for &t in &sinks {
            if let Some(c) = &alpha[t.0] {
                costs.insert((s, t), c.clone());
            }
        }
    }
    Ok(PairCostMatrix { sources, sinks, costs })
}
