//! The admissible subnetwork: arcs on cheapest super-source to super-sink
//! paths once terminals are priced by an optimal transportation dual.

use thiserror::Error;

use crate::netcore::{ArcId, ArcSet, Network, NodeId};
use crate::paths::{cheapest_paths_arcs, CostGraph, PathsError};
use crate::scalar::Scalar;
use crate::transport::DualSolution;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdmissibleError {
    #[error("extended network has a negative-cost cycle")]
    NegativeCycle,
    #[error("cheapest super-terminal path costs {0}, the dual is not feasible")]
    NegativeOptimum(String),
    #[error("terminal {0} has no incident admissible arc")]
    Uncovered(NodeId),
}

/// The base network plus a super-source joined to every source at cost
/// `-y[s]` and every sink joined to a super-sink at cost `y[t]`. Added arcs
/// have unbounded capacity and zero transit, so only their costs are kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedNetwork<T = Rational> {
    /// Base arcs first (same ids as the network), then terminal arcs.
    pub graph: CostGraph<T>,
    pub base_arc_count: usize,
    pub super_source: NodeId,
    pub super_sink: NodeId,
    pub sources: Vec<NodeId>,
    pub sinks: Vec<NodeId>,
}

impl<T: Scalar> ExtendedNetwork<T> {
    pub fn terminal_arcs(&self) -> &[(NodeId, NodeId, T)] {
        &self.graph.arcs[self.base_arc_count..]
    }
}

pub fn extend<T: Scalar>(network: &Network<T>, dual: &DualSolution<T>) -> ExtendedNetwork<T> {
    let mut graph = CostGraph::from_network(network);
    let base_arc_count = graph.arcs.len();
    let super_source = NodeId(graph.node_count);
    let super_sink = NodeId(graph.node_count + 1);
    graph.node_count += 2;
    let sources = network.sources();
    let sinks = network.sinks();
    for &s in &sources {
        graph.arcs.push((super_source, s, -dual.get(s)));
    }
    for &t in &sinks {
        graph.arcs.push((t, super_sink, dual.get(t)));
    }
    ExtendedNetwork {
        graph,
        base_arc_count,
        super_source,
        super_sink,
        sources,
        sinks,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subnetwork<T = Rational> {
    pub arcs: ArcSet,
    /// Cost of a cheapest super-source to super-sink path, `None` when the
    /// super-sink is unreachable.
    pub cheapest_cost: Option<T>,
}

impl<T: Scalar> Subnetwork<T> {
    pub fn contains(&self, a: ArcId) -> bool {
        self.arcs.contains(&a)
    }
}

/// Original arcs lying on a cheapest super-source to super-sink path.
///
/// Returns an empty subnetwork when no such path exists. Every terminal must
/// touch at least one admissible arc; anything else means the dual was not
/// optimal for the balances of the network.
pub fn admissible_arcs<T: Scalar>(extended: &ExtendedNetwork<T>) -> Result<Subnetwork<T>, AdmissibleError> {
    let (all, cost) = match cheapest_paths_arcs(&extended.graph, extended.super_source, extended.super_sink) {
        Ok(found) => found,
        Err(PathsError::NoPath { .. }) => {
            return Ok(Subnetwork {
                arcs: ArcSet::new(),
                cheapest_cost: None,
            })
        }
        Err(PathsError::NegativeCycle) => return Err(AdmissibleError::NegativeCycle),
    };
    if cost.is_negative() {
        return Err(AdmissibleError::NegativeOptimum(cost.to_string()));
    }
    let arcs: ArcSet = all.into_iter().filter(|a| a.0 < extended.base_arc_count).collect();
    let base = &extended.graph.arcs[..extended.base_arc_count];
    for &s in &extended.sources {
        if !arcs.iter().any(|a| base[a.0].0 == s) {
            return Err(AdmissibleError::Uncovered(s));
        }
    }
    for &t in &extended.sinks {
        if !arcs.iter().any(|a| base[a.0].1 == t) {
            return Err(AdmissibleError::Uncovered(t));
        }
    }
    Ok(Subnetwork {
        arcs,
        cheapest_cost: Some(cost),
    })
}
