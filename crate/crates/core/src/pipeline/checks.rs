//! Independent consistency checks on solved instances.
//!
//! These re-derive facts that must hold for a correct answer (path
//! structure of optimal flows, monotone time profiles, agreement with the
//! oracle) without trusting the solver's own bookkeeping.

use std::collections::BTreeMap;

use super::{
    admissible_subnetwork, oracle_quickest_mincost, scale_transits, solve_quickest_mincost, transport_stage,
    SolveError, SolveOptions, SolveReport, TransportSummary,
};
use crate::netcore::{path_cost, ArcId, ArcSet, Network, NodeId, Path};
use crate::paths::cheapest_paths_subnetwork;
use crate::scalar::Scalar;
use crate::staticflow::{decompose, StaticFlow};
use crate::temporal::{
    expand, feasible, horizon_bounds, mincost_over_time, ExpandedArc, FlowOverTime, TemporalError, TimeExpandedGraph,
};

/// All simple `s`-`t` paths; parallel arcs give distinct paths.
pub fn simple_paths<T: Scalar>(network: &Network<T>, s: NodeId, t: NodeId) -> Vec<Path> {
    let mut out_arcs: Vec<Vec<ArcId>> = vec![Vec::new(); network.node_count()];
    for id in network.arc_ids() {
        out_arcs[network.arc(id).tail.0].push(id);
    }
    let mut found = Vec::new();
    let mut on_path = vec![false; network.node_count()];
    let mut stack = Vec::new();
    fn walk<T: Scalar>(
        network: &Network<T>,
        out_arcs: &[Vec<ArcId>],
        v: NodeId,
        t: NodeId,
        on_path: &mut [bool],
        stack: &mut Vec<ArcId>,
        found: &mut Vec<Path>,
    ) {
        if v == t {
            found.push(Path(stack.clone()));
            return;
        }
        on_path[v.0] = true;
        for &a in &out_arcs[v.0] {
            let h = network.arc(a).head;
            if !on_path[h.0] {
                stack.push(a);
                walk(network, out_arcs, h, t, on_path, stack, found);
                stack.pop();
            }
        }
        on_path[v.0] = false;
    }
    if s != t {
        walk(network, &out_arcs, s, t, &mut on_path, &mut stack, &mut found);
    }
    found
}

/// A pair whose admissibility disagrees with membership in the subnetwork.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathMismatch {
    pub source: NodeId,
    pub sink: NodeId,
    pub path: Path,
    pub admissible: bool,
    pub inside: bool,
}

/// For every source/sink pair and every simple path between them: the path
/// is admissible (active pair, cheapest cost) exactly when all its arcs lie
/// in `arcs`.
pub fn path_equivalence<T: Scalar>(
    network: &Network<T>,
    summary: &TransportSummary<T>,
    arcs: &ArcSet,
) -> Vec<PathMismatch> {
    let mut mismatches = Vec::new();
    for s in network.sources() {
        for t in network.sinks() {
            let cheapest = summary.pair_costs.get(s, t);
            let active = summary.active.contains(s, t);
            for path in simple_paths(network, s, t) {
                let cost = path_cost(network, &path).expect("enumerated paths are valid");
                let admissible = active && cheapest == Some(&cost);
                let inside = path.arcs().iter().all(|a| arcs.contains(a));
                if admissible != inside {
                    mismatches.push(PathMismatch {
                        source: s,
                        sink: t,
                        path,
                        admissible,
                        inside,
                    });
                }
            }
        }
    }
    mismatches
}

/// Static flow on the time-expanded graph carrying `schedule`, with holdover
/// flow derived from the stock at each node. Needs integral transits.
pub fn expansion_flow<T: Scalar>(
    network: &Network<T>,
    schedule: &FlowOverTime<T>,
) -> Result<(TimeExpandedGraph<T>, StaticFlow<T>), TemporalError> {
    let graph = expand(network, schedule.horizon)?;
    let rate = |arc: ArcId, layer: u64| {
        schedule.arcs[arc.0]
            .iter()
            .find(|p| p.start <= layer && layer < p.end)
            .map_or_else(T::zero, |p| p.rate.clone())
    };
    let n = network.node_count();
    let horizon = schedule.horizon as usize;
    // stock[k][v]: amount at v during interval k before it moves on
    let mut arriving = vec![vec![T::zero(); n]; horizon];
    let mut leaving = vec![vec![T::zero(); n]; horizon];
    for (kind, arc) in graph.kinds.iter().zip(&graph.flow.arcs) {
        if let ExpandedArc::Movement { arc: a, layer } = kind {
            let x = rate(*a, *layer);
            let head_layer = arc.head.0 / n;
            arriving[head_layer][arc.head.0 % n] += x.clone();
            leaving[*layer as usize][arc.tail.0 % n] += x;
        }
    }
    let mut held = vec![vec![T::zero(); n]; horizon];
    let mut carry = vec![T::zero(); n];
    for k in 0..horizon {
        for v in 0..n {
            let mut stock = carry[v].clone() + arriving[k][v].clone() - leaving[k][v].clone();
            if k == 0 && network.balances()[v].is_positive() {
                stock += network.balances()[v].clone();
            }
            held[k][v] = stock.clone();
            carry[v] = stock;
        }
    }
    let values = graph
        .kinds
        .iter()
        .map(|kind| match kind {
            ExpandedArc::Movement { arc, layer } => rate(*arc, *layer),
            ExpandedArc::Holdover { node, layer } => held[*layer as usize][node.0].clone(),
            ExpandedArc::Supply { node } => network.balance(*node).clone(),
            ExpandedArc::Demand { node } => -network.balance(*node).clone(),
        })
        .collect();
    Ok((graph, StaticFlow(values)))
}

/// One source-to-sink route of a schedule, projected onto original arcs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UsedRoute<T> {
    pub source: NodeId,
    pub sink: NodeId,
    pub arcs: Vec<ArcId>,
    pub amount: T,
    pub cost: T,
}

/// Path decomposition of the expansion flow of `schedule`. `None` when the
/// reconstructed flow is not feasible in the expansion.
pub fn used_routes<T: Scalar>(network: &Network<T>, schedule: &FlowOverTime<T>) -> Option<Vec<UsedRoute<T>>> {
    let (graph, flow) = expansion_flow(network, schedule).ok()?;
    if !flow.is_feasible(&graph.flow) {
        return None;
    }
    let n = network.node_count();
    let routes = decompose(&graph.flow, &flow)
        .paths
        .into_iter()
        .map(|p| {
            let arcs: Vec<ArcId> = p
                .arcs
                .iter()
                .filter_map(|e| match graph.kinds[e.0] {
                    ExpandedArc::Movement { arc, .. } => Some(arc),
                    _ => None,
                })
                .collect();
            let first = graph.flow.arcs[p.arcs[0].0].head;
            let last = graph.flow.arcs[p.arcs[p.arcs.len() - 1].0].tail;
            let cost = arcs.iter().fold(T::zero(), |acc, a| acc + network.arc(*a).cost.clone());
            UsedRoute {
                source: NodeId(first.0 % n),
                sink: NodeId(last.0 % n),
                arcs,
                amount: p.amount,
                cost,
            }
        })
        .collect();
    Some(routes)
}

/// Every route of the schedule joins an active pair at its cheapest cost.
pub fn routes_are_admissible<T: Scalar>(summary: &TransportSummary<T>, routes: &[UsedRoute<T>]) -> bool {
    routes
        .iter()
        .all(|r| summary.active.contains(r.source, r.sink) && summary.pair_costs.get(r.source, r.sink) == Some(&r.cost))
}

/// Feasibility and min-cost values for every horizon `0..=upto`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimeProfile<T> {
    pub feasible: Vec<bool>,
    pub mincost: Vec<Option<T>>,
}

impl<T: Scalar> TimeProfile<T> {
    pub fn feasibility_is_monotone(&self) -> bool {
        self.feasible.windows(2).all(|w| !w[0] || w[1])
    }

    pub fn cost_is_non_increasing(&self) -> bool {
        self.mincost.windows(2).all(|w| match (&w[0], &w[1]) {
            (Some(a), Some(b)) => b <= a,
            (Some(_), None) => false,
            (None, _) => true,
        })
    }

    /// Both computations agree on which horizons are feasible.
    pub fn consistent(&self) -> bool {
        self.feasible.iter().zip(&self.mincost).all(|(f, c)| *f == c.is_some())
    }
}

pub fn time_profile<T: Scalar>(network: &Network<T>, upto: u64) -> Result<TimeProfile<T>, TemporalError> {
    let mut profile = TimeProfile {
        feasible: Vec::new(),
        mincost: Vec::new(),
    };
    for t in 0..=upto {
        profile.feasible.push(feasible(network, t)?.feasible);
        profile.mincost.push(match mincost_over_time(network, t) {
            Ok((cost, _)) => Some(cost),
            Err(TemporalError::InfeasibleAtHorizon(_)) => None,
            Err(e) => return Err(e),
        });
    }
    Ok(profile)
}

/// Every check `verify` runs, by name.
#[derive(Clone, Debug)]
pub struct Verification<T: Scalar> {
    pub report: SolveReport<T>,
    pub checks: BTreeMap<String, bool>,
}

impl<T: Scalar> Verification<T> {
    pub fn passed(&self) -> bool {
        self.checks.values().all(|&ok| ok)
    }
}

/// Solves `network` and cross-checks the answer. Path enumeration is skipped
/// above `enumerate_limit` nodes, the oracle and time profile when the
/// oracle limits are exceeded.
pub fn verify_instance<T: Scalar>(
    network: &Network<T>,
    options: &SolveOptions,
    enumerate_limit: usize,
) -> Result<Verification<T>, SolveError<T>> {
    let report = solve_quickest_mincost(network, options)?;
    let mut checks = report.checks.clone();
    let summary = report
        .transport
        .as_ref()
        .expect("quickest-mincost keeps the transportation data");
    let arcs = report.subnetwork.clone().unwrap_or_default();
    let (scaled, _) = scale_transits(network)?;

    if network.node_count() <= enumerate_limit {
        checks.insert(
            "path_equivalence".into(),
            path_equivalence(network, summary, &arcs).is_empty(),
        );
    }
    let schedule = report.schedule.as_ref().expect("quickest-mincost emits a schedule");
    checks.insert(
        "routes_admissible".into(),
        used_routes(&scaled, schedule).is_some_and(|r| routes_are_admissible(summary, &r)),
    );
    let sources = network.sources();
    let sinks = network.sinks();
    if let ([s], [t]) = (sources.as_slice(), sinks.as_slice()) {
        checks.insert(
            "single_pair_cheapest_paths".into(),
            cheapest_paths_subnetwork(network, *s, *t).is_ok_and(|c| c == arcs),
        );
    }

    match oracle_quickest_mincost(network, &options.oracle) {
        Ok(oracle) => {
            checks.insert("oracle_cost".into(), oracle.cost == report.cost);
            checks.insert("oracle_horizon".into(), Some(oracle.horizon) == report.horizon);
            let profile = time_profile(&scaled, oracle.horizon_bound)?;
            checks.insert(
                "feasibility_monotone".into(),
                profile.feasibility_is_monotone() && profile.consistent(),
            );
            checks.insert("mincost_non_increasing".into(), profile.cost_is_non_increasing());
            checks.insert(
                "mincost_reaches_optimum".into(),
                profile.mincost.last().cloned().flatten().as_ref() == Some(&report.cost),
            );
        }
        Err(SolveError::TooLarge(_)) => {}
        Err(e) => return Err(e),
    }
    Ok(Verification { report, checks })
}

/// Admissible subnetwork of a network, solving the transportation problem
/// on the way.
pub fn admissible_of<T: Scalar>(network: &Network<T>) -> Result<(TransportSummary<T>, ArcSet), SolveError<T>> {
    let summary = transport_stage(network)?;
    let arcs = admissible_subnetwork(network, &summary)?.arcs;
    Ok((summary, arcs))
}

/// Upper horizon bound used by the oracle, on the transit-scaled network.
pub fn oracle_horizon_bound<T: Scalar>(network: &Network<T>) -> Result<u64, SolveError<T>> {
    let (scaled, _) = scale_transits(network)?;
    Ok(horizon_bounds(&scaled)?.1)
}
