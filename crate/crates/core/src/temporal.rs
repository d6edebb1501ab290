//! Flows over time on a unit time grid.
//!
//! A horizon `T` is split into the unit intervals `[k, k + 1)` for
//! `k = 0..T`. The time-expanded graph has one copy of every node per
//! interval; flow entering arc `a` during interval `k` leaves it during
//! interval `k + transit(a)`, so the movement arc exists only when
//! `k + transit(a) <= T - 1`. Holdover arcs let flow wait at any node.
//! Transit times must be non-negative integers and a capacity is the amount
//! an arc accepts per interval.

use std::collections::VecDeque;

use thiserror::Error;

use crate::netcore::{ArcId, Network, NodeId};
use crate::scalar::Scalar;
use crate::staticflow::{max_flow, min_cost_flow, Capacity, FlowError, FlowNetwork, StaticFlow};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemporalError {
    #[error("arc {0} has a transit time that is not a non-negative integer")]
    NonIntegerTransit(ArcId),
    #[error("no transshipment over time exists")]
    Infeasible,
    #[error("no transshipment over time within horizon {0}")]
    InfeasibleAtHorizon(u64),
    #[error("horizon {needed} exceeds the configured limit {limit}")]
    HorizonGuard { needed: u64, limit: u64 },
    #[error("internal flow error: {0}")]
    Flow(String),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ExpandedArc {
    /// Original arc entered during interval `layer`.
    Movement {
        arc: ArcId,
        layer: u64,
    },
    /// Flow waiting at `node` from interval `layer` to `layer + 1`.
    Holdover {
        node: NodeId,
        layer: u64,
    },
    Supply {
        node: NodeId,
    },
    Demand {
        node: NodeId,
    },
}

/// Static layered graph whose flows are flows over time.
#[derive(Clone, Debug)]
pub struct TimeExpandedGraph<T = Rational> {
    pub horizon: u64,
    pub base_nodes: usize,
    pub flow: FlowNetwork<T>,
    /// What each arc of `flow` stands for.
    pub kinds: Vec<ExpandedArc>,
    pub super_source: NodeId,
    pub super_sink: NodeId,
}

impl<T: Scalar> TimeExpandedGraph<T> {
    pub fn layers(&self) -> u64 {
        self.horizon
    }

    /// Copy of `v` for interval `layer`.
    pub fn copy_of(&self, v: NodeId, layer: u64) -> NodeId {
        debug_assert!(layer < self.horizon);
        NodeId(layer as usize * self.base_nodes + v.0)
    }

    pub fn movement_arcs(&self, arc: ArcId) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.kinds.iter().enumerate().filter_map(move |(i, k)| match k {
            ExpandedArc::Movement { arc: a, layer } if *a == arc => Some((i, *layer)),
            _ => None,
        })
    }
}

pub(crate) fn integer_transits<T: Scalar>(network: &Network<T>) -> Result<Vec<u64>, TemporalError> {
    network
        .arc_ids()
        .map(|id| {
            network
                .arc(id)
                .transit
                .to_i64_exact()
                .and_then(|t| u64::try_from(t).ok())
                .ok_or(TemporalError::NonIntegerTransit(id))
        })
        .collect()
}

/// Builds the time-expanded graph for horizon `horizon`, wired to the
/// network's balances through a super-source and super-sink.
pub fn expand<T: Scalar>(network: &Network<T>, horizon: u64) -> Result<TimeExpandedGraph<T>, TemporalError> {
    let transit = integer_transits(network)?;
    let n = network.node_count();
    let layers = horizon as usize;
    let mut flow = FlowNetwork::new(n * layers);
    let mut kinds = Vec::new();
    let at = |v: NodeId, k: u64| NodeId(k as usize * n + v.0);
    for k in 0..horizon {
        for (i, a) in network.arcs().iter().enumerate() {
            let arrive = k + transit[i];
            if arrive < horizon {
                flow.add_arc(
                    at(a.tail, k),
                    at(a.head, arrive),
                    Capacity::Finite(a.capacity.clone()),
                    a.cost.clone(),
                );
                kinds.push(ExpandedArc::Movement {
                    arc: ArcId(i),
                    layer: k,
                });
            }
        }
        if k + 1 < horizon {
            for v in network.nodes() {
                flow.add_arc(at(v, k), at(v, k + 1), Capacity::Infinite, T::zero());
                kinds.push(ExpandedArc::Holdover { node: v, layer: k });
            }
        }
    }
    let super_source = flow.add_node();
    let super_sink = flow.add_node();
    let total = network.total_supply();
    flow.supply[super_source.0] = total.clone();
    flow.supply[super_sink.0] = -total;
    if horizon > 0 {
        for v in network.nodes() {
            let b = network.balance(v);
            if b.is_positive() {
                flow.add_arc(super_source, at(v, 0), Capacity::Finite(b.clone()), T::zero());
                kinds.push(ExpandedArc::Supply { node: v });
            } else if b.is_negative() {
                flow.add_arc(at(v, horizon - 1), super_sink, Capacity::Finite(-b.clone()), T::zero());
                kinds.push(ExpandedArc::Demand { node: v });
            }
        }
    }
    Ok(TimeExpandedGraph {
        horizon,
        base_nodes: n,
        flow,
        kinds,
        super_source,
        super_sink,
    })
}

/// Constant-rate piece of an arc's inflow: `rate` during `[start, end)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RateInterval<T = Rational> {
    pub start: u64,
    pub end: u64,
    pub rate: T,
}

/// Inflow rate schedule per arc, in arc order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowOverTime<T = Rational> {
    pub horizon: u64,
    pub arcs: Vec<Vec<RateInterval<T>>>,
    /// Optional amount stored at each node at the end of each interval.
    pub storage: Option<Vec<Vec<T>>>,
}

impl<T: Scalar> FlowOverTime<T> {
    pub fn empty(arc_count: usize, horizon: u64) -> Self {
        FlowOverTime {
            horizon,
            arcs: vec![Vec::new(); arc_count],
            storage: None,
        }
    }

    /// Reads the movement arcs of a static flow on the expansion, merging
    /// equal-rate neighbouring intervals.
    pub fn from_expansion(
        graph: &TimeExpandedGraph<T>,
        flow: &StaticFlow<T>,
        arc_count: usize,
        with_storage: bool,
    ) -> Self {
        let mut per_arc: Vec<Vec<(u64, T)>> = vec![Vec::new(); arc_count];
        let mut storage = with_storage.then(|| vec![vec![T::zero(); graph.horizon as usize]; graph.base_nodes]);
        for (kind, x) in graph.kinds.iter().zip(&flow.0) {
            match kind {
                ExpandedArc::Movement { arc, layer } if x.is_positive() => {
                    per_arc[arc.0].push((*layer, x.clone()));
                }
                ExpandedArc::Holdover { node, layer } => {
                    if let Some(s) = storage.as_mut() {
                        s[node.0][*layer as usize] = x.clone();
                    }
                }
                _ => {}
            }
        }
        let arcs = per_arc
            .into_iter()
            .map(|mut pieces| {
                pieces.sort_by_key(|(k, _)| *k);
                let mut out: Vec<RateInterval<T>> = Vec::new();
                for (k, x) in pieces {
                    match out.last_mut() {
                        Some(last) if last.end == k && last.rate == x => last.end = k + 1,
                        _ => out.push(RateInterval {
                            start: k,
                            end: k + 1,
                            rate: x,
                        }),
                    }
                }
                out
            })
            .collect();
        FlowOverTime {
            horizon: graph.horizon,
            arcs,
            storage,
        }
    }

    /// `sum_a cost(a) * sum rate * length`.
    pub fn cost(&self, network: &Network<T>) -> T {
        self.arcs.iter().enumerate().fold(T::zero(), |acc, (i, pieces)| {
            acc + network.arcs()[i].cost.clone() * amount(pieces)
        })
    }

    /// Total amount sent into each arc.
    pub fn arc_amounts(&self) -> Vec<T> {
        self.arcs.iter().map(|p| amount(p)).collect()
    }

    /// Re-indexes arcs of a restricted network back to the full network.
    pub fn remap(self, origin: &[ArcId], arc_count: usize) -> Self {
        let mut arcs = vec![Vec::new(); arc_count];
        for (local, pieces) in self.arcs.into_iter().enumerate() {
            arcs[origin[local].0] = pieces;
        }
        FlowOverTime {
            horizon: self.horizon,
            arcs,
            storage: self.storage,
        }
    }
}

fn amount<T: Scalar>(pieces: &[RateInterval<T>]) -> T {
    pieces.iter().fold(T::zero(), |acc, p| {
        acc + p.rate.clone() * T::from_i64((p.end - p.start) as i64)
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Feasibility<T = Rational> {
    pub feasible: bool,
    /// Largest amount deliverable within the horizon.
    pub value: T,
    pub witness: StaticFlow<T>,
    pub graph_arcs: usize,
}

fn flow_err<T: Scalar>(e: FlowError<T>) -> TemporalError {
    TemporalError::Flow(e.to_string())
}

/// Whether every supply can reach the sinks within `horizon`.
pub fn feasible<T: Scalar>(network: &Network<T>, horizon: u64) -> Result<Feasibility<T>, TemporalError> {
    let (feas, _) = feasible_with_graph(network, horizon)?;
    Ok(feas)
}

fn feasible_with_graph<T: Scalar>(
    network: &Network<T>,
    horizon: u64,
) -> Result<(Feasibility<T>, TimeExpandedGraph<T>), TemporalError> {
    let graph = expand(network, horizon)?;
    let mf = max_flow(&graph.flow, graph.super_source, graph.super_sink).map_err(flow_err)?;
    let feasible = mf.value == network.total_supply();
    let feas = Feasibility {
        feasible,
        value: mf.value,
        witness: mf.flow,
        graph_arcs: graph.flow.arcs.len(),
    };
    Ok((feas, graph))
}

/// Minimum cost transshipment over time with the given horizon.
pub fn mincost_over_time<T: Scalar>(network: &Network<T>, horizon: u64) -> Result<(T, FlowOverTime<T>), TemporalError> {
    let graph = expand(network, horizon)?;
    match min_cost_flow(&graph.flow) {
        Ok(mcf) => {
            let schedule = FlowOverTime::from_expansion(&graph, &mcf.flow, network.arc_count(), false);
            Ok((mcf.cost, schedule))
        }
        Err(FlowError::Infeasible { .. }) => Err(TemporalError::InfeasibleAtHorizon(horizon)),
        Err(e) => Err(flow_err(e)),
    }
}

/// Whether the balances can be met at all, ignoring time.
pub fn statically_feasible<T: Scalar>(network: &Network<T>) -> bool {
    let mut net = FlowNetwork::from_network(network);
    for a in &mut net.arcs {
        a.capacity = Capacity::Infinite;
    }
    let total = network.total_supply();
    let ss = net.add_node();
    let tt = net.add_node();
    for v in network.nodes() {
        let b = network.balance(v);
        if b.is_positive() {
            net.add_arc(ss, v, Capacity::Finite(b.clone()), T::zero());
        } else if b.is_negative() {
            net.add_arc(v, tt, Capacity::Finite(-b.clone()), T::zero());
        }
    }
    match max_flow(&net, ss, tt) {
        Ok(mf) => mf.value == total,
        Err(_) => false,
    }
}

/// Lower and upper bounds on the quickest horizon of a feasible instance.
///
/// The lower bound is one interval more than the largest, over terminals, of
/// the shortest transit to (from) any reachable sink (source). The upper
/// bound routes each connected source/sink pair in turn along a single path:
/// `ceil(B / u_min) + pairs * (1 + (n - 1) * tau_max)`.
pub fn horizon_bounds<T: Scalar>(network: &Network<T>) -> Result<(u64, u64), TemporalError> {
    let transit = integer_transits(network)?;
    let total = network.total_supply();
    if total.is_zero() {
        return Ok((0, 0));
    }
    let sources = network.sources();
    let sinks = network.sinks();
    let forward = |root: NodeId, reverse: bool| transit_distances(network, &transit, root, reverse);
    let mut lb = 0u64;
    let mut pairs = 0u64;
    for &s in &sources {
        let d = forward(s, false);
        let reach: Vec<u64> = sinks.iter().filter_map(|t| d[t.0]).collect();
        pairs += reach.len() as u64;
        if let Some(m) = reach.iter().min() {
            lb = lb.max(m + 1);
        }
    }
    for &t in &sinks {
        let d = forward(t, true);
        if let Some(m) = sources.iter().filter_map(|s| d[s.0]).min() {
            lb = lb.max(m + 1);
        }
    }
    let u_min = network
        .arcs()
        .iter()
        .map(|a| a.capacity.clone())
        .min()
        .ok_or(TemporalError::Infeasible)?;
    let tau_max = transit.iter().copied().max().unwrap_or(0);
    let n = network.node_count() as u64;
    let send = (total / u_min).ceil_i64().unwrap_or(i64::MAX).max(0) as u64;
    let ub = send + pairs * (1 + n.saturating_sub(1) * tau_max);
    Ok((lb.max(1), ub.max(lb.max(1))))
}

// Shortest transit-time distances (non-negative integers) by label correction.
fn transit_distances<T: Scalar>(
    network: &Network<T>,
    transit: &[u64],
    root: NodeId,
    reverse: bool,
) -> Vec<Option<u64>> {
    let n = network.node_count();
    let mut dist = vec![None; n];
    dist[root.0] = Some(0u64);
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        let dv = dist[v.0].unwrap_or(0);
        for (i, a) in network.arcs().iter().enumerate() {
            let (from, to) = if reverse { (a.head, a.tail) } else { (a.tail, a.head) };
            if from != v {
                continue;
            }
            let cand = dv + transit[i];
            if dist[to.0].is_none_or(|d| cand < d) {
                dist[to.0] = Some(cand);
                queue.push_back(to);
            }
        }
    }
    dist
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct QuickestOptions {
    /// Largest horizon the search may expand.
    pub max_horizon: Option<u64>,
    pub storage_trace: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quickest<T = Rational> {
    pub horizon: u64,
    pub schedule: FlowOverTime<T>,
    /// Cost of the extracted schedule.
    pub cost: T,
    /// Horizons probed, in order.
    pub probes: Vec<(u64, bool)>,
}

/// Smallest horizon admitting a transshipment over time: doubling from the
/// lower bound until feasible, then binary search.
pub fn quickest_transshipment<T: Scalar>(
    network: &Network<T>,
    options: QuickestOptions,
) -> Result<Quickest<T>, TemporalError> {
    integer_transits(network)?;
    if network.total_supply().is_zero() {
        return Ok(Quickest {
            horizon: 0,
            schedule: FlowOverTime::empty(network.arc_count(), 0),
            cost: T::zero(),
            probes: Vec::new(),
        });
    }
    if !statically_feasible(network) {
        return Err(TemporalError::Infeasible);
    }
    let (lb, ub) = horizon_bounds(network)?;
    let mut probes = Vec::new();
    let probe = |t: u64, probes: &mut Vec<(u64, bool)>| -> Result<bool, TemporalError> {
        if let Some(limit) = options.max_horizon {
            if t > limit {
                return Err(TemporalError::HorizonGuard { needed: t, limit });
            }
        }
        let ok = feasible(network, t)?.feasible;
        probes.push((t, ok));
        Ok(ok)
    };

    let mut infeasible_below = lb - 1;
    let mut hi = lb;
    while !probe(hi, &mut probes)? {
        if hi >= ub {
            return Err(TemporalError::Flow(format!("no feasible horizon up to the bound {ub}")));
        }
        infeasible_below = hi;
        hi = (hi * 2).min(ub);
    }
    let mut lo = infeasible_below;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if probe(mid, &mut probes)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (feas, graph) = feasible_with_graph(network, hi)?;
    debug_assert!(feas.feasible);
    let schedule = FlowOverTime::from_expansion(&graph, &feas.witness, network.arc_count(), options.storage_trace);
    let cost = schedule.cost(network);
    Ok(Quickest {
        horizon: hi,
        schedule,
        cost,
        probes,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport<T = Rational> {
    pub capacity: bool,
    pub conservation: bool,
    pub balances: bool,
    /// Every interval lies in `[0, horizon - transit)`.
    pub within_horizon: bool,
    pub cost: T,
    pub issues: Vec<String>,
}

impl<T> VerificationReport<T> {
    pub fn passed(&self) -> bool {
        self.capacity && self.conservation && self.balances && self.within_horizon
    }
}

/// Checks a schedule against the network: rates within capacity on every
/// interval, no deficit at any node at any time, every supply shipped and
/// every demand met by the horizon. Also recomputes the cost.
pub fn verify_schedule<T: Scalar>(network: &Network<T>, schedule: &FlowOverTime<T>) -> VerificationReport<T> {
    let mut report = VerificationReport {
        capacity: true,
        conservation: true,
        balances: true,
        within_horizon: true,
        cost: T::zero(),
        issues: Vec::new(),
    };
    let m = network.arc_count();
    let horizon = schedule.horizon;
    if schedule.arcs.len() != m {
        report.within_horizon = false;
        report
            .issues
            .push(format!("schedule lists {} arcs, network has {m}", schedule.arcs.len()));
        return report;
    }
    let transit = match integer_transits(network) {
        Ok(t) => t,
        Err(e) => {
            report.within_horizon = false;
            report.issues.push(e.to_string());
            return report;
        }
    };
    let h = horizon as usize;
    // rate entering each arc per unit interval
    let mut rate = vec![vec![T::zero(); h]; m];
    for (i, pieces) in schedule.arcs.iter().enumerate() {
        for p in pieces {
            if p.start >= p.end || p.end + transit[i] > horizon {
                report.within_horizon = false;
                report.issues.push(format!(
                    "arc a{i}: interval [{}, {}) outside [0, {})",
                    p.start,
                    p.end,
                    horizon.saturating_sub(transit[i])
                ));
                continue;
            }
            if p.rate.is_negative() {
                report.capacity = false;
                report.issues.push(format!("arc a{i}: negative rate {}", p.rate));
            }
            for k in p.start..p.end {
                rate[i][k as usize] += p.rate.clone();
            }
        }
        for (k, r) in rate[i].iter().enumerate() {
            if *r > network.arcs()[i].capacity {
                report.capacity = false;
                report.issues.push(format!(
                    "arc a{i}: rate {r} exceeds capacity {} in [{k}, {})",
                    network.arcs()[i].capacity,
                    k + 1
                ));
            }
        }
    }
    let mut stock: Vec<T> = network
        .balances()
        .iter()
        .map(|b| if b.is_positive() { b.clone() } else { T::zero() })
        .collect();
    for k in 0..h {
        for (i, a) in network.arcs().iter().enumerate() {
            stock[a.tail.0] -= rate[i][k].clone();
            let entered = k as i64 - transit[i] as i64;
            if entered >= 0 {
                stock[a.head.0] += rate[i][entered as usize].clone();
            }
        }
        for v in network.nodes() {
            if stock[v.0].is_negative() {
                report.conservation = false;
                report.issues.push(format!(
                    "node {} runs a deficit of {} by time {}",
                    network.name(v),
                    -stock[v.0].clone(),
                    k + 1
                ));
            }
        }
    }
    for v in network.nodes() {
        let b = network.balance(v);
        let want = if b.is_negative() { -b.clone() } else { T::zero() };
        if stock[v.0] != want {
            report.balances = false;
            report.issues.push(format!(
                "node {} holds {} at the horizon, expected {want}",
                network.name(v),
                stock[v.0]
            ));
        }
    }
    report.cost = schedule.cost(network);
    report
}
