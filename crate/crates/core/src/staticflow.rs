//! Static network flows: maximum flow with a minimum-cut certificate,
//! successive-shortest-path minimum cost flow with node potentials, and
//! path/cycle decomposition.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::collections::VecDeque;

use thiserror::Error;

use crate::netcore::{ArcId, Network, NodeId};
use crate::scalar::Scalar;
use crate::Rational;

/// Arc capacity. `Infinite` is only ever compared, never used in arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Capacity<T> {
    Finite(T),
    Infinite,
}

impl<T: Scalar> Capacity<T> {
    fn is_positive(&self) -> bool {
        match self {
            Capacity::Finite(c) => c.is_positive(),
            Capacity::Infinite => true,
        }
    }

    fn min_with(&self, other: &Capacity<T>) -> Capacity<T> {
        match (self, other) {
            (Capacity::Infinite, x) | (x, Capacity::Infinite) => x.clone(),
            (Capacity::Finite(a), Capacity::Finite(b)) => Capacity::Finite(a.clone().min(b.clone())),
        }
    }

    fn sub(&mut self, amount: &T) {
        if let Capacity::Finite(c) = self {
            *c -= amount.clone();
        }
    }

    fn add(&mut self, amount: &T) {
        if let Capacity::Finite(c) = self {
            *c += amount.clone();
        }
    }

    pub fn finite(&self) -> Option<&T> {
        match self {
            Capacity::Finite(c) => Some(c),
            Capacity::Infinite => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowArc<T = Rational> {
    pub tail: NodeId,
    pub head: NodeId,
    pub capacity: Capacity<T>,
    pub cost: T,
}

/// A static graph with capacities, costs and node supplies (negative supply
/// is demand).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowNetwork<T = Rational> {
    pub node_count: usize,
    pub arcs: Vec<FlowArc<T>>,
    pub supply: Vec<T>,
}

impl<T: Scalar> FlowNetwork<T> {
    pub fn new(node_count: usize) -> Self {
        FlowNetwork {
            node_count,
            arcs: Vec::new(),
            supply: vec![T::zero(); node_count],
        }
    }

    pub fn add_node(&mut self) -> NodeId {
        self.node_count += 1;
        self.supply.push(T::zero());
        NodeId(self.node_count - 1)
    }

    pub fn add_arc(&mut self, tail: NodeId, head: NodeId, capacity: Capacity<T>, cost: T) -> ArcId {
        assert!(tail.0 < self.node_count && head.0 < self.node_count);
        self.arcs.push(FlowArc {
            tail,
            head,
            capacity,
            cost,
        });
        ArcId(self.arcs.len() - 1)
    }

    /// Static view of a network: capacities, costs and balances, transit
    /// times dropped.
    pub fn from_network(network: &Network<T>) -> Self {
        FlowNetwork {
            node_count: network.node_count(),
            arcs: network
                .arcs()
                .iter()
                .map(|a| FlowArc {
                    tail: a.tail,
                    head: a.head,
                    capacity: Capacity::Finite(a.capacity.clone()),
                    cost: a.cost.clone(),
                })
                .collect(),
            supply: network.balances().to_vec(),
        }
    }
}

/// Flow value per arc.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StaticFlow<T = Rational>(pub Vec<T>);

impl<T: Scalar> StaticFlow<T> {
    pub fn zero(arcs: usize) -> Self {
        StaticFlow(vec![T::zero(); arcs])
    }

    pub fn get(&self, a: ArcId) -> &T {
        &self.0[a.0]
    }

    pub fn cost(&self, net: &FlowNetwork<T>) -> T {
        net.arcs
            .iter()
            .zip(&self.0)
            .fold(T::zero(), |acc, (a, x)| acc + a.cost.clone() * x.clone())
    }

    /// Outflow minus inflow at every node.
    pub fn divergence(&self, net: &FlowNetwork<T>) -> Vec<T> {
        let mut div = vec![T::zero(); net.node_count];
        for (a, x) in net.arcs.iter().zip(&self.0) {
            div[a.tail.0] += x.clone();
            div[a.head.0] -= x.clone();
        }
        div
    }

    /// Capacity bounds and conservation against `net.supply`.
    pub fn is_feasible(&self, net: &FlowNetwork<T>) -> bool {
        if self.0.len() != net.arcs.len() {
            return false;
        }
        let bounded = net.arcs.iter().zip(&self.0).all(|(a, x)| {
            !x.is_negative()
                && match &a.capacity {
                    Capacity::Finite(c) => x <= c,
                    Capacity::Infinite => true,
                }
        });
        bounded && self.divergence(net) == net.supply
    }
}

/// Node prices. An optimal flow's residual arcs all satisfy
/// `cost - price[tail] + price[head] >= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Potentials<T = Rational>(pub Vec<T>);

impl<T: Scalar> Potentials<T> {
    pub fn get(&self, v: NodeId) -> &T {
        &self.0[v.0]
    }

    pub fn reduced_cost(&self, arc: &FlowArc<T>) -> T {
        arc.cost.clone() - self.0[arc.tail.0].clone() + self.0[arc.head.0].clone()
    }

    /// True when no residual arc of `flow` has negative reduced cost.
    pub fn certifies(&self, net: &FlowNetwork<T>, flow: &StaticFlow<T>) -> bool {
        net.arcs.iter().zip(&flow.0).all(|(a, x)| {
            let rc = self.reduced_cost(a);
            let forward_open = match &a.capacity {
                Capacity::Finite(c) => x < c,
                Capacity::Infinite => true,
            };
            let backward_open = x.is_positive();
            (!forward_open || !rc.is_negative()) && (!backward_open || !rc.is_positive())
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlowError<T: Scalar = Rational> {
    #[error("source and sink coincide at {0}")]
    Degenerate(NodeId),
    #[error("an infinite-capacity path joins source and sink")]
    Unbounded,
    #[error("supplies sum to {0}, not zero")]
    Unbalanced(T),
    #[error("{unrouted} units cannot leave the node set {cut_side:?}")]
    Infeasible {
        /// Nodes reachable from the supplies once no more flow can be routed;
        /// every arc leaving this set is saturated.
        cut_side: Vec<NodeId>,
        unrouted: T,
    },
    #[error("negative-cost cycle among arcs with positive capacity")]
    NegativeCycle,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxFlow<T = Rational> {
    pub value: T,
    pub flow: StaticFlow<T>,
    /// `true` for nodes on the source side of a minimum cut.
    pub source_side: Vec<bool>,
}

impl<T: Scalar> MaxFlow<T> {
    /// Capacity of the arcs leaving the source side.
    pub fn cut_capacity(&self, net: &FlowNetwork<T>) -> Capacity<T> {
        let mut total = T::zero();
        for a in &net.arcs {
            if self.source_side[a.tail.0] && !self.source_side[a.head.0] {
                match &a.capacity {
                    Capacity::Finite(c) => total += c.clone(),
                    Capacity::Infinite => return Capacity::Infinite,
                }
            }
        }
        Capacity::Finite(total)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinCostFlow<T = Rational> {
    pub flow: StaticFlow<T>,
    pub potentials: Potentials<T>,
    pub cost: T,
}

// Residual graph: arc i of the network becomes edges 2i (forward) and
// 2i + 1 (backward).
struct Residual<T> {
    head: Vec<usize>,
    cap: Vec<Capacity<T>>,
    cost: Vec<T>,
    adj: Vec<Vec<usize>>,
}

impl<T: Scalar> Residual<T> {
    fn new(node_count: usize) -> Self {
        Residual {
            head: Vec::new(),
            cap: Vec::new(),
            cost: Vec::new(),
            adj: vec![Vec::new(); node_count],
        }
    }

    fn add(&mut self, tail: usize, head: usize, cap: Capacity<T>, cost: T) -> usize {
        let e = self.head.len();
        self.head.push(head);
        self.cap.push(cap);
        self.cost.push(cost.clone());
        self.adj[tail].push(e);
        self.head.push(tail);
        self.cap.push(Capacity::Finite(T::zero()));
        self.cost.push(-cost);
        self.adj[head].push(e + 1);
        e
    }

    fn from_net(net: &FlowNetwork<T>) -> Self {
        let mut r = Residual::new(net.node_count);
        for a in &net.arcs {
            r.add(a.tail.0, a.head.0, a.capacity.clone(), a.cost.clone());
        }
        r
    }

    fn tail(&self, e: usize) -> usize {
        self.head[e ^ 1]
    }

    fn push(&mut self, e: usize, amount: &T) {
        self.cap[e].sub(amount);
        self.cap[e ^ 1].add(amount);
    }

    /// Flow on network arc `i` (forward edge `2i`).
    fn flow_on(&self, i: usize) -> T {
        match &self.cap[2 * i + 1] {
            Capacity::Finite(f) => f.clone(),
            Capacity::Infinite => unreachable!("backward residual is always finite"),
        }
    }

    fn reachable_from(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        let mut queue = VecDeque::from([s]);
        seen[s] = true;
        while let Some(v) = queue.pop_front() {
            for &e in &self.adj[v] {
                let w = self.head[e];
                if !seen[w] && self.cap[e].is_positive() {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }
}

/// Maximum `source`-`sink` flow (Dinic) with a minimum cut.
pub fn max_flow<T: Scalar>(net: &FlowNetwork<T>, source: NodeId, sink: NodeId) -> Result<MaxFlow<T>, FlowError<T>> {
    if source == sink {
        return Err(FlowError::Degenerate(source));
    }
    let mut res = Residual::from_net(net);
    if infinite_path_exists(&res, source.0, sink.0) {
        return Err(FlowError::Unbounded);
    }
    let n = net.node_count;
    let (s, t) = (source.0, sink.0);
    let mut value = T::zero();
    loop {
        let level = bfs_levels(&res, s);
        if level[t].is_none() {
            break;
        }
        let mut next = vec![0usize; n];
        let mut path: Vec<usize> = Vec::new();
        let mut v = s;
        loop {
            if v == t {
                let bottleneck = path
                    .iter()
                    .fold(Capacity::Infinite, |acc, &e| acc.min_with(&res.cap[e]));
                let amount = bottleneck.finite().cloned().expect("infinite paths excluded up front");
                for &e in &path {
                    res.push(e, &amount);
                }
                value += amount;
                // retreat to the tail of the first saturated edge
                let cut = path.iter().position(|&e| !res.cap[e].is_positive()).unwrap_or(0);
                v = res.tail(path[cut]);
                path.truncate(cut);
                continue;
            }
            let mut advanced = false;
            while next[v] < res.adj[v].len() {
                let e = res.adj[v][next[v]];
                let w = res.head[e];
                if res.cap[e].is_positive() && level[w] == level[v].map(|l| l + 1) {
                    path.push(e);
                    v = w;
                    advanced = true;
                    break;
                }
                next[v] += 1;
            }
            if advanced {
                continue;
            }
            match path.pop() {
                Some(e) => {
                    v = res.tail(e);
                    next[v] += 1;
                }
                None => break,
            }
        }
    }
    let flow = StaticFlow((0..net.arcs.len()).map(|i| res.flow_on(i)).collect());
    let source_side = res.reachable_from(s);
    Ok(MaxFlow {
        value,
        flow,
        source_side,
    })
}

fn infinite_path_exists<T: Scalar>(res: &Residual<T>, s: usize, t: usize) -> bool {
    let mut seen = vec![false; res.adj.len()];
    let mut stack = vec![s];
    seen[s] = true;
    while let Some(v) = stack.pop() {
        if v == t {
            return true;
        }
        for &e in &res.adj[v] {
            let w = res.head[e];
            if !seen[w] && res.cap[e] == Capacity::Infinite {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    false
}

fn bfs_levels<T: Scalar>(res: &Residual<T>, s: usize) -> Vec<Option<usize>> {
    let mut level = vec![None; res.adj.len()];
    level[s] = Some(0);
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        let lv = level[v].unwrap_or(0);
        for &e in &res.adj[v] {
            let w = res.head[e];
            if level[w].is_none() && res.cap[e].is_positive() {
                level[w] = Some(lv + 1);
                queue.push_back(w);
            }
        }
    }
    level
}

/// Minimum cost flow meeting every supply and demand, by successive shortest
/// paths with potentials. Costs must be conservative.
///
/// Equal-cost augmenting paths are resolved by lowest node then lowest arc
/// index, so results are reproducible.
pub fn min_cost_flow<T: Scalar>(net: &FlowNetwork<T>) -> Result<MinCostFlow<T>, FlowError<T>> {
    let total = net.supply.iter().fold(T::zero(), |acc, b| acc + b.clone());
    if !total.is_zero() {
        return Err(FlowError::Unbalanced(total));
    }
    let n = net.node_count;
    let mut res = Residual::from_net(net);
    let super_source = n;
    let super_sink = n + 1;
    res.adj.push(Vec::new());
    res.adj.push(Vec::new());
    let mut remaining = T::zero();
    for (v, b) in net.supply.iter().enumerate() {
        if b.is_positive() {
            res.add(super_source, v, Capacity::Finite(b.clone()), T::zero());
            remaining += b.clone();
        } else if b.is_negative() {
            res.add(v, super_sink, Capacity::Finite(-b.clone()), T::zero());
        }
    }

    // Distance labels; reduced cost of a residual edge (v, w) is
    // cost + dist[v] - dist[w] >= 0.
    let mut dist = initial_labels(net).ok_or(FlowError::NegativeCycle)?;
    let min_label = dist.iter().min().cloned().unwrap_or_else(T::zero);
    dist.push(T::zero());
    dist.push(min_label);

    while remaining.is_positive() {
        let (d, pred) = dijkstra(&res, &dist, super_source);
        let Some(d_sink) = d[super_sink].clone() else {
            let seen = res.reachable_from(super_source);
            let cut_side = (0..n).filter(|&v| seen[v]).map(NodeId).collect();
            return Err(FlowError::Infeasible {
                cut_side,
                unrouted: remaining,
            });
        };
        for (label, dv) in dist.iter_mut().zip(&d) {
            let shift = match dv {
                Some(x) if *x < d_sink => x.clone(),
                _ => d_sink.clone(),
            };
            *label += shift;
        }
        let mut path = Vec::new();
        let mut v = super_sink;
        while v != super_source {
            let e = pred[v].expect("reached nodes have predecessors");
            path.push(e);
            v = res.tail(e);
        }
        let amount = path
            .iter()
            .fold(Capacity::Finite(remaining.clone()), |acc, &e| acc.min_with(&res.cap[e]))
            .finite()
            .cloned()
            .expect("bounded by remaining supply");
        for &e in &path {
            res.push(e, &amount);
        }
        remaining -= amount;
    }

    let flow = StaticFlow((0..net.arcs.len()).map(|i| res.flow_on(i)).collect());
    let cost = flow.cost(net);
    dist.truncate(n);
    let potentials = Potentials(dist.into_iter().map(|d| -d).collect());
    Ok(MinCostFlow { flow, potentials, cost })
}

// Bellman-Ford from a virtual root joined to every node at cost zero.
fn initial_labels<T: Scalar>(net: &FlowNetwork<T>) -> Option<Vec<T>> {
    let n = net.node_count;
    let mut label = vec![T::zero(); n];
    for round in 0..=n {
        let mut changed = false;
        for a in &net.arcs {
            if !a.capacity.is_positive() {
                continue;
            }
            let cand = label[a.tail.0].clone() + a.cost.clone();
            if cand < label[a.head.0] {
                label[a.head.0] = cand;
                changed = true;
            }
        }
        if !changed {
            return Some(label);
        }
        if round == n {
            break;
        }
    }
    None
}

fn dijkstra<T: Scalar>(res: &Residual<T>, labels: &[T], s: usize) -> (Vec<Option<T>>, Vec<Option<usize>>) {
    let n = res.adj.len();
    let mut dist: Vec<Option<T>> = vec![None; n];
    let mut pred = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[s] = Some(T::zero());
    heap.push(Reverse((T::zero(), s)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if done[v] {
            continue;
        }
        done[v] = true;
        for &e in &res.adj[v] {
            if !res.cap[e].is_positive() {
                continue;
            }
            let w = res.head[e];
            if done[w] {
                continue;
            }
            let reduced = res.cost[e].clone() + labels[v].clone() - labels[w].clone();
            debug_assert!(!reduced.is_negative(), "potentials lost dual feasibility");
            let cand = d.clone() + reduced;
            if dist[w].as_ref().is_none_or(|cur| cand < *cur) {
                dist[w] = Some(cand.clone());
                pred[w] = Some(e);
                heap.push(Reverse((cand, w)));
            }
        }
    }
    (dist, pred)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowPath<T = Rational> {
    pub arcs: Vec<ArcId>,
    pub start: NodeId,
    pub end: NodeId,
    pub amount: T,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowCycle<T = Rational> {
    pub arcs: Vec<ArcId>,
    pub amount: T,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition<T = Rational> {
    pub paths: Vec<FlowPath<T>>,
    pub cycles: Vec<FlowCycle<T>>,
}

impl<T: Scalar> Decomposition<T> {
    /// Sum of all path and cycle flows, per arc.
    pub fn superpose(&self, arc_count: usize) -> StaticFlow<T> {
        let mut out = StaticFlow::zero(arc_count);
        for p in &self.paths {
            for a in &p.arcs {
                out.0[a.0] += p.amount.clone();
            }
        }
        for c in &self.cycles {
            for a in &c.arcs {
                out.0[a.0] += c.amount.clone();
            }
        }
        out
    }
}

/// Splits a non-negative flow into paths (from nodes with net outflow to
/// nodes with net inflow) and cycles.
pub fn decompose<T: Scalar>(net: &FlowNetwork<T>, flow: &StaticFlow<T>) -> Decomposition<T> {
    let mut rest = flow.clone();
    let mut excess = flow.divergence(net);
    let mut out_arcs: Vec<Vec<usize>> = vec![Vec::new(); net.node_count];
    for (i, a) in net.arcs.iter().enumerate() {
        out_arcs[a.tail.0].push(i);
    }
    let mut result = Decomposition {
        paths: Vec::new(),
        cycles: Vec::new(),
    };

    let next_arc = |rest: &StaticFlow<T>, v: usize| out_arcs[v].iter().copied().find(|&i| rest.0[i].is_positive());

    // Walks from `start` along positive arcs until `stop` says so or a node
    // repeats; a repeat peels off a cycle and the walk restarts.
    while let Some(start) = (0..net.node_count).find(|&v| excess[v].is_positive()) {
        let mut walk: Vec<usize> = Vec::new();
        let mut position = vec![usize::MAX; net.node_count];
        let mut v = start;
        position[v] = 0;
        loop {
            if v != start && excess[v].is_negative() {
                let amount = walk
                    .iter()
                    .map(|&i| rest.0[i].clone())
                    .chain([excess[start].clone(), -excess[v].clone()])
                    .min()
                    .expect("non-empty");
                for &i in &walk {
                    rest.0[i] -= amount.clone();
                }
                excess[start] -= amount.clone();
                excess[v] += amount.clone();
                result.paths.push(FlowPath {
                    arcs: walk.iter().map(|&i| ArcId(i)).collect(),
                    start: NodeId(start),
                    end: NodeId(v),
                    amount,
                });
                break;
            }
            let i = next_arc(&rest, v).expect("conservation guarantees an outgoing arc");
            let w = net.arcs[i].head.0;
            walk.push(i);
            if position[w] != usize::MAX {
                let cycle = walk.split_off(position[w]);
                peel_cycle(&mut rest, &cycle, &mut result);
                break;
            }
            position[w] = walk.len();
            v = w;
        }
    }

    // What remains is a circulation.
    while let Some(first) = (0..net.arcs.len()).find(|&i| rest.0[i].is_positive()) {
        let mut walk = vec![first];
        let mut position = vec![usize::MAX; net.node_count];
        position[net.arcs[first].tail.0] = 0;
        let mut v = net.arcs[first].head.0;
        while position[v] == usize::MAX {
            position[v] = walk.len();
            let i = next_arc(&rest, v).expect("circulation has an outgoing arc");
            walk.push(i);
            v = net.arcs[i].head.0;
        }
        let cycle = walk.split_off(position[v]);
        peel_cycle(&mut rest, &cycle, &mut result);
    }
    result
}

fn peel_cycle<T: Scalar>(rest: &mut StaticFlow<T>, cycle: &[usize], out: &mut Decomposition<T>) {
    let amount = cycle.iter().map(|&i| rest.0[i].clone()).min().expect("non-empty cycle");
    for &i in cycle {
        rest.0[i] -= amount.clone();
    }
    out.cycles.push(FlowCycle {
        arcs: cycle.iter().map(|&i| ArcId(i)).collect(),
        amount,
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::hub;
    use crate::Rational64 as Q;
    use num_traits::{Signed, Zero};
    use proptest::prelude::*;

    fn q(n: i64) -> Q {
        Q::from_i64(n)
    }

    fn fin(n: i64) -> Capacity<Q> {
        Capacity::Finite(q(n))
    }

    // Brute-force minimum cut: enumerate every source-side subset.
    fn brute_min_cut(net: &FlowNetwork<Q>, s: usize, t: usize) -> Q {
        let n = net.node_count;
        let mut best: Option<Q> = None;
        for mask in 0u32..(1 << n) {
            if mask & (1 << s) == 0 || mask & (1 << t) != 0 {
                continue;
            }
            let mut cap = q(0);
            for a in &net.arcs {
                if mask & (1 << a.tail.0) != 0 && mask & (1 << a.head.0) == 0 {
                    cap += *a.capacity.finite().unwrap();
                }
            }
            if best.as_ref().is_none_or(|b| cap < *b) {
                best = Some(cap);
            }
        }
        best.unwrap()
    }

    // Zero-transit arcs plus super-terminals with unit capacities.
    fn hub_zero_transit_auxiliary() -> FlowNetwork<Q> {
        let net = hub::<Q>();
        let mut aux = FlowNetwork::new(net.node_count());
        for a in net.arcs() {
            if a.transit.is_zero() {
                aux.add_arc(a.tail, a.head, Capacity::Finite(a.capacity), q(0));
            }
        }
        let ss = aux.add_node();
        let tt = aux.add_node();
        for v in net.sources() {
            aux.add_arc(ss, v, fin(1), q(0));
        }
        for v in net.sinks() {
            aux.add_arc(v, tt, fin(1), q(0));
        }
        aux
    }

    #[test]
    fn hub_zero_transit_max_flow_is_two() {
        let aux = hub_zero_transit_auxiliary();
        assert_eq!(aux.arcs.len(), 8);
        let (s, t) = (aux.node_count - 2, aux.node_count - 1);
        // frozen from brute_min_cut
        assert_eq!(brute_min_cut(&aux, s, t), q(2));
        let mf = max_flow(&aux, NodeId(s), NodeId(t)).unwrap();
        assert_eq!(mf.value, q(2));
        assert_eq!(mf.cut_capacity(&aux), fin(2));
    }

    #[test]
    fn disconnected_and_single_arc() {
        let mut net = FlowNetwork::<Q>::new(3);
        net.add_arc(NodeId(0), NodeId(1), fin(5), q(0));
        assert_eq!(max_flow(&net, NodeId(0), NodeId(2)).unwrap().value, q(0));
        assert_eq!(max_flow(&net, NodeId(0), NodeId(1)).unwrap().value, q(5));
        assert_eq!(
            max_flow(&net, NodeId(1), NodeId(1)),
            Err(FlowError::Degenerate(NodeId(1)))
        );
    }

    #[test]
    fn infinite_path_is_unbounded() {
        let mut net = FlowNetwork::<Q>::new(3);
        net.add_arc(NodeId(0), NodeId(1), Capacity::Infinite, q(0));
        net.add_arc(NodeId(1), NodeId(2), Capacity::Infinite, q(0));
        assert_eq!(max_flow(&net, NodeId(0), NodeId(2)), Err(FlowError::Unbounded));
        net.arcs[1].capacity = Capacity::Finite(Q::new(7, 3));
        assert_eq!(max_flow(&net, NodeId(0), NodeId(2)).unwrap().value, Q::new(7, 3));
    }

    #[test]
    fn transport_example_cost_is_one_half() {
        // s1, s2, t1, t2 with uncapacitated pair arcs priced by cheapest paths
        let mut net = FlowNetwork::<Q>::new(4);
        net.supply = vec![q(1), Q::new(3, 2), Q::new(-3, 2), q(-1)];
        net.add_arc(NodeId(0), NodeId(2), Capacity::Infinite, q(0));
        net.add_arc(NodeId(0), NodeId(3), Capacity::Infinite, q(0));
        net.add_arc(NodeId(1), NodeId(2), Capacity::Infinite, q(1));
        net.add_arc(NodeId(1), NodeId(3), Capacity::Infinite, q(0));
        let mcf = min_cost_flow(&net).unwrap();
        assert_eq!(mcf.cost, Q::new(1, 2));
        assert!(mcf.flow.is_feasible(&net));
        assert!(mcf.potentials.certifies(&net, &mcf.flow));
        let dual_objective = net
            .supply
            .iter()
            .zip(&mcf.potentials.0)
            .fold(q(0), |acc, (b, p)| acc + *b * *p);
        assert_eq!(dual_objective, mcf.cost);
    }

    #[test]
    fn null_instance_and_chain() {
        let mut net = FlowNetwork::<Q>::new(3);
        net.add_arc(NodeId(0), NodeId(1), fin(5), q(1));
        net.add_arc(NodeId(1), NodeId(2), fin(5), q(1));
        let zero = min_cost_flow(&net).unwrap();
        assert_eq!(zero.cost, q(0));
        assert_eq!(zero.flow, StaticFlow::zero(2));
        net.supply = vec![q(2), q(0), q(-2)];
        let chain = min_cost_flow(&net).unwrap();
        assert_eq!(chain.cost, q(4));
        assert_eq!(chain.flow.0, vec![q(2), q(2)]);
    }

    #[test]
    fn infeasible_reports_cut() {
        let mut net = FlowNetwork::<Q>::new(3);
        net.add_arc(NodeId(0), NodeId(1), fin(1), q(0));
        net.supply = vec![q(2), q(0), q(-2)];
        match min_cost_flow(&net) {
            Err(FlowError::Infeasible { cut_side, unrouted }) => {
                assert_eq!(unrouted, q(2));
                assert!(cut_side.contains(&NodeId(0)));
                assert!(!cut_side.contains(&NodeId(2)));
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
        net.supply = vec![q(1), q(0), q(0)];
        assert!(matches!(min_cost_flow(&net), Err(FlowError::Unbalanced(_))));
    }

    #[test]
    fn negative_costs_are_handled() {
        let mut net = FlowNetwork::<Q>::new(3);
        net.add_arc(NodeId(0), NodeId(1), fin(1), q(-3));
        net.add_arc(NodeId(1), NodeId(2), fin(2), q(1));
        net.add_arc(NodeId(0), NodeId(2), fin(2), q(0));
        net.supply = vec![q(2), q(0), q(-2)];
        let mcf = min_cost_flow(&net).unwrap();
        assert_eq!(mcf.cost, q(-2));
        assert!(mcf.potentials.certifies(&net, &mcf.flow));
    }

    #[test]
    fn decompose_single_path_and_cycle() {
        let mut net = FlowNetwork::<Q>::new(3);
        net.add_arc(NodeId(0), NodeId(1), fin(5), q(0));
        net.add_arc(NodeId(1), NodeId(2), fin(5), q(0));
        let d = decompose(&net, &StaticFlow(vec![Q::new(3, 2), Q::new(3, 2)]));
        assert_eq!(d.paths.len(), 1);
        assert!(d.cycles.is_empty());
        assert_eq!(d.paths[0].amount, Q::new(3, 2));
        assert_eq!(d.paths[0].start, NodeId(0));
        assert_eq!(d.paths[0].end, NodeId(2));

        let mut two = FlowNetwork::<Q>::new(2);
        two.add_arc(NodeId(0), NodeId(1), fin(1), q(1));
        two.add_arc(NodeId(1), NodeId(0), fin(1), q(1));
        let d = decompose(&two, &StaticFlow(vec![q(1), q(1)]));
        assert!(d.paths.is_empty());
        assert_eq!(d.cycles.len(), 1);
        assert_eq!(d.cycles[0].amount, q(1));
    }

    // Random small graphs for the property checks below.
    fn arb_net() -> impl Strategy<Value = FlowNetwork<Q>> {
        (2usize..6).prop_flat_map(|n| {
            prop::collection::vec((0..n, 0..n, 1i64..4, 0i64..4), 1..10).prop_map(move |arcs| {
                let mut net = FlowNetwork::new(n);
                for (t, h, c, w) in arcs {
                    if t != h {
                        net.add_arc(NodeId(t), NodeId(h), fin(c), q(w));
                    }
                }
                net
            })
        })
    }

    proptest! {
        #[test]
        fn max_flow_matches_brute_force_cut(net in arb_net()) {
            let n = net.node_count;
            let mf = max_flow(&net, NodeId(0), NodeId(n - 1)).unwrap();
            prop_assert_eq!(mf.value, brute_min_cut(&net, 0, n - 1));
            prop_assert_eq!(mf.cut_capacity(&net), Capacity::Finite(mf.value));
            let mut with_balance = net.clone();
            with_balance.supply[0] = mf.value;
            with_balance.supply[n - 1] = -mf.value;
            prop_assert!(mf.flow.is_feasible(&with_balance));
        }

        #[test]
        fn min_cost_flow_is_certified_and_decomposes(net in arb_net()) {
            let n = net.node_count;
            let mf = max_flow(&net, NodeId(0), NodeId(n - 1)).unwrap();
            let mut inst = net.clone();
            inst.supply[0] = mf.value;
            inst.supply[n - 1] = -mf.value;
            let mcf = min_cost_flow(&inst).unwrap();
            prop_assert!(mcf.flow.is_feasible(&inst));
            prop_assert!(mcf.potentials.certifies(&inst, &mcf.flow));
            prop_assert_eq!(mcf.flow.cost(&inst), mcf.cost);
            let d = decompose(&inst, &mcf.flow);
            prop_assert_eq!(d.superpose(inst.arcs.len()), mcf.flow.clone());
            prop_assert!(d.paths.len() + d.cycles.len() <= inst.arcs.len() + n);
            for p in &d.paths {
                prop_assert!(inst.supply[p.start.0].is_positive());
                prop_assert!(inst.supply[p.end.0].is_negative());
            }
        }
    }
}
