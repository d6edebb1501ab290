//! The static transportation problem between sources and sinks, priced by
//! cheapest-path costs, and its LP dual.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::netcore::{Network, NodeId};
use crate::paths::PairCostMatrix;
use crate::scalar::Scalar;
use crate::staticflow::{min_cost_flow, Capacity, FlowError, FlowNetwork};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransportError {
    #[error("terminal {0} has no path to or from the opposite side")]
    Isolated(NodeId),
    #[error("supplies of {deficient:?} exceed the demand they can reach")]
    Infeasible { deficient: Vec<NodeId> },
    #[error("dual constraint violated on pair ({from}, {to})")]
    DualInfeasible { from: NodeId, to: NodeId },
    #[error("transportation certificate failed: {0}")]
    Certificate(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransportArc<T = Rational> {
    pub source: NodeId,
    pub sink: NodeId,
    pub cost: T,
}

/// Sources with supplies, sinks with (positive) demands, and one
/// uncapacitated arc per connected pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransportationInstance<T = Rational> {
    pub sources: Vec<(NodeId, T)>,
    pub sinks: Vec<(NodeId, T)>,
    pub arcs: Vec<TransportArc<T>>,
}

impl<T: Scalar> TransportationInstance<T> {
    pub fn total_supply(&self) -> T {
        self.sources.iter().fold(T::zero(), |acc, (_, b)| acc + b.clone())
    }

    /// Bipartite flow network: sources first, then sinks.
    fn flow_network(&self) -> FlowNetwork<T> {
        let k = self.sources.len();
        let mut net = FlowNetwork::new(k + self.sinks.len());
        let index: BTreeMap<NodeId, usize> = self
            .sources
            .iter()
            .map(|(v, _)| *v)
            .chain(self.sinks.iter().map(|(v, _)| *v))
            .enumerate()
            .map(|(i, v)| (v, i))
            .collect();
        for (i, (_, b)) in self.sources.iter().enumerate() {
            net.supply[i] = b.clone();
        }
        for (j, (_, d)) in self.sinks.iter().enumerate() {
            net.supply[k + j] = -d.clone();
        }
        for a in &self.arcs {
            net.add_arc(
                crate::netcore::NodeId(index[&a.source]),
                crate::netcore::NodeId(index[&a.sink]),
                Capacity::Infinite,
                a.cost.clone(),
            );
        }
        net
    }

    fn terminal(&self, local: usize) -> NodeId {
        if local < self.sources.len() {
            self.sources[local].0
        } else {
            self.sinks[local - self.sources.len()].0
        }
    }
}

/// Assembles the transportation instance of `network` from its pair costs.
pub fn build<T: Scalar>(
    network: &Network<T>,
    pair_costs: &PairCostMatrix<T>,
) -> Result<TransportationInstance<T>, TransportError> {
    let sources: Vec<(NodeId, T)> = network
        .sources()
        .into_iter()
        .map(|v| (v, network.balance(v).clone()))
        .collect();
    let sinks: Vec<(NodeId, T)> = network
        .sinks()
        .into_iter()
        .map(|v| (v, -network.balance(v).clone()))
        .collect();
    let arcs: Vec<TransportArc<T>> = pair_costs
        .costs
        .iter()
        .map(|(&(source, sink), cost)| TransportArc {
            source,
            sink,
            cost: cost.clone(),
        })
        .collect();
    for (s, _) in &sources {
        if !arcs.iter().any(|a| a.source == *s) {
            return Err(TransportError::Isolated(*s));
        }
    }
    for (t, _) in &sinks {
        if !arcs.iter().any(|a| a.sink == *t) {
            return Err(TransportError::Isolated(*t));
        }
    }
    Ok(TransportationInstance { sources, sinks, arcs })
}

/// Dual prices on the terminals; feasible when `y[s] - y[t] <= cost(s, t)`
/// on every arc.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualSolution<T = Rational> {
    pub y: BTreeMap<NodeId, T>,
}

impl<T: Scalar> DualSolution<T> {
    pub fn get(&self, v: NodeId) -> T {
        self.y.get(&v).cloned().unwrap_or_else(T::zero)
    }

    /// `cost(s, t) - y[s] + y[t]`, non-negative when feasible.
    pub fn slack(&self, arc: &TransportArc<T>) -> T {
        arc.cost.clone() - self.get(arc.source) + self.get(arc.sink)
    }

    pub fn is_feasible(&self, instance: &TransportationInstance<T>) -> bool {
        instance.arcs.iter().all(|a| !self.slack(a).is_negative())
    }

    /// `sum_s b_s y_s + sum_t b_t y_t` with sink balances negative.
    pub fn objective(&self, instance: &TransportationInstance<T>) -> T {
        let supply = instance
            .sources
            .iter()
            .fold(T::zero(), |acc, (v, b)| acc + b.clone() * self.get(*v));
        instance
            .sinks
            .iter()
            .fold(supply, |acc, (v, d)| acc - d.clone() * self.get(*v))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransportSolution<T = Rational> {
    /// Amount shipped on each arc of the instance, in arc order.
    pub flow: Vec<T>,
    pub dual: DualSolution<T>,
    pub optimum: T,
}

impl<T: Scalar> TransportSolution<T> {
    pub fn primal_objective(&self, instance: &TransportationInstance<T>) -> T {
        instance
            .arcs
            .iter()
            .zip(&self.flow)
            .fold(T::zero(), |acc, (a, x)| acc + a.cost.clone() * x.clone())
    }

    pub fn complementary_slackness(&self, instance: &TransportationInstance<T>) -> bool {
        instance
            .arcs
            .iter()
            .zip(&self.flow)
            .all(|(a, x)| (x.clone() * self.dual.slack(a)).is_zero())
    }

    pub fn is_primal_feasible(&self, instance: &TransportationInstance<T>) -> bool {
        if self.flow.len() != instance.arcs.len() || self.flow.iter().any(|x| x.is_negative()) {
            return false;
        }
        let shipped = |pick: &dyn Fn(&TransportArc<T>) -> NodeId, v: NodeId| {
            instance
                .arcs
                .iter()
                .zip(&self.flow)
                .filter(|(a, _)| pick(a) == v)
                .fold(T::zero(), |acc, (_, x)| acc + x.clone())
        };
        instance.sources.iter().all(|(v, b)| shipped(&|a| a.source, *v) == *b)
            && instance.sinks.iter().all(|(v, d)| shipped(&|a| a.sink, *v) == *d)
    }
}

/// Optimal shipment and optimal dual. The dual is read off the node
/// potentials of the min-cost flow and then checked for feasibility, strong
/// duality and complementary slackness before it is returned.
pub fn solve<T: Scalar>(instance: &TransportationInstance<T>) -> Result<TransportSolution<T>, TransportError> {
    let net = instance.flow_network();
    let mcf = match min_cost_flow(&net) {
        Ok(m) => m,
        Err(FlowError::Infeasible { cut_side, .. }) => {
            let deficient = cut_side
                .iter()
                .filter(|v| v.0 < instance.sources.len())
                .map(|v| instance.terminal(v.0))
                .collect();
            return Err(TransportError::Infeasible { deficient });
        }
        Err(e) => return Err(TransportError::Certificate(e.to_string())),
    };
    let y = (0..net.node_count)
        .map(|i| (instance.terminal(i), mcf.potentials.0[i].clone()))
        .collect();
    let solution = TransportSolution {
        flow: mcf.flow.0,
        dual: DualSolution { y },
        optimum: mcf.cost,
    };
    if !solution.is_primal_feasible(instance) {
        return Err(TransportError::Certificate("shipment violates balances".into()));
    }
    if !solution.dual.is_feasible(instance) {
        return Err(TransportError::Certificate("dual is infeasible".into()));
    }
    if solution.dual.objective(instance) != solution.optimum || solution.primal_objective(instance) != solution.optimum
    {
        return Err(TransportError::Certificate("duality gap is not zero".into()));
    }
    if !solution.complementary_slackness(instance) {
        return Err(TransportError::Certificate("complementary slackness fails".into()));
    }
    Ok(solution)
}

/// Source/sink pairs whose dual constraint is tight.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ActivePairs {
    pub pairs: BTreeSet<(NodeId, NodeId)>,
}

impl ActivePairs {
    pub fn contains(&self, s: NodeId, t: NodeId) -> bool {
        self.pairs.contains(&(s, t))
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

pub fn active_pairs<T: Scalar>(
    instance: &TransportationInstance<T>,
    dual: &DualSolution<T>,
) -> Result<ActivePairs, TransportError> {
    let mut pairs = BTreeSet::new();
    for a in &instance.arcs {
        let slack = dual.slack(a);
        if slack.is_negative() {
            return Err(TransportError::DualInfeasible {
                from: a.source,
                to: a.sink,
            });
        }
        if slack.is_zero() {
            pairs.insert((a.source, a.sink));
        }
    }
    Ok(ActivePairs { pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{hub, hub_variant_a};
    use crate::paths::pair_costs;
    use crate::staticflow::max_flow;
    use crate::Rational64 as Q;
    use num_traits::Signed;
    use proptest::prelude::*;

    fn q(n: i64) -> Q {
        Q::from_i64(n)
    }

    fn instance_of(net: &Network<Q>) -> TransportationInstance<Q> {
        build(net, &pair_costs(net).unwrap()).unwrap()
    }

    fn dual_of(net: &Network<Q>, values: [i64; 4]) -> DualSolution<Q> {
        let names = ["s1", "s2", "t1", "t2"];
        DualSolution {
            y: names
                .iter()
                .zip(values)
                .map(|(n, y)| (net.node_by_name(n).unwrap(), q(y)))
                .collect(),
        }
    }

    #[test]
    fn hub_builds_four_arc_instance() {
        let net = hub_variant_a::<Q>();
        let inst = instance_of(&net);
        assert_eq!(inst.arcs.len(), 4);
        assert_eq!(inst.sources.len(), 2);
        assert_eq!(inst.total_supply(), Q::new(5, 2));
    }

    #[test]
    fn transport_example_optimum_and_reference_dual() {
        let net = hub_variant_a::<Q>();
        let inst = instance_of(&net);
        let sol = solve(&inst).unwrap();
        assert_eq!(sol.optimum, Q::new(1, 2));
        assert_eq!(sol.dual.objective(&inst), Q::new(1, 2));
        assert!(sol.complementary_slackness(&inst));
        // the printed dual is optimal as well
        let printed = dual_of(&net, [0, 1, 0, 1]);
        assert!(printed.is_feasible(&inst));
        assert_eq!(printed.objective(&inst), Q::new(1, 2));
    }

    #[test]
    fn example1_optimum_is_zero() {
        let sol = solve(&instance_of(&hub::<Q>())).unwrap();
        assert_eq!(sol.optimum, q(0));
    }

    #[test]
    fn one_pair_costs_supply_times_price() {
        let mut b = Network::builder();
        let s = b.node("s", Q::new(5, 2));
        let t = b.node("t", Q::new(-5, 2));
        b.arc(s, t, q(1), q(0), q(3));
        let net = b.build().unwrap();
        let inst = instance_of(&net);
        assert_eq!(inst.arcs.len(), 1);
        assert_eq!(solve(&inst).unwrap().optimum, Q::new(15, 2));
    }

    #[test]
    fn isolated_source_is_rejected() {
        let mut b = Network::builder();
        let s1 = b.node("s1", q(1));
        let s2 = b.node("s2", q(1));
        let t = b.node("t", q(-2));
        b.arc(s1, t, q(1), q(0), q(0));
        let net = b.build().unwrap();
        assert_eq!(
            build(&net, &pair_costs(&net).unwrap()),
            Err(TransportError::Isolated(s2))
        );
    }

    #[test]
    fn hall_failure_names_deficient_sources() {
        let mut b = Network::builder();
        let s1 = b.node("s1", q(2));
        let s2 = b.node("s2", q(1));
        let t1 = b.node("t1", q(-1));
        let t2 = b.node("t2", q(-2));
        b.arc(s1, t1, q(1), q(0), q(0));
        b.arc(s2, t1, q(1), q(0), q(0));
        b.arc(s2, t2, q(1), q(0), q(0));
        let net = b.build().unwrap();
        match solve(&instance_of(&net)) {
            Err(TransportError::Infeasible { deficient }) => assert_eq!(deficient, vec![s1]),
            other => panic!("expected infeasible, got {other:?}"),
        }
        let _ = t2;
    }

    #[test]
    fn active_pairs_of_printed_dual() {
        let net = hub_variant_a::<Q>();
        let inst = instance_of(&net);
        let active = active_pairs(&inst, &dual_of(&net, [0, 1, 0, 1])).unwrap();
        let n = |s: &str| net.node_by_name(s).unwrap();
        let expected: BTreeSet<_> = [(n("s1"), n("t1")), (n("s2"), n("t1")), (n("s2"), n("t2"))]
            .into_iter()
            .collect();
        assert_eq!(active.pairs, expected);
    }

    #[test]
    fn active_pairs_with_zero_dual() {
        let zero_costs = instance_of(&hub::<Q>()).arcs.len();
        let mut inst = instance_of(&hub::<Q>());
        for a in &mut inst.arcs {
            a.cost = q(0);
        }
        let zero = DualSolution { y: BTreeMap::new() };
        assert_eq!(active_pairs(&inst, &zero).unwrap().pairs.len(), zero_costs);
        for a in &mut inst.arcs {
            a.cost = q(2);
        }
        assert!(active_pairs(&inst, &zero).unwrap().is_empty());
        for a in &mut inst.arcs {
            a.cost = q(-1);
        }
        assert!(matches!(
            active_pairs(&inst, &zero),
            Err(TransportError::DualInfeasible { .. })
        ));
    }

    fn arb_instance() -> impl Strategy<Value = TransportationInstance<Q>> {
        (1usize..=3, 1usize..=3).prop_flat_map(|(k, l)| {
            (
                prop::collection::vec(1i64..4, k),
                prop::collection::vec(1i64..4, l),
                prop::collection::vec(prop::option::weighted(0.7, 0i64..4), k * l),
            )
                .prop_map(move |(sup, dem, costs)| {
                    // rescale demands so totals agree
                    let total: i64 = sup.iter().sum();
                    let dtotal: i64 = dem.iter().sum();
                    let sources = (0..k).map(|i| (NodeId(i), q(sup[i]))).collect();
                    let sinks = (0..l)
                        .map(|j| (NodeId(k + j), Q::new(dem[j] * total, dtotal)))
                        .collect();
                    let arcs = costs
                        .iter()
                        .enumerate()
                        .filter_map(|(idx, c)| {
                            c.map(|c| TransportArc {
                                source: NodeId(idx / l),
                                sink: NodeId(k + idx % l),
                                cost: q(c),
                            })
                        })
                        .collect();
                    TransportationInstance { sources, sinks, arcs }
                })
        })
    }

    // Super-source/super-sink max flow over the bipartite arcs.
    fn routable(inst: &TransportationInstance<Q>) -> bool {
        let mut net = inst.flow_network();
        let n = net.node_count;
        let ss = net.add_node();
        let tt = net.add_node();
        for i in 0..n {
            let b = net.supply[i];
            if b.is_positive() {
                net.add_arc(ss, NodeId(i), Capacity::Finite(b), q(0));
            } else if b.is_negative() {
                net.add_arc(NodeId(i), tt, Capacity::Finite(-b), q(0));
            }
        }
        max_flow(&net, ss, tt).unwrap().value == inst.total_supply()
    }

    proptest! {
        #[test]
        fn duality_and_infeasibility_equivalence(inst in arb_instance()) {
            match solve(&inst) {
                Ok(sol) => {
                    prop_assert!(routable(&inst));
                    prop_assert!(sol.is_primal_feasible(&inst));
                    prop_assert!(sol.dual.is_feasible(&inst));
                    prop_assert_eq!(sol.dual.objective(&inst), sol.optimum);
                    prop_assert!(sol.complementary_slackness(&inst));
                    let active = active_pairs(&inst, &sol.dual).unwrap();
                    for (a, x) in inst.arcs.iter().zip(&sol.flow) {
                        if x.is_positive() {
                            prop_assert!(active.contains(a.source, a.sink));
                        }
                    }
                }
                Err(TransportError::Infeasible { .. }) => prop_assert!(!routable(&inst)),
                Err(e) => prop_assert!(false, "unexpected {e}"),
            }
        }
    }
}
