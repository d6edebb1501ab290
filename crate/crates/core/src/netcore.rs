//! Network data model and structural validation.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;
use crate::Rational;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArcId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

impl fmt::Display for ArcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

/// Set of arc ids, ordered so iteration is deterministic.
pub type ArcSet = BTreeSet<ArcId>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArcData<T = Rational> {
    pub tail: NodeId,
    pub head: NodeId,
    /// Upper bound on the inflow rate.
    pub capacity: T,
    pub transit: T,
    pub cost: T,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("arc {arc} references node {node} outside the network")]
    UnknownNode { arc: ArcId, node: NodeId },
    #[error("duplicate node name {0:?}")]
    DuplicateName(String),
    #[error("expected {expected} balances, got {got}")]
    BalanceLength { expected: usize, got: usize },
    #[error("arc {0} does not exist")]
    UnknownArc(ArcId),
    #[error("path is not chained: arc {prev} ends at {head} but arc {next} starts at {tail}")]
    MalformedPath {
        prev: ArcId,
        next: ArcId,
        head: NodeId,
        tail: NodeId,
    },
}

/// A directed network with capacities, transit times, costs and node
/// balances. Positive balance marks a source, negative a sink.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network<T: Scalar = Rational> {
    names: Vec<String>,
    arcs: Vec<ArcData<T>>,
    balance: Vec<T>,
}

impl<T: Scalar> Network<T> {
    pub fn new(names: Vec<String>, arcs: Vec<ArcData<T>>, balance: Vec<T>) -> Result<Self, NetworkError> {
        let n = names.len();
        if balance.len() != n {
            return Err(NetworkError::BalanceLength {
                expected: n,
                got: balance.len(),
            });
        }
        let mut seen = HashMap::with_capacity(n);
        for (i, name) in names.iter().enumerate() {
            if seen.insert(name.as_str(), i).is_some() {
                return Err(NetworkError::DuplicateName(name.clone()));
            }
        }
        for (i, a) in arcs.iter().enumerate() {
            for node in [a.tail, a.head] {
                if node.0 >= n {
                    return Err(NetworkError::UnknownNode { arc: ArcId(i), node });
                }
            }
        }
        Ok(Network { names, arcs, balance })
    }

    pub fn builder() -> NetworkBuilder<T> {
        NetworkBuilder::default()
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.names.len()).map(NodeId)
    }

    pub fn arcs(&self) -> &[ArcData<T>] {
        &self.arcs
    }

    pub fn arc(&self, id: ArcId) -> &ArcData<T> {
        &self.arcs[id.0]
    }

    pub fn arc_ids(&self) -> impl Iterator<Item = ArcId> {
        (0..self.arcs.len()).map(ArcId)
    }

    pub fn name(&self, v: NodeId) -> &str {
        &self.names[v.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.names.iter().position(|n| n == name).map(NodeId)
    }

    pub fn balance(&self, v: NodeId) -> &T {
        &self.balance[v.0]
    }

    pub fn balances(&self) -> &[T] {
        &self.balance
    }

    pub fn sources(&self) -> Vec<NodeId> {
        self.nodes().filter(|&v| self.balance[v.0].is_positive()).collect()
    }

    pub fn sinks(&self) -> Vec<NodeId> {
        self.nodes().filter(|&v| self.balance[v.0].is_negative()).collect()
    }

    pub fn total_supply(&self) -> T {
        self.balance
            .iter()
            .filter(|b| b.is_positive())
            .fold(T::zero(), |acc, b| acc + b.clone())
    }

    /// Same graph with different balances.
    pub fn with_balances(&self, balance: Vec<T>) -> Result<Self, NetworkError> {
        Network::new(self.names.clone(), self.arcs.clone(), balance)
    }

    /// Same nodes and balances, keeping only the arcs in `keep`. The second
    /// component maps each arc of the result to its id in `self`.
    pub fn restrict(&self, keep: &ArcSet) -> (Self, Vec<ArcId>) {
        let origin: Vec<ArcId> = keep.iter().copied().filter(|a| a.0 < self.arcs.len()).collect();
        let arcs = origin.iter().map(|&a| self.arcs[a.0].clone()).collect();
        let net = Network {
            names: self.names.clone(),
            arcs,
            balance: self.balance.clone(),
        };
        (net, origin)
    }

    /// Applies `f` to every arc, keeping endpoints.
    pub fn map_arcs(&self, mut f: impl FnMut(&ArcData<T>) -> ArcData<T>) -> Self {
        let arcs = self
            .arcs
            .iter()
            .map(|a| {
                let mut b = f(a);
                b.tail = a.tail;
                b.head = a.head;
                b
            })
            .collect();
        Network {
            names: self.names.clone(),
            arcs,
            balance: self.balance.clone(),
        }
    }
}

#[derive(Debug)]
pub struct NetworkBuilder<T: Scalar = Rational> {
    names: Vec<String>,
    arcs: Vec<ArcData<T>>,
    balance: Vec<T>,
}

impl<T: Scalar> Default for NetworkBuilder<T> {
    fn default() -> Self {
        NetworkBuilder {
            names: Vec::new(),
            arcs: Vec::new(),
            balance: Vec::new(),
        }
    }
}

impl<T: Scalar> NetworkBuilder<T> {
    pub fn node(&mut self, name: impl Into<String>, balance: T) -> NodeId {
        self.names.push(name.into());
        self.balance.push(balance);
        NodeId(self.names.len() - 1)
    }

    pub fn arc(&mut self, tail: NodeId, head: NodeId, capacity: T, transit: T, cost: T) -> ArcId {
        self.arcs.push(ArcData {
            tail,
            head,
            capacity,
            transit,
            cost,
        });
        ArcId(self.arcs.len() - 1)
    }

    pub fn build(self) -> Result<Network<T>, NetworkError> {
        Network::new(self.names, self.arcs, self.balance)
    }
}

/// An ordered list of arcs where each arc starts at the previous arc's head.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path(pub Vec<ArcId>);

impl Path {
    pub fn arcs(&self) -> &[ArcId] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn check<T: Scalar>(&self, network: &Network<T>) -> Result<(), NetworkError> {
        for &a in &self.0 {
            if a.0 >= network.arc_count() {
                return Err(NetworkError::UnknownArc(a));
            }
        }
        for w in self.0.windows(2) {
            let (p, q) = (network.arc(w[0]), network.arc(w[1]));
            if p.head != q.tail {
                return Err(NetworkError::MalformedPath {
                    prev: w[0],
                    next: w[1],
                    head: p.head,
                    tail: q.tail,
                });
            }
        }
        Ok(())
    }

    pub fn start<T: Scalar>(&self, network: &Network<T>) -> Option<NodeId> {
        self.0.first().map(|&a| network.arc(a).tail)
    }

    pub fn end<T: Scalar>(&self, network: &Network<T>) -> Option<NodeId> {
        self.0.last().map(|&a| network.arc(a).head)
    }
}

/// Total cost of a path.
pub fn path_cost<T: Scalar>(network: &Network<T>, path: &Path) -> Result<T, NetworkError> {
    path.check(network)?;
    Ok(path
        .0
        .iter()
        .fold(T::zero(), |acc, &a| acc + network.arc(a).cost.clone()))
}

/// Total transit time of a path.
pub fn path_transit<T: Scalar>(network: &Network<T>, path: &Path) -> Result<T, NetworkError> {
    path.check(network)?;
    Ok(path
        .0
        .iter()
        .fold(T::zero(), |acc, &a| acc + network.arc(a).transit.clone()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation<T = Rational> {
    NonPositiveCapacity {
        arc: ArcId,
    },
    NegativeTransit {
        arc: ArcId,
    },
    SelfLoop {
        arc: ArcId,
    },
    /// Balances do not sum to zero.
    BalanceMismatch {
        sum: T,
    },
    /// A directed cycle with negative total cost.
    NegativeCycle {
        cycle: Vec<ArcId>,
        cost: T,
    },
}

impl<T: Scalar> fmt::Display for Violation<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositiveCapacity { arc } => write!(f, "arc {arc} has non-positive capacity"),
            Violation::NegativeTransit { arc } => write!(f, "arc {arc} has negative transit time"),
            Violation::SelfLoop { arc } => write!(f, "arc {arc} is a self-loop"),
            Violation::BalanceMismatch { sum } => write!(f, "balances sum to {sum}, not 0"),
            Violation::NegativeCycle { cycle, cost } => {
                let ids: Vec<String> = cycle.iter().map(ToString::to_string).collect();
                write!(f, "negative-cost cycle [{}] of cost {cost}", ids.join(", "))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport<T = Rational> {
    pub violations: Vec<Violation<T>>,
}

impl<T> ValidationReport<T> {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every structural invariant and reports all violations found.
pub fn validate<T: Scalar>(network: &Network<T>) -> ValidationReport<T> {
    let mut violations = Vec::new();
    for (i, a) in network.arcs().iter().enumerate() {
        let id = ArcId(i);
        if !a.capacity.is_positive() {
            violations.push(Violation::NonPositiveCapacity { arc: id });
        }
        if a.transit.is_negative() {
            violations.push(Violation::NegativeTransit { arc: id });
        }
        if a.tail == a.head {
            violations.push(Violation::SelfLoop { arc: id });
        }
    }
    let sum = network.balances().iter().fold(T::zero(), |acc, b| acc + b.clone());
    if !sum.is_zero() {
        violations.push(Violation::BalanceMismatch { sum });
    }
    if let Some(cycle) = find_negative_cycle(network) {
        let cost = cycle
            .iter()
            .fold(T::zero(), |acc, &a| acc + network.arc(a).cost.clone());
        violations.push(Violation::NegativeCycle { cycle, cost });
    }
    ValidationReport { violations }
}

/// Label-correcting pass from an artificial root joined to every node at
/// cost zero: n-1 rounds, then one detection round.
pub(crate) fn find_negative_cycle<T: Scalar>(network: &Network<T>) -> Option<Vec<ArcId>> {
    let n = network.node_count();
    for (i, a) in network.arcs().iter().enumerate() {
        if a.tail == a.head && a.cost.is_negative() {
            return Some(vec![ArcId(i)]);
        }
    }
    let mut label = vec![T::zero(); n];
    let mut pred: Vec<Option<ArcId>> = vec![None; n];
    for _ in 0..n.saturating_sub(1) {
        if !relax_all(network, &mut label, &mut pred) {
            return None;
        }
    }
    let mut witness = None;
    for (i, a) in network.arcs().iter().enumerate() {
        if a.tail == a.head {
            continue;
        }
        let cand = label[a.tail.0].clone() + a.cost.clone();
        if cand < label[a.head.0] {
            label[a.head.0] = cand;
            pred[a.head.0] = Some(ArcId(i));
            witness = Some(a.head);
            break;
        }
    }
    let mut v = witness?;
    // walking back n steps lands on the cycle
    for _ in 0..n {
        v = network.arc(pred[v.0]?).tail;
    }
    let start = v;
    let mut cycle = Vec::new();
    loop {
        let a = pred[v.0]?;
        cycle.push(a);
        v = network.arc(a).tail;
        if v == start {
            break;
        }
    }
    cycle.reverse();
    Some(cycle)
}

fn relax_all<T: Scalar>(network: &Network<T>, label: &mut [T], pred: &mut [Option<ArcId>]) -> bool {
    let mut changed = false;
    for (i, a) in network.arcs().iter().enumerate() {
        if a.tail == a.head {
            continue;
        }
        let cand = label[a.tail.0].clone() + a.cost.clone();
        if cand < label[a.head.0] {
            label[a.head.0] = cand;
            pred[a.head.0] = Some(ArcId(i));
            changed = true;
        }
    }
    changed
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::hub;
    use crate::Rational64;

    fn r(n: i64) -> Rational64 {
        Rational64::from_i64(n)
    }

    #[test]
    fn hub_is_valid() {
        let net = hub::<Rational64>();
        assert!(validate(&net).is_valid());
        assert_eq!(net.sources().len(), 2);
        assert_eq!(net.sinks().len(), 2);
    }

    #[test]
    fn single_arc_is_valid() {
        let mut b = Network::builder();
        let s = b.node("s", r(1));
        let t = b.node("t", r(-1));
        b.arc(s, t, r(1), r(0), r(0));
        assert!(validate(&b.build().unwrap()).is_valid());
    }

    #[test]
    fn negative_two_cycle_is_reported() {
        let mut b = Network::builder();
        let x = b.node("x", r(0));
        let y = b.node("y", r(0));
        b.arc(x, y, r(1), r(0), r(1));
        b.arc(y, x, r(1), r(0), r(-2));
        let report = validate(&b.build().unwrap());
        assert_eq!(report.violations.len(), 1);
        match &report.violations[0] {
            Violation::NegativeCycle { cycle, cost } => {
                assert_eq!(cycle.len(), 2);
                assert_eq!(*cost, r(-1));
            }
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn zero_cost_cycle_is_fine() {
        let mut b = Network::builder();
        let x = b.node("x", r(0));
        let y = b.node("y", r(0));
        b.arc(x, y, r(1), r(0), r(2));
        b.arc(y, x, r(1), r(0), r(-2));
        assert!(validate(&b.build().unwrap()).is_valid());
    }

    #[test]
    fn every_violation_is_listed() {
        let mut b = Network::builder();
        let x = b.node("x", r(2));
        let y = b.node("y", r(-1));
        b.arc(x, y, r(0), r(-1), r(0));
        b.arc(y, y, r(1), r(0), r(0));
        let report = validate(&b.build().unwrap());
        let v = &report.violations;
        assert!(v.contains(&Violation::NonPositiveCapacity { arc: ArcId(0) }));
        assert!(v.contains(&Violation::NegativeTransit { arc: ArcId(0) }));
        assert!(v.contains(&Violation::SelfLoop { arc: ArcId(1) }));
        assert!(v.contains(&Violation::BalanceMismatch { sum: r(1) }));
    }

    #[test]
    fn structural_errors() {
        let bad = Network::<Rational64>::new(
            vec!["a".into()],
            vec![ArcData {
                tail: NodeId(0),
                head: NodeId(3),
                capacity: r(1),
                transit: r(0),
                cost: r(0),
            }],
            vec![r(0)],
        );
        assert!(matches!(bad, Err(NetworkError::UnknownNode { .. })));
        let dup = Network::<Rational64>::new(vec!["a".into(), "a".into()], vec![], vec![r(0), r(0)]);
        assert_eq!(dup, Err(NetworkError::DuplicateName("a".into())));
    }

    #[test]
    fn path_sums_on_hub() {
        let net = hub::<Rational64>();
        let arc = |t: &str, h: &str| {
            let (t, h) = (net.node_by_name(t).unwrap(), net.node_by_name(h).unwrap());
            ArcId(net.arcs().iter().position(|a| a.tail == t && a.head == h).unwrap())
        };
        let p = Path(vec![arc("s2", "v"), arc("v", "t1")]);
        assert_eq!(path_cost(&net, &p).unwrap(), r(1));
        assert_eq!(path_transit(&net, &p).unwrap(), r(0));
        let direct = Path(vec![arc("s2", "t2")]);
        assert_eq!(path_cost(&net, &direct).unwrap(), r(0));
        assert_eq!(path_transit(&net, &direct).unwrap(), r(1));
        assert_eq!(path_cost(&net, &Path::default()).unwrap(), r(0));
        assert_eq!(path_transit(&net, &Path::default()).unwrap(), r(0));
        let broken = Path(vec![arc("v", "t1"), arc("s2", "v")]);
        assert!(matches!(
            path_cost(&net, &broken),
            Err(NetworkError::MalformedPath { .. })
        ));
        assert_eq!(
            path_cost(&net, &Path(vec![ArcId(99)])),
            Err(NetworkError::UnknownArc(ArcId(99)))
        );
    }

    #[test]
    fn restrict_keeps_origin_map() {
        let net = hub::<Rational64>();
        let keep: ArcSet = [ArcId(0), ArcId(3)].into_iter().collect();
        let (sub, origin) = net.restrict(&keep);
        assert_eq!(sub.arc_count(), 2);
        assert_eq!(origin, vec![ArcId(0), ArcId(3)]);
        assert_eq!(sub.arc(ArcId(1)), net.arc(ArcId(3)));
    }
}
