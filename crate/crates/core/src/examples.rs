//! Small reference instances.
//!
//! `hub` is the five-node network with two unit sources `s1, s2`, a hub `v`
//! and two unit sinks `t1, t2`. All capacities are 1. The arc `s2 -> v` is the
//! only one with positive cost and `s2 -> t2` the only one with positive
//! transit time. Arc ids follow the order
//! `s1->v, s2->v, s2->t2, v->t1, v->t2`.

use crate::netcore::{ArcId, Network};
use crate::scalar::Scalar;

pub const S1_V: ArcId = ArcId(0);
pub const S2_V: ArcId = ArcId(1);
pub const S2_T2: ArcId = ArcId(2);
pub const V_T1: ArcId = ArcId(3);
pub const V_T2: ArcId = ArcId(4);

/// The two-source, two-sink network with the given balances for
/// `(s1, s2, t1, t2)`.
pub fn hub_with<T: Scalar>(s1: T, s2: T, t1: T, t2: T) -> Network<T> {
    let one = || T::one();
    let zero = || T::zero();
    let mut b = Network::builder();
    let s1n = b.node("s1", s1);
    let s2n = b.node("s2", s2);
    let v = b.node("v", zero());
    let t1n = b.node("t1", t1);
    let t2n = b.node("t2", t2);
    b.arc(s1n, v, one(), zero(), zero());
    b.arc(s2n, v, one(), zero(), one());
    b.arc(s2n, t2n, one(), one(), zero());
    b.arc(v, t1n, one(), zero(), zero());
    b.arc(v, t2n, one(), zero(), zero());
    b.build().expect("reference network is well formed")
}

/// Unit supplies and demands.
pub fn hub<T: Scalar>() -> Network<T> {
    hub_with(T::one(), T::one(), -T::one(), -T::one())
}

/// `s2` supplies 3/2 and `t1` demands 3/2.
pub fn hub_variant_a<T: Scalar>() -> Network<T> {
    let three_halves = T::from_ratio(3, 2);
    hub_with(T::one(), three_halves.clone(), -three_halves, -T::one())
}

/// `s1` supplies 3/2 and `t2` demands 3/2.
pub fn hub_variant_b<T: Scalar>() -> Network<T> {
    let three_halves = T::from_ratio(3, 2);
    hub_with(three_halves.clone(), T::one(), -T::one(), -three_halves)
}
