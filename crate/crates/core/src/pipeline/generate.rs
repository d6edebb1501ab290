//! Seeded random instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::netcore::{Network, NodeId};
use crate::scalar::Scalar;
use crate::temporal::statically_feasible;

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct GeneratorParams {
    pub nodes: usize,
    /// Upper bound on the number of sources, and separately of sinks.
    pub terminals: usize,
    pub tau_max: i64,
    pub cap_max: i64,
    pub cost_max: i64,
    /// Per-terminal balance bound before the totals are evened out.
    pub balance_max: i64,
    /// Extra random arcs per node, on top of the routing backbone.
    pub density: f64,
    /// Allow costs in `[-cost_max, cost_max]`. Arcs then only go forward in
    /// node order, so there are no cycles at all.
    pub negative_costs: bool,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            nodes: 6,
            terminals: 3,
            tau_max: 3,
            cap_max: 3,
            cost_max: 3,
            balance_max: 3,
            density: 1.5,
            negative_costs: false,
        }
    }
}

/// A valid instance whose supplies can all be routed to the sinks.
///
/// Node order is sources, intermediates, sinks. The same seed and
/// parameters always give the same network.
pub fn generate<T: Scalar>(seed: u64, params: &GeneratorParams) -> Network<T> {
    assert!(params.nodes >= 2, "need at least two nodes");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.nodes;
    let side = params.terminals.clamp(1, n / 2);
    let k_src = rng.gen_range(1..=side);
    let k_snk = rng.gen_range(1..=side);
    let inner = n - k_src - k_snk;

    let mut supplies: Vec<i64> = (0..k_src).map(|_| rng.gen_range(1..=params.balance_max)).collect();
    let mut demands: Vec<i64> = (0..k_snk).map(|_| rng.gen_range(1..=params.balance_max)).collect();
    while supplies.iter().sum::<i64>() != demands.iter().sum::<i64>() {
        let (low, high) = if supplies.iter().sum::<i64>() < demands.iter().sum::<i64>() {
            (&mut supplies, &mut demands)
        } else {
            (&mut demands, &mut supplies)
        };
        // shave the larger side where possible, otherwise top up the smaller
        let i = rng.gen_range(0..high.len());
        if high[i] > 1 {
            high[i] -= 1;
        } else {
            let j = rng.gen_range(0..low.len());
            low[j] += 1;
        }
    }

    let mut balances: Vec<i64> = supplies.clone();
    balances.extend(std::iter::repeat_n(0, inner));
    balances.extend(demands.iter().map(|d| -d));
    let names: Vec<String> = (0..n)
        .map(|i| match i {
            i if i < k_src => format!("s{}", i + 1),
            i if i < k_src + inner => format!("v{}", i - k_src + 1),
            i => format!("t{}", i - k_src - inner + 1),
        })
        .collect();

    let cost_low = if params.negative_costs { -params.cost_max } else { 0 };
    let mut arcs = Arcs {
        list: Vec::new(),
        costs: (cost_low, params.cost_max),
        params,
    };
    let middles: Vec<usize> = (k_src..k_src + inner).collect();
    let sinks = k_src + inner..n;

    // backbone: every terminal on some source-to-sink route
    for s in 0..k_src {
        let t = rng.gen_range(sinks.clone());
        arcs.route(&mut rng, &middles, s, t);
    }
    for t in sinks.clone() {
        let s = rng.gen_range(0..k_src);
        arcs.route(&mut rng, &middles, s, t);
    }
    let extra = (params.density * n as f64).round() as usize;
    for _ in 0..extra {
        let (mut u, mut v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u == v {
            continue;
        }
        if params.negative_costs && u > v {
            std::mem::swap(&mut u, &mut v);
        }
        arcs.add(&mut rng, u, v);
    }

    // more routes until every supply can reach enough demand
    loop {
        let mut b = Network::builder();
        let ids: Vec<NodeId> = names
            .iter()
            .zip(&balances)
            .map(|(name, bal)| b.node(name.clone(), T::from_i64(*bal)))
            .collect();
        for &(t, h, [cap, tau, cost]) in &arcs.list {
            b.arc(ids[t], ids[h], T::from_i64(cap), T::from_i64(tau), T::from_i64(cost));
        }
        let net = b.build().expect("generated names are unique");
        if statically_feasible(&net) {
            return net;
        }
        let s = rng.gen_range(0..k_src);
        let t = rng.gen_range(sinks.clone());
        arcs.route(&mut rng, &middles, s, t);
    }
}

struct Arcs<'a> {
    list: Vec<(usize, usize, [i64; 3])>,
    costs: (i64, i64),
    params: &'a GeneratorParams,
}

impl Arcs<'_> {
    fn add(&mut self, rng: &mut ChaCha8Rng, tail: usize, head: usize) {
        let data = [
            rng.gen_range(1..=self.params.cap_max),
            rng.gen_range(0..=self.params.tau_max),
            rng.gen_range(self.costs.0..=self.costs.1),
        ];
        self.list.push((tail, head, data));
    }

    /// Direct arc, or two arcs through an intermediate node.
    fn route(&mut self, rng: &mut ChaCha8Rng, middles: &[usize], s: usize, t: usize) {
        match middles.choose(rng) {
            Some(&m) if rng.gen_bool(0.7) => {
                self.add(rng, s, m);
                self.add(rng, m, t);
            }
            _ => self.add(rng, s, t),
        }
    }
}
