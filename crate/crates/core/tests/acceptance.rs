//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if
//! any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use qmct::examples::{hub, hub_variant_a, hub_variant_b, S2_V, V_T2};
use qmct::paths::{cheapest_paths_subnetwork, pair_costs};
use qmct::pipeline::checks::{path_equivalence, routes_are_admissible, time_profile, used_routes};
use qmct::pipeline::generate::{generate, GeneratorParams};
use qmct::pipeline::{
    oracle_quickest_mincost, scale_transits, solve_quickest, solve_quickest_mincost, OracleLimits, SolveOptions,
    SolveReport,
};
use qmct::temporal::horizon_bounds;
use qmct::transport;
use qmct::{Network, Rational, Scalar};

const SUITE_SIZE: u64 = 200;

fn q(n: i64) -> Rational {
    Rational::from_i64(n)
}

fn half() -> Rational {
    Rational::from_ratio(1, 2)
}

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

/// Instances for criteria 5 to 9: n in 2..=6, at most 3 sources and 3
/// sinks, capacities and transits at most 3, costs in [0, 3].
fn suite() -> Vec<(u64, Network)> {
    (0..SUITE_SIZE)
        .map(|seed| {
            let params = GeneratorParams {
                nodes: 2 + (seed % 5) as usize,
                terminals: 3,
                tau_max: 3,
                cap_max: 3,
                cost_max: 3,
                ..GeneratorParams::default()
            };
            (seed, generate(seed, &params))
        })
        .collect()
}

fn show(h: Option<u64>) -> String {
    h.map_or_else(|| "-".into(), |h| h.to_string())
}

fn solved(net: &Network) -> SolveReport {
    solve_quickest_mincost(net, &SolveOptions::default()).expect("suite instances are feasible")
}

fn example1() -> Outcome {
    let started = Instant::now();
    let net = hub::<Rational>();
    let fast = solve_quickest(&net, &SolveOptions::default());
    let cheap = solve_quickest_mincost(&net, &SolveOptions::default());
    let elapsed = started.elapsed();
    match (fast, cheap) {
        (Ok(fast), Ok(cheap)) => Outcome::new(
            fast.horizon == Some(1)
                && fast.cost == q(1)
                && cheap.horizon == Some(2)
                && cheap.cost == q(0)
                && elapsed < Duration::from_secs(1),
            format!(
                "quickest theta={} cost={}, quickest-mincost theta={} cost={}, {:.1} ms",
                show(fast.horizon),
                fast.cost,
                show(cheap.horizon),
                cheap.cost,
                elapsed.as_secs_f64() * 1e3
            ),
        ),
        (a, b) => Outcome::new(false, format!("{:?} / {:?}", a.err(), b.err())),
    }
}

fn variant(net: Network, cost: Rational, excluded: qmct::ArcId, kept: Option<qmct::ArcId>) -> Outcome {
    match solve_quickest_mincost(&net, &SolveOptions::default()) {
        Ok(r) => {
            let sub = r.subnetwork.clone().unwrap_or_default();
            let ids: Vec<usize> = sub.iter().map(|a| a.0).collect();
            Outcome::new(
                r.cost == cost
                    && r.horizon == Some(2)
                    && !sub.contains(&excluded)
                    && kept.is_none_or(|a| sub.contains(&a)),
                format!("cost={} theta={} A'={:?}", r.cost, show(r.horizon), ids),
            )
        }
        Err(e) => Outcome::new(false, e.to_string()),
    }
}

fn duality() -> Outcome {
    let net = hub_variant_a::<Rational>();
    let run = || -> Result<Outcome, String> {
        let inst = transport::build(&net, &pair_costs(&net).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let sol = transport::solve(&inst).map_err(|e| e.to_string())?;
        let primal = sol.primal_objective(&inst);
        let dual = sol.dual.objective(&inst);
        let ys: Vec<String> = ["s1", "s2", "t1", "t2"]
            .iter()
            .map(|n| sol.dual.get(net.node_by_name(n).unwrap()).to_string())
            .collect();
        Ok(Outcome::new(
            primal == half() && dual == half() && sol.complementary_slackness(&inst) && sol.dual.is_feasible(&inst),
            format!("primal={primal} dual={dual} y=({})", ys.join(", ")),
        ))
    };
    run().unwrap_or_else(|e| Outcome::new(false, e))
}

struct SuiteResults {
    oracle: Outcome,
    path_equivalence: Outcome,
    routes: Outcome,
    monotone: Outcome,
    single_pair: Outcome,
}

fn run_suite() -> SuiteResults {
    let instances = suite();

    let started = Instant::now();
    let mut mismatches = Vec::new();
    let mut reports = Vec::new();
    let mut slower = 0;
    for (seed, net) in &instances {
        let ours = solved(net);
        let fastest = solve_quickest(net, &SolveOptions::default()).expect("suite instances are feasible");
        if fastest.horizon < ours.horizon {
            slower += 1;
        }
        match oracle_quickest_mincost(net, &OracleLimits::default()) {
            Ok(o) if o.cost == ours.cost && Some(o.horizon) == ours.horizon => {}
            Ok(o) => mismatches.push(format!(
                "seed {seed}: ({}, {:?}) vs oracle ({}, {})",
                ours.cost, ours.horizon, o.cost, o.horizon
            )),
            Err(e) => mismatches.push(format!("seed {seed}: oracle {e}")),
        }
        reports.push(ours);
    }
    let elapsed = started.elapsed();
    let oracle = Outcome::new(
        mismatches.is_empty() && elapsed <= Duration::from_secs(60),
        format!(
            "{} instances ({} where cheapest is slower than quickest), {} mismatches, {:.1} s{}",
            instances.len(),
            slower,
            mismatches.len(),
            elapsed.as_secs_f64(),
            mismatches.first().map(|m| format!(", first: {m}")).unwrap_or_default()
        ),
    );

    let mut counterexamples = 0;
    let mut paths_checked = 0;
    for ((_, net), r) in instances.iter().zip(&reports) {
        let summary = r.transport.as_ref().unwrap();
        let arcs = r.subnetwork.clone().unwrap_or_default();
        counterexamples += path_equivalence(net, summary, &arcs).len();
        for s in net.sources() {
            for t in net.sinks() {
                paths_checked += qmct::pipeline::checks::simple_paths(net, s, t).len();
            }
        }
    }
    let path_equivalence = Outcome::new(
        counterexamples == 0,
        format!("{paths_checked} simple paths, {counterexamples} counterexamples"),
    );

    let mut violations = 0;
    let mut routes_seen = 0;
    for ((_, net), r) in instances.iter().zip(&reports) {
        let (scaled, _) = scale_transits(net).unwrap();
        match used_routes(&scaled, r.schedule.as_ref().unwrap()) {
            Some(routes) => {
                routes_seen += routes.len();
                if !routes_are_admissible(r.transport.as_ref().unwrap(), &routes) {
                    violations += 1;
                }
            }
            None => violations += 1,
        }
    }
    let routes = Outcome::new(
        violations == 0,
        format!("{routes_seen} routes, {violations} violations"),
    );

    let started = Instant::now();
    let mut bad = Vec::new();
    let mut horizons = 0;
    for ((seed, net), r) in instances.iter().zip(&reports) {
        let (_, ub) = horizon_bounds(net).unwrap();
        let p = time_profile(net, ub).unwrap();
        horizons += p.feasible.len();
        let stable = p.mincost.last().cloned().flatten() == Some(r.cost.clone());
        if !(p.feasibility_is_monotone() && p.consistent() && p.cost_is_non_increasing() && stable) {
            bad.push(*seed);
        }
    }
    let monotone = Outcome::new(
        bad.is_empty(),
        format!(
            "{} horizons checked, {} failing instances {:?}, {:.1} s",
            horizons,
            bad.len(),
            bad,
            started.elapsed().as_secs_f64()
        ),
    );

    let mut k1 = 0;
    let mut unequal = 0;
    for ((_, net), r) in instances.iter().zip(&reports) {
        if let ([s], [t]) = (net.sources().as_slice(), net.sinks().as_slice()) {
            k1 += 1;
            let direct = cheapest_paths_subnetwork(net, *s, *t).unwrap();
            if Some(&direct) != r.subnetwork.as_ref() {
                unequal += 1;
            }
        }
    }
    let single_pair = Outcome::new(
        k1 > 0 && unequal == 0,
        format!("{k1} single-pair instances, {unequal} unequal"),
    );

    SuiteResults {
        oracle,
        path_equivalence,
        routes,
        monotone,
        single_pair,
    }
}

fn main() -> ExitCode {
    let mut results = vec![
        ("1 example 1 goldens", example1()),
        ("2 variant A", variant(hub_variant_a(), half(), V_T2, Some(S2_V))),
        ("3 variant B", variant(hub_variant_b(), q(0), S2_V, None)),
        ("4 transportation duality", duality()),
    ];
    let s = run_suite();
    results.extend([
        ("5 oracle equivalence", s.oracle),
        ("6 path equivalence", s.path_equivalence),
        ("7 routes use active pairs", s.routes),
        ("8 monotone time profile", s.monotone),
        ("9 single pair reduction", s.single_pair),
    ]);
    let mut all = true;
    for (name, outcome) in &results {
        all &= outcome.pass;
        println!(
            "{} {:<28} {}",
            if outcome.pass { "PASS" } else { "FAIL" },
            name,
            outcome.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
