//! End-to-end solving: cheapest pair costs, transportation dual, admissible
//! subnetwork, quickest transshipment on it. Plus the brute-force oracle,
//! instance files, reports and the random instance generator.

pub mod checks;
pub mod generate;
pub mod instance;
pub mod report;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::admissible::{admissible_arcs, extend, AdmissibleError, Subnetwork};
use crate::netcore::{validate, ArcSet, Network, ValidationReport};
use crate::paths::{pair_costs, PairCostMatrix, PathsError};
use crate::scalar::{common_denominator, Scalar};
use crate::temporal::{
    horizon_bounds, mincost_over_time, quickest_transshipment, verify_schedule, FlowOverTime, QuickestOptions,
    TemporalError,
};
use crate::transport::{self, active_pairs, ActivePairs, TransportError, TransportSolution, TransportationInstance};
use crate::Rational;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Cheapest first, then fastest.
    QuickestMincost,
    /// Fastest, costs ignored.
    Quickest,
    /// Transportation problem only; no time dimension.
    MincostStatic,
    /// Brute force over time-expanded networks.
    Oracle,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::QuickestMincost => "quickest-mincost",
            Mode::Quickest => "quickest",
            Mode::MincostStatic => "mincost-static",
            Mode::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quickest-mincost" => Ok(Mode::QuickestMincost),
            "quickest" => Ok(Mode::Quickest),
            "mincost-static" => Ok(Mode::MincostStatic),
            "oracle" => Ok(Mode::Oracle),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError<T: Scalar = Rational> {
    #[error("network failed validation")]
    Validation(ValidationReport<T>),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("horizon {needed} exceeds the limit {limit}")]
    HorizonGuard { needed: u64, limit: u64 },
    #[error("instance too large for the oracle: {0}")]
    TooLarge(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl<T: Scalar> From<TemporalError> for SolveError<T> {
    fn from(e: TemporalError) -> Self {
        match e {
            TemporalError::Infeasible | TemporalError::InfeasibleAtHorizon(_) => SolveError::Infeasible(e.to_string()),
            TemporalError::HorizonGuard { needed, limit } => SolveError::HorizonGuard { needed, limit },
            TemporalError::NonIntegerTransit(_) | TemporalError::Flow(_) => SolveError::Internal(e.to_string()),
        }
    }
}

impl<T: Scalar> From<TransportError> for SolveError<T> {
    fn from(e: TransportError) -> Self {
        match e {
            TransportError::Isolated(_) | TransportError::Infeasible { .. } => SolveError::Infeasible(e.to_string()),
            other => SolveError::Internal(other.to_string()),
        }
    }
}

impl<T: Scalar> From<AdmissibleError> for SolveError<T> {
    fn from(e: AdmissibleError) -> Self {
        SolveError::Internal(e.to_string())
    }
}

impl<T: Scalar> From<PathsError> for SolveError<T> {
    fn from(e: PathsError) -> Self {
        SolveError::Internal(e.to_string())
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveOptions {
    pub max_horizon: Option<u64>,
    pub storage_trace: bool,
    pub oracle: OracleLimits,
}

impl SolveOptions {
    fn quickest(&self) -> QuickestOptions {
        QuickestOptions {
            max_horizon: self.max_horizon,
            storage_trace: self.storage_trace,
        }
    }
}

/// Transportation data kept in a report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransportSummary<T = Rational> {
    pub instance: TransportationInstance<T>,
    pub solution: TransportSolution<T>,
    pub active: ActivePairs,
    pub pair_costs: PairCostMatrix<T>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveReport<T: Scalar = Rational> {
    pub mode: Mode,
    /// Transportation optimum for the min-cost modes, realized cost for
    /// `quickest`.
    pub cost: T,
    /// Horizon in grid steps after transit scaling.
    pub horizon: Option<u64>,
    /// Transit times were multiplied by this to make them integral.
    pub scale: u64,
    pub subnetwork: Option<ArcSet>,
    /// In grid steps, indexed by the original arc ids.
    pub schedule: Option<FlowOverTime<T>>,
    pub transport: Option<TransportSummary<T>>,
    pub checks: BTreeMap<String, bool>,
    pub elapsed: Duration,
}

impl<T: Scalar> SolveReport<T> {
    /// Horizon in the time unit of the input.
    pub fn horizon_original(&self) -> Option<T> {
        self.horizon
            .map(|h| T::from_i64(h as i64) / T::from_i64(self.scale as i64))
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.values().all(|&ok| ok)
    }
}

/// Multiplies transit times by the least common denominator and divides
/// capacities by it, so one grid step is `1 / scale` time units.
pub fn scale_transits<T: Scalar>(network: &Network<T>) -> Result<(Network<T>, u64), SolveError<T>> {
    let scale = common_denominator(network.arcs().iter().map(|a| &a.transit))
        .ok_or_else(|| SolveError::Internal("transit denominators overflow".into()))?;
    if scale == 1 {
        return Ok((network.clone(), 1));
    }
    let factor = T::from_i64(scale as i64);
    let scaled = network.map_arcs(|a| crate::netcore::ArcData {
        capacity: a.capacity.clone() / factor.clone(),
        transit: a.transit.clone() * factor.clone(),
        ..a.clone()
    });
    Ok((scaled, scale))
}

fn validated<T: Scalar>(network: &Network<T>) -> Result<(), SolveError<T>> {
    let report = validate(network);
    if report.is_valid() {
        Ok(())
    } else {
        Err(SolveError::Validation(report))
    }
}

fn transport_stage<T: Scalar>(network: &Network<T>) -> Result<TransportSummary<T>, SolveError<T>> {
    let pair_costs = pair_costs(network)?;
    let instance = transport::build(network, &pair_costs)?;
    let solution = transport::solve(&instance)?;
    let active = active_pairs(&instance, &solution.dual)?;
    Ok(TransportSummary {
        instance,
        solution,
        active,
        pair_costs,
    })
}

fn transport_checks<T: Scalar>(summary: &TransportSummary<T>, checks: &mut BTreeMap<String, bool>) {
    let inst = &summary.instance;
    let sol = &summary.solution;
    checks.insert("dual_feasible".into(), sol.dual.is_feasible(inst));
    checks.insert("strong_duality".into(), sol.dual.objective(inst) == sol.optimum);
    checks.insert("complementary_slackness".into(), sol.complementary_slackness(inst));
}

/// Admissible subnetwork for an already solved transportation problem.
pub fn admissible_subnetwork<T: Scalar>(
    network: &Network<T>,
    summary: &TransportSummary<T>,
) -> Result<Subnetwork<T>, SolveError<T>> {
    Ok(admissible_arcs(&extend(network, &summary.solution.dual))?)
}

/// Quickest minimum cost transshipment: the transportation dual selects the
/// admissible arcs, then a quickest transshipment runs on those arcs only.
pub fn solve_quickest_mincost<T: Scalar>(
    network: &Network<T>,
    options: &SolveOptions,
) -> Result<SolveReport<T>, SolveError<T>> {
    let started = Instant::now();
    validated(network)?;
    let (scaled, scale) = scale_transits(network)?;
    let summary = transport_stage(network)?;
    let sub = admissible_subnetwork(network, &summary)?;
    let (restricted, origin) = scaled.restrict(&sub.arcs);
    let quickest = quickest_transshipment(&restricted, options.quickest())?;
    let schedule = quickest.schedule.remap(&origin, network.arc_count());

    let mut checks = BTreeMap::new();
    transport_checks(&summary, &mut checks);
    let has_active = !summary.active.is_empty();
    checks.insert(
        "zero_cheapest_extended_path".into(),
        !has_active || sub.cheapest_cost.as_ref().is_some_and(|c| c.is_zero()),
    );
    let verification = verify_schedule(&scaled, &schedule);
    checks.insert("schedule_verified".into(), verification.passed());
    checks.insert(
        "schedule_cost_equals_optimum".into(),
        verification.cost == summary.solution.optimum,
    );
    checks.insert("schedule_horizon".into(), schedule.horizon == quickest.horizon);

    Ok(SolveReport {
        mode: Mode::QuickestMincost,
        cost: summary.solution.optimum.clone(),
        horizon: Some(quickest.horizon),
        scale,
        subnetwork: Some(sub.arcs),
        schedule: Some(schedule),
        transport: Some(summary),
        checks,
        elapsed: started.elapsed(),
    })
}

/// Quickest transshipment in the whole network; the cost reported is the
/// cost of the schedule found.
pub fn solve_quickest<T: Scalar>(
    network: &Network<T>,
    options: &SolveOptions,
) -> Result<SolveReport<T>, SolveError<T>> {
    let started = Instant::now();
    validated(network)?;
    let (scaled, scale) = scale_transits(network)?;
    let quickest = quickest_transshipment(&scaled, options.quickest())?;
    let verification = verify_schedule(&scaled, &quickest.schedule);
    let mut checks = BTreeMap::new();
    checks.insert("schedule_verified".into(), verification.passed());
    checks.insert("schedule_horizon".into(), quickest.schedule.horizon == quickest.horizon);
    Ok(SolveReport {
        mode: Mode::Quickest,
        cost: quickest.cost,
        horizon: Some(quickest.horizon),
        scale,
        subnetwork: None,
        schedule: Some(quickest.schedule),
        transport: None,
        checks,
        elapsed: started.elapsed(),
    })
}

/// Transportation problem only: minimum cost with unlimited time.
pub fn solve_mincost_static<T: Scalar>(
    network: &Network<T>,
    _options: &SolveOptions,
) -> Result<SolveReport<T>, SolveError<T>> {
    let started = Instant::now();
    validated(network)?;
    let summary = transport_stage(network)?;
    let sub = admissible_subnetwork(network, &summary)?;
    let mut checks = BTreeMap::new();
    transport_checks(&summary, &mut checks);
    Ok(SolveReport {
        mode: Mode::MincostStatic,
        cost: summary.solution.optimum.clone(),
        horizon: None,
        scale: 1,
        subnetwork: Some(sub.arcs),
        schedule: None,
        transport: Some(summary),
        checks,
        elapsed: started.elapsed(),
    })
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_nodes: usize,
    pub max_horizon: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_nodes: 12,
            max_horizon: 2000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult<T = Rational> {
    pub cost: T,
    pub horizon: u64,
    pub schedule: FlowOverTime<T>,
    /// Upper bound used for the optimal cost.
    pub horizon_bound: u64,
}

/// Brute force: the optimal cost is the min-cost flow over time at a safe
/// upper bound on the horizon; the answer is the first horizon, scanning up
/// from zero, whose min-cost flow over time reaches it.
pub fn oracle_quickest_mincost<T: Scalar>(
    network: &Network<T>,
    limits: &OracleLimits,
) -> Result<OracleResult<T>, SolveError<T>> {
    validated(network)?;
    if network.node_count() > limits.max_nodes {
        return Err(SolveError::TooLarge(format!(
            "{} nodes, limit {}",
            network.node_count(),
            limits.max_nodes
        )));
    }
    let (scaled, _) = scale_transits(network)?;
    let (_, ub) = horizon_bounds(&scaled)?;
    if ub > limits.max_horizon {
        return Err(SolveError::TooLarge(format!(
            "horizon bound {ub}, limit {}",
            limits.max_horizon
        )));
    }
    let (best, _) = mincost_over_time(&scaled, ub)?;
    for t in 0..=ub {
        match mincost_over_time(&scaled, t) {
            Ok((cost, schedule)) if cost == best => {
                return Ok(OracleResult {
                    cost,
                    horizon: t,
                    schedule,
                    horizon_bound: ub,
                })
            }
            Ok(_) | Err(TemporalError::InfeasibleAtHorizon(_)) => {}
            Err(e) => return Err(e.into()),
        }
    }
    Err(SolveError::Internal("optimal cost not reached below the bound".into()))
}

/// Oracle wrapped as a report.
pub fn solve_oracle<T: Scalar>(network: &Network<T>, options: &SolveOptions) -> Result<SolveReport<T>, SolveError<T>> {
    let started = Instant::now();
    let result = oracle_quickest_mincost(network, &options.oracle)?;
    let (scaled, scale) = scale_transits(network)?;
    let verification = verify_schedule(&scaled, &result.schedule);
    let mut checks = BTreeMap::new();
    checks.insert("schedule_verified".into(), verification.passed());
    checks.insert("schedule_cost_equals_optimum".into(), verification.cost == result.cost);
    Ok(SolveReport {
        mode: Mode::Oracle,
        cost: result.cost,
        horizon: Some(result.horizon),
        scale,
        subnetwork: None,
        schedule: Some(result.schedule),
        transport: None,
        checks,
        elapsed: started.elapsed(),
    })
}

pub fn solve<T: Scalar>(
    network: &Network<T>,
    mode: Mode,
    options: &SolveOptions,
) -> Result<SolveReport<T>, SolveError<T>> {
    match mode {
        Mode::QuickestMincost => solve_quickest_mincost(network, options),
        Mode::Quickest => solve_quickest(network, options),
        Mode::MincostStatic => solve_mincost_static(network, options),
        Mode::Oracle => solve_oracle(network, options),
    }
}
