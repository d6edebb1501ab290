//! JSON and text rendering of solve reports.
//!
//! Schedules are written in the time unit of the input: an interval
//! `[start, end, rate]` sends `rate` units per time unit into the arc.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::instance::Value;
use super::SolveReport;
use crate::netcore::Network;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub arc: usize,
    pub tail: String,
    pub head: String,
    pub intervals: Vec<(Value, Value, Value)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shipment {
    pub source: String,
    pub sink: String,
    pub amount: Value,
    pub cost: Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransportJson {
    pub optimum: Value,
    pub dual: BTreeMap<String, Value>,
    pub active_pairs: Vec<(String, String)>,
    pub shipments: Vec<Shipment>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub mode: String,
    pub cost: Value,
    /// Number of grid steps of length `1 / scale`.
    pub horizon_steps: Option<u64>,
    pub horizon: Option<Value>,
    pub scale: u64,
    pub subnetwork: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub transport: Option<TransportJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub schedule: Option<Vec<ScheduleEntry>>,
    /// Stock held at each node at the end of each grid step.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub storage: Option<BTreeMap<String, Vec<Value>>>,
    pub checks: BTreeMap<String, bool>,
    pub elapsed_ms: f64,
}

impl ReportJson {
    pub fn new<T: Scalar>(network: &Network<T>, report: &SolveReport<T>, emit_schedule: bool) -> Self {
        let scale = T::from_i64(report.scale as i64);
        let time = |step: u64| Value::of(&(T::from_i64(step as i64) / scale.clone()));
        let transport = report.transport.as_ref().map(|t| {
            let name = |v| network.name(v).to_string();
            TransportJson {
                optimum: Value::of(&t.solution.optimum),
                dual: t
                    .instance
                    .sources
                    .iter()
                    .chain(&t.instance.sinks)
                    .map(|(v, _)| (name(*v), Value::of(&t.solution.dual.get(*v))))
                    .collect(),
                active_pairs: t.active.pairs.iter().map(|&(s, t)| (name(s), name(t))).collect(),
                shipments: t
                    .instance
                    .arcs
                    .iter()
                    .zip(&t.solution.flow)
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(a, x)| Shipment {
                        source: name(a.source),
                        sink: name(a.sink),
                        amount: Value::of(x),
                        cost: Value::of(&a.cost),
                    })
                    .collect(),
            }
        });
        let schedule = report.schedule.as_ref().filter(|_| emit_schedule);
        ReportJson {
            mode: report.mode.to_string(),
            cost: Value::of(&report.cost),
            horizon_steps: report.horizon,
            horizon: report.horizon_original().map(|h| Value::of(&h)),
            scale: report.scale,
            subnetwork: report.subnetwork.as_ref().map(|s| s.iter().map(|a| a.0).collect()),
            transport,
            schedule: schedule.map(|s| {
                s.arcs
                    .iter()
                    .enumerate()
                    .filter(|(_, pieces)| !pieces.is_empty())
                    .map(|(i, pieces)| {
                        let arc = &network.arcs()[i];
                        ScheduleEntry {
                            arc: i,
                            tail: network.name(arc.tail).to_string(),
                            head: network.name(arc.head).to_string(),
                            intervals: pieces
                                .iter()
                                .map(|p| (time(p.start), time(p.end), Value::of(&(p.rate.clone() * scale.clone()))))
                                .collect(),
                        }
                    })
                    .collect()
            }),
            storage: schedule.and_then(|s| s.storage.as_ref()).map(|st| {
                network
                    .nodes()
                    .map(|v| (network.name(v).to_string(), st[v.0].iter().map(Value::of).collect()))
                    .collect()
            }),
            checks: report.checks.clone(),
            elapsed_ms: report.elapsed.as_secs_f64() * 1e3,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "mode      {}", self.mode);
        let _ = writeln!(out, "cost      {}", self.cost);
        match (&self.horizon, self.horizon_steps) {
            (Some(h), Some(steps)) if self.scale != 1 => {
                let _ = writeln!(out, "horizon   {h} ({steps} steps of 1/{})", self.scale);
            }
            (Some(h), _) => {
                let _ = writeln!(out, "horizon   {h}");
            }
            _ => {}
        }
        if let Some(sub) = &self.subnetwork {
            let ids: Vec<String> = sub.iter().map(|a| a.to_string()).collect();
            let _ = writeln!(out, "arcs      {}", ids.join(" "));
        }
        if let Some(t) = &self.transport {
            for s in &t.shipments {
                let _ = writeln!(out, "ship      {} -> {}: {} at {}", s.source, s.sink, s.amount, s.cost);
            }
            let dual: Vec<String> = t.dual.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(out, "dual      {}", dual.join(" "));
        }
        if let Some(schedule) = &self.schedule {
            for e in schedule {
                let pieces: Vec<String> = e.intervals.iter().map(|(a, b, r)| format!("[{a},{b}) x {r}")).collect();
                let _ = writeln!(
                    out,
                    "flow      a{} {}->{}: {}",
                    e.arc,
                    e.tail,
                    e.head,
                    pieces.join(", ")
                );
            }
        }
        if let Some(storage) = &self.storage {
            for (node, levels) in storage {
                let levels: Vec<String> = levels.iter().map(|l| l.to_string()).collect();
                let _ = writeln!(out, "stock     {node}: {}", levels.join(" "));
            }
        }
        for (name, ok) in &self.checks {
            let _ = writeln!(out, "check     {name}: {}", if *ok { "ok" } else { "FAILED" });
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::hub_variant_a;
    use crate::pipeline::{solve_quickest_mincost, SolveOptions};
    use crate::Rational64 as Q;

    #[test]
    fn variant_a_json() {
        let net = hub_variant_a::<Q>();
        let report = solve_quickest_mincost(&net, &SolveOptions::default()).unwrap();
        let json = ReportJson::new(&net, &report, true);
        assert_eq!(json.cost, Value::Text("1/2".into()));
        assert_eq!(json.horizon, Some(Value::Int(2)));
        assert!(!json.subnetwork.as_ref().unwrap().contains(&4));
        let t = json.transport.as_ref().unwrap();
        assert_eq!(t.optimum, json.cost);
        let back: ReportJson = serde_json::from_str(&json.to_json()).unwrap();
        assert_eq!(back.cost, json.cost);
        assert_eq!(back.schedule, json.schedule);
        assert!(json.to_text().contains("cost      1/2"));
    }

    #[test]
    fn schedule_is_omitted_unless_requested() {
        let net = hub_variant_a::<Q>();
        let report = solve_quickest_mincost(&net, &SolveOptions::default()).unwrap();
        let json = ReportJson::new(&net, &report, false);
        assert!(json.schedule.is_none());
        assert!(!json.to_json().contains("\"schedule\""));
    }

    #[test]
    fn scaled_schedule_is_in_input_time() {
        let net = hub_variant_a::<Q>().map_arcs(|a| crate::netcore::ArcData {
            transit: a.transit / Q::from_integer(2),
            ..a.clone()
        });
        let report = solve_quickest_mincost(&net, &SolveOptions::default()).unwrap();
        let json = ReportJson::new(&net, &report, true);
        assert_eq!(json.scale, 2);
        for e in json.schedule.unwrap() {
            for (_, _, rate) in e.intervals {
                // capacities are 1, so no rate may exceed 1 in input time
                assert!(rate.parse::<Q>().unwrap() <= Q::from_integer(1));
            }
        }
    }
}
