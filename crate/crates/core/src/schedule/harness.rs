use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    build_collision_graph, exact_schedule, greedy_schedule, hybrid_fits_all, hybrid_schedule, ExactObjective,
    HybridKind, OccupancyState, ValueParams,
};
use crate::demand::{generate_stream, BookingRequest, CampusConfig, DemandModel};
use crate::error::{Error, Result};
use crate::model::{random_values, MvvcProblem};
use crate::seeds;
use crate::solvers::{ExactMvvc, MvvcSolver};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Greedy,
    Hybrid1,
    Hybrid2,
    Exact,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Greedy, Method::Hybrid1, Method::Hybrid2, Method::Exact];

    pub fn name(self) -> &'static str {
        match self {
            Method::Greedy => "greedy",
            Method::Hybrid1 => "hybrid1",
            Method::Hybrid2 => "hybrid2",
            Method::Exact => "exact",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            Error::argument(format!("unknown method `{s}` (expected greedy, hybrid1, hybrid2 or exact)"))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarnessConfig {
    pub warmup_days: u32,
    pub test_days: u32,
    pub values: ValueParams,
    /// State budget of the exact scheduler per call.
    pub exact_max_states: usize,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self { warmup_days: 30, test_days: 30, values: ValueParams::default(), exact_max_states: 400_000 }
    }
}

/// Scheduling of one method: a batch run for the warm-up period and an
/// all-or-nothing admission test for each new request.
pub struct Scheduler<'a> {
    pub method: Method,
    pub values: ValueParams,
    pub mvvc: &'a dyn MvvcSolver,
    pub exact_max_states: usize,
}

impl Scheduler<'_> {
    /// Schedules a batch of requests; returns the ids it rejected.
    pub fn batch(&self, state: &mut OccupancyState, requests: &[BookingRequest]) -> Result<Vec<usize>> {
        match self.method {
            Method::Greedy => {
                Ok(requests.iter().filter(|r| greedy_schedule(state, r).is_none()).map(|r| r.id).collect())
            }
            Method::Hybrid1 | Method::Hybrid2 => {
                Ok(hybrid_schedule(state, requests, self.kind(), &self.values, self.mvvc)?.rejected)
            }
            Method::Exact => {
                let plan = exact_schedule(state, requests, ExactObjective::MaxBedDays, self.exact_max_states)?
                    .expect("rejecting everything is always feasible");
                plan.apply(state)?;
                Ok(plan.rejected)
            }
        }
    }

    /// Re-plans `admitted` plus `request` on top of `base`. Returns the new
    /// state, or `None` when the method cannot place all of them.
    pub fn admit(
        &self,
        base: &OccupancyState,
        current: &OccupancyState,
        admitted: &[BookingRequest],
        request: &BookingRequest,
    ) -> Result<Option<OccupancyState>> {
        let mut all = admitted.to_vec();
        all.push(*request);
        match self.method {
            Method::Greedy => {
                let mut next = current.clone();
                Ok(greedy_schedule(&mut next, request).map(|_| next))
            }
            Method::Hybrid1 | Method::Hybrid2 => hybrid_fits_all(base, &all, self.kind(), &self.values, self.mvvc),
            Method::Exact => {
                let Some(plan) = exact_schedule(base, &all, ExactObjective::AcceptAll, self.exact_max_states)? else {
                    return Ok(None);
                };
                let mut next = base.clone();
                plan.apply(&mut next)?;
                Ok(Some(next))
            }
        }
    }

    fn kind(&self) -> HybridKind {
        if self.method == Method::Hybrid2 {
            HybridKind::Two
        } else {
            HybridKind::One
        }
    }
}

/// Filling factor at each rejection during the test period of one stream.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub seed: u64,
    pub warmup_filling: f64,
    pub failures: Vec<f64>,
    pub final_filling: f64,
}

/// Stream of `warmup_days + test_days` days for `seed`; identical for every method.
pub fn harness_stream(demand: &DemandModel, cfg: &HarnessConfig, seed: u64) -> Result<Vec<BookingRequest>> {
    generate_stream(demand, cfg.warmup_days + cfg.test_days, &mut seeds::rng(seed, "stream", 0))
}

/// Warm-up followed by the test period on one request stream.
pub fn run_stream(
    scheduler: &Scheduler,
    campus: &CampusConfig,
    stream: &[BookingRequest],
    cfg: &HarnessConfig,
    seed: u64,
) -> Result<RunTrace> {
    let horizon = cfg.warmup_days + cfg.test_days;
    let mut base = OccupancyState::new(campus.rooms.clone(), horizon)?;
    let (warm, test): (Vec<BookingRequest>, Vec<BookingRequest>) =
        stream.iter().partition(|r| r.start_day < cfg.warmup_days);
    scheduler.batch(&mut base, &warm)?;
    let warmup_filling = base.filling_factor();
    let mut current = base.clone();
    let mut admitted = Vec::new();
    let mut failures = Vec::new();
    for req in &test {
        match scheduler.admit(&base, &current, &admitted, req)? {
            Some(next) => {
                current = next;
                admitted.push(*req);
            }
            None => failures.push(current.filling_factor()),
        }
    }
    current.verify()?;
    Ok(RunTrace { seed, warmup_filling, failures, final_filling: current.filling_factor() })
}

/// One row of an averaged failure curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// 1-based index of the rejection within the test period.
    pub rejection_index: usize,
    pub mean_filling_factor: f64,
    pub stderr: f64,
    /// Streams that reached this many rejections.
    pub n: usize,
}

/// Averages traces pointwise over the streams that reached each rejection index.
pub fn average_curve(traces: &[RunTrace]) -> Vec<CurvePoint> {
    let longest = traces.iter().map(|t| t.failures.len()).max().unwrap_or(0);
    (0..longest)
        .map(|k| {
            let xs: Vec<f64> = traces.iter().filter_map(|t| t.failures.get(k).copied()).collect();
            let n = xs.len();
            let mean = xs.iter().sum::<f64>() / n as f64;
            let stderr = if n > 1 {
                (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64 / n as f64).sqrt()
            } else {
                0.0
            };
            CurvePoint { rejection_index: k + 1, mean_filling_factor: mean, stderr, n }
        })
        .collect()
}

/// Runs `method` on the streams of every seed (in parallel) and averages
/// the failure curves.
pub fn run_failure_harness(
    method: Method,
    seeds_list: &[u64],
    campus: &CampusConfig,
    demand: &DemandModel,
    cfg: &HarnessConfig,
) -> Result<(Vec<RunTrace>, Vec<CurvePoint>)> {
    if seeds_list.is_empty() {
        return Err(Error::argument("harness needs at least one seed"));
    }
    let mvvc = ExactMvvc::default();
    let scheduler = Scheduler { method, values: cfg.values, mvvc: &mvvc, exact_max_states: cfg.exact_max_states };
    let traces = seeds_list
        .par_iter()
        .map(|&seed| run_stream(&scheduler, campus, &harness_stream(demand, cfg, seed)?, cfg, seed))
        .collect::<Result<Vec<_>>>()?;
    let curve = average_curve(&traces);
    Ok((traces, curve))
}

/// MVVC instance of one stream: the overlap graph of its test-period
/// requests, valued by duration with the random jitter of `random_values`.
pub fn stream_instance(
    demand: &DemandModel,
    cfg: &HarnessConfig,
    seed: u64,
) -> Result<(Vec<BookingRequest>, MvvcProblem<f64>)> {
    let requests: Vec<BookingRequest> =
        harness_stream(demand, cfg, seed)?.into_iter().filter(|r| r.start_day >= cfg.warmup_days).collect();
    let graph = build_collision_graph(&requests).graph;
    let durations: Vec<u32> = requests.iter().map(|r| r.duration).collect();
    let values = random_values(&graph, demand.max_duration(), &durations, &mut seeds::rng(seed, "values", 0))?;
    Ok((requests, MvvcProblem::new(graph, values)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_campus_fails_at_current_occupancy() {
        let campus = CampusConfig::from_unit_mix(&[(1, 57)], 1).unwrap();
        let mvvc = ExactMvvc::default();
        let cfg = HarnessConfig { warmup_days: 2, test_days: 2, ..Default::default() };
        let stream = vec![
            BookingRequest { id: 0, beds: 57, start_day: 0, duration: 4 },
            BookingRequest { id: 1, beds: 1, start_day: 2, duration: 1 },
        ];
        for method in Method::ALL {
            let s = Scheduler { method, values: cfg.values, mvvc: &mvvc, exact_max_states: 1 << 20 };
            let t = run_stream(&s, &campus, &stream, &cfg, 0).unwrap();
            assert_eq!(t.failures, vec![1.0], "{method:?}");
        }
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("optimal".parse::<Method>().is_err());
    }

    #[test]
    fn stream_instances_grow_with_scale() {
        let cfg = HarnessConfig::default();
        let sizes: Vec<f64> = [1, 2]
            .iter()
            .map(|&s| {
                let demand = DemandModel::for_scale(s);
                (0..20)
                    .map(|seed| stream_instance(&demand, &cfg, seed).unwrap().1.graph.num_vertices() as f64)
                    .sum::<f64>()
                    / 20.0
            })
            .collect();
        assert!(sizes[1] > 1.5 * sizes[0], "{sizes:?}");
    }

    #[test]
    fn curve_statistics() {
        let t = |f: Vec<f64>| RunTrace { seed: 0, warmup_filling: 0.0, failures: f, final_filling: 0.0 };
        let c = average_curve(&[t(vec![0.2, 0.4]), t(vec![0.4])]);
        assert_eq!(c.len(), 2);
        assert!((c[0].mean_filling_factor - 0.3).abs() < 1e-12);
        assert!((c[0].stderr - 0.1).abs() < 1e-12);
        assert_eq!((c[1].n, c[1].stderr), (1, 0.0));
    }
}
