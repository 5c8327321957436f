//! Splitting the redundancy `n − k` between defect masking (`l`) and error
//! correction (`r`), choosing the split with the smallest failure metric.

use rayon::prelude::*;
use serde::Serialize;

use crate::bound::{
    capacities, decoding_failure_bound, AwMethod, BoundResult, Capacity, WeightDistribution,
};
use crate::channel::ChannelParams;
use crate::codec::{construct_pbch, field_degree, PlbcParams};
use crate::error::{usage, Result};
use crate::sim::{run_trials_with, SimOptions, SimResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AllocationCandidate {
    pub index: usize,
    pub l: usize,
    pub r: usize,
    pub d0: usize,
    pub d1: usize,
}

/// All splits `l = 0, m, 2m, …, n − k` in ascending order.
pub fn enumerate_candidates(n: usize, k: usize, m: u32) -> Result<Vec<AllocationCandidate>> {
    let expected = field_degree(n)?;
    if m != expected {
        return Err(usage!("m={m} does not match n={n} (expected m={expected})"));
    }
    if k == 0 || k >= n {
        return Err(usage!("k={k} must satisfy 0 < k < n={n}"));
    }
    let m = m as usize;
    if !(n - k).is_multiple_of(m) {
        return Err(usage!(
            "redundancy n-k={} is not a multiple of m={m}",
            n - k
        ));
    }
    (0..=(n - k) / m)
        .map(|i| {
            let p = PlbcParams::new(n, k, i * m)?;
            Ok(AllocationCandidate {
                index: i,
                l: p.l,
                r: p.r,
                d0: p.d0,
                d1: p.d1,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    Bound {
        aw: AwMethod,
    },
    Simulation {
        trials: u64,
        seed: u64,
        stop_after_failures: Option<u64>,
    },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Bound { .. } => "bound",
            Method::Simulation { .. } => "simulation",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CandidateResult {
    pub l: usize,
    pub r: usize,
    pub d0: usize,
    pub d1: usize,
    /// Bound total (unclamped) or simulated decoding-failure rate.
    pub metric: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci: Option<(f64, f64)>,
    /// False when a simulation saw no failures at all.
    pub estimable: bool,
    #[serde(skip)]
    pub bound: Option<BoundResult>,
    #[serde(skip)]
    pub sim: Option<SimResult>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AllocationReport {
    pub channel: Capacity,
    pub method: String,
    pub candidates: Vec<CandidateResult>,
    pub best_l: usize,
    pub best_r: usize,
}

impl AllocationReport {
    pub fn best(&self) -> &CandidateResult {
        self.candidates
            .iter()
            .find(|c| c.l == self.best_l)
            .expect("best candidate is in the list")
    }
}

fn evaluate(
    n: usize,
    k: usize,
    cand: &AllocationCandidate,
    ch: &ChannelParams,
    method: &Method,
    threads: Option<usize>,
) -> Result<CandidateResult> {
    let params = PlbcParams::new(n, k, cand.l)?;
    let mut out = CandidateResult {
        l: cand.l,
        r: cand.r,
        d0: cand.d0,
        d1: cand.d1,
        metric: f64::NAN,
        ci: None,
        estimable: true,
        bound: None,
        sim: None,
    };
    match *method {
        Method::Bound { aw } => {
            let wd = match aw {
                AwMethod::BinomialApprox => {
                    WeightDistribution::binomial_approx(n, params.l, params.d0)
                }
                exact => WeightDistribution::for_code(&construct_pbch(n, k, cand.l)?, exact)?,
            };
            let b = decoding_failure_bound(&params, &wd, ch)?;
            out.metric = b.total;
            out.bound = Some(b);
        }
        Method::Simulation {
            trials,
            seed,
            stop_after_failures,
        } => {
            let code = construct_pbch(n, k, cand.l)?;
            let opts = SimOptions {
                threads,
                stop_after_failures,
                lane: cand.index as u64,
            };
            let s = run_trials_with(&code, ch, trials, seed, &opts)?;
            out.metric = s.failure_rate;
            out.ci = Some(s.ci95);
            out.estimable = s.decoding_failures > 0;
            out.sim = Some(s);
        }
    }
    Ok(out)
}

/// Index of the smallest metric; ties go to the smallest `l`.
pub fn argmin(results: &[CandidateResult]) -> Option<usize> {
    (0..results.len()).min_by(|&a, &b| {
        results[a]
            .metric
            .total_cmp(&results[b].metric)
            .then(results[a].l.cmp(&results[b].l))
    })
}

pub fn allocate(
    n: usize,
    k: usize,
    m: u32,
    ch: &ChannelParams,
    method: &Method,
) -> Result<AllocationReport> {
    allocate_with_threads(n, k, m, ch, method, None)
}

/// Candidates are evaluated concurrently; the report is assembled in `l` order.
pub fn allocate_with_threads(
    n: usize,
    k: usize,
    m: u32,
    ch: &ChannelParams,
    method: &Method,
    threads: Option<usize>,
) -> Result<AllocationReport> {
    let cands = enumerate_candidates(n, k, m)?;
    let results: Vec<CandidateResult> = cands
        .par_iter()
        .map(|c| evaluate(n, k, c, ch, method, threads))
        .collect::<Result<_>>()?;
    let best = &results[argmin(&results).expect("at least one candidate")];
    Ok(AllocationReport {
        channel: capacities(ch),
        method: method.name().to_string(),
        best_l: best.l,
        best_r: best.r,
        candidates: results,
    })
}
