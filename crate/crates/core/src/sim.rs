//! Monte Carlo estimation of masking and decoding failure rates.
//!
//! Trial `i` draws everything from `trial_rng(seed, lane, i)`, and trials are
//! processed in fixed-size chunks whose counters are summed, so the result
//! does not depend on the number of worker threads.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::channel::{sample_defects, sample_errors, transmit, trial_rng, ChannelParams};
use crate::codec::PbchCode;
use crate::error::{usage, Result};
use crate::gf2::BitVector;

/// Trials per scheduling chunk; early stopping is checked between chunks.
pub const CHUNK: u64 = 4096;

#[derive(Clone, Debug, Default)]
pub struct SimOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    /// Stop after the first chunk that brings decoding failures to this count.
    pub stop_after_failures: Option<u64>,
    /// Independent stream family, e.g. the candidate index in a sweep.
    pub lane: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimResult {
    pub trials: u64,
    pub masking_failures: u64,
    pub decoding_failures: u64,
    pub joint_mask_fail_decode_fail: u64,
    pub failure_rate: f64,
    pub ci95: (f64, f64),
    pub seed: u64,
    pub elapsed: f64,
}

impl SimResult {
    pub fn masking_rate(&self) -> f64 {
        self.masking_failures as f64 / self.trials as f64
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TrialOutcome {
    pub mask_failed: bool,
    pub decode_failed: bool,
}

#[derive(Clone, Copy, Default)]
struct Counts {
    trials: u64,
    mask: u64,
    dec: u64,
    joint: u64,
}

impl Counts {
    fn merge(self, o: Counts) -> Counts {
        Counts {
            trials: self.trials + o.trials,
            mask: self.mask + o.mask,
            dec: self.dec + o.dec,
            joint: self.joint + o.joint,
        }
    }

    fn of(t: TrialOutcome) -> Counts {
        Counts {
            trials: 1,
            mask: t.mask_failed as u64,
            dec: t.decode_failed as u64,
            joint: (t.mask_failed && t.decode_failed) as u64,
        }
    }
}

/// Uniform random message of length `k`.
pub fn random_message<R: Rng + ?Sized>(k: usize, rng: &mut R) -> BitVector {
    let words = (0..k.div_ceil(64)).map(|_| rng.random::<u64>()).collect();
    BitVector::from_words(k, words)
}

/// One encode → channel → decode round trip.
pub fn run_trial(
    code: &PbchCode,
    ch: &ChannelParams,
    seed: u64,
    lane: u64,
    index: u64,
) -> TrialOutcome {
    let mut rng = trial_rng(seed, lane, index);
    let w = random_message(code.k(), &mut rng);
    let s = sample_defects(code.n(), ch, &mut rng);
    let z = sample_errors(&s, ch, &mut rng);
    let (c, mask) = code.encode(&w, &s);
    let y = transmit(&c, &s, &z).expect("errors are drawn on normal cells only");
    let out = code.decode(&y);
    TrialOutcome {
        mask_failed: !mask.succeeded(),
        decode_failed: out.w_hat != w,
    }
}

/// `run_trials_with` using the global pool, lane 0 and no early stop.
pub fn run_trials(
    code: &PbchCode,
    ch: &ChannelParams,
    trials: u64,
    seed: u64,
) -> Result<SimResult> {
    run_trials_with(code, ch, trials, seed, &SimOptions::default())
}

pub fn run_trials_with(
    code: &PbchCode,
    ch: &ChannelParams,
    trials: u64,
    seed: u64,
    opts: &SimOptions,
) -> Result<SimResult> {
    if trials == 0 {
        return Err(usage!("trials must be at least 1"));
    }
    let start = Instant::now();
    let body = || {
        let mut total = Counts::default();
        let mut next = 0u64;
        while next < trials {
            let end = (next + CHUNK).min(trials);
            let chunk = (next..end)
                .into_par_iter()
                .map(|i| Counts::of(run_trial(code, ch, seed, opts.lane, i)))
                .reduce(Counts::default, Counts::merge);
            total = total.merge(chunk);
            next = end;
            if opts
                .stop_after_failures
                .is_some_and(|target| total.dec >= target)
            {
                break;
            }
        }
        total
    };
    let counts = match opts.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| usage!("cannot start {t} worker threads: {e}"))?
            .install(body),
        None => body(),
    };
    let failure_rate = counts.dec as f64 / counts.trials as f64;
    Ok(SimResult {
        trials: counts.trials,
        masking_failures: counts.mask,
        decoding_failures: counts.dec,
        joint_mask_fail_decode_fail: counts.joint,
        failure_rate,
        ci95: wilson_interval(counts.dec, counts.trials, 0.95)?,
        seed,
        elapsed: start.elapsed().as_secs_f64(),
    })
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, confidence: f64) -> Result<(f64, f64)> {
    if trials == 0 || successes > trials {
        return Err(usage!(
            "wilson interval needs 0 ≤ successes ≤ trials, trials ≥ 1"
        ));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(usage!("confidence {confidence} outside (0, 1)"));
    }
    let z = Normal::standard().inverse_cdf(1.0 - (1.0 - confidence) / 2.0);
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    Ok((lo, hi))
}
