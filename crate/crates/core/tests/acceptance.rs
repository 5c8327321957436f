//! Release gate: every check prints one PASS/FAIL line and the process
//! exits nonzero if any check fails or exceeds its time budget.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use plbc::alloc::{allocate, Method};
use plbc::bound::{
    binomial_tail, decoding_failure_bound, general_bound, AwMethod, Regime, WeightDistribution,
};
use plbc::channel::{table2, transmit, ChannelParams, DefectVector};
use plbc::codec::{construct_pbch, PbchCode, PlbcParams};
use plbc::gf2::BitVector;
use plbc::sim::{run_trials_with, wilson_interval, SimOptions};

type Check = fn() -> Result<String, String>;

fn plbc(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_plbc"))
        .args(args)
        .output()
        .map_err(|e| format!("cannot run plbc: {e}"))?;
    if !out.status.success() {
        return Err(format!(
            "plbc {args:?} exited with {}: {}",
            out.status,
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

/// Data rows of a CSV with a schema line and a header.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(2)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn candidate_listing() -> Result<String, String> {
    let out = plbc(&["candidates", "--n", "1023", "--k", "923", "--m", "10"])?;
    let rows: Vec<[usize; 4]> = csv_rows(&out)
        .iter()
        .map(|r| {
            [
                r[1].parse().unwrap(),
                r[2].parse().unwrap(),
                r[3].parse().unwrap(),
                r[4].parse().unwrap(),
            ]
        })
        .collect();
    let expected = [
        [0, 100, 0, 21],
        [10, 90, 3, 19],
        [20, 80, 5, 17],
        [30, 70, 7, 15],
        [40, 60, 9, 13],
        [50, 50, 11, 11],
        [60, 40, 13, 9],
        [70, 30, 15, 7],
        [80, 20, 17, 5],
        [90, 10, 19, 3],
        [100, 0, 21, 0],
    ];
    ensure(rows == expected, || format!("got {rows:?}"))?;
    Ok("11 rows of (l, r, d0, d1) match".into())
}

fn capacity_presets() -> Result<String, String> {
    let out = plbc(&["capacity", "--preset", "table2"])?;
    let rows = csv_rows(&out);
    let c_max = [0.9624, 0.9686, 0.9719, 0.9753, 0.9827, 0.9868, 0.9920];
    ensure(rows.len() == 7, || format!("{} rows", rows.len()))?;
    let mut worst = 0.0f64;
    for (row, want) in rows.iter().zip(c_max) {
        let c_min: f64 = row[4].parse().unwrap();
        let got: f64 = row[5].parse().unwrap();
        worst = worst.max((c_min - 0.9624).abs()).max((got - want).abs());
    }
    ensure(worst <= 5e-4, || format!("max deviation {worst:.2e}"))?;
    Ok(format!("max deviation {worst:.2e} (tolerance 5e-4)"))
}

fn preset_allocation() -> Result<String, String> {
    let out = plbc(&["allocate", "--preset", "table2", "--method", "bound"])?;
    let best: Vec<usize> = csv_rows(&out)
        .iter()
        .filter(|r| r[12] == "true")
        .map(|r| r[4].parse().unwrap())
        .collect();
    let expected = [0, 10, 20, 20, 30, 30, 100];
    ensure(best.len() == 7, || format!("{} best rows", best.len()))?;
    for (i, (&got, &want)) in best.iter().zip(&expected).enumerate() {
        let ok = if i == 2 {
            got == 10 || got == 20
        } else {
            got == want
        };
        ensure(ok, || {
            format!(
                "channel {} chose l={got}, expected {want}; all {best:?}",
                i + 1
            )
        })?;
    }
    Ok(format!("best l per channel {best:?}"))
}

fn boundary_optima() -> Result<String, String> {
    let bound = Method::Bound {
        aw: AwMethod::BinomialApprox,
    };
    let no_defects = ChannelParams::new(0.0, 4e-3).unwrap();
    let no_errors = ChannelParams::new(8e-3, 0.0).unwrap();
    let a = allocate(1023, 923, 10, &no_defects, &bound).map_err(|e| e.to_string())?;
    let b = allocate(1023, 923, 10, &no_errors, &bound).map_err(|e| e.to_string())?;
    ensure(a.best_l == 0, || format!("eps=0 chose l={}", a.best_l))?;
    ensure(b.best_l == 100, || format!("p=0 chose l={}", b.best_l))?;
    Ok("eps=0 gives l=0, p=0 gives l=n-k=100".into())
}

fn stuck_patterns(n: usize, u: usize) -> Vec<DefectVector> {
    let mut out = Vec::new();
    let mut positions = Vec::with_capacity(u);
    fn rec(n: usize, u: usize, start: usize, pos: &mut Vec<usize>, out: &mut Vec<DefectVector>) {
        if pos.len() == u {
            for v in 0..1u32 << u {
                let values: Vec<bool> = (0..u).map(|i| v >> i & 1 == 1).collect();
                out.push(DefectVector::with_defects(n, pos, &values));
            }
            return;
        }
        for i in start..n {
            pos.push(i);
            rec(n, u, i + 1, pos, out);
            pos.pop();
        }
    }
    rec(n, u, 0, &mut positions, &mut out);
    out
}

fn message(k: usize, bits: u64) -> BitVector {
    BitVector::from_words(k, vec![bits])
}

fn decodes(code: &PbchCode, w: &BitVector, s: &DefectVector, z: &BitVector) -> bool {
    let (c, _) = code.encode(w, s);
    let y = transmit(&c, s, z).unwrap();
    code.decode(&y).w_hat == *w
}

fn exhaustive_small_code() -> Result<String, String> {
    let code = construct_pbch(15, 7, 4).map_err(|e| e.to_string())?;
    let n = 15;
    let mut cases = 0u64;
    let mut failures = 0u64;
    for u in 0..=2 {
        for s in stuck_patterns(n, u) {
            let mut errors = vec![BitVector::zeros(n)];
            for i in (0..n).filter(|&i| !s.stuck_mask().get(i)) {
                let mut z = BitVector::zeros(n);
                z.set(i, true);
                errors.push(z);
            }
            for bits in 0..128 {
                let w = message(7, bits);
                for z in &errors {
                    cases += 1;
                    failures += !decodes(&code, &w, &s, z) as u64;
                }
            }
        }
    }
    let zero = BitVector::zeros(n);
    for s in stuck_patterns(n, 3) {
        for bits in 0..128 {
            cases += 1;
            failures += !decodes(&code, &message(7, bits), &s, &zero) as u64;
        }
    }
    ensure(failures == 0, || {
        format!("{failures} failures in {cases} cases")
    })?;
    Ok(format!("{cases} cases, 0 failures"))
}

fn as_u16(v: &BitVector) -> u16 {
    v.words().first().copied().unwrap_or(0) as u16
}

/// Exact `P(masking failure)` by enumerating every defect set and every message:
/// a stuck pattern on Ψ is maskable iff some coset word agrees with it on Ψ.
fn exact_masking_failure(code: &PbchCode, eps: f64) -> f64 {
    let (n, k, l) = (code.n(), code.k(), code.l());
    let c1: Vec<u16> = (0..1u64 << k)
        .map(|w| as_u16(&code.g1().left_mul(&message(k, w))))
        .collect();
    let c0: Vec<u16> = (0..1u64 << l)
        .map(|d| as_u16(&code.g0().left_mul(&message(l, d))))
        .collect();
    let mut total = 0.0;
    for psi in 0u16..1 << n {
        let u = psi.count_ones() as i32;
        let weight = eps.powi(u) * (1.0 - eps).powi(n as i32 - u);
        let mut fail = 0.0;
        for &cw in &c1 {
            let mut seen: Vec<u16> = c0.iter().map(|&d| (cw ^ d) & psi).collect();
            seen.sort_unstable();
            seen.dedup();
            fail += 1.0 - seen.len() as f64 / (1u64 << u) as f64;
        }
        total += weight * fail / c1.len() as f64;
    }
    total
}

fn masking_oracle() -> Result<String, String> {
    let code = construct_pbch(15, 7, 4).map_err(|e| e.to_string())?;
    let eps = 0.3;
    let exact = exact_masking_failure(&code, eps);
    let ch = ChannelParams::new(eps, 0.0).unwrap();
    let trials = 100_000;
    let r = run_trials_with(&code, &ch, trials, 20_240_601, &SimOptions::default())
        .map_err(|e| e.to_string())?;
    let (lo, hi) = wilson_interval(r.masking_failures, trials, 0.95).unwrap();
    ensure(lo <= exact && exact <= hi, || {
        format!(
            "exact {exact:.6} outside [{lo:.6}, {hi:.6}] (rate {:.6})",
            r.masking_rate()
        )
    })?;
    Ok(format!(
        "exact {exact:.6}, simulated {:.6}, 95% interval [{lo:.6}, {hi:.6}]",
        r.masking_rate()
    ))
}

fn dominance_case(
    code: &PbchCode,
    wd: &WeightDistribution,
    ch: &ChannelParams,
    lane: u64,
) -> Result<String, String> {
    let trials = 100_000;
    let opts = SimOptions {
        lane,
        ..Default::default()
    };
    let r = run_trials_with(code, ch, trials, 7_7_7, &opts).map_err(|e| e.to_string())?;
    let b = decoding_failure_bound(code.params(), wd, ch).map_err(|e| e.to_string())?;
    let rate = r.failure_rate;
    let sigma = (rate * (1.0 - rate) / trials as f64).sqrt();
    ensure(rate - 3.0 * sigma <= b.total, || {
        format!(
            "(eps={}, p={}) rate {rate:.3e} - 3 sigma exceeds bound {:.3e}",
            ch.epsilon, ch.p, b.total
        )
    })?;
    Ok(format!(
        "({}, {}): {rate:.2e} vs {:.2e}",
        ch.epsilon, ch.p, b.total
    ))
}

fn bound_dominance() -> Result<String, String> {
    let small = construct_pbch(15, 7, 4).map_err(|e| e.to_string())?;
    let exact = WeightDistribution::for_code(&small, AwMethod::ExactEnumeration)
        .map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    let mut lane = 0;
    for eps in [0.05, 0.1] {
        for p in [0.01, 0.02] {
            notes.push(dominance_case(
                &small,
                &exact,
                &ChannelParams::new(eps, p).unwrap(),
                lane,
            )?);
            lane += 1;
        }
    }
    let big = construct_pbch(1023, 923, 20).map_err(|e| e.to_string())?;
    let p = big.params();
    let wd = WeightDistribution::binomial_approx(p.n, p.l, p.d0);
    notes.push(dominance_case(&big, &wd, &table2()[3].1, lane)?);
    Ok(notes.join("; "))
}

fn regime_identities() -> Result<String, String> {
    let params = PlbcParams::new(1023, 923, 20).unwrap();
    let wd = WeightDistribution::binomial_approx(1023, 20, params.d0);
    let p = 4e-3;
    let pure = decoding_failure_bound(&params, &wd, &ChannelParams::new(0.0, p).unwrap()).unwrap();
    let tiny = general_bound(&params, &wd, &ChannelParams::new(1e-15, p).unwrap()).unwrap();
    ensure(pure.regime == Regime::EpsilonZero, || {
        "eps=0 did not route to the error-only form".into()
    })?;
    let rel_a = (tiny.total - pure.total).abs() / pure.total;
    ensure(rel_a <= 1e-9, || format!("eps->0 relative gap {rel_a:.3e}"))?;

    let l0 = PlbcParams::new(1023, 923, 0).unwrap();
    let wd0 = WeightDistribution::binomial_approx(1023, 0, 0);
    let channels = table2();
    let c1 = decoding_failure_bound(&l0, &wd0, &channels[0].1).unwrap();
    let c4 = decoding_failure_bound(&l0, &wd0, &channels[3].1).unwrap();
    let rel_b = (c1.total - c4.total).abs() / c1.total;
    ensure(rel_b <= 1e-6, || {
        format!(
            "eps->0 gap {rel_a:.1e} ok; l=0 channel 1 {:.6e} (p~={}) vs channel 4 {:.6e} (p~={}): relative gap {rel_b:.3e} > 1e-6",
            c1.total,
            channels[0].1.p_tilde(),
            c4.total,
            channels[3].1.p_tilde()
        )
    })?;
    // Both l = 0 totals are the plain tail at t1 + 1 = 11.
    ensure(
        (c4.total - binomial_tail(1023, channels[3].1.p_tilde(), 11)).abs() <= 1e-15,
        || "tail mismatch".into(),
    )?;
    Ok(format!(
        "eps->0 gap {rel_a:.1e}; l=0 channel 1 vs 4 gap {rel_b:.1e}"
    ))
}

fn weight_distributions() -> Result<String, String> {
    let mut notes = Vec::new();
    for (l, dim, a_min) in [(4usize, 11usize, (3usize, 35.0f64)), (8, 7, (5, 18.0))] {
        let code = construct_pbch(15, 7, l).map_err(|e| e.to_string())?;
        let direct = WeightDistribution::for_code(&code, AwMethod::ExactEnumeration)
            .map_err(|e| e.to_string())?;
        let mw = WeightDistribution::for_code(&code, AwMethod::Macwilliams)
            .map_err(|e| e.to_string())?;
        ensure(direct.a == mw.a, || {
            format!("[15,{dim}] differs: {:?} vs {:?}", direct.a, mw.a)
        })?;
        ensure(direct.total() == (1u64 << dim) as f64, || {
            format!("[15,{dim}] has {} words", direct.total())
        })?;
        ensure(direct.a[a_min.0] == a_min.1, || {
            format!("[15,{dim}] A_{} = {}", a_min.0, direct.a[a_min.0])
        })?;
        notes.push(format!("[15,{dim}] A_{}={}", a_min.0, a_min.1));
    }
    Ok(notes.join(", ") + ", all weights agree")
}

fn determinism() -> Result<String, String> {
    let runs = [
        vec![
            "simulate",
            "--n",
            "1023",
            "--k",
            "923",
            "--l",
            "20",
            "--epsilon",
            "0.004",
            "--p",
            "0.002",
        ],
        vec![
            "simulate",
            "--n",
            "15",
            "--k",
            "7",
            "--epsilon",
            "0.1",
            "--p",
            "0.02",
        ],
    ];
    for args in runs {
        let mut one = vec!["--threads", "1"];
        one.extend(&args);
        one.extend(["--trials", "20000", "--seed", "99"]);
        let mut eight = vec!["--threads", "8"];
        eight.extend(&args);
        eight.extend(["--trials", "20000", "--seed", "99"]);
        let a = plbc(&one)?;
        let b = plbc(&eight)?;
        ensure(a == b, || format!("outputs differ:\n{a}\n{b}"))?;
    }
    Ok("byte-identical CSV at 1 and 8 threads".into())
}

fn main() -> ExitCode {
    let checks: [(u32, &str, Duration, Check); 10] = [
        (
            1,
            "candidate table",
            Duration::from_secs(1),
            candidate_listing,
        ),
        (
            2,
            "capacity table",
            Duration::from_secs(1),
            capacity_presets,
        ),
        (
            3,
            "bound-based allocation",
            Duration::from_secs(30),
            preset_allocation,
        ),
        (
            4,
            "boundary optima",
            Duration::from_secs(10),
            boundary_optima,
        ),
        (
            5,
            "exhaustive masking and correction",
            Duration::from_secs(300),
            exhaustive_small_code,
        ),
        (
            6,
            "masking-failure oracle",
            Duration::from_secs(120),
            masking_oracle,
        ),
        (
            7,
            "bound dominance",
            Duration::from_secs(900),
            bound_dominance,
        ),
        (
            8,
            "regime identities",
            Duration::from_secs(1),
            regime_identities,
        ),
        (
            9,
            "weight-distribution routes",
            Duration::from_secs(60),
            weight_distributions,
        ),
        (
            10,
            "thread-count determinism",
            Duration::from_secs(120),
            determinism,
        ),
    ];
    let mut failed = 0;
    for (id, name, budget, check) in checks {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let (status, detail) = match result {
            Ok(d) if took <= budget => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; took {took:.2?}, budget {budget:?}")),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {id:>2} {status} [{name}] {detail} ({:.2}s)",
            took.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
