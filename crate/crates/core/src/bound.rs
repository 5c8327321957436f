//! Capacities of the defect channel and the union-style upper bound on the
//! probability of decoding failure, together with the weight distributions
//! it needs.
//!
//! All probability sums are accumulated in natural-log space with a shifted,
//! compensated sum so that terms like `C(1023, u)·ε^u` neither overflow nor
//! underflow.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use statrs::function::factorial::ln_binomial as statrs_ln_binomial;

use crate::channel::ChannelParams;
use crate::codec::{PbchCode, PlbcParams};
use crate::error::{usage, Error, Result};
use crate::gf2::{BitMatrix, BitVector};

/// Largest code dimension enumerated exhaustively.
pub const ENUMERATION_LIMIT: usize = 24;

/// Relative size of the dropped defect-count tail at which the sum over `u` stops.
const TRUNCATION_REL: f64 = 1e-12;

/// `h(x) = −x log₂ x − (1−x) log₂(1−x)` with `h(0) = h(1) = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!(
            "entropy argument {x} outside [0, 1]"
        )));
    }
    let term = |v: f64| if v == 0.0 { 0.0 } else { -v * v.log2() };
    Ok(term(x) + term(1.0 - x))
}

/// Capacity when neither side knows the defects: `1 − h(p̃)`.
pub fn capacity_min(ch: &ChannelParams) -> f64 {
    1.0 - binary_entropy(ch.p_tilde()).expect("p_tilde is a probability")
}

/// Capacity with defect side information: `(1−ε)(1 − h(p))`.
pub fn capacity_max(ch: &ChannelParams) -> f64 {
    (1.0 - ch.epsilon) * (1.0 - binary_entropy(ch.p).expect("p is a probability"))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Capacity {
    pub epsilon: f64,
    pub p: f64,
    pub p_tilde: f64,
    pub c_min: f64,
    pub c_max: f64,
}

pub fn capacities(ch: &ChannelParams) -> Capacity {
    Capacity {
        epsilon: ch.epsilon,
        p: ch.p,
        p_tilde: ch.p_tilde(),
        c_min: capacity_min(ch),
        c_max: capacity_max(ch),
    }
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    statrs_ln_binomial(n as u64, k as u64)
}

/// `ln[C(n,k) p^k (1−p)^{n−k}]`, exact at `p ∈ {0, 1}`.
pub fn ln_binomial_pmf(n: usize, k: usize, p: f64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if p == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if p == 1.0 {
        return if k == n { 0.0 } else { f64::NEG_INFINITY };
    }
    ln_binomial(n, k) + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p()
}

/// `P(U = u)` for `U ~ Binomial(n, ε)`.
pub fn prob_defects(u: usize, n: usize, epsilon: f64) -> f64 {
    ln_binomial_pmf(n, u, epsilon).exp()
}

/// Sum of `exp(term)` with a running max shift and Neumaier compensation.
#[derive(Clone, Copy, Debug)]
struct LogSum {
    max: f64,
    sum: f64,
    comp: f64,
}

impl LogSum {
    fn new() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            sum: 0.0,
            comp: 0.0,
        }
    }

    fn add(&mut self, ln_term: f64) {
        if ln_term == f64::NEG_INFINITY {
            return;
        }
        if ln_term > self.max {
            let scale = (self.max - ln_term).exp();
            self.sum *= scale;
            self.comp *= scale;
            self.max = ln_term;
        }
        let x = (ln_term - self.max).exp();
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn ln_value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + (self.sum + self.comp).ln()
        }
    }

    fn value(&self) -> f64 {
        self.ln_value().exp()
    }
}

/// `ln P(X ≥ t0)` for `X ~ Binomial(n, p)`.
pub fn ln_binomial_tail(n: usize, p: f64, t0: i64) -> f64 {
    if t0 <= 0 {
        return 0.0;
    }
    let t0 = t0 as usize;
    if t0 > n || p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return 0.0;
    }
    let mode = ((n + 1) as f64 * p).floor() as usize;
    let mut acc = LogSum::new();
    for t in t0..=n {
        let term = ln_binomial_pmf(n, t, p);
        acc.add(term);
        // Past the mode terms shrink geometrically; stop once negligible.
        if t > mode && term < acc.ln_value() - 50.0 {
            break;
        }
    }
    acc.ln_value()
}

/// `P(X ≥ t0)` for `X ~ Binomial(n, p)`.
pub fn binomial_tail(n: usize, p: f64, t0: i64) -> f64 {
    ln_binomial_tail(n, p, t0).exp()
}

/// How a weight distribution was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AwMethod {
    ExactEnumeration,
    Macwilliams,
    BinomialApprox,
}

impl AwMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            AwMethod::ExactEnumeration => "exact-enumeration",
            AwMethod::Macwilliams => "macwilliams",
            AwMethod::BinomialApprox => "binomial-approx",
        }
    }
}

impl fmt::Display for AwMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AwMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "exact-enumeration" => Ok(AwMethod::ExactEnumeration),
            "macwilliams" => Ok(AwMethod::Macwilliams),
            "binomial" | "binomial-approx" => Ok(AwMethod::BinomialApprox),
            other => Err(usage!("unknown weight-distribution method {other:?}")),
        }
    }
}

/// Weight distribution `A_0..A_n` of a binary linear code.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightDistribution {
    pub n: usize,
    pub a: Vec<f64>,
    pub method: AwMethod,
}

impl WeightDistribution {
    /// `A_0 = 1`, `A_w = C(n,w)·2^{−l}` for `w ≥ d0`, zero in between.
    pub fn binomial_approx(n: usize, l: usize, d0: usize) -> Self {
        let ln2l = l as f64 * std::f64::consts::LN_2;
        let a = (0..=n)
            .map(|w| match w {
                0 => 1.0,
                w if w < d0 => 0.0,
                w => (ln_binomial(n, w) - ln2l).exp(),
            })
            .collect();
        Self {
            n,
            a,
            method: AwMethod::BinomialApprox,
        }
    }

    /// Exact distribution of the row space of `generator` by Gray-code walk.
    pub fn enumerate_row_space(generator: &BitMatrix) -> Result<Self> {
        let basis = generator.rref();
        let dim = basis.rank;
        if dim > ENUMERATION_LIMIT {
            return Err(usage!(
                "row space of dimension {dim} exceeds the enumeration limit 2^{ENUMERATION_LIMIT}"
            ));
        }
        let n = generator.num_cols();
        let mut counts = vec![0u64; n + 1];
        counts[0] = 1;
        let mut c = BitVector::zeros(n);
        for step in 1u64..1 << dim {
            c.xor_assign(basis.matrix.row(step.trailing_zeros() as usize));
            counts[c.weight()] += 1;
        }
        Ok(Self {
            n,
            a: counts.into_iter().map(|c| c as f64).collect(),
            method: AwMethod::ExactEnumeration,
        })
    }

    /// Distribution of `{c : c·G0ᵀ = 0}` for a constructed code.
    pub fn for_code(code: &PbchCode, method: AwMethod) -> Result<Self> {
        let p = code.params();
        match method {
            AwMethod::BinomialApprox => Ok(Self::binomial_approx(p.n, p.l, p.d0)),
            AwMethod::ExactEnumeration => {
                if p.n - p.l > ENUMERATION_LIMIT {
                    return Err(usage!(
                        "exact enumeration needs 2^{} codewords (limit 2^{ENUMERATION_LIMIT})",
                        p.n - p.l
                    ));
                }
                Self::enumerate_row_space(&code.g0().null_space())
            }
            AwMethod::Macwilliams => {
                if p.l > ENUMERATION_LIMIT {
                    return Err(usage!(
                        "MacWilliams route needs 2^{} dual codewords (limit 2^{ENUMERATION_LIMIT})",
                        p.l
                    ));
                }
                let dual = Self::enumerate_row_space(code.g0())?;
                macwilliams_transform(&dual, p.l)
            }
        }
    }

    /// Distribution of the dual of the code generated by `dual_generator`.
    pub fn macwilliams_from_dual(dual_generator: &BitMatrix) -> Result<Self> {
        let dual = Self::enumerate_row_space(dual_generator)?;
        macwilliams_transform(&dual, dual_generator.rank())
    }

    pub fn total(&self) -> f64 {
        self.a.iter().sum()
    }

    /// Smallest nonzero weight with `A_w > 0`.
    pub fn min_distance(&self) -> Option<usize> {
        (1..=self.n).find(|&w| self.a[w] > 0.0)
    }
}

/// Binary Krawtchouk polynomial `K_w(j) = Σ_s (−1)^s C(j,s) C(n−j, w−s)`.
pub fn krawtchouk(n: usize, w: usize, j: usize) -> BigInt {
    let mut acc = BigInt::zero();
    for s in 0..=w.min(j) {
        if w - s > n - j {
            continue;
        }
        let term = big_binomial(j, s) * big_binomial(n - j, w - s);
        if s % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

fn big_binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `A_w = 2^{−dual_dim} Σ_j B_j K_w(j)`, evaluated in exact integer arithmetic.
///
/// Uses the generating function `Σ_w K_w(j) z^w = (1−z)^j (1+z)^{n−j}`,
/// stepping `j → j+1` by multiplying with `(1−z)/(1+z)`.
pub fn macwilliams_transform(
    dual: &WeightDistribution,
    dual_dim: usize,
) -> Result<WeightDistribution> {
    let n = dual.n;
    let mut b = Vec::with_capacity(n + 1);
    for (j, &v) in dual.a.iter().enumerate() {
        if v < 0.0 || v.fract() != 0.0 || !v.is_finite() {
            return Err(Error::Numeric(format!(
                "dual weight A_{j} = {v} is not a count"
            )));
        }
        b.push(BigInt::from(v as u128));
    }
    let max_j = b.iter().rposition(|x| !x.is_zero()).unwrap_or(0);

    // (1+z)^n
    let mut kernel: Vec<BigInt> = (0..=n).map(|w| big_binomial(n, w)).collect();
    let mut acc = vec![BigInt::zero(); n + 1];
    for (j, bj) in b.iter().enumerate().take(max_j + 1) {
        if !bj.is_zero() {
            for (a, k) in acc.iter_mut().zip(&kernel) {
                *a += bj * k;
            }
        }
        if j < max_j {
            // Divide by (1+z), then multiply by (1−z).
            let mut q = vec![BigInt::zero(); n + 1];
            let mut prev = BigInt::zero();
            for (w, kw) in kernel.iter().enumerate() {
                q[w] = kw - &prev;
                prev = q[w].clone();
            }
            let mut prev = BigInt::zero();
            for (w, qw) in q.iter().enumerate() {
                kernel[w] = qw - &prev;
                prev = qw.clone();
            }
        }
    }

    let denom = BigInt::one() << dual_dim;
    let mut a = Vec::with_capacity(n + 1);
    for (w, v) in acc.into_iter().enumerate() {
        if (&v % &denom) != BigInt::zero() {
            return Err(Error::Numeric(format!(
                "MacWilliams output A_{w} is not an integer"
            )));
        }
        let q = v / &denom;
        if q.is_negative() {
            return Err(Error::Numeric(format!(
                "MacWilliams output A_{w} is negative"
            )));
        }
        a.push(q.to_f64().unwrap_or(f64::INFINITY));
    }
    Ok(WeightDistribution {
        n,
        a,
        method: AwMethod::Macwilliams,
    })
}

/// `Σ_{w=d0}^{u} A_w C(n−w, u−w) / C(n, u)`, unclamped.
pub fn masking_failure_bound_raw(u: usize, wd: &WeightDistribution) -> f64 {
    let n = wd.n;
    if u > n {
        return f64::NAN;
    }
    let ln_total = ln_binomial(n, u);
    let mut acc = LogSum::new();
    for w in 1..=u {
        let aw = wd.a[w];
        if aw > 0.0 {
            acc.add(aw.ln() + ln_binomial(n - w, u - w) - ln_total);
        }
    }
    acc.value()
}

/// Upper bound on `P(masking failure | U = u)`, clamped to `[0, 1]`.
pub fn masking_failure_bound(u: usize, wd: &WeightDistribution) -> f64 {
    masking_failure_bound_raw(u, wd).min(1.0)
}

/// Which closed form produced a bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    General,
    EpsilonZero,
    LZero,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundResult {
    /// Bound on `P(M = 0, D = 0)`.
    pub p_mask_and_fail: f64,
    /// Bound on `P(M = 1, D = 0)`.
    pub p_maskok_and_fail: f64,
    /// Unclamped sum of the two parts.
    pub total: f64,
    pub regime: Regime,
    pub aw_method: AwMethod,
    /// Upper bound on the probability mass dropped by truncating the defect-count sum.
    pub truncation_tail: f64,
}

impl BoundResult {
    pub fn clamped_total(&self) -> f64 {
        self.total.min(1.0)
    }
}

fn check_consistent(params: &PlbcParams, wd: &WeightDistribution) -> Result<()> {
    if wd.n != params.n || wd.a.len() != params.n + 1 {
        return Err(usage!(
            "weight distribution length {} does not match n={}",
            wd.n,
            params.n
        ));
    }
    Ok(())
}

/// Upper bound on `P(decoding failure)` with automatic regime selection:
/// `ε = 0` uses the pure random-error tail, `l = 0` the equivalent BSC with
/// crossover `p̃`, anything else the general two-part bound.
pub fn decoding_failure_bound(
    params: &PlbcParams,
    wd: &WeightDistribution,
    ch: &ChannelParams,
) -> Result<BoundResult> {
    check_consistent(params, wd)?;
    let n = params.n;
    let t0 = params.t1 as i64 + 1;
    if ch.epsilon == 0.0 {
        let total = binomial_tail(n, ch.p, t0);
        return Ok(BoundResult {
            p_mask_and_fail: 0.0,
            p_maskok_and_fail: total,
            total,
            regime: Regime::EpsilonZero,
            aw_method: wd.method,
            truncation_tail: 0.0,
        });
    }
    if params.l == 0 {
        let total = binomial_tail(n, ch.p_tilde(), t0);
        return Ok(BoundResult {
            p_mask_and_fail: 0.0,
            p_maskok_and_fail: total,
            total,
            regime: Regime::LZero,
            aw_method: wd.method,
            truncation_tail: 0.0,
        });
    }
    general_bound(params, wd, ch)
}

/// The general two-part bound, without regime shortcuts. Requires `l > 0`.
pub fn general_bound(
    params: &PlbcParams,
    wd: &WeightDistribution,
    ch: &ChannelParams,
) -> Result<BoundResult> {
    check_consistent(params, wd)?;
    if params.l == 0 {
        return Err(usage!(
            "general bound needs l > 0; l = 0 uses the equivalent-BSC form"
        ));
    }
    let (n, d0, t1) = (params.n, params.d0, params.t1 as i64);
    let (eps, p) = (ch.epsilon, ch.p);
    let mode = ((n + 1) as f64 * eps).floor() as usize;

    let mut first = LogSum::new();
    let mut second = LogSum::new();
    let mut truncation_tail = 0.0;
    for u in 0..=n {
        let ln_pu = ln_binomial_pmf(n, u, eps);
        if ln_pu != f64::NEG_INFINITY {
            second.add(ln_pu + ln_binomial_tail(n - u, p, t1 + 1));
            if u >= d0 {
                let mb = masking_failure_bound(u, wd);
                if mb > 0.0 {
                    let start = t1 + d0 as i64 - u as i64;
                    first.add(ln_pu + mb.ln() + ln_binomial_tail(n - u, p, start));
                }
            }
        }
        if u > mode && u < n && eps < 1.0 {
            // P(U=u+1)/P(U=u) is decreasing in u, so the tail is dominated by a geometric series.
            let ratio = (n - u) as f64 / (u + 1) as f64 * eps / (1.0 - eps);
            if ratio < 1.0 {
                let tail = ln_pu.exp() * ratio / (1.0 - ratio);
                let total = first.value() + second.value();
                // Each dropped term is at most P(U=u) in each of the two parts.
                if 2.0 * tail <= TRUNCATION_REL * total || tail == 0.0 {
                    truncation_tail = 2.0 * tail;
                    break;
                }
            }
        }
    }
    let (a, b) = (first.value(), second.value());
    Ok(BoundResult {
        p_mask_and_fail: a,
        p_maskok_and_fail: b,
        total: a + b,
        regime: Regime::General,
        aw_method: wd.method,
        truncation_tail,
    })
}
