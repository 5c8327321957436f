//! Partitioned BCH codes: construction, two-step defect masking, and
//! bounded-distance decoding.
//!
//! An `[n, k, l]` code is a pair of cyclic codes nested inside a narrow-sense
//! BCH code `C = ⟨g⟩` with `r = n − k − l` check symbols. `G1` (message part)
//! is spanned by `x^i·g(x)` for `i < k`; `G0` (masking part) by `x^i·p(x)` for
//! `i < l`, where `p = (xⁿ − 1)/h` and `h` is the reciprocal of the BCH
//! generator of distance `d0`. The words annihilated by `G0` then form the
//! BCH code `⟨h*⟩`, which gives the masking distance `d0`, while `C` itself
//! has distance at least `d1`.

use serde::Serialize;

use crate::bch::{bch_generator, bch_parity_check, consecutive_root_cosets, poly_row};
use crate::channel::DefectVector;
use crate::error::{construction, usage, Result};
use crate::field::GaloisField;
use crate::gf2::{solve_by_columns, BitMatrix, BitVector};
use crate::poly::Poly2;

/// Cell counts and designed distances of an `[n, k, l]` partitioned BCH code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PlbcParams {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub r: usize,
    pub m: u32,
    pub t0: usize,
    pub t1: usize,
    /// `2·t0 + 1`, or 0 when `l = 0`.
    pub d0: usize,
    /// `2·t1 + 1`, or 0 when `r = 0`.
    pub d1: usize,
}

/// Extension degree `m` with `n = 2^m − 1`.
pub fn field_degree(n: usize) -> Result<u32> {
    let m = (n + 1).trailing_zeros();
    if n < 3 || (n + 1).count_ones() != 1 || m > 16 {
        return Err(usage!("n={n} is not of the form 2^m - 1 with 2 <= m <= 16"));
    }
    Ok(m)
}

impl PlbcParams {
    pub fn new(n: usize, k: usize, l: usize) -> Result<Self> {
        let m = field_degree(n)?;
        if k == 0 || k > n {
            return Err(usage!("message size k={k} must satisfy 1 <= k <= n={n}"));
        }
        if l > n - k {
            return Err(usage!("masking redundancy l={l} exceeds n-k={}", n - k));
        }
        let r = n - k - l;
        let mu = m as usize;
        if !l.is_multiple_of(mu) {
            return Err(construction!("l not a multiple of m={m} (l={l})"));
        }
        if !r.is_multiple_of(mu) {
            return Err(construction!("r = n-k-l = {r} is not a multiple of m={m}"));
        }
        let (t0, t1) = (l / mu, r / mu);
        Ok(Self {
            n,
            k,
            l,
            r,
            m,
            t0,
            t1,
            d0: if l == 0 { 0 } else { 2 * t0 + 1 },
            d1: if r == 0 { 0 } else { 2 * t1 + 1 },
        })
    }

    /// Number of random errors the bounded-distance decoder corrects.
    pub fn correctable(&self) -> usize {
        self.t1
    }
}

/// A constructed partitioned BCH code. Immutable and shareable across threads.
#[derive(Clone, Debug)]
pub struct PbchCode {
    params: PlbcParams,
    field: GaloisField,
    g_poly: Poly2,
    p_poly: Poly2,
    g1: BitMatrix,
    g0: BitMatrix,
    h: BitMatrix,
    ginv1: BitMatrix,
    // Column i of G0, length l; rows of the masking system.
    g0_cols: Vec<BitVector>,
}

/// Builds the `[n, k, l]` partitioned BCH code.
pub fn construct_pbch(n: usize, k: usize, l: usize) -> Result<PbchCode> {
    let params = PlbcParams::new(n, k, l)?;
    let field = GaloisField::new(params.m)?;

    let g_poly = bch_generator(&field, 2 * params.t1 + 1)?;
    if g_poly.degree() != Some(params.r) {
        return Err(construction!(
            "BCH generator for t1={} has degree {:?}, expected r={}",
            params.t1,
            g_poly.degree(),
            params.r
        ));
    }
    let h_star = bch_generator(&field, 2 * params.t0 + 1)?;
    if h_star.degree() != Some(params.l) {
        return Err(construction!(
            "BCH generator for t0={} has degree {:?}, expected l={}",
            params.t0,
            h_star.degree(),
            params.l
        ));
    }

    // Roots of g are α^j over the cosets of 1..2t1; roots of h = rev(h*) are their inverses over 1..2t0.
    let g_roots: Vec<usize> = consecutive_root_cosets(n, 2 * params.t1)
        .into_iter()
        .flat_map(|c| c.members)
        .collect();
    let h_roots: Vec<usize> = consecutive_root_cosets(n, 2 * params.t0)
        .into_iter()
        .flat_map(|c| c.members)
        .map(|e| (n - e) % n)
        .collect();
    let mut collide: Vec<usize> = g_roots
        .iter()
        .copied()
        .filter(|e| h_roots.contains(e))
        .collect();
    if !collide.is_empty() {
        collide.sort_unstable();
        return Err(construction!(
            "roots of g and h collide at exponents {collide:?} (t0={}, t1={})",
            params.t0,
            params.t1
        ));
    }

    let h_poly = h_star.reciprocal();
    let (p_poly, rem) = Poly2::x_n_minus_1(n).divmod(&h_poly)?;
    debug_assert!(rem.is_zero());
    let (_, rem) = p_poly.divmod(&g_poly)?;
    if !rem.is_zero() {
        return Err(construction!(
            "g(x) does not divide p(x); C0 is not a subcode of C"
        ));
    }

    let g1 = BitMatrix::from_rows(
        n,
        (0..params.k)
            .map(|i| poly_row(&g_poly.shift(i), n))
            .collect(),
    );
    let g0 = BitMatrix::from_rows(
        n,
        (0..params.l)
            .map(|i| poly_row(&p_poly.shift(i), n))
            .collect(),
    );
    let h = if params.r == 0 {
        BitMatrix::zeros(0, n)
    } else {
        bch_parity_check(&field, params.d1)?
    };
    let ginv1 = message_inverse(&g1, &g0)?;
    let g0t = g0.transpose();
    let g0_cols = g0t.rows().to_vec();

    Ok(PbchCode {
        params,
        field,
        g_poly,
        p_poly,
        g1,
        g0,
        h,
        ginv1,
        g0_cols,
    })
}

/// `G̃1` with `G1·G̃1ᵀ = I_k` and `G0·G̃1ᵀ = 0`.
///
/// Picks an information set of `[G1; G0]` and inverts the square submatrix on
/// it; `G̃1` is supported on those columns only.
pub fn message_inverse(g1: &BitMatrix, g0: &BitMatrix) -> Result<BitMatrix> {
    let k = g1.num_rows();
    let n = g1.num_cols();
    let g = g1.vstack(g0);
    let rref = g.rref();
    if rref.rank < g.num_rows() {
        return Err(construction!(
            "[G1; G0] has rank {} < k + l = {}",
            rref.rank,
            g.num_rows()
        ));
    }
    let square = g.select_columns(&rref.pivots);
    let inv = square
        .inverse()
        .ok_or_else(|| construction!("information-set submatrix is singular"))?;
    let mut ginv = BitMatrix::zeros(k, n);
    for (i, &col) in rref.pivots.iter().enumerate() {
        for j in inv.row(i).iter_ones().take_while(|&j| j < k) {
            ginv.set(j, col, true);
        }
    }
    Ok(ginv)
}

/// Outcome of defect masking for one (message, defect pattern) pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaskResult {
    /// Masking vector, length `l`.
    pub d: BitVector,
    /// Defects where the codeword disagrees with the stuck value.
    pub unmasked: usize,
    /// 1 when the full system was solvable, 2 for the `d0 − 1` fallback.
    pub step_used: u8,
}

impl MaskResult {
    pub fn succeeded(&self) -> bool {
        self.unmasked == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeStatus {
    Corrected,
    DetectedFailure,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub w_hat: BitVector,
    pub status: DecodeStatus,
    /// Weight of the applied error estimate.
    pub z_weight: usize,
}

/// JSON description of a constructed code.
#[derive(Clone, Debug, Serialize)]
pub struct CodeDescriptor {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub r: usize,
    pub m: u32,
    pub d0: usize,
    pub d1: usize,
    pub g_poly: String,
    pub p_poly: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrices: Option<MatrixDump>,
}

/// Row-major hex dump of the code matrices.
#[derive(Clone, Debug, Serialize)]
pub struct MatrixDump {
    pub g1: Vec<String>,
    pub g0: Vec<String>,
    pub h: Vec<String>,
    pub ginv1: Vec<String>,
}

impl PbchCode {
    pub fn params(&self) -> &PlbcParams {
        &self.params
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn k(&self) -> usize {
        self.params.k
    }

    pub fn l(&self) -> usize {
        self.params.l
    }

    pub fn g1(&self) -> &BitMatrix {
        &self.g1
    }

    pub fn g0(&self) -> &BitMatrix {
        &self.g0
    }

    pub fn h(&self) -> &BitMatrix {
        &self.h
    }

    pub fn ginv1(&self) -> &BitMatrix {
        &self.ginv1
    }

    pub fn g_poly(&self) -> &Poly2 {
        &self.g_poly
    }

    pub fn p_poly(&self) -> &Poly2 {
        &self.p_poly
    }

    pub fn descriptor(&self, with_matrices: bool) -> CodeDescriptor {
        let p = &self.params;
        CodeDescriptor {
            n: p.n,
            k: p.k,
            l: p.l,
            r: p.r,
            m: p.m,
            d0: p.d0,
            d1: p.d1,
            g_poly: self.g_poly.to_hex(),
            p_poly: self.p_poly.to_hex(),
            matrices: with_matrices.then(|| MatrixDump {
                g1: self.g1.to_hex_rows(),
                g0: self.g0.to_hex_rows(),
                h: self.h.to_hex_rows(),
                ginv1: self.ginv1.to_hex_rows(),
            }),
        }
    }

    fn check_message(&self, w: &BitVector) {
        assert_eq!(w.len(), self.params.k, "message length must equal k");
    }

    fn check_defects(&self, s: &DefectVector) {
        assert_eq!(s.len(), self.params.n, "defect vector length must equal n");
    }

    /// Two-step masking: solve for all defects, else for the first `d0 − 1`.
    pub fn mask_defects(&self, w: &BitVector, s: &DefectVector) -> MaskResult {
        self.check_message(w);
        self.check_defects(s);
        let c1 = self.g1.left_mul(w);
        self.mask_with(&c1, s, true)
    }

    /// One-step baseline: only the first `min(d0 − 1, u)` defects are targeted.
    /// Reported as `step_used = 2` since it always solves the reduced system.
    pub fn mask_defects_one_step(&self, w: &BitVector, s: &DefectVector) -> MaskResult {
        self.check_message(w);
        self.check_defects(s);
        let c1 = self.g1.left_mul(w);
        self.mask_with(&c1, s, false)
    }

    fn mask_with(&self, c1: &BitVector, s: &DefectVector, try_all: bool) -> MaskResult {
        let l = self.params.l;
        let positions = s.positions();
        let values = s.stuck_values();
        // b = w·G1 − s on the defect positions.
        let b: Vec<bool> = positions
            .iter()
            .map(|&i| c1.get(i) ^ values.get(i))
            .collect();
        let cols = |idx: &[usize]| idx.iter().map(|&i| &self.g0_cols[i]).collect::<Vec<_>>();

        if try_all {
            if let Some(d) = solve_by_columns(l, cols(&positions), &b) {
                return MaskResult {
                    d,
                    unmasked: 0,
                    step_used: 1,
                };
            }
        }

        let take = self.params.d0.saturating_sub(1).min(positions.len());
        let d = solve_by_columns(l, cols(&positions[..take]), &b[..take]).unwrap_or_else(|| {
            debug_assert!(false, "any d0-1 columns of G0 must be independent");
            BitVector::zeros(l)
        });
        let unmasked = positions
            .iter()
            .zip(&b)
            .filter(|&(&i, &bi)| bi ^ d.dot(&self.g0_cols[i]))
            .count();
        MaskResult {
            d,
            unmasked,
            step_used: 2,
        }
    }

    /// `c = w·G1 + d·G0` with `d` from two-step masking.
    pub fn encode(&self, w: &BitVector, s: &DefectVector) -> (BitVector, MaskResult) {
        self.check_message(w);
        self.check_defects(s);
        let mut c = self.g1.left_mul(w);
        let mask = self.mask_with(&c, s, true);
        c.xor_assign(&self.g0.left_mul(&mask.d));
        (c, mask)
    }

    /// Message part of a word: `c·G̃1ᵀ`.
    pub fn extract_message(&self, c: &BitVector) -> BitVector {
        self.ginv1.mul_transpose(c)
    }

    /// Syndromes `S_j = y(α^j)` for `j = 1..=2·t1`.
    pub fn syndromes(&self, y: &BitVector) -> Vec<u16> {
        syndromes_of(&self.field, y.iter_ones(), 2 * self.params.t1)
    }

    /// Bounded-distance decoding by Berlekamp–Massey and Chien search.
    pub fn decode(&self, y: &BitVector) -> DecodeOutcome {
        assert_eq!(y.len(), self.params.n, "received word length must equal n");
        let t1 = self.params.t1;
        let failure = || DecodeOutcome {
            w_hat: self.extract_message(y),
            status: DecodeStatus::DetectedFailure,
            z_weight: 0,
        };
        if t1 == 0 {
            return DecodeOutcome {
                w_hat: self.extract_message(y),
                status: DecodeStatus::Corrected,
                z_weight: 0,
            };
        }
        let synd = self.syndromes(y);
        if synd.iter().all(|&s| s == 0) {
            return DecodeOutcome {
                w_hat: self.extract_message(y),
                status: DecodeStatus::Corrected,
                z_weight: 0,
            };
        }
        let locator = berlekamp_massey(&self.field, &synd);
        let degree = locator.len() - 1;
        if degree > t1 {
            return failure();
        }
        let Some(errors) = chien_search(&self.field, &locator, self.params.n) else {
            return failure();
        };
        // The estimate must reproduce the observed syndromes exactly.
        if syndromes_of(&self.field, errors.iter().copied(), 2 * t1) != synd {
            return failure();
        }
        let mut c_hat = y.clone();
        for &i in &errors {
            c_hat.flip(i);
        }
        DecodeOutcome {
            w_hat: self.extract_message(&c_hat),
            status: DecodeStatus::Corrected,
            z_weight: errors.len(),
        }
    }

    /// True distances `(d0, d1)` by exhaustive enumeration.
    ///
    /// `d0` enumerates `{c : c·G0ᵀ = 0}` (dimension `n − l`), `d1` enumerates
    /// `{c : c·Hᵀ = 0}` (dimension `k + l`); each is capped at 2²⁴ words.
    /// Zero is reported for `l = 0` or `r = 0`.
    pub fn verify_distances(&self) -> Result<(usize, usize)> {
        const BUDGET: usize = 24;
        let p = &self.params;
        if p.l > 0 && p.n - p.l > BUDGET {
            return Err(usage!(
                "d0 enumeration needs 2^{} words (limit 2^{BUDGET}); use the designed distance d0={}",
                p.n - p.l,
                p.d0
            ));
        }
        if p.r > 0 && p.k + p.l > BUDGET {
            return Err(usage!(
                "d1 enumeration needs 2^{} words (limit 2^{BUDGET}); use the designed distance d1={}",
                p.k + p.l,
                p.d1
            ));
        }
        let d0 = if p.l == 0 {
            0
        } else {
            let basis = self.g0.null_space();
            gray_min_weight(&basis, |_| true)
        };
        let d1 = if p.r == 0 {
            0
        } else {
            let basis = self.h.null_space();
            gray_min_weight(&basis, |c| !self.ginv1.mul_transpose(c).is_zero())
        };
        Ok((d0, d1))
    }
}

/// Minimum weight over nonzero span members accepted by `keep`.
fn gray_min_weight<F: Fn(&BitVector) -> bool>(basis: &BitMatrix, keep: F) -> usize {
    let dim = basis.num_rows();
    let mut c = BitVector::zeros(basis.num_cols());
    let mut best = usize::MAX;
    for step in 1u64..1 << dim {
        c.xor_assign(basis.row(step.trailing_zeros() as usize));
        let w = c.weight();
        if w < best && keep(&c) {
            best = w;
        }
    }
    best
}

fn syndromes_of<I: Iterator<Item = usize>>(field: &GaloisField, ones: I, count: usize) -> Vec<u16> {
    let mut synd = vec![0u16; count];
    if count == 0 {
        return synd;
    }
    let n = field.order();
    let ones: Vec<usize> = ones.collect();
    // Odd-index syndromes directly; S_{2j} = S_j².
    for j in (1..=count).step_by(2) {
        let mut acc = 0u16;
        for &i in &ones {
            acc ^= field.exp_raw((i * j) % n);
        }
        synd[j - 1] = acc;
    }
    for j in (2..=count).step_by(2) {
        let s = synd[j / 2 - 1];
        synd[j - 1] = field.mul_raw(s, s);
    }
    synd
}

/// Error-locator polynomial (coefficients low to high, `Λ_0 = 1`).
fn berlekamp_massey(field: &GaloisField, synd: &[u16]) -> Vec<u16> {
    let mut c = vec![1u16];
    let mut b = vec![1u16];
    let mut len = 0usize;
    let mut shift = 1usize;
    let mut last = 1u16;
    for step in 0..synd.len() {
        let mut disc = synd[step];
        for i in 1..=len.min(c.len() - 1) {
            disc ^= field.mul_raw(c[i], synd[step - i]);
        }
        if disc == 0 {
            shift += 1;
            continue;
        }
        let coef = field.mul_raw(disc, field.inv_raw(last));
        let prev = c.clone();
        if c.len() < b.len() + shift {
            c.resize(b.len() + shift, 0);
        }
        for (i, &bi) in b.iter().enumerate() {
            c[i + shift] ^= field.mul_raw(coef, bi);
        }
        if 2 * len <= step {
            len = step + 1 - len;
            b = prev;
            last = disc;
            shift = 1;
        } else {
            shift += 1;
        }
    }
    c.truncate(len + 1);
    while c.len() > 1 && *c.last().unwrap() == 0 {
        c.pop();
    }
    c
}

/// Error positions `i` with `Λ(α^{-i}) = 0`, or `None` when the root count
/// does not match the locator degree.
fn chien_search(field: &GaloisField, locator: &[u16], n: usize) -> Option<Vec<usize>> {
    let degree = locator.len() - 1;
    let terms: Vec<(usize, usize)> = locator
        .iter()
        .enumerate()
        .skip(1)
        .filter(|&(_, &c)| c != 0)
        .map(|(j, &c)| (j, field.log_raw(c)))
        .collect();
    let mut roots = Vec::with_capacity(degree);
    for i in 0..n {
        let mut acc = locator[0];
        for &(j, lg) in &terms {
            // Λ_j · α^{-ij}
            let e = (lg + n - (i * j) % n) % n;
            acc ^= field.exp_raw(e);
        }
        if acc == 0 {
            roots.push(i);
            if roots.len() > degree {
                return None;
            }
        }
    }
    (roots.len() == degree).then_some(roots)
}
