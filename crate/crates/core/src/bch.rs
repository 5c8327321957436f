//! Narrow-sense primitive BCH machinery: cyclotomic cosets, minimal
//! polynomials, generator polynomials and binary parity-check matrices.

use std::collections::BTreeSet;

use crate::error::{construction, usage, Result};
use crate::field::GaloisField;
use crate::gf2::{BitMatrix, BitVector};
use crate::poly::Poly2;

/// The 2-cyclotomic coset of an exponent modulo `n = 2^m − 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclotomicCoset {
    pub leader: usize,
    /// Sorted ascending.
    pub members: Vec<usize>,
}

impl CyclotomicCoset {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, e: usize) -> bool {
        self.members.binary_search(&e).is_ok()
    }
}

pub fn cyclotomic_coset(j: usize, n: usize) -> CyclotomicCoset {
    assert!(j < n, "exponent {j} out of range for n={n}");
    let mut members = vec![j];
    let mut e = (2 * j) % n;
    while e != j {
        members.push(e);
        e = (2 * e) % n;
    }
    members.sort_unstable();
    CyclotomicCoset {
        leader: members[0],
        members,
    }
}

/// All cosets modulo `n`, ordered by leader.
pub fn all_cosets(n: usize) -> Vec<CyclotomicCoset> {
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for j in 0..n {
        if !seen[j] {
            let c = cyclotomic_coset(j, n);
            for &e in &c.members {
                seen[e] = true;
            }
            out.push(c);
        }
    }
    out
}

/// Distinct cosets containing the exponents `1..=2t`, by ascending leader.
pub fn consecutive_root_cosets(n: usize, two_t: usize) -> Vec<CyclotomicCoset> {
    let leaders: BTreeSet<usize> = (1..=two_t)
        .map(|j| cyclotomic_coset(j % n, n).leader)
        .collect();
    leaders
        .into_iter()
        .map(|l| cyclotomic_coset(l, n))
        .collect()
}

/// Minimal polynomial of `α^j`: `∏ (x − α^i)` over the coset of `j`.
pub fn minimal_polynomial(field: &GaloisField, j: usize) -> Poly2 {
    let n = field.order();
    let coset = cyclotomic_coset(j % n, n);
    // Coefficients in GF(2^m), lowest degree first.
    let mut coeffs: Vec<u16> = vec![1];
    for &i in &coset.members {
        let root = field.exp_raw(i);
        let mut next = vec![0u16; coeffs.len() + 1];
        for (d, &c) in coeffs.iter().enumerate() {
            next[d + 1] ^= c;
            next[d] ^= field.mul_raw(c, root);
        }
        coeffs = next;
    }
    assert!(
        coeffs.iter().all(|&c| c <= 1),
        "minimal polynomial of α^{j} has non-binary coefficients"
    );
    Poly2::from_coefficients(coeffs.iter().map(|&c| c == 1))
}

/// Parameters of a narrow-sense primitive BCH code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BchSpec {
    pub n: usize,
    pub designed_distance: usize,
    pub generator: Poly2,
    pub parity_rows: usize,
}

impl BchSpec {
    pub fn new(field: &GaloisField, designed_distance: usize) -> Result<Self> {
        let generator = bch_generator(field, designed_distance)?;
        Ok(Self {
            n: field.order(),
            designed_distance,
            parity_rows: generator.degree().unwrap_or(0),
            generator,
        })
    }
}

fn check_designed_distance(n: usize, delta: usize) -> Result<()> {
    if delta == 0 || delta.is_multiple_of(2) {
        return Err(usage!(
            "designed distance must be odd and positive, got {delta}"
        ));
    }
    if delta > n {
        return Err(usage!("designed distance {delta} exceeds length {n}"));
    }
    Ok(())
}

/// Generator with roots `α^1, …, α^{δ−1}`; `δ = 1` gives the constant 1.
pub fn bch_generator(field: &GaloisField, delta: usize) -> Result<Poly2> {
    let n = field.order();
    check_designed_distance(n, delta)?;
    Ok(consecutive_root_cosets(n, delta - 1)
        .iter()
        .fold(Poly2::one(), |g, c| {
            g.mul(&minimal_polynomial(field, c.leader))
        }))
}

/// Binary parity-check matrix: `m` rows per distinct coset, each block the
/// bit planes of `[1, α^j, α^{2j}, …, α^{(n−1)j}]`.
pub fn bch_parity_check(field: &GaloisField, delta: usize) -> Result<BitMatrix> {
    let n = field.order();
    check_designed_distance(n, delta)?;
    let m = field.m() as usize;
    let cosets = consecutive_root_cosets(n, delta - 1);
    let degree: usize = cosets.iter().map(CyclotomicCoset::len).sum();
    if degree != m * cosets.len() {
        let short: Vec<String> = cosets
            .iter()
            .filter(|c| c.len() != m)
            .map(|c| format!("{:?}", c.members))
            .collect();
        return Err(construction!(
            "designed distance {delta} at n={n}: {} parity rows from {} cosets but generator degree {degree}; short cosets {}",
            m * cosets.len(),
            cosets.len(),
            short.join(", ")
        ));
    }
    let mut rows = Vec::with_capacity(degree);
    for c in &cosets {
        let mut planes = vec![BitVector::zeros(n); m];
        for i in 0..n {
            let v = field.exp_raw(i * c.leader);
            for (b, plane) in planes.iter_mut().enumerate() {
                if v >> b & 1 == 1 {
                    plane.set(i, true);
                }
            }
        }
        rows.extend(planes);
    }
    Ok(BitMatrix::from_rows(n, rows))
}

/// Coefficient vector of `p` as a length-`n` row.
pub(crate) fn poly_row(p: &Poly2, n: usize) -> BitVector {
    let mut v = BitVector::zeros(n);
    for e in p.exponents() {
        v.set(e, true);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(exps: &[usize]) -> Poly2 {
        Poly2::from_exponents(exps)
    }

    #[test]
    fn coset_examples() {
        assert_eq!(cyclotomic_coset(0, 15).members, vec![0]);
        assert_eq!(cyclotomic_coset(1, 15).members, vec![1, 2, 4, 8]);
        assert_eq!(cyclotomic_coset(5, 15).members, vec![5, 10]);
        assert_eq!(cyclotomic_coset(10, 15).leader, 5);
    }

    #[test]
    fn cosets_partition() {
        for m in [4u32, 6, 10] {
            let n = (1usize << m) - 1;
            let mut seen = vec![0u8; n];
            for c in all_cosets(n) {
                assert_eq!(m as usize % c.len(), 0);
                for &e in &c.members {
                    seen[e] += 1;
                    assert!(c.contains(2 * e % n));
                }
            }
            assert!(seen.iter().all(|&s| s == 1));
        }
    }

    /// Expands the product of (x − α^i) with explicit field-element
    /// arithmetic through the public API.
    fn expand_oracle(field: &GaloisField, roots: &[usize]) -> Vec<u16> {
        let mut coeffs = vec![field.one()];
        for &i in roots {
            let r = field.alpha_pow(i as i64);
            let mut next = vec![field.zero(); coeffs.len() + 1];
            for (d, &c) in coeffs.iter().enumerate() {
                next[d + 1] = field.add(next[d + 1], c).unwrap();
                next[d] = field.add(next[d], field.mul(c, r).unwrap()).unwrap();
            }
            coeffs = next;
        }
        coeffs.iter().map(|c| c.value()).collect()
    }

    #[test]
    fn minimal_polynomials_gf16() {
        let f = GaloisField::new(4).unwrap();
        assert_eq!(minimal_polynomial(&f, 0), p(&[1, 0]));
        assert_eq!(expand_oracle(&f, &[1, 2, 4, 8]), vec![1, 1, 0, 0, 1]);
        assert_eq!(minimal_polynomial(&f, 1), p(&[4, 1, 0]));
        assert_eq!(expand_oracle(&f, &[3, 6, 12, 9]), vec![1, 1, 1, 1, 1]);
        assert_eq!(minimal_polynomial(&f, 3), p(&[4, 3, 2, 1, 0]));
    }

    #[test]
    fn generators_gf16() {
        let f = GaloisField::new(4).unwrap();
        assert_eq!(bch_generator(&f, 1).unwrap(), Poly2::one());
        assert_eq!(bch_generator(&f, 3).unwrap(), p(&[4, 1, 0]));
        let g5 = bch_generator(&f, 5).unwrap();
        assert_eq!(g5, p(&[4, 1, 0]).mul(&p(&[4, 3, 2, 1, 0])));
        assert_eq!(g5, p(&[8, 7, 6, 4, 0]));
        assert!(bch_generator(&f, 4).is_err());
    }

    #[test]
    fn generator_divides_x_n_minus_1() {
        for (m, max_t) in [(4u32, 3usize), (6, 10), (10, 10)] {
            let f = GaloisField::new(m).unwrap();
            let n = f.order();
            for t in 0..=max_t {
                let g = bch_generator(&f, 2 * t + 1).unwrap();
                let (_, r) = Poly2::x_n_minus_1(n).divmod(&g).unwrap();
                assert!(r.is_zero(), "m={m} t={t}");
            }
        }
    }

    #[test]
    fn m10_generators_have_ten_rows_per_error() {
        let f = GaloisField::new(10).unwrap();
        for t in 0..=10 {
            let spec = BchSpec::new(&f, 2 * t + 1).unwrap();
            assert_eq!(spec.parity_rows, 10 * t);
        }
    }

    #[test]
    fn parity_check_gf16() {
        let f = GaloisField::new(4).unwrap();
        let h3 = bch_parity_check(&f, 3).unwrap();
        assert_eq!((h3.num_rows(), h3.num_cols()), (4, 15));
        assert_eq!(h3.null_space().num_rows(), 11);
        let g = poly_row(&p(&[4, 1, 0]), 15);
        assert!(h3.mul_transpose(&g).is_zero());

        let h5 = bch_parity_check(&f, 5).unwrap();
        assert_eq!((h5.num_rows(), h5.num_cols()), (8, 15));
        assert_eq!(h5.rank(), 8);
    }

    #[test]
    fn parity_check_reports_short_coset() {
        // δ = 7 at n = 15 pulls in the size-2 coset {5, 10}.
        let f = GaloisField::new(4).unwrap();
        let err = bch_parity_check(&f, 7).unwrap_err();
        assert!(err.to_string().contains("[5, 10]"), "{err}");
    }

    #[test]
    fn null_space_equals_cyclic_span() {
        for (m, t) in [(4u32, 1usize), (4, 2), (6, 1), (6, 2), (6, 3)] {
            let f = GaloisField::new(m).unwrap();
            let n = f.order();
            let g = bch_generator(&f, 2 * t + 1).unwrap();
            let h = bch_parity_check(&f, 2 * t + 1).unwrap();
            let deg = g.degree().unwrap();
            let shifts: Vec<BitVector> = (0..n - deg).map(|i| poly_row(&g.shift(i), n)).collect();
            let span = BitMatrix::from_rows(n, shifts);
            for row in span.rows() {
                assert!(h.mul_transpose(row).is_zero());
            }
            assert_eq!(span.rank(), n - deg);
            assert_eq!(h.null_space().num_rows(), n - deg);
        }
    }

    /// Exhaustive minimum distance of ⟨g⟩ via Gray-code walk.
    fn min_distance(g: &Poly2, n: usize) -> usize {
        let deg = g.degree().unwrap();
        let k = n - deg;
        let rows: Vec<BitVector> = (0..k).map(|i| poly_row(&g.shift(i), n)).collect();
        let mut c = BitVector::zeros(n);
        let mut best = n;
        for step in 1u64..1 << k {
            c.xor_assign(&rows[step.trailing_zeros() as usize]);
            best = best.min(c.weight());
        }
        best
    }

    #[test]
    fn exhaustive_minimum_distance_gf16() {
        let f = GaloisField::new(4).unwrap();
        assert_eq!(min_distance(&bch_generator(&f, 3).unwrap(), 15), 3);
        assert_eq!(min_distance(&bch_generator(&f, 5).unwrap(), 15), 5);
    }
}
