//! Polynomials over GF(2), bit `i` holding the coefficient of `x^i`.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldElement, GaloisField};

/// A binary polynomial. The zero polynomial has no degree.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly2 {
    // Little-endian words with no trailing zero word.
    words: Vec<u64>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Self { words: Vec::new() }
    }

    pub fn one() -> Self {
        Self { words: vec![1] }
    }

    /// `x^n + 1` (equal to `x^n - 1` over GF(2)).
    pub fn x_n_minus_1(n: usize) -> Self {
        Self::from_exponents(&[n, 0])
    }

    /// Sum of `x^e` over the given exponents (repeats cancel).
    pub fn from_exponents(exps: &[usize]) -> Self {
        let mut p = Self::zero();
        for &e in exps {
            p.flip(e);
        }
        p
    }

    /// Polynomial whose coefficient bits are those of `bits`.
    pub fn from_u64(bits: u64) -> Self {
        let mut p = Self { words: vec![bits] };
        p.normalize();
        p
    }

    pub fn from_coefficients<I: IntoIterator<Item = bool>>(coeffs: I) -> Self {
        let mut p = Self::zero();
        for (i, c) in coeffs.into_iter().enumerate() {
            if c {
                p.flip(i);
            }
        }
        p
    }

    fn normalize(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    fn flip(&mut self, i: usize) {
        let w = i / 64;
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        self.words[w] ^= 1 << (i % 64);
        self.normalize();
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let last = *self.words.last()?;
        Some((self.words.len() - 1) * 64 + 63 - last.leading_zeros() as usize)
    }

    pub fn coeff(&self, i: usize) -> bool {
        self.words
            .get(i / 64)
            .is_some_and(|w| (w >> (i % 64)) & 1 == 1)
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Exponents with nonzero coefficient, ascending.
    pub fn exponents(&self) -> impl Iterator<Item = usize> + '_ {
        let deg = self.degree().map_or(0, |d| d + 1);
        (0..deg).filter(|&i| self.coeff(i))
    }

    fn xor_shifted(&mut self, other: &Poly2, shift: usize) {
        if other.is_zero() {
            return;
        }
        let ws = shift / 64;
        let bs = shift % 64;
        let need = ws + other.words.len() + 1;
        if self.words.len() < need {
            self.words.resize(need, 0);
        }
        for (i, &w) in other.words.iter().enumerate() {
            self.words[ws + i] ^= w << bs;
            if bs != 0 {
                self.words[ws + i + 1] ^= w >> (64 - bs);
            }
        }
        self.normalize();
    }

    pub fn add(&self, other: &Poly2) -> Poly2 {
        let mut out = self.clone();
        out.xor_shifted(other, 0);
        out
    }

    pub fn mul(&self, other: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        for e in self.exponents() {
            out.xor_shifted(other, e);
        }
        out
    }

    /// Multiplication by `x^k`.
    pub fn shift(&self, k: usize) -> Poly2 {
        let mut out = Poly2::zero();
        out.xor_shifted(self, k);
        out
    }

    /// Quotient and remainder with `deg(remainder) < deg(den)`.
    pub fn divmod(&self, den: &Poly2) -> Result<(Poly2, Poly2)> {
        let dd = den
            .degree()
            .ok_or_else(|| Error::Domain("polynomial division by zero".into()))?;
        let mut rem = self.clone();
        let mut quot = Poly2::zero();
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let s = rd - dd;
            rem.xor_shifted(den, s);
            quot.flip(s);
        }
        Ok((quot, rem))
    }

    /// `x^deg · p(1/x)`; the zero polynomial maps to itself.
    pub fn reciprocal(&self) -> Poly2 {
        match self.degree() {
            None => Poly2::zero(),
            Some(d) => Poly2::from_exponents(&self.exponents().map(|e| d - e).collect::<Vec<_>>()),
        }
    }

    /// Evaluates at a field element by Horner's rule.
    pub fn eval(&self, field: &GaloisField, x: FieldElement) -> FieldElement {
        let mut acc = 0u16;
        if let Some(d) = self.degree() {
            for i in (0..=d).rev() {
                acc = field.mul_raw(acc, x.value());
                if self.coeff(i) {
                    acc ^= 1;
                }
            }
        }
        field
            .element(acc as u32)
            .expect("value reduced by field arithmetic")
    }

    /// Big-endian hex of the coefficient integer; `"0"` for zero.
    pub fn to_hex(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = format!("{:x}", self.words.last().unwrap());
        for w in self.words.iter().rev().skip(1) {
            s.push_str(&format!("{w:016x}"));
        }
        s
    }

    pub fn from_hex(hex: &str) -> Option<Poly2> {
        let mut p = Poly2::zero();
        for (d, ch) in hex.chars().rev().enumerate() {
            let nib = ch.to_digit(16)?;
            for b in 0..4 {
                if nib >> b & 1 == 1 {
                    p.flip(d * 4 + b);
                }
            }
        }
        Some(p)
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .exponents()
            .collect::<Vec<_>>()
            .into_iter()
            .rev()
            .map(|e| match e {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x^{e}"),
            })
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

impl fmt::Debug for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly2({self})")
    }
}
