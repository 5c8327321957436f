//! Arithmetic in GF(2^m), 2 ≤ m ≤ 16, over a fixed primitive polynomial.

use crate::error::{usage, Error, Result};

/// Primitive polynomials indexed by `m`, bit `i` = coefficient of `x^i`.
const PRIMITIVE: [u32; 17] = [
    0, 0, 0x7, 0xB, 0x13, 0x25, 0x43, 0x89, 0x11D, 0x211, 0x409, 0x805, 0x1053, 0x201B, 0x4443,
    0x8003, 0x1100B,
];

/// Default primitive polynomial for GF(2^m).
pub fn primitive_polynomial(m: u32) -> Option<u32> {
    PRIMITIVE.get(m as usize).copied().filter(|&p| p != 0)
}

/// An element of GF(2^m) in polynomial basis, tagged with its extension degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u16,
    m: u8,
}

impl FieldElement {
    #[inline]
    pub fn value(self) -> u16 {
        self.value
    }

    #[inline]
    pub fn degree(self) -> u32 {
        self.m as u32
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }
}

/// Log/antilog tables for GF(2^m).
#[derive(Clone, Debug)]
pub struct GaloisField {
    m: u32,
    modulus: u32,
    order: usize,
    // exp has 2·order entries so products of logs need no reduction.
    exp: Vec<u16>,
    log: Vec<u16>,
}

impl GaloisField {
    pub fn new(m: u32) -> Result<Self> {
        let modulus = primitive_polynomial(m)
            .ok_or_else(|| usage!("extension degree m={m} outside supported range 2..=16"))?;
        Self::with_modulus(m, modulus)
    }

    /// Builds the field from a caller-supplied polynomial, rejecting non-primitive ones.
    pub fn with_modulus(m: u32, modulus: u32) -> Result<Self> {
        if !(2..=16).contains(&m) {
            return Err(usage!(
                "extension degree m={m} outside supported range 2..=16"
            ));
        }
        if modulus >> m != 1 {
            return Err(usage!("modulus {modulus:#x} does not have degree {m}"));
        }
        let order = (1usize << m) - 1;
        let mut exp = vec![0u16; 2 * order];
        let mut log = vec![0u16; order + 1];
        let mut seen = vec![false; order + 1];
        let mut x: u32 = 1;
        for (i, slot) in exp.iter_mut().take(order).enumerate() {
            if seen[x as usize] {
                return Err(usage!("modulus {modulus:#x} is not primitive for m={m}"));
            }
            seen[x as usize] = true;
            *slot = x as u16;
            log[x as usize] = i as u16;
            x <<= 1;
            if x >> m & 1 == 1 {
                x ^= modulus;
            }
        }
        if x != 1 {
            return Err(usage!("modulus {modulus:#x} is not primitive for m={m}"));
        }
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }
        Ok(Self {
            m,
            modulus,
            order,
            exp,
            log,
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Multiplicative group order `2^m − 1`.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn element(&self, value: u32) -> Result<FieldElement> {
        if value > self.order as u32 {
            return Err(usage!("value {value:#x} does not fit GF(2^{})", self.m));
        }
        Ok(FieldElement {
            value: value as u16,
            m: self.m as u8,
        })
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            value: 0,
            m: self.m as u8,
        }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement {
            value: 1,
            m: self.m as u8,
        }
    }

    /// `α^e` for any integer exponent.
    pub fn alpha_pow(&self, e: i64) -> FieldElement {
        let idx = e.rem_euclid(self.order as i64) as usize;
        FieldElement {
            value: self.exp[idx],
            m: self.m as u8,
        }
    }

    fn check(&self, a: FieldElement) -> Result<()> {
        if a.m as u32 != self.m {
            return Err(usage!(
                "element of GF(2^{}) used with GF(2^{})",
                a.m,
                self.m
            ));
        }
        Ok(())
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(FieldElement {
            value: a.value ^ b.value,
            m: a.m,
        })
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(FieldElement {
            value: self.mul_raw(a.value, b.value),
            m: a.m,
        })
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        if a.value == 0 {
            return Err(Error::Domain("zero has no multiplicative inverse".into()));
        }
        Ok(FieldElement {
            value: self.inv_raw(a.value),
            m: a.m,
        })
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> Result<FieldElement> {
        self.check(a)?;
        if a.value == 0 {
            return Ok(if e == 0 { self.one() } else { self.zero() });
        }
        let l = self.log[a.value as usize] as u64;
        let idx = (l * (e % self.order as u64)) % self.order as u64;
        Ok(FieldElement {
            value: self.exp[idx as usize],
            m: a.m,
        })
    }

    /// Discrete log base α of a nonzero element.
    pub fn log_alpha(&self, a: FieldElement) -> Result<usize> {
        self.check(a)?;
        if a.value == 0 {
            return Err(Error::Domain("logarithm of zero".into()));
        }
        Ok(self.log[a.value as usize] as usize)
    }

    #[inline]
    pub(crate) fn mul_raw(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
        }
    }

    #[inline]
    pub(crate) fn inv_raw(&self, a: u16) -> u16 {
        debug_assert!(a != 0);
        let l = self.log[a as usize] as usize;
        self.exp[(self.order - l) % self.order]
    }

    #[inline]
    pub(crate) fn exp_raw(&self, i: usize) -> u16 {
        self.exp[i % self.order]
    }

    #[inline]
    pub(crate) fn log_raw(&self, a: u16) -> usize {
        debug_assert!(a != 0);
        self.log[a as usize] as usize
    }
}
