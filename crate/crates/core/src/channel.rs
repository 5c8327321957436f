//! The binary stuck-at defect channel with additive random errors.
//!
//! Each cell is independently defective with probability ε (stuck at 0 or 1
//! with equal probability) and, when not defective, flipped with probability
//! p. The stored word is read back as `y = (x ∘ s) + z`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::gf2::BitVector;

/// State of one memory cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cell {
    /// A normal cell (λ).
    Normal,
    /// Stuck at the given bit.
    Stuck(bool),
}

/// Per-cell defect pattern `s`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DefectVector {
    stuck: BitVector,
    // Subset of `stuck`.
    values: BitVector,
}

impl DefectVector {
    /// All cells normal.
    pub fn clean(n: usize) -> Self {
        Self {
            stuck: BitVector::zeros(n),
            values: BitVector::zeros(n),
        }
    }

    pub fn from_cells<I: IntoIterator<Item = Cell>>(cells: I) -> Self {
        let cells: Vec<Cell> = cells.into_iter().collect();
        let mut s = Self::clean(cells.len());
        for (i, c) in cells.into_iter().enumerate() {
            s.set(i, c);
        }
        s
    }

    /// Defects at `positions` with the matching stuck `values`.
    pub fn with_defects(n: usize, positions: &[usize], values: &[bool]) -> Self {
        assert_eq!(positions.len(), values.len());
        let mut s = Self::clean(n);
        for (&i, &v) in positions.iter().zip(values) {
            s.set(i, Cell::Stuck(v));
        }
        s
    }

    pub fn len(&self) -> usize {
        self.stuck.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stuck.is_empty()
    }

    /// Number of defects `u`.
    pub fn defect_count(&self) -> usize {
        self.stuck.weight()
    }

    pub fn cell(&self, i: usize) -> Cell {
        if self.stuck.get(i) {
            Cell::Stuck(self.values.get(i))
        } else {
            Cell::Normal
        }
    }

    pub fn set(&mut self, i: usize, cell: Cell) {
        match cell {
            Cell::Normal => {
                self.stuck.set(i, false);
                self.values.set(i, false);
            }
            Cell::Stuck(v) => {
                self.stuck.set(i, true);
                self.values.set(i, v);
            }
        }
    }

    /// Defect locations in ascending order.
    pub fn positions(&self) -> Vec<usize> {
        self.stuck.iter_ones().collect()
    }

    /// Indicator of defective cells.
    pub fn stuck_mask(&self) -> &BitVector {
        &self.stuck
    }

    /// Stuck values (zero on normal cells).
    pub fn stuck_values(&self) -> &BitVector {
        &self.values
    }

    /// `x ∘ s`: stuck cells override the written value.
    pub fn apply(&self, x: &BitVector) -> BitVector {
        assert_eq!(x.len(), self.len(), "word and defect vector lengths differ");
        let words = x
            .words()
            .iter()
            .zip(self.stuck.words())
            .zip(self.values.words())
            .map(|((&x, &s), &v)| (x & !s) | v)
            .collect();
        BitVector::from_words(x.len(), words)
    }
}

impl fmt::Display for DefectVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(match self.cell(i) {
                Cell::Normal => ".",
                Cell::Stuck(false) => "0",
                Cell::Stuck(true) => "1",
            })?;
        }
        Ok(())
    }
}

impl fmt::Debug for DefectVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DefectVector({self})")
    }
}

impl FromStr for DefectVector {
    type Err = Error;

    /// Parses the fixture form over `{., 0, 1}` with `.` for a normal cell.
    fn from_str(s: &str) -> Result<Self> {
        let cells = s
            .chars()
            .map(|c| match c {
                '.' => Ok(Cell::Normal),
                '0' => Ok(Cell::Stuck(false)),
                '1' => Ok(Cell::Stuck(true)),
                other => Err(usage!(
                    "invalid defect cell {other:?}; expected '.', '0' or '1'"
                )),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_cells(cells))
    }
}

/// Parameters (ε, p) of the binary symmetric defect-and-error memory cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub epsilon: f64,
    pub p: f64,
    pub q: u32,
}

impl ChannelParams {
    pub fn new(epsilon: f64, p: f64) -> Result<Self> {
        for (name, v) in [("epsilon", epsilon), ("p", p)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(usage!("{name}={v} is not a probability"));
            }
        }
        Ok(Self { epsilon, p, q: 2 })
    }

    /// Crossover of the equivalent BSC when defects are ignored: `(1−ε)p + ε/2`.
    pub fn p_tilde(&self) -> f64 {
        (1.0 - self.epsilon) * self.p + self.epsilon / 2.0
    }
}

/// The seven equal-`C_min` channels used for the allocation study, as `(p, ε)`.
pub const TABLE2_CHANNELS: [(f64, f64); 7] = [
    (4.0e-3, 0.0),
    (3.0e-3, 2.0e-3),
    (2.5e-3, 3.0e-3),
    (2.0e-3, 4.0e-3),
    (1.0e-3, 6.0e-3),
    (5.0e-4, 7.0e-3),
    (0.0, 8.0e-3),
];

/// The preset channels with 1-based ids.
pub fn table2() -> Vec<(usize, ChannelParams)> {
    TABLE2_CHANNELS
        .iter()
        .enumerate()
        .map(|(i, &(p, eps))| (i + 1, ChannelParams::new(eps, p).expect("preset is valid")))
        .collect()
}

/// Random stream for one trial.
///
/// ChaCha8 keyed by `(master, lane)` with the trial index as the stream id,
/// so every trial draws from its own reproducible sequence no matter which
/// worker runs it.
pub fn trial_rng(master: u64, lane: u64, trial: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master.to_le_bytes());
    key[8..16].copy_from_slice(&lane.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(trial);
    rng
}

/// Draws `s`: each cell stuck at 0 w.p. ε/2, stuck at 1 w.p. ε/2, else normal.
pub fn sample_defects<R: Rng + ?Sized>(n: usize, ch: &ChannelParams, rng: &mut R) -> DefectVector {
    let mut s = DefectVector::clean(n);
    if ch.epsilon == 0.0 {
        return s;
    }
    let half = ch.epsilon / 2.0;
    for i in 0..n {
        let r: f64 = rng.random();
        if r < ch.epsilon {
            s.set(i, Cell::Stuck(r >= half));
        }
    }
    s
}

/// Draws `z`: each normal cell flips w.p. p; stuck cells never carry errors.
pub fn sample_errors<R: Rng + ?Sized>(
    s: &DefectVector,
    ch: &ChannelParams,
    rng: &mut R,
) -> BitVector {
    let n = s.len();
    let mut z = BitVector::zeros(n);
    if ch.p == 0.0 {
        return z;
    }
    for i in 0..n {
        if s.stuck.get(i) {
            continue;
        }
        let r: f64 = rng.random();
        if r < ch.p {
            z.set(i, true);
        }
    }
    z
}

/// `y = (x ∘ s) + z`.
pub fn transmit(x: &BitVector, s: &DefectVector, z: &BitVector) -> Result<BitVector> {
    if x.len() != s.len() || z.len() != s.len() {
        return Err(usage!(
            "length mismatch: x={}, s={}, z={}",
            x.len(),
            s.len(),
            z.len()
        ));
    }
    if !z.and(&s.stuck).is_zero() {
        return Err(usage!("error vector is nonzero on a stuck cell"));
    }
    let mut y = s.apply(x);
    y.xor_assign(z);
    Ok(y)
}
