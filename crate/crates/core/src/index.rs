//! Dichotomous outcome indices and the 2×2 grids they address.

use std::fmt;

use crate::error::{domain, Result};

/// Real-valued 2×2 grid addressed by zero-based slots.
pub type Grid = [[f64; 2]; 2];

/// One of the two outcomes of a dichotomous observable.
///
/// Index 1 is the physical value +1, index 2 is −1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    One,
    Two,
}

impl Outcome {
    pub const ALL: [Outcome; 2] = [Outcome::One, Outcome::Two];

    pub fn from_index(index: u8) -> Result<Self> {
        match index {
            1 => Ok(Outcome::One),
            2 => Ok(Outcome::Two),
            other => Err(domain(format!("outcome index {other} not in {{1,2}}"))),
        }
    }

    /// 1 or 2.
    pub fn index(self) -> u8 {
        match self {
            Outcome::One => 1,
            Outcome::Two => 2,
        }
    }

    /// 0 or 1, for addressing a [`Grid`].
    pub fn slot(self) -> usize {
        self.index() as usize - 1
    }

    /// Physical value: +1 or −1.
    pub fn value(self) -> i8 {
        match self {
            Outcome::One => 1,
            Outcome::Two => -1,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Outcome::One => Outcome::Two,
            Outcome::Two => Outcome::One,
        }
    }
}

/// Outcome pair (b_i, b′_j) of the two subsystems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OutcomePair {
    pub i: Outcome,
    pub j: Outcome,
}

/// Setting pair (a_k, a′_l); identifies a selection context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SettingPair {
    pub k: Outcome,
    pub l: Outcome,
}

const PAIRS: [(Outcome, Outcome); 4] = [
    (Outcome::One, Outcome::One),
    (Outcome::One, Outcome::Two),
    (Outcome::Two, Outcome::One),
    (Outcome::Two, Outcome::Two),
];

impl OutcomePair {
    /// Pairs in the order 11, 12, 21, 22.
    pub const ALL: [OutcomePair; 4] = [
        OutcomePair { i: PAIRS[0].0, j: PAIRS[0].1 },
        OutcomePair { i: PAIRS[1].0, j: PAIRS[1].1 },
        OutcomePair { i: PAIRS[2].0, j: PAIRS[2].1 },
        OutcomePair { i: PAIRS[3].0, j: PAIRS[3].1 },
    ];

    pub fn new(i: u8, j: u8) -> Result<Self> {
        Ok(OutcomePair {
            i: Outcome::from_index(i)?,
            j: Outcome::from_index(j)?,
        })
    }

    /// Position in [`OutcomePair::ALL`].
    pub fn ordinal(self) -> usize {
        2 * self.i.slot() + self.j.slot()
    }

    pub(crate) fn from_ordinal(n: usize) -> Self {
        Self::ALL[n]
    }

    /// Product of the physical values, b·b′.
    pub fn value_product(self) -> i8 {
        self.i.value() * self.j.value()
    }

    pub fn at(self, grid: &Grid) -> f64 {
        grid[self.i.slot()][self.j.slot()]
    }
}

impl SettingPair {
    /// Pairs in the order 11, 12, 21, 22.
    pub const ALL: [SettingPair; 4] = [
        SettingPair { k: PAIRS[0].0, l: PAIRS[0].1 },
        SettingPair { k: PAIRS[1].0, l: PAIRS[1].1 },
        SettingPair { k: PAIRS[2].0, l: PAIRS[2].1 },
        SettingPair { k: PAIRS[3].0, l: PAIRS[3].1 },
    ];

    pub const ONE_TWO: SettingPair = SettingPair { k: Outcome::One, l: Outcome::Two };
    pub const TWO_ONE: SettingPair = SettingPair { k: Outcome::Two, l: Outcome::One };

    pub fn new(k: u8, l: u8) -> Result<Self> {
        Ok(SettingPair {
            k: Outcome::from_index(k)?,
            l: Outcome::from_index(l)?,
        })
    }

    /// Context index 2(k−1) + (l−1), used by the RNG stream-splitting rule.
    pub fn ordinal(self) -> usize {
        2 * self.k.slot() + self.l.slot()
    }

    pub(crate) fn from_ordinal(n: usize) -> Self {
        Self::ALL[n]
    }

    pub fn is_diagonal(self) -> bool {
        self.k == self.l
    }

    pub fn at(self, grid: &Grid) -> f64 {
        grid[self.k.slot()][self.l.slot()]
    }
}

impl fmt::Display for OutcomePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.i.index(), self.j.index())
    }
}

impl fmt::Display for SettingPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.k.index(), self.l.index())
    }
}
