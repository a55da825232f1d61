//! Joint outcome distributions over a 2×2 outcome grid.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::index::{Grid, OutcomePair, SettingPair};
use crate::tol;

/// Joint distribution p(ij) over [`OutcomePair`]s.
///
/// Entries may carry rounding residue of order [`tol::ALGEBRA`] outside
/// [0, 1]; they are not clamped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProbabilityTable {
    p: Grid,
}

impl ProbabilityTable {
    pub fn new(p: Grid) -> Result<Self> {
        let table = ProbabilityTable { p };
        table.check()?;
        Ok(table)
    }

    pub fn uniform() -> Self {
        ProbabilityTable { p: [[0.25; 2]; 2] }
    }

    /// Point mass at `ij`.
    pub fn indicator(ij: OutcomePair) -> Self {
        let mut p = [[0.0; 2]; 2];
        p[ij.i.slot()][ij.j.slot()] = 1.0;
        ProbabilityTable { p }
    }

    /// No validation; call [`ProbabilityTable::check`] before relying on it.
    pub fn from_raw(p: Grid) -> Self {
        ProbabilityTable { p }
    }

    /// Verifies entries are in [0, 1] and sum to 1, both within [`tol::ALGEBRA`].
    pub fn check(&self) -> Result<()> {
        for ij in OutcomePair::ALL {
            let v = self.get(ij);
            if !v.is_finite() || !(-tol::ALGEBRA..=1.0 + tol::ALGEBRA).contains(&v) {
                return Err(domain(format!("table entry {ij} = {v} outside [0, 1]")));
            }
        }
        let residual = self.normalization_residual();
        if residual > tol::ALGEBRA {
            return Err(domain(format!("table sums to {} (residual {residual:e})", self.total())));
        }
        Ok(())
    }

    pub fn get(&self, ij: OutcomePair) -> f64 {
        ij.at(&self.p)
    }

    pub fn grid(&self) -> &Grid {
        &self.p
    }

    pub fn total(&self) -> f64 {
        OutcomePair::ALL.iter().map(|&ij| self.get(ij)).sum()
    }

    pub fn normalization_residual(&self) -> f64 {
        (self.total() - 1.0).abs()
    }

    /// Marginal of the first subsystem: p(b = b_i).
    pub fn first_marginal(&self) -> [f64; 2] {
        [self.p[0][0] + self.p[0][1], self.p[1][0] + self.p[1][1]]
    }

    /// Marginal of the second subsystem: p(b′ = b′_j).
    pub fn second_marginal(&self) -> [f64; 2] {
        [self.p[0][0] + self.p[1][0], self.p[0][1] + self.p[1][1]]
    }

    pub fn max_abs_diff(&self, other: &ProbabilityTable) -> f64 {
        OutcomePair::ALL
            .iter()
            .map(|&ij| (self.get(ij) - other.get(ij)).abs())
            .fold(0.0, f64::max)
    }
}

/// One table per selection context, addressed by [`SettingPair`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ContextTables {
    tables: [[ProbabilityTable; 2]; 2],
}

impl ContextTables {
    pub fn new(tables: [[ProbabilityTable; 2]; 2]) -> Self {
        ContextTables { tables }
    }

    pub fn identical(table: ProbabilityTable) -> Self {
        ContextTables { tables: [[table; 2]; 2] }
    }

    pub fn from_fn(mut f: impl FnMut(SettingPair) -> ProbabilityTable) -> Self {
        let mut tables = [[ProbabilityTable::uniform(); 2]; 2];
        for kl in SettingPair::ALL {
            tables[kl.k.slot()][kl.l.slot()] = f(kl);
        }
        ContextTables { tables }
    }

    pub fn get(&self, kl: SettingPair) -> &ProbabilityTable {
        &self.tables[kl.k.slot()][kl.l.slot()]
    }

    pub fn check(&self) -> Result<()> {
        for kl in SettingPair::ALL {
            self.get(kl)
                .check()
                .map_err(|e| domain(format!("context {kl}: {e}")))?;
        }
        Ok(())
    }
}
