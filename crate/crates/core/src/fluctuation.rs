//! Sources whose quadruple frequencies ν_ba(ijkl) never settle while every
//! observable frequency does.
//!
//! Hidden b-pairs are drawn from Q_A or Q_B in alternating blocks of
//! doubling length (1, 2, 4, …). Running means then swing between mixtures
//! weighted toward the most recent block. Q_A and Q_B agree on every
//! observable marginal, so only the hidden quadruple statistics oscillate.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::classical_total_probability;
use crate::ensemble::{CompositeSystem, EnsembleKind, SampledEnsemble};
use crate::error::{domain, Error, Result};
use crate::index::{OutcomePair, SettingPair};
use crate::model::SettingDistribution;
use crate::rng::{stream_rng, Categorical, SOURCE_STREAM};
use crate::stabilization::{dyadic_checkpoints, FrequencyTrace, StabilizationCriterion, Verdict};
use crate::table::{ContextTables, ProbabilityTable};
use crate::tol;

/// Two hidden per-context distributions sharing all observable marginals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadruplePair {
    pub settings: SettingDistribution,
    pub q_a: ContextTables,
    pub q_b: ContextTables,
}

impl QuadruplePair {
    /// Symmetric settings; Q_A(·|12) = [[.4,.1],[.1,.4]], Q_A(·|21) =
    /// [[0,.5],[.5,0]], and Q_B swaps the two contexts.
    pub fn default_pair() -> Self {
        let peaked = ProbabilityTable::from_raw([[0.4, 0.1], [0.1, 0.4]]);
        let split = ProbabilityTable::from_raw([[0.0, 0.5], [0.5, 0.0]]);
        let q_a = ContextTables::from_fn(|kl| if kl == SettingPair::TWO_ONE { split } else { peaked });
        let q_b = ContextTables::from_fn(|kl| if kl == SettingPair::TWO_ONE { peaked } else { split });
        QuadruplePair { settings: SettingDistribution::symmetric(), q_a, q_b }
    }

    /// Both Q's must give the same per-context b and b′ marginals and the
    /// same unconditional b-pair distribution.
    pub fn check(&self) -> Result<()> {
        self.settings.check()?;
        self.q_a.check().map_err(|e| domain(format!("Q_A: {e}")))?;
        self.q_b.check().map_err(|e| domain(format!("Q_B: {e}")))?;
        for kl in SettingPair::ALL {
            if self.settings.get(kl) == 0.0 {
                continue;
            }
            let (a, b) = (self.q_a.get(kl), self.q_b.get(kl));
            let marginals = [
                ("b", a.first_marginal(), b.first_marginal()),
                ("b'", a.second_marginal(), b.second_marginal()),
            ];
            for (name, ma, mb) in marginals {
                let gap = (ma[0] - mb[0]).abs().max((ma[1] - mb[1]).abs());
                if gap > tol::ALGEBRA {
                    return Err(Error::MarginalMismatch(format!(
                        "{name}-marginal in context {kl} differs by {gap:e}"
                    )));
                }
            }
        }
        let mix_a = classical_total_probability(&self.settings, &self.q_a)?;
        let mix_b = classical_total_probability(&self.settings, &self.q_b)?;
        let gap = mix_a.max_abs_diff(&mix_b);
        if gap > tol::ALGEBRA {
            return Err(Error::MarginalMismatch(format!(
                "unconditional b-pair distribution differs by {gap:e}"
            )));
        }
        Ok(())
    }
}

/// Block index of element `n` (zero-based): block t covers
/// [2^t − 1, 2^(t+1) − 1).
pub fn schedule_block(n: u64) -> u32 {
    63 - (n + 1).leading_zeros()
}

/// Even blocks draw from Q_A, odd blocks from Q_B.
pub fn uses_q_a(n: u64) -> bool {
    schedule_block(n).is_multiple_of(2)
}

pub fn fluctuating_quadruple_source(pair: &QuadruplePair, samples: usize, seed: u64) -> Result<SampledEnsemble> {
    if samples == 0 {
        return Err(domain("ensemble size must be at least 1"));
    }
    pair.check()?;
    let setting_cat = Categorical::from_grid(pair.settings.grid());
    let cat_a = SettingPair::ALL.map(|kl| Categorical::from_grid(pair.q_a.get(kl).grid()));
    let cat_b = SettingPair::ALL.map(|kl| Categorical::from_grid(pair.q_b.get(kl).grid()));
    let mut rng = stream_rng(seed, SOURCE_STREAM);
    let elements = (0..samples as u64)
        .map(|n| {
            let settings = SettingPair::from_ordinal(setting_cat.sample(&mut rng));
            let cats = if uses_q_a(n) { &cat_a } else { &cat_b };
            let hidden_b = OutcomePair::from_ordinal(cats[settings.ordinal()].sample(&mut rng));
            CompositeSystem { settings, hidden_b, selected_b: None }
        })
        .collect();
    Ok(SampledEnsemble::from_parts(elements, seed, EnsembleKind::Source))
}

/// The event (b, b′, a, a′) = (b_i, b′_j, a_k, a′_l).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quadruple {
    pub b: OutcomePair,
    pub a: SettingPair,
}

impl Quadruple {
    pub fn new(i: u8, j: u8, k: u8, l: u8) -> Result<Self> {
        Ok(Quadruple { b: OutcomePair::new(i, j)?, a: SettingPair::new(k, l)? })
    }
}

impl Default for Quadruple {
    /// (1, 1, 1, 2).
    fn default() -> Self {
        Quadruple { b: OutcomePair::ALL[0], a: SettingPair::ONE_TWO }
    }
}

impl fmt::Display for Quadruple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.b, self.a)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JudgedTrace {
    pub trace: FrequencyTrace,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FluctuationReport {
    pub quadruple: JudgedTrace,
    pub observables: Vec<JudgedTrace>,
}

impl FluctuationReport {
    pub fn observables_stable(&self) -> bool {
        self.observables.iter().all(|o| o.verdict.is_stable())
    }
}

/// Quadruple trace plus observable traces: ν_a(kl) for every context,
/// ν_b(ij; 𝒮) for every pair, and the per-context marginals ν(b = b_1 | kl)
/// and ν(b′ = b′_1 | kl) for contexts with positive weight.
pub fn frequency_traces(
    e: &SampledEnsemble,
    target: Quadruple,
    settings: &SettingDistribution,
) -> Result<(FrequencyTrace, Vec<FrequencyTrace>)> {
    let checkpoints = dyadic_checkpoints(e.len() as u64);
    let live: Vec<SettingPair> = SettingPair::ALL.into_iter().filter(|&kl| settings.get(kl) > 0.0).collect();

    let mut quad = 0u64;
    let mut per_context = [0u64; 4];
    let mut pairs = [0u64; 4];
    let mut first_one = [0u64; 4];
    let mut second_one = [0u64; 4];

    let mut quad_points = Vec::new();
    let mut a_points: [Vec<(u64, f64)>; 4] = Default::default();
    let mut b_points: [Vec<(u64, f64)>; 4] = Default::default();
    let mut first_points: [Vec<(u64, f64)>; 4] = Default::default();
    let mut second_points: [Vec<(u64, f64)>; 4] = Default::default();

    let mut next = checkpoints.iter().peekable();
    for (n, el) in e.elements().iter().enumerate() {
        let c = el.settings.ordinal();
        if el.settings == target.a && el.hidden_b == target.b {
            quad += 1;
        }
        per_context[c] += 1;
        pairs[el.hidden_b.ordinal()] += 1;
        if el.hidden_b.i.index() == 1 {
            first_one[c] += 1;
        }
        if el.hidden_b.j.index() == 1 {
            second_one[c] += 1;
        }
        let m = n as u64 + 1;
        if next.peek() == Some(&&m) {
            next.next();
            let mf = m as f64;
            quad_points.push((m, quad as f64 / mf));
            for x in 0..4 {
                a_points[x].push((m, per_context[x] as f64 / mf));
                b_points[x].push((m, pairs[x] as f64 / mf));
                let ratio = |num: u64| if per_context[x] == 0 { 0.0 } else { num as f64 / per_context[x] as f64 };
                first_points[x].push((m, ratio(first_one[x])));
                second_points[x].push((m, ratio(second_one[x])));
            }
        }
    }

    let quadruple = FrequencyTrace::new(format!("nu_ba({target})"), quad_points)?;
    let mut observables = Vec::new();
    for kl in SettingPair::ALL {
        observables.push(FrequencyTrace::new(format!("nu_a({kl})"), std::mem::take(&mut a_points[kl.ordinal()]))?);
    }
    for ij in OutcomePair::ALL {
        observables.push(FrequencyTrace::new(format!("nu_b({ij})"), std::mem::take(&mut b_points[ij.ordinal()]))?);
    }
    for kl in live {
        let x = kl.ordinal();
        observables.push(FrequencyTrace::new(format!("nu_b(1.|{kl})"), std::mem::take(&mut first_points[x]))?);
        observables.push(FrequencyTrace::new(format!("nu_b(.1|{kl})"), std::mem::take(&mut second_points[x]))?);
    }
    Ok((quadruple, observables))
}

/// Samples the fluctuating source and judges every trace.
pub fn fluctuation_demo(
    pair: &QuadruplePair,
    target: Quadruple,
    samples: usize,
    seed: u64,
    criterion: StabilizationCriterion,
) -> Result<FluctuationReport> {
    let e = fluctuating_quadruple_source(pair, samples, seed)?;
    let (quad, observables) = frequency_traces(&e, target, &pair.settings)?;
    let judge = |trace: FrequencyTrace| -> Result<JudgedTrace> {
        let verdict = criterion.judge(&trace)?;
        Ok(JudgedTrace { trace, verdict })
    };
    Ok(FluctuationReport {
        quadruple: judge(quad)?,
        observables: observables.into_iter().map(judge).collect::<Result<_>>()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_blocks_double() {
        let blocks: Vec<u32> = (0..15).map(schedule_block).collect();
        assert_eq!(blocks, vec![0, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3, 3, 3, 3, 3]);
        assert!(uses_q_a(0) && !uses_q_a(1) && uses_q_a(3));
    }

    #[test]
    fn default_pair_is_feasible() {
        QuadruplePair::default_pair().check().unwrap();
    }

    #[test]
    fn per_context_marginal_mismatch_is_rejected() {
        let mut pair = QuadruplePair::default_pair();
        pair.q_b = ContextTables::identical(ProbabilityTable::from_raw([[0.7, 0.1], [0.1, 0.1]]));
        assert!(matches!(pair.check(), Err(Error::MarginalMismatch(_))));
        assert!(fluctuating_quadruple_source(&pair, 10, 0).is_err());
    }

    #[test]
    fn unconditional_mismatch_is_rejected() {
        // same per-context marginals, different joint mixtures
        let mut pair = QuadruplePair::default_pair();
        let peaked = ProbabilityTable::from_raw([[0.4, 0.1], [0.1, 0.4]]);
        let split = ProbabilityTable::from_raw([[0.0, 0.5], [0.5, 0.0]]);
        pair.q_a = ContextTables::identical(peaked);
        pair.q_b = ContextTables::identical(split);
        let err = pair.check().unwrap_err();
        assert!(matches!(&err, Error::MarginalMismatch(msg) if msg.contains("unconditional")), "{err}");
    }

    #[test]
    fn equal_pair_stabilizes() {
        let mut pair = QuadruplePair::default_pair();
        pair.q_b = pair.q_a;
        let report = fluctuation_demo(&pair, Quadruple::default(), 1 << 18, 4, StabilizationCriterion::default()).unwrap();
        assert!(report.quadruple.verdict.is_stable());
        assert!(report.observables_stable());
    }

    #[test]
    fn source_is_anticorrelated_and_deterministic() {
        let pair = QuadruplePair::default_pair();
        let a = fluctuating_quadruple_source(&pair, 4096, 12).unwrap();
        assert_eq!(a, fluctuating_quadruple_source(&pair, 4096, 12).unwrap());
        assert!(a.elements().iter().all(|e| !e.settings.is_diagonal()));
    }
}
