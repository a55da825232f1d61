//! Finite ensembles of composite systems: the source ensemble, the hidden
//! sub-ensembles and the selected (filtered) ensembles of each context, and
//! the empirical disturbance δ^(M) computed from them.

use crate::algebra::{self, product_context_table};
use crate::error::{domain, Error, Result};
use crate::index::{Grid, Outcome, OutcomePair, SettingPair};
use crate::model::{ContextualModel, SettingDistribution, TransitionMatrix};
use crate::rng::{selection_stream, stream_rng, Categorical, SOURCE_STREAM};
use crate::stabilization::dyadic_checkpoints;
use crate::table::{ContextTables, ProbabilityTable};
use crate::tol;

/// One realized pair w = (ω, ω′).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CompositeSystem {
    /// (a(ω), a′(ω′)).
    pub settings: SettingPair,
    /// Undisturbed b-values.
    pub hidden_b: OutcomePair,
    /// b-values after selection; present only in selected ensembles.
    pub selected_b: Option<OutcomePair>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleKind {
    Source,
    HiddenSub(SettingPair),
    Selected(SettingPair),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledEnsemble {
    elements: Vec<CompositeSystem>,
    seed: u64,
    kind: EnsembleKind,
}

impl SampledEnsemble {
    pub(crate) fn from_parts(elements: Vec<CompositeSystem>, seed: u64, kind: EnsembleKind) -> Self {
        SampledEnsemble { elements, seed, kind }
    }

    pub fn elements(&self) -> &[CompositeSystem] {
        &self.elements
    }

    /// M.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn kind(&self) -> EnsembleKind {
        self.kind
    }

    /// ν_a(kl) over the whole ensemble.
    pub fn setting_frequencies(&self) -> Grid {
        let mut counts = [[0u64; 2]; 2];
        for e in &self.elements {
            counts[e.settings.k.slot()][e.settings.l.slot()] += 1;
        }
        let m = self.len().max(1) as f64;
        counts.map(|row| row.map(|c| c as f64 / m))
    }

    /// Count of elements in context `kl`.
    pub fn context_count(&self, kl: SettingPair) -> usize {
        self.elements.iter().filter(|e| e.settings == kl).count()
    }
}

/// How the undisturbed b-statistics of each hidden sub-ensemble are chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HiddenAllocation {
    /// The model's unconditional p_b in every context.
    Unconditional,
    /// One table per context; must mix back to p_b under p_a.
    PerContext(ContextTables),
}

/// Per-context hidden distributions p⁰(ij | kl) for `m`.
pub fn hidden_tables(m: &ContextualModel, alloc: &HiddenAllocation) -> Result<ContextTables> {
    let target = algebra::model_probabilities(m)?;
    match alloc {
        HiddenAllocation::Unconditional => Ok(ContextTables::identical(target)),
        HiddenAllocation::PerContext(tables) => {
            tables.check().map_err(|e| Error::InfeasibleHiddenAllocation(e.to_string()))?;
            let mixed = algebra::classical_total_probability(&m.settings, tables)?;
            let gap = mixed.max_abs_diff(&target);
            if gap > tol::ALGEBRA {
                return Err(Error::InfeasibleHiddenAllocation(format!(
                    "Σ p_a(kl) p⁰(ij|kl) misses p_b by {gap:e}"
                )));
            }
            Ok(*tables)
        }
    }
}

/// Source ensemble 𝒮 of `samples` pairs with the default hidden allocation.
pub fn sample_source(m: &ContextualModel, samples: usize, seed: u64) -> Result<SampledEnsemble> {
    sample_source_with(m, &HiddenAllocation::Unconditional, samples, seed)
}

pub fn sample_source_with(
    m: &ContextualModel,
    alloc: &HiddenAllocation,
    samples: usize,
    seed: u64,
) -> Result<SampledEnsemble> {
    if samples == 0 {
        return Err(domain("ensemble size must be at least 1"));
    }
    m.settings.check()?;
    let hidden = hidden_tables(m, alloc)?;
    let setting_cat = Categorical::from_grid(m.settings.grid());
    let hidden_cat = SettingPair::ALL.map(|kl| Categorical::from_grid(hidden.get(kl).grid()));
    let mut rng = stream_rng(seed, SOURCE_STREAM);
    let elements = (0..samples)
        .map(|_| {
            let settings = SettingPair::from_ordinal(setting_cat.sample(&mut rng));
            let hidden_b = OutcomePair::from_ordinal(hidden_cat[settings.ordinal()].sample(&mut rng));
            CompositeSystem { settings, hidden_b, selected_b: None }
        })
        .collect();
    Ok(SampledEnsemble { elements, seed, kind: EnsembleKind::Source })
}

/// Splits context `kl` out of a source ensemble: the hidden sub-ensemble
/// 𝒮_{0;a}(kl) with undisturbed b-values, and the selected ensemble 𝒮_a(kl)
/// whose b-values are redrawn from p(i/k) p′(j/l). Both have the same size.
pub fn select_context(
    src: &SampledEnsemble,
    kl: SettingPair,
    m: &ContextualModel,
    seed: u64,
) -> Result<(SampledEnsemble, SampledEnsemble)> {
    if src.kind != EnsembleKind::Source {
        return Err(domain("select_context needs a source ensemble"));
    }
    let hidden: Vec<CompositeSystem> = src.elements.iter().copied().filter(|e| e.settings == kl).collect();
    if hidden.is_empty() {
        return Err(Error::EmptyContext(kl));
    }
    let table = product_context_table(&m.transition, &m.transition_prime, kl);
    let cat = Categorical::from_grid(table.grid());
    let mut rng = stream_rng(seed, selection_stream(kl));
    let selected = hidden
        .iter()
        .map(|e| CompositeSystem {
            selected_b: Some(OutcomePair::from_ordinal(cat.sample(&mut rng))),
            ..*e
        })
        .collect();
    Ok((
        SampledEnsemble { elements: hidden, seed, kind: EnsembleKind::HiddenSub(kl) },
        SampledEnsemble { elements: selected, seed, kind: EnsembleKind::Selected(kl) },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Hidden,
    Selected,
}

/// Relative frequencies of b-pairs in an ensemble.
pub fn frequency_table(e: &SampledEnsemble, which: Which) -> Result<ProbabilityTable> {
    if e.is_empty() {
        return Err(domain("empty ensemble has no frequencies"));
    }
    let mut counts = [[0u64; 2]; 2];
    for el in &e.elements {
        let b = match which {
            Which::Hidden => el.hidden_b,
            Which::Selected => el
                .selected_b
                .ok_or_else(|| domain("selected b-values requested on an ensemble without selection"))?,
        };
        counts[b.i.slot()][b.j.slot()] += 1;
    }
    let m = e.len() as f64;
    Ok(ProbabilityTable::from_raw(counts.map(|row| row.map(|c| c as f64 / m))))
}

/// δ^(M) traces and the final entanglement-coefficient estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDisturbance {
    pub checkpoints: Vec<u64>,
    /// δ^(M)(ij) at each checkpoint.
    pub delta: Vec<Grid>,
    pub lambda_hat: Grid,
    pub settings_hat: SettingDistribution,
    pub transition_hat: TransitionMatrix,
    pub transition_prime_hat: TransitionMatrix,
    /// ν_b(ij; 𝒮) at the final checkpoint.
    pub observed: ProbabilityTable,
}

impl EmpiricalDisturbance {
    pub fn delta_trace(&self, ij: OutcomePair) -> Vec<(u64, f64)> {
        self.checkpoints
            .iter()
            .zip(&self.delta)
            .map(|(&m, d)| (m, ij.at(d)))
            .collect()
    }

    pub fn final_delta(&self) -> Grid {
        *self.delta.last().expect("at least one checkpoint")
    }
}

/// Running counts over a prefix of the source ensemble.
#[derive(Default)]
struct PrefixCounts {
    n: u64,
    per_context: [u64; 4],
    hidden: [[u64; 4]; 4],
    selected: [[u64; 4]; 4],
}

impl PrefixCounts {
    /// δ^(M)(ij) = Σ_kl ν_a(kl) [ν_b(ij; 𝒮_{0;a}(kl)) − ν_b(ij; 𝒮_a(kl))].
    fn delta(&self) -> Grid {
        let m = self.n as f64;
        let mut delta = [[0.0; 2]; 2];
        for ij in OutcomePair::ALL {
            let mut acc = 0.0;
            for c in 0..4 {
                let n_kl = self.per_context[c];
                if n_kl == 0 {
                    continue;
                }
                let nu_a = n_kl as f64 / m;
                let nu_hidden = self.hidden[c][ij.ordinal()] as f64 / n_kl as f64;
                let nu_selected = self.selected[c][ij.ordinal()] as f64 / n_kl as f64;
                acc += nu_a * (nu_hidden - nu_selected);
            }
            delta[ij.i.slot()][ij.j.slot()] = acc;
        }
        delta
    }
}

/// Samples `max_samples` pairs, selects every populated context, and tracks
/// δ^(M) over dyadic prefixes. λ̂ renormalizes the final δ^(M) with the
/// empirical setting frequencies and transition estimates.
pub fn empirical_disturbance(m: &ContextualModel, max_samples: usize, seed: u64) -> Result<EmpiricalDisturbance> {
    if m.settings.anticorrelation_residual() > tol::ALGEBRA {
        return Err(domain("empirical disturbance needs anticorrelated settings"));
    }
    let src = sample_source(m, max_samples, seed)?;
    let mut selected: [Vec<OutcomePair>; 4] = Default::default();
    for kl in SettingPair::ALL {
        if src.context_count(kl) == 0 {
            continue;
        }
        let (_, sel) = select_context(&src, kl, m, seed)?;
        selected[kl.ordinal()] = sel.elements.iter().map(|e| e.selected_b.expect("selected")).collect();
    }

    let checkpoints = dyadic_checkpoints(max_samples as u64);
    let mut counts = PrefixCounts::default();
    let mut delta = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().peekable();
    for el in src.elements() {
        let c = el.settings.ordinal();
        let sel = selected[c][counts.per_context[c] as usize];
        counts.n += 1;
        counts.per_context[c] += 1;
        counts.hidden[c][el.hidden_b.ordinal()] += 1;
        counts.selected[c][sel.ordinal()] += 1;
        if next.peek() == Some(&&counts.n) {
            delta.push(counts.delta());
            next.next();
        }
    }

    let settings_hat = SettingDistribution::new(src.setting_frequencies())?;
    let (transition_hat, transition_prime_hat) = transition_estimates(&counts)?;
    let final_delta = *delta.last().expect("at least one checkpoint");
    let lambda_hat = algebra::renormalize_disturbance(&final_delta, &settings_hat, &transition_hat, &transition_prime_hat)?;
    let observed = frequency_table(&src, Which::Hidden)?;
    Ok(EmpiricalDisturbance {
        checkpoints,
        delta,
        lambda_hat,
        settings_hat,
        transition_hat,
        transition_prime_hat,
        observed,
    })
}

/// p̂(i/k) pooled over every context with a = a_k, p̂′(j/l) over a′ = a′_l.
fn transition_estimates(counts: &PrefixCounts) -> Result<(TransitionMatrix, TransitionMatrix)> {
    let mut first = [[0u64; 2]; 2];
    let mut second = [[0u64; 2]; 2];
    for kl in SettingPair::ALL {
        let c = kl.ordinal();
        for ij in OutcomePair::ALL {
            let n = counts.selected[c][ij.ordinal()];
            first[ij.i.slot()][kl.k.slot()] += n;
            second[ij.j.slot()][kl.l.slot()] += n;
        }
    }
    let to_matrix = |cells: [[u64; 2]; 2], which: &str| -> Result<TransitionMatrix> {
        let mut p = [[0.0; 2]; 2];
        for k in Outcome::ALL {
            let total = cells[0][k.slot()] + cells[1][k.slot()];
            if total == 0 {
                return Err(Error::SingularContext {
                    factor: format!("{which}: no selected elements with setting index {}", k.index()),
                });
            }
            p[0][k.slot()] = cells[0][k.slot()] as f64 / total as f64;
            p[1][k.slot()] = cells[1][k.slot()] as f64 / total as f64;
        }
        TransitionMatrix::new(p)
    };
    Ok((to_matrix(first, "p_b/a")?, to_matrix(second, "p_b'/a'")?))
}
