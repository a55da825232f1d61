//! Closed-form probability transformations for anticorrelated composite
//! systems: the classical mixture, the disturbance term δ̄, its
//! renormalization into entanglement coefficients λ, the trigonometric and
//! hyperbolic reconstructions, and the EPR-Bohm correlation functionals.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::index::{Grid, Outcome, OutcomePair, SettingPair};
use crate::model::{ContextualModel, EprScenario, Phase, PhaseMatrix, SettingDistribution, TransitionMatrix};
use crate::table::{ContextTables, ProbabilityTable};
use crate::tol;

/// Σ_kl p_a(kl) · ctx(ij | kl).
pub fn classical_total_probability(
    settings: &SettingDistribution,
    ctx: &ContextTables,
) -> Result<ProbabilityTable> {
    settings.check()?;
    ctx.check()?;
    Ok(ProbabilityTable::from_raw(mixture(settings, ctx)))
}

fn mixture(settings: &SettingDistribution, ctx: &ContextTables) -> Grid {
    let mut out = [[0.0; 2]; 2];
    for ij in OutcomePair::ALL {
        let mut acc = 0.0;
        for kl in SettingPair::ALL {
            acc += settings.get(kl) * ctx.get(kl).get(ij);
        }
        out[ij.i.slot()][ij.j.slot()] = acc;
    }
    out
}

/// Outcome-independent context table: entry (i, j) = p(i/k) · p′(j/l).
pub fn product_context_table(
    t: &TransitionMatrix,
    t_prime: &TransitionMatrix,
    kl: SettingPair,
) -> ProbabilityTable {
    let mut p = [[0.0; 2]; 2];
    for ij in OutcomePair::ALL {
        p[ij.i.slot()][ij.j.slot()] = t.get(ij.i, kl.k) * t_prime.get(ij.j, kl.l);
    }
    ProbabilityTable::from_raw(p)
}

/// Product tables for all four contexts.
pub fn product_contexts(t: &TransitionMatrix, t_prime: &TransitionMatrix) -> ContextTables {
    ContextTables::from_fn(|kl| product_context_table(t, t_prime, kl))
}

/// δ̄(ij) = observed(ij) − Σ_kl p_a(kl) · ctx(ij | kl).
pub fn disturbance_term(
    observed: &ProbabilityTable,
    settings: &SettingDistribution,
    ctx: &ContextTables,
) -> Grid {
    let mix = mixture(settings, ctx);
    let mut delta = [[0.0; 2]; 2];
    for ij in OutcomePair::ALL {
        let (i, j) = (ij.i.slot(), ij.j.slot());
        delta[i][j] = observed.get(ij) - mix[i][j];
    }
    delta
}

/// √(p_a(12) p_a(21) p(i/1) p(i/2) p′(j/1) p′(j/2)).
pub fn interference_root(
    settings: &SettingDistribution,
    t: &TransitionMatrix,
    t_prime: &TransitionMatrix,
    ij: OutcomePair,
) -> f64 {
    let (one, two) = (Outcome::One, Outcome::Two);
    (settings.get(SettingPair::ONE_TWO)
        * settings.get(SettingPair::TWO_ONE)
        * t.get(ij.i, one)
        * t.get(ij.i, two)
        * t_prime.get(ij.j, one)
        * t_prime.get(ij.j, two))
    .sqrt()
}

fn require_anticorrelated(settings: &SettingDistribution) -> Result<()> {
    let residual = settings.anticorrelation_residual();
    if residual > tol::ALGEBRA {
        return Err(domain(format!(
            "settings are not anticorrelated: p_a(11), p_a(22) up to {residual}"
        )));
    }
    Ok(())
}

/// λ(ij) = δ̄(ij) / (2 · interference_root(ij)).
pub fn renormalize_disturbance(
    delta_bar: &Grid,
    settings: &SettingDistribution,
    t: &TransitionMatrix,
    t_prime: &TransitionMatrix,
) -> Result<Grid> {
    require_anticorrelated(settings)?;
    let mut factors = vec![
        ("p_a(12)".to_string(), settings.get(SettingPair::ONE_TWO)),
        ("p_a(21)".to_string(), settings.get(SettingPair::TWO_ONE)),
    ];
    for x in Outcome::ALL {
        for k in Outcome::ALL {
            factors.push((format!("p_b/a({}/{})", x.index(), k.index()), t.get(x, k)));
            factors.push((format!("p_b'/a'({}/{})", x.index(), k.index()), t_prime.get(x, k)));
        }
    }
    if let Some((name, _)) = factors.into_iter().find(|(_, v)| *v == 0.0) {
        return Err(Error::SingularContext { factor: name });
    }
    let mut lambda = [[0.0; 2]; 2];
    for ij in OutcomePair::ALL {
        let root = interference_root(settings, t, t_prime, ij);
        lambda[ij.i.slot()][ij.j.slot()] = ij.at(delta_bar) / (2.0 * root);
    }
    Ok(lambda)
}

/// The anticorrelated transformation without admissibility checks:
/// p(ij) = p_a(12) p(i/1) p′(j/2) + p_a(21) p(i/2) p′(j/1) + 2 λ(ij) root(ij).
///
/// Entries may fall outside [0, 1]; see [`apply_phases`] for the checked form.
pub fn phase_transform_raw(
    settings: &SettingDistribution,
    t: &TransitionMatrix,
    t_prime: &TransitionMatrix,
    phases: &PhaseMatrix,
) -> Grid {
    let p12 = settings.get(SettingPair::ONE_TWO);
    let p21 = settings.get(SettingPair::TWO_ONE);
    let mut out = [[0.0; 2]; 2];
    for ij in OutcomePair::ALL {
        let (one, two) = (Outcome::One, Outcome::Two);
        let mix = p12 * (t.get(ij.i, one) * t_prime.get(ij.j, two))
            + p21 * (t.get(ij.i, two) * t_prime.get(ij.j, one));
        let root = interference_root(settings, t, t_prime, ij);
        out[ij.i.slot()][ij.j.slot()] = mix + 2.0 * phases.lambda(ij) * root;
    }
    out
}

fn admissible_table(raw: Grid) -> Result<ProbabilityTable> {
    for ij in OutcomePair::ALL {
        let v = ij.at(&raw);
        if !v.is_finite() || !(-tol::ALGEBRA..=1.0 + tol::ALGEBRA).contains(&v) {
            let residual = if v < 0.0 { -v } else { v - 1.0 };
            return Err(Error::InadmissiblePhases {
                entry: Some(ij),
                detail: format!("p_b({ij}) = {v} outside [0, 1]"),
                residual,
            });
        }
    }
    let table = ProbabilityTable::from_raw(raw);
    let residual = table.normalization_residual();
    if residual > tol::ALGEBRA {
        return Err(Error::InadmissiblePhases {
            entry: None,
            detail: format!("table sums to {}", table.total()),
            residual,
        });
    }
    Ok(table)
}

/// Trigonometric, hyperbolic or mixed transformation of the context
/// probabilities into the joint distribution p_b(ij).
///
/// Fails with [`Error::InadmissiblePhases`] when the phases do not yield a
/// probability table.
pub fn apply_phases(
    settings: &SettingDistribution,
    t: &TransitionMatrix,
    t_prime: &TransitionMatrix,
    phases: &PhaseMatrix,
) -> Result<ProbabilityTable> {
    require_anticorrelated(settings)?;
    admissible_table(phase_transform_raw(settings, t, t_prime, phases))
}

/// [`apply_phases`] on a model's own components.
pub fn model_probabilities(m: &ContextualModel) -> Result<ProbabilityTable> {
    apply_phases(&m.settings, &m.transition, &m.transition_prime, &m.phases)
}

/// p_b(ii) = ½ sin²((γ′−γ)/2), p_b(ij) = ½ cos²((γ′−γ)/2) for i ≠ j.
pub fn epr_probabilities(s: EprScenario) -> ProbabilityTable {
    let half = s.delta() / 2.0;
    let same = 0.5 * half.sin().powi(2);
    let opposite = 0.5 * half.cos().powi(2);
    ProbabilityTable::from_raw([[same, opposite], [opposite, same]])
}

/// E = Σ b·b′ p(ij) = p(11) + p(22) − p(12) − p(21).
pub fn correlation(table: &ProbabilityTable) -> f64 {
    OutcomePair::ALL
        .iter()
        .map(|&ij| f64::from(ij.value_product()) * table.get(ij))
        .sum()
}

/// E(γ₁,γ′₁) − E(γ₁,γ′₂) + E(γ₂,γ′₁) + E(γ₂,γ′₂) from the EPR-Bohm table.
pub fn chsh(gamma1: f64, gamma2: f64, gamma1p: f64, gamma2p: f64) -> f64 {
    let e = |g: f64, gp: f64| correlation(&epr_probabilities(EprScenario::new(g, gp)));
    e(gamma1, gamma1p) - e(gamma1, gamma2p) + e(gamma2, gamma1p) + e(gamma2, gamma2p)
}

/// The four CHSH analyzer pairs in the order they enter [`chsh`], with sign.
pub fn chsh_terms(gamma1: f64, gamma2: f64, gamma1p: f64, gamma2p: f64) -> [(f64, EprScenario); 4] {
    [
        (1.0, EprScenario::new(gamma1, gamma1p)),
        (-1.0, EprScenario::new(gamma1, gamma2p)),
        (1.0, EprScenario::new(gamma2, gamma1p)),
        (1.0, EprScenario::new(gamma2, gamma2p)),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstraintResidual {
    /// Σ_ij cos θ(ij); zero when vacuous.
    pub residual: f64,
    /// The prefactor sin α cos α sin β cos β vanishes, so no constraint applies.
    pub vacuous: bool,
}

fn at_multiple_of_half_pi(angle: f64) -> bool {
    let r = angle.rem_euclid(std::f64::consts::FRAC_PI_2);
    r <= tol::ALGEBRA || std::f64::consts::FRAC_PI_2 - r <= tol::ALGEBRA
}

/// Σ cos θ(ij) for a double stochastic model with parameters α, β; the
/// phases of an admissible model make it vanish.
pub fn phase_constraint_residual(phases: &PhaseMatrix, alpha: f64, beta: f64) -> Result<ConstraintResidual> {
    if let Some(ij) = OutcomePair::ALL.iter().find(|&&ij| !phases.get(ij).is_trig()) {
        return Err(domain(format!("phase {ij} is hyperbolic; the constraint needs trigonometric phases")));
    }
    if at_multiple_of_half_pi(alpha) || at_multiple_of_half_pi(beta) {
        return Ok(ConstraintResidual { residual: 0.0, vacuous: true });
    }
    let residual = OutcomePair::ALL.iter().map(|&ij| phases.lambda(ij)).sum();
    Ok(ConstraintResidual { residual, vacuous: false })
}

/// λ ↦ phases: Trig(arccos λ) for |λ| ≤ 1, Hyp(sign λ, arccosh |λ|) otherwise.
pub fn reconstruct_phases(lambda: &Grid) -> PhaseMatrix {
    PhaseMatrix::from_lambdas(lambda)
}

/// Symmetric-settings transformation written directly in the ξ angles of
/// both transition matrices.
pub fn general_stochastic_probability(
    settings: &SettingDistribution,
    t: &TransitionMatrix,
    t_prime: &TransitionMatrix,
    phases: &PhaseMatrix,
) -> Result<ProbabilityTable> {
    if settings.symmetry_residual() > tol::ALGEBRA {
        return Err(domain("settings must be symmetric: p_a(12) = p_a(21) = 1/2"));
    }
    let (Some(param), Some(param_prime)) = (t.parametrization(), t_prime.parametrization()) else {
        return Err(domain("both transition matrices must carry a ξ parametrization"));
    };
    let cos = |ij: OutcomePair| match phases.get(ij) {
        Phase::Trig { theta } => Ok(theta.cos()),
        Phase::Hyp { .. } => Err(domain(format!("phase {ij} is hyperbolic"))),
    };
    let (x1, x2) = param.xi();
    let (y1, y2) = param_prime.xi();
    let (c1, s1, c2, s2) = (x1.cos(), x1.sin(), x2.cos(), x2.sin());
    let (d1, r1, d2, r2) = (y1.cos(), y1.sin(), y2.cos(), y2.sin());
    let sq = |v: f64| v * v;
    let pair = |i, j| OutcomePair::new(i, j).expect("valid indices");

    let p11 = 0.5 * (sq(c1) * sq(r2) + sq(s2) * sq(d1)) + cos(pair(1, 1))? * c1 * d1 * s2 * r2;
    let p12 = 0.5 * (sq(c1) * sq(d2) + sq(s2) * sq(r1)) + cos(pair(1, 2))? * c1 * d2 * s2 * r1;
    let p21 = 0.5 * (sq(s1) * sq(r2) + sq(c2) * sq(d1)) + cos(pair(2, 1))? * s1 * d1 * c2 * r2;
    let p22 = 0.5 * (sq(s1) * sq(d2) + sq(c2) * sq(r1)) + cos(pair(2, 2))? * s1 * r1 * c2 * d2;
    admissible_table([[p11, p12], [p21, p22]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_transition_from_angles, epr_model};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, FRAC_PI_8, PI};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn uniform_transition() -> TransitionMatrix {
        build_transition_from_angles(FRAC_PI_4, FRAC_PI_4).unwrap()
    }

    #[test]
    fn classical_mixture_of_identical_tables() {
        let s = SettingDistribution::symmetric();
        let ctx = ContextTables::identical(ProbabilityTable::uniform());
        let out = classical_total_probability(&s, &ctx).unwrap();
        assert_eq!(out, ProbabilityTable::uniform());
    }

    #[test]
    fn classical_degenerate_mixture_returns_context() {
        let s = SettingDistribution::anticorrelated(1.0).unwrap();
        let q = ProbabilityTable::new([[0.1, 0.2], [0.3, 0.4]]).unwrap();
        let ctx = ContextTables::from_fn(|kl| if kl == SettingPair::ONE_TWO { q } else { ProbabilityTable::uniform() });
        assert_eq!(classical_total_probability(&s, &ctx).unwrap(), q);
    }

    #[test]
    fn classical_half_half_mixture() {
        let s = SettingDistribution::symmetric();
        let a = ProbabilityTable::new([[0.0, 0.5], [0.5, 0.0]]).unwrap();
        let b = ProbabilityTable::new([[0.5, 0.0], [0.0, 0.5]]).unwrap();
        let ctx = ContextTables::from_fn(|kl| if kl == SettingPair::ONE_TWO { a } else { b });
        let out = classical_total_probability(&s, &ctx).unwrap();
        assert_eq!(out, ProbabilityTable::uniform());
    }

    #[test]
    fn classical_rejects_unnormalized() {
        let s = SettingDistribution::from_raw([[0.0, 0.6], [0.6, 0.0]]);
        let ctx = ContextTables::identical(ProbabilityTable::uniform());
        assert!(matches!(classical_total_probability(&s, &ctx), Err(Error::Domain(_))));
    }

    #[test]
    fn product_tables() {
        let id = TransitionMatrix::identity();
        let t = product_context_table(&id, &id, SettingPair::ONE_TWO);
        assert_eq!(t, ProbabilityTable::indicator(OutcomePair::new(1, 2).unwrap()));

        let u = uniform_transition();
        let t = product_context_table(&u, &u, SettingPair::ONE_TWO);
        assert!(t.max_abs_diff(&ProbabilityTable::uniform()) < 1e-15);

        let t = TransitionMatrix::double_stochastic(FRAC_PI_6).unwrap();
        let tp = TransitionMatrix::double_stochastic(FRAC_PI_3).unwrap();
        let table = product_context_table(&t, &tp, SettingPair::ONE_TWO);
        assert!(close(table.get(OutcomePair::new(1, 1).unwrap()), 9.0 / 16.0, 1e-15));
    }

    #[test]
    fn disturbance_vanishes_for_classical_observation() {
        let m = epr_model(EprScenario::new(0.7, 1.9));
        let ctx = product_contexts(&m.transition, &m.transition_prime);
        let observed = classical_total_probability(&m.settings, &ctx).unwrap();
        let delta = disturbance_term(&observed, &m.settings, &ctx);
        assert!(delta.iter().flatten().all(|&d| d == 0.0));
    }

    #[test]
    fn epr_disturbance_and_lambda_at_equal_right_angles() {
        let m = epr_model(EprScenario::new(FRAC_PI_2, FRAC_PI_2));
        let ctx = product_contexts(&m.transition, &m.transition_prime);
        let observed = epr_probabilities(m.scenario.unwrap());
        let delta = disturbance_term(&observed, &m.settings, &ctx);
        assert!(close(delta[0][0], -0.25, 1e-15));
        assert!(close(delta[0][1], 0.25, 1e-15));
        assert!(close(delta.iter().flatten().sum::<f64>(), 0.0, 1e-15));
        let lambda = renormalize_disturbance(&delta, &m.settings, &m.transition, &m.transition_prime).unwrap();
        assert!(close(lambda[0][0], -1.0, 1e-12));
        assert!(close(lambda[0][1], 1.0, 1e-12));
    }

    #[test]
    fn zero_disturbance_gives_zero_lambda() {
        let t = uniform_transition();
        let s = SettingDistribution::symmetric();
        assert_eq!(renormalize_disturbance(&[[0.0; 2]; 2], &s, &t, &t).unwrap(), [[0.0; 2]; 2]);
    }

    #[test]
    fn singular_context_names_factor() {
        let s = SettingDistribution::symmetric();
        let err = renormalize_disturbance(&[[0.0; 2]; 2], &s, &TransitionMatrix::identity(), &uniform_transition())
            .unwrap_err();
        assert_eq!(err, Error::SingularContext { factor: "p_b/a(1/2)".into() });
        let s = SettingDistribution::anticorrelated(1.0).unwrap();
        let err = renormalize_disturbance(&[[0.0; 2]; 2], &s, &uniform_transition(), &uniform_transition())
            .unwrap_err();
        assert_eq!(err, Error::SingularContext { factor: "p_a(21)".into() });
    }

    #[test]
    fn apply_phases_examples() {
        // γ = 0, γ′ = π/2: Δ = π/2 → all 1/4
        let m = epr_model(EprScenario::new(0.0, FRAC_PI_2));
        let table = model_probabilities(&m).unwrap();
        assert!(table.max_abs_diff(&ProbabilityTable::uniform()) < 1e-15);

        // cos θ ≡ 0 at α = β = π/4: interference vanishes
        let t = uniform_transition();
        let phases = PhaseMatrix::all_trig(FRAC_PI_2).unwrap();
        let table = apply_phases(&SettingDistribution::symmetric(), &t, &t, &phases).unwrap();
        assert!(table.max_abs_diff(&ProbabilityTable::uniform()) < 1e-15);
    }

    #[test]
    fn apply_phases_rejects_constraint_violation() {
        let t = TransitionMatrix::double_stochastic(FRAC_PI_8).unwrap();
        let phases = PhaseMatrix::all_trig(0.0).unwrap();
        let err = apply_phases(&SettingDistribution::symmetric(), &t, &t, &phases).unwrap_err();
        assert!(matches!(err, Error::InadmissiblePhases { .. }), "{err:?}");
    }

    #[test]
    fn apply_phases_rejects_negative_entry() {
        // hyperbolic λ = −2 on 11 and λ = +2 on 12 keeps the sum but drives p(11) below zero
        let t = uniform_transition();
        let phases = PhaseMatrix::from_lambdas(&[[-2.0, 2.0], [2.0, -2.0]]);
        let err = apply_phases(&SettingDistribution::symmetric(), &t, &t, &phases).unwrap_err();
        match err {
            Error::InadmissiblePhases { entry, residual, .. } => {
                assert_eq!(entry, Some(OutcomePair::new(1, 1).unwrap()));
                assert!(close(residual, 0.25, 1e-15));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn epr_probability_examples() {
        let t = epr_probabilities(EprScenario::new(0.3, 0.3));
        assert_eq!(t.grid(), &[[0.0, 0.5], [0.5, 0.0]]);
        let t = epr_probabilities(EprScenario::new(0.0, FRAC_PI_2));
        assert!(t.max_abs_diff(&ProbabilityTable::uniform()) < 1e-15);
        let t = epr_probabilities(EprScenario::new(0.0, FRAC_PI_3));
        let expected = ProbabilityTable::from_raw([[0.125, 0.375], [0.375, 0.125]]);
        assert!(t.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn correlation_examples() {
        assert_eq!(correlation(&ProbabilityTable::uniform()), 0.0);
        assert_eq!(correlation(&epr_probabilities(EprScenario::new(1.0, 1.0))), -1.0);
        let e = correlation(&epr_probabilities(EprScenario::new(0.0, FRAC_PI_3)));
        assert!(close(e, -0.5, 1e-15));
    }

    #[test]
    fn chsh_examples() {
        assert!(close(chsh(0.4, 0.4, 0.4, 0.4), -2.0, 1e-15));
        let s = chsh(0.0, FRAC_PI_2, FRAC_PI_4, 3.0 * FRAC_PI_4);
        assert!(close(s, -2.0 * 2f64.sqrt(), 1e-12));
        assert!(close(chsh(1.1, 1.1, 1.1, 1.1), chsh(0.0, 0.0, 0.0, 0.0), 1e-15));
    }

    #[test]
    fn constraint_examples() {
        let c = phase_constraint_residual(&PhaseMatrix::epr_pattern(), FRAC_PI_8, FRAC_PI_8).unwrap();
        assert_eq!(c, ConstraintResidual { residual: 0.0, vacuous: false });
        let all_one = PhaseMatrix::all_trig(0.0).unwrap();
        let c = phase_constraint_residual(&all_one, FRAC_PI_4, FRAC_PI_4).unwrap();
        assert_eq!(c.residual, 4.0);
        assert!(phase_constraint_residual(&all_one, 0.0, FRAC_PI_4).unwrap().vacuous);
        assert!(phase_constraint_residual(&all_one, FRAC_PI_4, FRAC_PI_2).unwrap().vacuous);
        let hyp = PhaseMatrix::from_lambdas(&[[1.5, -1.0], [-1.0, 0.5]]);
        assert!(matches!(phase_constraint_residual(&hyp, 0.3, 0.3), Err(Error::Domain(_))));
    }

    #[test]
    fn reconstruct_examples() {
        let m = reconstruct_phases(&[[0.0, -1.0], [1.25, -1.25]]);
        assert_eq!(m.get(OutcomePair::new(1, 1).unwrap()), Phase::Trig { theta: FRAC_PI_2 });
        assert_eq!(m.get(OutcomePair::new(1, 2).unwrap()), Phase::Trig { theta: PI });
        match m.get(OutcomePair::new(2, 1).unwrap()) {
            Phase::Hyp { sign, theta } => {
                assert_eq!(sign, crate::model::Sign::Plus);
                // cosh(ln 2) = 5/4
                assert!(close(theta, 2f64.ln(), 1e-15));
            }
            other => panic!("{other:?}"),
        }
        assert!(close(m.lambda(OutcomePair::new(2, 2).unwrap()), -1.25, 1e-15));
    }

    #[test]
    fn general_stochastic_hand_value() {
        let t = build_transition_from_angles(FRAC_PI_6, FRAC_PI_3).unwrap();
        let tp = build_transition_from_angles(FRAC_PI_3, FRAC_PI_6).unwrap();
        // cos θ ≡ 0: no interference, so the table is admissible
        let phases = PhaseMatrix::all_trig(FRAC_PI_2).unwrap();
        let table = general_stochastic_probability(&SettingDistribution::symmetric(), &t, &tp, &phases).unwrap();
        assert!(close(table.get(OutcomePair::new(1, 1).unwrap()), 3.0 / 16.0, 1e-15));
        let via_roots = apply_phases(&SettingDistribution::symmetric(), &t, &tp, &phases).unwrap();
        assert!(table.max_abs_diff(&via_roots) < 1e-12);
    }

    #[test]
    fn general_stochastic_collapses_to_double_stochastic_form() {
        let (a, b) = (0.4, 1.1);
        let t = TransitionMatrix::double_stochastic(a).unwrap();
        let tp = TransitionMatrix::double_stochastic(b).unwrap();
        let phases = PhaseMatrix::epr_pattern();
        let table = general_stochastic_probability(&SettingDistribution::symmetric(), &t, &tp, &phases).unwrap();
        let p11 = 0.5 * (a - b).sin().powi(2);
        let p12 = 0.5 * (a.cos() * b.cos() + a.sin() * b.sin()).powi(2);
        assert!(close(table.get(OutcomePair::new(1, 1).unwrap()), p11, 1e-15));
        assert!(close(table.get(OutcomePair::new(1, 2).unwrap()), p12, 1e-15));
    }

    #[test]
    fn general_stochastic_requires_preconditions() {
        let t = uniform_transition();
        let s = SettingDistribution::anticorrelated(0.3).unwrap();
        assert!(general_stochastic_probability(&s, &t, &t, &PhaseMatrix::epr_pattern()).is_err());
        let bare = TransitionMatrix::new([[0.5, 0.5], [0.5, 0.5]]).unwrap();
        let sym = SettingDistribution::symmetric();
        assert!(general_stochastic_probability(&sym, &bare, &t, &PhaseMatrix::epr_pattern()).is_err());
        let hyp = PhaseMatrix::from_lambdas(&[[1.5, -1.0], [-1.0, 0.5]]);
        assert!(general_stochastic_probability(&sym, &t, &t, &hyp).is_err());
    }
}
