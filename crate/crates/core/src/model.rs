//! Experiment specifications: setting distributions, transition matrices,
//! phase matrices and the assembled [`ContextualModel`].
//!
//! Constructors validate. Models read from JSON are taken as-is so that
//! [`validate_model`] can report what is wrong with them.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::algebra;
use crate::error::{domain, Error, Result};
use crate::index::{Grid, Outcome, OutcomePair, SettingPair};
use crate::tol;

/// Distribution p_a(kl) of the setting pair over the source ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SettingDistribution {
    p: Grid,
}

impl SettingDistribution {
    pub fn new(p: Grid) -> Result<Self> {
        let settings = SettingDistribution { p };
        settings.check()?;
        Ok(settings)
    }

    /// p_a(12) = q, p_a(21) = 1 − q, diagonal exactly zero.
    pub fn anticorrelated(q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(domain(format!("p_a(12) = {q} outside [0, 1]")));
        }
        Ok(SettingDistribution { p: [[0.0, q], [1.0 - q, 0.0]] })
    }

    /// p_a(12) = p_a(21) = 1/2.
    pub fn symmetric() -> Self {
        SettingDistribution { p: [[0.0, 0.5], [0.5, 0.0]] }
    }

    pub fn from_raw(p: Grid) -> Self {
        SettingDistribution { p }
    }

    pub fn check(&self) -> Result<()> {
        for kl in SettingPair::ALL {
            let v = self.get(kl);
            if !v.is_finite() || v < 0.0 {
                return Err(domain(format!("p_a({kl}) = {v} is negative or not finite")));
            }
        }
        if self.normalization_residual() > tol::ALGEBRA {
            return Err(domain(format!(
                "setting probabilities sum to {}",
                self.p.iter().flatten().sum::<f64>()
            )));
        }
        Ok(())
    }

    pub fn get(&self, kl: SettingPair) -> f64 {
        kl.at(&self.p)
    }

    pub fn grid(&self) -> &Grid {
        &self.p
    }

    pub fn normalization_residual(&self) -> f64 {
        (self.p.iter().flatten().sum::<f64>() - 1.0).abs()
    }

    /// Exact check: p_a(11) = p_a(22) = 0.
    pub fn is_anticorrelated(&self) -> bool {
        self.p[0][0] == 0.0 && self.p[1][1] == 0.0
    }

    /// Exact check: anticorrelated with p_a(12) = p_a(21) = 1/2.
    pub fn is_symmetric(&self) -> bool {
        self.is_anticorrelated() && self.p[0][1] == 0.5 && self.p[1][0] == 0.5
    }

    /// max(p_a(11), p_a(22)); the distance from anticorrelation.
    pub fn anticorrelation_residual(&self) -> f64 {
        self.p[0][0].abs().max(self.p[1][1].abs())
    }

    pub fn symmetry_residual(&self) -> f64 {
        self.anticorrelation_residual()
            .max((self.p[0][1] - 0.5).abs())
            .max((self.p[1][0] - 0.5).abs())
    }
}

/// Angle parametrization of a transition matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Parametrization {
    /// p(1/1) = cos²ξ₁, p(2/1) = sin²ξ₁, p(1/2) = sin²ξ₂, p(2/2) = cos²ξ₂.
    Stochastic { xi1: f64, xi2: f64 },
    /// ξ₁ = ξ₂ = α.
    DoubleStochastic { alpha: f64 },
}

impl Parametrization {
    pub fn xi(&self) -> (f64, f64) {
        match *self {
            Parametrization::Stochastic { xi1, xi2 } => (xi1, xi2),
            Parametrization::DoubleStochastic { alpha } => (alpha, alpha),
        }
    }

    fn entries(&self) -> Grid {
        let (xi1, xi2) = self.xi();
        [
            [xi1.cos().powi(2), xi2.sin().powi(2)],
            [xi1.sin().powi(2), xi2.cos().powi(2)],
        ]
    }
}

/// 2×2 transition matrix; entry (i, k) is p_{b/a}(i/k), the probability of
/// b = b_i inside the context a = a_k.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionMatrix {
    entries: Grid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parametrization: Option<Parametrization>,
}

fn check_half_angle(name: &str, xi: f64) -> Result<()> {
    if !(0.0..=FRAC_PI_2).contains(&xi) {
        return Err(domain(format!("{name} = {xi} outside [0, π/2]")));
    }
    Ok(())
}

/// Transition matrix from the ξ parametrization. Column-stochastic by
/// construction; flagged double stochastic when ξ₁ = ξ₂ within 1e-12.
pub fn build_transition_from_angles(xi1: f64, xi2: f64) -> Result<TransitionMatrix> {
    check_half_angle("xi1", xi1)?;
    check_half_angle("xi2", xi2)?;
    let parametrization = if (xi1 - xi2).abs() <= tol::ALGEBRA {
        Parametrization::DoubleStochastic { alpha: xi1 }
    } else {
        Parametrization::Stochastic { xi1, xi2 }
    };
    let mut entries = Parametrization::Stochastic { xi1, xi2 }.entries();
    // Columns summing to one exactly; cos² + sin² can be off by an ulp.
    entries[1][0] = 1.0 - entries[0][0];
    entries[0][1] = 1.0 - entries[1][1];
    Ok(TransitionMatrix { entries, parametrization: Some(parametrization) })
}

impl TransitionMatrix {
    pub fn new(entries: Grid) -> Result<Self> {
        let m = TransitionMatrix { entries, parametrization: None };
        m.check()?;
        Ok(m)
    }

    pub fn double_stochastic(alpha: f64) -> Result<Self> {
        build_transition_from_angles(alpha, alpha)
    }

    pub fn identity() -> Self {
        TransitionMatrix { entries: [[1.0, 0.0], [0.0, 1.0]], parametrization: None }
    }

    pub fn from_raw(entries: Grid, parametrization: Option<Parametrization>) -> Self {
        TransitionMatrix { entries, parametrization }
    }

    /// Nonnegative and column-stochastic within [`tol::ALGEBRA`].
    pub fn check(&self) -> Result<()> {
        for row in &self.entries {
            for &v in row {
                if !v.is_finite() || v < 0.0 {
                    return Err(domain(format!("transition entry {v} is negative or not finite")));
                }
            }
        }
        let residual = self.column_residual();
        if residual > tol::ALGEBRA {
            return Err(domain(format!("transition columns off stochastic by {residual:e}")));
        }
        Ok(())
    }

    /// p(i/k).
    pub fn get(&self, i: Outcome, k: Outcome) -> f64 {
        self.entries[i.slot()][k.slot()]
    }

    pub fn entries(&self) -> &Grid {
        &self.entries
    }

    pub fn parametrization(&self) -> Option<Parametrization> {
        self.parametrization
    }

    pub fn column_residual(&self) -> f64 {
        (0..2)
            .map(|k| (self.entries[0][k] + self.entries[1][k] - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn row_residual(&self) -> f64 {
        (0..2)
            .map(|i| (self.entries[i][0] + self.entries[i][1] - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_double_stochastic(&self) -> bool {
        self.column_residual() <= tol::ALGEBRA && self.row_residual() <= tol::ALGEBRA
    }

    /// Largest deviation between the stored entries and the ones implied by
    /// the parametrization; zero if unparametrized.
    pub fn parametrization_residual(&self) -> f64 {
        let Some(param) = self.parametrization else { return 0.0 };
        let (xi1, xi2) = param.xi();
        if !(0.0..=FRAC_PI_2).contains(&xi1) || !(0.0..=FRAC_PI_2).contains(&xi2) {
            return f64::INFINITY;
        }
        let implied = param.entries();
        implied
            .iter()
            .flatten()
            .zip(self.entries.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Phase attached to one outcome pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Phase {
    /// λ = cos θ, θ ∈ [0, 2π).
    Trig { theta: f64 },
    /// λ = ±cosh θ, θ > 0.
    Hyp { sign: Sign, theta: f64 },
}

impl Phase {
    pub fn trig(theta: f64) -> Result<Self> {
        let p = Phase::Trig { theta };
        p.check()?;
        Ok(p)
    }

    pub fn hyp(sign: Sign, theta: f64) -> Result<Self> {
        let p = Phase::Hyp { sign, theta };
        p.check()?;
        Ok(p)
    }

    /// |λ| ≤ 1 ↦ Trig(arccos λ); |λ| > 1 ↦ Hyp(sign λ, arccosh |λ|).
    pub fn from_lambda(lambda: f64) -> Self {
        if lambda.abs() <= 1.0 {
            Phase::Trig { theta: lambda.acos() }
        } else {
            let sign = if lambda > 0.0 { Sign::Plus } else { Sign::Minus };
            Phase::Hyp { sign, theta: lambda.abs().acosh() }
        }
    }

    /// cos θ or ±cosh θ. θ = π/2 (the value `from_lambda(0.0)` produces)
    /// gives exactly zero rather than cos's 6e-17.
    pub fn lambda(&self) -> f64 {
        match *self {
            Phase::Trig { theta } if theta == FRAC_PI_2 => 0.0,
            Phase::Trig { theta } => theta.cos(),
            Phase::Hyp { sign, theta } => sign.factor() * theta.cosh(),
        }
    }

    pub fn is_trig(&self) -> bool {
        matches!(self, Phase::Trig { .. })
    }

    pub fn check(&self) -> Result<()> {
        match *self {
            Phase::Trig { theta } if (0.0..TAU).contains(&theta) => Ok(()),
            Phase::Trig { theta } => Err(domain(format!("trigonometric phase {theta} outside [0, 2π)"))),
            Phase::Hyp { theta, .. } if theta > 0.0 && theta.is_finite() => Ok(()),
            Phase::Hyp { theta, .. } => Err(domain(format!("hyperbolic phase {theta} not in (0, ∞)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Trigonometric,
    Hyperbolic,
    Mixed,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::Trigonometric => "Trigonometric",
            Regime::Hyperbolic => "Hyperbolic",
            Regime::Mixed => "Mixed",
        };
        f.write_str(s)
    }
}

/// Phases θ(ij) for the four outcome pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PhaseMatrix {
    entries: [[Phase; 2]; 2],
}

impl PhaseMatrix {
    pub fn new(entries: [[Phase; 2]; 2]) -> Result<Self> {
        let m = PhaseMatrix { entries };
        m.check()?;
        Ok(m)
    }

    pub fn from_raw(entries: [[Phase; 2]; 2]) -> Self {
        PhaseMatrix { entries }
    }

    pub fn from_lambdas(lambda: &Grid) -> Self {
        PhaseMatrix {
            entries: lambda.map(|row| row.map(Phase::from_lambda)),
        }
    }

    /// cos θ₁₁ = cos θ₂₂ = −1, cos θ₁₂ = cos θ₂₁ = +1.
    pub fn epr_pattern() -> Self {
        let anti = Phase::Trig { theta: PI };
        let same = Phase::Trig { theta: 0.0 };
        PhaseMatrix { entries: [[anti, same], [same, anti]] }
    }

    /// The EPR pattern with every sign flipped.
    pub fn mirrored_epr_pattern() -> Self {
        let anti = Phase::Trig { theta: PI };
        let same = Phase::Trig { theta: 0.0 };
        PhaseMatrix { entries: [[same, anti], [anti, same]] }
    }

    pub fn all_trig(theta: f64) -> Result<Self> {
        let p = Phase::trig(theta)?;
        Ok(PhaseMatrix { entries: [[p; 2]; 2] })
    }

    pub fn check(&self) -> Result<()> {
        for ij in OutcomePair::ALL {
            self.get(ij).check().map_err(|e| domain(format!("phase {ij}: {e}")))?;
        }
        Ok(())
    }

    pub fn get(&self, ij: OutcomePair) -> Phase {
        self.entries[ij.i.slot()][ij.j.slot()]
    }

    pub fn lambda(&self, ij: OutcomePair) -> f64 {
        self.get(ij).lambda()
    }

    pub fn lambdas(&self) -> Grid {
        self.entries.map(|row| row.map(|p| p.lambda()))
    }

    pub fn regime(&self) -> Regime {
        let trig = OutcomePair::ALL.iter().filter(|&&ij| self.get(ij).is_trig()).count();
        match trig {
            4 => Regime::Trigonometric,
            0 => Regime::Hyperbolic,
            _ => Regime::Mixed,
        }
    }
}

/// Analyzer directions γ, γ′ (radians) of an EPR-Bohm experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EprScenario {
    pub gamma: f64,
    pub gamma_prime: f64,
}

impl EprScenario {
    pub fn new(gamma: f64, gamma_prime: f64) -> Self {
        EprScenario { gamma, gamma_prime }
    }

    /// α = γ/2.
    pub fn alpha(&self) -> f64 {
        self.gamma / 2.0
    }

    /// β = γ′/2.
    pub fn beta(&self) -> f64 {
        self.gamma_prime / 2.0
    }

    /// γ′ − γ.
    pub fn delta(&self) -> f64 {
        self.gamma_prime - self.gamma
    }

    /// (γ mod 2π, γ′ mod 2π).
    pub fn reduced(&self) -> (f64, f64) {
        (self.gamma.rem_euclid(TAU), self.gamma_prime.rem_euclid(TAU))
    }
}

/// Full specification of a composite-system experiment. Outcome
/// independence (factorized contexts) is assumed throughout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContextualModel {
    pub settings: SettingDistribution,
    pub transition: TransitionMatrix,
    pub transition_prime: TransitionMatrix,
    pub phases: PhaseMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<EprScenario>,
}

#[derive(Serialize)]
struct ModelDocumentOut<'a> {
    schema_version: u32,
    #[serde(flatten)]
    model: &'a ContextualModel,
}

pub const MODEL_SCHEMA_VERSION: u32 = 1;

impl ContextualModel {
    pub fn new(
        settings: SettingDistribution,
        transition: TransitionMatrix,
        transition_prime: TransitionMatrix,
        phases: PhaseMatrix,
    ) -> Result<Self> {
        settings.check()?;
        transition.check()?;
        transition_prime.check()?;
        phases.check()?;
        Ok(ContextualModel { settings, transition, transition_prime, phases, scenario: None })
    }

    pub fn with_phases(&self, phases: PhaseMatrix) -> Self {
        ContextualModel { phases, ..*self }
    }

    /// Parses a model document without validating it.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let doc = ModelDocumentOut { schema_version: MODEL_SCHEMA_VERSION, model: self };
        serde_json::to_string_pretty(&doc).expect("model serializes")
    }
}

/// Folds an analyzer angle into [0, π]; reports whether it was reflected.
/// γ and 2π − γ give the same transition matrix.
fn fold_analyzer(gamma: f64) -> (f64, bool) {
    let g = gamma.rem_euclid(TAU);
    if g > PI {
        (TAU - g, true)
    } else {
        (g, false)
    }
}

/// The EPR-Bohm model of a scenario: symmetric settings, double stochastic
/// matrices from α = γ/2 and β = γ′/2, maximal-magnitude phases.
///
/// Angles are folded into [0, π] so that α, β ∈ [0, π/2]. If exactly one
/// analyzer was reflected the interference sign flips, so the mirrored
/// pattern is used.
pub fn epr_model(s: EprScenario) -> ContextualModel {
    let (g, flip_g) = fold_analyzer(s.gamma);
    let (gp, flip_gp) = fold_analyzer(s.gamma_prime);
    let alpha = (g / 2.0).min(FRAC_PI_2);
    let beta = (gp / 2.0).min(FRAC_PI_2);
    let phases = if flip_g == flip_gp {
        PhaseMatrix::epr_pattern()
    } else {
        PhaseMatrix::mirrored_epr_pattern()
    };
    ContextualModel {
        settings: SettingDistribution::symmetric(),
        transition: TransitionMatrix::double_stochastic(alpha).expect("folded angle in range"),
        transition_prime: TransitionMatrix::double_stochastic(beta).expect("folded angle in range"),
        phases,
        scenario: Some(s),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub residual: f64,
    /// Informational checks do not affect [`ValidationReport::passed`].
    pub required: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EprOrientation {
    Direct,
    Mirrored,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub regime: Regime,
    pub epr_admissible: bool,
    pub epr_orientation: Option<EprOrientation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().filter(|c| c.required).all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.required && !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn within(name: &'static str, residual: f64, tolerance: f64, required: bool) -> Check {
    Check { name, passed: residual <= tolerance, residual, required }
}

fn negativity(grid: &Grid) -> f64 {
    grid.iter().flatten().fold(0.0, |acc: f64, &v| if v.is_nan() { f64::INFINITY } else { acc.max(-v) })
}

fn epr_orientation(m: &ContextualModel) -> Option<EprOrientation> {
    let lambdas = m.phases.lambdas();
    let close = |pattern: &Grid| {
        (0..2).all(|i| (0..2).all(|j| (lambdas[i][j] - pattern[i][j]).abs() <= tol::ALGEBRA))
    };
    if close(&[[-1.0, 1.0], [1.0, -1.0]]) {
        Some(EprOrientation::Direct)
    } else if close(&[[1.0, -1.0], [-1.0, 1.0]]) {
        Some(EprOrientation::Mirrored)
    } else {
        None
    }
}

const TRANSITION_CHECKS: [[&str; 4]; 2] = [
    [
        "transition.nonnegative",
        "transition.column_stochastic",
        "transition.parametrization",
        "transition.double_stochastic",
    ],
    [
        "transition_prime.nonnegative",
        "transition_prime.column_stochastic",
        "transition_prime.parametrization",
        "transition_prime.double_stochastic",
    ],
];

/// Checks every model invariant and reports residuals. Never fails.
pub fn validate_model(m: &ContextualModel) -> ValidationReport {
    let mut checks = Vec::new();
    let s = &m.settings;
    checks.push(within("settings.nonnegative", negativity(s.grid()), 0.0, true));
    checks.push(within("settings.normalized", s.normalization_residual(), tol::ALGEBRA, true));
    checks.push(within("settings.anticorrelated", s.anticorrelation_residual(), tol::ALGEBRA, true));
    checks.push(within("settings.symmetric", s.symmetry_residual(), tol::ALGEBRA, false));

    for (names, t) in TRANSITION_CHECKS.iter().zip([&m.transition, &m.transition_prime]) {
        checks.push(within(names[0], negativity(t.entries()), 0.0, true));
        checks.push(within(names[1], t.column_residual(), tol::ALGEBRA, true));
        checks.push(within(names[2], t.parametrization_residual(), tol::ALGEBRA, true));
        checks.push(within(names[3], t.row_residual().max(t.column_residual()), tol::ALGEBRA, false));
    }

    let well_formed = OutcomePair::ALL.iter().all(|&ij| {
        let p = m.phases.get(ij);
        p.check().is_ok()
            && match p {
                Phase::Trig { .. } => p.lambda().abs() <= 1.0,
                Phase::Hyp { .. } => p.lambda().abs() > 1.0,
            }
    });
    checks.push(Check {
        name: "phases.well_formed",
        passed: well_formed,
        residual: if well_formed { 0.0 } else { 1.0 },
        required: true,
    });

    let raw = algebra::phase_transform_raw(s, &m.transition, &m.transition_prime, &m.phases);
    let sum: f64 = raw.iter().flatten().sum();
    let over = raw.iter().flatten().fold(0.0, |acc: f64, &v| acc.max(v - 1.0));
    let admissibility_residual = negativity(&raw).max(over).max((sum - 1.0).abs());
    checks.push(within("phases.admissible", admissibility_residual, tol::ALGEBRA, true));

    let regime = m.phases.regime();
    let double = m.transition.is_double_stochastic() && m.transition_prime.is_double_stochastic();
    if double && regime == Regime::Trigonometric {
        let alpha = m.transition.parametrization().map(|p| p.xi().0);
        let beta = m.transition_prime.parametrization().map(|p| p.xi().0);
        if let (Some(alpha), Some(beta)) = (alpha, beta) {
            if let Ok(c) = algebra::phase_constraint_residual(&m.phases, alpha, beta) {
                checks.push(within("phases.constraint", c.residual.abs(), tol::CONDITIONING, false));
            }
        }
    }

    let orientation = epr_orientation(m);
    let epr_admissible = s.symmetry_residual() <= tol::ALGEBRA
        && double
        && orientation.is_some()
        && checks.iter().filter(|c| c.required).all(|c| c.passed);

    ValidationReport {
        checks,
        regime,
        epr_admissible,
        epr_orientation: if epr_admissible { orientation } else { None },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, FRAC_PI_8};

    fn assert_grid(actual: &Grid, expected: &Grid, tol: f64) {
        for i in 0..2 {
            for j in 0..2 {
                assert!(
                    (actual[i][j] - expected[i][j]).abs() <= tol,
                    "entry ({i},{j}): {} vs {}",
                    actual[i][j],
                    expected[i][j]
                );
            }
        }
    }

    #[test]
    fn transition_from_zero_angles_is_identity() {
        let t = build_transition_from_angles(0.0, 0.0).unwrap();
        assert_eq!(t.entries(), &[[1.0, 0.0], [0.0, 1.0]]);
        assert!(t.is_double_stochastic());
    }

    #[test]
    fn transition_at_quarter_pi_is_uniform() {
        let t = build_transition_from_angles(FRAC_PI_4, FRAC_PI_4).unwrap();
        assert_grid(t.entries(), &[[0.5, 0.5], [0.5, 0.5]], 1e-15);
        assert!(t.is_double_stochastic());
        assert!(matches!(t.parametrization(), Some(Parametrization::DoubleStochastic { .. })));
    }

    #[test]
    fn transition_stochastic_not_double() {
        // cos²(π/6) = 3/4, sin²(π/6) = 1/4, sin²(π/3) = 3/4, cos²(π/3) = 1/4
        let t = build_transition_from_angles(FRAC_PI_6, FRAC_PI_3).unwrap();
        assert_grid(t.entries(), &[[0.75, 0.75], [0.25, 0.25]], 1e-15);
        assert!(t.column_residual() <= 1e-15);
        assert!(!t.is_double_stochastic());
        assert!(matches!(t.parametrization(), Some(Parametrization::Stochastic { .. })));
    }

    #[test]
    fn transition_rejects_out_of_range_angles() {
        assert!(matches!(build_transition_from_angles(-0.1, 0.0), Err(Error::Domain(_))));
        assert!(matches!(build_transition_from_angles(0.0, FRAC_PI_2 + 1e-9), Err(Error::Domain(_))));
    }

    #[test]
    fn epr_model_examples() {
        let m = epr_model(EprScenario::new(0.0, 0.0));
        assert_eq!(m.transition.entries(), &[[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(m.phases, PhaseMatrix::epr_pattern());

        let m = epr_model(EprScenario::new(FRAC_PI_2, FRAC_PI_2));
        assert_grid(m.transition.entries(), &[[0.5; 2]; 2], 1e-15);
        assert_grid(m.transition_prime.entries(), &[[0.5; 2]; 2], 1e-15);

        let m = epr_model(EprScenario::new(FRAC_PI_3, 2.0 * FRAC_PI_3));
        assert_grid(m.transition.entries(), &[[0.75, 0.25], [0.25, 0.75]], 1e-15);
        assert_grid(m.transition_prime.entries(), &[[0.25, 0.75], [0.75, 0.25]], 1e-15);
        assert!(m.transition.is_double_stochastic() && m.transition_prime.is_double_stochastic());
    }

    #[test]
    fn epr_model_is_admissible() {
        let report = validate_model(&epr_model(EprScenario::new(FRAC_PI_4, FRAC_PI_4)));
        assert!(report.passed(), "{report:?}");
        assert!(report.epr_admissible);
        assert_eq!(report.epr_orientation, Some(EprOrientation::Direct));
        assert_eq!(report.regime, Regime::Trigonometric);
    }

    #[test]
    fn epr_model_reflects_across_pi() {
        let m = epr_model(EprScenario::new(FRAC_PI_2, 3.0 * FRAC_PI_2));
        assert_eq!(m.phases, PhaseMatrix::mirrored_epr_pattern());
        let report = validate_model(&m);
        assert!(report.epr_admissible);
        assert_eq!(report.epr_orientation, Some(EprOrientation::Mirrored));
    }

    #[test]
    fn validation_flags_anticorrelation_violation() {
        let mut m = epr_model(EprScenario::new(FRAC_PI_8 * 2.0, FRAC_PI_8 * 2.0));
        m.settings = SettingDistribution::from_raw([[0.1, 0.4], [0.5, 0.0]]);
        let report = validate_model(&m);
        let c = report.check("settings.anticorrelated").unwrap();
        assert!(!c.passed);
        assert!((c.residual - 0.1).abs() < 1e-15);
        assert!(!report.passed());
        assert!(!report.epr_admissible);
    }

    #[test]
    fn validation_flags_column_sum() {
        let mut m = epr_model(EprScenario::new(FRAC_PI_4, FRAC_PI_4));
        m.transition = TransitionMatrix::from_raw([[0.52, 0.5], [0.5, 0.52]], None);
        let report = validate_model(&m);
        let c = report.check("transition.column_stochastic").unwrap();
        assert!(!c.passed);
        assert!((c.residual - 0.02).abs() < 1e-12);
    }

    #[test]
    fn phase_classification_boundary_is_trig() {
        assert!(Phase::from_lambda(1.0).is_trig());
        assert!(Phase::from_lambda(-1.0).is_trig());
        assert!(!Phase::from_lambda(1.0 + 1e-15 * 4.0).is_trig());
        let m = PhaseMatrix::from_lambdas(&[[0.5, 1.5], [0.0, -2.0]]);
        assert_eq!(m.regime(), Regime::Mixed);
        let m = PhaseMatrix::from_lambdas(&[[1.5, 1.5], [-3.0, -2.0]]);
        assert_eq!(m.regime(), Regime::Hyperbolic);
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let mut m = epr_model(EprScenario::new(0.1234567890123, 2.2360679774997));
        m.phases = PhaseMatrix::from_lambdas(&[[0.3, -0.7], [1.3, -1.0000001]]);
        let back = ContextualModel::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn truncated_json_is_a_parse_error() {
        let text = epr_model(EprScenario::new(0.0, 1.0)).to_json();
        assert!(matches!(ContextualModel::from_json(&text[..text.len() / 2]), Err(Error::Parse(_))));
    }
}
