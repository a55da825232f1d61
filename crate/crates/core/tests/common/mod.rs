#![allow(dead_code)]

use ctxprob::algebra::interference_root;
use ctxprob::{Grid, OutcomePair, PhaseMatrix, SettingDistribution, TransitionMatrix};
use rand::Rng;

/// Joint outcome probabilities of a spin singlet measured along directions
/// at angles γ, γ′ in one plane, from the state vector itself.
///
/// |ψ⟩ = (|↑↓⟩ − |↓↑⟩)/√2; the +1 eigenvector along γ is
/// (cos γ/2, sin γ/2), the −1 eigenvector (−sin γ/2, cos γ/2).
pub fn singlet_probabilities(gamma: f64, gamma_prime: f64) -> Grid {
    let psi = [0.0, 1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt(), 0.0];
    let eig = |g: f64, plus: bool| {
        let (c, s) = ((g / 2.0).cos(), (g / 2.0).sin());
        if plus {
            [c, s]
        } else {
            [-s, c]
        }
    };
    let mut out = [[0.0; 2]; 2];
    for (i, plus) in [true, false].into_iter().enumerate() {
        for (j, plus_p) in [true, false].into_iter().enumerate() {
            let u = eig(gamma, plus);
            let v = eig(gamma_prime, plus_p);
            let amp: f64 = (0..2)
                .flat_map(|x| (0..2).map(move |y| (x, y)))
                .map(|(x, y)| u[x] * v[y] * psi[2 * x + y])
                .sum();
            out[i][j] = amp * amp;
        }
    }
    out
}

/// A random anticorrelated trigonometric model with setting and transition
/// entries in [0.05, 0.95] whose phases satisfy Σ λ(ij) root(ij) = 0.
///
/// With |λ| ≤ 1 every entry stays nonnegative (the mixture term dominates
/// 2·root by AM-GM), so the constraint is the only admissibility condition.
pub fn random_trig_model<R: Rng>(rng: &mut R) -> (SettingDistribution, TransitionMatrix, TransitionMatrix, PhaseMatrix) {
    let mut draw = || rng.random_range(0.05..=0.95);
    let settings = SettingDistribution::anticorrelated(draw()).unwrap();
    let (u1, u2) = (draw(), draw());
    let (v1, v2) = (draw(), draw());
    let t = TransitionMatrix::new([[u1, u2], [1.0 - u1, 1.0 - u2]]).unwrap();
    let tp = TransitionMatrix::new([[v1, v2], [1.0 - v1, 1.0 - v2]]).unwrap();
    let lambdas: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let phases = constrained_phases(&settings, &t, &tp, [lambdas[0], lambdas[1], lambdas[2]]);
    (settings, t, tp, phases)
}

/// Completes λ₁₁, λ₁₂, λ₂₁ with the λ₂₂ that cancels the interference sum,
/// rescaling so that every |λ| ≤ 1.
pub fn constrained_phases(
    settings: &SettingDistribution,
    t: &TransitionMatrix,
    tp: &TransitionMatrix,
    free: [f64; 3],
) -> PhaseMatrix {
    let r: Vec<f64> = OutcomePair::ALL
        .iter()
        .map(|&ij| interference_root(settings, t, tp, ij))
        .collect();
    let mut l = [free[0], free[1], free[2], 0.0];
    l[3] = -(l[0] * r[0] + l[1] * r[1] + l[2] * r[2]) / r[3];
    if l[3].abs() > 1.0 {
        let scale = 1.0 / l[3].abs();
        for x in l.iter_mut().take(3) {
            *x *= scale;
        }
        l[3] = -(l[0] * r[0] + l[1] * r[1] + l[2] * r[2]) / r[3];
        l[3] = l[3].clamp(-1.0, 1.0);
    }
    PhaseMatrix::from_lambdas(&[[l[0], l[1]], [l[2], l[3]]])
}

/// Uniform 64-point grid over [0, 2π).
pub fn angle_grid(points: usize) -> Vec<f64> {
    (0..points)
        .map(|n| std::f64::consts::TAU * n as f64 / points as f64)
        .collect()
}
