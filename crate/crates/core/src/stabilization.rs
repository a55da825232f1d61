//! Frequency traces at dyadic checkpoints and the statistical-stabilization
//! verdict.

use serde::Serialize;

use crate::error::{domain, Result};

/// First dyadic checkpoint is 2^6.
pub const FIRST_CHECKPOINT_EXP: u32 = 6;

/// 2^6, 2^7, … up to `max`; `max` itself is appended when it is not dyadic.
pub fn dyadic_checkpoints(max: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut m = 1u64 << FIRST_CHECKPOINT_EXP;
    while m <= max {
        out.push(m);
        m = match m.checked_mul(2) {
            Some(next) => next,
            None => break,
        };
    }
    if out.last() != Some(&max) && max > 0 {
        out.push(max);
    }
    out
}

/// Relative frequency of one event as the ensemble grows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyTrace {
    target: String,
    checkpoints: Vec<(u64, f64)>,
}

impl FrequencyTrace {
    pub fn new(target: impl Into<String>, checkpoints: Vec<(u64, f64)>) -> Result<Self> {
        for w in checkpoints.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(domain("trace checkpoints must be strictly increasing"));
            }
        }
        if let Some(&(m, f)) = checkpoints.iter().find(|(_, f)| !(0.0..=1.0).contains(f)) {
            return Err(domain(format!("frequency {f} at M = {m} outside [0, 1]")));
        }
        Ok(FrequencyTrace { target: target.into(), checkpoints })
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn checkpoints(&self) -> &[(u64, f64)] {
        &self.checkpoints
    }

    pub fn last(&self) -> Option<f64> {
        self.checkpoints.last().map(|&(_, f)| f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "verdict")]
pub enum Verdict {
    Stabilizes { limit: f64 },
    Fluctuates { low: f64, high: f64 },
}

impl Verdict {
    pub fn is_stable(&self) -> bool {
        matches!(self, Verdict::Stabilizes { .. })
    }

    /// Width of the oscillation band; zero when stable.
    pub fn band_width(&self) -> f64 {
        match *self {
            Verdict::Stabilizes { .. } => 0.0,
            Verdict::Fluctuates { low, high } => high - low,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Stabilizes { .. } => "Stabilizes",
            Verdict::Fluctuates { .. } => "Fluctuates",
        }
    }
}

/// Tolerance ε on successive checkpoint differences over a tail window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilizationCriterion {
    pub epsilon: f64,
    pub window: usize,
}

impl Default for StabilizationCriterion {
    fn default() -> Self {
        StabilizationCriterion { epsilon: 0.01, window: 3 }
    }
}

impl StabilizationCriterion {
    pub fn judge(&self, trace: &FrequencyTrace) -> Result<Verdict> {
        stabilization_test(trace, self.epsilon, self.window)
    }
}

/// Stabilizes when the last `window` successive differences are all below
/// `epsilon` in magnitude; otherwise Fluctuates with the min/max over the
/// last `window + 1` checkpoints.
pub fn stabilization_test(trace: &FrequencyTrace, epsilon: f64, window: usize) -> Result<Verdict> {
    let points = trace.checkpoints();
    if window == 0 || points.len() < window + 1 {
        return Err(domain(format!(
            "trace '{}' has {} checkpoints; window {window} needs at least {}",
            trace.target(),
            points.len(),
            window + 1
        )));
    }
    let tail = &points[points.len() - window - 1..];
    let steady = tail.windows(2).all(|w| (w[1].1 - w[0].1).abs() < epsilon);
    if steady {
        return Ok(Verdict::Stabilizes { limit: tail[window].1 });
    }
    let low = tail.iter().map(|&(_, f)| f).fold(f64::INFINITY, f64::min);
    let high = tail.iter().map(|&(_, f)| f).fold(f64::NEG_INFINITY, f64::max);
    Ok(Verdict::Fluctuates { low, high })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand::Rng;

    fn trace(values: &[f64]) -> FrequencyTrace {
        let points = values.iter().enumerate().map(|(t, &f)| (64u64 << t, f)).collect();
        FrequencyTrace::new("x", points).unwrap()
    }

    #[test]
    fn checkpoints_are_dyadic() {
        assert_eq!(dyadic_checkpoints(512), vec![64, 128, 256, 512]);
        assert_eq!(dyadic_checkpoints(300), vec![64, 128, 256, 300]);
        assert_eq!(dyadic_checkpoints(10), vec![10]);
    }

    #[test]
    fn constant_trace_stabilizes() {
        let v = stabilization_test(&trace(&[0.3; 6]), 0.01, 3).unwrap();
        assert_eq!(v, Verdict::Stabilizes { limit: 0.3 });
    }

    #[test]
    fn alternating_trace_fluctuates() {
        let v = stabilization_test(&trace(&[0.3, 0.1, 0.3, 0.1, 0.3, 0.1]), 0.01, 3).unwrap();
        assert_eq!(v, Verdict::Fluctuates { low: 0.1, high: 0.3 });
    }

    #[test]
    fn too_short_trace_is_rejected() {
        assert!(stabilization_test(&trace(&[0.3, 0.3, 0.3]), 0.01, 3).is_err());
    }

    #[test]
    fn invalid_traces_rejected() {
        assert!(FrequencyTrace::new("x", vec![(64, 0.1), (64, 0.2)]).is_err());
        assert!(FrequencyTrace::new("x", vec![(64, 1.1)]).is_err());
    }

    #[test]
    fn bernoulli_half_stabilizes() {
        let max = 1u64 << 20;
        let checkpoints = dyadic_checkpoints(max);
        let mut rng = stream_rng(2024, 0);
        let mut hits = 0u64;
        let mut points = Vec::new();
        let mut next = checkpoints.iter().peekable();
        for n in 1..=max {
            if rng.random::<bool>() {
                hits += 1;
            }
            if next.peek() == Some(&&n) {
                points.push((n, hits as f64 / n as f64));
                next.next();
            }
        }
        let v = stabilization_test(&FrequencyTrace::new("heads", points).unwrap(), 0.01, 3).unwrap();
        match v {
            Verdict::Stabilizes { limit } => assert!((limit - 0.5).abs() < 0.01),
            other => panic!("{other:?}"),
        }
    }
}
