//! Columnar CSV export of ensembles and traces.
//!
//! Outcome columns hold indices (1 ↦ +1, 2 ↦ −1). Selected columns are empty
//! for elements that went through no selection.

use std::io::Write;

use crate::ensemble::{EnsembleKind, SampledEnsemble};
use crate::error::{Error, Result};
use crate::stabilization::FrequencyTrace;

pub const ENSEMBLE_HEADER: [&str; 8] = [
    "index",
    "a",
    "a_prime",
    "hidden_b",
    "hidden_b_prime",
    "selected_b",
    "selected_b_prime",
    "context",
];

pub const TRACE_HEADER: [&str; 3] = ["M", "frequency", "target"];

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Domain(format!("csv export failed: {e}"))
}

pub fn write_ensemble_csv<W: Write>(e: &SampledEnsemble, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ENSEMBLE_HEADER).map_err(io_err)?;
    let context = match e.kind() {
        EnsembleKind::Source => "source".to_string(),
        EnsembleKind::HiddenSub(kl) => format!("hidden:{kl}"),
        EnsembleKind::Selected(kl) => format!("selected:{kl}"),
    };
    for (n, el) in e.elements().iter().enumerate() {
        let (sel_b, sel_bp) = match el.selected_b {
            Some(b) => (b.i.index().to_string(), b.j.index().to_string()),
            None => (String::new(), String::new()),
        };
        w.write_record([
            n.to_string(),
            el.settings.k.index().to_string(),
            el.settings.l.index().to_string(),
            el.hidden_b.i.index().to_string(),
            el.hidden_b.j.index().to_string(),
            sel_b,
            sel_bp,
            context.clone(),
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)?;
    Ok(())
}

/// One row per checkpoint per trace; `format` renders the frequency.
pub fn write_traces_csv<W: Write>(
    traces: &[&FrequencyTrace],
    out: W,
    format: impl Fn(f64) -> String,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER).map_err(io_err)?;
    for trace in traces {
        for &(m, f) in trace.checkpoints() {
            w.write_record([m.to_string(), format(f), trace.target().to_string()])
                .map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)?;
    Ok(())
}
