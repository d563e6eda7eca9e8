//! α sweeps and their CSV form.
//!
//! Columns: alpha, gain, fidelity, Vx, Vp, VxVp, P_AB, P_tele, P_tot,
//! benchmark_det, error. Numbers are written as `{:.16e}`; a quantity that
//! does not apply (or is NaN) is an empty field. A point whose model call
//! fails keeps its row with the message in `error`.

use std::io::Write;

use num_complex::Complex;
use rayon::prelude::*;
use teleamp_core::Metrics;

use crate::config::RunConfig;
use crate::error::Result;
use crate::models::Evaluator;

pub const COLUMNS: [&str; 11] = [
    "alpha",
    "gain",
    "fidelity",
    "Vx",
    "Vp",
    "VxVp",
    "P_AB",
    "P_tele",
    "P_tot",
    "benchmark_det",
    "error",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub alpha: f64,
    pub outcome: std::result::Result<Metrics<f64>, String>,
}

impl Row {
    pub fn metrics(&self) -> Option<&Metrics<f64>> {
        self.outcome.as_ref().ok()
    }

    fn fields(&self) -> Vec<String> {
        let mut out = vec![num(self.alpha)];
        match &self.outcome {
            Ok(m) => {
                out.extend([m.gain, m.fidelity, m.v_x, m.v_p, m.uncertainty_product()].map(num));
                out.extend([m.p_ab, m.p_tele, m.p_tot].map(|p| p.map_or_else(String::new, num)));
                out.push(num(m.deterministic_benchmark()));
                out.push(String::new());
            }
            Err(e) => {
                out.extend(std::iter::repeat_n(String::new(), 9));
                out.push(e.clone());
            }
        }
        out
    }
}

pub(crate) fn num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x:.16e}")
    }
}

/// Evaluates every grid point; rows come back in grid order.
pub fn run_sweep(cfg: &RunConfig) -> Result<Vec<Row>> {
    let alphas = cfg.alphas()?;
    let eval = Evaluator::prepare(cfg)?;
    let target = cfg.fidelity_target();
    let phase = cfg.sweep.as_ref().map_or(0.0, |s| s.phase);
    Ok(alphas
        .par_iter()
        .map(|&a| Row {
            alpha: a,
            outcome: eval
                .point(Complex::from_polar(a, phase), target)
                .map_err(|e| e.to_string()),
        })
        .collect())
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for r in rows {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}
