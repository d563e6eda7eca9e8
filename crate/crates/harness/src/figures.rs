//! Figure datasets: one long-format CSV per panel, `fig<id>_<panel>.csv`,
//! with columns `series,alpha,quantity,value`.
//!
//! | panel       | quantities            |
//! |-------------|-----------------------|
//! | gain        | gain                  |
//! | fidelity    | fidelity              |
//! | variances   | Vx, Vp                |
//! | uncertainty | VxVp, benchmark_det   |
//! | p_tele      | P_tele                |
//! | p_tot       | P_tot                 |

use std::path::{Path, PathBuf};

use serde::Deserialize;
use teleamp_core::Metrics;

use crate::config::{ModelSection, ParamsSection, RunConfig, SolveSection, SweepSection};
use crate::error::{config, Result};
use crate::sweep::{num, run_sweep, Row};

pub const FIG4: &str = include_str!("../configs/fig4.toml");
pub const FIG5: &str = include_str!("../configs/fig5.toml");
pub const FIG6: &str = include_str!("../configs/fig6.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Panel {
    Gain,
    Fidelity,
    Variances,
    Uncertainty,
    PTele,
    PTot,
}

impl Panel {
    pub fn name(self) -> &'static str {
        match self {
            Panel::Gain => "gain",
            Panel::Fidelity => "fidelity",
            Panel::Variances => "variances",
            Panel::Uncertainty => "uncertainty",
            Panel::PTele => "p_tele",
            Panel::PTot => "p_tot",
        }
    }

    fn quantities(self, m: &Metrics<f64>) -> Vec<(&'static str, Option<f64>)> {
        match self {
            Panel::Gain => vec![("gain", Some(m.gain))],
            Panel::Fidelity => vec![("fidelity", Some(m.fidelity))],
            Panel::Variances => vec![("Vx", Some(m.v_x)), ("Vp", Some(m.v_p))],
            Panel::Uncertainty => vec![
                ("VxVp", Some(m.uncertainty_product())),
                ("benchmark_det", Some(m.deterministic_benchmark())),
            ],
            Panel::PTele => vec![("P_tele", m.p_tele)],
            Panel::PTot => vec![("P_tot", m.p_tot)],
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct FigureSection {
    id: u32,
    panels: Vec<Panel>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeriesConfig {
    name: String,
    model: ModelSection,
    params: ParamsSection,
    sweep: SweepSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct FigureFile {
    figure: FigureSection,
    series: Vec<SeriesConfig>,
}

#[derive(Debug, Clone)]
pub struct FigureSpec {
    pub id: u32,
    pub panels: Vec<Panel>,
    pub series: Vec<(String, RunConfig)>,
}

impl FigureSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let f: FigureFile = toml::from_str(text).map_err(|e| config(e.to_string()))?;
        let mut series = Vec::with_capacity(f.series.len());
        for s in f.series {
            let cfg = RunConfig {
                model: s.model,
                params: s.params,
                sweep: Some(s.sweep),
                solve: SolveSection::default(),
            };
            cfg.check()?;
            series.push((s.name, cfg));
        }
        Ok(Self {
            id: f.figure.id,
            panels: f.figure.panels,
            series,
        })
    }

    pub fn builtin(id: u32) -> Result<Self> {
        let text = match id {
            4 => FIG4,
            5 => FIG5,
            6 => FIG6,
            _ => return Err(config(format!("no figure {id}; choose 4, 5 or 6"))),
        };
        Self::from_toml(text)
    }

    /// Runs every series and writes one CSV per panel into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let runs: Vec<(&str, Vec<Row>)> = self
            .series
            .iter()
            .map(|(name, cfg)| Ok((name.as_str(), run_sweep(cfg)?)))
            .collect::<Result<_>>()?;
        let mut paths = Vec::new();
        for &panel in &self.panels {
            let path = dir.join(format!("fig{}_{}.csv", self.id, panel.name()));
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(["series", "alpha", "quantity", "value"])?;
            for (name, rows) in &runs {
                for row in rows {
                    let Some(m) = row.metrics() else { continue };
                    for (q, v) in panel.quantities(m) {
                        let value = v.map_or_else(String::new, num);
                        w.write_record([name, num(row.alpha).as_str(), q, value.as_str()])?;
                    }
                }
            }
            w.flush()?;
            paths.push(path);
        }
        Ok(paths)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_specs_parse() {
        for id in [4, 5, 6] {
            let f = FigureSpec::builtin(id).unwrap();
            assert_eq!(f.id, id);
            assert_eq!(f.series.len(), 2);
        }
        assert_eq!(FigureSpec::builtin(6).unwrap().panels.len(), 6);
        assert!(FigureSpec::builtin(7).is_err());
    }
}
