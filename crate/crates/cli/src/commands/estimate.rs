use serde::Serialize;
use sonarknot::{
    estimate_degree_of_angles, knot_from_spectrum, phase_pullback_knot, render_target_tori,
    spectral_support, KnotType, SpectrumKnot,
};

use crate::cli::{EstimateArgs, GlobalOpts, Mode};
use crate::config::{EstimatorSpec, ExperimentConfig};
use crate::exit::{CliError, CliResult};
use crate::io::{read_first_column, read_signature};

use super::emit_report;

#[derive(Debug, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
enum Report {
    Degree {
        samples: usize,
        degree: i64,
    },
    Spectrum {
        freq_index: usize,
        threshold: f64,
        bins: Vec<i64>,
        /// Generators of the occupied progressions; `null` when only the
        /// constant bin is occupied.
        folds: Option<Vec<u64>>,
        knot: Option<KnotType>,
    },
    Pullback {
        target: String,
        grid: usize,
        knot: KnotType,
        expected_knot: Option<KnotType>,
        windings: (i64, i64),
        max_residual: f64,
        rms_residual: f64,
        tolerance: f64,
    },
}

pub fn run(g: &GlobalOpts, args: &EstimateArgs) -> CliResult<()> {
    let report = match args.mode {
        Mode::Degree => {
            let samples = read_first_column(&args.file)?;
            Report::Degree {
                samples: samples.len(),
                degree: estimate_degree_of_angles(&samples)?,
            }
        }
        Mode::Spectrum => {
            let sig = read_signature(&args.file)?;
            let support = spectral_support(&sig, args.freq_index, args.threshold)?;
            let (folds, knot) = if support.bins.iter().all(|&b| b == 0) {
                (None, None)
            } else {
                let found = knot_from_spectrum(&support)?;
                let knot = match found {
                    SpectrumKnot::Pair(k) => Some(k),
                    SpectrumKnot::Single(_) => None,
                };
                (Some(found.generators()), knot)
            };
            Report::Spectrum {
                freq_index: args.freq_index,
                threshold: args.threshold,
                bins: support.bins.into_iter().collect(),
                folds,
                knot,
            }
        }
        Mode::Pullback => {
            let sig = read_signature(&args.file)?;
            let (name, target, geom, estimator) = match &args.reference {
                Some(path) => {
                    let cfg = ExperimentConfig::load(path)?;
                    let spec = cfg.target(args.target.as_deref())?;
                    (spec.name.clone(), spec.model()?, cfg.geometry()?, cfg.estimator)
                }
                None => {
                    if args.target.is_some() {
                        return Err(CliError::config("--target needs --reference"));
                    }
                    let target = sig.meta.target.clone().ok_or_else(|| {
                        CliError::config(format!(
                            "{}: sidecar records no target; pass --reference",
                            args.file.display()
                        ))
                    })?;
                    let name = sig.meta.description.clone().unwrap_or_else(|| "recorded".into());
                    (name, target, sig.meta.geometry.unwrap_or_default(), EstimatorSpec::default())
                }
            };
            let expected_knot = target
                .knot_folds()
                .and_then(|(p, q)| KnotType::new(p as i64, q as i64).ok());
            let tori = render_target_tori(&target, &geom, sig.frequencies(), (args.grid, args.grid))?;
            let res = phase_pullback_knot(&sig, &tori, &estimator.pullback(g.tol))?;
            Report::Pullback {
                target: name,
                grid: args.grid,
                knot: res.knot,
                expected_knot,
                windings: res.windings,
                max_residual: res.max_residual,
                rms_residual: res.rms_residual,
                tolerance: res.tolerance,
            }
        }
    };
    emit_report(g, &report)
}
