//! Ranking a measured signature against a dictionary of candidate targets.
//!
//! Targets whose knot types differ cannot be related by any trajectory
//! distortion, so the knot comparison dominates; among knot matches the
//! image-set distance decides.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::factorization::{quasip_classes_circle, quasip_classes_torus, KnotType, QuasiPClassSet};
use crate::scalar::Scalar;
use crate::signal::{render_signature, render_target_tori, uniform_angles, Geometry, Signature, SignatureMeta, TargetModel};

use super::image::image_hausdorff;
use super::pullback::{phase_pullback_knot, PullbackOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Candidate<T: Scalar = f64> {
    pub name: String,
    pub target: TargetModel<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions<T: Scalar = f64> {
    pub torus_grid: (usize, usize),
    pub pullback: PullbackOptions<T>,
}

impl<T: Scalar> Default for ClassifyOptions<T> {
    fn default() -> Self {
        Self {
            torus_grid: (256, 256),
            pullback: PullbackOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateReport {
    pub name: String,
    /// Knot recovered by pulling the measurement back to this candidate's
    /// torus; `null` when that failed or the candidate has no torus.
    pub knot: Option<KnotType>,
    pub expected_knot: Option<KnotType>,
    pub knot_match: bool,
    pub hausdorff: Option<f64>,
    /// RMS distance of the measured echoes from the candidate's torus surface
    /// along the recovered path. Independent of the relative intercept, so a
    /// pure change of relative angle scores near zero.
    pub torus_rms: Option<f64>,
    pub quasip_classes: Option<QuasiPClassSet>,
    /// Knot match with every echo on the candidate's torus: the two are
    /// constant-rank signature equivalent.
    pub equivalent: bool,
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ClassificationReport<T: Scalar = f64> {
    pub measured_meta: SignatureMeta<T>,
    pub candidates: Vec<CandidateReport>,
    pub ranking: Vec<String>,
}

fn score_candidate<T: Scalar>(
    measured: &Signature<T>,
    cand: &Candidate<T>,
    geom: &Geometry<T>,
    opts: &ClassifyOptions<T>,
) -> CandidateReport {
    let mut report = CandidateReport {
        name: cand.name.clone(),
        knot: None,
        expected_knot: None,
        knot_match: false,
        hausdorff: None,
        torus_rms: None,
        quasip_classes: None,
        equivalent: false,
        errors: Vec::new(),
    };
    let note = |e: crate::error::Error, what: &str| format!("{what}: {e}");

    match cand.target.knot_folds() {
        Some((p, q)) => match KnotType::new(p as i64, q as i64) {
            Ok(k) => {
                report.expected_knot = Some(k);
                report.quasip_classes = Some(quasip_classes_torus(&k.degree_vector()));
            }
            Err(e) => report.errors.push(note(e, "knot")),
        },
        None => {
            if let [single] = cand.target.composites.as_slice() {
                if cand.target.extras.is_empty() {
                    report.quasip_classes = Some(quasip_classes_circle(single.fold as i64));
                }
            }
        }
    }

    if report.expected_knot.is_some() {
        let pulled = render_target_tori(&cand.target, geom, measured.frequencies(), opts.torus_grid)
            .and_then(|tori| phase_pullback_knot(measured, &tori, &opts.pullback));
        match pulled {
            Ok(res) => {
                report.knot = Some(res.knot);
                report.torus_rms = Some(res.rms_residual.to_f64_lossy());
                report.knot_match = report.expected_knot == Some(res.knot);
                report.equivalent = report.knot_match;
            }
            Err(e) => report.errors.push(note(e, "pullback")),
        }
    }

    let angles = uniform_angles::<T>(measured.pulses());
    match render_signature(&cand.target, geom, &angles, measured.frequencies())
        .and_then(|rendered| image_hausdorff(measured, &rendered))
    {
        Ok(h) => report.hausdorff = Some(h.to_f64_lossy()),
        Err(e) => report.errors.push(note(e, "hausdorff")),
    }
    report
}

/// Score every candidate independently (one failing candidate never aborts
/// the report) and rank by knot match, then Hausdorff distance, then name.
pub fn classify<T: Scalar>(
    measured: &Signature<T>,
    dictionary: &[Candidate<T>],
    geom: &Geometry<T>,
    opts: &ClassifyOptions<T>,
) -> Result<ClassificationReport<T>> {
    if dictionary.is_empty() {
        return Err(crate::error::Error::Domain("classification dictionary is empty".into()));
    }
    geom.validate()?;
    let candidates: Vec<CandidateReport> = dictionary
        .par_iter()
        .map(|c| score_candidate(measured, c, geom, opts))
        .collect();
    let mut order: Vec<&CandidateReport> = candidates.iter().collect();
    order.sort_by(|a, b| {
        b.knot_match
            .cmp(&a.knot_match)
            .then(
                a.hausdorff
                    .unwrap_or(f64::INFINITY)
                    .total_cmp(&b.hausdorff.unwrap_or(f64::INFINITY)),
            )
            .then(a.name.cmp(&b.name))
    });
    let ranking = order.iter().map(|c| c.name.clone()).collect();
    Ok(ClassificationReport {
        measured_meta: measured.meta.clone(),
        candidates,
        ranking,
    })
}
