use serde::Serialize;
use sonarknot::{
    image_hausdorff, phase_pullback_knot, quasip_classes_circle, quasip_classes_torus,
    render_target_tori, sampling_gap, torus_translation_distance, KnotType, QuasiPClassSet,
    Signature, TranslationMatch,
};

use crate::cli::{CompareArgs, GlobalOpts};
use crate::config::EstimatorSpec;
use crate::exit::CliResult;
use crate::io::{read_signature, read_torus};

use super::emit_report;

#[derive(Debug, Serialize)]
struct Side {
    file: String,
    pulses: usize,
    knot: Option<KnotType>,
    quasip_classes: Option<QuasiPClassSet>,
    errors: Vec<String>,
}

#[derive(Debug, Serialize)]
struct Translation {
    #[serde(flatten)]
    found: TranslationMatch,
    tolerance: f64,
}

#[derive(Debug, Serialize)]
struct Report {
    first: Side,
    second: Side,
    exact_match: bool,
    knot_match: Option<bool>,
    classes_match: Option<bool>,
    hausdorff: f64,
    /// Larger of the two sampling gaps: two samplings of one closed curve
    /// lie within this distance of each other.
    hausdorff_bound: f64,
    translation: Option<Translation>,
    verdict: &'static str,
}

/// Knot and class set of a signature, using the target its sidecar records.
fn describe(file: &std::path::Path, sig: &Signature, grid: usize, tol: Option<f64>) -> Side {
    let mut side = Side {
        file: file.display().to_string(),
        pulses: sig.pulses(),
        knot: None,
        quasip_classes: None,
        errors: Vec::new(),
    };
    let Some(target) = &sig.meta.target else {
        side.errors.push("sidecar records no target".into());
        return side;
    };
    if target.knot_folds().is_some() {
        let geom = sig.meta.geometry.unwrap_or_default();
        let pulled = render_target_tori(target, &geom, sig.frequencies(), (grid, grid))
            .and_then(|tori| phase_pullback_knot(sig, &tori, &EstimatorSpec::default().pullback(tol)));
        match pulled {
            Ok(res) => {
                side.knot = Some(res.knot);
                side.quasip_classes = Some(quasip_classes_torus(&res.knot.degree_vector()));
            }
            Err(e) => side.errors.push(format!("pullback: {e}")),
        }
    } else if let ([single], true) = (target.composites.as_slice(), target.extras.is_empty()) {
        side.quasip_classes = Some(quasip_classes_circle(single.fold as i64));
    }
    side
}

pub fn run(g: &GlobalOpts, args: &CompareArgs) -> CliResult<()> {
    let a = read_signature(&args.first)?;
    let b = read_signature(&args.second)?;
    let hausdorff = image_hausdorff(&a, &b)?;
    let hausdorff_bound = sampling_gap(&a).max(sampling_gap(&b));
    let exact_match = a.angles() == b.angles() && a.values() == b.values();

    let translation = match (&args.torus_a, &args.torus_b) {
        (Some(pa), Some(pb)) => {
            let (ua, ub) = (read_torus(pa)?, read_torus(pb)?);
            let tolerance = g
                .tol
                .unwrap_or_else(|| 1.5 * ua.interpolation_bound().max(ub.interpolation_bound()));
            Some(Translation {
                found: torus_translation_distance(&ua, &ub)?,
                tolerance,
            })
        }
        _ => None,
    };

    let first = describe(&args.first, &a, args.grid, g.tol);
    let second = describe(&args.second, &b, args.grid, g.tol);
    let knot_match = first.knot.zip(second.knot).map(|(x, y)| x == y);
    let classes_match = first
        .quasip_classes
        .as_ref()
        .zip(second.quasip_classes.as_ref())
        .map(|(x, y)| x.generator_set() == y.generator_set());

    let same = exact_match
        || (knot_match != Some(false)
            && classes_match != Some(false)
            && (hausdorff <= hausdorff_bound
                || translation.as_ref().is_some_and(|t| t.found.min_rms <= t.tolerance)));
    emit_report(
        g,
        &Report {
            first,
            second,
            exact_match,
            knot_match,
            classes_match,
            hausdorff,
            hausdorff_bound,
            translation,
            verdict: if same { "same target" } else { "different targets" },
        },
    )
}
