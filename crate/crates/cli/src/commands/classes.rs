use sonarknot::{quasip_classes_circle, quasip_classes_torus, DegreeVector};

use crate::cli::GlobalOpts;
use crate::exit::CliResult;
use crate::schema::QUASIP_CLASSES;

use super::{emit_report, validated};

/// One degree is a loop in the circle, several a loop in a torus.
pub fn run(g: &GlobalOpts, degrees: &[i64]) -> CliResult<()> {
    let set = match degrees {
        [d] => quasip_classes_circle(*d),
        _ => quasip_classes_torus(&DegreeVector::new(degrees.to_vec())?),
    };
    emit_report(g, &validated(QUASIP_CLASSES, &set)?)
}
