use sonarknot::{classify, Candidate, ClassifyOptions};

use crate::cli::{ClassifyArgs, GlobalOpts};
use crate::config::ExperimentConfig;
use crate::exit::CliResult;
use crate::io::read_signature;
use crate::schema::CLASSIFY_REPORT;

use super::{emit_report, validated};

pub fn run(g: &GlobalOpts, args: &ClassifyArgs) -> CliResult<()> {
    let cfg = ExperimentConfig::load(&args.config)?;
    let measured = read_signature(&args.measured)?;
    let dictionary = cfg
        .targets
        .iter()
        .map(|t| {
            Ok(Candidate {
                name: t.name.clone(),
                target: t.model()?,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let opts = ClassifyOptions {
        torus_grid: (cfg.estimator.torus_grid[0], cfg.estimator.torus_grid[1]),
        pullback: cfg.estimator.pullback(g.tol),
    };
    let report = classify(&measured, &dictionary, &cfg.geometry()?, &opts)?;
    emit_report(g, &validated(CLASSIFY_REPORT, &report)?)
}
