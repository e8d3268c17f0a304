use std::path::Path;
use std::time::Instant;

use sonarknot::{render_signature, render_torus_function};

use crate::cli::GlobalOpts;
use crate::exit::CliResult;
use crate::io::{write_signature, write_torus};
use crate::manifest::ManifestBuilder;

use super::{energy, load_config, output_dir};

pub fn run(g: &GlobalOpts, config: &Path) -> CliResult<()> {
    let start = Instant::now();
    let (cfg, bytes) = load_config(config)?;
    let geom = cfg.geometry()?;
    let angles = cfg.angle_axis();
    let freqs = cfg.frequency_axis();
    let dir = output_dir(g, Some(&cfg), "out");
    let mut manifest = ManifestBuilder::new(&dir, "simulate", &bytes);

    for spec in &cfg.targets {
        let step = Instant::now();
        let target = spec.model()?;
        let mut sig = render_signature(&target, &geom, &angles, &freqs)?;
        sig.meta.description = Some(spec.name.clone());
        for f in write_signature(&dir.join(format!("{}.csv", spec.name)), &sig)? {
            manifest.record(&f)?;
        }
        println!(
            "{}: {} pulses x {} frequencies, energy {:.6e}",
            spec.name,
            sig.pulses(),
            sig.n_freqs(),
            energy(&sig)
        );
        if let (Some(torus), [a, b]) = (&cfg.torus, target.composites.as_slice()) {
            if target.extras.is_empty() {
                let u = render_torus_function(a, b, &geom, torus.frequency, (torus.grid[0], torus.grid[1]))?;
                for f in write_torus(&dir.join(format!("{}.torus.csv", spec.name)), &u)? {
                    manifest.record(&f)?;
                }
            }
        }
        manifest.step(&spec.name, step.elapsed());
    }
    manifest.finish(start.elapsed())?;
    Ok(())
}
