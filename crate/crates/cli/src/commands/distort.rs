use std::path::Path;
use std::time::Instant;

use sonarknot::{apply_distortion, random_distortion, CircleMap, Geometry, Signature};

use crate::cli::{DistortArgs, GlobalOpts};
use crate::config::DistortionSpec;
use crate::exit::{CliError, CliResult};
use crate::io::{read_signature, write_signature};
use crate::manifest::ManifestBuilder;

use super::{load_config, output_dir};

fn read_map(path: &Path) -> CliResult<CircleMap> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read map {}: {e}", path.display())))?;
    let map: CircleMap = serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("map {}: {e}", path.display())))?;
    map.validate()?;
    Ok(map)
}

/// The distortion to apply and the seed it came from, if any.
fn resolve(
    g: &GlobalOpts,
    args: &DistortArgs,
    from_config: Option<DistortionSpec>,
) -> CliResult<(CircleMap, Option<u64>)> {
    let (map, seed) = if let Some(path) = &args.map {
        (read_map(path)?, None)
    } else {
        let mut spec = match (g.seed, from_config) {
            (Some(seed), Some(spec)) => DistortionSpec { seed, ..spec },
            (Some(seed), None) => DistortionSpec::with_seed(seed),
            (None, Some(spec)) => spec,
            (None, None) => {
                return Err(CliError::config("no distortion given: pass --seed or --map"));
            }
        };
        if let Some(order) = args.max_order {
            spec.max_order = order;
        }
        if let Some(strength) = args.strength {
            spec.strength = strength;
        }
        (
            random_distortion(spec.seed, spec.max_order, spec.strength)?,
            Some(spec.seed),
        )
    };
    if map.degree != 1 {
        return Err(CliError::config(format!(
            "a trajectory distortion must have degree 1, not {}",
            map.degree
        )));
    }
    Ok((map, seed))
}

fn distorted(
    sig_axis: &[f64],
    freqs: &[f64],
    target: &sonarknot::TargetModel,
    geom: &Geometry,
    map: &CircleMap,
    seed: Option<u64>,
    description: Option<String>,
) -> CliResult<Signature> {
    let mut out = apply_distortion(target, geom, map, sig_axis, freqs)?;
    out.meta.seed = seed;
    out.meta.description = description;
    Ok(out)
}

pub fn run(g: &GlobalOpts, args: &DistortArgs) -> CliResult<()> {
    let start = Instant::now();
    if let Some(input) = &args.input {
        let sig = read_signature(input)?;
        let (map, seed) = resolve(g, args, None)?;
        let target = sig.meta.target.clone().ok_or_else(|| {
            CliError::config(format!("{}: sidecar does not record the target", input.display()))
        })?;
        let geom = sig.meta.geometry.unwrap_or_default();
        let out = distorted(
            sig.angles(),
            sig.frequencies(),
            &target,
            &geom,
            &map,
            seed,
            sig.meta.description.clone(),
        )?;
        let stem = input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "signature".into());
        let dir = output_dir(g, None, "out");
        let provenance = serde_json::to_vec(&map).map_err(CliError::failure)?;
        let mut manifest = ManifestBuilder::new(&dir, "distort", &provenance);
        for f in write_signature(&dir.join(format!("{stem}.distorted.csv")), &out)? {
            manifest.record(&f)?;
        }
        manifest.finish(start.elapsed())?;
        return Ok(());
    }

    let path = args.config.as_deref().expect("clap requires --input or --config");
    let (cfg, bytes) = load_config(path)?;
    let (map, seed) = resolve(g, args, cfg.distortion)?;
    let geom = cfg.geometry()?;
    let axis = cfg.angle_axis();
    let freqs = cfg.frequency_axis();
    let dir = output_dir(g, Some(&cfg), "out");
    let mut manifest = ManifestBuilder::new(&dir, "distort", &bytes);
    for spec in &cfg.targets {
        let out = distorted(&axis, &freqs, &spec.model()?, &geom, &map, seed, Some(spec.name.clone()))?;
        for f in write_signature(&dir.join(format!("{}.distorted.csv", spec.name)), &out)? {
            manifest.record(&f)?;
        }
    }
    manifest.finish(start.elapsed())?;
    Ok(())
}
