//! Plot-ready datasets for the standard demonstration scenarios.
//!
//! Every dataset is computed from fixed parameters, so two runs write
//! byte-identical files and identical manifests.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::json;
use sonarknot::{
    apply_distortion, linspace, pca_embed, phase_pullback_knot, quasip_classes_torus,
    random_distortion, render_signature, render_target_tori, render_torus_function,
    torus_translation_distance, uniform_angles, CircleMap, CompositeScatterer, Geometry,
    PullbackOptions, Signature, TargetModel,
};

use crate::cli::GlobalOpts;
use crate::exit::CliResult;
use crate::io::{table_csv, write_atomic, write_json, write_signature, write_torus};
use crate::manifest::ManifestBuilder;
use crate::schema::QUASIP_CLASSES;

use super::{output_dir, validated};

const PULSES: usize = 720;
const FREQS: usize = 16;
const SEED: u64 = 42;
const BETA_DEG: f64 = 28.0;
const TORUS_GRID: usize = 128;
const TRACK_PULSES: usize = 360;
const SHIFT_GRID: usize = 240;

fn params() -> serde_json::Value {
    json!({
        "pulses": PULSES,
        "frequencies": [100.0, 1000.0, FREQS],
        "seed": SEED,
        "distortion": {"max_order": 4, "strength": 0.8},
        "beta_deg": BETA_DEG,
        "torus_grid": TORUS_GRID,
        "track_pulses": TRACK_PULSES,
        "shift_grid": SHIFT_GRID,
    })
}

fn pair(p: u32, q: u32, beta_deg: f64) -> CliResult<TargetModel> {
    Ok(TargetModel::knot_pair(p, q, beta_deg.to_radians())?)
}

fn signature_file(dir: &Path, name: &str, sig: &Signature) -> CliResult<Vec<PathBuf>> {
    Ok(write_signature(&dir.join(format!("{name}.csv")), sig)?.to_vec())
}

fn table(path: PathBuf, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> CliResult<PathBuf> {
    write_atomic(&path, &table_csv(header, rows)?)?;
    Ok(path)
}

struct Demo {
    root: PathBuf,
    geom: Geometry,
    freqs: Vec<f64>,
    angles: Vec<f64>,
    distortion: CircleMap,
    manifest: ManifestBuilder,
}

impl Demo {
    fn dataset(
        &mut self,
        name: &str,
        description: &str,
        build: impl FnOnce(&Self, &Path) -> CliResult<Vec<PathBuf>>,
    ) -> CliResult<()> {
        let start = Instant::now();
        let dir = self.root.join(name);
        let files = build(self, &dir)?;
        self.manifest.dataset(name, description, &files)?;
        self.manifest.step(name, start.elapsed());
        Ok(())
    }

    fn render(&self, target: &TargetModel, distorted: bool) -> CliResult<Signature> {
        let sig = if distorted {
            apply_distortion(target, &self.geom, &self.distortion, &self.angles, &self.freqs)?
                .with_seed(SEED)
        } else {
            render_signature(target, &self.geom, &self.angles, &self.freqs)?
        };
        Ok(sig)
    }
}

fn composites(demo: &Demo, dir: &Path, distorted: bool) -> CliResult<Vec<PathBuf>> {
    let mut files = Vec::new();
    for fold in [2, 3, 5] {
        let target = TargetModel::from_composites(vec![CompositeScatterer::symmetric(fold, 0.0)?]);
        let sig = demo.render(&target, distorted)?;
        files.extend(signature_file(dir, &format!("fold{fold}"), &sig)?);
    }
    if distorted {
        let rows = demo.angles.iter().map(|&t| vec![t, demo.distortion.eval(t)]);
        files.push(table(dir.join("distortion.csv"), &["t", "theta"], rows)?);
    }
    Ok(files)
}

fn torus_response(demo: &Demo, dir: &Path) -> CliResult<Vec<PathBuf>> {
    let target = pair(2, 3, BETA_DEG)?;
    let (a, b) = (&target.composites[0], &target.composites[1]);
    let mut files = Vec::new();
    for f in [300.0, 600.0] {
        let u = render_torus_function(a, b, &demo.geom, f, (TORUS_GRID, TORUS_GRID))?;
        files.extend(write_torus(&dir.join(format!("torus_{f:.0}hz.csv")), &u)?);
    }
    Ok(files)
}

fn knot_slice(demo: &Demo, dir: &Path) -> CliResult<Vec<PathBuf>> {
    let target = pair(2, 3, BETA_DEG)?;
    let (a, b) = (&target.composites[0], &target.composites[1]);
    let u = render_torus_function(a, b, &demo.geom, 300.0, (TORUS_GRID, TORUS_GRID))?;
    let tau = std::f64::consts::TAU;
    let rows = demo.angles.iter().map(|&t| {
        let (y, z) = ((2.0 * t) % tau, (3.0 * t) % tau);
        let v = u.interpolate(y, z);
        vec![t, y, z, v.re, v.im]
    });
    Ok(vec![table(dir.join("knot_2_3_300hz.csv"), &["t", "y", "z", "re", "im"], rows)?])
}

fn trajectories(demo: &Demo, dir: &Path) -> CliResult<Vec<PathBuf>> {
    let target = pair(2, 3, BETA_DEG)?;
    let axis = uniform_angles(TRACK_PULSES);
    let plain = render_signature(&target, &demo.geom, &axis, &demo.freqs)?;
    let warped = apply_distortion(&target, &demo.geom, &demo.distortion, &axis, &demo.freqs)?;
    let tori = render_target_tori(&target, &demo.geom, &demo.freqs, (TORUS_GRID, TORUS_GRID))?;
    let opts = PullbackOptions::default();
    let a = phase_pullback_knot(&plain, &tori, &opts)?;
    let b = phase_pullback_knot(&warped, &tori, &opts)?;
    let rows = a.path.iter().zip(&b.path).zip(&axis).map(|((p, q), &t)| {
        vec![t, p.0 as f64, p.1 as f64, q.0 as f64, q.1 as f64]
    });
    let csv = table(
        dir.join("paths.csv"),
        &["t", "row_undistorted", "col_undistorted", "row_distorted", "col_distorted"],
        rows,
    )?;
    let summary = dir.join("knots.json");
    write_json(
        &summary,
        &json!({
            "grid": [TORUS_GRID, TORUS_GRID],
            "undistorted": {"knot": a.knot, "windings": a.windings},
            "distorted": {"knot": b.knot, "windings": b.windings},
        }),
    )?;
    Ok(vec![csv, summary])
}

fn pca(demo: &Demo, dir: &Path) -> CliResult<Vec<PathBuf>> {
    let reference = demo.render(&pair(2, 3, BETA_DEG)?, false)?;
    let distorted = demo.render(&pair(2, 3, BETA_DEG)?, true)?;
    let other = demo.render(&pair(2, 5, BETA_DEG)?, false)?;
    let series = [&reference, &distorted, &other]
        .map(|s| pca_embed(s, &reference, 2))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let rows = (0..PULSES).map(|i| {
        let mut row = vec![demo.angles[i]];
        for s in &series {
            row.extend_from_slice(&s.points[i]);
        }
        row
    });
    let header = [
        "t", "x_2_3", "y_2_3", "z_2_3", "x_2_3_distorted", "y_2_3_distorted", "z_2_3_distorted",
        "x_2_5", "y_2_5", "z_2_5",
    ];
    Ok(vec![table(dir.join("embedding.csv"), &header, rows)?])
}

fn knot_4_6(demo: &Demo, dir: &Path) -> CliResult<Vec<PathBuf>> {
    let target = pair(4, 6, BETA_DEG)?;
    let mut files = signature_file(dir, "knot_4_6", &demo.render(&target, false)?)?;
    let classes = quasip_classes_torus(&sonarknot::KnotType::new(4, 6)?.degree_vector());
    let path = dir.join("classes.json");
    write_json(&path, &validated(QUASIP_CLASSES, &classes)?)?;
    files.push(path);
    Ok(files)
}

fn relative_angle(demo: &Demo, dir: &Path) -> CliResult<Vec<PathBuf>> {
    let grid = (SHIFT_GRID, SHIFT_GRID);
    let torus = |p: u32, q: u32, beta: f64| -> CliResult<_> {
        let t = pair(p, q, beta)?;
        Ok(render_torus_function(&t.composites[0], &t.composites[1], &demo.geom, 300.0, grid)?)
    };
    let u28 = torus(2, 3, BETA_DEG)?;
    let u100 = torus(2, 3, 100.0)?;
    let u25 = torus(2, 5, BETA_DEG)?;
    let same = torus_translation_distance(&u28, &u100)?;
    let cross = torus_translation_distance(&u28, &u25)?;
    let mut files = Vec::new();
    files.extend(write_torus(&dir.join("torus_2_3_beta28.csv"), &u28)?);
    files.extend(write_torus(&dir.join("torus_2_3_beta100.csv"), &u100)?);
    let summary = dir.join("translation.json");
    write_json(
        &summary,
        &json!({
            "frequency": 300.0,
            "interpolation_bound": u28.interpolation_bound(),
            "beta28_vs_beta100": same,
            "knot_2_3_vs_2_5": cross,
        }),
    )?;
    files.push(summary);
    Ok(files)
}

pub fn run(g: &GlobalOpts) -> CliResult<()> {
    let start = Instant::now();
    let root = output_dir(g, None, "demo-figures");
    let params = serde_json::to_vec(&params()).expect("static parameters serialize");
    let mut demo = Demo {
        manifest: ManifestBuilder::new(&root, "demo-figures", &params),
        root,
        geom: Geometry::default(),
        freqs: linspace(100.0, 1000.0, FREQS),
        angles: uniform_angles(PULSES),
        distortion: random_distortion(SEED, 4, 0.8)?,
    };

    demo.dataset(
        "composite_signatures",
        "2-, 3- and 5-fold composite scatterers over a full orbit",
        |d, dir| composites(d, dir, false),
    )?;
    demo.dataset(
        "distorted_signatures",
        "the same composites recorded along the seed-42 distorted trajectory",
        |d, dir| composites(d, dir, true),
    )?;
    demo.dataset(
        "combined_signature",
        "2-fold plus 3-fold composite at 28 degrees relative angle, undistorted and distorted",
        |d, dir| {
            let target = pair(2, 3, BETA_DEG)?;
            let mut files = signature_file(dir, "knot_2_3", &d.render(&target, false)?)?;
            files.extend(signature_file(dir, "knot_2_3_distorted", &d.render(&target, true)?)?);
            Ok(files)
        },
    )?;
    demo.dataset(
        "torus_response",
        "torus function of the 2+3 target at 300 Hz and 600 Hz",
        torus_response,
    )?;
    demo.dataset(
        "knot_slice",
        "torus function sampled along the (2,3) knot at 300 Hz",
        knot_slice,
    )?;
    demo.dataset(
        "knot_trajectories",
        "pulled-back torus paths of the undistorted and distorted 2+3 signatures",
        trajectories,
    )?;
    demo.dataset(
        "pca_comparison",
        "adjacent-row PCA embedding on the undistorted 2+3 axes",
        pca,
    )?;
    demo.dataset(
        "knot_4_6",
        "4-fold plus 6-fold target and its two QuasiP classes",
        knot_4_6,
    )?;
    demo.dataset(
        "relative_angle_comparison",
        "2+3 tori at 28 and 100 degrees and their best translation",
        relative_angle,
    )?;
    demo.manifest.finish(start.elapsed())?;
    Ok(())
}
