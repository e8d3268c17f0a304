//! Signature and torus files: CSV values plus a JSON sidecar.
//!
//! Floats are written with 17 significant digits so a write/read cycle
//! reproduces every value bit for bit.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sonarknot::{Complex64, Signature, SignatureMeta, TorusFunction};

use crate::exit::{CliError, CliResult};

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write via a temporary file in the destination directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::from(e.error))?;
    Ok(())
}

pub fn to_json_bytes<S: Serialize>(value: &S) -> CliResult<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value).map_err(CliError::failure)?;
    out.push(b'\n');
    Ok(out)
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> CliResult<()> {
    write_atomic(path, &to_json_bytes(value)?)
}

/// `dir/name.csv` becomes `dir/name.meta.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta.json")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignatureSidecar {
    pub schema_version: u32,
    pub kind: String,
    pub pulses: usize,
    pub frequencies: Vec<f64>,
    pub meta: SignatureMeta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusSidecar {
    pub schema_version: u32,
    pub kind: String,
    pub rows: usize,
    pub cols: usize,
    pub frequency: f64,
    pub folds: [u32; 2],
}

fn csv_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::failure(format!("{}: {e}", path.display()))
}

pub fn signature_csv(sig: &Signature) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["theta".to_string()];
    for j in 1..=sig.n_freqs() {
        header.push(format!("re_f{j}"));
        header.push(format!("im_f{j}"));
    }
    w.write_record(&header).map_err(CliError::failure)?;
    for (i, &theta) in sig.angles().iter().enumerate() {
        let mut rec = Vec::with_capacity(1 + 2 * sig.n_freqs());
        rec.push(fmt_f64(theta));
        for v in sig.row(i) {
            rec.push(fmt_f64(v.re));
            rec.push(fmt_f64(v.im));
        }
        w.write_record(&rec).map_err(CliError::failure)?;
    }
    w.into_inner().map_err(|e| CliError::failure(e.to_string()))
}

/// Write `path` (CSV) and its sidecar; returns both paths.
pub fn write_signature(path: &Path, sig: &Signature) -> CliResult<[PathBuf; 2]> {
    write_atomic(path, &signature_csv(sig)?)?;
    let side = sidecar_path(path);
    write_json(
        &side,
        &SignatureSidecar {
            schema_version: 1,
            kind: "signature".into(),
            pulses: sig.pulses(),
            frequencies: sig.frequencies().to_vec(),
            meta: sig.meta.clone(),
        },
    )?;
    Ok([path.to_path_buf(), side])
}

fn parse_field(path: &Path, line: usize, s: &str) -> CliResult<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| csv_error(path, format!("line {line}: `{s}`: {e}")))
}

fn read_sidecar<S: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<S> {
    let side = sidecar_path(path);
    let text = std::fs::read_to_string(&side)
        .map_err(|e| CliError::failure(format!("{}: {e}", side.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::failure(format!("{}: {e}", side.display())))
}

pub fn read_signature(path: &Path) -> CliResult<Signature> {
    let side: SignatureSidecar = read_sidecar(path)?;
    let k = side.frequencies.len();
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let width = r.headers().map_err(|e| csv_error(path, e))?.len();
    if width != 1 + 2 * k {
        return Err(csv_error(path, format!("{width} columns for {k} frequencies")));
    }
    let mut angles = Vec::with_capacity(side.pulses);
    let mut values = Vec::with_capacity(side.pulses * k);
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = i + 2;
        angles.push(parse_field(path, line, &rec[0])?);
        for j in 0..k {
            values.push(Complex64::new(
                parse_field(path, line, &rec[1 + 2 * j])?,
                parse_field(path, line, &rec[2 + 2 * j])?,
            ));
        }
    }
    if angles.len() != side.pulses {
        return Err(csv_error(path, format!("{} rows, sidecar says {}", angles.len(), side.pulses)));
    }
    Ok(Signature::new(values, angles, side.frequencies, side.meta)?)
}

/// First column of a CSV with a header row.
pub fn read_first_column(path: &Path) -> CliResult<Vec<f64>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    r.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec.map_err(|e| csv_error(path, e))?;
            parse_field(path, i + 2, rec.get(0).unwrap_or(""))
        })
        .collect()
}

pub fn write_torus(path: &Path, u: &TorusFunction) -> CliResult<[PathBuf; 2]> {
    let (rows, cols) = u.grid_size();
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for row in u.values().chunks(cols) {
        let rec: Vec<String> = row.iter().flat_map(|v| [fmt_f64(v.re), fmt_f64(v.im)]).collect();
        w.write_record(&rec).map_err(CliError::failure)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::failure(e.to_string()))?;
    write_atomic(path, &bytes)?;
    let side = sidecar_path(path);
    write_json(
        &side,
        &TorusSidecar {
            schema_version: 1,
            kind: "torus".into(),
            rows,
            cols,
            frequency: u.frequency,
            folds: [u.folds.0, u.folds.1],
        },
    )?;
    Ok([path.to_path_buf(), side])
}

pub fn read_torus(path: &Path) -> CliResult<TorusFunction> {
    let side: TorusSidecar = read_sidecar(path)?;
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut values = Vec::with_capacity(side.rows * side.cols);
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        if rec.len() != 2 * side.cols {
            return Err(csv_error(path, format!("line {}: {} fields", i + 1, rec.len())));
        }
        for j in 0..side.cols {
            values.push(Complex64::new(
                parse_field(path, i + 1, &rec[2 * j])?,
                parse_field(path, i + 1, &rec[2 * j + 1])?,
            ));
        }
    }
    Ok(TorusFunction::new(
        values,
        side.rows,
        side.cols,
        side.frequency,
        (side.folds[0], side.folds[1]),
    )?)
}

/// Plain numeric table with a header row.
pub fn table_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(CliError::failure)?;
    for row in rows {
        w.write_record(row.iter().map(|&x| fmt_f64(x))).map_err(CliError::failure)?;
    }
    w.into_inner().map_err(|e| CliError::failure(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use sonarknot::{render_signature, render_torus_function, uniform_angles, CompositeScatterer, Geometry, TargetModel};

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, -0.0, 1.0 / 3.0, f64::MIN_POSITIVE, 6.02214076e23, -2.5e-300] {
            let back: f64 = fmt_f64(x).parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits());
        }
    }

    #[test]
    fn signature_and_torus_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let t = TargetModel::knot_pair(2, 3, 0.4).unwrap();
        let g = Geometry::default();
        let sig = render_signature(&t, &g, &uniform_angles(24), &[150.0, 300.0, 450.0]).unwrap();
        let p = dir.path().join("s.csv");
        write_signature(&p, &sig).unwrap();
        assert!(dir.path().join("s.meta.json").exists());
        assert_eq!(read_signature(&p).unwrap(), sig);
        assert_eq!(read_first_column(&p).unwrap(), sig.angles());

        let u = render_torus_function(
            &CompositeScatterer::symmetric(2, 0.0).unwrap(),
            &CompositeScatterer::symmetric(3, 0.4).unwrap(),
            &g,
            300.0,
            (16, 12),
        )
        .unwrap();
        let q = dir.path().join("u.csv");
        write_torus(&q, &u).unwrap();
        assert_eq!(read_torus(&q).unwrap(), u);
    }
}
