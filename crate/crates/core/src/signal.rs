//! Point-scatterer echo model for a sensor orbiting a target at fixed standoff.
//!
//! A point scatterer at polar position `(r, α)` seen from look angle `θ` at
//! standoff `R` returns
//!
//! ```text
//! a · exp(-2πi f r cos(α-θ) / c) / sqrt((r sin(α-θ))² + (R + r cos(α-θ))²)
//! ```
//!
//! and a target's signature is the sum over its scatterers. Sums are always
//! taken in declaration order (composites expanded first, then extras) so
//! that repeated evaluations are bit-identical.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::trajectory::CircleMap;

/// Largest grid `render_signature` will allocate.
pub const MAX_GRID_CELLS: u128 = 100_000_000;

/// A single isotropic reflector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct PointScatterer<T: Scalar = f64> {
    pub amplitude: Complex<T>,
    /// Distance from the target centre in meters.
    pub radius: T,
    /// Angle from the θ = 0 axis, kept in `[0, 2π)`.
    pub angle: T,
}

impl<T: Scalar> PointScatterer<T> {
    pub fn new(amplitude: Complex<T>, radius: T, angle: T) -> Result<Self> {
        if !(amplitude.re.is_finite() && amplitude.im.is_finite()) {
            return Err(Error::NonFinite("scatterer amplitude"));
        }
        if !radius.is_finite() || !angle.is_finite() {
            return Err(Error::NonFinite("scatterer position"));
        }
        if radius < T::zero() {
            return Err(Error::Domain(format!("negative scatterer radius {radius}")));
        }
        Ok(Self {
            amplitude,
            radius,
            angle: angle.wrap_angle(),
        })
    }

    fn check(&self, geom: &Geometry<T>) -> Result<()> {
        if !(self.amplitude.re.is_finite()
            && self.amplitude.im.is_finite()
            && self.radius.is_finite()
            && self.angle.is_finite())
        {
            return Err(Error::NonFinite("scatterer"));
        }
        if self.radius < T::zero() {
            return Err(Error::Domain(format!(
                "negative scatterer radius {}",
                self.radius
            )));
        }
        if self.radius >= geom.standoff {
            return Err(Error::Domain(format!(
                "scatterer radius {} must be below the standoff {}",
                self.radius, geom.standoff
            )));
        }
        Ok(())
    }

    /// Echo of this scatterer with no validation.
    #[inline]
    fn echo(&self, geom: &Geometry<T>, theta: T, freq: T) -> Complex<T> {
        let (s, c) = (self.angle - theta).sin_cos();
        let r = self.radius;
        let phase = -(T::TAU() * freq * r * c) / geom.phase_speed;
        let along = geom.standoff + r * c;
        let across = r * s;
        let denom = (across * across + along * along).sqrt();
        self.amplitude * Complex::from_polar(T::one(), phase) / denom
    }
}

/// `fold` identical scatterers evenly spaced on a circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct CompositeScatterer<T: Scalar = f64> {
    pub fold: u32,
    pub amplitude: Complex<T>,
    pub radius: T,
    pub reference_angle: T,
}

impl<T: Scalar> CompositeScatterer<T> {
    pub fn new(fold: u32, amplitude: Complex<T>, radius: T, reference_angle: T) -> Result<Self> {
        let c = Self {
            fold,
            amplitude,
            radius,
            reference_angle,
        };
        c.check_shape()?;
        Ok(c)
    }

    /// Unit amplitude at the default 1 m radius.
    pub fn symmetric(fold: u32, reference_angle: T) -> Result<Self> {
        Self::new(fold, Complex::new(T::one(), T::zero()), T::one(), reference_angle)
    }

    fn check_shape(&self) -> Result<()> {
        if self.fold == 0 {
            return Err(Error::Domain("composite fold must be at least 1".into()));
        }
        if !(self.amplitude.re.is_finite()
            && self.amplitude.im.is_finite()
            && self.radius.is_finite()
            && self.reference_angle.is_finite())
        {
            return Err(Error::NonFinite("composite scatterer"));
        }
        if self.radius < T::zero() {
            return Err(Error::Domain(format!("negative composite radius {}", self.radius)));
        }
        Ok(())
    }

    /// The member scatterers at `reference_angle + 2πp/fold`, `p = 1..=fold`.
    pub fn expand(&self) -> Vec<PointScatterer<T>> {
        let fold = T::from_u32(self.fold).expect("fold fits");
        (1..=self.fold)
            .map(|p| {
                let offset = T::TAU() * T::from_u32(p).expect("p fits") / fold;
                PointScatterer {
                    amplitude: self.amplitude,
                    radius: self.radius,
                    angle: (self.reference_angle + offset).wrap_angle(),
                }
            })
            .collect()
    }

    fn check(&self, geom: &Geometry<T>) -> Result<()> {
        self.check_shape()?;
        if self.radius >= geom.standoff {
            return Err(Error::Domain(format!(
                "composite radius {} must be below the standoff {}",
                self.radius, geom.standoff
            )));
        }
        Ok(())
    }

    #[inline]
    fn echo(&self, geom: &Geometry<T>, theta: T, freq: T) -> Complex<T> {
        let fold = T::from_u32(self.fold).expect("fold fits");
        let mut acc = Complex::new(T::zero(), T::zero());
        for p in 1..=self.fold {
            let offset = T::TAU() * T::from_u32(p).expect("p fits") / fold;
            let member = PointScatterer {
                amplitude: self.amplitude,
                radius: self.radius,
                angle: (self.reference_angle + offset).wrap_angle(),
            };
            acc = acc + member.echo(geom, theta, freq);
        }
        acc
    }
}

/// A target built from composite scatterers plus free-standing points.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TargetModel<T: Scalar = f64> {
    pub composites: Vec<CompositeScatterer<T>>,
    #[serde(default)]
    pub extras: Vec<PointScatterer<T>>,
}

impl<T: Scalar> TargetModel<T> {
    pub fn from_composites(composites: Vec<CompositeScatterer<T>>) -> Self {
        Self {
            composites,
            extras: Vec::new(),
        }
    }

    /// Two unit composites of folds `p` and `q`, the second rotated by `beta`
    /// relative to the first (which sits at angle 0).
    pub fn knot_pair(p: u32, q: u32, beta: T) -> Result<Self> {
        Ok(Self::from_composites(vec![
            CompositeScatterer::symmetric(p, T::zero())?,
            CompositeScatterer::symmetric(q, beta)?,
        ]))
    }

    pub fn scatterer_count(&self) -> usize {
        self.composites.iter().map(|c| c.fold as usize).sum::<usize>() + self.extras.len()
    }

    /// All point scatterers in summation order.
    pub fn expand(&self) -> Vec<PointScatterer<T>> {
        let mut out: Vec<_> = self.composites.iter().flat_map(|c| c.expand()).collect();
        out.extend_from_slice(&self.extras);
        out
    }

    /// Folds of the two composites when the target is a pure two-composite
    /// superposition, i.e. when its signature lives on a torus.
    pub fn knot_folds(&self) -> Option<(u32, u32)> {
        match (self.composites.as_slice(), self.extras.is_empty()) {
            ([a, b], true) => Some((a.fold, b.fold)),
            _ => None,
        }
    }

    /// Multiply every amplitude by `factor`.
    pub fn scaled(&self, factor: Complex<T>) -> Self {
        let mut out = self.clone();
        for c in &mut out.composites {
            c.amplitude = c.amplitude * factor;
        }
        for p in &mut out.extras {
            p.amplitude = p.amplitude * factor;
        }
        out
    }

    pub fn validate(&self, geom: &Geometry<T>) -> Result<()> {
        geom.validate()?;
        if self.scatterer_count() == 0 {
            return Err(Error::Domain("target has no scatterers".into()));
        }
        for c in &self.composites {
            c.check(geom)?;
        }
        for p in &self.extras {
            p.check(geom)?;
        }
        Ok(())
    }

    #[inline]
    fn echo(&self, geom: &Geometry<T>, theta: T, freq: T) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for c in &self.composites {
            acc = acc + c.echo(geom, theta, freq);
        }
        for p in &self.extras {
            acc = acc + p.echo(geom, theta, freq);
        }
        acc
    }
}

/// Sensor standoff range and wave phase speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Geometry<T: Scalar = f64> {
    pub standoff: T,
    pub phase_speed: T,
}

impl<T: Scalar> Default for Geometry<T> {
    /// 100 m standoff in seawater (1500 m/s).
    fn default() -> Self {
        Self {
            standoff: T::lit(100.0),
            phase_speed: T::lit(1500.0),
        }
    }
}

impl<T: Scalar> Geometry<T> {
    pub fn new(standoff: T, phase_speed: T) -> Result<Self> {
        let g = Self {
            standoff,
            phase_speed,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.standoff.is_finite() && self.phase_speed.is_finite()) {
            return Err(Error::NonFinite("geometry"));
        }
        if self.standoff <= T::zero() || self.phase_speed <= T::zero() {
            return Err(Error::Domain(
                "standoff and phase speed must be strictly positive".into(),
            ));
        }
        Ok(())
    }
}

fn check_point<T: Scalar>(theta: T, freq: T) -> Result<()> {
    if !theta.is_finite() {
        return Err(Error::NonFinite("look angle"));
    }
    if !freq.is_finite() {
        return Err(Error::NonFinite("frequency"));
    }
    Ok(())
}

/// Sum of point-scatterer echoes at one look angle and frequency.
pub fn eval_point_scatterers<T: Scalar>(
    scatterers: &[PointScatterer<T>],
    geom: &Geometry<T>,
    theta: T,
    freq: T,
) -> Result<Complex<T>> {
    geom.validate()?;
    check_point(theta, freq)?;
    let mut acc = Complex::new(T::zero(), T::zero());
    for s in scatterers {
        s.check(geom)?;
        acc = acc + s.echo(geom, theta, freq);
    }
    Ok(acc)
}

/// Echo of a whole target: composites in order, then extras.
pub fn eval_target<T: Scalar>(
    target: &TargetModel<T>,
    geom: &Geometry<T>,
    theta: T,
    freq: T,
) -> Result<Complex<T>> {
    target.validate(geom)?;
    check_point(theta, freq)?;
    Ok(target.echo(geom, theta, freq))
}

/// Echo of a single composite scatterer.
pub fn eval_composite<T: Scalar>(
    comp: &CompositeScatterer<T>,
    geom: &Geometry<T>,
    theta: T,
    freq: T,
) -> Result<Complex<T>> {
    geom.validate()?;
    comp.check(geom)?;
    check_point(theta, freq)?;
    Ok(comp.echo(geom, theta, freq))
}

/// `n` angles `2πi/n`, closed-open on the circle.
pub fn uniform_angles<T: Scalar>(n: usize) -> Vec<T> {
    let nf = T::from_usize_lossy(n);
    (0..n).map(|i| T::TAU() * T::from_usize_lossy(i) / nf).collect()
}

/// `n` evenly spaced values from `start` to `stop` inclusive.
pub fn linspace<T: Scalar>(start: T, stop: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / T::from_usize_lossy(n - 1);
            (0..n).map(|i| start + step * T::from_usize_lossy(i)).collect()
        }
    }
}

pub(crate) fn check_increasing<T: Scalar>(name: &str, axis: &[T]) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::Axis(format!("{name} axis is empty")));
    }
    if axis.iter().any(|v| !v.is_finite()) {
        return Err(Error::Axis(format!("{name} axis has non-finite entries")));
    }
    if axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Axis(format!("{name} axis is not strictly increasing")));
    }
    Ok(())
}

pub(crate) fn check_angle_axis<T: Scalar>(axis: &[T]) -> Result<()> {
    check_increasing("angle", axis)?;
    if axis[0] < T::zero() || axis[axis.len() - 1] >= T::TAU() {
        return Err(Error::Axis("angle axis must lie in [0, 2π)".into()));
    }
    Ok(())
}

fn check_grid(rows: usize, cols: usize) -> Result<()> {
    let cells = rows as u128 * cols as u128;
    if cells > MAX_GRID_CELLS {
        return Err(Error::GridTooLarge {
            cells,
            limit: MAX_GRID_CELLS,
        });
    }
    Ok(())
}

/// How the pulse axis of a signature relates to the look angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisKind {
    /// Rows are sampled directly at the listed look angles.
    #[default]
    LookAngle,
    /// Rows are sampled at transmit times; the look angle is an unknown
    /// function of them.
    Time,
}

/// Provenance carried alongside a rendered signature.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SignatureMeta<T: Scalar = f64> {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetModel<T>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<Geometry<T>>,
    #[serde(default)]
    pub axis: AxisKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distortion: Option<CircleMap<T>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Echoes indexed by (pulse, frequency), stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Signature<T: Scalar = f64> {
    values: Vec<Complex<T>>,
    angles: Vec<T>,
    frequencies: Vec<T>,
    pub meta: SignatureMeta<T>,
}

impl<T: Scalar> Signature<T> {
    pub fn new(
        values: Vec<Complex<T>>,
        angles: Vec<T>,
        frequencies: Vec<T>,
        meta: SignatureMeta<T>,
    ) -> Result<Self> {
        check_increasing("angle", &angles)?;
        check_increasing("frequency", &frequencies)?;
        if values.len() != angles.len() * frequencies.len() {
            return Err(Error::Dimension(format!(
                "{} values for a {}x{} signature",
                values.len(),
                angles.len(),
                frequencies.len()
            )));
        }
        Ok(Self {
            values,
            angles,
            frequencies,
            meta,
        })
    }

    pub fn pulses(&self) -> usize {
        self.angles.len()
    }

    pub fn n_freqs(&self) -> usize {
        self.frequencies.len()
    }

    pub fn angles(&self) -> &[T] {
        &self.angles
    }

    pub fn frequencies(&self) -> &[T] {
        &self.frequencies
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn get(&self, pulse: usize, freq: usize) -> Complex<T> {
        self.values[pulse * self.frequencies.len() + freq]
    }

    pub fn row(&self, pulse: usize) -> &[Complex<T>] {
        let k = self.frequencies.len();
        &self.values[pulse * k..(pulse + 1) * k]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex<T>]> {
        self.values.chunks(self.frequencies.len())
    }

    pub fn column(&self, freq: usize) -> Vec<Complex<T>> {
        self.rows().map(|r| r[freq]).collect()
    }

    /// Same signature with every value multiplied by `factor`.
    pub fn scaled(&self, factor: Complex<T>) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v = *v * factor;
        }
        out
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.meta.seed = Some(seed);
        self
    }

    pub fn same_frequencies(&self, other: &Signature<T>) -> bool {
        self.frequencies.len() == other.frequencies.len()
            && self
                .frequencies
                .iter()
                .zip(&other.frequencies)
                .all(|(a, b)| (*a - *b).abs() <= T::lit(1e-9) * (T::one() + a.abs()))
    }
}

/// Evaluate `target` on each look angle in `thetas` and each frequency.
/// Inputs must already be validated.
pub(crate) fn render_rows<T: Scalar>(
    target: &TargetModel<T>,
    geom: &Geometry<T>,
    thetas: &[T],
    freqs: &[T],
) -> Vec<Complex<T>> {
    let k = freqs.len();
    let mut values = vec![Complex::new(T::zero(), T::zero()); thetas.len() * k];
    values
        .par_chunks_mut(k)
        .zip(thetas.par_iter())
        .for_each(|(row, &theta)| {
            for (v, &f) in row.iter_mut().zip(freqs) {
                *v = target.echo(geom, theta, f);
            }
        });
    values
}

/// Signature of `target` over the look-angle × frequency grid.
pub fn render_signature<T: Scalar>(
    target: &TargetModel<T>,
    geom: &Geometry<T>,
    angles: &[T],
    freqs: &[T],
) -> Result<Signature<T>> {
    target.validate(geom)?;
    check_angle_axis(angles)?;
    check_increasing("frequency", freqs)?;
    check_grid(angles.len(), freqs.len())?;
    let values = render_rows(target, geom, angles, freqs);
    Signature::new(
        values,
        angles.to_vec(),
        freqs.to_vec(),
        SignatureMeta {
            target: Some(target.clone()),
            geometry: Some(*geom),
            axis: AxisKind::LookAngle,
            ..Default::default()
        },
    )
}

/// A complex function sampled on a uniform `rows × cols` grid over the torus
/// `[0, 2π)²`. Indices wrap.
///
/// For a two-composite target the first coordinate is `m·θ` for the `m`-fold
/// composite and the second `n·θ` for the `n`-fold one, each composite's
/// fundamental domain being stretched to a full turn.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusFunction<T: Scalar = f64> {
    values: Vec<Complex<T>>,
    rows: usize,
    cols: usize,
    pub frequency: T,
    /// Folds of the composites generating the two coordinates.
    pub folds: (u32, u32),
}

impl<T: Scalar> TorusFunction<T> {
    pub fn new(
        values: Vec<Complex<T>>,
        rows: usize,
        cols: usize,
        frequency: T,
        folds: (u32, u32),
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension("empty torus grid".into()));
        }
        if values.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} values for a {rows}x{cols} torus grid",
                values.len()
            )));
        }
        Ok(Self {
            values,
            rows,
            cols,
            frequency,
            folds,
        })
    }

    pub fn grid_size(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    /// Grid spacing in each coordinate.
    pub fn spacing(&self) -> (T, T) {
        (
            T::TAU() / T::from_usize_lossy(self.rows),
            T::TAU() / T::from_usize_lossy(self.cols),
        )
    }

    /// Value at a node with periodic index arithmetic.
    pub fn at(&self, i: isize, j: isize) -> Complex<T> {
        let i = i.rem_euclid(self.rows as isize) as usize;
        let j = j.rem_euclid(self.cols as isize) as usize;
        self.values[i * self.cols + j]
    }

    /// Bilinear interpolation at torus coordinates `(y, z)`.
    pub fn interpolate(&self, y: T, z: T) -> Complex<T> {
        let (hy, hz) = self.spacing();
        let fy = y.wrap_angle() / hy;
        let fz = z.wrap_angle() / hz;
        let iy = fy.floor();
        let iz = fz.floor();
        let ty = fy - iy;
        let tz = fz - iz;
        let i = iy.to_isize().unwrap_or(0);
        let j = iz.to_isize().unwrap_or(0);
        let one = T::one();
        let v00 = self.at(i, j);
        let v01 = self.at(i, j + 1);
        let v10 = self.at(i + 1, j);
        let v11 = self.at(i + 1, j + 1);
        v00 * ((one - ty) * (one - tz)) + v01 * ((one - ty) * tz) + v10 * (ty * (one - tz))
            + v11 * (ty * tz)
    }

    /// Same function translated so that `out(i, j) = self(i - di, j - dj)`.
    pub fn rolled(&self, di: isize, dj: isize) -> Self {
        let mut values = Vec::with_capacity(self.values.len());
        for i in 0..self.rows as isize {
            for j in 0..self.cols as isize {
                values.push(self.at(i - di, j - dj));
            }
        }
        Self {
            values,
            ..self.clone()
        }
    }

    /// Estimated bound on bilinear interpolation error, `h²/8 · max|U''|`
    /// per axis with the second derivatives taken as grid second differences.
    pub fn interpolation_bound(&self) -> T {
        let mut dyy = T::zero();
        let mut dzz = T::zero();
        for i in 0..self.rows as isize {
            for j in 0..self.cols as isize {
                let c = self.at(i, j);
                let two_c = c + c;
                dyy = dyy.max((self.at(i + 1, j) - two_c + self.at(i - 1, j)).norm());
                dzz = dzz.max((self.at(i, j + 1) - two_c + self.at(i, j - 1)).norm());
            }
        }
        (dyy + dzz) / T::lit(8.0)
    }
}

/// Torus function of the superposition of two composites at one frequency:
/// `U(y, z) = s_m(y/m; α_A) + s_n(z/n; α_B)` where `s_k(θ; α)` is the echo of
/// a composite at look angle `θ`.
///
/// Because `s_k` is `2π/k`-periodic in `θ`, `U` is doubly periodic and the
/// target's signature factors as `u(θ) = U(m θ, n θ)`.
pub fn render_torus_function<T: Scalar>(
    comp_a: &CompositeScatterer<T>,
    comp_b: &CompositeScatterer<T>,
    geom: &Geometry<T>,
    freq: T,
    grid: (usize, usize),
) -> Result<TorusFunction<T>> {
    let (rows, cols) = grid;
    if rows < 8 || cols < 8 {
        return Err(Error::Dimension(format!(
            "torus grid {rows}x{cols} is below the 8x8 minimum"
        )));
    }
    geom.validate()?;
    comp_a.check(geom)?;
    comp_b.check(geom)?;
    check_point(T::zero(), freq)?;
    check_grid(rows, cols)?;

    let m = T::from_u32(comp_a.fold).expect("fold fits");
    let n = T::from_u32(comp_b.fold).expect("fold fits");
    let ha: Vec<_> = uniform_angles::<T>(rows)
        .into_iter()
        .map(|y| comp_a.echo(geom, y / m, freq))
        .collect();
    let hb: Vec<_> = uniform_angles::<T>(cols)
        .into_iter()
        .map(|z| comp_b.echo(geom, z / n, freq))
        .collect();
    let mut values = Vec::with_capacity(rows * cols);
    for a in &ha {
        for b in &hb {
            values.push(*a + *b);
        }
    }
    TorusFunction::new(values, rows, cols, freq, (comp_a.fold, comp_b.fold))
}

/// One torus function per frequency for a two-composite target.
pub fn render_target_tori<T: Scalar>(
    target: &TargetModel<T>,
    geom: &Geometry<T>,
    freqs: &[T],
    grid: (usize, usize),
) -> Result<Vec<TorusFunction<T>>> {
    if target.knot_folds().is_none() {
        return Err(Error::Domain(
            "torus functions need a target made of exactly two composites".into(),
        ));
    }
    let (a, b) = (&target.composites[0], &target.composites[1]);
    freqs
        .par_iter()
        .map(|&f| render_torus_function(a, b, geom, f, grid))
        .collect()
}
