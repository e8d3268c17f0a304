//! Torus-knot factorizations of two-composite signatures and the integer
//! algebra classifying their quasiperiodic factorizations.
//!
//! A loop on a `k`-torus has a degree vector `v ∈ ℤᵏ`. Quasiperiodic
//! factorization classes of the loop correspond to cyclic subgroups of `ℤᵏ`
//! containing `v`, and `⟨w⟩ ∋ v` exactly when `w = ±v/d` for a positive
//! divisor `d` of `gcd(v)`. So the classes are enumerated by the divisors of
//! the gcd.

use std::fmt;

use num_complex::Complex;
use num_integer::Integer;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::signal::{
    render_signature, render_torus_function, uniform_angles, CompositeScatterer, Geometry,
    Signature, TargetModel, TorusFunction,
};
use crate::trajectory::{apply_distortion, CircleMap};

/// Winding numbers of a loop in a `k`-torus.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DegreeVector(Vec<i64>);

impl DegreeVector {
    pub fn new(components: Vec<i64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Dimension("degree vector needs a component".into()));
        }
        Ok(Self(components))
    }

    pub fn components(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// True for a null-homotopic loop.
    pub fn is_null(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Non-negative gcd of the components.
    pub fn gcd(&self) -> u64 {
        self.0.iter().fold(0i64, |g, &c| g.gcd(&c)).unsigned_abs()
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for DegreeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// `(m, n)` torus knot type in canonical orientation: `m > 0`, and `n > 0`
/// whenever `m = |n|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct KnotType {
    pub m: i64,
    pub n: i64,
}

impl KnotType {
    pub fn new(m: i64, n: i64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Domain(format!(
                "torus knot windings must be nonzero, got ({m},{n})"
            )));
        }
        Ok(Self { m, n }.canonical())
    }

    /// Fixes the global orientation: only the loop's degree up to sign is
    /// determined by its image.
    pub fn canonical(self) -> Self {
        let (m, mut n) = if self.m < 0 {
            (-self.m, -self.n)
        } else {
            (self.m, self.n)
        };
        if m == n.abs() && n < 0 {
            n = -n;
        }
        Self { m, n }
    }

    pub fn degree_vector(&self) -> DegreeVector {
        DegreeVector(vec![self.m, self.n])
    }
}

impl fmt::Display for KnotType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.m, self.n)
    }
}

/// One quasiperiodic factorization class: the cyclic subgroup generated by
/// `generator`, which reaches the loop's degree after `index` steps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiPClass {
    pub index: u64,
    pub generator: DegreeVector,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiPClassSet {
    pub loop_degrees: DegreeVector,
    pub classes: Vec<QuasiPClass>,
    /// Set for the constant (null-homotopic) loop, whose only class is the
    /// trivial one.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub null_homotopic: bool,
}

impl QuasiPClassSet {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Generators up to sign, sorted, for comparing two class sets.
    pub fn generator_set(&self) -> Vec<Vec<i64>> {
        let mut out: Vec<Vec<i64>> = self
            .classes
            .iter()
            .map(|c| {
                let g = c.generator.components();
                let first = g.iter().copied().find(|&x| x != 0).unwrap_or(0);
                if first < 0 {
                    g.iter().map(|x| -x).collect()
                } else {
                    g.to_vec()
                }
            })
            .collect();
        out.sort();
        out
    }
}

/// Positive divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Classes for a loop `S¹ → S¹` of degree `n`: one per divisor of `|n|`.
pub fn quasip_classes_circle(n: i64) -> QuasiPClassSet {
    quasip_classes_torus(&DegreeVector(vec![n]))
}

/// Classes for a loop in a torus with degree vector `deg`: one per divisor
/// `d` of the gcd, generated by `deg / d`.
pub fn quasip_classes_torus(deg: &DegreeVector) -> QuasiPClassSet {
    if deg.is_null() {
        return QuasiPClassSet {
            loop_degrees: deg.clone(),
            classes: vec![QuasiPClass {
                index: 1,
                generator: deg.clone(),
            }],
            null_homotopic: true,
        };
    }
    let classes = divisors(deg.gcd())
        .into_iter()
        .map(|d| QuasiPClass {
            index: d,
            generator: DegreeVector(deg.0.iter().map(|c| c / d as i64).collect()),
        })
        .collect();
    QuasiPClassSet {
        loop_degrees: deg.clone(),
        classes,
        null_homotopic: false,
    }
}

/// Circle codomain: equal absolute degree. Torus codomain: equal up to a
/// global sign.
pub fn quasip_isomorphic(a: &DegreeVector, b: &DegreeVector) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!(
            "degree vectors of dimension {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    if a.dim() == 1 {
        return Ok(a.0[0].unsigned_abs() == b.0[0].unsigned_abs());
    }
    Ok(a == b || *a == b.negated())
}

/// Phase map `t ↦ (m θ(t), n θ(t))` onto the torus, where `θ` is the
/// (optional) trajectory distortion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TorusPhaseMap<T: Scalar = f64> {
    pub folds: (u32, u32),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distortion: Option<CircleMap<T>>,
}

impl<T: Scalar> TorusPhaseMap<T> {
    pub fn eval(&self, t: T) -> (T, T) {
        let theta = match &self.distortion {
            Some(map) => map.eval(t),
            None => t.wrap_angle(),
        };
        let m = T::from_u32(self.folds.0).expect("fold fits");
        let n = T::from_u32(self.folds.1).expect("fold fits");
        ((m * theta).wrap_angle(), (n * theta).wrap_angle())
    }
}

/// Outcome of checking `U ∘ φ` against a signature column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FactorizationCheck<T: Scalar = f64> {
    pub max_error: T,
    pub tolerance: T,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorizationOptions<T: Scalar = f64> {
    pub grid: (usize, usize),
    /// Pulses used for the construction-time check.
    pub verify_pulses: usize,
    /// Defaults to 1.5× the torus function's interpolation bound.
    pub tolerance: Option<T>,
}

impl<T: Scalar> Default for FactorizationOptions<T> {
    fn default() -> Self {
        Self {
            grid: (256, 256),
            verify_pulses: 512,
            tolerance: None,
        }
    }
}

/// `u = U ∘ φ` with `φ` an `(m, n)` torus knot.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusFactorization<T: Scalar = f64> {
    pub knot: KnotType,
    /// `α_B - α_A` in `[0, 2π)`.
    pub relative_angle: T,
    pub torus_function: TorusFunction<T>,
    pub phase_map: TorusPhaseMap<T>,
    pub verification: FactorizationCheck<T>,
}

/// Factor the signature of `comp_a + comp_b` (optionally seen through a
/// trajectory distortion) through the torus, and check the factorization on
/// `opts.verify_pulses` pulses.
pub fn build_torus_factorization<T: Scalar>(
    comp_a: &CompositeScatterer<T>,
    comp_b: &CompositeScatterer<T>,
    geom: &Geometry<T>,
    freq: T,
    opts: &FactorizationOptions<T>,
    distortion: Option<&CircleMap<T>>,
) -> Result<TorusFactorization<T>> {
    let torus_function = render_torus_function(comp_a, comp_b, geom, freq, opts.grid)?;
    let knot = KnotType::new(comp_a.fold as i64, comp_b.fold as i64)?;
    let phase_map = TorusPhaseMap {
        folds: (comp_a.fold, comp_b.fold),
        distortion: distortion.cloned(),
    };
    let tolerance = opts
        .tolerance
        .unwrap_or_else(|| T::lit(1.5) * torus_function.interpolation_bound());

    let target = TargetModel::from_composites(vec![*comp_a, *comp_b]);
    let t_axis = uniform_angles::<T>(opts.verify_pulses.max(1));
    let sig = match distortion {
        Some(map) => apply_distortion(&target, geom, map, &t_axis, &[freq])?,
        None => render_signature(&target, geom, &t_axis, &[freq])?,
    };
    let mut fact = TorusFactorization {
        knot,
        relative_angle: (comp_b.reference_angle - comp_a.reference_angle).wrap_angle(),
        torus_function,
        phase_map,
        verification: FactorizationCheck {
            max_error: T::zero(),
            tolerance,
            passed: true,
        },
    };
    let check = verify_factorization(&fact, &sig, 0, tolerance)?;
    if !check.passed {
        return Err(Error::Tolerance {
            max_error: check.max_error.to_f64_lossy(),
            tolerance: tolerance.to_f64_lossy(),
        });
    }
    fact.verification = check;
    Ok(fact)
}

/// Largest `|U(φ(t_i)) - u(t_i)|` over the pulses of `sig` at one frequency,
/// with `U` interpolated bilinearly.
pub fn verify_factorization<T: Scalar>(
    fact: &TorusFactorization<T>,
    sig: &Signature<T>,
    freq_index: usize,
    tol: T,
) -> Result<FactorizationCheck<T>> {
    let freq = *sig.frequencies().get(freq_index).ok_or_else(|| {
        Error::Dimension(format!(
            "frequency index {freq_index} out of range for {} frequencies",
            sig.n_freqs()
        ))
    })?;
    let expected = fact.torus_function.frequency;
    if (freq - expected).abs() > T::lit(1e-9) * (T::one() + expected.abs()) {
        return Err(Error::Axis(format!(
            "signature frequency {freq} does not match torus frequency {expected}"
        )));
    }
    let mut max_error = T::zero();
    for (i, &t) in sig.angles().iter().enumerate() {
        let (y, z) = fact.phase_map.eval(t);
        let err = (fact.torus_function.interpolate(y, z) - sig.get(i, freq_index)).norm();
        max_error = max_error.max(err);
    }
    Ok(FactorizationCheck {
        max_error,
        tolerance: tol,
        passed: max_error <= tol,
    })
}

/// Best grid translation aligning two torus functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TranslationMatch<T: Scalar = f64> {
    pub min_rms: T,
    /// Shift `δ` in torus radians with `U2(x + δ) ≈ U1(x)`.
    pub best_shift: (T, T),
    pub shift_cells: (usize, usize),
    /// The same shift expressed as rotations of the two composites'
    /// reference angles, when both tori come from the same folds.
    pub reference_shift: Option<(T, T)>,
}

fn fft2<T: Scalar>(data: &mut [Complex<T>], rows: usize, cols: usize, inverse: bool) {
    let mut planner = FftPlanner::<T>::new();
    let (row_fft, col_fft) = if inverse {
        (planner.plan_fft_inverse(cols), planner.plan_fft_inverse(rows))
    } else {
        (planner.plan_fft_forward(cols), planner.plan_fft_forward(rows))
    };
    for row in data.chunks_mut(cols) {
        row_fft.process(row);
    }
    let mut column = vec![Complex::new(T::zero(), T::zero()); rows];
    for j in 0..cols {
        for i in 0..rows {
            column[i] = data[i * cols + j];
        }
        col_fft.process(&mut column);
        for i in 0..rows {
            data[i * cols + j] = column[i];
        }
    }
}

/// Minimum RMS difference between `u1` and every grid translate of `u2`.
///
/// All `rows × cols` shifts are scored at once through the cross-correlation
/// theorem. Shifts whose score is within `1e-12` (relative) of the minimum
/// count as ties and the lexicographically smallest is returned.
pub fn torus_translation_distance<T: Scalar>(
    u1: &TorusFunction<T>,
    u2: &TorusFunction<T>,
) -> Result<TranslationMatch<T>> {
    let (rows, cols) = u1.grid_size();
    if u2.grid_size() != (rows, cols) {
        return Err(Error::Dimension(format!(
            "torus grids {:?} and {:?} differ",
            u1.grid_size(),
            u2.grid_size()
        )));
    }
    let (f1, f2) = (u1.frequency, u2.frequency);
    if (f1 - f2).abs() > T::lit(1e-9) * (T::one() + f1.abs()) {
        return Err(Error::Dimension(format!(
            "torus frequencies {f1} and {f2} differ"
        )));
    }
    let energy = |u: &TorusFunction<T>| u.values().iter().fold(T::zero(), |a, v| a + v.norm_sqr());
    let (e1, e2) = (energy(u1), energy(u2));
    let n = T::from_usize_lossy(rows * cols);

    let mut a = u1.values().to_vec();
    let mut b = u2.values().to_vec();
    fft2(&mut a, rows, cols, false);
    fft2(&mut b, rows, cols, false);
    let mut corr: Vec<Complex<T>> = a.iter().zip(&b).map(|(x, y)| x.conj() * y).collect();
    fft2(&mut corr, rows, cols, true);
    // corr[δ] = N · Σ_x conj(U1(x)) U2(x + δ)

    let two = T::lit(2.0);
    let msd: Vec<T> = corr
        .iter()
        .map(|c| ((e1 + e2 - two * c.re / n) / n).max(T::zero()))
        .collect();
    let best = msd.iter().copied().fold(T::infinity(), T::min);
    let slack = T::lit(1e-12) * (e1 + e2) / n;
    let idx = msd
        .iter()
        .position(|&v| v <= best + slack)
        .expect("grid is nonempty");
    let (di, dj) = (idx / cols, idx % cols);
    let (hy, hz) = u1.spacing();
    let best_shift = (hy * T::from_usize_lossy(di), hz * T::from_usize_lossy(dj));
    let reference_shift = (u1.folds == u2.folds).then(|| {
        let m = T::from_u32(u1.folds.0).expect("fold fits");
        let n = T::from_u32(u1.folds.1).expect("fold fits");
        (best_shift.0 / m, best_shift.1 / n)
    });
    // the correlation form cancels badly near zero, so rescore the winner
    let mut acc = T::zero();
    for i in 0..rows as isize {
        for j in 0..cols as isize {
            acc = acc + (u1.at(i, j) - u2.at(i + di as isize, j + dj as isize)).norm_sqr();
        }
    }
    Ok(TranslationMatch {
        min_rms: (acc / n).sqrt(),
        best_shift,
        shift_cells: (di, dj),
        reference_shift,
    })
}

/// Which input a pulse of a [`CrseWitness`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessSide {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct WitnessPulse<T: Scalar = f64> {
    pub side: WitnessSide,
    pub index: usize,
    pub parameter: T,
}

/// The disjoint-union signature equivalence that exists between any two
/// signatures sharing a codomain: the phase space is the union of both pulse
/// sets and the signature map is pasted from the two.
#[derive(Debug, Clone, PartialEq)]
pub struct CrseWitness<T: Scalar = f64> {
    pub pulses: Vec<WitnessPulse<T>>,
    /// Pasted signature map, one row per pulse.
    pub values: Vec<Complex<T>>,
    pub frequencies: Vec<T>,
}

impl<T: Scalar> CrseWitness<T> {
    pub fn pulse_count(&self) -> usize {
        self.pulses.len()
    }

    pub fn row(&self, pulse: usize) -> &[Complex<T>] {
        let k = self.frequencies.len();
        &self.values[pulse * k..(pulse + 1) * k]
    }
}

pub fn crse_trivial_witness<T: Scalar>(
    sig1: &Signature<T>,
    sig2: &Signature<T>,
) -> Result<CrseWitness<T>> {
    if !sig1.same_frequencies(sig2) {
        return Err(Error::Axis("signatures have different frequency axes".into()));
    }
    let mut pulses = Vec::with_capacity(sig1.pulses() + sig2.pulses());
    let mut values = Vec::with_capacity(sig1.values().len() + sig2.values().len());
    for (side, sig) in [(WitnessSide::First, sig1), (WitnessSide::Second, sig2)] {
        for (index, &parameter) in sig.angles().iter().enumerate() {
            pulses.push(WitnessPulse {
                side,
                index,
                parameter,
            });
        }
        values.extend_from_slice(sig.values());
    }
    Ok(CrseWitness {
        pulses,
        values,
        frequencies: sig1.frequencies().to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(c: &[i64]) -> DegreeVector {
        DegreeVector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn circle_classes() {
        let six = quasip_classes_circle(6);
        assert_eq!(six.len(), 4);
        let idx: Vec<u64> = six.classes.iter().map(|c| c.index).collect();
        assert_eq!(idx, vec![1, 2, 3, 6]);
        let gens: Vec<i64> = six.classes.iter().map(|c| c.generator.components()[0]).collect();
        assert_eq!(gens, vec![6, 3, 2, 1]);
        assert_eq!(quasip_classes_circle(1).len(), 1);
        let neg = quasip_classes_circle(-4);
        assert_eq!(neg.classes.iter().map(|c| c.index).collect::<Vec<_>>(), vec![1, 2, 4]);
        let zero = quasip_classes_circle(0);
        assert!(zero.null_homotopic);
        assert_eq!(zero.len(), 1);
    }

    #[test]
    fn torus_classes() {
        assert_eq!(quasip_classes_torus(&dv(&[2, 3])).len(), 1);
        let c46 = quasip_classes_torus(&dv(&[4, 6]));
        assert_eq!(c46.len(), 2);
        assert_eq!(c46.classes[0].generator, dv(&[4, 6]));
        assert_eq!(c46.classes[1].generator, dv(&[2, 3]));
        let c33 = quasip_classes_torus(&dv(&[3, 3]));
        assert_eq!(c33.generator_set(), vec![vec![1, 1], vec![3, 3]]);
        assert!(quasip_classes_torus(&dv(&[0, 0])).null_homotopic);
    }

    #[test]
    fn class_sets_serialize_as_documented() {
        let json = serde_json::to_value(quasip_classes_torus(&dv(&[4, 6]))).unwrap();
        assert_eq!(
            json,
            serde_json::json!({
                "loop_degrees": [4, 6],
                "classes": [
                    {"index": 1, "generator": [4, 6]},
                    {"index": 2, "generator": [2, 3]}
                ]
            })
        );
    }

    #[test]
    fn isomorphism_examples() {
        assert!(quasip_isomorphic(&dv(&[3]), &dv(&[-3])).unwrap());
        assert!(quasip_isomorphic(&dv(&[2, 3]), &dv(&[2, 3])).unwrap());
        assert!(quasip_isomorphic(&dv(&[2, 3]), &dv(&[-2, -3])).unwrap());
        assert!(!quasip_isomorphic(&dv(&[2, 3]), &dv(&[4, 6])).unwrap());
        assert!(!quasip_isomorphic(&dv(&[2, 3]), &dv(&[2, -3])).unwrap());
        assert!(quasip_isomorphic(&dv(&[2, 3]), &dv(&[2])).is_err());
    }

    #[test]
    fn knot_canonical_form() {
        let k = KnotType::new(-2, -3).unwrap();
        assert_eq!((k.m, k.n), (2, 3));
        let k = KnotType::new(-2, 3).unwrap();
        assert_eq!((k.m, k.n), (2, -3));
        let k = KnotType::new(3, -3).unwrap();
        assert_eq!((k.m, k.n), (3, 3));
        assert!(KnotType::new(0, 3).is_err());
        assert_eq!(k.to_string(), "(3,3)");
    }

    #[test]
    fn divisor_lists() {
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(49), vec![1, 7, 49]);
    }
}
