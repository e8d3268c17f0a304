//! Smooth circle maps modelling the unknown look angle as a function of
//! transmit time.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::signal::{
    check_angle_axis, check_increasing, render_rows, AxisKind, Geometry, Signature,
    SignatureMeta, TargetModel,
};

/// One sinusoidal term `amplitude · sin(order · t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Harmonic<T: Scalar = f64> {
    pub order: u32,
    pub amplitude: T,
    pub phase: T,
}

/// `φ(t) = offset + degree·t + Σ a_j sin(j t + ψ_j)`, reduced mod 2π.
///
/// The harmonic part is 2π-periodic so `degree` is the topological degree.
/// Requiring `Σ j|a_j| < |degree|` keeps `φ'` away from zero, i.e. the map has
/// constant rank. The only degree-0 map allowed is the constant map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct CircleMap<T: Scalar = f64> {
    pub degree: i64,
    #[serde(default)]
    pub offset: T,
    #[serde(default)]
    pub harmonics: Vec<Harmonic<T>>,
}

impl<T: Scalar> CircleMap<T> {
    pub fn new(degree: i64, harmonics: Vec<Harmonic<T>>, offset: T) -> Result<Self> {
        let map = Self {
            degree,
            offset,
            harmonics,
        };
        map.validate()?;
        Ok(map)
    }

    pub fn identity() -> Self {
        Self::linear(1)
    }

    /// `t ↦ k t`.
    pub fn linear(degree: i64) -> Self {
        Self {
            degree,
            offset: T::zero(),
            harmonics: Vec::new(),
        }
    }

    pub fn constant(offset: T) -> Self {
        Self {
            degree: 0,
            offset,
            harmonics: Vec::new(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.degree == 1 && self.offset == T::zero() && self.harmonics.iter().all(|h| h.amplitude == T::zero())
    }

    /// `Σ j |a_j|`, the largest possible deviation of `φ'` from the degree.
    pub fn harmonic_weight(&self) -> T {
        self.harmonics.iter().fold(T::zero(), |acc, h| {
            acc + T::from_u32(h.order).expect("order fits") * h.amplitude.abs()
        })
    }

    /// Lower bound on `|φ'(t)|`.
    pub fn rank_margin(&self) -> T {
        T::from_i64(self.degree.abs()).expect("degree fits") - self.harmonic_weight()
    }

    pub fn max_order(&self) -> u32 {
        self.harmonics.iter().map(|h| h.order).max().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.offset.is_finite() {
            return Err(Error::InvalidMap("non-finite offset".into()));
        }
        for h in &self.harmonics {
            if h.order == 0 {
                return Err(Error::InvalidMap("harmonic order must be positive".into()));
            }
            if !(h.amplitude.is_finite() && h.phase.is_finite()) {
                return Err(Error::InvalidMap("non-finite harmonic".into()));
            }
        }
        if self.degree == 0 {
            if !self.harmonics.is_empty() {
                return Err(Error::InvalidMap(
                    "a degree-0 map must be the constant map".into(),
                ));
            }
        } else if self.rank_margin() <= T::zero() {
            return Err(Error::InvalidMap(format!(
                "harmonic weight {} must stay below |degree| = {}",
                self.harmonic_weight(),
                self.degree.abs()
            )));
        }
        Ok(())
    }

    /// Unreduced value on the real line.
    pub fn lift(&self, t: T) -> T {
        let k = T::from_i64(self.degree).expect("degree fits");
        self.harmonics.iter().fold(self.offset + k * t, |acc, h| {
            let j = T::from_u32(h.order).expect("order fits");
            acc + h.amplitude * (j * t + h.phase).sin()
        })
    }

    pub fn derivative(&self, t: T) -> T {
        let k = T::from_i64(self.degree).expect("degree fits");
        self.harmonics.iter().fold(k, |acc, h| {
            let j = T::from_u32(h.order).expect("order fits");
            acc + h.amplitude * j * (j * t + h.phase).cos()
        })
    }

    /// `φ(t)` in `[0, 2π)`.
    pub fn eval(&self, t: T) -> T {
        self.lift(t).wrap_angle()
    }
}

/// Checked `φ(t)`.
pub fn eval_map<T: Scalar>(map: &CircleMap<T>, t: T) -> Result<T> {
    if !t.is_finite() {
        return Err(Error::NonFinite("map argument"));
    }
    Ok(map.eval(t))
}

pub fn map_degree<T: Scalar>(map: &CircleMap<T>) -> i64 {
    map.degree
}

/// Circle map known only through samples on the uniform loop
/// `t_i = 2πi/len`. Consecutive samples (including last → first) move by
/// less than π, so the minimal lift is unambiguous.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SampledCircleMap<T: Scalar = f64> {
    samples: Vec<T>,
}

impl<T: Scalar> SampledCircleMap<T> {
    pub fn new(samples: Vec<T>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InsufficientSampling(
                "a sampled loop needs at least two samples".into(),
            ));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFinite("circle map sample"));
        }
        let out = Self { samples };
        for (index, step) in out.increments().enumerate() {
            if step.abs() >= T::PI() {
                return Err(Error::StepAmbiguity {
                    index,
                    step: step.to_f64_lossy(),
                });
            }
        }
        Ok(out)
    }

    /// Samples `map` at `n` uniform parameters.
    pub fn from_map(map: &CircleMap<T>, n: usize) -> Result<Self> {
        let nf = T::from_usize_lossy(n);
        Self::new(
            (0..n)
                .map(|i| map.eval(T::TAU() * T::from_usize_lossy(i) / nf))
                .collect(),
        )
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Minimal signed increments, closing the loop at the end.
    pub fn increments(&self) -> impl Iterator<Item = T> + '_ {
        let n = self.samples.len();
        (0..n).map(move |i| (self.samples[(i + 1) % n] - self.samples[i]).wrap_signed())
    }
}

/// Samples of `outer ∘ inner` on `n_samples` uniform parameters.
pub fn compose_maps<T: Scalar>(
    outer: &CircleMap<T>,
    inner: &CircleMap<T>,
    n_samples: usize,
) -> Result<SampledCircleMap<T>> {
    outer.validate()?;
    inner.validate()?;
    let orders: u64 = outer
        .harmonics
        .iter()
        .chain(&inner.harmonics)
        .map(|h| h.order as u64)
        .sum();
    let needed = 4 * ((outer.degree * inner.degree).unsigned_abs() + orders);
    if (n_samples as u64) < needed {
        return Err(Error::InsufficientSampling(format!(
            "{n_samples} samples, composition needs at least {needed}"
        )));
    }
    let nf = T::from_usize_lossy(n_samples);
    let samples = (0..n_samples)
        .map(|i| outer.eval(inner.eval(T::TAU() * T::from_usize_lossy(i) / nf)))
        .collect();
    SampledCircleMap::new(samples)
}

/// Deterministic degree-1 distortion with harmonics of orders
/// `1..=max_order`. The amplitudes are rescaled so that `Σ j|a_j|` equals
/// `strength`, hence `φ' ≥ 1 - strength > 0`.
pub fn random_distortion<T: Scalar>(
    seed: u64,
    max_order: u32,
    strength: T,
) -> Result<CircleMap<T>> {
    if !strength.is_finite() || strength < T::zero() || strength >= T::one() {
        return Err(Error::InvalidMap(format!(
            "distortion strength {strength} must lie in [0, 1)"
        )));
    }
    if strength == T::zero() || max_order == 0 {
        return Ok(CircleMap::identity());
    }
    let strength = strength.to_f64_lossy();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<(u32, f64, f64)> = (1..=max_order)
        .map(|order| {
            let weight: f64 = rng.random_range(0.05..1.0);
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            (order, sign * weight, phase)
        })
        .collect();
    let total: f64 = raw.iter().map(|(j, a, _)| *j as f64 * a.abs()).sum();
    let mut scale = strength / total;
    // keep Σ j|a_j| ≤ strength after rounding
    while raw.iter().map(|(j, a, _)| *j as f64 * (a * scale).abs()).sum::<f64>() > strength {
        scale *= 1.0 - 4.0 * f64::EPSILON;
    }
    let harmonics = raw
        .into_iter()
        .map(|(order, a, phase)| Harmonic {
            order,
            amplitude: T::lit(a * scale),
            phase: T::lit(phase),
        })
        .collect();
    CircleMap::new(1, harmonics, T::zero())
}

/// Signature recorded at transmit times `t_axis` when the look angle is
/// `φ(t)`.
pub fn apply_distortion<T: Scalar>(
    target: &TargetModel<T>,
    geom: &Geometry<T>,
    map: &CircleMap<T>,
    t_axis: &[T],
    freqs: &[T],
) -> Result<Signature<T>> {
    target.validate(geom)?;
    map.validate()?;
    check_angle_axis(t_axis)?;
    check_increasing("frequency", freqs)?;
    let thetas: Vec<T> = t_axis.iter().map(|&t| map.eval(t)).collect();
    let values: Vec<Complex<T>> = render_rows(target, geom, &thetas, freqs);
    Signature::new(
        values,
        t_axis.to_vec(),
        freqs.to_vec(),
        SignatureMeta {
            target: Some(target.clone()),
            geometry: Some(*geom),
            axis: AxisKind::Time,
            distortion: Some(map.clone()),
            ..Default::default()
        },
    )
}
