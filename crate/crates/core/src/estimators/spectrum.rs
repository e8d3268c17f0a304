//! Harmonic support of a signature column and the symmetry folds it implies.
//!
//! A `2π/P`-periodic function of the look angle only has Fourier modes at
//! multiples of `P`, so the occupied bins of an undistorted signature reveal
//! the folds of its composites.

use std::collections::BTreeSet;

use num_complex::Complex;
use num_integer::Integer;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factorization::KnotType;
use crate::scalar::Scalar;
use crate::signal::{AxisKind, Signature};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SpectralSupport<T: Scalar = f64> {
    /// Signed harmonic orders whose magnitude reaches the threshold.
    pub bins: BTreeSet<i64>,
    pub threshold_used: T,
    pub pulses: usize,
}

/// DFT over the pulse axis of one frequency column, keeping bins with
/// magnitude at least `rel_threshold` times the largest.
///
/// Only meaningful when the rows are uniform samples of the look angle;
/// signatures recorded against transmit time under a distortion are refused.
pub fn spectral_support<T: Scalar>(
    sig: &Signature<T>,
    freq_index: usize,
    rel_threshold: T,
) -> Result<SpectralSupport<T>> {
    if !(rel_threshold > T::zero() && rel_threshold < T::one()) {
        return Err(Error::Domain(format!(
            "relative threshold {rel_threshold} must lie in (0, 1)"
        )));
    }
    if freq_index >= sig.n_freqs() {
        return Err(Error::Dimension(format!(
            "frequency index {freq_index} out of range for {} frequencies",
            sig.n_freqs()
        )));
    }
    if sig.meta.axis == AxisKind::Time
        && !sig.meta.distortion.as_ref().is_some_and(|m| m.is_identity())
    {
        return Err(Error::NonUniformAxis(
            "rows are indexed by transmit time under an unknown distortion".into(),
        ));
    }
    let n = sig.pulses();
    let angles = sig.angles();
    let step = T::TAU() / T::from_usize_lossy(n);
    let tol = T::lit(1e-9) * T::TAU();
    for (i, &a) in angles.iter().enumerate() {
        if (a - angles[0] - step * T::from_usize_lossy(i)).abs() > tol {
            return Err(Error::NonUniformAxis(format!(
                "pulse {i} is off the uniform {n}-point circle grid"
            )));
        }
    }

    let mut buf: Vec<Complex<T>> = sig.column(freq_index);
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mags: Vec<T> = buf.iter().map(|c| c.norm()).collect();
    let max = mags.iter().copied().fold(T::zero(), T::max);
    let mut bins = BTreeSet::new();
    if max == T::zero() {
        bins.insert(0);
    } else {
        let cut = rel_threshold * max;
        for (k, &m) in mags.iter().enumerate() {
            if m >= cut {
                bins.insert(signed_bin(k, n));
            }
        }
    }
    Ok(SpectralSupport {
        bins,
        threshold_used: rel_threshold,
        pulses: n,
    })
}

fn signed_bin(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Folds read off a spectral support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKnot {
    /// Every occupied bin is a multiple of one fold.
    Single(u64),
    /// Two interleaved progressions, i.e. a torus knot.
    Pair(KnotType),
}

impl SpectrumKnot {
    pub fn generators(&self) -> Vec<u64> {
        match self {
            SpectrumKnot::Single(m) => vec![*m],
            SpectrumKnot::Pair(k) => vec![k.m.unsigned_abs(), k.n.unsigned_abs()],
        }
    }
}

/// Number of `k` in `1..=max` divisible by some generator.
fn multiples_in_range(gens: &[u64], max: u64) -> u64 {
    (1..=max).filter(|k| gens.iter().any(|g| k % g == 0)).count() as u64
}

/// Folds explaining the occupied bins.
///
/// Orders are taken in absolute value. With `A` the nonzero orders and `g`
/// their gcd, `A` is a single progression when every multiple of `g` up to
/// `max A` is occupied. Otherwise `A` is split by divisibility by each
/// candidate `d`, each part replaced by its gcd, and the pair whose
/// progressions leave the fewest unoccupied multiples wins (ties go to the
/// lexicographically smallest pair). Both progressions must own a bin the
/// other does not contain. A pair is preferred to `g` only when it explains
/// the support more tightly.
///
/// Minimal covering alone would be wrong: `4ℤ ∪ 6ℤ ⊂ 2ℤ ∪ 3ℤ`, yet a (4,6)
/// support leaves 2 and 3 empty.
pub fn knot_from_spectrum<T: Scalar>(support: &SpectralSupport<T>) -> Result<SpectrumKnot> {
    let orders: BTreeSet<u64> = support
        .bins
        .iter()
        .filter(|&&b| b != 0)
        .map(|b| b.unsigned_abs())
        .collect();
    let Some(&max) = orders.iter().next_back() else {
        return Err(Error::Domain(
            "spectral support has no energy outside bin 0".into(),
        ));
    };
    let g = orders.iter().fold(0u64, |acc, &o| acc.gcd(&o));
    let single_count = max / g;

    let mut best: Option<(u64, (u64, u64))> = None;
    for d in 2..=max {
        let (with, without): (Vec<u64>, Vec<u64>) = orders.iter().partition(|&&o| o % d == 0);
        if with.is_empty() || without.is_empty() {
            continue;
        }
        let g1 = with.iter().fold(0u64, |acc, &o| acc.gcd(&o));
        let g2 = without.iter().fold(0u64, |acc, &o| acc.gcd(&o));
        let pair = (g1.min(g2), g1.max(g2));
        if pair.0 == pair.1 {
            continue;
        }
        let owns = |a: u64, b: u64| orders.iter().any(|&o| o % a == 0 && o % b != 0);
        if !owns(pair.0, pair.1) || !owns(pair.1, pair.0) {
            continue;
        }
        let count = multiples_in_range(&[pair.0, pair.1], max);
        if best.is_none_or(|(c, p)| (count, pair) < (c, p)) {
            best = Some((count, pair));
        }
    }

    match best {
        Some((count, (m, n))) if count < single_count => {
            Ok(SpectrumKnot::Pair(KnotType::new(m as i64, n as i64)?))
        }
        None if g == 1 && single_count > orders.len() as u64 => {
            Err(Error::NoCover(support.bins.iter().copied().collect()))
        }
        _ => Ok(SpectrumKnot::Single(g)),
    }
}
