//! Echo sets as point clouds and their Hausdorff distance.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::signal::Signature;

/// Rows of a signature flattened to real vectors `(re₁, im₁, …, re_K, im_K)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud<T: Scalar = f64> {
    dim: usize,
    coords: Vec<T>,
}

impl<T: Scalar> PointCloud<T> {
    pub fn new(dim: usize, coords: Vec<T>) -> Result<Self> {
        if dim == 0 || coords.is_empty() || !coords.len().is_multiple_of(dim) {
            return Err(Error::Dimension(format!(
                "{} coordinates do not form points of dimension {dim}",
                coords.len()
            )));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_signature(sig: &Signature<T>) -> Self {
        let coords = sig.values().iter().flat_map(|c| [c.re, c.im]).collect();
        Self {
            dim: 2 * sig.n_freqs(),
            coords,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[T] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[T]> {
        self.coords.chunks(self.dim)
    }

    /// `max_a min_b |a - b|`.
    pub fn directed_hausdorff(&self, other: &PointCloud<T>) -> Result<T> {
        if self.dim != other.dim {
            return Err(Error::Dimension(format!(
                "point clouds of dimension {} and {}",
                self.dim, other.dim
            )));
        }
        let worst2 = self
            .coords
            .par_chunks(self.dim)
            .map(|a| {
                other
                    .points()
                    .map(|b| sq_dist(a, b))
                    .fold(T::infinity(), T::min)
            })
            .reduce(T::zero, T::max);
        Ok(worst2.sqrt())
    }

    pub fn hausdorff(&self, other: &PointCloud<T>) -> Result<T> {
        Ok(self
            .directed_hausdorff(other)?
            .max(other.directed_hausdorff(self)?))
    }
}

fn sq_dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + (*x - *y) * (*x - *y))
}

/// Symmetric Hausdorff distance between the echo sets of two signatures.
pub fn image_hausdorff<T: Scalar>(sig1: &Signature<T>, sig2: &Signature<T>) -> Result<T> {
    if !sig1.same_frequencies(sig2) {
        return Err(Error::Axis("signatures have different frequency axes".into()));
    }
    PointCloud::from_signature(sig1).hausdorff(&PointCloud::from_signature(sig2))
}

/// Largest distance between consecutive echoes around the loop. Two dense
/// samplings of the same closed curve are within about half of the larger of
/// their gaps in Hausdorff distance.
pub fn sampling_gap<T: Scalar>(sig: &Signature<T>) -> T {
    let n = sig.pulses();
    (0..n)
        .map(|i| {
            sig.row(i)
                .iter()
                .zip(sig.row((i + 1) % n))
                .fold(T::zero(), |acc, (a, b)| acc + (*a - *b).norm_sqr())
                .sqrt()
        })
        .fold(T::zero(), T::max)
}
