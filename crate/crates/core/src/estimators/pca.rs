//! Principal-component embedding of stacked consecutive echoes.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::signal::Signature;

/// Projection of every pulse onto the reference's top three principal axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct EmbeddedTrajectory<T: Scalar = f64> {
    pub points: Vec<[T; 3]>,
    /// Principal axes actually available (< 3 when the reference cloud is
    /// degenerate; missing coordinates are zero).
    pub components: usize,
    pub variances: Vec<T>,
}

impl<T: Scalar> EmbeddedTrajectory<T> {
    pub fn is_degenerate(&self) -> bool {
        self.components < 3
    }
}

/// `window` consecutive rows (cyclically) flattened into one real vector per
/// pulse.
fn stacked<T: Scalar>(sig: &Signature<T>, window: usize) -> DMatrix<f64> {
    let n = sig.pulses();
    let k = sig.n_freqs();
    let dim = 2 * k * window;
    DMatrix::from_fn(n, dim, |i, d| {
        let lag = d / (2 * k);
        let f = (d % (2 * k)) / 2;
        let v = sig.get((i + lag) % n, f);
        if d % 2 == 0 {
            v.re.to_f64_lossy()
        } else {
            v.im.to_f64_lossy()
        }
    })
}

/// Embed `sig` with principal axes computed from `reference` alone, so that
/// embeddings of different signatures share coordinates.
pub fn pca_embed<T: Scalar>(
    sig: &Signature<T>,
    reference: &Signature<T>,
    window: usize,
) -> Result<EmbeddedTrajectory<T>> {
    if window == 0 {
        return Err(Error::Domain("PCA window must be at least one pulse".into()));
    }
    if !sig.same_frequencies(reference) {
        return Err(Error::Axis("signatures have different frequency axes".into()));
    }
    let refs = stacked(reference, window);
    let n = refs.nrows() as f64;
    let mean: DVector<f64> = refs.row_mean().transpose();
    let mut centred = refs.clone();
    for mut row in centred.row_iter_mut() {
        row -= mean.transpose();
    }
    let cov = centred.transpose() * &centred / n;
    let eig = SymmetricEigen::new(cov);

    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let top = eig.eigenvalues[order[0]].max(0.0);
    let components = order
        .iter()
        .take(3)
        .filter(|&&i| eig.eigenvalues[i] > 1e-12 * top && top > 0.0)
        .count();

    let mut axes = Vec::with_capacity(components);
    for &i in order.iter().take(components) {
        let mut v = eig.eigenvectors.column(i).into_owned();
        // sign convention: largest-magnitude entry positive
        let lead = v.iter().copied().fold(0.0f64, |a, x| if x.abs() > a.abs() { x } else { a });
        if lead < 0.0 {
            v = -v;
        }
        axes.push(v);
    }

    let data = stacked(sig, window);
    let points = data
        .row_iter()
        .map(|row| {
            let centred = row.transpose() - &mean;
            let mut p = [T::zero(); 3];
            for (c, axis) in axes.iter().enumerate() {
                p[c] = T::lit(centred.dot(axis));
            }
            p
        })
        .collect();
    Ok(EmbeddedTrajectory {
        points,
        components,
        variances: order
            .iter()
            .take(3)
            .map(|&i| T::lit(eig.eigenvalues[i].max(0.0)))
            .collect(),
    })
}
