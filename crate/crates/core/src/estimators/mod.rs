//! Invariants recovered from sampled signatures alone.

mod classify;
mod degree;
mod image;
mod pca;
mod pullback;
mod spectrum;

pub use classify::{classify, Candidate, CandidateReport, ClassificationReport, ClassifyOptions};
pub use degree::{estimate_degree, estimate_degree_of_angles};
pub use image::{image_hausdorff, sampling_gap, PointCloud};
pub use pca::{pca_embed, EmbeddedTrajectory};
pub use pullback::{phase_pullback_knot, PullbackOptions, PullbackResult};
pub use spectrum::{knot_from_spectrum, spectral_support, SpectralSupport, SpectrumKnot};
