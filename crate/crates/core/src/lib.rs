//! Circular synthetic aperture sonar signatures of symmetric point-scatterer
//! targets, smooth trajectory distortions, and the topological quantities
//! that survive those distortions: circle-map degrees, torus knot types,
//! quasiperiodic factorization classes, and image-set comparisons.
//!
//! All numeric types are generic over [`Scalar`] (`f32` or `f64`) and default
//! to `f64`; `*32` aliases are provided for single precision.

pub mod demo;
pub mod error;
pub mod estimators;
pub mod factorization;
pub mod scalar;
pub mod signal;
pub mod trajectory;

pub use error::{Error, Result};
pub use estimators::{
    classify, estimate_degree, estimate_degree_of_angles, image_hausdorff, sampling_gap, knot_from_spectrum, pca_embed,
    phase_pullback_knot, spectral_support, Candidate, CandidateReport, ClassificationReport, ClassifyOptions,
    EmbeddedTrajectory, PointCloud, PullbackOptions, PullbackResult, SpectralSupport,
    SpectrumKnot,
};
pub use factorization::{
    build_torus_factorization, crse_trivial_witness, quasip_classes_circle,
    quasip_classes_torus, quasip_isomorphic, torus_translation_distance, verify_factorization,
    CrseWitness, DegreeVector, FactorizationCheck, FactorizationOptions, KnotType, QuasiPClass,
    QuasiPClassSet, TorusFactorization, TorusPhaseMap, TranslationMatch,
};
pub use num_complex::Complex;
pub use scalar::Scalar;
pub use signal::{
    eval_composite, eval_point_scatterers, eval_target, linspace, render_signature, render_target_tori,
    render_torus_function, uniform_angles, AxisKind, CompositeScatterer, Geometry,
    PointScatterer, Signature, SignatureMeta, TargetModel, TorusFunction,
};
pub use trajectory::{
    apply_distortion, compose_maps, eval_map, map_degree, random_distortion, CircleMap,
    Harmonic, SampledCircleMap,
};

pub type Complex64 = Complex<f64>;
pub type Complex32 = Complex<f32>;

pub type PointScatterer32 = PointScatterer<f32>;
pub type CompositeScatterer32 = CompositeScatterer<f32>;
pub type TargetModel32 = TargetModel<f32>;
pub type Geometry32 = Geometry<f32>;
pub type Signature32 = Signature<f32>;
pub type TorusFunction32 = TorusFunction<f32>;
pub type CircleMap32 = CircleMap<f32>;
pub type SampledCircleMap32 = SampledCircleMap<f32>;
pub type TorusFactorization32 = TorusFactorization<f32>;

pub type PointScatterer64 = PointScatterer<f64>;
pub type CompositeScatterer64 = CompositeScatterer<f64>;
pub type TargetModel64 = TargetModel<f64>;
pub type Geometry64 = Geometry<f64>;
pub type Signature64 = Signature<f64>;
pub type TorusFunction64 = TorusFunction<f64>;
pub type CircleMap64 = CircleMap<f64>;
pub type SampledCircleMap64 = SampledCircleMap<f64>;
pub type TorusFactorization64 = TorusFactorization<f64>;
