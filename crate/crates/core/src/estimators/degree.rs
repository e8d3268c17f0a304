//! Winding number of a sampled circle map by minimal unwrapping.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::trajectory::SampledCircleMap;

/// Sum of the minimal increments around the loop, in turns, rounded.
pub fn estimate_degree<T: Scalar>(samples: &SampledCircleMap<T>) -> Result<i64> {
    let mut total = T::zero();
    for (index, step) in samples.increments().enumerate() {
        if step.abs() >= T::PI() {
            return Err(Error::StepAmbiguity {
                index,
                step: step.to_f64_lossy(),
            });
        }
        total = total + step;
    }
    let turns = total / T::TAU();
    let rounded = turns.round();
    let residual = (turns - rounded).abs();
    if residual >= T::lit(0.25) {
        return Err(Error::Residual {
            residual: residual.to_f64_lossy(),
        });
    }
    Ok(rounded.to_i64().expect("winding fits in i64"))
}

/// Degree of raw angle samples taken around a closed loop.
pub fn estimate_degree_of_angles<T: Scalar>(angles: &[T]) -> Result<i64> {
    estimate_degree(&SampledCircleMap::new(angles.to_vec())?)
}
