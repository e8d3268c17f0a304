//! Sample generators that illustrate limits of the invariants.

/// Samples of `sin x + sin πx` at `n` evenly spaced points of `[0, x_max)`.
///
/// The two periods are incommensurate, so the phase map onto the torus is
/// dense and no circle factorization or degree vector exists. This is only a
/// documentation aid; no invariant is computed from it.
pub fn incommensurate_samples(n: usize, x_max: f64) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let x = x_max * i as f64 / n as f64;
            (x, x.sin() + (std::f64::consts::PI * x).sin())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    #[test]
    fn stays_within_bounds() {
        let s = super::incommensurate_samples(10_000, 500.0);
        assert!(s.iter().all(|(_, v)| v.abs() <= 2.0));
        assert!(s.iter().any(|(_, v)| *v > 1.9));
    }
}
