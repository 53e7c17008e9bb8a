use serde::{Deserialize, Serialize};

use crate::inner::InnerFunction;

/// Numerical thresholds shared by the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Minimum distance to the boundary spectrum for evaluation on the circle.
    pub boundary: f64,
    /// Distance at which a point counts as a Blaschke zero (pole of the continuation).
    pub zero: f64,
    /// Minimum root separation, relative to `max(1, max |z_j|)`.
    pub separation: f64,
    /// Minimum distance of a root from the unit circle.
    pub circle: f64,
    /// Relative smallest-singular-value threshold for eigenvalue detection.
    pub eigen: f64,
    /// Failed seeds below this smallest singular value are reported.
    pub seed: f64,
    /// Residual gate for eigenpairs.
    pub residual: f64,
    /// Gate for the double-root condition `z0 θ'(z0) + θ(z0) = 0`.
    pub double_root: f64,
    /// Detection of trivial annulus solutions `z² = β`.
    pub trivial: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            boundary: 1e-8,
            zero: 1e-10,
            separation: 1e-7,
            circle: 1e-7,
            eigen: 1e-8,
            seed: 1e-4,
            residual: 1e-6,
            double_root: 1e-9,
            trivial: 1e-9,
        }
    }
}

impl Tolerances {
    /// Defaults adjusted to `theta`: atomic factors get the looser residual gate.
    pub fn for_theta(theta: &InnerFunction) -> Self {
        let mut tol = Self::default();
        if !theta.atoms().is_empty() {
            tol.residual = 1e-3;
        }
        tol
    }
}

/// Default truncation order for eigenfunction expansions.
pub fn default_truncation(theta: &InnerFunction) -> usize {
    if theta.atoms().is_empty() {
        4096
    } else {
        65536
    }
}
