//! The square linear system whose kernel encodes `P₁`, `P₂`.
//!
//! For a root `z` of `Q` inside the disk the row is
//! `[z^N θ(z), …, z^{N+M−1} θ(z), 1, z, …, z^{N−1}]`; for a root outside it is
//! `[z^N, …, z^{N+M−1}, t, z t, …, z^{N−1} t]` with `t = conj(θ(1/z̄))`.
//! `P₁` has degree at most `M − 1` and `P₂` at most `N − 1`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, TtoError};
use crate::inner::InnerFunction;
use crate::linalg;
use crate::symbol::{LaurentSymbol, RootConfiguration, Side};
use crate::tolerances::Tolerances;

type C64 = Complex64;

/// Criterion system at a fixed λ. `matrix` has its rows scaled to unit norm.
#[derive(Debug, Clone)]
pub struct CriterionSystem {
    pub lambda: C64,
    pub config: RootConfiguration,
    pub matrix: DMatrix<C64>,
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// Right singular vector of `sigma_min`: `M` coefficients of `P₁` then
    /// `N` coefficients of `P₂`.
    pub kernel: Vec<C64>,
    /// θ(z_j) for inside roots, `conj(θ(1/z̄_j))` for outside roots.
    pub theta_at_roots: Vec<C64>,
    pub m: usize,
    pub n: usize,
}

impl CriterionSystem {
    /// `sigma_min / ‖matrix‖₂`.
    pub fn relative_sigma(&self) -> f64 {
        if self.sigma_max > 0.0 {
            self.sigma_min / self.sigma_max
        } else {
            0.0
        }
    }

    pub fn is_candidate(&self, tol: &Tolerances) -> bool {
        self.sigma_min < tol.eigen * self.sigma_max
    }

    /// Splits a coefficient vector into `(P₁, P₂)`.
    pub fn split<'a>(&self, v: &'a [C64]) -> (&'a [C64], &'a [C64]) {
        v.split_at(self.m)
    }
}

/// θ-factor of the row for a root on the given side.
pub(crate) fn theta_factor(theta: &InnerFunction, z: C64, side: Side, tol: &Tolerances) -> Result<C64> {
    match side {
        Side::Inside => Ok(theta.value_unchecked(z)),
        Side::Outside => {
            let w = z.conj().inv();
            if theta.zeros().iter().any(|&a| (a - w).norm() < tol.zero) {
                return Err(TtoError::Pole { z });
            }
            Ok(theta.reflected_conj(z))
        }
    }
}

/// Unscaled row for one root.
pub(crate) fn criterion_row(z: C64, side: Side, t: C64, m: usize, n: usize) -> Vec<C64> {
    let mut row = Vec::with_capacity(m + n);
    let zn = z.powu(n as u32);
    let mut p = C64::new(1.0, 0.0);
    for _ in 0..m {
        row.push(match side {
            Side::Inside => zn * p * t,
            Side::Outside => zn * p,
        });
        p *= z;
    }
    let mut p = C64::new(1.0, 0.0);
    for _ in 0..n {
        row.push(match side {
            Side::Inside => p,
            Side::Outside => p * t,
        });
        p *= z;
    }
    row
}

/// Assembles the system for an already classified root configuration.
pub fn assemble(
    theta: &InnerFunction,
    phi: &LaurentSymbol,
    config: RootConfiguration,
    tol: &Tolerances,
) -> Result<CriterionSystem> {
    let (m, n) = (phi.m(), phi.n());
    let size = m + n;
    let mut matrix = DMatrix::<C64>::zeros(size, size);
    let mut theta_at_roots = Vec::with_capacity(size);
    for (j, root) in config.roots.iter().enumerate() {
        let t = theta_factor(theta, root.z, root.side, tol)?;
        theta_at_roots.push(t);
        let row = criterion_row(root.z, root.side, t, m, n);
        let norm = row.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(TtoError::Linalg(format!("degenerate criterion row at z = {}", root.z)));
        }
        for (k, x) in row.into_iter().enumerate() {
            matrix[(j, k)] = x / norm;
        }
    }
    let svd = linalg::smallest_singular(&matrix)?;
    Ok(CriterionSystem {
        lambda: config.lambda,
        config,
        matrix,
        sigma_min: svd.sigma_min,
        sigma_max: svd.sigma_max,
        kernel: svd.right,
        theta_at_roots,
        m,
        n,
    })
}

/// Builds the criterion system at λ.
pub fn build_criterion(
    theta: &InnerFunction,
    phi: &LaurentSymbol,
    lambda: C64,
    tol: &Tolerances,
) -> Result<CriterionSystem> {
    let config = phi.roots_of_q(lambda, tol)?;
    assemble(theta, phi, config, tol)
}

/// Determinant of the unscaled system with the roots in the given order and
/// classified by the given sides. Analytic in λ while the labels are kept.
pub(crate) fn raw_determinant(theta: &InnerFunction, phi: &LaurentSymbol, roots: &[C64], sides: &[Side]) -> C64 {
    let (m, n) = (phi.m(), phi.n());
    let size = m + n;
    let mut matrix = DMatrix::<C64>::zeros(size, size);
    for (j, (&z, &side)) in roots.iter().zip(sides).enumerate() {
        let t = match side {
            Side::Inside => theta.value_unchecked(z),
            Side::Outside => theta.reflected_conj(z),
        };
        for (k, x) in criterion_row(z, side, t, m, n).into_iter().enumerate() {
            matrix[(j, k)] = x;
        }
    }
    matrix.determinant()
}
