//! Eigenfunctions from a kernel vector of the criterion system.

use num_complex::Complex64;

use super::system::CriterionSystem;
use crate::error::{Result, TtoError};
use crate::fourier::{self, FourierSeries, ModelSpaceGrid};
use crate::inner::InnerFunction;
use crate::poly;
use crate::symbol::{LaurentSymbol, Side};
use crate::tolerances::Tolerances;

type C64 = Complex64;

/// Distance below which the outside-root quotient switches to the divided
/// difference of θ.
const NEAR_ROOT: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub lambda: C64,
    pub p1: Vec<C64>,
    pub p2: Vec<C64>,
    /// Unit-norm truncated expansion of the eigenfunction.
    pub f: FourierSeries,
    /// `‖A_Φ f − λ f‖ / ‖f‖`.
    pub residual: f64,
    /// `‖P_+(θ̄ f)‖`.
    pub membership_defect: f64,
    /// Energy fraction of `A_Φ f` above the truncation.
    pub truncation_tail: f64,
}

/// Weights `w_j` with `f(z) = Σ w_j q_j(z)`, where `q_j` is the difference
/// quotient attached to root `z_j`.
fn root_weights(sys: &CriterionSystem, p1: &[C64], p2: &[C64]) -> Vec<C64> {
    let n = sys.n as u32;
    sys.config
        .roots
        .iter()
        .zip(&sys.config.beta)
        .map(|(r, &b)| match r.side {
            Side::Inside => b * r.z.powu(n) * poly::eval(p1, r.z),
            Side::Outside => b * poly::eval(p2, r.z),
        })
        .collect()
}

/// Pointwise value of the eigenfunction at `z` given θ(z).
fn value_at(theta: &InnerFunction, sys: &CriterionSystem, weights: &[C64], z: C64, theta_z: C64) -> C64 {
    let mut f = C64::new(0.0, 0.0);
    for ((r, &w), &t) in sys.config.roots.iter().zip(weights).zip(&sys.theta_at_roots) {
        let q = match r.side {
            Side::Inside => theta.divided_difference(z, r.z),
            Side::Outside => {
                if (z - r.z).norm() > NEAR_ROOT {
                    (C64::new(1.0, 0.0) - theta_z * t) / (z - r.z)
                } else {
                    // θ(z_j) t = 1 for the pseudocontinuation.
                    -t * theta.divided_difference(z, r.z)
                }
            }
        };
        f += w * q;
    }
    f
}

/// Evaluates the eigenfunction built from `(P₁, P₂)` at a point of the
/// closed disk.
pub fn eigenfunction_value(theta: &InnerFunction, sys: &CriterionSystem, p1: &[C64], p2: &[C64], z: C64) -> C64 {
    let weights = root_weights(sys, p1, p2);
    value_at(theta, sys, &weights, z, theta.value_unchecked(z))
}

/// Samples the eigenfunction on a uniform grid, truncates its expansion to
/// `truncation` modes, normalizes, and checks the residual and model-space
/// membership.
pub fn construct_eigenfunction(
    theta: &InnerFunction,
    phi: &LaurentSymbol,
    sys: &CriterionSystem,
    kernel: &[C64],
    truncation: usize,
    tol: &Tolerances,
) -> Result<Eigenpair> {
    if kernel.len() != sys.m + sys.n {
        return Err(TtoError::InvalidInput(format!(
            "kernel vector has length {}, expected {}",
            kernel.len(),
            sys.m + sys.n
        )));
    }
    if truncation == 0 {
        return Err(TtoError::InvalidInput("truncation must be positive".into()));
    }
    let (p1, p2) = sys.split(kernel);
    let grid = ModelSpaceGrid::new(theta, fourier::grid_size(truncation, sys.m, sys.n));
    let weights = root_weights(sys, p1, p2);
    let idx: Vec<usize> = (0..grid.size()).collect();
    let mut buf = crate::parallel::map(&idx, |&i| {
        value_at(theta, sys, &weights, grid.points()[i], grid.theta_samples()[i])
    });
    fourier::samples_to_coefficients(&mut buf);
    buf.truncate(truncation);
    let mut f = FourierSeries::new(buf);
    let norm = f.norm();
    if !(norm.is_finite() && norm > 1e-300) {
        return Err(TtoError::NoConvergence(format!(
            "eigenfunction for λ = {} vanishes",
            sys.lambda
        )));
    }
    // Unit norm, largest coefficient real and positive.
    let lead = f
        .coeffs()
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("nonempty");
    let scale = lead.conj() / (lead.norm() * norm);
    f.scale(scale);
    let p1: Vec<C64> = p1.iter().map(|x| x * scale).collect();
    let p2: Vec<C64> = p2.iter().map(|x| x * scale).collect();

    let applied = fourier::apply_tto_on(&grid, phi, &f)?;
    let residual = applied
        .value
        .coeffs()
        .iter()
        .zip(f.coeffs())
        .map(|(a, x)| (a - sys.lambda * x).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if !(residual <= tol.residual) {
        return Err(TtoError::ResidualTooLarge {
            residual,
            tolerance: tol.residual,
        });
    }
    let membership_defect = grid.membership_defect(f.coeffs());
    if !(membership_defect <= tol.residual) {
        return Err(TtoError::NotInModelSpace {
            defect: membership_defect,
            tolerance: tol.residual,
        });
    }
    Ok(Eigenpair {
        lambda: sys.lambda,
        p1,
        p2,
        f,
        residual,
        membership_defect,
        truncation_tail: applied.discarded_tail,
    })
}

/// `‖Q f − z^N θ P₁ − P₂‖` in L² of the circle, on the grid used for `f`.
pub fn factorization_defect(theta: &InnerFunction, phi: &LaurentSymbol, pair: &Eigenpair) -> f64 {
    let (m, n) = (phi.m(), phi.n());
    let grid = ModelSpaceGrid::new(theta, fourier::grid_size(pair.f.len(), m, n));
    let samples = grid.samples(pair.f.coeffs());
    let q = phi.q_coefficients(pair.lambda);
    let total: f64 = grid
        .points()
        .iter()
        .zip(grid.theta_samples())
        .zip(&samples)
        .map(|((&z, &t), &fz)| {
            let d = poly::eval(&q, z) * fz - z.powu(n as u32) * t * poly::eval(&pair.p1, z) - poly::eval(&pair.p2, z);
            d.norm_sqr()
        })
        .sum();
    (total / grid.size() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::super::system::build_criterion;
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pair_for(theta: &InnerFunction, phi: &LaurentSymbol, lambda: C64) -> Eigenpair {
        let tol = Tolerances::default();
        let sys = build_criterion(theta, phi, lambda, &tol).unwrap();
        construct_eigenfunction(theta, phi, &sys, &sys.kernel.clone(), 64, &tol).unwrap()
    }

    #[test]
    fn z_squared_eigenfunctions_match_dense_eigenvectors() {
        let theta = InnerFunction::monomial(2);
        let phi = LaurentSymbol::three_term(c(1.0, 0.0), c(0.0, 0.0), c(4.0, 0.0)).unwrap();
        for (lambda, slope) in [(2.0, 2.0), (-2.0, -2.0)] {
            let pair = pair_for(&theta, &phi, c(lambda, 0.0));
            assert!(pair.residual < 1e-10, "residual {}", pair.residual);
            assert!((pair.f.norm() - 1.0).abs() < 1e-14);
            let f = pair.f.coeffs();
            assert!((f[1] / f[0] - c(slope, 0.0)).norm() < 1e-10);
            assert!(f[2..].iter().all(|x| x.norm() < 1e-12));
        }
    }

    #[test]
    fn factorization_holds_for_blaschke_theta() {
        let theta = InnerFunction::from_zeros(&[c(0.3, 0.2), c(-0.5, 0.1)]).unwrap();
        let phi = LaurentSymbol::three_term(c(1.0, 0.0), c(0.0, 0.0), c(4.0, 0.0)).unwrap();
        let tol = Tolerances::default();
        // Any admissible eigenvalue of the dense matrix will do.
        let lambda = crate::oracle::dense_spectrum(&crate::oracle::build_matrix(&theta, &phi).unwrap())
            .unwrap()
            .into_iter()
            .map(|e| e.lambda)
            .find(|&l| build_criterion(&theta, &phi, l, &tol).is_ok())
            .expect("admissible eigenvalue");
        let sys = build_criterion(&theta, &phi, lambda, &tol).unwrap();
        let pair = construct_eigenfunction(&theta, &phi, &sys, &sys.kernel.clone(), 512, &tol).unwrap();
        assert!(factorization_defect(&theta, &phi, &pair) < 1e-6);
    }

    #[test]
    fn wrong_lambda_is_rejected_by_residual() {
        let theta = InnerFunction::monomial(2);
        let phi = LaurentSymbol::three_term(c(1.0, 0.0), c(0.0, 0.0), c(4.0, 0.0)).unwrap();
        let tol = Tolerances::default();
        let sys = build_criterion(&theta, &phi, c(0.5, 0.0), &tol).unwrap();
        let err = construct_eigenfunction(&theta, &phi, &sys, &sys.kernel.clone(), 64, &tol).unwrap_err();
        assert!(matches!(err, TtoError::ResidualTooLarge { .. }));
    }
}
