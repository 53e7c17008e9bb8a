//! Eigenvectors available in closed form when θ vanishes at a point `w`:
//! `A_φ(θ/(z − w)) = φ(w) θ/(z − w)` and `A_{φ̄} k_w = conj(φ(w)) k_w` for an
//! analytic polynomial φ.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, TtoError};
use crate::fourier::{self, FourierSeries, ModelSpaceGrid};
use crate::inner::InnerFunction;
use crate::poly;
use crate::symbol::LaurentSymbol;

type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObservationResiduals {
    /// Relative residual of `θ/(z − w)` under `A_φ` against `φ(w)`.
    pub residual_analytic: f64,
    /// Relative residual of `k_w` under `A_{φ̄}` against `conj(φ(w))`.
    pub residual_antianalytic: f64,
    pub eigenvalue: C64,
}

/// Checks both closed-form eigenvectors at truncation `k`.
pub fn verify_observation(theta: &InnerFunction, phi: &[C64], w: C64, k: usize) -> Result<ObservationResiduals> {
    if !(w.norm() < 1.0) {
        return Err(TtoError::Precondition(format!("{w} is not in the open disk")));
    }
    let tw = theta.value_unchecked(w);
    if tw.norm() > 1e-10 {
        return Err(TtoError::Precondition(format!(
            "theta does not vanish at {w} (|theta| = {:e})",
            tw.norm()
        )));
    }
    let symbol = LaurentSymbol::analytic_only(phi.to_vec())?;
    let eigenvalue = poly::eval(phi, w);
    let grid = ModelSpaceGrid::new(theta, fourier::grid_size(k, symbol.m(), symbol.m()));

    let mut buf: Vec<C64> = grid.points().iter().map(|&z| theta.divided_difference(z, w)).collect();
    fourier::samples_to_coefficients(&mut buf);
    buf.truncate(k);
    let quotient = FourierSeries::new(buf);

    let mut kernel = Vec::with_capacity(k);
    let mut p = C64::new(1.0, 0.0);
    for _ in 0..k {
        kernel.push(p);
        p *= w.conj();
    }
    let kernel = FourierSeries::new(kernel);

    Ok(ObservationResiduals {
        residual_analytic: fourier::relative_residual(&grid, &symbol, &quotient, eigenvalue)?,
        residual_antianalytic: fourier::relative_residual(&grid, &symbol.conjugate(), &kernel, eigenvalue.conj())?,
        eigenvalue,
    })
}
