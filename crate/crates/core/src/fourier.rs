//! Truncated Fourier expansions of H² functions and the compression
//! `A_Φ f = P_θ(Φ f)` computed with FFTs on a uniform grid of the circle.

use std::cell::RefCell;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Result, TtoError};
use crate::inner::InnerFunction;
use crate::symbol::LaurentSymbol;

type C64 = Complex64;

/// Radius used instead of the circle at grid points next to an atom.
pub const ATOM_INSET_RADIUS: f64 = 1.0 - 1e-9;

/// Relative tail energy above the truncation that triggers a warning.
pub const TRUNCATION_WARNING: f64 = 1e-8;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place forward DFT scaled by `1/L`: samples on the grid to Fourier
/// coefficients (index `n ≥ L/2` holds mode `n − L`).
pub fn samples_to_coefficients(buf: &mut [C64]) {
    let n = buf.len();
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n));
    fft.process(buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|x| *x *= scale);
}

/// In-place inverse DFT without scaling: coefficients to grid samples.
pub fn coefficients_to_samples(buf: &mut [C64]) {
    let n = buf.len();
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n));
    fft.process(buf);
}

/// Working grid size for a band product of length `k + m + n`.
pub fn grid_size(k: usize, m: usize, n: usize) -> usize {
    (4 * (k + m + n)).next_power_of_two().max(16)
}

/// Analytic Fourier coefficients `f_0..f_{K−1}` of an H² function.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries {
    coeffs: Vec<C64>,
}

impl FourierSeries {
    pub fn new(coeffs: Vec<C64>) -> Self {
        Self { coeffs }
    }

    pub fn zeros(k: usize) -> Self {
        Self::new(vec![C64::new(0.0, 0.0); k])
    }

    /// Monomial `z^j` in a truncation of order `k`.
    pub fn monomial(j: usize, k: usize) -> Self {
        let mut s = Self::zeros(k);
        s.coeffs[j] = C64::new(1.0, 0.0);
        s
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// L² norm on the circle (ℓ² norm of the coefficients).
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&mut self, s: C64) {
        self.coeffs.iter_mut().for_each(|c| *c *= s);
    }

    /// `‖self − other‖` over the common truncation (missing entries are zero).
    pub fn distance(&self, other: &FourierSeries) -> f64 {
        let n = self.len().max(other.len());
        (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or_default();
                let b = other.coeffs.get(i).copied().unwrap_or_default();
                (a - b).norm_sqr()
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Evaluates the truncated series at `z` by Horner's rule.
    pub fn eval(&self, z: C64) -> C64 {
        crate::poly::eval(&self.coeffs, z)
    }

    /// Samples `f` on an `L`-point grid and keeps the first `k` coefficients.
    pub fn from_fn(k: usize, size: usize, f: impl Fn(C64) -> C64) -> Self {
        let mut buf: Vec<C64> = (0..size).map(|m| f(grid_point(m, size))).collect();
        samples_to_coefficients(&mut buf);
        buf.truncate(k);
        Self::new(buf)
    }
}

pub fn grid_point(m: usize, size: usize) -> C64 {
    C64::from_polar(1.0, TAU * m as f64 / size as f64)
}

/// θ sampled on a uniform circle grid, with the points next to each atom
/// pulled inside to radius `1 − 1e−9`.
#[derive(Debug, Clone)]
pub struct ModelSpaceGrid {
    size: usize,
    points: Vec<C64>,
    theta: Vec<C64>,
}

impl ModelSpaceGrid {
    pub fn new(theta: &InnerFunction, size: usize) -> Self {
        assert!(size.is_power_of_two(), "grid size must be a power of two");
        let mut points: Vec<C64> = (0..size).map(|m| grid_point(m, size)).collect();
        for atom in theta.atoms() {
            let mut x = atom.location().arg() / TAU * size as f64;
            if x < 0.0 {
                x += size as f64;
            }
            let i0 = x.floor() as usize % size;
            let i1 = (i0 + 1) % size;
            for i in [i0, i1] {
                points[i] = grid_point(i, size) * ATOM_INSET_RADIUS;
            }
        }
        let theta = crate::parallel::map(&points, |&z| theta.value_unchecked(z));
        Self { size, points, theta }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Points at which pointwise quantities should be evaluated.
    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn theta_samples(&self) -> &[C64] {
        &self.theta
    }

    /// Grid samples of an H² coefficient vector (length ≤ size).
    pub fn samples(&self, coeffs: &[C64]) -> Vec<C64> {
        assert!(coeffs.len() <= self.size);
        let mut buf = vec![C64::new(0.0, 0.0); self.size];
        buf[..coeffs.len()].copy_from_slice(coeffs);
        coefficients_to_samples(&mut buf);
        buf
    }

    /// `P_θ h = h − θ P_+(θ̄ h)` for `h ∈ H²` given by coefficients. Returns
    /// the nonnegative modes `0..size/2`.
    pub fn project(&self, h: &[C64]) -> Vec<C64> {
        let mut buf = self.samples(h);
        for (x, t) in buf.iter_mut().zip(&self.theta) {
            *x *= t.conj();
        }
        samples_to_coefficients(&mut buf);
        // θ̄ has only nonpositive modes, so P_+(θ̄h) lives on 0..deg h.
        for x in buf.iter_mut().skip(h.len()) {
            *x = C64::new(0.0, 0.0);
        }
        coefficients_to_samples(&mut buf);
        for (x, t) in buf.iter_mut().zip(&self.theta) {
            *x *= t;
        }
        samples_to_coefficients(&mut buf);
        buf.truncate(self.size / 2);
        for (i, x) in buf.iter_mut().enumerate() {
            let hi = h.get(i).copied().unwrap_or_default();
            *x = hi - *x;
        }
        buf
    }

    /// `‖P_+(θ̄ f)‖`, zero exactly when `f ⊥ θH²`.
    pub fn membership_defect(&self, f: &[C64]) -> f64 {
        let mut buf = self.samples(f);
        for (x, t) in buf.iter_mut().zip(&self.theta) {
            *x *= t.conj();
        }
        samples_to_coefficients(&mut buf);
        buf[..self.size / 2].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Result of applying a truncated Toeplitz operator.
#[derive(Debug, Clone)]
pub struct TtoApplication {
    pub value: FourierSeries,
    /// Fraction of the output energy in modes discarded above the truncation.
    pub discarded_tail: f64,
}

impl TtoApplication {
    /// True when the discarded tail is large enough to matter.
    pub fn truncation_warning(&self) -> bool {
        self.discarded_tail > TRUNCATION_WARNING
    }
}

/// Coefficients of `P_+(Φ f)`: the band convolution with negative modes dropped.
pub fn multiply_symbol_positive(phi: &LaurentSymbol, f: &[C64]) -> Vec<C64> {
    let k = f.len();
    let m = phi.m();
    let mut out = vec![C64::new(0.0, 0.0); k + m];
    for (l, &c) in phi.analytic().iter().enumerate() {
        for (i, &x) in f.iter().enumerate() {
            out[i + l] += c * x;
        }
    }
    for (idx, &a) in phi.antianalytic().iter().enumerate() {
        let shift = idx + 1;
        for i in shift..k {
            out[i - shift] += a * f[i];
        }
    }
    out
}

/// `A_Φ f = P_θ(Φ f)` on a grid from [`grid_size`].
pub fn apply_tto(theta: &InnerFunction, phi: &LaurentSymbol, f: &FourierSeries) -> Result<TtoApplication> {
    let grid = ModelSpaceGrid::new(theta, grid_size(f.len(), phi.m(), phi.n()));
    apply_tto_on(&grid, phi, f)
}

/// [`apply_tto`] with a prepared grid.
pub fn apply_tto_on(grid: &ModelSpaceGrid, phi: &LaurentSymbol, f: &FourierSeries) -> Result<TtoApplication> {
    let k = f.len();
    if k == 0 {
        return Err(TtoError::InvalidInput("empty Fourier series".into()));
    }
    if grid.size() < 4 * (k + phi.m() + phi.n()) {
        return Err(TtoError::InvalidInput(format!(
            "grid of {} points is too small for truncation {k}",
            grid.size()
        )));
    }
    let h = multiply_symbol_positive(phi, f.coeffs());
    let mut full = grid.project(&h);
    let total: f64 = full.iter().map(|c| c.norm_sqr()).sum();
    let tail: f64 = full[k..].iter().map(|c| c.norm_sqr()).sum();
    full.truncate(k);
    Ok(TtoApplication {
        value: FourierSeries::new(full),
        discarded_tail: if total > 0.0 { tail / total } else { 0.0 },
    })
}

/// `‖A_Φ f − λ f‖ / ‖f‖`.
pub fn relative_residual(grid: &ModelSpaceGrid, phi: &LaurentSymbol, f: &FourierSeries, lambda: C64) -> Result<f64> {
    let applied = apply_tto_on(grid, phi, f)?;
    let r = applied
        .value
        .coeffs()
        .iter()
        .zip(f.coeffs())
        .map(|(a, x)| (a - lambda * x).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(r / f.norm())
}
