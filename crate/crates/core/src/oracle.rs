//! Dense matrix of `A_Φ` on `K_θ` for a finite Blaschke product θ, in the
//! Takenaka–Malmquist basis
//! `e_k(z) = √(1 − |w_k|²)/(1 − w̄_k z) · Π_{j<k} b_{w_j}(z)`,
//! which reduces to the monomials `1, z, …, z^{n−1}` when θ = z^n.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::eigensolver::{scan_eigenvalues, Region, ScanOptions, ScanReport};
use crate::error::{Result, TtoError};
use crate::fourier::{self, FourierSeries};
use crate::inner::{BlaschkeFactor, InnerFunction};
use crate::linalg;
use crate::parallel;
use crate::symbol::{sort_lex, LaurentSymbol};
use crate::tolerances::Tolerances;

type C64 = Complex64;

/// Eigenvalue condition numbers above this are flagged.
pub const ILL_CONDITIONED: f64 = 1e8;

/// Orthonormal basis of `K_θ` sampled on a uniform grid.
#[derive(Debug, Clone)]
pub struct ModelBasis {
    theta: InnerFunction,
    zeros: Vec<C64>,
    /// `samples[k][m] = e_k(ζ_m)` on the quadrature grid.
    samples: Vec<Vec<C64>>,
    /// Nonnegative Fourier modes of each basis function.
    pub basis: Vec<FourierSeries>,
    /// Largest deviation of the Gram matrix from the identity.
    pub gram_check: f64,
}

fn quadrature_size(zeros: &[C64], band: usize) -> usize {
    let r = zeros.iter().map(|w| w.norm()).fold(0.0, f64::max);
    // Products of basis functions have coefficients decaying like r^j;
    // alias errors stay below 1e−17 once r^L does.
    let decay = if r > 0.0 { (40.0 / -r.ln()).ceil() as usize } else { 0 };
    (8 * band).max(2 * decay + band).next_power_of_two()
}

impl ModelBasis {
    pub fn new(theta: &InnerFunction, extra_band: usize) -> Result<Self> {
        if !theta.is_finite_blaschke() {
            return Err(TtoError::NotFiniteBlaschke);
        }
        let zeros = theta.zeros();
        let n = zeros.len();
        if n == 0 {
            return Err(TtoError::InvalidInput(
                "model space is trivial (theta is constant)".into(),
            ));
        }
        let size = quadrature_size(&zeros, n + extra_band);
        let points: Vec<C64> = (0..size).map(|m| fourier::grid_point(m, size)).collect();
        let factors: Vec<BlaschkeFactor> = zeros
            .iter()
            .map(|&w| BlaschkeFactor::new(w, 1))
            .collect::<Result<_>>()?;
        let samples: Vec<Vec<C64>> = parallel::map_range(n, |k| {
            let w = zeros[k];
            let head = InnerFunction::new(factors[..k].to_vec(), vec![], C64::new(1.0, 0.0)).expect("valid factors");
            points
                .iter()
                .map(|&z| (1.0 - w.norm_sqr()).sqrt() / (C64::new(1.0, 0.0) - w.conj() * z) * head.value_unchecked(z))
                .collect()
        });
        let basis = samples
            .iter()
            .map(|s| {
                let mut buf = s.clone();
                fourier::samples_to_coefficients(&mut buf);
                buf.truncate(size / 2);
                FourierSeries::new(buf)
            })
            .collect();
        let mut gram_check = 0.0f64;
        for k in 0..n {
            for l in 0..n {
                let ip: C64 = samples[k]
                    .iter()
                    .zip(&samples[l])
                    .map(|(a, b)| a * b.conj())
                    .sum::<C64>()
                    / size as f64;
                let target = if k == l { 1.0 } else { 0.0 };
                gram_check = gram_check.max((ip - target).norm());
            }
        }
        Ok(Self {
            theta: theta.clone(),
            zeros,
            samples,
            basis,
            gram_check,
        })
    }

    pub fn theta(&self) -> &InnerFunction {
        &self.theta
    }

    /// Zeros in the order used to build the basis (with repetition).
    pub fn zeros(&self) -> &[C64] {
        &self.zeros
    }

    pub fn dimension(&self) -> usize {
        self.samples.len()
    }

    pub fn quadrature_size(&self) -> usize {
        self.samples.first().map_or(0, |s| s.len())
    }
}

/// Matrix of `A_Φ` in an orthonormal basis of `K_θ`.
#[derive(Debug, Clone)]
pub struct DenseTto {
    pub matrix: DMatrix<C64>,
    pub theta_degree: usize,
    pub symbol: LaurentSymbol,
}

/// Entry `(l, k)` is `⟨Φ e_k, e_l⟩`, computed by quadrature on the circle.
pub fn build_matrix(theta: &InnerFunction, phi: &LaurentSymbol) -> Result<DenseTto> {
    let basis = ModelBasis::new(theta, phi.m() + phi.n())?;
    Ok(build_matrix_in(&basis, phi))
}

/// [`build_matrix`] in a prepared basis.
pub fn build_matrix_in(basis: &ModelBasis, phi: &LaurentSymbol) -> DenseTto {
    let n = basis.dimension();
    if phi.m() == 0 && phi.n() == 0 {
        // The basis is orthonormal, so a constant symbol acts as a scalar.
        return DenseTto {
            matrix: DMatrix::identity(n, n) * phi.analytic().first().copied().unwrap_or_default(),
            theta_degree: n,
            symbol: phi.clone(),
        };
    }
    let size = basis.quadrature_size();
    let symbol: Vec<C64> = (0..size)
        .map(|m| phi.eval_unchecked(fourier::grid_point(m, size)))
        .collect();
    let columns = parallel::map_range(n, |k| {
        let phi_ek: Vec<C64> = basis.samples[k].iter().zip(&symbol).map(|(e, s)| e * s).collect();
        (0..n)
            .map(|l| {
                phi_ek
                    .iter()
                    .zip(&basis.samples[l])
                    .map(|(a, b)| a * b.conj())
                    .sum::<C64>()
                    / size as f64
            })
            .collect::<Vec<C64>>()
    });
    let matrix = DMatrix::from_fn(n, n, |l, k| columns[k][l]);
    DenseTto {
        matrix,
        theta_degree: n,
        symbol: phi.clone(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseEigen {
    pub lambda: C64,
    /// Unit right eigenvector in the basis coordinates.
    pub vector: Vec<C64>,
    /// `1/|u* v|` for unit left and right eigenvectors.
    pub condition: f64,
    pub ill_conditioned: bool,
}

/// All eigenvalues sorted by (Re, Im) with unit eigenvectors.
pub fn dense_spectrum(tto: &DenseTto) -> Result<Vec<DenseEigen>> {
    let a = &tto.matrix;
    if a.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(TtoError::Linalg("non-finite matrix".into()));
    }
    let mut values = linalg::eigenvalues(a)?;
    sort_lex(&mut values);
    let n = a.nrows();
    values
        .into_iter()
        .map(|lambda| {
            let shifted = a - DMatrix::<C64>::identity(n, n) * lambda;
            let t = linalg::smallest_singular(&shifted)?;
            let v = DVector::from_vec(t.right);
            let u = DVector::from_vec(t.left);
            let overlap = u.dotc(&v).norm();
            let condition = if overlap > 0.0 { 1.0 / overlap } else { f64::INFINITY };
            Ok(DenseEigen {
                lambda,
                vector: v.iter().copied().collect(),
                condition,
                ill_conditioned: condition > ILL_CONDITIONED,
            })
        })
        .collect()
}

/// One oracle eigenvalue and what the criterion path made of it.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchRow {
    pub oracle: C64,
    /// Whether the roots of `Q` at this λ are distinct and off the circle.
    pub admissible: bool,
    pub reason: Option<String>,
    pub matched: Option<C64>,
}

#[derive(Debug, Clone)]
pub struct CrossValidation {
    pub rows: Vec<MatchRow>,
    /// Criterion eigenvalues with no oracle eigenvalue within the tolerance.
    pub spurious: Vec<C64>,
    pub scan: ScanReport,
}

/// Distance within which a criterion eigenvalue matches an oracle one.
pub const MATCH_TOLERANCE: f64 = 1e-6;

/// Runs the scan and the dense oracle and matches their eigenvalues.
/// Fails with [`TtoError::Mismatch`] when an admissible oracle eigenvalue is
/// missed or a scanned eigenvalue has no oracle counterpart.
pub fn cross_validate(
    theta: &InnerFunction,
    phi: &LaurentSymbol,
    region: &Region,
    opts: &ScanOptions,
) -> Result<CrossValidation> {
    let tto = build_matrix(theta, phi)?;
    let mut oracle: Vec<C64> = Vec::new();
    for e in dense_spectrum(&tto)? {
        if !oracle.iter().any(|&l| (l - e.lambda).norm() < MATCH_TOLERANCE) {
            oracle.push(e.lambda);
        }
    }
    let scan = scan_eigenvalues(theta, phi, region, opts)?;
    let found = scan.eigenvalues();
    let rows: Vec<MatchRow> = oracle
        .iter()
        .map(|&l| {
            let (admissible, reason) = admissibility(theta, phi, l, region, &opts.tol);
            let matched = found
                .iter()
                .copied()
                .filter(|f| (f - l).norm() < MATCH_TOLERANCE)
                .min_by(|a, b| (a - l).norm().total_cmp(&(b - l).norm()));
            MatchRow {
                oracle: l,
                admissible,
                reason,
                matched,
            }
        })
        .collect();
    let spurious: Vec<C64> = found
        .iter()
        .copied()
        .filter(|f| !oracle.iter().any(|l| (f - l).norm() < MATCH_TOLERANCE))
        .collect();
    let unmatched: Vec<C64> = rows
        .iter()
        .filter(|r| r.admissible && r.matched.is_none())
        .map(|r| r.oracle)
        .collect();
    if !unmatched.is_empty() || !spurious.is_empty() {
        return Err(TtoError::Mismatch { unmatched, spurious });
    }
    Ok(CrossValidation { rows, spurious, scan })
}

fn admissibility(
    theta: &InnerFunction,
    phi: &LaurentSymbol,
    lambda: C64,
    region: &Region,
    tol: &Tolerances,
) -> (bool, Option<String>) {
    if !region.contains(lambda, 0.0) {
        return (false, Some("outside the scanned region".into()));
    }
    match crate::eigensolver::build_criterion(theta, phi, lambda, tol) {
        Ok(_) => (true, None),
        Err(e) => (false, Some(e.to_string())),
    }
}
