//! Small dense complex linear algebra on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, TtoError};

type C64 = Complex64;

/// Smallest singular value of a square matrix with its singular vectors.
#[derive(Debug, Clone)]
pub struct SingularTriple {
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// Right singular vector `v` with `M v = σ u`.
    pub right: Vec<C64>,
    /// Left singular vector `u`.
    pub left: Vec<C64>,
}

pub fn smallest_singular(m: &DMatrix<C64>) -> Result<SingularTriple> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(TtoError::Linalg("empty matrix".into()));
    }
    if m.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(TtoError::Linalg("non-finite matrix entry".into()));
    }
    let svd = m
        .clone()
        .try_svd(true, true, f64::EPSILON, 10_000)
        .ok_or_else(|| TtoError::Linalg("SVD did not converge".into()))?;
    let s = &svd.singular_values;
    let (imin, _) = s
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    let sigma_max = s.iter().copied().fold(0.0, f64::max);
    let u = svd.u.as_ref().expect("requested");
    let v_t = svd.v_t.as_ref().expect("requested");
    Ok(SingularTriple {
        sigma_min: s[imin],
        sigma_max,
        right: v_t.row(imin).iter().map(|x| x.conj()).collect(),
        left: u.column(imin).iter().copied().collect(),
    })
}

/// Eigenvalues of a general complex square matrix.
pub fn eigenvalues(m: &DMatrix<C64>) -> Result<Vec<C64>> {
    match m.nrows() {
        0 => Ok(vec![]),
        1 => Ok(vec![m[(0, 0)]]),
        _ => Ok(m
            .clone()
            .eigenvalues()
            .ok_or_else(|| TtoError::Linalg("Schur iteration did not converge".into()))?
            .iter()
            .copied()
            .collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_vectors_of_rank_one() {
        let c = |r: f64| C64::new(r, 0.0);
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0), c(2.0), c(2.0), c(4.0)]);
        let t = smallest_singular(&m).unwrap();
        assert!(t.sigma_min < 1e-14);
        assert!((t.sigma_max - 5.0).abs() < 1e-13);
        let mv = &m * nalgebra::DVector::from_vec(t.right.clone());
        assert!(mv.norm() < 1e-14);
    }

    #[test]
    fn eigenvalues_of_swap_matrix() {
        let c = |r: f64| C64::new(r, 0.0);
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(4.0), c(0.0)]);
        let mut e = eigenvalues(&m).unwrap();
        e.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((e[0] - c(-2.0)).norm() < 1e-14 && (e[1] - c(2.0)).norm() < 1e-14);
    }
}
