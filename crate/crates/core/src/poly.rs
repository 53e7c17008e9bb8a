//! Dense complex polynomials in ascending coefficient order and their roots.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, TtoError};

type C64 = Complex64;

/// Horner evaluation of `Σ coeffs[k] z^k`.
pub fn eval(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Value and derivative in one Horner pass.
pub fn eval_with_derivative(coeffs: &[C64], z: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// `Σ |coeffs[k]| |z|^k`, the rounding-error scale of a Horner evaluation.
pub fn eval_scale(coeffs: &[C64], z: C64) -> f64 {
    let r = z.norm();
    coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

pub fn derivative(coeffs: &[C64]) -> Vec<C64> {
    coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect()
}

/// Index of the highest nonzero coefficient.
pub fn degree(coeffs: &[C64]) -> Option<usize> {
    coeffs.iter().rposition(|c| *c != C64::new(0.0, 0.0))
}

/// All roots of the polynomial: eigenvalues of the balanced companion
/// matrix, then Newton polishing.
pub fn roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let d = degree(coeffs).ok_or_else(|| TtoError::InvalidInput("zero polynomial".into()))?;
    if d == 0 {
        return Ok(vec![]);
    }
    let lead = coeffs[d];
    let mut companion = DMatrix::<C64>::zeros(d, d);
    for i in 1..d {
        companion[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..d {
        companion[(i, d - 1)] = -coeffs[i] / lead;
    }
    balance(&mut companion);
    let eig = if d == 1 {
        vec![companion[(0, 0)]]
    } else {
        companion
            .eigenvalues()
            .ok_or_else(|| TtoError::Linalg("companion eigenvalues did not converge".into()))?
            .iter()
            .copied()
            .collect()
    };
    Ok(eig.into_iter().map(|z| polish(&coeffs[..=d], z)).collect())
}

/// Newton steps that are kept only while they reduce |p|.
pub fn polish(coeffs: &[C64], mut z: C64) -> C64 {
    let (mut p, mut dp) = eval_with_derivative(coeffs, z);
    for _ in 0..4 {
        if p.norm() == 0.0 || dp.norm() == 0.0 {
            break;
        }
        let candidate = z - p / dp;
        let (pc, dpc) = eval_with_derivative(coeffs, candidate);
        if !(pc.norm() < p.norm()) {
            break;
        }
        z = candidate;
        p = pc;
        dp = dpc;
    }
    z
}

/// Parlett–Reinsch diagonal similarity scaling by powers of two.
fn balance(m: &mut DMatrix<C64>) {
    let n = m.nrows();
    let radix = 2.0f64;
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..n {
                if j != i {
                    col += m[(j, i)].l1_norm();
                    row += m[(i, j)].l1_norm();
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let sum = col + row;
            let mut f = 1.0;
            let mut g = row / radix;
            while col < g {
                f *= radix;
                col *= radix * radix;
            }
            g = row * radix;
            while col > g {
                f /= radix;
                col /= radix * radix;
            }
            if (col + row) / f < 0.95 * sum {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

/// Multiplies two polynomials.
pub fn mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![C64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sorted(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    #[test]
    fn quadratic_roots() {
        // 4z² + 1
        let r = sorted(roots(&[c(1.0, 0.0), c(0.0, 0.0), c(4.0, 0.0)]).unwrap());
        assert!((r[0] - c(0.0, -0.5)).norm() < 1e-15);
        assert!((r[1] - c(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn roots_from_product() {
        let expected = [c(0.3, -0.1), c(-1.7, 0.4), c(2.5, 2.0), c(0.0, -0.9), c(1.1, 0.0)];
        let mut p = vec![c(1.0, 0.0)];
        for &z in &expected {
            p = mul(&p, &[-z, c(1.0, 0.0)]);
        }
        let p: Vec<C64> = p.iter().map(|x| x * c(0.5, 1.5)).collect();
        let r = roots(&p).unwrap();
        for z in expected {
            assert!(r.iter().any(|w| (w - z).norm() < 1e-12), "missing {z}");
        }
        for z in r {
            assert!(eval(&p, z).norm() < 1e-13 * eval_scale(&p, z));
        }
    }

    #[test]
    fn trailing_zero_coefficients_are_ignored() {
        let r = roots(&[c(-2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0] - c(2.0, 0.0)).norm() < 1e-15);
        assert!(roots(&[c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn horner_derivative() {
        let p = [c(1.0, 1.0), c(-2.0, 0.0), c(0.0, 3.0), c(0.5, 0.0)];
        let z = c(0.7, -0.3);
        let (v, d) = eval_with_derivative(&p, z);
        assert!((v - eval(&p, z)).norm() < 1e-15);
        assert!((d - eval(&derivative(&p), z)).norm() < 1e-14);
    }
}
