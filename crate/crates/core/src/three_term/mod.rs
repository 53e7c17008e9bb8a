//! Three-term symbols `Φ = a z̄ + b + c z`.
//!
//! With `β = a/c` the roots of `Q` satisfy `z₁ z₂ = β`. Two distinct roots
//! inside the disk give an eigenvalue exactly when `z₁θ(z₁) = z₂θ(z₂)`, i.e.
//! when `z₁` is a zero of `F(z) = zθ(z) − (β/z)θ(β/z)` in the annulus
//! `|β| < |z| < 1`. Two roots outside reduce to the same equation for
//! `w = 1/z̄` with `β` replaced by `1/β̄`. A double root `z₀² = β` is an
//! eigenvalue when `z₀θ'(z₀) + θ(z₀) = 0`, and one root on each side of the
//! circle never is.

mod quadtree;
mod winding;

use num_complex::Complex64;
use serde::Serialize;

use crate::eigensolver::{assemble, build_criterion, construct_eigenfunction};
use crate::error::{Result, TtoError};
use crate::inner::InnerFunction;
use crate::parallel;
use crate::symbol::{sort_lex, LaurentSymbol};
use crate::tolerances::{default_truncation, Tolerances};

pub use quadtree::WertZero;
pub use winding::{circle_winding, phase_change, PolarCell, MIN_MODULUS};

use quadtree::{contour_radii, locate_zeros, pair_representative, zero_count, Wert};

type C64 = Complex64;

/// `||β| − 1|` below this counts as `|β| = 1`.
const UNIT_BETA: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct AnnulusProblem {
    a: C64,
    b: C64,
    c: C64,
    theta: InnerFunction,
}

impl AnnulusProblem {
    pub fn new(a: C64, b: C64, c: C64, theta: InnerFunction) -> Result<Self> {
        let finite = [a, b, c].iter().all(|x| x.re.is_finite() && x.im.is_finite());
        if !finite {
            return Err(TtoError::InvalidInput("coefficients must be finite".into()));
        }
        if a.norm() == 0.0 || c.norm() == 0.0 {
            return Err(TtoError::Precondition("three-term symbol needs a ≠ 0 and c ≠ 0".into()));
        }
        Ok(Self { a, b, c, theta })
    }

    pub fn a(&self) -> C64 {
        self.a
    }

    pub fn b(&self) -> C64 {
        self.b
    }

    pub fn c(&self) -> C64 {
        self.c
    }

    pub fn theta(&self) -> &InnerFunction {
        &self.theta
    }

    pub fn beta(&self) -> C64 {
        self.a / self.c
    }

    pub fn inner_radius(&self) -> f64 {
        self.beta().norm()
    }

    pub fn symbol(&self) -> LaurentSymbol {
        LaurentSymbol::three_term(self.a, self.b, self.c).expect("finite coefficients")
    }

    /// `λ = b + c z + a/z`, the value shared by both roots of a pair.
    pub fn lambda_at(&self, z: C64) -> C64 {
        self.b + self.c * z + self.a / z
    }

    /// `F(z) = zθ(z) − (β/z)θ(β/z)`.
    pub fn f(&self, z: C64) -> C64 {
        self.wert().f(z)
    }

    pub fn df(&self, z: C64) -> C64 {
        self.wert().df(z)
    }

    fn wert(&self) -> Wert<'_> {
        Wert {
            beta: self.beta(),
            theta: &self.theta,
        }
    }

    fn reflected_wert(&self) -> Wert<'_> {
        Wert {
            beta: self.beta().conj().inv(),
            theta: &self.theta,
        }
    }

    fn unit_beta(&self) -> bool {
        (self.beta().norm() - 1.0).abs() < UNIT_BETA
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WertOptions {
    /// Distance of the outer contour from the unit circle.
    pub inset: f64,
    /// Newton stopping threshold relative to `1 + |z|`.
    pub refine_tol: f64,
    /// Truncation order used to confirm eigenpairs.
    pub truncation: usize,
    pub tol: Tolerances,
}

impl WertOptions {
    pub fn for_theta(theta: &InnerFunction) -> Self {
        Self {
            inset: if theta.atoms().is_empty() { 0.0 } else { 1e-7 },
            refine_tol: 1e-13,
            truncation: default_truncation(theta),
            tol: Tolerances::for_theta(theta),
        }
    }
}

/// One unordered root pair `{z₁, z₂}` with `z₁ z₂ = β`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WertSolution {
    pub z1: C64,
    pub z2: C64,
    pub lambda: C64,
    /// `z₁² = β`: a double root of `Q`.
    pub trivial: bool,
    pub multiplicity: usize,
    pub refined: bool,
    /// Eigenpair residual, when an eigenfunction was constructed.
    pub residual: Option<f64>,
    /// λ passed the criterion and residual gates, or the double-root test.
    pub confirmed: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WertReport {
    pub beta: C64,
    /// True when both roots lie outside the disk and the reflected equation
    /// was solved.
    pub exterior: bool,
    /// Radii of the counted annulus in the variable that was solved for.
    pub outer_radius: f64,
    pub inner_radius: f64,
    /// Zeros of `F` (poles of `1/F`) in the annulus by the argument principle.
    pub psi_pole_count: i64,
    pub zeros: Vec<WertZero>,
    pub solutions: Vec<WertSolution>,
}

impl WertReport {
    /// Located zeros counted with multiplicity.
    pub fn zero_total(&self) -> usize {
        self.zeros.iter().map(|z| z.multiplicity).sum()
    }

    pub fn count_consistent(&self) -> bool {
        self.zero_total() as i64 == self.psi_pole_count
    }

    /// Confirmed eigenvalues sorted by (Re, Im).
    pub fn eigenvalues(&self) -> Vec<C64> {
        let mut v: Vec<C64> = self
            .solutions
            .iter()
            .filter(|s| s.confirmed)
            .map(|s| s.lambda)
            .collect();
        sort_lex(&mut v);
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DoubleRootCheck {
    pub is_eigenvalue: bool,
    pub lambda: C64,
    /// `z₀θ'(z₀) + θ(z₀)` (for the reflected point in the exterior case).
    pub value: C64,
}

fn check_double_point(prob: &AnnulusProblem, z0: C64) -> Result<()> {
    let beta = prob.beta();
    if (z0 * z0 - beta).norm() > 1e-10 * beta.norm().max(1.0) {
        return Err(TtoError::Precondition(format!(
            "z0² = {} differs from β = {beta}",
            z0 * z0
        )));
    }
    Ok(())
}

fn double_root_value(theta: &InnerFunction, w: C64, tol: &Tolerances) -> (bool, C64) {
    let d = theta.derivative_unchecked(w);
    let value = w * d + theta.value_unchecked(w);
    (value.norm() < tol.double_root * (1.0 + d.norm()), value)
}

/// Decides whether the double root `z₀` (`z₀² = β`, `|z₀| < 1`) yields an
/// eigenvalue via `z₀θ'(z₀) + θ(z₀) = 0`.
pub fn double_root_check(prob: &AnnulusProblem, z0: C64, tol: &Tolerances) -> Result<DoubleRootCheck> {
    check_double_point(prob, z0)?;
    if !(z0.norm() < 1.0) {
        return Err(TtoError::Precondition(format!("|z0| = {} is not below 1", z0.norm())));
    }
    let (is_eigenvalue, value) = double_root_value(&prob.theta, z0, tol);
    Ok(DoubleRootCheck {
        is_eigenvalue,
        lambda: prob.lambda_at(z0),
        value,
    })
}

/// The exterior double root `z₀` (`|z₀| > 1`) is tested through its
/// reflection `w₀ = 1/z̄₀` with the same condition.
pub fn exterior_double_root_check(prob: &AnnulusProblem, z0: C64, tol: &Tolerances) -> Result<DoubleRootCheck> {
    check_double_point(prob, z0)?;
    if !(z0.norm() > 1.0) {
        return Err(TtoError::Precondition(format!("|z0| = {} is not above 1", z0.norm())));
    }
    let (is_eigenvalue, value) = double_root_value(&prob.theta, z0.conj().inv(), tol);
    Ok(DoubleRootCheck {
        is_eigenvalue,
        lambda: prob.lambda_at(z0),
        value,
    })
}

/// Number of zeros of `F` in the annulus `|β|/(1 − inset) < |z| < 1 − inset`.
pub fn psi_pole_count(prob: &AnnulusProblem, inset: f64) -> Result<i64> {
    let beta = prob.beta();
    if !(beta.norm() < 1.0) {
        return Err(TtoError::Precondition(format!(
            "annulus needs |β| < 1, got {}",
            beta.norm()
        )));
    }
    let (outer, inner) = contour_radii(beta, inset)?;
    zero_count(&prob.wert(), outer, inner)
}

/// Confirms a nontrivial λ through the criterion and the residual gate.
fn confirm(prob: &AnnulusProblem, lambda: C64, opts: &WertOptions) -> (bool, Option<f64>, Option<String>) {
    let phi = prob.symbol();
    let sys = match build_criterion(&prob.theta, &phi, lambda, &opts.tol) {
        Ok(s) => s,
        Err(e) => return (false, None, Some(e.to_string())),
    };
    if !sys.is_candidate(&opts.tol) {
        return (
            false,
            None,
            Some(format!(
                "criterion not singular (relative sigma_min {:e})",
                sys.relative_sigma()
            )),
        );
    }
    match construct_eigenfunction(&prob.theta, &phi, &sys, &sys.kernel, opts.truncation, &opts.tol) {
        Ok(p) => (true, Some(p.residual), None),
        Err(TtoError::ResidualTooLarge { residual, tolerance }) => (
            false,
            Some(residual),
            Some(format!("residual {residual:e} above {tolerance:e}")),
        ),
        Err(e) => (false, None, Some(e.to_string())),
    }
}

fn solve(prob: &AnnulusProblem, opts: &WertOptions, exterior: bool) -> Result<WertReport> {
    let w = if exterior { prob.reflected_wert() } else { prob.wert() };
    let (outer, inner) = contour_radii(w.beta, opts.inset)?;
    let count = zero_count(&w, outer, inner)?;
    let zeros = locate_zeros(&w, outer, inner, opts.refine_tol)?;

    // One representative per pair {v, β/v} in the solved variable.
    let mut reps: Vec<WertZero> = Vec::new();
    for z in &zeros {
        let r = pair_representative(w.beta, z.z);
        if !reps.iter().any(|o| (o.z - r).norm() < 1e-9 * (1.0 + r.norm())) {
            reps.push(WertZero { z: r, ..*z });
        }
    }
    let to_root = |v: C64| if exterior { v.conj().inv() } else { v };
    let solutions = parallel::map(&reps, |rep| {
        let z1 = to_root(rep.z);
        let z2 = prob.beta() / z1;
        let lambda = prob.lambda_at(z1);
        let trivial = (rep.z * rep.z - w.beta).norm() < opts.tol.trivial * w.beta.norm().max(1.0);
        let (confirmed, residual, note) = if trivial {
            let (ok, value) = double_root_value(&prob.theta, rep.z, &opts.tol);
            let note = format!("double root: |z0 θ'(z0) + θ(z0)| = {:e}", value.norm());
            (ok, None, Some(note))
        } else if !rep.refined {
            (false, None, Some("unrefined cluster".to_string()))
        } else {
            confirm(prob, lambda, opts)
        };
        WertSolution {
            z1,
            z2,
            lambda,
            trivial,
            multiplicity: rep.multiplicity,
            refined: rep.refined,
            residual,
            confirmed,
            note,
        }
    });
    let mut solutions = solutions;
    solutions.sort_by(|a, b| {
        a.lambda
            .re
            .total_cmp(&b.lambda.re)
            .then(a.lambda.im.total_cmp(&b.lambda.im))
            .then(a.z1.re.total_cmp(&b.z1.re))
            .then(a.z1.im.total_cmp(&b.z1.im))
    });
    Ok(WertReport {
        beta: prob.beta(),
        exterior,
        outer_radius: outer,
        inner_radius: inner,
        psi_pole_count: count,
        zeros,
        solutions,
    })
}

/// Root pairs inside the disk: zeros of `F` in the annulus, paired,
/// classified, and confirmed. Requires `0 < |β| < 1`.
pub fn solve_wert(prob: &AnnulusProblem, opts: &WertOptions) -> Result<WertReport> {
    if !(prob.beta().norm() < 1.0) || prob.unit_beta() {
        return Err(TtoError::Precondition(format!(
            "annulus needs |β| < 1, got {}",
            prob.beta().norm()
        )));
    }
    solve(prob, opts, false)
}

/// Root pairs outside the disk, found by solving the reflected equation for
/// `w = 1/z̄` (product `1/β̄`). Requires `|β| > 1`.
pub fn exterior_wert(prob: &AnnulusProblem, opts: &WertOptions) -> Result<WertReport> {
    if !(prob.beta().norm() > 1.0) || prob.unit_beta() {
        return Err(TtoError::Precondition(format!(
            "exterior case needs |β| > 1, got {}",
            prob.beta().norm()
        )));
    }
    solve(prob, opts, true)
}

/// Dispatches on `|β|`; `|β| = 1` is rejected.
pub fn solve_three_term(prob: &AnnulusProblem, opts: &WertOptions) -> Result<WertReport> {
    if prob.unit_beta() {
        return Err(TtoError::Precondition(
            "|β| = 1: roots pair up across or on the unit circle".into(),
        ));
    }
    if prob.beta().norm() < 1.0 {
        solve_wert(prob, opts)
    } else {
        exterior_wert(prob, opts)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedExclusionReport {
    /// Samples whose roots straddle the circle and were tested.
    pub checked: usize,
    /// Samples skipped because their roots did not straddle the circle or
    /// the criterion could not be built.
    pub skipped: usize,
    /// Straddling λ at which the criterion was singular.
    pub violations: Vec<C64>,
    /// Smallest relative `sigma_min` over the checked samples.
    pub min_sigma: Option<f64>,
}

/// λ values with one root inside and one outside: `z₁` runs over a spiral
/// in `|z₁| < min(1, |β|)` so that `z₂ = β/z₁` is outside.
pub fn mixed_samples(prob: &AnnulusProblem, count: usize) -> Vec<C64> {
    let rmax = prob.beta().norm().min(1.0);
    (0..count)
        .map(|k| {
            let t = k as f64 + 1.0;
            let r = rmax * (0.05 + 0.9 * (t * 0.618_033_988_749_895).fract());
            let p = std::f64::consts::TAU * (t * 0.754_877_666_246_693).fract();
            prob.lambda_at(C64::from_polar(r, p))
        })
        .collect()
}

/// Checks that no λ with straddling roots makes the criterion singular.
pub fn count_mixed_exclusion(prob: &AnnulusProblem, lambdas: &[C64], tol: &Tolerances) -> Result<MixedExclusionReport> {
    if prob.unit_beta() {
        return Err(TtoError::Precondition("|β| = 1".into()));
    }
    let phi = prob.symbol();
    let outcomes = parallel::map(lambdas, |&l| {
        let config = phi.roots_of_q(l, tol).ok()?;
        if config.inside_count() != 1 {
            return None;
        }
        let sys = assemble(&prob.theta, &phi, config, tol).ok()?;
        Some((l, sys.relative_sigma(), sys.is_candidate(tol)))
    });
    let mut report = MixedExclusionReport {
        checked: 0,
        skipped: 0,
        violations: vec![],
        min_sigma: None,
    };
    for o in outcomes {
        match o {
            None => report.skipped += 1,
            Some((l, s, singular)) => {
                report.checked += 1;
                report.min_sigma = Some(report.min_sigma.map_or(s, |m: f64| m.min(s)));
                if singular {
                    report.violations.push(l);
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inner::BlaschkeFactor;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn problem(a: f64, b: f64, cc: f64, theta: InnerFunction) -> AnnulusProblem {
        AnnulusProblem::new(c(a, 0.0), c(b, 0.0), c(cc, 0.0), theta).unwrap()
    }

    fn opts(theta: &InnerFunction) -> WertOptions {
        let mut o = WertOptions::for_theta(theta);
        o.truncation = 256;
        o
    }

    fn assert_real_set(found: &[C64], expected: &[f64]) {
        assert_eq!(found.len(), expected.len(), "{found:?}");
        for (f, e) in found.iter().zip(expected) {
            assert!((f - c(*e, 0.0)).norm() < 1e-8, "{f} vs {e}");
        }
    }

    #[test]
    fn z_squared_quarter() {
        let theta = InnerFunction::monomial(2);
        let p = problem(1.0, 0.0, 4.0, theta.clone());
        let r = solve_wert(&p, &opts(&theta)).unwrap();
        assert_eq!(r.psi_pole_count, 6);
        assert!(r.count_consistent());
        assert_real_set(&r.eigenvalues(), &[-2.0, 2.0]);
        let trivial: Vec<_> = r.solutions.iter().filter(|s| s.trivial).collect();
        assert_eq!(trivial.len(), 2);
        assert!(trivial.iter().all(|s| !s.confirmed));
        for s in &r.solutions {
            assert!((p.lambda_at(s.z1) - p.lambda_at(s.z2)).norm() < 1e-10);
        }
    }

    #[test]
    fn z_cubed_and_z_quarter() {
        let theta = InnerFunction::monomial(3);
        let r = solve_wert(&problem(1.0, 0.0, 4.0, theta.clone()), &opts(&theta)).unwrap();
        let s = 2.0 * 2f64.sqrt();
        assert_real_set(&r.eigenvalues(), &[-s, 0.0, s]);
        let theta = InnerFunction::monomial(1);
        let p = problem(1.0, 0.0, 4.0, theta.clone());
        let r = solve_wert(&p, &opts(&theta)).unwrap();
        assert_eq!(psi_pole_count(&p, 1e-3).unwrap(), 4);
        assert_real_set(&r.eigenvalues(), &[0.0]);
    }

    #[test]
    fn exterior_examples() {
        let theta = InnerFunction::monomial(2);
        let r = exterior_wert(&problem(4.0, 0.0, 1.0, theta.clone()), &opts(&theta)).unwrap();
        assert!(r.exterior);
        assert_real_set(&r.eigenvalues(), &[-2.0, 2.0]);
        let r = exterior_wert(&problem(4.0, 1.0, 1.0, theta.clone()), &opts(&theta)).unwrap();
        assert_real_set(&r.eigenvalues(), &[-1.0, 3.0]);
    }

    #[test]
    fn unit_beta_is_rejected() {
        let theta = InnerFunction::monomial(2);
        let p = problem(1.0, 0.0, 1.0, theta.clone());
        assert!(matches!(
            solve_three_term(&p, &opts(&theta)),
            Err(TtoError::Precondition(_))
        ));
        assert!(solve_wert(&p, &opts(&theta)).is_err());
        assert!(exterior_wert(&p, &opts(&theta)).is_err());
    }

    #[test]
    fn double_root_examples() {
        let tol = Tolerances::default();
        let p = problem(1.0, 0.0, 4.0, InnerFunction::monomial(2));
        let r = double_root_check(&p, c(0.5, 0.0), &tol).unwrap();
        assert!(!r.is_eigenvalue && (r.value - c(0.75, 0.0)).norm() < 1e-15);

        let b = BlaschkeFactor::new(c(0.5, 0.0), 2).unwrap();
        let theta = InnerFunction::new(vec![b], vec![], c(1.0, 0.0)).unwrap();
        let p = problem(1.0, 0.0, 4.0, theta);
        let r = double_root_check(&p, c(0.5, 0.0), &tol).unwrap();
        assert!(r.is_eigenvalue);
        assert!((r.lambda - c(4.0, 0.0)).norm() < 1e-15);

        let p = problem(1.0, 0.0, 4.0, InnerFunction::monomial(1));
        let r = double_root_check(&p, c(-0.5, 0.0), &tol).unwrap();
        assert!(!r.is_eigenvalue && (r.value - c(-1.0, 0.0)).norm() < 1e-15);
        assert!(matches!(
            double_root_check(&p, c(0.4, 0.0), &tol),
            Err(TtoError::Precondition(_))
        ));
    }

    #[test]
    fn double_zero_theta_confirms_four() {
        let b = BlaschkeFactor::new(c(0.5, 0.0), 2).unwrap();
        let theta = InnerFunction::new(vec![b], vec![], c(1.0, 0.0)).unwrap();
        let r = solve_wert(&problem(1.0, 0.0, 4.0, theta.clone()), &opts(&theta)).unwrap();
        assert!(r.count_consistent(), "{r:?}");
        assert!(
            r.eigenvalues().iter().any(|l| (l - c(4.0, 0.0)).norm() < 1e-12),
            "{r:?}"
        );
    }

    #[test]
    fn mixed_samples_straddle_and_are_excluded() {
        let theta = InnerFunction::monomial(2);
        let p = problem(1.0, 0.0, 0.5, theta);
        let samples = mixed_samples(&p, 200);
        let r = count_mixed_exclusion(&p, &samples, &Tolerances::default()).unwrap();
        assert_eq!(r.checked, 200);
        assert!(r.violations.is_empty());
        let empty = count_mixed_exclusion(&p, &[], &Tolerances::default()).unwrap();
        assert_eq!((empty.checked, empty.violations.len()), (0, 0));
    }

    #[test]
    fn f_zero_is_synthetic_identity_free() {
        let f = |z: C64| (z, C64::new(1.0, 0.0));
        assert_eq!(circle_winding(&f, 1.0).unwrap() - circle_winding(&f, 0.25).unwrap(), 0);
    }
}
