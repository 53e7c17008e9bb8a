//! Laurent-polynomial symbols `Φ(z) = Σ_{k=1}^N a_k z^{-k} + Σ_{l=0}^M c_l z^l`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TtoError};
use crate::poly;
use crate::tolerances::Tolerances;

type C64 = Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct LaurentSymbol {
    /// `a_1..a_N`, stored at index `k - 1`.
    antianalytic: Vec<C64>,
    /// `c_0..c_M`.
    analytic: Vec<C64>,
}

impl LaurentSymbol {
    /// Trailing zero coefficients are dropped, so `a_N ≠ 0` and `c_M ≠ 0`
    /// hold for the stored degrees.
    pub fn new(antianalytic: Vec<C64>, analytic: Vec<C64>) -> Result<Self> {
        if antianalytic
            .iter()
            .chain(analytic.iter())
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(TtoError::InvalidInput("non-finite symbol coefficient".into()));
        }
        let mut antianalytic = antianalytic;
        let mut analytic = analytic;
        trim(&mut antianalytic);
        trim(&mut analytic);
        Ok(Self { antianalytic, analytic })
    }

    /// `a z̄ + b + c z`.
    pub fn three_term(a: C64, b: C64, c: C64) -> Result<Self> {
        Self::new(vec![a], vec![b, c])
    }

    /// Analytic polynomial symbol `φ(z) = Σ c_l z^l`.
    pub fn analytic_only(coeffs: Vec<C64>) -> Result<Self> {
        Self::new(vec![], coeffs)
    }

    pub fn antianalytic(&self) -> &[C64] {
        &self.antianalytic
    }

    pub fn analytic(&self) -> &[C64] {
        &self.analytic
    }

    /// Degree `N` of the antianalytic part.
    pub fn n(&self) -> usize {
        self.antianalytic.len()
    }

    /// Degree `M` of the analytic part (0 when it is constant or absent).
    pub fn m(&self) -> usize {
        self.analytic.len().saturating_sub(1)
    }

    /// The symbol `conj(Φ)` on the circle: `a_k ↔ conj(c_k)`.
    pub fn conjugate(&self) -> Self {
        let c0 = self.analytic.first().copied().unwrap_or_default().conj();
        let mut analytic = vec![c0];
        analytic.extend(self.antianalytic.iter().map(|a| a.conj()));
        let antianalytic = self.analytic.iter().skip(1).map(|c| c.conj()).collect();
        Self::new(antianalytic, analytic).expect("conjugate of a finite symbol is finite")
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        if z == C64::new(0.0, 0.0) {
            return Err(TtoError::Domain("symbol evaluated at z = 0".into()));
        }
        Ok(self.eval_unchecked(z))
    }

    pub(crate) fn eval_unchecked(&self, z: C64) -> C64 {
        let w = z.inv();
        let anti = self
            .antianalytic
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &a| (acc + a) * w);
        anti + poly::eval(&self.analytic, z)
    }

    /// Coefficients of `Q(z) = z^N (Φ(z) − λ)` in ascending order.
    pub fn q_coefficients(&self, lambda: C64) -> Vec<C64> {
        let n = self.n();
        let mut q = vec![C64::new(0.0, 0.0); n + self.analytic.len().max(1)];
        for (k, &a) in self.antianalytic.iter().enumerate() {
            q[n - (k + 1)] = a;
        }
        for (l, &c) in self.analytic.iter().enumerate() {
            q[n + l] += c;
        }
        q[n] -= lambda;
        q
    }

    fn check_eigen_shape(&self) -> Result<()> {
        if self.n() == 0 {
            return Err(TtoError::Precondition(
                "symbol needs a nonzero antianalytic part (N ≥ 1)".into(),
            ));
        }
        if self.m() == 0 {
            return Err(TtoError::Precondition(
                "symbol needs a nonconstant analytic part (M ≥ 1)".into(),
            ));
        }
        Ok(())
    }

    /// Polished roots of `Q` with no admissibility checks, sorted by (Re, Im).
    pub fn roots_raw(&self, lambda: C64) -> Result<Vec<C64>> {
        self.check_eigen_shape()?;
        let mut r = poly::roots(&self.q_coefficients(lambda))?;
        sort_lex(&mut r);
        Ok(r)
    }

    /// Roots of `Q = z^N(Φ − λ)` with their classification and the
    /// partial-fraction coefficients `β_j = 1/Q'(z_j)`.
    pub fn roots_of_q(&self, lambda: C64, tol: &Tolerances) -> Result<RootConfiguration> {
        let roots = self.roots_raw(lambda)?;
        RootConfiguration::from_roots(self, lambda, roots, tol)
    }
}

fn trim(v: &mut Vec<C64>) {
    while v.last().is_some_and(|c| *c == C64::new(0.0, 0.0)) {
        v.pop();
    }
}

pub(crate) fn sort_lex(v: &mut [C64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Inside,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub z: C64,
    pub side: Side,
}

/// Roots `z_j` of `Q` for a fixed λ with `1/Q(z) = Σ β_j/(z − z_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootConfiguration {
    pub lambda: C64,
    pub roots: Vec<Root>,
    pub beta: Vec<C64>,
    pub q: Vec<C64>,
}

impl RootConfiguration {
    /// Classifies a given root list (order is kept) and checks that the
    /// roots are distinct and off the unit circle.
    pub fn from_roots(phi: &LaurentSymbol, lambda: C64, roots: Vec<C64>, tol: &Tolerances) -> Result<Self> {
        let q = phi.q_coefficients(lambda);
        let scale = roots.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let mut min_sep = f64::INFINITY;
        for i in 0..roots.len() {
            for j in i + 1..roots.len() {
                min_sep = min_sep.min((roots[i] - roots[j]).norm());
            }
        }
        if min_sep < tol.separation * scale {
            return Err(TtoError::DegenerateRoots {
                min_separation: min_sep,
            });
        }
        if let Some(z) = roots.iter().find(|z| (z.norm() - 1.0).abs() < tol.circle) {
            return Err(TtoError::CircleRoots {
                root: *z,
                distance: (z.norm() - 1.0).abs(),
            });
        }
        let dq = poly::derivative(&q);
        let beta = roots.iter().map(|&z| poly::eval(&dq, z).inv()).collect();
        let roots = roots
            .into_iter()
            .map(|z| Root {
                z,
                side: if z.norm() < 1.0 { Side::Inside } else { Side::Outside },
            })
            .collect();
        Ok(Self { lambda, roots, beta, q })
    }

    pub fn inside_count(&self) -> usize {
        self.roots.iter().filter(|r| r.side == Side::Inside).count()
    }

    pub fn points(&self) -> Vec<C64> {
        self.roots.iter().map(|r| r.z).collect()
    }

    /// `Σ β_j / (z − z_j)`, which reproduces `1/Q(z)`.
    pub fn partial_fraction(&self, z: C64) -> C64 {
        self.roots.iter().zip(&self.beta).map(|(r, &b)| b / (z - r.z)).sum()
    }

    pub fn q_at(&self, z: C64) -> C64 {
        poly::eval(&self.q, z)
    }
}

/// Outcome of the three-term image test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeReport {
    /// `(ℂ ∖ Φ(𝔻)) ∩ 𝔻 ≠ ∅`.
    pub holds_in_disk: bool,
    /// `(ℂ ∖ Φ(𝔻))` meets the exterior of the closed disk.
    pub holds_outside: bool,
    pub witness_in_disk: Option<C64>,
    pub witness_outside: Option<C64>,
}

/// The real-linear map `z ↦ b + a z̄ + c z` and its inverse.
#[derive(Debug, Clone, Copy)]
pub struct RealLinearMap {
    a: C64,
    b: C64,
    c: C64,
    det: f64,
}

impl RealLinearMap {
    pub fn new(a: C64, b: C64, c: C64) -> Result<Self> {
        let det = c.norm_sqr() - a.norm_sqr();
        if (a.norm() - c.norm()).abs() < 1e-12 {
            return Err(TtoError::DegenerateMap);
        }
        Ok(Self { a, b, c, det })
    }

    pub fn apply(&self, z: C64) -> C64 {
        self.b + self.a * z.conj() + self.c * z
    }

    /// Solves `a z̄ + c z = w − b`.
    pub fn preimage(&self, w: C64) -> C64 {
        let v = w - self.b;
        (self.c.conj() * v - self.a * v.conj()) / self.det
    }

    /// `w ∈ Φ(𝔻)`.
    pub fn image_contains(&self, w: C64) -> bool {
        self.preimage(w).norm() < 1.0
    }
}

/// Decides `(ℂ∖Φ(𝔻)) ∩ 𝔻 ≠ ∅` and `(ℂ∖Φ(𝔻)) ∩ (ℂ∖𝔻̄) ≠ ∅` for
/// `Φ = a z̄ + b + c z`, with `Φ(𝔻)` the interior of an ellipse.
pub fn spe_test(a: C64, b: C64, c: C64) -> Result<SpeReport> {
    let map = RealLinearMap::new(a, b, c)?;
    // |preimage(w)| is a seminorm of w − b, hence convex: its maximum over
    // the closed disk sits on the circle.
    let g = |t: f64| map.preimage(C64::from_polar(1.0, t)).norm();
    let samples = 2048;
    let step = std::f64::consts::TAU / samples as f64;
    let (mut best_t, mut best) = (0.0, g(0.0));
    for k in 1..samples {
        let t = k as f64 * step;
        let v = g(t);
        if v > best {
            best = v;
            best_t = t;
        }
    }
    // Golden-section refinement of the bracketing maximum.
    let (mut lo, mut hi) = (best_t - step, best_t + step);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let x1 = hi - phi * (hi - lo);
        let x2 = lo + phi * (hi - lo);
        if g(x1) < g(x2) {
            lo = x1;
        } else {
            hi = x2;
        }
    }
    let t_star = 0.5 * (lo + hi);
    let max_modulus = g(t_star).max(best);
    let holds_in_disk = max_modulus > 1.0;
    let witness_in_disk = holds_in_disk.then(|| {
        // Radial search along the ray towards the extremal boundary point:
        // bisect for the ellipse boundary, then take the midpoint to |w| = 1.
        let dir = C64::from_polar(1.0, t_star);
        let h = |s: f64| map.preimage(dir * s).norm();
        let (mut lo, mut hi) = (0.0, 1.0);
        if h(0.0) >= 1.0 {
            hi = 0.0;
        } else {
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if h(mid) >= 1.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
        }
        dir * (0.5 * (hi + 1.0))
    });
    // The image is bounded by |b| + |a| + |c|; step past it from b.
    let dir = if b.norm() > 0.0 {
        b / b.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let witness_outside = b + dir * (a.norm() + c.norm() + 1.0);
    Ok(SpeReport {
        holds_in_disk,
        holds_outside: true,
        witness_in_disk,
        witness_outside: Some(witness_outside),
    })
}

/// JSON fragment `{"antianalytic": [[re,im],...], "analytic": [[re,im],...]}`
/// holding `a_1..a_N` and `c_0..c_M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct LaurentSymbolSpec {
    #[serde(default)]
    pub antianalytic: Vec<[f64; 2]>,
    #[serde(default)]
    pub analytic: Vec<[f64; 2]>,
}

impl LaurentSymbolSpec {
    pub fn build(&self) -> Result<LaurentSymbol> {
        let conv = |v: &[[f64; 2]]| v.iter().map(|p| C64::new(p[0], p[1])).collect::<Vec<_>>();
        LaurentSymbol::new(conv(&self.antianalytic), conv(&self.analytic))
    }
}

impl From<&LaurentSymbol> for LaurentSymbolSpec {
    fn from(phi: &LaurentSymbol) -> Self {
        let conv = |v: &[C64]| v.iter().map(|c| [c.re, c.im]).collect();
        Self {
            antianalytic: conv(&phi.antianalytic),
            analytic: conv(&phi.analytic),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn zbar_4z() -> LaurentSymbol {
        LaurentSymbol::three_term(c(1.0, 0.0), c(0.0, 0.0), c(4.0, 0.0)).unwrap()
    }

    #[test]
    fn eval_examples() {
        let phi = zbar_4z();
        assert!(phi.eval(c(0.0, 0.5)).unwrap().norm() < 1e-15);
        assert!((phi.eval(c(0.5, 0.0)).unwrap() - c(4.0, 0.0)).norm() < 1e-15);
        let phi2 = LaurentSymbol::new(vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((phi2.eval(c(2.0, 0.0)).unwrap() - c(2.25, 0.0)).norm() < 1e-15);
        assert!(matches!(phi.eval(c(0.0, 0.0)), Err(TtoError::Domain(_))));
    }

    #[test]
    fn roots_lambda_zero() {
        let cfg = zbar_4z().roots_of_q(c(0.0, 0.0), &Tolerances::default()).unwrap();
        assert_eq!(cfg.q, vec![c(1.0, 0.0), c(0.0, 0.0), c(4.0, 0.0)]);
        assert_eq!(cfg.inside_count(), 2);
        for (r, b) in cfg.roots.iter().zip(&cfg.beta) {
            // β = 1/(8z): at ±i/2 this is ∓i/4.
            let expected = if r.z.im > 0.0 { c(0.0, -0.25) } else { c(0.0, 0.25) };
            assert!((r.z.norm() - 0.5).abs() < 1e-15);
            assert!((b - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn roots_lambda_two() {
        let cfg = zbar_4z().roots_of_q(c(2.0, 0.0), &Tolerances::default()).unwrap();
        let s3 = 3f64.sqrt();
        for z in [c(0.25, s3 / 4.0), c(0.25, -s3 / 4.0)] {
            assert!(cfg
                .roots
                .iter()
                .any(|r| (r.z - z).norm() < 1e-15 && r.side == Side::Inside));
        }
    }

    #[test]
    fn circle_roots_rejected() {
        let phi = LaurentSymbol::new(vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(matches!(
            phi.roots_of_q(c(0.0, 0.0), &Tolerances::default()),
            Err(TtoError::CircleRoots { .. })
        ));
    }

    #[test]
    fn degenerate_roots_rejected() {
        // λ = 4 gives the double root z = 1/2 of 4z² − 4z + 1.
        assert!(matches!(
            zbar_4z().roots_of_q(c(4.0, 0.0), &Tolerances::default()),
            Err(TtoError::DegenerateRoots { .. })
        ));
    }

    #[test]
    fn shape_preconditions() {
        let analytic = LaurentSymbol::analytic_only(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(matches!(
            analytic.roots_raw(c(0.0, 0.0)),
            Err(TtoError::Precondition(_))
        ));
        let anti = LaurentSymbol::new(vec![c(1.0, 0.0)], vec![c(2.0, 0.0)]).unwrap();
        assert!(matches!(anti.roots_raw(c(0.0, 0.0)), Err(TtoError::Precondition(_))));
    }

    #[test]
    fn conjugate_symbol_values() {
        let phi = LaurentSymbol::new(vec![c(1.0, 2.0), c(0.5, 0.0)], vec![c(0.3, -0.1), c(4.0, 1.0)]).unwrap();
        let conj = phi.conjugate();
        for k in 0..16 {
            let z = C64::from_polar(1.0, k as f64 * 0.4);
            assert!((conj.eval(z).unwrap() - phi.eval(z).unwrap().conj()).norm() < 1e-14);
        }
    }

    fn random_symbol(rng: &mut ChaCha8Rng) -> LaurentSymbol {
        let coeff = |rng: &mut ChaCha8Rng| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let n = rng.gen_range(1..=3);
        let m = rng.gen_range(1..=3);
        let anti = (0..n).map(|_| coeff(rng)).collect();
        let ana = (0..=m).map(|_| coeff(rng)).collect();
        LaurentSymbol::new(anti, ana).unwrap()
    }

    #[test]
    fn partial_fraction_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let tol = Tolerances::default();
        let mut cases = 0;
        while cases < 100 {
            let phi = random_symbol(&mut rng);
            let lambda = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let Ok(cfg) = phi.roots_of_q(lambda, &tol) else {
                continue;
            };
            cases += 1;
            let scale = cfg.q.iter().map(|x| x.norm()).fold(0.0, f64::max);
            for r in &cfg.roots {
                assert!(cfg.q_at(r.z).norm() < 1e-11 * scale * r.z.norm().max(1.0).powi(cfg.q.len() as i32));
            }
            let mut tested = 0;
            while tested < 50 {
                let z = c(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
                if cfg.roots.iter().any(|r| (r.z - z).norm() < 0.1) {
                    continue;
                }
                tested += 1;
                let exact = cfg.q_at(z).inv();
                assert!((exact - cfg.partial_fraction(z)).norm() < 1e-9 * exact.norm().max(1.0));
            }
        }
    }

    #[test]
    fn spe_examples() {
        let r = spe_test(c(1.0, 0.0), c(0.0, 0.0), c(4.0, 0.0)).unwrap();
        assert!(!r.holds_in_disk);
        assert!(r.holds_outside);
        let r = spe_test(c(1.0, 0.0), c(0.0, 0.0), c(0.1, 0.0)).unwrap();
        assert!(r.holds_in_disk && r.holds_outside);
        let w = r.witness_in_disk.unwrap();
        assert!((w.norm() - 0.95).abs() < 1e-6 && w.re.abs() < 1e-6, "{w}");
        let map = RealLinearMap::new(c(1.0, 0.0), c(0.0, 0.0), c(0.1, 0.0)).unwrap();
        assert!(!map.image_contains(w));
        let o = r.witness_outside.unwrap();
        assert!(o.norm() > 1.0 && !map.image_contains(o));
        assert!(matches!(
            spe_test(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)),
            Err(TtoError::DegenerateMap)
        ));
    }

    /// Independent check: 10^5 random points of 𝔻 tested against the image
    /// through the inverse map. `None` when the sample only grazes the
    /// ellipse boundary and the answer is not decided.
    fn sampled_holds_in_disk(a: C64, b: C64, cc: C64, rng: &mut ChaCha8Rng) -> Option<bool> {
        let map = RealLinearMap::new(a, b, cc).unwrap();
        let mut uncovered = false;
        let mut margin_hit = false;
        for _ in 0..100_000 {
            let w = C64::from_polar(rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
            let z = map.preimage(w);
            if (z.norm() - 1.0).abs() < 1e-3 {
                margin_hit = true;
            }
            if z.norm() >= 1.0 {
                uncovered = true;
            }
            assert!((map.apply(z) - w).norm() < 1e-10 * (1.0 + w.norm()));
        }
        if !uncovered && margin_hit {
            return None;
        }
        Some(uncovered)
    }

    #[test]
    fn spe_agrees_with_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut compared = 0;
        while compared < 100 {
            let a = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let cc = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let b = c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
            if (a.norm() - cc.norm()).abs() <= 0.05 {
                continue;
            }
            let report = spe_test(a, b, cc).unwrap();
            let Some(sampled) = sampled_holds_in_disk(a, b, cc, &mut rng) else {
                continue;
            };
            compared += 1;
            if sampled {
                assert!(report.holds_in_disk, "a={a} b={b} c={cc}");
            } else {
                // Sampling can miss a thin sliver; accept only a near-tangent disagreement.
                if report.holds_in_disk {
                    let map = RealLinearMap::new(a, b, cc).unwrap();
                    let w = report.witness_in_disk.unwrap();
                    assert!(map.preimage(w).norm() < 1.0 + 1e-2);
                }
            }
            if let Some(w) = report.witness_in_disk {
                let map = RealLinearMap::new(a, b, cc).unwrap();
                assert!(w.norm() < 1.0 && !map.image_contains(w));
            }
        }
    }

    proptest! {
        #[test]
        fn three_term_root_product(a_re in -2.0f64..2.0, a_im in -2.0f64..2.0,
                                   c_re in -2.0f64..2.0, c_im in -2.0f64..2.0,
                                   l_re in -3.0f64..3.0, l_im in -3.0f64..3.0) {
            let a = c(a_re, a_im);
            let cc = c(c_re, c_im);
            prop_assume!(a.norm() > 0.1 && cc.norm() > 0.1);
            let phi = LaurentSymbol::three_term(a, c(0.3, -0.2), cc).unwrap();
            let r = phi.roots_raw(c(l_re, l_im)).unwrap();
            prop_assert_eq!(r.len(), 2);
            let prod = r[0] * r[1];
            prop_assert!((prod - a / cc).norm() < 1e-12 * (1.0 + (a / cc).norm()));
        }
    }
}
