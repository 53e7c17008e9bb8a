//! Inner functions: finite Blaschke products times atomic singular factors.
//!
//! A Blaschke factor with zero `w` is `b_w(z) = (w̄/|w|)(w − z)/(1 − w̄z)` for
//! `w ≠ 0` and `b_0(z) = z`. An atom at `ζ ∈ 𝕋` with mass `m` contributes
//! `exp((m/2)(z + ζ)/(z − ζ))`, so `exp((z+1)/(z−1))` is the single atom at
//! `ζ = 1` with mass 2. Both formulas are rational/analytic off their poles
//! and define the pseudocontinuation to `|z| > 1` directly, which is how
//! divided differences against exterior points are evaluated.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TtoError};
use crate::tolerances::Tolerances;

type C64 = Complex64;

const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Slack used to decide that a point lies on the unit circle.
const CIRCLE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlaschkeFactor {
    zero: C64,
    multiplicity: u32,
}

impl BlaschkeFactor {
    pub fn new(zero: C64, multiplicity: u32) -> Result<Self> {
        if !(zero.norm() < 1.0) {
            return Err(TtoError::InvalidInput(format!(
                "Blaschke zero {zero} must lie in the open unit disk"
            )));
        }
        if multiplicity == 0 {
            return Err(TtoError::InvalidInput(
                "Blaschke multiplicity must be at least 1".into(),
            ));
        }
        Ok(Self { zero, multiplicity })
    }

    pub fn zero(&self) -> C64 {
        self.zero
    }

    pub fn multiplicity(&self) -> u32 {
        self.multiplicity
    }

    fn unimodular(&self) -> C64 {
        let r = self.zero.norm();
        if r == 0.0 {
            ONE
        } else {
            self.zero.conj() / r
        }
    }

    /// Value of a single (multiplicity one) factor.
    fn simple_value(&self, z: C64) -> C64 {
        if self.zero == ZERO {
            return z;
        }
        self.unimodular() * (self.zero - z) / (ONE - self.zero.conj() * z)
    }

    /// `(b(z) − b(w)) / (z − w)`, exact for the Möbius map (valid at `z = w`).
    fn simple_divided_difference(&self, z: C64, w: C64) -> C64 {
        if self.zero == ZERO {
            return ONE;
        }
        let a = self.zero;
        self.unimodular() * (a.norm_sqr() - 1.0) / ((ONE - a.conj() * z) * (ONE - a.conj() * w))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularAtom {
    location: C64,
    mass: f64,
}

impl SingularAtom {
    pub fn new(location: C64, mass: f64) -> Result<Self> {
        let r = location.norm();
        if !r.is_finite() || (r - 1.0).abs() > 1e-6 {
            return Err(TtoError::InvalidInput(format!(
                "atom location {location} is not on the unit circle"
            )));
        }
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(TtoError::InvalidInput("atom mass must be positive".into()));
        }
        Ok(Self {
            location: location / r,
            mass,
        })
    }

    pub fn from_angle(angle: f64, mass: f64) -> Result<Self> {
        Self::new(C64::from_polar(1.0, angle), mass)
    }

    pub fn location(&self) -> C64 {
        self.location
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    fn exponent(&self, z: C64) -> C64 {
        0.5 * self.mass * (z + self.location) / (z - self.location)
    }

    /// Divided difference of the exponent, exact.
    fn exponent_divided_difference(&self, z: C64, w: C64) -> C64 {
        -self.mass * self.location / ((z - self.location) * (w - self.location))
    }
}

/// A finite Blaschke product times an atomic singular inner function times a
/// unimodular constant. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerFunction {
    blaschke: Vec<BlaschkeFactor>,
    atoms: Vec<SingularAtom>,
    constant: C64,
}

impl InnerFunction {
    pub fn new(blaschke: Vec<BlaschkeFactor>, atoms: Vec<SingularAtom>, constant: C64) -> Result<Self> {
        if (constant.norm() - 1.0).abs() > 1e-12 {
            return Err(TtoError::InvalidInput("unimodular constant must have modulus 1".into()));
        }
        Ok(Self {
            blaschke,
            atoms,
            constant,
        })
    }

    /// `θ(z) = z^n`.
    pub fn monomial(n: u32) -> Self {
        let blaschke = if n == 0 {
            vec![]
        } else {
            vec![BlaschkeFactor {
                zero: ZERO,
                multiplicity: n,
            }]
        };
        Self {
            blaschke,
            atoms: vec![],
            constant: ONE,
        }
    }

    /// Finite Blaschke product with the listed zeros (repeats allowed).
    pub fn from_zeros(zeros: &[C64]) -> Result<Self> {
        let blaschke = zeros
            .iter()
            .map(|&w| BlaschkeFactor::new(w, 1))
            .collect::<Result<Vec<_>>>()?;
        Self::new(blaschke, vec![], ONE)
    }

    /// The atomic singular inner function `exp((z+1)/(z−1))`.
    pub fn atom_at_one() -> Self {
        Self {
            blaschke: vec![],
            atoms: vec![SingularAtom {
                location: ONE,
                mass: 2.0,
            }],
            constant: ONE,
        }
    }

    pub fn blaschke(&self) -> &[BlaschkeFactor] {
        &self.blaschke
    }

    pub fn atoms(&self) -> &[SingularAtom] {
        &self.atoms
    }

    pub fn constant(&self) -> C64 {
        self.constant
    }

    pub fn is_finite_blaschke(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Total number of Blaschke zeros counted with multiplicity (= dim K_θ
    /// for finite Blaschke products).
    pub fn blaschke_degree(&self) -> usize {
        self.blaschke.iter().map(|b| b.multiplicity as usize).sum()
    }

    /// Zeros listed with multiplicity in storage order.
    pub fn zeros(&self) -> Vec<C64> {
        self.blaschke
            .iter()
            .flat_map(|b| std::iter::repeat_n(b.zero, b.multiplicity as usize))
            .collect()
    }

    pub fn is_constant(&self) -> bool {
        self.blaschke.is_empty() && self.atoms.is_empty()
    }

    /// Product of `other` and `self`.
    pub fn product(&self, other: &InnerFunction) -> InnerFunction {
        let mut blaschke = self.blaschke.clone();
        blaschke.extend_from_slice(&other.blaschke);
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        InnerFunction {
            blaschke,
            atoms,
            constant: self.constant * other.constant,
        }
    }

    /// Boundary spectrum σ(θ): the atom locations (finite Blaschke zeros
    /// never accumulate on 𝕋).
    pub fn boundary_spectrum(&self) -> Vec<C64> {
        let mut out: Vec<C64> = Vec::new();
        for atom in &self.atoms {
            if !out.iter().any(|p| (*p - atom.location).norm() < 1e-14) {
                out.push(atom.location);
            }
        }
        out
    }

    /// Distance from `z` to σ(θ) (infinite when σ(θ) is empty).
    pub fn distance_to_spectrum(&self, z: C64) -> f64 {
        self.atoms
            .iter()
            .map(|a| (z - a.location).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Evaluates the product formula with no domain checks. Off the closed
    /// disk this is the meromorphic pseudocontinuation.
    pub fn value_unchecked(&self, z: C64) -> C64 {
        let mut value = self.constant;
        for b in &self.blaschke {
            value *= b.simple_value(z).powu(b.multiplicity);
        }
        if !self.atoms.is_empty() {
            let exponent: C64 = self.atoms.iter().map(|a| a.exponent(z)).sum();
            value *= exponent.exp();
        }
        value
    }

    /// `(θ(z) − θ(w)) / (z − w)` by the Leibniz rule over factors, with every
    /// factor's divided difference in closed form. At `z = w` this is `θ'(w)`.
    pub fn divided_difference(&self, z: C64, w: C64) -> C64 {
        // Running (P(z), P(w), P[z, w]) for the partial product P.
        let mut pz = self.constant;
        let mut dd = ZERO;
        for b in &self.blaschke {
            let gz = b.simple_value(z);
            let gw = b.simple_value(w);
            let gd = b.simple_divided_difference(z, w);
            for _ in 0..b.multiplicity {
                dd = dd * gw + pz * gd;
                pz *= gz;
            }
        }
        if !self.atoms.is_empty() {
            let ew: C64 = self.atoms.iter().map(|a| a.exponent(w)).sum();
            let ed: C64 = self.atoms.iter().map(|a| a.exponent_divided_difference(z, w)).sum();
            let sw = ew.exp();
            // exp(ez) − exp(ew) = exp(ew)·expm1(ez − ew), ez − ew = ed·(z − w).
            let sd = sw * ed * exprel(ed * (z - w));
            dd = dd * sw + pz * sd;
        }
        dd
    }

    fn check_closed_disk(&self, z: C64, tol: &Tolerances) -> Result<()> {
        let r = z.norm();
        if !r.is_finite() {
            return Err(TtoError::Domain(format!("non-finite point {z}")));
        }
        if r > 1.0 + CIRCLE_SLACK {
            return Err(TtoError::Domain(format!("|z| = {r} > 1; use eval_exterior")));
        }
        if r >= 1.0 - CIRCLE_SLACK && self.distance_to_spectrum(z) <= tol.boundary {
            return Err(TtoError::Domain(format!(
                "z = {z} is within {:e} of the boundary spectrum",
                tol.boundary
            )));
        }
        if r < 1.0 - CIRCLE_SLACK && self.distance_to_spectrum(z) == 0.0 {
            return Err(TtoError::Domain(format!("z = {z} hits an atom")));
        }
        Ok(())
    }

    /// θ(z) for `z ∈ 𝔻`, or `z ∈ 𝕋` away from σ(θ).
    pub fn eval(&self, z: C64) -> Result<C64> {
        self.eval_with(z, &Tolerances::default())
    }

    pub fn eval_with(&self, z: C64, tol: &Tolerances) -> Result<C64> {
        self.check_closed_disk(z, tol)?;
        Ok(self.value_unchecked(z))
    }

    /// Pseudocontinuation `1/conj(θ(1/z̄))` for `|z| > 1`.
    pub fn eval_exterior(&self, z: C64) -> Result<C64> {
        self.eval_exterior_with(z, &Tolerances::default())
    }

    pub fn eval_exterior_with(&self, z: C64, tol: &Tolerances) -> Result<C64> {
        if !(z.norm() > 1.0) || !z.norm().is_finite() {
            return Err(TtoError::Domain(format!("eval_exterior needs |z| > 1, got {z}")));
        }
        let w = ONE / z.conj();
        if self.blaschke.iter().any(|b| (b.zero - w).norm() < tol.zero) {
            return Err(TtoError::Pole { z });
        }
        Ok(ONE / self.value_unchecked(w).conj())
    }

    /// `conj(θ(1/z̄))` for `|z| > 1`, the factor appearing in the exterior
    /// eigenvalue conditions. Evaluated in the interior, so it stays bounded.
    pub fn reflected_conj(&self, z: C64) -> C64 {
        self.value_unchecked(ONE / z.conj()).conj()
    }

    /// θ'(z) for `z ∈ 𝔻` by the product rule over factors.
    pub fn eval_derivative(&self, z: C64) -> Result<C64> {
        if !(z.norm() < 1.0) {
            return Err(TtoError::Domain(format!(
                "derivative requested outside the open disk at {z}"
            )));
        }
        if self.distance_to_spectrum(z) == 0.0 {
            return Err(TtoError::Domain(format!("z = {z} hits an atom")));
        }
        Ok(self.divided_difference(z, z))
    }

    /// Derivative without domain checks (valid anywhere off poles and atoms).
    pub fn derivative_unchecked(&self, z: C64) -> C64 {
        self.divided_difference(z, z)
    }
}

/// `(e^x − 1)/x`, accurate near zero.
pub(crate) fn exprel(x: C64) -> C64 {
    if x.norm() < 0.1 {
        // Taylor series; 16 terms reach double precision for |x| < 0.1.
        let mut term = ONE;
        let mut sum = ONE;
        for k in 2..18 {
            term = term * x / k as f64;
            sum += term;
        }
        sum
    } else {
        (x.exp() - ONE) / x
    }
}

/// JSON fragment describing an inner function.
///
/// `{"blaschke": [{"zero": [re, im], "mult": k}], "atoms": [{"angle": t,
/// "mass": m}], "constant_phase": p}`. The atom at angle `t` contributes
/// `exp((m/2)(z + e^{it})/(z − e^{it}))`; the constant is `e^{ip}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct InnerFunctionSpec {
    #[serde(default)]
    pub blaschke: Vec<BlaschkeSpec>,
    #[serde(default)]
    pub atoms: Vec<AtomSpec>,
    #[serde(default)]
    pub constant_phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlaschkeSpec {
    pub zero: [f64; 2],
    #[serde(default = "one")]
    pub mult: u32,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub angle: f64,
    pub mass: f64,
}

impl InnerFunctionSpec {
    pub fn build(&self) -> Result<InnerFunction> {
        let blaschke = self
            .blaschke
            .iter()
            .map(|b| BlaschkeFactor::new(C64::new(b.zero[0], b.zero[1]), b.mult))
            .collect::<Result<Vec<_>>>()?;
        let atoms = self
            .atoms
            .iter()
            .map(|a| SingularAtom::from_angle(a.angle, a.mass))
            .collect::<Result<Vec<_>>>()?;
        InnerFunction::new(blaschke, atoms, C64::from_polar(1.0, self.constant_phase))
    }
}

impl From<&InnerFunction> for InnerFunctionSpec {
    fn from(theta: &InnerFunction) -> Self {
        Self {
            blaschke: theta
                .blaschke
                .iter()
                .map(|b| BlaschkeSpec {
                    zero: [b.zero.re, b.zero.im],
                    mult: b.multiplicity,
                })
                .collect(),
            atoms: theta
                .atoms
                .iter()
                .map(|a| AtomSpec {
                    angle: a.location.arg(),
                    mass: a.mass,
                })
                .collect(),
            constant_phase: theta.constant.arg(),
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

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    fn sample_theta() -> InnerFunction {
        InnerFunction::new(
            vec![
                BlaschkeFactor::new(c(0.3, -0.2), 1).unwrap(),
                BlaschkeFactor::new(c(-0.5, 0.4), 2).unwrap(),
                BlaschkeFactor::new(ZERO, 1).unwrap(),
            ],
            vec![SingularAtom::from_angle(1.0, 0.7).unwrap()],
            C64::from_polar(1.0, 0.4),
        )
        .unwrap()
    }

    #[test]
    fn eval_examples() {
        assert!(close(
            InnerFunction::monomial(1).eval(c(0.5, 0.0)).unwrap(),
            c(0.5, 0.0),
            1e-15
        ));
        let atom = InnerFunction::atom_at_one();
        assert!(close(atom.eval(ZERO).unwrap(), c((-1.0f64).exp(), 0.0), 1e-15));
        let b = InnerFunction::from_zeros(&[c(0.5, 0.0)]).unwrap();
        assert!(close(b.eval(ZERO).unwrap(), c(0.5, 0.0), 1e-15));
    }

    #[test]
    fn eval_domain_errors() {
        let atom = InnerFunction::atom_at_one();
        assert!(matches!(atom.eval(ONE), Err(TtoError::Domain(_))));
        assert!(matches!(atom.eval(c(1.0, 1e-9)), Err(TtoError::Domain(_))));
        assert!(matches!(atom.eval(c(1.5, 0.0)), Err(TtoError::Domain(_))));
        // On the circle away from the atom it is unimodular.
        let v = atom.eval(c(0.0, 1.0)).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn exterior_examples() {
        assert!(close(
            InnerFunction::monomial(1).eval_exterior(c(2.0, 0.0)).unwrap(),
            c(2.0, 0.0),
            1e-14
        ));
        assert!(close(
            InnerFunction::monomial(2).eval_exterior(c(2.0, 0.0)).unwrap(),
            c(4.0, 0.0),
            1e-14
        ));
        let b = InnerFunction::from_zeros(&[c(0.5, 0.0)]).unwrap();
        assert!(close(b.eval_exterior(c(3.0, 0.0)).unwrap(), c(5.0, 0.0), 1e-13));
        assert!(matches!(b.eval_exterior(c(2.0, 0.0)), Err(TtoError::Pole { .. })));
        assert!(matches!(b.eval_exterior(c(0.5, 0.0)), Err(TtoError::Domain(_))));
    }

    #[test]
    fn derivative_examples() {
        assert!(close(
            InnerFunction::monomial(2).eval_derivative(c(0.5, 0.0)).unwrap(),
            ONE,
            1e-15
        ));
        let atom = InnerFunction::atom_at_one();
        assert!(close(
            atom.eval_derivative(ZERO).unwrap(),
            c(-2.0 * (-1.0f64).exp(), 0.0),
            1e-15
        ));
        let sq = InnerFunction::new(vec![BlaschkeFactor::new(c(0.5, 0.0), 2).unwrap()], vec![], ONE).unwrap();
        assert!(sq.eval_derivative(c(0.5, 0.0)).unwrap().norm() < 1e-15);
        assert!(sq.eval_derivative(c(1.0, 0.0)).is_err());
    }

    #[test]
    fn boundary_spectrum_examples() {
        assert!(InnerFunction::monomial(3).boundary_spectrum().is_empty());
        assert_eq!(InnerFunction::atom_at_one().boundary_spectrum(), vec![ONE]);
        let t = InnerFunction::from_zeros(&[c(0.2, 0.1)]).unwrap().product(
            &InnerFunction::new(
                vec![],
                vec![SingularAtom::from_angle(std::f64::consts::PI, 1.0).unwrap()],
                ONE,
            )
            .unwrap(),
        );
        let s = t.boundary_spectrum();
        assert_eq!(s.len(), 1);
        assert!(close(s[0], c(-1.0, 0.0), 1e-15));
    }

    #[test]
    fn constructor_validation() {
        assert!(BlaschkeFactor::new(c(1.0, 0.0), 1).is_err());
        assert!(BlaschkeFactor::new(c(0.2, 0.0), 0).is_err());
        assert!(SingularAtom::from_angle(0.0, 0.0).is_err());
        assert!(SingularAtom::new(c(0.5, 0.0), 1.0).is_err());
        let a = SingularAtom::new(c(1.0 + 1e-9, 0.0), 1.0).unwrap();
        assert!((a.location().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn modulus_invariants() {
        let theta = sample_theta();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let r = rng.gen::<f64>().sqrt() * 0.999;
            let z = C64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU));
            assert!(theta.eval(z).unwrap().norm() < 1.0);
        }
        let mut checked = 0;
        for k in 0..200 {
            let z = C64::from_polar(1.0, k as f64 * std::f64::consts::TAU / 200.0);
            if theta.distance_to_spectrum(z) > 0.1 {
                assert!((theta.eval(z).unwrap().norm() - 1.0).abs() < 1e-10);
                checked += 1;
            }
        }
        assert!(checked >= 100);
    }

    #[test]
    fn derivative_matches_central_difference() {
        let theta = sample_theta();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = 1e-6;
        for _ in 0..100 {
            let z = C64::from_polar(rng.gen::<f64>().sqrt() * 0.9, rng.gen_range(0.0..std::f64::consts::TAU));
            let exact = theta.eval_derivative(z).unwrap();
            let fd = (theta.eval(z + h).unwrap() - theta.eval(z - h).unwrap()) / (2.0 * h);
            assert!((exact - fd).norm() < 1e-6 * (1.0 + exact.norm()), "{exact} vs {fd}");
        }
    }

    #[test]
    fn multiplicativity() {
        let theta = sample_theta();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let z = C64::from_polar(
                rng.gen::<f64>().sqrt() * 0.95,
                rng.gen_range(0.0..std::f64::consts::TAU),
            );
            let mut product = theta.constant();
            for b in theta.blaschke() {
                let single = InnerFunction::new(vec![*b], vec![], ONE).unwrap();
                product *= single.eval(z).unwrap();
            }
            for a in theta.atoms() {
                let single = InnerFunction::new(vec![], vec![*a], ONE).unwrap();
                product *= single.eval(z).unwrap();
            }
            assert!((product - theta.eval(z).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn divided_difference_matches_quotient() {
        let theta = sample_theta();
        let z = c(0.3, 0.6);
        let w = c(-0.2, 0.1);
        let q = (theta.value_unchecked(z) - theta.value_unchecked(w)) / (z - w);
        assert!((theta.divided_difference(z, w) - q).norm() < 1e-13);
        // Exterior point: uses the continuation.
        let w = c(1.4, -0.7);
        let q = (theta.value_unchecked(z) - theta.value_unchecked(w)) / (z - w);
        assert!((theta.divided_difference(z, w) - q).norm() < 1e-12 * (1.0 + q.norm()));
    }

    #[test]
    fn spec_round_trip() {
        let theta = sample_theta();
        let spec = InnerFunctionSpec::from(&theta);
        let back = spec.build().unwrap();
        let z = c(0.1, 0.2);
        assert!((back.eval(z).unwrap() - theta.eval(z).unwrap()).norm() < 1e-14);
        let json = serde_json::to_string(&spec).unwrap();
        let parsed: InnerFunctionSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed, spec);
    }

    proptest! {
        #[test]
        fn reflection_identity(r in 1.001f64..3.0, t in 0.0f64..std::f64::consts::TAU) {
            let theta = sample_theta();
            let z = C64::from_polar(r, t);
            let inner = theta.eval(ONE / z.conj()).unwrap();
            let outer = theta.eval_exterior(z).unwrap();
            prop_assert!((outer * inner.conj() - ONE).norm() < 1e-10);
            prop_assert!(outer.norm() > 1.0);
        }
    }
}
