//! Zeros of `F(z) = zθ(z) − (β/z)θ(β/z)` in an annulus by recursive
//! argument-principle subdivision in `(log |z|, arg z)`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use super::winding::{circle_winding, PolarCell};
use crate::error::{Result, TtoError};
use crate::inner::InnerFunction;
use crate::parallel;

type C64 = Complex64;

/// Angular offset of the initial sectors, chosen to avoid symmetric zeros.
const SECTOR_OFFSET: f64 = 0.0713;
const SECTORS: usize = 8;
/// Split position, then the nudged positions tried when a zero sits on the cut.
const SPLIT_FRACTIONS: [f64; 4] = [0.4873, 0.5391, 0.4329, 0.5813];
/// Cells below this z-plane diameter are not split further.
const MIN_DIAMETER: f64 = 1e-6;
/// Relative size at which a cell around a fixed point `z0² = β` becomes a cluster.
const TRIVIAL_CLUSTER: f64 = 1e-3;
const MAX_NEWTON: usize = 60;

/// `F` and `F'` for a fixed β and θ.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Wert<'a> {
    pub beta: C64,
    pub theta: &'a InnerFunction,
}

impl Wert<'_> {
    pub fn f(&self, z: C64) -> C64 {
        let w = self.beta / z;
        z * self.theta.value_unchecked(z) - w * self.theta.value_unchecked(w)
    }

    pub fn f_df(&self, z: C64) -> (C64, C64) {
        (self.f(z), self.df(z))
    }

    pub fn df(&self, z: C64) -> C64 {
        let w = self.beta / z;
        let t = self.theta;
        t.value_unchecked(z)
            + z * t.derivative_unchecked(z)
            + (self.beta / (z * z)) * t.value_unchecked(w)
            + (self.beta * self.beta / (z * z * z)) * t.derivative_unchecked(w)
    }

    /// The two fixed points of `z ↦ β/z`.
    pub fn trivial_points(&self) -> [C64; 2] {
        let s = self.beta.sqrt();
        [s, -s]
    }

    fn newton(&self, z0: C64, tol: f64) -> Option<C64> {
        let mut z = z0;
        for _ in 0..MAX_NEWTON {
            let d = self.df(z);
            if d.norm() == 0.0 {
                return None;
            }
            let step = self.f(z) / d;
            z -= step;
            if !(z.re.is_finite() && z.im.is_finite()) || z.norm() == 0.0 {
                return None;
            }
            if step.norm() < tol * (1.0 + z.norm()) {
                return Some(z);
            }
        }
        None
    }
}

/// A zero of `F` with its argument-principle multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WertZero {
    pub z: C64,
    pub multiplicity: usize,
    /// False for clusters that Newton could not resolve.
    pub refined: bool,
}

/// Radii of the counted annulus: the outer circle is pulled in by `inset`
/// and the inner one is its image under `z ↦ β/z`.
pub(crate) fn contour_radii(beta: C64, inset: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&inset) {
        return Err(TtoError::InvalidInput(format!("inset must lie in [0, 1), got {inset}")));
    }
    let outer = 1.0 - inset;
    let inner = beta.norm() / outer;
    if !(inner < outer) {
        return Err(TtoError::InvalidInput(format!(
            "inset {inset} leaves an empty annulus for |β| = {}",
            beta.norm()
        )));
    }
    Ok((outer, inner))
}

/// Zeros of `F` in `inner < |z| < outer` counted by the argument principle.
pub(crate) fn zero_count(w: &Wert, outer: f64, inner: f64) -> Result<i64> {
    let f = |z: C64| w.f_df(z);
    Ok(circle_winding(&f, outer)? - circle_winding(&f, inner)?)
}

enum Step {
    Done(Vec<WertZero>),
    Split(Vec<(PolarCell, i64)>),
}

fn split(w: &Wert, cell: &PolarCell, count: i64) -> Result<Step> {
    let (radial, angular) = cell.extents();
    let f = |z: C64| w.f_df(z);
    let mut last = None;
    for frac in SPLIT_FRACTIONS {
        let (a, b) = if radial >= angular {
            let u = cell.u0 + frac * (cell.u1 - cell.u0);
            (PolarCell { u1: u, ..*cell }, PolarCell { u0: u, ..*cell })
        } else {
            let p = cell.p0 + frac * (cell.p1 - cell.p0);
            (PolarCell { p1: p, ..*cell }, PolarCell { p0: p, ..*cell })
        };
        match a.count(&f) {
            Ok(na) => {
                let nb = count - na;
                if na < 0 || nb < 0 {
                    return Err(TtoError::NoConvergence(format!(
                        "inconsistent zero counts {na} + {nb} != {count}"
                    )));
                }
                return Ok(Step::Split(vec![(a, na), (b, nb)]));
            }
            Err(e @ TtoError::ContourTooClose { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

fn process(w: &Wert, cell: &PolarCell, count: i64, refine_tol: f64) -> Result<Step> {
    if count == 0 {
        return Ok(Step::Done(vec![]));
    }
    if count < 0 {
        return Err(TtoError::NoConvergence(format!("negative zero count {count}")));
    }
    let trivial = w.trivial_points().into_iter().find(|&t| cell.contains(t, 0.0));
    let small = cell.diameter() < MIN_DIAMETER;
    // F is odd about a fixed point of z ↦ β/z, so a multiple zero there has
    // odd order and |F| decays at least cubically towards it; such cells are
    // not split below a fixed fraction of |z0|.
    let trivial_small = trivial.is_some_and(|t| cell.diameter() < TRIVIAL_CLUSTER * t.norm());
    if let (Some(t), true) = (trivial, count == 1 || trivial_small) {
        return Ok(Step::Done(vec![WertZero {
            z: t,
            multiplicity: count as usize,
            refined: true,
        }]));
    }
    if count == 1 {
        if let Some(z) = w.newton(cell.center(), refine_tol) {
            if cell.contains(z, 1e-6) {
                return Ok(Step::Done(vec![WertZero {
                    z,
                    multiplicity: 1,
                    refined: true,
                }]));
            }
        }
    }
    if small {
        let z = w
            .newton(cell.center(), refine_tol)
            .filter(|&z| cell.contains(z, 1e-6))
            .unwrap_or_else(|| cell.center());
        return Ok(Step::Done(vec![WertZero {
            z,
            multiplicity: count as usize,
            refined: false,
        }]));
    }
    split(w, cell, count)
}

/// Locates all zeros of `F` in `inner < |z| < outer`.
pub(crate) fn locate_zeros(w: &Wert, outer: f64, inner: f64, refine_tol: f64) -> Result<Vec<WertZero>> {
    let (u0, u1) = (inner.ln(), outer.ln());
    let sectors: Vec<PolarCell> = (0..SECTORS)
        .map(|k| PolarCell {
            u0,
            u1,
            p0: SECTOR_OFFSET + TAU * k as f64 / SECTORS as f64,
            p1: SECTOR_OFFSET + TAU * (k + 1) as f64 / SECTORS as f64,
        })
        .collect();
    let f = |z: C64| w.f_df(z);
    let counts: Vec<i64> = parallel::map(&sectors, |c| c.count(&f))
        .into_iter()
        .collect::<Result<_>>()?;
    let mut frontier: Vec<(PolarCell, i64)> = sectors.into_iter().zip(counts).collect();
    let mut zeros = Vec::new();
    while !frontier.is_empty() {
        let steps = parallel::map(&frontier, |(cell, n)| process(w, cell, *n, refine_tol));
        let mut next = Vec::new();
        for s in steps {
            match s? {
                Step::Done(z) => zeros.extend(z),
                Step::Split(children) => next.extend(children),
            }
        }
        frontier = next;
    }
    zeros.sort_by(|a, b| a.z.re.total_cmp(&b.z.re).then(a.z.im.total_cmp(&b.z.im)));
    let mut out: Vec<WertZero> = Vec::with_capacity(zeros.len());
    for z in zeros {
        if !out.iter().any(|o| (o.z - z.z).norm() < 1e-10 * (1.0 + z.z.norm())) {
            out.push(z);
        }
    }
    Ok(out)
}

/// Representative of the pair `{z, β/z}`: the member of larger modulus, or
/// on the circle `|z|² = |β|` the one with smaller real part (then smaller
/// imaginary part), comparing with a small tolerance.
pub(crate) fn pair_representative(beta: C64, z: C64) -> C64 {
    let partner = beta / z;
    let (a, b) = (z.norm_sqr(), partner.norm_sqr());
    if a > b * (1.0 + 1e-9) {
        return z;
    }
    if b > a * (1.0 + 1e-9) {
        return partner;
    }
    let eps = 1e-9 * (1.0 + z.norm());
    let z_first = if (z.re - partner.re).abs() > eps {
        z.re < partner.re
    } else {
        z.im <= partner.im
    };
    if z_first {
        z
    } else {
        partner
    }
}
