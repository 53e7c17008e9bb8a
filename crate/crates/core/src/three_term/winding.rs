//! Argument-principle zero counting by adaptive phase accumulation.

use std::f64::consts::{FRAC_PI_4, TAU};

use num_complex::Complex64;

use crate::error::{Result, TtoError};

type C64 = Complex64;

/// `|F|` below this on a contour aborts the count.
pub const MIN_MODULUS: f64 = 1e-12;

/// Smallest parameter step before giving up.
const MIN_STEP: f64 = 1e-15;

fn checked(f: &impl Fn(C64) -> (C64, C64), z: C64) -> Result<(C64, C64)> {
    let (v, d) = f(z);
    if !(v.norm() >= MIN_MODULUS) {
        return Err(TtoError::ContourTooClose { z, modulus: v.norm() });
    }
    Ok((v, d))
}

/// Bound on the phase speed `|F'/F| |dz/ds|` at a point of the path.
fn speed(v: C64, d: C64, dz: C64) -> f64 {
    (d / v).norm() * dz.norm()
}

/// Total change of `arg F` along `path(s) = (z, dz/ds)`, `s ∈ [0, 1]`, where
/// `f(z) = (F(z), F'(z))`.
///
/// A step is accepted only if the phase change over it and over both of its
/// halves stays below π/4, the halves add up to the whole, and the linear
/// phase bound `|F'/F| |dz|` is below π/4 at both ends and the midpoint.
pub fn phase_change(f: &impl Fn(C64) -> (C64, C64), path: &impl Fn(f64) -> (C64, C64), pieces: usize) -> Result<f64> {
    let mut s = 0.0;
    let mut h = 1.0 / pieces.max(1) as f64;
    let (z0, dz0) = path(0.0);
    let (mut f0, d0) = checked(f, z0)?;
    let mut v0 = speed(f0, d0, dz0);
    let mut total = 0.0;
    while s < 1.0 {
        h = h.min(1.0 - s);
        if v0 > 0.0 {
            h = h.min(FRAC_PI_4 / v0);
        }
        if h < MIN_STEP {
            let z = path(s).0;
            return Err(TtoError::ContourTooClose {
                z,
                modulus: f(z).0.norm(),
            });
        }
        let s1 = if s + h >= 1.0 { 1.0 } else { s + h };
        let (z1, dz1) = path(s1);
        let (f1, d1v) = checked(f, z1)?;
        let v1 = speed(f1, d1v, dz1);
        let d = (f1 / f0).arg();
        if d.abs() > FRAC_PI_4 || v1 * (s1 - s) > FRAC_PI_4 {
            h *= 0.5;
            continue;
        }
        let (zm, dzm) = path(s + 0.5 * (s1 - s));
        let (fm, dm) = checked(f, zm)?;
        let vm = speed(fm, dm, dzm);
        let d1 = (fm / f0).arg();
        let d2 = (f1 / fm).arg();
        if d1.abs() > FRAC_PI_4 || d2.abs() > FRAC_PI_4 || (d1 + d2 - d).abs() > 1e-9 || vm * (s1 - s) > FRAC_PI_4 {
            h *= 0.5;
            continue;
        }
        total += d1 + d2;
        s = s1;
        f0 = f1;
        v0 = v1;
        h *= 1.5;
    }
    Ok(total)
}

/// Rounds an accumulated phase to a winding number.
pub fn to_winding(phase: f64) -> Result<i64> {
    let w = phase / TAU;
    let r = w.round();
    if (w - r).abs() > 1e-3 {
        return Err(TtoError::NoConvergence(format!(
            "phase {phase} is not a multiple of 2π"
        )));
    }
    Ok(r as i64)
}

/// Winding number of `F` around the circle `|z| = r`, counter-clockwise.
/// `f` returns `(F(z), F'(z))`.
pub fn circle_winding(f: &impl Fn(C64) -> (C64, C64), r: f64) -> Result<i64> {
    let path = |s: f64| {
        let z = C64::from_polar(r, TAU * s);
        (z, C64::new(0.0, TAU) * z)
    };
    to_winding(phase_change(f, &path, 64)?)
}

/// Cell of the `(log |z|, arg z)` rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarCell {
    pub u0: f64,
    pub u1: f64,
    pub p0: f64,
    pub p1: f64,
}

impl PolarCell {
    pub fn at(&self, u: f64, p: f64) -> C64 {
        C64::from_polar(u.exp(), p)
    }

    pub fn center(&self) -> C64 {
        self.at(0.5 * (self.u0 + self.u1), 0.5 * (self.p0 + self.p1))
    }

    /// Radial and angular extents in the z-plane.
    pub fn extents(&self) -> (f64, f64) {
        (self.u1.exp() - self.u0.exp(), self.u1.exp() * (self.p1 - self.p0))
    }

    pub fn diameter(&self) -> f64 {
        let (a, b) = self.extents();
        a.hypot(b)
    }

    /// Whether `z` lies in the cell, with a relative slack on each side.
    pub fn contains(&self, z: C64, slack: f64) -> bool {
        if z.norm() == 0.0 {
            return false;
        }
        let u = z.norm().ln();
        let p = self.p0 + (z.arg() - self.p0).rem_euclid(TAU);
        let du = slack * (self.u1 - self.u0);
        let dp = slack * (self.p1 - self.p0);
        // `p` lies in [p0, p0 + 2π); points just below p0 appear near p0 + 2π.
        let in_p = p <= self.p1 + dp || p - TAU >= self.p0 - dp;
        u >= self.u0 - du && u <= self.u1 + du && in_p
    }

    /// Number of zeros of `F` inside the cell (boundary traversed
    /// counter-clockwise in the z-plane).
    pub fn count(&self, f: &impl Fn(C64) -> (C64, C64)) -> Result<i64> {
        let Self { u0, u1, p0, p1 } = *self;
        let arc = |u: f64, a: f64, b: f64| {
            move |s: f64| {
                let z = C64::from_polar(u.exp(), a + s * (b - a));
                (z, C64::new(0.0, b - a) * z)
            }
        };
        let ray = |p: f64, a: f64, b: f64| {
            move |s: f64| {
                let z = C64::from_polar((a + s * (b - a)).exp(), p);
                (z, (b - a) * z)
            }
        };
        let pieces = |len: f64| ((len / 0.05).ceil() as usize).clamp(4, 256);
        let (radial, angular) = self.extents();
        // Outer arc forward, inner arc backward.
        let total = phase_change(f, &arc(u1, p0, p1), pieces(angular))?
            + phase_change(f, &ray(p1, u1, u0), pieces(radial))?
            + phase_change(f, &arc(u0, p1, p0), pieces(angular))?
            + phase_change(f, &ray(p0, u0, u1), pieces(radial))?;
        to_winding(total)
    }
}
