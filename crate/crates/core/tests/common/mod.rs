#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tto_core::{Complex64 as C64, InnerFunction, LaurentSymbol, Region};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn square_coeff(rng: &mut ChaCha8Rng) -> C64 {
    c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
}

/// Uniform point of the disk of radius `r`.
pub fn disk_point(rng: &mut ChaCha8Rng, r: f64) -> C64 {
    C64::from_polar(r * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU))
}

pub fn random_blaschke(rng: &mut ChaCha8Rng, degree: usize, max_modulus: f64) -> InnerFunction {
    let zeros: Vec<C64> = (0..degree).map(|_| disk_point(rng, max_modulus)).collect();
    InnerFunction::from_zeros(&zeros).unwrap()
}

/// Symbol with `1 ≤ N, M ≤ max_degree` and coefficients in [−2, 2]².
pub fn random_symbol(rng: &mut ChaCha8Rng, max_degree: usize) -> LaurentSymbol {
    let n = rng.gen_range(1..=max_degree);
    let m = rng.gen_range(1..=max_degree);
    loop {
        let anti: Vec<C64> = (0..n).map(|_| square_coeff(rng)).collect();
        let analytic: Vec<C64> = (0..=m).map(|_| square_coeff(rng)).collect();
        if anti[n - 1].norm() > 0.05 && analytic[m].norm() > 0.05 {
            return LaurentSymbol::new(anti, analytic).unwrap();
        }
    }
}

/// Bounding box of `points` padded on every side.
pub fn padded_region(points: &[C64], pad: f64) -> Region {
    let re_min = points.iter().map(|p| p.re).fold(f64::INFINITY, f64::min);
    let re_max = points.iter().map(|p| p.re).fold(f64::NEG_INFINITY, f64::max);
    let im_min = points.iter().map(|p| p.im).fold(f64::INFINITY, f64::min);
    let im_max = points.iter().map(|p| p.im).fold(f64::NEG_INFINITY, f64::max);
    let w = (re_max - re_min).max(im_max - im_min).max(1.0);
    let p = pad + 0.1 * w;
    Region::new(re_min - p, re_max + p, im_min - p, im_max + p).unwrap()
}

pub fn nearest_distance(z: C64, set: &[C64]) -> f64 {
    set.iter().map(|s| (s - z).norm()).fold(f64::INFINITY, f64::min)
}
