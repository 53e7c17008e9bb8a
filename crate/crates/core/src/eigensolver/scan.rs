//! Eigenvalue search over a rectangle of the λ-plane.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eigenfunction::{construct_eigenfunction, Eigenpair};
use super::system::{assemble, build_criterion, raw_determinant};
use crate::error::{Result, TtoError};
use crate::inner::InnerFunction;
use crate::parallel;
use crate::symbol::{sort_lex, LaurentSymbol, RootConfiguration, Side};
use crate::tolerances::{default_truncation, Tolerances};

type C64 = Complex64;

const MAX_NEWTON: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Region {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let r = Self {
            re_min,
            re_max,
            im_min,
            im_max,
        };
        r.validate()?;
        Ok(r)
    }

    /// Square centred at the origin.
    pub fn square(half_width: f64) -> Result<Self> {
        Self::new(-half_width, half_width, -half_width, half_width)
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.re_min, self.re_max, self.im_min, self.im_max]
            .iter()
            .all(|x| x.is_finite());
        if !all_finite {
            return Err(TtoError::InvalidInput("region bounds must be finite".into()));
        }
        if !(self.re_max > self.re_min && self.im_max > self.im_min) {
            return Err(TtoError::InvalidInput("empty region".into()));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    /// Membership with an absolute slack on every side.
    pub fn contains(&self, z: C64, slack: f64) -> bool {
        z.re >= self.re_min - slack
            && z.re <= self.re_max + slack
            && z.im >= self.im_min - slack
            && z.im <= self.im_max + slack
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    /// Nodes per side of the sampling grid (at least 16).
    pub grid: usize,
    /// Truncation order of eigenfunction expansions.
    pub truncation: usize,
    pub tol: Tolerances,
}

impl ScanOptions {
    pub fn for_theta(theta: &InnerFunction) -> Self {
        Self {
            grid: 64,
            truncation: default_truncation(theta),
            tol: Tolerances::for_theta(theta),
        }
    }
}

/// One evaluation of the criterion statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSample {
    pub lambda: C64,
    /// `sigma_min / ‖matrix‖`, absent when excluded.
    pub sigma: Option<f64>,
    pub inside_count: Option<usize>,
    pub exclusion: Option<String>,
    /// Roots of `Q` sorted by (Re, Im); empty if root finding failed.
    pub roots: Vec<C64>,
}

impl GridSample {
    fn class(&self) -> Option<(f64, usize)> {
        Some((self.sigma?, self.inside_count?))
    }
}

/// A grid cell with at least one excluded corner.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcludedCell {
    pub bounds: Region,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedFailure {
    pub seed: C64,
    pub sigma: f64,
    pub reason: String,
}

/// A refined λ that did not become an eigenpair.
#[derive(Debug, Clone, PartialEq)]
pub struct RejectedCandidate {
    pub lambda: C64,
    pub error: TtoError,
}

#[derive(Debug, Clone)]
pub struct ScanReport {
    /// Accepted eigenpairs sorted by (Re λ, Im λ).
    pub eigenpairs: Vec<Eigenpair>,
    /// Grid nodes in row-major order (imaginary part outer), followed by the
    /// extra points of subdivided cells.
    pub samples: Vec<GridSample>,
    pub excluded_cells: Vec<ExcludedCell>,
    /// Seeds below the seed threshold whose refinement failed.
    pub seed_failures: Vec<SeedFailure>,
    pub rejected: Vec<RejectedCandidate>,
}

impl ScanReport {
    pub fn eigenvalues(&self) -> Vec<C64> {
        self.eigenpairs.iter().map(|p| p.lambda).collect()
    }
}

fn sample(theta: &InnerFunction, phi: &LaurentSymbol, lambda: C64, tol: &Tolerances) -> Result<GridSample> {
    let roots = phi.roots_raw(lambda)?;
    let built =
        RootConfiguration::from_roots(phi, lambda, roots.clone(), tol).and_then(|cfg| assemble(theta, phi, cfg, tol));
    match built {
        Ok(sys) => Ok(GridSample {
            lambda,
            sigma: Some(sys.relative_sigma()),
            inside_count: Some(sys.config.inside_count()),
            exclusion: None,
            roots,
        }),
        Err(e @ (TtoError::CircleRoots { .. } | TtoError::DegenerateRoots { .. } | TtoError::Pole { .. })) => {
            Ok(GridSample {
                lambda,
                sigma: None,
                inside_count: None,
                exclusion: Some(e.to_string()),
                roots,
            })
        }
        Err(e) => Err(e),
    }
}

/// True when some root, followed by nearest-neighbour tracking from the
/// first corner, lies on different sides of the circle at different corners.
/// The cell then contains a λ with a root on the circle.
fn root_crosses_circle(corners: &[&GridSample]) -> bool {
    let base = &corners[0].roots;
    let sides = sides_of(base);
    corners[1..]
        .iter()
        .any(|c| sides_of(&track_roots(base, &c.roots)) != sides)
}

/// Reorders `new` so that entry `i` is the nearest available match to `old[i]`.
pub(crate) fn track_roots(old: &[C64], new: &[C64]) -> Vec<C64> {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(old.len() * new.len());
    for (i, a) in old.iter().enumerate() {
        for (j, b) in new.iter().enumerate() {
            pairs.push(((a - b).norm(), i, j));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut out = vec![None; old.len()];
    let mut used = vec![false; new.len()];
    for (_, i, j) in pairs {
        if out[i].is_none() && !used[j] {
            out[i] = Some(new[j]);
            used[j] = true;
        }
    }
    out.into_iter().map(|x| x.expect("same root count")).collect()
}

fn sides_of(roots: &[C64]) -> Vec<Side> {
    roots
        .iter()
        .map(|z| if z.norm() < 1.0 { Side::Inside } else { Side::Outside })
        .collect()
}

/// Newton iteration on the determinant with the root labelling frozen.
fn refine_seed(
    theta: &InnerFunction,
    phi: &LaurentSymbol,
    seed: C64,
    region: &Region,
) -> std::result::Result<C64, String> {
    let det_at = |roots: &[C64], sides: &[Side]| raw_determinant(theta, phi, roots, sides);
    let tracked = |prev: &[C64], lambda: C64| -> std::result::Result<Vec<C64>, String> {
        let r = phi.roots_raw(lambda).map_err(|e| e.to_string())?;
        Ok(track_roots(prev, &r))
    };
    let mut lambda = seed;
    let mut roots = phi.roots_raw(lambda).map_err(|e| e.to_string())?;
    let sides = sides_of(&roots);
    let mut d = det_at(&roots, &sides);
    let max_step = 0.25 * region.diagonal();
    for _ in 0..MAX_NEWTON {
        if d.norm() == 0.0 {
            return Ok(lambda);
        }
        let h = 1e-6 * (1.0 + lambda.norm());
        let rp = tracked(&roots, lambda + h)?;
        let rm = tracked(&roots, lambda - h)?;
        let dd = (det_at(&rp, &sides) - det_at(&rm, &sides)) / (2.0 * h);
        if dd.norm() == 0.0 || !dd.re.is_finite() || !dd.im.is_finite() {
            return Err(format!("flat determinant at {lambda}"));
        }
        let mut step = d / dd;
        if step.norm() > max_step {
            step *= max_step / step.norm();
        }
        // Backtrack while the determinant grows.
        let mut accepted = None;
        for _ in 0..12 {
            let next = lambda - step;
            let next_roots = tracked(&roots, next)?;
            if sides_of(&next_roots) != sides {
                step *= 0.5;
                continue;
            }
            let next_d = det_at(&next_roots, &sides);
            if next_d.norm() <= d.norm() || step.norm() < 1e-10 * (1.0 + lambda.norm()) {
                accepted = Some((next, next_roots, next_d));
                break;
            }
            step *= 0.5;
        }
        let Some((next, next_roots, next_d)) = accepted else {
            return Err(format!("no descent from {lambda} without a classification flip"));
        };
        lambda = next;
        roots = next_roots;
        d = next_d;
        if !region.contains(lambda, 0.5 * region.diagonal()) {
            return Err(format!("iterate {lambda} left the region"));
        }
        if step.norm() < 1e-13 * (1.0 + lambda.norm()) {
            return Ok(lambda);
        }
    }
    Err(format!("Newton did not converge from {seed}"))
}

/// Indices of grid nodes that are local minima among same-class neighbours.
fn node_minima(samples: &[GridSample], g: usize) -> Vec<usize> {
    let mut out = Vec::new();
    for j in 0..g {
        for i in 0..g {
            let idx = j * g + i;
            let Some((s, k)) = samples[idx].class() else {
                continue;
            };
            let mut is_min = true;
            'nb: for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let (ni, nj) = (i as i64 + di, j as i64 + dj);
                    if ni < 0 || nj < 0 || ni >= g as i64 || nj >= g as i64 {
                        continue;
                    }
                    let nidx = nj as usize * g + ni as usize;
                    if let Some((ns, nk)) = samples[nidx].class() {
                        if nk == k && (ns < s || (ns == s && nidx < idx)) {
                            is_min = false;
                            break 'nb;
                        }
                    }
                }
            }
            if is_min {
                out.push(idx);
            }
        }
    }
    out
}

fn dedupe(values: &mut Vec<C64>) {
    sort_lex(values);
    let mut out: Vec<C64> = Vec::with_capacity(values.len());
    for &v in values.iter() {
        if !out.iter().any(|&u| (u - v).norm() < 1e-8 * (1.0 + v.norm())) {
            out.push(v);
        }
    }
    *values = out;
}

/// Searches `region` for eigenvalues of `A_Φ` on `K_θ`.
pub fn scan_eigenvalues(
    theta: &InnerFunction,
    phi: &LaurentSymbol,
    region: &Region,
    opts: &ScanOptions,
) -> Result<ScanReport> {
    region.validate()?;
    if opts.grid < 16 {
        return Err(TtoError::InvalidInput(format!(
            "grid must be at least 16, got {}",
            opts.grid
        )));
    }
    phi.roots_raw(C64::new(region.re_min, region.im_min))?;
    let tol = &opts.tol;
    let g = opts.grid;
    let dx = region.width() / (g - 1) as f64;
    let dy = region.height() / (g - 1) as f64;
    let node = |i: usize, j: usize| C64::new(region.re_min + i as f64 * dx, region.im_min + j as f64 * dy);

    let nodes: Vec<C64> = (0..g * g).map(|idx| node(idx % g, idx / g)).collect();
    let mut samples: Vec<GridSample> = parallel::map(&nodes, |&l| sample(theta, phi, l, tol))
        .into_iter()
        .collect::<Result<_>>()?;

    // Cells with an excluded corner, or across which a root crosses the
    // circle, are reported. Cells whose corners disagree on the inside count
    // also get five extra points.
    let mut excluded_cells = Vec::new();
    let mut extra_points = Vec::new();
    let mut extra_cells = Vec::new();
    for j in 0..g - 1 {
        for i in 0..g - 1 {
            let corners = [j * g + i, j * g + i + 1, (j + 1) * g + i, (j + 1) * g + i + 1];
            let lo = node(i, j);
            let hi = node(i + 1, j + 1);
            let bounds = Region {
                re_min: lo.re,
                re_max: hi.re,
                im_min: lo.im,
                im_max: hi.im,
            };
            if let Some(reason) = corners.iter().find_map(|&c| samples[c].exclusion.clone()) {
                excluded_cells.push(ExcludedCell { bounds, reason });
                continue;
            }
            let corner_samples: Vec<&GridSample> = corners.iter().map(|&c| &samples[c]).collect();
            if root_crosses_circle(&corner_samples) {
                excluded_cells.push(ExcludedCell {
                    bounds,
                    reason: "a root of Q crosses the unit circle inside the cell".into(),
                });
            }
            let k0 = samples[corners[0]].inside_count;
            if corners.iter().any(|&c| samples[c].inside_count != k0) {
                extra_cells.push((corners, extra_points.len()));
                for (fx, fy) in [(0.5, 0.5), (0.5, 0.0), (0.0, 0.5), (1.0, 0.5), (0.5, 1.0)] {
                    extra_points.push(lo + C64::new(fx * dx, fy * dy));
                }
            }
        }
    }
    let extra: Vec<GridSample> = parallel::map(&extra_points, |&l| sample(theta, phi, l, tol))
        .into_iter()
        .collect::<Result<_>>()?;

    let mut seeds: Vec<(C64, f64)> = node_minima(&samples, g)
        .into_iter()
        .map(|idx| (samples[idx].lambda, samples[idx].sigma.unwrap_or(f64::INFINITY)))
        .collect();
    for (corners, start) in &extra_cells {
        let cell: Vec<&GridSample> = corners
            .iter()
            .map(|&c| &samples[c])
            .chain(extra[*start..*start + 5].iter())
            .collect();
        for p in &extra[*start..*start + 5] {
            let Some((s, k)) = p.class() else { continue };
            let beaten = cell.iter().filter_map(|q| q.class()).any(|(qs, qk)| qk == k && qs < s);
            if !beaten {
                seeds.push((p.lambda, s));
            }
        }
    }
    seeds.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    seeds.dedup_by(|a, b| a.0 == b.0);
    samples.extend(extra);

    let refined = parallel::map(&seeds, |&(seed, _)| refine_seed(theta, phi, seed, region));
    let mut seed_failures = Vec::new();
    let mut converged = Vec::new();
    for (&(seed, sigma), r) in seeds.iter().zip(refined) {
        match r {
            Ok(l) => converged.push(l),
            Err(reason) if sigma < tol.seed => seed_failures.push(SeedFailure { seed, sigma, reason }),
            Err(_) => {}
        }
    }
    let slack = 1e-9 * region.diagonal();
    converged.retain(|&l| region.contains(l, slack));
    dedupe(&mut converged);

    let outcomes = parallel::map(&converged, |&lambda| {
        let sys = build_criterion(theta, phi, lambda, tol)?;
        if !sys.is_candidate(tol) {
            return Err(TtoError::NoConvergence(format!(
                "refined point has relative sigma_min {:e}",
                sys.relative_sigma()
            )));
        }
        construct_eigenfunction(theta, phi, &sys, &sys.kernel, opts.truncation, tol)
    });
    let mut eigenpairs = Vec::new();
    let mut rejected = Vec::new();
    for (&lambda, o) in converged.iter().zip(outcomes) {
        match o {
            Ok(p) => eigenpairs.push(p),
            Err(error) => rejected.push(RejectedCandidate { lambda, error }),
        }
    }
    Ok(ScanReport {
        eigenpairs,
        samples,
        excluded_cells,
        seed_failures,
        rejected,
    })
}
