//! Subcommand implementations. Each returns a one-line summary for stdout.

use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use serde::Serialize;
use tto_core::oracle::{build_matrix, dense_spectrum};
use tto_core::three_term::{
    count_mixed_exclusion, mixed_samples, solve_three_term, AnnulusProblem, MixedExclusionReport, WertOptions,
    WertReport,
};
use tto_core::{scan_eigenvalues, spe_test, ScanOptions, SpeReport, TtoError};

use crate::config::ProblemConfig;
use crate::output::{float, write_atomic, write_json};
use crate::svg;
use crate::{Cli, CliError, Command, Common};

pub fn dispatch(cli: &Cli) -> Result<String, CliError> {
    let common = &cli.common;
    match &cli.command {
        Command::Scan => scan(common),
        Command::ThreeTerm(args) => three_term(
            common,
            args.coefficients.a,
            args.coefficients.b,
            args.coefficients.c,
            args.mixed_samples,
        ),
        Command::Oracle => oracle(common),
        Command::Spe(args) => spe(common, args.a, args.b, args.c),
        Command::InnerEval(args) => inner_eval(common, &args.points),
    }
}

fn load(common: &Common) -> Result<ProblemConfig, CliError> {
    let path = common
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("this subcommand needs --config <path>".into()))?;
    ProblemConfig::load(path)
}

fn list(values: &[C64]) -> String {
    let items: Vec<String> = values
        .iter()
        .map(|z| {
            let sign = if z.im.is_sign_negative() { "-" } else { "+" };
            format!("{}{sign}{}i", float(z.re), float(z.im.abs()))
        })
        .collect();
    format!("[{}]", items.join(", "))
}

#[derive(Serialize)]
struct EigenpairOut {
    lambda: C64,
    residual: f64,
    membership_defect: f64,
    truncation_tail: f64,
    p1: Vec<C64>,
    p2: Vec<C64>,
    /// Taylor coefficients of the unit-norm eigenfunction.
    fourier: Vec<C64>,
}

#[derive(Serialize)]
struct ExcludedOut {
    re_min: f64,
    re_max: f64,
    im_min: f64,
    im_max: f64,
    reason: String,
}

#[derive(Serialize)]
struct SeedFailureOut {
    seed: C64,
    sigma: f64,
    reason: String,
}

#[derive(Serialize)]
struct RejectedOut {
    lambda: C64,
    error: String,
}

#[derive(Serialize)]
struct ScanOut {
    grid: usize,
    truncation: usize,
    eigenpairs: Vec<EigenpairOut>,
    excluded_cells: Vec<ExcludedOut>,
    seed_failures: Vec<SeedFailureOut>,
    rejected: Vec<RejectedOut>,
}

fn scan(common: &Common) -> Result<String, CliError> {
    let cfg = load(common)?;
    let theta = cfg.theta()?;
    let phi = cfg.symbol()?;
    let region = cfg.region()?;
    let mut opts = ScanOptions::for_theta(&theta);
    opts.grid = common.grid.unwrap_or(cfg.grid);
    opts.truncation = common.truncation.unwrap_or_else(|| cfg.truncation_for(&theta));
    opts.tol = cfg.tolerances_for(&theta);
    if let Some(r) = common.tol_res {
        opts.tol.residual = r;
    }
    let report = scan_eigenvalues(&theta, &phi, &region, &opts)?;

    let out = ScanOut {
        grid: opts.grid,
        truncation: opts.truncation,
        eigenpairs: report
            .eigenpairs
            .iter()
            .map(|p| EigenpairOut {
                lambda: p.lambda,
                residual: p.residual,
                membership_defect: p.membership_defect,
                truncation_tail: p.truncation_tail,
                p1: p.p1.clone(),
                p2: p.p2.clone(),
                fourier: p.f.coeffs().to_vec(),
            })
            .collect(),
        excluded_cells: report
            .excluded_cells
            .iter()
            .map(|c| ExcludedOut {
                re_min: c.bounds.re_min,
                re_max: c.bounds.re_max,
                im_min: c.bounds.im_min,
                im_max: c.bounds.im_max,
                reason: c.reason.clone(),
            })
            .collect(),
        seed_failures: report
            .seed_failures
            .iter()
            .map(|s| SeedFailureOut {
                seed: s.seed,
                sigma: s.sigma,
                reason: s.reason.clone(),
            })
            .collect(),
        rejected: report
            .rejected
            .iter()
            .map(|r| RejectedOut {
                lambda: r.lambda,
                error: r.error.to_string(),
            })
            .collect(),
    };
    write_json(&common.out, "eigenpairs.json", &out)?;

    let mut csv = String::from("re,im,sigma_min\n");
    for s in &report.samples {
        let sigma = s.sigma.map(float).unwrap_or_default();
        let _ = writeln!(csv, "{},{},{}", float(s.lambda.re), float(s.lambda.im), sigma);
    }
    write_atomic(&common.out, "scan.csv", csv.as_bytes())?;

    let curve: Vec<C64> = (0..=512)
        .map(|k| phi.eval(C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 512.0)))
        .collect::<Result<_, TtoError>>()?;
    let excluded: Vec<[f64; 4]> = report
        .excluded_cells
        .iter()
        .map(|c| [c.bounds.re_min, c.bounds.re_max, c.bounds.im_min, c.bounds.im_max])
        .collect();
    let eigenvalues = report.eigenvalues();
    let plot = svg::spectrum(&svg::SpectrumPlot {
        title: &format!(
            "{} eigenvalues; shaded cells excluded; curve is the symbol on the circle",
            eigenvalues.len()
        ),
        bounds: [region.re_min, region.re_max, region.im_min, region.im_max],
        excluded: &excluded,
        curve: &curve,
        eigenvalues: &eigenvalues,
    });
    write_atomic(&common.out, "spectrum.svg", plot.as_bytes())?;

    Ok(format!(
        "scan: {} eigenvalue(s) {}; {} excluded cell(s)",
        eigenvalues.len(),
        list(&eigenvalues),
        report.excluded_cells.len()
    ))
}

#[derive(Serialize)]
struct SolutionOut {
    z1: C64,
    z2: C64,
    lambda: C64,
    trivial: bool,
    multiplicity: usize,
    refined: bool,
    confirmed: bool,
    residual: Option<f64>,
    note: Option<String>,
}

#[derive(Serialize)]
struct SpeOut {
    holds_in_disk: bool,
    holds_outside: bool,
    witnesses: Witnesses,
}

#[derive(Serialize)]
struct Witnesses {
    in_disk: Option<C64>,
    outside: Option<C64>,
}

impl From<SpeReport> for SpeOut {
    fn from(r: SpeReport) -> Self {
        Self {
            holds_in_disk: r.holds_in_disk,
            holds_outside: r.holds_outside,
            witnesses: Witnesses {
                in_disk: r.witness_in_disk,
                outside: r.witness_outside,
            },
        }
    }
}

#[derive(Serialize)]
struct ThreeTermOut {
    a: C64,
    b: C64,
    c: C64,
    beta: C64,
    exterior: bool,
    inset: f64,
    outer_radius: f64,
    inner_radius: f64,
    psi_pole_count: i64,
    located_zeros: usize,
    count_consistent: bool,
    eigenvalues: Vec<C64>,
    solutions: Vec<SolutionOut>,
    excluded_mixed: MixedExclusionReport,
    spe: SpeOut,
    hypercyclicity_obstruction: bool,
    note: String,
}

/// Inset offsets tried in turn when a contour passes too close to a zero.
const INSET_RETRIES: [f64; 4] = [0.0, 1e-8, 1e-7, 1e-6];

fn solve_with_retries(prob: &AnnulusProblem, opts: &WertOptions) -> Result<(WertReport, f64), CliError> {
    let mut last = None;
    for bump in INSET_RETRIES {
        let mut o = *opts;
        o.inset = opts.inset + bump;
        match solve_three_term(prob, &o) {
            Ok(r) => return Ok((r, o.inset)),
            Err(e @ TtoError::ContourTooClose { .. }) => last = Some(e),
            Err(e) => return Err(e.into()),
        }
    }
    Err(last.expect("at least one attempt").into())
}

fn three_term(common: &Common, a: C64, b: C64, c: C64, samples: usize) -> Result<String, CliError> {
    let cfg = load(common)?;
    let theta = cfg.theta()?;
    if a == C64::new(0.0, 0.0) || c == C64::new(0.0, 0.0) {
        return Err(TtoError::Precondition("a and c must be nonzero".into()).into());
    }
    let spe = spe_test(a, b, c)?;
    let prob = AnnulusProblem::new(a, b, c, theta.clone())?;
    let mut opts = WertOptions::for_theta(&theta);
    opts.inset = common.inset.or(cfg.inset).unwrap_or(opts.inset);
    opts.truncation = common.truncation.unwrap_or_else(|| cfg.truncation_for(&theta));
    opts.tol = cfg.tolerances_for(&theta);
    if let Some(r) = common.tol_res {
        opts.tol.residual = r;
    }
    let (report, inset) = solve_with_retries(&prob, &opts)?;
    let mixed = count_mixed_exclusion(&prob, &mixed_samples(&prob, samples), &opts.tol)?;
    let eigenvalues = report.eigenvalues();
    let obstruction = !eigenvalues.is_empty();
    let note = if obstruction {
        "A_Φ has an eigenvector. Since A_Φ is the adjoint of A_conj(Φ), the operator A_conj(Φ) is not hypercyclic; \
         conj(Φ) is again of the form a z̄ + b + c z with |a| ≠ |c|."
            .to_string()
    } else {
        "No eigenvalue was confirmed in the counted annulus, so no hypercyclicity obstruction is reported.".to_string()
    };

    let out = ThreeTermOut {
        a,
        b,
        c,
        beta: report.beta,
        exterior: report.exterior,
        inset,
        outer_radius: report.outer_radius,
        inner_radius: report.inner_radius,
        psi_pole_count: report.psi_pole_count,
        located_zeros: report.zero_total(),
        count_consistent: report.count_consistent(),
        eigenvalues: eigenvalues.clone(),
        solutions: report
            .solutions
            .iter()
            .map(|s| SolutionOut {
                z1: s.z1,
                z2: s.z2,
                lambda: s.lambda,
                trivial: s.trivial,
                multiplicity: s.multiplicity,
                refined: s.refined,
                confirmed: s.confirmed,
                residual: s.residual,
                note: s.note.clone(),
            })
            .collect(),
        excluded_mixed: mixed.clone(),
        spe: spe.into(),
        hypercyclicity_obstruction: obstruction,
        note,
    };
    write_json(&common.out, "three_term.json", &out)?;

    // Plot in the variable that was solved for.
    let to_plane = |z: C64| if report.exterior { z.conj().inv() } else { z };
    let zeros: Vec<C64> = report.zeros.iter().map(|z| z.z).collect();
    let trivial: Vec<C64> = report
        .solutions
        .iter()
        .filter(|s| s.trivial)
        .map(|s| to_plane(s.z1))
        .collect();
    let confirmed: Vec<C64> = report
        .solutions
        .iter()
        .filter(|s| s.confirmed)
        .flat_map(|s| [to_plane(s.z1), to_plane(s.z2)])
        .filter(|z| z.norm() < 1.0)
        .collect();
    let title = if report.exterior {
        "zeros of F in w = 1/conj(z); crosses: z² = β; rings: confirmed"
    } else {
        "zeros of F; crosses: z² = β; rings: confirmed"
    };
    let plot = svg::annulus(&svg::AnnulusPlot {
        title,
        outer_radius: report.outer_radius,
        inner_radius: report.inner_radius,
        zeros: &zeros,
        trivial: &trivial,
        confirmed: &confirmed,
    });
    write_atomic(&common.out, "annulus.svg", plot.as_bytes())?;

    Ok(format!(
        "three-term: {} zero(s) counted, {} located, {} eigenvalue(s) {}; {} mixed violation(s)",
        report.psi_pole_count,
        report.zero_total(),
        eigenvalues.len(),
        list(&eigenvalues),
        mixed.violations.len()
    ))
}

#[derive(Serialize)]
struct OracleEigen {
    lambda: C64,
    condition: f64,
    ill_conditioned: bool,
}

#[derive(Serialize)]
struct OracleOut {
    dimension: usize,
    /// Row-major matrix in the orthonormal rational basis of the model space.
    matrix: Vec<Vec<C64>>,
    spectrum: Vec<OracleEigen>,
}

fn oracle(common: &Common) -> Result<String, CliError> {
    let cfg = load(common)?;
    let theta = cfg.theta()?;
    let phi = cfg.symbol()?;
    let tto = build_matrix(&theta, &phi)?;
    let eig = dense_spectrum(&tto)?;
    let n = tto.matrix.nrows();
    let out = OracleOut {
        dimension: n,
        matrix: (0..n).map(|i| (0..n).map(|j| tto.matrix[(i, j)]).collect()).collect(),
        spectrum: eig
            .iter()
            .map(|e| OracleEigen {
                lambda: e.lambda,
                condition: e.condition,
                ill_conditioned: e.ill_conditioned,
            })
            .collect(),
    };
    write_json(&common.out, "oracle.json", &out)?;
    let values: Vec<C64> = eig.iter().map(|e| e.lambda).collect();
    Ok(format!("oracle: dimension {n}, spectrum {}", list(&values)))
}

fn spe(common: &Common, a: C64, b: C64, c: C64) -> Result<String, CliError> {
    let report = spe_test(a, b, c)?;
    let summary = format!(
        "spe: holds_in_disk {}, holds_outside {}",
        report.holds_in_disk, report.holds_outside
    );
    write_json(&common.out, "spe.json", &SpeOut::from(report))?;
    Ok(summary)
}

#[derive(Serialize)]
struct InnerPoint {
    z: C64,
    /// θ(z) inside the closed disk, the pseudocontinuation outside.
    value: Option<C64>,
    derivative: Option<C64>,
    error: Option<String>,
}

fn inner_eval(common: &Common, points: &[C64]) -> Result<String, CliError> {
    let cfg = load(common)?;
    let theta = cfg.theta()?;
    let rows: Vec<InnerPoint> = points
        .iter()
        .map(|&z| {
            let value = if z.norm() > 1.0 {
                theta.eval_exterior(z)
            } else {
                theta.eval(z)
            };
            let derivative = if z.norm() < 1.0 {
                theta.eval_derivative(z).ok()
            } else {
                None
            };
            match value {
                Ok(v) => InnerPoint {
                    z,
                    value: Some(v),
                    derivative,
                    error: None,
                },
                Err(e) => InnerPoint {
                    z,
                    value: None,
                    derivative: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    write_json(&common.out, "inner.json", &rows)?;
    Ok(format!(
        "inner-eval: {} point(s), {failed} outside the domain",
        rows.len()
    ))
}
