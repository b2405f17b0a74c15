use std::path::{Path, PathBuf};

use num_complex::Complex64;
use qwork_core::charfunc::{kms_charfunc_residual, sample_charfunc};
use qwork_core::oracle::{fock_charfunc_many, FockOracleConfig};
use qwork_core::workdist::{
    atoms, crooks_residual, fdr_ratio, invert_fft, jarzynski_average, mean_work, negativity, second_moment,
    second_moment_leading, variance, AtomicDistribution, InversionOptions, VerificationReport, DEFAULT_WEIGHT_FLOOR,
};
use qwork_core::{charfunc_pointlike, kms_residual, thermal_wightman, RunParams, SpectrumKind, StripPoint};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::{fmt, out_path, read_atoms, write_csv, write_json};

pub const KMS_TOL: f64 = 1e-10;
pub const CROOKS_TOL_SINGLE: f64 = 1e-10;
pub const CROOKS_TOL: f64 = 1e-8;
pub const JARZYNSKI_ATOMS_TOL: f64 = 1e-8;
pub const JARZYNSKI_CLOSED_TOL: f64 = 1e-10;
pub const FDR_TOL: f64 = 1e-6;
pub const ORACLE_TOL: f64 = 1e-6;
const DEFAULT_CUTOFF: usize = 40;

/// Verification outcome; a non-empty failure list means exit code 1.
#[derive(Debug, Default)]
pub struct Status {
    pub failures: Vec<String>,
}

impl Status {
    fn check(&mut self, name: &str, value: f64, tol: f64) {
        if !(value <= tol) {
            self.failures.push(format!("{name} = {value:e} exceeds {tol:e}"));
        }
    }
}

pub struct Context {
    pub cfg: RunConfig,
    pub out_dir: PathBuf,
}

impl Context {
    fn comments(&self, command: &str, params: &RunParams) -> Vec<(String, String)> {
        vec![
            ("command".into(), command.into()),
            ("spectrum".into(), params.spectrum().provenance().to_string()),
            ("lines".into(), params.spectrum().len().to_string()),
            ("lapse".into(), fmt(self.cfg.lapse)),
            ("switching".into(), format!("{:?}", params.switching())),
            ("beta".into(), fmt(params.beta())),
            ("lambda".into(), fmt(params.lambda())),
        ]
    }

    fn path(&self, name: &str) -> Result<PathBuf> {
        out_path(&self.out_dir, name)
    }
}

pub fn charfunc(ctx: &Context) -> Result<PathBuf> {
    let params = ctx.cfg.params()?;
    let samples = sample_charfunc(&params, ctx.cfg.grid)?;
    let rows: Vec<Vec<String>> =
        samples.mu().iter().zip(&samples.values).map(|(mu, v)| vec![fmt(*mu), fmt(v.re), fmt(v.im)]).collect();
    let path = ctx.path("charfunc.csv")?;
    write_csv(&path, &ctx.comments("charfunc", &params), &["mu", "re", "im"], &rows)?;
    Ok(path)
}

fn atom_rows(d: &AtomicDistribution) -> Vec<Vec<String>> {
    d.atoms().iter().map(|a| vec![fmt(a.w), fmt(a.p)]).collect()
}

/// Atoms for discrete spectra, a sampled density for continuum ones.
pub fn workdist(ctx: &Context) -> Result<PathBuf> {
    let params = ctx.cfg.params()?;
    let mut comments = ctx.comments("workdist", &params);
    match params.spectrum().kind() {
        SpectrumKind::Discrete => {
            let d = atoms(&params, DEFAULT_WEIGHT_FLOOR)?;
            comments.push(("weight_floor".into(), fmt(DEFAULT_WEIGHT_FLOOR)));
            comments.push(("drift".into(), fmt(d.drift())));
            let path = ctx.path("atoms.csv")?;
            write_csv(&path, &comments, &["W", "p"], &atom_rows(&d))?;
            Ok(path)
        }
        SpectrumKind::Continuum => {
            let samples = sample_charfunc(&params, ctx.cfg.grid)?;
            let d = invert_fft(&samples, InversionOptions::for_samples(&samples))?;
            comments.push(("atom_at_zero".into(), fmt(d.atom_at_zero)));
            comments.push(("imag_residue".into(), fmt(d.imag_residue)));
            comments.push(("total_mass".into(), fmt(d.total_mass())));
            let rows: Vec<Vec<String>> =
                d.w_grid.iter().zip(&d.density).map(|(w, p)| vec![fmt(*w), fmt(*p)]).collect();
            let path = ctx.path("density.csv")?;
            write_csv(&path, &comments, &["W", "p_density"], &rows)?;
            Ok(path)
        }
    }
}

#[derive(Debug, Serialize)]
struct Moments {
    mean: f64,
    second_moment: f64,
    second_moment_leading: f64,
    variance: f64,
    fdr_ratio: f64,
}

pub fn moments(ctx: &Context) -> Result<String> {
    let p = ctx.cfg.params()?;
    let m = Moments {
        mean: mean_work(&p),
        second_moment: second_moment(&p),
        second_moment_leading: second_moment_leading(&p),
        variance: variance(&p),
        fdr_ratio: fdr_ratio(&p),
    };
    write_json(&ctx.path("moments.json")?, &m)
}

fn symmetric_points(half: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| -half + 2.0 * half * k as f64 / (n - 1) as f64).collect()
}

/// Runs every check that applies to the configured spectrum. `atoms_file`
/// replaces the generated atoms, including their β.
pub fn verify(ctx: &Context, atoms_file: Option<&Path>, wightman_csv: bool) -> Result<(String, Status)> {
    let params = ctx.cfg.params()?;
    let spec = params.spectrum();
    let beta = params.beta();
    let mut status = Status::default();
    let mut report = VerificationReport::default();

    let taus = symmetric_points(5.0, 101);
    let eps = 0.1 * beta;
    report.kms_residual = kms_residual(spec, beta, &taus, eps)?;
    status.check("kms_residual", report.kms_residual, KMS_TOL);
    if wightman_csv {
        let mut rows = Vec::with_capacity(taus.len());
        for &t in &taus {
            let point = StripPoint::regulated(t, eps, beta)?;
            let w = thermal_wightman(spec, beta, &point)?;
            rows.push(vec![fmt(point.dtau().re), fmt(point.dtau().im), fmt(w.re), fmt(w.im)]);
        }
        let path = ctx.path("wightman.csv")?;
        write_csv(&path, &ctx.comments("verify", &params), &["dtau_re", "dtau_im", "W_re", "W_im"], &rows)?;
    }

    report.charfunc_kms_residual = kms_charfunc_residual(&params, &symmetric_points(50.0, 512))?;
    status.check("charfunc_kms_residual", report.charfunc_kms_residual, KMS_TOL);
    report.charfunc_jarzynski_error = (charfunc_pointlike(&params, Complex64::new(0.0, beta))? - 1.0).norm();
    status.check("charfunc_jarzynski_error", report.charfunc_jarzynski_error, JARZYNSKI_CLOSED_TOL);

    let dist = match atoms_file {
        Some(path) => Some(read_atoms(path)?),
        None if spec.kind() == SpectrumKind::Discrete => Some(atoms(&params, DEFAULT_WEIGHT_FLOOR)?),
        None => None,
    };
    match &dist {
        Some(d) => {
            let tol = if spec.len() == 1 { CROOKS_TOL_SINGLE } else { CROOKS_TOL };
            report.crooks_residual = crooks_residual(d, DEFAULT_WEIGHT_FLOOR);
            status.check("crooks_residual", report.crooks_residual, tol);
            report.jarzynski_error = (jarzynski_average(d, d.beta()) - 1.0).abs();
            status.check("jarzynski_error", report.jarzynski_error, JARZYNSKI_ATOMS_TOL);
            report.negative_mass = Some(negativity(d).negative_mass);
        }
        None => {
            // Continuum spectra have no lattice atoms.
            report.crooks_residual = f64::NAN;
            report.jarzynski_error = f64::NAN;
        }
    }

    report.fdr_ratio = fdr_ratio(&params);
    report.mean = mean_work(&params);
    report.second_moment = second_moment(&params);
    report.variance = variance(&params);
    if spec.len() == 1 && params.lambda() > 0.0 {
        let h = 0.5 * beta * spec.line(0).omega;
        status.check("fdr_ratio deviation", (report.fdr_ratio - h.tanh() / h).abs(), FDR_TOL);
    }

    if let Some(cutoff) = ctx.cfg.oracle_cutoff {
        let rows = oracle_rows(&params, cutoff, &symmetric_points(10.0, 16))?;
        let worst = rows.iter().map(|r| r.absdiff).fold(0.0, f64::max);
        report.oracle_max_abs_diff = Some(worst);
        status.check("oracle_max_abs_diff", worst, ORACLE_TOL);
    }

    let text = write_json(&ctx.path("report.json")?, &report)?;
    Ok((text, status))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Beta,
    Lambda,
    Lapse,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Beta => "beta",
            Axis::Lambda => "lambda",
            Axis::Lapse => "lapse",
        }
    }
}

fn sweep_row(cfg: &RunConfig, base: &RunParams, axis: Axis, value: f64) -> Result<Vec<String>> {
    let p = match axis {
        Axis::Beta => base.with_beta(value)?,
        Axis::Lambda => base.with_lambda(value)?,
        Axis::Lapse => RunParams::new(cfg.spectrum_with_lapse(value)?, cfg.switching, cfg.beta, cfg.lambda)?,
    };
    let jarzynski = (charfunc_pointlike(&p, Complex64::new(0.0, p.beta()))? - 1.0).norm();
    Ok(vec![
        fmt(value),
        fmt(mean_work(&p)),
        fmt(second_moment(&p)),
        fmt(variance(&p)),
        fmt(fdr_ratio(&p)),
        fmt(jarzynski),
    ])
}

/// One row per value, computed in parallel and written in input order.
pub fn sweep(ctx: &Context, axis: Axis, values: &[f64]) -> Result<PathBuf> {
    if values.is_empty() {
        return Err(CliError::Config("sweep needs at least one value".into()));
    }
    let base = ctx.cfg.params()?;
    let rows: Vec<Vec<String>> =
        values.par_iter().map(|&v| sweep_row(&ctx.cfg, &base, axis, v)).collect::<Result<_>>()?;
    let mut comments = ctx.comments("sweep", &base);
    comments.push(("axis".into(), axis.name().into()));
    let path = ctx.path(&format!("sweep_{}.csv", axis.name()))?;
    write_csv(
        &path,
        &comments,
        &[axis.name(), "mean", "second_moment", "variance", "fdr_ratio", "jarzynski_error"],
        &rows,
    )?;
    Ok(path)
}

struct OracleRow {
    mu: f64,
    closed: Complex64,
    oracle: Complex64,
    absdiff: f64,
}

fn oracle_rows(params: &RunParams, cutoff: usize, mus: &[f64]) -> Result<Vec<OracleRow>> {
    let spec = params.spectrum();
    if spec.kind() != SpectrumKind::Discrete || spec.len() > 3 {
        return Err(CliError::Config(format!(
            "oracle needs a discrete spectrum with at most 3 lines, got {} {:?} lines",
            spec.len(),
            spec.kind()
        )));
    }
    let cfg = FockOracleConfig::new(spec.to_lines(), cutoff, params.beta(), params.lambda(), *params.switching())?;
    let points: Vec<Complex64> = mus.iter().map(|&m| Complex64::new(m, 0.0)).collect();
    let chunk = points.len().div_ceil(rayon::current_num_threads()).max(1);
    let oracle: Vec<Complex64> = points
        .par_chunks(chunk)
        .map(|c| fock_charfunc_many(&cfg, c).map(|v| v.into_iter().map(|o| o.value()).collect::<Vec<_>>()))
        .collect::<qwork_core::Result<Vec<_>>>()?
        .concat();
    points
        .iter()
        .zip(oracle)
        .map(|(mu, o)| {
            let closed = charfunc_pointlike(params, *mu)?;
            Ok(OracleRow { mu: mu.re, closed, oracle: o, absdiff: (closed - o).norm() })
        })
        .collect()
}

pub fn oracle_compare(ctx: &Context) -> Result<(PathBuf, Status)> {
    let params = ctx.cfg.params()?;
    let cutoff = ctx.cfg.oracle_cutoff.unwrap_or(DEFAULT_CUTOFF);
    let rows = oracle_rows(&params, cutoff, &ctx.cfg.grid.points())?;
    let mut status = Status::default();
    let worst = rows.iter().map(|r| r.absdiff).fold(0.0, f64::max);
    status.check("oracle max absdiff", worst, ORACLE_TOL);
    let mut comments = ctx.comments("oracle-compare", &params);
    comments.push(("cutoff".into(), cutoff.to_string()));
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![fmt(r.mu), fmt(r.closed.re), fmt(r.closed.im), fmt(r.oracle.re), fmt(r.oracle.im), fmt(r.absdiff)])
        .collect();
    let path = ctx.path("oracle_compare.csv")?;
    write_csv(&path, &comments, &["mu", "closed_re", "closed_im", "oracle_re", "oracle_im", "absdiff"], &table)?;
    Ok((path, status))
}
