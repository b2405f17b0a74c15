//! Characteristic function `P̃(μ)` of the Ramsey work distribution for a
//! thermal field, plus the Magnus phase and the smeared commutator.
//!
//! For a pointlike detector each mode line contributes a compound-Poisson
//! exponent. With `s = λ² w f2 |χ̃(Ω)|² / (2Ω)` and `n̄ = 1/(e^{βΩ} − 1)`,
//!
//! ```text
//! ln P̃(μ) = Σ s [(1 + n̄)(e^{iΩμ} − 1) + n̄ (e^{−iΩμ} − 1)]
//! ```
//!
//! For real μ this splits into `b (cos Ωμ − 1) + i s sin Ωμ` with
//! `b = s coth(βΩ/2) = a cosh(βΩ/2)` and `a = s / sinh(βΩ/2)`; the real
//! part is evaluated as `−2b sin²(Ωμ/2)` so no cancellation occurs.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::{dawson, gauss_legendre};
use crate::spectra::{ModeSpectrum, SpectrumKind};
use crate::switching::SwitchingProfile;
use crate::wightman::{thermal_wightman, StripPoint};

/// Lines whose `b` falls below this are dropped from the exponent.
pub const DROP_BELOW: f64 = 1e-300;

/// Per-line data that does not depend on β or λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineCoefficients {
    pub omega: f64,
    pub weight: f64,
    pub f2: f64,
    /// `|χ̃(Ω)|²`.
    pub chi2: f64,
}

/// Thermal and coupling factors of one line at given β, λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeFactors {
    pub omega: f64,
    /// `s = λ² w f2 |χ̃|² / (2Ω)`.
    pub s: f64,
    /// `ln s`, finite whenever `s > 0`.
    pub ln_s: f64,
    /// `βΩ/2`.
    pub half: f64,
    /// Mean occupation `n̄`.
    pub nbar: f64,
    /// `ln(1 + n̄)`.
    pub ln_1p_nbar: f64,
    /// `ln n̄`, also finite when `n̄` underflows.
    pub ln_nbar: f64,
}

impl ModeFactors {
    /// `b = s coth(βΩ/2)`.
    pub fn b(&self) -> f64 {
        self.s * (1.0 + 2.0 * self.nbar)
    }

    /// `a = s / sinh(βΩ/2)`.
    pub fn a(&self) -> f64 {
        self.ln_a().exp()
    }

    pub fn ln_a(&self) -> f64 {
        // ln sinh(h) = h + ln(1 − e^{−2h}) − ln 2
        let ln_sinh = self.half + (-(-2.0 * self.half).exp_m1()).ln() - std::f64::consts::LN_2;
        self.ln_s - ln_sinh
    }
}

/// Inverse temperature, coupling, spectrum and switching of one run.
#[derive(Debug, Clone)]
pub struct RunParams {
    beta: f64,
    lambda: f64,
    spec: ModeSpectrum,
    switching: SwitchingProfile,
    coeffs: Vec<LineCoefficients>,
}

impl RunParams {
    pub fn new(spec: ModeSpectrum, switching: SwitchingProfile, beta: f64, lambda: f64) -> Result<Self> {
        check_beta(beta)?;
        check_lambda(lambda)?;
        if spec.kind() == SpectrumKind::Continuum && matches!(switching, SwitchingProfile::Rectangular { .. }) {
            log::warn!("rectangular switching on a continuum spectrum: |χ̃|² decays only as Ω⁻²");
        }
        let mut coeffs = Vec::with_capacity(spec.len());
        for l in spec.lines() {
            coeffs.push(LineCoefficients {
                omega: l.omega,
                weight: l.weight,
                f2: l.f2,
                chi2: switching.fourier_abs2(l.omega)?,
            });
        }
        let params = Self { beta, lambda, spec, switching, coeffs };
        let sentinel: f64 = params
            .coeffs
            .iter()
            .map(|c| {
                let h = 0.5 * beta * c.omega;
                c.weight * c.f2 * c.chi2 * (1.0 + 1.0 / h.tanh()) / (2.0 * c.omega)
            })
            .sum();
        if !sentinel.is_finite() {
            return Err(Error::Convergence(format!("exponent mode sum = {sentinel}")));
        }
        Ok(params)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn spectrum(&self) -> &ModeSpectrum {
        &self.spec
    }

    pub fn switching(&self) -> &SwitchingProfile {
        &self.switching
    }

    pub fn coefficients(&self) -> &[LineCoefficients] {
        &self.coeffs
    }

    /// Same run at another inverse temperature; χ̃ is reused.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        Ok(Self { beta, ..self.clone() })
    }

    /// Same run at another coupling; χ̃ is reused.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Self { lambda, ..self.clone() })
    }

    /// Factors of every line with `b ≥` [`DROP_BELOW`].
    pub fn mode_factors(&self) -> Vec<ModeFactors> {
        self.coeffs.iter().filter_map(|c| self.mode_factors_of(c)).collect()
    }

    /// Factors of one line, `None` when the line is dropped.
    pub fn mode_factors_of(&self, c: &LineCoefficients) -> Option<ModeFactors> {
        let s = self.lambda * self.lambda * c.weight * c.f2 * c.chi2 / (2.0 * c.omega);
        let x = self.beta * c.omega;
        let one_minus = -(-x).exp_m1();
        let f = ModeFactors {
            omega: c.omega,
            s,
            ln_s: s.ln(),
            half: 0.5 * x,
            nbar: (-x).exp() / one_minus,
            ln_1p_nbar: -one_minus.ln(),
            ln_nbar: -x - one_minus.ln(),
        };
        (s > 0.0 && f.b() >= DROP_BELOW).then_some(f)
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::param("beta", format!("must be positive and finite, got {beta}")));
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::param("lambda", format!("must be nonnegative and finite, got {lambda}")));
    }
    Ok(())
}

/// `e^z − 1` without cancellation for small `|z|`.
fn em1(z: Complex64) -> Complex64 {
    let sin_half = (0.5 * z.im).sin();
    let ea_m1 = z.re.exp_m1();
    let cos_m1 = -2.0 * sin_half * sin_half;
    Complex64::new(ea_m1 * z.im.cos() + cos_m1, z.re.exp() * z.im.sin())
}

/// `c · (e^{z} − 1)` where `c = e^{ln_c}` may be tiny and `e^z` large.
fn scaled_em1(ln_c: f64, z: Complex64) -> Complex64 {
    if z.re.abs() <= 1.0 {
        ln_c.exp() * em1(z)
    } else {
        (Complex64::new(ln_c, 0.0) + z).exp() - ln_c.exp()
    }
}

/// `ln P̃(μ)` for `|Im μ| ≤ β`.
pub fn exponent(params: &RunParams, mu: Complex64) -> Result<Complex64> {
    let beta = params.beta;
    if !(mu.re.is_finite() && mu.im.is_finite()) || mu.im.abs() > beta * (1.0 + 1e-14) {
        return Err(Error::Domain(format!("|Im μ| = {} exceeds β = {beta}", mu.im.abs())));
    }
    let factors = params.mode_factors();
    let mut sum = Complex64::new(0.0, 0.0);
    if mu.im == 0.0 {
        let x = mu.re;
        for f in &factors {
            let sh = (0.5 * f.omega * x).sin();
            sum += Complex64::new(-2.0 * f.b() * sh * sh, f.s * (f.omega * x).sin());
        }
    } else {
        let i = Complex64::i();
        for f in &factors {
            sum += scaled_em1(f.ln_s + f.ln_1p_nbar, i * f.omega * mu);
            sum += scaled_em1(f.ln_s + f.ln_nbar, -i * f.omega * mu);
        }
    }
    if !(sum.re.is_finite() && sum.im.is_finite()) {
        return Err(Error::Convergence(format!("exponent at μ = {mu} is not finite")));
    }
    Ok(sum)
}

/// Closed-form characteristic function of a pointlike detector.
pub fn charfunc_pointlike(params: &RunParams, mu: Complex64) -> Result<Complex64> {
    Ok(exponent(params, mu)?.exp())
}

/// Tensor Gauss-Legendre nodes on `[lo, hi]` split into `panels`.
fn nodes(lo: f64, hi: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(order);
    let h = (hi - lo) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let a = lo + p as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            out.push((a + 0.5 * h * (xi + 1.0), 0.5 * h * wi));
        }
    }
    out
}

fn initial_panels(params: &RunParams, len: f64) -> usize {
    let w = params.spec.max_omega().max(1.0);
    ((len * w / PI).ceil() as usize).max(8)
}

/// Characteristic function from the double time integral
/// `λ² ∫∫ χ(τ′) χ(τ) [W(τ′ − τ − μ) − W(τ′ − τ)]` against the mode-sum
/// Wightman function, with a regulator `ε = 1e−12 β`.
///
/// The panel count doubles until successive estimates of the exponent
/// agree within `tol`.
pub fn charfunc_quadrature(params: &RunParams, mu: f64, tol: f64) -> Result<Complex64> {
    if params.lambda == 0.0 || mu == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let beta = params.beta;
    let eps = 1e-12 * beta;
    let (lo, hi) = params.switching.support();
    let chi: &SwitchingProfile = &params.switching;
    let estimate = |panels: usize| -> Result<Complex64> {
        let pts = nodes(lo, hi, panels, 16);
        let weighted: Vec<(f64, f64)> = pts.iter().map(|&(t, w)| (t, w * chi.eval(t))).collect();
        let rows: Result<Vec<Complex64>> = weighted
            .par_iter()
            .map(|&(tp, wp)| {
                let mut acc = Complex64::new(0.0, 0.0);
                for &(t, w) in &weighted {
                    if w == 0.0 {
                        continue;
                    }
                    let shifted = thermal_wightman(&params.spec, beta, &StripPoint::regulated(tp - t - mu, eps, beta)?)?;
                    let plain = thermal_wightman(&params.spec, beta, &StripPoint::regulated(tp - t, eps, beta)?)?;
                    acc += w * (shifted - plain);
                }
                Ok(wp * acc)
            })
            .collect();
        Ok(params.lambda * params.lambda * rows?.into_iter().sum::<Complex64>())
    };
    let mut panels = initial_panels(params, hi - lo);
    let mut prev = estimate(panels)?;
    for _ in 0..4 {
        panels *= 2;
        let next = estimate(panels)?;
        let change = (next - prev).norm();
        if change <= tol {
            return Ok(next.exp());
        }
        prev = next;
    }
    Err(Error::Accuracy { requested: tol, achieved: (prev - estimate(panels / 2)?).norm() })
}

/// `∫∫_{τ′<τ} χ(τ) χ(τ′) sin(Ω(τ − τ′))` by nested Gauss-Legendre panels.
fn ordered_sine_integral(chi: &SwitchingProfile, omega: f64, panels: usize) -> f64 {
    let (lo, hi) = chi.support();
    let order = 20;
    let (x, w) = gauss_legendre(order);
    let h = (hi - lo) / panels as f64;
    // Full-panel integrals of χ e^{−iΩτ′} and their running prefix.
    let mut prefix = Vec::with_capacity(panels + 1);
    prefix.push(Complex64::new(0.0, 0.0));
    for p in 0..panels {
        let a = lo + p as f64 * h;
        let mut s = Complex64::new(0.0, 0.0);
        for (xi, wi) in x.iter().zip(&w) {
            let t = a + 0.5 * h * (xi + 1.0);
            s += 0.5 * h * wi * chi.eval(t) * Complex64::new(0.0, -omega * t).exp();
        }
        let last = *prefix.last().unwrap();
        prefix.push(last + s);
    }
    let mut total = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let a = lo + p as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            let t = a + 0.5 * h * (xi + 1.0);
            let ct = chi.eval(t);
            if ct == 0.0 {
                continue;
            }
            // Partial panel [a, t].
            let hp = t - a;
            let mut inner = prefix[p];
            for (xj, wj) in x.iter().zip(&w) {
                let u = a + 0.5 * hp * (xj + 1.0);
                inner += 0.5 * hp * wj * chi.eval(u) * Complex64::new(0.0, -omega * u).exp();
            }
            total += 0.5 * h * wi * ct * Complex64::new(0.0, omega * t).exp() * inner;
        }
    }
    total.im
}

/// Ordered double integral for one frequency, closed form for the
/// Gaussian and nested quadrature otherwise.
fn ordered_integral(chi: &SwitchingProfile, omega: f64) -> Result<f64> {
    if let SwitchingProfile::Gaussian { width } = *chi {
        return Ok(2.0 * PI.sqrt() * width * width * dawson(omega * width));
    }
    let coarse = ordered_sine_integral(chi, omega, 200);
    let fine = ordered_sine_integral(chi, omega, 400);
    let tol = 1e-10 * fine.abs().max(1.0);
    if (fine - coarse).abs() > tol {
        return Err(Error::Accuracy { requested: tol, achieved: (fine - coarse).abs() });
    }
    Ok(fine)
}

/// Global phase of `U_I = e^{iθ} e^{−iλφ(f)}`:
/// `θ = (λ²/2) ∫dτ ∫^τ dτ′ χ(τ) χ(τ′) Δ(τ, τ′)` with
/// `Δ(τ, τ′) = Σ w f2 sin(Ω(τ − τ′))/Ω` and `[φ(τ), φ(τ′)] = −iΔ`.
pub fn magnus_phase(params: &RunParams) -> Result<f64> {
    if params.lambda == 0.0 {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for c in &params.coeffs {
        if c.f2 == 0.0 {
            continue;
        }
        sum += c.weight * c.f2 / c.omega * ordered_integral(&params.switching, c.omega)?;
    }
    Ok(0.5 * params.lambda * params.lambda * sum)
}

/// Smeared commutator `Δ(f, g) = ∫∫ f(τ) g(τ′) Δ(τ, τ′)` with `f = χ` and
/// `g(τ) = χ(τ − μ)`, by the mode-sum shortcut
/// `−Σ w f2 |χ̃(Ω)|² sin(Ωμ)/Ω`. Independent of λ.
pub fn delta_fg(params: &RunParams, mu: f64) -> Result<f64> {
    let mut sum = 0.0;
    for c in &params.coeffs {
        sum += c.weight * c.f2 * c.chi2 * (c.omega * mu).sin() / c.omega;
    }
    if !sum.is_finite() {
        return Err(Error::Convergence(format!("Δ(f, g) at μ = {mu} is not finite")));
    }
    Ok(-sum)
}

/// [`delta_fg`] by direct 2D quadrature of the commutator function.
pub fn delta_fg_quadrature(params: &RunParams, mu: f64, panels: usize) -> Result<f64> {
    let (lo, hi) = params.switching.support();
    let f_nodes = nodes(lo, hi, panels, 16);
    let g_nodes = nodes(lo + mu, hi + mu, panels, 16);
    let chi = &params.switching;
    let lines = params.spec.to_lines();
    let total: f64 = f_nodes
        .par_iter()
        .map(|&(t, wt)| {
            let ft = chi.eval(t);
            if ft == 0.0 {
                return 0.0;
            }
            let mut acc = 0.0;
            for &(tp, wtp) in &g_nodes {
                let g = chi.eval(tp - mu);
                if g == 0.0 {
                    continue;
                }
                let d: f64 = lines.iter().map(|l| l.strength() * (l.omega * (t - tp)).sin() / l.omega).sum();
                acc += wtp * g * d;
            }
            wt * ft * acc
        })
        .sum();
    if !total.is_finite() {
        return Err(Error::Convergence("Δ(f, g) quadrature is not finite".into()));
    }
    Ok(total)
}

/// Uniform half-open grid `μ_k = min + kΔμ`, `k = 0..n`, `Δμ = (max − min)/n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuGrid {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl MuGrid {
    pub fn new(min: f64, max: f64, n: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && max > min) {
            return Err(Error::param("mu-grid", format!("need min < max, got [{min}, {max})")));
        }
        if n < 2 {
            return Err(Error::param("mu-grid", format!("need at least two points, got {n}")));
        }
        Ok(Self { min, max, n })
    }

    /// Symmetric grid `[−half_width, half_width)` with an even point count,
    /// so that `μ = 0` is a node.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        if n % 2 != 0 {
            return Err(Error::param("mu-grid", format!("symmetric grid needs an even count, got {n}")));
        }
        Self::new(-half_width, half_width, n)
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / self.n as f64
    }

    pub fn point(&self, k: usize) -> f64 {
        self.min + k as f64 * self.step()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.point(k)).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.n % 2 == 0 && (self.min + self.max).abs() <= 1e-12 * self.max.abs()
    }
}

/// `P̃` sampled on a [`MuGrid`].
#[derive(Debug, Clone)]
pub struct CharFunctionSamples {
    pub grid: MuGrid,
    pub values: Vec<Complex64>,
    pub beta: f64,
    pub kind: SpectrumKind,
}

impl CharFunctionSamples {
    pub fn mu(&self) -> Vec<f64> {
        self.grid.points()
    }
}

/// Evaluates the closed form on every grid point in parallel.
pub fn sample_charfunc(params: &RunParams, grid: MuGrid) -> Result<CharFunctionSamples> {
    let values: Result<Vec<Complex64>> = grid
        .points()
        .into_par_iter()
        .map(|mu| charfunc_pointlike(params, Complex64::new(mu, 0.0)))
        .collect();
    Ok(CharFunctionSamples { grid, values: values?, beta: params.beta, kind: params.spec.kind() })
}

/// Relative KMS violation `max |P̃(−μ + iβ) − P̃(μ)| / |P̃(μ)|` over `mus`.
pub fn kms_charfunc_residual(params: &RunParams, mus: &[f64]) -> Result<f64> {
    let beta = params.beta;
    let res: Result<Vec<f64>> = mus
        .par_iter()
        .map(|&mu| {
            let lhs = charfunc_pointlike(params, Complex64::new(-mu, beta))?;
            let rhs = charfunc_pointlike(params, Complex64::new(mu, 0.0))?;
            Ok((lhs - rhs).norm() / rhs.norm())
        })
        .collect();
    Ok(res?.into_iter().fold(0.0, f64::max))
}
