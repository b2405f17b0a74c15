//! Numeric inversion `P(W) = (1/2π) ∫ P̃(μ) e^{−iWμ} dμ` on a uniform grid.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::charfunc::CharFunctionSamples;
use crate::error::{Error, Result};
use crate::spectra::SpectrumKind;

/// Fraction of the μ range, measured from each end, used to estimate
/// the asymptote `P̃(∞)`.
const ASYMPTOTE_FRACTION: f64 = 0.25;
/// Outer fraction of the W grid inspected for aliasing.
const EDGE_FRACTION: f64 = 0.01;
/// Mass allowed near the W-grid edge.
const EDGE_MASS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionOptions {
    /// Split off the constant `P̃(∞)` as an atom at `W = 0`.
    pub subtract_asymptote: bool,
    /// Gaussian window `e^{−μ²/2σ²}` applied before the transform.
    pub window_sigma: Option<f64>,
}

impl InversionOptions {
    /// Continuum spectra subtract the asymptote; discrete spectra, whose
    /// `P̃` never settles, get a Gaussian window of width `μ_max/6`.
    pub fn for_samples(samples: &CharFunctionSamples) -> Self {
        match samples.kind {
            SpectrumKind::Continuum => Self { subtract_asymptote: true, window_sigma: None },
            SpectrumKind::Discrete => {
                Self { subtract_asymptote: false, window_sigma: Some(samples.grid.max.abs() / 6.0) }
            }
        }
    }
}

/// Density on a uniform W grid plus an atom at zero.
#[derive(Debug, Clone)]
pub struct SampledDensity {
    pub w_grid: Vec<f64>,
    pub density: Vec<f64>,
    pub atom_at_zero: f64,
    /// Largest `|Im|` of the complex inversion output.
    pub imag_residue: f64,
    /// Imaginary part of the asymptote estimate.
    pub asymptote_imag: f64,
    /// Window applied before the transform, kept for the round trip.
    pub window_sigma: Option<f64>,
}

impl SampledDensity {
    pub fn step(&self) -> f64 {
        self.w_grid[1] - self.w_grid[0]
    }

    pub fn total_mass(&self) -> f64 {
        self.atom_at_zero + self.density.iter().sum::<f64>() * self.step()
    }

    /// Mass of the density inside `[lo, hi)`.
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        let dw = self.step();
        let mut m: f64 = self
            .w_grid
            .iter()
            .zip(&self.density)
            .filter(|(w, _)| **w >= lo && **w < hi)
            .map(|(_, d)| d * dw)
            .sum();
        if (lo..hi).contains(&0.0) {
            m += self.atom_at_zero;
        }
        m
    }

    /// `atom + Σ density e^{iWμ} ΔW`, undoing the window if one was used.
    pub fn forward(&self, mu: f64) -> Complex64 {
        let dw = self.step();
        let mut sum = Complex64::new(0.0, 0.0);
        for (w, d) in self.w_grid.iter().zip(&self.density) {
            sum += d * Complex64::new(0.0, w * mu).exp();
        }
        let windowed = sum * dw;
        let unwindowed = match self.window_sigma {
            Some(s) => windowed * (0.5 * (mu / s).powi(2)).exp(),
            None => windowed,
        };
        self.atom_at_zero + unwindowed
    }
}

/// Inverts samples taken on a symmetric half-open grid.
///
/// Requires a symmetric grid with an even count so that `μ = 0` is a node.
/// The unpaired sample at `−μ_max` is replaced by its real part, the
/// average of `P̃(−μ_max)` and `P̃(μ_max) = P̃(−μ_max)*`.
pub fn invert_fft(samples: &CharFunctionSamples, opts: InversionOptions) -> Result<SampledDensity> {
    let grid = samples.grid;
    if !grid.is_symmetric() {
        return Err(Error::Window(format!("μ grid [{}, {}) is not symmetric", grid.min, grid.max)));
    }
    let n = grid.n;
    let half = n / 2;
    let dmu = grid.step();
    let mut asymptote = Complex64::new(0.0, 0.0);
    if opts.subtract_asymptote {
        let cut = (1.0 - ASYMPTOTE_FRACTION) * grid.max;
        let tail: Vec<Complex64> = grid
            .points()
            .iter()
            .zip(&samples.values)
            .filter(|(mu, _)| mu.abs() >= cut)
            .map(|(_, v)| *v)
            .collect();
        asymptote = tail.iter().sum::<Complex64>() / tail.len() as f64;
    }
    // Index 0 holds μ = 0 after rotation by n/2.
    let mut buf: Vec<Complex64> = (0..n)
        .map(|j| {
            let k = (j + half) % n;
            let mu = grid.point(k);
            let mut v = samples.values[k] - asymptote;
            if k == 0 {
                v = Complex64::new(v.re, 0.0);
            }
            if let Some(s) = opts.window_sigma {
                v *= (-0.5 * (mu / s).powi(2)).exp();
            }
            v
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let dw = 2.0 * std::f64::consts::PI / (n as f64 * dmu);
    let scale = dmu / (2.0 * std::f64::consts::PI);
    let mut w_grid = Vec::with_capacity(n);
    let mut density = Vec::with_capacity(n);
    let mut imag_residue: f64 = 0.0;
    for r in 0..n {
        let j = (r + half) % n;
        let v = buf[j] * scale;
        w_grid.push((r as f64 - half as f64) * dw);
        density.push(v.re);
        imag_residue = imag_residue.max(v.im.abs());
    }
    let out = SampledDensity {
        w_grid,
        density,
        atom_at_zero: asymptote.re,
        imag_residue,
        asymptote_imag: asymptote.im,
        window_sigma: opts.window_sigma,
    };
    let edge = ((EDGE_FRACTION * n as f64).ceil() as usize).max(1);
    let edge_mass: f64 = out.density[..edge]
        .iter()
        .chain(&out.density[n - edge..])
        .map(|d| d.abs() * dw)
        .sum();
    if edge_mass > EDGE_MASS {
        return Err(Error::Window(format!(
            "mass {edge_mass:e} within {}% of the W-grid edge; refine Δμ",
            100.0 * EDGE_FRACTION
        )));
    }
    Ok(out)
}
