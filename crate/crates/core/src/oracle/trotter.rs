//! Time-sliced interaction-picture evolution against the Magnus closed form.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::{closed_unitary, expm, linear_field, spectral_norm, FockOracleConfig, FockSpace};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrotterReport {
    pub n_steps: usize,
    /// Spectral-norm distance on the block with every occupation ≤ N/2.
    pub distance: f64,
    /// `arg⟨0|U_sliced|0⟩ − arg⟨0|e^{−iλφ(f)}|0⟩`.
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrotterFit {
    pub reports: Vec<TrotterReport>,
    /// Least-squares slope of `ln distance` against `ln n`.
    pub slope: f64,
    pub monotone: bool,
}

/// Midpoint product `Π_k exp(−iλ χ(τ_k) φ(τ_k) Δτ)` over the switching
/// support, later slices to the left, compared with `e^{iθ} e^{−iλφ(f)}`.
///
/// The truncated ladder operators no longer commute to a c-number at the
/// top level, so the distance is taken on low occupations only.
pub fn trotter_unitary(cfg: &FockOracleConfig, n_steps: usize) -> Result<TrotterReport> {
    if n_steps < 2 {
        return Err(Error::param("n_steps", format!("need at least 2 slices, got {n_steps}")));
    }
    cfg.validate()?;
    let space = FockSpace::new(cfg.modes.len(), cfg.cutoff);
    let (lo, hi) = cfg.switching.support();
    let dt = (hi - lo) / n_steps as f64;
    let c: Vec<f64> = cfg.modes.iter().map(|m| (m.weight * m.f2 / (2.0 * m.omega)).sqrt()).collect();
    let mut product = DMatrix::<Complex64>::identity(space.dim, space.dim);
    for k in 0..n_steps {
        let tau = lo + (k as f64 + 0.5) * dt;
        let chi = cfg.switching.eval(tau);
        if chi == 0.0 || cfg.lambda == 0.0 {
            continue;
        }
        // φ(τ) = Σ c_j (a_j e^{−iΩτ} + a_j† e^{iΩτ}).
        let coeffs: Vec<Complex64> =
            cfg.modes.iter().zip(&c).map(|(m, cj)| cj * Complex64::new(0.0, m.omega * tau).exp()).collect();
        let phi = linear_field(&space, &coeffs);
        let step = expm(&(phi * Complex64::new(0.0, -cfg.lambda * chi * dt)));
        product = step * product;
    }
    let closed = closed_unitary(cfg, &space, true)?;
    let block = space.low_block(cfg.cutoff / 2);
    let diff = DMatrix::from_fn(block.len(), block.len(), |r, s| product[(block[r], block[s])] - closed[(block[r], block[s])]);
    let bare = closed_unitary(cfg, &space, false)?;
    let phase = product[(0, 0)].arg() - bare[(0, 0)].arg();
    Ok(TrotterReport { n_steps, distance: spectral_norm(&diff), phase })
}

/// Runs [`trotter_unitary`] on each slice count and fits the order.
pub fn trotter_convergence(cfg: &FockOracleConfig, steps: &[usize]) -> Result<TrotterFit> {
    let reports: Vec<TrotterReport> = steps.iter().map(|&n| trotter_unitary(cfg, n)).collect::<Result<_>>()?;
    let monotone = reports.windows(2).all(|w| w[1].distance < w[0].distance);
    let xs: Vec<f64> = reports.iter().map(|r| (r.n_steps as f64).ln()).collect();
    let ys: Vec<f64> = reports.iter().map(|r| r.distance.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    if !monotone {
        log::warn!("non-monotone Trotter convergence: {reports:?}");
    }
    Ok(TrotterFit { reports, slope, monotone })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charfunc::magnus_phase;
    use crate::spectra::ModeLine;
    use crate::switching::SwitchingProfile;

    fn cfg(lambda: f64) -> FockOracleConfig {
        FockOracleConfig::new(
            vec![ModeLine::new(1.0, 1.0, 1.0).unwrap()],
            24,
            1.0,
            lambda,
            SwitchingProfile::gaussian(1.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn zero_coupling_is_exact() {
        let r = trotter_unitary(&cfg(0.0), 16).unwrap();
        assert_eq!(r.distance, 0.0);
        assert_eq!(r.phase, 0.0);
    }

    #[test]
    fn second_order_convergence() {
        let fit = trotter_convergence(&cfg(0.1), &[64, 128, 256]).unwrap();
        assert!(fit.monotone);
        assert!((fit.slope + 2.0).abs() <= 0.2, "slope {}", fit.slope);
    }

    #[test]
    fn sliced_phase_matches_magnus() {
        let c = cfg(0.1);
        let r = trotter_unitary(&c, 1024).unwrap();
        let theta = magnus_phase(&c.run_params().unwrap()).unwrap();
        assert!((r.phase - theta).abs() < 1e-4, "{} vs {theta}", r.phase);
        assert!(theta > 0.0);
    }

    #[test]
    fn compact_switching_converges_too() {
        let c = FockOracleConfig::new(
            vec![ModeLine::new(1.0, 1.2, 0.8).unwrap()],
            24,
            1.0,
            0.2,
            SwitchingProfile::smooth_bump(-3.0, 3.0).unwrap(),
        )
        .unwrap();
        let fit = trotter_convergence(&c, &[64, 128, 256]).unwrap();
        assert!((fit.slope + 2.0).abs() <= 0.2, "slope {}", fit.slope);
    }

    #[test]
    fn rejects_single_slice() {
        assert!(trotter_unitary(&cfg(0.1), 1).is_err());
    }
}
