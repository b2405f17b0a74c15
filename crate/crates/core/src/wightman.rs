//! Thermal Wightman function pulled back to a static worldline.
//!
//! `W_β(Δτ) = Σ_j w_j f2_j / (2Ω_j) · cos[Ω_j(Δτ + iβ/2)] / sinh(βΩ_j/2)`
//!
//! The sum converges absolutely only inside the strip `-β < Im Δτ < 0`, so
//! every evaluation goes through a [`StripPoint`]; real separations need an
//! explicit `-iε`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectra::ModeSpectrum;

/// Default regulator as a fraction of β.
pub const DEFAULT_EPSILON_FRACTION: f64 = 1e-3;

/// Complex proper-time separation inside the analyticity strip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripPoint {
    dtau: Complex64,
    beta: f64,
}

impl StripPoint {
    pub fn new(dtau: Complex64, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        if !(dtau.re.is_finite() && dtau.im > -beta && dtau.im < 0.0) {
            return Err(Error::Domain(format!(
                "Im Δτ = {} outside the open strip (-{beta}, 0)",
                dtau.im
            )));
        }
        Ok(Self { dtau, beta })
    }

    /// Real separation `t` regulated to `t - iε`.
    pub fn regulated(t: f64, epsilon: f64, beta: f64) -> Result<Self> {
        Self::new(Complex64::new(t, -epsilon), beta)
    }

    /// `t - iβ/2`, the centre of the strip.
    pub fn midpoint(t: f64, beta: f64) -> Result<Self> {
        Self::new(Complex64::new(t, -0.5 * beta), beta)
    }

    pub fn dtau(&self) -> Complex64 {
        self.dtau
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Distance to the nearer strip boundary.
    pub fn margin(&self) -> f64 {
        (-self.dtau.im).min(self.beta + self.dtau.im)
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::param("beta", format!("must be positive and finite, got {beta}")));
    }
    Ok(())
}

/// One mode's contribution per unit `w·f2/(2Ω)`:
/// `cos[Ω(Δτ + iβ/2)] / sinh(βΩ/2)`, evaluated with exponentials scaled
/// by `e^{-βΩ/2}` so large `βΩ` cannot overflow.
pub(crate) fn mode_kernel(omega: f64, beta: f64, dtau: Complex64) -> Complex64 {
    let half = 0.5 * beta * omega;
    let x = omega * dtau.re;
    let y = omega * (dtau.im + 0.5 * beta);
    let denom = -(-2.0 * half).exp_m1();
    let grow = (y.abs() - half).exp();
    let shrink = (-y.abs() - half).exp();
    let cosh_ratio = (grow + shrink) / denom;
    let sinh_ratio = y.signum() * (grow - shrink) / denom;
    Complex64::new(x.cos() * cosh_ratio, -x.sin() * sinh_ratio)
}

pub fn thermal_wightman(spec: &ModeSpectrum, beta: f64, point: &StripPoint) -> Result<Complex64> {
    check_beta(beta)?;
    if point.beta != beta {
        // Re-validate against the caller's β.
        StripPoint::new(point.dtau, beta)?;
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for l in spec.lines() {
        if l.f2 == 0.0 {
            continue;
        }
        sum += l.strength() / (2.0 * l.omega) * mode_kernel(l.omega, beta, point.dtau);
    }
    if !(sum.re.is_finite() && sum.im.is_finite()) {
        return Err(Error::Convergence(format!("Wightman sum at Δτ = {} is not finite", point.dtau)));
    }
    Ok(sum)
}

/// Largest violation of `W(Δτ − i(β−ε)) = W(−Δτ − iε)` over a grid of real
/// separations, relative to the largest |W| encountered.
pub fn kms_residual(spec: &ModeSpectrum, beta: f64, tau_grid: &[f64], epsilon: f64) -> Result<f64> {
    check_beta(beta)?;
    if !(epsilon > 0.0 && epsilon < 0.5 * beta) {
        return Err(Error::param("epsilon", format!("need 0 < ε < β/2, got {epsilon}")));
    }
    let mut max_diff: f64 = 0.0;
    let mut max_w: f64 = 0.0;
    for &t in tau_grid {
        let shifted = StripPoint::new(Complex64::new(t, -(beta - epsilon)), beta)?;
        let mirrored = StripPoint::regulated(-t, epsilon, beta)?;
        let a = thermal_wightman(spec, beta, &shifted)?;
        let b = thermal_wightman(spec, beta, &mirrored)?;
        max_diff = max_diff.max((a - b).norm());
        max_w = max_w.max(a.norm()).max(b.norm());
    }
    if max_w == 0.0 {
        return Ok(0.0);
    }
    Ok(max_diff / max_w)
}
