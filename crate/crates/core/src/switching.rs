//! Temporal switching profiles `χ(τ)` and their Fourier transforms.
//!
//! The transform convention used throughout the crate is
//! `χ̃(Ω) = ∫ χ(τ) e^{+iΩτ} dτ`. Only `|χ̃|²` reaches observable quantities,
//! so the sign choice never changes a physical result.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::integrate_adaptive;

/// Absolute tolerance of the numeric Fourier transform.
pub const FOURIER_ABS_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SwitchingProfile {
    /// `χ(τ) = exp(-τ²/2T²)`.
    Gaussian { width: f64 },
    /// `C^∞` bump supported on `[start, end]`, peak value one.
    SmoothBump { start: f64, end: f64 },
    /// Indicator of `[start, end]`.
    Rectangular { start: f64, end: f64 },
}

impl SwitchingProfile {
    pub fn gaussian(width: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::param("T", format!("gaussian width must be positive, got {width}")));
        }
        Ok(Self::Gaussian { width })
    }

    pub fn smooth_bump(start: f64, end: f64) -> Result<Self> {
        check_interval(start, end)?;
        Ok(Self::SmoothBump { start, end })
    }

    pub fn rectangular(start: f64, end: f64) -> Result<Self> {
        check_interval(start, end)?;
        Ok(Self::Rectangular { start, end })
    }

    pub fn eval(&self, tau: f64) -> f64 {
        match *self {
            Self::Gaussian { width } => (-0.5 * (tau / width).powi(2)).exp(),
            Self::SmoothBump { start, end } => {
                if tau <= start || tau >= end {
                    return 0.0;
                }
                let u = (2.0 * tau - start - end) / (end - start);
                (1.0 - 1.0 / (1.0 - u * u)).exp()
            }
            Self::Rectangular { start, end } => {
                if (start..=end).contains(&tau) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Interval outside which `χ` is zero or below `1e-31` of its peak.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Self::Gaussian { width } => (-12.0 * width, 12.0 * width),
            Self::SmoothBump { start, end } | Self::Rectangular { start, end } => (start, end),
        }
    }

    pub fn is_compact(&self) -> bool {
        !matches!(self, Self::Gaussian { .. })
    }

    /// `χ̃(Ω)`, exact for the Gaussian and rectangular windows, adaptive
    /// quadrature for the bump.
    pub fn fourier(&self, omega: Complex64) -> Result<Complex64> {
        match *self {
            Self::Gaussian { width } => {
                Ok((2.0 * PI).sqrt() * width * (-0.5 * omega * omega * width * width).exp())
            }
            Self::Rectangular { start, end } => {
                // e^{iΩc} · 2 sin(ΩΔ/2)/Ω with c the centre and Δ the length.
                let center = 0.5 * (start + end);
                let half = 0.5 * (end - start);
                let z = omega * half;
                Ok((Complex64::i() * omega * center).exp() * 2.0 * half * sinc(z))
            }
            Self::SmoothBump { start, end } => {
                let integral = integrate_adaptive(
                    |t| self.eval(t) * (Complex64::i() * omega * t).exp(),
                    start,
                    end,
                    FOURIER_ABS_TOL,
                    20_000,
                )?;
                Ok(integral.value)
            }
        }
    }

    pub fn fourier_abs2(&self, omega: f64) -> Result<f64> {
        Ok(self.fourier(Complex64::new(omega, 0.0))?.norm_sqr())
    }
}

fn check_interval(start: f64, end: f64) -> Result<()> {
    if !(start.is_finite() && end.is_finite() && end > start) {
        return Err(Error::param("interval", format!("need start < end, got [{start}, {end}]")));
    }
    Ok(())
}

fn sinc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

impl fmt::Display for SwitchingProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Gaussian { width } => write!(f, "gaussian T={width}"),
            Self::SmoothBump { start, end } => write!(f, "bump t0={start} t1={end}"),
            Self::Rectangular { start, end } => write!(f, "rectangular t0={start} t1={end}"),
        }
    }
}

/// Parses declarations such as `gaussian T=1.0`, `bump t0=-2 t1=2` or
/// `rectangular t0=0 t1=1`.
impl FromStr for SwitchingProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut words = s.split_whitespace();
        let family = words.next().ok_or_else(|| Error::param("switching", "empty declaration"))?;
        let mut args = std::collections::BTreeMap::new();
        for w in words {
            let (k, v) = w
                .split_once('=')
                .ok_or_else(|| Error::param("switching", format!("expected key=value, got `{w}`")))?;
            let v: f64 = v
                .parse()
                .map_err(|_| Error::param("switching", format!("`{v}` is not a number")))?;
            args.insert(k.to_ascii_lowercase(), v);
        }
        let get = |k: &str| {
            args.get(k)
                .copied()
                .ok_or_else(|| Error::param("switching", format!("`{family}` needs `{k}=`")))
        };
        match family {
            "gaussian" => Self::gaussian(get("t")?),
            "bump" | "smooth-bump" => Self::smooth_bump(get("t0")?, get("t1")?),
            "rectangular" => Self::rectangular(get("t0")?, get("t1")?),
            other => Err(Error::param("switching", format!("unknown family `{other}`"))),
        }
    }
}
