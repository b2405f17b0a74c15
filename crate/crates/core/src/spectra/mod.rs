//! Mode spectra `{weight, Ω, |F(x₀)|²}` seen by a static detector.
//!
//! A spectrum is the only place where spacetime geometry enters. Everything
//! downstream (Wightman function, characteristic function, moments) is a
//! weighted sum over its lines, so continuum measures are discretised into
//! quadrature lines when the spectrum is built.

mod catalog;
mod file;

pub use catalog::{
    cavity_spectrum, esu_degeneracy, esu_spectrum, minkowski_continuum_spectrum,
    minkowski_density_of_states, smear_overlap, CavityGeometry, QuadratureRule, SmearingProfile,
};
pub use file::{load_spectrum, parse_spectrum, save_spectrum, write_spectrum};

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// One line of a mode spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeLine {
    /// Quadrature weight realising the mode measure.
    pub weight: f64,
    /// Proper frequency at the detector.
    pub omega: f64,
    /// Mode density `|F(x₀)|²` at the detector position.
    pub f2: f64,
}

impl ModeLine {
    pub fn new(weight: f64, omega: f64, f2: f64) -> Result<Self> {
        let line = Self { weight, omega, f2 };
        line.validate()?;
        Ok(line)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.weight.is_finite() && self.omega.is_finite() && self.f2.is_finite()) {
            return Err(Error::param("line", format!("non-finite entry in {self:?}")));
        }
        if self.omega <= 0.0 {
            return Err(Error::param("omega", format!("must be positive, got {}", self.omega)));
        }
        if self.weight <= 0.0 {
            return Err(Error::param("weight", format!("must be positive, got {}", self.weight)));
        }
        if self.f2 < 0.0 {
            return Err(Error::param("f2", format!("must be nonnegative, got {}", self.f2)));
        }
        Ok(())
    }

    /// `weight · f2`, the measure a line contributes to every mode sum.
    pub fn strength(&self) -> f64 {
        self.weight * self.f2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumKind {
    Discrete,
    Continuum,
}

impl fmt::Display for SpectrumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectrumKind::Discrete => f.write_str("discrete"),
            SpectrumKind::Continuum => f.write_str("continuum"),
        }
    }
}

/// Immutable list of mode lines with a lapse factor.
///
/// Frequencies are stored in the frame where the spectrum was built; the
/// accumulated lapse divides them on access, so successive rescalings
/// compose exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    base: Vec<ModeLine>,
    lapse: f64,
    kind: SpectrumKind,
    provenance: String,
}

impl ModeSpectrum {
    pub fn new(lines: Vec<ModeLine>, kind: SpectrumKind, provenance: impl Into<String>) -> Result<Self> {
        if lines.is_empty() {
            return Err(Error::param("lines", "spectrum must contain at least one line"));
        }
        for line in &lines {
            line.validate()?;
        }
        let spec = Self { base: lines, lapse: 1.0, kind, provenance: provenance.into() };
        let sentinel = spec.convergence_sentinel();
        if !sentinel.is_finite() {
            return Err(Error::Convergence(format!("Σ weight·f2/(2Ω) = {sentinel}")));
        }
        Ok(spec)
    }

    /// Single line spectrum, handy for reference configurations.
    pub fn single(weight: f64, omega: f64, f2: f64) -> Result<Self> {
        Self::new(
            vec![ModeLine::new(weight, omega, f2)?],
            SpectrumKind::Discrete,
            format!("single weight={weight} omega={omega} f2={f2}"),
        )
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Accumulated lapse factor `N₀` relative to the construction frame.
    pub fn lapse(&self) -> f64 {
        self.lapse
    }

    pub fn line(&self, i: usize) -> ModeLine {
        let l = self.base[i];
        ModeLine { omega: l.omega / self.lapse, ..l }
    }

    pub fn lines(&self) -> impl ExactSizeIterator<Item = ModeLine> + '_ {
        self.base.iter().map(move |l| ModeLine { omega: l.omega / self.lapse, ..*l })
    }

    pub fn to_lines(&self) -> Vec<ModeLine> {
        self.lines().collect()
    }

    /// `Σ weight·f2/(2Ω)`; finite for every admissible spectrum.
    pub fn convergence_sentinel(&self) -> f64 {
        self.lines().map(|l| l.strength() / (2.0 * l.omega)).sum()
    }

    pub fn max_omega(&self) -> f64 {
        self.lines().map(|l| l.omega).fold(0.0, f64::max)
    }
}

/// Redshift the spectrum to the proper frame of a static observer with
/// lapse `N₀`: every frequency is divided by `N₀`, weights and densities are
/// untouched.
pub fn lapse_rescale(spec: &ModeSpectrum, lapse: f64) -> Result<ModeSpectrum> {
    if !(lapse > 0.0 && lapse.is_finite()) {
        return Err(Error::param("lapse", format!("must be positive and finite, got {lapse}")));
    }
    let mut out = spec.clone();
    out.lapse = spec.lapse * lapse;
    if lapse != 1.0 {
        out.provenance = format!("{} | lapse {}", spec.provenance, out.lapse);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lapse_one_is_identity() {
        let s = cavity_spectrum(std::f64::consts::PI, 0.0, 5, 1.0).unwrap();
        assert_eq!(lapse_rescale(&s, 1.0).unwrap(), s);
    }

    #[test]
    fn lapse_two_halves_frequency() {
        let s = ModeSpectrum::single(1.0, 1.0, 1.0).unwrap();
        let r = lapse_rescale(&s, 2.0).unwrap();
        assert_eq!(r.line(0).omega, 0.5);
        assert_eq!(r.line(0).f2, 1.0);
    }

    #[test]
    fn lapse_composes_with_cavity() {
        let s = cavity_spectrum(std::f64::consts::PI, 0.0, 1, std::f64::consts::FRAC_PI_2).unwrap();
        let r = lapse_rescale(&s, 0.5).unwrap();
        assert!((r.line(0).omega - 2.0).abs() < 1e-15);
        assert_eq!(r.line(0).f2, s.line(0).f2);
    }

    #[test]
    fn lapse_rejects_nonpositive() {
        let s = ModeSpectrum::single(1.0, 1.0, 1.0).unwrap();
        assert!(matches!(lapse_rescale(&s, 0.0), Err(Error::Parameter { name: "lapse", .. })));
        assert!(lapse_rescale(&s, -1.0).is_err());
    }

    #[test]
    fn empty_and_invalid_lines_rejected() {
        assert!(ModeSpectrum::new(vec![], SpectrumKind::Discrete, "").is_err());
        assert!(ModeLine::new(1.0, 0.0, 1.0).is_err());
        assert!(ModeLine::new(0.0, 1.0, 1.0).is_err());
        assert!(ModeLine::new(1.0, 1.0, -1e-3).is_err());
        assert!(ModeLine::new(1.0, f64::NAN, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn lapse_composition_is_exact(a in 0.01f64..100.0, b in 0.01f64..100.0, m in 0.0f64..3.0) {
            let s = cavity_spectrum(2.0, m, 7, 0.7).unwrap();
            let twice = lapse_rescale(&lapse_rescale(&s, a).unwrap(), b).unwrap();
            let once = lapse_rescale(&s, a * b).unwrap();
            prop_assert_eq!(twice.to_lines(), once.to_lines());
        }

        #[test]
        fn catalog_spectra_satisfy_line_invariants(
            len in 0.1f64..10.0, m in 0.0f64..5.0, modes in 1usize..40, frac in 0.0f64..=1.0,
            radius in 0.1f64..10.0, wmax_extra in 0.1f64..20.0, n_points in 2usize..300,
        ) {
            let specs = [
                cavity_spectrum(len, m, modes, frac * len).unwrap(),
                esu_spectrum(radius, m, modes).unwrap(),
                minkowski_continuum_spectrum(m, m + wmax_extra, n_points, QuadratureRule::default()).unwrap(),
                minkowski_continuum_spectrum(m, m + wmax_extra, n_points, QuadratureRule::Midpoint).unwrap(),
            ];
            for s in &specs {
                prop_assert!(!s.is_empty());
                for l in s.lines() {
                    prop_assert!(l.validate().is_ok(), "{:?}", l);
                }
                prop_assert!(s.convergence_sentinel().is_finite());
            }
        }
    }
}
