//! Work distribution, its moments and the fluctuation identities.
//!
//! Discrete spectra go through exact lattice atoms, continuum spectra
//! through [`invert_fft`] with the `W = 0` atom split off.

mod atoms;
mod inversion;

pub use atoms::{
    atoms, atoms_single_mode, convolve_atoms, Atom, AtomicDistribution, DEFAULT_WEIGHT_FLOOR, TAIL_BOUND,
};
pub use inversion::{invert_fft, InversionOptions, SampledDensity};

use num_complex::Complex64;
use serde::Serialize;

use crate::charfunc::{charfunc_pointlike, RunParams};
use crate::error::Result;

/// `⟨W⟩ = (λ²/2) Σ w f2 |χ̃(Ω)|²`.
pub fn mean_work(params: &RunParams) -> f64 {
    params.mode_factors().iter().map(|f| f.s * f.omega).sum()
}

/// Leading-order expression `(λ²/2) Σ w Ω |χ̃|² coth(βΩ/2) f2`, which is
/// the second cumulant of the exact distribution.
pub fn second_moment_leading(params: &RunParams) -> f64 {
    params.mode_factors().iter().map(|f| f.b() * f.omega * f.omega).sum()
}

/// Exact `⟨W²⟩`, the second cumulant plus `⟨W⟩²`.
pub fn second_moment(params: &RunParams) -> f64 {
    let m = mean_work(params);
    second_moment_leading(params) + m * m
}

/// `σ² = ⟨W²⟩ − ⟨W⟩²`.
pub fn variance(params: &RunParams) -> f64 {
    second_moment_leading(params)
}

/// `⟨W⟩ / (βσ²/2)`; equals `tanh(βΩ/2)/(βΩ/2)` for one line.
pub fn fdr_ratio(params: &RunParams) -> f64 {
    let v = variance(params);
    if v == 0.0 {
        return f64::NAN;
    }
    mean_work(params) / (0.5 * params.beta() * v)
}

/// First and second moments from central differences of `P̃` at zero with
/// one Richardson step, `h` and `h/2`.
pub fn moments_by_differences(params: &RunParams, h: f64) -> Result<(f64, f64)> {
    let p = |mu: f64| charfunc_pointlike(params, Complex64::new(mu, 0.0));
    let d1 = |h: f64| -> Result<f64> { Ok(((p(h)? - p(-h)?) / (2.0 * h)).im) };
    let d2 = |h: f64| -> Result<f64> { Ok(-((p(h)? + p(-h)? - 2.0) / (h * h)).re) };
    let mean = (4.0 * d1(0.5 * h)? - d1(h)?) / 3.0;
    let second = (4.0 * d2(0.5 * h)? - d2(h)?) / 3.0;
    Ok((mean, second))
}

/// `max |ln(p(W)/p(−W)) − βW|` over atoms with `p ≥ floor` and `W ≠ 0`;
/// an atom whose mirror is missing counts as an infinite residual.
pub fn crooks_residual(dist: &AtomicDistribution, floor: f64) -> f64 {
    let beta = dist.beta();
    let mut worst: f64 = 0.0;
    for a in dist.atoms() {
        if a.w == 0.0 || a.p < floor {
            continue;
        }
        match dist.weight_at(-a.w) {
            Some(q) if q > 0.0 => worst = worst.max(((a.p / q).ln() - beta * a.w).abs()),
            _ => return f64::INFINITY,
        }
    }
    worst
}

/// `⟨e^{−βW}⟩` over the atoms.
pub fn jarzynski_average(dist: &AtomicDistribution, beta: f64) -> f64 {
    dist.atoms().iter().map(|a| a.p * (-beta * a.w).exp()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NegativityReport {
    pub min_weight: f64,
    pub negative_mass: f64,
}

/// Logs and reports negative weights instead of asserting either way.
pub fn negativity(dist: &AtomicDistribution) -> NegativityReport {
    let min_weight = dist.atoms().iter().map(|a| a.p).fold(f64::INFINITY, f64::min);
    let negative_mass = dist.atoms().iter().filter(|a| a.p < 0.0).fold(0.0, |acc, a| acc - a.p);
    if negative_mass > 0.0 {
        log::warn!("work distribution has negative mass {negative_mass:e}");
    }
    NegativityReport { min_weight, negative_mass }
}

/// Residuals and moments of one verification run.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VerificationReport {
    pub kms_residual: f64,
    pub charfunc_kms_residual: f64,
    pub crooks_residual: f64,
    pub jarzynski_error: f64,
    pub charfunc_jarzynski_error: f64,
    pub fdr_ratio: f64,
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_max_abs_diff: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub negative_mass: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{cavity_spectrum, esu_spectrum, lapse_rescale, ModeSpectrum};
    use crate::switching::SwitchingProfile;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn single(omega: f64, beta: f64, lambda: f64) -> RunParams {
        RunParams::new(
            ModeSpectrum::single(1.0, omega, 1.0).unwrap(),
            SwitchingProfile::gaussian(1.0).unwrap(),
            beta,
            lambda,
        )
        .unwrap()
    }

    #[test]
    fn reference_moments() {
        let p = single(1.0, 1.0, 0.1);
        let mean = mean_work(&p);
        assert!((mean - 0.005 * 2.0 * PI * (-1.0f64).exp()).abs() < 1e-17);
        assert!((mean - 0.011_557_273_497_909_217).abs() < 1e-16);
        assert!((second_moment_leading(&p) - 0.025_009_401_439_311_912).abs() < 1e-16);
        assert!((second_moment(&p) - 0.025_142_972_010_017_387).abs() < 1e-16);
        assert!((variance(&p) - 0.025_009_401_439_311_912).abs() < 1e-16);
        let zero = p.with_lambda(0.0).unwrap();
        assert_eq!(mean_work(&zero), 0.0);
        assert_eq!(variance(&zero), 0.0);
    }

    #[test]
    fn moments_agree_with_atoms_and_differences() {
        let p = single(1.0, 1.0, 0.1);
        let d = atoms(&p, DEFAULT_WEIGHT_FLOOR).unwrap();
        assert!((d.mean() - mean_work(&p)).abs() <= 1e-8 * mean_work(&p));
        assert!((d.second_moment() - second_moment(&p)).abs() <= 1e-8 * second_moment(&p));
        let (m, s) = moments_by_differences(&p, 0.01).unwrap();
        assert!((m - mean_work(&p)).abs() <= 1e-6 * mean_work(&p));
        assert!((s - second_moment(&p)).abs() <= 1e-6 * second_moment(&p));
    }

    #[test]
    fn zero_temperature_leading_moment() {
        let p = single(1.0, 200.0, 0.3);
        assert!((second_moment_leading(&p) - mean_work(&p)).abs() < 1e-15);
    }

    #[test]
    fn moments_scale_with_coupling_squared() {
        let p = single(1.3, 0.7, 0.1);
        let q = p.with_lambda(0.3).unwrap();
        assert!((mean_work(&q) / mean_work(&p) - 9.0).abs() < 1e-12);
        assert!((variance(&q) / variance(&p) - 9.0).abs() < 1e-12);
    }

    #[test]
    fn crooks_and_jarzynski_on_reference() {
        let p = single(1.0, 1.0, 0.1);
        let d = atoms_single_mode(&p, 0, 12).unwrap();
        let p1 = d.weight_at(1.0).unwrap();
        let pm1 = d.weight_at(-1.0).unwrap();
        assert!(((p1 / pm1).ln() - 1.0).abs() < 1e-12);
        assert!(crooks_residual(&d, 1e-14) <= 1e-10);
        assert!((jarzynski_average(&d, 1.0) - 1.0).abs() <= 1e-10);
        assert_eq!(jarzynski_average(&AtomicDistribution::delta(1.0), 1.0), 1.0);
    }

    #[test]
    fn tampered_beta_breaks_crooks() {
        let p = single(1.0, 1.0, 0.1);
        let d = atoms_single_mode(&p, 0, 12).unwrap().with_beta(1.5);
        assert!(crooks_residual(&d, 1e-14) > 0.4);
    }

    #[test]
    fn missing_mirror_is_infinite() {
        let d = AtomicDistribution::new(vec![Atom { w: 0.0, p: 0.5 }, Atom { w: 1.0, p: 0.5 }], 1.0);
        assert_eq!(crooks_residual(&d, 1e-14), f64::INFINITY);
    }

    #[test]
    fn high_temperature_atoms_become_symmetric() {
        for beta in [1e-2, 1e-3] {
            let p = single(1.0, beta, 0.01);
            let d = atoms_single_mode(&p, 0, 12).unwrap();
            for m in 1..4 {
                let (a, b) = (d.weight_at(m as f64).unwrap(), d.weight_at(-(m as f64)).unwrap());
                assert!((a / b).ln().abs() <= m as f64 * beta * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn two_mode_convolution_crooks() {
        let spec = cavity_spectrum(PI, 0.3, 2, 1.0).unwrap();
        let p = RunParams::new(spec, SwitchingProfile::gaussian(1.0).unwrap(), 1.0, 0.3).unwrap();
        let d = atoms(&p, DEFAULT_WEIGHT_FLOOR).unwrap();
        assert!(crooks_residual(&d, 1e-14) <= 1e-8);
        assert!((jarzynski_average(&d, 1.0) - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn fdr_limits() {
        let hot = single(1.0, 0.01, 0.01);
        assert!((fdr_ratio(&hot) - 1.0).abs() < 1e-3);
        let cold = single(1.0, 10.0, 0.1);
        assert!((fdr_ratio(&cold) / 0.2 - 1.0).abs() < 0.02);
        for k in 0..30 {
            let beta = 0.01 * 1000f64.powf(k as f64 / 29.0);
            let h = 0.5 * beta;
            let r = fdr_ratio(&single(1.0, beta, 0.1));
            assert!((r - h.tanh() / h).abs() < 1e-6, "β={beta}");
        }
    }

    #[test]
    fn variance_grows_with_temperature() {
        let g = SwitchingProfile::gaussian(1.0).unwrap();
        let cav = cavity_spectrum(PI, 0.0, 20, 1.0).unwrap();
        for spec in [cav.clone(), esu_spectrum(1.0, 0.0, 10).unwrap(), lapse_rescale(&cav, 2.0).unwrap()] {
            let p = RunParams::new(spec, g, 1.0, 0.1).unwrap();
            let mut last = 0.0;
            for k in 0..20 {
                let temp = 0.1 + 0.5 * k as f64;
                let v = variance(&p.with_beta(1.0 / temp).unwrap());
                assert!(v > last);
                last = v;
            }
        }
    }

    #[test]
    fn negativity_detector_reports() {
        let d = AtomicDistribution::new(vec![Atom { w: 0.0, p: 1.1 }, Atom { w: 1.0, p: -0.1 }], 1.0);
        let r = negativity(&d);
        assert!((r.negative_mass - 0.1).abs() < 1e-15);
        assert_eq!(r.min_weight, -0.1);
        let p = single(1.0, 1.0, 0.5);
        assert_eq!(negativity(&atoms(&p, DEFAULT_WEIGHT_FLOOR).unwrap()).negative_mass, 0.0);
    }

    #[test]
    fn report_serialises_flat() {
        let r = VerificationReport { mean: 1.0, ..Default::default() };
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        let obj = v.as_object().unwrap();
        assert!(obj.values().all(|x| x.is_number()));
        assert_eq!(obj["mean"], 1.0);
        assert!(!obj.contains_key("oracle_max_abs_diff"));
    }

    proptest! {
        #[test]
        fn crooks_implies_jarzynski(beta in 0.1f64..4.0, lambda in 0.01f64..0.8, n in 1usize..5) {
            let spec = esu_spectrum(1.0, 0.0, n).unwrap();
            let p = RunParams::new(spec, SwitchingProfile::gaussian(1.0).unwrap(), beta, lambda).unwrap();
            let d = atoms(&p, DEFAULT_WEIGHT_FLOOR).unwrap();
            let r = crooks_residual(&d, 1e-14);
            let j = jarzynski_average(&d, beta);
            prop_assert!(r <= 1e-8);
            prop_assert!((j - d.total_mass()).abs() <= r.exp_m1() * j + 1e-12);
            prop_assert!(d.atoms().iter().all(|a| a.p >= 0.0));
        }

        #[test]
        fn mean_work_is_nonnegative(beta in 0.01f64..20.0, lambda in 0.0f64..3.0, m in 0.0f64..2.0, n in 1usize..30) {
            let spec = cavity_spectrum(2.0, m, n, 0.7).unwrap();
            let p = RunParams::new(spec, SwitchingProfile::gaussian(0.9).unwrap(), beta, lambda).unwrap();
            prop_assert!(mean_work(&p) >= 0.0);
        }
    }
}
