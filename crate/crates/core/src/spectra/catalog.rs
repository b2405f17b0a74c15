//! Built-in geometries: Dirichlet cavity, Minkowski continuum and the
//! Einstein static universe.

use std::f64::consts::PI;

use super::{ModeLine, ModeSpectrum, SpectrumKind};
use crate::error::{Error, Result};
use crate::numeric::CompositeRule;

/// Flat 1+1 cavity `[0, L]` with Dirichlet walls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityGeometry {
    pub length: f64,
    pub mass: f64,
    pub max_modes: usize,
}

impl CavityGeometry {
    pub fn new(length: f64, mass: f64, max_modes: usize) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::param("length", format!("must be positive, got {length}")));
        }
        if !(mass >= 0.0 && mass.is_finite()) {
            return Err(Error::param("mass", format!("must be nonnegative, got {mass}")));
        }
        if max_modes == 0 {
            return Err(Error::param("max_modes", "need at least one mode"));
        }
        Ok(Self { length, mass, max_modes })
    }

    pub fn wavenumber(&self, n: usize) -> f64 {
        n as f64 * PI / self.length
    }

    pub fn frequency(&self, n: usize) -> f64 {
        self.wavenumber(n).hypot(self.mass)
    }

    /// Orthonormal Dirichlet mode `F_n(x) = sqrt(2/L) sin(nπx/L)`.
    pub fn mode_function(&self, n: usize, x: f64) -> f64 {
        (2.0 / self.length).sqrt() * (self.wavenumber(n) * x).sin()
    }
}

/// Pointlike Dirichlet-cavity spectrum at position `x0`.
pub fn cavity_spectrum(length: f64, mass: f64, max_modes: usize, x0: f64) -> Result<ModeSpectrum> {
    let geometry = CavityGeometry::new(length, mass, max_modes)?;
    smear_overlap(&geometry, &SmearingProfile::Point { x0 })
}

/// Spatial profile of a smeared detector inside a cavity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SmearingProfile {
    /// Pointlike detector at `x0`.
    Point { x0: f64 },
    /// Gaussian of width `sigma`, cut off at the walls and renormalised to
    /// unit integral over the cavity.
    Gaussian { center: f64, sigma: f64 },
    /// Uniform profile on `[from, to]`.
    Box { from: f64, to: f64 },
}

/// Effective spectrum `f2_n = |∫ψ(x) F_n(x) dx|²` of a smeared detector.
pub fn smear_overlap(geometry: &CavityGeometry, profile: &SmearingProfile) -> Result<ModeSpectrum> {
    let len = geometry.length;
    let inside = |x: f64| (0.0..=len).contains(&x);
    let overlaps: Vec<f64> = match *profile {
        SmearingProfile::Point { x0 } => {
            if !inside(x0) {
                return Err(Error::Domain(format!("detector position {x0} outside cavity [0, {len}]")));
            }
            (1..=geometry.max_modes).map(|n| geometry.mode_function(n, x0)).collect()
        }
        SmearingProfile::Box { from, to } => {
            if !(from < to) || !inside(from) || !inside(to) {
                return Err(Error::Domain(format!("box profile [{from}, {to}] not inside cavity [0, {len}]")));
            }
            let norm = (2.0 / len).sqrt() / (to - from);
            (1..=geometry.max_modes)
                .map(|n| {
                    let k = geometry.wavenumber(n);
                    norm * ((k * from).cos() - (k * to).cos()) / k
                })
                .collect()
        }
        SmearingProfile::Gaussian { center, sigma } => {
            if !inside(center) {
                return Err(Error::Domain(format!("gaussian centre {center} outside cavity [0, {len}]")));
            }
            if !(sigma > 0.0 && sigma.is_finite()) {
                return Err(Error::param("sigma", format!("must be positive, got {sigma}")));
            }
            let lo = (center - 12.0 * sigma).max(0.0);
            let hi = (center + 12.0 * sigma).min(len);
            let k_max = geometry.wavenumber(geometry.max_modes);
            let panels = 16 + (4.0 * k_max * (hi - lo) / PI) as usize;
            let rule = CompositeRule::new(lo, hi, panels, 20);
            let psi = |x: f64| (-0.5 * ((x - center) / sigma).powi(2)).exp();
            let norm: f64 = rule.integrate(psi);
            (1..=geometry.max_modes)
                .map(|n| rule.integrate(|x| psi(x) * geometry.mode_function(n, x)) / norm)
                .collect()
        }
    };
    let lines = overlaps
        .iter()
        .enumerate()
        .map(|(i, o)| ModeLine::new(1.0, geometry.frequency(i + 1), o * o))
        .collect::<Result<Vec<_>>>()?;
    ModeSpectrum::new(
        lines,
        SpectrumKind::Discrete,
        format!(
            "cavity L={} m={} M={} profile={:?}",
            geometry.length, geometry.mass, geometry.max_modes, profile
        ),
    )
}

/// How a continuum measure is discretised.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadratureRule {
    /// Composite Gauss–Legendre with `order` nodes per panel.
    GaussLegendre { order: usize },
    /// Equal-width midpoint cells.
    Midpoint,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule::GaussLegendre { order: 16 }
    }
}

/// Mode density per unit frequency of a free field in 3+1 Minkowski space,
/// `g(Ω) = Ω sqrt(Ω² − m²) / (2π²)`, zero below threshold.
pub fn minkowski_density_of_states(mass: f64, omega: f64) -> f64 {
    if omega <= mass {
        return 0.0;
    }
    omega * ((omega - mass) * (omega + mass)).sqrt() / (2.0 * PI * PI)
}

/// Discretised Minkowski continuum on `[m, omega_max]`.
///
/// Lines carry the quadrature weight in `weight` and `g(Ω)` in `f2`, so
/// `Σ weight·f2·h(Ω) ≈ ∫ g(Ω) h(Ω) dΩ`. For `m > 0` the rule runs in
/// `u = sqrt(Ω − m)`, which removes the square-root threshold. With the
/// Gauss–Legendre rule `n_points` is rounded up to whole panels.
pub fn minkowski_continuum_spectrum(
    mass: f64,
    omega_max: f64,
    n_points: usize,
    rule: QuadratureRule,
) -> Result<ModeSpectrum> {
    if !(mass >= 0.0 && mass.is_finite()) {
        return Err(Error::param("mass", format!("must be nonnegative, got {mass}")));
    }
    if !(omega_max > mass) || !omega_max.is_finite() {
        return Err(Error::EmptyBand { mass, omega_max });
    }
    if n_points < 2 {
        return Err(Error::param("n_points", "need at least two quadrature points"));
    }
    let (u_max, substitute) = if mass > 0.0 { ((omega_max - mass).sqrt(), true) } else { (omega_max, false) };
    let (nodes, weights) = match rule {
        QuadratureRule::GaussLegendre { order } => {
            if order == 0 {
                return Err(Error::param("order", "Gauss-Legendre order must be positive"));
            }
            let order = order.min(n_points);
            let r = CompositeRule::new(0.0, u_max, n_points.div_ceil(order), order);
            (r.nodes, r.weights)
        }
        QuadratureRule::Midpoint => {
            let h = u_max / n_points as f64;
            ((0..n_points).map(|i| (i as f64 + 0.5) * h).collect(), vec![h; n_points])
        }
    };
    let lines = nodes
        .iter()
        .zip(&weights)
        .map(|(&u, &w)| {
            let (omega, jac) = if substitute { (mass + u * u, 2.0 * u) } else { (u, 1.0) };
            ModeLine::new(w * jac, omega, minkowski_density_of_states(mass, omega))
        })
        .collect::<Result<Vec<_>>>()?;
    ModeSpectrum::new(
        lines,
        SpectrumKind::Continuum,
        format!("minkowski m={mass} omega_max={omega_max} n={n_points} rule={rule:?}"),
    )
}

/// Number of independent scalar harmonics on S³ at level `n`.
pub fn esu_degeneracy(n: usize) -> usize {
    (n + 1) * (n + 1)
}

/// Einstein static universe of radius `a`, minimally coupled field.
///
/// Levels `n = 1..=max_n` have `ω_n² = n(n+2)/a² + m²`; the degenerate
/// harmonics are summed into one line with `f2 = (n+1)²/(2π²a³)`, which by
/// homogeneity holds at every point.
pub fn esu_spectrum(radius: f64, mass: f64, max_n: usize) -> Result<ModeSpectrum> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::param("radius", format!("must be positive, got {radius}")));
    }
    if !(mass >= 0.0 && mass.is_finite()) {
        return Err(Error::param("mass", format!("must be nonnegative, got {mass}")));
    }
    if max_n == 0 {
        return Err(Error::param("max_n", "need at least one level"));
    }
    let volume = 2.0 * PI * PI * radius.powi(3);
    let lines = (1..=max_n)
        .map(|n| {
            let nf = n as f64;
            let omega = (nf * (nf + 2.0) / (radius * radius) + mass * mass).sqrt();
            ModeLine::new(1.0, omega, esu_degeneracy(n) as f64 / volume)
        })
        .collect::<Result<Vec<_>>>()?;
    ModeSpectrum::new(lines, SpectrumKind::Discrete, format!("esu a={radius} m={mass} n_max={max_n}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn cavity_reference_values() {
        let s = cavity_spectrum(PI, 0.0, 3, FRAC_PI_2).unwrap();
        let lines = s.to_lines();
        for (l, w) in lines.iter().zip([1.0, 2.0, 3.0]) {
            assert!((l.omega - w).abs() < 1e-15);
            assert_eq!(l.weight, 1.0);
        }
        assert!((lines[0].f2 - 2.0 / PI).abs() < 1e-15);
        assert!(lines[1].f2 < 1e-30);
        assert!((lines[2].f2 - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn cavity_modes_are_normalised() {
        // ∫_0^L F_n² dx = 1 by independent quadrature.
        let g = CavityGeometry::new(PI, 0.0, 5).unwrap();
        let rule = CompositeRule::new(0.0, PI, 32, 16);
        for n in 1..=5 {
            let norm: f64 = rule.integrate(|x| g.mode_function(n, x).powi(2));
            assert!((norm - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn cavity_wall_and_mass() {
        let s = cavity_spectrum(1.0, 0.0, 1, 0.0).unwrap();
        assert_eq!(s.line(0).f2, 0.0);
        let s = cavity_spectrum(PI, 1.0, 1, FRAC_PI_2).unwrap();
        assert!((s.line(0).omega - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn cavity_rejects_bad_parameters() {
        assert!(cavity_spectrum(0.0, 0.0, 1, 0.0).is_err());
        assert!(cavity_spectrum(1.0, 0.0, 0, 0.0).is_err());
        assert!(matches!(cavity_spectrum(1.0, 0.0, 1, 1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn density_of_states_values() {
        assert!((minkowski_density_of_states(0.0, 1.0) - 0.050_660_591_821_168_89).abs() < 1e-15);
        assert_eq!(minkowski_density_of_states(1.0, 1.0), 0.0);
        assert!((minkowski_density_of_states(0.0, 2.0) - 0.202_642_367_284_675_5).abs() < 1e-15);
    }

    #[test]
    fn density_of_states_matches_momentum_shell_count() {
        // g(Ω) dΩ = ∫ d³k/(2π)³ over the shell, done as a solid-angle
        // quadrature of the shell |k| ∈ [k(Ω), k(Ω+dΩ)].
        for (m, w) in [(0.0, 1.0), (0.7, 2.0), (0.0, 2.0)] {
            let k = |om: f64| ((om * om - m * m) as f64).sqrt();
            let d = 1e-6;
            let (k0, k1) = (k(w - d), k(w + d));
            let polar = CompositeRule::new(0.0, PI, 8, 8);
            let solid: f64 = polar.integrate(|t| t.sin()) * 2.0 * PI;
            let shell = solid * (k1.powi(3) - k0.powi(3)) / 3.0 / (2.0 * PI).powi(3);
            let g = shell / (2.0 * d);
            assert!((g - minkowski_density_of_states(m, w)).abs() < 1e-9, "m={m} w={w}");
        }
    }

    #[test]
    fn continuum_rejects_empty_band() {
        assert!(matches!(
            minkowski_continuum_spectrum(1.0, 1.0, 64, QuadratureRule::default()),
            Err(Error::EmptyBand { .. })
        ));
    }

    #[test]
    fn continuum_sum_approximates_integral() {
        // ∫_0^W g(Ω) dΩ for m = 0 is W³/(6π²).
        let s = minkowski_continuum_spectrum(0.0, 3.0, 64, QuadratureRule::default()).unwrap();
        assert_eq!(s.kind(), SpectrumKind::Continuum);
        let sum: f64 = s.lines().map(|l| l.strength()).sum();
        assert!((sum - 27.0 / (6.0 * PI * PI)).abs() < 1e-13);
        // Massive: ∫_m^W Ω sqrt(Ω²−m²) dΩ / 2π² = (W²−m²)^{3/2} / (6π²).
        let s = minkowski_continuum_spectrum(1.0, 3.0, 64, QuadratureRule::default()).unwrap();
        let sum: f64 = s.lines().map(|l| l.strength()).sum();
        assert!((sum - 8f64.powf(1.5) / (6.0 * PI * PI)).abs() < 1e-12);
    }

    #[test]
    fn continuum_refinement_converges() {
        for (m, rule) in [
            (0.0, QuadratureRule::default()),
            (0.5, QuadratureRule::default()),
            (2.0, QuadratureRule::GaussLegendre { order: 8 }),
        ] {
            let sum = |n: usize| {
                let s = minkowski_continuum_spectrum(m, 40.0, n, rule).unwrap();
                s.lines().map(|l| l.strength() / (2.0 * l.omega) * (-l.omega).exp()).sum::<f64>()
            };
            let (a, b) = (sum(2048), sum(4096));
            assert!(((a - b) / b).abs() <= 1e-6, "m={m} rule={rule:?}: {a} vs {b}");
        }
    }

    #[test]
    fn esu_reference_values() {
        let s = esu_spectrum(1.0, 0.0, 3).unwrap();
        assert!((s.line(0).omega - 3f64.sqrt()).abs() < 1e-15);
        assert!((s.line(0).f2 - 4.0 / (2.0 * PI * PI)).abs() < 1e-15);
        assert_eq!(esu_degeneracy(2), 9);
    }

    #[test]
    fn esu_degeneracy_matches_label_enumeration() {
        // Harmonics on S³ at level n carry labels (l, m) with 0 ≤ l ≤ n, |m| ≤ l.
        for n in 0..8usize {
            let count = (0..=n as i64).flat_map(|l| (-l..=l).map(move |m| (l, m))).count();
            assert_eq!(count, esu_degeneracy(n));
        }
    }

    #[test]
    fn esu_level_one_density_from_harmonics() {
        // Level-one harmonics are x_i/a normalised on S³ of radius 1. Integrate
        // x_1² over S³ in hyperspherical angles and sum |Y_i|² at a point.
        let chi = CompositeRule::new(0.0, PI, 16, 16);
        let theta = CompositeRule::new(0.0, PI, 16, 16);
        let measure: f64 = chi.integrate(|c| c.sin().powi(2)) * theta.integrate(|t| t.sin()) * 2.0 * PI;
        let x1_sq: f64 = chi.integrate(|c| c.sin().powi(2) * c.cos().powi(2)) * theta.integrate(|t| t.sin()) * 2.0 * PI;
        assert!((measure - 2.0 * PI * PI).abs() < 1e-12);
        // Y_i = x_i / sqrt(∫x_i²); at the pole x = (1,0,0,0) only Y_1 survives.
        let sum_sq = 1.0 / x1_sq;
        let s = esu_spectrum(1.0, 0.0, 1).unwrap();
        assert!((s.line(0).f2 - sum_sq).abs() < 1e-12);
    }

    #[test]
    fn smeared_narrow_gaussian_approaches_point() {
        let g = CavityGeometry::new(PI, 0.0, 6).unwrap();
        let point = smear_overlap(&g, &SmearingProfile::Point { x0: 1.1 }).unwrap();
        let narrow = smear_overlap(&g, &SmearingProfile::Gaussian { center: 1.1, sigma: 1e-6 }).unwrap();
        for (p, n) in point.lines().zip(narrow.lines()) {
            assert!((p.f2 - n.f2).abs() <= 1e-10 * p.f2.max(1e-300), "{} vs {}", p.f2, n.f2);
        }
    }

    #[test]
    fn smeared_parity_kills_even_overlap() {
        let g = CavityGeometry::new(PI, 0.0, 4).unwrap();
        for profile in [
            SmearingProfile::Gaussian { center: FRAC_PI_2, sigma: 0.3 },
            SmearingProfile::Box { from: 1.0, to: PI - 1.0 },
        ] {
            let s = smear_overlap(&g, &profile).unwrap();
            assert!(s.line(1).f2 < 1e-28, "{profile:?}: {}", s.line(1).f2);
            assert!(s.line(3).f2 < 1e-28);
        }
    }

    #[test]
    fn smeared_gaussian_matches_fine_trapezoid() {
        let g = CavityGeometry::new(PI, 0.0, 1).unwrap();
        let s = smear_overlap(&g, &SmearingProfile::Gaussian { center: FRAC_PI_2, sigma: 0.3 }).unwrap();
        // Independent oracle: trapezoid rule on 200k cells over the whole cavity.
        let n = 200_000;
        let h = PI / n as f64;
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..=n {
            let x = i as f64 * h;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            let psi = (-0.5 * ((x - FRAC_PI_2) / 0.3f64).powi(2)).exp();
            num += w * psi * (2.0 / PI).sqrt() * x.sin();
            den += w * psi;
        }
        let oracle = (num / den).powi(2);
        assert!((s.line(0).f2 - oracle).abs() < 1e-10);
        assert!(s.line(0).f2 < 2.0 / PI);
    }

    #[test]
    fn smeared_box_matches_quadrature() {
        let g = CavityGeometry::new(2.0, 0.3, 3).unwrap();
        let s = smear_overlap(&g, &SmearingProfile::Box { from: 0.2, to: 0.9 }).unwrap();
        let rule = CompositeRule::new(0.2, 0.9, 8, 16);
        for n in 1..=3 {
            let o: f64 = rule.integrate(|x| g.mode_function(n, x)) / 0.7;
            assert!((s.line(n - 1).f2 - o * o).abs() < 1e-14);
        }
    }

    #[test]
    fn smeared_outside_domain_rejected() {
        let g = CavityGeometry::new(1.0, 0.0, 2).unwrap();
        assert!(matches!(smear_overlap(&g, &SmearingProfile::Box { from: -0.1, to: 0.5 }), Err(Error::Domain(_))));
        assert!(matches!(
            smear_overlap(&g, &SmearingProfile::Gaussian { center: 1.2, sigma: 0.1 }),
            Err(Error::Domain(_))
        ));
    }
}
