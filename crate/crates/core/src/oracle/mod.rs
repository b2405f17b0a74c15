//! Brute-force reference in a truncated Fock space.
//!
//! Nothing here reuses the closed forms of [`crate::charfunc`]: the field
//! operator, the Gibbs state and the protocol unitaries are built as dense
//! matrices and combined directly.
//!
//! With `χ̃(Ω) = ∫ χ e^{iΩτ}` and `c_j = sqrt(w_j f2_j / 2Ω_j)`, the smeared
//! field along the worldline is
//! `φ(f) = Σ_j c_j (χ̃(Ω_j)* a_j + χ̃(Ω_j) a_j†)`.

mod expm;
mod trotter;

pub use expm::{expm, spectral_norm};
pub use trotter::{trotter_convergence, trotter_unitary, TrotterFit, TrotterReport};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::charfunc::{magnus_phase, RunParams};
use crate::error::{Error, Result};
use crate::spectra::{ModeLine, ModeSpectrum, SpectrumKind};
use crate::switching::SwitchingProfile;

/// Upper bound on `2 · Π (N_j + 1)`.
pub const DIMENSION_CAP: usize = 20_000;
/// Per-mode Gibbs weight allowed above the cutoff.
pub const THERMAL_TAIL: f64 = 1e-10;
/// Required agreement between cutoffs `N` and `N + 5`.
pub const CUTOFF_CERTIFICATE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct FockOracleConfig {
    pub modes: Vec<ModeLine>,
    pub cutoff: usize,
    pub beta: f64,
    pub lambda: f64,
    pub switching: SwitchingProfile,
}

impl FockOracleConfig {
    pub fn new(
        modes: Vec<ModeLine>,
        cutoff: usize,
        beta: f64,
        lambda: f64,
        switching: SwitchingProfile,
    ) -> Result<Self> {
        let cfg = Self { modes, cutoff, beta, lambda, switching };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.modes.is_empty() || self.modes.len() > 3 {
            return Err(Error::param("modes", format!("oracle takes 1 to 3 modes, got {}", self.modes.len())));
        }
        for m in &self.modes {
            m.validate()?;
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::param("beta", format!("must be positive and finite, got {}", self.beta)));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::param("lambda", format!("must be nonnegative, got {}", self.lambda)));
        }
        let dim = self.qubit_dimension(self.cutoff);
        if dim > DIMENSION_CAP {
            return Err(Error::Dimension { dim, cap: DIMENSION_CAP });
        }
        for m in &self.modes {
            let tail = (-self.beta * m.omega * self.cutoff as f64).exp();
            if tail > THERMAL_TAIL {
                let suggested = (-THERMAL_TAIL.ln() / (self.beta * m.omega)).ceil() as usize;
                return Err(Error::Cutoff { cutoff: self.cutoff, change: tail, suggested });
            }
        }
        for (m, amp) in self.modes.iter().zip(self.amplitudes()?) {
            let d2 = (self.lambda * amp).norm_sqr();
            if d2 > self.cutoff as f64 / 4.0 {
                return Err(Error::param(
                    "cutoff",
                    format!("displacement |α|² = {d2} for Ω = {} exceeds N/4 = {}", m.omega, self.cutoff as f64 / 4.0),
                ));
            }
        }
        Ok(())
    }

    pub fn with_cutoff(&self, cutoff: usize) -> Self {
        Self { cutoff, ..self.clone() }
    }

    pub fn field_dimension(&self, cutoff: usize) -> usize {
        (cutoff + 1).pow(self.modes.len() as u32)
    }

    fn qubit_dimension(&self, cutoff: usize) -> usize {
        2usize.saturating_mul(self.field_dimension(cutoff))
    }

    /// `c_j χ̃(Ω_j)`, the coefficient of `a_j†` in `φ(f)`.
    fn amplitudes(&self) -> Result<Vec<Complex64>> {
        self.modes
            .iter()
            .map(|m| {
                let c = (m.weight * m.f2 / (2.0 * m.omega)).sqrt();
                Ok(c * self.switching.fourier(Complex64::new(m.omega, 0.0))?)
            })
            .collect()
    }

    /// The same run as closed-form parameters.
    pub fn run_params(&self) -> Result<RunParams> {
        let spec = ModeSpectrum::new(self.modes.clone(), SpectrumKind::Discrete, "fock oracle modes")?;
        RunParams::new(spec, self.switching, self.beta, self.lambda)
    }
}

/// Ladder operators of every mode on the tensor-product space.
pub(crate) struct FockSpace {
    pub dim: usize,
    pub lowering: Vec<DMatrix<Complex64>>,
    /// Occupation numbers of each basis state, one vector per mode.
    pub occupations: Vec<Vec<usize>>,
}

impl FockSpace {
    pub fn new(n_modes: usize, cutoff: usize) -> Self {
        let local = cutoff + 1;
        let dim = local.pow(n_modes as u32);
        let mut a = DMatrix::<Complex64>::zeros(local, local);
        for n in 1..local {
            a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
        }
        let id = DMatrix::<Complex64>::identity(local, local);
        let lowering = (0..n_modes)
            .map(|j| {
                let mut op = DMatrix::<Complex64>::identity(1, 1);
                for k in 0..n_modes {
                    op = op.kronecker(if k == j { &a } else { &id });
                }
                op
            })
            .collect();
        let occupations = (0..dim)
            .map(|idx| {
                let mut rest = idx;
                let mut occ = vec![0; n_modes];
                for k in (0..n_modes).rev() {
                    occ[k] = rest % local;
                    rest /= local;
                }
                occ
            })
            .collect();
        Self { dim, lowering, occupations }
    }

    /// `Σ Ω_j n_j` on the basis states.
    pub fn energies(&self, modes: &[ModeLine]) -> Vec<f64> {
        self.occupations
            .iter()
            .map(|occ| occ.iter().zip(modes).map(|(&n, m)| n as f64 * m.omega).sum())
            .collect()
    }

    /// Basis indices with every occupation at most `limit`.
    pub fn low_block(&self, limit: usize) -> Vec<usize> {
        (0..self.dim).filter(|&i| self.occupations[i].iter().all(|&n| n <= limit)).collect()
    }
}

/// `Σ_j (coeff_j* a_j + coeff_j a_j†)`.
pub(crate) fn linear_field(space: &FockSpace, coeffs: &[Complex64]) -> DMatrix<Complex64> {
    let mut phi = DMatrix::<Complex64>::zeros(space.dim, space.dim);
    for (a, c) in space.lowering.iter().zip(coeffs) {
        phi += a * c.conj() + a.adjoint() * *c;
    }
    phi
}

/// Truncated, renormalised Gibbs weights and the missing mass.
fn gibbs(energies: &[f64], modes: &[ModeLine], beta: f64) -> (Vec<f64>, f64) {
    let e0 = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let raw: Vec<f64> = energies.iter().map(|e| (-beta * (e - e0)).exp()).collect();
    let z_trunc: f64 = raw.iter().sum();
    let z_full: f64 = modes.iter().map(|m| 1.0 / -(-beta * m.omega).exp_m1()).product();
    (raw.iter().map(|r| r / z_trunc).collect(), 1.0 - z_trunc / z_full)
}

/// Interaction-picture unitary `e^{iθ} e^{−iλφ(f)}`.
pub(crate) fn closed_unitary(cfg: &FockOracleConfig, space: &FockSpace, include_phase: bool) -> Result<DMatrix<Complex64>> {
    let phi = linear_field(space, &cfg.amplitudes()?);
    let u = expm(&(phi * Complex64::new(0.0, -cfg.lambda)));
    if !include_phase {
        return Ok(u);
    }
    let theta = magnus_phase(&cfg.run_params()?)?;
    Ok(u * Complex64::new(0.0, theta).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleValue {
    pub re: f64,
    pub im: f64,
    /// `|value(N + 5) − value(N)|`.
    pub cutoff_change: f64,
    /// Gibbs mass lost to the truncation before renormalisation.
    pub mass_deficit: f64,
}

impl OracleValue {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Precomputed field data at one cutoff; evaluates many μ cheaply.
pub struct FockEvaluator {
    energies: Vec<f64>,
    rho: Vec<f64>,
    /// `|U_mn|²`.
    transition: DMatrix<f64>,
    mass_deficit: f64,
}

impl FockEvaluator {
    pub fn new(cfg: &FockOracleConfig, include_phase: bool) -> Result<Self> {
        cfg.validate()?;
        let space = FockSpace::new(cfg.modes.len(), cfg.cutoff);
        let energies = space.energies(&cfg.modes);
        let (rho, mass_deficit) = gibbs(&energies, &cfg.modes, cfg.beta);
        let u = closed_unitary(cfg, &space, include_phase)?;
        Ok(Self { energies, rho, transition: u.map(|z| z.norm_sqr()), mass_deficit })
    }

    /// `Tr(U† e^{iμH} U e^{−iμH} ρ) = Σ_{m,n} |U_mn|² ρ_n e^{iμ(E_m − E_n)}`.
    pub fn eval(&self, mu: Complex64) -> Complex64 {
        let i = Complex64::i();
        let mut total = Complex64::new(0.0, 0.0);
        for (n, (&rho_n, &e_n)) in self.rho.iter().zip(&self.energies).enumerate() {
            let mut col = Complex64::new(0.0, 0.0);
            for (m, &e_m) in self.energies.iter().enumerate() {
                col += self.transition[(m, n)] * (i * mu * (e_m - e_n)).exp();
            }
            total += rho_n * col;
        }
        total
    }
}

/// Oracle characteristic function with a cutoff certificate.
pub fn fock_charfunc(cfg: &FockOracleConfig, mu: Complex64) -> Result<OracleValue> {
    fock_charfunc_many(cfg, &[mu]).map(|mut v| v.remove(0))
}

/// [`fock_charfunc`] at many points, reusing both unitaries.
pub fn fock_charfunc_many(cfg: &FockOracleConfig, mus: &[Complex64]) -> Result<Vec<OracleValue>> {
    for mu in mus {
        if mu.im.abs() > cfg.beta {
            return Err(Error::Domain(format!("|Im μ| = {} exceeds β = {}", mu.im.abs(), cfg.beta)));
        }
    }
    let base = FockEvaluator::new(cfg, true)?;
    let bigger = cfg.with_cutoff(cfg.cutoff + 5);
    let dim = bigger.qubit_dimension(bigger.cutoff);
    if dim > DIMENSION_CAP {
        return Err(Error::Dimension { dim, cap: DIMENSION_CAP });
    }
    let refined = FockEvaluator::new(&bigger, true)?;
    let mut out = Vec::with_capacity(mus.len());
    for &mu in mus {
        let v = base.eval(mu);
        let change = (refined.eval(mu) - v).norm();
        if change > CUTOFF_CERTIFICATE {
            return Err(Error::Cutoff { cutoff: cfg.cutoff, change, suggested: cfg.cutoff + 10 });
        }
        out.push(OracleValue { re: v.re, im: v.im, cutoff_change: change, mass_deficit: base.mass_deficit });
    }
    Ok(out)
}

/// 2×2 block operator on qubit ⊗ field, block `(q, q′)` = `⟨q|X|q′⟩`.
type Blocks = [[DMatrix<Complex64>; 2]; 2];

fn hadamard_conjugate(x: &Blocks) -> Blocks {
    // (H ⊗ I) X (H ⊗ I)†, H = [[1, 1], [1, −1]]/√2.
    let s = [[1.0, 1.0], [1.0, -1.0]];
    let mut out: Blocks = Default::default();
    for a in 0..2 {
        for b in 0..2 {
            let mut acc = DMatrix::<Complex64>::zeros(x[0][0].nrows(), x[0][0].ncols());
            for q in 0..2 {
                for r in 0..2 {
                    acc += &x[q][r] * Complex64::new(0.5 * s[a][q] * s[b][r], 0.0);
                }
            }
            out[a][b] = acc;
        }
    }
    out
}

/// Detector Bloch components `(⟨σ₃⟩, ⟨σ₂⟩)` after Hadamard, controlled
/// `G_μ = U e^{−iμH} ⊗ |0⟩⟨0| + e^{−iμH} U ⊗ |1⟩⟨1|` and Hadamard, starting
/// from `|0⟩` and the truncated Gibbs state.
pub fn ramsey_protocol(cfg: &FockOracleConfig, mu: f64) -> Result<(f64, f64)> {
    cfg.validate()?;
    let space = FockSpace::new(cfg.modes.len(), cfg.cutoff);
    let energies = space.energies(&cfg.modes);
    let (rho, _) = gibbs(&energies, &cfg.modes, cfg.beta);
    let rho_field = DMatrix::from_diagonal(&DVector::from_iterator(space.dim, rho.iter().map(|&r| Complex64::new(r, 0.0))));
    let u = closed_unitary(cfg, &space, true)?;
    let free = DMatrix::from_diagonal(&DVector::from_iterator(
        space.dim,
        energies.iter().map(|&e| Complex64::new(0.0, -mu * e).exp()),
    ));
    let v = [&u * &free, &free * &u];
    // |0⟩⟨0| ⊗ ρ_φ, then the first Hadamard.
    let zero = DMatrix::<Complex64>::zeros(space.dim, space.dim);
    let initial: Blocks = [[rho_field.clone(), zero.clone()], [zero.clone(), zero]];
    let prepared = hadamard_conjugate(&initial);
    let mut evolved: Blocks = Default::default();
    for q in 0..2 {
        for r in 0..2 {
            evolved[q][r] = &v[q] * &prepared[q][r] * v[r].adjoint();
        }
    }
    let fin = hadamard_conjugate(&evolved);
    let r = [[fin[0][0].trace(), fin[0][1].trace()], [fin[1][0].trace(), fin[1][1].trace()]];
    // σ₃ = diag(1, −1); σ₂ = [[0, −i], [i, 0]].
    let sigma3 = (r[0][0] - r[1][1]).re;
    let sigma2 = (Complex64::new(0.0, -1.0) * r[1][0] + Complex64::new(0.0, 1.0) * r[0][1]).re;
    Ok((sigma3, sigma2))
}
