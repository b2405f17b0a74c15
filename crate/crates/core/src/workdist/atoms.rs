//! Lattice work distributions of discrete spectra.
//!
//! Each line of the exponent is a Skellam-type law. Expanding
//! `exp(a sinh(h) i sin Ωμ + a cosh(h) cos Ωμ)` with the Bessel generating
//! function gives atoms `p_m = e^{−b} I_m(a) e^{m h}` at `W = mΩ`, where
//! `h = βΩ/2`.

use serde::Serialize;

use crate::charfunc::{ModeFactors, RunParams};
use crate::error::{Error, Result};
use crate::numeric::ln_bessel_i_sequence;

/// Tail bound of a single-line atom set.
pub const TAIL_BOUND: f64 = 1e-12;
/// Default pruning floor for convolutions.
pub const DEFAULT_WEIGHT_FLOOR: f64 = 1e-14;
const MERGE_RELATIVE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Atom {
    pub w: f64,
    pub p: f64,
}

/// Weighted atoms sorted by `W`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicDistribution {
    atoms: Vec<Atom>,
    beta: f64,
    drift: f64,
}

impl AtomicDistribution {
    /// Sorts and merges coincident `W`; no pruning.
    pub fn new(atoms: Vec<Atom>, beta: f64) -> Self {
        Self { atoms: merge(atoms), beta, drift: 0.0 }
    }

    pub fn delta(beta: f64) -> Self {
        Self { atoms: vec![Atom { w: 0.0, p: 1.0 }], beta, drift: 0.0 }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Same atoms labelled with another β; used to build negative controls.
    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    /// Total weight removed by pruning before renormalisation.
    pub fn drift(&self) -> f64 {
        self.drift
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.p).sum()
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|a| a.w * a.p).sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.atoms.iter().map(|a| a.w * a.w * a.p).sum()
    }

    /// Weight at `w`, if an atom sits there.
    pub fn weight_at(&self, w: f64) -> Option<f64> {
        let tol = MERGE_RELATIVE * w.abs().max(1.0);
        self.atoms.iter().find(|a| (a.w - w).abs() <= tol).map(|a| a.p)
    }
}

fn merge(mut atoms: Vec<Atom>) -> Vec<Atom> {
    atoms.sort_by(|a, b| a.w.total_cmp(&b.w));
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    for a in atoms {
        match out.last_mut() {
            Some(last) if (a.w - last.w).abs() <= MERGE_RELATIVE * last.w.abs().max(1.0) => last.p += a.p,
            _ => out.push(a),
        }
    }
    out
}

/// `(p_m, p_{−m})` for `m = 0..=m_max` of one line.
fn line_weights(f: &ModeFactors, m_max: usize) -> Vec<(f64, f64)> {
    let a = f.a();
    let b = f.b();
    let ln_i = ln_bessel_i_sequence(a, m_max);
    ln_i.iter()
        .enumerate()
        .map(|(m, &li)| {
            let shift = m as f64 * f.half;
            ((li - b + shift).exp(), (li - b - shift).exp())
        })
        .collect()
}

fn tail_beyond(f: &ModeFactors, m_max: usize) -> f64 {
    let w = line_weights(f, m_max + 40);
    w[m_max + 1..].iter().map(|(p, q)| p + q).sum()
}

/// Smallest `m_max` whose tail is within [`TAIL_BOUND`].
fn required_m_max(f: &ModeFactors) -> usize {
    let mut m = 1;
    while tail_beyond(f, m) > TAIL_BOUND {
        m += 1 + m / 2;
    }
    // Walk back to the smallest admissible value.
    while m > 1 && tail_beyond(f, m - 1) <= TAIL_BOUND {
        m -= 1;
    }
    m
}

fn line_atoms(f: &ModeFactors, m_max: usize, beta: f64) -> Result<AtomicDistribution> {
    let tail = tail_beyond(f, m_max);
    if tail > TAIL_BOUND {
        return Err(Error::Truncation { tail, bound: TAIL_BOUND, suggested: required_m_max(f) });
    }
    let mut atoms = Vec::with_capacity(2 * m_max + 1);
    for (m, (p, q)) in line_weights(f, m_max).into_iter().enumerate() {
        let w = m as f64 * f.omega;
        atoms.push(Atom { w, p });
        if m > 0 {
            atoms.push(Atom { w: -w, p: q });
        }
    }
    Ok(AtomicDistribution::new(atoms, beta))
}

/// Atoms of line `index` of the run's spectrum for `m ∈ [−m_max, m_max]`.
///
/// Fails with a truncation error, carrying the smallest admissible `m_max`,
/// when the weight beyond the window exceeds [`TAIL_BOUND`].
pub fn atoms_single_mode(params: &RunParams, index: usize, m_max: usize) -> Result<AtomicDistribution> {
    if m_max < 1 {
        return Err(Error::param("m_max", "must be at least 1"));
    }
    let c = params
        .coefficients()
        .get(index)
        .ok_or_else(|| Error::param("index", format!("no line {index}")))?;
    let single = params.mode_factors_of(c);
    match single {
        None => Ok(AtomicDistribution::delta(params.beta())),
        Some(f) => line_atoms(&f, m_max, params.beta()),
    }
}

/// Lattice distribution of the full spectrum, folding every line with
/// [`convolve_atoms`].
pub fn atoms(params: &RunParams, weight_floor: f64) -> Result<AtomicDistribution> {
    let mut dist = AtomicDistribution::delta(params.beta());
    let mut drift = 0.0;
    for f in params.mode_factors() {
        let line = line_atoms(&f, required_m_max(&f), params.beta())?;
        dist = convolve_atoms(&dist, &line, weight_floor)?;
        drift += dist.drift;
    }
    dist.drift = drift;
    if drift > 0.0 {
        log::debug!("atom pruning removed {drift:e} of total weight");
    }
    Ok(dist)
}

/// Convolution of two lattice laws.
///
/// An atom survives when `p ≥ floor` or `p e^{−βW} ≥ floor`, so mirror
/// pairs `±W` are kept or dropped together. The pruned weight is stored as
/// the drift and the rest is renormalised to the pre-pruning mass.
pub fn convolve_atoms(d1: &AtomicDistribution, d2: &AtomicDistribution, weight_floor: f64) -> Result<AtomicDistribution> {
    if d1.beta != d2.beta {
        return Err(Error::param("beta", format!("cannot convolve β = {} with β = {}", d1.beta, d2.beta)));
    }
    let beta = d1.beta;
    let mut raw = Vec::with_capacity(d1.len() * d2.len());
    for a in &d1.atoms {
        for b in &d2.atoms {
            raw.push(Atom { w: a.w + b.w, p: a.p * b.p });
        }
    }
    let merged = merge(raw);
    let total: f64 = merged.iter().map(|a| a.p).sum();
    let (kept, dropped): (Vec<Atom>, Vec<Atom>) = merged
        .into_iter()
        .partition(|a| a.p.abs() >= weight_floor || (a.p * (-beta * a.w).exp()).abs() >= weight_floor);
    let drift: f64 = dropped.iter().map(|a| a.p).sum();
    let scale = total / (total - drift);
    let atoms = kept.into_iter().map(|a| Atom { w: a.w, p: a.p * scale }).collect();
    Ok(AtomicDistribution { atoms, beta, drift })
}
