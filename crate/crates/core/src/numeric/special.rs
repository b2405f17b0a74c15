//! Special functions: Dawson's integral and modified Bessel functions of
//! integer order.

use super::quadrature::integrate_adaptive;

/// Dawson's integral `D(x) = e^{-x²} ∫_0^x e^{t²} dt`.
pub fn dawson(x: f64) -> f64 {
    if x < 0.0 {
        return -dawson(-x);
    }
    if x == 0.0 {
        return 0.0;
    }
    if x > 50.0 {
        // Asymptotic series; the next term is below 1e-17 relative here.
        let y = 1.0 / (2.0 * x * x);
        return (1.0 + y * (1.0 + y * (3.0 + y * (15.0 + 105.0 * y)))) / (2.0 * x);
    }
    // e^{t²-x²} = e^{-(x-t)(x+t)} is bounded by one on [0, x].
    let tol = 1e-16 * (1.0 / (2.0 * x)).min(x).max(1e-3);
    integrate_adaptive(|t| (-(x - t) * (x + t)).exp(), 0.0, x, tol, 4000)
        .map(|r| r.value)
        .expect("smooth bounded integrand")
}

/// `ln I_m(a)` for `m = 0..=m_max` and `a ≥ 0`.
///
/// Ratios `I_k / I_{k-1}` come from the backward continued fraction, and the
/// level is fixed by the sum rule `e^a = I_0 + 2 Σ_{k≥1} I_k`. Working with
/// logarithms keeps large orders and large arguments finite.
pub fn ln_bessel_i_sequence(a: f64, m_max: usize) -> Vec<f64> {
    assert!(a >= 0.0 && a.is_finite(), "bessel argument must be finite and nonnegative");
    if a == 0.0 {
        let mut out = vec![f64::NEG_INFINITY; m_max + 1];
        out[0] = 0.0;
        return out;
    }
    let k_top = m_max + (40.0 * a.sqrt()) as usize + 60;
    let mut ratios = vec![0.0; k_top + 2];
    let mut next = 0.0;
    for k in (1..=k_top).rev() {
        let r = 1.0 / (2.0 * k as f64 / a + next);
        ratios[k] = r;
        next = r;
    }
    let mut prod = 1.0;
    let mut tail = 0.0;
    for &r in &ratios[1..=k_top] {
        prod *= r;
        if prod == 0.0 {
            break;
        }
        tail += prod;
    }
    let ln_i0 = a - (1.0 + 2.0 * tail).ln();
    let mut out = Vec::with_capacity(m_max + 1);
    let mut acc = ln_i0;
    out.push(acc);
    for &r in &ratios[1..=m_max] {
        acc += r.ln();
        out.push(acc);
    }
    out
}
