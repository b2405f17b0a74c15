//! Dense matrix exponential by scaling and squaring with a degree-13 Padé
//! approximant.

use nalgebra::DMatrix;
use num_complex::Complex64;

const B: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA_13: f64 = 5.371920351148152;

fn one_norm(a: &DMatrix<Complex64>) -> f64 {
    a.column_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn expm(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    assert!(a.is_square(), "expm needs a square matrix");
    let n = a.nrows();
    let norm = one_norm(a);
    let s = if norm > THETA_13 { (norm / THETA_13).log2().ceil() as i32 } else { 0 };
    let a = a * Complex64::new(0.5f64.powi(s), 0.0);
    let id = DMatrix::<Complex64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let c = |k: usize| Complex64::new(B[k], 0.0);
    let inner_u = &a6 * c(13) + &a4 * c(11) + &a2 * c(9);
    let u = &a * (&a6 * inner_u + &a6 * c(7) + &a4 * c(5) + &a2 * c(3) + &id * c(1));
    let inner_v = &a6 * c(12) + &a4 * c(10) + &a2 * c(8);
    let v = &a6 * inner_v + &a6 * c(6) + &a4 * c(4) + &a2 * c(2) + &id * c(0);
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).expect("Padé denominator is nonsingular for scaled arguments");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Largest singular value.
pub fn spectral_norm(a: &DMatrix<Complex64>) -> f64 {
    a.clone().singular_values().iter().copied().fold(0.0, f64::max)
}
