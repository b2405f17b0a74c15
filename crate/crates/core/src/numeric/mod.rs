//! Numerical building blocks shared by the physics modules.

pub mod quadrature;
pub mod special;

pub use quadrature::{gauss_legendre, integrate_adaptive, CompositeRule, Integral, QuadValue};
pub use special::{dawson, ln_bessel_i_sequence};
