//! Special functions and quadrature rules shared by every other module.

mod bessel;
mod quadrature;

pub use bessel::{bessel_k0, bessel_k0_k1, bessel_k1, EULER_GAMMA};
pub(crate) use bessel::k0_k1;
pub use quadrature::{
    gauss_legendre, integrate_converged, make_legendre_rule, make_log_rule,
    make_semi_infinite_rule, Domain, QuadratureRule, Tolerance,
};
