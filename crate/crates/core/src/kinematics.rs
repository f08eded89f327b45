//! Free-particle factors of the Brown–Ravenhall kernel along the field axis.
//!
//! At `m = 0` the factors are evaluated on the exact massless branch
//! (`A = 1/sqrt 2`, `k/(E+m) = sign k`) so that couplings between opposite
//! momentum half-lines vanish identically rather than to rounding error.

use core::f64::consts::FRAC_1_SQRT_2;

/// `E_A(k) = sqrt(k^2 + m^2)`.
#[inline]
pub fn relativistic_energy(k: f64, m: f64) -> f64 {
    libm::hypot(k, m)
}

/// Kinetic energy with the rest mass removed, `sqrt(k^2+m^2) - m`, written as
/// `k^2 / (E + m)` to avoid cancellation when `|k| << m`.
#[inline]
pub fn kinetic(k: f64, m: f64) -> f64 {
    let e = relativistic_energy(k, m);
    if e + m == 0.0 {
        0.0
    } else {
        k * k / (e + m)
    }
}

/// `A_E(k) = sqrt((E + m) / (2E))`.
#[inline]
pub fn dirac_weight(k: f64, m: f64) -> f64 {
    if m == 0.0 {
        return FRAC_1_SQRT_2;
    }
    let e = relativistic_energy(k, m);
    libm::sqrt((e + m) / (2.0 * e))
}

/// `A_E(k) k / (E + m) = k / sqrt(2 E (E + m))`.
#[inline]
pub fn spin_weight(k: f64, m: f64) -> f64 {
    if m == 0.0 {
        return if k > 0.0 {
            FRAC_1_SQRT_2
        } else if k < 0.0 {
            -FRAC_1_SQRT_2
        } else {
            0.0
        };
    }
    let e = relativistic_energy(k, m);
    k / libm::sqrt(2.0 * e * (e + m))
}

/// `f_{kk'}(m) = A(k)A(k') + A(k) k/(E(k)+m) * k'/(E(k')+m) A(k')`.
///
/// No domain checks; at `m = 0` with `k` or `kp` zero the massless branch
/// returns `1/2`.
#[inline]
pub fn coupling(k: f64, kp: f64, m: f64) -> f64 {
    if m == 0.0 {
        let s = k * kp;
        return if s > 0.0 {
            1.0
        } else if s < 0.0 {
            0.0
        } else {
            0.5
        };
    }
    dirac_weight(k, m) * dirac_weight(kp, m) + spin_weight(k, m) * spin_weight(kp, m)
}
