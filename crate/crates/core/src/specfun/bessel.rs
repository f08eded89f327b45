//! Modified Bessel functions of the second kind, orders 0 and 1.
//!
//! Two regimes: the ascending series (A&S 9.6.13/9.6.11) for `x <= 2`, and
//! Steed's evaluation of the Temme continued fraction (CF2) for `x > 2`,
//! which converges in a few dozen terms there and yields `K0` and `K1`
//! together. Both are accurate to a few ulp over `[1e-8, 600]`; above
//! roughly 705 the result underflows to zero.

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_CROSSOVER: f64 = 2.0;
const MAX_TERMS: usize = 200;

fn check(what: &'static str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain { what, value: x })
    }
}

/// `K0(x)` for `x > 0`.
pub fn bessel_k0(x: f64) -> Result<f64> {
    check("bessel_k0", x)?;
    Ok(k0_k1(x).0)
}

/// `K1(x)` for `x > 0`.
pub fn bessel_k1(x: f64) -> Result<f64> {
    check("bessel_k1", x)?;
    Ok(k0_k1(x).1)
}

/// `(K0(x), K1(x))` from a single evaluation.
pub fn bessel_k0_k1(x: f64) -> Result<(f64, f64)> {
    check("bessel_k0_k1", x)?;
    Ok(k0_k1(x))
}

/// Unchecked evaluation; `x` must be positive and finite.
#[inline]
pub(crate) fn k0_k1(x: f64) -> (f64, f64) {
    if x <= SERIES_CROSSOVER {
        series(x)
    } else {
        continued_fraction(x)
    }
}

fn series(x: f64) -> (f64, f64) {
    let y = 0.25 * x * x;
    let log_half = libm::log(0.5 * x);

    // K0 = -(ln(x/2) + gamma) I0 + sum_k H_k y^k / (k!)^2
    // K1 = 1/x + ln(x/2) I1 - (x/4) sum_k (psi(k+1) + psi(k+2)) y^k / (k! (k+1)!)
    let mut t0 = 1.0; // y^k / (k!)^2
    let mut t1 = 1.0; // y^k / (k! (k+1)!)
    let mut harmonic = 0.0; // H_k
    let mut i0 = 1.0;
    let mut i1_sum = 1.0;
    let mut k0_sum = 0.0;
    let mut k1_sum = 1.0 - 2.0 * EULER_GAMMA; // psi(1) + psi(2)
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        t0 *= y / (kf * kf);
        t1 *= y / (kf * (kf + 1.0));
        harmonic += 1.0 / kf;
        let psi_pair = 2.0 * harmonic + 1.0 / (kf + 1.0) - 2.0 * EULER_GAMMA;
        i0 += t0;
        i1_sum += t1;
        k0_sum += harmonic * t0;
        k1_sum += psi_pair * t1;
        if t0 < 1e-18 * i0 && t1 < 1e-18 * i1_sum {
            break;
        }
    }
    let i1 = 0.5 * x * i1_sum;
    let k0 = -(log_half + EULER_GAMMA) * i0 + k0_sum;
    let k1 = 1.0 / x + log_half * i1 - 0.25 * x * k1_sum;
    (k0, k1)
}

fn continued_fraction(x: f64) -> (f64, f64) {
    // Steed's algorithm for CF2 at order mu = 0 (Numerical Recipes, bessik).
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAX_TERMS {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if libm::fabs(dels / s) < 1e-17 {
            break;
        }
    }
    h *= a1;
    let k0 = libm::sqrt(core::f64::consts::FRAC_PI_2 / x) * libm::exp(-x) / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}
