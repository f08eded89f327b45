//! The lowest-Landau-level Coulomb kernel in momentum space.
//!
//! Averaging `1/|x|` over the transverse ground state `exp(-eB0 rho^2/4)` and
//! Fourier transforming along the field gives
//!
//! ```text
//! V̂0(q) = 2 eB0 / sqrt(2 pi) * int_0^inf rho exp(-eB0 rho^2 / 2) K0(|q| rho) drho
//! ```
//!
//! which is positive, decreasing in `|q|`, diverges like `-c1 ln|q|` at the
//! origin and falls off like `1/q^2`. [`PotentialEvaluator`] tabulates it once
//! on a geometric grid and interpolates; kernel assembly calls it `O(N^2)`
//! times.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::specfun::{self, k0_k1, make_legendre_rule, make_log_rule, QuadratureRule, Tolerance};
use crate::stats::linear_fit;
use crate::{GAMMA_CRITICAL, INV_SQRT_2PI};

/// Default magnetic coupling, `eB0 / 2 = 1`.
pub const DEFAULT_EB0: f64 = 2.0;

/// Physical parameters of the one-electron ion, relativistic units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldConfig {
    eb0: f64,
    gamma: f64,
    mass: f64,
}

impl FieldConfig {
    /// Validates `eB0 > 0`, `0 <= gamma < 2/pi` and `mass >= 0`.
    pub fn new(eb0: f64, gamma: f64, mass: f64) -> Result<Self> {
        if !(eb0.is_finite() && eb0 > 0.0) {
            return Err(Error::Domain {
                what: "eB0",
                value: eb0,
            });
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::Domain {
                what: "gamma",
                value: gamma,
            });
        }
        if gamma >= GAMMA_CRITICAL {
            return Err(Error::Supercritical {
                gamma,
                limit: GAMMA_CRITICAL,
            });
        }
        if !(mass.is_finite() && mass >= 0.0) {
            return Err(Error::Domain {
                what: "mass",
                value: mass,
            });
        }
        Ok(Self { eb0, gamma, mass })
    }

    /// Same as [`FieldConfig::new`] with `gamma = Z e^2`.
    pub fn from_charge(z: f64, eb0: f64, mass: f64) -> Result<Self> {
        Self::new(eb0, crate::gamma_from_z(z), mass)
    }

    pub fn eb0(&self) -> f64 {
        self.eb0
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn with_mass(self, mass: f64) -> Result<Self> {
        Self::new(self.eb0, self.gamma, mass)
    }

    pub fn with_gamma(self, gamma: f64) -> Result<Self> {
        Self::new(self.eb0, gamma, self.mass)
    }
}

const TABLE_Q_MIN: f64 = 1e-8;
const TABLE_Q_MAX: f64 = 1e6;
const TABLE_PER_DECADE: usize = 128;
/// Nodes of the log-scaled rule used for one direct evaluation.
const DIRECT_NODES: usize = 192;
/// Width of the integration window in `ln rho`.
const LOG_WINDOW: f64 = 27.0;

/// Fit window for the small-`q` logarithmic coefficient.
const SLOPE_WINDOW: (f64, f64) = (1e-6, 1e-4);

/// Tabulated `V̂0` for one value of `eB0`. Immutable after construction.
#[derive(Debug, Clone)]
pub struct PotentialEvaluator {
    eb0: f64,
    /// Gauss–Legendre rule on `[0, 1]`, stretched over the `ln rho` window.
    quad: QuadratureRule,
    /// `ln q` of the first table point and the spacing.
    u0: f64,
    h: f64,
    /// `ln V̂0` at each table point.
    log_v: Vec<f64>,
    /// Hermite slopes `d ln V̂0 / d ln q` at the left and right end of each
    /// interval, after the monotonicity limiter.
    slopes: Vec<(f64, f64)>,
    /// `-q dV̂0/dq` at the first table point; continues the `-c1 ln q` law.
    small_q_coeff: f64,
}

impl PotentialEvaluator {
    /// Builds the table for `eB0`.
    pub fn new(eb0: f64) -> Result<Self> {
        Self::with_resolution(eb0, DIRECT_NODES, TABLE_PER_DECADE)
    }

    pub fn for_config(cfg: &FieldConfig) -> Result<Self> {
        Self::new(cfg.eb0())
    }

    /// Explicit node count per direct evaluation and table density.
    pub fn with_resolution(eb0: f64, nodes: usize, per_decade: usize) -> Result<Self> {
        if !(eb0.is_finite() && eb0 > 0.0) {
            return Err(Error::Domain {
                what: "eB0",
                value: eb0,
            });
        }
        if per_decade < 4 {
            return Err(Error::InvalidArgument(format!(
                "table density must be at least 4 per decade, got {per_decade}"
            )));
        }
        let quad = make_legendre_rule(nodes, 0.0, 1.0)?;
        let u0 = libm::log(TABLE_Q_MIN);
        let decades = libm::log10(TABLE_Q_MAX / TABLE_Q_MIN);
        let count = libm::round(decades * per_decade as f64) as usize + 1;
        let h = (libm::log(TABLE_Q_MAX) - u0) / (count - 1) as f64;

        let mut ev = Self {
            eb0,
            quad,
            u0,
            h,
            log_v: Vec::new(),
            slopes: Vec::new(),
            small_q_coeff: 0.0,
        };

        let samples: Vec<(f64, f64)> =
            crate::par::map_range(count, |i| ev.direct_with_derivative(libm::exp(u0 + h * i as f64)));
        let mut log_v = Vec::with_capacity(count);
        let mut log_slope = Vec::with_capacity(count);
        for (i, &(v, dv)) in samples.iter().enumerate() {
            let q = libm::exp(u0 + h * i as f64);
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Quadrature {
                    what: "vhat0 table",
                    change: v,
                });
            }
            log_v.push(libm::log(v));
            log_slope.push(q * dv / v);
        }
        if log_v.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Quadrature {
                what: "vhat0 table is not strictly decreasing",
                change: 0.0,
            });
        }

        // Fritsch–Carlson limiter on the exact slopes.
        let mut slopes = Vec::with_capacity(count - 1);
        for i in 0..count - 1 {
            let secant = (log_v[i + 1] - log_v[i]) / h;
            let (mut a, mut b) = (log_slope[i] / secant, log_slope[i + 1] / secant);
            a = a.max(0.0);
            b = b.max(0.0);
            let r2 = a * a + b * b;
            if r2 > 9.0 {
                let t = 3.0 / libm::sqrt(r2);
                a *= t;
                b *= t;
            }
            slopes.push((a * secant, b * secant));
        }

        ev.small_q_coeff = -samples[0].1 * TABLE_Q_MIN;
        ev.log_v = log_v;
        ev.slopes = slopes;
        Ok(ev)
    }

    pub fn eb0(&self) -> f64 {
        self.eb0
    }

    /// `V̂0(q)` from the table; depends on `|q|` only.
    pub fn vhat0(&self, q: f64) -> Result<f64> {
        if q.is_nan() || q.is_infinite() {
            return Err(Error::Domain {
                what: "vhat0",
                value: q,
            });
        }
        if q == 0.0 {
            return Err(Error::Singularity);
        }
        Ok(self.eval_abs(libm::fabs(q)))
    }

    /// `V̂0(q)` by direct quadrature, bypassing the table.
    pub fn vhat0_direct(&self, q: f64) -> Result<f64> {
        if q.is_nan() || q.is_infinite() {
            return Err(Error::Domain {
                what: "vhat0",
                value: q,
            });
        }
        if q == 0.0 {
            return Err(Error::Singularity);
        }
        Ok(self.direct_with_derivative(libm::fabs(q)).0)
    }

    /// Table lookup for `q > 0`, no checks. Beyond the table the asymptotic
    /// laws `-c1 ln q + const` and `c2 / q^2` take over.
    #[inline]
    pub(crate) fn eval_abs(&self, q: f64) -> f64 {
        let u = libm::log(q);
        let last = self.log_v.len() - 1;
        let pos = (u - self.u0) / self.h;
        if pos <= 0.0 {
            return libm::exp(self.log_v[0]) + self.small_q_coeff * (self.u0 - u);
        }
        if pos >= last as f64 {
            return libm::exp(self.log_v[last] - 2.0 * (u - (self.u0 + self.h * last as f64)));
        }
        let i = (pos as usize).min(last - 1);
        let t = pos - i as f64;
        let (s0, s1) = self.slopes[i];
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        libm::exp(
            h00 * self.log_v[i] + h10 * self.h * s0 + h01 * self.log_v[i + 1] + h11 * self.h * s1,
        )
    }

    /// `(V̂0(q), dV̂0/dq)` for `q > 0` by Gauss–Legendre in `ln rho`.
    ///
    /// The window ends where either the Gaussian or `K0(q rho)` has decayed
    /// below `1e-18` and spans `LOG_WINDOW` e-folds to the left of that.
    fn direct_with_derivative(&self, q: f64) -> (f64, f64) {
        let a = 0.5 * self.eb0;
        let rho_hi = (6.5 / libm::sqrt(a)).min(42.0 / q);
        let y_hi = libm::log(rho_hi);
        let mut v = 0.0;
        let mut dv = 0.0;
        for (u, w) in self.quad.iter() {
            let rho = libm::exp(y_hi - LOG_WINDOW * (1.0 - u));
            let x = q * rho;
            let (k0, k1) = k0_k1(x);
            let g = w * rho * rho * libm::exp(-a * rho * rho);
            v += g * k0;
            dv -= g * rho * k1;
        }
        let pref = 2.0 * self.eb0 * INV_SQRT_2PI * LOG_WINDOW;
        (pref * v, pref * dv)
    }

    /// Coefficient `c1` of the `-c1 ln q` divergence, from a least-squares
    /// fit of the table over `q in [1e-6, 1e-4]`.
    pub fn vhat0_small_q_slope(&self) -> Result<f64> {
        let (lo, hi) = SLOPE_WINDOW;
        let n = 21;
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let q = lo * libm::pow(hi / lo, i as f64 / (n - 1) as f64);
                (-libm::log(q), self.eval_abs(q))
            })
            .collect();
        let fit = linear_fit(pts.iter().copied())?;
        let limit = 1e-3 * fit.slope.abs();
        if !(fit.slope > 0.0) || fit.rms_residual > limit {
            return Err(Error::FitFailure {
                rms: fit.rms_residual,
                limit,
            });
        }
        Ok(fit.slope)
    }

    /// `int_0^q V̂0`, finite because the divergence at 0 is logarithmic.
    pub fn vhat0_cumulative(&self, q: f64) -> Result<f64> {
        if !(q.is_finite() && q > 0.0) {
            return Err(Error::Domain {
                what: "vhat0_cumulative",
                value: q,
            });
        }
        let near = q.min(1.0);
        let mut total = self.log_panel(near)?;
        if q > 1.0 {
            total += self.inverse_panel(1.0 / q)?;
        }
        Ok(total)
    }

    /// `int_{-inf}^{inf} V̂0(xi) dxi`, split at `|xi| = 1`: log-scaled panel on
    /// `(0, 1]` for the logarithmic singularity, `xi = 1/u` on the tail.
    pub fn vhat0_integral(&self) -> Result<f64> {
        Ok(2.0 * (self.log_panel(1.0)? + self.inverse_panel(0.0)?))
    }

    /// `int_0^b V̂0` on a log-scaled rule from `b e^-60`; the piece below
    /// that is added from the asymptotic `-c1 ln q` form.
    fn log_panel(&self, b: f64) -> Result<f64> {
        let a = b * libm::exp(-60.0);
        let head = a * (self.eval_abs(a) + self.small_q_coeff);
        let body = specfun::integrate_converged(
            "vhat0 log panel",
            |n| make_log_rule(n, a, b),
            |q| self.eval_abs(q),
            64,
            panel_tolerance(),
        )?;
        Ok(head + body)
    }

    /// `int_1^{1/lo} V̂0(q) dq = int_lo^1 V̂0(1/u) / u^2 du`; the integrand
    /// tends to `c2` as `u -> 0`.
    fn inverse_panel(&self, lo: f64) -> Result<f64> {
        specfun::integrate_converged(
            "vhat0 tail panel",
            |n| make_legendre_rule(n, lo, 1.0),
            |u| self.eval_abs(1.0 / u) / (u * u),
            32,
            panel_tolerance(),
        )
    }

    /// `max q^2 V̂0(q) / (2 eB0 / sqrt(2 pi))` over 200 log-spaced
    /// `q in [1, 1e6]`; the large-`q` bound says this never exceeds 1.
    pub fn max_bound_ratio(&self) -> f64 {
        let bound = 2.0 * self.eb0 * INV_SQRT_2PI;
        (0..200)
            .map(|i| {
                let q = libm::pow(10.0, 6.0 * i as f64 / 199.0);
                q * q * self.eval_abs(q) / bound
            })
            .fold(0.0, f64::max)
    }

    /// `q^2 V̂0(q)` at the top of the table, the measured large-`q`
    /// coefficient `c2`.
    pub fn large_q_coefficient(&self) -> f64 {
        TABLE_Q_MAX * TABLE_Q_MAX * self.eval_abs(TABLE_Q_MAX)
    }
}

fn panel_tolerance() -> Tolerance {
    Tolerance {
        rel: 1e-10,
        abs: 1e-300,
        max_nodes: 4096,
    }
}

/// Largest Landau index for which the weight's factorial stays exact.
pub const MAX_LANDAU_L: u32 = 12;

/// Weight `W_l(x3)` of `1/sqrt(rho^2 + x3^2)` in the `l`-th lowest-level
/// state:
///
/// ```text
/// W_l(x3) = (eB0)^(l+1) / (2^l l!) int_0^inf rho^(2l+1) exp(-eB0 rho^2/2) / sqrt(rho^2 + x3^2) drho
/// ```
pub fn landau_weight(l: u32, x3: f64, eb0: f64) -> Result<f64> {
    if l > MAX_LANDAU_L {
        return Err(Error::Overflow {
            l,
            max: MAX_LANDAU_L,
        });
    }
    if !x3.is_finite() {
        return Err(Error::Domain {
            what: "landau_weight x3",
            value: x3,
        });
    }
    if !(eb0.is_finite() && eb0 > 0.0) {
        return Err(Error::Domain {
            what: "eB0",
            value: eb0,
        });
    }
    let a = 0.5 * eb0;
    let x2 = x3 * x3;
    let p = 2 * l as i32 + 1;
    let peak = libm::sqrt((2 * l + 1) as f64 / eb0);
    let integral = specfun::integrate_converged(
        "landau_weight",
        |n| specfun::make_semi_infinite_rule(n, peak),
        |rho| {
            if rho == 0.0 {
                return 0.0;
            }
            let g = libm::exp(-a * rho * rho);
            if g == 0.0 {
                0.0
            } else {
                libm::pow(rho, p as f64) * g / libm::sqrt(rho * rho + x2)
            }
        },
        32,
        Tolerance {
            rel: 1e-12,
            abs: 1e-300,
            max_nodes: 8192,
        },
    )?;
    let mut pref = eb0;
    for j in 1..=l {
        pref *= eb0 / (2.0 * j as f64);
    }
    Ok(pref * integral)
}

/// Transverse Landau energy `(2n + 1 - s) eB0` for spin label `s = +-1`.
pub fn landau_energy(n: u32, s: i32, eb0: f64) -> Result<f64> {
    if s != 1 && s != -1 {
        return Err(Error::InvalidArgument(format!(
            "spin label must be +1 or -1, got {s}"
        )));
    }
    Ok((2.0 * n as f64 + 1.0 - s as f64) * eb0)
}
