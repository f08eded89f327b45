//! Trial-state energy bound for the lowest-Landau-level operator.
//!
//! The trial function is `exp(-Z_eff sqrt(x3^2 + 1/eB0))` along the field,
//! whose unitary Fourier transform is proportional to
//! `K1(sqrt(Z_eff^2 + k^2)/sqrt(eB0)) / sqrt(Z_eff^2 + k^2)`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::eigen::dot;
use crate::kinematics::{coupling, dirac_weight, spin_weight};
use crate::potential::{FieldConfig, PotentialEvaluator};
use crate::specfun::{integrate_converged, make_log_rule, Tolerance};
use crate::spectral::{build_grid, MomentumGrid};
use crate::INV_SQRT_2PI;

/// Smallest grid for the potential double integral.
const FORM_N0: usize = 256;
/// Largest grid for the potential double integral.
const FORM_N_MAX: usize = 4096;
/// Relative agreement of successive grids that ends the refinement.
const FORM_REL_TOL: f64 = 1e-7;

/// Default `Z_eff` search bracket.
pub const DEFAULT_BRACKET: (f64, f64) = (0.01, 50.0);
/// Absolute `Z_eff` tolerance of [`optimize_zeff`].
pub const ZEFF_TOL: f64 = 1e-4;

/// Normalised momentum-space trial function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialState {
    z_eff: f64,
    eb0: f64,
    norm_const: f64,
}

impl TrialState {
    pub fn z_eff(&self) -> f64 {
        self.z_eff
    }

    pub fn eb0(&self) -> f64 {
        self.eb0
    }

    pub fn norm_const(&self) -> f64 {
        self.norm_const
    }

    /// `φ_t(k)`.
    pub fn amplitude(&self, k: f64) -> f64 {
        self.norm_const * shape(self.z_eff, self.eb0, k)
    }

    /// `∫ g(k) φ_t(k)^2 dk` for even `g`.
    pub fn expectation<G: Fn(f64) -> f64>(&self, what: &'static str, g: G) -> Result<f64> {
        let n2 = self.norm_const * self.norm_const;
        Ok(n2 * even_moment(what, self.z_eff, self.eb0, g)?)
    }
}

fn shape(z_eff: f64, eb0: f64, k: f64) -> f64 {
    let r = libm::hypot(z_eff, k);
    crate::specfun::k0_k1(r / libm::sqrt(eb0)).1 / r
}

/// `2 ∫_0^∞ g(k) shape(k)^2 dk`, log-scaled in `k`.
///
/// The shape is flat below `k ~ Z_eff` and decays like `exp(-k/sqrt(eB0))`;
/// the window ends where `shape^2` has fallen by `e^-80`, and the piece below
/// the window start is added as a rectangle.
fn even_moment<G: Fn(f64) -> f64>(what: &'static str, z_eff: f64, eb0: f64, g: G) -> Result<f64> {
    let lo = 1e-10 * z_eff.min(1.0);
    let hi = z_eff + 40.0 * libm::sqrt(eb0);
    let s = |k: f64| {
        let v = shape(z_eff, eb0, k);
        g(k) * v * v
    };
    let head = lo * s(0.5 * lo);
    let body = integrate_converged(
        what,
        |n| make_log_rule(n, lo, hi),
        s,
        64,
        Tolerance {
            rel: 1e-12,
            abs: 1e-300,
            max_nodes: 8192,
        },
    )?;
    Ok(2.0 * (head + body))
}

pub fn make_trial(z_eff: f64, eb0: f64) -> Result<TrialState> {
    if !(z_eff.is_finite() && z_eff > 0.0) {
        return Err(Error::Domain {
            what: "z_eff",
            value: z_eff,
        });
    }
    if !(eb0.is_finite() && eb0 > 0.0) {
        return Err(Error::Domain {
            what: "eB0",
            value: eb0,
        });
    }
    let norm2 = even_moment("trial normalisation", z_eff, eb0, |_| 1.0)?;
    Ok(TrialState {
        z_eff,
        eb0,
        norm_const: 1.0 / libm::sqrt(norm2),
    })
}

fn check_mass(m: f64) -> Result<()> {
    if m.is_finite() && m >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "mass",
            value: m,
        })
    }
}

/// `∫ (sqrt(k^2+m^2) - m) φ_t^2 dk`.
pub fn kinetic_energy(t: &TrialState, m: f64) -> Result<f64> {
    check_mass(m)?;
    t.expectation("trial kinetic energy", |k| crate::kinematics::kinetic(k, m))
}

/// `D_t(ξ) = 2Ñ^2 ∫_0^∞ φ_t^2 k^2 / ((ξ + sqrt(k^2+ξ^2)) sqrt(k^2+ξ^2)) dk`.
pub fn dt_integral(xi: f64, t: &TrialState) -> Result<f64> {
    if !(xi.is_finite() && xi >= 0.0) {
        return Err(Error::Domain {
            what: "xi",
            value: xi,
        });
    }
    t.expectation("D_t integral", |k| {
        if xi == 0.0 {
            return 1.0;
        }
        let e = libm::hypot(k, xi);
        k / (xi + e) * (k / e)
    })
}

/// `A(k)A(k') + A(k)A(k') k k' / ((E(k)+m)(E(k')+m))`.
///
/// At `m = 0` the coupling is undefined on the axes `k = 0` or `k' = 0`.
pub fn f_coupling(k: f64, kp: f64, m: f64) -> Result<f64> {
    check_mass(m)?;
    if !(k.is_finite() && kp.is_finite()) {
        return Err(Error::Domain {
            what: "momentum",
            value: if k.is_finite() { kp } else { k },
        });
    }
    if m == 0.0 && (k == 0.0 || kp == 0.0) {
        return Err(Error::Domain {
            what: "f_coupling at m = 0 on the axes",
            value: if k == 0.0 { k } else { kp },
        });
    }
    Ok(coupling(k, kp, m))
}

/// The potential energy split by the sign of `k k'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSplit {
    /// Contribution of `k k' > 0`.
    pub same_sign: f64,
    /// Contribution of `k k' < 0`.
    pub opposite_sign: f64,
}

impl PotentialSplit {
    pub fn total(&self) -> f64 {
        self.same_sign + self.opposite_sign
    }
}

/// Quadrature for `∫∫ φ(k) V̂0(k-k') f_kk'(m) φ(k') dk dk'` on one grid.
///
/// The inner integral is split at `k' = 0`. On the half-line containing `k`
/// the diagonal singularity is subtracted,
/// `∫_0^∞ V̂0(k-k') g(k') dk' = Σ V̂0(k-k_j)(g_j - g(k)) w_j + g(k) (c_I/2 + Φ(|k|))`
/// with `Φ(q) = ∫_0^q V̂0`, using `f_kk = 1`. The opposite half-line is regular.
struct SplitForm {
    grid: MomentumGrid,
    /// `V̂0(k_i-k_j) w_j f_ij`, zero on the diagonal, row-major.
    kernel: Vec<f64>,
    /// `c_I/2 + Φ(|k_i|) - Σ_{j≠i, same sign} V̂0(k_i-k_j) w_j`.
    diagonal: Vec<f64>,
}

impl SplitForm {
    fn new(n: usize, cfg: &FieldConfig, ev: &PotentialEvaluator) -> Result<Self> {
        let grid = build_grid(n, 2.0 * libm::sqrt(cfg.eb0()))?;
        let c_half = 0.5 * ev.vhat0_integral()?;
        let m = cfg.mass();
        let k = grid.nodes();
        let w = grid.weights();
        let a: Vec<f64> = k.iter().map(|&x| dirac_weight(x, m)).collect();
        let b: Vec<f64> = k.iter().map(|&x| spin_weight(x, m)).collect();
        let half = n / 2;
        let rows: Vec<Result<(Vec<f64>, f64)>> = crate::par::map_range(n, |i| {
            let mut row = alloc::vec![0.0; n];
            let mut subtracted = 0.0;
            for j in 0..n {
                if j == i {
                    continue;
                }
                let v = ev.eval_abs(libm::fabs(k[i] - k[j])) * w[j];
                if (i < half) == (j < half) {
                    subtracted += v;
                }
                row[j] = v * (a[i] * a[j] + b[i] * b[j]);
            }
            let d = c_half + ev.vhat0_cumulative(libm::fabs(k[i]))? - subtracted;
            Ok((row, d))
        });
        let mut kernel = Vec::with_capacity(n * n);
        let mut diagonal = Vec::with_capacity(n);
        for r in rows {
            let (row, d) = r?;
            kernel.extend_from_slice(&row);
            diagonal.push(d);
        }
        Ok(Self {
            grid,
            kernel,
            diagonal,
        })
    }

    fn evaluate(&self, phi: &[f64]) -> PotentialSplit {
        let w = self.grid.weights();
        let n = w.len();
        let half = n / 2;
        let rows: Vec<(f64, f64)> = crate::par::map_range(n, |i| {
            let row = &self.kernel[i * n..(i + 1) * n];
            let (lower, upper) = (dot(&row[..half], &phi[..half]), dot(&row[half..], &phi[half..]));
            let (same, opposite) = if i < half { (lower, upper) } else { (upper, lower) };
            let scale = w[i] * phi[i];
            (scale * (phi[i] * self.diagonal[i] + same), scale * opposite)
        });
        let (same_sign, opposite_sign) = rows
            .iter()
            .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        PotentialSplit {
            same_sign,
            opposite_sign,
        }
    }
}

fn check_consistent(t: &TrialState, cfg: &FieldConfig, ev: &PotentialEvaluator) -> Result<()> {
    if t.eb0() != cfg.eb0() || ev.eb0() != cfg.eb0() {
        return Err(Error::InvalidArgument(format!(
            "inconsistent eB0: trial {}, config {}, evaluator {}",
            t.eb0(),
            cfg.eb0(),
            ev.eb0()
        )));
    }
    Ok(())
}

/// Trial-energy evaluator for one configuration.
///
/// The quadrature of the potential double integral is refined from
/// `FORM_N0` nodes until successive grids agree; the kernels of the grids
/// visited are kept, so repeated evaluations (as in [`optimize_zeff`]) only
/// pay for the matrix-vector products.
pub struct TrialEnergy<'a> {
    cfg: FieldConfig,
    ev: &'a PotentialEvaluator,
    forms: Vec<SplitForm>,
}

impl<'a> TrialEnergy<'a> {
    pub fn new(cfg: &FieldConfig, ev: &'a PotentialEvaluator) -> Result<Self> {
        if ev.eb0() != cfg.eb0() {
            return Err(Error::InvalidArgument(format!(
                "potential evaluator built for eB0 = {} but config has eB0 = {}",
                ev.eb0(),
                cfg.eb0()
            )));
        }
        Ok(Self {
            cfg: *cfg,
            ev,
            forms: Vec::new(),
        })
    }

    pub fn config(&self) -> &FieldConfig {
        &self.cfg
    }

    fn form(&mut self, level: usize) -> Result<&SplitForm> {
        while self.forms.len() <= level {
            let n = FORM_N0 << self.forms.len();
            self.forms.push(SplitForm::new(n, &self.cfg, self.ev)?);
        }
        Ok(&self.forms[level])
    }

    /// `F_+(m)` and `F_-(m)`, each including the factor `-γ/sqrt(2π)`.
    pub fn potential_split(&mut self, t: &TrialState) -> Result<PotentialSplit> {
        check_consistent(t, &self.cfg, self.ev)?;
        let pref = -self.cfg.gamma() * INV_SQRT_2PI;
        if pref == 0.0 {
            return Ok(PotentialSplit {
                same_sign: 0.0,
                opposite_sign: 0.0,
            });
        }
        // Successive grids converge at third order; each pair of levels is
        // Richardson-extrapolated and refinement stops when two
        // extrapolations agree.
        let richardson = |fine: f64, coarse: f64| fine + (fine - coarse) / 7.0;
        let mut raw: Option<PotentialSplit> = None;
        let mut prev: Option<PotentialSplit> = None;
        let mut change = f64::INFINITY;
        let mut level = 0;
        while FORM_N0 << level <= FORM_N_MAX {
            let form = self.form(level)?;
            let phi: Vec<f64> = form.grid.nodes().iter().map(|&k| t.amplitude(k)).collect();
            let fine = form.evaluate(&phi);
            if let Some(coarse) = raw {
                let next = PotentialSplit {
                    same_sign: pref * richardson(fine.same_sign, coarse.same_sign),
                    opposite_sign: pref * richardson(fine.opposite_sign, coarse.opposite_sign),
                };
                if let Some(p) = prev {
                    let scale = next.same_sign.abs() + next.opposite_sign.abs();
                    change = (next.same_sign - p.same_sign).abs()
                        + (next.opposite_sign - p.opposite_sign).abs();
                    if change <= FORM_REL_TOL * scale {
                        return Ok(next);
                    }
                    change /= scale;
                }
                prev = Some(next);
            }
            raw = Some(fine);
            level += 1;
        }
        Err(Error::Quadrature {
            what: "trial potential energy",
            change,
        })
    }

    pub fn parts(&mut self, t: &TrialState) -> Result<EnergyParts> {
        let kinetic = kinetic_energy(t, self.cfg.mass())?;
        let potential = self.potential_split(t)?.total();
        Ok(EnergyParts { kinetic, potential })
    }

    pub fn total(&mut self, t: &TrialState) -> Result<f64> {
        Ok(self.parts(t)?.total())
    }
}

/// `F_+(m)` and `F_-(m)`, each including the factor `-γ/sqrt(2π)`.
pub fn potential_split(
    t: &TrialState,
    cfg: &FieldConfig,
    ev: &PotentialEvaluator,
) -> Result<PotentialSplit> {
    check_consistent(t, cfg, ev)?;
    TrialEnergy::new(cfg, ev)?.potential_split(t)
}

/// `-γ/sqrt(2π) ∫∫ φ_t(k) V̂0(k-k') f_kk'(m) φ_t(k') dk dk'`.
pub fn potential_energy(t: &TrialState, cfg: &FieldConfig, ev: &PotentialEvaluator) -> Result<f64> {
    Ok(potential_split(t, cfg, ev)?.total())
}

/// Kinetic and potential parts of the trial energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParts {
    pub kinetic: f64,
    pub potential: f64,
}

impl EnergyParts {
    pub fn total(&self) -> f64 {
        self.kinetic + self.potential
    }
}

pub fn energy_parts(t: &TrialState, cfg: &FieldConfig, ev: &PotentialEvaluator) -> Result<EnergyParts> {
    check_consistent(t, cfg, ev)?;
    TrialEnergy::new(cfg, ev)?.parts(t)
}

/// Rest-mass-subtracted trial energy.
pub fn total_energy(t: &TrialState, cfg: &FieldConfig, ev: &PotentialEvaluator) -> Result<f64> {
    Ok(energy_parts(t, cfg, ev)?.total())
}

/// Golden-section minimisation of the trial energy over `Z_eff` in
/// `bracket`, to [`ZEFF_TOL`].
pub fn optimize_zeff(
    cfg: &FieldConfig,
    ev: &PotentialEvaluator,
    bracket: (f64, f64),
) -> Result<(f64, f64)> {
    let (lo, hi) = bracket;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "bracket must satisfy 0 < lo < hi, got ({lo}, {hi})"
        )));
    }
    let mut evaluator = TrialEnergy::new(cfg, ev)?;
    let mut energy = |z: f64| -> Result<f64> { evaluator.total(&make_trial(z, cfg.eb0())?) };
    let inv_phi = 0.5 * (libm::sqrt(5.0) - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = energy(c)?;
    let mut fd = energy(d)?;
    while b - a > ZEFF_TOL {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = energy(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = energy(d)?;
        }
    }
    let (z, e) = if fc <= fd { (c, fc) } else { (d, fd) };
    if z - lo <= 2.0 * ZEFF_TOL || hi - z <= 2.0 * ZEFF_TOL {
        return Err(Error::BracketFailure {
            z_eff: z,
            energy: e,
            lo,
            hi,
        });
    }
    Ok((z, e))
}

/// One row of a mass scan at fixed trial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassScanRow {
    pub mass: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub total: f64,
}

/// Trial energy parts at each mass, trial state held fixed.
pub fn mass_scan(
    t: &TrialState,
    cfg: &FieldConfig,
    ev: &PotentialEvaluator,
    masses: &[f64],
) -> Result<Vec<MassScanRow>> {
    masses
        .iter()
        .map(|&m| {
            let parts = energy_parts(t, &cfg.with_mass(m)?, ev)?;
            Ok(MassScanRow {
                mass: m,
                kinetic: parts.kinetic,
                potential: parts.potential,
                total: parts.total(),
            })
        })
        .collect()
}

/// Largest scanned mass whose energy lies below the `m = 0` row, or `None`
/// if the scan has no `m = 0` row or no such mass.
pub fn observed_mass_window(rows: &[MassScanRow]) -> Option<f64> {
    let base = rows.iter().find(|r| r.mass == 0.0)?.total;
    rows.iter()
        .filter(|r| r.mass > 0.0 && r.total < base)
        .map(|r| r.mass)
        .fold(None, |acc: Option<f64>, m| Some(acc.map_or(m, |a| a.max(m))))
}
