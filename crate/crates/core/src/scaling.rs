//! Field scaling `B = μ0 B0`, `m̃ = m / sqrt(μ0)`, under which
//! `E_g(B, m) = sqrt(μ0) Ẽ_g(m̃)` with `γ` and `eB0` unchanged.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::potential::{FieldConfig, PotentialEvaluator};
use crate::spectral::{solve_converged, SolveOptions};
use crate::stats::linear_fit;

/// One point of a field sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    /// Physical field in units where `B0` is the reference field.
    pub b: f64,
    /// `B / B0`.
    pub mu0: f64,
    /// `m / sqrt(μ0)`.
    pub m_tilde: f64,
    /// `Ẽ_g(m̃)`, rest mass subtracted.
    pub energy_scaled: f64,
    /// `sqrt(μ0) Ẽ_g(m̃)`.
    pub energy_physical: f64,
    pub converged: bool,
}

/// `E_g ≈ -coefficient * B^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub coefficient: f64,
    pub exponent: f64,
    /// RMS residual of `ln(-E_g)`.
    pub rms_residual: f64,
    pub n_points: usize,
    /// Records left out because their energy was not negative.
    pub excluded: usize,
}

/// `(μ0, m̃)` for a physical field `b` and mass `m`.
pub fn scale_down(b: f64, b0: f64, m: f64) -> Result<(f64, f64)> {
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::Domain {
            what: "field B",
            value: b,
        });
    }
    if !(b0.is_finite() && b0 > 0.0) {
        return Err(Error::Domain {
            what: "reference field B0",
            value: b0,
        });
    }
    if !(m.is_finite() && m >= 0.0) {
        return Err(Error::Domain {
            what: "mass",
            value: m,
        });
    }
    let mu0 = b / b0;
    Ok((mu0, m / libm::sqrt(mu0)))
}

/// Solves the scaled problem for each field in `b_values`.
///
/// `cfg_base` supplies `γ` and `eB0`; its mass is replaced by `m̃`. Rows are
/// returned in input order. A row that fails to converge within the grid
/// limit is kept with `converged = false`.
pub fn sweep(
    b_values: &[f64],
    b0: f64,
    m: f64,
    cfg_base: &FieldConfig,
    ev: &PotentialEvaluator,
    opts: &SolveOptions,
) -> Result<Vec<SweepRecord>> {
    if b_values.is_empty() {
        return Err(Error::InvalidArgument("sweep needs at least one field value".into()));
    }
    if b_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("sweep fields must be increasing".into()));
    }
    let scaled = b_values
        .iter()
        .map(|&b| scale_down(b, b0, m))
        .collect::<Result<Vec<_>>>()?;
    let rows = crate::par::map_range(b_values.len(), |i| {
        let (mu0, m_tilde) = scaled[i];
        let cfg = cfg_base.with_mass(m_tilde)?;
        let res = solve_converged(&cfg, ev, opts)?;
        Ok(SweepRecord {
            b: b_values[i],
            mu0,
            m_tilde,
            energy_scaled: res.energy,
            energy_physical: libm::sqrt(mu0) * res.energy,
            converged: res.converged,
        })
    });
    rows.into_iter().collect()
}

/// Records inside the fit window: `B >= min_b` when given, otherwise the
/// largest three decades of the sweep, `B >= B_max / 1000`.
pub fn fit_window(records: &[SweepRecord], min_b: Option<f64>) -> Vec<SweepRecord> {
    let b_max = records.iter().map(|r| r.b).fold(f64::NEG_INFINITY, f64::max);
    let cut = min_b.unwrap_or(b_max * 1e-3);
    records.iter().copied().filter(|r| r.b >= cut).collect()
}

/// Least-squares line through `(ln B, ln(-E_g))` over the records with
/// negative physical energy.
pub fn fit_powerlaw(records: &[SweepRecord]) -> Result<PowerLawFit> {
    let usable: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.energy_physical < 0.0)
        .map(|r| (libm::log(r.b), libm::log(-r.energy_physical)))
        .collect();
    if usable.len() < 3 {
        return Err(Error::InsufficientData {
            have: usable.len(),
            need: 3,
        });
    }
    let fit = linear_fit(usable.iter().copied())?;
    Ok(PowerLawFit {
        coefficient: libm::exp(fit.intercept),
        exponent: fit.slope,
        rms_residual: fit.rms_residual,
        n_points: fit.n_points,
        excluded: records.len() - usable.len(),
    })
}

/// One row of [`mass_continuity_scan`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuityRow {
    pub m_tilde: f64,
    pub energy: f64,
    /// `|Ẽ_g(m̃) - Ẽ_g(0)|`.
    pub deviation: f64,
    pub converged: bool,
}

/// Ground energies along a decreasing sequence of scaled masses ending at 0.
pub fn mass_continuity_scan(
    cfg_base: &FieldConfig,
    m_tilde_values: &[f64],
    ev: &PotentialEvaluator,
    opts: &SolveOptions,
) -> Result<Vec<ContinuityRow>> {
    if m_tilde_values.last() != Some(&0.0) {
        return Err(Error::InvalidArgument(
            "mass scan must end with m = 0".into(),
        ));
    }
    if m_tilde_values.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument(format!(
            "mass scan values must decrease, got {m_tilde_values:?}"
        )));
    }
    let solved = crate::par::map_range(m_tilde_values.len(), |i| {
        let cfg = cfg_base.with_mass(m_tilde_values[i])?;
        solve_converged(&cfg, ev, opts)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let base = solved[solved.len() - 1].energy;
    Ok(m_tilde_values
        .iter()
        .zip(&solved)
        .map(|(&m, r)| ContinuityRow {
            m_tilde: m,
            energy: r.energy,
            deviation: libm::fabs(r.energy - base),
            converged: r.converged,
        })
        .collect())
}
