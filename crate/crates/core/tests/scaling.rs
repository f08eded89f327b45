use std::sync::OnceLock;

use llr_core::potential::{FieldConfig, PotentialEvaluator};
use llr_core::scaling::*;
use llr_core::spectral::{solve_converged, SolveOptions};
use llr_core::{gamma_from_z, Error};
use proptest::prelude::*;

fn ev2() -> &'static PotentialEvaluator {
    static EV: OnceLock<PotentialEvaluator> = OnceLock::new();
    EV.get_or_init(|| PotentialEvaluator::new(2.0).unwrap())
}

fn synthetic(b: &[f64], e: impl Fn(f64) -> f64) -> Vec<SweepRecord> {
    b.iter()
        .map(|&b| SweepRecord {
            b,
            mu0: b,
            m_tilde: 0.0,
            energy_scaled: e(b) / b.sqrt(),
            energy_physical: e(b),
            converged: true,
        })
        .collect()
}

#[test]
fn fit_recovers_square_root_law() {
    let fit = fit_powerlaw(&synthetic(&[1e2, 1e3, 1e4], |b| -3.0 * b.sqrt())).unwrap();
    assert!((fit.exponent - 0.5).abs() < 1e-12);
    assert!((fit.coefficient - 3.0).abs() < 1e-11);
    assert!(fit.rms_residual < 1e-12);
    assert_eq!((fit.n_points, fit.excluded), (3, 0));
}

#[test]
fn fit_recovers_linear_law() {
    let fit = fit_powerlaw(&synthetic(&[1.0, 5.0, 30.0], |b| -2.0 * b)).unwrap();
    assert!((fit.exponent - 1.0).abs() < 1e-12);
    assert!((fit.coefficient - 2.0).abs() < 1e-12);
}

#[test]
fn fit_rejects_short_input() {
    let recs = synthetic(&[1.0, 2.0], |b| -b);
    assert!(matches!(fit_powerlaw(&recs), Err(Error::InsufficientData { have: 2, need: 3 })));
}

#[test]
fn scale_down_examples() {
    assert_eq!(scale_down(2.0, 2.0, 1.0).unwrap(), (1.0, 1.0));
    let (mu0, mt) = scale_down(1e4, 1.0, 1.0).unwrap();
    assert_eq!(mu0, 1e4);
    assert!((mt - 0.01).abs() < 1e-14);
    assert_eq!(scale_down(1e6, 1.0, 0.0).unwrap().1, 0.0);
    assert!(scale_down(-1.0, 1.0, 1.0).is_err());
    assert!(scale_down(1.0, 0.0, 1.0).is_err());
    assert!(scale_down(1.0, 1.0, -1.0).is_err());
}

#[test]
fn unit_field_reproduces_the_unscaled_solve() {
    let base = FieldConfig::from_charge(40.0, 2.0, 1.0).unwrap();
    let opts = SolveOptions::default();
    let rec = sweep(&[1.0], 1.0, 1.0, &base, ev2(), &opts).unwrap();
    let direct = solve_converged(&base, ev2(), &opts).unwrap();
    assert_eq!(rec[0].energy_scaled, direct.energy);
    assert_eq!(rec[0].energy_physical, direct.energy);
    assert_eq!(rec[0].m_tilde, 1.0);
}

/// The physical problem at `eB = 4 eB0` with mass `m` against the scaled
/// problem at `eB0` with mass `m / 2`, times 2.
#[test]
fn scaling_identity_at_four_b0() {
    let opts = SolveOptions::default();
    let gamma = gamma_from_z(40.0);
    let ev8 = PotentialEvaluator::new(8.0).unwrap();
    for m in [0.0, 0.6, 2.0] {
        let physical = solve_converged(&FieldConfig::new(8.0, gamma, m).unwrap(), &ev8, &opts).unwrap();
        let base = FieldConfig::new(2.0, gamma, 0.0).unwrap();
        let rec = sweep(&[4.0], 1.0, m, &base, ev2(), &opts).unwrap()[0];
        assert_eq!(rec.m_tilde, m / 2.0);
        let tol = 4.0 * opts.tol * physical.energy.abs().max(1.0);
        assert!((rec.energy_physical - physical.energy).abs() < tol, "m = {m}: {} vs {}", rec.energy_physical, physical.energy);
    }
}

#[test]
fn sweep_records_are_consistent() {
    let base = FieldConfig::from_charge(40.0, 2.0, 0.0).unwrap();
    let b = [1e2, 1e3, 1e4];
    let recs = sweep(&b, 1.0, 1.0, &base, ev2(), &SolveOptions::default()).unwrap();
    assert_eq!(recs.len(), 3);
    for (r, &bb) in recs.iter().zip(&b) {
        assert_eq!(r.b, bb);
        assert_eq!(r.mu0, bb);
        assert!((r.m_tilde - 1.0 / bb.sqrt()).abs() < 1e-14);
        assert_eq!(r.energy_physical, r.mu0.sqrt() * r.energy_scaled);
        assert!(r.converged);
    }
    assert!(recs.windows(2).all(|p| p[1].energy_physical < p[0].energy_physical));
    let d1 = (recs[1].energy_scaled - recs[0].energy_scaled).abs();
    let d2 = (recs[2].energy_scaled - recs[1].energy_scaled).abs();
    assert!(d2 < d1);
}

#[test]
fn continuity_scan_shape() {
    let base = FieldConfig::from_charge(40.0, 2.0, 0.0).unwrap();
    let rows = mass_continuity_scan(&base, &[0.3, 0.1, 0.03, 0.01, 0.0], ev2(), &SolveOptions::default()).unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[4].deviation, 0.0);
    assert!(rows.windows(2).all(|p| p[1].deviation < p[0].deviation));
    // Measured once at the default tolerance: 0.1145 at m̃ = 0.3, 0.0200 at m̃ = 0.01.
    let reduction = rows[0].deviation / rows[3].deviation;
    assert!((reduction - 5.72).abs() < 0.05, "{reduction}");
}

#[test]
fn window_selection() {
    let recs = synthetic(&[1e2, 1e3, 1e4, 1e5, 1e6], |b| -b.sqrt());
    assert_eq!(fit_window(&recs, None).len(), 4);
    assert_eq!(fit_window(&recs, Some(1.0)).len(), 5);
    assert_eq!(fit_window(&recs, Some(2e5)).len(), 1);
}

proptest! {
    #[test]
    fn fit_is_relabeling_invariant(
        c in 0.01f64..100.0,
        e in -2.0f64..2.0,
        kappa in 1e-3f64..1e3,
        b0 in 0.1f64..10.0,
    ) {
        let b: Vec<f64> = (0..4).map(|i| b0 * 10f64.powi(i)).collect();
        let a = fit_powerlaw(&synthetic(&b, |b| -c * b.powf(e))).unwrap();
        let kb: Vec<f64> = b.iter().map(|x| kappa * x).collect();
        let k = fit_powerlaw(&synthetic(&kb, |x| -c * (x / kappa).powf(e))).unwrap();
        prop_assert!((a.exponent - k.exponent).abs() < 1e-9);
        prop_assert!(((k.coefficient / a.coefficient) / kappa.powf(-e) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn scale_down_inverts(b in 1e-3f64..1e8, b0 in 1e-2f64..1e2, m in 0.0f64..10.0) {
        let (mu0, mt) = scale_down(b, b0, m).unwrap();
        prop_assert_eq!(mu0, b / b0);
        prop_assert!((mt * mu0.sqrt() - m).abs() <= 1e-14 * m.max(1.0));
    }
}
