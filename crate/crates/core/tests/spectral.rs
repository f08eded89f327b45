use llr_validation as oracle;

use std::f64::consts::PI;
use std::sync::OnceLock;

use llr_core::eigen::SymMatrix;
use llr_core::potential::{FieldConfig, PotentialEvaluator};
use llr_core::spectral::*;
use llr_core::variational::{optimize_zeff, DEFAULT_BRACKET};
use llr_core::{gamma_from_z, INV_SQRT_2PI};
use proptest::prelude::*;

fn ev2() -> &'static PotentialEvaluator {
    static EV: OnceLock<PotentialEvaluator> = OnceLock::new();
    EV.get_or_init(|| PotentialEvaluator::new(2.0).unwrap())
}

fn cfg(gamma: f64, mass: f64) -> FieldConfig {
    FieldConfig::new(2.0, gamma, mass).unwrap()
}

fn assemble(n: usize, c: &FieldConfig) -> (MomentumGrid, Hamiltonian) {
    let g = build_grid(n, default_map_scale(c)).unwrap();
    let h = assemble_hamiltonian(&g, c, ev2()).unwrap();
    (g, h)
}

fn converged(c: &FieldConfig) -> SpectralResult {
    solve_converged(c, ev2(), &SolveOptions::default()).unwrap()
}

/// `A(k)A(k') + B(k)B(k')` written out from the definitions.
fn coupling_reference(k: f64, kp: f64, m: f64) -> f64 {
    let e = (k * k + m * m).sqrt();
    let ep = (kp * kp + m * m).sqrt();
    let a = ((e + m) / (2.0 * e)).sqrt();
    let ap = ((ep + m) / (2.0 * ep)).sqrt();
    a * ap * (1.0 + k * kp / ((e + m) * (ep + m)))
}

#[test]
fn grid_examples() {
    let g = build_grid(8, 2.0).unwrap();
    assert_eq!(g.len(), 8);
    assert_eq!(g.nodes()[0], -g.nodes()[7]);
    let gauss = build_grid(200, 2.0).unwrap().integrate(|k| (-k * k).exp());
    assert!((gauss - PI.sqrt()).abs() < 1e-8, "{gauss}");
    let lorentz = build_grid(400, 2.0).unwrap().integrate(|k| 1.0 / (1.0 + k * k));
    assert!((lorentz - PI).abs() < 1e-6, "{lorentz}");
    assert!(build_grid(7, 2.0).is_err());
    assert!(build_grid(4, 2.0).is_err());
}

#[test]
fn free_hamiltonian_is_the_kinetic_diagonal() {
    let c = cfg(0.0, 0.3);
    let (g, h) = assemble(32, &c);
    for i in 0..32 {
        for j in 0..32 {
            let k = g.nodes()[i];
            let expect = if i == j { k * k / ((k * k + 0.09).sqrt() + 0.3) } else { 0.0 };
            assert!((h.matrix.get(i, j) - expect).abs() <= 1e-15 * expect.abs());
        }
    }
}

#[test]
fn massless_sectors_decouple() {
    let (g, h) = assemble(64, &cfg(0.4, 0.0));
    for i in 0..64 {
        for j in 0..64 {
            if g.nodes()[i] * g.nodes()[j] < 0.0 {
                assert_eq!(h.matrix.get(i, j), 0.0);
            }
        }
    }
}

#[test]
fn off_diagonal_entries_follow_the_kernel() {
    let c = cfg(0.35, 0.7);
    let (g, h) = assemble(24, &c);
    let (k, w) = (g.nodes(), g.weights());
    for i in 0..24 {
        for j in 0..24 {
            if i == j {
                continue;
            }
            let expect = -0.35 * INV_SQRT_2PI
                * (w[i] * w[j]).sqrt()
                * oracle::vhat0_exact(k[i] - k[j], 2.0)
                * coupling_reference(k[i], k[j], 0.7);
            let got = h.matrix.get(i, j);
            assert!((got - expect).abs() <= 1e-8 * expect.abs(), "({i},{j}) {got} vs {expect}");
        }
    }
}

#[test]
fn assembled_matrix_is_symmetric() {
    let (_, h) = assemble(64, &cfg(0.5, 0.2));
    assert!(h.matrix.max_asymmetry() < 1e-13);
}

#[test]
fn mismatched_inputs_are_rejected() {
    let g = build_grid(16, 2.0).unwrap();
    let ev8 = PotentialEvaluator::new(8.0).unwrap();
    assert!(assemble_hamiltonian(&g, &cfg(0.3, 0.0), &ev8).is_err());
    let h = assemble_hamiltonian(&g, &cfg(0.3, 0.0), ev2()).unwrap();
    let other = build_grid(32, 2.0).unwrap();
    assert!(ground_state(&h, &other).is_err());
}

/// The subtracted diagonal against panel quadrature of the log kernel on the
/// same 16-point grid.
#[test]
fn diagonal_matches_panel_quadrature() {
    let c = cfg(0.4, 0.0);
    let (g, h) = assemble(16, &c);
    let (k, w) = (g.nodes(), g.weights());
    let pref = 0.4 * INV_SQRT_2PI;
    for i in 0..16 {
        let full = oracle::panel_row_integral(k[i], k, 2.0);
        let off: f64 = (0..16)
            .filter(|&j| j != i)
            .map(|j| oracle::vhat0_exact(k[i] - k[j], 2.0) * w[j])
            .sum();
        let oracle = full - off;
        let got = (h.kinetic[i] - h.matrix.get(i, i)) / pref;
        assert!(((got - oracle) / oracle).abs() < 1e-6, "node {i}: {got} vs {oracle}");
    }
}

/// The discretised potential applied to a smooth function converges to the
/// panel-quadrature value of the integral.
#[test]
fn subtracted_rule_converges_on_smooth_functions() {
    let m = 0.5;
    let gamma = 0.4;
    let c = cfg(gamma, m);
    let f = |k: f64| (-k * k).exp();
    let probe = [0.3, 1.7];
    let mut errors = Vec::new();
    for n in [128, 512] {
        let (g, h) = assemble(n, &c);
        let pot = h.potential_part();
        let (k, w) = (g.nodes(), g.weights());
        let u: Vec<f64> = (0..n).map(|j| w[j].sqrt() * f(k[j])).collect();
        let hu = pot.mul_vec(&u);
        let mut worst: f64 = 0.0;
        for &p in &probe {
            let i = (0..n).min_by(|&a, &b| (k[a] - p).abs().partial_cmp(&(k[b] - p).abs()).unwrap()).unwrap();
            let p = k[i];
            let mut nodes: Vec<f64> = (0..=400).map(|t| -12.0 + 24.0 * t as f64 / 400.0).collect();
            nodes.push(p);
            nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
            nodes.dedup();
            let integrand = |x: f64| {
                oracle::vhat0_exact(p - x, 2.0) * coupling_reference(p, x, m) * f(x)
            };
            let mut exact = 0.0;
            for win in nodes.windows(2) {
                let (a, b) = (win[0], win[1]);
                exact += if a == p {
                    oracle::graded_panel(a, b, integrand)
                } else if b == p {
                    oracle::graded_panel(-b, -a, |s| integrand(-s))
                } else {
                    oracle::legendre01(24).iter().map(|&(t, wt)| wt * (b - a) * integrand(a + (b - a) * t)).sum()
                };
            }
            let exact = -gamma * INV_SQRT_2PI * exact;
            let got = hu[i] / w[i].sqrt();
            worst = worst.max(((got - exact) / exact).abs());
        }
        errors.push(worst);
    }
    assert!(errors[1] < 1e-6, "{errors:?}");
    assert!(errors[0] / errors[1] > 30.0, "{errors:?}");
}

#[test]
fn ground_state_matches_jacobi() {
    for (n, gamma, m) in [(16, 0.4, 0.0), (32, 0.4, 0.0), (16, 0.3, 0.8), (32, 0.6, 0.05)] {
        let (g, h) = assemble(n, &cfg(gamma, m));
        let res = ground_state(&h, &g).unwrap();
        let (vals, _) = oracle::jacobi_eigen(h.matrix.as_slice(), n);
        assert!((res.energy - vals[0]).abs() < 1e-12, "n={n}: {} vs {}", res.energy, vals[0]);
    }
}

#[test]
fn ground_state_without_mirror_symmetry() {
    let (g, h) = assemble(16, &cfg(0.4, 0.2));
    let mut m = h.matrix.clone();
    m.set_sym(2, 9, m.get(2, 9) + 0.01);
    m.set(3, 3, m.get(3, 3) - 0.05);
    let skew = Hamiltonian {
        matrix: m.clone(),
        kinetic: h.kinetic.clone(),
    };
    let res = ground_state(&skew, &g).unwrap();
    let (vals, _) = oracle::jacobi_eigen(m.as_slice(), 16);
    assert!((res.energy - vals[0]).abs() < 1e-12);
}

#[test]
fn non_finite_matrix_is_an_error() {
    let g = build_grid(8, 2.0).unwrap();
    let mut m = SymMatrix::zeros(8);
    m.set(0, 0, f64::NAN);
    let h = Hamiltonian {
        matrix: m,
        kinetic: vec![0.0; 8],
    };
    assert!(ground_state(&h, &g).is_err());
}

#[test]
fn free_massless_energy_is_the_smallest_node() {
    let mut last = f64::INFINITY;
    for n in [16, 64, 256] {
        let (g, h) = assemble(n, &cfg(0.0, 0.0));
        let res = ground_state(&h, &g).unwrap();
        let kmin = g.nodes().iter().fold(f64::INFINITY, |a, k| a.min(k.abs()));
        assert!((res.energy - kmin).abs() < 1e-15);
        assert!(res.energy > 0.0 && res.energy < last);
        last = res.energy;
    }
    assert!(last < 1e-3);
}

#[test]
fn bound_state_at_z40() {
    let c = FieldConfig::from_charge(40.0, 2.0, 0.0).unwrap();
    let (g, h) = assemble(256, &c);
    let res = ground_state(&h, &g).unwrap();
    assert!(res.energy < 0.0);
}

#[test]
fn converged_solve_at_gamma_04() {
    let res = converged(&cfg(0.4, 0.0));
    assert!(res.converged);
    assert!(res.grid_size <= 2048);
    assert!((res.energy - (-0.043_062_5)).abs() < 2e-6, "{}", res.energy);
    assert!(res.residual <= 1e-8 * res.energy.abs().max(1.0));
    assert!((res.norm() - 1.0).abs() < 1e-10);
    assert!(res.potential_expectation <= 0.0 && res.kinetic_expectation >= 0.0);
}

#[test]
fn energy_decreases_with_coupling() {
    assert!(converged(&cfg(0.3, 0.0)).energy > converged(&cfg(0.5, 0.0)).energy);
    let ladder: Vec<f64> = (1..=6).map(|i| converged(&cfg(0.1 * i as f64, 0.0)).energy).collect();
    assert!(ladder.windows(2).all(|p| p[1] <= p[0]), "{ladder:?}");
}

#[test]
fn energy_decreases_with_small_mass() {
    let z40 = gamma_from_z(40.0);
    assert!(converged(&cfg(z40, 0.05)).energy < converged(&cfg(z40, 0.0)).energy);
}

#[test]
fn massless_eigenvector_is_sign_symmetric() {
    let res = converged(&cfg(gamma_from_z(40.0), 0.0));
    let n = res.grid.len();
    for i in 0..n {
        assert_eq!(res.eigenvector[i], res.eigenvector[res.grid.mirror(i)]);
    }
}

#[test]
fn eigenfunction_report_at_z40() {
    let c = cfg(gamma_from_z(40.0), 0.0);
    let res = converged(&c);
    let report = eigenfunction_checks(&res, &res.grid);
    assert!(report.tail_bounded);
    assert!(report.tail_coefficient.is_finite() && report.tail_coefficient > 0.0);
    assert!((report.norm - 1.0).abs() < 1e-10);
    let doubled = solve_on_grid(2 * res.grid_size, res.grid.map_scale(), &c, ev2(), 1e-6).unwrap();
    let again = eigenfunction_checks(&doubled, &doubled.grid);
    let ratio = again.max_abs / report.max_abs;
    assert!(ratio > 0.5 && ratio < 2.0, "{ratio}");
}

#[test]
fn form_bound_examples() {
    assert!(form_bound_check(&converged(&cfg(0.0, 0.0)), &cfg(0.0, 0.0)));
    for (z, m) in [(40.0, 0.0), (87.0, 1.0)] {
        let c = FieldConfig::from_charge(z, 2.0, m).unwrap();
        let res = converged(&c);
        assert!(res.converged);
        assert!(form_bound_check(&res, &c), "Z = {z}");
    }
}

#[test]
fn spectral_energy_lies_below_the_trial_bound() {
    for (z, m) in [(40.0, 0.0), (40.0, 0.3), (60.0, 1.0)] {
        let c = FieldConfig::from_charge(z, 2.0, m).unwrap();
        let spectral = converged(&c).energy;
        let (_, trial) = optimize_zeff(&c, ev2(), DEFAULT_BRACKET).unwrap();
        assert!(spectral <= trial + 1e-6, "Z = {z}: {spectral} vs {trial}");
    }
}

#[test]
fn grid_cap_reports_non_convergence() {
    let opts = SolveOptions {
        tol: 1e-14,
        n0: 32,
        n_max: 128,
        ..SolveOptions::default()
    };
    let res = solve_converged(&cfg(0.4, 0.0), ev2(), &opts).unwrap();
    assert!(!res.converged);
    assert_eq!(res.grid_size, 128);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn grids_are_symmetric(half in 4usize..300, scale in 0.05f64..50.0) {
        let g = build_grid(2 * half, scale).unwrap();
        let n = g.len();
        prop_assert!(g.nodes().windows(2).all(|p| p[1] > p[0]));
        for i in 0..n {
            prop_assert_eq!(g.nodes()[i], -g.nodes()[n - 1 - i]);
            prop_assert_eq!(g.weights()[i], g.weights()[n - 1 - i]);
            prop_assert!(g.weights()[i] > 0.0 && g.nodes()[i] != 0.0);
        }
    }

    #[test]
    fn small_solves_are_consistent(gamma in 0.0f64..0.63, m in 0.0f64..2.0) {
        let c = cfg(gamma, m);
        let (g, h) = assemble(48, &c);
        prop_assert!(h.matrix.max_asymmetry() < 1e-13);
        let res = ground_state(&h, &g).unwrap();
        prop_assert!(res.residual <= 1e-8 * res.energy.abs().max(1.0));
        prop_assert!((res.norm() - 1.0).abs() < 1e-10);
        prop_assert!(res.kinetic_expectation >= 0.0);
        prop_assert!(res.potential_expectation <= 0.0);
        prop_assert!(form_bound_check(&res, &c));
    }
}
