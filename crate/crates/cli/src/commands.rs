//! Subcommand bodies. Each returns the tabular and structured forms of its
//! result plus an exit status; writing is left to the caller.

use llr_core::potential::{landau_weight, PotentialEvaluator};
use llr_core::scaling::{fit_powerlaw, fit_window, sweep};
use llr_core::spectral::{eigenfunction_checks, form_bound_check, solve_converged, SolveOptions};
use llr_core::variational::{
    dt_integral, energy_parts, f_coupling, make_trial, mass_scan, observed_mass_window, optimize_zeff,
    TrialEnergy,
};
use llr_core::{coupling, Error, INV_SQRT_2PI};
use serde_json::{json, Value};

use crate::config::{Command, RunConfig};
use crate::exit::{Failure, INVARIANT, NUMERICAL};
use crate::output::{Cell, Table};

pub struct Report {
    pub table: Table,
    pub json: Value,
    /// Extra JSON printed beside a CSV result (the sweep fit summary).
    pub summary: Option<Value>,
    pub status: u8,
    pub warnings: Vec<String>,
}

impl Report {
    fn new(table: Table, json: Value) -> Self {
        Report {
            table,
            json,
            summary: None,
            status: 0,
            warnings: Vec::new(),
        }
    }
}

pub fn dispatch(cfg: &RunConfig) -> Result<Report, Failure> {
    match cfg.command {
        Command::Potential => potential(cfg),
        Command::Spectrum => spectrum(cfg),
        Command::Variational => variational(cfg),
        Command::Sweep => field_sweep(cfg),
        Command::Check => check(cfg),
    }
}

fn solve_options(cfg: &RunConfig) -> SolveOptions {
    SolveOptions {
        tol: cfg.tol,
        n0: cfg.grid_n0,
        ..SolveOptions::default()
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
}

fn potential(cfg: &RunConfig) -> Result<Report, Failure> {
    let ev = PotentialEvaluator::new(cfg.eb0)?;
    let mut table = Table {
        header: vec!["q", "vhat0", "q2_vhat0"],
        rows: Vec::new(),
    };
    for q in log_grid(1e-6, 1e3, 200) {
        let v = ev.vhat0(q)?;
        table.rows.push(vec![Cell::Num(q), Cell::Num(v), Cell::Num(q * q * v)]);
    }
    let json = json!({
        "eB0": cfg.eb0,
        "small_q_slope": ev.vhat0_small_q_slope()?,
        "integral": ev.vhat0_integral()?,
        "large_q_coefficient": ev.large_q_coefficient(),
        "large_q_bound": 2.0 * cfg.eb0 * INV_SQRT_2PI,
        "max_bound_ratio": ev.max_bound_ratio(),
    });
    Ok(Report::new(table, json))
}

fn spectrum(cfg: &RunConfig) -> Result<Report, Failure> {
    let field = cfg.field()?;
    let ev = PotentialEvaluator::for_config(&field)?;
    let res = solve_converged(&field, &ev, &solve_options(cfg))?;
    let eig = eigenfunction_checks(&res, &res.grid);
    let table = Table {
        header: vec!["k", "weight", "phi"],
        rows: res
            .grid
            .nodes()
            .iter()
            .zip(res.grid.weights())
            .zip(&res.eigenvector)
            .map(|((&k, &w), &p)| vec![Cell::Num(k), Cell::Num(w), Cell::Num(p)])
            .collect(),
    };
    let json = json!({
        "Z": cfg.z,
        "gamma": field.gamma(),
        "eB0": field.eb0(),
        "m": field.mass(),
        "energy": res.energy,
        "converged": res.converged,
        "grid_size": res.grid_size,
        "map_scale": res.grid.map_scale(),
        "residual": res.residual,
        "kinetic": res.kinetic_expectation,
        "potential": res.potential_expectation,
        "form_bound": form_bound_check(&res, &field),
        "eigenfunction": {
            "max_abs": eig.max_abs,
            "tail_coefficient": eig.tail_coefficient,
            "tail_bounded": eig.tail_bounded,
        },
    });
    let mut report = Report::new(table, json);
    if !res.converged {
        report.status = NUMERICAL;
        report
            .warnings
            .push(format!("grid refinement stopped at n = {} before reaching tol", res.grid_size));
    }
    Ok(report)
}

fn variational(cfg: &RunConfig) -> Result<Report, Failure> {
    let field = cfg.field()?;
    let ev = PotentialEvaluator::for_config(&field)?;
    let (z_eff, energy) = optimize_zeff(&field, &ev, cfg.bracket)?;
    let t = make_trial(z_eff, field.eb0())?;
    let parts = energy_parts(&t, &field, &ev)?;
    let mut json = json!({
        "Z": cfg.z,
        "gamma": field.gamma(),
        "eB0": field.eb0(),
        "m": field.mass(),
        "z_eff_opt": z_eff,
        "energy_opt": energy,
        "kinetic": parts.kinetic,
        "potential": parts.potential,
    });
    let mut table = Table {
        header: vec!["z_eff", "mass", "kinetic", "potential", "total"],
        rows: vec![vec![
            Cell::Num(z_eff),
            Cell::Num(field.mass()),
            Cell::Num(parts.kinetic),
            Cell::Num(parts.potential),
            Cell::Num(parts.total()),
        ]],
    };
    if let Some(scan) = &cfg.scan_zeff {
        let mut eval = TrialEnergy::new(&field, &ev)?;
        table.rows.clear();
        for z in scan.values() {
            let p = eval.parts(&make_trial(z, field.eb0())?)?;
            table.rows.push(vec![
                Cell::Num(z),
                Cell::Num(field.mass()),
                Cell::Num(p.kinetic),
                Cell::Num(p.potential),
                Cell::Num(p.total()),
            ]);
        }
    }
    if let Some(masses) = &cfg.scan_mass {
        let rows = mass_scan(&t, &field, &ev, masses)?;
        if cfg.scan_zeff.is_none() {
            table.rows.clear();
        }
        for r in &rows {
            table.rows.push(vec![
                Cell::Num(z_eff),
                Cell::Num(r.mass),
                Cell::Num(r.kinetic),
                Cell::Num(r.potential),
                Cell::Num(r.total),
            ]);
        }
        json["mass_window_observed"] = json!(observed_mass_window(&rows));
        json["mass_window_note"] =
            json!("largest scanned mass whose trial energy lies below the m = 0 value; an observation, not a bound");
    }
    if cfg.scan_zeff.is_some() || cfg.scan_mass.is_some() {
        json["scan"] = json!(table
            .rows
            .iter()
            .map(|r| {
                let v: Vec<f64> = r
                    .iter()
                    .map(|c| match c {
                        Cell::Num(x) => *x,
                        _ => f64::NAN,
                    })
                    .collect();
                json!({"z_eff": v[0], "mass": v[1], "kinetic": v[2], "potential": v[3], "total": v[4]})
            })
            .collect::<Vec<_>>());
    }
    Ok(Report::new(table, json))
}

fn field_sweep(cfg: &RunConfig) -> Result<Report, Failure> {
    let field = cfg.field()?.with_mass(0.0)?;
    let ev = PotentialEvaluator::for_config(&field)?;
    let (lo, hi) = cfg.b_decades;
    let b_values: Vec<f64> = (lo..=hi).map(|d| 10f64.powi(d)).collect();
    let records = sweep(&b_values, 1.0, cfg.mass, &field, &ev, &solve_options(cfg))?;
    let table = Table {
        header: vec!["B", "mu0", "m_tilde", "energy_scaled", "energy_physical", "converged"],
        rows: records
            .iter()
            .map(|r| {
                vec![
                    Cell::Num(r.b),
                    Cell::Num(r.mu0),
                    Cell::Num(r.m_tilde),
                    Cell::Num(r.energy_scaled),
                    Cell::Num(r.energy_physical),
                    Cell::Bool(r.converged),
                ]
            })
            .collect(),
    };
    let mut warnings = Vec::new();
    let mut status = 0;
    let window = fit_window(&records, cfg.fit_min_b);
    let fit = match fit_powerlaw(&window) {
        Ok(f) => {
            if f.excluded > 0 {
                warnings.push(format!("{} record(s) with non-negative energy left out of the fit", f.excluded));
            }
            json!({
                "coefficient": f.coefficient,
                "exponent": f.exponent,
                "rms_residual": f.rms_residual,
                "n_points": f.n_points,
                "fit_min_B": window.first().map(|r| r.b),
            })
        }
        Err(e @ Error::InsufficientData { .. }) => {
            warnings.push(format!("no fit: {e}"));
            status = NUMERICAL;
            Value::Null
        }
        Err(e) => return Err(e.into()),
    };
    if records.iter().any(|r| !r.converged) {
        warnings.push("some sweep rows did not converge within the grid limit".into());
        status = NUMERICAL;
    }
    let rows: Vec<Value> = records
        .iter()
        .map(|r| {
            json!({
                "B": r.b,
                "mu0": r.mu0,
                "m_tilde": r.m_tilde,
                "energy_scaled": r.energy_scaled,
                "energy_physical": r.energy_physical,
                "converged": r.converged,
            })
        })
        .collect();
    Ok(Report {
        table,
        json: json!({ "records": rows, "fit": fit }),
        summary: Some(fit),
        status,
        warnings,
    })
}

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn check(cfg: &RunConfig) -> Result<Report, Failure> {
    let field = cfg.field()?;
    let ev = PotentialEvaluator::for_config(&field)?;
    let mut checks = Vec::new();

    // Positivity, monotonicity and the large-q bound of V̂0.
    let target = (2.0 / std::f64::consts::PI).sqrt();
    let v: Vec<(f64, f64)> = log_grid(1e-6, 1e3, 200).map(|q| Ok((q, ev.vhat0(q)?))).collect::<Result<_, Error>>()?;
    let decreasing = v.iter().all(|p| p.1 > 0.0) && v.windows(2).all(|p| p[1].1 < p[0].1);
    let bound = 2.0 * field.eb0() * INV_SQRT_2PI;
    let bounded = v.iter().filter(|p| p.0 >= 1.0).all(|&(q, x)| q * q * x <= bound);
    let c1 = ev.vhat0_small_q_slope()?;
    checks.push(Check {
        name: "potential_lemma",
        pass: decreasing && bounded && ((c1 - target) / target).abs() < 0.01,
        detail: format!("positive and decreasing: {decreasing}; q^2 V <= {bound:.6}: {bounded}; c1 = {c1:.8}"),
    });

    // f_kk'(0) is the 0/1 sign split and has zero m-derivative at m = 0.
    let momenta = [0.05, 0.3, 1.0, 2.5, 7.0, 19.0];
    let mut split = true;
    let mut slope: f64 = 0.0;
    let h = 1e-5;
    for &k in &momenta {
        for &kp in &momenta {
            for s in [1.0, -1.0] {
                split &= f_coupling(s * k, kp, 0.0)? == if s > 0.0 { 1.0 } else { 0.0 };
                let d = (coupling(s * k, s * kp, h) - coupling(s * k, s * kp, -h)) / (2.0 * h);
                slope = slope.max(d.abs());
            }
        }
    }
    checks.push(Check {
        name: "coupling_stationarity",
        pass: split && slope < 1e-6,
        detail: format!("sign split exact: {split}; max |df/dm| at m = 0: {slope:.3e}"),
    });

    let res = solve_converged(&field, &ev, &solve_options(cfg))?;
    let residual_ok = res.residual <= res.residual_limit();
    checks.push(Check {
        name: "spectral_solve",
        pass: res.converged && residual_ok,
        detail: format!("E = {:.10}, n = {}, residual = {:.2e}", res.energy, res.grid_size, res.residual),
    });
    checks.push(Check {
        name: "form_bound",
        pass: form_bound_check(&res, &field),
        detail: format!("|<V>| = {:.6e}, <T> = {:.6e}", res.potential_expectation.abs(), res.kinetic_expectation),
    });

    // Any trial state bounds the ground energy, including one on a bracket edge.
    let (z_eff, trial) = match optimize_zeff(&field, &ev, cfg.bracket) {
        Ok(v) => v,
        Err(Error::BracketFailure { z_eff, energy, .. }) => (z_eff, energy),
        Err(e) => return Err(e.into()),
    };
    checks.push(Check {
        name: "upper_bound_dominance",
        pass: res.energy <= trial + 1e-6,
        detail: format!("spectral {:.10} <= trial {trial:.10} (z_eff = {z_eff:.5})", res.energy),
    });

    let t = make_trial(z_eff, field.eb0())?;
    let dt: Vec<f64> = [0.0, 0.1, 0.5, 2.0].iter().map(|&x| dt_integral(x, &t)).collect::<Result<_, _>>()?;
    checks.push(Check {
        name: "dt_monotone",
        pass: dt.iter().all(|&d| d > 0.0 && d <= 1.0 + 1e-12) && dt.windows(2).all(|p| p[1] < p[0]),
        detail: format!("D_t(0, 0.1, 0.5, 2) = {dt:.6?}"),
    });

    let mut ordered = true;
    for x3 in [0.1, 1.0, 10.0] {
        let w: Vec<f64> = (0..=4).map(|l| landau_weight(l, x3, field.eb0())).collect::<Result<_, _>>()?;
        ordered &= w.windows(2).all(|p| p[1] < p[0]);
    }
    checks.push(Check {
        name: "landau_ordering",
        pass: ordered,
        detail: format!("W_l decreasing in l = 0..4 at x3 = 0.1, 1, 10: {ordered}"),
    });

    let all_pass = checks.iter().all(|c| c.pass);
    let table = Table {
        header: vec!["check", "pass", "detail"],
        rows: checks
            .iter()
            .map(|c| vec![Cell::Text(c.name.into()), Cell::Bool(c.pass), Cell::Text(c.detail.clone())])
            .collect(),
    };
    let json = json!({
        "gamma": field.gamma(),
        "eB0": field.eb0(),
        "m": field.mass(),
        "all_pass": all_pass,
        "checks": checks
            .iter()
            .map(|c| json!({"name": c.name, "pass": c.pass, "detail": c.detail}))
            .collect::<Vec<_>>(),
    });
    let mut report = Report::new(table, json);
    if !all_pass {
        report.status = INVARIANT;
        for c in checks.iter().filter(|c| !c.pass) {
            report.warnings.push(format!("check {} failed: {}", c.name, c.detail));
        }
    }
    Ok(report)
}
