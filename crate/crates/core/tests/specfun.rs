use llr_core::specfun::*;
use proptest::prelude::*;

/// `(x, K0(x), K1(x))` at 40 significant digits (mpmath), rounded.
const REFERENCE: &[(f64, f64, f64)] = &[
    (1e-8, 18.536612259610778409, 99999999.999999904817),
    (1e-6, 13.931442073626419413, 999999.99999278427896),
    (1e-3, 7.0236888005623813436, 999.99623815608557428),
    (0.1, 2.4270690247020166125, 9.8538447808706061348),
    (0.5, 0.92441907122766586178, 1.6564411200033008937),
    (1.0, 0.42102443824070833334, 0.60190723019723457474),
    (1.9, 0.12884597927604747986, 0.15966015303266761038),
    (2.0, 0.11389387274953343565, 0.13986588181652242728),
    (2.1, 0.10078374088996694581, 0.12274641153350791061),
    (3.0, 0.034739504386279248072, 0.040156431128194184377),
    (5.0, 0.0036910983340425942747, 0.0040446134454521642084),
    (10.0, 0.000017780062316167651811, 0.000018648773453825584597),
    (20.0, 5.7412378153365242927e-10, 5.8830579695570381777e-10),
    (50.0, 3.4101677497894955139e-23, 3.4441022267175556126e-23),
    (100.0, 4.6566282291759020189e-45, 4.6798537356369092866e-45),
    (300.0, 3.7236948548891432633e-132, 3.7298958583323726986e-132),
    (600.0, 1.3558285309948524376e-262, 1.3569579181128060869e-262),
];

/// `K_nu(x) = ∫_0^∞ exp(-x cosh t) cosh(nu t) dt` by the trapezoid rule,
/// which converges geometrically for this doubly-decaying integrand.
fn integral_oracle(nu: f64, x: f64) -> f64 {
    let h: f64 = 0.01;
    let mut sum = 0.5 * (-x).exp();
    let mut t: f64 = h;
    loop {
        let term = (-x * t.cosh()).exp() * (nu * t).cosh();
        sum += term;
        if x * t.cosh() > 750.0 {
            break;
        }
        t += h;
    }
    sum * h
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn bessel_matches_high_precision_table() {
    for &(x, k0, k1) in REFERENCE {
        let (a, b) = bessel_k0_k1(x).unwrap();
        assert!(rel(a, k0) < 1e-10, "K0({x}) = {a}, expected {k0}");
        assert!(rel(b, k1) < 1e-10, "K1({x}) = {b}, expected {k1}");
    }
}

#[test]
fn bessel_at_one() {
    assert!(rel(bessel_k0(1.0).unwrap(), 0.42102443824070834) < 1e-14);
    assert!(rel(bessel_k1(1.0).unwrap(), 0.6019072301972346) < 1e-14);
}

#[test]
fn bessel_small_argument_limits() {
    let x = 1e-6;
    let k0 = bessel_k0(x).unwrap();
    assert!((k0 + (x / 2.0).ln() + 0.5772156649015329).abs() < 1e-10);
    assert!((x * bessel_k1(x).unwrap() - 1.0).abs() < 1e-8);
    assert_eq!(EULER_GAMMA, 0.5772156649015329);
}

#[test]
fn bessel_ordering() {
    assert!(bessel_k0(2.0).unwrap() > bessel_k0(3.0).unwrap());
    assert!(bessel_k0(3.0).unwrap() > 0.0);
    for x in [0.5, 1.0, 5.0] {
        assert!(bessel_k1(x).unwrap() > bessel_k0(x).unwrap());
    }
}

#[test]
fn bessel_wronskian_sign() {
    let h = 1e-5;
    for x in [0.5, 1.0, 5.0, 20.0] {
        let d = |f: fn(f64) -> llr_core::Result<f64>| {
            (f(x + h).unwrap() - f(x - h).unwrap()) / (2.0 * h)
        };
        let w = bessel_k0(x).unwrap() * d(bessel_k1) - d(bessel_k0) * bessel_k1(x).unwrap();
        assert!(w < 0.0, "x = {x}: {w}");
    }
}

#[test]
fn bessel_domain_and_underflow() {
    for x in [0.0, -1.0, f64::NAN, f64::INFINITY] {
        assert!(bessel_k0(x).is_err());
        assert!(bessel_k1(x).is_err());
    }
    assert_eq!(bessel_k0(800.0).unwrap(), 0.0);
    assert_eq!(bessel_k1(1e4).unwrap(), 0.0);
}

#[test]
fn legendre_two_point_rule() {
    let r = make_legendre_rule(2, -1.0, 1.0).unwrap();
    let s = 1.0 / 3f64.sqrt();
    assert!((r.nodes()[0] + s).abs() < 1e-15 && (r.nodes()[1] - s).abs() < 1e-15);
    assert!((r.weights()[0] - 1.0).abs() < 1e-15 && (r.weights()[1] - 1.0).abs() < 1e-15);
}

#[test]
fn legendre_examples() {
    let r = make_legendre_rule(5, -1.0, 1.0).unwrap();
    assert!((r.integrate(|x| x * x) - 2.0 / 3.0).abs() < 1e-14);
    let r = make_legendre_rule(40, 0.0, std::f64::consts::PI).unwrap();
    assert!((r.integrate(f64::sin) - 2.0).abs() < 1e-12);
    assert!(make_legendre_rule(1, 0.0, 1.0).is_err());
    assert!(make_legendre_rule(4, 1.0, 0.0).is_err());
}

#[test]
fn semi_infinite_examples() {
    let r = make_semi_infinite_rule(60, 1.0).unwrap();
    assert!((r.integrate(|x| (-x).exp()) - 1.0).abs() < 1e-10);
    assert!((r.integrate(|x| x * (-x * x).exp()) - 0.5).abs() < 1e-10);
    let f = |x: f64| (-x * x / 2.0).exp() * bessel_k0(x).unwrap() * x;
    let a = make_semi_infinite_rule(200, 1.0).unwrap().integrate(f);
    let b = make_semi_infinite_rule(400, 1.0).unwrap().integrate(f);
    assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    assert!(make_semi_infinite_rule(1, 1.0).is_err());
    assert!(make_semi_infinite_rule(10, 0.0).is_err());
}

#[test]
fn log_rule_handles_log_singularity() {
    // ∫_0^1 -ln x dx = 1; the piece below 1e-30 is 1e-30 * (1 + 69.08).
    let r = make_log_rule(64, 1e-30, 1.0).unwrap();
    let v = r.integrate(|x| -x.ln());
    assert!((v - 1.0).abs() < 1e-12, "{v}");
}

#[test]
fn converged_integration_reports_failure() {
    let tol = Tolerance {
        rel: 1e-14,
        abs: 0.0,
        max_nodes: 16,
    };
    let r = integrate_converged("oscillatory", |n| make_legendre_rule(n, 0.0, 100.0), |x| (x * x).sin(), 4, tol);
    assert!(matches!(r, Err(llr_core::Error::Quadrature { .. })));
    let ok = integrate_converged(
        "gaussian",
        |n| make_semi_infinite_rule(n, 1.0),
        |x| (-x * x).exp(),
        16,
        Tolerance::default(),
    )
    .unwrap();
    assert!((ok - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-10);
}

proptest! {
    #[test]
    fn bessel_agrees_with_integral_representation(x in 1e-3f64..60.0) {
        let (k0, k1) = bessel_k0_k1(x).unwrap();
        prop_assert!(rel(k0, integral_oracle(0.0, x)) < 1e-10);
        prop_assert!(rel(k1, integral_oracle(1.0, x)) < 1e-10);
    }

    #[test]
    fn bessel_is_positive_and_decreasing(x in 1e-6f64..500.0, dx in 1e-3f64..1.0) {
        let (a0, a1) = bessel_k0_k1(x).unwrap();
        let (b0, b1) = bessel_k0_k1(x + dx).unwrap();
        prop_assert!(a0 > b0 && b0 > 0.0);
        prop_assert!(a1 > b1 && b1 > 0.0);
        prop_assert!(a1 > a0);
    }

    #[test]
    fn legendre_rules_are_well_formed(n in 2usize..200, a in -50.0f64..50.0, len in 1e-3f64..100.0) {
        let r = make_legendre_rule(n, a, a + len).unwrap();
        prop_assert!(r.weights().iter().all(|&w| w > 0.0));
        prop_assert!(r.nodes().windows(2).all(|p| p[1] > p[0]));
        prop_assert!((r.integrate(|_| 1.0) - len).abs() <= 1e-12 * len);
    }

    #[test]
    fn legendre_is_exact_for_polynomials(n in 2usize..30, c in proptest::collection::vec(-1.0f64..1.0, 60)) {
        let deg = 2 * n - 1;
        let r = make_legendre_rule(n, 0.0, 1.0).unwrap();
        let v = r.integrate(|x| (0..=deg).rev().fold(0.0, |acc, k| acc * x + c[k]));
        let exact: f64 = (0..=deg).map(|k| c[k] / (k + 1) as f64).sum();
        let scale: f64 = (0..=deg).map(|k| c[k].abs() / (k + 1) as f64).sum::<f64>().max(1e-300);
        prop_assert!((v - exact).abs() <= 1e-13 * scale.max(1.0), "{} vs {}", v, exact);
    }

    #[test]
    fn semi_infinite_rules_are_well_formed(n in 2usize..200, s in 1e-2f64..1e2) {
        let r = make_semi_infinite_rule(n, s).unwrap();
        prop_assert!(r.weights().iter().all(|&w| w > 0.0));
        prop_assert!(r.nodes().windows(2).all(|p| p[1] > p[0]));
        prop_assert!(r.nodes()[0] > 0.0);
    }

    #[test]
    fn doubling_preserves_smooth_integrals(s in 0.3f64..3.0) {
        let f = |x: f64| (-x).exp() / (1.0 + x * x);
        let a = make_semi_infinite_rule(80, s).unwrap().integrate(f);
        let b = make_semi_infinite_rule(160, s).unwrap().integrate(f);
        prop_assert!((a - b).abs() < 1e-10 * b.abs());
    }
}
