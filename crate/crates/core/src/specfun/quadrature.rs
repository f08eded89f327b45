//! Gauss–Legendre rules and the variable substitutions built on them.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// What interval a rule integrates over and how it was mapped there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// Affine image of `[-1, 1]` on `[a, b]`.
    Finite { a: f64, b: f64 },
    /// `[0, inf)` through `rho = scale * t / (1 - t)`, `t in (0, 1)`.
    SemiInfinite { scale: f64 },
    /// `[a, b]` with `0 < a`, Gauss–Legendre in `ln rho`. Suited to integrands
    /// with logarithmic or power-law structure at the left end.
    LogScaled { a: f64, b: f64 },
}

/// Nodes and positive weights; nodes are strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    domain: Domain,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }
}

/// Self-convergence settings for quadratures that double their node count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Relative change between `n` and `2n` nodes that counts as converged.
    pub rel: f64,
    /// Absolute floor for integrals that are legitimately close to zero.
    pub abs: f64,
    /// Give up beyond this many nodes.
    pub max_nodes: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel: 1e-10,
            abs: 1e-300,
            max_nodes: 8192,
        }
    }
}

/// Nodes (increasing) and weights of the `n`-point rule on `[-1, 1]`.
///
/// Newton iteration on the three-term recurrence, seeded with Tricomi's
/// asymptotic node estimate; the rule is mirrored so it is exactly
/// symmetric.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    let nf = n as f64;
    let half = n.div_ceil(2);
    for i in 0..half {
        // i-th largest root
        let theta = core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5);
        let mut z = libm::cos(theta) * (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf));
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if libm::fabs(dz) <= 1e-16 * libm::fabs(z).max(1e-300) {
                let (_, d) = legendre_with_derivative(n, z);
                dp = d;
                break;
            }
        }
        if n % 2 == 1 && i == half - 1 {
            z = 0.0;
            dp = legendre_with_derivative(n, 0.0).1;
        }
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[n - 1 - i] = z;
        x[i] = -z;
        w[n - 1 - i] = weight;
        w[i] = weight;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// `n`-point Gauss–Legendre rule on `[a, b]`.
pub fn make_legendre_rule(n: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("rule needs n >= 2, got {n}")));
    }
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidArgument(format!("need finite a < b, got [{a}, {b}]")));
    }
    let (x, w) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    Ok(QuadratureRule {
        nodes: x.iter().map(|&t| mid + half * t).collect(),
        weights: w.iter().map(|&v| half * v).collect(),
        domain: Domain::Finite { a, b },
    })
}

/// Rule for `int_0^inf f` through `rho = scale * t / (1 - t)`.
pub fn make_semi_infinite_rule(n: usize, scale: f64) -> Result<QuadratureRule> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("rule needs n >= 2, got {n}")));
    }
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::InvalidArgument(format!("scale must be positive, got {scale}")));
    }
    let (x, w) = gauss_legendre(n);
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for (&s, &v) in x.iter().zip(&w) {
        let t = 0.5 * (s + 1.0);
        let one_minus = 0.5 * (1.0 - s);
        nodes.push(scale * t / one_minus);
        weights.push(0.5 * v * scale / (one_minus * one_minus));
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        domain: Domain::SemiInfinite { scale },
    })
}

/// `n`-point rule on `[a, b]`, `a > 0`, Gauss–Legendre in `ln rho`.
pub fn make_log_rule(n: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidArgument(format!("log rule needs a > 0, got {a}")));
    }
    let inner = make_legendre_rule(n, libm::log(a), libm::log(b))?;
    let nodes: Vec<f64> = inner.nodes.iter().map(|&y| libm::exp(y)).collect();
    let weights = inner
        .weights
        .iter()
        .zip(&nodes)
        .map(|(&v, &r)| v * r)
        .collect();
    Ok(QuadratureRule {
        nodes,
        weights,
        domain: Domain::LogScaled { a, b },
    })
}

/// Integrates `f` with rules from `build(n)`, doubling `n` from `n0` until two
/// successive results agree to `tol`. Returns the finer result.
pub fn integrate_converged<B, F>(
    what: &'static str,
    build: B,
    mut f: F,
    n0: usize,
    tol: Tolerance,
) -> Result<f64>
where
    B: Fn(usize) -> Result<QuadratureRule>,
    F: FnMut(f64) -> f64,
{
    let mut n = n0.max(2);
    let mut prev = build(n)?.integrate(&mut f);
    let mut change = f64::INFINITY;
    while 2 * n <= tol.max_nodes {
        n *= 2;
        let next = build(n)?.integrate(&mut f);
        change = libm::fabs(next - prev);
        if !next.is_finite() {
            break;
        }
        if change <= tol.rel * libm::fabs(next) || change <= tol.abs {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature {
        what,
        change: change / libm::fabs(prev).max(tol.abs),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_arguments() {
        assert!(make_legendre_rule(1, 0.0, 1.0).is_err());
        assert!(make_legendre_rule(4, 1.0, 1.0).is_err());
        assert!(make_legendre_rule(4, 2.0, 1.0).is_err());
        assert!(make_semi_infinite_rule(1, 1.0).is_err());
        assert!(make_semi_infinite_rule(8, 0.0).is_err());
        assert!(make_semi_infinite_rule(8, f64::NAN).is_err());
        assert!(make_log_rule(8, 0.0, 1.0).is_err());
    }

    #[test]
    fn odd_rule_has_exact_center() {
        let (x, w) = gauss_legendre(5);
        assert_eq!(x[2], 0.0);
        assert!((w[2] - 128.0 / 225.0).abs() < 1e-15);
    }

    #[test]
    fn convergence_failure_is_reported() {
        let err = integrate_converged(
            "oscillatory",
            |n| make_legendre_rule(n, 0.0, 1.0),
            |x| libm::sin(1e6 * x),
            4,
            Tolerance { max_nodes: 64, ..Tolerance::default() },
        )
        .unwrap_err();
        assert!(matches!(err, Error::Quadrature { what: "oscillatory", .. }));
    }
}
