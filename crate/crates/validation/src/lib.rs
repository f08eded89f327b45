//! Reference implementations for cross-checking `llr-core`: a Jacobi
//! eigensolver, the closed form of the lowest-level kernel, and graded panel
//! quadrature. Nothing here depends on the crate under test.

use std::f64::consts::PI;

/// All eigenvalues of a dense symmetric matrix by cyclic Jacobi rotations,
/// ascending, with the eigenvector of the smallest.
pub fn jacobi_eigen(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut m = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| m[a * n + a].partial_cmp(&m[b * n + b]).unwrap());
    let vals = idx.iter().map(|&i| m[i * n + i]).collect();
    let lo = idx[0];
    let vec = (0..n).map(|k| v[k * n + lo]).collect();
    (vals, vec)
}

/// `E1(z)` for `z > 0`: power series below 1, Lentz continued fraction above.
pub fn exp_e1(z: f64) -> f64 {
    if z < 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            term *= -z / k as f64;
            let add = -term / k as f64;
            sum += add;
            if add.abs() < 1e-18 * sum.abs().max(1e-300) {
                break;
            }
        }
        (-0.5772156649015329 - z.ln() + sum) * z.exp()
    } else {
        // e^z E1(z) = 1/(z + 1/(1 + 1/(z + 2/(1 + 2/(z + ...)))))
        let tiny = 1e-300;
        let mut f = z;
        let mut c = z;
        let mut d = 0.0;
        for k in 1..500 {
            let a = ((k + 1) / 2) as f64;
            let b = if k % 2 == 1 { 1.0 } else { z };
            d = b + a * d;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + a / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        1.0 / f
    }
}

/// `V̂0(q) = e^z E1(z) / sqrt(2π)`, `z = q^2 / (2 eB0)`.
pub fn vhat0_exact(q: f64, eb0: f64) -> f64 {
    exp_e1(q * q / (2.0 * eb0)) / (2.0 * PI).sqrt()
}

/// Gauss–Legendre nodes and weights on `[0, 1]` by Newton iteration on
/// `P_n`, independent of the library's rule builder.
pub fn legendre01(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (1.0 + x), 0.5 * w));
    }
    out
}

/// `∫_a^b f` with a 48-point rule whose nodes are graded as `u^4` towards
/// `a`, which absorbs a logarithmic endpoint singularity.
pub fn graded_panel<F: Fn(f64) -> f64>(a: f64, b: f64, f: F) -> f64 {
    let d = b - a;
    legendre01(48)
        .iter()
        .map(|&(u, w)| w * 4.0 * u * u * u * d * f(a + d * u.powi(4)))
        .sum()
}

/// `∫_{-∞}^{∞} V̂0(p - k) dk` split into panels at the grid nodes, each
/// panel integrated with the log singularity at `k = p` graded out, and the
/// two tails mapped by `k = k_edge / u`.
pub fn panel_row_integral(p: f64, nodes: &[f64], eb0: f64) -> f64 {
    let v = |k: f64| vhat0_exact(k - p, eb0);
    let mut total = 0.0;
    for w in nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a == p {
            total += graded_panel(a, b, v);
        } else if b == p {
            total += graded_panel(-b, -a, |s| v(-s));
        } else {
            total += graded_panel(a, 0.5 * (a + b), |k| v(k)) + graded_panel(b, 0.5 * (a + b), |k| v(k)) * -1.0;
        }
    }
    let hi = *nodes.last().unwrap();
    let lo = nodes[0];
    // Graded towards u = 1 so that an edge node's own singularity is resolved.
    let tail = |edge: f64| -> f64 {
        -graded_panel(1.0, 0.0, |u| edge.abs() / (u * u) * vhat0_exact(edge / u - p, eb0))
    };
    total + tail(hi) + tail(lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e1_reference_values() {
        // e^z E1(z) at z = 0.5, 1, 5 (mpmath).
        for (z, v) in [(0.5, 0.9229106324), (1.0, 0.5963473623), (5.0, 0.1704221762)] {
            assert!((exp_e1(z) - v).abs() < 1e-9, "{z}");
        }
    }

    #[test]
    fn jacobi_two_by_two() {
        let (vals, vec) = jacobi_eigen(&[2.0, 1.0, 1.0, 2.0], 2);
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 3.0).abs() < 1e-14);
        assert!((vec[0] + vec[1]).abs() < 1e-14);
    }

    #[test]
    fn legendre_integrates_polynomials() {
        let rule = legendre01(10);
        let v: f64 = rule.iter().map(|&(x, w)| w * x.powi(19)).sum();
        assert!((v - 0.05).abs() < 1e-15);
    }

    #[test]
    fn graded_panel_absorbs_log() {
        let v = graded_panel(0.0, 1.0, |x| -x.ln());
        assert!((v - 1.0).abs() < 1e-10, "{v}");
    }
}
