//! Ordinary least squares on a straight line.

use crate::error::{Error, Result};

/// Result of fitting `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square of the residuals.
    pub rms_residual: f64,
    pub n_points: usize,
}

/// Least-squares line through `points`. Needs two distinct abscissae.
pub fn linear_fit<I>(points: I) -> Result<LineFit>
where
    I: IntoIterator<Item = (f64, f64)>,
    I::IntoIter: Clone,
{
    let it = points.into_iter();
    let (mut n, mut sx, mut sy) = (0usize, 0.0, 0.0);
    for (x, y) in it.clone() {
        n += 1;
        sx += x;
        sy += y;
    }
    if n < 2 {
        return Err(Error::InsufficientData { have: n, need: 2 });
    }
    let nf = n as f64;
    let (mx, my) = (sx / nf, sy / nf);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in it.clone() {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::InsufficientData { have: 1, need: 2 });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = it
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    Ok(LineFit {
        slope,
        intercept,
        rms_residual: libm::sqrt(ss / nf),
        n_points: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let fit = linear_fit([(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-15);
        assert!((fit.intercept - 1.0).abs() < 1e-15);
        assert!(fit.rms_residual < 1e-15);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(linear_fit([(1.0, 1.0)]).is_err());
        assert!(linear_fit([(1.0, 1.0), (1.0, 2.0)]).is_err());
    }
}
