use serde::Serialize;

use crate::error::{KqiError, Result};

/// Ordinary least-squares line `y = slope * x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Residual sum of squares.
    pub rss: f64,
    /// Coefficient of determination; 1 for a constant series.
    pub r2: f64,
}

/// `y = c0 + c1 x + c2 x^2` by least squares.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadraticFit {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub rss: f64,
}

fn check_input(xs: &[f64], ys: &[f64], needed: usize) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(KqiError::DegenerateInput(format!(
            "{} x values but {} y values",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < needed {
        return Err(KqiError::TooFewPoints {
            needed,
            got: xs.len(),
        });
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(KqiError::DegenerateInput("non-finite value".into()));
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn fit_linear(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    check_input(xs, ys, 3)?;
    let (mx, my) = (mean(xs), mean(ys));
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(KqiError::DegenerateInput("all x values are equal".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    let sst: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let r2 = if sst == 0.0 {
        1.0
    } else {
        (1.0 - rss / sst).clamp(0.0, 1.0)
    };
    Ok(LinearFit {
        slope,
        intercept,
        rss,
        r2,
    })
}

pub fn fit_quadratic(xs: &[f64], ys: &[f64]) -> Result<QuadraticFit> {
    check_input(xs, ys, 3)?;
    let mx = mean(xs);
    let spread = xs.iter().map(|x| (x - mx).abs()).fold(0.0, f64::max);
    if spread == 0.0 {
        return Err(KqiError::DegenerateInput("all x values are equal".into()));
    }
    // centre and scale x for conditioning
    let zs: Vec<f64> = xs.iter().map(|x| (x - mx) / spread).collect();
    let mut a = [[0.0f64; 4]; 3];
    for (&z, &y) in zs.iter().zip(ys) {
        let p = [1.0, z, z * z];
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] += p[i] * p[j];
            }
            a[i][3] += p[i] * y;
        }
    }
    let coef = solve3(a).ok_or_else(|| {
        KqiError::DegenerateInput("need at least three distinct x values".into())
    })?;
    // back to original x: z = (x - mx) / spread
    let (b0, b1, b2) = (coef[0], coef[1] / spread, coef[2] / (spread * spread));
    let c2 = b2;
    let c1 = b1 - 2.0 * b2 * mx;
    let c0 = b0 - b1 * mx + b2 * mx * mx;
    let rss = zs
        .iter()
        .zip(ys)
        .map(|(z, y)| {
            let r = y - (coef[0] + coef[1] * z + coef[2] * z * z);
            r * r
        })
        .sum();
    Ok(QuadraticFit { c0, c1, c2, rss })
}

/// Gaussian elimination with partial pivoting on an augmented 3x4 matrix.
fn solve3(mut a: [[f64; 4]; 3]) -> Option<[f64; 3]> {
    let scale = a.iter().flat_map(|r| r[..3].iter()).fold(0.0f64, |m, v| m.max(v.abs()));
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= scale * 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        let lead = a[col];
        for row in a.iter_mut().skip(col + 1) {
            let f = row[col] / lead[col];
            for (x, l) in row.iter_mut().zip(lead).skip(col) {
                *x -= f * l;
            }
        }
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let s: f64 = (i + 1..3).map(|j| a[i][j] * x[j]).sum();
        x[i] = (a[i][3] - s) / a[i][i];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let f = fit_linear(&xs, &ys).unwrap();
        assert_eq!(f.slope, 2.0);
        assert_eq!(f.intercept, 1.0);
        assert_eq!(f.rss, 0.0);
        assert_eq!(f.r2, 1.0);
    }

    #[test]
    fn constant_series() {
        let f = fit_linear(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]).unwrap();
        assert_eq!(f.slope, 0.0);
        assert_eq!(f.rss, 0.0);
        assert_eq!(f.r2, 1.0);
    }

    #[test]
    fn parabola_points() {
        // closed form: mean x = 1, mean y = 5/3, Sxx = 2, Sxy = 4
        let f = fit_linear(&[0.0, 1.0, 2.0], &[0.0, 1.0, 4.0]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-15);
        assert!((f.intercept + 1.0 / 3.0).abs() < 1e-15);
        assert!((f.rss - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(
            fit_linear(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(KqiError::DegenerateInput(_))
        ));
        assert!(matches!(
            fit_linear(&[1.0, 2.0], &[1.0, 2.0]),
            Err(KqiError::TooFewPoints { .. })
        ));
        assert!(matches!(
            fit_quadratic(&[1.0, 1.0, 2.0, 2.0], &[1.0, 2.0, 3.0, 4.0]),
            Err(KqiError::DegenerateInput(_))
        ));
    }

    #[test]
    fn quadratic_recovers_coefficients() {
        let xs: Vec<f64> = (1990..2010).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 0.5 * x + 0.25 * x * x).collect();
        let q = fit_quadratic(&xs, &ys).unwrap();
        assert!((q.c2 - 0.25).abs() < 1e-9);
        assert!((q.c1 + 0.5).abs() < 1e-4);
        let concave: Vec<f64> = xs.iter().map(|x| (x - 1980.0).sqrt()).collect();
        assert!(fit_quadratic(&xs, &concave).unwrap().c2 < 0.0);
    }
}
