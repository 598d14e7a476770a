//! Cubic smoothing splines by the banded (Reinsch) method.
//!
//! For samples `(t_i, y_i)` and a smoothing factor `F` in [0, 1], the fitted
//! values `a` minimize
//!
//! ```text
//!   F * sum_i (y_i - a_i)^2  +  (1 - F) * integral f''(t)^2 dt
//! ```
//!
//! over natural cubic splines `f` with knots at the sample times. `F = 1`
//! interpolates the data; `F = 0` degenerates to the least-squares line.
//! Note the convention: larger `F` leans toward fidelity. Some libraries
//! invert the role of the factor.
//!
//! Writing the roughness as `a' Q R^-1 Q' a` (second-difference matrix `Q`,
//! tridiagonal `R`), the optimum solves the pentadiagonal system
//! `(R + alpha Q'Q) g = Q'y` with `alpha = (1 - F) / F`, and
//! `a = y - alpha Q g`. The system is symmetric positive definite and is
//! factored as banded LDL'.

use crate::error::{Error, Result};

/// Fitted values and first derivatives at the input sample times.
#[derive(Debug, Clone)]
pub struct SmoothedSeries {
    pub values: Vec<f64>,
    pub derivatives: Vec<f64>,
}

/// Smooth one coordinate series against its timestamps.
///
/// Requires at least 4 samples with strictly increasing times and
/// `0 <= factor <= 1`.
pub fn smooth_series(times: &[f64], values: &[f64], factor: f64) -> Result<SmoothedSeries> {
    let n = times.len();
    if n != values.len() {
        return Err(Error::InvalidInput(format!(
            "times ({n}) and values ({}) differ in length",
            values.len()
        )));
    }
    if n < 4 {
        return Err(Error::InsufficientData(format!(
            "smoothing needs at least 4 samples, got {n}"
        )));
    }
    if !(0.0..=1.0).contains(&factor) {
        return Err(Error::InvalidInput(format!(
            "smoothing factor {factor} outside [0, 1]"
        )));
    }
    if times.iter().any(|t| !t.is_finite()) || values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite sample".into()));
    }
    for w in times.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidInput(format!(
                "times not strictly increasing at t = {}",
                w[1]
            )));
        }
    }

    if factor == 0.0 {
        return Ok(least_squares_line(times, values));
    }

    let h: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
    let m = n - 2; // interior knots

    // Q'y: weighted second differences of the data at interior knots.
    let qty: Vec<f64> = (1..n - 1)
        .map(|j| {
            (values[j + 1] - values[j]) / h[j] - (values[j] - values[j - 1]) / h[j - 1]
        })
        .collect();

    let alpha = (1.0 - factor) / factor;

    // Bands of M = R + alpha Q'Q (row i of the interior system corresponds
    // to knot i+1).
    let mut diag = vec![0.0; m];
    let mut off1 = vec![0.0; m.saturating_sub(1)];
    let mut off2 = vec![0.0; m.saturating_sub(2)];
    for ci in 0..m {
        let j = ci + 1; // knot index
        let inv_a = 1.0 / h[j - 1];
        let inv_b = 1.0 / h[j];
        diag[ci] = (h[j - 1] + h[j]) / 3.0
            + alpha * (inv_a * inv_a + (inv_a + inv_b).powi(2) + inv_b * inv_b);
        if ci + 1 < m {
            let inv_c = 1.0 / h[j + 1];
            off1[ci] = h[j] / 6.0 - alpha * inv_b * (inv_a + inv_b + inv_b + inv_c);
            if ci + 2 < m {
                off2[ci] = alpha * inv_b * inv_c;
            }
        }
    }

    let g = solve_banded_ldlt(&diag, &off1, &off2, &qty)?;

    // a = y - alpha Q g
    let mut a = values.to_vec();
    for (ci, &gv) in g.iter().enumerate() {
        let j = ci + 1;
        a[j - 1] -= alpha * gv / h[j - 1];
        a[j] -= alpha * gv * (-1.0 / h[j - 1] - 1.0 / h[j]);
        a[j + 1] -= alpha * gv / h[j];
    }

    // Natural-spline second derivatives at all knots.
    let mut gamma = vec![0.0; n];
    gamma[1..n - 1].copy_from_slice(&g);

    Ok(SmoothedSeries {
        derivatives: knot_derivatives(&a, &gamma, &h),
        values: a,
    })
}

/// Degenerate `F = 0` case: the least-squares line through the data.
fn least_squares_line(times: &[f64], values: &[f64]) -> SmoothedSeries {
    let n = times.len() as f64;
    let t_mean = times.iter().sum::<f64>() / n;
    let y_mean = values.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (t, y) in times.iter().zip(values) {
        sxx += (t - t_mean) * (t - t_mean);
        sxy += (t - t_mean) * (y - y_mean);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    SmoothedSeries {
        values: times.iter().map(|t| y_mean + slope * (t - t_mean)).collect(),
        derivatives: vec![slope; times.len()],
    }
}

/// First derivative of the natural cubic spline with values `a` and second
/// derivatives `gamma` at each knot.
fn knot_derivatives(a: &[f64], gamma: &[f64], h: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut d = Vec::with_capacity(n);
    for i in 0..n - 1 {
        d.push((a[i + 1] - a[i]) / h[i] - h[i] * (2.0 * gamma[i] + gamma[i + 1]) / 6.0);
    }
    let i = n - 2;
    d.push((a[i + 1] - a[i]) / h[i] + h[i] * (2.0 * gamma[i + 1] + gamma[i]) / 6.0);
    d
}

/// Solve a symmetric positive-definite pentadiagonal system by banded LDL'.
fn solve_banded_ldlt(diag: &[f64], off1: &[f64], off2: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let m = diag.len();
    let mut d = vec![0.0; m];
    let mut e = vec![0.0; m]; // L[i, i-1]
    let mut f = vec![0.0; m]; // L[i, i-2]

    for i in 0..m {
        let mut di = diag[i];
        if i >= 1 {
            let mut ei = off1[i - 1];
            if i >= 2 {
                let fi = off2[i - 2] / d[i - 2];
                f[i] = fi;
                ei -= fi * e[i - 1] * d[i - 2];
                di -= fi * fi * d[i - 2];
            }
            let ei = ei / d[i - 1];
            e[i] = ei;
            di -= ei * ei * d[i - 1];
        }
        if di <= 0.0 || !di.is_finite() {
            return Err(Error::InvalidInput(format!(
                "smoothing system not positive definite (pivot {di} at row {i})"
            )));
        }
        d[i] = di;
    }

    // Forward substitution (L w = b), scale by D, back substitution (L' x = w).
    let mut w = b.to_vec();
    for i in 0..m {
        if i >= 1 {
            w[i] -= e[i] * w[i - 1];
        }
        if i >= 2 {
            w[i] -= f[i] * w[i - 2];
        }
    }
    for i in 0..m {
        w[i] /= d[i];
    }
    for i in (0..m).rev() {
        if i + 1 < m {
            w[i] -= e[i + 1] * w[i + 1];
        }
        if i + 2 < m {
            w[i] -= f[i + 2] * w[i + 2];
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;

    fn grid(n: usize, dt: f64) -> Vec<f64> {
        (0..n).map(|i| i as f64 * dt).collect()
    }

    #[test]
    fn straight_line_is_fixed_point_for_any_factor() {
        let times = grid(80, 1.0 / 131.5);
        let values: Vec<f64> = times.iter().map(|t| 2.5 * t - 0.7).collect();
        for factor in [0.0, 0.3, 0.85, 1.0] {
            let s = smooth_series(&times, &values, factor).unwrap();
            for (a, y) in s.values.iter().zip(&values) {
                assert!((a - y).abs() < 1e-9, "factor {factor}: {a} vs {y}");
            }
            for d in &s.derivatives {
                assert!((d - 2.5).abs() < 1e-6, "slope {d} at factor {factor}");
            }
        }
    }

    #[test]
    fn interpolation_limit_returns_input() {
        let times = grid(30, 0.01);
        let values: Vec<f64> = times.iter().map(|t| (3.0 * t).sin() + 0.2 * t).collect();
        let s = smooth_series(&times, &values, 1.0).unwrap();
        for (a, y) in s.values.iter().zip(&values) {
            assert!((a - y).abs() < 1e-8);
        }
    }

    #[test]
    fn zero_factor_gives_least_squares_line() {
        let times = vec![0.0, 1.0, 2.0, 3.0];
        let values = vec![0.0, 1.0, 1.0, 2.0];
        // Hand-computed: slope = 0.6, intercept = 0.1.
        let s = smooth_series(&times, &values, 0.0).unwrap();
        let expect = [0.1, 0.7, 1.3, 1.9];
        for (a, e) in s.values.iter().zip(expect) {
            assert!((a - e).abs() < 1e-12, "{a} vs {e}");
        }
        assert!((s.derivatives[0] - 0.6).abs() < 1e-12);
    }

    #[test]
    fn noisy_sine_rms_improves() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let times = grid(789, 1.0 / 131.5); // 6 s of track
        let clean: Vec<f64> = times
            .iter()
            .map(|t| (2.0 * std::f64::consts::PI * t / 5.0).sin())
            .collect();
        let noisy: Vec<f64> = clean
            .iter()
            .map(|c| c + 0.05 * rng.sample::<f64, _>(rand_distr::StandardNormal))
            .collect();
        let s = smooth_series(&times, &noisy, 0.85).unwrap();
        let rms = |xs: &[f64]| {
            (xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64).sqrt()
        };
        let err_in: Vec<f64> = noisy.iter().zip(&clean).map(|(a, b)| a - b).collect();
        let err_out: Vec<f64> = s.values.iter().zip(&clean).map(|(a, b)| a - b).collect();
        assert!(
            rms(&err_out) < rms(&err_in),
            "smoothing did not reduce noise: {} vs {}",
            rms(&err_out),
            rms(&err_in)
        );
    }

    #[test]
    fn rejects_bad_inputs() {
        let times = grid(10, 0.1);
        let values = vec![0.0; 10];
        assert!(smooth_series(&times[..3], &values[..3], 0.85).is_err());
        assert!(smooth_series(&times, &values, 1.5).is_err());
        assert!(smooth_series(&times, &values[..9], 0.85).is_err());
        let mut bad = times.clone();
        bad[5] = bad[4];
        assert!(smooth_series(&bad, &values, 0.85).is_err());
    }
}
