//! Log-log power-law fitting for the asymptotic verdicts.

use crate::error::{Error, Result};

/// Least-squares fit of y = prefactor · x^exponent in log-log coordinates.
#[derive(Debug, Clone, Copy)]
pub struct FitResult {
    pub exponent: f64,
    pub prefactor: f64,
    /// Max |ln y_i − ln ŷ_i| over the samples: the worst relative deviation
    /// of the data from the fitted law.
    pub residual: f64,
}

/// Fits a line to (ln x, ln y). Needs at least 3 samples with strictly
/// increasing positive x and positive y.
pub fn fit_power_law(samples: &[(f64, f64)]) -> Result<FitResult> {
    if samples.len() < 3 {
        return Err(Error::invalid(format!(
            "fit_power_law needs >= 3 samples, got {}",
            samples.len()
        )));
    }
    for w in samples.windows(2) {
        if !(w[0].0 < w[1].0) {
            return Err(Error::invalid(format!(
                "fit_power_law: x not strictly increasing at {} -> {}",
                w[0].0, w[1].0
            )));
        }
    }
    let mut logs = Vec::with_capacity(samples.len());
    for &(x, y) in samples {
        if !(x > 0.0) || !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::invalid(format!(
                "fit_power_law: nonpositive or non-finite sample ({x}, {y})"
            )));
        }
        logs.push((x.ln(), y.ln()));
    }
    let m = logs.len() as f64;
    let sx: f64 = logs.iter().map(|p| p.0).sum();
    let sy: f64 = logs.iter().map(|p| p.1).sum();
    let mx = sx / m;
    let my = sy / m;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let residual = logs
        .iter()
        .map(|p| (p.1 - (intercept + exponent * p.0)).abs())
        .fold(0.0f64, f64::max);
    Ok(FitResult {
        exponent,
        prefactor: intercept.exp(),
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_square_law() {
        let pts: Vec<(f64, f64)> = (1..=6).map(|i| (i as f64, 5.0 * (i * i) as f64)).collect();
        let fit = fit_power_law(&pts).unwrap();
        assert_relative_eq!(fit.exponent, 2.0, max_relative = 1e-12);
        assert_relative_eq!(fit.prefactor, 5.0, max_relative = 1e-12);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn perturbed_decay_law() {
        let pts: Vec<(f64, f64)> = (1..=40)
            .map(|i| {
                let x = 1.2f64.powi(i);
                (x, x.powf(-1.5) * (1.0 + 0.01 * x.sin()))
            })
            .collect();
        let fit = fit_power_law(&pts).unwrap();
        assert!((fit.exponent + 1.5).abs() < 0.02, "exponent {}", fit.exponent);
    }

    #[test]
    fn collinear_points_have_zero_residual() {
        let pts = [(1.0, 2.0), (10.0, 20.0), (100.0, 200.0)];
        let fit = fit_power_law(&pts).unwrap();
        assert!(fit.residual < 1e-12);
        assert_relative_eq!(fit.exponent, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn bad_inputs_are_rejected() {
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(fit_power_law(&[(1.0, 1.0), (1.0, 2.0), (3.0, 3.0)]).is_err());
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, -2.0), (3.0, 3.0)]).is_err());
    }
}
