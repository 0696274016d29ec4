//! Uniform norms of the generalized heat semigroup e^{−t 𝓛^γ}.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::plancherel::{rho_closed, split_n};
use crate::quadrature::{integrate, QuadOptions};

/// ‖ heat kernel ‖_∞ = ∫₀^∞ e^{−t u^γ} ρ_n(u) du.
///
/// Computed in the scaled variable u = t^{−1/γ} y², which makes the integrand
/// t-independent up to the density argument:
///   value = 2 t^{−1/γ} ∫₀^∞ e^{−y^{2γ}} ρ_n(t^{−1/γ} y²) y dy.
/// This keeps the quadrature uniformly well-conditioned over t from 1e−6 to
/// 1e4. The two asymptotic slopes are −3/(2γ) for t → ∞ and −(n+1)/(2γ) for
/// t → 0.
pub fn heat_uniform_norm(n: u32, gamma: f64, t: f64, opts: &QuadOptions) -> Result<f64> {
    split_n(n)?;
    if !(gamma > 0.0) || !(t > 0.0) {
        return Err(Error::invalid(format!(
            "heat_uniform_norm: need gamma > 0 and t > 0; got ({gamma}, {t})"
        )));
    }
    let scale = t.powf(-1.0 / gamma);
    let y_max = 170f64.powf(1.0 / (2.0 * gamma)) * 1.05;
    let f = |y: f64| (-(y.powf(2.0 * gamma))).exp() * rho_closed(n, scale * y * y).unwrap_or(f64::NAN) * y;
    let out = integrate(f, 0.0, y_max, opts)?;
    Ok(2.0 * scale * out.value)
}

/// Frequency profile of the heat kernel, f(s) = e^{−t s^{2γ}}, with the
/// truncation point that keeps the discarded tail below e^{−170}.
pub fn heat_profile(gamma: f64, t: f64) -> (impl Fn(f64) -> Complex64, f64) {
    let f = move |s: f64| Complex64::new((-t * s.abs().powf(2.0 * gamma)).exp(), 0.0);
    let s_max = (170.0 / t).powf(1.0 / (2.0 * gamma));
    (f, s_max)
}

/// Radial factor κ(R) of the heat kernel; the kernel is e^{−nx/2} κ(R).
pub fn heat_radial(n: u32, gamma: f64, t: f64, r: f64, opts: &QuadOptions) -> Result<f64> {
    if !(gamma > 0.0) || !(t > 0.0) {
        return Err(Error::invalid(format!(
            "heat_radial: need gamma > 0 and t > 0; got ({gamma}, {t})"
        )));
    }
    let (f, s_max) = heat_profile(gamma, t);
    let v = super::pointwise_radial_kernel(n, f, r, s_max, opts)?;
    Ok(v.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn n2_gamma1_is_closed_form() {
        let opts = QuadOptions::default().with_rel_tol(1e-12);
        for t in [1e-3, 0.1, 1.0, 37.0, 1e3] {
            let got = heat_uniform_norm(2, 1.0, t, &opts).unwrap();
            let want = 0.5 * PI.sqrt() * t.powf(-1.5);
            assert_relative_eq!(got, want, max_relative = 1e-10);
        }
        // t = 1: √π/2.
        let got = heat_uniform_norm(2, 1.0, 1.0, &opts).unwrap();
        assert_relative_eq!(got, 0.88622692545275801365, max_relative = 1e-10);
    }

    #[test]
    fn n1_large_t_constant() {
        // ρ₁ ~ π√u near zero, so the norm approaches π Γ(3/2) t^{−3/2}.
        let opts = QuadOptions::default().with_rel_tol(1e-12);
        let t = 1e6;
        let got = heat_uniform_norm(1, 1.0, t, &opts).unwrap();
        let want = PI * 0.5 * PI.sqrt() * t.powf(-1.5);
        assert_relative_eq!(got, want, max_relative = 1e-5);
    }

    #[test]
    fn small_t_slope_reflects_dimension() {
        let opts = QuadOptions::default().with_rel_tol(1e-11);
        for (n, gamma) in [(1u32, 1.0), (3, 1.0), (2, 2.0)] {
            let t1 = 1e-6;
            let t2 = 1e-4;
            let v1 = heat_uniform_norm(n, gamma, t1, &opts).unwrap();
            let v2 = heat_uniform_norm(n, gamma, t2, &opts).unwrap();
            let slope = (v2.ln() - v1.ln()) / (t2.ln() - t1.ln());
            let want = -(n as f64 + 1.0) / (2.0 * gamma);
            assert!(
                (slope - want).abs() < 0.03,
                "n={n} gamma={gamma}: slope {slope} vs {want}"
            );
        }
    }

    #[test]
    fn radial_factor_decays_and_matches_identity() {
        let opts = QuadOptions::default().with_rel_tol(1e-9);
        let at0 = heat_radial(2, 1.0, 1.0, 0.0, &opts).unwrap();
        assert_relative_eq!(at0, 0.5 * PI.sqrt(), max_relative = 1e-6);
        let at2 = heat_radial(2, 1.0, 1.0, 2.0, &opts).unwrap();
        assert!(at2 > 0.0 && at2 < at0);
    }

    #[test]
    fn rejects_bad_parameters() {
        let opts = QuadOptions::default();
        assert!(heat_uniform_norm(2, 0.0, 1.0, &opts).is_err());
        assert!(heat_uniform_norm(2, 1.0, -1.0, &opts).is_err());
    }
}
