//! Uniform-norm bound for complex powers of the resolvent, (𝓛 − z)^{−s}.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::plancherel::{rho_closed, split_n};
use crate::quadrature::{integrate, integrate_from, QuadOptions};

pub(crate) fn check_resolvent_params(n: u32, z: Complex64, s: Complex64) -> Result<()> {
    split_n(n)?;
    if z.im == 0.0 && z.re >= 0.0 {
        return Err(Error::invalid(format!(
            "resolvent: z = {z} lies on the spectrum [0, inf)"
        )));
    }
    let threshold = (n as f64 + 1.0) / 2.0;
    if !(s.re > threshold) {
        return Err(Error::Divergent(format!(
            "resolvent norm integral diverges: Re s = {} <= (n+1)/2 = {threshold}",
            s.re
        )));
    }
    Ok(())
}

/// e^{(π/2)|Im s|} ∫₀^∞ |u − z|^{−Re s} ρ_n(u) du.
///
/// The phase of (u−z)^{−s} is bounded by e^{(π/2)|Im s|} under the principal
/// branch, so this dominates the true uniform norm. Converges exactly when
/// Re s > (n+1)/2; below that a divergence error is raised. Near the
/// threshold the tail decays like u^{(n+1)/2 − Re s − 1}, so the achievable
/// relative tolerance degrades; pass an `opts` matching the actual need.
/// For z = a + ib
/// approaching the spectrum (b → 0 with a > 0) the value scales like
/// |b|^{1−Re s}; on the negative real axis it scales like
/// |z|^{(n+1)/2 − Re s}.
pub fn resolvent_norm_bound(n: u32, z: Complex64, s: Complex64, opts: &QuadOptions) -> Result<f64> {
    check_resolvent_params(n, z, s)?;
    let (a, b) = (z.re, z.im);
    let p = s.re;
    let f = |u: f64| -> f64 {
        let d2 = (u - a) * (u - a) + b * b;
        d2.powf(-p / 2.0) * rho_closed(n, u).unwrap_or(f64::NAN)
    };
    // Piecewise split around the near-spectrum peak at u ≈ a, then a
    // half-line tail.
    let tail_from = (2.0 * a.abs() + 10.0).max(10.0);
    let mut cuts = vec![0.0];
    for c in [a - 1.0, a, a + 1.0] {
        if c > 0.0 && c < tail_from {
            cuts.push(c);
        }
    }
    cuts.push(tail_from);
    cuts.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += integrate(f, w[0], w[1], opts)?.value;
    }
    total += integrate_from(tail_from, f, opts)?.value;
    Ok((PI / 2.0 * s.im.abs()).exp() * total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn matches_rectangle_rule_oracle() {
        // n=1, z=−1, s=2: ∫₀^∞ th(π√u)(u+1)^{−2} du.
        let opts = QuadOptions::default().with_rel_tol(1e-11);
        let got = resolvent_norm_bound(
            1,
            Complex64::new(-1.0, 0.0),
            Complex64::new(2.0, 0.0),
            &opts,
        )
        .unwrap();
        // Oracle by midpoint rule; u = y² on [0,1] removes the √u cusp.
        let mut oracle = 0.0;
        let dy = 2e-4f64;
        let mut y = dy / 2.0;
        while y < 1.0 {
            let u = y * y;
            oracle += (PI * y).tanh() / ((u + 1.0) * (u + 1.0)) * 2.0 * y * dy;
            y += dy;
        }
        let du = 1e-3f64;
        let mut u = 1.0 + du / 2.0;
        while u < 4000.0 {
            oracle += (PI * u.sqrt()).tanh() / ((u + 1.0) * (u + 1.0)) * du;
            u += du;
        }
        oracle += 1.0 / 4001.0; // analytic tail of (u+1)^{−2} with th ≈ 1
        assert_relative_eq!(got, oracle, max_relative = 1e-6);
    }

    #[test]
    fn divergence_threshold_is_enforced() {
        let opts = QuadOptions::default();
        let z = Complex64::new(-1.0, 0.0);
        let s = Complex64::new(1.0 - 0.01, 0.0); // (n+1)/2 = 1 at n = 1
        match resolvent_norm_bound(1, z, s, &opts) {
            Err(Error::Divergent(_)) => {}
            other => panic!("expected divergence error, got {other:?}"),
        }
        // Just above the threshold the tail decays like u^{−0.1}, so only a
        // modest relative tolerance is reachable there.
        let s = Complex64::new(1.1, 0.0);
        let loose = QuadOptions::default().with_rel_tol(1e-6);
        assert!(resolvent_norm_bound(1, z, s, &loose).unwrap().is_finite());
    }

    #[test]
    fn spectrum_points_rejected() {
        let opts = QuadOptions::default();
        let s = Complex64::new(2.0, 0.0);
        assert!(resolvent_norm_bound(1, Complex64::new(3.0, 0.0), s, &opts).is_err());
        assert!(resolvent_norm_bound(1, Complex64::new(0.0, 0.0), s, &opts).is_err());
        assert!(resolvent_norm_bound(1, Complex64::new(-1.0, 0.5), s, &opts).is_ok());
    }

    #[test]
    fn near_spectrum_blowup_rate() {
        // |b|^{1−Re s} law: ratio of values at b and b/10 approaches 10^{Re s −1}.
        let opts = QuadOptions::default().with_rel_tol(1e-10);
        let s = Complex64::new(2.0, 0.0);
        let v1 = resolvent_norm_bound(1, Complex64::new(1.0, 1e-2), s, &opts).unwrap();
        let v2 = resolvent_norm_bound(1, Complex64::new(1.0, 1e-3), s, &opts).unwrap();
        let slope = (v2.ln() - v1.ln()) / (1e-3f64.ln() - 1e-2f64.ln());
        assert!((slope - (-1.0)).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn imaginary_order_prefactor() {
        let opts = QuadOptions::default();
        let z = Complex64::new(-1.0, 0.0);
        let v0 = resolvent_norm_bound(1, z, Complex64::new(2.0, 0.0), &opts).unwrap();
        let v1 = resolvent_norm_bound(1, z, Complex64::new(2.0, 3.0), &opts).unwrap();
        assert_relative_eq!(v1 / v0, (1.5 * PI).exp(), max_relative = 1e-9);
    }
}
