//! Positivity diagnostic: the modular-corrected kernel of a nonnegative
//! spectral profile peaks at the identity.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{y_norm_on_sphere, GroupPoint};
use crate::kernel::{heat::heat_profile, pointwise_radial_kernel, SpectralFunction};
use crate::plancherel::split_n;
use crate::quadrature::QuadOptions;

/// Outcome of [`max_at_identity_check`].
#[derive(Debug, Clone)]
pub struct IdentityReport {
    /// k̃ at the identity.
    pub identity_value: f64,
    /// Per-point (distance R, k̃(p)).
    pub samples: Vec<(f64, f64)>,
    /// max over the grid of |k̃(p)| / k̃(e).
    pub worst_ratio: f64,
    /// Indices of grid points violating the bound.
    pub violations: Vec<usize>,
    pub passed: bool,
}

/// Deterministic quasi-random grid of group points with both signs of x and a
/// spread of distances, for positivity and radiality checks.
pub fn sample_grid(n: u32, count: usize, seed: u64) -> Result<Vec<GroupPoint>> {
    split_n(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x: f64 = rng.gen_range(-3.0..3.0);
        let r = x.abs() + rng.gen_range(0.05..6.0);
        let norm = y_norm_on_sphere(x, r)?;
        let mut y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let len: f64 = y.iter().map(|c| c * c).sum::<f64>().sqrt();
        if len < 1e-3 {
            continue;
        }
        for c in &mut y {
            *c *= norm / len;
        }
        out.push(GroupPoint::new(x, y));
    }
    Ok(out)
}

/// Verifies |k̃_f(p)| ≤ k̃_f(e)·(1 + tol) on the grid, where
/// k̃_f(p) = e^{nx/2} k_f(p) is the modular-corrected kernel. For radial
/// kernels k̃ depends only on R(p), so the check reduces to the radial factor.
pub fn max_at_identity_check(
    f: &SpectralFunction,
    n: u32,
    grid: &[GroupPoint],
    tol: f64,
    opts: &QuadOptions,
) -> Result<IdentityReport> {
    f.validate(n)?;
    let (profile, s_max): (Box<dyn Fn(f64) -> num_complex::Complex64>, f64) = match f {
        SpectralFunction::Heat { gamma, t } => {
            let (p, m) = heat_profile(*gamma, *t);
            (Box::new(p), m)
        }
        _ => {
            return Err(Error::invalid(
                "max_at_identity_check expects a nonnegative profile (heat)".to_string(),
            ))
        }
    };
    let eval = |r: f64| -> Result<f64> {
        let v = pointwise_radial_kernel(n, &profile, r, s_max, opts)?;
        Ok(v.re)
    };
    let identity_value = eval(0.0)?;
    if !(identity_value > 0.0) {
        return Err(Error::invalid(format!(
            "identity value {identity_value} is not positive"
        )));
    }
    let mut samples = Vec::with_capacity(grid.len());
    let mut worst_ratio = 0.0f64;
    let mut violations = Vec::new();
    for (i, p) in grid.iter().enumerate() {
        if p.dim() != n as usize {
            return Err(Error::invalid(format!(
                "grid point {i} has dimension {} != n = {n}",
                p.dim()
            )));
        }
        let r = p.distance();
        let v = eval(r)?;
        let ratio = v.abs() / identity_value;
        worst_ratio = worst_ratio.max(ratio);
        if ratio > 1.0 + tol {
            violations.push(i);
        }
        samples.push((r, v));
    }
    let passed = violations.is_empty();
    Ok(IdentityReport {
        identity_value,
        samples,
        worst_ratio,
        violations,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn sample_grid_is_deterministic_and_valid() {
        let g1 = sample_grid(2, 12, 7).unwrap();
        let g2 = sample_grid(2, 12, 7).unwrap();
        assert_eq!(g1.len(), 12);
        for (a, b) in g1.iter().zip(&g2) {
            assert_eq!(a.x, b.x);
            assert_eq!(a.y, b.y);
        }
        // Distances spread beyond |x|.
        for p in &g1 {
            assert!(p.distance() > p.x.abs());
        }
    }

    #[test]
    fn heat_kernel_peaks_at_identity_n1() {
        let f = SpectralFunction::Heat { gamma: 1.0, t: 1.0 };
        let grid = sample_grid(1, 8, 42).unwrap();
        let opts = QuadOptions::default().with_rel_tol(1e-8);
        let rep = max_at_identity_check(&f, 1, &grid, 1e-6, &opts).unwrap();
        assert!(rep.passed, "violations: {:?}", rep.violations);
        assert!(rep.worst_ratio < 1.0);
    }

    #[test]
    fn identity_value_matches_closed_form_n2() {
        let f = SpectralFunction::Heat { gamma: 1.0, t: 1.0 };
        let grid = sample_grid(2, 3, 5).unwrap();
        let opts = QuadOptions::default().with_rel_tol(1e-9);
        let rep = max_at_identity_check(&f, 2, &grid, 1e-6, &opts).unwrap();
        assert_relative_eq!(rep.identity_value, 0.5 * PI.sqrt(), max_relative = 1e-6);
    }

    #[test]
    fn non_heat_profiles_are_rejected() {
        let f = SpectralFunction::Indicator { lo: 0.0, hi: 1.0 };
        let grid = sample_grid(1, 2, 1).unwrap();
        let opts = QuadOptions::default();
        assert!(max_at_identity_check(&f, 1, &grid, 1e-6, &opts).is_err());
    }
}
