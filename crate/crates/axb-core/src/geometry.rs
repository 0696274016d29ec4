//! The group G = ℝ ⋉ ℝⁿ with law (x, y)·(x′, y′) = (x + x′, y + eˣy′),
//! its modular function, the radial distance R, and integrals over the
//! shells {(x, y) : R(x, y) ∈ [t + a, t + b]}.
//!
//! Throughout, integration against dx dy is right Haar measure and the
//! modular function is δ(x, y) = e^{−nx}. The distance to the identity
//! satisfies ch R = ch x + ½|y|²e^{−x}; its level sets are the geodesic
//! spheres used by the radial decompositions below.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadOptions};
use crate::specfun;

// ---- Stable elementary helpers ----

/// ln sh y for y > 0, overflow-free: y − ln 2 + ln(1 − e^{−2y}), with a
/// series below 1e-3 where the subtraction 1 − e^{−2y} loses all digits.
pub fn ln_sinh(y: f64) -> f64 {
    debug_assert!(y >= 0.0);
    if y < 1e-3 {
        y.ln() + (y * y / 6.0).ln_1p()
    } else {
        y - LN_2 + (-(-(2.0 * y)).exp()).ln_1p()
    }
}

/// acosh with a guard for arguments too large to square.
fn acosh_guarded(a: f64) -> f64 {
    if a > 1e150 {
        a.ln() + LN_2
    } else {
        a.max(1.0).acosh()
    }
}

/// Distance to the identity of the point (x, y) with |y|² = ysq.
pub fn radial_distance(x: f64, ysq: f64) -> f64 {
    acosh_guarded(x.cosh() + 0.5 * ysq * (-x).exp())
}

/// |y| of a point at height x on the sphere of radius R (needs |x| ≤ R):
/// |y| = 2 e^{x/2} √(sh((R+x)/2) sh((R−x)/2)).
pub fn y_norm_on_sphere(x: f64, r: f64) -> Result<f64> {
    if x.abs() > r {
        return Err(Error::invalid(format!("y_norm_on_sphere: |x| = {} > R = {r}", x.abs())));
    }
    if x.abs() == r {
        return Ok(0.0);
    }
    let ln_y = LN_2 + 0.5 * x + 0.5 * (ln_sinh(0.5 * (r + x)) + ln_sinh(0.5 * (r - x)));
    Ok(ln_y.exp())
}

// ---- Group points ----

/// A point (x, y) ∈ ℝ ⋉ ℝⁿ; the dimension n is `y.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPoint {
    pub x: f64,
    pub y: Vec<f64>,
}

impl GroupPoint {
    pub fn new(x: f64, y: Vec<f64>) -> Self {
        GroupPoint { x, y }
    }

    /// The identity element in dimension n.
    pub fn identity(n: usize) -> Self {
        GroupPoint {
            x: 0.0,
            y: vec![0.0; n],
        }
    }

    /// Dimension n of the abelian factor.
    pub fn dim(&self) -> usize {
        self.y.len()
    }

    /// Group product (x, y)·(x′, y′) = (x + x′, y + eˣy′).
    pub fn multiply(&self, other: &GroupPoint) -> Result<GroupPoint> {
        if self.dim() != other.dim() {
            return Err(Error::invalid(format!(
                "multiply: dimension mismatch {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        let e = self.x.exp();
        let y = self
            .y
            .iter()
            .zip(&other.y)
            .map(|(a, b)| a + e * b)
            .collect();
        Ok(GroupPoint {
            x: self.x + other.x,
            y,
        })
    }

    /// Group inverse (−x, −e^{−x}y).
    pub fn inverse(&self) -> GroupPoint {
        let e = (-self.x).exp();
        GroupPoint {
            x: -self.x,
            y: self.y.iter().map(|a| -e * a).collect(),
        }
    }

    /// Modular function δ(x, y) = e^{−nx}.
    pub fn modular(&self) -> f64 {
        (-(self.dim() as f64) * self.x).exp()
    }

    /// Distance R to the identity.
    pub fn distance(&self) -> f64 {
        radial_distance(self.x, self.y.iter().map(|v| v * v).sum())
    }
}

/// Distance between two points, d(p, q) = R(p⁻¹q).
pub fn distance_between(p: &GroupPoint, q: &GroupPoint) -> Result<f64> {
    Ok(p.inverse().multiply(q)?.distance())
}

// ---- Euclidean sphere constants ----

/// Volume of the unit ball in ℝⁿ.
pub fn ball_volume(n: u32) -> f64 {
    let nf = n as f64;
    std::f64::consts::PI.powf(0.5 * nf) / specfun::gamma(0.5 * nf + 1.0).expect("n/2+1 > 0")
}

/// Surface area of the unit sphere in ℝⁿ, n·V_n.
pub fn sphere_area(n: u32) -> f64 {
    n as f64 * ball_volume(n)
}

// ---- Radial surface weight ----

/// Weight W_n(R) with ∫_G F(R(x,y)) e^{−nx/2} dx dy = ∫₀^∞ F(R) W_n(R) dR.
///
/// W_n(R) = A_n 2^{n−2} sh R ∫_{−R}^{R} (sh((R+x)/2) sh((R−x)/2))^{(n−2)/2} dx,
/// where A_n is the unit-sphere area; for n = 2 this collapses to 4πR·shR.
/// For n = 1 the integrand has inverse-square-root endpoint singularities,
/// removed by the substitution x = R − w².
pub fn sphere_weight(n: u32, r: f64) -> Result<f64> {
    if n == 0 || !(r > 0.0) || !r.is_finite() {
        return Err(Error::invalid(format!("sphere_weight: need n >= 1, R > 0; got n = {n}, R = {r}")));
    }
    if n == 2 {
        // A_2 = 2π, interior integral is 2R.
        return Ok(4.0 * std::f64::consts::PI * r * ln_sinh(r).exp());
    }
    let p = 0.5 * (n as f64 - 2.0);
    let pref = sphere_area(n) * 2f64.powi(n as i32 - 2) * ln_sinh(r).exp();
    let opts = QuadOptions::default().with_rel_tol(1e-11);
    // Even in x: integrate over [0, R] and double.
    let inner = if n == 1 {
        // x = R − w².
        integrate(
            |w: f64| {
                let x = r - w * w;
                let ln_f = p * (ln_sinh(0.5 * (r + x)) + ln_sinh(0.5 * w * w));
                ln_f.exp() * 2.0 * w
            },
            0.0,
            r.sqrt(),
            &opts,
        )?
        .value
    } else {
        integrate(
            |x: f64| (p * (ln_sinh(0.5 * (r + x)) + ln_sinh(0.5 * (r - x)))).exp(),
            0.0,
            r,
            &opts,
        )?
        .value
    };
    Ok(pref * 2.0 * inner)
}

/// Right-Haar volume of the metric ball {R(x, y) ≤ r_cap}.
///
/// In the (x, R) parametrization the volume element carries e^{nx/2} instead
/// of the cancellation that produces [`sphere_weight`]:
/// vol = A_n 2^{n−2} ∫₀^{r_cap} sh R ∫_{−R}^{R} e^{nx/2} (sh((R+x)/2) sh((R−x)/2))^{(n−2)/2} dx dR.
pub fn haar_ball_volume(n: u32, r_cap: f64) -> Result<f64> {
    if n == 0 || !(r_cap > 0.0) || !r_cap.is_finite() {
        return Err(Error::invalid(format!(
            "haar_ball_volume: need n >= 1, r_cap > 0; got n = {n}, r_cap = {r_cap}"
        )));
    }
    let p = 0.5 * (n as f64 - 2.0);
    let nf = n as f64;
    let opts = QuadOptions::default().with_rel_tol(1e-10);
    let pref = sphere_area(n) * 2f64.powi(n as i32 - 2);
    let inner = |r: f64| -> f64 {
        // Fold x → −x: e^{nx/2} + e^{−nx/2} = 2 ch(nx/2); substitute x = r − w²
        // to absorb the endpoint singularity when n = 1.
        let res = integrate(
            |w: f64| {
                let x = r - w * w;
                let ln_f = p * (ln_sinh(0.5 * (r + x)) + ln_sinh(0.5 * w * w));
                2.0 * (0.5 * nf * x).cosh() * ln_f.exp() * 2.0 * w
            },
            0.0,
            r.sqrt(),
            &opts,
        );
        res.map(|o| o.value).unwrap_or(f64::NAN)
    };
    let out = integrate(|r: f64| ln_sinh(r).exp() * inner(r), 0.0, r_cap, &opts)?;
    if !out.value.is_finite() {
        return Err(Error::invalid("haar_ball_volume: inner quadrature failed".to_string()));
    }
    Ok(pref * out.value)
}

// ---- Shell integrals ----

/// Parameters of the shell integral
/// J = ∫_{t+a ≤ R(x,y) ≤ t+b} e^{−n(x+R)/2} (t + R)^{−m} dx dy.
#[derive(Debug, Clone, Copy)]
pub struct ShellSpec {
    pub n: u32,
    pub t: f64,
    /// Shell offsets: R runs over [t + a, t + b].
    pub a: f64,
    pub b: f64,
    /// Exponent of the (t + R)^{−m} factor.
    pub m: u32,
}

impl ShellSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("shell: need n >= 1"));
        }
        if !(self.a < self.b) || !self.a.is_finite() || !self.b.is_finite() {
            return Err(Error::invalid(format!("shell: need a < b, got [{}, {}]", self.a, self.b)));
        }
        if !(self.t + self.a > 0.0) {
            return Err(Error::invalid(format!(
                "shell: inner radius t + a = {} must be positive",
                self.t + self.a
            )));
        }
        // The m = 0 growth statement is only claimed for wide separation of
        // scales; enforce the stricter hypothesis there.
        if self.m == 0 && !(self.t > 1.0_f64.max(2.0 * self.a.abs()).max(self.b)) {
            return Err(Error::invalid(format!(
                "shell: m = 0 needs t > max(1, 2|a|, b), got t = {}",
                self.t
            )));
        }
        Ok(())
    }
}

/// J as above; see [`shell_integral_probed`] for the computation.
pub fn shell_integral(spec: &ShellSpec) -> Result<f64> {
    shell_integral_probed(spec, &|_, _, _| {})
}

/// Shell integral with an observation hook.
///
/// Writing the y-integral in spherical shells and changing variables from
/// |y| to R turns J into
/// A_n 2^{n−2} ∬ (sh((R+x)/2) sh((R−x)/2))^{(n−2)/2} sh R · e^{−nR/2}(t+R)^{−m} dR dx
/// over {|x| ≤ R, R ∈ [t+a, t+b]}: every e^x power cancels exactly, which is
/// what keeps the integrand in range for large t. The integrand is even in x.
/// For n = 1 the lower limit R = |x| is an inverse-square-root singularity,
/// handled by R = |x| + w². `probe` receives (x, R, |y|) at every quadrature
/// node, which lets callers audit the region actually visited.
pub fn shell_integral_probed(spec: &ShellSpec, probe: &dyn Fn(f64, f64, f64)) -> Result<f64> {
    spec.validate()?;
    let n = spec.n;
    let nf = n as f64;
    let p = 0.5 * (nf - 2.0);
    let m = spec.m as f64;
    let t = spec.t;
    let (r_lo, r_hi) = (t + spec.a, t + spec.b);
    let pref = sphere_area(n) * 2f64.powi(n as i32 - 2);
    let opts_inner = QuadOptions::default().with_rel_tol(1e-11);
    let opts_outer = QuadOptions::default().with_rel_tol(1e-10);

    // ln of the (R, x) integrand, minus the Jacobian of any substitution.
    let ln_g = |x: f64, r: f64, lnsh_low: f64| -> f64 {
        p * (ln_sinh(0.5 * (r + x)) + lnsh_low) + ln_sinh(r) - 0.5 * nf * r - m * (t + r).ln()
    };
    let observe = |x: f64, r: f64, lnsh_low: f64| {
        let ln_y = LN_2 + 0.5 * x + 0.5 * (ln_sinh(0.5 * (r + x)) + lnsh_low);
        probe(x, r, ln_y.exp());
    };

    let stash: std::cell::RefCell<Option<Error>> = std::cell::RefCell::new(None);
    let inner = |x: f64| -> f64 {
        let lo = x.max(r_lo);
        if lo >= r_hi {
            return 0.0;
        }
        let res = if n == 1 && x > r_lo {
            integrate(
                |w: f64| {
                    let r = x + w * w;
                    let lnsh_low = ln_sinh(0.5 * w * w);
                    observe(x, r, lnsh_low);
                    ln_g(x, r, lnsh_low).exp() * 2.0 * w
                },
                0.0,
                (r_hi - x).sqrt(),
                &opts_inner,
            )
        } else {
            integrate(
                |r: f64| {
                    let lnsh_low = ln_sinh(0.5 * (r - x));
                    observe(x, r, lnsh_low);
                    ln_g(x, r, lnsh_low).exp()
                },
                lo,
                r_hi,
                &opts_inner,
            )
        };
        match res {
            Ok(o) => o.value,
            Err(e) => {
                stash.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };

    // Outer integral over x ≥ 0 (doubled), split where the inner limits kink.
    let mut total = 0.0;
    for (xa, xb) in [(0.0, r_lo), (r_lo, r_hi)] {
        total += integrate(&inner, xa, xb, &opts_outer)?.value;
    }
    if let Some(e) = stash.into_inner() {
        return Err(e);
    }
    Ok(2.0 * pref * total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pt(x: f64, y: &[f64]) -> GroupPoint {
        GroupPoint::new(x, y.to_vec())
    }

    #[test]
    fn group_law_and_inverse() {
        let p = pt(0.7, &[1.0, -2.0]);
        let q = pt(-1.3, &[0.5, 0.25]);
        let r = pt(2.1, &[-0.75, 3.0]);
        let left = p.multiply(&q).unwrap().multiply(&r).unwrap();
        let right = p.multiply(&q.multiply(&r).unwrap()).unwrap();
        assert_relative_eq!(left.x, right.x, max_relative = 1e-14);
        for i in 0..2 {
            assert_relative_eq!(left.y[i], right.y[i], max_relative = 1e-13, epsilon = 1e-14);
        }
        let e = p.multiply(&p.inverse()).unwrap();
        assert!(e.x.abs() < 1e-14 && e.y.iter().all(|v| v.abs() < 1e-13));
        assert!(p.multiply(&pt(0.0, &[0.0])).is_err());
    }

    #[test]
    fn modular_is_a_homomorphism() {
        let p = pt(0.9, &[2.0, 0.1, -1.0]);
        let q = pt(-0.4, &[1.0, 1.0, 1.0]);
        let pq = p.multiply(&q).unwrap();
        assert_relative_eq!(pq.modular(), p.modular() * q.modular(), max_relative = 1e-13);
    }

    #[test]
    fn distance_properties() {
        let p = pt(1.2, &[0.3, -0.4]);
        // R(p) = R(p⁻¹).
        assert_relative_eq!(p.distance(), p.inverse().distance(), max_relative = 1e-13);
        // Identity at distance zero.
        assert_eq!(GroupPoint::identity(3).distance(), 0.0);
        // Round trip through the sphere parameterization.
        let (x, r) = (0.8, 2.5);
        let yn = y_norm_on_sphere(x, r).unwrap();
        assert_relative_eq!(radial_distance(x, yn * yn), r, max_relative = 1e-12);
        // Guarded acosh: huge arguments stay finite and accurate.
        let big = radial_distance(500.0, 0.0);
        assert_relative_eq!(big, 500.0, max_relative = 1e-14);
        // ch R ≈ ½|y|² for x = 0, |y| huge: R = ln|y|².
        let big = radial_distance(0.0, 1e200);
        assert_relative_eq!(big, 200.0 * 10f64.ln(), max_relative = 1e-14);
    }

    #[test]
    fn ball_constants() {
        assert_relative_eq!(ball_volume(1), 2.0, max_relative = 1e-14);
        assert_relative_eq!(ball_volume(2), std::f64::consts::PI, max_relative = 1e-14);
        assert_relative_eq!(
            ball_volume(3),
            4.0 * std::f64::consts::PI / 3.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn haar_ball_volume_limits() {
        // Small balls are Euclidean: vol ≈ V_{n+1} r^{n+1}.
        let v = haar_ball_volume(1, 0.1).unwrap();
        assert_relative_eq!(v, std::f64::consts::PI * 0.01, max_relative = 5e-3);
        let v = haar_ball_volume(2, 0.1).unwrap();
        assert_relative_eq!(
            v,
            4.0 * std::f64::consts::PI / 3.0 * 1e-3,
            max_relative = 5e-3
        );
        // n = 2 closed form: vol(R ≤ c) = π (sh 2c − 2c).
        let v = haar_ball_volume(2, 1.0).unwrap();
        assert_relative_eq!(
            v,
            std::f64::consts::PI * (2f64.sinh() - 2.0),
            max_relative = 1e-8
        );
    }

    #[test]
    fn sphere_weight_values() {
        // n = 1 at R = 2 against ∫_{−2}^{2}(ch 2 − ch x)^{−1/2} dx computed
        // in 30-digit arithmetic: W_1(2) = sh 2 · √2 · 3.5349873431245558938.
        let w = sphere_weight(1, 2.0).unwrap();
        let want = 2.0f64.sinh() * std::f64::consts::SQRT_2 * 3.5349873431245558938;
        assert_relative_eq!(w, want, max_relative = 1e-9);
        // n = 2 closed form.
        let w = sphere_weight(2, 3.0).unwrap();
        assert_relative_eq!(w, 4.0 * std::f64::consts::PI * 3.0 * 3.0f64.sinh(), max_relative = 1e-13);
        // Large-R behavior: e^{−nR/2} W_n(R) / R approaches the sphere area.
        for n in [1u32, 2, 3] {
            let r = 60.0;
            let v = (-0.5 * n as f64 * r).exp() * sphere_weight(n, r).unwrap() / r;
            assert_relative_eq!(v, sphere_area(n), max_relative = 0.05);
        }
    }

    #[test]
    fn shell_integral_reference_values() {
        // n = 2, t = 20, shell [t−1, t+1]; references from 30-digit arithmetic.
        let j0 = shell_integral(&ShellSpec { n: 2, t: 20.0, a: -1.0, b: 1.0, m: 0 }).unwrap();
        assert_relative_eq!(j0, 251.32741228718345719, max_relative = 1e-8);
        let j2 = shell_integral(&ShellSpec { n: 2, t: 20.0, a: -1.0, b: 1.0, m: 2 }).unwrap();
        assert_relative_eq!(j2, 0.15704687091306468932, max_relative = 1e-8);
    }

    #[test]
    fn shell_integral_matches_weight_route_for_m0() {
        // With m = 0 the shell integral is ∫ e^{−nR/2} W_n(R) dR.
        for n in [1u32, 3] {
            let spec = ShellSpec { n, t: 12.0, a: -0.5, b: 0.75, m: 0 };
            let j = shell_integral(&spec).unwrap();
            let via_weight = integrate(
                |r: f64| {
                    (-0.5 * n as f64 * r).exp() * sphere_weight(n, r).unwrap()
                },
                12.0 - 0.5,
                12.0 + 0.75,
                &QuadOptions::default().with_rel_tol(1e-9),
            )
            .unwrap()
            .value;
            assert_relative_eq!(j, via_weight, max_relative = 1e-6);
        }
    }

    #[test]
    fn shell_probe_sees_bounded_radii() {
        let spec = ShellSpec { n: 2, t: 15.0, a: -1.0, b: 1.0, m: 0 };
        let count = std::cell::Cell::new(0usize);
        let ok = std::cell::Cell::new(true);
        shell_integral_probed(&spec, &|x, r, ynorm| {
            count.set(count.get() + 1);
            // |y| ≤ 2 e^{(x + R)/2} on the sphere of radius R.
            if ynorm > 2.0 * (0.5 * (x + r)).exp() * (1.0 + 1e-12) {
                ok.set(false);
            }
            if !(r >= 14.0 - 1e-9 && r <= 16.0 + 1e-9) {
                ok.set(false);
            }
        })
        .unwrap();
        assert!(count.get() > 100);
        assert!(ok.get());
    }

    #[test]
    fn shell_validation() {
        assert!(ShellSpec { n: 0, t: 10.0, a: -1.0, b: 1.0, m: 0 }.validate().is_err());
        assert!(ShellSpec { n: 1, t: 10.0, a: 1.0, b: -1.0, m: 0 }.validate().is_err());
        assert!(ShellSpec { n: 1, t: 0.5, a: -1.0, b: 1.0, m: 2 }.validate().is_err());
        // m = 0 demands scale separation.
        assert!(ShellSpec { n: 1, t: 1.5, a: -1.0, b: 2.0, m: 0 }.validate().is_err());
        assert!(ShellSpec { n: 1, t: 10.0, a: -1.0, b: 2.0, m: 0 }.validate().is_ok());
    }
}

