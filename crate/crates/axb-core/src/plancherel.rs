//! Plancherel density of the distinguished Laplacian and its cross-checks.
//!
//! Three independent routes to the same density ρ_n(u) on the spectral
//! half-line:
//!
//! * [`rho_closed`]: product formula, exact up to elementary functions;
//! * [`rho_via_c`]: |Γ(n/2 + iv)/Γ(iv)|² / v with v = √u, through the
//!   complex log-gamma;
//! * [`rho_via_kernel`]: the radial kernel reconstruction, integrating the
//!   derivative expansion of order l = ⌊n/2⌋ against the volume weight.
//!
//! The kernel route carries a dimension-dependent normalization
//! [`kernel_scale`]; it is exact for n ≤ 2 and calibrated once at u = 1
//! otherwise. The same constants feed the propagator kernels.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::ln_sinh;
use crate::qkl;
use crate::quadrature::{integrate, QuadOptions};
use crate::specfun;

/// Largest supported dimension parameter n (the group is (n+1)-dimensional).
pub const MAX_N: u32 = 12;

/// Split n into (l, is_even) with l = ⌊n/2⌋.
pub fn split_n(n: u32) -> Result<(u32, bool)> {
    if n == 0 || n > MAX_N {
        return Err(Error::invalid(format!("n = {n} out of range 1..={MAX_N}")));
    }
    Ok((n / 2, n % 2 == 0))
}

/// Closed-form density.
///
/// n = 2l:     ρ(u) = √u · ∏_{j=1}^{l−1} (j² + u)
/// n = 2l+1:   ρ(u) = th(π√u) · ∏_{j=0}^{l−1} ((j+½)² + u)
pub fn rho_closed(n: u32, u: f64) -> Result<f64> {
    let (l, even) = split_n(n)?;
    if !u.is_finite() || u < 0.0 {
        return Err(Error::invalid(format!("rho_closed: u = {u} must be >= 0")));
    }
    let v = u.sqrt();
    if even {
        let mut p = v;
        for j in 1..l {
            p *= (j * j) as f64 + u;
        }
        Ok(p)
    } else {
        let mut p = (PI * v).tanh();
        for j in 0..l {
            let h = j as f64 + 0.5;
            p *= h * h + u;
        }
        Ok(p)
    }
}

/// Density through the meromorphic factor: ρ(u) = |Γ(n/2 + iv)/Γ(iv)|²/v,
/// v = √u. Requires u > 0.
pub fn rho_via_c(n: u32, u: f64) -> Result<f64> {
    split_n(n)?;
    if !(u > 0.0) {
        return Err(Error::invalid(format!("rho_via_c: u = {u} must be > 0")));
    }
    let v = u.sqrt();
    let top = specfun::log_gamma(Complex64::new(n as f64 / 2.0, v))?;
    let bot = specfun::log_gamma(Complex64::new(0.0, v))?;
    Ok((2.0 * (top.re - bot.re)).exp() / v)
}

/// Small-u slope: ρ_n(u) → K_n √u as u → 0.
pub fn rho_small_u_constant(n: u32) -> Result<f64> {
    let (l, even) = split_n(n)?;
    if even {
        let mut k = 1.0;
        for j in 1..l {
            k *= (j * j) as f64;
        }
        Ok(k)
    } else {
        let mut k = PI;
        for j in 0..l {
            let h = j as f64 + 0.5;
            k *= h * h;
        }
        Ok(k)
    }
}

/// Leading constant of the radial kernel reconstruction:
/// ic_l = (−1)^l 2^{−1−n/2} π^{−n/2} / (π Γ(l+1−n/2)).
///
/// The gamma factor is Γ(1) = 1 for even n and Γ(½) = √π for odd n.
pub fn leading_coefficient(n: u32) -> Result<f64> {
    let (l, even) = split_n(n)?;
    let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
    let base = sign * 2f64.powf(-1.0 - n as f64 / 2.0) * PI.powf(-(n as f64) / 2.0) / PI;
    Ok(if even { base } else { base / PI.sqrt() })
}

fn radial_opts(n: u32, r: f64) -> QuadOptions {
    // The absolute floor tracks the e^{−nR/2} scale of T_n and sits above
    // the cancellation noise of the oscillatory integrand at large s, where
    // T_n is exponentially small and a relative target is unreachable.
    QuadOptions {
        rel_tol: 1e-10,
        abs_tol: 1e-13 * (-(n as f64) * r / 2.0).exp().max(1e-250),
        max_panels: 20000,
    }
}

/// The radial building block
/// T_n(R, s) = ∫_R^∞ D^l sin(s·) (v) · (ch v − ch R)^{l − n/2} dv,
/// l = ⌊n/2⌋. The exponent is 0 for even n and −½ for odd n; the
/// odd case is regularized by v = R + w².
pub fn radial_part(n: u32, r: f64, s: f64) -> Result<f64> {
    let (l, even) = split_n(n)?;
    if !(r >= 0.0) || !s.is_finite() {
        return Err(Error::invalid(format!("radial_part: bad (r, s) = ({r}, {s})")));
    }
    let table = qkl::cached_table(l as usize)?;
    let opts = radial_opts(n, r);
    // Integrand decays like e^{−nv/2}; cut where the tail is below 1e−30
    // relative to the e^{−nR/2} scale of the answer.
    let v_max = r + 160.0 / n as f64;
    if even {
        let f = |v: f64| 0.5 * table.eval_d(s, v).im;
        Ok(integrate(f, r, v_max, &opts)?.value)
    } else {
        let w_max = (v_max - r).sqrt();
        let f = |w: f64| {
            let v = r + w * w;
            let ln_den = 0.5
                * (std::f64::consts::LN_2
                    + ln_sinh((2.0 * r + w * w) / 2.0)
                    + ln_sinh(w * w / 2.0));
            0.5 * table.eval_d(s, v).im * 2.0 * w * (-ln_den).exp()
        };
        Ok(integrate(f, 0.0, w_max, &opts)?.value)
    }
}

/// Normalization relating the kernel route to the closed form:
/// ic_l · T_n(0, √u) = kernel_scale(n) · ρ_n(u).
///
/// Exact values for n ≤ 2 (1/(4π) and 1/(4π²)); for larger n the constant is
/// calibrated once at u = 1 and cached.
pub fn kernel_scale(n: u32) -> Result<f64> {
    split_n(n)?;
    match n {
        1 => return Ok(1.0 / (4.0 * PI)),
        2 => return Ok(1.0 / (4.0 * PI * PI)),
        _ => {}
    }
    static CACHE: OnceLock<Mutex<HashMap<u32, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&s) = cache.lock().expect("scale cache poisoned").get(&n) {
        return Ok(s);
    }
    let raw = leading_coefficient(n)? * radial_part(n, 0.0, 1.0)?;
    let s = raw / rho_closed(n, 1.0)?;
    cache.lock().expect("scale cache poisoned").insert(n, s);
    Ok(s)
}

/// Density reconstructed from the radial kernel:
/// ρ(u) = ic_l · T_n(0, √u) / kernel_scale(n).
pub fn rho_via_kernel(n: u32, u: f64) -> Result<f64> {
    split_n(n)?;
    if !(u >= 0.0) {
        return Err(Error::invalid(format!("rho_via_kernel: u = {u} must be >= 0")));
    }
    let raw = leading_coefficient(n)? * radial_part(n, 0.0, u.sqrt())?;
    Ok(raw / kernel_scale(n)?)
}

/// Spectral integral ∫_0^∞ f(u) ρ_n(u) du of a decaying profile.
///
/// This is the value at the identity of the convolution kernel of f applied
/// to the Laplacian, up to the fixed group normalization; it is the workhorse
/// behind the heat and resolvent norms.
pub fn spectral_integral<F: Fn(f64) -> f64>(n: u32, f: F, opts: &QuadOptions) -> Result<f64> {
    split_n(n)?;
    let g = |u: f64| -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        f(u) * rho_closed(n, u).unwrap_or(f64::NAN)
    };
    crate::quadrature::integrate_half_line(g, opts).map(|o| o.value)
}
