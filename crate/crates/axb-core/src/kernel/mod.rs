//! Convolution kernels of functions of the distinguished Laplacian.
//!
//! Every kernel here is radial in the factored sense
//! k_f(x, y) = e^{−nx/2} κ(R(x, y)): the x-dependence is the fixed modular
//! half-power and κ depends on the point only through the distance. The
//! radial factor is reconstructed from the spectral profile by
//!
//!   κ(R) = (ic_l / scale_n) · 2 ∫₀^∞ f(s) · s · T_n(R, s) ds,
//!
//! with T_n the radial building block of [`crate::plancherel::radial_part`].
//! At R = 0 this reduces to ∫ f(√u) ρ_n(u) du, the identity value.
//!
//! Submodules: [`heat`] and [`resolvent`] for the norm integrals with their
//! asymptotic regimes, [`wave`] for the propagator kernels through the
//! derivative expansion, [`identity`] for the positivity diagnostic.

pub mod heat;
pub mod identity;
pub mod resolvent;
pub mod wave;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::GroupPoint;
use crate::plancherel::{self, kernel_scale, leading_coefficient, radial_part, split_n};
use crate::quadrature::{integrate, Psi, QuadOptions};

pub use identity::{max_at_identity_check, IdentityReport};
pub use wave::{
    plateau_scan, shell_norm, wave_kernel, wave_l1_norm, wave_l2_norm, wave_radial_direct,
    MkCacheSet, PlateauReport, WaveContext, WaveKind, WaveL1, WavePart,
};

/// Spectral profiles used across the norm computations, as functions of the
/// spectral variable u ≥ 0 of the Laplacian.
#[derive(Debug, Clone)]
pub enum SpectralFunction {
    Heat { gamma: f64, t: f64 },
    Resolvent { z: Complex64, s: Complex64 },
    Wave { kind: WaveKind, t: f64, psi: Psi },
    /// Indicator of [lo, hi] in u.
    Indicator { lo: f64, hi: f64 },
}

impl SpectralFunction {
    pub fn validate(&self, n: u32) -> Result<()> {
        split_n(n)?;
        match self {
            SpectralFunction::Heat { gamma, t } => {
                if !(*gamma > 0.0) || !(*t > 0.0) {
                    return Err(Error::invalid(format!(
                        "heat profile needs gamma > 0, t > 0; got ({gamma}, {t})"
                    )));
                }
            }
            SpectralFunction::Resolvent { z, s } => {
                resolvent::check_resolvent_params(n, *z, *s)?;
            }
            SpectralFunction::Wave { t, psi, .. } => {
                if !t.is_finite() || *t < 0.0 {
                    return Err(Error::invalid(format!("wave profile needs t >= 0; got {t}")));
                }
                psi.validate(n)?;
            }
            SpectralFunction::Indicator { lo, hi } => {
                if !(0.0 <= *lo && *lo < *hi) {
                    return Err(Error::invalid(format!(
                        "indicator needs 0 <= lo < hi; got ({lo}, {hi})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Value at spectral point u.
    pub fn eval(&self, u: f64) -> Complex64 {
        match self {
            SpectralFunction::Heat { gamma, t } => {
                Complex64::new((-t * u.powf(*gamma)).exp(), 0.0)
            }
            SpectralFunction::Resolvent { z, s } => {
                (Complex64::new(u, 0.0) - z).powc(-s)
            }
            SpectralFunction::Wave { kind, t, psi } => {
                let sq = u.max(0.0).sqrt();
                let p = psi.eval(sq);
                match kind {
                    WaveKind::Exp => Complex64::from_polar(p, t * sq),
                    WaveKind::Cos => Complex64::new(p * (t * sq).cos(), 0.0),
                    WaveKind::Sinc => {
                        let v = if sq.abs() < 1e-8 {
                            *t
                        } else {
                            (t * sq).sin() / sq
                        };
                        Complex64::new(p * v, 0.0)
                    }
                }
            }
            SpectralFunction::Indicator { lo, hi } => {
                if u >= *lo && u <= *hi {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
        }
    }
}

/// Identity value ∫₀^∞ f(u) ρ_n(u) du of a nonnegative profile. For f ≥ 0
/// this equals the uniform norm of the modular-corrected kernel.
pub fn kernel_identity_value<F: Fn(f64) -> f64>(n: u32, f: F, opts: &QuadOptions) -> Result<f64> {
    plancherel::spectral_integral(n, f, opts)
}

/// Upper bound ∫₀^∞ |f(u)| ρ_n(u) du for signed or complex profiles.
pub fn kernel_identity_bound(n: u32, f: &SpectralFunction, opts: &QuadOptions) -> Result<f64> {
    f.validate(n)?;
    plancherel::spectral_integral(n, |u| f.eval(u).norm(), opts)
}

/// L² norm of the kernel via the spectral side:
/// ‖k_f‖₂ = (∫₀^∞ |f(u)|² ρ_n(u) du)^{1/2}.
pub fn kernel_l2_norm(n: u32, f: &SpectralFunction, opts: &QuadOptions) -> Result<f64> {
    f.validate(n)?;
    let sq = plancherel::spectral_integral(n, |u| f.eval(u).norm_sqr(), opts)?;
    Ok(sq.sqrt())
}

/// Radial factor κ(R) of the kernel of a spectral profile given as a function
/// of the frequency s = √u; the full kernel is e^{−nx/2} κ(R).
///
/// `s_max` truncates the frequency integral; the caller owns the tail bound.
pub fn pointwise_radial_kernel<F: Fn(f64) -> Complex64>(
    n: u32,
    f: F,
    r: f64,
    s_max: f64,
    opts: &QuadOptions,
) -> Result<Complex64> {
    split_n(n)?;
    if !(r >= 0.0) || !(s_max > 0.0) {
        return Err(Error::invalid(format!(
            "pointwise_radial_kernel: bad (r, s_max) = ({r}, {s_max})"
        )));
    }
    let front = 2.0 * leading_coefficient(n)? / kernel_scale(n)?;
    let radial_err = std::cell::RefCell::new(None);
    let g = |s: f64| -> Complex64 {
        match radial_part(n, r, s) {
            Ok(t) => f(s) * (s * t),
            Err(e) => {
                let mut slot = radial_err.borrow_mut();
                if slot.is_none() {
                    *slot = Some(e);
                }
                Complex64::new(f64::NAN, f64::NAN)
            }
        }
    };
    let out = integrate(g, 0.0, s_max, opts);
    if let Some(e) = radial_err.into_inner() {
        return Err(e);
    }
    Ok(out? .value * front)
}

/// Kernel value at a group point, through the radial factorization.
pub fn kernel_at_point<F: Fn(f64) -> Complex64>(
    n: u32,
    f: F,
    p: &GroupPoint,
    s_max: f64,
    opts: &QuadOptions,
) -> Result<Complex64> {
    if p.dim() != n as usize {
        return Err(Error::invalid(format!(
            "point dimension {} != n = {n}",
            p.dim()
        )));
    }
    let kappa = pointwise_radial_kernel(n, f, p.distance(), s_max, opts)?;
    Ok(kappa * (-(n as f64) * p.x / 2.0).exp())
}

/// Interpolated L^p → L^q operator bound from the uniform and L² kernel
/// norms: k_inf^{1−2/r′} · k_2^{2/r′}, where 1/r = 1/p − 1/q and r′ is the
/// conjugate exponent of r. Requires 1 < p < q and r′ ≥ 2.
pub fn lp_lq_bound(k_inf: f64, k_2: f64, p: f64, q: f64) -> Result<f64> {
    if !(1.0 < p && p < q) {
        return Err(Error::invalid(format!("need 1 < p < q; got p = {p}, q = {q}")));
    }
    if !(k_inf >= 0.0 && k_2 >= 0.0) {
        return Err(Error::invalid("norms must be nonnegative".to_string()));
    }
    let inv_r = 1.0 / p - 1.0 / q;
    if !(inv_r >= 0.5) {
        return Err(Error::invalid(format!(
            "interpolation needs 1/p - 1/q >= 1/2; got {inv_r}"
        )));
    }
    // 1/r + 1/r' = 1.
    let r = 1.0 / inv_r;
    let theta = 2.0 * (1.0 - 1.0 / r); // = 2/r'
    Ok(k_inf.powf(1.0 - theta) * k_2.powf(theta))
}
