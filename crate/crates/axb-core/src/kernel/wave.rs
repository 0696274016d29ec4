//! Wave-propagator kernels through the derivative expansion.
//!
//! For the three variants
//!   exp:  ψ(√𝓛) e^{it√𝓛},   cos: ψ(√𝓛) cos(t√𝓛),   sinc: ψ(√𝓛) sin(t√𝓛)/√𝓛,
//! the kernel at distance R is a v-integral of the q_{k,l} expansion against
//! half-line Fourier transforms m̌_p(ξ) = ∫₀^∞ ψ(s) s^p e^{iξs} ds:
//!
//!   k_t(x,y) = pref · e^{−nx/2} ∫_R^∞ (ch v − ch R)^{l−n/2}
//!              Σ_k q_{k,l}(v) Σ_c coef_c(k) m̌_{p(k)}(arg_c(v)) dv,
//!
//! with argument columns (t+v, t−v, v−t, −t−v), signs per variant, power
//! p = k+1 (exp, cos) or k (sinc), and prefactor −i·ic_l, −i·ic_l/2, −ic_l/2
//! respectively, all divided by the global kernel scale. The split k = pref·(I₁ − I₂)
//! keeps the incoming column t+v in I₁ and the rest in I₂. With ψ even, pairing
//! t+v with −t−v would cancel the 1/ξ endpoint term of m̌ and hide the 1/t
//! decay of the far part, so I₁ is the single column whose size is genuinely
//! governed by the endpoint behaviour of m̌.
//!
//! The plateau function 𝓘 = 𝓝 ∗ 𝓜, with 𝓝(τ) = (e^τ−1)^{l−n/2} e^{−τl} and
//! 𝓜 built from the limits a_{k,l}, is the t → ∞ profile of I₂:
//! k_t(−R, 0) → −pref · 2^{n/2−l} · 𝓘(t−R). Its non-vanishing interval
//! locates the shell R ∈ [t−β, t−α] where the kernel stays of size ~1,
//! which is what drives the linear growth of ‖k_t‖₁.

use std::cell::RefCell;
use std::f64::consts::LN_2;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{haar_ball_volume, ln_sinh, sphere_weight, GroupPoint};
use crate::plancherel::{kernel_scale, leading_coefficient, rho_closed, split_n};
use crate::qkl::{self, QklTable};
use crate::quadrature::{integrate, integrate_half_line, MkCache, Psi, QuadOptions};

/// Propagator variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveKind {
    Exp,
    Cos,
    Sinc,
}

impl WaveKind {
    pub fn label(&self) -> &'static str {
        match self {
            WaveKind::Exp => "exp",
            WaveKind::Cos => "cos",
            WaveKind::Sinc => "sinc",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "exp" => Ok(WaveKind::Exp),
            "cos" => Ok(WaveKind::Cos),
            "sinc" => Ok(WaveKind::Sinc),
            _ => Err(Error::invalid(format!("unknown wave kind '{s}'"))),
        }
    }
}

/// Which part of the decomposition k = pref·(I₁ − I₂) to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WavePart {
    Full,
    I1,
    I2,
}

/// Shared, immutable set of cached transforms m̌_p for p = 0..=max_power.
/// Building one is the expensive step; contexts for different kinds and
/// times share it.
pub struct MkCacheSet {
    psi: Psi,
    caches: Vec<MkCache>,
}

impl MkCacheSet {
    pub fn build(psi: &Psi, max_power: u32, xi_max: f64) -> Result<Self> {
        psi.validate(1)?;
        let mut caches = Vec::with_capacity(max_power as usize + 1);
        for p in 0..=max_power {
            caches.push(MkCache::new(psi, p, xi_max)?);
        }
        Ok(MkCacheSet {
            psi: psi.clone(),
            caches,
        })
    }

    pub fn eval(&self, power: u32, xi: f64) -> Result<Complex64> {
        self.caches
            .get(power as usize)
            .ok_or_else(|| Error::invalid(format!("mk cache missing power {power}")))?
            .eval(xi)
    }

    pub fn psi(&self) -> &Psi {
        &self.psi
    }
}

/// Evaluation context for one (kind, ψ, n, t).
pub struct WaveContext {
    pub kind: WaveKind,
    pub n: u32,
    pub t: f64,
    l: u32,
    table: Arc<QklTable>,
    caches: Arc<MkCacheSet>,
    pref: Complex64,
    rel_tol: f64,
}

fn prefactor(kind: WaveKind, n: u32) -> Result<Complex64> {
    let ic = leading_coefficient(n)? / kernel_scale(n)?;
    Ok(match kind {
        WaveKind::Exp => Complex64::new(0.0, -ic),
        WaveKind::Cos => Complex64::new(0.0, -0.5 * ic),
        WaveKind::Sinc => Complex64::new(-0.5 * ic, 0.0),
    })
}

/// Column coefficients over the arguments (t+v, t−v, v−t, −t−v) for row k.
fn columns(kind: WaveKind, part: WavePart, k: usize) -> [f64; 4] {
    let s = if k % 2 == 0 { 1.0 } else { -1.0 };
    match (kind, part) {
        (WaveKind::Exp, WavePart::Full) => [1.0, -s, 0.0, 0.0],
        (WaveKind::Exp, WavePart::I1) => [1.0, 0.0, 0.0, 0.0],
        (WaveKind::Exp, WavePart::I2) => [0.0, s, 0.0, 0.0],
        (WaveKind::Cos, WavePart::Full) => [1.0, -s, 1.0, -s],
        (WaveKind::Cos, WavePart::I1) => [1.0, 0.0, 0.0, 0.0],
        (WaveKind::Cos, WavePart::I2) => [0.0, s, -1.0, s],
        (WaveKind::Sinc, WavePart::Full) => [1.0, -s, -1.0, s],
        (WaveKind::Sinc, WavePart::I1) => [1.0, 0.0, 0.0, 0.0],
        (WaveKind::Sinc, WavePart::I2) => [0.0, s, 1.0, -s],
    }
}

impl WaveContext {
    /// Build a context with its own cache set covering distances up to
    /// `r_hint` (larger distances still work through the direct fallback,
    /// just slower).
    pub fn new(kind: WaveKind, psi: &Psi, n: u32, t: f64, r_hint: f64) -> Result<Self> {
        let (l, _) = split_n(n)?;
        let xi_max = t + r_hint.max(1.0) + 160.0 / n as f64 + 2.0;
        let caches = Arc::new(MkCacheSet::build(psi, l + 1, xi_max)?);
        Self::with_caches(kind, n, t, caches)
    }

    pub fn with_caches(kind: WaveKind, n: u32, t: f64, caches: Arc<MkCacheSet>) -> Result<Self> {
        let (l, _) = split_n(n)?;
        if !t.is_finite() || t < 0.0 {
            return Err(Error::invalid(format!("wave context needs t >= 0; got {t}")));
        }
        caches.psi().validate(n)?;
        Ok(WaveContext {
            kind,
            n,
            t,
            l,
            table: qkl::cached_table(l as usize)?,
            caches,
            pref: prefactor(kind, n)?,
            rel_tol: 1e-8,
        })
    }

    fn power(&self, k: usize) -> u32 {
        match self.kind {
            WaveKind::Sinc => k as u32,
            _ => k as u32 + 1,
        }
    }

    fn combo(&self, k: usize, v: f64, part: WavePart) -> Result<Complex64> {
        let t = self.t;
        let args = [t + v, t - v, v - t, -t - v];
        let coefs = columns(self.kind, part, k);
        let p = self.power(k);
        let mut acc = Complex64::new(0.0, 0.0);
        for (arg, c) in args.iter().zip(coefs) {
            if c != 0.0 {
                acc += self.caches.eval(p, *arg)? * c;
            }
        }
        Ok(acc)
    }

    /// ∫_R^∞ (ch v − ch R)^{l−n/2} Σ_k q_k(v)·combo_k(v) dv, without the
    /// prefactor.
    fn v_integral(&self, r: f64, part: WavePart) -> Result<Complex64> {
        if !(r >= 0.0) {
            return Err(Error::invalid(format!("v_integral: R = {r} must be >= 0")));
        }
        let nf = self.n as f64;
        let lf = self.l as f64;
        let expo = lf - nf / 2.0;
        let v_max = r + 160.0 / nf;
        let opts = QuadOptions {
            rel_tol: self.rel_tol,
            abs_tol: 1e-16 * (-nf * r / 2.0).exp().max(1e-270),
            max_panels: 8000,
        };
        let err_slot: RefCell<Option<Error>> = RefCell::new(None);
        let weighted = |v: f64, vmr: f64, ln_jac: f64| -> Complex64 {
            let lnw = expo * (LN_2 + ln_sinh(0.5 * (v + r)) + ln_sinh(0.5 * vmr)) - lf * v + ln_jac;
            let w = lnw.exp();
            if w == 0.0 || !w.is_finite() {
                return Complex64::new(if w.is_finite() { 0.0 } else { f64::NAN }, 0.0);
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..=self.l as usize {
                match self.combo(k, v, part) {
                    Ok(c) => acc += self.table.eval_q_scaled(k, v) * c,
                    Err(e) => {
                        let mut slot = err_slot.borrow_mut();
                        if slot.is_none() {
                            *slot = Some(e);
                        }
                        return Complex64::new(f64::NAN, f64::NAN);
                    }
                }
            }
            acc * w
        };
        let out = if self.n % 2 == 0 {
            integrate(|v: f64| weighted(v, v - r, 0.0), r, v_max, &opts)
        } else {
            integrate(
                |w: f64| weighted(r + w * w, w * w, (2.0 * w).ln()),
                0.0,
                (v_max - r).sqrt(),
                &opts,
            )
        };
        if let Some(e) = err_slot.into_inner() {
            return Err(e);
        }
        Ok(out?.value)
    }

    /// Radial factor κ(R); the kernel is e^{−nx/2} κ(R(x,y)).
    pub fn radial(&self, r: f64) -> Result<Complex64> {
        Ok(self.pref * self.v_integral(r, WavePart::Full)?)
    }

    /// (pref·I₁, pref·I₂) with κ = I₁-part − I₂-part.
    pub fn radial_parts(&self, r: f64) -> Result<(Complex64, Complex64)> {
        Ok((
            self.pref * self.v_integral(r, WavePart::I1)?,
            self.pref * self.v_integral(r, WavePart::I2)?,
        ))
    }

    /// k_t(−R, 0) = e^{nR/2} κ(R): the boundary profile whose plateau keeps
    /// the L¹ norm growing linearly.
    pub fn boundary_value(&self, r: f64) -> Result<Complex64> {
        Ok(self.radial(r)? * (0.5 * self.n as f64 * r).exp())
    }

    /// Kernel at a group point.
    pub fn kernel_at(&self, p: &GroupPoint) -> Result<Complex64> {
        if p.dim() != self.n as usize {
            return Err(Error::invalid(format!(
                "point dimension {} != n = {}",
                p.dim(),
                self.n
            )));
        }
        Ok(self.radial(p.distance())? * (-0.5 * self.n as f64 * p.x).exp())
    }

    /// Prefactor of the large-t boundary profile: k_t(−R,0) ≈ this × 𝓘(t−R).
    pub fn plateau_prefactor(&self) -> Complex64 {
        -self.pref * 2f64.powf(self.n as f64 / 2.0 - self.l as f64)
    }
}

/// One-shot kernel evaluation (builds a private cache set; prefer
/// [`WaveContext`] for repeated evaluations).
pub fn wave_kernel(
    kind: WaveKind,
    psi: &Psi,
    n: u32,
    t: f64,
    point: &GroupPoint,
    _opts: &QuadOptions,
) -> Result<Complex64> {
    let ctx = WaveContext::new(kind, psi, n, t, point.distance() + 1.0)?;
    ctx.kernel_at(point)
}

/// Direct route: the same kernel through the frequency integral
/// κ(R) = (ic_l/scale)·2∫₀^∞ f_kind(s)·s·T_n(R,s) ds, sharing no code with
/// the q-expansion. Used as the cross-check oracle.
pub fn wave_radial_direct(
    kind: WaveKind,
    psi: &Psi,
    n: u32,
    t: f64,
    r: f64,
    s_max: f64,
    opts: &QuadOptions,
) -> Result<Complex64> {
    psi.validate(n)?;
    let f = move |s: f64| -> Complex64 {
        let p = psi.eval(s);
        match kind {
            WaveKind::Exp => Complex64::from_polar(p, t * s),
            WaveKind::Cos => Complex64::new(p * (t * s).cos(), 0.0),
            WaveKind::Sinc => {
                let v = if s.abs() < 1e-8 { t } else { (t * s).sin() / s };
                Complex64::new(p * v, 0.0)
            }
        }
    };
    super::pointwise_radial_kernel(n, f, r, s_max, opts)
}

/// L¹ accounting: the R ≥ 1 shell integral plus the Cauchy–Schwarz bound on
/// the unit ball.
#[derive(Debug, Clone, Copy)]
pub struct WaveL1 {
    /// ∫_{1 ≤ R ≤ R_max} |k_t| dx dy.
    pub shell: f64,
    /// Upper bound for the discarded ∫_{R ≤ 1} |k_t|.
    pub ball_bound: f64,
}

impl WaveL1 {
    pub fn upper(&self) -> f64 {
        self.shell + self.ball_bound
    }
}

/// ‖k_t‖₁ over {R ≤ R_max}: radial reduction ∫ |κ(R)| W_n(R) dR on
/// R ∈ [1, R_max], plus ‖k‖₂·vol(ball)^{1/2} for the near-identity ball.
pub fn wave_l1_norm(
    kind: WaveKind,
    psi: &Psi,
    n: u32,
    t: f64,
    r_max: f64,
    opts: &QuadOptions,
) -> Result<WaveL1> {
    let ctx = WaveContext::new(kind, psi, n, t, r_max)?;
    wave_l1_with(&ctx, r_max, opts)
}

/// Same as [`wave_l1_norm`] on a prebuilt context (whose cache set must
/// cover `t + r_max + 160/n`).
pub fn wave_l1_with(ctx: &WaveContext, r_max: f64, opts: &QuadOptions) -> Result<WaveL1> {
    if !(r_max > ctx.t + 1.0) || !(r_max > 2.0) {
        return Err(Error::invalid(format!(
            "wave L1: R_max = {r_max} must exceed t + 1 = {} (mass shell coverage)",
            ctx.t + 1.0
        )));
    }
    let shell = shell_norm(ctx, 1.0, r_max, WavePart::Full, opts)?;
    let ball_bound =
        wave_l2_norm(ctx.caches.psi(), ctx.n, opts)? * haar_ball_volume(ctx.n, 1.0)?.sqrt();
    Ok(WaveL1 { shell, ball_bound })
}

/// ∫_{r_lo ≤ R ≤ r_hi} |part of k_t| dx dy = ∫ |κ_part(R)| W_n(R) dR.
pub fn shell_norm(
    ctx: &WaveContext,
    r_lo: f64,
    r_hi: f64,
    part: WavePart,
    opts: &QuadOptions,
) -> Result<f64> {
    if !(0.0 < r_lo && r_lo < r_hi) {
        return Err(Error::invalid(format!("shell_norm: bad range [{r_lo}, {r_hi}]")));
    }
    let err_slot: RefCell<Option<Error>> = RefCell::new(None);
    let f = |r: f64| -> f64 {
        let kappa = match part {
            WavePart::Full => ctx.radial(r),
            WavePart::I1 => ctx.radial_parts(r).map(|(a, _)| a),
            WavePart::I2 => ctx.radial_parts(r).map(|(_, b)| b),
        };
        match (kappa, sphere_weight(ctx.n, r)) {
            (Ok(k), Ok(w)) => k.norm() * w,
            (Err(e), _) | (_, Err(e)) => {
                let mut slot = err_slot.borrow_mut();
                if slot.is_none() {
                    *slot = Some(e);
                }
                f64::NAN
            }
        }
    };
    let out = integrate(f, r_lo, r_hi, opts);
    if let Some(e) = err_slot.into_inner() {
        return Err(e);
    }
    Ok(out?.value)
}

/// Spectral L² bound (∫₀^∞ |ψ(√u)|² ρ_n(u) du)^{1/2}; exactly t-free.
pub fn wave_l2_norm(psi: &Psi, n: u32, opts: &QuadOptions) -> Result<f64> {
    psi.validate(n)?;
    let g = |u: f64| -> f64 {
        if u < 0.0 {
            return 0.0;
        }
        let p = psi.eval(u.sqrt());
        p * p * rho_closed(n, u).unwrap_or(f64::NAN)
    };
    let sq = integrate_half_line(g, opts)?.value;
    Ok(sq.sqrt())
}

// ---- Plateau machinery ----

/// ∫₀^∞ 𝓝(τ) f(τ) dτ with 𝓝(τ) = (e^τ − 1)^{l−n/2} e^{−τl}; the n-odd
/// endpoint singularity is absorbed by τ = w².
fn n_weighted_integral<F: Fn(f64) -> Complex64>(
    n: u32,
    f: F,
    opts: &QuadOptions,
) -> Result<Complex64> {
    let (l, even) = split_n(n)?;
    let nf = n as f64;
    let lf = l as f64;
    let expo = lf - nf / 2.0;
    let tau_max = 160.0 / nf;
    let ln_n = |tau: f64| expo * tau.exp_m1().ln() - lf * tau;
    if even {
        integrate(|tau: f64| f(tau) * ln_n(tau).exp(), 0.0, tau_max, opts).map(|o| o.value)
    } else {
        integrate(
            |w: f64| {
                let tau = w * w;
                f(tau) * (ln_n(tau) + (2.0 * w).ln()).exp()
            },
            0.0,
            tau_max.sqrt(),
            opts,
        )
        .map(|o| o.value)
    }
}

/// ∫ 𝓝 = B(l − n/2 + 1, n/2).
pub fn n_profile_mass(n: u32) -> Result<f64> {
    let (l, _) = split_n(n)?;
    crate::specfun::beta(l as f64 - n as f64 / 2.0 + 1.0, n as f64 / 2.0)
}

/// The limit combination 𝓜 entering 𝓘 = 𝓝 ∗ 𝓜, per variant, with the
/// exact limits a_{k,l} in place of q_{k,l}.
fn m_profile(
    kind: WaveKind,
    table: &QklTable,
    caches: &MkCacheSet,
    eta: f64,
) -> Result<Complex64> {
    let l = table.l();
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..=l {
        let a = table.a_limit(k);
        let s = if k % 2 == 0 { 1.0 } else { -1.0 };
        let term = match kind {
            WaveKind::Exp => caches.eval(k as u32 + 1, eta)? * s,
            WaveKind::Cos => caches.eval(k as u32 + 1, eta)? * s - caches.eval(k as u32 + 1, -eta)?,
            WaveKind::Sinc => caches.eval(k as u32, eta)? * s + caches.eval(k as u32, -eta)?,
        };
        acc += a * term;
    }
    Ok(acc)
}

/// Plateau location and value.
#[derive(Debug, Clone)]
pub struct PlateauReport {
    /// Shell offsets: the kernel stays near A for R ∈ [t−β, t−α].
    pub alpha: f64,
    pub beta: f64,
    /// 𝓘 at the plateau center (the scan maximum).
    pub a_value: Complex64,
    /// Achieved max |𝓘 − A| over [α, β]; < |A|/2 by construction.
    pub margin: f64,
    /// The full scan (ξ, 𝓘(ξ)) for reporting.
    pub scan: Vec<(f64, Complex64)>,
}

/// Scan window for the plateau search.
const XI_LO: f64 = -15.0;
const XI_HI: f64 = 25.0;
const XI_STEP: f64 = 0.01;

/// Evaluate 𝓘 = 𝓝 ∗ 𝓜 on a grid over [−15, 25], locate the maximal-modulus
/// point A, and expand around it while |𝓘 − A| < |A|/2. An interval shorter
/// than 0.1 is reported as an error: the profile would carry no shell mass.
pub fn plateau_scan(kind: WaveKind, psi: &Psi, n: u32, opts: &QuadOptions) -> Result<PlateauReport> {
    let (l, _) = split_n(n)?;
    psi.validate(n)?;
    let table = qkl::cached_table(l as usize)?;
    let xi_max = XI_HI.abs().max(XI_LO.abs()) + 160.0 / n as f64 + 2.0;
    let caches = MkCacheSet::build(psi, l + 1, xi_max)?;
    let err_slot: RefCell<Option<Error>> = RefCell::new(None);
    let i_fn = |xi: f64| -> Result<Complex64> {
        n_weighted_integral(
            n,
            |tau| match m_profile(kind, &table, &caches, xi - tau) {
                Ok(v) => v,
                Err(e) => {
                    let mut slot = err_slot.borrow_mut();
                    if slot.is_none() {
                        *slot = Some(e);
                    }
                    Complex64::new(f64::NAN, f64::NAN)
                }
            },
            opts,
        )
    };
    let steps = ((XI_HI - XI_LO) / XI_STEP).round() as usize;
    let mut scan = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let xi = XI_LO + XI_STEP * i as f64;
        let v = i_fn(xi)?;
        if let Some(e) = err_slot.borrow_mut().take() {
            return Err(e);
        }
        scan.push((xi, v));
    }
    let (imax, &(_, a_value)) = scan
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.norm().total_cmp(&b.1 .1.norm()))
        .expect("scan nonempty");
    if !(a_value.norm() > 0.0) {
        return Err(Error::invalid(
            "plateau_scan: profile vanishes identically on the scan window".to_string(),
        ));
    }
    let tol = 0.5 * a_value.norm();
    let mut lo = imax;
    while lo > 0 && (scan[lo - 1].1 - a_value).norm() < tol {
        lo -= 1;
    }
    let mut hi = imax;
    while hi + 1 < scan.len() && (scan[hi + 1].1 - a_value).norm() < tol {
        hi += 1;
    }
    let alpha = scan[lo].0;
    let beta = scan[hi].0;
    if beta - alpha < 0.1 {
        return Err(Error::invalid(format!(
            "plateau_scan: no plateau of length 0.1 found (got [{alpha}, {beta}])"
        )));
    }
    let margin = scan[lo..=hi]
        .iter()
        .map(|(_, v)| (v - a_value).norm())
        .fold(0.0f64, f64::max);
    Ok(PlateauReport {
        alpha,
        beta,
        a_value,
        margin,
        scan,
    })
}
