//! Browser bindings: three interactive views backed by axb-core, each
//! returning a JSON string the page plots on a canvas.
//!
//! Built for the web with
//!   wasm-pack build crates/axb-wasm --target web --out-dir ../../www/pkg
//! and served next to `www/index.html`. The crate also compiles natively so
//! the data paths stay under ordinary `cargo test`.

use serde_json::json;
use wasm_bindgen::prelude::*;

use axb_core::kernel::heat::heat_uniform_norm;
use axb_core::kernel::{WaveContext, WaveKind};
use axb_core::plancherel::rho_closed;
use axb_core::quadrature::{Psi, QuadOptions};
use axb_core::Result;

fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1).max(1) as f64).exp())
        .collect()
}

fn density_curve_impl(n: u32, u_min: f64, u_max: f64, points: usize) -> Result<String> {
    let grid = log_grid(u_min, u_max, points.clamp(2, 2000));
    let mut rho = Vec::with_capacity(grid.len());
    for &u in &grid {
        rho.push(rho_closed(n, u)?);
    }
    Ok(json!({ "u": grid, "rho": rho }).to_string())
}

fn heat_curve_impl(n: u32, gamma: f64, t_min: f64, t_max: f64, points: usize) -> Result<String> {
    let opts = QuadOptions::default().with_rel_tol(1e-8);
    let grid = log_grid(t_min, t_max, points.clamp(2, 400));
    let mut norm = Vec::with_capacity(grid.len());
    for &t in &grid {
        norm.push(heat_uniform_norm(n, gamma, t, &opts)?);
    }
    Ok(json!({ "t": grid, "norm": norm }).to_string())
}

fn wave_profile_impl(kind: &str, n: u32, t: f64, points: usize) -> Result<String> {
    let kind = WaveKind::parse(kind)?;
    let psi = Psi::RationalDecay { alpha: n as f64 + 3.0 };
    let ctx = WaveContext::new(kind, &psi, n, t, t + 1.0)?;
    // Offsets ξ = t − R behind (and a little ahead of) the light cone.
    let (xi_lo, xi_hi) = (-6.0f64, (t - 0.2).min(12.0));
    let count = points.clamp(2, 600);
    let mut xi = Vec::with_capacity(count);
    let mut abs = Vec::with_capacity(count);
    for i in 0..count {
        let x = xi_lo + (xi_hi - xi_lo) * i as f64 / (count - 1) as f64;
        let v = ctx.boundary_value(t - x)?;
        xi.push(x);
        abs.push(v.norm());
    }
    Ok(json!({ "xi": xi, "abs": abs, "kind": kind.label(), "t": t }).to_string())
}

/// Plancherel density ρ_n on a log grid; JSON {u, rho}.
#[wasm_bindgen]
pub fn density_curve(n: u32, u_min: f64, u_max: f64, points: usize) -> std::result::Result<String, JsError> {
    density_curve_impl(n, u_min, u_max, points).map_err(|e| JsError::new(&e.to_string()))
}

/// Uniform norm of exp(−t𝓛^γ) on a log t-grid; JSON {t, norm}.
#[wasm_bindgen]
pub fn heat_norm_curve(
    n: u32,
    gamma: f64,
    t_min: f64,
    t_max: f64,
    points: usize,
) -> std::result::Result<String, JsError> {
    heat_curve_impl(n, gamma, t_min, t_max, points).map_err(|e| JsError::new(&e.to_string()))
}

/// |k_t(−R, 0)| against the offset ξ = t − R; JSON {xi, abs, kind, t}.
#[wasm_bindgen]
pub fn wave_boundary_profile(
    kind: &str,
    n: u32,
    t: f64,
    points: usize,
) -> std::result::Result<String, JsError> {
    wave_profile_impl(kind, n, t, points).map_err(|e| JsError::new(&e.to_string()))
}
