//! Plancherel-density cross-checks and the exact audit of the expansion
//! polynomials.

use crate::campaigns::report::{Cell, CellValue, Report, Verdict};
use crate::campaigns::{run_map, CampaignConfig};
use crate::error::Result;
use crate::plancherel::{rho_closed, rho_small_u_constant, rho_via_c, rho_via_kernel};
use crate::qkl::{build_qkl, build_qkl_homogeneous, GaussianRational};

const ANCHOR_C_ROUTE: &str = "the spectral density of the distinguished Laplacian matches the \
     hyperbolic-space c-function route at every frequency";
const ANCHOR_LARGE_U: &str = "the spectral density grows like u^((n-1)/2) at high frequency";
const ANCHOR_SMALL_U: &str =
    "the spectral density vanishes like a dimensional constant times sqrt(u) at low frequency";
const ANCHOR_KERNEL_ROUTE: &str = "reconstructing the density from the radial kernel integral \
     reproduces the closed form";

fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

pub fn rho_crosscheck(cfg: &CampaignConfig) -> Result<Report> {
    let mut rep = Report::new("rho_crosscheck");
    let points = if cfg.fast() { 20 } else { 50 };
    rep.param("u_points", points as i64);
    rep.param("n_list", format!("{:?}", cfg.n_list));
    let grid = log_grid(1e-3, 1e4, points);

    let route_cells = run_map(&cfg.n_list, |&n| {
        let mut max_rel = 0.0f64;
        let mut err = None;
        for &u in &grid {
            match (rho_closed(n, u), rho_via_c(n, u)) {
                (Ok(a), Ok(b)) => max_rel = max_rel.max((a - b).abs() / a.abs()),
                (Err(e), _) | (_, Err(e)) => {
                    err = Some(e);
                    break;
                }
            }
        }
        let inputs = vec![("n".to_string(), CellValue::from(n))];
        match err {
            Some(e) => Cell {
                inputs,
                outputs: vec![],
                anchor: ANCHOR_C_ROUTE.to_string(),
                verdict: Verdict::Error(e.to_string()),
            },
            None => Cell {
                inputs,
                outputs: vec![
                    ("max_rel_diff".to_string(), CellValue::from(max_rel)),
                    ("tolerance".to_string(), CellValue::from(1e-10)),
                ],
                anchor: ANCHOR_C_ROUTE.to_string(),
                verdict: Verdict::check(max_rel <= 1e-10),
            },
        }
    });
    rep.cells.extend(route_cells);

    for &n in &cfg.n_list {
        let u = 1e6;
        let cell = Cell::from_result(
            ANCHOR_LARGE_U,
            vec![
                ("n".to_string(), CellValue::from(n)),
                ("u".to_string(), CellValue::from(u)),
            ],
            rho_closed(n, u),
            |c, rho| {
                let ratio = rho / u.powf((n as f64 - 1.0) / 2.0);
                c.output("ratio", ratio)
                    .output("tolerance", 1e-2)
                    .verdict(Verdict::check((ratio - 1.0).abs() <= 1e-2))
            },
        );
        rep.cells.push(cell);

        let u = 1e-8;
        let cell = Cell::from_result(
            ANCHOR_SMALL_U,
            vec![
                ("n".to_string(), CellValue::from(n)),
                ("u".to_string(), CellValue::from(u)),
            ],
            rho_closed(n, u).and_then(|rho| Ok((rho, rho_small_u_constant(n)?))),
            |c, (rho, k)| {
                let ratio = rho / (k * u.sqrt());
                c.output("ratio", ratio)
                    .output("constant", k)
                    .output("tolerance", 1e-3)
                    .verdict(Verdict::check((ratio - 1.0).abs() <= 1e-3))
            },
        );
        rep.cells.push(cell);
    }

    // Kernel-route reconstruction: n = 2 directly, n = 1 after one global
    // scale fit (geometric mean of the ratios).
    let u_grid = [0.25, 1.0, 4.0];
    for (n, tol, fit_scale) in [(2u32, 1e-6, false), (1u32, 1e-4, true)] {
        let ratios: Result<Vec<f64>> = u_grid
            .iter()
            .map(|&u| Ok(rho_via_kernel(n, u)? / rho_closed(n, u)?))
            .collect();
        let cell = Cell::from_result(
            ANCHOR_KERNEL_ROUTE,
            vec![
                ("n".to_string(), CellValue::from(n)),
                ("u_grid".to_string(), CellValue::from(format!("{u_grid:?}"))),
            ],
            ratios,
            |c, ratios| {
                let scale = if fit_scale {
                    (ratios.iter().map(|r| r.ln()).sum::<f64>() / ratios.len() as f64).exp()
                } else {
                    1.0
                };
                let max_rel = ratios
                    .iter()
                    .map(|r| (r / scale - 1.0).abs())
                    .fold(0.0f64, f64::max);
                c.output("scale", scale)
                    .output("max_rel_diff", max_rel)
                    .output("tolerance", tol)
                    .verdict(Verdict::check(max_rel <= tol))
            },
        );
        rep.cells.push(cell);
    }

    rep.plot_script = Some(super::report::loglog_plot_script(
        "rho_crosscheck",
        "u",
        &["ratio"],
    ));
    Ok(rep)
}

/// Exact-arithmetic audit of the q_{k,l} tables: top-order limits, the
/// real/imaginary alternation in k, and agreement of two independent
/// recursions.
pub fn qkl_audit(cfg: &CampaignConfig) -> Result<Report> {
    let mut rep = Report::new("qkl_audit");
    let l_top = if cfg.fast() { 6 } else { 8 };
    rep.param("l_top_limit", l_top as i64);
    rep.param("l_parity_closure", 6i64);

    for l in 0..=l_top {
        let cell = Cell::from_result(
            "the top limit coefficient is exactly (2i)^l, so the leading transform term \
             survives in the large-distance profile",
            vec![("l".to_string(), CellValue::from(l as i64))],
            build_qkl(l),
            |c, table| {
                let mut want = GaussianRational::one();
                for _ in 0..l {
                    want = want.mul_i().mul_int(2);
                }
                let got = table.a_limit_exact(l);
                c.output("a_ll", format!("{got}"))
                    .verdict(Verdict::check(*got == want))
            },
        );
        rep.cells.push(cell);
    }

    for l in 0..=6usize {
        let cell = Cell::from_result(
            "the expansion polynomials are real for even transform powers and purely \
             imaginary for odd ones",
            vec![("l".to_string(), CellValue::from(l as i64))],
            build_qkl(l),
            |c, table| {
                use num_traits::Zero;
                let mut ok = true;
                for k in 0..=l {
                    let p = table.poly(k);
                    for coef in p.a.iter().chain(&p.b) {
                        ok &= if k % 2 == 0 {
                            coef.im.is_zero()
                        } else {
                            coef.re.is_zero()
                        };
                    }
                }
                c.output("parity_exact", ok).verdict(Verdict::check(ok))
            },
        );
        rep.cells.push(cell);
    }

    for l in 0..=6usize {
        let cell = Cell::from_result(
            "the trigonometric recursion and the homogeneous two-variable recursion \
             produce identical polynomials",
            vec![("l".to_string(), CellValue::from(l as i64))],
            build_qkl(l).and_then(|t| Ok((t, build_qkl_homogeneous(l)?))),
            |c, (table, homog)| {
                let ok = (0..=l).all(|k| homog[k].to_canonical() == *table.poly(k));
                c.output("closure_exact", ok).verdict(Verdict::check(ok))
            },
        );
        rep.cells.push(cell);
    }

    Ok(rep)
}
