//! Command-line driver: pointwise evaluations emit CSV, campaigns write
//! report files and set the exit code from their verdicts
//! (0 = pass, 2 = numeric failure, 3 = verdict failure).

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use axb_core::campaigns::{run_campaign, CampaignConfig, CampaignKind, TolPreset};
use axb_core::error::Error;
use axb_core::geometry::GroupPoint;
use axb_core::kernel::heat::heat_uniform_norm;
use axb_core::kernel::resolvent::resolvent_norm_bound;
use axb_core::kernel::wave::{wave_kernel, WaveKind};
use axb_core::kernel::{kernel_at_point, SpectralFunction};
use axb_core::plancherel::{rho_closed, rho_via_c, rho_via_kernel};
use axb_core::qkl;
use axb_core::quadrature::{Psi, QuadOptions};

#[derive(Parser)]
#[command(
    name = "axb",
    version,
    about = "Spectral densities, convolution kernels and norm asymptotics on ax+b groups"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tabulate the spectral density over a log grid of u
    Rho(RhoArgs),
    /// Dump the expansion polynomial table for one l as JSON
    Qkl(QklArgs),
    /// Evaluate the heat kernel at a group point
    Kernel(KernelArgs),
    /// Uniform norm of the heat semigroup over a time grid
    Heat(HeatArgs),
    /// Uniform-norm bound for a complex resolvent power
    Resolvent(ResolventArgs),
    /// Evaluate a wave propagator kernel at a group point
    Wave(WaveArgs),
    /// Campaign: density cross-routes and endpoint asymptotics
    #[command(name = "rho-crosscheck")]
    RhoCrosscheck(CampaignArgs),
    /// Campaign: exact audit of the expansion polynomials
    #[command(name = "qkl-audit")]
    QklAudit(CampaignArgs),
    /// Campaign: heat norm power laws at both ends
    #[command(name = "heat-asymptotics")]
    HeatAsymptotics(CampaignArgs),
    /// Campaign: resolvent bound scaling and divergence threshold
    #[command(name = "resolvent-scaling")]
    ResolventScaling(CampaignArgs),
    /// Campaign: linear growth of the propagator L1 norm
    #[command(name = "wave-l1")]
    WaveL1(CampaignArgs),
    /// Campaign: non-decaying propagator uniform norm on the moving shell
    #[command(name = "wave-uniform")]
    WaveUniform(CampaignArgs),
    /// Campaign: shell integral growth laws
    #[command(name = "shell-lemmas")]
    ShellLemmas(CampaignArgs),
}

#[derive(Args)]
struct RhoArgs {
    #[arg(long, default_value_t = 1)]
    n: u32,
    /// closed, cfun or kernel
    #[arg(long, default_value = "closed")]
    route: String,
    #[arg(long, default_value_t = 1e-3)]
    umin: f64,
    #[arg(long, default_value_t = 1e3)]
    umax: f64,
    #[arg(long, default_value_t = 100)]
    points: usize,
    /// Output file (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct QklArgs {
    #[arg(long)]
    l: usize,
    /// Add a LaTeX rendering of each numerator polynomial
    #[arg(long = "print-latex", default_value_t = false)]
    print_latex: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// First coordinate of the group point
    #[arg(long, default_value_t = 0.0)]
    x: f64,
    /// Euclidean norm |y| of the abelian coordinate
    #[arg(long, default_value_t = 1.0)]
    ynorm: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HeatArgs {
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 1e-2)]
    tmin: f64,
    #[arg(long, default_value_t = 1e2)]
    tmax: f64,
    #[arg(long, default_value_t = 25)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ResolventArgs {
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[arg(long = "z-re", default_value_t = -1.0)]
    z_re: f64,
    #[arg(long = "z-im", default_value_t = 0.0)]
    z_im: f64,
    #[arg(long = "s-re", default_value_t = 2.0)]
    s_re: f64,
    #[arg(long = "s-im", default_value_t = 0.0)]
    s_im: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WaveArgs {
    #[arg(long, default_value_t = 1)]
    n: u32,
    /// exp, cos or sinc
    #[arg(long, default_value = "exp")]
    kind: String,
    /// ψ(s) = (1+s²)^(−α)
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 3.0)]
    t: f64,
    #[arg(long, default_value_t = 0.0)]
    x: f64,
    #[arg(long, default_value_t = 1.0)]
    ynorm: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CampaignArgs {
    /// Dimensions to run (campaign default when absent)
    #[arg(long, num_args = 1..)]
    n: Vec<u32>,
    /// Heat exponents γ
    #[arg(long, num_args = 1..)]
    gamma: Vec<f64>,
    /// ψ decay exponent
    #[arg(long)]
    alpha: Option<f64>,
    /// Time grid
    #[arg(long, num_args = 1..)]
    t: Vec<f64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// csv, json or both
    #[arg(long, default_value = "both")]
    format: String,
    #[arg(long = "tol-preset", default_value = "strict")]
    tol_preset: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::invalid(format!("write {path:?}: {e}"))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::invalid(format!("stdout: {e}"))),
    }
}

fn log_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>, Error> {
    if !(lo > 0.0 && hi > lo) || count < 2 {
        return Err(Error::invalid(format!(
            "need 0 < min < max and at least 2 points, got [{lo}, {hi}] x {count}"
        )));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect())
}

fn run_rho(args: &RhoArgs) -> Result<(), Error> {
    let route: fn(u32, f64) -> Result<f64, Error> = match args.route.as_str() {
        "closed" => rho_closed,
        "cfun" => rho_via_c,
        "kernel" => rho_via_kernel,
        other => return Err(Error::invalid(format!("unknown rho route '{other}'"))),
    };
    let mut text = String::from("u,rho\n");
    for u in log_grid(args.umin, args.umax, args.points)? {
        let rho = route(args.n, u)?;
        text.push_str(&format!("{u:.16e},{rho:.16e}\n"));
    }
    emit(&args.out, &text)
}

fn latex_poly(p: &axb_core::qkl::CanonPoly) -> String {
    let term = |coef: &axb_core::qkl::GaussianRational, j: usize, c_tag: bool| -> String {
        let mut s = format!("({coef})");
        if c_tag {
            s.push_str(" \\operatorname{ch}");
        }
        match j {
            0 => {}
            1 => s.push_str(" \\operatorname{sh}"),
            _ => s.push_str(&format!(" \\operatorname{{sh}}^{{{j}}}")),
        }
        s
    };
    let mut parts = Vec::new();
    for (j, coef) in p.a.iter().enumerate() {
        if !coef.is_zero() {
            parts.push(term(coef, j, false));
        }
    }
    for (j, coef) in p.b.iter().enumerate() {
        if !coef.is_zero() {
            parts.push(term(coef, j, true));
        }
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

fn run_qkl(args: &QklArgs) -> Result<(), Error> {
    let table = qkl::build_qkl(args.l)?;
    let mut doc = table.to_json();
    if args.print_latex {
        if let Some(rows) = doc.get_mut("rows").and_then(|r| r.as_array_mut()) {
            for (k, row) in rows.iter_mut().enumerate() {
                row["latex"] = serde_json::json!(format!(
                    "q_{{{k},{l}}}(v) = \\frac{{{num}}}{{\\operatorname{{sh}}^{{{d}}} v}}",
                    k = k,
                    l = args.l,
                    num = latex_poly(table.poly(k)),
                    d = 2 * args.l,
                ));
            }
        }
    }
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::invalid(format!("json: {e}")))?;
    text.push('\n');
    emit(&args.out, &text)
}

fn radial_point(n: u32, x: f64, ynorm: f64) -> Result<GroupPoint, Error> {
    if !(ynorm >= 0.0) {
        return Err(Error::invalid(format!("|y| must be >= 0, got {ynorm}")));
    }
    let mut y = vec![0.0; n as usize];
    y[0] = ynorm;
    Ok(GroupPoint::new(x, y))
}

fn run_kernel(args: &KernelArgs) -> Result<(), Error> {
    let f = SpectralFunction::Heat {
        gamma: args.gamma,
        t: args.t,
    };
    f.validate(args.n)?;
    let p = radial_point(args.n, args.x, args.ynorm)?;
    let s_max = (170.0 / args.t).powf(1.0 / (2.0 * args.gamma)).min(1e4);
    let opts = QuadOptions::default().with_rel_tol(1e-9);
    let v = kernel_at_point(args.n, |s| f.eval(s * s), &p, s_max, &opts)?;
    let text = format!(
        "n,gamma,t,x,r,R,value\n{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
        args.n,
        args.gamma,
        args.t,
        args.x,
        args.ynorm,
        p.distance(),
        v.re,
    );
    emit(&args.out, &text)
}

fn run_heat(args: &HeatArgs) -> Result<(), Error> {
    let opts = QuadOptions::default().with_rel_tol(1e-10);
    let mut text = String::from("n,gamma,t,norm\n");
    for t in log_grid(args.tmin, args.tmax, args.points)? {
        let v = heat_uniform_norm(args.n, args.gamma, t, &opts)?;
        text.push_str(&format!(
            "{},{:.16e},{t:.16e},{v:.16e}\n",
            args.n, args.gamma
        ));
    }
    emit(&args.out, &text)
}

fn run_resolvent(args: &ResolventArgs) -> Result<(), Error> {
    let opts = QuadOptions::default().with_rel_tol(1e-9);
    let z = Complex64::new(args.z_re, args.z_im);
    let s = Complex64::new(args.s_re, args.s_im);
    let v = resolvent_norm_bound(args.n, z, s, &opts)?;
    let text = format!(
        "n,z_re,z_im,s_re,s_im,bound\n{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
        args.n, args.z_re, args.z_im, args.s_re, args.s_im, v,
    );
    emit(&args.out, &text)
}

fn run_wave(args: &WaveArgs) -> Result<(), Error> {
    let kind = WaveKind::parse(&args.kind)?;
    let alpha = args.alpha.unwrap_or(args.n as f64 + 3.0);
    let psi = Psi::RationalDecay { alpha };
    let p = radial_point(args.n, args.x, args.ynorm)?;
    let opts = QuadOptions::default();
    let v = wave_kernel(kind, &psi, args.n, args.t, &p, &opts)?;
    let text = format!(
        "kind,n,alpha,t,x,r,R,re,im\n{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
        kind.label(),
        args.n,
        alpha,
        args.t,
        args.x,
        args.ynorm,
        p.distance(),
        v.re,
        v.im,
    );
    emit(&args.out, &text)
}

fn run_campaign_cmd(kind: CampaignKind, args: &CampaignArgs) -> Result<ExitCode, Error> {
    let mut cfg = CampaignConfig::new(kind);
    if !args.n.is_empty() {
        cfg.n_list = args.n.clone();
    }
    if !args.gamma.is_empty() {
        cfg.gamma_list = args.gamma.clone();
    }
    if !args.t.is_empty() {
        cfg.t_list = args.t.clone();
    }
    cfg.alpha = args.alpha;
    cfg.seed = args.seed;
    cfg.preset = TolPreset::parse(&args.tol_preset)?;
    let rep = run_campaign(&cfg)?;
    rep.write(&args.out, &args.format)?;
    let s = rep.summary();
    println!(
        "{}: {} cells, {} pass, {} fail, {} error, {} info -> {}",
        rep.campaign,
        s.total,
        s.pass,
        s.fail,
        s.error,
        s.info,
        if s.all_passed() { "PASS" } else { "FAIL" }
    );
    for c in &rep.cells {
        use axb_core::campaigns::Verdict;
        if matches!(c.verdict, Verdict::Fail | Verdict::Error(_)) {
            eprintln!("  [{}] {} | inputs {:?}", c.verdict, c.anchor, c.inputs);
        }
    }
    Ok(if rep.has_numeric_error() {
        ExitCode::from(2)
    } else if s.fail > 0 {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match &cli.cmd {
        Cmd::Rho(a) => run_rho(a).map(|_| ExitCode::SUCCESS),
        Cmd::Qkl(a) => run_qkl(a).map(|_| ExitCode::SUCCESS),
        Cmd::Kernel(a) => run_kernel(a).map(|_| ExitCode::SUCCESS),
        Cmd::Heat(a) => run_heat(a).map(|_| ExitCode::SUCCESS),
        Cmd::Resolvent(a) => run_resolvent(a).map(|_| ExitCode::SUCCESS),
        Cmd::Wave(a) => run_wave(a).map(|_| ExitCode::SUCCESS),
        Cmd::RhoCrosscheck(a) => run_campaign_cmd(CampaignKind::RhoCrosscheck, a),
        Cmd::QklAudit(a) => run_campaign_cmd(CampaignKind::QklAudit, a),
        Cmd::HeatAsymptotics(a) => run_campaign_cmd(CampaignKind::HeatAsymptotics, a),
        Cmd::ResolventScaling(a) => run_campaign_cmd(CampaignKind::ResolventScaling, a),
        Cmd::WaveL1(a) => run_campaign_cmd(CampaignKind::WaveL1, a),
        Cmd::WaveUniform(a) => run_campaign_cmd(CampaignKind::WaveUniform, a),
        Cmd::ShellLemmas(a) => run_campaign_cmd(CampaignKind::ShellLemmas, a),
    };
    match out {
        Ok(code) => code,
        Err(e) => {
            eprintln!("axb: {e}");
            ExitCode::from(2)
        }
    }
}
