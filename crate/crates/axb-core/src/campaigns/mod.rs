//! Verification campaigns: each one reproduces an asymptotic norm law or an
//! exact identity as a set of cells with machine-checkable verdicts, and can
//! be serialized to CSV/JSON with a generated plot script.

pub mod density;
pub mod fit;
pub mod norms;
pub mod report;
pub mod waves;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::plancherel::split_n;

pub use fit::{fit_power_law, FitResult};
pub use report::{Cell, CellValue, Report, Summary, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CampaignKind {
    RhoCrosscheck,
    QklAudit,
    HeatAsymptotics,
    ResolventScaling,
    WaveL1,
    WaveUniform,
    ShellLemmas,
}

impl CampaignKind {
    pub const ALL: [CampaignKind; 7] = [
        CampaignKind::RhoCrosscheck,
        CampaignKind::QklAudit,
        CampaignKind::HeatAsymptotics,
        CampaignKind::ResolventScaling,
        CampaignKind::WaveL1,
        CampaignKind::WaveUniform,
        CampaignKind::ShellLemmas,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            CampaignKind::RhoCrosscheck => "rho-crosscheck",
            CampaignKind::QklAudit => "qkl-audit",
            CampaignKind::HeatAsymptotics => "heat-asymptotics",
            CampaignKind::ResolventScaling => "resolvent-scaling",
            CampaignKind::WaveL1 => "wave-l1",
            CampaignKind::WaveUniform => "wave-uniform",
            CampaignKind::ShellLemmas => "shell-lemmas",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let norm = s.replace('_', "-");
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.label() == norm)
            .ok_or_else(|| Error::invalid(format!("unknown campaign '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TolPreset {
    /// Looser tolerances and smaller grids for a quick look.
    Fast,
    /// The acceptance-grade settings (default).
    Strict,
}

impl TolPreset {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(TolPreset::Fast),
            "strict" => Ok(TolPreset::Strict),
            _ => Err(Error::invalid(format!("unknown tolerance preset '{s}'"))),
        }
    }
}

/// Parameters of one campaign run. `new` fills the per-campaign defaults;
/// callers override fields before `run_campaign`.
#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub kind: CampaignKind,
    pub n_list: Vec<u32>,
    pub gamma_list: Vec<f64>,
    /// Time grid for slope fits; log-spaced, ascending, ≥ 4 points.
    pub t_list: Vec<f64>,
    /// ψ decay exponent; None = the per-dimension default n + 3.
    pub alpha: Option<f64>,
    /// Resolvent order.
    pub s: Complex64,
    /// Recorded for any randomized grids downstream.
    pub seed: u64,
    pub preset: TolPreset,
}

impl CampaignConfig {
    pub fn new(kind: CampaignKind) -> Self {
        let (n_list, t_list) = match kind {
            CampaignKind::RhoCrosscheck => ((1..=6).collect(), vec![]),
            CampaignKind::QklAudit => (vec![], vec![]),
            CampaignKind::HeatAsymptotics => (vec![1, 2, 3], vec![]),
            CampaignKind::ResolventScaling => (vec![1], vec![]),
            CampaignKind::WaveL1 | CampaignKind::WaveUniform => {
                (vec![1], vec![10.0, 20.0, 40.0, 80.0])
            }
            CampaignKind::ShellLemmas => (vec![1, 2, 3], vec![20.0, 40.0, 80.0, 160.0]),
        };
        CampaignConfig {
            kind,
            n_list,
            gamma_list: match kind {
                CampaignKind::HeatAsymptotics => vec![0.5, 1.0, 2.0],
                _ => vec![],
            },
            t_list,
            alpha: None,
            s: Complex64::new(2.0, 0.0),
            seed: 0,
            preset: TolPreset::Strict,
        }
    }

    pub fn fast(&self) -> bool {
        self.preset == TolPreset::Fast
    }

    /// ψ = (1 + s²)^{−α}; the default exponent keeps every transform
    /// m̌_p, p ≤ l + 1, absolutely convergent with margin.
    pub fn alpha_for(&self, n: u32) -> f64 {
        self.alpha.unwrap_or(n as f64 + 3.0)
    }

    pub fn validate(&self) -> Result<()> {
        for &n in &self.n_list {
            split_n(n)?;
        }
        let needs_n = !matches!(self.kind, CampaignKind::QklAudit);
        if needs_n && self.n_list.is_empty() {
            return Err(Error::invalid("campaign needs a nonempty n list".to_string()));
        }
        let needs_t = matches!(
            self.kind,
            CampaignKind::WaveL1 | CampaignKind::WaveUniform | CampaignKind::ShellLemmas
        );
        if needs_t {
            if self.t_list.len() < 4 {
                return Err(Error::invalid(format!(
                    "slope fits need >= 4 time points, got {:?}",
                    self.t_list
                )));
            }
            for w in self.t_list.windows(2) {
                if !(w[0] < w[1]) {
                    return Err(Error::invalid(format!(
                        "time grid must be strictly increasing, got {:?}",
                        self.t_list
                    )));
                }
            }
            if !(self.t_list[0] > 0.0) {
                return Err(Error::invalid("time grid must be positive".to_string()));
            }
        }
        if self.kind == CampaignKind::HeatAsymptotics {
            if self.gamma_list.is_empty() || self.gamma_list.iter().any(|g| !(*g > 0.0)) {
                return Err(Error::invalid(format!(
                    "heat campaign needs positive gamma values, got {:?}",
                    self.gamma_list
                )));
            }
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0) {
                return Err(Error::invalid(format!("alpha must be positive, got {a}")));
            }
        }
        Ok(())
    }

    pub fn param_header(&self, rep: &mut Report) {
        rep.param("seed", self.seed as i64);
        rep.param(
            "preset",
            match self.preset {
                TolPreset::Fast => "fast",
                TolPreset::Strict => "strict",
            },
        );
    }
}

/// Runs the configured campaign; numeric failures land in per-cell error
/// verdicts, an Err return means the configuration itself is unusable.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<Report> {
    cfg.validate()?;
    let mut rep = match cfg.kind {
        CampaignKind::RhoCrosscheck => density::rho_crosscheck(cfg)?,
        CampaignKind::QklAudit => density::qkl_audit(cfg)?,
        CampaignKind::HeatAsymptotics => norms::heat_asymptotics(cfg)?,
        CampaignKind::ResolventScaling => norms::resolvent_scaling(cfg)?,
        CampaignKind::WaveL1 => waves::wave_l1(cfg)?,
        CampaignKind::WaveUniform => waves::wave_uniform(cfg)?,
        CampaignKind::ShellLemmas => norms::shell_lemmas(cfg)?,
    };
    cfg.param_header(&mut rep);
    Ok(rep)
}

/// Maps `f` over the items, in parallel when the `parallel` feature is on;
/// output order always matches input order, keeping reports deterministic.
#[cfg(feature = "parallel")]
pub(crate) fn run_map<T: Sync, R: Send, F: Fn(&T) -> R + Sync + Send>(items: &[T], f: F) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn run_map<T: Sync, R: Send, F: Fn(&T) -> R + Sync + Send>(items: &[T], f: F) -> Vec<R> {
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_labels_round_trip() {
        for k in CampaignKind::ALL {
            assert_eq!(CampaignKind::parse(k.label()).unwrap(), k);
        }
        assert_eq!(
            CampaignKind::parse("wave_l1").unwrap(),
            CampaignKind::WaveL1
        );
        assert!(CampaignKind::parse("nope").is_err());
    }

    #[test]
    fn config_validation_rules() {
        let mut cfg = CampaignConfig::new(CampaignKind::WaveL1);
        assert!(cfg.validate().is_ok());
        cfg.t_list = vec![10.0, 20.0];
        assert!(cfg.validate().is_err());
        cfg.t_list = vec![10.0, 20.0, 20.0, 40.0];
        assert!(cfg.validate().is_err());

        let mut cfg = CampaignConfig::new(CampaignKind::HeatAsymptotics);
        cfg.gamma_list = vec![-1.0];
        assert!(cfg.validate().is_err());

        let mut cfg = CampaignConfig::new(CampaignKind::RhoCrosscheck);
        cfg.n_list = vec![99];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn run_map_preserves_order() {
        let items: Vec<i32> = (0..100).collect();
        let out = run_map(&items, |&x| x * x);
        for (i, v) in out.iter().enumerate() {
            assert_eq!(*v, (i * i) as i32);
        }
    }

    #[test]
    fn qkl_audit_campaign_passes() {
        let cfg = CampaignConfig::new(CampaignKind::QklAudit);
        let rep = run_campaign(&cfg).unwrap();
        let s = rep.summary();
        assert!(s.all_passed(), "summary {s:?}");
        assert!(s.pass >= 20);
    }

    #[test]
    fn rho_crosscheck_campaign_passes_fast() {
        let mut cfg = CampaignConfig::new(CampaignKind::RhoCrosscheck);
        cfg.preset = TolPreset::Fast;
        cfg.n_list = vec![1, 2, 3];
        let rep = run_campaign(&cfg).unwrap();
        assert!(rep.summary().all_passed(), "{:?}", rep.to_json());
        // Full parameter tuple on every CSV row.
        let csv = rep.to_csv().unwrap();
        assert!(csv.lines().count() > 3);
        assert!(csv.starts_with("campaign,n,"));
    }

    #[test]
    fn shell_campaign_reports_drift() {
        let mut cfg = CampaignConfig::new(CampaignKind::ShellLemmas);
        cfg.n_list = vec![2];
        cfg.t_list = vec![20.0, 40.0, 80.0, 160.0];
        let rep = run_campaign(&cfg).unwrap();
        assert!(rep.summary().all_passed(), "{:?}", rep.to_json());
        let drift_cells: Vec<_> = rep
            .cells
            .iter()
            .filter(|c| c.outputs.iter().any(|(k, _)| k == "drift"))
            .collect();
        assert_eq!(drift_cells.len(), 2);
    }
}
