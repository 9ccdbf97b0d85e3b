//! Metric evaluation shared by `evaluate`, `sweep` and `reproduce`: the full
//! analytic metric set for a scenario, the matching Monte-Carlo estimates,
//! and the strict comparison between the two.

use hybridnet::analysis::associate;
use hybridnet::coverage::{
    coverage_rf, coverage_thz, coverage_thz_with_blockage, BlockageModel, CoverageConfig,
};
use hybridnet::handoff::overall_ho_probability;
use hybridnet::model::Scenario;
use hybridnet::montecarlo::{
    proportion_std_error, simulate_coverage, simulate_coverage_outcomes, simulate_handoff,
    CoverageSimOptions, SimConfig, Tier,
};
use hybridnet::Result;

use crate::table::Cell;

/// The sweepable metric set, in emission order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    AThz,
    Mu,
    PHo,
    PHoThz,
    PHoRf,
    CThz,
    CRf,
    C,
    CMobility,
}

pub const ALL_METRICS: [Metric; 9] = [
    Metric::AThz,
    Metric::Mu,
    Metric::PHoThz,
    Metric::PHoRf,
    Metric::PHo,
    Metric::CThz,
    Metric::CRf,
    Metric::C,
    Metric::CMobility,
];

impl Metric {
    pub fn parse(name: &str) -> Option<Metric> {
        Some(match name {
            "A_T" => Metric::AThz,
            "mu" => Metric::Mu,
            "P_H" => Metric::PHo,
            "P_HT" => Metric::PHoThz,
            "P_HR" => Metric::PHoRf,
            "C_T" => Metric::CThz,
            "C_R" => Metric::CRf,
            "C" => Metric::C,
            "C_M" => Metric::CMobility,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Metric::AThz => "A_T",
            Metric::Mu => "mu",
            Metric::PHo => "P_H",
            Metric::PHoThz => "P_HT",
            Metric::PHoRf => "P_HR",
            Metric::CThz => "C_T",
            Metric::CRf => "C_R",
            Metric::C => "C",
            Metric::CMobility => "C_M",
        }
    }
}

/// Extra model toggles shared by the analytic and simulated evaluations.
#[derive(Debug, Clone, Default)]
pub struct EvalOptions {
    pub molecular_noise_off: bool,
    pub blockage: Option<BlockageModel>,
}

impl EvalOptions {
    fn coverage_config(&self) -> CoverageConfig {
        CoverageConfig {
            molecular_noise: !self.molecular_noise_off,
            ..CoverageConfig::default()
        }
    }
}

/// One metric value with an optional uncertainty (absent for analytic rows
/// and for metrics the simulator cannot estimate).
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: Option<f64>,
    pub ci95: Option<f64>,
}

impl Estimate {
    fn exact(v: f64) -> Self {
        Self {
            value: Some(v),
            ci95: None,
        }
    }

    fn binomial(successes: u64, trials: u64) -> Self {
        let p = if trials == 0 {
            f64::NAN
        } else {
            successes as f64 / trials as f64
        };
        Self {
            value: Some(p),
            ci95: Some(1.96 * proportion_std_error(successes, trials)),
        }
    }

    fn missing() -> Self {
        Self {
            value: None,
            ci95: None,
        }
    }

    pub fn cell(&self) -> Cell {
        match self.value {
            Some(v) => Cell::Num(v),
            None => Cell::Empty,
        }
    }

    pub fn ci_cell(&self) -> Cell {
        match self.ci95 {
            Some(v) => Cell::Num(v),
            None => Cell::Empty,
        }
    }
}

pub struct Report {
    metrics: Vec<(Metric, Estimate)>,
}

impl Report {
    pub fn get(&self, m: Metric) -> Estimate {
        self.metrics
            .iter()
            .find(|(k, _)| *k == m)
            .map(|(_, e)| *e)
            .unwrap_or_else(Estimate::missing)
    }

    pub fn cells(&self, metrics: &[Metric]) -> Vec<Cell> {
        metrics.iter().map(|m| self.get(*m).cell()).collect()
    }
}

/// Evaluate every requested metric analytically.
pub fn analytic_report(s: &Scenario, metrics: &[Metric], opts: &EvalOptions) -> Result<Report> {
    let cfg = opts.coverage_config();
    let assoc = associate(s)?;
    let mut out = Vec::new();
    // handoff and coverage results are shared between metrics, computed lazily
    let mut ho = None;
    let mut c_thz = None;
    let mut c_rf = None;
    for &m in metrics {
        if matches!(m, Metric::PHo | Metric::PHoThz | Metric::PHoRf | Metric::CMobility)
            && ho.is_none()
        {
            ho = Some(overall_ho_probability(s, &assoc)?);
        }
        if matches!(m, Metric::CThz | Metric::C | Metric::CMobility) && c_thz.is_none() {
            let tau = s.thz_sinr_threshold();
            c_thz = Some(match &opts.blockage {
                Some(b) => coverage_thz_with_blockage(s, &cfg, &assoc, tau, b)?,
                None => coverage_thz(s, &cfg, &assoc, tau)?,
            });
        }
        if matches!(m, Metric::CRf | Metric::C | Metric::CMobility) && c_rf.is_none() {
            c_rf = Some(coverage_rf(s, &cfg, &assoc, s.rf_sinr_threshold())?);
        }
        let total = |c_thz: &Option<f64>, c_rf: &Option<f64>| {
            assoc.a_thz * c_thz.unwrap() + assoc.a_rf * c_rf.unwrap()
        };
        let value = match m {
            Metric::AThz => assoc.a_thz,
            Metric::Mu => assoc.mu,
            Metric::PHo => ho.unwrap().p_overall,
            Metric::PHoThz => ho.unwrap().p_ho_from_thz,
            Metric::PHoRf => ho.unwrap().p_ho_from_rf,
            Metric::CThz => c_thz.unwrap(),
            Metric::CRf => c_rf.unwrap(),
            Metric::C => total(&c_thz, &c_rf),
            Metric::CMobility => {
                total(&c_thz, &c_rf) * (1.0 - s.mobility.ho_cost * ho.unwrap().p_overall)
            }
        };
        out.push((m, Estimate::exact(value)));
    }
    Ok(Report { metrics: out })
}

/// Estimate every requested metric by simulation. `mu` has no empirical
/// counterpart and is reported as missing.
pub fn montecarlo_report(
    s: &Scenario,
    metrics: &[Metric],
    opts: &EvalOptions,
    cfg: &SimConfig,
) -> Result<Report> {
    let sim_opts = CoverageSimOptions {
        molecular_noise: !opts.molecular_noise_off,
        blockage: opts.blockage,
        ..CoverageSimOptions::default()
    };
    let needs_handoff = metrics
        .iter()
        .any(|m| matches!(m, Metric::PHo | Metric::PHoThz | Metric::PHoRf));
    let needs_static = metrics.iter().any(|m| {
        matches!(m, Metric::AThz | Metric::CThz | Metric::CRf | Metric::C)
    });
    let needs_mobility = metrics.iter().any(|m| matches!(m, Metric::CMobility));

    let ho = if needs_handoff {
        Some(simulate_handoff(s, cfg, None)?)
    } else {
        None
    };
    let outcomes = if needs_static {
        Some(simulate_coverage_outcomes(s, cfg, &sim_opts)?)
    } else {
        None
    };
    let mobile = if needs_mobility {
        Some(simulate_coverage(
            s,
            cfg,
            &CoverageSimOptions {
                with_mobility: true,
                ..sim_opts.clone()
            },
        )?)
    } else {
        None
    };

    let tier_counts = |tier: Tier| -> (u64, u64) {
        let outcomes = outcomes.as_ref().unwrap();
        let total = outcomes.iter().filter(|o| o.tier == tier).count() as u64;
        let covered = outcomes
            .iter()
            .filter(|o| o.tier == tier && o.covered)
            .count() as u64;
        (covered, total)
    };

    let mut out = Vec::new();
    for &m in metrics {
        let est = match m {
            Metric::Mu => Estimate::missing(),
            Metric::AThz => {
                let outcomes = outcomes.as_ref().unwrap();
                let thz = outcomes.iter().filter(|o| o.tier == Tier::Thz).count() as u64;
                Estimate::binomial(thz, outcomes.len() as u64)
            }
            Metric::PHo => {
                let ho = ho.as_ref().unwrap();
                Estimate::binomial(ho.ho_from_thz + ho.ho_from_rf, ho.trials)
            }
            Metric::PHoThz => {
                let ho = ho.as_ref().unwrap();
                Estimate::binomial(ho.ho_from_thz, ho.thz_trials)
            }
            Metric::PHoRf => {
                let ho = ho.as_ref().unwrap();
                Estimate::binomial(ho.ho_from_rf, ho.rf_trials)
            }
            Metric::CThz => {
                let (covered, total) = tier_counts(Tier::Thz);
                Estimate::binomial(covered, total)
            }
            Metric::CRf => {
                let (covered, total) = tier_counts(Tier::Rf);
                Estimate::binomial(covered, total)
            }
            Metric::C => {
                let outcomes = outcomes.as_ref().unwrap();
                let covered = outcomes.iter().filter(|o| o.covered).count() as u64;
                Estimate::binomial(covered, outcomes.len() as u64)
            }
            Metric::CMobility => {
                let mobile = mobile.as_ref().unwrap();
                Estimate::binomial(mobile.covered, mobile.trials)
            }
        };
        out.push((m, est));
    }
    Ok(Report { metrics: out })
}

/// Tolerated analytic residual on top of the sampling CI: the analytical
/// expressions carry modeling surrogates whose bias against the simulator is
/// bounded by a couple of percent, independent of the trial count.
pub const MODEL_RESIDUAL: f64 = 0.025;

/// Compare paired reports; returns one message per metric outside its band.
pub fn strict_mismatches(
    label: &str,
    analytic: &Report,
    simulated: &Report,
    metrics: &[Metric],
) -> Vec<String> {
    let mut out = Vec::new();
    for &m in metrics {
        let (a, s) = (analytic.get(m), simulated.get(m));
        if let (Some(a), Some(s)) = (a.value, s.value) {
            let band = MODEL_RESIDUAL + simulated.get(m).ci95.unwrap_or(0.0);
            if (a - s).abs() > band {
                out.push(format!(
                    "{label} {}: analytic {a:.6} vs simulated {s:.6} exceeds band {band:.6}",
                    m.name()
                ));
            }
        }
    }
    out
}
