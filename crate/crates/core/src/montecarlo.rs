//! Monte-Carlo ground truth. Every analytical quantity in this crate has an
//! empirical twin here: deployments are Poisson in a guarded disc, the user
//! sits at the center, association and handoff use fading-free long-term
//! powers, coverage draws fresh fading and beam alignment per trial.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, Poisson};
use rayon::prelude::*;

use crate::coverage::BlockageModel;
use crate::error::{Error, Result};
use crate::model::{rf_received_power, thz_received_power, Scenario};

/// Simulation knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    /// Radius of the region of interest, m.
    pub window_radius: f64,
    /// Deployment disc is guard_factor times the window so the interference
    /// field seen at the center is not artificially truncated.
    pub guard_factor: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            trials: 100_000,
            seed: 1,
            window_radius: 500.0,
            guard_factor: 2.0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::validation("trials", "must be >= 1"));
        }
        if !(self.window_radius > 0.0) {
            return Err(Error::validation("window_radius", "must be > 0"));
        }
        if !(self.guard_factor >= 1.0) {
            return Err(Error::validation("guard_factor", "must be >= 1"));
        }
        Ok(())
    }

    fn deployment_radius(&self) -> f64 {
        self.window_radius * self.guard_factor
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tier {
    Rf,
    Thz,
}

/// Per-trial record backing all empirical estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub trial: u64,
    pub tier: Tier,
    pub serving_distance: f64,
    pub ho_occurred: bool,
    pub sinr: f64,
    pub covered: bool,
}

/// Options for the coverage simulator.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageSimOptions {
    pub with_mobility: bool,
    /// Include re-emitted molecular absorption noise in the THz SINR.
    pub molecular_noise: bool,
    pub blockage: Option<BlockageModel>,
    /// Discrete distribution of the misalignment power fraction as
    /// (value, weight) pairs; weights need not be normalized.
    pub misalignment: Option<Vec<(f64, f64)>>,
}

impl Default for CoverageSimOptions {
    fn default() -> Self {
        Self {
            with_mobility: false,
            molecular_noise: true,
            blockage: None,
            misalignment: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssociationEstimate {
    pub a_thz: f64,
    pub thz_count: u64,
    pub trials: u64,
    pub redraws: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HandoffEstimate {
    pub p_ho_from_thz: f64,
    pub p_ho_from_rf: f64,
    pub p_overall: f64,
    pub thz_trials: u64,
    pub rf_trials: u64,
    pub ho_from_thz: u64,
    pub ho_from_rf: u64,
    pub trials: u64,
    pub redraws: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageEstimate {
    pub coverage: f64,
    pub covered: u64,
    pub trials: u64,
    pub redraws: u64,
}

/// Standard error of an empirical proportion.
pub fn proportion_std_error(successes: u64, trials: u64) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    let p = successes as f64 / trials as f64;
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// The simulator, unlike the analytic formulas, is happy with a degenerate
/// single-tier network, so a zero intensity is tolerated here as long as the
/// other tier still has stations.
fn validate_for_sim(s: &Scenario) -> Result<()> {
    if s.rf.intensity < 0.0 || s.thz.intensity < 0.0 {
        return Err(Error::validation("intensity", "must be >= 0"));
    }
    if s.rf.intensity + s.thz.intensity <= 0.0 {
        return Err(Error::validation("intensity", "at least one tier must have stations"));
    }
    // check every other field through the scenario validator
    let mut probe = *s;
    probe.rf.intensity = probe.rf.intensity.max(1e-12);
    probe.thz.intensity = probe.thz.intensity.max(1e-12);
    probe.validate()
}

/// Counter-based stream: every trial derives its generators purely from
/// (seed, trial), so results do not depend on scheduling or thread count.
fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Homogeneous Poisson process in a disc of the given radius.
pub fn sample_ppp<R: Rng>(intensity: f64, radius: f64, rng: &mut R) -> Vec<[f64; 2]> {
    let mean = intensity * std::f64::consts::PI * radius * radius;
    if mean <= 0.0 {
        return Vec::new();
    }
    let count = Poisson::new(mean).expect("positive mean").sample(rng) as usize;
    (0..count)
        .map(|_| {
            let r = radius * rng.gen::<f64>().sqrt();
            let phi = rng.gen::<f64>() * 2.0 * std::f64::consts::PI;
            [r * phi.cos(), r * phi.sin()]
        })
        .collect()
}

struct Deployment {
    rf: Vec<[f64; 2]>,
    thz: Vec<[f64; 2]>,
    redraws: u64,
}

/// Drops both tiers, redrawing the rare trial where the whole region is
/// empty so the typical user always has a server.
fn deploy<R: Rng>(s: &Scenario, cfg: &SimConfig, rng: &mut R) -> Deployment {
    let radius = cfg.deployment_radius();
    let mut redraws = 0;
    loop {
        let rf = sample_ppp(s.rf.intensity, radius, rng);
        let thz = sample_ppp(s.thz.intensity, radius, rng);
        if !rf.is_empty() || !thz.is_empty() {
            return Deployment { rf, thz, redraws };
        }
        redraws += 1;
    }
}

fn distance(p: [f64; 2], q: [f64; 2]) -> f64 {
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
}

/// Strongest long-term (fading-free, max-gain) server seen from `pos`.
/// `boost` multiplies the power of one specific BS, which expresses
/// handoff hysteresis in favor of the current server.
fn best_server(
    s: &Scenario,
    dep: &Deployment,
    pos: [f64; 2],
    boost: Option<(Tier, usize, f64)>,
) -> Option<(Tier, usize, f64, f64)> {
    let mut best: Option<(Tier, usize, f64, f64)> = None;
    let mut consider = |tier: Tier, idx: usize, d: f64, mut p: f64| {
        if let Some((bt, bi, factor)) = boost {
            if bt == tier && bi == idx {
                p *= factor;
            }
        }
        if best.map_or(true, |(_, _, bp, _)| p > bp) {
            best = Some((tier, idx, p, d));
        }
    };
    for (i, &b) in dep.rf.iter().enumerate() {
        let d = distance(pos, b).max(1e-9);
        consider(Tier::Rf, i, d, rf_received_power(s, d).expect("positive distance"));
    }
    for (i, &b) in dep.thz.iter().enumerate() {
        let d = distance(pos, b).max(1e-9);
        consider(Tier::Thz, i, d, thz_received_power(s, d).expect("positive distance"));
    }
    best
}

fn run_trials<T, F>(cfg: &SimConfig, body: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..cfg.trials).into_par_iter().map(body).collect()
}

/// Empirical probability that the typical user associates with the THz tier.
pub fn simulate_association(s: &Scenario, cfg: &SimConfig) -> Result<AssociationEstimate> {
    validate_for_sim(s)?;
    cfg.validate()?;
    let rows = run_trials(cfg, |trial| {
        let mut rng = trial_rng(cfg.seed, trial * 2);
        let dep = deploy(s, cfg, &mut rng);
        let (tier, ..) = best_server(s, &dep, [0.0, 0.0], None).expect("nonempty deployment");
        (u64::from(tier == Tier::Thz), dep.redraws)
    });
    let thz_count: u64 = rows.iter().map(|r| r.0).sum();
    let redraws: u64 = rows.iter().map(|r| r.1).sum();
    Ok(AssociationEstimate {
        a_thz: thz_count as f64 / cfg.trials as f64,
        thz_count,
        trials: cfg.trials,
        redraws,
    })
}

/// One handoff experiment: associate at the origin, move the user, check
/// whether the strongest long-term server changes identity. Returns the
/// initial tier, whether a handoff occurred, and the serving distance.
fn handoff_trial<R: Rng>(
    s: &Scenario,
    cfg: &SimConfig,
    direction: Option<f64>,
    rng: &mut R,
) -> (Tier, bool, f64, u64) {
    let dep = deploy(s, cfg, rng);
    let (tier, idx, _, d0) = best_server(s, &dep, [0.0, 0.0], None).expect("nonempty deployment");
    let v = s.mobility.speed;
    if v == 0.0 {
        return (tier, false, d0, dep.redraws);
    }
    // the forced angle is measured against the ray pointing away from the
    // serving BS, matching the moved-distance law R^2 = r^2 + v^2 + 2rv cos
    let phi = match direction {
        Some(theta) => {
            let b = match tier {
                Tier::Rf => dep.rf[idx],
                Tier::Thz => dep.thz[idx],
            };
            let away = (-b[1]).atan2(-b[0]);
            away + theta
        }
        None => rng.gen::<f64>() * 2.0 * std::f64::consts::PI,
    };
    let pos = [v * phi.cos(), v * phi.sin()];
    let hysteresis = s.mobility.hysteresis;
    let (new_tier, new_idx, ..) =
        best_server(s, &dep, pos, Some((tier, idx, hysteresis))).expect("nonempty deployment");
    let ho = (new_tier, new_idx) != (tier, idx);
    (tier, ho, d0, dep.redraws)
}

/// Empirical handoff probabilities; `direction` forces the movement angle
/// relative to the serving BS, otherwise the direction is uniform.
pub fn simulate_handoff(
    s: &Scenario,
    cfg: &SimConfig,
    direction: Option<f64>,
) -> Result<HandoffEstimate> {
    validate_for_sim(s)?;
    cfg.validate()?;
    let rows = run_trials(cfg, |trial| {
        let mut rng = trial_rng(cfg.seed, trial * 2);
        handoff_trial(s, cfg, direction, &mut rng)
    });
    let mut est = HandoffEstimate {
        p_ho_from_thz: 0.0,
        p_ho_from_rf: 0.0,
        p_overall: 0.0,
        thz_trials: 0,
        rf_trials: 0,
        ho_from_thz: 0,
        ho_from_rf: 0,
        trials: cfg.trials,
        redraws: 0,
    };
    for (tier, ho, _, redraws) in rows {
        est.redraws += redraws;
        match tier {
            Tier::Thz => {
                est.thz_trials += 1;
                est.ho_from_thz += u64::from(ho);
            }
            Tier::Rf => {
                est.rf_trials += 1;
                est.ho_from_rf += u64::from(ho);
            }
        }
    }
    if est.thz_trials > 0 {
        est.p_ho_from_thz = est.ho_from_thz as f64 / est.thz_trials as f64;
    }
    if est.rf_trials > 0 {
        est.p_ho_from_rf = est.ho_from_rf as f64 / est.rf_trials as f64;
    }
    est.p_overall = (est.ho_from_thz + est.ho_from_rf) as f64 / cfg.trials as f64;
    Ok(est)
}

/// Instantaneous SINR of the serving link. THz links are deterministic
/// given alignment; interfering TBSs hit the user's main lobe with
/// probability F and are silent otherwise. RF links draw exponential
/// fading per trial on both the serving and interfering paths.
fn sinr_trial<R: Rng>(
    s: &Scenario,
    dep: &Deployment,
    opts: &CoverageSimOptions,
    rng: &mut R,
) -> (Tier, f64, f64) {
    let (tier, idx, _, d0) = best_server(s, &dep, [0.0, 0.0], None).expect("nonempty deployment");
    let derived = s.derived();
    let sinr = match tier {
        Tier::Thz => {
            let mut signal = thz_received_power(s, d0).expect("positive distance");
            if let Some(points) = &opts.misalignment {
                let total: f64 = points.iter().map(|&(_, w)| w).sum();
                let mut pick = rng.gen::<f64>() * total;
                let mut chi = points.last().map_or(1.0, |&(v, _)| v);
                for &(value, weight) in points {
                    pick -= weight;
                    if pick <= 0.0 {
                        chi = value;
                        break;
                    }
                }
                signal *= chi;
            }
            // absorbed fraction of every reaching signal re-enters as noise
            let mut molecular = if opts.molecular_noise {
                s.thz.tx_power * derived.gamma_thz * (1.0 - (-s.thz.absorption * d0).exp())
                    / (d0 * d0)
            } else {
                0.0
            };
            let mut interference = 0.0;
            for (i, &b) in dep.thz.iter().enumerate() {
                if i == idx {
                    continue;
                }
                if rng.gen::<f64>() >= derived.alignment_prob {
                    continue;
                }
                let d = distance([0.0, 0.0], b).max(1e-9);
                interference += thz_received_power(s, d).expect("positive distance");
                if opts.molecular_noise {
                    molecular += s.thz.tx_power * derived.gamma_thz
                        * (1.0 - (-s.thz.absorption * d).exp())
                        / (d * d);
                }
            }
            signal / (s.thz.thermal_noise + molecular + interference)
        }
        Tier::Rf => {
            let fade: f64 = rng.sample(Exp1);
            let signal = fade * rf_received_power(s, d0).expect("positive distance");
            let mut interference = 0.0;
            for (i, &b) in dep.rf.iter().enumerate() {
                if i == idx {
                    continue;
                }
                let h: f64 = rng.sample(Exp1);
                let d = distance([0.0, 0.0], b).max(1e-9);
                interference += h * rf_received_power(s, d).expect("positive distance");
            }
            signal / (s.rf.thermal_noise + interference)
        }
    };
    (tier, d0, sinr)
}

/// Full per-trial coverage records; the mobility variant draws an
/// independent deployment for the handoff experiment so the mean factors as
/// coverage times one minus the handoff cost.
pub fn simulate_coverage_outcomes(
    s: &Scenario,
    cfg: &SimConfig,
    opts: &CoverageSimOptions,
) -> Result<Vec<TrialOutcome>> {
    validate_for_sim(s)?;
    cfg.validate()?;
    if let Some(b) = &opts.blockage {
        b.validate()?;
    }
    let tau_thz = s.thz_sinr_threshold();
    let tau_rf = s.rf_sinr_threshold();
    Ok(run_trials(cfg, |trial| {
        let mut rng = trial_rng(cfg.seed, trial * 2);
        let dep = deploy(s, cfg, &mut rng);
        let (tier, d0, sinr) = sinr_trial(s, &dep, opts, &mut rng);
        let tau = match tier {
            Tier::Thz => tau_thz,
            Tier::Rf => tau_rf,
        };
        let mut covered = sinr > tau;
        if covered && tier == Tier::Thz {
            if let Some(b) = &opts.blockage {
                if rng.gen::<f64>() >= b.p_los(d0) {
                    covered = false;
                }
            }
        }
        let mut ho_occurred = false;
        if opts.with_mobility {
            let mut ho_rng = trial_rng(cfg.seed, trial * 2 + 1);
            let (_, ho, ..) = handoff_trial(s, cfg, None, &mut ho_rng);
            ho_occurred = ho;
            if ho && covered && ho_rng.gen::<f64>() < s.mobility.ho_cost {
                covered = false;
            }
        }
        TrialOutcome {
            trial,
            tier,
            serving_distance: d0,
            ho_occurred,
            sinr,
            covered,
        }
    }))
}

/// Empirical coverage probability.
pub fn simulate_coverage(
    s: &Scenario,
    cfg: &SimConfig,
    opts: &CoverageSimOptions,
) -> Result<CoverageEstimate> {
    let outcomes = simulate_coverage_outcomes(s, cfg, opts)?;
    let covered = outcomes.iter().filter(|o| o.covered).count() as u64;
    Ok(CoverageEstimate {
        coverage: covered as f64 / cfg.trials as f64,
        covered,
        trials: cfg.trials,
        redraws: 0,
    })
}
