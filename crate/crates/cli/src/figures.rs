//! Canned parameter grids behind `reproduce`. Every assumption that is not
//! part of the default scenario is spelled out in the emitted table notes.

use hybridnet::coverage::BlockageModel;
use hybridnet::model::{baseline_scenario, Scenario};
use hybridnet::montecarlo::SimConfig;
use hybridnet::Result;

use crate::report::{analytic_report, montecarlo_report, strict_mismatches, EvalOptions, Metric};
use crate::table::{Cell, Table};

const VELOCITY_GRID: [f64; 6] = [5.0, 10.0, 20.0, 30.0, 40.0, 56.0];
const KA_GRID: [f64; 8] = [0.01, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35];

/// One grid point: label cells shown on the axes plus the scenario and model
/// toggles that produce the row.
struct Point {
    labels: Vec<Cell>,
    scenario: Scenario,
    opts: EvalOptions,
}

struct Figure {
    label_columns: Vec<&'static str>,
    metrics: Vec<Metric>,
    notes: Vec<String>,
    points: Vec<Point>,
    /// No Monte-Carlo counterpart exists (e.g. the correction factor).
    analytic_only: bool,
}

fn default_notes(s: &Scenario) -> Vec<String> {
    vec![format!(
        "defaults: lambda_R={:.0e} lambda_T={:.0e} ka={} v={} R_th={:.2e} eta={} eta_H={}",
        s.rf.intensity,
        s.thz.intensity,
        s.thz.absorption,
        s.mobility.speed,
        s.rate_threshold,
        s.mobility.ho_cost,
        s.mobility.hysteresis
    )]
}

fn figure(id: &str) -> Option<Figure> {
    let base = baseline_scenario();
    let mut notes = default_notes(&base);
    let fig = match id {
        "fig3a" => {
            notes.push("ka=0.01; horizontal axis: velocity per deployment pair".into());
            let mut points = Vec::new();
            for &(l_r, l_t) in &[(1e-5, 1e-4), (1e-5, 5e-4), (1e-3, 5e-4)] {
                for &v in &VELOCITY_GRID {
                    let mut s = base;
                    s.thz.absorption = 0.01;
                    s.rf.intensity = l_r;
                    s.thz.intensity = l_t;
                    s.mobility.speed = v;
                    points.push(Point {
                        labels: vec![v.into(), l_r.into(), l_t.into()],
                        scenario: s,
                        opts: EvalOptions::default(),
                    });
                }
            }
            Figure {
                label_columns: vec!["velocity_m", "lambda_r", "lambda_t"],
                metrics: vec![Metric::PHoThz, Metric::PHo],
                notes,
                points,
                analytic_only: false,
            }
        }
        "fig3b" => {
            notes.push("conditional handoff probabilities per serving tier".into());
            let mut points = Vec::new();
            for &ka in &[0.01, 0.05] {
                for &v in &VELOCITY_GRID {
                    let mut s = base;
                    s.thz.absorption = ka;
                    s.mobility.speed = v;
                    points.push(Point {
                        labels: vec![v.into(), ka.into()],
                        scenario: s,
                        opts: EvalOptions::default(),
                    });
                }
            }
            Figure {
                label_columns: vec!["velocity_m", "ka_per_m"],
                metrics: vec![Metric::PHoThz, Metric::PHoRf],
                notes,
                points,
                analytic_only: false,
            }
        }
        "fig4" => {
            notes.push("static user; coverage vs rate target, molecular noise on and off".into());
            let mut points = Vec::new();
            for &ka in &[0.01, 0.05] {
                for &noise_off in &[false, true] {
                    for &rate in &[0.25e9, 0.5e9, 1e9, 2e9] {
                        let mut s = base;
                        s.thz.absorption = ka;
                        s.rate_threshold = rate;
                        points.push(Point {
                            labels: vec![
                                (rate / 1e9).into(),
                                ka.into(),
                                if noise_off { "off" } else { "on" }.into(),
                            ],
                            scenario: s,
                            opts: EvalOptions {
                                molecular_noise_off: noise_off,
                                ..EvalOptions::default()
                            },
                        });
                    }
                }
            }
            Figure {
                label_columns: vec!["rate_gbps", "ka_per_m", "molecular_noise"],
                metrics: vec![Metric::C],
                notes,
                points,
                analytic_only: false,
            }
        }
        "fig5" => {
            notes.push("static user; coverage vs THz station intensity".into());
            let mut points = Vec::new();
            for &ka in &[0.01, 0.05] {
                for &noise_off in &[false, true] {
                    for &l_t in &[5e-5, 1e-4, 2e-4, 5e-4, 1e-3] {
                        let mut s = base;
                        s.thz.absorption = ka;
                        s.thz.intensity = l_t;
                        points.push(Point {
                            labels: vec![
                                l_t.into(),
                                ka.into(),
                                if noise_off { "off" } else { "on" }.into(),
                            ],
                            scenario: s,
                            opts: EvalOptions {
                                molecular_noise_off: noise_off,
                                ..EvalOptions::default()
                            },
                        });
                    }
                }
            }
            Figure {
                label_columns: vec!["lambda_t", "ka_per_m", "molecular_noise"],
                metrics: vec![Metric::C],
                notes,
                points,
                analytic_only: false,
            }
        }
        "fig6" => {
            notes.push("ka=0.05; mobility-aware coverage vs velocity".into());
            let mut points = Vec::new();
            for &noise_off in &[false, true] {
                for &v in &VELOCITY_GRID {
                    let mut s = base;
                    s.thz.absorption = 0.05;
                    s.mobility.speed = v;
                    points.push(Point {
                        labels: vec![v.into(), if noise_off { "off" } else { "on" }.into()],
                        scenario: s,
                        opts: EvalOptions {
                            molecular_noise_off: noise_off,
                            ..EvalOptions::default()
                        },
                    });
                }
            }
            Figure {
                label_columns: vec!["velocity_m", "molecular_noise"],
                metrics: vec![Metric::CMobility],
                notes,
                points,
                analytic_only: false,
            }
        }
        "fig7" => {
            notes.push("correction factor grid; no empirical counterpart".into());
            let mut points = Vec::new();
            for &l_t in &[1e-4, 5e-4, 1e-3] {
                for &ka in &[0.01, 0.05, 0.1, 0.15, 0.2] {
                    let mut s = base;
                    s.thz.intensity = l_t;
                    s.thz.absorption = ka;
                    points.push(Point {
                        labels: vec![ka.into(), l_t.into()],
                        scenario: s,
                        opts: EvalOptions::default(),
                    });
                }
            }
            Figure {
                label_columns: vec!["ka_per_m", "lambda_t"],
                metrics: vec![Metric::Mu],
                notes,
                points,
                analytic_only: true,
            }
        }
        "fig8" => {
            notes.push(
                "preset: v=56 m, R_th=0.25 Gbps, handoff cost eta=0.5; sparse THz \
                 deployments show an interior coverage minimum, dense ones only degrade"
                    .into(),
            );
            let mut points = Vec::new();
            for &l_t in &[5e-5, 1e-4, 5e-4, 1e-3] {
                for &ka in &KA_GRID {
                    let mut s = base;
                    s.mobility.speed = 56.0;
                    s.mobility.ho_cost = 0.5;
                    s.rate_threshold = 0.25e9;
                    s.thz.intensity = l_t;
                    s.thz.absorption = ka;
                    points.push(Point {
                        labels: vec![ka.into(), l_t.into()],
                        scenario: s,
                        opts: EvalOptions::default(),
                    });
                }
            }
            Figure {
                label_columns: vec!["ka_per_m", "lambda_t"],
                metrics: vec![Metric::CMobility],
                notes,
                points,
                analytic_only: false,
            }
        }
        "fig9" => {
            notes.push(
                "preset: rectangular blockers with mean length 2 m and mean width 1 m".into(),
            );
            let mut points = Vec::new();
            for &l_b in &[0.0, 2e-4, 5e-4, 1e-3, 2e-3] {
                points.push(Point {
                    labels: vec![l_b.into()],
                    scenario: base,
                    opts: EvalOptions {
                        blockage: Some(BlockageModel {
                            blocker_intensity: l_b,
                            mean_length: 2.0,
                            mean_width: 1.0,
                        }),
                        ..EvalOptions::default()
                    },
                });
            }
            Figure {
                label_columns: vec!["blocker_intensity"],
                metrics: vec![Metric::CMobility],
                notes,
                points,
                analytic_only: false,
            }
        }
        _ => return None,
    };
    Some(fig)
}

pub fn known_figures() -> &'static [&'static str] {
    &[
        "fig3a", "fig3b", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9",
    ]
}

/// Build the full table for one figure id; `None` if the id is unknown.
/// Returns the table plus any strict-mode mismatches.
pub fn reproduce(
    id: &str,
    sim: &SimConfig,
    with_montecarlo: bool,
) -> Option<Result<(Table, Vec<String>)>> {
    let fig = figure(id)?;
    Some(build(fig, sim, with_montecarlo))
}

fn build(fig: Figure, sim: &SimConfig, with_montecarlo: bool) -> Result<(Table, Vec<String>)> {
    let mut columns: Vec<&str> = fig.label_columns.clone();
    for m in &fig.metrics {
        columns.push(m.name());
    }
    columns.push("method");
    let mut table = Table::new(&columns);
    for note in &fig.notes {
        table.note(note.clone());
    }
    let mut mismatches = Vec::new();
    for point in &fig.points {
        let analytic = analytic_report(&point.scenario, &fig.metrics, &point.opts)?;
        let mut row = point.labels.clone();
        row.extend(analytic.cells(&fig.metrics));
        row.push("analytic".into());
        table.push(row);
        if with_montecarlo && !fig.analytic_only {
            let simulated = montecarlo_report(&point.scenario, &fig.metrics, &point.opts, sim)?;
            let mut row = point.labels.clone();
            row.extend(simulated.cells(&fig.metrics));
            row.push("montecarlo".into());
            table.push(row);
            let label: Vec<String> = point
                .labels
                .iter()
                .map(|c| match c {
                    Cell::Num(v) => format!("{v}"),
                    Cell::Text(t) => t.clone(),
                    Cell::Empty => String::new(),
                })
                .collect();
            mismatches.extend(strict_mismatches(
                &label.join("/"),
                &analytic,
                &simulated,
                &fig.metrics,
            ));
        }
    }
    Ok((table, mismatches))
}
