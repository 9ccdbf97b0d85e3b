//! End-to-end acceptance checks. Each test prints a single PASS/FAIL line
//! (visible with `--nocapture`) and asserts the same condition, so the suite
//! doubles as a human-readable report and a hard gate.
//!
//! Analytical quantities are compared against the internal Monte-Carlo
//! simulator at 1e5 trials; the remaining checks pin closed forms, solver
//! behavior and qualitative trends that the model must reproduce.

use std::time::Instant;

use hybridnet::absorption::{
    molecular_absorption_coefficient, reference_line, AbsorptionMedium, AmbientConditions,
};
use hybridnet::analysis::{
    associate, association_prob_thz, association_prob_thz_closed_form_alpha4,
    conditional_distance_pdf_rf, conditional_distance_pdf_rf_exact, conditional_distance_pdf_thz,
};
use hybridnet::coverage::{
    coverage_thz, coverage_thz_with_blockage, coverage_total, coverage_with_mobility,
    lt_aggregate_thz_interference, BlockageModel, CoverageConfig,
};
use hybridnet::handoff::{
    lens_area, no_ho_prob_straight_line_rf, no_ho_prob_straight_line_thz, overall_ho_probability,
};
use hybridnet::model::baseline_scenario;
use hybridnet::montecarlo::{
    simulate_association, simulate_coverage, simulate_handoff, CoverageSimOptions, SimConfig,
};
use hybridnet::numerics::{gauss_2f1_coverage_kernel, integrate, QuadratureSpec};
use num_complex::Complex;

const TRIALS: u64 = 100_000;

fn sim_config(seed: u64) -> SimConfig {
    SimConfig {
        trials: TRIALS,
        seed,
        ..SimConfig::default()
    }
}

fn report(name: &str, failures: &[String]) {
    if failures.is_empty() {
        println!("acceptance {name}: PASS");
    } else {
        println!("acceptance {name}: FAIL");
        for f in failures {
            println!("  - {f}");
        }
    }
    assert!(failures.is_empty(), "{name}: {failures:?}");
}

#[test]
fn association_probability_matches_simulation() {
    let mut failures = Vec::new();
    for (i, ka) in [0.0, 0.01, 0.05, 0.2].into_iter().enumerate() {
        let mut s = baseline_scenario();
        s.thz.absorption = ka;
        let start = Instant::now();
        let analytic = association_prob_thz(&s).unwrap();
        let sim = simulate_association(&s, &sim_config(100 + i as u64)).unwrap();
        let elapsed = start.elapsed().as_secs_f64();
        let delta = (analytic - sim.a_thz).abs();
        if delta > 0.01 {
            failures.push(format!(
                "ka={ka}: analytic {analytic:.4} vs simulated {:.4} (delta {delta:.4} > 0.01)",
                sim.a_thz
            ));
        }
        if elapsed > 60.0 {
            failures.push(format!("ka={ka}: took {elapsed:.1}s > 60s"));
        }
    }
    report("association vs simulation (+-0.01, 1e5 trials)", &failures);
}

#[test]
fn closed_form_association_consistent_with_integral() {
    let mut failures = Vec::new();
    for l_r in [1e-5, 1e-4] {
        for l_t in [1e-4, 5e-4] {
            let mut s = baseline_scenario();
            s.rf.intensity = l_r;
            s.thz.intensity = l_t;
            s.thz.absorption = 0.0;
            let numeric = association_prob_thz(&s).unwrap();
            let closed = association_prob_thz_closed_form_alpha4(&s).unwrap();
            if (numeric - closed).abs() > 1e-6 {
                failures.push(format!(
                    "l_r={l_r} l_t={l_t}: {numeric} vs {closed}"
                ));
            }
        }
    }
    report("closed-form association vs quadrature (+-1e-6)", &failures);
}

#[test]
fn correction_factor_solver_behaves() {
    let mut failures = Vec::new();

    let mut s = baseline_scenario();
    s.thz.absorption = 0.0;
    let mu0 = associate(&s).unwrap().mu;
    if mu0 > 1e-4 {
        failures.push(format!("mu at zero absorption = {mu0} > 1e-4"));
    }

    let mut s = baseline_scenario();
    s.thz.absorption = 0.05;
    s.rf.intensity = 1e-5;
    s.thz.intensity = 1e-4;
    let mu_ref = associate(&s).unwrap().mu;
    if (mu_ref - 0.82).abs() > 0.1 {
        failures.push(format!("reference configuration mu = {mu_ref} not 0.82 +- 0.1"));
    }

    for l_t in [1e-4, 5e-4] {
        let mut prev = -1.0;
        for ka in [0.01, 0.05, 0.1, 0.2] {
            let mut s = baseline_scenario();
            s.thz.intensity = l_t;
            s.thz.absorption = ka;
            let mu = associate(&s).unwrap().mu;
            if mu < prev - 1e-9 {
                failures.push(format!("mu not increasing in ka at l_t={l_t}: {mu} after {prev}"));
            }
            prev = mu;
        }
    }
    for ka in [0.01, 0.05] {
        let mut prev = f64::INFINITY;
        for l_t in [1e-4, 5e-4, 1e-3] {
            let mut s = baseline_scenario();
            s.thz.intensity = l_t;
            s.thz.absorption = ka;
            let mu = associate(&s).unwrap().mu;
            if mu > prev + 1e-9 {
                failures.push(format!("mu not decreasing in l_t at ka={ka}: {mu} after {prev}"));
            }
            prev = mu;
        }
    }
    report("correction-factor solver (limit, reference value, monotonicity)", &failures);
}

#[test]
fn handoff_probabilities_match_simulation() {
    let mut failures = Vec::new();
    let mut check = |label: String, analytic: f64, simulated: f64| {
        let delta = (analytic - simulated).abs();
        if delta > 0.02 {
            failures.push(format!(
                "{label}: analytic {analytic:.4} vs simulated {simulated:.4} (delta {delta:.4} > 0.02)"
            ));
        }
    };
    let mut seed = 400;
    for v in [10.0, 30.0, 56.0] {
        for ka in [0.01, 0.05] {
            let mut s = baseline_scenario();
            s.mobility.speed = v;
            s.thz.absorption = ka;
            let assoc = associate(&s).unwrap();
            let ho = overall_ho_probability(&s, &assoc).unwrap();
            let sim = simulate_handoff(&s, &sim_config(seed), None).unwrap();
            check(format!("v={v} ka={ka} P(H|T)"), ho.p_ho_from_thz, sim.p_ho_from_thz);
            check(format!("v={v} ka={ka} P(H|R)"), ho.p_ho_from_rf, sim.p_ho_from_rf);
            check(format!("v={v} ka={ka} P(H)"), ho.p_overall, sim.p_overall);

            // straight-line motion directly away from the serving station
            let sl_thz = 1.0 - no_ho_prob_straight_line_thz(&s, &assoc).unwrap();
            let sl_rf = 1.0 - no_ho_prob_straight_line_rf(&s, &assoc).unwrap();
            let sl_all = assoc.a_thz * sl_thz + assoc.a_rf * sl_rf;
            let sim = simulate_handoff(&s, &sim_config(seed + 1), Some(0.0)).unwrap();
            check(format!("v={v} ka={ka} straight P(H|T)"), sl_thz, sim.p_ho_from_thz);
            check(format!("v={v} ka={ka} straight P(H|R)"), sl_rf, sim.p_ho_from_rf);
            check(format!("v={v} ka={ka} straight P(H)"), sl_all, sim.p_overall);
            seed += 2;
        }
    }
    report("handoff vs simulation (+-0.02, 1e5 trials, uniform and straight-line)", &failures);
}

#[test]
fn thz_densification_raises_handoff_more_than_rf_densification() {
    let ph = |l_t: f64, l_r: f64| {
        let mut s = baseline_scenario();
        s.thz.intensity = l_t;
        s.rf.intensity = l_r;
        let assoc = associate(&s).unwrap();
        overall_ho_probability(&s, &assoc).unwrap().p_overall
    };
    let gain_thz = ph(5e-4, 1e-5) - ph(1e-4, 1e-5);
    let gain_rf = ph(5e-4, 1e-3) - ph(5e-4, 1e-5);
    let mut failures = Vec::new();
    if gain_thz <= gain_rf {
        failures.push(format!(
            "THz densification gain {gain_thz:.4} not larger than RF gain {gain_rf:.4}"
        ));
    }
    report("densification trend (THz raises P(H) more than RF)", &failures);
}

#[test]
fn conditional_handoff_ordering_flips_with_absorption() {
    let mut failures = Vec::new();
    let ho_at = |ka: f64| {
        let mut s = baseline_scenario();
        s.thz.absorption = ka;
        let assoc = associate(&s).unwrap();
        overall_ho_probability(&s, &assoc).unwrap()
    };
    let low = ho_at(0.01);
    if low.p_ho_from_rf <= low.p_ho_from_thz {
        failures.push(format!(
            "ka=0.01: expected P(H|R) > P(H|T), got {:.4} vs {:.4}",
            low.p_ho_from_rf, low.p_ho_from_thz
        ));
    }
    let high = ho_at(0.05);
    if high.p_ho_from_thz <= high.p_ho_from_rf {
        failures.push(format!(
            "ka=0.05: expected P(H|T) > P(H|R), got {:.4} vs {:.4}",
            high.p_ho_from_thz, high.p_ho_from_rf
        ));
    }
    report("conditional handoff ordering flips between ka=0.01 and ka=0.05", &failures);
}

#[test]
fn coverage_matches_simulation_and_molecular_noise_hurts() {
    let mut failures = Vec::new();
    // integer transform indices: the fractional-index series keeps an
    // epsilon-regularized remnant of the power-law field's divergent mean,
    // which no finite simulation window can reproduce; the simulator
    // arbitrates in favor of the integer mode
    let cfg = CoverageConfig {
        integer_lt_indices: true,
        ..CoverageConfig::default()
    };
    let no_noise = CoverageConfig {
        molecular_noise: false,
        integer_lt_indices: true,
        ..CoverageConfig::default()
    };
    let mut seed = 700;
    for r_th in [0.25e9, 0.5e9, 1e9, 2e9] {
        for ka in [0.01, 0.05] {
            let mut s = baseline_scenario();
            s.rate_threshold = r_th;
            s.thz.absorption = ka;
            let assoc = associate(&s).unwrap();
            let label = format!("r_th={:.2}Gbps ka={ka}", r_th / 1e9);

            let c = coverage_total(&s, &cfg, &assoc).unwrap();
            let c_sim = simulate_coverage(&s, &sim_config(seed), &CoverageSimOptions::default())
                .unwrap()
                .coverage;
            if (c - c_sim).abs() > 0.02 {
                failures.push(format!(
                    "{label} C: analytic {c:.4} vs simulated {c_sim:.4}"
                ));
            }

            let cm = coverage_with_mobility(&s, &cfg, &assoc).unwrap();
            let cm_sim = simulate_coverage(
                &s,
                &sim_config(seed + 1),
                &CoverageSimOptions {
                    with_mobility: true,
                    ..CoverageSimOptions::default()
                },
            )
            .unwrap()
            .coverage;
            if (cm - cm_sim).abs() > 0.02 {
                failures.push(format!(
                    "{label} C_M: analytic {cm:.4} vs simulated {cm_sim:.4}"
                ));
            }

            let c_off = coverage_total(&s, &no_noise, &assoc).unwrap();
            if !(c < c_off) {
                failures.push(format!(
                    "{label}: molecular-noise-on {c:.6} not strictly below off {c_off:.6}"
                ));
            }
            seed += 2;
        }
    }
    report("coverage vs simulation (+-0.02, 1e5 trials) and molecular-noise penalty", &failures);
}

#[test]
fn mobility_coverage_nonmonotone_only_for_sparse_thz() {
    // high-speed preset with a rate target the RF tier can still serve and a
    // handoff cost of one half; the molecular absorption axis then shows an
    // interior coverage minimum for sparse THz deployments while dense ones
    // only degrade
    let ka_grid = [0.01, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35];
    let curve = |l_t: f64| -> Vec<f64> {
        ka_grid
            .iter()
            .map(|&ka| {
                let mut s = baseline_scenario();
                s.mobility.speed = 56.0;
                s.mobility.ho_cost = 0.5;
                s.rate_threshold = 0.25e9;
                s.thz.intensity = l_t;
                s.thz.absorption = ka;
                let assoc = associate(&s).unwrap();
                coverage_with_mobility(&s, &CoverageConfig::default(), &assoc).unwrap()
            })
            .collect()
    };
    let mut failures = Vec::new();
    for l_t in [5e-5, 1e-4] {
        let vals = curve(l_t);
        let (argmin, min) = vals
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, v)| (i, *v))
            .unwrap();
        let interior = argmin > 0 && argmin < vals.len() - 1;
        let rises_after = vals.last().unwrap() > &(min + 1e-6);
        if !(interior && rises_after) {
            failures.push(format!(
                "l_t={l_t}: no interior minimum, values {vals:?}"
            ));
        }
    }
    for l_t in [5e-4, 1e-3] {
        let vals = curve(l_t);
        if vals.windows(2).any(|w| w[1] > w[0] + 1e-6) {
            failures.push(format!("l_t={l_t}: not decreasing, values {vals:?}"));
        }
    }
    report("mobility coverage vs absorption (interior minimum only when THz is sparse)", &failures);
}

#[test]
fn property_suite_runs_quickly() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let spec = QuadratureSpec::default();
    let s = baseline_scenario();
    let assoc = associate(&s).unwrap();

    // conditional serving-distance pdfs integrate to one
    let r_max = 2000.0;
    let masses = [
        ("thz", integrate(|r| conditional_distance_pdf_thz(&s, assoc.a_thz, r), 0.0, r_max, &spec)),
        ("rf exact", integrate(|r| conditional_distance_pdf_rf_exact(&s, assoc.a_rf, r).unwrap(), 0.0, r_max, &spec)),
        ("rf surrogate", integrate(|r| conditional_distance_pdf_rf(&s, assoc.mu, assoc.a_rf, r), 0.0, r_max, &spec)),
    ];
    for (name, mass) in masses {
        let mass = mass.unwrap();
        if (mass - 1.0).abs() > 1e-4 {
            failures.push(format!("{name} pdf mass {mass}"));
        }
    }

    // interference transform: unity at the origin, a characteristic function
    // on the imaginary axis
    let cfg = CoverageConfig::default();
    for r0 in [1.0, 5.0, 20.0] {
        let at_zero = lt_aggregate_thz_interference(&s, &cfg, Complex::new(0.0, 0.0), r0).unwrap();
        if (at_zero - Complex::new(1.0, 0.0)).norm() > 1e-12 {
            failures.push(format!("transform at zero = {at_zero} (r0={r0})"));
        }
        for omega in [1e3, 1e6, 1e9, 1e12] {
            let v = lt_aggregate_thz_interference(&s, &cfg, Complex::new(0.0, omega), r0).unwrap();
            if v.norm() > 1.0 + 1e-9 {
                failures.push(format!("|transform(j{omega})| = {} > 1 (r0={r0})", v.norm()));
            }
        }
    }

    // disc-intersection geometry
    for (r1, r2, d) in [(1.0, 2.0, 1.5), (3.0, 0.5, 3.2), (2.0, 2.0, 0.7)] {
        if (lens_area(r1, r2, d) - lens_area(r2, r1, d)).abs() > 1e-12 {
            failures.push(format!("lens not symmetric at ({r1},{r2},{d})"));
        }
    }
    if lens_area(1.0, 2.0, 3.0) != 0.0 || lens_area(1.0, 2.0, 3.5) != 0.0 {
        failures.push("lens nonzero for separated discs".into());
    }
    let pi = std::f64::consts::PI;
    if (lens_area(1.0, 3.0, 1.0) - pi).abs() > 1e-12 {
        failures.push("contained disc does not give its full area".into());
    }
    let (r, d) = (2.0_f64, 1.3_f64);
    let equal_overlap = 2.0 * r * r * (d / (2.0 * r)).acos()
        - 0.5 * d * (4.0 * r * r - d * d).sqrt();
    if (lens_area(r, r, d) - equal_overlap).abs() > 1e-12 {
        failures.push("equal-radius overlap formula mismatch".into());
    }
    let mut prev = 0.0;
    for r1 in [0.5, 1.0, 1.5, 2.0] {
        let a = lens_area(r1, 2.0, 1.0);
        if a < prev - 1e-12 {
            failures.push("lens not monotone in radius".into());
        }
        prev = a;
    }

    // closed form of the interference kernel at pathloss exponent 4
    for tau in [0.1, 1.0, 3.0, 40.0] {
        let kernel = gauss_2f1_coverage_kernel(tau, 4.0).unwrap();
        let exact = tau.sqrt() * tau.sqrt().atan();
        if (kernel - exact).abs() > 1e-8 {
            failures.push(format!("kernel({tau}, 4) = {kernel} vs {exact}"));
        }
    }

    // line summation is additive and linear in line intensity
    let line = reference_line();
    let cond = AmbientConditions::default();
    let f = 1e12;
    let one = molecular_absorption_coefficient(&AbsorptionMedium::new(vec![line], cond), f).unwrap();
    let two = molecular_absorption_coefficient(&AbsorptionMedium::new(vec![line, line], cond), f).unwrap();
    if (two - 2.0 * one).abs() > 1e-12 * one.abs().max(1.0) {
        failures.push("absorption not additive over lines".into());
    }
    let mut scaled_line = line;
    scaled_line.line_intensity *= 3.0;
    let scaled =
        molecular_absorption_coefficient(&AbsorptionMedium::new(vec![scaled_line], cond), f).unwrap();
    if (scaled - 3.0 * one).abs() > 1e-10 * one.abs().max(1.0) {
        failures.push("absorption not linear in line intensity".into());
    }

    // immobile user: no handoffs, mobility leaves coverage untouched
    let mut still = baseline_scenario();
    still.mobility.speed = 0.0;
    let assoc_still = associate(&still).unwrap();
    let ho = overall_ho_probability(&still, &assoc_still).unwrap();
    if ho.p_overall > 1e-4 {
        failures.push(format!("P(H) = {} at zero speed", ho.p_overall));
    }
    let c = coverage_total(&still, &cfg, &assoc_still).unwrap();
    let cm = coverage_with_mobility(&still, &cfg, &assoc_still).unwrap();
    if (c - cm).abs() > 1e-4 {
        failures.push(format!("zero speed: C={c} C_M={cm}"));
    }

    // free handoffs: mobility leaves coverage untouched
    let mut free = baseline_scenario();
    free.mobility.ho_cost = 0.0;
    let assoc_free = associate(&free).unwrap();
    let c = coverage_total(&free, &cfg, &assoc_free).unwrap();
    let cm = coverage_with_mobility(&free, &cfg, &assoc_free).unwrap();
    if (c - cm).abs() > 1e-9 {
        failures.push(format!("zero handoff cost: C={c} C_M={cm}"));
    }

    // blockage strictly reduces THz coverage
    let blockage = BlockageModel {
        blocker_intensity: 1e-3,
        mean_length: 2.0,
        mean_width: 1.0,
    };
    let mut s_cov = baseline_scenario();
    s_cov.rate_threshold = 0.25e9;
    let assoc_cov = associate(&s_cov).unwrap();
    let tau = s_cov.thz_sinr_threshold();
    let open = coverage_thz(&s_cov, &cfg, &assoc_cov, tau).unwrap();
    let blocked = coverage_thz_with_blockage(&s_cov, &cfg, &assoc_cov, tau, &blockage).unwrap();
    if !(blocked < open) {
        failures.push(format!("blockage did not reduce coverage: {blocked} vs {open}"));
    }

    // fixed seed gives identical results regardless of worker count
    let cfg_sim = SimConfig {
        trials: 2_000,
        seed: 9,
        ..SimConfig::default()
    };
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| simulate_handoff(&s, &cfg_sim, None).unwrap())
    };
    if run(1) != run(4) {
        failures.push("simulation not deterministic across thread counts".into());
    }

    let elapsed = start.elapsed().as_secs_f64();
    if elapsed > 300.0 {
        failures.push(format!("property suite took {elapsed:.0}s > 300s"));
    }
    report("property suite (pdfs, transforms, geometry, limits, determinism)", &failures);
}
