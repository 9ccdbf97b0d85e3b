//! Handoff probabilities for a user that moves a distance v in a uniformly
//! random direction. The serving tier's empty disc around the old position
//! and the required empty disc around the new position overlap in a lens;
//! the probability that no station falls in the newly exposed crescent, in
//! either tier via the equivalent-distance maps, gives the no-handoff
//! probability.

use crate::analysis::{
    conditional_distance_pdf_rf_exact, conditional_distance_pdf_thz,
    equivalent_distance_rf_of_thz, equivalent_distance_thz_of_rf_exact, AssociationResult,
};
use crate::error::Result;
use crate::model::Scenario;
use crate::numerics::{integrate, tail_truncation_radius, QuadratureSpec};

/// Handoff probabilities split by the initially serving tier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HandoffResult {
    /// Probability of a handoff given the user was served by the THz tier.
    pub p_ho_from_thz: f64,
    /// Probability of a handoff given the user was served by the RF tier.
    pub p_ho_from_rf: f64,
    /// Unconditional handoff probability.
    pub p_overall: f64,
}

/// Intersection area of two discs with radii `r1`, `r2` and center
/// separation `d`.
pub fn lens_area(r1: f64, r2: f64, d: f64) -> f64 {
    let (small, large) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
    if small == 0.0 || d >= r1 + r2 {
        return 0.0;
    }
    if d <= large - small {
        return std::f64::consts::PI * small * small;
    }
    let clamp = |x: f64| x.clamp(-1.0, 1.0);
    let a1 = r1 * r1 * clamp((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)).acos();
    let a2 = r2 * r2 * clamp((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)).acos();
    let s = ((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)).max(0.0);
    a1 + a2 - 0.5 * s.sqrt()
}

/// Area of the new-position disc of radius `big` not already covered by the
/// old-position disc of radius `small`, centers `v` apart. This is the
/// region that must be empty of stations for the serving link to survive.
fn exposed_area(small: f64, big: f64, v: f64) -> f64 {
    (std::f64::consts::PI * big * big - lens_area(small, big, v)).max(0.0)
}

fn moved_distance(r: f64, v: f64, theta: f64) -> f64 {
    // theta = 0 means moving directly away from the serving station
    (r * r + v * v + 2.0 * r * v * theta.cos()).sqrt()
}

fn quad_spec() -> QuadratureSpec {
    QuadratureSpec {
        relative_tolerance: 1e-6,
        absolute_tolerance: 1e-9,
        max_subdivisions: 400,
    }
}

/// Survival factor exp(-λ_T S_T - λ_R S_T') for a THz-served user at
/// distance `r` moving along direction `theta`.
fn thz_survival(s: &Scenario, r: f64, theta: f64) -> f64 {
    let v = s.mobility.speed;
    let big = moved_distance(r, v, theta);
    let s_t = exposed_area(r, big, v);
    let r_rp = equivalent_distance_rf_of_thz(s, r);
    let big_rp = equivalent_distance_rf_of_thz(s, big);
    let s_tp = exposed_area(r_rp, big_rp, v);
    (-s.thz.intensity * s_t - s.rf.intensity * s_tp).exp()
}

/// Survival factor exp(-λ_R S_R - λ_T S_R') for an RF-served user.
fn rf_survival(s: &Scenario, r: f64, theta: f64) -> f64 {
    let v = s.mobility.speed;
    let big = moved_distance(r, v, theta);
    let s_r = exposed_area(r, big, v);
    let r_tp = equivalent_distance_thz_of_rf_exact(s, r).unwrap_or(f64::NAN);
    let big_tp = equivalent_distance_thz_of_rf_exact(s, big).unwrap_or(f64::NAN);
    let s_rp = exposed_area(r_tp, big_tp, v);
    (-s.rf.intensity * s_r - s.thz.intensity * s_rp).exp()
}

/// Probability of keeping the serving THz station after one movement period,
/// averaged over the serving distance and a uniform direction.
pub fn no_ho_prob_given_thz(s: &Scenario, assoc: &AssociationResult) -> Result<f64> {
    let spec = quad_spec();
    let r_max = tail_truncation_radius(s.thz.intensity);
    let p = integrate(
        |theta| {
            integrate(
                |r| conditional_distance_pdf_thz(s, assoc.a_thz, r) * thz_survival(s, r, theta),
                0.0,
                r_max,
                &spec,
            )
            .unwrap_or(f64::NAN)
        },
        0.0,
        std::f64::consts::PI,
        &spec,
    )? / std::f64::consts::PI;
    Ok(p.clamp(0.0, 1.0))
}

/// Probability of keeping the serving RF station after one movement period.
pub fn no_ho_prob_given_rf(s: &Scenario, assoc: &AssociationResult) -> Result<f64> {
    let spec = quad_spec();
    let r_max = tail_truncation_radius(s.rf.intensity);
    let p = integrate(
        |theta| {
            integrate(
                |r| {
                    conditional_distance_pdf_rf_exact(s, assoc.a_rf, r).unwrap_or(f64::NAN)
                        * rf_survival(s, r, theta)
                },
                0.0,
                r_max,
                &spec,
            )
            .unwrap_or(f64::NAN)
        },
        0.0,
        std::f64::consts::PI,
        &spec,
    )? / std::f64::consts::PI;
    Ok(p.clamp(0.0, 1.0))
}

/// Straight-line special case of the THz no-handoff probability: the user
/// moves directly away from its serving station (theta = 0), leaving a
/// single integral over the serving distance.
pub fn no_ho_prob_straight_line_thz(s: &Scenario, assoc: &AssociationResult) -> Result<f64> {
    let spec = quad_spec();
    let r_max = tail_truncation_radius(s.thz.intensity);
    let p = integrate(
        |r| conditional_distance_pdf_thz(s, assoc.a_thz, r) * thz_survival(s, r, 0.0),
        0.0,
        r_max,
        &spec,
    )?;
    Ok(p.clamp(0.0, 1.0))
}

/// Straight-line special case of the RF no-handoff probability.
pub fn no_ho_prob_straight_line_rf(s: &Scenario, assoc: &AssociationResult) -> Result<f64> {
    let spec = quad_spec();
    let r_max = tail_truncation_radius(s.rf.intensity);
    let p = integrate(
        |r| {
            conditional_distance_pdf_rf_exact(s, assoc.a_rf, r).unwrap_or(f64::NAN)
                * rf_survival(s, r, 0.0)
        },
        0.0,
        r_max,
        &spec,
    )?;
    Ok(p.clamp(0.0, 1.0))
}

/// Overall handoff probability P(H) = 1 - A_R P(no HO | RF) - A_T P(no HO | THz).
pub fn overall_ho_probability(s: &Scenario, assoc: &AssociationResult) -> Result<HandoffResult> {
    let no_ho_thz = no_ho_prob_given_thz(s, assoc)?;
    let no_ho_rf = no_ho_prob_given_rf(s, assoc)?;
    Ok(HandoffResult {
        p_ho_from_thz: 1.0 - no_ho_thz,
        p_ho_from_rf: 1.0 - no_ho_rf,
        p_overall: 1.0 - assoc.a_rf * no_ho_rf - assoc.a_thz * no_ho_thz,
    })
}
