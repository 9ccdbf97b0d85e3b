//! Coverage probabilities. The THz side works through the characteristic
//! function of the interference: a truncated series Laplace transform of the
//! aggregate power-law field, inverted by Gil-Pelaez. The RF side is the
//! classical interference-limited expression through the Gauss
//! hypergeometric kernel. Mobility couples coverage to the handoff
//! probability through a linear cost.

use num_complex::Complex;

use crate::analysis::{
    conditional_distance_pdf_rf_exact, conditional_distance_pdf_thz, AssociationResult,
};
use crate::error::{Error, Result};
use crate::handoff::overall_ho_probability;
use crate::model::{thz_received_power, thz_sinr_margin, Scenario};
use crate::numerics::{
    find_root, gauss_2f1_coverage_kernel, integrate, integrate_oscillatory_semiinfinite, ln_gamma,
    tail_truncation_radius, QuadratureSpec,
};

/// Knobs of the coverage computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageConfig {
    /// Number of series terms kept in the interference Laplace transform.
    pub lt_series_terms: usize,
    /// Offset added to the series indices; regularizes the first term, whose
    /// unshifted exponent would make it the divergent mean of the power-law
    /// field.
    pub lt_epsilon: f64,
    /// Use plain integer indices starting at 2 instead of the shifted
    /// fractional ones. Sensitivity-analysis mode.
    pub integer_lt_indices: bool,
    /// RF tier treated as interference limited (the only implemented mode).
    pub interference_limited_rf: bool,
    /// Include re-emitted molecular absorption noise in the THz SINR.
    pub molecular_noise: bool,
}

impl Default for CoverageConfig {
    fn default() -> Self {
        Self {
            lt_series_terms: 3,
            lt_epsilon: 0.01,
            integer_lt_indices: false,
            interference_limited_rf: true,
            molecular_noise: true,
        }
    }
}

impl CoverageConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lt_series_terms < 1 {
            return Err(Error::validation("lt_series_terms", "must be >= 1"));
        }
        if !(self.lt_epsilon > 0.0 && self.lt_epsilon < 1.0) {
            return Err(Error::validation("lt_epsilon", "must lie in (0, 1)"));
        }
        if !self.interference_limited_rf {
            return Err(Error::validation(
                "interference_limited_rf",
                "thermal-noise RF coverage is not implemented",
            ));
        }
        Ok(())
    }

    fn series_indices(&self) -> Vec<f64> {
        if self.integer_lt_indices {
            (2..=self.lt_series_terms + 1).map(|l| l as f64).collect()
        } else {
            (1..=self.lt_series_terms)
                .map(|l| l as f64 + self.lt_epsilon)
                .collect()
        }
    }
}

/// Boolean-scheme blockage parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockageModel {
    /// Blocker intensity, 1/m².
    pub blocker_intensity: f64,
    /// Mean blocker length, m.
    pub mean_length: f64,
    /// Mean blocker width, m.
    pub mean_width: f64,
}

impl BlockageModel {
    /// Per-meter LOS decay rate 2 λ_B (E{W} + E{L}) / π.
    pub fn xi(&self) -> f64 {
        2.0 * self.blocker_intensity * (self.mean_width + self.mean_length)
            / std::f64::consts::PI
    }

    /// Fraction of the plane under blockers, λ_B E{W} E{L}.
    pub fn blocked_fraction(&self) -> f64 {
        self.blocker_intensity * self.mean_width * self.mean_length
    }

    /// LOS probability at link distance r.
    pub fn p_los(&self, r: f64) -> f64 {
        (-(self.xi() * r + self.blocked_fraction())).exp()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("blocker_intensity", self.blocker_intensity),
            ("mean_length", self.mean_length),
            ("mean_width", self.mean_width),
        ] {
            if !(v >= 0.0) {
                return Err(Error::validation(name, "must be >= 0"));
            }
        }
        let p = self.blocked_fraction();
        if self.blocker_intensity > 0.0 && !(p < 1.0) {
            return Err(Error::domain(format!(
                "blocked fraction {p} leaves no usable LOS area"
            )));
        }
        Ok(())
    }
}

/// Distribution of the random fraction of desired power surviving beam
/// misalignment, represented through its Laplace transform E[e^(-u χ)].
pub struct MisalignmentModel {
    pub lt_of_misalignment: Box<dyn Fn(Complex<f64>) -> Complex<f64> + Sync>,
}

impl MisalignmentModel {
    /// Point mass at `value`: χ = value almost surely.
    pub fn point_mass(value: f64) -> Self {
        Self {
            lt_of_misalignment: Box::new(move |u| (-u * value).exp()),
        }
    }

    /// Equal-weight mixture of point masses.
    pub fn discrete(points: Vec<(f64, f64)>) -> Self {
        Self {
            lt_of_misalignment: Box::new(move |u| {
                points
                    .iter()
                    .map(|&(value, weight)| (-u * value).exp() * weight)
                    .sum()
            }),
        }
    }
}

/// Laplace transform E[e^(-z I)] of the aggregate THz interference seen at
/// the user when the serving station is at `r0`, so interferers live outside
/// radius r0. Truncated series in the interferer power; the real part of the
/// exponent is forced nonpositive whenever Re(z) >= 0 so the
/// characteristic-function bound |LT| <= 1 survives truncation.
pub fn lt_aggregate_thz_interference(
    s: &Scenario,
    cfg: &CoverageConfig,
    z: Complex<f64>,
    r0: f64,
) -> Result<Complex<f64>> {
    if !(r0 > 0.0) {
        return Err(Error::domain(format!("serving distance {r0} must be > 0")));
    }
    cfg.validate()?;
    if z == Complex::new(0.0, 0.0) {
        return Ok(Complex::new(1.0, 0.0));
    }
    let d = s.derived();
    let per_interferer = d.alignment_prob * d.gamma_thz * s.thz.tx_power;
    let w = -z * per_interferer;
    let ln_w = w.ln();
    let mut exponent = Complex::new(0.0, 0.0);
    for l in cfg.series_indices() {
        // w^l / ((2l-2) l!) * r0^(2-2l), factorial via the Gamma function
        let coeff = ((2.0 * l - 2.0) * ln_gamma(l + 1.0).exp()).recip();
        exponent += (ln_w * l).exp() * coeff * r0.powf(2.0 - 2.0 * l);
    }
    exponent *= 2.0 * std::f64::consts::PI * s.thz.intensity;
    // past its trust region the truncated series can flip the sign of the
    // decay; reflecting the real part keeps the transform bounded by one and
    // decaying, and is a no-op wherever the series is accurate
    if z.re >= 0.0 {
        exponent.re = -exponent.re.abs();
    }
    Ok(exponent.exp())
}

/// Coverage margin used by the THz conditional coverage. With molecular
/// noise on this is (1+τ)Pγd⁻²e^(-K_a d) - Pγd⁻²τ; the absorbed fractions of
/// the desired and interfering signals then complete the plain power-law
/// field, which is why the interference transform carries no exponential.
/// With molecular noise off the margin is the received power itself.
fn coverage_margin(s: &Scenario, cfg: &CoverageConfig, tau: f64, r0: f64) -> Result<f64> {
    if cfg.molecular_noise {
        thz_sinr_margin(s, r0, tau)
    } else {
        thz_received_power(s, r0)
    }
}

fn oscillatory_spec() -> QuadratureSpec {
    QuadratureSpec {
        relative_tolerance: 1e-6,
        absolute_tolerance: 1e-8,
        max_subdivisions: 200,
    }
}

/// Shared Gil-Pelaez kernel: P(margin - τI > 0) = 1/2 + (1/π)∫ Im[χ(ω)]/ω dω
/// with χ(ω) = ψ(ω)·LT(jωτ), where ψ is the characteristic factor of the
/// desired-signal margin (e^(jω·margin) when the signal is deterministic).
fn gil_pelaez<PSI>(
    s: &Scenario,
    cfg: &CoverageConfig,
    tau: f64,
    r0: f64,
    scale_hint: f64,
    interference: bool,
    psi: PSI,
) -> Result<f64>
where
    PSI: Fn(f64) -> Complex<f64>,
{
    // frequency scale keeping the oscillation O(1) in the scaled variable
    let d = s.derived();
    let interferer_scale = tau * d.alignment_prob * d.gamma_thz * s.thz.tx_power / (r0 * r0);
    let scale = scale_hint.abs().max(interferer_scale).max(1e-300);
    let integrand = |u: f64| -> f64 {
        let omega = u / scale;
        let lt = if interference {
            lt_aggregate_thz_interference(s, cfg, Complex::new(0.0, omega * tau), r0)
                .unwrap_or(Complex::new(f64::NAN, 0.0))
        } else {
            Complex::new(1.0, 0.0)
        };
        (psi(omega) * lt).im / u
    };
    // a probability only needs a handful of digits; right at the coverage
    // boundary the transform oscillates too slowly to resolve further, and a
    // milli-level error there is invisible after averaging over distance
    let tail = match integrate_oscillatory_semiinfinite(integrand, &oscillatory_spec()) {
        Ok(v) => v,
        Err(Error::ConvergenceFailure {
            estimate,
            error_bound,
        }) if estimate.is_finite() && error_bound < 5e-3 => estimate,
        Err(e) => return Err(e),
    };
    Ok((0.5 + tail / std::f64::consts::PI).clamp(0.0, 1.0))
}

/// Probability that the THz SINR exceeds τ given the serving distance r0.
pub fn coverage_thz_conditional(
    s: &Scenario,
    cfg: &CoverageConfig,
    tau: f64,
    r0: f64,
) -> Result<f64> {
    if tau == 0.0 {
        return Ok(1.0);
    }
    let margin = coverage_margin(s, cfg, tau, r0)? - tau * s.thz.thermal_noise;
    gil_pelaez(s, cfg, tau, r0, margin, true, |omega| {
        Complex::new(0.0, omega * margin).exp()
    })
}

/// THz conditional coverage with a random misalignment fraction χ scaling
/// the desired signal: P(χS > τN₀ + τI).
pub fn coverage_thz_conditional_with_misalignment(
    s: &Scenario,
    cfg: &CoverageConfig,
    tau: f64,
    r0: f64,
    mis: &MisalignmentModel,
) -> Result<f64> {
    if tau == 0.0 {
        return Ok(1.0);
    }
    let signal = coverage_margin(s, cfg, tau, r0)?;
    let offset = tau * s.thz.thermal_noise;
    gil_pelaez(s, cfg, tau, r0, signal - offset, true, |omega| {
        // E[e^(jω(χ·signal - offset))]
        (mis.lt_of_misalignment)(Complex::new(0.0, -omega * signal))
            * Complex::new(0.0, -omega * offset).exp()
    })
}

fn averaging_spec() -> QuadratureSpec {
    QuadratureSpec {
        relative_tolerance: 1e-5,
        absolute_tolerance: 1e-8,
        max_subdivisions: 200,
    }
}

/// Distance averages are probabilities; when the integrand has a coverage
/// cliff the subdivision budget can run out a little short of the formal
/// target, and the estimate is still far more accurate than needed.
fn accept_probability(result: Result<f64>) -> Result<f64> {
    match result {
        Ok(v) => Ok(v),
        Err(Error::ConvergenceFailure {
            estimate,
            error_bound,
        }) if estimate.is_finite() && error_bound < 1e-4 => Ok(estimate),
        Err(e) => Err(e),
    }
}

/// THz coverage averaged over the serving distance.
pub fn coverage_thz(
    s: &Scenario,
    cfg: &CoverageConfig,
    assoc: &AssociationResult,
    tau: f64,
) -> Result<f64> {
    if tau == 0.0 {
        return Ok(1.0);
    }
    let r_max = tail_truncation_radius(s.thz.intensity);
    let p = accept_probability(integrate(
        |r| {
            conditional_distance_pdf_thz(s, assoc.a_thz, r)
                * coverage_thz_conditional(s, cfg, tau, r).unwrap_or(f64::NAN)
        },
        0.0,
        r_max,
        &averaging_spec(),
    ))?;
    Ok(p.clamp(0.0, 1.0))
}

/// THz coverage with blockage: the conditional coverage only counts when the
/// link is LOS, which happens with probability e^(-(ξr + p)).
pub fn coverage_thz_with_blockage(
    s: &Scenario,
    cfg: &CoverageConfig,
    assoc: &AssociationResult,
    tau: f64,
    blockage: &BlockageModel,
) -> Result<f64> {
    blockage.validate()?;
    let r_max = tail_truncation_radius(s.thz.intensity);
    let p = accept_probability(integrate(
        |r| {
            conditional_distance_pdf_thz(s, assoc.a_thz, r)
                * blockage.p_los(r)
                * if tau == 0.0 {
                    1.0
                } else {
                    coverage_thz_conditional(s, cfg, tau, r).unwrap_or(f64::NAN)
                }
        },
        0.0,
        r_max,
        &averaging_spec(),
    ))?;
    Ok(p.clamp(0.0, 1.0))
}

/// THz coverage with misalignment averaged over the serving distance.
pub fn coverage_thz_with_misalignment(
    s: &Scenario,
    cfg: &CoverageConfig,
    assoc: &AssociationResult,
    tau: f64,
    mis: &MisalignmentModel,
) -> Result<f64> {
    let r_max = tail_truncation_radius(s.thz.intensity);
    let p = accept_probability(integrate(
        |r| {
            conditional_distance_pdf_thz(s, assoc.a_thz, r)
                * coverage_thz_conditional_with_misalignment(s, cfg, tau, r, mis)
                    .unwrap_or(f64::NAN)
        },
        0.0,
        r_max,
        &averaging_spec(),
    ))?;
    Ok(p.clamp(0.0, 1.0))
}

/// Noise-limited THz coverage: interference dropped, so coverage given r0 is
/// the indicator margin(r0) > τN₀ and the average collapses to the
/// probability that the serving distance is below the critical one. Solved
/// by root finding on the margin, which is strictly decreasing wherever it
/// is positive.
pub fn coverage_thz_noise_limited(
    s: &Scenario,
    cfg: &CoverageConfig,
    assoc: &AssociationResult,
    tau: f64,
) -> Result<f64> {
    if tau == 0.0 {
        return Ok(1.0);
    }
    let offset = tau * s.thz.thermal_noise;
    let margin = |r: f64| coverage_margin(s, cfg, tau, r).unwrap_or(f64::NAN) - offset;
    let r_lo = 1e-6;
    let r_max = tail_truncation_radius(s.thz.intensity) * 4.0;
    if margin(r_lo) <= 0.0 {
        return Ok(0.0);
    }
    let critical = if margin(r_max) > 0.0 {
        r_max
    } else {
        find_root(margin, r_lo, r_max, 1e-9)?
    };
    let p = accept_probability(integrate(
        |r| conditional_distance_pdf_thz(s, assoc.a_thz, r),
        0.0,
        critical,
        &averaging_spec(),
    ))?;
    Ok(p.clamp(0.0, 1.0))
}

/// Same quantity computed through the Gil-Pelaez route with the
/// interference transform forced to one; kept as an independent cross-check
/// of the inversion kernel's sign conventions.
pub fn coverage_thz_noise_limited_gil_pelaez(
    s: &Scenario,
    cfg: &CoverageConfig,
    assoc: &AssociationResult,
    tau: f64,
) -> Result<f64> {
    if tau == 0.0 {
        return Ok(1.0);
    }
    let r_max = tail_truncation_radius(s.thz.intensity);
    let p = accept_probability(integrate(
        |r| {
            let margin = coverage_margin(s, cfg, tau, r).unwrap_or(f64::NAN)
                - tau * s.thz.thermal_noise;
            let cond = gil_pelaez(s, cfg, tau, r, margin, false, |omega| {
                Complex::new(0.0, omega * margin).exp()
            })
            .unwrap_or(f64::NAN);
            conditional_distance_pdf_thz(s, assoc.a_thz, r) * cond
        },
        0.0,
        r_max,
        &averaging_spec(),
    ))?;
    Ok(p.clamp(0.0, 1.0))
}

/// RF coverage in the interference-limited regime.
pub fn coverage_rf(
    s: &Scenario,
    cfg: &CoverageConfig,
    assoc: &AssociationResult,
    tau: f64,
) -> Result<f64> {
    cfg.validate()?;
    if tau == 0.0 {
        return Ok(1.0);
    }
    let kernel = gauss_2f1_coverage_kernel(tau, s.rf.pathloss_exponent)?;
    let pi = std::f64::consts::PI;
    let r_max = tail_truncation_radius(s.rf.intensity);
    let p = accept_probability(integrate(
        |r| {
            conditional_distance_pdf_rf_exact(s, assoc.a_rf, r).unwrap_or(f64::NAN)
                * (-pi * r * r * s.rf.intensity * kernel).exp()
        },
        0.0,
        r_max,
        &averaging_spec(),
    ))?;
    Ok(p.clamp(0.0, 1.0))
}

/// Total coverage: association-weighted mixture of the two tiers, each at
/// its own SINR threshold derived from the common rate target.
pub fn coverage_total(
    s: &Scenario,
    cfg: &CoverageConfig,
    assoc: &AssociationResult,
) -> Result<f64> {
    let c_t = coverage_thz(s, cfg, assoc, s.thz_sinr_threshold())?;
    let c_r = coverage_rf(s, cfg, assoc, s.rf_sinr_threshold())?;
    Ok(assoc.a_thz * c_t + assoc.a_rf * c_r)
}

/// Mobility-aware coverage C·(1 - η·P(handoff)).
pub fn coverage_with_mobility(
    s: &Scenario,
    cfg: &CoverageConfig,
    assoc: &AssociationResult,
) -> Result<f64> {
    let c = coverage_total(s, cfg, assoc)?;
    let ho = overall_ho_probability(s, assoc)?;
    Ok(c * (1.0 - s.mobility.ho_cost * ho.p_overall))
}
