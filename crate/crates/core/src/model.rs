//! Scenario description of the two-tier network and the link-level physics:
//! long-term received powers, the SINR threshold mapping, and the cumulative
//! noise seen by a terahertz receiver.

use serde::{Deserialize, Serialize};

use crate::absorption::{molecular_absorption_coefficient, AbsorptionMedium};
use crate::error::{Error, Result};

pub const LIGHT_SPEED: f64 = 2.9979e8;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Sub-6 GHz tier parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfTier {
    /// Transmit power, W.
    pub tx_power: f64,
    /// Transmit antenna gain, linear.
    pub tx_gain: f64,
    /// Receive antenna gain, linear.
    pub rx_gain: f64,
    /// Carrier frequency, Hz.
    pub carrier: f64,
    /// Path-loss exponent, must exceed 2.
    pub pathloss_exponent: f64,
    /// Base-station intensity, BS/m².
    pub intensity: f64,
    /// Bandwidth, Hz.
    pub bandwidth: f64,
    /// Thermal noise power, W.
    pub thermal_noise: f64,
}

/// Terahertz tier parameters. The absorption coefficient is stored resolved;
/// use [`ThzTier::set_absorption_from_medium`] to derive it from a line
/// catalog at the tier's carrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThzTier {
    /// Transmit power, W.
    pub tx_power: f64,
    /// Main-lobe gains, linear.
    pub max_tx_gain: f64,
    pub max_rx_gain: f64,
    /// Side-lobe gains, linear.
    pub min_tx_gain: f64,
    pub min_rx_gain: f64,
    /// Main-lobe beamwidths, rad, in (0, 2π).
    pub beamwidth_tx: f64,
    pub beamwidth_rx: f64,
    /// Carrier frequency, Hz.
    pub carrier: f64,
    /// Molecular absorption coefficient, 1/m.
    pub absorption: f64,
    /// Base-station intensity, BS/m².
    pub intensity: f64,
    /// Bandwidth, Hz.
    pub bandwidth: f64,
    /// Thermal noise power, W.
    pub thermal_noise: f64,
}

impl ThzTier {
    pub fn set_absorption_from_medium(&mut self, medium: &AbsorptionMedium) -> Result<()> {
        self.absorption = molecular_absorption_coefficient(medium, self.carrier)?;
        Ok(())
    }
}

/// User mobility and handoff sensitivity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobilityProfile {
    /// Distance moved per movement period, m.
    pub speed: f64,
    /// Coverage penalty per handoff, in [0, 1].
    pub ho_cost: f64,
    /// Hysteresis bias applied to the serving link, linear, >= 1.
    pub hysteresis: f64,
}

/// Full two-tier network description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub rf: RfTier,
    pub thz: ThzTier,
    /// Radius of the deployment window used by the simulator, m.
    pub region_radius: f64,
    /// Target data rate, bit/s.
    pub rate_threshold: f64,
    pub mobility: MobilityProfile,
}

/// Quantities derived from the tier parameters that the analysis reuses
/// everywhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants {
    /// RF aperture factor G_tx·G_rx·(c/4πf_R)².
    pub gamma_rf: f64,
    /// THz aperture factor G_max_tx·G_max_rx·(c/4πf_T)².
    pub gamma_thz: f64,
    /// Tier power ratio (P_R·γ_R)/(P_T·γ_T).
    pub power_ratio: f64,
    /// Probability that an interferer's main lobes align with the user.
    pub alignment_prob: f64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.rf.pathloss_exponent > 2.0) {
            return Err(Error::validation("rf.pathloss_exponent", "must be > 2"));
        }
        for (name, v) in [
            ("rf.tx_power", self.rf.tx_power),
            ("rf.tx_gain", self.rf.tx_gain),
            ("rf.rx_gain", self.rf.rx_gain),
            ("rf.carrier", self.rf.carrier),
            ("rf.intensity", self.rf.intensity),
            ("rf.bandwidth", self.rf.bandwidth),
            ("thz.tx_power", self.thz.tx_power),
            ("thz.carrier", self.thz.carrier),
            ("thz.intensity", self.thz.intensity),
            ("thz.bandwidth", self.thz.bandwidth),
            ("region_radius", self.region_radius),
        ] {
            if !(v > 0.0) {
                return Err(Error::validation(name, "must be > 0"));
            }
        }
        for (name, v) in [
            ("rf.thermal_noise", self.rf.thermal_noise),
            ("thz.thermal_noise", self.thz.thermal_noise),
            ("thz.absorption", self.thz.absorption),
            ("rate_threshold", self.rate_threshold),
            ("mobility.speed", self.mobility.speed),
        ] {
            if !(v >= 0.0) {
                return Err(Error::validation(name, "must be >= 0"));
            }
        }
        for (name, w) in [
            ("thz.beamwidth_tx", self.thz.beamwidth_tx),
            ("thz.beamwidth_rx", self.thz.beamwidth_rx),
        ] {
            if !(w > 0.0 && w < 2.0 * std::f64::consts::PI) {
                return Err(Error::validation(name, "must lie in (0, 2*pi)"));
            }
        }
        if !(self.thz.max_tx_gain >= self.thz.min_tx_gain && self.thz.min_tx_gain >= 0.0) {
            return Err(Error::validation(
                "thz.min_tx_gain",
                "gains must satisfy max >= min >= 0",
            ));
        }
        if !(self.thz.max_rx_gain >= self.thz.min_rx_gain && self.thz.min_rx_gain >= 0.0) {
            return Err(Error::validation(
                "thz.min_rx_gain",
                "gains must satisfy max >= min >= 0",
            ));
        }
        if !(0.0..=1.0).contains(&self.mobility.ho_cost) {
            return Err(Error::validation("mobility.ho_cost", "must lie in [0, 1]"));
        }
        if !(self.mobility.hysteresis >= 1.0) {
            return Err(Error::validation("mobility.hysteresis", "must be >= 1"));
        }
        Ok(())
    }

    pub fn derived(&self) -> DerivedConstants {
        let gamma_rf = self.rf.tx_gain
            * self.rf.rx_gain
            * (LIGHT_SPEED / (4.0 * std::f64::consts::PI * self.rf.carrier)).powi(2);
        let gamma_thz = self.thz.max_tx_gain
            * self.thz.max_rx_gain
            * (LIGHT_SPEED / (4.0 * std::f64::consts::PI * self.thz.carrier)).powi(2);
        DerivedConstants {
            gamma_rf,
            gamma_thz,
            power_ratio: (self.rf.tx_power * gamma_rf) / (self.thz.tx_power * gamma_thz),
            alignment_prob: self.thz.beamwidth_tx * self.thz.beamwidth_rx
                / (4.0 * std::f64::consts::PI * std::f64::consts::PI),
        }
    }

    /// SINR threshold for the THz tier: 2^(R_th/W_T) - 1.
    pub fn thz_sinr_threshold(&self) -> f64 {
        rate_to_sinr_threshold(self.rate_threshold, self.thz.bandwidth)
    }

    /// SINR threshold for the RF tier: 2^(R_th/W_R) - 1.
    pub fn rf_sinr_threshold(&self) -> f64 {
        rate_to_sinr_threshold(self.rate_threshold, self.rf.bandwidth)
    }
}

/// Long-term RF received power γ_R·P_R/r₀^α (fading averaged out).
pub fn rf_received_power(s: &Scenario, r0: f64) -> Result<f64> {
    if !(r0 > 0.0) {
        return Err(Error::domain(format!("rf link distance {r0} must be > 0")));
    }
    let d = s.derived();
    Ok(d.gamma_rf * s.rf.tx_power / r0.powf(s.rf.pathloss_exponent))
}

/// THz received power γ_T·P_T·e^(-K_a·d₀)/d₀².
pub fn thz_received_power(s: &Scenario, d0: f64) -> Result<f64> {
    if !(d0 > 0.0) {
        return Err(Error::domain(format!("thz link distance {d0} must be > 0")));
    }
    let d = s.derived();
    Ok(d.gamma_thz * s.thz.tx_power * (-s.thz.absorption * d0).exp() / (d0 * d0))
}

/// Coverage margin S(d₀) = (1+τ)·P_T·γ_T·d₀⁻²·e^(-K_a·d₀) - P_T·γ_T·d₀⁻²·τ.
///
/// Negative whenever e^(-K_a·d₀) < τ/(1+τ); conditional coverage is then 0
/// regardless of interference.
pub fn thz_sinr_margin(s: &Scenario, d0: f64, tau: f64) -> Result<f64> {
    if !(d0 > 0.0) {
        return Err(Error::domain(format!("thz link distance {d0} must be > 0")));
    }
    if !(tau >= 0.0) {
        return Err(Error::domain(format!("sinr threshold {tau} must be >= 0")));
    }
    let d = s.derived();
    let base = d.gamma_thz * s.thz.tx_power / (d0 * d0);
    Ok(base * ((1.0 + tau) * (-s.thz.absorption * d0).exp() - tau))
}

/// SINR threshold achieving rate `r_th` in bandwidth `w`: 2^(r_th/w) - 1.
pub fn rate_to_sinr_threshold(r_th: f64, w: f64) -> f64 {
    2f64.powf(r_th / w) - 1.0
}

/// Cumulative thermal plus molecular absorption noise at a THz receiver:
/// N₀ + P_T·γ_T·d₀⁻²·(1-e^(-K_a·d₀)) + Σᵢ γ_T·F·P_T·dᵢ⁻²·(1-e^(-K_a·dᵢ)).
pub fn thz_total_noise(s: &Scenario, d0: f64, interferer_distances: &[f64]) -> Result<f64> {
    if !(d0 > 0.0) {
        return Err(Error::domain(format!("thz link distance {d0} must be > 0")));
    }
    let d = s.derived();
    let ka = s.thz.absorption;
    let mut n = s.thz.thermal_noise
        + d.gamma_thz * s.thz.tx_power / (d0 * d0) * (1.0 - (-ka * d0).exp());
    for &di in interferer_distances {
        if !(di > 0.0) {
            return Err(Error::domain(format!(
                "interferer distance {di} must be > 0"
            )));
        }
        n += d.gamma_thz * d.alignment_prob * s.thz.tx_power / (di * di)
            * (1.0 - (-ka * di).exp());
    }
    Ok(n)
}

/// Baseline configuration used throughout the tests and figure presets:
/// 2 W / 2 GHz / 40 MHz RF tier (12 dB antenna gain) at intensity 1e-5 with
/// exponent 4, and a 0.2 W / 1 THz / 0.5 GHz tier at intensity 1e-4 with
/// 25 dB main lobes of width 5 degrees. Thermal noise is kT·W at 296 K for the THz tier; the RF
/// tier noise floor is set low enough to keep that tier
/// interference-limited. Target rate 1 Gbit/s, movement step 30 m.
pub fn baseline_scenario() -> Scenario {
    let w_thz = 0.5e9;
    Scenario {
        rf: RfTier {
            tx_power: 2.0,
            tx_gain: db_to_linear(12.0),
            rx_gain: 1.0,
            carrier: 2.0e9,
            pathloss_exponent: 4.0,
            intensity: 1e-5,
            bandwidth: 40e6,
            thermal_noise: 1e-15,
        },
        thz: ThzTier {
            tx_power: 0.2,
            max_tx_gain: db_to_linear(25.0),
            max_rx_gain: db_to_linear(25.0),
            min_tx_gain: 0.0,
            min_rx_gain: 0.0,
            beamwidth_tx: 0.0873,
            beamwidth_rx: 0.0873,
            carrier: 1.0e12,
            absorption: 0.05,
            intensity: 1e-4,
            bandwidth: w_thz,
            thermal_noise: 1.3806e-23 * 296.0 * w_thz,
        },
        region_radius: 500.0,
        rate_threshold: 1.0e9,
        mobility: MobilityProfile {
            speed: 30.0,
            ho_cost: 1.0,
            hysteresis: 1.0,
        },
    }
}

/// Flat on-disk form of [`Scenario`]. Gains are in dB here and converted to
/// linear when building the scenario; everything else is SI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub rf_tx_power_w: f64,
    pub rf_tx_gain_db: f64,
    pub rf_rx_gain_db: f64,
    pub rf_carrier_hz: f64,
    pub rf_pathloss_exponent: f64,
    pub rf_intensity_per_m2: f64,
    pub rf_bandwidth_hz: f64,
    pub rf_thermal_noise_w: f64,
    pub thz_tx_power_w: f64,
    pub thz_max_tx_gain_db: f64,
    pub thz_max_rx_gain_db: f64,
    /// Linear, not dB: side lobes may legitimately be zero.
    pub thz_min_tx_gain: f64,
    pub thz_min_rx_gain: f64,
    pub thz_beamwidth_tx_rad: f64,
    pub thz_beamwidth_rx_rad: f64,
    pub thz_carrier_hz: f64,
    /// Literal absorption coefficient. Mutually exclusive with
    /// `thz_absorption_catalog`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thz_absorption_per_m: Option<f64>,
    /// Path to a spectral-line catalog CSV; the coefficient is then evaluated
    /// at `thz_carrier_hz`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thz_absorption_catalog: Option<String>,
    pub thz_intensity_per_m2: f64,
    pub thz_bandwidth_hz: f64,
    pub thz_thermal_noise_w: f64,
    pub region_radius_m: f64,
    pub rate_threshold_bps: f64,
    pub mobility_speed_m: f64,
    pub ho_cost: f64,
    pub hysteresis: f64,
}

impl ScenarioFile {
    pub fn from_scenario(s: &Scenario) -> Self {
        Self {
            rf_tx_power_w: s.rf.tx_power,
            rf_tx_gain_db: linear_to_db(s.rf.tx_gain),
            rf_rx_gain_db: linear_to_db(s.rf.rx_gain),
            rf_carrier_hz: s.rf.carrier,
            rf_pathloss_exponent: s.rf.pathloss_exponent,
            rf_intensity_per_m2: s.rf.intensity,
            rf_bandwidth_hz: s.rf.bandwidth,
            rf_thermal_noise_w: s.rf.thermal_noise,
            thz_tx_power_w: s.thz.tx_power,
            thz_max_tx_gain_db: linear_to_db(s.thz.max_tx_gain),
            thz_max_rx_gain_db: linear_to_db(s.thz.max_rx_gain),
            thz_min_tx_gain: s.thz.min_tx_gain,
            thz_min_rx_gain: s.thz.min_rx_gain,
            thz_beamwidth_tx_rad: s.thz.beamwidth_tx,
            thz_beamwidth_rx_rad: s.thz.beamwidth_rx,
            thz_carrier_hz: s.thz.carrier,
            thz_absorption_per_m: Some(s.thz.absorption),
            thz_absorption_catalog: None,
            thz_intensity_per_m2: s.thz.intensity,
            thz_bandwidth_hz: s.thz.bandwidth,
            thz_thermal_noise_w: s.thz.thermal_noise,
            region_radius_m: s.region_radius,
            rate_threshold_bps: s.rate_threshold,
            mobility_speed_m: s.mobility.speed,
            ho_cost: s.mobility.ho_cost,
            hysteresis: s.mobility.hysteresis,
        }
    }

    /// Resolve into a validated [`Scenario`]. Catalog paths are interpreted
    /// relative to the current directory.
    pub fn into_scenario(self) -> Result<Scenario> {
        let absorption = match (self.thz_absorption_per_m, &self.thz_absorption_catalog) {
            (Some(ka), None) => ka,
            (None, Some(path)) => {
                let lines = crate::absorption::load_line_catalog(std::path::Path::new(path))?;
                let medium = AbsorptionMedium::new(lines, Default::default());
                molecular_absorption_coefficient(&medium, self.thz_carrier_hz)?
            }
            (Some(_), Some(_)) => {
                return Err(Error::validation(
                    "thz_absorption_per_m",
                    "set either a literal coefficient or a catalog, not both",
                ))
            }
            (None, None) => {
                return Err(Error::validation(
                    "thz_absorption_per_m",
                    "one of thz_absorption_per_m or thz_absorption_catalog is required",
                ))
            }
        };
        let s = Scenario {
            rf: RfTier {
                tx_power: self.rf_tx_power_w,
                tx_gain: db_to_linear(self.rf_tx_gain_db),
                rx_gain: db_to_linear(self.rf_rx_gain_db),
                carrier: self.rf_carrier_hz,
                pathloss_exponent: self.rf_pathloss_exponent,
                intensity: self.rf_intensity_per_m2,
                bandwidth: self.rf_bandwidth_hz,
                thermal_noise: self.rf_thermal_noise_w,
            },
            thz: ThzTier {
                tx_power: self.thz_tx_power_w,
                max_tx_gain: db_to_linear(self.thz_max_tx_gain_db),
                max_rx_gain: db_to_linear(self.thz_max_rx_gain_db),
                min_tx_gain: self.thz_min_tx_gain,
                min_rx_gain: self.thz_min_rx_gain,
                beamwidth_tx: self.thz_beamwidth_tx_rad,
                beamwidth_rx: self.thz_beamwidth_rx_rad,
                carrier: self.thz_carrier_hz,
                absorption,
                intensity: self.thz_intensity_per_m2,
                bandwidth: self.thz_bandwidth_hz,
                thermal_noise: self.thz_thermal_noise_w,
            },
            region_radius: self.region_radius_m,
            rate_threshold: self.rate_threshold_bps,
            mobility: MobilityProfile {
                speed: self.mobility_speed_m,
                ho_cost: self.ho_cost,
                hysteresis: self.hysteresis,
            },
        };
        s.validate()?;
        Ok(s)
    }
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Scenario> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| Error::Parse {
            line: e
                .span()
                .map(|span| text[..span.start].lines().count())
                .unwrap_or(0),
            message: e.message().to_string(),
        })?;
        file.into_scenario()
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&ScenarioFile::from_scenario(self))
            .expect("scenario serialization cannot fail")
    }
}
