//! Molecular absorption coefficient of a gaseous medium, evaluated per
//! spectral line with the Van Vleck-Weisskopf line shape.
//!
//! The evaluator is a faithful transcription of the line-summation formula;
//! it does not second-guess catalog data. Realistic catalogs load from CSV,
//! see [`load_line_catalog`].

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One absorption line of an isotopologue-gas pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralLine {
    /// Resonant frequency at reference pressure, Hz.
    pub resonant_frequency_ref: f64,
    /// Line intensity, Hz·m²/mol.
    pub line_intensity: f64,
    /// Air-broadened half-width, Hz.
    pub air_halfwidth: f64,
    /// Self-broadened half-width, Hz.
    pub self_halfwidth: f64,
    /// Linear pressure shift, Hz.
    pub pressure_shift: f64,
    /// Mixing ratio of the isotopologue, fraction in [0, 1].
    pub mixing_ratio: f64,
    /// Temperature broadening exponent.
    pub temperature_broadening_exponent: f64,
}

impl SpectralLine {
    pub fn validate(&self) -> Result<()> {
        if self.line_intensity < 0.0 {
            return Err(Error::validation("line_intensity", "must be >= 0"));
        }
        if !(0.0..=1.0).contains(&self.mixing_ratio) {
            return Err(Error::validation("mixing_ratio", "must lie in [0, 1]"));
        }
        if self.air_halfwidth <= 0.0 {
            return Err(Error::validation("air_halfwidth", "must be > 0"));
        }
        if self.self_halfwidth <= 0.0 {
            return Err(Error::validation("self_halfwidth", "must be > 0"));
        }
        Ok(())
    }
}

/// Pressure and temperature of the medium plus their reference points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmbientConditions {
    /// Ambient pressure, atm.
    pub pressure: f64,
    /// Reference pressure, atm.
    pub reference_pressure: f64,
    /// Medium temperature, K.
    pub temperature: f64,
    /// Reference temperature, K.
    pub reference_temperature: f64,
    /// Temperature at standard pressure, K.
    pub standard_pressure_temperature: f64,
}

impl AmbientConditions {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("pressure", self.pressure),
            ("reference_pressure", self.reference_pressure),
            ("temperature", self.temperature),
            ("reference_temperature", self.reference_temperature),
            (
                "standard_pressure_temperature",
                self.standard_pressure_temperature,
            ),
        ] {
            if !(v > 0.0) {
                return Err(Error::validation(name, "must be > 0"));
            }
        }
        Ok(())
    }
}

impl Default for AmbientConditions {
    /// 1 atm at 396 K against a 296 K reference.
    fn default() -> Self {
        Self {
            pressure: 1.0,
            reference_pressure: 1.0,
            temperature: 396.0,
            reference_temperature: 296.0,
            standard_pressure_temperature: 273.15,
        }
    }
}

/// Physical constants entering the absorption formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub avogadro: f64,
    /// J·s
    pub planck: f64,
    /// J/K
    pub boltzmann: f64,
    /// m/s
    pub light_speed: f64,
    /// m³·atm/K/mol
    pub gas_constant: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            avogadro: 6.0221e23,
            planck: 6.6262e-34,
            boltzmann: 1.3806e-23,
            light_speed: 2.9979e8,
            gas_constant: 8.2051e-5,
        }
    }
}

/// A set of spectral lines under common ambient conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionMedium {
    pub lines: Vec<SpectralLine>,
    pub conditions: AmbientConditions,
    #[serde(default)]
    pub constants: PhysicalConstants,
}

impl AbsorptionMedium {
    pub fn new(lines: Vec<SpectralLine>, conditions: AmbientConditions) -> Self {
        Self {
            lines,
            conditions,
            constants: PhysicalConstants::default(),
        }
    }

    pub fn empty() -> Self {
        Self::new(Vec::new(), AmbientConditions::default())
    }

    pub fn validate(&self) -> Result<()> {
        self.conditions.validate()?;
        for line in &self.lines {
            line.validate()?;
        }
        Ok(())
    }
}

/// Lorentz half-width: ((1-q)·α_air + q·α₀)·(p/p₀)·(T₀/T)^γ.
pub fn lorentz_halfwidth(line: &SpectralLine, cond: &AmbientConditions) -> f64 {
    let mix = (1.0 - line.mixing_ratio) * line.air_halfwidth
        + line.mixing_ratio * line.self_halfwidth;
    mix * (cond.pressure / cond.reference_pressure)
        * (cond.reference_temperature / cond.temperature)
            .powf(line.temperature_broadening_exponent)
}

/// Pressure-shifted resonant frequency: f_c = f_c0 + δ·(p/p₀).
pub fn shifted_resonance(line: &SpectralLine, cond: &AmbientConditions) -> f64 {
    line.resonant_frequency_ref
        + line.pressure_shift * (cond.pressure / cond.reference_pressure)
}

/// Van Vleck-Weisskopf asymmetric line shape at frequency `f`.
///
/// F(f) = 100·c·α·f/(π·f_c) · (1/((f+f_c)²+α²) + 1/((f-f_c)²+α²)).
pub fn line_shape(line: &SpectralLine, cond: &AmbientConditions, f: f64) -> f64 {
    let alpha = lorentz_halfwidth(line, cond);
    let f_c = shifted_resonance(line, cond);
    let y = f + f_c;
    let z = f - f_c;
    let a2 = alpha * alpha;
    100.0 * PhysicalConstants::default().light_speed * alpha * f
        / (std::f64::consts::PI * f_c)
        * (1.0 / (y * y + a2) + 1.0 / (z * z + a2))
}

/// Absorption coefficient of the medium at frequency `f`, in 1/m.
///
/// Sums over all lines:
/// p²·T_sp·q·N_A·S·f·tanh(hcf/2k_bT) / (p₀·V·T²·f_c·tanh(hcf_c/2k_bT)) · F(f).
pub fn molecular_absorption_coefficient(medium: &AbsorptionMedium, f: f64) -> Result<f64> {
    if !(f > 0.0) {
        return Err(Error::domain(format!("frequency {f} must be > 0")));
    }
    medium.validate()?;
    let cond = &medium.conditions;
    let k = &medium.constants;
    let hc_over_2kbt = k.planck * k.light_speed / (2.0 * k.boltzmann * cond.temperature);
    let mut total = 0.0;
    for line in &medium.lines {
        let f_c = shifted_resonance(line, cond);
        let numerator = cond.pressure * cond.pressure
            * cond.standard_pressure_temperature
            * line.mixing_ratio
            * k.avogadro
            * line.line_intensity
            * f
            * (hc_over_2kbt * f).tanh();
        let denominator = cond.reference_pressure
            * k.gas_constant
            * cond.temperature
            * cond.temperature
            * f_c
            * (hc_over_2kbt * f_c).tanh();
        total += numerator / denominator * line_shape(line, cond, f);
    }
    Ok(total)
}

/// The single-line fixture whose parameters appear throughout the tests:
/// f_c0 = 276 Hz, S = 2.66e-25, α_air = 0.1117 Hz, α₀ = 0.916 Hz,
/// δ = 0.0251 Hz, q = 0.0005, γ = 0.83. The values come from a published
/// parameter table and are kept verbatim even where their unit conventions
/// look odd; the evaluator is exercised, not the catalog.
pub fn reference_line() -> SpectralLine {
    SpectralLine {
        resonant_frequency_ref: 276.0,
        line_intensity: 2.66e-25,
        air_halfwidth: 0.1117,
        self_halfwidth: 0.916,
        pressure_shift: 0.0251,
        mixing_ratio: 0.0005,
        temperature_broadening_exponent: 0.83,
    }
}

/// Load a line catalog from CSV.
///
/// Expected header: `f_c0_hz,S,alpha_air_hz,alpha_0_hz,delta_hz,q,gamma`.
/// Lines starting with '#' and blank lines are skipped. Errors carry the
/// 1-based line number of the offending row.
pub fn load_line_catalog(path: &Path) -> Result<Vec<SpectralLine>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_line_catalog(&text)
}

pub const CATALOG_HEADER: &str = "f_c0_hz,S,alpha_air_hz,alpha_0_hz,delta_hz,q,gamma";

/// Parse catalog CSV text; see [`load_line_catalog`].
pub fn parse_line_catalog(text: &str) -> Result<Vec<SpectralLine>> {
    let mut lines = Vec::new();
    let mut header_seen = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if !header_seen {
            if trimmed != CATALOG_HEADER {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected header `{CATALOG_HEADER}`, found `{trimmed}`"),
                });
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if fields.len() != 7 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 7 fields, found {}", fields.len()),
            });
        }
        let mut values = [0.0f64; 7];
        for (i, field) in fields.iter().enumerate() {
            values[i] = field.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("field {} is not a number: `{field}`", i + 1),
            })?;
        }
        let line = SpectralLine {
            resonant_frequency_ref: values[0],
            line_intensity: values[1],
            air_halfwidth: values[2],
            self_halfwidth: values[3],
            pressure_shift: values[4],
            mixing_ratio: values[5],
            temperature_broadening_exponent: values[6],
        };
        line.validate().map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        lines.push(line);
    }
    Ok(lines)
}
