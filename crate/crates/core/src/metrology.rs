//! Force-measurement estimates for a mechanical mode carrying one capacitor
//! plate: static deflection versus resonant (dynamic) detection.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::consts::HBAR;
use crate::forces::{force, CapacitorGeometry, ForceError, ForceMethod, PotentialModel};
use crate::zeropoint::ZeroPointConfig;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetrologyError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("force vanishes at the working point; modulation depth undefined")]
    ZeroForce,
    #[error(transparent)]
    Force(#[from] ForceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechanicalMode {
    /// kg.
    pub mass: f64,
    /// Resonance Ω (rad/s).
    pub omega: f64,
    pub q_factor: f64,
}

impl MechanicalMode {
    pub fn new(mass: f64, omega: f64, q_factor: f64) -> Result<Self, MetrologyError> {
        for (name, v) in [("mass", mass), ("omega", omega), ("Q", q_factor)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(MetrologyError::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if q_factor <= 1.0 {
            return Err(MetrologyError::InvalidParameter(format!("Q must exceed 1, got {q_factor}")));
        }
        Ok(MechanicalMode { mass, omega, q_factor })
    }

    /// Damping rate `Γ = Ω/Q` (rad/s).
    pub fn gamma(&self) -> f64 {
        self.omega / self.q_factor
    }

    /// `√(ħ/2mΩ)`.
    pub fn x_zp(&self) -> f64 {
        (HBAR / (2.0 * self.mass * self.omega)).sqrt()
    }
}

/// How a bandwidth given as a fraction of `Γ` becomes Hz.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum BandwidthConvention {
    /// `B = fraction·Γ`, the rad/s number used as s⁻¹ directly.
    #[default]
    Angular,
    /// `B = fraction·Γ/2π`.
    Hertz,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementConfig {
    /// Displacement noise floor `S_N` (m²/Hz).
    pub s_n: f64,
    /// `B/Γ`.
    pub bandwidth_fraction: f64,
    pub convention: BandwidthConvention,
    /// Modulation depth `η`.
    pub eta: f64,
}

impl Default for MeasurementConfig {
    fn default() -> Self {
        MeasurementConfig {
            s_n: 1e-32,
            bandwidth_fraction: 0.01,
            convention: BandwidthConvention::Angular,
            eta: 0.05,
        }
    }
}

impl MeasurementConfig {
    pub fn validate(&self) -> Result<(), MetrologyError> {
        if !(self.s_n.is_finite() && self.s_n > 0.0) {
            return Err(MetrologyError::InvalidParameter(format!("S_N must be positive, got {}", self.s_n)));
        }
        if !(self.bandwidth_fraction > 0.0 && self.bandwidth_fraction < 1.0) {
            return Err(MetrologyError::InvalidParameter(format!(
                "bandwidth must lie below Γ (fraction {})",
                self.bandwidth_fraction
            )));
        }
        if !(self.eta.is_finite() && self.eta >= 0.0) {
            return Err(MetrologyError::InvalidParameter(format!("η must be non-negative, got {}", self.eta)));
        }
        Ok(())
    }

    /// Bandwidth in s⁻¹.
    pub fn bandwidth(&self, mode: &MechanicalMode) -> f64 {
        let b = self.bandwidth_fraction * mode.gamma();
        match self.convention {
            BandwidthConvention::Angular => b,
            BandwidthConvention::Hertz => b / (2.0 * PI),
        }
    }
}

/// `x_dc = f/(mΩ²)`.
pub fn static_displacement(f: f64, mode: &MechanicalMode) -> f64 {
    f / (mode.mass * mode.omega * mode.omega)
}

/// `x_s = √π·Q·η·x_dc` for modulation at the mechanical resonance.
pub fn dynamic_signal(x_dc: f64, q_factor: f64, eta: f64) -> f64 {
    PI.sqrt() * q_factor * eta * x_dc
}

/// `x_N = √(S_N·B)`.
pub fn noise_amplitude(cfg: &MeasurementConfig, mode: &MechanicalMode) -> f64 {
    (cfg.s_n * cfg.bandwidth(mode)).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnrReport {
    pub force: f64,
    pub eta: f64,
    pub x_dc: f64,
    pub x_zp: f64,
    /// The static deflection exceeds the zero-point motion.
    pub static_feasible: bool,
    pub x_s: f64,
    pub x_n: f64,
    pub bandwidth: f64,
    pub snr: f64,
    pub warnings: Vec<String>,
}

/// Signal-to-noise for a known force and modulation depth.
pub fn snr_report(f: f64, eta: f64, mode: &MechanicalMode, cfg: &MeasurementConfig) -> Result<SnrReport, MetrologyError> {
    cfg.validate()?;
    let mut warnings = Vec::new();
    if eta > 0.2 {
        warnings.push(format!("η = {eta:.3} is not small; the linear modulation estimate is rough"));
    }
    let x_dc = static_displacement(f, mode).abs();
    let x_zp = mode.x_zp();
    let x_s = dynamic_signal(x_dc, mode.q_factor, eta);
    let x_n = noise_amplitude(cfg, mode);
    if x_dc <= x_zp {
        warnings.push(format!("static deflection {x_dc:.2e} m is below x_zp = {x_zp:.2e} m; static method infeasible"));
    }
    Ok(SnrReport {
        force: f,
        eta,
        x_dc,
        x_zp,
        static_feasible: x_dc > x_zp,
        x_s,
        x_n,
        bandwidth: cfg.bandwidth(mode),
        snr: x_s / x_n,
        warnings,
    })
}

/// `η = u·(∂f/∂p)/f` for a relative modulation `u` of circuit parameter `p`
/// (so `u·p` is the modulation amplitude).
pub fn modulation_depth(
    model: &PotentialModel,
    geom: &CapacitorGeometry,
    xi: f64,
    param: &str,
    relative_amplitude: f64,
    zcfg: &ZeroPointConfig,
) -> Result<(f64, f64), MetrologyError> {
    let f0 = force(model, geom, xi, ForceMethod::Analytic, zcfg)?.force;
    if f0 == 0.0 || !f0.is_finite() {
        return Err(MetrologyError::ZeroForce);
    }
    let p0 = match model {
        PotentialModel::Builtin(b) => b.param(param),
        PotentialModel::Network(n) => n.element(param).map(|e| e.value),
    }
    .ok_or_else(|| MetrologyError::InvalidParameter(format!("unknown parameter {param}")))?;
    let h = 1e-4 * p0;
    let fp = force(&model.with_param(param, p0 + h)?, geom, xi, ForceMethod::Analytic, zcfg)?.force;
    let fm = force(&model.with_param(param, p0 - h)?, geom, xi, ForceMethod::Analytic, zcfg)?.force;
    let dfdp = (fp - fm) / (2.0 * h);
    Ok((f0, (relative_amplitude * p0 * dfdp / f0).abs()))
}

/// The membrane used in the estimates: 48 pg, Ω = 2π·10.56 MHz, Q = 3.3·10⁵.
pub fn reference_mode() -> MechanicalMode {
    MechanicalMode {
        mass: 48e-15,
        omega: 2.0 * PI * 10.56e6,
        q_factor: 3.3e5,
    }
}
