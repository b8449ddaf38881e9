//! Generalized forces `f = −(∂U/∂C)(dC/dξ)` on an internal coordinate `ξ` of
//! the probed capacitor.
//!
//! Sign convention: `f > 0` means `U` decreases as `ξ` grows, i.e. repulsion
//! when `ξ` is a plate separation.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::circuit::{reference_network, BuiltinCircuit, CircuitError, CircuitNetwork, ReferenceCircuit};
use crate::consts::EPSILON_0;
use crate::zeropoint::{
    self, check_validity, closed_form_i_dc, closed_form_ii_dc, energy_derivative, energy_renormalized, EnergyError,
    ZeroPointConfig,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ForceError {
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("geometry: {0}")]
    Geometry(String),
    #[error("finite-difference step underflows at ξ = {xi:e}")]
    StepUnderflow { xi: f64 },
    #[error("invalid sweep grid: {0}")]
    InvalidGrid(String),
    #[error("asymptotic fit: {0}")]
    Fit(String),
}

/// `ξ ↦ (C, dC/dξ)`.
pub type CapacitanceFn = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;

#[derive(Clone)]
pub enum CapacitorGeometry {
    /// `C = Aε0/y`, coordinate `y` (m).
    ParallelPlate { area: f64 },
    /// Caller-supplied closed form (e.g. a rotary capacitor `C(θ)`).
    Custom(CapacitanceFn),
    /// Samples of `C` and `dC/dξ`, joined by cubic Hermite segments.
    Tabulated { xi: Vec<f64>, c: Vec<f64>, dc: Vec<f64> },
}

impl fmt::Debug for CapacitorGeometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CapacitorGeometry::ParallelPlate { area } => f.debug_struct("ParallelPlate").field("area", area).finish(),
            CapacitorGeometry::Custom(_) => f.write_str("Custom(..)"),
            CapacitorGeometry::Tabulated { xi, .. } => f.debug_struct("Tabulated").field("points", &xi.len()).finish(),
        }
    }
}

impl CapacitorGeometry {
    pub fn parallel_plate_area(area: f64) -> Result<Self, ForceError> {
        if !(area.is_finite() && area > 0.0) {
            return Err(ForceError::Geometry(format!("plate area must be positive, got {area}")));
        }
        Ok(CapacitorGeometry::ParallelPlate { area })
    }

    /// Circular plates of diameter `d`.
    pub fn parallel_plate_diameter(d: f64) -> Result<Self, ForceError> {
        Self::parallel_plate_area(PI * d * d / 4.0)
    }

    pub fn custom<F>(f: F) -> Self
    where
        F: Fn(f64) -> (f64, f64) + Send + Sync + 'static,
    {
        CapacitorGeometry::Custom(Arc::new(f))
    }

    pub fn tabulated(xi: Vec<f64>, c: Vec<f64>, dc: Vec<f64>) -> Result<Self, ForceError> {
        if xi.len() < 2 || xi.len() != c.len() || xi.len() != dc.len() {
            return Err(ForceError::Geometry("table needs ≥ 2 rows of equal length".into()));
        }
        if xi.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(ForceError::Geometry("table coordinates must increase strictly".into()));
        }
        if c.iter().any(|v| !(v.is_finite() && *v > 0.0)) || dc.iter().any(|v| !v.is_finite()) {
            return Err(ForceError::Geometry("table values must be finite with C > 0".into()));
        }
        Ok(CapacitorGeometry::Tabulated { xi, c, dc })
    }

    /// `(C(ξ), dC/dξ)`.
    pub fn eval(&self, xi: f64) -> Result<(f64, f64), ForceError> {
        let (c, dc) = match self {
            CapacitorGeometry::ParallelPlate { area } => {
                if !(xi.is_finite() && xi > 0.0) {
                    return Err(ForceError::Geometry(format!("plate separation must be positive, got {xi}")));
                }
                let c = area * EPSILON_0 / xi;
                (c, -c / xi)
            }
            CapacitorGeometry::Custom(f) => f(xi),
            CapacitorGeometry::Tabulated { xi: xs, c, dc } => {
                let n = xs.len();
                if !(xi >= xs[0] && xi <= xs[n - 1]) {
                    return Err(ForceError::Geometry(format!(
                        "ξ = {xi:e} outside table [{:e}, {:e}]",
                        xs[0],
                        xs[n - 1]
                    )));
                }
                let k = xs.partition_point(|x| *x <= xi).clamp(1, n - 1) - 1;
                let h = xs[k + 1] - xs[k];
                let t = (xi - xs[k]) / h;
                let (h00, h10, h01, h11) = (
                    (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t),
                    t * (1.0 - t) * (1.0 - t),
                    t * t * (3.0 - 2.0 * t),
                    t * t * (t - 1.0),
                );
                let (d00, d10, d01, d11) = (
                    6.0 * t * (t - 1.0),
                    (1.0 - t) * (1.0 - 3.0 * t),
                    6.0 * t * (1.0 - t),
                    t * (3.0 * t - 2.0),
                );
                let val = h00 * c[k] + h10 * h * dc[k] + h01 * c[k + 1] + h11 * h * dc[k + 1];
                let der = (d00 * c[k] + d01 * c[k + 1]) / h + d10 * dc[k] + d11 * dc[k + 1];
                (val, der)
            }
        };
        if !(c.is_finite() && c > 0.0 && dc.is_finite()) {
            return Err(ForceError::Geometry(format!("C({xi:e}) = {c:e}, dC/dξ = {dc:e} is not admissible")));
        }
        Ok((c, dc))
    }
}

/// What produces `U(C)`: a built-in circuit (closed forms where known) or an
/// arbitrary network (quadrature).
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialModel {
    Builtin(BuiltinCircuit),
    Network(CircuitNetwork),
}

impl PotentialModel {
    pub fn network(&self) -> CircuitNetwork {
        match self {
            PotentialModel::Builtin(b) => b.network(),
            PotentialModel::Network(n) => n.clone(),
        }
    }

    /// Renormalized energy (J).
    pub fn energy(&self, c: f64, cfg: &ZeroPointConfig) -> Result<f64, ForceError> {
        if let PotentialModel::Builtin(b) = self {
            if let Some(u) = zeropoint::closed_form(b, c, &cfg.quad) {
                return Ok(u?);
            }
        }
        Ok(energy_renormalized(&self.network(), c, cfg)?.energy)
    }

    /// `∂U/∂C` (J/F): closed-form derivative for circuits I and II, otherwise
    /// the differentiated integrand.
    pub fn energy_dc(&self, c: f64, cfg: &ZeroPointConfig) -> Result<f64, ForceError> {
        match self {
            PotentialModel::Builtin(BuiltinCircuit::SeriesRc { r, c0 }) => Ok(closed_form_i_dc(*r, *c0, c)),
            PotentialModel::Builtin(BuiltinCircuit::SeriesRl { r, l }) => Ok(closed_form_ii_dc(*r, *l, c)),
            _ => Ok(energy_derivative(&self.network(), c, &cfg.quad)?.value),
        }
    }

    /// Whether a reference integrand is subtracted.
    pub fn renormalized(&self) -> bool {
        matches!(reference_network(&self.network()), ReferenceCircuit::Network(_))
    }

    /// Copy with a parameter changed: `R`, `L`, `C0`, `C` for built-ins, an
    /// element name for networks.
    pub fn with_param(&self, name: &str, value: f64) -> Result<Self, ForceError> {
        Ok(match self {
            PotentialModel::Builtin(b) => PotentialModel::Builtin(b.with_param(name, value)?),
            PotentialModel::Network(n) => PotentialModel::Network(n.with_value(name, value)?),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ForceMethod {
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForcePoint {
    /// Newtons (or N·m for angular coordinates).
    pub force: f64,
    pub capacitance: f64,
    pub dc_dxi: f64,
    pub renormalized: bool,
    pub validity_ok: bool,
    pub tail_fraction: f64,
}

/// Force at coordinate `xi`.
pub fn force(
    model: &PotentialModel,
    geom: &CapacitorGeometry,
    xi: f64,
    method: ForceMethod,
    cfg: &ZeroPointConfig,
) -> Result<ForcePoint, ForceError> {
    let (c, dc) = geom.eval(xi)?;
    let value = match method {
        ForceMethod::Analytic => -model.energy_dc(c, cfg)? * dc,
        ForceMethod::FiniteDifference => -fd_derivative(model, geom, xi, cfg)?,
    };
    let validity = check_validity(&model.network(), c, &cfg.validity, &cfg.quad)?;
    Ok(ForcePoint {
        force: value,
        capacitance: c,
        dc_dxi: dc,
        renormalized: model.renormalized(),
        validity_ok: validity.validity_ok,
        tail_fraction: validity.tail_fraction,
    })
}

/// `dU/dξ` from a five-point central stencil with one Richardson step.
fn fd_derivative(
    model: &PotentialModel,
    geom: &CapacitorGeometry,
    xi: f64,
    cfg: &ZeroPointConfig,
) -> Result<f64, ForceError> {
    let h = (xi.abs() * 1e-4).max(1e-12);
    if xi + h / 2.0 == xi || !(h.is_finite()) {
        return Err(ForceError::StepUnderflow { xi });
    }
    // Differences of U amplify quadrature noise; integrate tighter.
    let tight = ZeroPointConfig {
        quad: crate::quad::QuadratureConfig {
            rel_tol: cfg.quad.rel_tol.min(1e-12),
            abs_tol: cfg.quad.abs_tol.min(1e-15),
            ..cfg.quad
        },
        ..*cfg
    };
    let u = |x: f64| -> Result<f64, ForceError> { model.energy(geom.eval(x)?.0, &tight) };
    let stencil = |h: f64| -> Result<f64, ForceError> {
        Ok((u(xi - 2.0 * h)? - 8.0 * u(xi - h)? + 8.0 * u(xi + h)? - u(xi + 2.0 * h)?) / (12.0 * h))
    };
    let d1 = stencil(h)?;
    let d2 = stencil(h / 2.0)?;
    Ok((16.0 * d2 - d1) / 15.0)
}

/// Parameter varied by a sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum SweepParam {
    /// The geometric coordinate `ξ`.
    Coordinate,
    /// A circuit parameter (`R`, `L`, `C0`, … or an element name).
    Circuit(String),
}

impl SweepParam {
    pub fn parse(s: &str) -> Self {
        match s {
            "y" | "xi" | "ξ" | "theta" => SweepParam::Coordinate,
            other => SweepParam::Circuit(other.to_string()),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            SweepParam::Coordinate => "y",
            SweepParam::Circuit(n) => n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub param: f64,
    pub force: Option<f64>,
    pub validity_ok: bool,
    pub renormalized: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForceSweep {
    pub param: String,
    pub xi: f64,
    pub points: Vec<SweepPoint>,
    /// Whether the reference circuit's contribution changes along the sweep.
    pub reference_varies: bool,
}

impl ForceSweep {
    pub fn forces(&self) -> Vec<Option<f64>> {
        self.points.iter().map(|p| p.force).collect()
    }
}

pub fn check_grid(grid: &[f64]) -> Result<(), ForceError> {
    if grid.is_empty() {
        return Err(ForceError::InvalidGrid("empty grid".into()));
    }
    if grid.iter().any(|g| !g.is_finite()) {
        return Err(ForceError::InvalidGrid("grid values must be finite".into()));
    }
    let up = grid.windows(2).all(|w| w[1] > w[0]);
    let down = grid.windows(2).all(|w| w[1] < w[0]);
    if !(up || down) {
        return Err(ForceError::InvalidGrid("grid must be strictly monotonic".into()));
    }
    Ok(())
}

/// Force at each grid value of `param`, all else fixed at `(model, xi)`.
/// Points are evaluated in parallel; failures are recorded per point.
pub fn sweep_force(
    model: &PotentialModel,
    geom: &CapacitorGeometry,
    xi: f64,
    param: &SweepParam,
    grid: &[f64],
    method: ForceMethod,
    cfg: &ZeroPointConfig,
) -> Result<ForceSweep, ForceError> {
    check_grid(grid)?;
    if let SweepParam::Circuit(name) = param {
        // Fail early on an unknown parameter rather than once per point.
        model.with_param(name, grid[0])?;
    }
    let points: Vec<SweepPoint> = grid
        .par_iter()
        .map(|&g| {
            let run = || -> Result<ForcePoint, ForceError> {
                match param {
                    SweepParam::Coordinate => force(model, geom, g, method, cfg),
                    SweepParam::Circuit(name) => force(&model.with_param(name, g)?, geom, xi, method, cfg),
                }
            };
            match run() {
                Ok(p) => SweepPoint {
                    param: g,
                    force: Some(p.force),
                    validity_ok: p.validity_ok,
                    renormalized: p.renormalized,
                    error: None,
                },
                Err(e) => SweepPoint {
                    param: g,
                    force: None,
                    validity_ok: false,
                    renormalized: model.renormalized(),
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let reference_varies = match param {
        SweepParam::Coordinate => model.renormalized(),
        SweepParam::Circuit(name) => {
            let first = reference_network(&model.with_param(name, grid[0])?.network());
            let last = reference_network(&model.with_param(name, grid[grid.len() - 1])?.network());
            first != last
        }
    };
    Ok(ForceSweep {
        param: param.name().to_string(),
        xi,
        points,
        reference_varies,
    })
}

fn fit_input(y: &[f64], f: &[f64]) -> Result<(), ForceError> {
    if y.len() != f.len() {
        return Err(ForceError::Fit("coordinate and force arrays differ in length".into()));
    }
    if y.len() < 3 {
        return Err(ForceError::Fit("need at least 3 points".into()));
    }
    if y.iter().chain(f).any(|v| !v.is_finite()) || y.iter().any(|v| *v <= 0.0) {
        return Err(ForceError::Fit("points must be finite with y > 0".into()));
    }
    check_grid(y).map_err(|e| ForceError::Fit(e.to_string()))?;
    let (lo, hi) = (y.iter().copied().fold(f64::INFINITY, f64::min), y.iter().copied().fold(0.0, f64::max));
    if hi / lo < 100.0 * (1.0 - 1e-12) {
        return Err(ForceError::Fit(format!("window spans {:.2} decades; need ≥ 2", (hi / lo).log10())));
    }
    let mags: Vec<f64> = f.iter().map(|v| v.abs()).collect();
    let inc = mags.windows(2).all(|w| w[1] > w[0]);
    let dec = mags.windows(2).all(|w| w[1] < w[0]);
    if !(inc || dec) {
        return Err(ForceError::Fit("|f| is not monotonic in the fit window".into()));
    }
    Ok(())
}

/// Least-squares slope of `ln|f|` against `ln y`.
pub fn asymptotic_slope(y: &[f64], f: &[f64]) -> Result<f64, ForceError> {
    fit_input(y, f)?;
    let pts: Vec<(f64, f64)> = y.iter().zip(f).map(|(y, f)| (y.ln(), f.abs().ln())).collect();
    Ok(zeropoint::slope(&pts))
}

/// Fit of `f·y² = A·ln(y/y0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogFit {
    pub amplitude: f64,
    pub y0: f64,
    /// `max/min − 1` of `f·y²/ln(y/y0)` over the top decade of the window.
    pub top_decade_spread: f64,
}

/// Spread of `f·y²/ln(y/y0)` over the top decade, for a given scale `y0`.
pub fn log_form_spread(y: &[f64], f: &[f64], y0: f64) -> Result<f64, ForceError> {
    fit_input(y, f)?;
    let ymax = y.iter().copied().fold(0.0, f64::max);
    let ratios: Vec<f64> = y
        .iter()
        .zip(f)
        .filter(|(y, _)| **y >= ymax / 10.0 * (1.0 - 1e-12))
        .map(|(y, f)| f * y * y / (y / y0).ln())
        .collect();
    if ratios.len() < 2 {
        return Err(ForceError::Fit("fewer than 2 points in the top decade".into()));
    }
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(*r), hi.max(*r)));
    if lo.signum() != hi.signum() {
        return Err(ForceError::Fit("ln(y/y0) changes sign in the top decade".into()));
    }
    Ok(hi.abs().max(lo.abs()) / hi.abs().min(lo.abs()) - 1.0)
}

/// Fits `f·y² = a·ln y + b`, i.e. `A = a`, `y0 = e^{−b/a}`.
pub fn log_form_fit(y: &[f64], f: &[f64]) -> Result<LogFit, ForceError> {
    fit_input(y, f)?;
    let pts: Vec<(f64, f64)> = y.iter().zip(f).map(|(y, f)| (y.ln(), f * y * y)).collect();
    let a = zeropoint::slope(&pts);
    let n = pts.len() as f64;
    let b = pts.iter().map(|p| p.1).sum::<f64>() / n - a * pts.iter().map(|p| p.0).sum::<f64>() / n;
    let y0 = (-b / a).exp();
    Ok(LogFit {
        amplitude: a,
        y0,
        top_decade_spread: log_form_spread(y, f, y0)?,
    })
}
