//! Datasets behind the standard plots: dimensionless potentials, force versus
//! separation against the Casimir force, force surfaces over circuit
//! parameters, and qubit level shifts over a parallel RC environment.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::casimir::{casimir_plasma, CasimirError, PlasmaPlate};
use crate::circuit::{BuiltinCircuit, CircuitError};
use crate::consts::HBAR;
use crate::forces::{force, sweep_force, CapacitorGeometry, ForceError, ForceMethod, PotentialModel, SweepParam};
use crate::qubit::{level_shift, shift_tail_fraction, QubitError, TransmonParams, VoltageSpectrum};
use crate::report::{append_casimir, sweep_table, Cell, ReportError, Table};
use crate::zeropoint::{energy_renormalized, f_ii, f_iii, f_iv, EnergyError, ZeroPointConfig};

#[derive(Debug, Error)]
pub enum FigureError {
    #[error("unknown figure {0:?} (expected one of 2b, 2c, 3a, 3b, 4a, 4b, 4c, 4d)")]
    Unknown(String),
    #[error("invalid option: {0}")]
    InvalidOption(String),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(transparent)]
    Force(#[from] ForceError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Casimir(#[from] CasimirError),
    #[error(transparent)]
    Qubit(#[from] QubitError),
    #[error(transparent)]
    Report(#[from] ReportError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    F2b,
    F2c,
    F3a,
    F3b,
    F4a,
    F4b,
    F4c,
    F4d,
}

impl FigureId {
    pub const ALL: [FigureId; 8] = [
        FigureId::F2b,
        FigureId::F2c,
        FigureId::F3a,
        FigureId::F3b,
        FigureId::F4a,
        FigureId::F4b,
        FigureId::F4c,
        FigureId::F4d,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureId::F2b => "2b",
            FigureId::F2c => "2c",
            FigureId::F3a => "3a",
            FigureId::F3b => "3b",
            FigureId::F4a => "4a",
            FigureId::F4b => "4b",
            FigureId::F4c => "4c",
            FigureId::F4d => "4d",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = FigureError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| FigureError::Unknown(s.to_string()))
    }
}

/// Overrides for the default plot parameters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FigureOptions {
    /// Grid points per axis.
    pub points: Option<usize>,
    /// Plate diameter (m).
    pub diameter: Option<f64>,
    /// Plate separation (m).
    pub y: Option<f64>,
}

pub const DEFAULT_DIAMETER: f64 = 15e-6;
pub const DEFAULT_SEPARATION: f64 = 50e-9;
/// R and L of the series RL circuit compared with the Casimir force.
pub const CASIMIR_R: f64 = 10.0;
pub const CASIMIR_L: f64 = 0.1e-9;
/// C0 used when a physical scale is needed for the dimensionless plots.
pub const REFERENCE_C0: f64 = 31.3e-15;

/// Ranges of the force surfaces: (R range, second-parameter name and range).
pub const SURFACE_4A: ((f64, f64), &str, (f64, f64)) = ((5.0, 15.0), "C0", (10e-15, 30e-15));
pub const SURFACE_4B: ((f64, f64), &str, (f64, f64)) = ((0.1, 10.0), "L", (10e-12, 100e-12));
pub const SURFACE_4C: ((f64, f64), &str, (f64, f64)) = ((300.0, 10e3), "L", (10e-12, 50e-12));

/// Transmon used for the level-shift map: `√(E_C/8E_J)`, `β`, `ω0`.
pub const QUBIT_RATIO: f64 = 0.1;
pub const QUBIT_BETA: f64 = 0.1;
pub const QUBIT_OMEGA0: f64 = 2.0 * PI * 5e9;
pub const QUBIT_R: (f64, f64) = (1.0, 100.0);
pub const QUBIT_C: (f64, f64) = (0.1e-12, 1e-12);

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi / lo).ln() / (n - 1) as f64;
    (0..n)
        .map(|k| if k == n - 1 { hi } else { lo * (step * k as f64).exp() })
        .collect()
}

pub fn lin_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

fn points(opts: &FigureOptions, default: usize) -> Result<usize, FigureError> {
    match opts.points {
        Some(0) => Err(FigureError::InvalidOption("points must be at least 1".into())),
        Some(n) => Ok(n),
        None => Ok(default),
    }
}

fn positive(name: &str, v: f64) -> Result<f64, FigureError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(FigureError::InvalidOption(format!("{name} must be positive, got {v}")))
    }
}

fn geometry(opts: &FigureOptions, default_d: f64) -> Result<CapacitorGeometry, FigureError> {
    Ok(CapacitorGeometry::parallel_plate_diameter(positive(
        "diameter",
        opts.diameter.unwrap_or(default_d),
    )?)?)
}

pub fn figure(id: FigureId, opts: &FigureOptions, cfg: &ZeroPointConfig) -> Result<Table, FigureError> {
    match id {
        FigureId::F2b => figure_2b(opts, cfg),
        FigureId::F2c => figure_2c(opts, cfg),
        FigureId::F3a => force_vs_casimir(opts, 15e-6, cfg),
        FigureId::F3b => force_vs_casimir(opts, 200e-6, cfg),
        FigureId::F4a => force_surface(BuiltinCircuit::SeriesRc { r: 10.0, c0: 20e-15 }, SURFACE_4A, opts, cfg),
        FigureId::F4b => force_surface(BuiltinCircuit::SeriesRl { r: 1.0, l: 50e-12 }, SURFACE_4B, opts, cfg),
        FigureId::F4c => force_surface(BuiltinCircuit::ParallelRl { r: 1e3, l: 30e-12 }, SURFACE_4C, opts, cfg),
        FigureId::F4d => level_shift_map(opts, cfg),
    }
}

/// `U/U0` from the closed forms, as a function of `r`, for circuits I, II, III.
///
/// I: `U0 = ħ/(2πRC0)`, `r = C0/C`. II: `U0 = ħR/L`, III: `U0 = ħR/(2πL)`,
/// both with `r = L/(R²C)`.
pub fn dimensionless_potential(circuit: &str, r: f64) -> Option<f64> {
    match circuit {
        "I" => Some(-r * (1.0 / r).ln_1p()),
        "II" => Some(f_ii(r)),
        "III" => Some(2.0 * PI * f_iii(r)),
        _ => None,
    }
}

fn figure_2b(opts: &FigureOptions, cfg: &ZeroPointConfig) -> Result<Table, FigureError> {
    let grid = log_grid(1e-3, 1e3, points(opts, 61)?);
    let (r_ohm, c0, l) = (CASIMIR_R, REFERENCE_C0, CASIMIR_L);
    let jobs: Vec<(&str, f64)> = ["I", "II", "III"]
        .iter()
        .flat_map(|c| grid.iter().map(move |r| (*c, *r)))
        .collect();
    let rows: Vec<Result<Vec<Cell>, FigureError>> = jobs
        .par_iter()
        .map(|&(name, r)| {
            let (circuit, c, u0) = match name {
                "I" => (BuiltinCircuit::SeriesRc { r: r_ohm, c0 }, c0 / r, HBAR / (2.0 * PI * r_ohm * c0)),
                "II" => (BuiltinCircuit::SeriesRl { r: r_ohm, l }, l / (r_ohm * r_ohm * r), HBAR * r_ohm / l),
                _ => (BuiltinCircuit::ParallelRl { r: r_ohm, l }, l / (r_ohm * r_ohm * r), HBAR * r_ohm / (2.0 * PI * l)),
            };
            let net = circuit.network();
            let (quad, valid, renorm) = match energy_renormalized(&net, c, cfg) {
                Ok(res) => (Cell::Num(res.energy / u0), res.validity_ok, res.renormalized),
                Err(_) => (Cell::Empty, false, true),
            };
            Ok(vec![
                name.into(),
                r.into(),
                dimensionless_potential(name, r).into(),
                quad,
                valid.into(),
                renorm.into(),
            ])
        })
        .collect();
    let mut t = Table::new(["circuit", "r", "U_over_U0", "U_over_U0_quadrature", "valid", "renormalized"]);
    for row in rows {
        t.push(row?)?;
    }
    Ok(t)
}

fn figure_2c(opts: &FigureOptions, cfg: &ZeroPointConfig) -> Result<Table, FigureError> {
    let grid = log_grid(1e-2, 1e2, points(opts, 41)?);
    let (r_ohm, c0) = (CASIMIR_R, REFERENCE_C0);
    let jobs: Vec<(f64, f64)> = [0.5, 2.0].iter().flat_map(|a| grid.iter().map(move |r| (*a, *r))).collect();
    let rows: Vec<Result<Vec<Cell>, FigureError>> = jobs
        .par_iter()
        .map(|&(a, r)| {
            let closed = r / (4.0 * PI) * f_iv(r, a, &cfg.quad)?;
            let circuit = BuiltinCircuit::Mixed { r: r_ohm, l: a * a * r_ohm * r_ohm * c0, c0 };
            let u0 = HBAR / (r_ohm * c0);
            let (quad, valid, renorm) = match energy_renormalized(&circuit.network(), c0 / r, cfg) {
                Ok(res) => (Cell::Num(res.energy / u0), res.validity_ok, res.renormalized),
                Err(_) => (Cell::Empty, false, true),
            };
            Ok(vec![a.into(), r.into(), closed.into(), quad, valid.into(), renorm.into()])
        })
        .collect();
    let mut t = Table::new(["a", "r", "U_over_U0", "U_over_U0_quadrature", "valid", "renormalized"]);
    for row in rows {
        t.push(row?)?;
    }
    Ok(t)
}

fn force_vs_casimir(opts: &FigureOptions, default_d: f64, cfg: &ZeroPointConfig) -> Result<Table, FigureError> {
    let geom = geometry(opts, default_d)?;
    let area = match geom {
        CapacitorGeometry::ParallelPlate { area } => area,
        _ => unreachable!("parallel-plate geometry"),
    };
    let ys = log_grid(50e-9, 200e-6, points(opts, 61)?);
    let model = PotentialModel::Builtin(BuiltinCircuit::SeriesRl { r: CASIMIR_R, l: CASIMIR_L });
    let sweep = sweep_force(&model, &geom, ys[0], &SweepParam::Coordinate, &ys, ForceMethod::Analytic, cfg)?;
    let mut t = sweep_table(&sweep, "II");
    let fc: Vec<f64> = ys
        .par_iter()
        .map(|&y| casimir_plasma(&PlasmaPlate::new(area, y), &cfg.quad))
        .collect::<Result<_, _>>()?;
    append_casimir(&mut t, &ys, &fc);
    Ok(t)
}

fn force_surface(
    base: BuiltinCircuit,
    (r_range, second, second_range): ((f64, f64), &str, (f64, f64)),
    opts: &FigureOptions,
    cfg: &ZeroPointConfig,
) -> Result<Table, FigureError> {
    let geom = geometry(opts, DEFAULT_DIAMETER)?;
    let y = positive("y", opts.y.unwrap_or(DEFAULT_SEPARATION))?;
    let n = points(opts, 11)?;
    let rs = lin_grid(r_range.0, r_range.1, n);
    let xs = lin_grid(second_range.0, second_range.1, n);
    let jobs: Vec<(f64, f64)> = rs.iter().flat_map(|r| xs.iter().map(move |x| (*r, *x))).collect();
    let rows: Vec<Vec<Cell>> = jobs
        .par_iter()
        .map(|&(r, x)| {
            let run = || -> Result<_, FigureError> {
                let model = PotentialModel::Builtin(base.with_param("R", r)?.with_param(second, x)?);
                Ok(force(&model, &geom, y, ForceMethod::Analytic, cfg)?)
            };
            match run() {
                Ok(p) => vec![
                    r.into(),
                    x.into(),
                    p.force.into(),
                    p.validity_ok.into(),
                    p.renormalized.into(),
                    Cell::Empty,
                ],
                Err(e) => vec![
                    r.into(),
                    x.into(),
                    Cell::Empty,
                    false.into(),
                    Cell::Empty,
                    e.to_string().into(),
                ],
            }
        })
        .collect();
    let mut t = Table::new(["R", second, "force_N", "valid", "renormalized", "error"]);
    for row in rows {
        t.push(row)?;
    }
    Ok(t)
}

fn level_shift_map(opts: &FigureOptions, cfg: &ZeroPointConfig) -> Result<Table, FigureError> {
    let tp = TransmonParams::from_ratio(QUBIT_OMEGA0, QUBIT_RATIO, QUBIT_BETA)?;
    let n = points(opts, 21)?;
    let rs = log_grid(QUBIT_R.0, QUBIT_R.1, n);
    let cs = log_grid(QUBIT_C.0, QUBIT_C.1, n);
    let w10 = tp.omega10();
    let jobs: Vec<(f64, f64)> = rs.iter().flat_map(|r| cs.iter().map(move |c| (*r, *c))).collect();
    let rows: Vec<Vec<Cell>> = jobs
        .par_iter()
        .map(|&(r, c)| {
            let s = VoltageSpectrum::parallel_rc(r, c);
            let cutoff = cfg.validity.cutoff();
            let valid = || {
                shift_tail_fraction(&tp, &s, cutoff, &cfg.quad)
                    .map(|f| f < cfg.validity.max_tail_fraction)
                    .unwrap_or(false)
            };
            match level_shift(&tp, &s, &cfg.quad) {
                Ok(ls) => vec![
                    r.into(),
                    c.into(),
                    (ls.delta / w10).into(),
                    (ls.gamma / w10).into(),
                    (valid() && !ls.marginal_tail).into(),
                    false.into(),
                    Cell::Empty,
                ],
                Err(e) => vec![
                    r.into(),
                    c.into(),
                    Cell::Empty,
                    Cell::Empty,
                    false.into(),
                    false.into(),
                    e.to_string().into(),
                ],
            }
        })
        .collect();
    let mut t = Table::new([
        "R",
        "C",
        "delta_over_omega10",
        "gamma_over_omega10",
        "valid",
        "renormalized",
        "error",
    ]);
    for row in rows {
        t.push(row)?;
    }
    Ok(t)
}
