//! Zero-temperature Casimir force between parallel plates: ideal mirrors and
//! the Lifshitz formula with plasma-model plates.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::consts::{HBAR, SPEED_OF_LIGHT};
use crate::quad::{integrate, integrate_semi_infinite, QuadError, QuadratureConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CasimirError {
    #[error("invalid plate parameters: {0}")]
    InvalidPlate(String),
    #[error("quadrature failed: {0}")]
    Quadrature(#[from] QuadError),
    #[error("force evaluation failed at y = {y:e}: {message}")]
    Evaluation { y: f64, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlasmaPlate {
    /// Plasma wavelength `λp = 2πc/ωp` (m).
    pub lambda_p: f64,
    /// Plate area (m²).
    pub area: f64,
    /// Separation (m).
    pub y: f64,
}

impl PlasmaPlate {
    pub const DEFAULT_LAMBDA_P: f64 = 100e-9;

    pub fn new(area: f64, y: f64) -> Self {
        PlasmaPlate {
            lambda_p: Self::DEFAULT_LAMBDA_P,
            area,
            y,
        }
    }

    fn validate(&self) -> Result<(), CasimirError> {
        for (name, v) in [("lambda_p", self.lambda_p), ("area", self.area), ("y", self.y)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CasimirError::InvalidPlate(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// `−π²ħcA/(240y⁴)` (attractive, hence negative).
pub fn casimir_ideal(area: f64, y: f64) -> f64 {
    -PI * PI * HBAR * SPEED_OF_LIGHT * area / (240.0 * y.powi(4))
}

/// `Σ_{TE,TM} r²e^{−t}/(1 − r²e^{−t})` at scaled wavenumber `t = 2κy` and
/// `s = ζ/(cκ)`, with `K = ωp/(cκ)`.
fn mode_sum(t: f64, s: f64, big_k: f64) -> f64 {
    let k = big_k.hypot(1.0);
    let eps = 1.0 + (big_k / s) * (big_k / s);
    let e = (-t).exp();
    let em1 = (-t).exp_m1();
    let term = |r: f64, one_minus_r2: f64| {
        let r2 = r * r;
        r2 * e / (one_minus_r2 - r2 * em1)
    };
    let r_te = (1.0 - k) / (1.0 + k);
    let r_tm = if eps.is_finite() { (eps - k) / (eps + k) } else { 1.0 };
    let om_te = 4.0 * k / ((1.0 + k) * (1.0 + k));
    let om_tm = if eps.is_finite() { 4.0 * eps * k / ((eps + k) * (eps + k)) } else { 0.0 };
    term(r_te, om_te) + term(r_tm, om_tm)
}

/// Ratio of the plasma-model force to the ideal one; depends on `y/λp` only.
pub fn plasma_reduction(y_over_lambda: f64, quad: &QuadratureConfig) -> Result<f64, CasimirError> {
    if !(y_over_lambda.is_finite() && y_over_lambda > 0.0) {
        return Err(CasimirError::InvalidPlate(format!("y/λp must be positive, got {y_over_lambda}")));
    }
    // Relative targets only: the inner integrand falls off as e^{−t}.
    let inner_cfg = QuadratureConfig {
        rel_tol: (quad.rel_tol * 0.1).max(1e-13),
        abs_tol: 1e-300,
        ..*quad
    };
    let mut failure: Option<QuadError> = None;
    let outer = integrate_semi_infinite(
        |t| {
            if t == 0.0 {
                return 0.0;
            }
            let big_k = 4.0 * PI * y_over_lambda / t;
            match integrate(|s| mode_sum(t, s, big_k), 0.0, 1.0, &[], &inner_cfg) {
                Ok(r) => t * t * t * r.value,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        &[1.0, 3.0, 10.0],
        &QuadratureConfig {
            abs_tol: 1e-300,
            ..*quad
        },
    );
    if let Some(e) = failure {
        return Err(e.into());
    }
    Ok(outer?.value / (2.0 * PI.powi(4) / 15.0))
}

/// Plasma-model Lifshitz force (N, negative = attractive).
pub fn casimir_plasma(plate: &PlasmaPlate, quad: &QuadratureConfig) -> Result<f64, CasimirError> {
    plate.validate()?;
    Ok(casimir_ideal(plate.area, plate.y) * plasma_reduction(plate.y / plate.lambda_p, quad)?)
}

/// First separation on a log grid over `[y_lo, y_hi]` at which
/// `|electronic(y)| > |casimir(y)|`, refined by bisection on the log scale.
/// `None` when the electronic force never wins on the grid.
pub fn find_crossover<E, C>(
    y_lo: f64,
    y_hi: f64,
    points: usize,
    electronic: E,
    casimir: C,
) -> Result<Option<f64>, CasimirError>
where
    E: Fn(f64) -> Result<f64, String>,
    C: Fn(f64) -> Result<f64, String>,
{
    if !(y_lo > 0.0 && y_hi > y_lo && points >= 2) {
        return Err(CasimirError::InvalidPlate(format!(
            "need 0 < y_lo < y_hi and ≥ 2 points (got {y_lo:e}, {y_hi:e}, {points})"
        )));
    }
    let excess = |y: f64| -> Result<f64, CasimirError> {
        let wrap = |message: String| CasimirError::Evaluation { y, message };
        let fe = electronic(y).map_err(wrap)?;
        let fc = casimir(y).map_err(wrap)?;
        Ok(fe.abs().ln() - fc.abs().ln())
    };
    let step = (y_hi / y_lo).ln() / (points - 1) as f64;
    let grid: Vec<f64> = (0..points).map(|k| y_lo * (step * k as f64).exp()).collect();
    let first = excess(grid[0])?;
    if first > 0.0 {
        return Ok(Some(grid[0]));
    }
    let mut prev = grid[0];
    for &y in &grid[1..] {
        if excess(y)? > 0.0 {
            let (mut lo, mut hi) = (prev.ln(), y.ln());
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if excess(mid.exp())? > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(Some(hi.exp()));
        }
        prev = y;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ideal_reference_value() {
        let f = casimir_ideal(1e-4, 1e-6);
        assert!((f + 1.3e-7).abs() < 0.01e-7, "{f:e}");
        assert!((casimir_ideal(1e-4, 2e-6) * 16.0 / f - 1.0).abs() < 1e-14);
        assert_eq!(casimir_ideal(0.0, 1e-6), 0.0);
    }

    #[test]
    fn perfect_mirror_limit() {
        let q = QuadratureConfig::default();
        let r = plasma_reduction(1e3, &q).unwrap();
        assert!(r < 1.0 && r > 0.995, "{r}");
    }

    #[test]
    fn reduction_monotone_and_bounded() {
        let q = QuadratureConfig::default();
        let mut last = 0.0;
        for x in [0.01, 0.1, 1.0, 10.0, 100.0] {
            let r = plasma_reduction(x, &q).unwrap();
            assert!(r > last && r <= 1.0, "x={x}: {r}");
            last = r;
        }
    }

    #[test]
    fn crossover_bisection() {
        let y = find_crossover(1e-9, 1e-3, 25, |y| Ok(1e-20 / y.sqrt()), |y| Ok(1e-32 / y.powi(4))).unwrap().unwrap();
        let exact = (1e-12f64).powf(1.0 / 3.5);
        assert!((y / exact - 1.0).abs() < 1e-9);
        assert_eq!(find_crossover(1e-9, 1e-3, 5, |_| Ok(0.0), |_| Ok(1.0)).unwrap(), None);
    }
}
