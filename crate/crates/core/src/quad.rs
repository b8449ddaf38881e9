//! Globally adaptive Gauss–Kronrod quadrature.
//!
//! Panels are integrated with the 15-point Kronrod rule and its embedded
//! 7-point Gauss rule; the difference of the two is the panel error estimate.
//! The panel with the largest estimate is bisected until the total estimate
//! meets `max(abs_tol, rel_tol·|I|)` or the panel budget runs out, which is an
//! error rather than a silently truncated answer.
//!
//! Semi-infinite integrals use the map `x = t/(1−t)`, `t ∈ [0, 1)`.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Kronrod abscissae on [-1, 1] (non-negative half, descending).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the odd-indexed Kronrod abscissae XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Multiple of machine epsilon times the integrated sample scale below which
/// the error estimate is treated as roundoff.
const ROUNDOFF_FACTOR: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-9,
            abs_tol: 1e-10,
            max_panels: 10_000,
        }
    }
}

impl QuadratureConfig {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    fn validate(&self) -> Result<(), QuadError> {
        if !(self.rel_tol >= 0.0 && self.abs_tol >= 0.0) || (self.rel_tol == 0.0 && self.abs_tol == 0.0)
        {
            return Err(QuadError::InvalidConfig(format!(
                "tolerances must be non-negative and not both zero (rel_tol={}, abs_tol={})",
                self.rel_tol, self.abs_tol
            )));
        }
        if self.max_panels == 0 {
            return Err(QuadError::InvalidConfig("max_panels must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("panel budget of {max_panels} exhausted: estimate {value:e} with error {abs_error:e}")]
    PanelBudgetExhausted {
        max_panels: usize,
        value: f64,
        abs_error: f64,
    },
    #[error("tolerance not reachable at floating-point resolution: estimate {value:e} with error {abs_error:e}")]
    ToleranceNotReached { value: f64, abs_error: f64 },
    #[error("integrand is not finite at x = {at:e}")]
    NonFinite { at: f64 },
    #[error("invalid integration interval [{a:e}, {b:e}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(String),
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    /// Kronrod estimate of ∫|f|.
    pub abs_value: f64,
    pub panels: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs_value: f64,
    scale: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F>(f: &mut F, a: f64, b: f64) -> Result<Panel, QuadError>
where
    F: FnMut(f64) -> (f64, f64),
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut eval = |x: f64| -> Result<(f64, f64), QuadError> {
        let (v, s) = f(x);
        if v.is_finite() && s.is_finite() {
            Ok((v, s.abs()))
        } else {
            Err(QuadError::NonFinite { at: x })
        }
    };

    let (fc, sc) = eval(center)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs_value = WGK[7] * fc.abs();
    let mut scale = WGK[7] * sc;
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let (f1, s1) = eval(center - dx)?;
        let (f2, s2) = eval(center + dx)?;
        kronrod += w * (f1 + f2);
        abs_value += w * (f1.abs() + f2.abs());
        scale += w * (s1 + s2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    Ok(Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
        abs_value: abs_value * half.abs(),
        scale: scale * half.abs(),
    })
}

fn sorted_breaks(a: f64, b: f64, breakpoints: &[f64]) -> Vec<f64> {
    let mut edges: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|x| x.is_finite() && *x > a && *x < b)
        .collect();
    edges.push(a);
    edges.push(b);
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    edges
}

/// Integrates `f` over `[a, b]`. `f` returns `(value, scale)`, where `scale`
/// bounds the magnitude of the terms that were combined to form `value`; it
/// sets the roundoff floor for integrands built from cancelling differences.
pub fn integrate_with_scale<F>(
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Integral, QuadError>
where
    F: FnMut(f64) -> (f64, f64),
{
    cfg.validate()?;
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(QuadError::InvalidInterval { a, b });
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            abs_error: 0.0,
            abs_value: 0.0,
            panels: 0,
            evaluations: 0,
        });
    }

    let edges = sorted_breaks(a, b, breakpoints);
    let mut heap = BinaryHeap::with_capacity(cfg.max_panels.min(4096));
    let mut frozen: Vec<Panel> = Vec::new();
    let mut evaluations = 0;
    for w in edges.windows(2) {
        heap.push(gauss_kronrod(&mut f, w[0], w[1])?);
        evaluations += 15;
    }

    loop {
        let panels = heap.len() + frozen.len();
        let (value, error, abs_value, scale) = heap
            .iter()
            .chain(frozen.iter())
            .fold((0.0, 0.0, 0.0, 0.0), |acc, p| {
                (acc.0 + p.value, acc.1 + p.error, acc.2 + p.abs_value, acc.3 + p.scale)
            });
        let target = cfg
            .abs_tol
            .max(cfg.rel_tol * value.abs())
            .max(ROUNDOFF_FACTOR * f64::EPSILON * scale);
        if error <= target {
            return Ok(Integral {
                value,
                abs_error: error,
                abs_value,
                panels,
                evaluations,
            });
        }
        if panels >= cfg.max_panels {
            return Err(QuadError::PanelBudgetExhausted {
                max_panels: cfg.max_panels,
                value,
                abs_error: error,
            });
        }
        let Some(worst) = heap.pop() else {
            return Err(QuadError::ToleranceNotReached {
                value,
                abs_error: error,
            });
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) <= 4.0 * f64::EPSILON * mid.abs() {
            frozen.push(worst);
            continue;
        }
        // Bisecting many panels per pass keeps the O(n) re-summation cheap.
        heap.push(gauss_kronrod(&mut f, worst.a, mid)?);
        heap.push(gauss_kronrod(&mut f, mid, worst.b)?);
        evaluations += 30;
        let budget = cfg.max_panels.saturating_sub(heap.len() + frozen.len());
        let extra = (heap.len() / 8).min(budget / 2);
        for _ in 0..extra {
            let Some(p) = heap.pop() else { break };
            let mid = 0.5 * (p.a + p.b);
            if mid <= p.a || mid >= p.b || (p.b - p.a) <= 4.0 * f64::EPSILON * mid.abs() {
                frozen.push(p);
                continue;
            }
            heap.push(gauss_kronrod(&mut f, p.a, mid)?);
            heap.push(gauss_kronrod(&mut f, mid, p.b)?);
            evaluations += 30;
        }
    }
}

/// Integrates `f` over `[a, b]` with optional interior breakpoints.
pub fn integrate<F>(
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Integral, QuadError>
where
    F: FnMut(f64) -> f64,
{
    integrate_with_scale(
        |x| {
            let v = f(x);
            (v, v.abs())
        },
        a,
        b,
        breakpoints,
        cfg,
    )
}

/// Maps `x ∈ [0, ∞)` to `t = x/(1+x) ∈ [0, 1)`.
pub fn to_unit(x: f64) -> f64 {
    if x.is_infinite() {
        1.0
    } else {
        x / (1.0 + x)
    }
}

/// Inverse of [`to_unit`].
pub fn from_unit(t: f64) -> f64 {
    t / (1.0 - t)
}

/// Integrates over `[x_lo, x_hi]` with `0 ≤ x_lo < x_hi ≤ ∞` in the mapped
/// variable `t = x/(1+x)`. Breakpoints are given in `x`.
pub fn integrate_semi_infinite_with_scale<F>(
    mut f: F,
    x_lo: f64,
    x_hi: f64,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Integral, QuadError>
where
    F: FnMut(f64) -> (f64, f64),
{
    if !(x_lo >= 0.0 && x_lo.is_finite() && x_hi >= x_lo) {
        return Err(QuadError::InvalidInterval { a: x_lo, b: x_hi });
    }
    let t_breaks: Vec<f64> = breakpoints.iter().map(|&x| to_unit(x)).collect();
    integrate_with_scale(
        |t| {
            let one_minus = 1.0 - t;
            let x = t / one_minus;
            let jac = 1.0 / (one_minus * one_minus);
            let (v, s) = f(x);
            (v * jac, s * jac)
        },
        to_unit(x_lo),
        to_unit(x_hi),
        &t_breaks,
        cfg,
    )
}

/// Integrates `f` over `[0, ∞)`.
pub fn integrate_semi_infinite<F>(
    mut f: F,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Integral, QuadError>
where
    F: FnMut(f64) -> f64,
{
    integrate_semi_infinite_with_scale(
        |x| {
            let v = f(x);
            (v, v.abs())
        },
        0.0,
        f64::INFINITY,
        breakpoints,
        cfg,
    )
}

/// Cauchy principal value `P∫_a^b f(x)/(x − pole) dx` for `a < pole < b`.
///
/// Uses the subtraction `[f(x) − f(pole)]/(x − pole)` plus the analytic
/// `f(pole)·ln((b − pole)/(pole − a))`, which vanishes for a symmetric interval.
pub fn principal_value<F>(
    mut f: F,
    a: f64,
    b: f64,
    pole: f64,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Integral, QuadError>
where
    F: FnMut(f64) -> f64,
{
    if !(a < pole && pole < b) {
        return Err(QuadError::InvalidInterval { a, b });
    }
    let at_pole = f(pole);
    if !at_pole.is_finite() {
        return Err(QuadError::NonFinite { at: pole });
    }
    let mut breaks = breakpoints.to_vec();
    breaks.push(pole);
    let mut res = integrate_with_scale(
        |x| {
            let fx = f(x);
            let d = x - pole;
            ((fx - at_pole) / d, (fx.abs() + at_pole.abs()) / d.abs())
        },
        a,
        b,
        &breaks,
        cfg,
    )?;
    let log_term = at_pole * ((b - pole) / (pole - a)).ln();
    res.value += log_term;
    Ok(res)
}
