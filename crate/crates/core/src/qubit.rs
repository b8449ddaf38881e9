//! Level shift and linewidth of a transmon whose island voltage couples, through
//! `β = C_g/C_J`, to the voltage noise of a linear network.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::circuit::{CircuitError, CircuitNetwork, ElementKind, PortImpedance};
use crate::consts::{ELEMENTARY_CHARGE, HBAR};
use crate::quad::{integrate_semi_infinite_with_scale, principal_value, QuadError, QuadratureConfig};

/// Tail exponent (of the integrand) above which the integrals are refused.
pub const MAX_TAIL_EXPONENT: f64 = -1.5;
/// Tail exponent above which a converged result is flagged as marginal.
pub const MARGINAL_TAIL_EXPONENT: f64 = -1.75;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QubitError {
    #[error("invalid transmon parameters: {0}")]
    InvalidParams(String),
    #[error("spectrum tail too slow: integrand ~ ω^{exponent:.2}; a roll-off faster than 1/ω^0.5 is needed")]
    Divergent { exponent: f64 },
    #[error("only diagonal corrections for levels 0, 1, 2 are supported (asked for {n},{m})")]
    Unsupported { n: usize, m: usize },
    #[error("quadrature failed: {0}")]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransmonParams {
    /// Charging energy (J).
    pub e_c: f64,
    /// Josephson energy (J).
    pub e_j: f64,
    /// Gate capacitance (F).
    pub c_g: f64,
    /// Junction capacitance (F).
    pub c_j: f64,
}

impl TransmonParams {
    pub fn new(e_c: f64, e_j: f64, c_g: f64, c_j: f64) -> Result<Self, QubitError> {
        for (name, v) in [("E_C", e_c), ("E_J", e_j), ("C_g", c_g), ("C_J", c_j)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(QubitError::InvalidParams(format!("{name} must be positive, got {v}")));
            }
        }
        let tp = TransmonParams { e_c, e_j, c_g, c_j };
        if !(tp.omega21() > 0.0) {
            return Err(QubitError::InvalidParams(format!(
                "E_J/E_C = {:.3} leaves no bound 2→1 transition",
                e_j / e_c
            )));
        }
        Ok(tp)
    }

    /// From `ω0 = √(8E_C E_J)/ħ`, `ratio = √(E_C/8E_J)` and `β`. `C_J` is set
    /// to `e²/(2E_C)` and `C_g = β·C_J`.
    pub fn from_ratio(omega0: f64, ratio: f64, beta: f64) -> Result<Self, QubitError> {
        let e_c = HBAR * omega0 * ratio;
        let e_j = e_c / (8.0 * ratio * ratio);
        let c_j = ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (2.0 * e_c);
        Self::new(e_c, e_j, beta * c_j, c_j)
    }

    pub fn beta(&self) -> f64 {
        self.c_g / self.c_j
    }

    pub fn omega0(&self) -> f64 {
        (8.0 * self.e_c * self.e_j).sqrt() / HBAR
    }

    /// `(E_{n+1} − E_n)/ħ = ω0 − (n+1)E_C/ħ`.
    pub fn transition(&self, n: usize) -> f64 {
        self.omega0() - (n + 1) as f64 * self.e_c / HBAR
    }

    pub fn omega10(&self) -> f64 {
        self.transition(0)
    }

    pub fn omega21(&self) -> f64 {
        self.transition(1)
    }

    /// `Z_J = (ħ/e²)√(E_C/2E_J)`.
    pub fn z_j(&self) -> f64 {
        HBAR / (ELEMENTARY_CHARGE * ELEMENTARY_CHARGE) * (self.e_c / (2.0 * self.e_j)).sqrt()
    }

    /// Human-readable notes when outside the transmon / weak-coupling regime.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.e_j / self.e_c < 20.0 {
            w.push(format!("E_J/E_C = {:.2} < 20: outside the transmon regime", self.e_j / self.e_c));
        }
        if self.beta() > 0.2 {
            w.push(format!("β = {:.3} > 0.2: coupling not weak", self.beta()));
        }
        w
    }
}

/// `|Q_{n,m}|` (C): `(2e)²·(n+1)·√(E_J/8E_C)/2` for `m = n ± 1`, else zero.
pub fn charge_matrix_element(tp: &TransmonParams, n: usize, m: usize) -> f64 {
    if n.abs_diff(m) != 1 {
        return 0.0;
    }
    let upper = n.max(m) as f64;
    let q2 = 4.0 * ELEMENTARY_CHARGE * ELEMENTARY_CHARGE * upper * (tp.e_j / (8.0 * tp.e_c)).sqrt() / 2.0;
    q2.sqrt()
}

/// Voltage spectrum `S_Va(ω)` (V²·s), zero for `ω ≤ 0` (zero temperature).
#[derive(Clone)]
pub struct VoltageSpectrum {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    breakpoints: Vec<f64>,
    dissipative: bool,
}

impl fmt::Debug for VoltageSpectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VoltageSpectrum")
            .field("breakpoints", &self.breakpoints)
            .field("dissipative", &self.dissipative)
            .finish_non_exhaustive()
    }
}

impl VoltageSpectrum {
    /// Arbitrary one-sided spectrum; `breakpoints` are angular frequencies
    /// where it changes character.
    pub fn new<F>(eval: F, breakpoints: Vec<f64>) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        VoltageSpectrum {
            eval: Arc::new(eval),
            breakpoints,
            dissipative: true,
        }
    }

    /// `2ħωR/(1 + ω²C²R²)` for `ω > 0`.
    pub fn parallel_rc(r: f64, c: f64) -> Self {
        Self::new(
            move |w| {
                if w > 0.0 {
                    let b = w * r * c;
                    2.0 * HBAR * w * r / (1.0 + b * b)
                } else {
                    0.0
                }
            },
            vec![1.0 / (r * c)],
        )
    }

    /// `level` on `(0, cutoff)`, zero elsewhere.
    pub fn flat(level: f64, cutoff: f64) -> Self {
        Self::new(move |w| if w > 0.0 && w < cutoff { level } else { 0.0 }, vec![cutoff])
    }

    /// Voltage noise across the port of `net` (qubit loading neglected): every
    /// resistor's current noise `2ħω/R_k`, propagated by the transfer impedance
    /// to the port. By reciprocity that transfer impedance is the voltage on
    /// `R_k` per unit current driven into the port.
    pub fn node_spectrum(net: &CircuitNetwork) -> Self {
        let net = net.clone();
        let breakpoints = net.scales().time_constants(None).iter().map(|t| 1.0 / t).collect();
        let dissipative = net.has_resistor();
        let spectrum = move |w: f64| -> f64 {
            if w <= 0.0 || !dissipative {
                return 0.0;
            }
            let volts = net
                .element_voltages(w)
                .or_else(|_| net.element_voltages(w * (1.0 + 1e-9)));
            match volts {
                Ok(v) => v
                    .iter()
                    .filter(|(i, _)| net.elements()[*i].kind == ElementKind::Resistor)
                    .map(|(i, v)| 2.0 * HBAR * w / net.elements()[*i].value * v.norm_sqr())
                    .sum(),
                Err(_) => f64::NAN,
            }
        };
        VoltageSpectrum {
            eval: Arc::new(spectrum),
            breakpoints,
            dissipative,
        }
    }

    pub fn eval(&self, omega: f64) -> f64 {
        (self.eval)(omega)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// False when the network has no resistor; the spectrum is then zero.
    pub fn is_dissipative(&self) -> bool {
        self.dissipative
    }
}

/// `2ħω·Re Z(ω)`: the port voltage noise by the fluctuation–dissipation theorem.
pub fn fdt_spectrum(z: &dyn PortImpedance, omega: f64) -> Result<f64, CircuitError> {
    if omega <= 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * HBAR * omega * z.impedance(omega)?.re)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelShift {
    /// Shift of the 0→1 transition (rad/s).
    pub delta: f64,
    /// Linewidth (rad/s), never negative.
    pub gamma: f64,
    /// Fitted power of `ω` in the integrand tail.
    pub tail_exponent: f64,
    /// Converged, but with a slowly decaying tail.
    pub marginal_tail: bool,
}

/// Scaled spectrum `S(x·ω_ref)/S_ref`, with the reference level and breakpoints.
struct Scaled<'a> {
    s: &'a VoltageSpectrum,
    w_ref: f64,
    level: f64,
    breaks: Vec<f64>,
}

impl<'a> Scaled<'a> {
    fn new(s: &'a VoltageSpectrum, w_ref: f64) -> Self {
        let mut probes: Vec<f64> = vec![w_ref, 0.5 * w_ref, 2.0 * w_ref];
        probes.extend(s.breakpoints.iter().flat_map(|b| [*b, 0.5 * b]));
        let level = probes.iter().map(|w| s.eval(*w).abs()).fold(0.0, f64::max);
        let breaks = s.breakpoints.iter().map(|b| b / w_ref).filter(|b| b.is_finite() && *b > 0.0).collect();
        Scaled { s, w_ref, level, breaks }
    }

    fn at(&self, x: f64) -> f64 {
        self.s.eval(x * self.w_ref) / self.level
    }

    /// Power of `S(ω)/ω` at `x = m·{10², 10³, 10⁴}`.
    fn tail_exponent(&self) -> f64 {
        let m = self.breaks.iter().copied().fold(1.0_f64, f64::max);
        let pts: Vec<(f64, f64)> = [1e2, 1e3, 1e4]
            .iter()
            .map(|k| k * m)
            .map(|x| (x, self.at(x).abs() / x))
            .filter(|(_, v)| *v > 0.0)
            .map(|(x, v)| (x.ln(), v.ln()))
            .collect();
        if pts.len() < 2 {
            f64::NEG_INFINITY
        } else {
            crate::zeropoint::slope(&pts)
        }
    }
}

fn checked_tail(sc: &Scaled<'_>) -> Result<f64, QubitError> {
    let p = sc.tail_exponent();
    if p.is_nan() || p > MAX_TAIL_EXPONENT {
        return Err(QubitError::Divergent { exponent: p });
    }
    Ok(p)
}

fn regular(
    f: impl Fn(f64) -> f64,
    lo: f64,
    breaks: &[f64],
    quad: &QuadratureConfig,
) -> Result<f64, QuadError> {
    Ok(integrate_semi_infinite_with_scale(
        |x| {
            let v = f(x);
            (v, v.abs())
        },
        lo,
        f64::INFINITY,
        breaks,
        quad,
    )?
    .value)
}

/// `P∫₀^∞ dx F(x)/(x − 1)`: symmetric window `[0, 2]` around the pole plus
/// the regular remainder.
fn pv_unit_pole(f: impl Fn(f64) -> f64 + Copy, breaks: &[f64], quad: &QuadratureConfig) -> Result<f64, QuadError> {
    let near = principal_value(f, 0.0, 2.0, 1.0, breaks, quad)?.value;
    let far = regular(|x| f(x) / (x - 1.0), 2.0, breaks, quad)?;
    Ok(near + far)
}

/// `δ` and `γ` of the 0→1 transition:
/// `δ = (β²/ħZ_J)∫₀^∞ dω/2π S(ω)[P ω10/(ω10² − ω²) − 1/(ω + ω21)]`,
/// `γ = β²S(ω10)/(2ħZ_J)`.
pub fn level_shift(tp: &TransmonParams, s: &VoltageSpectrum, quad: &QuadratureConfig) -> Result<LevelShift, QubitError> {
    let w10 = tp.omega10();
    let r21 = tp.omega21() / w10;
    let sc = Scaled::new(s, w10);
    let pref = tp.beta() * tp.beta() / (HBAR * tp.z_j());
    let gamma = (pref / 2.0 * s.eval(w10)).max(0.0);
    if sc.level == 0.0 {
        return Ok(LevelShift {
            delta: 0.0,
            gamma,
            tail_exponent: f64::NEG_INFINITY,
            marginal_tail: false,
        });
    }
    let p = checked_tail(&sc)?;
    // S/(1 − x²) − S/(x + r21) written as F(x)/(x − 1).
    let f = |x: f64| sc.at(x) * (-1.0 / (x + 1.0) - (x - 1.0) / (x + r21));
    let integral = pv_unit_pole(f, &sc.breaks, quad)?;
    Ok(LevelShift {
        delta: pref / (2.0 * PI) * sc.level * integral,
        gamma,
        tail_exponent: p,
        marginal_tail: p > MARGINAL_TAIL_EXPONENT,
    })
}

/// Share of the shift integrand's envelope `S(ω)/(ω + ω10)` lying beyond
/// `cutoff` (rad/s), where a lumped description of the bath stops holding.
pub fn shift_tail_fraction(
    tp: &TransmonParams,
    s: &VoltageSpectrum,
    cutoff: f64,
    quad: &QuadratureConfig,
) -> Result<f64, QubitError> {
    let sc = Scaled::new(s, tp.omega10());
    if sc.level == 0.0 {
        return Ok(0.0);
    }
    checked_tail(&sc)?;
    let env = |x: f64| sc.at(x).abs() / (x + 1.0);
    let total = regular(env, 0.0, &sc.breaks, quad)?;
    let x_cut = cutoff / tp.omega10();
    let breaks: Vec<f64> = sc.breaks.iter().copied().filter(|b| *b > x_cut).collect();
    let tail = regular(env, x_cut, &breaks, quad)?;
    Ok(if total > 0.0 { tail / total } else { 0.0 })
}

/// `Δ(ω) = (1/2π) P∫₀^∞ dω' S(ω')/(ω' − ω)` (V²).
pub fn delta_function(s: &VoltageSpectrum, omega: f64, quad: &QuadratureConfig) -> Result<f64, QubitError> {
    if omega == 0.0 {
        let w_ref = s.breakpoints.iter().copied().fold(f64::NAN, f64::max);
        let w_ref = if w_ref.is_finite() && w_ref > 0.0 { w_ref } else { 1.0 };
        let sc = Scaled::new(s, w_ref);
        if sc.level == 0.0 {
            return Ok(0.0);
        }
        checked_tail(&sc)?;
        let v = regular(|x| sc.at(x) / x, 0.0, &sc.breaks, quad)?;
        return Ok(sc.level * v / (2.0 * PI));
    }
    let w = omega.abs();
    let sc = Scaled::new(s, w);
    if sc.level == 0.0 {
        return Ok(0.0);
    }
    checked_tail(&sc)?;
    // dω'/(ω' − ω) = dx/(x ∓ 1) in x = ω'/|ω|.
    let v = if omega > 0.0 {
        pv_unit_pole(|x| sc.at(x), &sc.breaks, quad)?
    } else {
        regular(|x| sc.at(x) / (x + 1.0), 0.0, &sc.breaks, quad)?
    };
    Ok(sc.level * v / (2.0 * PI))
}

/// Second-order correction `E^(2)_nn` (J) for `n ∈ {0, 1, 2}`:
/// `(β²/ħ) Σ_{n'} |Q_{nn'}|² [−Δ(ω_{nn'}) − (i/2) S(ω_{nn'})]`, with
/// `ω_{nn'} = (E_n − E_{n'})/ħ`.
pub fn effective_correction(
    tp: &TransmonParams,
    s: &VoltageSpectrum,
    n: usize,
    m: usize,
    quad: &QuadratureConfig,
) -> Result<Complex64, QubitError> {
    if n != m || n > 2 {
        return Err(QubitError::Unsupported { n, m });
    }
    let beta2 = tp.beta() * tp.beta();
    let mut total = Complex64::new(0.0, 0.0);
    let neighbours = [n.checked_sub(1), Some(n + 1)];
    for k in neighbours.into_iter().flatten() {
        let q = charge_matrix_element(tp, n, k);
        // ω_{nk}: positive when k is below n.
        let w = if k < n { tp.transition(k) } else { -tp.transition(n) };
        let d = delta_function(s, w, quad)?;
        total += beta2 / HBAR * q * q * Complex64::new(-d, -0.5 * s.eval(w));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::BuiltinCircuit;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn transmon() -> TransmonParams {
        TransmonParams::from_ratio(2.0 * PI * 5e9, 0.1, 0.1).unwrap()
    }

    #[test]
    fn derived_quantities() {
        let tp = transmon();
        assert!(rel(tp.omega0(), 2.0 * PI * 5e9) < 1e-14);
        assert!(rel(tp.omega10(), 0.9 * tp.omega0()) < 1e-14);
        assert!(tp.omega21() < tp.omega10());
        assert!((tp.z_j() - 821.6).abs() < 0.1, "{}", tp.z_j());
        assert!((tp.beta() - 0.1).abs() < 1e-15);
        // E_J/E_C = 12.5 here, below the usual transmon bound.
        assert_eq!(tp.warnings().len(), 1);
        assert!(TransmonParams::from_ratio(1e10, 0.01, 0.1).unwrap().warnings().is_empty());
        let weak = TransmonParams::from_ratio(1e10, 0.2, 0.3).unwrap();
        assert_eq!(weak.warnings().len(), 2);
    }

    #[test]
    fn charge_sum_rule() {
        let tp = transmon();
        let q01 = charge_matrix_element(&tp, 0, 1);
        let e2 = 4.0 * ELEMENTARY_CHARGE * ELEMENTARY_CHARGE;
        assert!(rel(q01 * q01 / e2, (tp.e_j / (8.0 * tp.e_c)).sqrt() / 2.0) < 1e-14);
        assert!(rel(charge_matrix_element(&tp, 2, 1).powi(2), 2.0 * q01 * q01) < 1e-14);
        assert_eq!(charge_matrix_element(&tp, 0, 2), 0.0);
        // 2|Q01|² = ħ/Z_J ties the two shift formulas together.
        assert!(rel(2.0 * q01 * q01, HBAR / tp.z_j()) < 1e-14);
    }

    #[test]
    fn flat_spectrum_log_oracle() {
        let tp = transmon();
        let (w10, w21) = (tp.omega10(), tp.omega21());
        let quad = QuadratureConfig::default().with_rel_tol(1e-12);
        for wc in [0.4 * w10, 1.7 * w10, 3.0 * w10] {
            let s0 = 1e-20;
            let ls = level_shift(&tp, &VoltageSpectrum::flat(s0, wc), &quad).unwrap();
            let integral = 0.5 * ((wc + w10) / (wc - w10).abs()).ln() - ((wc + w21) / w21).ln();
            let expect = tp.beta().powi(2) / (HBAR * tp.z_j()) * s0 * integral / (2.0 * PI);
            assert!(rel(ls.delta, expect) < 1e-8, "wc/w10={}: {} vs {}", wc / w10, ls.delta, expect);
        }
    }

    #[test]
    fn two_paths_agree() {
        let tp = transmon();
        let s = VoltageSpectrum::parallel_rc(10.0, 0.3e-12);
        let quad = QuadratureConfig::default().with_rel_tol(1e-12);
        let ls = level_shift(&tp, &s, &quad).unwrap();
        let e00 = effective_correction(&tp, &s, 0, 0, &quad).unwrap();
        let e11 = effective_correction(&tp, &s, 1, 1, &quad).unwrap();
        let delta = (e11 - e00).re / HBAR;
        let gamma = -2.0 * e11.im / HBAR;
        assert!(rel(delta, ls.delta) < 1e-8, "{delta} vs {}", ls.delta);
        assert!(rel(gamma, ls.gamma) < 1e-12);
        assert!(e00.im == 0.0);
        assert!(effective_correction(&tp, &s, 0, 1, &quad).is_err());
    }

    #[test]
    fn beta_scaling_and_width_sign() {
        let s = VoltageSpectrum::parallel_rc(5.0, 0.2e-12);
        let quad = QuadratureConfig::default();
        let a = level_shift(&TransmonParams::from_ratio(3e10, 0.05, 0.05).unwrap(), &s, &quad).unwrap();
        let b = level_shift(&TransmonParams::from_ratio(3e10, 0.05, 0.1).unwrap(), &s, &quad).unwrap();
        assert!(rel(b.delta / a.delta, 4.0) < 1e-12);
        assert!(a.gamma >= 0.0 && !a.marginal_tail);
    }

    #[test]
    fn bare_resistor_is_refused() {
        let s = VoltageSpectrum::new(|w| if w > 0.0 { 2.0 * HBAR * w * 10.0 } else { 0.0 }, vec![]);
        let err = level_shift(&transmon(), &s, &QuadratureConfig::default()).unwrap_err();
        assert!(matches!(err, QubitError::Divergent { .. }));
    }

    #[test]
    fn node_spectrum_matches_fdt_and_closed_form() {
        let (r, c) = (10.0, 0.5e-12);
        let net = BuiltinCircuit::ParallelRc { r, c }.network();
        let s = VoltageSpectrum::node_spectrum(&net);
        let closed = VoltageSpectrum::parallel_rc(r, c);
        for w in [1e8, 1e11, 3e12] {
            assert!(rel(s.eval(w), closed.eval(w)) < 1e-12);
            assert!(rel(s.eval(w), fdt_spectrum(&net, w).unwrap()) < 1e-12);
        }
        assert_eq!(s.eval(-1e10), 0.0);
        // C → 0: bare resistor.
        let bare = VoltageSpectrum::parallel_rc(r, 1e-30);
        assert!(rel(bare.eval(1e9), 2.0 * HBAR * 1e9 * r) < 1e-12);
    }

    #[test]
    fn multi_resistor_spectrum_obeys_fdt() {
        let net = crate::netlist::parse("R1 p m 3\nC1 m gnd 1p\nR2 m gnd 20\nL1 p gnd 2n\nR3 p gnd 50\nPORT p gnd").unwrap();
        let s = VoltageSpectrum::node_spectrum(&net);
        for w in [1e8, 2e10, 5e11] {
            assert!(rel(s.eval(w), fdt_spectrum(&net, w).unwrap()) < 1e-10);
        }
    }

    #[test]
    fn shift_tail_fraction_tracks_roll_off() {
        let tp = transmon();
        let q = QuadratureConfig::default();
        let cut = 3e13;
        // The envelope is flat up to the RC corner 1/RC and falls as ω⁻² beyond.
        let narrow = shift_tail_fraction(&tp, &VoltageSpectrum::parallel_rc(100.0, 1e-12), cut, &q).unwrap();
        let wide = shift_tail_fraction(&tp, &VoltageSpectrum::parallel_rc(1.0, 1e-15), cut, &q).unwrap();
        assert!(narrow < 1e-2 && wide > 0.5, "{narrow} {wide}");
        assert_eq!(shift_tail_fraction(&tp, &VoltageSpectrum::flat(0.0, 1.0), cut, &q).unwrap(), 0.0);
    }

    #[test]
    fn lossless_network_has_zero_spectrum() {
        let net = crate::netlist::parse("L1 p gnd 1n\nC1 p gnd 1p\nPORT p gnd").unwrap();
        let s = VoltageSpectrum::node_spectrum(&net);
        assert!(!s.is_dissipative());
        let ls = level_shift(&transmon(), &s, &QuadratureConfig::default()).unwrap();
        assert_eq!((ls.delta, ls.gamma), (0.0, 0.0));
    }
}
