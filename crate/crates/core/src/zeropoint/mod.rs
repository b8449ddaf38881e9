//! Zero-point energy of a capacitor `C` attached to a network port:
//!
//! `U = ħ ∫₀^∞ dω/(2π) · ωC·Re[Z/(1 + iωCZ)]`,
//!
//! integrated in `x = ωτ`, with `τ` the geometric mean of the circuit's time
//! constants. Networks whose resistive part survives at high frequency make the
//! integral diverge logarithmically; those are renormalized by subtracting the
//! reference-circuit integrand point by point before integrating.

mod closed_form;

use std::cell::RefCell;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use closed_form::{
    closed_form_i, closed_form_i_dc, closed_form_ii, closed_form_ii_dc, closed_form_iii, closed_form_iv, f_ii,
    f_ii_prime, f_iii, f_iv,
};

use crate::circuit::{
    geometric_mean, reference_network, BuiltinCircuit, CircuitError, CircuitNetwork, PortImpedance, ReferenceCircuit,
};
use crate::consts::{HBAR, SPEED_OF_LIGHT};
use crate::quad::{integrate_semi_infinite_with_scale, Integral, QuadError, QuadratureConfig};

/// Decay exponent the integrand tail must beat.
pub const MAX_DECAY_EXPONENT: f64 = -1.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnergyError {
    #[error("integral diverges (integrand tail ~ ω^{exponent:.2}); requires renormalization")]
    RequiresRenormalization { exponent: f64 },
    #[error("renormalized difference integrand is not integrable (tail ~ ω^{exponent:.2}); {reason}")]
    DifferenceNotIntegrable { exponent: f64, reason: String },
    #[error("capacitance must be positive and finite, got {0}")]
    InvalidCapacitance(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("quadrature failed: {0}")]
    Quadrature(#[from] QuadError),
}

/// Cutoff beyond which a lumped description stops holding: `ω_max = c/l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidityParams {
    /// Element size `l` in metres.
    pub element_size: f64,
    /// Largest admissible share of `∫|integrand|` beyond the cutoff.
    pub max_tail_fraction: f64,
}

impl Default for ValidityParams {
    fn default() -> Self {
        ValidityParams {
            element_size: 1e-5,
            max_tail_fraction: 1e-2,
        }
    }
}

impl ValidityParams {
    pub fn cutoff(&self) -> f64 {
        SPEED_OF_LIGHT / self.element_size
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ZeroPointConfig {
    pub quad: QuadratureConfig,
    pub validity: ValidityParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroPointResult {
    /// Joules.
    pub energy: f64,
    /// Whether a reference integrand was subtracted.
    pub renormalized: bool,
    /// Whether the reference circuit's own energy is finite.
    pub reference_energy_defined: bool,
    pub abs_error_estimate: f64,
    pub tail_fraction_beyond_cutoff: f64,
    pub validity_ok: bool,
    /// `τ` in seconds.
    pub time_scale: f64,
    pub panels: usize,
    /// Fitted power of `ω` in the integrand tail (`-inf` when it vanishes).
    pub decay_exponent: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Validity {
    pub validity_ok: bool,
    pub tail_fraction: f64,
}

/// `∂U/∂C` with its error estimate, J/F.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyDerivative {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub renormalized: bool,
}

#[derive(Clone, Copy)]
enum Kernel {
    Energy,
    DerivC,
}

fn loaded(z: &dyn PortImpedance, omega: f64, c: f64) -> Result<num_complex::Complex64, CircuitError> {
    match z.loaded_impedance(omega, c) {
        // Isolated pole exactly on a sample: nudge the frequency once.
        Err(CircuitError::Singular { .. }) => z.loaded_impedance(omega * (1.0 + 1e-9), c),
        other => other,
    }
}

/// Kernel value and its roundoff scale. `Re h` is carved out of `|h|`, so
/// the scale is built from `|h|`.
fn kernel(k: Kernel, z: &dyn PortImpedance, omega: f64, c: f64) -> Result<(f64, f64), CircuitError> {
    let h = loaded(z, omega, c)?;
    let m = h.norm();
    Ok(match k {
        Kernel::Energy => (omega * c * h.re, omega * c * m),
        Kernel::DerivC => (
            omega * h.re + omega * omega * c * (h * h).im,
            omega * m + omega * omega * c * m * m,
        ),
    })
}

/// Integrand in `x`, optionally minus a reference. Returns `(value, scale)`.
struct Integrand<'a> {
    kernel: Kernel,
    z: &'a dyn PortImpedance,
    reference: Option<&'a dyn PortImpedance>,
    c: f64,
    tau: f64,
    breaks: Vec<f64>,
    error: RefCell<Option<CircuitError>>,
}

impl<'a> Integrand<'a> {
    fn new(kernel: Kernel, z: &'a dyn PortImpedance, reference: Option<&'a dyn PortImpedance>, c: f64) -> Self {
        let tcs = z.element_scales().time_constants(Some(c));
        // A network without R or L has Re Z = 0 and the scale is immaterial.
        let tau = geometric_mean(&tcs).unwrap_or(c);
        let mut breaks: Vec<f64> = tcs.iter().map(|t| tau / t).collect();
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
        Integrand {
            kernel,
            z,
            reference,
            c,
            tau,
            breaks,
            error: RefCell::new(None),
        }
    }

    fn eval(&self, x: f64) -> (f64, f64) {
        if x == 0.0 {
            return (0.0, 0.0);
        }
        let omega = x / self.tau;
        let run = || -> Result<(f64, f64), CircuitError> {
            let (a, sa) = kernel(self.kernel, self.z, omega, self.c)?;
            match self.reference {
                Some(r) => {
                    let (b, sb) = kernel(self.kernel, r, omega, self.c)?;
                    Ok((a - b, sa + sb))
                }
                None => Ok((a, sa)),
            }
        };
        match run() {
            Ok(v) => v,
            Err(e) => {
                self.error.borrow_mut().get_or_insert(e);
                (0.0, 0.0)
            }
        }
    }

    fn take_error(&self) -> Result<(), CircuitError> {
        match self.error.borrow_mut().take() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    /// Least-squares power of the tail at `x = s·{10², 10³, 10⁴}`, where `s`
    /// is the largest characteristic point. Samples at the roundoff level of
    /// a cancelling difference are treated as zero.
    fn decay_exponent(&self) -> Result<f64, CircuitError> {
        let s = self.breaks.iter().copied().fold(1.0_f64, f64::max);
        let mut pts = Vec::new();
        for m in [1e2, 1e3, 1e4] {
            let x = s * m;
            let (v, scale) = self.eval(x);
            self.take_error()?;
            if v.abs() > 1e3 * f64::EPSILON * scale {
                pts.push((x.ln(), v.abs().ln()));
            }
        }
        if pts.len() < 2 {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(slope(&pts))
    }

    fn integrate(&self, lo: f64, hi: f64, cfg: &QuadratureConfig, absolute: bool) -> Result<Integral, EnergyError> {
        let res = integrate_semi_infinite_with_scale(
            |x| {
                let (v, s) = self.eval(x);
                if absolute {
                    (v.abs(), s)
                } else {
                    (v, s)
                }
            },
            lo,
            hi,
            &self.breaks,
            cfg,
        );
        self.take_error()?;
        Ok(res?)
    }

    /// Share of `∫|integrand|` beyond `ω_max`.
    fn tail_fraction(&self, vp: &ValidityParams, cfg: &QuadratureConfig) -> Result<f64, EnergyError> {
        let x_cut = vp.cutoff() * self.tau;
        // |f| has kinks at sign changes; a looser target is plenty for a ratio.
        let loose = QuadratureConfig {
            rel_tol: cfg.rel_tol.max(1e-6),
            ..*cfg
        };
        let head = self.integrate(0.0, x_cut, &loose, true)?.value;
        let tail = self.integrate(x_cut, f64::INFINITY, &loose, true)?.value;
        let total = head + tail;
        Ok(if total > 0.0 { (tail / total).clamp(0.0, 1.0) } else { 0.0 })
    }
}

/// Least-squares slope of `(x, y)` points.
pub(crate) fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

fn check_c(c: f64) -> Result<(), EnergyError> {
    if c.is_finite() && c > 0.0 {
        Ok(())
    } else {
        Err(EnergyError::InvalidCapacitance(c))
    }
}

fn run_energy(
    ig: &Integrand<'_>,
    cfg: &ZeroPointConfig,
    renormalized: bool,
    reference_energy_defined: bool,
) -> Result<ZeroPointResult, EnergyError> {
    let exponent = ig.decay_exponent()?;
    if exponent > MAX_DECAY_EXPONENT {
        return Err(if renormalized {
            EnergyError::DifferenceNotIntegrable {
                exponent,
                reason: "the reference circuit does not capture the high-frequency behaviour".into(),
            }
        } else {
            EnergyError::RequiresRenormalization { exponent }
        });
    }
    let res = ig.integrate(0.0, f64::INFINITY, &cfg.quad, false)?;
    let tail = ig.tail_fraction(&cfg.validity, &cfg.quad)?;
    let unit = HBAR / (2.0 * PI * ig.tau);
    Ok(ZeroPointResult {
        energy: unit * res.value,
        renormalized,
        reference_energy_defined,
        abs_error_estimate: unit * res.abs_error,
        tail_fraction_beyond_cutoff: tail,
        validity_ok: tail < cfg.validity.max_tail_fraction,
        time_scale: ig.tau,
        panels: res.panels,
        decay_exponent: exponent,
    })
}

/// Unrenormalized energy. Fails with [`EnergyError::RequiresRenormalization`]
/// when the integrand tail decays slower than `ω^-1.5`.
pub fn energy_raw(z: &dyn PortImpedance, c: f64, cfg: &ZeroPointConfig) -> Result<ZeroPointResult, EnergyError> {
    check_c(c)?;
    let ig = Integrand::new(Kernel::Energy, z, None, c);
    run_energy(&ig, cfg, false, true)
}

fn reference_converges(reference: &CircuitNetwork, c: f64) -> Result<bool, CircuitError> {
    let ig = Integrand::new(Kernel::Energy, reference, None, c);
    Ok(ig.decay_exponent()? <= MAX_DECAY_EXPONENT)
}

/// Energy relative to the reference circuit (capacitors shorted, inductors
/// removed). With an open reference nothing is subtracted and the result is
/// the raw energy.
pub fn energy_renormalized(
    net: &CircuitNetwork,
    c: f64,
    cfg: &ZeroPointConfig,
) -> Result<ZeroPointResult, EnergyError> {
    check_c(c)?;
    match reference_network(net) {
        ReferenceCircuit::Network(reference) => {
            let defined = reference_converges(&reference, c)?;
            let ig = Integrand::new(Kernel::Energy, net, Some(&reference), c);
            run_energy(&ig, cfg, true, defined)
        }
        ReferenceCircuit::Open => {
            let ig = Integrand::new(Kernel::Energy, net, None, c);
            run_energy(&ig, cfg, false, true)
        }
        ReferenceCircuit::ShortedPort => {
            let ig = Integrand::new(Kernel::Energy, net, None, c);
            run_energy(&ig, cfg, false, true).map_err(|e| match e {
                EnergyError::RequiresRenormalization { exponent } => EnergyError::DifferenceNotIntegrable {
                    exponent,
                    reason: "capacitors short the port at high frequency, leaving no reference to subtract".into(),
                },
                other => other,
            })
        }
    }
}

/// `∂U/∂C` by integrating the differentiated integrand, renormalized the same
/// way as [`energy_renormalized`].
pub fn energy_derivative(net: &CircuitNetwork, c: f64, cfg: &QuadratureConfig) -> Result<EnergyDerivative, EnergyError> {
    check_c(c)?;
    let reference = reference_network(net);
    let ref_net = reference.network();
    let ig = Integrand::new(Kernel::DerivC, net, ref_net.map(|r| r as &dyn PortImpedance), c);
    let exponent = ig.decay_exponent()?;
    if exponent > MAX_DECAY_EXPONENT {
        return Err(match ref_net {
            Some(_) => EnergyError::DifferenceNotIntegrable {
                exponent,
                reason: "derivative integrand".into(),
            },
            None => EnergyError::RequiresRenormalization { exponent },
        });
    }
    let res = ig.integrate(0.0, f64::INFINITY, cfg, false)?;
    let unit = HBAR / (2.0 * PI * ig.tau);
    Ok(EnergyDerivative {
        value: unit * res.value,
        abs_error_estimate: unit * res.abs_error,
        renormalized: ref_net.is_some(),
    })
}

/// Share of the (renormalized where applicable) integrand beyond `c/l`.
pub fn check_validity(
    net: &CircuitNetwork,
    c: f64,
    vp: &ValidityParams,
    quad: &QuadratureConfig,
) -> Result<Validity, EnergyError> {
    check_c(c)?;
    if !(vp.element_size.is_finite() && vp.element_size > 0.0) {
        return Err(EnergyError::InvalidParameter(format!(
            "element size must be positive, got {}",
            vp.element_size
        )));
    }
    let reference = reference_network(net);
    let ig = Integrand::new(Kernel::Energy, net, reference.network().map(|r| r as &dyn PortImpedance), c);
    let tail_fraction = ig.tail_fraction(vp, quad)?;
    Ok(Validity {
        validity_ok: tail_fraction < vp.max_tail_fraction,
        tail_fraction,
    })
}

/// Closed-form (or, for circuit IV, reduced-integral) renormalized energy of a
/// built-in circuit; `None` where no such form exists.
pub fn closed_form(circuit: &BuiltinCircuit, c: f64, quad: &QuadratureConfig) -> Option<Result<f64, EnergyError>> {
    match *circuit {
        BuiltinCircuit::SeriesRc { r, c0 } => Some(Ok(closed_form_i(r, c0, c))),
        BuiltinCircuit::SeriesRl { r, l } => Some(Ok(closed_form_ii(r, l, c))),
        BuiltinCircuit::ParallelRl { r, l } => Some(Ok(closed_form_iii(r, l, c))),
        BuiltinCircuit::Mixed { r, l, c0 } => Some(closed_form_iv(r, l, c0, c, quad)),
        BuiltinCircuit::ParallelRc { .. } => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{AnalyticImpedance, ElementScales};
    use num_complex::Complex64;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn circuit_one_raw_diverges() {
        let net = BuiltinCircuit::SeriesRc { r: 10.0, c0: 1e-14 }.network();
        let err = energy_raw(&net, 3e-14, &ZeroPointConfig::default()).unwrap_err();
        match err {
            EnergyError::RequiresRenormalization { exponent } => assert!((exponent + 1.0).abs() < 0.05),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn circuit_one_renormalized() {
        let (r, c0, c) = (10.0, 1e-14, 3e-14);
        let net = BuiltinCircuit::SeriesRc { r, c0 }.network();
        let res = energy_renormalized(&net, c, &ZeroPointConfig::default()).unwrap();
        assert!(res.renormalized && !res.reference_energy_defined);
        assert!(rel(res.energy, closed_form_i(r, c0, c)) < 1e-8, "{res:?}");
    }

    #[test]
    fn circuit_two_raw_equals_renormalized() {
        let net = BuiltinCircuit::SeriesRl { r: 10.0, l: 1e-10 }.network();
        let cfg = ZeroPointConfig::default();
        let a = energy_raw(&net, 3e-14, &cfg).unwrap();
        let b = energy_renormalized(&net, 3e-14, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(!b.renormalized && b.reference_energy_defined);
        assert!(rel(a.energy, closed_form_ii(10.0, 1e-10, 3e-14)) < 1e-8);
    }

    #[test]
    fn lossless_gives_zero() {
        let z = AnalyticImpedance::new(
            |w| Complex64::new(0.0, w * 1e-9),
            ElementScales {
                inductances: vec![1e-9],
                ..Default::default()
            },
        );
        let res = energy_raw(&z, 1e-12, &ZeroPointConfig::default()).unwrap();
        assert_eq!(res.energy, 0.0);
    }

    #[test]
    fn derivative_matches_closed_forms() {
        let cfg = QuadratureConfig::default();
        let c = 2e-14;
        let d1 = energy_derivative(&BuiltinCircuit::SeriesRc { r: 10.0, c0: 1e-14 }.network(), c, &cfg).unwrap();
        assert!(rel(d1.value, closed_form_i_dc(10.0, 1e-14, c)) < 1e-7);
        let d2 = energy_derivative(&BuiltinCircuit::SeriesRl { r: 3.0, l: 1e-10 }.network(), c, &cfg).unwrap();
        assert!(rel(d2.value, closed_form_ii_dc(3.0, 1e-10, c)) < 1e-7);
    }

    #[test]
    fn mixed_derivative_turns_over_at_a_two() {
        // U(r) at a = 2 peaks near r = 0.0117 (r = C0/C); the finite difference
        // of the reduced integral is the oracle.
        let cfg = QuadratureConfig::default();
        let (r_ohm, c0, a) = (10.0, 31.3e-15, 2.0_f64);
        let b = BuiltinCircuit::Mixed { r: r_ohm, l: a * a * r_ohm * r_ohm * c0, c0 };
        let fine = QuadratureConfig::default().with_rel_tol(1e-12);
        for (r, sign) in [(1.0e-2, -1.0), (1.15e-2, -1.0), (1.2e-2, 1.0), (3e-2, 1.0)] {
            let c = c0 / r;
            let d = energy_derivative(&b.network(), c, &cfg).unwrap().value;
            let h = 1e-4 * c;
            let u = |c| closed_form(&b, c, &fine).unwrap().unwrap();
            let fd = (u(c + h) - u(c - h)) / (2.0 * h);
            assert!(d * sign > 0.0, "r={r}: {d}");
            assert!(rel(d, fd) < 1e-5, "r={r}: {d} vs {fd}");
        }
    }

    #[test]
    fn validity_tail_for_circuit_one() {
        // Oracle: ½·ln(1 + 3/(x² + 1))/ln 2 at x = RC·c/l.
        let (r, c) = (10.0, 31e-15);
        let net = BuiltinCircuit::SeriesRc { r, c0: c }.network();
        let vp = ValidityParams::default();
        let v = check_validity(&net, c, &vp, &QuadratureConfig::default()).unwrap();
        let x = r * c * vp.cutoff();
        let oracle = 0.5 * (3.0 / (x * x + 1.0)).ln_1p() / 2f64.ln();
        assert!(rel(v.tail_fraction, oracle) < 1e-5, "{} vs {oracle}", v.tail_fraction);
        assert!(!v.validity_ok);
    }

    #[test]
    fn slope_fit() {
        let pts: Vec<_> = (1..5).map(|k| (k as f64, -2.0 * k as f64 + 3.0)).collect();
        assert!((slope(&pts) + 2.0).abs() < 1e-14);
    }
}
