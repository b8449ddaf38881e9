//! Closed-form renormalized potentials of the built-in circuits.
//!
//! Circuits II and III depend on `q = L/(R²C)` only, through
//! `U = ħ(R/L)·F(q)`. The printed arctangent forms turn into logarithms when
//! their square roots become imaginary; each branch below is written so that it
//! stays accurate across `q ∈ (0, ∞)`, including the branch points.

use std::f64::consts::PI;

use crate::consts::HBAR;
use crate::quad::{integrate_semi_infinite, QuadratureConfig};

use super::EnergyError;

/// Threshold on the distance to a branch point below which series are used.
const SERIES_EPS: f64 = 1e-3;

/// `S(z) = Σ (−z)^k/(2k+1)`, i.e. `arctan(√z)/√z` continued to `z < 0`.
fn s_series(z: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 0..40 {
        let t = term / (2 * k + 1) as f64;
        sum += t;
        if t.abs() < 1e-18 * sum.abs() {
            break;
        }
        term *= -z;
    }
    sum
}

/// `S'(z)`.
fn s_series_prime(z: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..40 {
        let t = -(k as f64) * term / (2 * k + 1) as f64;
        sum += t;
        if t.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
        term *= -z;
    }
    sum
}

/// `φ(q)` with `F_II = q·φ/(2π)`.
fn phi_ii(q: f64) -> f64 {
    let eps = 4.0 * q - 1.0;
    if eps.abs() < SERIES_EPS {
        let z = 4.0 * eps / ((1.0 - eps) * (1.0 - eps));
        2.0 / (1.0 - eps) * s_series(z)
    } else if eps > 0.0 {
        let t = eps.sqrt();
        t.atan2(1.0 - 2.0 * q) / t
    } else {
        let s = (-eps).sqrt();
        ((1.0 - 2.0 * q + s) / (2.0 * q)).ln() / s
    }
}

fn phi_ii_prime(q: f64) -> f64 {
    let eps = 4.0 * q - 1.0;
    if eps.abs() < SERIES_EPS {
        let om = 1.0 - eps;
        let z = 4.0 * eps / (om * om);
        let dz = 4.0 * (1.0 + eps) / (om * om * om);
        let dphi_deps = 2.0 / (om * om) * s_series(z) + 2.0 / om * s_series_prime(z) * dz;
        4.0 * dphi_deps
    } else {
        (1.0 - 2.0 * q * phi_ii(q)) / (q * eps)
    }
}

/// Dimensionless circuit-II potential: `U_II = ħ(R/L)·F_II(q)`.
pub fn f_ii(q: f64) -> f64 {
    q * phi_ii(q) / (2.0 * PI)
}

/// `dF_II/dq`.
pub fn f_ii_prime(q: f64) -> f64 {
    (phi_ii(q) + q * phi_ii_prime(q)) / (2.0 * PI)
}

/// Dimensionless circuit-III potential: `U_III = ħ(R/L)·F_III(q)`.
pub fn f_iii(q: f64) -> f64 {
    let b = if (q - 4.0).abs() < 4.0 * SERIES_EPS {
        let u = 2.0 / q - 1.0;
        let w2 = 4.0 / q - 1.0;
        -2.0 * s_series(w2 / (u * u)) + 2.0 * q.ln()
    } else if q < 4.0 {
        let u = 2.0 / q - 1.0;
        let w = (4.0 / q - 1.0).sqrt();
        2.0 * u / w * w.atan2(-u) + 2.0 * q.ln()
    } else {
        // artanh form, rearranged to avoid cancelling ln q against ln(m − v).
        let m = 1.0 - 2.0 / q;
        let v = (1.0 - 4.0 / q).sqrt();
        let lead = -8.0 * q.ln() / (q * q * (m + v) * v);
        let arg = 0.5 * (-2.0 / q - (4.0 / q) / (1.0 + v));
        lead - 2.0 * (m / v) * arg.ln_1p()
    };
    q / (8.0 * PI) * b
}

fn check_positive(pairs: &[(&str, f64)]) -> Result<(), EnergyError> {
    for (name, v) in pairs {
        if !(v.is_finite() && *v > 0.0) {
            return Err(EnergyError::InvalidParameter(format!("{name} must be positive and finite, got {v}")));
        }
    }
    Ok(())
}

/// Circuit I: `−ħ/(2πRC)·ln(1 + C/C0)`.
pub fn closed_form_i(r: f64, c0: f64, c: f64) -> f64 {
    -HBAR / (2.0 * PI * r * c) * (c / c0).ln_1p()
}

/// `∂U_I/∂C`.
pub fn closed_form_i_dc(r: f64, c0: f64, c: f64) -> f64 {
    let x = c / c0;
    // ln(1+x) − x/(1+x), by series where the two terms cancel.
    let g = if x.abs() < 1e-2 {
        let mut sum = 0.0;
        let mut p = x * x;
        for k in 2..20 {
            let t = (k - 1) as f64 / k as f64 * p;
            sum += if k % 2 == 0 { t } else { -t };
            p *= x;
        }
        sum
    } else {
        x.ln_1p() - x / (1.0 + x)
    };
    HBAR / (2.0 * PI * r * c * c) * g
}

pub fn closed_form_ii(r: f64, l: f64, c: f64) -> f64 {
    HBAR * r / l * f_ii(l / (r * r * c))
}

/// `∂U_II/∂C`.
pub fn closed_form_ii_dc(r: f64, l: f64, c: f64) -> f64 {
    let q = l / (r * r * c);
    -HBAR * r / l * f_ii_prime(q) * q / c
}

pub fn closed_form_iii(r: f64, l: f64, c: f64) -> f64 {
    HBAR * r / l * f_iii(l / (r * r * c))
}

/// Dimensionless circuit-IV integral `I(r, a)` with
/// `U_IV = ħ/(R·C0)·r/(4π)·I`, `r = C0/C`, `a = √(L/C0)/R`.
pub fn f_iv(r: f64, a: f64, quad: &QuadratureConfig) -> Result<f64, EnergyError> {
    check_positive(&[("r", r), ("a", a)])?;
    let a2r = a * a * r;
    let integrand = |x: f64| {
        let num = x * (2.0 * a2r * (r + 1.0) - r * r - x * a2r * (2.0 * (a * a - 1.0) * r * r + a2r)) - 1.0;
        let p = 1.0 - a2r * x;
        let s = 1.0 - x * a2r * (r + 1.0);
        let den = (1.0 + x) * (r * r * x * p * p + s * s);
        num / den
    };
    let breaks = [1.0, 1.0 / a2r, 1.0 / (a2r * (r + 1.0))];
    Ok(integrate_semi_infinite(integrand, &breaks, quad)?.value)
}

/// Circuit IV, by direct quadrature of the dimensionless integral.
pub fn closed_form_iv(r: f64, l: f64, c0: f64, c: f64, quad: &QuadratureConfig) -> Result<f64, EnergyError> {
    check_positive(&[("R", r), ("L", l), ("C0", c0), ("C", c)])?;
    let ratio = c0 / c;
    let a = (l / c0).sqrt() / r;
    Ok(HBAR / (r * c0) * ratio / (4.0 * PI) * f_iv(ratio, a, quad)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn f_ii_at_one() {
        let expect = 1.0 / (3.0 * 3f64.sqrt()) / 1.0;
        // U_II(q=1) = ħ(R/L)/(3√3)
        assert!(rel(f_ii(1.0), expect) < 1e-14, "{}", f_ii(1.0));
    }

    #[test]
    fn printed_form_where_real() {
        for q in [0.3, 0.5, 2.0, 17.0, 1e3] {
            let t = (4.0 * q - 1.0_f64).sqrt();
            let printed = q / (4.0 * t) * (1.0 + 2.0 / PI * ((2.0 * q - 1.0) / t).atan());
            assert!(rel(f_ii(q), printed) < 1e-13);
        }
        for q in [0.01, 0.5, 1.0, 3.0, 3.9] {
            let w = (4.0 / q - 1.0_f64).sqrt();
            let u = 2.0 / q - 1.0;
            let printed = q / (8.0 * PI) * (2.0 * u / w * (u / w).atan() + PI * u / w + 2.0 * q.ln());
            assert!(rel(f_iii(q), printed) < 1e-12, "q={q}");
        }
    }

    #[test]
    fn continuous_across_branch_points() {
        for (f, q0) in [(f_ii as fn(f64) -> f64, 0.25), (f_iii, 4.0)] {
            for d in [1e-2, 2e-3, 9e-4, 1e-6, 1e-10] {
                let lo = f(q0 * (1.0 - d));
                let hi = f(q0 * (1.0 + d));
                let mid = f(q0);
                assert!(rel(lo, mid) < 5.0 * d && rel(hi, mid) < 5.0 * d, "q0={q0} d={d}");
            }
        }
    }

    #[test]
    fn isolated_lc_limits() {
        // ħ/(4√(LC)) = ħ(R/L)·√q/4
        assert!(rel(f_ii(1e8), 1e4 / 4.0) < 1e-3);
        assert!(rel(f_iii(1e-8), 1e-4 / 4.0) < 1e-3);
    }

    #[test]
    fn large_q_iii_expansion() {
        for q in [1e4_f64, 1e6, 1e9] {
            let approx = (1.0 - (q.ln() - 1.5) / q) / (2.0 * PI);
            assert!(rel(f_iii(q), approx) < 10.0 * (q.ln() / q).powi(2) + 1e-14, "q={q}");
        }
    }

    #[test]
    fn derivative_ii_matches_difference() {
        for q in [1e-3, 0.1, 0.2499, 0.25, 0.2501, 1.0, 30.0, 1e4] {
            let h = q * 1e-5;
            let fd = (f_ii(q + h) - f_ii(q - h)) / (2.0 * h);
            assert!(rel(f_ii_prime(q), fd) < 1e-7, "q={q}: {} vs {fd}", f_ii_prime(q));
        }
    }

    #[test]
    fn derivative_i_matches_difference() {
        let (r, c0, c) = (10.0, 31.3e-15, 20e-15);
        let h = c * 1e-5;
        let fd = (closed_form_i(r, c0, c + h) - closed_form_i(r, c0, c - h)) / (2.0 * h);
        assert!(rel(closed_form_i_dc(r, c0, c), fd) < 1e-8);
        for x in [0.0099_f64, 0.0101] {
            let direct = HBAR / (2.0 * PI * r) * (x.ln_1p() / (x * c0).powi(2) - 1.0 / (x * c0 * (x * c0 + c0)));
            assert!(rel(closed_form_i_dc(r, c0, x * c0), direct) < 1e-10);
        }
        // Small-C limit: (ħ/4πR)/C0².
        assert!(rel(closed_form_i_dc(r, c0, 1e-9 * c0), HBAR / (4.0 * PI * r * c0 * c0)) < 1e-8);
    }

    #[test]
    fn circuit_one_reference_value() {
        let c = 31.3e-15;
        let u = closed_form_i(10.0, c, c);
        assert!(rel(u, -HBAR / (2.0 * PI * 10.0 * c) * 2f64.ln()) < 1e-15);
        assert!((u + 3.72e-23).abs() < 0.01e-23, "{u:e}");
    }

    #[test]
    fn circuit_four_limits() {
        let q = QuadratureConfig::default();
        let (r, c) = (10.0, 1e-14);
        // L → ∞ disconnects the inductor: circuit I, up to the LC term ħ/(4√(LC)).
        for c0 in [3e-15, 1e-14, 4e-14] {
            let iv = closed_form_iv(r, 1.0, c0, c, &q).unwrap();
            assert!(rel(iv, closed_form_i(r, c0, c)) < 1e-5, "c0={c0}");
        }
        // C0 → ∞ shorts the capacitor: R parallel to L, circuit III.
        for l in [1e-13, 1e-12, 1e-11] {
            let iv = closed_form_iv(r, l, 1e-4, c, &q).unwrap();
            assert!(rel(iv, closed_form_iii(r, l, c)) < 1e-5, "l={l}");
        }
    }

    #[test]
    fn circuit_four_signs() {
        let q = QuadratureConfig::default();
        let rs = [0.01, 0.1, 1.0, 10.0, 100.0];
        // U_IV at fixed C0 as a function of C = C0/r.
        let u = |r: f64, a: f64| r * f_iv(r, a, &q).unwrap();
        for w in rs.windows(2) {
            assert!(u(w[1], 0.5) > u(w[0], 0.5));
            assert!(u(w[1], 2.0) < u(w[0], 2.0));
        }
    }
}
