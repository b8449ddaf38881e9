use crate::consts::HBAR;

/// Current-noise spectrum of a resistor `r` (A²·s) at angular frequency
/// `omega` and temperature `t_energy` (in joules, i.e. `k_B T`):
/// `(2ħω/R) / (1 − e^{−ħω/T})`. At `T = 0` this is `2ħω/R` for `ω > 0`
/// and zero otherwise; at `ω = 0` and `T > 0` it takes the limit `2T/R`.
pub fn noise_spectrum(r: f64, omega: f64, t_energy: f64) -> f64 {
    if t_energy <= 0.0 {
        return if omega > 0.0 { 2.0 * HBAR * omega / r } else { 0.0 };
    }
    let x = HBAR * omega / t_energy;
    if x == 0.0 {
        return 2.0 * t_energy / r;
    }
    // x / (1 − e^{−x}), stable for both signs and small |x|.
    let bose = x / -(-x).exp_m1();
    2.0 * t_energy / r * bose
}
