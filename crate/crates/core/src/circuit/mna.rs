//! Dense complex nodal-admittance assembly and LU solve.

use num_complex::Complex64;

/// Adds admittance `y` between nodes `a` and `b`; `None` is the reference node.
pub(super) fn stamp(m: &mut [Complex64], n: usize, a: Option<usize>, b: Option<usize>, y: Complex64) {
    if let Some(i) = a {
        m[i * n + i] += y;
    }
    if let Some(j) = b {
        m[j * n + j] += y;
    }
    if let (Some(i), Some(j)) = (a, b) {
        m[i * n + j] -= y;
        m[j * n + i] -= y;
    }
}

#[derive(Debug)]
pub(super) struct Singular;

/// Solves `m x = rhs` in place (Gaussian elimination, partial pivoting).
pub(super) fn solve_dense(m: &mut [Complex64], n: usize, rhs: &mut [Complex64]) -> Result<(), Singular> {
    let scale = m.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Singular);
    }
    let tiny = (n as f64) * f64::EPSILON * scale;
    for k in 0..n {
        let (p, pmax) = (k..n)
            .map(|r| (r, m[r * n + k].norm()))
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if !(pmax > tiny) {
            return Err(Singular);
        }
        if p != k {
            for c in 0..n {
                m.swap(k * n + c, p * n + c);
            }
            rhs.swap(k, p);
        }
        let pivot = m[k * n + k];
        for r in (k + 1)..n {
            let f = m[r * n + k] / pivot;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for c in (k + 1)..n {
                let t = m[k * n + c];
                m[r * n + c] -= f * t;
            }
            let t = rhs[k];
            rhs[r] -= f * t;
        }
    }
    for k in (0..n).rev() {
        let mut s = rhs[k];
        for c in (k + 1)..n {
            s -= m[k * n + c] * rhs[c];
        }
        rhs[k] = s / m[k * n + k];
    }
    if rhs.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Singular)
    }
}
