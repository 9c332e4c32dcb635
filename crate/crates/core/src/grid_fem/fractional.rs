//! Closed-form Gagliardo stiffness entries for P1 hats on a uniform grid.
//!
//! For hats extended by zero to the real line,
//!
//! ```text
//! A_jk = ∫∫ (φ_j(x) − φ_j(y)) (φ_k(x) − φ_k(y)) |x − y|^(−1−2s) dx dy
//!      = h^(1−2s) a_|j−k|(s),
//! ```
//!
//! where, with `e = 1 − 2s` and `q(m) = m² (|m|^e − 1) / e` (`m² ln|m|` at `e = 0`),
//!
//! ```text
//! a_d(s) = Δ⁴q(d) / (s (2 − 2s) (3 − 2s)),   Δ⁴q(d) = Σ_k (1, −4, 6, −4, 1)_k q(d + k − 2).
//! ```
//!
//! The expression comes from integrating the kernel twice against the
//! piecewise-constant hat derivatives; the `m²` part of `q` is annihilated by
//! the fourth difference, which keeps `s = 1/2` finite without a separate
//! logarithmic formula. For large `d` the fourth difference cancels badly, so it
//! is summed from its binomial expansion in `1/d` instead.

use crate::error::{Error, Result};

/// Offsets at or above this use the asymptotic series.
const SERIES_FROM: usize = 8;

/// Entries `a_0, …, a_{len−1}` of the symmetric Toeplitz stiffness for spacing `h`.
pub fn gagliardo_toeplitz_column(h: f64, s: f64, len: usize) -> Result<Vec<f64>> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::OrderOutOfRange(s));
    }
    let scale = h.powf(1.0 - 2.0 * s);
    Ok((0..len).map(|d| scale * unit_entry(d, s)).collect())
}

/// Entry at offset `d` for unit spacing.
pub fn unit_entry(d: usize, s: f64) -> f64 {
    let fourth = if d >= SERIES_FROM {
        fourth_difference_series(d as f64, s)
    } else {
        fourth_difference_direct(d as f64, 1.0 - 2.0 * s)
    };
    fourth / (s * (2.0 - 2.0 * s) * (3.0 - 2.0 * s))
}

fn q(m: f64, e: f64) -> f64 {
    if m == 0.0 {
        return 0.0;
    }
    let l = m.abs().ln();
    if e == 0.0 {
        m * m * l
    } else {
        m * m * (e * l).exp_m1() / e
    }
}

fn fourth_difference_direct(d: f64, e: f64) -> f64 {
    q(d - 2.0, e) - 4.0 * q(d - 1.0, e) + 6.0 * q(d, e) - 4.0 * q(d + 1.0, e) + q(d + 2.0, e)
}

/// `Δ⁴q(m)` from `(m + k)^p = m^p Σ_n C(p, n) (k/m)^n` with `p = 3 − 2s`.
///
/// The stencil moments `Σ_k w_k k^n` vanish for `n < 4` and odd `n`, and equal
/// `2^(n+1) − 8` otherwise. The factor `(p − 2) = e` of every surviving
/// binomial coefficient is divided out analytically.
fn fourth_difference_series(m: f64, s: f64) -> f64 {
    let p = 3.0 - 2.0 * s;
    let inv_m2 = 1.0 / (m * m);
    // coeff = Π_{k<n, k≠2} (p − k) / n!
    let mut coeff = 1.0;
    let mut k = 0usize;
    let mut advance = |coeff: &mut f64, upto: usize| {
        while k < upto {
            if k != 2 {
                *coeff *= p - k as f64;
            }
            *coeff /= (k + 1) as f64;
            k += 1;
        }
    };
    advance(&mut coeff, 4);
    let mut m_pow = inv_m2 * inv_m2;
    let mut sum = 0.0;
    let mut n = 4usize;
    while n < 400 {
        let moment = 2.0_f64.powi(n as i32 + 1) - 8.0;
        let term = coeff * moment * m_pow;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
        advance(&mut coeff, n + 2);
        m_pow *= inv_m2;
        n += 2;
    }
    m.powf(p) * sum
}
