//! Eigenfunctions with a reflecting lower barrier ã.
//!
//! The solution of φ'' − 2xφ' + 2αφ = 0 with φ'(ã) = 0 is
//! φ ∝ M(−α/2, ½, x²) + y(α, ã) x M((1−α)/2, 3/2, x²). Multiplying through by
//! the denominator of y gives a form that is entire in α, which keeps root
//! scanning free of spurious sign changes at the poles of y.

use super::special::kummer_1f1;
use crate::error::Result;

fn num_den(alpha: f64, a: f64) -> Result<(f64, f64)> {
    let a2 = a * a;
    let num = 2.0 * alpha * a * kummer_1f1(1.0 - 0.5 * alpha, 1.5, a2)?;
    let den = kummer_1f1(0.5 * (1.0 - alpha), 1.5, a2)?
        + (2.0 / 3.0) * (1.0 - alpha) * a2 * kummer_1f1(0.5 * (3.0 - alpha), 2.5, a2)?;
    Ok((num, den))
}

/// y(α, ã), the weight of the odd solution that enforces reflection at ã.
pub fn reflection_ratio(alpha: f64, a_tilde: f64) -> Result<f64> {
    let (n, d) = num_den(alpha, a_tilde)?;
    Ok(n / d)
}

/// Reflected eigenfunction in the pole-free normalisation.
pub(super) fn phi(alpha: f64, x: f64, a_tilde: f64) -> Result<f64> {
    let (n, d) = num_den(alpha, a_tilde)?;
    let x2 = x * x;
    let even = kummer_1f1(-0.5 * alpha, 0.5, x2)?;
    let odd = if x == 0.0 {
        0.0
    } else {
        x * kummer_1f1(0.5 * (1.0 - alpha), 1.5, x2)?
    };
    Ok(d * even + n * odd)
}
