//! Hermite functions of real order.
//!
//! H_ν(x) = 2^ν √π [ M(−ν/2, ½, x²)/Γ((1−ν)/2) − 2x M((1−ν)/2, 3/2, x²)/Γ(−ν/2) ].
//!
//! The two-term form cancels badly for large positive x and overflows for
//! large ν, so internally we work with the normalised function
//! h_ν(x) = H_ν(x)/S(ν), S(ν) = √(2^ν Γ(ν+3)), and reach large orders with the
//! three-term recurrence H_{ν+1} = 2x H_ν − 2ν H_{ν−1} run in the direction in
//! which it is stable.

use std::f64::consts::{LN_2, PI};
use std::sync::OnceLock;

use super::special::{kummer_1f1, ln_gamma, rgamma_parts};
use crate::error::{domain, Error, Result};
use crate::quad::{gauss_legendre, integrate, Tolerance};

/// ln S(ν) for ν > −3.
pub fn ln_norm(nu: f64) -> f64 {
    0.5 * (nu * LN_2 + ln_gamma(nu + 3.0))
}

/// Two-term ₁F₁ combination, returned divided by S(ν).
fn direct_scaled(nu: f64, x: f64) -> Result<f64> {
    let z = x * x;
    let lpref = 0.5 * PI.ln() + nu * LN_2 - ln_norm(nu);
    let (s1, l1) = rgamma_parts(0.5 * (1.0 - nu));
    let (s2, l2) = rgamma_parts(-0.5 * nu);
    let t1 = if s1 == 0.0 {
        0.0
    } else {
        s1 * (lpref + l1).exp() * kummer_1f1(-0.5 * nu, 0.5, z)?
    };
    let t2 = if s2 == 0.0 || x == 0.0 {
        0.0
    } else {
        -2.0 * x * s2 * (lpref + l2).exp() * kummer_1f1(0.5 * (1.0 - nu), 1.5, z)?
    };
    Ok(t1 + t2)
}

/// Integral representation for negative order,
/// H_ν(x) = Γ(−ν)⁻¹ ∫₀^∞ e^{−t²−2tx} t^{−ν−1} dt, with a positive integrand.
fn integral_negative(nu: f64, x: f64) -> Result<f64> {
    let s = -nu;
    if s <= 0.0 {
        return Err(domain("integral representation needs negative order"));
    }
    let tol = Tolerance {
        abs: 0.0,
        rel: 1e-14,
        max_panels: 4000,
    };
    // t = v^{1/s} on [0, 1] removes the t^{s-1} edge behaviour
    let inv = 1.0 / s;
    let (head, _) = integrate(
        |v| {
            let t = v.powf(inv);
            (-t * t - 2.0 * t * x).exp()
        },
        &[0.0, 0.5, 0.9, 0.99, 1.0],
        tol,
    )?;
    let upper = 1.0 + (-x).max(0.0) + 9.0;
    let (tail, _) = integrate(
        |t| (-t * t - 2.0 * t * x + (s - 1.0) * t.ln()).exp(),
        &[1.0, 0.5 * (1.0 + upper), upper],
        tol,
    )?;
    let v = head * (-ln_gamma(s + 1.0)).exp() + tail * (-ln_gamma(s)).exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow {
            context: format!("H_{nu}({x}) integral"),
        })
    }
}

/// One forward step of the normalised recurrence: (h_{ν−1}, h_ν) at order ν → h_{ν+1}.
#[inline]
fn step(nu: f64, x: f64, h_prev: f64, h_cur: f64) -> f64 {
    (2.0 * x * h_cur - 2.0 * nu * h_prev / (2.0 * (nu + 2.0)).sqrt()) / (2.0 * (nu + 3.0)).sqrt()
}

/// The integral representation for x ≥ 2 and −2 ≤ ν < 0, rescaled by
/// u = 2xt: H_ν(x) = (2x)^ν/Γ(−ν) ∫₀^∞ u^{−ν−1} g(u) du with
/// g(u) = e^{−u − u²/(4x²)}. On [0, 1] the Taylor coefficients of g are
/// integrated termwise; the rest uses fixed Gauss–Legendre panels.
fn integral_negative_fast(nu: f64, x: f64) -> f64 {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    let (gx, gw) = RULE.get_or_init(|| gauss_legendre(20));
    let s = -nu;
    let c = 1.0 / (4.0 * x * x);
    // (m+1) g_{m+1} = −g_m − 2c g_{m−1}
    let (mut g_prev, mut g_cur) = (0.0, 1.0);
    let mut head = 1.0 / s;
    for m in 0..40 {
        let next = (-g_cur - 2.0 * c * g_prev) / (m as f64 + 1.0);
        g_prev = g_cur;
        g_cur = next;
        let term = g_cur / (s + m as f64 + 1.0);
        head += term;
        if term.abs() < 1e-18 * head.abs() && m > 4 {
            break;
        }
    }
    let mut tail = 0.0;
    for w in [1.0, 3.0, 8.0, 18.0, 42.0].windows(2) {
        let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
        for (xi, wi) in gx.iter().zip(gw) {
            let u = mid + half * xi;
            tail += half * wi * (-u - c * u * u + (s - 1.0) * u.ln()).exp();
        }
    }
    let (sg, lg) = rgamma_parts(s);
    sg * (lg + nu * (2.0 * x).ln()).exp() * (head + tail)
}

fn base_scaled(nu: f64, x: f64) -> Result<f64> {
    if x <= 2.0 {
        direct_scaled(nu, x)
    } else if nu >= -2.0 {
        Ok(integral_negative_fast(nu, x) * (-ln_norm(nu)).exp())
    } else {
        Ok(integral_negative(nu, x)? * (-ln_norm(nu)).exp())
    }
}

fn recur(mut nu: f64, target: f64, x: f64, mut prev: f64, mut cur: f64) -> f64 {
    while nu < target - 0.5 {
        let next = step(nu, x, prev, cur);
        prev = cur;
        cur = next;
        nu += 1.0;
    }
    cur
}

/// Normalised Hermite function h_ν(x) = H_ν(x)/√(2^ν Γ(ν+3)), ν > −3.
pub fn hermite_scaled(nu: f64, x: f64) -> Result<f64> {
    if !(nu.is_finite() && x.is_finite()) {
        return Err(domain("hermite arguments must be finite"));
    }
    if nu <= -3.0 {
        return Err(domain(format!(
            "normalised Hermite function needs order > -3, got {nu}"
        )));
    }
    if x >= 0.0 {
        if nu < 0.0 {
            return base_scaled(nu, x);
        }
        if nu <= 1.0 && x <= 2.0 {
            return direct_scaled(nu, x);
        }
        // upward recurrence from two negative orders; stable for x >= 0
        let frac = nu - nu.floor();
        let (a, b) = (frac - 2.0, frac - 1.0);
        let ha = base_scaled(a, x)?;
        let hb = base_scaled(b, x)?;
        return Ok(recur(b, nu, x, ha, hb));
    }
    // x < 0: H_ν is recessive under forward recurrence until ν exceeds ~2x²,
    // so start the recurrence only beyond that point
    let start = (2.0 * x * x).max(2.0);
    if nu <= start + 1.0 {
        return direct_scaled(nu, x);
    }
    let m = (nu - start).floor();
    let nu0 = nu - m;
    let h0 = direct_scaled(nu0 - 1.0, x)?;
    let h1 = direct_scaled(nu0, x)?;
    Ok(recur(nu0, nu, x, h0, h1))
}

/// Hermite function H_α(x) of real order.
pub fn hermite_fn(alpha: f64, x: f64) -> Result<f64> {
    if alpha < -2.0 {
        return integral_negative(alpha, x);
    }
    let h = hermite_scaled(alpha, x)?;
    if h == 0.0 {
        return Ok(0.0);
    }
    let ln = h.abs().ln() + ln_norm(alpha);
    if ln > 709.0 {
        return Err(Error::Overflow {
            context: format!("H_{alpha}({x})"),
        });
    }
    Ok(h.signum() * ln.exp())
}

/// Central difference (H_{α+h}(x) − H_{α−h}(x)) / (2h).
pub fn hermite_fn_dalpha(alpha: f64, x: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(domain("finite-difference step must be positive"));
    }
    Ok((hermite_fn(alpha + h, x)? - hermite_fn(alpha - h, x)?) / (2.0 * h))
}

/// ∂_α h_α(x) of the normalised function by central differences with step
/// 1e-5·max(1, α).
pub fn hermite_scaled_dalpha(alpha: f64, x: f64) -> Result<f64> {
    let h = 1e-5 * alpha.abs().max(1.0);
    Ok((hermite_scaled(alpha + h, x)? - hermite_scaled(alpha - h, x)?) / (2.0 * h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn poly(n: usize, x: f64) -> f64 {
        let (mut a, mut b) = (1.0, 2.0 * x);
        if n == 0 {
            return a;
        }
        for k in 1..n {
            let c = 2.0 * x * b - 2.0 * k as f64 * a;
            a = b;
            b = c;
        }
        b
    }

    #[test]
    fn spec_examples() {
        assert_relative_eq!(hermite_fn(0.0, 1.3).unwrap(), 1.0, max_relative = 1e-13);
        assert_relative_eq!(hermite_fn(1.0, 0.5).unwrap(), 1.0, max_relative = 1e-13);
        let want = 2f64.powf(2.5) * PI.sqrt() * super::super::special::rgamma(-0.75);
        assert_relative_eq!(hermite_fn(2.5, 0.0).unwrap(), want, max_relative = 1e-13);
    }

    #[test]
    fn integer_orders_are_polynomials() {
        for n in 0..12 {
            for &x in &[-3.2, -1.0, -0.3, 0.0, 0.4, 1.7, 2.5, 4.5] {
                let want = poly(n, x);
                let got = hermite_fn(n as f64, x).unwrap();
                assert!(
                    (got - want).abs() <= 1e-10 * want.abs().max(1.0) * (1.0 + 2f64.powi(n as i32)),
                    "n={n} x={x} got={got} want={want}"
                );
            }
        }
    }

    #[test]
    fn negative_order_closed_form() {
        // H_{-1}(x) = (√π/2) e^{x²} erfc(x), reference values to 17 digits
        let cases = [
            (-2.0, 96.546_362_753_573_047),
            (-0.5, 1.730_234_433_703_700_2),
            (0.0, 0.886_226_925_452_758_01),
            (1.0, 0.378_936_078_070_656_05),
            (3.0, 0.158_635_639_863_987_54),
            (5.0, 0.098_109_430_731_538_791),
        ];
        for (x, want) in cases {
            assert_relative_eq!(hermite_fn(-1.0, x).unwrap(), want, max_relative = 1e-12);
            assert_relative_eq!(
                integral_negative(-1.0, x).unwrap(),
                want,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn fixed_rule_negative_orders() {
        // 2^ν U(−ν/2, ½, x²) at 30 digits
        let cases = [
            (-1e-6, 2.0, 0.99999855982453233),
            (-1e-6, 3.9, 0.99999793017601838),
            (-1e-6, 7.5, 0.99999728756660927),
            (-0.3, 2.0, 0.64637626065087866),
            (-0.3, 3.9, 0.53670416200787382),
            (-0.3, 7.5, 0.44302833331132915),
            (-0.999, 2.0, 0.22668463022267954),
            (-0.999, 3.9, 0.12461149933122158),
            (-0.999, 7.5, 0.06626928981505934),
            (-1.5, 2.0, 0.10442666711915831),
            (-1.5, 3.9, 0.04338417827103719),
            (-1.5, 7.5, 0.016935915570774257),
            (-2.0, 2.0, 0.047322950018825421),
            (-2.0, 3.9, 0.015034197546143082),
            (-2.0, 7.5, 0.0043308895792184632),
        ];
        for (nu, x, want) in cases {
            assert_relative_eq!(integral_negative_fast(nu, x), want, max_relative = 1e-13);
        }
    }

    #[test]
    fn recurrence_matches_direct_where_both_are_accurate() {
        for &nu in &[0.3, 2.7, 7.45, 15.2] {
            for &x in &[0.2, 1.1, 1.9] {
                let d = direct_scaled(nu, x).unwrap();
                let r = hermite_scaled(nu, x).unwrap();
                assert!(
                    (d - r).abs() < 1e-10 * d.abs().max(1e-3),
                    "nu={nu} x={x} {d} {r}"
                );
            }
        }
    }

    #[test]
    fn continuous_across_path_switches() {
        for &x in &[-2.0, -0.7, 0.5, 2.0, 3.5] {
            for &nu in &[0.999_999_9, 1.000_000_1, 8.0 - 1e-9, 8.0 + 1e-9] {
                let a = hermite_scaled(nu, x).unwrap();
                let b = hermite_scaled(nu + 1e-7, x).unwrap();
                assert!((a - b).abs() < 1e-5 * a.abs().max(1e-3), "x={x} nu={nu}");
            }
        }
    }
}
