//! Special functions and the eigenvalue/coefficient machinery of the spectral
//! first-passage expansion for the standardized process dX = −X dt + dW.
//!
//! For an upper barrier b̃ the survival function is
//! F̄(t, x̃) = Σ_k c_k e^{−α_k t} φ_k(x̃), where the α_k are the zeros of
//! α ↦ H_α(−b̃) and c_k = −1/(α_k ∂_α φ(α_k, b̃)). Eigenfunctions are stored in
//! a normalised form (see [`EigenSystem::eigenfunction`]); the products
//! c_k φ_k(x) do not depend on that normalisation.

pub mod hermite;
mod reflected;
pub mod special;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

pub use hermite::{hermite_fn, hermite_fn_dalpha, hermite_scaled, hermite_scaled_dalpha};
pub use reflected::reflection_ratio;
pub use special::kummer_1f1;

use crate::error::{Error, Result};

/// Scan and bisection settings for eigenvalue bracketing.
#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    pub scan_step: f64,
    pub tol: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            scan_step: 0.05,
            tol: 1e-11,
        }
    }
}

/// Default upper end of the α scan.
pub const DEFAULT_ALPHA_MAX: f64 = 400.0;

/// Ordered eigenvalues and expansion coefficients for one standardized barrier.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub b_tilde: f64,
    /// Reflecting lower barrier; `None` means no reflection.
    pub a_tilde: Option<f64>,
    pub alphas: Vec<f64>,
    /// Coefficients paired with [`EigenSystem::eigenfunction`].
    pub coeffs: Vec<f64>,
}

impl EigenSystem {
    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    /// Normalised eigenfunction φ_k(x). Without reflection this is
    /// H_{α_k}(−x)/√(2^{α_k} Γ(α_k+3)); with reflection it is the entire-in-α
    /// form of the reflected solution (see [`reflection_ratio`]).
    pub fn eigenfunction(&self, k: usize, x: f64) -> Result<f64> {
        eigenfunction(self.a_tilde, self.alphas[k], x)
    }

    /// Coefficients c_k against the unnormalised H_{α_k}(−x), when representable.
    pub fn coeff_unscaled(&self, k: usize) -> Option<f64> {
        if self.a_tilde.is_some() {
            return None;
        }
        let v = self.coeffs[k] * (-hermite::ln_norm(self.alphas[k])).exp();
        (v.is_finite() && v != 0.0).then_some(v)
    }

    /// Products c_k φ_k(x) for every retained term.
    pub fn weighted_terms(&self, x: f64) -> Result<Vec<f64>> {
        (0..self.len())
            .map(|k| Ok(self.coeffs[k] * self.eigenfunction(k, x)?))
            .collect()
    }

    /// Raw truncated survival series Σ c_k e^{−α_k t} φ_k(x) (standardized time).
    pub fn survival_series(&self, x: f64, t: f64) -> Result<f64> {
        let w = self.weighted_terms(x)?;
        Ok(w.iter()
            .zip(&self.alphas)
            .map(|(w, a)| w * (-a * t).exp())
            .sum())
    }

    /// Raw truncated density series Σ c_k α_k e^{−α_k t} φ_k(x) (standardized time).
    pub fn density_series(&self, x: f64, t: f64) -> Result<f64> {
        let w = self.weighted_terms(x)?;
        Ok(w.iter()
            .zip(&self.alphas)
            .map(|(w, a)| w * a * (-a * t).exp())
            .sum())
    }

    /// N_k = ∫_{−∞}^b̃ 2e^{−y²} φ_k(y)² dy, from the Wronskian identity
    /// N_k = e^{−b̃²} φ_k′(b̃) ∂_α φ(α_k, b̃) with ∂_α φ = −1/(α_k c_k).
    pub fn norms(&self) -> Result<Vec<f64>> {
        if self.a_tilde.is_some() {
            return Err(crate::error::domain(
                "norms are implemented for the unreflected system only",
            ));
        }
        let b = self.b_tilde;
        self.alphas
            .iter()
            .zip(&self.coeffs)
            .map(|(&a, &c)| {
                let dphi = -2.0 * a * hermite_scaled(a - 1.0, -b)? / (2.0 * (a + 2.0)).sqrt();
                Ok(-(-b * b).exp() * dphi / (a * c))
            })
            .collect()
    }

    /// Truncated density of the process killed at b̃,
    /// Σ_k e^{−α_k t} φ_k(x) φ_k(y) 2e^{−y²} / N_k, for x, y below b̃.
    pub fn killed_density(&self, x: f64, y: f64, t: f64) -> Result<f64> {
        let norms = self.norms()?;
        let w = 2.0 * (-y * y).exp();
        let mut s = 0.0;
        for (k, n) in norms.iter().enumerate() {
            s += (-self.alphas[k] * t).exp()
                * self.eigenfunction(k, x)?
                * self.eigenfunction(k, y)?
                * w
                / n;
        }
        Ok(s)
    }

    /// Copy restricted to the first `k` terms.
    pub fn truncated(&self, k: usize) -> EigenSystem {
        let k = k.min(self.len());
        EigenSystem {
            b_tilde: self.b_tilde,
            a_tilde: self.a_tilde,
            alphas: self.alphas[..k].to_vec(),
            coeffs: self.coeffs[..k].to_vec(),
        }
    }
}

fn eigenfunction(a_tilde: Option<f64>, alpha: f64, x: f64) -> Result<f64> {
    match a_tilde {
        None => hermite_scaled(alpha, -x),
        Some(a) => reflected::phi(alpha, x, a),
    }
}

fn check_overflow_policy(b_tilde: f64, alpha: f64) -> Result<()> {
    if b_tilde > 5.0 && alpha >= 70.0 {
        return Err(Error::Overflow {
            context: format!("eigenvalues beyond alpha = 70 for barrier {b_tilde} > 5 are not resolvable in double precision"),
        });
    }
    Ok(())
}

/// Scans `f` on [0, alpha_max] and bisects each sign change.
fn scan_roots<F>(
    mut f: F,
    count: usize,
    alpha_max: f64,
    opts: RootOptions,
    guard: impl Fn(f64) -> Result<()>,
) -> Result<Vec<f64>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut roots = Vec::with_capacity(count.min(1024));
    let mut lo = 0.0;
    let mut f_lo = f(lo)?;
    while roots.len() < count {
        let hi = lo + opts.scan_step;
        if hi > alpha_max {
            if count == usize::MAX && !roots.is_empty() {
                return Ok(roots);
            }
            return Err(Error::NotEnoughRoots {
                found: roots.len(),
                requested: count,
                alpha_max,
            });
        }
        guard(hi)?;
        let f_hi = f(hi)?;
        if f_hi == 0.0 {
            roots.push(hi);
            lo = hi + 1e-9;
            f_lo = f(lo)?;
            continue;
        }
        if f_lo * f_hi < 0.0 {
            let (mut a, mut b, mut fa) = (lo, hi, f_lo);
            while b - a > opts.tol * b.min(1.0) {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let fm = f(m)?;
                if fm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if (fm < 0.0) == (fa < 0.0) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            roots.push(0.5 * (a + b));
        }
        lo = hi;
        f_lo = f_hi;
    }
    Ok(roots)
}

/// First `count` zeros of α ↦ H_α(−b̃) in (0, alpha_max].
pub fn find_eigenvalues(b_tilde: f64, count: usize, alpha_max: f64) -> Result<Vec<f64>> {
    find_eigenvalues_with(b_tilde, count, alpha_max, RootOptions::default())
}

pub fn find_eigenvalues_with(
    b_tilde: f64,
    count: usize,
    alpha_max: f64,
    opts: RootOptions,
) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(crate::error::domain("eigenvalue count must be positive"));
    }
    scan_roots(
        |a| hermite_scaled(a, -b_tilde),
        count,
        alpha_max,
        opts,
        |a| check_overflow_policy(b_tilde, a),
    )
}

fn coefficients(a_tilde: Option<f64>, b_tilde: f64, alphas: &[f64]) -> Result<Vec<f64>> {
    alphas
        .iter()
        .map(|&a| {
            let h = 1e-5 * a.max(1.0);
            let d = (eigenfunction(a_tilde, a + h, b_tilde)?
                - eigenfunction(a_tilde, a - h, b_tilde)?)
                / (2.0 * h);
            Ok(-1.0 / (a * d))
        })
        .collect()
}

/// Eigen system with `k` terms for the upper barrier b̃ (no reflection).
pub fn build_eigensystem(b_tilde: f64, k: usize) -> Result<EigenSystem> {
    build_eigensystem_with(b_tilde, k, DEFAULT_ALPHA_MAX, RootOptions::default())
}

pub fn build_eigensystem_with(
    b_tilde: f64,
    k: usize,
    alpha_max: f64,
    opts: RootOptions,
) -> Result<EigenSystem> {
    let alphas = find_eigenvalues_with(b_tilde, k, alpha_max, opts)?;
    let coeffs = coefficients(None, b_tilde, &alphas)?;
    Ok(EigenSystem {
        b_tilde,
        a_tilde: None,
        alphas,
        coeffs,
    })
}

/// Eigen system holding every eigenvalue below `alpha_max`.
pub fn build_eigensystem_below(b_tilde: f64, alpha_max: f64) -> Result<EigenSystem> {
    build_eigensystem_with(b_tilde, usize::MAX, alpha_max, RootOptions::default())
}

/// Eigen system with a reflecting lower barrier ã < b̃.
///
/// The coefficients use the derivative in α of the eigenfunction evaluated at
/// the barrier, which is what makes the series equal 1 at t = 0.
pub fn build_reflected_eigensystem(b_tilde: f64, a_tilde: f64, k: usize) -> Result<EigenSystem> {
    if !(a_tilde < b_tilde) {
        return Err(crate::error::domain(format!(
            "reflecting barrier {a_tilde} must lie below {b_tilde}"
        )));
    }
    // eigenvalues grow quadratically in k between two barriers, so the
    // search range is widened until k roots are found
    let mut alpha_max = DEFAULT_ALPHA_MAX;
    let alphas = loop {
        match scan_roots(
            |a| reflected::phi(a, b_tilde, a_tilde),
            k,
            alpha_max,
            RootOptions::default(),
            |a| check_overflow_policy(b_tilde, a),
        ) {
            Err(Error::NotEnoughRoots { .. }) if alpha_max < 16.0 * DEFAULT_ALPHA_MAX => {
                alpha_max *= 2.0
            }
            r => break r?,
        }
    };
    let coeffs = coefficients(Some(a_tilde), b_tilde, &alphas)?;
    Ok(EigenSystem {
        b_tilde,
        a_tilde: Some(a_tilde),
        alphas,
        coeffs,
    })
}

type CacheKey = (u64, u64, usize);

/// Shared cache of eigen systems keyed by (b̃, ã, K).
#[derive(Default)]
pub struct EigenCache {
    map: Mutex<HashMap<CacheKey, Arc<EigenSystem>>>,
}

impl EigenCache {
    pub fn get(&self, b_tilde: f64, k: usize) -> Result<Arc<EigenSystem>> {
        let key = (b_tilde.to_bits(), f64::NEG_INFINITY.to_bits(), k);
        if let Some(es) = self.map.lock().unwrap().get(&key) {
            return Ok(es.clone());
        }
        let es = Arc::new(build_eigensystem(b_tilde, k)?);
        self.map.lock().unwrap().insert(key, es.clone());
        Ok(es)
    }

    pub fn get_reflected(&self, b_tilde: f64, a_tilde: f64, k: usize) -> Result<Arc<EigenSystem>> {
        let key = (b_tilde.to_bits(), a_tilde.to_bits(), k);
        if let Some(es) = self.map.lock().unwrap().get(&key) {
            return Ok(es.clone());
        }
        let es = Arc::new(build_reflected_eigensystem(b_tilde, a_tilde, k)?);
        self.map.lock().unwrap().insert(key, es.clone());
        Ok(es)
    }
}

/// Process-wide cache used by the convenience entry points.
pub fn global_cache() -> &'static EigenCache {
    static CACHE: OnceLock<EigenCache> = OnceLock::new();
    CACHE.get_or_init(EigenCache::default)
}

/// Large-k approximation of the zero with 0-based index k,
/// α_k ≈ 2k + 1 + 4b²/π² − (2b/π)√(4k + 3 + 4b²/π²).
///
/// The root term enters with a minus sign for an upper barrier: the zeros
/// of α ↦ H_α(−b̃) move below the odd integers as b̃ grows. See
/// [`asymptotic_eigenvalue_plus`] for the variant with the opposite sign.
pub fn asymptotic_eigenvalue(b_tilde: f64, k: usize) -> f64 {
    let (base, root) = asymptotic_parts(b_tilde, k);
    base - root
}

/// The same expansion with +(2b/π)√(…), which tracks the zeros of α ↦ H_α(b̃).
pub fn asymptotic_eigenvalue_plus(b_tilde: f64, k: usize) -> f64 {
    let (base, root) = asymptotic_parts(b_tilde, k);
    base + root
}

fn asymptotic_parts(b_tilde: f64, k: usize) -> (f64, f64) {
    let c = 4.0 * b_tilde * b_tilde / (std::f64::consts::PI * std::f64::consts::PI);
    let k = k as f64;
    (
        2.0 * k + 1.0 + c,
        2.0 * b_tilde / std::f64::consts::PI * (4.0 * k + 3.0 + c).sqrt(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_barrier_gives_odd_integers() {
        let r = find_eigenvalues(0.0, 3, 20.0).unwrap();
        for (got, want) in r.iter().zip([1.0, 3.0, 5.0]) {
            assert!((got - want).abs() < 1e-9, "{got}");
        }
        let es = build_eigensystem(0.0, 2).unwrap();
        assert!((es.alphas[0] - 1.0).abs() < 1e-9 && (es.alphas[1] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn roots_are_zeros() {
        for &b in &[0.5, 1.5, 3.0] {
            let r = find_eigenvalues(b, 12, 80.0).unwrap();
            for a in r {
                let v = hermite_fn(a, -b).unwrap();
                let scale = hermite_fn_dalpha(a, -b, 1e-5 * a.max(1.0)).unwrap().abs();
                assert!(v.abs() < 1e-5 * scale.max(1.0), "b={b} alpha={a} H={v}");
            }
        }
    }

    #[test]
    fn not_enough_roots_reports_count() {
        match find_eigenvalues(1.0, 50, 10.0) {
            Err(Error::NotEnoughRoots {
                found, requested, ..
            }) => {
                assert_eq!(requested, 50);
                assert!(found >= 4 && found < 50);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn overflow_policy_for_far_barrier() {
        assert!(matches!(
            find_eigenvalues(5.5, 80, 400.0),
            Err(Error::Overflow { .. })
        ));
        let low = find_eigenvalues(5.5, 10, 400.0).unwrap();
        for (k, a) in low.iter().enumerate() {
            assert!((a - k as f64).abs() < 0.01, "{a}");
        }
    }

    #[test]
    fn survival_partial_sums_at_origin_time() {
        // partial sums of Σ c_k φ_k(0) for b = 1.5 from a 30-digit reference
        let es = build_eigensystem(1.5, 120).unwrap();
        let want = [
            (5, 0.979_233_856_267),
            (10, 1.005_592_237_52),
            (20, 0.985_674_752_155),
            (40, 0.996_815_855_697),
            (80, 0.992_206_551_843),
            (120, 0.993_443_719_308),
        ];
        for (k, w) in want {
            let s = es.truncated(k).survival_series(0.0, 0.0).unwrap();
            assert!((s - w).abs() < 2e-8, "k={k} s={s} want={w}");
        }
    }
}
