//! First-passage time of a homogeneous OU process through an upper barrier:
//! survival function, density, truncation control and hazard rate.
//!
//! Everything is evaluated on the standardized problem (see [`standardize`])
//! with eigen systems taken from the process-wide cache.

use crate::eigen::special::{erfcx, exp_int_e1};
use crate::eigen::{self, EigenSystem};
use crate::error::{domain, Result};
use crate::prob::{Density, ErrKind, ProbResult};

/// Parameters of dX = (μ − λX) dt + σ dW.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuParams {
    pub mu: f64,
    pub lambda: f64,
    pub sigma: f64,
}

impl OuParams {
    pub fn new(mu: f64, lambda: f64, sigma: f64) -> Result<Self> {
        let p = Self { mu, lambda, sigma };
        p.validate()?;
        Ok(p)
    }

    /// The standardized process dX = −X dt + dW.
    pub fn standard() -> Self {
        Self {
            mu: 0.0,
            lambda: 1.0,
            sigma: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.sigma > 0.0 && self.mu.is_finite()) {
            return Err(domain(format!(
                "need lambda > 0 and sigma > 0, got {self:?}"
            )));
        }
        Ok(())
    }

    /// Long-run mean μ/λ.
    pub fn mean_level(&self) -> f64 {
        self.mu / self.lambda
    }

    /// Maps a state to standardized units.
    pub fn standardize_state(&self, x: f64) -> f64 {
        self.lambda.sqrt() / self.sigma * (x - self.mean_level())
    }
}

/// A first-passage problem in standardized units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardizedProblem {
    pub x_tilde: f64,
    pub b_tilde: f64,
    /// λ; standardized time is λt.
    pub time_scale: f64,
}

pub fn standardize(params: &OuParams, x: f64, b: f64) -> StandardizedProblem {
    StandardizedProblem {
        x_tilde: params.standardize_state(x),
        b_tilde: params.standardize_state(b),
        time_scale: params.lambda,
    }
}

/// Survival probability P(τ > t) for the standardized problem, from an
/// explicit eigen system. `t_tilde` is standardized time.
pub fn survival_standardized(es: &EigenSystem, x_tilde: f64, t_tilde: f64) -> Result<ProbResult> {
    if t_tilde <= 0.0 {
        return Ok(ProbResult::exact(1.0, ErrKind::Bound));
    }
    if x_tilde >= es.b_tilde {
        return Ok(ProbResult::exact(0.0, ErrKind::Bound));
    }
    let raw = es.survival_series(x_tilde, t_tilde)?;
    let err = if es.a_tilde.is_none() && es.b_tilde != 0.0 {
        truncation_error_bound(
            x_tilde,
            es.b_tilde,
            1.0,
            t_tilde,
            *es.alphas.last().unwrap(),
        )?
    } else {
        f64::NAN
    };
    Ok(ProbResult::clamp(raw, err, ErrKind::Bound))
}

/// P(τ_b > t | X_0 = x) with `k` expansion terms. The error field is the
/// analytic truncation bound.
pub fn fpt_survival(params: &OuParams, x: f64, b: f64, t: f64, k: usize) -> Result<ProbResult> {
    params.validate()?;
    if t < 0.0 {
        return Err(domain(format!("time must be non-negative, got {t}")));
    }
    let sp = standardize(params, x, b);
    if t == 0.0 {
        return Ok(ProbResult::exact(1.0, ErrKind::Bound));
    }
    if sp.x_tilde >= sp.b_tilde {
        return Ok(ProbResult::exact(0.0, ErrKind::Bound));
    }
    let es = eigen::global_cache().get(sp.b_tilde, k)?;
    survival_standardized(&es, sp.x_tilde, sp.time_scale * t)
}

fn density_from(es: &EigenSystem, x_tilde: f64, t_tilde: f64, scale: f64) -> Result<Density> {
    let mut s = 0.0;
    for (k, (&a, &c)) in es.alphas.iter().zip(&es.coeffs).enumerate() {
        s += c * a * (-a * t_tilde).exp() * es.eigenfunction(k, x_tilde)?;
    }
    Ok(Density::clamp(scale * s))
}

/// First-passage density −∂_t P(τ > t) by term-wise differentiation.
pub fn fpt_density(params: &OuParams, x: f64, b: f64, t: f64, k: usize) -> Result<Density> {
    params.validate()?;
    if !(t > 0.0) {
        return Err(domain(format!("density needs t > 0, got {t}")));
    }
    let sp = standardize(params, x, b);
    if sp.x_tilde >= sp.b_tilde {
        return Err(domain("density needs the start below the barrier"));
    }
    let es = eigen::global_cache().get(sp.b_tilde, k)?;
    density_from(&es, sp.x_tilde, sp.time_scale * t, sp.time_scale)
}

/// Density of the first passage through b̃ for the standardized process
/// reflected at ã < x̃.
pub fn fpt_density_reflected(
    x_tilde: f64,
    b_tilde: f64,
    a_tilde: f64,
    t: f64,
    k: usize,
) -> Result<Density> {
    if !(a_tilde < x_tilde && x_tilde < b_tilde) {
        return Err(domain(format!(
            "need a < x < b, got a={a_tilde}, x={x_tilde}, b={b_tilde}"
        )));
    }
    if !(t > 0.0) {
        return Err(domain(format!("density needs t > 0, got {t}")));
    }
    let es = eigen::global_cache().get_reflected(b_tilde, a_tilde, k)?;
    density_from(&es, x_tilde, t, 1.0)
}

/// Survival with reflection at ã.
pub fn fpt_survival_reflected(
    x_tilde: f64,
    b_tilde: f64,
    a_tilde: f64,
    t: f64,
    k: usize,
) -> Result<ProbResult> {
    if !(a_tilde < x_tilde) {
        return Err(domain("start must lie above the reflecting barrier"));
    }
    let es = eigen::global_cache().get_reflected(b_tilde, a_tilde, k)?;
    survival_standardized(&es, x_tilde, t)
}

/// Upper bound on the truncation error after the term with eigenvalue α_K:
/// e^{(x²−b²)/2}/(√2|b|) · [e^{−λtα_K}/α_K + (1−λt) E₁(λtα_K)].
pub fn truncation_error_bound(
    x_tilde: f64,
    b_tilde: f64,
    lambda: f64,
    t: f64,
    alpha_k: f64,
) -> Result<f64> {
    if b_tilde == 0.0 {
        return Err(domain(
            "truncation bound is undefined for a barrier at the mean level",
        ));
    }
    if !(alpha_k > 0.0 && t > 0.0 && lambda > 0.0) {
        return Err(domain(
            "truncation bound needs alpha_K, t and lambda positive",
        ));
    }
    let u = lambda * t * alpha_k;
    let pref = (0.5 * (x_tilde * x_tilde - b_tilde * b_tilde)).exp()
        / (std::f64::consts::SQRT_2 * b_tilde.abs());
    Ok(pref * ((-u).exp() / alpha_k + (1.0 - lambda * t) * exp_int_e1(u)?))
}

/// Mean first-passage time of the standardized process from x̃ to b̃,
/// √π ∫_x̃^b̃ e^{y²}(1 + erf y) dy, which also equals Σ_k c_k φ_k(x̃)/α_k.
pub fn mean_fpt_standardized(x_tilde: f64, b_tilde: f64) -> Result<f64> {
    if x_tilde >= b_tilde {
        return Ok(0.0);
    }
    let n = ((b_tilde - x_tilde).ceil() as usize).max(2);
    let breaks: Vec<f64> = (0..=n)
        .map(|i| x_tilde + (b_tilde - x_tilde) * i as f64 / n as f64)
        .collect();
    let tol = crate::quad::Tolerance {
        abs: 1e-14,
        rel: 1e-12,
        max_panels: 2000,
    };
    let (v, _) = crate::quad::integrate(|y| erfcx(-y), &breaks, tol)?;
    Ok(std::f64::consts::PI.sqrt() * v)
}

/// Hazard rate −∂_t F̄ / F̄ from the truncated series.
pub fn hazard_rate(params: &OuParams, x: f64, b: f64, t: f64, k: usize) -> Result<f64> {
    params.validate()?;
    if !(t > 0.0) {
        return Err(domain("hazard rate needs t > 0"));
    }
    let sp = standardize(params, x, b);
    if sp.x_tilde >= sp.b_tilde {
        return Err(domain("hazard rate needs the start below the barrier"));
    }
    let es = eigen::global_cache().get(sp.b_tilde, k)?;
    let tt = sp.time_scale * t;
    let (mut num, mut den) = (0.0, 0.0);
    // factor out e^{−α_1 t} so that long horizons do not underflow
    let a1 = es.alphas[0];
    for (j, (&a, &c)) in es.alphas.iter().zip(&es.coeffs).enumerate() {
        let w = c * (-(a - a1) * tt).exp() * es.eigenfunction(j, sp.x_tilde)?;
        num += a * w;
        den += w;
    }
    Ok(sp.time_scale * num / den)
}

/// Standardized time at which the survival function of `es` (first `n`
/// terms) falls to `level`, by bisection on [1e-8, 50], the upper end being
/// doubled while the series is still above `level` there. `None` when the
/// truncated series does not cross `level`.
fn quantile_time(es: &EigenSystem, w: &[f64], n: usize, level: f64) -> Result<Option<f64>> {
    let f = |t: f64| -> Result<f64> {
        let s: f64 = (0..n).map(|j| w[j] * (-es.alphas[j] * t).exp()).sum();
        Ok(s - level)
    };
    let (mut lo, mut hi) = (1e-8, 50.0);
    if !(f(lo)? > 0.0) {
        return Ok(None);
    }
    while f(hi)? >= 0.0 {
        if hi > 1e9 {
            return Ok(None);
        }
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm.abs() < 1e-8 || hi - lo < 1e-14 {
            return Ok(Some(mid));
        }
        if fm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Smallest number of terms whose FPT quantile of order `quantile` lies
/// within relative `rel_tol` of the quantile computed with every eigenvalue
/// below `alpha_max`.
pub fn select_truncation(
    x_tilde: f64,
    b_tilde: f64,
    quantile: f64,
    rel_tol: f64,
    alpha_max: f64,
) -> Result<usize> {
    if !(quantile > 0.0 && quantile < 1.0) {
        return Err(domain(format!(
            "quantile must lie in (0, 1), got {quantile}"
        )));
    }
    if !(rel_tol > 0.0) {
        return Err(domain("relative tolerance must be positive"));
    }
    if x_tilde >= b_tilde {
        return Err(domain("start must lie below the barrier"));
    }
    let es = eigen::build_eigensystem_below(b_tilde, alpha_max)?;
    let level = 1.0 - quantile;
    let w = es.weighted_terms(x_tilde)?;
    let q = quantile_time(&es, &w, es.len(), level)?
        .ok_or_else(|| crate::Error::NoConvergence("reference quantile not bracketed".into()))?;
    for n in 1..=es.len() {
        if let Some(qn) = quantile_time(&es, &w, n, level)? {
            if (qn - q).abs() <= rel_tol * q {
                return Ok(n);
            }
        }
    }
    Ok(es.len())
}

/// Default number of terms: the median-quantile rule with 5% tolerance,
/// but never fewer than 8.
pub fn default_truncation(x_tilde: f64, b_tilde: f64) -> Result<usize> {
    Ok(select_truncation(x_tilde, b_tilde, 0.5, 0.05, 200.0)?.max(8))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_passage_time() {
        // mpmath quadrature of the defining integral
        assert!((mean_fpt_standardized(0.0, 1.0).unwrap() - 4.0377283329552076).abs() < 1e-10);
        assert!((mean_fpt_standardized(-2.0, 3.0).unwrap() - 5120.4017482439036).abs() < 1e-7);
        let es = eigen::build_eigensystem(1.0, 150).unwrap();
        let w = es.weighted_terms(-0.5).unwrap();
        let s: f64 = w.iter().zip(&es.alphas).map(|(w, a)| w / a).sum();
        assert!((s - mean_fpt_standardized(-0.5, 1.0).unwrap()).abs() < 1e-3);
    }

    #[test]
    fn standardization_examples() {
        let s = standardize(&OuParams::standard(), 0.3, 1.5);
        assert_eq!((s.x_tilde, s.b_tilde, s.time_scale), (0.3, 1.5, 1.0));
        let s = standardize(&OuParams::new(1.0, 1.0, 1.0).unwrap(), 1.0, 2.0);
        assert_eq!((s.x_tilde, s.b_tilde), (0.0, 1.0));
        let s = standardize(&OuParams::new(0.0, 4.0, 2.0).unwrap(), 0.0, 1.0);
        assert_eq!((s.x_tilde, s.b_tilde, s.time_scale), (0.0, 1.0, 4.0));
    }

    #[test]
    fn boundary_values() {
        let p = OuParams::standard();
        assert_eq!(fpt_survival(&p, 0.0, 1.5, 0.0, 10).unwrap().prob, 1.0);
        assert_eq!(fpt_survival(&p, 1.5, 1.5, 0.3, 10).unwrap().prob, 0.0);
        assert!(OuParams::new(0.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn bound_is_nonincreasing_for_long_horizons() {
        let mut prev = f64::INFINITY;
        for a in [1.0, 2.0, 5.0, 10.0, 40.0] {
            let e = truncation_error_bound(0.0, 1.5, 1.0, 1.5, a).unwrap();
            assert!(e <= prev && e > 0.0);
            prev = e;
        }
        assert!(truncation_error_bound(0.0, 0.0, 1.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn hazard_time_change() {
        let slow = OuParams::standard();
        let fast = OuParams::new(0.0, 2.0, 2f64.sqrt()).unwrap();
        let h1 = hazard_rate(&slow, 0.0, 1.0, 1.4, 30).unwrap();
        let h2 = hazard_rate(&fast, 0.0, 1.0, 0.7, 30).unwrap();
        assert!((h2 - 2.0 * h1).abs() < 1e-10 * h1);
    }

    #[test]
    fn far_barrier_needs_few_terms() {
        let far = select_truncation(-2.0, 3.0, 0.5, 0.05, 120.0).unwrap();
        let near = select_truncation(1.2, 1.5, 0.5, 0.05, 120.0).unwrap();
        assert!(far <= 5, "{far}");
        assert!(near > far, "{near} {far}");
    }
}
