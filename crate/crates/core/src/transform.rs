//! Time-inhomogeneous OU processes dY = (μ(t) − λ(t)Y) dt + σ(t) dW.
//!
//! The map X̃_t = α(t) Y_{γ(t)} − β(t) turns Y into the standardized process
//! when (α, β, γ) solve
//!
//!   σ(γ) α √γ′ = 1,   λ(γ) γ′ − α′/α = 1,   β′ + β − α μ(γ) γ′ = 0,
//!
//! and a barrier b(t) for Y becomes g(t) = α(t) b(γ(t)) − β(t) for X̃, read
//! on the clock t = γ⁻¹(s).

use std::fmt;
use std::sync::Arc;

use crate::crossing::{
    joint_distribution_quadrature, Direction, Grid, JointProblem, KernelSettings,
};
use crate::error::{domain, Error, Result};
use crate::prob::ProbResult;
use crate::quad::{integrate, Tolerance};

const RESIDUAL_TOL: f64 = 1e-6;

/// How a parameter function may be treated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FnKind {
    Constant(f64),
    /// At least C².
    Smooth,
    /// Piecewise constant or otherwise non-differentiable.
    Piecewise,
}

/// A real function of time with its smoothness tag.
#[derive(Clone)]
pub struct TimeFunction {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub kind: FnKind,
}

impl fmt::Debug for TimeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TimeFunction")
            .field("kind", &self.kind)
            .finish_non_exhaustive()
    }
}

impl TimeFunction {
    pub fn constant(v: f64) -> Self {
        Self {
            f: Arc::new(move |_| v),
            kind: FnKind::Constant(v),
        }
    }

    pub fn smooth(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            f: Arc::new(f),
            kind: FnKind::Smooth,
        }
    }

    pub fn piecewise(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            f: Arc::new(f),
            kind: FnKind::Piecewise,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn is_smooth(&self) -> bool {
        !matches!(self.kind, FnKind::Piecewise)
    }

    pub fn constant_value(&self) -> Option<f64> {
        match self.kind {
            FnKind::Constant(v) => Some(v),
            _ => None,
        }
    }

    /// Central-difference first derivative; exact zero for constants.
    pub fn derivative(&self, t: f64) -> f64 {
        if self.constant_value().is_some() {
            return 0.0;
        }
        let h = 1e-5 * t.abs().max(1.0);
        (self.eval(t + h) - self.eval(t - h)) / (2.0 * h)
    }

    fn second_derivative(&self, t: f64) -> f64 {
        if self.constant_value().is_some() {
            return 0.0;
        }
        let h = 1e-3 * t.abs().max(1.0);
        (self.eval(t + h) - 2.0 * self.eval(t) + self.eval(t - h)) / (h * h)
    }
}

/// μ(t), λ(t), σ(t) of an inhomogeneous OU process. λ and σ must be positive
/// on the working horizon, and the coefficients should grow at most
/// linearly; neither is checked here.
#[derive(Debug, Clone)]
pub struct TimeFunctions {
    pub mu: TimeFunction,
    pub lambda: TimeFunction,
    pub sigma: TimeFunction,
}

impl TimeFunctions {
    pub fn constant(mu: f64, lambda: f64, sigma: f64) -> Self {
        Self {
            mu: TimeFunction::constant(mu),
            lambda: TimeFunction::constant(lambda),
            sigma: TimeFunction::constant(sigma),
        }
    }

    /// μ(t) = A sin(θt + φ) with constant λ and σ.
    pub fn seasonal(amplitude: f64, theta: f64, phase: f64, lambda: f64, sigma: f64) -> Self {
        Self {
            mu: TimeFunction::smooth(move |t| amplitude * (theta * t + phase).sin()),
            lambda: TimeFunction::constant(lambda),
            sigma: TimeFunction::constant(sigma),
        }
    }

    pub fn is_smooth(&self) -> bool {
        self.mu.is_smooth() && self.lambda.is_smooth() && self.sigma.is_smooth()
    }

    /// α₀ = √λ(0)/σ(0), which makes γ′(0) = 1/λ(0).
    pub fn default_alpha0(&self) -> f64 {
        self.lambda.eval(0.0).sqrt() / self.sigma.eval(0.0)
    }

    /// β₀ = α₀ μ(0)/λ(0), the shift of the homogeneous standardization at
    /// t = 0; with constant coefficients it keeps β constant.
    pub fn default_beta0(&self) -> f64 {
        self.default_alpha0() * self.mu.eval(0.0) / self.lambda.eval(0.0)
    }
}

/// β₀ that removes the transient e^{−t} term for μ(t) = A sin(θt + φ) with
/// constant λ, σ, so β stays a pure sinusoid.
pub fn seasonal_beta0(amplitude: f64, theta: f64, phase: f64, lambda: f64, sigma: f64) -> f64 {
    seasonal_beta(amplitude, theta, phase, lambda, sigma, 0.0)
}

/// Closed-form β(t) for the seasonal drift with the transient removed.
pub fn seasonal_beta(
    amplitude: f64,
    theta: f64,
    phase: f64,
    lambda: f64,
    sigma: f64,
    t: f64,
) -> f64 {
    let amp = amplitude * lambda.sqrt() / (sigma * (lambda * lambda + theta * theta).sqrt());
    amp * (theta / lambda * t + phase - (theta / lambda).atan()).sin()
}

/// Monotone piecewise-cubic (Fritsch–Carlson) interpolant.
#[derive(Debug, Clone)]
struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let s: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d = vec![s[0]; 2];
        } else {
            for i in 1..n - 1 {
                if s[i - 1] * s[i] > 0.0 {
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    d[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
                }
            }
            d[0] = Self::end_slope(h[0], h[1], s[0], s[1]);
            d[n - 1] = Self::end_slope(h[n - 2], h[n - 3], s[n - 2], s[n - 3]);
        }
        Self { x, y, d }
    }

    fn end_slope(h0: f64, h1: f64, s0: f64, s1: f64) -> f64 {
        let d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
        if d * s0 <= 0.0 {
            0.0
        } else if s0 * s1 <= 0.0 && d.abs() > 3.0 * s0.abs() {
            3.0 * s0
        } else {
            d
        }
    }

    fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        let i = self.x.partition_point(|&v| v <= t).clamp(1, n - 1) - 1;
        let h = self.x[i + 1] - self.x[i];
        let u = (t - self.x[i]) / h;
        let (h00, h10) = ((1.0 + 2.0 * u) * (1.0 - u).powi(2), u * (1.0 - u).powi(2));
        let (h01, h11) = (u * u * (3.0 - 2.0 * u), u * u * (u - 1.0));
        h00 * self.y[i] + h10 * h * self.d[i] + h01 * self.y[i + 1] + h11 * h * self.d[i + 1]
    }
}

/// Tabulated solution (α, β, γ) on a uniform grid of the standardized clock.
#[derive(Debug, Clone)]
pub struct Transform {
    pub t: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub gamma_prime: Vec<f64>,
    pub alpha0: f64,
    pub beta0: f64,
    gamma_inv: Pchip,
}

impl Transform {
    pub fn horizon(&self) -> f64 {
        *self.t.last().unwrap()
    }

    fn interp(&self, values: &[f64], t: f64) -> f64 {
        let n = self.t.len();
        let h = self.t[1] - self.t[0];
        let i = ((t / h).floor().max(0.0) as usize).min(n - 2);
        let u = (t - self.t[i]) / h;
        values[i] + u * (values[i + 1] - values[i])
    }

    pub fn alpha_at(&self, t: f64) -> f64 {
        self.interp(&self.alpha, t)
    }

    pub fn beta_at(&self, t: f64) -> f64 {
        self.interp(&self.beta, t)
    }

    pub fn gamma_at(&self, t: f64) -> f64 {
        self.interp(&self.gamma, t)
    }

    /// Standardized time at which the original clock reads `s`.
    pub fn gamma_inv(&self, s: f64) -> f64 {
        self.gamma_inv.eval(s)
    }

    /// x̃ = α₀ y − β₀.
    pub fn initial_state(&self, y0: f64) -> f64 {
        self.alpha0 * y0 - self.beta0
    }
}

struct Rhs<'a> {
    f: &'a TimeFunctions,
}

impl Rhs<'_> {
    /// d/dt of (γ, γ′, β).
    fn eval(&self, s: [f64; 3]) -> [f64; 3] {
        let [g, v, b] = s;
        let sig = self.f.sigma.eval(g);
        let damp = self.f.lambda.eval(g) + self.f.sigma.derivative(g) / sig;
        let alpha = 1.0 / (sig * v.sqrt());
        [
            v,
            2.0 * v * (1.0 - v * damp),
            alpha * self.f.mu.eval(g) * v - b,
        ]
    }

    fn step(&self, s: [f64; 3], h: f64) -> [f64; 3] {
        let add =
            |a: [f64; 3], k: [f64; 3], c: f64| [a[0] + c * k[0], a[1] + c * k[1], a[2] + c * k[2]];
        let k1 = self.eval(s);
        let k2 = self.eval(add(s, k1, 0.5 * h));
        let k3 = self.eval(add(s, k2, 0.5 * h));
        let k4 = self.eval(add(s, k3, h));
        std::array::from_fn(|i| s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
    }
}

/// Solves for (α, β, γ) on [0, horizon] with fixed-step RK4 on the state
/// (γ, γ′, β); α follows from σ(γ) α √γ′ = 1. Pass `step = None` for
/// horizon/4096.
pub fn solve_transform(
    funcs: &TimeFunctions,
    alpha0: f64,
    beta0: f64,
    horizon: f64,
    step: Option<f64>,
) -> Result<Transform> {
    if !(alpha0 > 0.0) || !beta0.is_finite() || !(horizon > 0.0) {
        return Err(domain(
            "need alpha0 > 0, finite beta0 and a positive horizon",
        ));
    }
    let n = match step {
        Some(h) if h > 0.0 => ((horizon / h).ceil() as usize).max(4),
        Some(_) => return Err(domain("step must be positive")),
        None => 4096,
    };
    let h = horizon / n as f64;
    let sig0 = funcs.sigma.eval(0.0);
    let rhs = Rhs { f: funcs };
    let mut state = [0.0, 1.0 / (sig0 * sig0 * alpha0 * alpha0), beta0];
    let mut t = Vec::with_capacity(n + 1);
    let (mut gamma, mut gp, mut beta) = (
        Vec::with_capacity(n + 1),
        Vec::with_capacity(n + 1),
        Vec::with_capacity(n + 1),
    );
    for i in 0..=n {
        let ti = i as f64 * h;
        if !(state[1] > 0.0) || !state.iter().all(|v| v.is_finite()) {
            return Err(Error::NonMonotoneGamma {
                t: ti,
                slope: state[1],
            });
        }
        t.push(ti);
        gamma.push(state[0]);
        gp.push(state[1]);
        beta.push(state[2]);
        if i < n {
            state = rhs.step(state, h);
        }
    }
    let alpha: Vec<f64> = gamma
        .iter()
        .zip(&gp)
        .map(|(&g, &v)| 1.0 / (funcs.sigma.eval(g) * v.sqrt()))
        .collect();
    check_residuals(funcs, &t, &alpha, &beta, &gamma, &gp)?;
    let gamma_inv = Pchip::new(gamma.clone(), t.clone());
    Ok(Transform {
        t,
        alpha,
        beta,
        gamma,
        gamma_prime: gp,
        alpha0,
        beta0,
        gamma_inv,
    })
}

/// Five-point central difference at interior node i.
fn d5(v: &[f64], i: usize, h: f64) -> f64 {
    (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h)
}

fn check_residuals(
    f: &TimeFunctions,
    t: &[f64],
    alpha: &[f64],
    beta: &[f64],
    gamma: &[f64],
    gp: &[f64],
) -> Result<()> {
    let h = t[1] - t[0];
    for i in 2..t.len().saturating_sub(2) {
        let g = gamma[i];
        let r1 = (f.sigma.eval(g) * alpha[i] * gp[i].sqrt() - 1.0).abs();
        let r2 = (f.lambda.eval(g) * gp[i] - d5(alpha, i, h) / alpha[i] - 1.0).abs();
        let drive = alpha[i] * f.mu.eval(g) * gp[i];
        let r3 = (d5(beta, i, h) + beta[i] - drive).abs() / drive.abs().max(beta[i].abs()).max(1.0);
        let r = r1.max(r2).max(r3);
        if !(r <= RESIDUAL_TOL) {
            return Err(Error::ResidualTooLarge {
                residual: r,
                t: t[i],
            });
        }
    }
    Ok(())
}

/// Samples of a function on a grid, linearly interpolated between nodes and
/// held constant outside.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampled {
    pub t: Vec<f64>,
    pub values: Vec<f64>,
}

impl Sampled {
    pub fn eval(&self, s: f64) -> f64 {
        let n = self.t.len();
        if s <= self.t[0] {
            return self.values[0];
        }
        if s >= self.t[n - 1] {
            return self.values[n - 1];
        }
        let i = self.t.partition_point(|&v| v <= s) - 1;
        let u = (s - self.t[i]) / (self.t[i + 1] - self.t[i]);
        self.values[i] + u * (self.values[i + 1] - self.values[i])
    }

    /// Σ |v_{i+1} − v_i| over nodes in [t0, t1].
    pub fn total_variation(&self, t0: f64, t1: f64) -> f64 {
        let v: Vec<f64> = self
            .t
            .iter()
            .zip(&self.values)
            .filter(|(&t, _)| t >= t0 && t <= t1)
            .map(|(_, &v)| v)
            .collect();
        v.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
    }
}

/// g(t) = α(t) b(γ(t)) − β(t) on the transform grid.
pub fn transformed_barrier(tr: &Transform, b: &TimeFunction) -> Sampled {
    let values =
        tr.t.iter()
            .enumerate()
            .map(|(i, _)| tr.alpha[i] * b.eval(tr.gamma[i]) - tr.beta[i])
            .collect();
    Sampled {
        t: tr.t.clone(),
        values,
    }
}

/// Left-closed, right-open constant pieces; the last piece also covers t1.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstant {
    pub breaks: Vec<f64>,
    pub values: Vec<f64>,
}

impl PiecewiseConstant {
    pub fn eval(&self, t: f64) -> f64 {
        let i = self.breaks.partition_point(|&b| b <= t).saturating_sub(1);
        self.values[i.min(self.values.len() - 1)]
    }
}

/// n equal pieces on [t0, t1], each taking f at its midpoint.
pub fn piecewise_approx(
    f: impl Fn(f64) -> f64,
    t0: f64,
    t1: f64,
    n: usize,
) -> Result<PiecewiseConstant> {
    if n == 0 || !(t1 > t0) {
        return Err(domain("need n >= 1 and t1 > t0"));
    }
    let w = (t1 - t0) / n as f64;
    let breaks: Vec<f64> = (0..=n)
        .map(|i| if i == n { t1 } else { t0 + i as f64 * w })
        .collect();
    let values = (0..n).map(|i| f(t0 + (i as f64 + 0.5) * w)).collect();
    Ok(PiecewiseConstant { breaks, values })
}

/// Solves the transform on a standardized horizon long enough for γ to
/// reach the original time `t`, doubling the horizon as needed.
pub fn solve_transform_covering(
    funcs: &TimeFunctions,
    alpha0: f64,
    beta0: f64,
    t: f64,
) -> Result<Transform> {
    let mut horizon = 1.1 * t * funcs.lambda.eval(0.0) + 0.1;
    for _ in 0..20 {
        let tr = solve_transform(funcs, alpha0, beta0, horizon, None)?;
        if *tr.gamma.last().unwrap() >= t {
            return Ok(tr);
        }
        horizon *= 2.0;
    }
    Err(Error::NoConvergence(format!(
        "time change does not reach t = {t}"
    )))
}

/// P(Y stays below b on [0, t] | Y_0 = y0) by the transformation method: the
/// barrier g is split into `n_segments` constant pieces on [0, γ⁻¹(t)] and the
/// all-below probability of the standardized process is evaluated by nested
/// quadrature. α₀ and β₀ take their defaults, see
/// [`TimeFunctions::default_alpha0`] and [`TimeFunctions::default_beta0`].
pub fn inhomo_fpt_survival(
    funcs: &TimeFunctions,
    b: &TimeFunction,
    y0: f64,
    t: f64,
    n_segments: usize,
    grid: &Grid,
    settings: &KernelSettings,
) -> Result<ProbResult> {
    inhomo_fpt_survival_with(
        funcs,
        b,
        y0,
        t,
        n_segments,
        funcs.default_alpha0(),
        funcs.default_beta0(),
        grid,
        settings,
    )
}

/// [`inhomo_fpt_survival`] with explicit (α₀, β₀).
#[allow(clippy::too_many_arguments)]
pub fn inhomo_fpt_survival_with(
    funcs: &TimeFunctions,
    b: &TimeFunction,
    y0: f64,
    t: f64,
    n_segments: usize,
    alpha0: f64,
    beta0: f64,
    grid: &Grid,
    settings: &KernelSettings,
) -> Result<ProbResult> {
    if !(t > 0.0) {
        return Err(domain("t must be positive"));
    }
    let tr = solve_transform_covering(funcs, alpha0, beta0, t)?;
    let tau = tr.gamma_inv(t);
    let g = transformed_barrier(&tr, b);
    let pc = piecewise_approx(|s| g.eval(s), 0.0, tau, n_segments)?;
    let p = JointProblem::new(
        tr.initial_state(y0),
        pc.breaks,
        pc.values,
        Direction::AllBelow,
    )?;
    joint_distribution_quadrature(&p, grid, settings)
}

/// Outcome of [`method_selector`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Transformation,
    DirectApprox,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Transformation => "transformation",
            Method::DirectApprox => "direct-approx",
        }
    }
}

/// Why the selector fell back to its default.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectorFlag {
    /// A parameter function is not differentiable.
    NotSmooth,
    /// inf |μ″| vanishes on the window.
    Degenerate,
    /// g′, g″ do not share the signs of μ′, μ″ on the window.
    HypothesisFailed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    pub method: Method,
    pub flag: Option<SelectorFlag>,
    /// Criterion value and the threshold it was compared with.
    pub ratio: f64,
    pub threshold: f64,
}

const SIGN_SAMPLES: usize = 201;

/// Picks between the transformation method and direct piecewise
/// approximation on the window [t1, t2].
///
/// With constant λ, σ and b the curvature criterion applies: the infimum of
/// |σ√λ g″| over [λt1, λt2] divided by inf |μ″| over [t1, t2] is compared
/// with σ√λ, and a smaller value favours the transformation. Otherwise the
/// total variation of g is compared with that of the locally standardized
/// barrier √λ/σ (b − μ/λ) seen by the direct method.
pub fn method_selector(
    funcs: &TimeFunctions,
    b: &TimeFunction,
    window: (f64, f64),
    beta0: f64,
) -> Result<Selection> {
    let (t1, t2) = window;
    if !(t2 > t1) || t1 < 0.0 {
        return Err(domain("window must satisfy 0 <= t1 < t2"));
    }
    if !funcs.is_smooth() || !b.is_smooth() {
        return Ok(Selection {
            method: Method::DirectApprox,
            flag: Some(SelectorFlag::NotSmooth),
            ratio: f64::NAN,
            threshold: f64::NAN,
        });
    }
    match (
        funcs.lambda.constant_value(),
        funcs.sigma.constant_value(),
        b.constant_value(),
    ) {
        (Some(lambda), Some(sigma), Some(_)) => curvature_rule(funcs, lambda, sigma, window, beta0),
        _ => variation_rule(funcs, b, window, beta0),
    }
}

fn curvature_rule(
    funcs: &TimeFunctions,
    lambda: f64,
    sigma: f64,
    (t1, t2): (f64, f64),
    beta0: f64,
) -> Result<Selection> {
    let mu = &funcs.mu;
    let scale = sigma * lambda.sqrt();
    // ∫_0^s e^{u−s} μ(u/λ) du
    let lagged = |s: f64| -> Result<f64> {
        if s == 0.0 {
            return Ok(0.0);
        }
        let tol = Tolerance {
            abs: 1e-13,
            rel: 1e-11,
            max_panels: 500,
        };
        integrate(|u| (u - s).exp() * mu.eval(u / lambda), &[0.0, s], tol).map(|r| r.0)
    };
    let mut inf_bracket = f64::INFINITY;
    let mut inf_mu2 = f64::INFINITY;
    let mut signs_agree = true;
    for i in 0..SIGN_SAMPLES {
        let t = t1 + (t2 - t1) * i as f64 / (SIGN_SAMPLES - 1) as f64;
        let s = lambda * t;
        let lag = lagged(s)?;
        let beta = (-s).exp() * beta0 + lag / scale;
        let g1 = beta - mu.eval(t) / scale;
        // σ√λ g″(s)
        let bracket = mu.eval(t) - scale * beta0 * (-s).exp() - lag - mu.derivative(t) / lambda;
        let (m1, m2) = (mu.derivative(t), mu.second_derivative(t));
        inf_bracket = inf_bracket.min(bracket.abs());
        inf_mu2 = inf_mu2.min(m2.abs());
        if g1.signum() != m1.signum() || bracket.signum() != m2.signum() {
            signs_agree = false;
        }
    }
    let mu_scale = (0..SIGN_SAMPLES)
        .map(|i| {
            mu.eval(t1 + (t2 - t1) * i as f64 / (SIGN_SAMPLES - 1) as f64)
                .abs()
        })
        .fold(1.0_f64, f64::max);
    if inf_mu2 <= 1e-6 * mu_scale {
        return Ok(Selection {
            method: Method::DirectApprox,
            flag: Some(SelectorFlag::Degenerate),
            ratio: f64::INFINITY,
            threshold: scale,
        });
    }
    let ratio = inf_bracket / inf_mu2;
    if !signs_agree {
        return Ok(Selection {
            method: Method::DirectApprox,
            flag: Some(SelectorFlag::HypothesisFailed),
            ratio,
            threshold: scale,
        });
    }
    let method = if ratio < scale {
        Method::Transformation
    } else {
        Method::DirectApprox
    };
    Ok(Selection {
        method,
        flag: None,
        ratio,
        threshold: scale,
    })
}

fn variation_rule(
    funcs: &TimeFunctions,
    b: &TimeFunction,
    (t1, t2): (f64, f64),
    beta0: f64,
) -> Result<Selection> {
    let tr = solve_transform_covering(funcs, funcs.default_alpha0(), beta0, t2)?;
    let g = transformed_barrier(&tr, b);
    let tv_g = g.total_variation(tr.gamma_inv(t1), tr.gamma_inv(t2));
    let n = 4096;
    let direct = |t: f64| {
        let (l, s) = (funcs.lambda.eval(t), funcs.sigma.eval(t));
        l.sqrt() / s * (b.eval(t) - funcs.mu.eval(t) / l)
    };
    let tv_direct: f64 = (0..n)
        .map(|i| {
            let a = t1 + (t2 - t1) * i as f64 / n as f64;
            let c = t1 + (t2 - t1) * (i + 1) as f64 / n as f64;
            (direct(c) - direct(a)).abs()
        })
        .sum();
    let method = if tv_g < tv_direct {
        Method::Transformation
    } else {
        Method::DirectApprox
    };
    Ok(Selection {
        method,
        flag: None,
        ratio: tv_g,
        threshold: tv_direct,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standardized_input_is_fixed() {
        let f = TimeFunctions::constant(0.0, 1.0, 1.0);
        let tr = solve_transform(&f, 1.0, 0.0, 3.0, None).unwrap();
        for i in (0..tr.t.len()).step_by(97) {
            assert!((tr.alpha[i] - 1.0).abs() < 1e-12);
            assert!(tr.beta[i].abs() < 1e-12);
            assert!((tr.gamma[i] - tr.t[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn constant_parameters_closed_form() {
        let (mu, lambda, sigma, beta0) = (0.7, 2.5, 0.6, 0.3);
        let f = TimeFunctions::constant(mu, lambda, sigma);
        let tr = solve_transform(&f, f.default_alpha0(), beta0, 4.0, None).unwrap();
        let c = 1.0 / (sigma * lambda.sqrt());
        for i in (0..tr.t.len()).step_by(211) {
            let t = tr.t[i];
            assert!((tr.alpha[i] - lambda.sqrt() / sigma).abs() < 1e-8);
            assert!((tr.gamma[i] - t / lambda).abs() < 1e-8);
            // β = e^{−t}[β₀ + c ∫_0^t e^s μ ds]
            let beta = (-t).exp() * (beta0 + c * mu * t.exp_m1());
            assert!((tr.beta[i] - beta).abs() < 1e-9);
        }
    }

    #[test]
    fn inverse_time_change() {
        let f = TimeFunctions {
            mu: TimeFunction::smooth(|t| t.cos()),
            lambda: TimeFunction::smooth(|t| 1.0 + 0.3 * t.sin()),
            sigma: TimeFunction::smooth(|t| 1.0 + 0.1 * t),
        };
        let tr = solve_transform(&f, f.default_alpha0(), 0.0, 2.0, None).unwrap();
        for i in (0..tr.t.len()).step_by(64) {
            assert!((tr.gamma_inv(tr.gamma[i]) - tr.t[i]).abs() < 1e-8);
        }
        let mid = 0.5 * (tr.gamma[100] + tr.gamma[101]);
        assert!((tr.gamma_at(tr.gamma_inv(mid)) - mid).abs() < 1e-8);
    }

    #[test]
    fn coarse_step_trips_residual_check() {
        let f = TimeFunctions::seasonal(1.0, 40.0, 0.0, 1.0, 1.0);
        let r = solve_transform(&f, 1.0, 0.0, 5.0, Some(0.05));
        assert!(matches!(r, Err(Error::ResidualTooLarge { .. })));
    }

    #[test]
    fn midpoint_pieces() {
        let pc = piecewise_approx(|t| 2.0 * t, 0.0, 1.0, 4).unwrap();
        assert_eq!(pc.values, vec![0.25, 0.75, 1.25, 1.75]);
        assert_eq!(pc.eval(0.25), 0.75);
        assert_eq!(pc.eval(1.0), 1.75);
        let sup = |n| {
            let pc = piecewise_approx(|t| t, 0.0, 1.0, n).unwrap();
            (0..=1000)
                .map(|i| i as f64 / 1000.0)
                .map(|t| (pc.eval(t) - t).abs())
                .fold(0.0, f64::max)
        };
        assert!((sup(8) / sup(16) - 2.0).abs() < 0.05);
    }

    #[test]
    fn sampled_interpolation() {
        let s = Sampled {
            t: vec![0.0, 1.0, 2.0],
            values: vec![0.0, 2.0, 1.0],
        };
        assert_eq!(s.eval(0.5), 1.0);
        assert_eq!(s.eval(3.0), 1.0);
        assert_eq!(s.total_variation(0.0, 2.0), 3.0);
    }

    #[test]
    fn linear_drift_is_degenerate() {
        let f = TimeFunctions {
            mu: TimeFunction::smooth(|t| 0.5 * t),
            lambda: TimeFunction::constant(1.0),
            sigma: TimeFunction::constant(1.0),
        };
        let sel = method_selector(&f, &TimeFunction::constant(1.0), (1.0, 2.0), 1.0).unwrap();
        assert_eq!(sel.method, Method::DirectApprox);
        assert_eq!(sel.flag, Some(SelectorFlag::Degenerate));
    }
}
