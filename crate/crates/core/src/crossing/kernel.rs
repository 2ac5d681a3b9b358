//! One-interval kernels for the standardized process.
//!
//! For endpoints z, z′ below the barrier b the crossing kernel
//! κ(z, z′) = P(max ≥ b, Z_Δ ∈ dz′ | Z_0 = z)/dz′ is written, after an
//! integration by parts in time that uses F̄(0, z) = 1 exactly, as
//!
//!   κ(z, z′) = G(e^{−Δ}) + Σ_k c_k φ_k(z) ∫_{e^{−Δ}}^1 (x e^{Δ})^{−α_k} G′(x) dx,
//!
//! with G(x) = exp(−(z′ − b x)²/(1 − x²))/√(π(1 − x²)) the transition density
//! from b over a time −ln x. The inner integrals depend on z′ only, so the
//! kernel factorizes as G0(z′) + Σ_k A_k(z) B_k(z′).
//!
//! Truncating the sum leaves an error that decays only like Σ_{k>K} c_k φ_k/α_k,
//! since B_k ≈ x G′(x)/α_k at x = e^{−Δ} for large α_k. With the tail
//! correction enabled, one extra factor pair carries that leading term, the
//! full sum Σ c_k φ_k/α_k being the mean passage time.
//!
//! For longer intervals the spectral form κ = p − ψ is preferred, where the
//! killed density ψ = Σ_k e^{−α_k Δ} φ_k(z) φ_k(z′) 2e^{−z′²}/N_k converges
//! geometrically in K.

use std::f64::consts::PI;

use std::sync::Arc;

use crate::eigen::{self, EigenSystem};
use crate::error::{domain, Result};
use crate::fpt::mean_fpt_standardized;
use crate::quad::{geometric_breaks, integrate, integrate_vec, Tolerance};

/// Gaussian transition density of dZ = −Z dt + dW over `dt`.
pub fn transition_density(z: f64, z_next: f64, dt: f64) -> f64 {
    let v = -0.5 * (-2.0 * dt).exp_m1();
    let d = z_next - z * (-dt).exp();
    (-d * d / (2.0 * v)).exp() / (2.0 * PI * v).sqrt()
}

/// ∂/∂dt of [`transition_density`].
fn transition_density_dt(z: f64, z_next: f64, dt: f64) -> f64 {
    let e = (-dt).exp();
    let v = -0.5 * (-2.0 * dt).exp_m1();
    let dv = e * e;
    let d = z_next - z * e;
    let dm = -z * e;
    let p = (-d * d / (2.0 * v)).exp() / (2.0 * PI * v).sqrt();
    p * (-0.5 * dv / v + d * dm / v + d * d * dv / (2.0 * v * v))
}

/// Which factorization of κ a kernel uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelForm {
    /// G0(z′) + Σ_k A_k(z) B_k(z′) from the first-passage series.
    ByParts,
    /// p − ψ with ψ the eigen-expansion of the density killed at b.
    Spectral,
}

/// Smallest α_K Δ at which [`KernelForm::Spectral`] is chosen automatically;
/// the neglected terms are then below e^{−36}.
pub const SPECTRAL_MIN_DECAY: f64 = 36.0;

/// Spectral terms with α_k Δ at or above this are dropped; e^{−50} leaves
/// room for the growth of φ_k(z) φ_k(z′) e^{−z′²} over the state grid.
pub const SPECTRAL_DROP_DECAY: f64 = 50.0;

/// Crossing kernel of one interval: barrier, length and eigen system.
#[derive(Clone)]
pub struct IntervalKernel {
    pub b: f64,
    pub dt: f64,
    pub es: Arc<EigenSystem>,
    /// Number of initial panels of the inner integral is `inner_j / 8`.
    pub inner_j: usize,
    /// Append the leading-order tail term to by-parts factors.
    pub tail: bool,
    form: KernelForm,
    norms: Arc<Vec<f64>>,
    /// Spectral terms kept: those with α_k Δ below [`SPECTRAL_DROP_DECAY`].
    active: usize,
}

/// z′-dependent part of κ: G0 = G(e^{−Δ}) and the inner integrals B_k.
#[derive(Debug, Clone)]
pub struct ColumnFactor {
    pub g0: f64,
    pub b: Vec<f64>,
}

impl IntervalKernel {
    /// Kernel from the cached eigen system with K terms. The spectral form
    /// is used when α_K Δ reaches [`SPECTRAL_MIN_DECAY`], the by-parts form
    /// with tail correction otherwise.
    pub fn new(b: f64, dt: f64, k_terms: usize, inner_j: usize) -> Result<Self> {
        let es = eigen::global_cache().get(b, k_terms)?;
        let spectral = es
            .alphas
            .last()
            .is_some_and(|a| a * dt >= SPECTRAL_MIN_DECAY);
        let k = Self::with_system(b, dt, es, inner_j)?.with_tail(true);
        if spectral {
            k.with_form(KernelForm::Spectral)
        } else {
            Ok(k)
        }
    }

    /// By-parts kernel on a given eigen system, without tail correction.
    pub fn with_system(b: f64, dt: f64, es: Arc<EigenSystem>, inner_j: usize) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(domain(format!(
                "interval length must be positive, got {dt}"
            )));
        }
        if inner_j < 8 {
            return Err(domain("inner quadrature needs J >= 8"));
        }
        if (es.b_tilde - b).abs() > 1e-12 || es.a_tilde.is_some() {
            return Err(domain("eigen system does not belong to this barrier"));
        }
        Ok(Self {
            b,
            dt,
            es,
            inner_j,
            tail: false,
            form: KernelForm::ByParts,
            norms: Arc::new(Vec::new()),
            active: 0,
        })
    }

    pub fn with_tail(mut self, tail: bool) -> Self {
        self.tail = tail;
        self
    }

    pub fn with_form(mut self, form: KernelForm) -> Result<Self> {
        if form == KernelForm::Spectral && self.norms.is_empty() {
            self.norms = Arc::new(self.es.norms()?);
            self.active = self
                .es
                .alphas
                .iter()
                .take_while(|a| *a * self.dt < SPECTRAL_DROP_DECAY)
                .count();
        }
        self.form = form;
        Ok(self)
    }

    pub fn form(&self) -> KernelForm {
        self.form
    }

    /// φ_k(z) for the terms this kernel uses (all of them for the by-parts
    /// form); the factor methods taking `phi` expect this vector.
    pub fn eigenfunctions_at(&self, z: f64) -> Result<Vec<f64>> {
        let n = match self.form {
            KernelForm::Spectral => self.active,
            KernelForm::ByParts => self.es.len(),
        };
        (0..n).map(|k| self.es.eigenfunction(k, z)).collect()
    }

    /// Row factor A(z), meaningful for z < b: c_k φ_k(z) for the by-parts
    /// form, e^{−α_k Δ} φ_k(z) for the spectral one.
    pub fn row_factor(&self, z: f64) -> Result<Vec<f64>> {
        self.row_from(z, &self.eigenfunctions_at(z)?)
    }

    pub fn row_from(&self, z: f64, phi: &[f64]) -> Result<Vec<f64>> {
        if self.form == KernelForm::Spectral {
            return Ok((0..self.active)
                .map(|k| (-self.es.alphas[k] * self.dt).exp() * phi[k])
                .collect());
        }
        let mut a: Vec<f64> = self.es.coeffs.iter().zip(phi).map(|(c, f)| c * f).collect();
        if self.tail {
            let partial: f64 = a.iter().zip(&self.es.alphas).map(|(w, al)| w / al).sum();
            a.push(mean_fpt_standardized(z, self.b)? - partial);
        }
        Ok(a)
    }

    /// Column factor for a terminal state z′ < b. In the by-parts form the
    /// inner integrals are computed in the variable u = √(1 − x²), which
    /// absorbs the edge behaviour at x = 1.
    pub fn column_factor(&self, z_next: f64) -> Result<ColumnFactor> {
        match self.form {
            KernelForm::Spectral => self.column_from(z_next, &self.eigenfunctions_at(z_next)?),
            KernelForm::ByParts => self.column_from(z_next, &[]),
        }
    }

    /// As [`Self::column_factor`]; `phi` is only read by the spectral form.
    pub fn column_from(&self, z_next: f64, phi: &[f64]) -> Result<ColumnFactor> {
        if self.form == KernelForm::Spectral {
            let w = -2.0 * (-z_next * z_next).exp();
            let b = (0..self.active)
                .map(|k| w * phi[k] / self.norms[k])
                .collect();
            return Ok(ColumnFactor { g0: 0.0, b });
        }
        let (b, dt) = (self.b, self.dt);
        let k = self.es.len();
        let g0 = transition_density(b, z_next, dt);
        let u0 = (-(-2.0 * dt).exp_m1()).sqrt();
        let alphas = &self.es.alphas;
        let breaks = geometric_breaks(0.0, u0, (self.inner_j / 8).max(1));
        let tol = Tolerance {
            abs: 1e-15,
            rel: 1e-11,
            max_panels: 4000,
        };
        let (mut vals, _) = integrate_vec(
            |u, out| {
                let w = u * u;
                let x = (1.0 - w).sqrt();
                if u == 0.0 {
                    out.iter_mut().for_each(|o| *o = 0.0);
                    return;
                }
                // dx = (u/x) du
                let base = g_prime(b, z_next, x) * u / x;
                let lx = x.ln() + dt;
                for (o, &a) in out.iter_mut().zip(alphas) {
                    *o = base * (-a * lx).exp();
                }
            },
            &breaks,
            k,
            tol,
        )?;
        if self.tail {
            let x = (-dt).exp();
            vals.push(g_prime(b, z_next, x) * x);
        }
        Ok(ColumnFactor { g0, b: vals })
    }

    /// κ from precomputed factors of z < b and z′ < b.
    #[inline]
    pub fn kappa_factored(&self, z: f64, z_next: f64, a: &[f64], c: &ColumnFactor) -> f64 {
        match self.form {
            KernelForm::ByParts => combine(a, c),
            KernelForm::Spectral => transition_density(z, z_next, self.dt) + combine(a, c),
        }
    }

    /// ψ = p − κ from precomputed factors of z < b and z′ < b.
    #[inline]
    pub fn psi_factored(&self, z: f64, z_next: f64, a: &[f64], c: &ColumnFactor) -> f64 {
        match self.form {
            KernelForm::ByParts => transition_density(z, z_next, self.dt) - combine(a, c),
            KernelForm::Spectral => -combine(a, c),
        }
    }

    /// κ(z, z′); the transition density when either endpoint is at or above b.
    pub fn kappa(&self, z: f64, z_next: f64) -> Result<f64> {
        if z >= self.b || z_next >= self.b {
            return Ok(transition_density(z, z_next, self.dt));
        }
        let a = self.row_factor(z)?;
        let c = self.column_factor(z_next)?;
        Ok(self.kappa_factored(z, z_next, &a, &c))
    }

    /// ψ = p − κ, the kernel of staying below b.
    pub fn psi(&self, z: f64, z_next: f64) -> Result<f64> {
        if z >= self.b || z_next >= self.b {
            return Ok(0.0);
        }
        let a = self.row_factor(z)?;
        let c = self.column_factor(z_next)?;
        Ok(self.psi_factored(z, z_next, &a, &c))
    }

    /// P(no crossing over the interval | start z), clamped to [0, 1].
    pub fn q(&self, z: f64) -> Result<f64> {
        if z >= self.b {
            return Ok(0.0);
        }
        Ok(self.es.survival_series(z, self.dt)?.clamp(0.0, 1.0))
    }

    /// [`Self::q`] from the eigenfunction values at z.
    pub fn q_from(&self, z: f64, phi: &[f64]) -> f64 {
        if z >= self.b {
            return 0.0;
        }
        let s: f64 = (0..phi.len())
            .map(|k| self.es.coeffs[k] * phi[k] * (-self.es.alphas[k] * self.dt).exp())
            .sum();
        s.clamp(0.0, 1.0)
    }

    /// 1 − [`Self::q`].
    pub fn qbar(&self, z: f64) -> Result<f64> {
        Ok(1.0 - self.q(z)?)
    }
}

/// dG/dx for G(x) = exp(−(z′ − b x)²/(1 − x²))/√(π(1 − x²)).
fn g_prime(b: f64, z_next: f64, x: f64) -> f64 {
    let w = 1.0 - x * x;
    let r = z_next - b * x;
    let g = (-r * r / w).exp() / (PI * w).sqrt();
    g * ((2.0 * b * r * w - 2.0 * x * r * r) / (w * w) + x / w)
}

/// Low-rank part of a kernel contracted against a vector v over the
/// columns below the barrier: Σ_l G0_l v_l and Σ_l B_l v_l.
#[derive(Debug, Clone)]
pub struct Contracted {
    pub g0v: f64,
    pub u: Vec<f64>,
}

impl Contracted {
    pub fn new<'a>(cols: impl Iterator<Item = (Option<&'a ColumnFactor>, f64)>) -> Self {
        let mut g0v = 0.0;
        let mut u: Vec<f64> = Vec::new();
        for (c, v) in cols {
            let Some(c) = c else { continue };
            if u.is_empty() {
                u = vec![0.0; c.b.len()];
            }
            g0v += c.g0 * v;
            for (uk, bk) in u.iter_mut().zip(&c.b) {
                *uk += bk * v;
            }
        }
        Self { g0v, u }
    }
}

impl IntervalKernel {
    /// Σ_l K(z, x_l) v_l with K = κ, or ψ when `psi`; `row` is the row factor
    /// of z (None when z ≥ b) and `c` the contraction of the columns of `xs`
    /// against `v`. Only the Gaussian part is summed entry by entry.
    pub fn apply_row(
        &self,
        z: f64,
        row: Option<&[f64]>,
        xs: &[f64],
        v: &[f64],
        c: &Contracted,
        psi: bool,
    ) -> f64 {
        let var = -0.5 * (-2.0 * self.dt).exp_m1();
        let m = z * (-self.dt).exp();
        let inv = 0.5 / var;
        let (mut below, mut above) = (0.0, 0.0);
        for (&x, &vl) in xs.iter().zip(v) {
            let d = x - m;
            let pv = (-d * d * inv).exp() * vl;
            if x < self.b {
                below += pv;
            } else {
                above += pv;
            }
        }
        let norm = 1.0 / (2.0 * PI * var).sqrt();
        let (below, above) = (below * norm, above * norm);
        let Some(a) = row else {
            return if psi { 0.0 } else { below + above };
        };
        let low = c.g0v + a.iter().zip(&c.u).map(|(x, y)| x * y).sum::<f64>();
        match (self.form, psi) {
            (KernelForm::Spectral, false) => below + above + low,
            (KernelForm::Spectral, true) => -low,
            (KernelForm::ByParts, false) => above + low,
            (KernelForm::ByParts, true) => below - low,
        }
    }
}

/// G0 + Σ A_k B_k.
#[inline]
pub fn combine(a: &[f64], c: &ColumnFactor) -> f64 {
    c.g0 + a.iter().zip(&c.b).map(|(x, y)| x * y).sum::<f64>()
}

/// κ(z_prev, z_next) for barrier b over dt in the by-parts form with the
/// given eigen system.
pub fn kappa_kernel(
    z_prev: f64,
    z_next: f64,
    b: f64,
    dt: f64,
    es: &EigenSystem,
    j: usize,
) -> Result<f64> {
    IntervalKernel::with_system(b, dt, Arc::new(es.clone()), j)?.kappa(z_prev, z_next)
}

/// ψ(z_prev, z_next) = p − κ below the barrier, 0 otherwise.
pub fn psi_kernel(
    z_prev: f64,
    z_next: f64,
    b: f64,
    dt: f64,
    es: &EigenSystem,
    j: usize,
) -> Result<f64> {
    IntervalKernel::with_system(b, dt, Arc::new(es.clone()), j)?.psi(z_prev, z_next)
}

/// Probability of staying below b over dt from z.
pub fn q_tail(z: f64, b: f64, dt: f64, es: &EigenSystem) -> Result<f64> {
    if z >= b {
        return Ok(0.0);
    }
    Ok(es.survival_series(z, dt)?.clamp(0.0, 1.0))
}

/// Probability of reaching b within dt from z.
pub fn qbar_tail(z: f64, b: f64, dt: f64, es: &EigenSystem) -> Result<f64> {
    Ok(1.0 - q_tail(z, b, dt, es)?)
}

/// P(max over [0, T] ≥ b | Z_0 = z, Z_T = z_next), computed in the time
/// domain as [g(0) + ∫_0^T g′(t) F̄(t, z) dt]/p(T; z, z_next) with
/// g(t) = p(T − t; b, z_next). `n_t` sets the number of initial panels,
/// graded toward t = T.
pub fn bridge_crossing_prob(
    z: f64,
    z_next: f64,
    b: f64,
    t_len: f64,
    es: &EigenSystem,
    n_t: usize,
) -> Result<f64> {
    if z >= b || z_next >= b {
        return Ok(1.0);
    }
    let joint = bridge_kappa(z, z_next, b, t_len, es, n_t)?;
    Ok((joint / transition_density(z, z_next, t_len)).clamp(0.0, 1.0))
}

/// The same bridge quantity multiplied by the transition density, unclamped.
pub fn bridge_kappa(
    z: f64,
    z_next: f64,
    b: f64,
    t_len: f64,
    es: &EigenSystem,
    n_t: usize,
) -> Result<f64> {
    if !(t_len > 0.0) {
        return Err(domain("bridge length must be positive"));
    }
    if z >= b || z_next >= b {
        return Ok(transition_density(z, z_next, t_len));
    }
    let w = es.weighted_terms(z)?;
    let surv = |t: f64| -> f64 {
        w.iter()
            .zip(&es.alphas)
            .map(|(w, a)| w * (-a * t).exp())
            .sum()
    };
    // breaks clustered at t = T, where g′ concentrates for z_next near b
    let mut breaks: Vec<f64> = geometric_breaks(0.0, t_len, n_t.max(2))
        .iter()
        .map(|s| t_len - s)
        .collect();
    breaks.reverse();
    let tol = Tolerance {
        abs: 1e-15,
        rel: 1e-11,
        max_panels: 4000,
    };
    let (int, _) = integrate(
        |t| {
            let s = t_len - t;
            if s <= 0.0 {
                return 0.0;
            }
            -transition_density_dt(b, z_next, s) * surv(t)
        },
        &breaks,
        tol,
    )?;
    Ok(transition_density(b, z_next, t_len) + int)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_normalizes_and_relaxes() {
        let h = 1e-3;
        let s: f64 = (0..16001)
            .map(|i| transition_density(0.7, -8.0 + i as f64 * h, 0.4) * h)
            .sum();
        assert!((s - 1.0).abs() < 1e-6);
        let stat = (-0.81_f64).exp() / PI.sqrt();
        assert!((transition_density(1.3, 0.9, 20.0) - stat).abs() < 1e-6);
    }

    #[test]
    fn time_derivative_matches_difference() {
        let h = 1e-6;
        let d = (transition_density(1.2, 0.3, 0.5 + h) - transition_density(1.2, 0.3, 0.5 - h))
            / (2.0 * h);
        assert!((d - transition_density_dt(1.2, 0.3, 0.5)).abs() < 1e-7);
    }

    #[test]
    fn kappa_continuous_at_barrier() {
        let k = IntervalKernel::new(1.0, 1.0, 30, 64).unwrap();
        let inside = k.kappa(1.0 - 1e-7, 0.2).unwrap();
        let at = k.kappa(1.0, 0.2).unwrap();
        assert!((inside - at).abs() < 1e-5 * at, "{inside} {at}");
    }
}
