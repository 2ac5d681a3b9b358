//! Product form of the joint survival: each interval contributes one
//! single integral over its starting state, so the cost per interval is
//! linear in the grid size once the kernel factors are known.
//!
//! With V_i = q̄_i and W_i the density of the state at t_{i−1} jointly with a
//! crossing on interval i − 1,
//!
//!   I ≈ ∏_{i=2}^N (Σ V_i W_i δz) / ∏_{j=2}^{N−1} P_j,   P_j = Σ W_{j+1} δz.

use rayon::prelude::*;

use super::kernel::{transition_density, IntervalKernel, KernelForm};
use super::quadrature::{node_factors, phi_tables, terminal, NodeFactors};
use super::{kernels, Direction, Grid, JointProblem, KernelSettings};
use crate::eigen::special::norm_cdf;
use crate::error::{domain, Result};
use crate::prob::{ErrKind, ProbResult};

/// ∫_{y ≥ b} p(s; z0, y) p(Δ; y, x) dy, or the part over y < b when `below`.
fn split_part(z0: f64, s: f64, dt: f64, b: f64, x: f64, below: bool) -> f64 {
    let v1 = -0.5 * (-2.0 * s).exp_m1();
    let v2 = -0.5 * (-2.0 * dt).exp_m1();
    let e2 = (-2.0 * dt).exp();
    let prec = 1.0 / v1 + e2 / v2;
    let m = (z0 * (-s).exp() / v1 + x * (-dt).exp() / v2) / prec;
    let d = (b - m) * prec.sqrt();
    transition_density(z0, x, s + dt) * norm_cdf(if below { d } else { -d })
}

/// W on the nodes `idx` for the crossing on interval `k` that starts at time `s`.
#[allow(clippy::too_many_arguments)]
fn crossing_density(
    k: &IntervalKernel,
    f: &NodeFactors,
    nodes: &[f64],
    idx: &[usize],
    z0: f64,
    s: f64,
    first_row: Option<&[f64]>,
    h: f64,
) -> Vec<f64> {
    if s == 0.0 {
        return idx
            .iter()
            .map(|&l| match (first_row, f.below[l]) {
                (Some(a), true) => k.kappa_factored(z0, nodes[l], a, f.cols[l].as_ref().unwrap()),
                _ => transition_density(z0, nodes[l], k.dt),
            })
            .collect();
    }
    let mut g0_mass = 0.0;
    let mut agg = vec![0.0; f.cols.iter().flatten().next().map_or(0, |c| c.b.len())];
    for &l in idx {
        if f.below[l] {
            let w = transition_density(z0, nodes[l], s) * h;
            g0_mass += w;
            for (a, r) in agg.iter_mut().zip(&f.rows[l]) {
                *a += w * r;
            }
        }
    }
    idx.par_iter()
        .map(|&l| {
            let x = nodes[l];
            if !f.below[l] {
                return transition_density(z0, x, s + k.dt);
            }
            let c = f.cols[l].as_ref().unwrap();
            let lower = g0_mass * c.g0 + agg.iter().zip(&c.b).map(|(a, b)| a * b).sum::<f64>();
            let density = match k.form() {
                KernelForm::ByParts => 0.0,
                KernelForm::Spectral => split_part(z0, s, k.dt, k.b, x, true),
            };
            density + lower + split_part(z0, s, k.dt, k.b, x, false)
        })
        .collect()
}

/// Joint survival P(M_1 ≥ b_1, …, M_N ≥ b_N | Z_0 = z0) in product form.
/// The product treats successive crossings as linked only through the
/// state at each grid time, so it is a fast approximation of the nested
/// value; both coincide for N ≤ 2.
pub fn joint_survival_simplified(
    p: &JointProblem,
    g: &Grid,
    s: &KernelSettings,
) -> Result<ProbResult> {
    if p.direction != Direction::AllAbove {
        return Err(domain(
            "joint_survival_simplified evaluates the all-above event",
        ));
    }
    p.validate()?;
    g.check_width()?;
    let ks = kernels(p, s)?;
    let n = p.n_intervals();
    if n == 1 {
        return super::quadrature::nested(p, g, s, Direction::AllAbove);
    }
    let nodes = g.nodes();
    let dz = g.delta_z();
    let phi = phi_tables(&ks, &nodes)?;
    let factors = (0..n - 1)
        .map(|i| node_factors(&ks[i], &nodes, &phi[i], i > 0))
        .collect::<Result<Vec<_>>>()?;
    let v: Vec<Vec<f64>> = (1..n)
        .map(|i| terminal(&ks[i], &nodes, &phi[i], Direction::AllAbove))
        .collect();
    let first_row = (p.z0 < ks[0].b)
        .then(|| ks[0].row_factor(p.z0))
        .transpose()?;

    let run = |idx: &[usize], h: f64| -> f64 {
        let mut log_num = 0.0;
        let mut log_den = 0.0;
        // interval i (0-based) carries W for the crossing on interval i − 1
        for i in 1..n {
            let w = crossing_density(
                &ks[i - 1],
                &factors[i - 1],
                &nodes,
                idx,
                p.z0,
                p.t_grid[i - 1],
                first_row.as_deref(),
                h,
            );
            let num: f64 = idx
                .iter()
                .zip(&w)
                .map(|(&l, w)| v[i - 1][l] * w)
                .sum::<f64>()
                * h;
            log_num += num.ln();
            if i >= 2 {
                log_den += (w.iter().sum::<f64>() * h).ln();
            }
        }
        (log_num - log_den).exp()
    };
    let fine: Vec<usize> = (0..nodes.len()).collect();
    let coarse: Vec<usize> = (0..nodes.len()).step_by(2).collect();
    let value = run(&fine, dz);
    let rough = run(&coarse, 2.0 * dz);
    let value = if value.is_finite() { value } else { 0.0 };
    Ok(ProbResult::clamp(
        value,
        (value - rough).abs(),
        ErrKind::Quadrature,
    ))
}
