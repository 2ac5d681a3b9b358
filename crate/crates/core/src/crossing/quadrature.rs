//! Nested quadrature: the joint probability as a chain of kernel
//! matrix–vector products on the state grid, evaluated right to left.

use std::sync::Arc;

use rayon::prelude::*;

use super::kernel::{ColumnFactor, Contracted, IntervalKernel};
use super::{kernels, Direction, Grid, JointProblem, KernelSettings};
use crate::error::{domain, Result};
use crate::prob::{ErrKind, ProbResult};

/// Row and column factors of one kernel at a set of states.
pub(crate) struct NodeFactors {
    pub below: Vec<bool>,
    pub rows: Vec<Vec<f64>>,
    pub cols: Vec<Option<ColumnFactor>>,
}

/// φ_k at the nodes below the barrier (empty above it), one table per
/// kernel; kernels sharing an eigen system share the table.
pub(crate) type PhiTable = Arc<Vec<Vec<f64>>>;

pub(crate) fn phi_tables(ks: &[IntervalKernel], nodes: &[f64]) -> Result<Vec<PhiTable>> {
    let mut out: Vec<PhiTable> = Vec::with_capacity(ks.len());
    for (i, k) in ks.iter().enumerate() {
        if let Some(j) = (0..i).find(|&j| Arc::ptr_eq(&ks[j].es, &k.es)) {
            out.push(out[j].clone());
            continue;
        }
        let t = nodes
            .par_iter()
            .map(|&z| {
                if z < k.b {
                    k.eigenfunctions_at(z)
                } else {
                    Ok(Vec::new())
                }
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(Arc::new(t));
    }
    Ok(out)
}

pub(crate) fn node_factors(
    k: &IntervalKernel,
    nodes: &[f64],
    phi: &[Vec<f64>],
    with_rows: bool,
) -> Result<NodeFactors> {
    let below: Vec<bool> = nodes.iter().map(|&z| z < k.b).collect();
    let cols = nodes
        .par_iter()
        .zip(phi)
        .map(|(&z, f)| {
            if z < k.b {
                k.column_from(z, f).map(Some)
            } else {
                Ok(None)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = if with_rows {
        nodes
            .par_iter()
            .zip(phi)
            .map(|(&z, f)| {
                if z < k.b {
                    k.row_from(z, f)
                } else {
                    Ok(Vec::new())
                }
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    Ok(NodeFactors { below, rows, cols })
}

/// (M v)_j δz over the index subset `idx`.
fn apply(
    k: &IntervalKernel,
    f: &NodeFactors,
    nodes: &[f64],
    idx: &[usize],
    v: &[f64],
    dz: f64,
    dir: Direction,
) -> Vec<f64> {
    let xs: Vec<f64> = idx.iter().map(|&l| nodes[l]).collect();
    let c = Contracted::new(idx.iter().zip(v).map(|(&l, &vl)| (f.cols[l].as_ref(), vl)));
    let psi = dir == Direction::AllBelow;
    idx.par_iter()
        .map(|&j| {
            let row = f.below[j].then(|| f.rows[j].as_slice());
            k.apply_row(nodes[j], row, &xs, v, &c, psi) * dz
        })
        .collect()
}

pub(crate) fn terminal(
    k: &IntervalKernel,
    nodes: &[f64],
    phi: &[Vec<f64>],
    dir: Direction,
) -> Vec<f64> {
    nodes
        .iter()
        .zip(phi)
        .map(|(&z, f)| {
            let q = k.q_from(z, f);
            match dir {
                Direction::AllAbove => 1.0 - q,
                Direction::AllBelow => q,
            }
        })
        .collect()
}

fn single_interval(p: &JointProblem, k: &IntervalKernel) -> Result<ProbResult> {
    let q = k.q(p.z0)?;
    let raw = match p.direction {
        Direction::AllAbove => 1.0 - q,
        Direction::AllBelow => q,
    };
    let err = if p.z0 < k.b && k.b != 0.0 {
        crate::fpt::truncation_error_bound(p.z0, k.b, 1.0, k.dt, *k.es.alphas.last().unwrap())?
    } else {
        0.0
    };
    Ok(ProbResult::clamp(raw, err, ErrKind::Bound))
}

pub(crate) fn nested(
    p: &JointProblem,
    g: &Grid,
    s: &KernelSettings,
    dir: Direction,
) -> Result<ProbResult> {
    p.validate()?;
    g.check_width()?;
    let ks = kernels(p, s)?;
    let n = p.n_intervals();
    if n == 1 {
        return single_interval(p, &ks[0]);
    }
    let nodes = g.nodes();
    let fine: Vec<usize> = (0..nodes.len()).collect();
    let coarse: Vec<usize> = (0..nodes.len()).step_by(2).collect();
    let dz = g.delta_z();

    let phi = phi_tables(&ks, &nodes)?;
    let factors = (0..n - 1)
        .map(|i| node_factors(&ks[i], &nodes, &phi[i], i > 0))
        .collect::<Result<Vec<_>>>()?;
    let last = terminal(&ks[n - 1], &nodes, &phi[n - 1], dir);
    let first_row = (p.z0 < ks[0].b)
        .then(|| ks[0].row_factor(p.z0))
        .transpose()?;

    let run = |idx: &[usize], h: f64| -> f64 {
        let mut v: Vec<f64> = idx.iter().map(|&l| last[l]).collect();
        for i in (1..n - 1).rev() {
            v = apply(&ks[i], &factors[i], &nodes, idx, &v, h, dir);
        }
        let xs: Vec<f64> = idx.iter().map(|&l| nodes[l]).collect();
        let c = Contracted::new(
            idx.iter()
                .zip(&v)
                .map(|(&l, &vl)| (factors[0].cols[l].as_ref(), vl)),
        );
        ks[0].apply_row(
            p.z0,
            first_row.as_deref(),
            &xs,
            &v,
            &c,
            dir == Direction::AllBelow,
        ) * h
    };
    let value = run(&fine, dz);
    let rough = run(&coarse, 2.0 * dz);
    Ok(ProbResult::clamp(
        value,
        (value - rough).abs(),
        ErrKind::Quadrature,
    ))
}

/// P(M_1 ≥ b_1, …, M_N ≥ b_N | Z_0 = z0) by nested quadrature. The error is
/// the change against the grid with every other node removed.
pub fn joint_survival_quadrature(
    p: &JointProblem,
    g: &Grid,
    s: &KernelSettings,
) -> Result<ProbResult> {
    if p.direction != Direction::AllAbove {
        return Err(domain(
            "joint_survival_quadrature evaluates the all-above event",
        ));
    }
    nested(p, g, s, Direction::AllAbove)
}

/// P(M_1 < b_1, …, M_N < b_N | Z_0 = z0) by nested quadrature with the
/// complementary kernels.
pub fn joint_distribution_quadrature(
    p: &JointProblem,
    g: &Grid,
    s: &KernelSettings,
) -> Result<ProbResult> {
    if p.direction != Direction::AllBelow {
        return Err(domain(
            "joint_distribution_quadrature evaluates the all-below event",
        ));
    }
    nested(p, g, s, Direction::AllBelow)
}
