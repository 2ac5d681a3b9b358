//! Importance-sampling evaluation of the nested integrals: the state at each
//! intermediate grid time is drawn from a Gaussian proposal instead of being
//! placed on a grid.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use super::kernel::{ColumnFactor, Contracted, IntervalKernel};
use super::{kernels, Direction, JointProblem, KernelSettings};
use crate::error::{domain, Error, Result};
use crate::prob::{ErrKind, ProbResult};

/// Proposal and sample sizes for [`joint_survival_mc_integration`].
#[derive(Debug, Clone, PartialEq)]
pub struct McIntegrationConfig {
    pub proposal_mean: f64,
    pub proposal_var: f64,
    /// Samples per intermediate time; a single entry applies to every level.
    pub sample_sizes: Vec<usize>,
    pub replicates: usize,
    pub seed: u64,
}

impl Default for McIntegrationConfig {
    fn default() -> Self {
        // stationary variance 1/2, standard deviation widened by 1.5
        Self {
            proposal_mean: 0.0,
            proposal_var: 1.125,
            sample_sizes: vec![5000],
            replicates: 20,
            seed: 1,
        }
    }
}

impl McIntegrationConfig {
    fn size(&self, level: usize) -> usize {
        if self.sample_sizes.len() == 1 {
            self.sample_sizes[0]
        } else {
            self.sample_sizes[level]
        }
    }
}

struct Level {
    x: Vec<f64>,
    /// 1 / (L h(x))
    w: Vec<f64>,
    rows: Vec<Option<Vec<f64>>>,
    cols: Vec<Option<ColumnFactor>>,
    /// φ_k of the next interval's eigen system at `x`.
    phi_out: Vec<Vec<f64>>,
}

fn replicate(
    p: &JointProblem,
    ks: &[IntervalKernel],
    cfg: &McIntegrationConfig,
    r: usize,
) -> Result<f64> {
    let n = p.n_intervals();
    let sd = cfg.proposal_var.sqrt();
    let normal = Normal::new(cfg.proposal_mean, sd).map_err(|e| domain(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(r as u64);
    let norm = 1.0 / (sd * (2.0 * std::f64::consts::PI).sqrt());

    // level i holds the state at t_{i+1}, the end of interval i
    let mut levels = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let size = cfg.size(i);
        let x: Vec<f64> = (0..size).map(|_| normal.sample(&mut rng)).collect();
        let w = x
            .iter()
            .map(|&v| {
                let d = (v - cfg.proposal_mean) / sd;
                1.0 / (size as f64 * norm * (-0.5 * d * d).exp())
            })
            .collect();
        let (k_in, k_out) = (&ks[i], &ks[i + 1]);
        let shared = Arc::ptr_eq(&k_in.es, &k_out.es);
        let phi_in = x
            .par_iter()
            .map(|&v| {
                if v < k_in.b {
                    k_in.eigenfunctions_at(v)
                } else {
                    Ok(Vec::new())
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let phi_out = if shared {
            phi_in.clone()
        } else {
            x.par_iter()
                .map(|&v| k_out.eigenfunctions_at(v))
                .collect::<Result<Vec<_>>>()?
        };
        let cols = x
            .par_iter()
            .zip(&phi_in)
            .map(|(&v, f)| {
                if v < k_in.b {
                    k_in.column_from(v, f).map(Some)
                } else {
                    Ok(None)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let rows = if i + 2 < n {
            x.par_iter()
                .zip(&phi_out)
                .map(|(&v, f)| {
                    if v < k_out.b {
                        k_out.row_from(v, f).map(Some)
                    } else {
                        Ok(None)
                    }
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        levels.push(Level {
            x,
            w,
            rows,
            cols,
            phi_out,
        });
    }

    let last = &levels[n - 2];
    let mut v: Vec<f64> = (0..last.x.len())
        .map(|l| (1.0 - ks[n - 1].q_from(last.x[l], &last.phi_out[l])) * last.w[l])
        .collect();
    for i in (1..n - 1).rev() {
        let (from, to) = (&levels[i - 1], &levels[i]);
        let c = Contracted::new(to.cols.iter().map(Option::as_ref).zip(v.iter().copied()));
        v = from
            .x
            .par_iter()
            .enumerate()
            .map(|(j, &z)| {
                ks[i].apply_row(z, from.rows[j].as_deref(), &to.x, &v, &c, false) * from.w[j]
            })
            .collect();
    }
    let first = &levels[0];
    let row0 = (p.z0 < ks[0].b)
        .then(|| ks[0].row_factor(p.z0))
        .transpose()?;
    // per-sample contributions, for the weight-degeneracy check
    let terms: Vec<f64> = (0..first.x.len())
        .map(|l| {
            let c = Contracted::new(std::iter::once((first.cols[l].as_ref(), v[l])));
            ks[0].apply_row(p.z0, row0.as_deref(), &first.x[l..=l], &v[l..=l], &c, false)
        })
        .collect();
    let total: f64 = terms.iter().sum();
    let max = terms.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
    if total > 0.0 && max > 0.5 * total {
        return Err(Error::DegenerateWeights { share: max / total });
    }
    Ok(total)
}

/// Joint survival P(M_1 ≥ b_1, …, M_N ≥ b_N | Z_0 = z0) by importance
/// sampling. The estimate is the mean over independent replicates and `err`
/// their standard error.
pub fn joint_survival_mc_integration(
    p: &JointProblem,
    s: &KernelSettings,
    cfg: &McIntegrationConfig,
) -> Result<ProbResult> {
    if p.direction != Direction::AllAbove {
        return Err(domain(
            "joint_survival_mc_integration evaluates the all-above event",
        ));
    }
    p.validate()?;
    if !(cfg.proposal_var > 0.0) || cfg.replicates < 2 {
        return Err(domain(
            "proposal variance must be positive and at least 2 replicates are needed",
        ));
    }
    let n = p.n_intervals();
    if cfg.sample_sizes.is_empty()
        || (cfg.sample_sizes.len() != 1 && cfg.sample_sizes.len() != n.saturating_sub(1))
        || cfg.sample_sizes.contains(&0)
    {
        return Err(domain(
            "sample_sizes needs one positive entry or one per intermediate time",
        ));
    }
    let ks = kernels(p, s)?;
    if n == 1 {
        return Ok(ProbResult::exact(ks[0].qbar(p.z0)?, ErrKind::McStdErr));
    }
    let reps = (0..cfg.replicates)
        .map(|r| replicate(p, &ks, cfg, r))
        .collect::<Result<Vec<_>>>()?;
    let m = reps.len() as f64;
    let mean = reps.iter().sum::<f64>() / m;
    let var = reps.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    Ok(ProbResult::clamp(mean, (var / m).sqrt(), ErrKind::McStdErr))
}
