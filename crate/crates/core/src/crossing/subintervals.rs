//! Time grids that do not line up: a parameter grid and a barrier grid are
//! merged into one, and a single barrier spanning several parameter pieces
//! is handled by chaining no-crossing kernels over the pieces.

use rayon::prelude::*;

use super::kernel::transition_density;
use super::{Direction, Grid, JointProblem, KernelSettings};
use crate::error::{domain, Result};

/// One piece of a merged grid with the indices of the parameter and barrier
/// intervals it lies in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub t0: f64,
    pub t1: f64,
    pub param_index: usize,
    pub barrier_index: usize,
}

fn check_grid(g: &[f64], name: &str) -> Result<()> {
    if g.len() < 2 || g.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(domain(format!(
            "{name} grid needs at least two strictly increasing times"
        )));
    }
    Ok(())
}

/// Union of two time grids sharing their endpoints, as segments tagged with
/// the interval of each input grid they belong to.
pub fn merge_discretizations(param_grid: &[f64], barrier_grid: &[f64]) -> Result<Vec<Segment>> {
    check_grid(param_grid, "parameter")?;
    check_grid(barrier_grid, "barrier")?;
    let eps = 1e-12 * (1.0 + param_grid[param_grid.len() - 1].abs());
    if (param_grid[0] - barrier_grid[0]).abs() > eps
        || (param_grid[param_grid.len() - 1] - barrier_grid[barrier_grid.len() - 1]).abs() > eps
    {
        return Err(domain("grids must share their endpoints"));
    }
    let mut all: Vec<f64> = param_grid.iter().chain(barrier_grid).copied().collect();
    all.sort_by(f64::total_cmp);
    all.dedup_by(|a, b| (*a - *b).abs() <= eps);
    let locate = |g: &[f64], t: f64| {
        g.partition_point(|&x| x <= t + eps)
            .saturating_sub(1)
            .min(g.len() - 2)
    };
    Ok(all
        .windows(2)
        .map(|w| Segment {
            t0: w[0],
            t1: w[1],
            param_index: locate(param_grid, w[0]),
            barrier_index: locate(barrier_grid, w[0]),
        })
        .collect())
}

/// Probability that the standardized process reaches the barrier during
/// `[0, sub_times[m]]` when piece j = `(sub_times[j−1], sub_times[j]]` has its own
/// standardized barrier `barriers[j−1]`. With `z_next` the probability is
/// conditional on the end state.
pub fn interval_crossing_subbarriers(
    z: f64,
    z_next: Option<f64>,
    sub_times: &[f64],
    barriers: &[f64],
    g: &Grid,
    s: &KernelSettings,
) -> Result<f64> {
    check_grid(sub_times, "sub-interval")?;
    if barriers.len() + 1 != sub_times.len() {
        return Err(domain("need one barrier per sub-interval"));
    }
    let Some(z_end) = z_next else {
        let t_grid = sub_times.iter().map(|t| t - sub_times[0]).collect();
        let p = JointProblem::new(z, t_grid, barriers.to_vec(), Direction::AllBelow)?;
        let below = super::quadrature::nested(&p, g, s, Direction::AllBelow)?;
        return Ok(1.0 - below.prob);
    };
    let ks = (0..barriers.len())
        .map(|j| s.kernel(barriers[j], sub_times[j + 1] - sub_times[j]))
        .collect::<Result<Vec<_>>>()?;
    let total = sub_times[sub_times.len() - 1] - sub_times[0];
    let dens = transition_density(z, z_end, total);
    let m = ks.len();
    if m == 1 {
        return Ok((1.0 - ks[0].psi(z, z_end)? / dens).clamp(0.0, 1.0));
    }
    g.check_width()?;
    let nodes = g.nodes();
    let dz = g.delta_z();
    let mut v = nodes
        .par_iter()
        .map(|&x| ks[m - 1].psi(x, z_end))
        .collect::<Result<Vec<_>>>()?;
    for j in (1..m - 1).rev() {
        let k = &ks[j];
        let cols = nodes
            .par_iter()
            .map(|&x| {
                if x < k.b {
                    k.column_factor(x).map(Some)
                } else {
                    Ok(None)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        v = nodes
            .par_iter()
            .map(|&y| {
                if y >= k.b {
                    return Ok(0.0);
                }
                let a = k.row_factor(y)?;
                let s: f64 = nodes
                    .iter()
                    .zip(&cols)
                    .zip(&v)
                    .filter_map(|((&x, c), vl)| {
                        c.as_ref().map(|c| k.psi_factored(y, x, &a, c) * vl)
                    })
                    .sum();
                Ok(s * dz)
            })
            .collect::<Result<Vec<_>>>()?;
    }
    let stay: f64 = nodes
        .par_iter()
        .zip(&v)
        .map(|(&x, vl)| ks[0].psi(z, x).map(|p| p * vl))
        .collect::<Result<Vec<_>>>()?
        .iter()
        .sum::<f64>()
        * dz;
    Ok((1.0 - stay / dens).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_counts() {
        let same = merge_discretizations(&[0.0, 1.0, 2.0], &[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(same.len(), 2);
        assert_eq!(same[1].param_index, 1);
        let segs =
            merge_discretizations(&[0.0, 0.35, 0.7, 1.0], &[0.0, 0.2, 0.5, 0.8, 1.0]).unwrap();
        assert_eq!(segs.len(), 6);
        assert_eq!(
            segs[2],
            Segment {
                t0: 0.35,
                t1: 0.5,
                param_index: 1,
                barrier_index: 1
            }
        );
        assert!(merge_discretizations(&[0.0, 1.0], &[0.0, 2.0]).is_err());
    }
}
