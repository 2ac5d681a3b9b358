//! Direct Monte Carlo: simulate paths with exact OU steps and record the
//! discrete interval maxima. The discrete maximum misses excursions between
//! steps, so the crossing probability is biased low and the bias shrinks as
//! the step count M grows.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::crossing::{Direction, JointProblem};
use crate::error::{domain, Result};
use crate::fpt::OuParams;
use crate::prob::{ErrKind, ProbResult};

/// Paths per random stream. Streams are tied to path blocks, not threads,
/// so results do not depend on the thread count.
const BLOCK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCConfig {
    pub n_paths: usize,
    /// Steps M over the whole horizon t_N.
    pub n_steps: usize,
    /// Number of sets NB; with NB > 1 the error is the spread of set means.
    pub n_sets: usize,
    pub seed: u64,
}

impl Default for MCConfig {
    fn default() -> Self {
        Self {
            n_paths: 100_000,
            n_steps: 2000,
            n_sets: 1,
            seed: 1,
        }
    }
}

/// One exact step of dX = (μ − λX) dt + σ dW over `delta` driven by the
/// standard normal `gaussian`.
pub fn ou_exact_step(x: f64, params: &OuParams, delta: f64, gaussian: f64) -> f64 {
    let e = (-params.lambda * delta).exp();
    let var = -params.sigma * params.sigma * (-2.0 * params.lambda * delta).exp_m1()
        / (2.0 * params.lambda);
    x * e + params.mean_level() * (1.0 - e) + var.sqrt() * gaussian
}

/// Step indices 1..=M at which each interval ends.
fn interval_ends(p: &JointProblem, m: usize) -> Result<Vec<usize>> {
    let horizon = p.t_grid[p.n_intervals()];
    let delta = horizon / m as f64;
    p.t_grid[1..]
        .iter()
        .map(|&t| {
            let k = t / delta;
            let r = k.round();
            if (k - r).abs() > 1e-6 || r < 1.0 {
                Err(domain(format!(
                    "interval end {t} is not a multiple of the step {delta}"
                )))
            } else {
                Ok(r as usize)
            }
        })
        .collect::<Result<Vec<_>>>()
}

/// Per-level hit counts for one block of paths.
struct Tally {
    hits: Vec<u64>,
    /// Hits split by set, [set][level].
    set_hits: Vec<Vec<u64>>,
}

/// Direct MC estimate of the joint event for the standardized process.
pub fn direct_mc_joint(p: &JointProblem, cfg: &MCConfig) -> Result<ProbResult> {
    let params = vec![OuParams::standard(); p.n_intervals()];
    Ok(direct_mc_joint_levels(p, &params, cfg, &[cfg.n_steps])?[0])
}

/// Direct MC with piecewise-constant parameters: `params[i]` applies on
/// interval i, and states and barriers are in the units of Y.
pub fn direct_mc_joint_piecewise(
    p: &JointProblem,
    params: &[OuParams],
    cfg: &MCConfig,
) -> Result<ProbResult> {
    Ok(direct_mc_joint_levels(p, params, cfg, &[cfg.n_steps])?[0])
}

/// Estimates at several step counts from the same paths. Every entry of
/// `levels` must divide `cfg.n_steps`; the coarse estimates read the fine
/// path at every (M/m)-th step, which is an exact coarse path, so the
/// estimates share their random numbers.
pub fn direct_mc_joint_levels(
    p: &JointProblem,
    params: &[OuParams],
    cfg: &MCConfig,
    levels: &[usize],
) -> Result<Vec<ProbResult>> {
    p.validate()?;
    if params.len() != p.n_intervals() {
        return Err(domain("need one parameter set per interval"));
    }
    for q in params {
        q.validate()?;
    }
    if cfg.n_paths == 0 || cfg.n_sets == 0 || cfg.n_sets > cfg.n_paths || cfg.n_steps == 0 {
        return Err(domain("need n_paths >= n_sets >= 1 and n_steps >= 1"));
    }
    if levels.is_empty() || levels.iter().any(|&m| m == 0 || cfg.n_steps % m != 0) {
        return Err(domain("every level must divide n_steps"));
    }
    let m_fine = cfg.n_steps;
    let ends = interval_ends(p, m_fine)?;
    let strides: Vec<usize> = levels.iter().map(|&m| m_fine / m).collect();
    for (&s, &m) in strides.iter().zip(levels) {
        if ends.iter().any(|e| e % s != 0) {
            return Err(domain(format!(
                "interval ends do not fall on the grid of {m} steps"
            )));
        }
    }
    let delta = p.t_grid[p.n_intervals()] / m_fine as f64;
    // exact-step coefficients per interval
    let coef: Vec<(f64, f64, f64)> = params
        .iter()
        .map(|q| {
            let e = (-q.lambda * delta).exp();
            let sd =
                (-q.sigma * q.sigma * (-2.0 * q.lambda * delta).exp_m1() / (2.0 * q.lambda)).sqrt();
            (e, q.mean_level() * (1.0 - e), sd)
        })
        .collect();
    let n_levels = levels.len();
    let above = p.direction == Direction::AllAbove;
    let per_set = cfg.n_paths.div_ceil(cfg.n_sets);
    let n_blocks = cfg.n_paths.div_ceil(BLOCK);

    let tallies: Vec<Tally> = (0..n_blocks)
        .into_par_iter()
        .map(|blk| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(blk as u64);
            let mut tally = Tally {
                hits: vec![0; n_levels],
                set_hits: Vec::new(),
            };
            let start = blk * BLOCK;
            let stop = (start + BLOCK).min(cfg.n_paths);
            let mut alive = vec![true; n_levels];
            let mut maxima = vec![f64::NEG_INFINITY; n_levels];
            for path in start..stop {
                alive.fill(true);
                let mut x = p.z0;
                let mut step = 0;
                'intervals: for (i, &end) in ends.iter().enumerate() {
                    let (e, shift, sd) = coef[i];
                    maxima.fill(f64::NEG_INFINITY);
                    while step < end {
                        let g: f64 = StandardNormal.sample(&mut rng);
                        x = x * e + shift + sd * g;
                        step += 1;
                        for (l, &s) in strides.iter().enumerate() {
                            if step % s == 0 && x > maxima[l] {
                                maxima[l] = x;
                            }
                        }
                    }
                    let b = p.barriers[i];
                    let mut any = false;
                    for l in 0..n_levels {
                        let ok = if above { maxima[l] >= b } else { maxima[l] < b };
                        alive[l] &= ok;
                        any |= alive[l];
                    }
                    if !any {
                        break 'intervals;
                    }
                }
                let set = path / per_set;
                let rel = set - start / per_set;
                while tally.set_hits.len() <= rel {
                    tally.set_hits.push(vec![0; n_levels]);
                }
                for l in 0..n_levels {
                    if alive[l] {
                        tally.hits[l] += 1;
                        tally.set_hits[rel][l] += 1;
                    }
                }
            }
            tally
        })
        .collect();

    let mut hits = vec![0u64; n_levels];
    let mut set_hits = vec![vec![0u64; n_levels]; cfg.n_sets];
    for (blk, t) in tallies.iter().enumerate() {
        let first_set = blk * BLOCK / per_set;
        for l in 0..n_levels {
            hits[l] += t.hits[l];
        }
        for (j, sh) in t.set_hits.iter().enumerate() {
            for l in 0..n_levels {
                set_hits[first_set + j][l] += sh[l];
            }
        }
    }
    let n = cfg.n_paths as f64;
    Ok((0..n_levels)
        .map(|l| {
            let prob = hits[l] as f64 / n;
            let err = if cfg.n_sets == 1 {
                (prob * (1.0 - prob) / n).sqrt()
            } else {
                let means: Vec<f64> = (0..cfg.n_sets)
                    .map(|s| {
                        let size = per_set.min(cfg.n_paths - s * per_set);
                        set_hits[s][l] as f64 / size as f64
                    })
                    .collect();
                let k = means.len() as f64;
                let mean = means.iter().sum::<f64>() / k;
                let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (k - 1.0);
                (var / k).sqrt()
            };
            ProbResult::exact(prob, ErrKind::McStdErr).with_err(err)
        })
        .collect())
}

/// Predicted standard error of a direct-MC estimate p1 from one with the
/// same path count at p2 ≥ p1: err2 · √(p1(1 − p1) / (p2(1 − p2))).
pub fn mc_error_ratio(p1: f64, p2: f64, err2: f64) -> Result<f64> {
    if !(p2 > 0.0 && p2 < 1.0) {
        return Err(domain("p2 must lie strictly inside (0, 1)"));
    }
    if !(0.0..=p2).contains(&p1) || !(err2 >= 0.0) {
        return Err(domain("need 0 <= p1 <= p2 and err2 >= 0"));
    }
    let a = p2 - p1;
    Ok(((p2 - a) / p2 * (1.0 - (p2 - a)) / (1.0 - p2)).sqrt() * err2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_level_is_fixed_point() {
        let q = OuParams::new(1.0, 1.0, 0.7).unwrap();
        assert!((ou_exact_step(1.0, &q, 0.3, 0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn small_step_matches_euler() {
        let q = OuParams::new(0.4, 1.7, 0.9).unwrap();
        let (x, d, g) = (0.8, 1e-6, 0.37);
        let euler = x + (q.mu - q.lambda * x) * d + q.sigma * d.sqrt() * g;
        assert!((ou_exact_step(x, &q, d, g) - euler).abs() < 1e-8);
    }

    #[test]
    fn barriers_below_start_always_cross() {
        let p = JointProblem::unit_intervals(0.0, &[-9.0, -9.0], Direction::AllAbove).unwrap();
        let r = direct_mc_joint(
            &p,
            &MCConfig {
                n_paths: 500,
                n_steps: 100,
                n_sets: 1,
                seed: 3,
            },
        )
        .unwrap();
        assert_eq!(r.prob, 1.0);
    }

    #[test]
    fn same_seed_same_answer() {
        let p = JointProblem::unit_intervals(0.0, &[0.5, 0.5], Direction::AllAbove).unwrap();
        let cfg = MCConfig {
            n_paths: 10_000,
            n_steps: 200,
            n_sets: 4,
            seed: 11,
        };
        assert_eq!(
            direct_mc_joint(&p, &cfg).unwrap(),
            direct_mc_joint(&p, &cfg).unwrap()
        );
    }

    #[test]
    fn coarse_levels_never_exceed_fine() {
        let p = JointProblem::unit_intervals(0.0, &[1.0, 1.0], Direction::AllAbove).unwrap();
        let cfg = MCConfig {
            n_paths: 20_000,
            n_steps: 400,
            n_sets: 1,
            seed: 5,
        };
        let r = direct_mc_joint_levels(&p, &[OuParams::standard(); 2], &cfg, &[50, 100, 200, 400])
            .unwrap();
        assert!(r.windows(2).all(|w| w[0].prob <= w[1].prob));
        assert!(direct_mc_joint_levels(&p, &[OuParams::standard(); 2], &cfg, &[300]).is_err());
    }

    #[test]
    fn error_ratio_cases() {
        assert!((mc_error_ratio(0.3, 0.3, 0.01).unwrap() - 0.01).abs() < 1e-15);
        assert!(mc_error_ratio(0.2, 0.3, 0.01).unwrap() < 0.01);
        assert!(mc_error_ratio(0.6, 0.7, 0.01).unwrap() > 0.01);
        assert!(mc_error_ratio(0.2, 1.0, 0.01).is_err());
    }
}
