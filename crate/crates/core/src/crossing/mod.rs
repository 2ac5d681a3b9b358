//! Joint distribution of interval maxima of the standardized OU process.
//!
//! States and times here are standardized (dZ = −Z dt + dW); map a general
//! homogeneous process with [`crate::OuParams::standardize_state`] and
//! time scale λ.

mod kernel;
mod mcint;
mod quadrature;
mod simplified;
mod subintervals;

pub use kernel::{
    bridge_crossing_prob, bridge_kappa, combine, kappa_kernel, psi_kernel, q_tail, qbar_tail,
    transition_density, ColumnFactor, IntervalKernel, KernelForm, SPECTRAL_MIN_DECAY,
};
pub use mcint::{joint_survival_mc_integration, McIntegrationConfig};
pub use quadrature::{joint_distribution_quadrature, joint_survival_quadrature};
pub use simplified::joint_survival_simplified;
pub use subintervals::{interval_crossing_subbarriers, merge_discretizations, Segment};

use crate::eigen::special::norm_cdf;
use crate::error::{domain, Error, Result};

/// Which joint event is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Every interval maximum reaches its barrier.
    AllAbove,
    /// Every interval maximum stays below its barrier.
    AllBelow,
}

/// Barrier levels b_i on the intervals (t_{i−1}, t_i] of a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct JointProblem {
    pub z0: f64,
    /// t_0 = 0 < t_1 < … < t_N.
    pub t_grid: Vec<f64>,
    pub barriers: Vec<f64>,
    pub direction: Direction,
}

impl JointProblem {
    pub fn new(
        z0: f64,
        t_grid: Vec<f64>,
        barriers: Vec<f64>,
        direction: Direction,
    ) -> Result<Self> {
        let p = Self {
            z0,
            t_grid,
            barriers,
            direction,
        };
        p.validate()?;
        Ok(p)
    }

    /// Intervals of unit length starting at time 0.
    pub fn unit_intervals(z0: f64, barriers: &[f64], direction: Direction) -> Result<Self> {
        let t_grid = (0..=barriers.len()).map(|i| i as f64).collect();
        Self::new(z0, t_grid, barriers.to_vec(), direction)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.barriers.len();
        if n == 0 || self.t_grid.len() != n + 1 {
            return Err(domain("need N >= 1 barriers and N + 1 grid times"));
        }
        if self.t_grid[0] != 0.0 || self.t_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(domain("time grid must start at 0 and increase strictly"));
        }
        if !self.z0.is_finite() || self.barriers.iter().any(|b| !b.is_finite()) {
            return Err(domain("states and barriers must be finite"));
        }
        Ok(())
    }

    pub fn n_intervals(&self) -> usize {
        self.barriers.len()
    }

    /// Length of interval i (0-based).
    pub fn dt(&self, i: usize) -> f64 {
        self.t_grid[i + 1] - self.t_grid[i]
    }
}

/// Uniform state grid with L nodes on [z_min, z_max].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub z_min: f64,
    pub z_max: f64,
    pub l: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            z_min: -5.0,
            z_max: 5.0,
            l: 2001,
        }
    }
}

impl Grid {
    pub fn new(z_min: f64, z_max: f64, l: usize) -> Result<Self> {
        if !(z_min < z_max) || l < 2 {
            return Err(domain(format!(
                "invalid grid [{z_min}, {z_max}] with {l} nodes"
            )));
        }
        Ok(Self { z_min, z_max, l })
    }

    pub fn delta_z(&self) -> f64 {
        (self.z_max - self.z_min) / (self.l - 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.delta_z();
        (0..self.l).map(|i| self.z_min + i as f64 * h).collect()
    }

    /// Refuses grids that leave more than 1e-8 of the stationary law N(0, 1/2) outside.
    pub fn check_width(&self) -> Result<()> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mass = norm_cdf(self.z_min / s) + norm_cdf(-self.z_max / s);
        if mass > 1e-8 {
            return Err(Error::GridTooNarrow {
                mass,
                z_min: self.z_min,
                z_max: self.z_max,
            });
        }
        Ok(())
    }
}

/// Numerical settings shared by the kernel-based methods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSettings {
    /// Eigen terms per barrier.
    pub k_terms: usize,
    /// Inner quadrature size; J/8 initial panels.
    pub inner_j: usize,
    /// Add the leading-order correction for the eigen terms beyond `k_terms`.
    pub tail_correction: bool,
}

impl Default for KernelSettings {
    fn default() -> Self {
        Self {
            k_terms: 40,
            inner_j: 64,
            tail_correction: true,
        }
    }
}

impl KernelSettings {
    pub(crate) fn kernel(&self, b: f64, dt: f64) -> Result<IntervalKernel> {
        Ok(IntervalKernel::new(b, dt, self.k_terms, self.inner_j)?.with_tail(self.tail_correction))
    }
}

fn kernels(p: &JointProblem, s: &KernelSettings) -> Result<Vec<IntervalKernel>> {
    (0..p.n_intervals())
        .map(|i| s.kernel(p.barriers[i], p.dt(i)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn problem_validation() {
        assert!(JointProblem::unit_intervals(0.0, &[], Direction::AllAbove).is_err());
        assert!(JointProblem::new(
            0.0,
            vec![0.0, 1.0, 1.0],
            vec![1.0, 1.0],
            Direction::AllAbove
        )
        .is_err());
        let p = JointProblem::unit_intervals(0.0, &[1.0, 2.0], Direction::AllBelow).unwrap();
        assert_eq!(p.t_grid, vec![0.0, 1.0, 2.0]);
    }

    #[test]
    fn grid_width_check() {
        assert!(Grid::default().check_width().is_ok());
        assert!(matches!(
            Grid::new(-3.0, 3.0, 100).unwrap().check_width(),
            Err(Error::GridTooNarrow { .. })
        ));
        assert!((Grid::default().delta_z() - 0.005).abs() < 1e-15);
    }
}
