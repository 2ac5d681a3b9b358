//! Importance-sampling evaluation of the joint crossing probability,
//! compared with nested quadrature.

use ou_crossing::crossing::{
    joint_survival_mc_integration, joint_survival_quadrature, Direction, Grid, JointProblem,
    KernelSettings, McIntegrationConfig,
};

fn main() -> ou_crossing::Result<()> {
    let ks = KernelSettings::default();
    let cfg = McIntegrationConfig {
        sample_sizes: vec![2000],
        replicates: 10,
        ..Default::default()
    };
    for barriers in [vec![1.0, 1.0], vec![2.0, 2.0, 2.0]] {
        let p = JointProblem::unit_intervals(0.0, &barriers, Direction::AllAbove)?;
        let mc = joint_survival_mc_integration(&p, &ks, &cfg)?;
        let quad = joint_survival_quadrature(&p, &Grid::default(), &ks)?;
        println!(
            "{barriers:?}: mc-integration {:.5e} ± {:.1e}, quadrature {:.5e}",
            mc.prob, mc.err, quad.prob
        );
    }
    Ok(())
}
