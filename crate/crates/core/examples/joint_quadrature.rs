//! Probability that the maxima over two consecutive unit intervals both
//! exceed their barriers, by nested quadrature and by the product form.

use ou_crossing::crossing::{
    joint_distribution_quadrature, joint_survival_quadrature, joint_survival_simplified, Direction,
    Grid, JointProblem, KernelSettings,
};

fn main() -> ou_crossing::Result<()> {
    let grid = Grid::default();
    let ks = KernelSettings::default();
    for (b1, b2) in [(1.0, 1.0), (2.0, 3.0), (3.0, 3.0)] {
        let p = JointProblem::unit_intervals(0.0, &[b1, b2], Direction::AllAbove)?;
        let nested = joint_survival_quadrature(&p, &grid, &ks)?;
        let product = joint_survival_simplified(&p, &grid, &ks)?;
        println!(
            "b = ({b1}, {b2}): nested {:.6e} ± {:.1e}, product {:.6e}",
            nested.prob, nested.err, product.prob
        );
    }
    let p = JointProblem::new(
        0.0,
        vec![0.0, 0.5, 1.5, 2.0],
        vec![1.0, 1.5, 1.0],
        Direction::AllBelow,
    )?;
    let r = joint_distribution_quadrature(&p, &grid, &ks)?;
    println!(
        "all maxima below (1, 1.5, 1) on uneven intervals: {:.6}",
        r.prob
    );
    Ok(())
}
