//! Direct simulation with exact OU steps. Coarser step counts reuse the
//! finest paths, so the estimates increase with M path by path.

use ou_crossing::crossing::{Direction, JointProblem};
use ou_crossing::directmc::{direct_mc_joint_levels, mc_error_ratio, MCConfig};
use ou_crossing::OuParams;

fn main() -> ou_crossing::Result<()> {
    let p = JointProblem::unit_intervals(0.0, &[1.0, 1.0], Direction::AllAbove)?;
    let cfg = MCConfig {
        n_paths: 50_000,
        n_steps: 2000,
        n_sets: 1,
        seed: 42,
    };
    let levels = [250, 500, 1000, 2000];
    let rs = direct_mc_joint_levels(&p, &[OuParams::standard(); 2], &cfg, &levels)?;
    for (m, r) in levels.iter().zip(&rs) {
        println!("M = {m:>4}: {:.5} ± {:.5}", r.prob, r.err);
    }
    let last = rs.last().unwrap();
    let predicted = mc_error_ratio(rs[0].prob, last.prob, last.err)?;
    println!("predicted error at M = 250 from M = 2000: {predicted:.5}");
    Ok(())
}
