//! Barriers and parameters on different time grids: merging the grids and
//! the crossing probability of one barrier interval split into pieces.

use ou_crossing::crossing::{
    interval_crossing_subbarriers, merge_discretizations, Grid, KernelSettings,
};

fn main() -> ou_crossing::Result<()> {
    let segments = merge_discretizations(&[0.0, 0.4, 1.0], &[0.0, 0.25, 0.7, 1.0])?;
    for s in &segments {
        println!(
            "[{:.2}, {:.2}] parameter piece {} barrier piece {}",
            s.t0, s.t1, s.param_index, s.barrier_index
        );
    }
    let grid = Grid::new(-5.0, 5.0, 801)?;
    let ks = KernelSettings::default();
    let times = [0.0, 0.4, 1.0];
    let free = interval_crossing_subbarriers(0.0, None, &times, &[1.2, 0.9], &grid, &ks)?;
    let pinned = interval_crossing_subbarriers(0.0, Some(0.5), &times, &[1.2, 0.9], &grid, &ks)?;
    println!("crossing probability {free:.6}; given the end state 0.5: {pinned:.6}");
    Ok(())
}
