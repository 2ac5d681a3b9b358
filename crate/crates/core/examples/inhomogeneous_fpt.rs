//! Survival of an inhomogeneous OU process below a moving barrier through
//! the time change and a piecewise-constant transformed barrier.

use ou_crossing::crossing::{Grid, KernelSettings};
use ou_crossing::fpt::fpt_survival;
use ou_crossing::transform::{inhomo_fpt_survival, TimeFunction, TimeFunctions};
use ou_crossing::OuParams;

fn main() -> ou_crossing::Result<()> {
    let grid = Grid::new(-5.0, 5.0, 801)?;
    let ks = KernelSettings::default();

    // constant coefficients: the time change reproduces the homogeneous answer
    let funcs = TimeFunctions::constant(0.3, 1.5, 0.9);
    let flat = TimeFunction::constant(0.8);
    let via = inhomo_fpt_survival(&funcs, &flat, 0.0, 1.0, 1, &grid, &ks)?;
    let direct = fpt_survival(&OuParams::new(0.3, 1.5, 0.9)?, 0.0, 0.8, 1.0, 40)?;
    println!(
        "constant case: {:.8} via time change, {:.8} direct",
        via.prob, direct.prob
    );

    let funcs = TimeFunctions::seasonal(1.0, 10.0, 0.0, 1.0, 1.0);
    let barrier = TimeFunction::smooth(|t| 1.0 + 0.65 * (10.0 * t + 10f64.atan()).sin());
    for n in [4, 8, 16] {
        let r = inhomo_fpt_survival(&funcs, &barrier, 0.0, 1.0, n, &grid, &ks)?;
        println!("seasonal, {n:>2} pieces: {:.5}", r.prob);
    }
    Ok(())
}
