//! Survival, density and hazard of the first passage of a homogeneous OU
//! process through a fixed barrier.

use ou_crossing::fpt::{default_truncation, fpt_density, fpt_survival, hazard_rate, standardize};
use ou_crossing::OuParams;

fn main() -> ou_crossing::Result<()> {
    let params = OuParams::new(0.5, 2.0, 0.8)?;
    let (x, b) = (0.0, 0.9);
    let sp = standardize(&params, x, b);
    let k = default_truncation(sp.x_tilde, sp.b_tilde)?;
    println!(
        "standardized start {:.4}, barrier {:.4}, K = {k}",
        sp.x_tilde, sp.b_tilde
    );
    println!(
        "{:>6} {:>12} {:>12} {:>12} {:>10}",
        "t", "survival", "bound", "density", "hazard"
    );
    for t in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let s = fpt_survival(&params, x, b, t, k)?;
        let d = fpt_density(&params, x, b, t, k)?;
        let h = hazard_rate(&params, x, b, t, k)?;
        println!(
            "{t:>6} {:>12.8} {:>12.2e} {:>12.8} {:>10.6}",
            s.prob, s.err, d.value, h
        );
    }
    Ok(())
}
