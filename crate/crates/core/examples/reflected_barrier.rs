//! First-passage density with a reflecting lower barrier. As the reflecting
//! level moves down the curve approaches the one without reflection.

use ou_crossing::eigen::global_cache;
use ou_crossing::fpt::{fpt_density, fpt_density_reflected};
use ou_crossing::OuParams;

fn main() -> ou_crossing::Result<()> {
    let (x, b) = (0.0, 1.5);
    for a in [-1.0, -2.0, -3.0] {
        let es = global_cache().get_reflected(b, a, 6)?;
        let gaps: Vec<String> = es
            .alphas
            .windows(2)
            .map(|w| format!("{:.4}", w[1] - w[0]))
            .collect();
        println!("a = {a}: eigenvalue gaps {}", gaps.join(" "));
    }
    println!(
        "{:>5} {:>10} {:>10} {:>10} {:>10}",
        "t", "a=-1", "a=-2", "a=-3", "none"
    );
    for t in [0.25, 0.5, 1.0, 2.0, 3.0] {
        let r: Vec<f64> = [-1.0, -2.0, -3.0]
            .iter()
            .map(|&a| fpt_density_reflected(x, b, a, t, 40).map(|d| d.value))
            .collect::<ou_crossing::Result<_>>()?;
        let free = fpt_density(&OuParams::standard(), x, b, t, 40)?.value;
        println!(
            "{t:>5} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            r[0], r[1], r[2], free
        );
    }
    Ok(())
}
