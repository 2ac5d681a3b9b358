//! How many expansion terms are needed: the quantile rule, and the analytic
//! bound against the observed truncation error.

use ou_crossing::eigen::build_eigensystem;
use ou_crossing::fpt::{select_truncation, truncation_error_bound};

fn main() -> ou_crossing::Result<()> {
    for (x, b) in [(-2.0, 3.0), (0.0, 1.5), (1.0, 1.5), (1.4, 1.5)] {
        let n = select_truncation(x, b, 0.5, 0.05, 200.0)?;
        println!("x = {x:>4}, b = {b}: {n} terms for the median within 5%");
    }
    let (x, b) = (0.0, 1.5);
    let reference = build_eigensystem(b, 200)?;
    for t in [0.25, 0.5, 1.0] {
        let full = reference.survival_series(x, t)?;
        println!("t = {t}");
        for k in [5, 10, 20, 40] {
            let err = (reference.truncated(k).survival_series(x, t)? - full).abs();
            let bound = truncation_error_bound(x, b, 1.0, t, reference.alphas[k - 1])?;
            println!("  K = {k:>2}: error {err:.3e}, bound {bound:.3e}");
        }
    }
    Ok(())
}
