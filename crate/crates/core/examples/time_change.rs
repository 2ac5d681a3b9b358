//! Time change of an OU process with a seasonal mean: the coefficients α,
//! β, γ and the barrier seen by the standardized process.

use ou_crossing::transform::{
    method_selector, seasonal_beta, seasonal_beta0, solve_transform, transformed_barrier,
    TimeFunction, TimeFunctions,
};

fn main() -> ou_crossing::Result<()> {
    let funcs = TimeFunctions::seasonal(1.0, 10.0, 0.0, 1.0, 1.0);
    let beta0 = seasonal_beta0(1.0, 10.0, 0.0, 1.0, 1.0);
    let tr = solve_transform(&funcs, 1.0, beta0, 2.0, None)?;
    let barrier = TimeFunction::smooth(|t| 1.0 + 0.65 * (10.0 * t + 10f64.atan()).sin());
    let g = transformed_barrier(&tr, &barrier);
    println!(
        "{:>5} {:>8} {:>10} {:>10} {:>8} {:>8}",
        "s", "alpha", "beta", "exact", "gamma", "g"
    );
    for i in 0..=8 {
        let s = 0.25 * i as f64;
        println!(
            "{s:>5} {:>8.5} {:>10.6} {:>10.6} {:>8.4} {:>8.4}",
            tr.alpha_at(s),
            tr.beta_at(s),
            seasonal_beta(1.0, 10.0, 0.0, 1.0, 1.0, s),
            tr.gamma_at(s),
            g.eval(s)
        );
    }
    let sel = method_selector(&funcs, &barrier, (0.0, 2.0), beta0)?;
    println!(
        "verdict {} ({:.3} vs {:.3})",
        sel.method.as_str(),
        sel.ratio,
        sel.threshold
    );
    Ok(())
}
