//! Eigenvalues of the killed standardized OU generator, the expansion
//! coefficients, and the large-index approximation.

use ou_crossing::eigen::{asymptotic_eigenvalue, build_eigensystem};

fn main() -> ou_crossing::Result<()> {
    for b in [0.5, 1.5, 3.0] {
        let es = build_eigensystem(b, 41)?;
        println!("barrier {b}");
        for k in [0, 1, 2, 10, 20, 40] {
            let approx = asymptotic_eigenvalue(b, k);
            println!(
                "  k={k:>2} alpha={:>12.8} approx={:>12.8} rel={:>9.2e} c_k={:>12.4e}",
                es.alphas[k],
                approx,
                (approx - es.alphas[k]).abs() / es.alphas[k],
                es.coeffs[k]
            );
        }
    }
    Ok(())
}
