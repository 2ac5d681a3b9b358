//! Quadrature helpers: Gauss-Legendre rules and adaptive Gauss-Kronrod (7/15)
//! integration of vector-valued integrands.

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Panel {
    a: f64,
    b: f64,
    value: Vec<f64>,
    err: f64,
}

fn gk15<F: FnMut(f64, &mut [f64])>(
    f: &mut F,
    a: f64,
    b: f64,
    dim: usize,
    buf: &mut [f64],
) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kron = vec![0.0; dim];
    let mut gauss = vec![0.0; dim];
    f(c, buf);
    for d in 0..dim {
        kron[d] = WGK[7] * buf[d];
        gauss[d] = WG[3] * buf[d];
    }
    for j in 0..7 {
        let dx = h * XGK[j];
        for x in [c - dx, c + dx] {
            f(x, buf);
            for d in 0..dim {
                kron[d] += WGK[j] * buf[d];
                if j % 2 == 1 {
                    gauss[d] += WG[j / 2] * buf[d];
                }
            }
        }
    }
    let mut err: f64 = 0.0;
    for d in 0..dim {
        kron[d] *= h;
        gauss[d] *= h;
        err = err.max((kron[d] - gauss[d]).abs());
    }
    Panel {
        a,
        b,
        value: kron,
        err,
    }
}

/// Tolerances and panel budget for [`integrate_vec`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-14,
            rel: 1e-11,
            max_panels: 2000,
        }
    }
}

/// Integrates a vector-valued `f` over the partition given by `breaks`
/// (sorted, at least two points), bisecting the worst panel until the summed
/// Kronrod-Gauss difference meets the tolerance. `f(x, out)` fills `out`.
///
/// Returns the integral and the final error estimate (max-norm).
pub fn integrate_vec<F: FnMut(f64, &mut [f64])>(
    mut f: F,
    breaks: &[f64],
    dim: usize,
    tol: Tolerance,
) -> Result<(Vec<f64>, f64)> {
    let mut buf = vec![0.0; dim];
    let mut panels: Vec<Panel> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| gk15(&mut f, w[0], w[1], dim, &mut buf))
        .collect();
    loop {
        let mut total = vec![0.0; dim];
        let mut err = 0.0;
        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            for d in 0..dim {
                total[d] += p.value[d];
            }
            err += p.err;
            if p.err > panels[worst].err {
                worst = i;
            }
        }
        let scale = total.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if err <= tol.abs.max(tol.rel * scale) {
            return Ok((total, err));
        }
        if panels.len() >= tol.max_panels {
            if !err.is_finite() {
                return Err(Error::NoConvergence("non-finite integrand".into()));
            }
            return Ok((total, err));
        }
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            panels.push(p);
            return Ok((total, err));
        }
        panels.push(gk15(&mut f, p.a, mid, dim, &mut buf));
        panels.push(gk15(&mut f, mid, p.b, dim, &mut buf));
    }
}

/// Scalar convenience wrapper around [`integrate_vec`].
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<(f64, f64)> {
    let (v, e) = integrate_vec(|x, out| out[0] = f(x), breaks, 1, tol)?;
    Ok((v[0], e))
}

/// Geometric breakpoints on [a, b] clustering toward `a`: a, a + (b-a)/2^(n-1), ..., b.
pub fn geometric_breaks(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    let mut out = vec![a];
    for j in (0..n).rev() {
        out.push(a + (b - a) * 0.5_f64.powi(j as i32));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let (v, _) = integrate(
            |x| 1.0 / x.sqrt(),
            &geometric_breaks(0.0, 1.0, 12),
            Tolerance::default(),
        )
        .unwrap();
        assert!((v - 2.0).abs() < 1e-6);
        let (v, _) = integrate(|x| (-x * x).exp(), &[-10.0, 10.0], Tolerance::default()).unwrap();
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }
}
