//! Built-in experiment setups. Each preset only fills in defaults, so any
//! key can still be overridden from a config file or a flag.

use crate::crossing::{Direction, JointProblem};
use crate::eigen::{build_eigensystem, global_cache};
use crate::error::{Error, Result};
use crate::fpt::{fpt_density_reflected, select_truncation, truncation_error_bound};
use crate::transform::seasonal_beta0;

use super::commands::{cmd_fpt, cmd_joint, cmd_transform, run_methods, wall_cell, JointKnobs};
use super::config::Settings;
use super::output::Table;

pub const PRESETS: &[&str] = &[
    "table1", "table2", "fig1", "fig2", "fig4", "fig5", "fig6", "fig7", "fig8", "fig10",
];

const TABLE1_ROWS: [(f64, f64); 7] = [
    (1.0, 1.0),
    (1.0, 2.0),
    (2.0, 1.0),
    (2.0, 2.0),
    (2.0, 3.0),
    (3.0, 2.0),
    (3.0, 3.0),
];

pub fn run_preset(name: &str, s: &mut Settings) -> Result<Table> {
    match name {
        "table1" => table1(s),
        "table2" => table2(s),
        "fig1" => fig1(s),
        "fig2" => fig2(s),
        "fig4" => fig4(s),
        "fig5" => fig5(s),
        "fig6" => {
            s.set_default("mu", "sin(10*t)");
            s.set_default("barrier", "1 + 0.65*sin(10*t + atan(10))");
            s.set_default("beta0", seasonal_beta0(1.0, 10.0, 0.0, 1.0, 1.0));
            s.set_default("window", "0, 2");
            cmd_transform(s)
        }
        "fig7" => {
            s.set_default("mu", "1/(1 + exp(5 - t))");
            s.set_default("barrier", "0.5");
            s.set_default("window", "0, 10");
            cmd_transform(s)
        }
        "fig8" => {
            s.set_default("barriers", "2, 2");
            s.set_default("steps", "500, 1000, 2000");
            s.set_default("timing", true);
            cmd_joint(s)
        }
        "fig10" => fig10(s),
        other => Err(Error::Config(format!(
            "unknown preset '{other}'; known: {}",
            PRESETS.join(", ")
        ))),
    }
}

fn joint_defaults(s: &mut Settings) {
    s.set_default("method", "direct-mc, quadrature, mc-integration");
    s.set_default("steps", "500, 1000, 2000");
    s.set_default("paths", 200_000);
}

fn method_list(s: &Settings) -> Vec<String> {
    s.str("method")
        .unwrap_or_default()
        .split(',')
        .map(|m| m.trim().to_string())
        .collect()
}

/// Two unit intervals, seven barrier pairs.
fn table1(s: &mut Settings) -> Result<Table> {
    joint_defaults(s);
    let methods = method_list(s);
    let knobs = JointKnobs::resolve(s)?;
    let mut t = Table::new(&["b1", "b2", "method", "prob", "err", "wall_ms"]);
    for (b1, b2) in TABLE1_ROWS {
        let p = JointProblem::unit_intervals(0.0, &[b1, b2], Direction::AllAbove)?;
        for (m, r, ms) in run_methods(&p, &methods, &knobs)? {
            t.push(vec![
                b1.into(),
                b2.into(),
                m.into(),
                r.prob.into(),
                r.err.into(),
                wall_cell(knobs.timing, ms),
            ]);
        }
    }
    Ok(t)
}

fn by_interval_count(s: &mut Settings) -> Result<Table> {
    let methods = method_list(s);
    let knobs = JointKnobs::resolve(s)?;
    let mut t = Table::new(&["n", "method", "prob", "err", "wall_ms"]);
    for n in 2..=5 {
        let p = JointProblem::unit_intervals(0.0, &vec![2.0; n], Direction::AllAbove)?;
        for (m, r, ms) in run_methods(&p, &methods, &knobs)? {
            t.push(vec![
                n.into(),
                m.into(),
                r.prob.into(),
                r.err.into(),
                wall_cell(knobs.timing, ms),
            ]);
        }
    }
    Ok(t)
}

/// Barrier 2 on N = 2..5 unit intervals.
fn table2(s: &mut Settings) -> Result<Table> {
    joint_defaults(s);
    by_interval_count(s)
}

/// Run times against the number of intervals.
fn fig10(s: &mut Settings) -> Result<Table> {
    joint_defaults(s);
    s.set_default("timing", true);
    by_interval_count(s)
}

fn reflect_levels(s: &mut Settings, default: &str) -> Result<Vec<f64>> {
    s.set_default("a", default);
    s.str("a")
        .unwrap_or_default()
        .split(',')
        .map(|v| match v.trim() {
            "-inf" => Ok(f64::NEG_INFINITY),
            v => v
                .parse()
                .map_err(|_| Error::Config(format!("a: '{v}' is not a number"))),
        })
        .collect()
}

/// Gaps between consecutive eigenvalues for several reflecting levels.
fn fig1(s: &mut Settings) -> Result<Table> {
    s.set_default("b", 1.5);
    s.set_default("k_terms", 10);
    let b = s.require_f64("b")?;
    let k = s.usize("k_terms", 10)?;
    let mut t = Table::new(&["a", "k", "alpha", "gap"]);
    for a in reflect_levels(s, "-1, -2, -3, -5, -inf")? {
        let es = if a.is_finite() {
            global_cache().get_reflected(b, a, k + 1)?
        } else {
            global_cache().get(b, k + 1)?
        };
        for j in 0..k {
            t.push(vec![
                a.into(),
                (j + 1).into(),
                es.alphas[j].into(),
                (es.alphas[j + 1] - es.alphas[j]).into(),
            ]);
        }
    }
    Ok(t)
}

/// First-passage densities with and without a reflecting lower barrier.
fn fig2(s: &mut Settings) -> Result<Table> {
    s.set_default("x", 0.0);
    s.set_default("b", 1.5);
    s.set_default("t_max", 4.0);
    s.set_default("t_points", 81);
    s.set_default("k_terms", 40);
    let levels = reflect_levels(s, "-1, -2, -3, -inf")?;
    let (x, b, t_max) = (
        s.require_f64("x")?,
        s.require_f64("b")?,
        s.require_f64("t_max")?,
    );
    let (n, k) = (s.usize("t_points", 81)?, s.usize("k_terms", 40)?);
    let mut t = Table::new(&["a", "t", "density"]);
    for a in levels {
        // without reflection the standardized fpt command gives the curve
        let mut sub = Settings::default();
        for (key, v) in [("x", x), ("b", b), ("t_max", t_max)] {
            sub.set_default(key, v);
        }
        sub.set_default("t_points", n);
        sub.set_default("k_terms", k);
        sub.set_default("quantity", "density");
        if a.is_finite() {
            for i in 0..n {
                let ti = t_max * i as f64 / (n - 1) as f64;
                let d = if ti == 0.0 {
                    0.0
                } else {
                    fpt_density_reflected(x, b, a, ti, k)?.value
                };
                t.push(vec![a.into(), ti.into(), d.into()]);
            }
        } else {
            for row in cmd_fpt(&mut sub)?.rows {
                t.push(vec![a.into(), row[0].clone(), row[1].clone()]);
            }
        }
    }
    Ok(t)
}

/// Truncation error of the survival series against a long reference,
/// next to the analytic bound.
fn fig4(s: &mut Settings) -> Result<Table> {
    s.set_default("x", 0.0);
    s.set_default("b", 1.0);
    s.set_default("t_max", 1.0);
    s.set_default("k_terms", 40);
    let (x, b, tt) = (
        s.require_f64("x")?,
        s.require_f64("b")?,
        s.require_f64("t_max")?,
    );
    let k_max = s.usize("k_terms", 40)?;
    let reference = build_eigensystem(b, 200)?;
    let w = reference.weighted_terms(x)?;
    let terms: Vec<f64> = w
        .iter()
        .zip(&reference.alphas)
        .map(|(c, a)| c * (-a * tt).exp())
        .collect();
    let full: f64 = terms.iter().sum();
    let mut t = Table::new(&["k", "term", "error", "bound"]);
    let mut partial = 0.0;
    for k in 1..=k_max.min(terms.len()) {
        partial += terms[k - 1];
        let bound = truncation_error_bound(x, b, 1.0, tt, reference.alphas[k - 1])?;
        t.push(vec![
            k.into(),
            terms[k - 1].abs().into(),
            (full - partial).abs().into(),
            bound.into(),
        ]);
    }
    Ok(t)
}

/// Terms chosen by the quantile rule over a grid of starts and barriers.
fn fig5(_s: &mut Settings) -> Result<Table> {
    let mut t = Table::new(&["x", "b", "k"]);
    for ib in 1..=6 {
        let b = 0.5 * ib as f64;
        for ix in 0..=24 {
            let x = -3.0 + 0.25 * ix as f64;
            if x >= b {
                break;
            }
            t.push(vec![
                x.into(),
                b.into(),
                select_truncation(x, b, 0.5, 0.05, 200.0)?.into(),
            ]);
        }
    }
    t.note("quantile = 0.5, rel_tol = 0.05, alpha_max = 200");
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::output::Cell;

    #[test]
    fn fig7_prefers_direct() {
        let mut s = Settings::default();
        s.set_default("points", 5);
        let t = run_preset("fig7", &mut s).unwrap();
        assert!(t.notes.iter().any(|n| n == "verdict = direct-approx"));
    }

    #[test]
    fn fig4_bound_dominates() {
        let mut s = Settings::default();
        let t = run_preset("fig4", &mut s).unwrap();
        for r in &t.rows {
            let (Cell::Num(e), Cell::Num(b)) = (&r[2], &r[3]) else {
                panic!()
            };
            assert!(e <= b);
        }
    }
}
