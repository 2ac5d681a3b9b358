//! The `fpt`, `joint` and `transform` commands.

use std::time::Instant;

use crate::crossing::{
    joint_distribution_quadrature, joint_survival_mc_integration, joint_survival_quadrature,
    joint_survival_simplified, Direction, Grid, JointProblem, KernelSettings, McIntegrationConfig,
};
use crate::directmc::{direct_mc_joint_levels, MCConfig};
use crate::error::{Error, Result};
use crate::fpt::{
    default_truncation, fpt_density, fpt_density_reflected, fpt_survival, fpt_survival_reflected,
    hazard_rate, standardize, OuParams,
};
use crate::prob::ProbResult;
use crate::transform::{
    inhomo_fpt_survival_with, method_selector, solve_transform, solve_transform_covering,
    transformed_barrier, TimeFunctions,
};

use super::config::Settings;
use super::expr::Expr;
use super::output::{Cell, Table};

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

pub fn grid(s: &mut Settings) -> Result<Grid> {
    let d = Grid::default();
    s.set_default("grid_min", d.z_min);
    s.set_default("grid_max", d.z_max);
    s.set_default("grid_l", d.l);
    Grid::new(
        s.f64("grid_min", d.z_min)?,
        s.f64("grid_max", d.z_max)?,
        s.usize("grid_l", d.l)?,
    )
}

pub fn kernel_settings(s: &mut Settings) -> Result<KernelSettings> {
    let d = KernelSettings::default();
    s.set_default("k_terms", d.k_terms);
    s.set_default("inner_j", d.inner_j);
    Ok(KernelSettings {
        k_terms: s.usize("k_terms", d.k_terms)?,
        inner_j: s.usize("inner_j", d.inner_j)?,
        ..d
    })
}

fn ou_params(s: &mut Settings) -> Result<OuParams> {
    s.set_default("mu", 0.0);
    s.set_default("lambda", 1.0);
    s.set_default("sigma", 1.0);
    OuParams::new(
        s.require_f64("mu")?,
        s.require_f64("lambda")?,
        s.require_f64("sigma")?,
    )
}

/// Survival, density or hazard of the first passage through `b` on a
/// uniform time grid.
pub fn cmd_fpt(s: &mut Settings) -> Result<Table> {
    let params = ou_params(s)?;
    s.set_default("x", 0.0);
    let x = s.require_f64("x")?;
    let b = s.require_f64("b")?;
    s.set_default("a", "-inf");
    let a = s.require_f64("a")?;
    s.set_default("t_max", 5.0);
    s.set_default("t_points", 101);
    s.set_default("quantity", "survival");
    let t_max = s.require_f64("t_max")?;
    let n = s.usize("t_points", 101)?;
    if !(t_max > 0.0) || n < 2 {
        return Err(config_err("need t_max > 0 and t_points >= 2"));
    }
    let sp = standardize(&params, x, b);
    let a_tilde = if a.is_finite() {
        Some(params.standardize_state(a))
    } else {
        None
    };
    if sp.x_tilde >= sp.b_tilde {
        return Err(config_err("x must lie below b"));
    }
    let k = match s.usize_opt("k_terms")? {
        Some(k) => k,
        None => default_truncation(sp.x_tilde, sp.b_tilde)?,
    };
    s.set_default("k_terms", k);
    let quantity = s.str("quantity").unwrap_or("survival").to_string();
    let lam = params.lambda;

    let mut table = Table::new(&["t", "value", "error_bound"]);
    for i in 0..n {
        let t = t_max * i as f64 / (n - 1) as f64;
        let (value, bound) = match quantity.as_str() {
            "survival" => {
                let r = match a_tilde {
                    Some(at) => fpt_survival_reflected(sp.x_tilde, sp.b_tilde, at, lam * t, k)?,
                    None => fpt_survival(&params, x, b, t, k)?,
                };
                (r.prob, r.err)
            }
            "density" if t == 0.0 => (0.0, f64::NAN),
            "density" => {
                let d = match a_tilde {
                    Some(at) => {
                        lam * fpt_density_reflected(sp.x_tilde, sp.b_tilde, at, lam * t, k)?.value
                    }
                    None => fpt_density(&params, x, b, t, k)?.value,
                };
                (d, f64::NAN)
            }
            "hazard" if a_tilde.is_some() => {
                return Err(config_err("hazard is only available without reflection"))
            }
            "hazard" if t == 0.0 => (0.0, f64::NAN),
            "hazard" => (hazard_rate(&params, x, b, t, k)?, f64::NAN),
            q => {
                return Err(config_err(format!(
                    "unknown quantity '{q}' (survival, density, hazard)"
                )))
            }
        };
        table.push(vec![t.into(), value.into(), bound.into()]);
    }
    Ok(table)
}

/// Method names accepted by `--method`.
pub const METHODS: &[&str] = &["quadrature", "simplified", "mc-integration", "direct-mc"];

fn methods(s: &mut Settings, direction: Direction) -> Result<Vec<String>> {
    s.set_default("method", "all");
    let raw = s.str("method").unwrap_or("all");
    let mut out = Vec::new();
    for m in raw.split(',').map(str::trim) {
        match m {
            "all" => match direction {
                Direction::AllAbove => out.extend(METHODS.iter().map(|m| m.to_string())),
                Direction::AllBelow => {
                    out.extend(["quadrature".to_string(), "direct-mc".to_string()])
                }
            },
            m if METHODS.contains(&m) => out.push(m.to_string()),
            m => return Err(config_err(format!("unknown method '{m}'"))),
        }
    }
    out.dedup();
    Ok(out)
}

/// Resolved numerical knobs of the joint methods.
pub struct JointKnobs {
    pub grid: Grid,
    pub kernel: KernelSettings,
    pub mc: MCConfig,
    pub levels: Vec<usize>,
    pub mcint: McIntegrationConfig,
    pub timing: bool,
}

impl JointKnobs {
    pub fn resolve(s: &mut Settings) -> Result<Self> {
        let grid = grid(s)?;
        let kernel = kernel_settings(s)?;
        s.set_default("paths", 100_000);
        s.set_default("steps", 2000);
        s.set_default("sets", 1);
        s.set_default("seed", 1);
        s.set_default("samples", 5000);
        s.set_default("replicates", 20);
        s.set_default("timing", false);
        let levels = s.list_usize("steps")?.unwrap_or_default();
        let fine = levels
            .iter()
            .copied()
            .max()
            .ok_or_else(|| config_err("steps is empty"))?;
        let seed = s.u64("seed", 1)?;
        let mc = MCConfig {
            n_paths: s.usize("paths", 0)?,
            n_steps: fine,
            n_sets: s.usize("sets", 1)?,
            seed,
        };
        let mcint = McIntegrationConfig {
            sample_sizes: vec![s.usize("samples", 5000)?],
            replicates: s.usize("replicates", 20)?,
            seed,
            ..McIntegrationConfig::default()
        };
        Ok(Self {
            grid,
            kernel,
            mc,
            levels,
            mcint,
            timing: s.bool("timing")?,
        })
    }
}

/// One output row per method; `direct-mc` gives one row per step level.
pub fn run_methods(
    p: &JointProblem,
    methods: &[String],
    k: &JointKnobs,
) -> Result<Vec<(String, ProbResult, f64)>> {
    let mut rows = Vec::new();
    for m in methods {
        let start = Instant::now();
        match m.as_str() {
            "quadrature" => {
                let r = match p.direction {
                    Direction::AllAbove => joint_survival_quadrature(p, &k.grid, &k.kernel)?,
                    Direction::AllBelow => joint_distribution_quadrature(p, &k.grid, &k.kernel)?,
                };
                rows.push((m.clone(), r, ms(start)));
            }
            "simplified" => rows.push((
                m.clone(),
                joint_survival_simplified(p, &k.grid, &k.kernel)?,
                ms(start),
            )),
            "mc-integration" => rows.push((
                m.clone(),
                joint_survival_mc_integration(p, &k.kernel, &k.mcint)?,
                ms(start),
            )),
            "direct-mc" => {
                let params = vec![OuParams::standard(); p.n_intervals()];
                let rs = direct_mc_joint_levels(p, &params, &k.mc, &k.levels)?;
                // the levels share one simulation, so they share its time
                let t = ms(start);
                for (r, m_steps) in rs.into_iter().zip(&k.levels) {
                    rows.push((format!("direct-mc-{m_steps}"), r, t));
                }
            }
            other => return Err(config_err(format!("unknown method '{other}'"))),
        }
    }
    Ok(rows)
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// The wall time cell: NaN unless timing was requested, so that repeated
/// runs give identical files by default.
pub fn wall_cell(timing: bool, ms: f64) -> Cell {
    Cell::Num(if timing { ms } else { f64::NAN })
}

/// Joint crossing probability of the standardized process by the
/// requested methods.
pub fn cmd_joint(s: &mut Settings) -> Result<Table> {
    s.set_default("z0", 0.0);
    s.set_default("direction", "above");
    let z0 = s.require_f64("z0")?;
    let barriers = s
        .list_f64("barriers")?
        .ok_or_else(|| config_err("missing key 'barriers'"))?;
    let direction = match s.str("direction").unwrap_or("above") {
        "above" => Direction::AllAbove,
        "below" => Direction::AllBelow,
        d => {
            return Err(config_err(format!(
                "direction must be 'above' or 'below', got '{d}'"
            )))
        }
    };
    let p = match s.list_f64("times")? {
        Some(times) => {
            let mut grid = vec![0.0];
            grid.extend(times);
            JointProblem::new(z0, grid, barriers, direction)?
        }
        None => JointProblem::unit_intervals(z0, &barriers, direction)?,
    };
    let ms = methods(s, direction)?;
    let knobs = JointKnobs::resolve(s)?;
    let mut table = Table::new(&["method", "prob", "err", "wall_ms"]);
    for (name, r, t) in run_methods(&p, &ms, &knobs)? {
        table.push(vec![
            name.into(),
            r.prob.into(),
            r.err.into(),
            wall_cell(knobs.timing, t),
        ]);
    }
    Ok(table)
}

/// Parameter functions, barrier and the (α₀, β₀) pair of a transform run.
pub struct TransformInputs {
    pub funcs: TimeFunctions,
    pub barrier: Expr,
    pub alpha0: f64,
    pub beta0: f64,
}

impl TransformInputs {
    pub fn resolve(s: &mut Settings) -> Result<Self> {
        s.set_default("mu", "0");
        s.set_default("lambda", "1");
        s.set_default("sigma", "1");
        s.set_default("barrier", "1");
        let f =
            |s: &Settings, k: &str| Expr::parse(s.str(k).unwrap_or_default())?.to_time_function();
        let funcs = TimeFunctions {
            mu: f(s, "mu")?,
            lambda: f(s, "lambda")?,
            sigma: f(s, "sigma")?,
        };
        let barrier = Expr::parse(s.str("barrier").unwrap_or_default())?;
        let alpha0 = s.f64("alpha0", funcs.default_alpha0())?;
        let beta0 = s.f64("beta0", funcs.default_beta0())?;
        s.set_default("alpha0", alpha0);
        s.set_default("beta0", beta0);
        Ok(Self {
            funcs,
            barrier,
            alpha0,
            beta0,
        })
    }
}

/// Samples of α, β, γ and the transformed barrier g on the standardized
/// clock, with the method selector's verdict for the window.
pub fn cmd_transform(s: &mut Settings) -> Result<Table> {
    let inp = TransformInputs::resolve(s)?;
    s.set_default("window", "0, 1");
    s.set_default("points", 201);
    let window = s.list_f64("window")?.unwrap_or_default();
    let [t1, t2] = window[..] else {
        return Err(config_err("window needs two times 't1, t2'"));
    };
    let tr = match s.f64_opt("horizon")? {
        Some(h) => solve_transform(&inp.funcs, inp.alpha0, inp.beta0, h, None)?,
        None => solve_transform_covering(&inp.funcs, inp.alpha0, inp.beta0, t2)?,
    };
    let horizon = tr.horizon();
    s.set_default("horizon", horizon);
    let points = s.usize("points", 201)?;
    if points < 2 {
        return Err(config_err("points must be at least 2"));
    }
    let b = inp.barrier.to_time_function()?;
    let g = transformed_barrier(&tr, &b);
    let sel = method_selector(&inp.funcs, &b, (t1, t2), inp.beta0)?;

    let mut table = Table::new(&["t", "alpha", "beta", "gamma", "g"]);
    table.note(format!("verdict = {}", sel.method.as_str()));
    table.note(format!(
        "selector_flag = {}",
        sel.flag.map_or("none".to_string(), |f| format!("{f:?}"))
    ));
    table.note(format!(
        "selector_ratio = {}",
        super::output::fmt_num(sel.ratio)
    ));
    table.note(format!(
        "selector_threshold = {}",
        super::output::fmt_num(sel.threshold)
    ));
    if let Some(n) = s.usize_opt("segments")? {
        s.set_default("y0", 0.0);
        let y0 = s.require_f64("y0")?;
        let grid = grid(s)?;
        let kernel = kernel_settings(s)?;
        let r = inhomo_fpt_survival_with(
            &inp.funcs, &b, y0, t2, n, inp.alpha0, inp.beta0, &grid, &kernel,
        )?;
        table.note(format!("survival_t2 = {}", super::output::fmt_num(r.prob)));
        table.note(format!(
            "survival_t2_err = {}",
            super::output::fmt_num(r.err)
        ));
    }
    for i in 0..points {
        let t = horizon * i as f64 / (points - 1) as f64;
        table.push(vec![
            t.into(),
            tr.alpha_at(t).into(),
            tr.beta_at(t).into(),
            tr.gamma_at(t).into(),
            g.eval(t).into(),
        ]);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(kv: &[(&str, &str)]) -> Settings {
        Settings::load(
            None,
            kv.iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn survival_starts_at_one() {
        let mut s = settings(&[("b", "1.5"), ("t_points", "5")]);
        let t = cmd_fpt(&mut s).unwrap();
        assert_eq!(t.rows[0][0], Cell::Num(0.0));
        assert_eq!(t.rows[0][1], Cell::Num(1.0));
    }

    #[test]
    fn constant_gamma_is_t_over_lambda() {
        let mut s = settings(&[
            ("lambda", "2"),
            ("mu", "0.5"),
            ("points", "11"),
            ("horizon", "3"),
        ]);
        let t = cmd_transform(&mut s).unwrap();
        for r in &t.rows {
            let (Cell::Num(x), Cell::Num(g)) = (&r[0], &r[3]) else {
                panic!()
            };
            assert!((g - x / 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn below_rejects_survival_only_methods() {
        let mut s = settings(&[
            ("barriers", "1,1"),
            ("direction", "below"),
            ("method", "simplified"),
            ("grid_l", "401"),
        ]);
        assert!(cmd_joint(&mut s).is_err());
    }
}
