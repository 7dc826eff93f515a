//! Figure-data sweeps. Every grid point is an independent task; results are
//! collected in input order.

use canp_core::metrology::qfi_displacement;
use canp_core::{
    cfi_homodyne, enhancement_ratio, find_threshold, qfi_exact, skew_information,
    Error, ModelParams, ProtocolSpec,
};
use rayon::prelude::*;

use crate::config::{Experiment, RunConfig, AXIS_TC, AXIS_T_THETA};
use crate::output::{Cell, Table};

type Result<T> = std::result::Result<T, Error>;

fn par_rows<T, F>(items: &[T], f: F) -> Result<Vec<Vec<Cell>>>
where
    T: Sync,
    F: Fn(&T) -> Result<Vec<Cell>> + Sync + Send,
{
    items.par_iter().map(f).collect()
}

/// `√Δ` from the derived structure; the closed form stands in when the pair
/// commutes (`g = 0`), where it reduces to the free-oscillator value.
pub fn sqrt_delta(model: &ModelParams) -> Result<f64> {
    let spec = ProtocolSpec::from_model(model, 0.0, 1.0, canp_core::Complex64::new(1.0, 0.0))?;
    let delta = match spec.structure()? {
        Some(cs) => cs.delta,
        None => model.delta(),
    };
    if delta > 0.0 {
        Ok(delta.sqrt())
    } else {
        Err(Error::OutOfPhase)
    }
}

fn spec_at(cfg: &RunConfig, model: &ModelParams, x: f64, t_theta: f64) -> Result<ProtocolSpec> {
    let t_c = x / sqrt_delta(model)?;
    Ok(ProtocolSpec::from_model(model, t_c, t_theta, cfg.alpha())?.with_theta0(cfg.theta0))
}

fn half_period(cfg: &RunConfig, control: f64) -> Result<ProtocolSpec> {
    let model = cfg.model.with_control(control);
    Ok(ProtocolSpec::at_half_period(&model, cfg.t_theta, cfg.alpha())?.with_theta0(cfg.theta0))
}

pub fn run_fig2a(cfg: &RunConfig) -> Result<Table> {
    let xs = cfg.axis(AXIS_TC).values();
    let ts = cfg.axis(AXIS_T_THETA).values();
    let grid: Vec<(f64, f64)> = xs.iter().flat_map(|&x| ts.iter().map(move |&t| (x, t))).collect();
    let mut table = Table::new(&[AXIS_TC, AXIS_T_THETA, "R", "enhanced"]);
    table.notes.push(format!("g={:?} enhanced=1 where R>1", cfg.model.g));
    table.rows = par_rows(&grid, |&(x, t)| {
        let r = enhancement_ratio(&spec_at(cfg, &cfg.model, x, t)?)?;
        Ok(vec![x.into(), t.into(), r.into(), (r > 1.0).into()])
    })?;
    Ok(table)
}

fn per_line(cfg: &RunConfig) -> Vec<(f64, f64)> {
    let xs = cfg.axis(AXIS_TC).values();
    cfg.lines
        .iter()
        .flat_map(|&g| xs.iter().map(move |&x| (g, x)))
        .collect()
}

pub fn run_fig2b(cfg: &RunConfig) -> Result<Table> {
    let mut table = Table::new(&["g", AXIS_TC, "R"]);
    table.rows = par_rows(&per_line(cfg), |&(g, x)| {
        let model = cfg.model.with_control(g);
        let r = enhancement_ratio(&spec_at(cfg, &model, x, cfg.t_theta)?)?;
        Ok(vec![g.into(), x.into(), r.into()])
    })?;
    Ok(table)
}

fn threshold_note(cfg: &RunConfig, name: &str) -> String {
    let axis = cfg.axis(name);
    match find_threshold(&cfg.model, cfg.t_theta, cfg.alpha(), (axis.start, axis.stop)) {
        Ok(x) => format!("threshold {name}*={x:?} bracket=[{:?},{:?}]", axis.start, axis.stop),
        Err(e) => format!("threshold {name}*: {e}"),
    }
}

pub fn run_fig2b_inset(cfg: &RunConfig) -> Result<Table> {
    let gs = cfg.axis("g").values();
    let mut table = Table::new(&["g", "R_tau"]);
    table.rows = par_rows(&gs, |&g| {
        let r = enhancement_ratio(&half_period(cfg, g)?)?;
        Ok(vec![g.into(), r.into()])
    })?;
    table.notes.push(threshold_note(cfg, "g"));
    Ok(table)
}

pub fn run_fig3a(cfg: &RunConfig) -> Result<Table> {
    let mut table = Table::new(&["g", AXIS_TC, "S", "F"]);
    table.rows = par_rows(&per_line(cfg), |&(g, x)| {
        let spec = spec_at(cfg, &cfg.model.with_control(g), x, cfg.t_theta)?;
        Ok(vec![
            g.into(),
            x.into(),
            skew_information(&spec)?.into(),
            qfi_exact(&spec)?.into(),
        ])
    })?;
    Ok(table)
}

/// Linear-interpolated sign changes of `ys` over `xs`.
pub fn zero_crossings(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 1..xs.len() {
        let (y0, y1) = (ys[i - 1], ys[i]);
        if y0 == 0.0 {
            out.push(xs[i - 1]);
        } else if y0 * y1 < 0.0 {
            out.push(xs[i - 1] + (xs[i] - xs[i - 1]) * y0 / (y0 - y1));
        }
    }
    if ys.last() == Some(&0.0) {
        out.push(xs[xs.len() - 1]);
    }
    out
}

pub fn run_fig3b(cfg: &RunConfig) -> Result<Table> {
    let gs = cfg.axis("g").values();
    let mut table = Table::new(&["g", "meanP", "cfi", "qfi", "cfi_over_qfi"]);
    table.rows = par_rows(&gs, |&g| {
        let spec = half_period(cfg, g)?;
        let (mean_p, _) = spec.final_state(spec.theta0)?.quadrature_stats();
        let cfi = cfi_homodyne(&spec, cfg.dtheta)?;
        let qfi = qfi_exact(&spec)?;
        Ok(vec![g.into(), mean_p.into(), cfi.into(), qfi.into(), (cfi / qfi).into()])
    })?;
    let crossings = zero_crossings(&gs, &table.column("meanP").expect("column exists"));
    if crossings.is_empty() {
        table.notes.push("meanP has no zero crossing on this grid".into());
    }
    for g in crossings {
        table.notes.push(format!("meanP zero crossing g={g:?}"));
    }
    Ok(table)
}

pub fn run_lmg_threshold(cfg: &RunConfig) -> Result<Table> {
    let ls = cfg.axis("lambda").values();
    let mut table = Table::new(&["lambda", "R_tau"]);
    table.rows = par_rows(&ls, |&l| {
        let r = enhancement_ratio(&half_period(cfg, l)?)?;
        Ok(vec![l.into(), r.into()])
    })?;
    table.notes.push(format!("gamma={:?} t_theta={:?}", cfg.model.gamma, cfg.t_theta));
    table.notes.push(threshold_note(cfg, "lambda"));
    Ok(table)
}

pub fn run_displacement(cfg: &RunConfig) -> Result<Table> {
    let xs = cfg.axis(AXIS_TC).values();
    let mut table = Table::new(&[AXIS_TC, "qfi_exact", "qfi_asymptotic", "R"]);
    table.rows = par_rows(&xs, |&x| {
        let spec = spec_at(cfg, &cfg.model, x, cfg.t_theta)?;
        let q = qfi_displacement(&spec)?;
        Ok(vec![
            x.into(),
            q.exact.into(),
            q.asymptotic.into(),
            enhancement_ratio(&spec)?.into(),
        ])
    })?;
    Ok(table)
}

/// Runs a CSV-producing experiment.
pub fn run_table(cfg: &RunConfig) -> Result<Table> {
    match cfg.experiment {
        Experiment::Fig2a => run_fig2a(cfg),
        Experiment::Fig2b => run_fig2b(cfg),
        Experiment::Fig2bInset => run_fig2b_inset(cfg),
        Experiment::Fig3a => run_fig3a(cfg),
        Experiment::Fig3b => run_fig3b(cfg),
        Experiment::LmgThreshold => run_lmg_threshold(cfg),
        Experiment::Displacement => run_displacement(cfg),
        Experiment::Validate => Err(Error::InvalidProtocol("validate does not produce a table")),
    }
}

/// Indices of strict interior local maxima.
pub fn local_maxima(ys: &[f64]) -> Vec<usize> {
    (1..ys.len().saturating_sub(1))
        .filter(|&i| ys[i] > ys[i - 1] && ys[i] >= ys[i + 1])
        .collect()
}
