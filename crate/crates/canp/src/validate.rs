//! Regression checks over every layer, aggregated into one JSON report.

use std::f64::consts::PI;

use canp_core::algebra::derive_critical_structure;
use canp_core::{
    cfi_homodyne, enhancement_ratio, find_threshold, qfi_asymptotic, qfi_exact, Complex64,
    GaussianState, ModelParams, PhaseSpaceMap, ProtocolSpec,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Experiment, Fault, RunConfig};
use crate::experiments::{local_maxima, run_fig2b, run_fig3a, sqrt_delta};
use crate::fock::{build_matrix, FockError, FockProtocol};
use crate::output::TOOL_VERSION;

pub const ALPHA: Complex64 = Complex64::new(0.3, 1.0);
/// Concurrent Fock evolutions allowed at once.
pub const ORACLE_CONCURRENCY: usize = 4;
/// Truncation the oracle grid is allowed to escalate to. One doubling past
/// the module default: g = 0.99 squeezes the prepared state beyond what 480
/// levels resolve.
pub const ORACLE_MAX_DIM: usize = 960;
/// Step for the oracle QFI. Near-critical QFIs reach ~1e6, where the
/// default step leaves a Richardson remainder close to 1e-4.
pub const ORACLE_DTHETA: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub criterion: u8,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
    /// Not evaluated; does not count towards the verdict.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub skipped: bool,
}

impl Check {
    fn at_most(name: &'static str, criterion: u8, measured: f64, tolerance: f64) -> Self {
        Self {
            name,
            criterion,
            passed: measured <= tolerance,
            measured,
            tolerance,
            detail: String::new(),
            skipped: false,
        }
    }

    fn within(name: &'static str, criterion: u8, measured: f64, target: f64, tol: f64) -> Self {
        Self {
            passed: (measured - target).abs() <= tol,
            tolerance: tol,
            detail: format!("target {target}"),
            ..Self::at_most(name, criterion, measured, tol)
        }
    }

    fn failed(name: &'static str, criterion: u8, tolerance: f64, why: impl ToString) -> Self {
        Self {
            name,
            criterion,
            passed: false,
            measured: f64::NAN,
            tolerance,
            detail: why.to_string(),
            skipped: false,
        }
    }

    fn skipped(name: &'static str, criterion: u8, tolerance: f64, why: &str) -> Self {
        Self {
            skipped: true,
            ..Self::failed(name, criterion, tolerance, why)
        }
    }

    fn with_detail(mut self, detail: impl Into<String>) -> Self {
        let extra = detail.into();
        self.detail = if self.detail.is_empty() {
            extra
        } else {
            format!("{}; {extra}", self.detail)
        };
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Threshold {
    pub name: &'static str,
    pub value: Option<f64>,
    pub bracket: (f64, f64),
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub version: &'static str,
    pub config_sha256: String,
    pub passed: bool,
    pub thresholds: Vec<Threshold>,
    pub checks: Vec<Check>,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// `|a − b| / max(1, |b|)`.
fn mixed(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn fmt_list(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, Copy)]
pub struct Validator {
    pub fault: Option<Fault>,
    pub oracle: bool,
}

impl Validator {
    pub fn new(cfg: &RunConfig) -> Self {
        Self {
            fault: cfg.fault,
            oracle: cfg.oracle,
        }
    }

    fn delta_scale(&self) -> f64 {
        match self.fault {
            Some(Fault::WrongDelta) => 1.0 + 1e-3,
            None => 1.0,
        }
    }

    /// Criterion residuals and Δ against closed forms over random draws.
    pub fn criterion_1(&self) -> Vec<Check> {
        let mut rng = StdRng::seed_from_u64(0x00c0_ffee);
        let mut models = Vec::new();
        for _ in 0..100 {
            let (w, g) = (rng.random_range(0.2..3.0), rng.random_range(0.01..0.999));
            models.push(ModelParams::qrm_frequency(w, g));
            let (w, g) = (rng.random_range(0.2..3.0), rng.random_range(0.01..0.999));
            models.push(ModelParams::qrm_displacement(w, g));
            let gamma: f64 = if rng.random_bool(0.5) {
                rng.random_range(1.05..4.0)
            } else {
                rng.random_range(0.1..0.95)
            };
            let lambda = rng.random_range(-1.0..gamma.min(1.0) - 0.01);
            models.push(ModelParams::lmg_frequency(lambda, gamma));
        }
        let mut worst_res = 0.0_f64;
        let mut worst_dev = 0.0_f64;
        let mut worst_model = None;
        for m in &models {
            let cs = match m
                .preparation()
                .and_then(|hc| derive_critical_structure(&hc, &m.encoding()))
            {
                Ok(cs) => cs,
                Err(e) => {
                    let why = format!("{m:?}: {e}");
                    return vec![
                        Check::failed("criterion_residual", 1, 1e-10, &why),
                        Check::failed("delta_closed_form", 1, 1e-12, why),
                    ];
                }
            };
            worst_res = worst_res.max(cs.residual);
            let dev = mixed(cs.delta * self.delta_scale(), m.delta());
            if dev > worst_dev {
                worst_dev = dev;
                worst_model = Some(*m);
            }
        }
        vec![
            Check::at_most("criterion_residual", 1, worst_res, 1e-10)
                .with_detail(format!("{} draws", models.len())),
            Check::at_most("delta_closed_form", 1, worst_dev, 1e-12)
                .with_detail(format!("relative; worst at {worst_model:?}")),
        ]
    }

    /// Derived `Ĉ`, `D̂` against the printed expressions.
    pub fn criterion_2(&self) -> Vec<Check> {
        let mut models = Vec::new();
        for w in [0.7, 1.0, 1.6] {
            for g in [0.3, 0.8, 0.96, 0.99] {
                models.push(ModelParams::qrm_frequency(w, g));
            }
        }
        for (l, y) in [(0.2, 2.0), (0.5, 2.0), (0.9, 3.0), (-0.4, 0.5), (1.5, 1.2)] {
            models.push(ModelParams::lmg_frequency(l, y));
        }
        let mut worst = 0.0_f64;
        for m in &models {
            let (c, d) = m.published_c_d().expect("frequency presets");
            match m
                .preparation()
                .and_then(|hc| derive_critical_structure(&hc, &m.encoding()))
            {
                Ok(cs) => worst = worst.max(cs.c.distance(&c)).max(cs.d.distance(&d)),
                Err(e) => return vec![Check::failed("operator_constants", 2, 1e-12, e)],
            }
        }
        vec![Check::at_most("operator_constants", 2, worst, 1e-12)
            .with_detail(format!("{} models, max coefficient difference", models.len()))]
    }

    /// Gaussian engine against the truncated Fock simulation.
    pub fn criterion_3(&self) -> Vec<Check> {
        const NAMES: [&str; 4] = ["oracle_moments", "oracle_variance", "oracle_qfi", "oracle_truncation"];
        const TOLS: [f64; 4] = [1e-6, 1e-6, 1e-4, crate::fock::MAX_DIM as f64];
        let all = |f: &dyn Fn(&'static str, f64) -> Check| -> Vec<Check> {
            NAMES.iter().zip(TOLS).map(|(n, t)| f(n, t)).collect()
        };
        if !self.oracle {
            return all(&|n, t| Check::skipped(n, 3, t, "oracle disabled"));
        }
        let grid = oracle_grid();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(rayon::current_num_threads().min(ORACLE_CONCURRENCY))
            .build()
            .expect("thread pool");
        let scale = self.delta_scale();
        let results: Vec<Result<[f64; 4], String>> = pool.install(|| {
            grid.par_iter()
                .map(|&(g, x)| {
                    oracle_point(g, x, scale).map_err(|e| format!("g={g} √Δt_c={x:.4}: {e}"))
                })
                .collect()
        });
        let mut worst = [0.0_f64; 4];
        let mut over_cap = Vec::new();
        for (r, (g, x)) in results.iter().zip(&grid) {
            match r {
                Ok(v) => {
                    for k in 0..4 {
                        worst[k] = worst[k].max(v[k]);
                    }
                    if v[3] > TOLS[3] {
                        over_cap.push(format!("g={g} √Δt_c={x:.4} needs {}", v[3]));
                    }
                }
                Err(e) => return all(&|n, t| Check::failed(n, 3, t, e)),
            }
        }
        let detail = format!("{} points, truncation up to {}", grid.len(), worst[3]);
        let mut checks: Vec<Check> = (0..3)
            .map(|k| Check::at_most(NAMES[k], 3, worst[k], TOLS[k]).with_detail(detail.clone()))
            .collect();
        let trunc = Check::at_most(NAMES[3], 3, worst[3], TOLS[3]);
        checks.push(if over_cap.is_empty() {
            trunc
        } else {
            trunc.with_detail(format!("tail < 1e-10 not reachable: {}", over_cap.join("; ")))
        });
        checks
    }

    /// Threshold searches; returns the checks and the measured values.
    pub fn criterion_4(&self) -> (Vec<Check>, Vec<Threshold>) {
        let cases = [
            ("g_star", ModelParams::qrm_frequency(1.0, 0.5), 12.0, (0.3, 0.9), 0.5058),
            ("lambda_star", ModelParams::lmg_frequency(0.3, 2.0), 1.3, (0.1, 0.9), 0.3559),
        ];
        let mut checks = Vec::new();
        let mut found = Vec::new();
        for (name, family, t_theta, bracket, target) in cases {
            let value = find_threshold(&family, t_theta, ALPHA, bracket);
            checks.push(match value {
                Ok(v) => Check::within(name, 4, v, target, 5e-3)
                    .with_detail(format!("bracket [{}, {}]", bracket.0, bracket.1)),
                Err(e) => Check::failed(name, 4, 5e-3, e),
            });
            found.push(Threshold {
                name,
                value: value.ok(),
                bracket,
                target,
            });
        }
        (checks, found)
    }

    /// `t_c⁴` onset and the near-critical `16Δ⁻²t_θ²Var[D̂]` law.
    pub fn criterion_5(&self) -> Vec<Check> {
        let mut slopes = Vec::new();
        for g in [0.5, 0.9, 0.96, 0.98] {
            let model = ModelParams::qrm_frequency(1.0, g);
            let pts: Result<Vec<(f64, f64)>, canp_core::Error> = (0..10)
                .map(|i| {
                    let t_c = 10f64.powf(-3.0 + i as f64 / 9.0);
                    let spec = ProtocolSpec::from_model(&model, t_c, 12.0, ALPHA)?;
                    Ok((t_c.ln(), qfi_asymptotic(&spec)?.ln()))
                })
                .collect();
            match pts {
                Ok(p) => slopes.push(fit_slope(&p)),
                Err(e) => return vec![Check::failed("onset_slope", 5, 0.05, e)],
            }
        }
        let worst_slope = slopes.iter().map(|s| (s - 4.0).abs()).fold(0.0, f64::max);
        let mut checks = vec![Check::at_most("onset_slope", 5, worst_slope, 0.05)
            .with_detail(format!("|slope − 4|; slopes {}", fmt_list(&slopes)))];

        let gs = [0.98, 0.985, 0.99, 0.995, 0.999];
        let ratios: Result<Vec<f64>, canp_core::Error> = gs
            .iter()
            .map(|&g| {
                let spec = ProtocolSpec::at_half_period(&ModelParams::qrm_frequency(1.0, g), 12.0, ALPHA)?;
                Ok(qfi_exact(&spec)? / qfi_asymptotic(&spec)?)
            })
            .collect();
        checks.push(match ratios {
            Ok(r) => {
                let worst = r.iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max);
                Check::at_most("divergent_scaling", 5, worst, 0.05).with_detail(format!(
                    "|F/(16Δ⁻²t_θ²Var[D])− 1| at τ for g = {}: ratios {}",
                    fmt_list(&gs),
                    fmt_list(&r)
                ))
            }
            Err(e) => Check::failed("divergent_scaling", 5, 0.05, e),
        });
        checks
    }

    /// Skew information against QFI over the fig3a sweep.
    pub fn criterion_6(&self) -> Vec<Check> {
        let cfg = RunConfig::defaults(Experiment::Fig3a);
        let table = match run_fig3a(&cfg) {
            Ok(t) => t,
            Err(e) => {
                return vec![
                    Check::failed("skew_identity", 6, 1e-9, e),
                    Check::failed("skew_argmax", 6, 0.0, e),
                ]
            }
        };
        let g = table.column("g").expect("g");
        let s = table.column("S").expect("S");
        let f = table.column("F").expect("F");
        let k = 4.0 * cfg.t_theta * cfg.t_theta;
        let worst = s.iter().zip(&f).map(|(s, f)| rel(k * s, *f)).fold(0.0, f64::max);
        let mut mismatched = 0.0;
        for &line in &cfg.lines {
            let idx: Vec<usize> = (0..g.len()).filter(|&i| g[i] == line).collect();
            let ss: Vec<f64> = idx.iter().map(|&i| s[i]).collect();
            let ff: Vec<f64> = idx.iter().map(|&i| f[i]).collect();
            if local_maxima(&ss) != local_maxima(&ff) {
                mismatched += 1.0;
            }
        }
        vec![
            Check::at_most("skew_identity", 6, worst, 1e-9)
                .with_detail(format!("{} points", s.len())),
            Check::at_most("skew_argmax", 6, mismatched, 0.0)
                .with_detail("curves whose S and F maxima differ"),
        ]
    }

    /// Homodyne CFI relative to the QFI.
    pub fn criterion_7(&self) -> Vec<Check> {
        let eff: Result<Vec<f64>, canp_core::Error> = (0..17)
            .map(|i| {
                let g = 0.90 + 0.08 * i as f64 / 16.0;
                let spec = ProtocolSpec::at_half_period(&ModelParams::qrm_frequency(1.0, g), 12.0, ALPHA)?;
                Ok(cfi_homodyne(&spec, canp_core::metrology::DEFAULT_DTHETA)? / qfi_exact(&spec)?)
            })
            .collect();
        let mut checks = vec![match eff {
            Ok(r) => {
                let (lo, hi) = r.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
                let out = (0.8 - lo).max(hi - 1.0).max(0.0);
                Check::at_most("homodyne_efficiency", 7, out, 0.0)
                    .with_detail(format!("cfi/qfi range [{lo:.4}, {hi:.4}] for g in [0.90, 0.98]"))
            }
            Err(e) => Check::failed("homodyne_efficiency", 7, 0.0, e),
        }];
        let mut points = Vec::new();
        for g in [0.3, 0.5, 0.7, 0.9, 0.95, 0.98, 0.99] {
            for i in 0..25 {
                for theta0 in [0.0, 0.37] {
                    points.push((g, 4.0 * PI * i as f64 / 24.0, theta0));
                }
            }
        }
        let excess: Result<Vec<f64>, canp_core::Error> = points
            .par_iter()
            .map(|&(g, x, theta0)| {
                let model = ModelParams::qrm_frequency(1.0, g);
                let spec = ProtocolSpec::from_model(&model, x / sqrt_delta(&model)?, 12.0, ALPHA)?
                    .with_theta0(theta0);
                Ok(cfi_homodyne(&spec, canp_core::metrology::DEFAULT_DTHETA)? / qfi_exact(&spec)? - 1.0)
            })
            .collect();
        checks.push(match excess {
            Ok(v) => Check::at_most("cfi_bounded_by_qfi", 7, v.iter().copied().fold(f64::MIN, f64::max), 1e-6)
                .with_detail(format!("max cfi/qfi − 1 over {} points", v.len())),
            Err(e) => Check::failed("cfi_bounded_by_qfi", 7, 1e-6, e),
        });
        checks
    }

    /// Limits and invariants.
    pub fn criterion_8(&self) -> Vec<Check> {
        match structural() {
            Ok(c) => c,
            Err(e) => vec![Check::failed("structural", 8, 0.0, e)],
        }
    }

    /// Determinism and peak decay of the default fig2b sweep.
    pub fn criterion_9(&self) -> Vec<Check> {
        let cfg = RunConfig::defaults(Experiment::Fig2b);
        let (a, b) = match (run_fig2b(&cfg), run_fig2b(&cfg)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return vec![Check::failed("fig2b_peaks_decay", 9, 0.0, e)],
        };
        let same = a.to_csv(&cfg) == b.to_csv(&cfg);
        let g = a.column("g").expect("g");
        let r = a.column("R").expect("R");
        let mut bad = 0.0;
        let mut first = Vec::new();
        let xs = a.column(crate::config::AXIS_TC).expect("x");
        for &line in &cfg.lines {
            let idx: Vec<usize> = (0..g.len()).filter(|&i| g[i] == line).collect();
            let rr: Vec<f64> = idx.iter().map(|&i| r[i]).collect();
            let peaks = local_maxima(&rr);
            if let Some(&p) = peaks.first() {
                first.push(xs[idx[p]]);
            }
            if peaks.len() < 2 || peaks.windows(2).any(|w| rr[w[1]] >= rr[w[0]]) {
                bad += 1.0;
            }
        }
        vec![
            Check::at_most("fig2b_deterministic", 9, if same { 0.0 } else { 1.0 }, 0.0),
            Check::at_most("fig2b_peaks_decay", 9, bad, 0.0).with_detail(format!(
                "curves without strictly decreasing maxima; first peaks at √Δt_c = {}",
                fmt_list(&first)
            )),
        ]
    }

    pub fn run(&self, cfg: &RunConfig) -> Report {
        let mut checks = Vec::new();
        checks.extend(self.criterion_1());
        checks.extend(self.criterion_2());
        checks.extend(self.criterion_3());
        let (c4, thresholds) = self.criterion_4();
        checks.extend(c4);
        checks.extend(self.criterion_5());
        checks.extend(self.criterion_6());
        checks.extend(self.criterion_7());
        checks.extend(self.criterion_8());
        checks.extend(self.criterion_9());
        Report {
            version: TOOL_VERSION,
            config_sha256: cfg.hash(),
            passed: checks.iter().all(|c| c.passed || c.skipped),
            thresholds,
            checks,
        }
    }
}

fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = pts.iter().fold((0.0, 0.0), |(a, b), p| {
        (a + (p.0 - mx) * (p.1 - my), b + (p.0 - mx) * (p.0 - mx))
    });
    num / den
}

/// 5 couplings evenly over [0.5, 0.99] by 4 preparation times evenly over
/// [0, 2π/√Δ].
pub fn oracle_grid() -> Vec<(f64, f64)> {
    let mut grid = Vec::new();
    for i in 0..5 {
        let g = 0.5 + 0.49 * i as f64 / 4.0;
        for j in 0..4 {
            grid.push((g, 2.0 * PI * j as f64 / 3.0));
        }
    }
    grid
}

/// Errors for one oracle grid point: moments, variances, QFI, truncation.
fn oracle_point(g: f64, x: f64, delta_scale: f64) -> Result<[f64; 4], FockError> {
    let model = ModelParams::qrm_frequency(1.0, g);
    let t_c = x / sqrt_delta(&model)?;
    let spec = ProtocolSpec::from_model(&model, t_c, 12.0, ALPHA)?;
    let dtheta = ORACLE_DTHETA;

    let fock = FockProtocol::converged_up_to(&spec, 2.0 * dtheta, ORACLE_MAX_DIM)?;
    let dim = fock.dim();
    let gauss = spec.prepared_state()?;
    let fm = fock.prepared_state().moments();
    let mut moment_err = (gauss.mean_photon() - fm.mean_photon).abs();
    for i in 0..2 {
        moment_err = moment_err.max((gauss.mu[i] - fm.mu[i]).abs());
        for j in 0..2 {
            moment_err = moment_err.max((gauss.sigma[i][j] - fm.sigma[i][j]).abs());
        }
    }

    // Variances of quadratic observables on the probe and on the prepared
    // state; the generator is where a wrong Δ shows up.
    let mut var_err = 0.0_f64;
    let probe = crate::fock::FockState::coherent(spec.alpha, dim);
    let mut h = spec.generator()?;
    if delta_scale != 1.0 {
        if let Some(mut cs) = spec.structure()? {
            cs.delta *= delta_scale;
            h = canp_core::generator(&spec.htheta, &cs, spec.t_c, spec.t_theta)?;
        }
    }
    let mut observables = vec![(GaussianState::coherent(spec.alpha), &probe, h)];
    if let Some(cs) = spec.structure()? {
        observables.push((GaussianState::coherent(spec.alpha), &probe, cs.d));
    }
    observables.push((gauss, fock.prepared_state(), spec.htheta));
    observables.push((gauss, fock.prepared_state(), spec.hc));
    for (gs, fs, op) in &observables {
        let want = fs.variance(&build_matrix(op, dim));
        var_err = var_err.max(mixed(gs.variance(op)?, want));
    }

    let numeric = fock.qfi(dtheta)?;
    let exact = 4.0 * GaussianState::coherent(spec.alpha).variance(&h)?;
    Ok([moment_err, var_err, rel(exact, numeric), dim as f64])
}

fn structural() -> Result<Vec<Check>, canp_core::Error> {
    let mut checks = Vec::new();

    let decoupled = ModelParams::qrm_frequency(1.0, 0.0);
    let mut worst = 0.0_f64;
    let mut below = true;
    for t_c in [0.1, 1.0, 2.5, 7.0, 20.0] {
        let spec = ProtocolSpec::from_model(&decoupled, t_c, 12.0, ALPHA)?;
        let r = enhancement_ratio(&spec)?;
        let t = spec.total_time();
        worst = worst.max(rel(r, 144.0 / (t * t)));
        below &= r < 1.0;
    }
    checks.push(
        Check::at_most("decoupled_ratio", 8, worst, 1e-12)
            .with_detail(if below { "R < 1 throughout" } else { "R reached 1" }),
    );
    if !below {
        checks.last_mut().expect("pushed").passed = false;
    }

    let mut worst = 0.0_f64;
    for g in [0.0, 0.5, 0.96, 0.999] {
        for alpha in [ALPHA, Complex64::new(-1.2, 0.4)] {
            let spec = ProtocolSpec::from_model(&ModelParams::qrm_frequency(1.0, g), 0.0, 12.0, alpha)?;
            worst = worst.max(rel(qfi_exact(&spec)?, 4.0 * 144.0 * alpha.norm_sqr()));
        }
    }
    checks.push(Check::at_most("no_preparation_qfi", 8, worst, 1e-12));

    let mut worst = 0.0_f64;
    for (g, x) in [(0.5, 1.0), (0.9, PI), (0.98, 2.0), (0.99, 5.5)] {
        let model = ModelParams::qrm_frequency(1.0, g);
        let spec = ProtocolSpec::from_model(&model, x / sqrt_delta(&model)?, 12.0, ALPHA)?;
        let reference = qfi_exact(&spec)?;
        for theta0 in [-1.0, 0.0, 0.4, 1.3, 2.7] {
            let s = spec.with_theta0(theta0);
            let schrodinger = 4.0 * 144.0 * s.final_state(theta0)?.variance(&s.htheta)?;
            worst = worst.max(rel(schrodinger, reference)).max(rel(qfi_exact(&s)?, reference));
        }
    }
    checks.push(Check::at_most("theta_invariance", 8, worst, 1e-10));

    let mut sym = 0.0_f64;
    let mut unc = 0.0_f64;
    let mut pure = 0.0_f64;
    for g in [0.0, 0.3, 0.7, 0.9, 0.96, 0.99, 0.999] {
        let model = ModelParams::qrm_frequency(1.0, g);
        let sd = sqrt_delta(&model)?;
        for i in 0..9 {
            let spec = ProtocolSpec::from_model(&model, PI * i as f64 / (4.0 * sd), 12.0, ALPHA)?;
            for (h, t) in [(spec.hc, spec.t_c), (spec.htheta, 0.3 * spec.t_theta)] {
                let map = PhaseSpaceMap::new(&h, t)?;
                let scale = map.s.iter().flatten().fold(1.0_f64, |m, v| m.max(v * v));
                sym = sym.max(map.symplectic_defect() / scale);
            }
            for state in [spec.prepared_state()?, spec.final_state(0.3)?] {
                let scale = state.sigma.iter().flatten().fold(1.0_f64, |m, v| m.max(v.abs()));
                unc = unc.max(-state.uncertainty_margin() / scale);
                pure = pure.max((4.0 * state.purity_det() - 1.0).abs() / (scale * scale));
            }
        }
    }
    checks.push(Check::at_most("symplectic", 8, sym, 1e-10));
    checks.push(Check::at_most("uncertainty", 8, unc, 1e-10));
    checks.push(Check::at_most("purity", 8, pure, 1e-10));
    Ok(checks)
}
