use std::f64::consts::{FRAC_PI_4, PI};
use std::path::PathBuf;

use marc_core::allocator::{
    self, lgr_path, relay_regime, sample_allocations, saturation_info, sweep_2d_topology, symmetric_allocate,
    threshold_powers, Allocation, LgrId, MmWaveGains,
};
use marc_core::channel::{microwave_summary, DualBandConfig, MicrowaveSummary};
use marc_core::oracle::{kkt_residuals, solve_p1, solve_p2, JointPowers, SupergradientOptions};
use marc_core::presets;
use marc_core::regions::{
    drmarc_region, jointly_near_check, rmarc_achievable_region, sum_rates, threshold_distance, BisectionOptions,
    BoundKind, DirectLinkPowers, NearCriterion, RelayLinkPowers,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::table::{Cell, ResultTable};
use crate::{ConfigArg, Criterion, FigureId, GainArgs};

type Output = (ResultTable, Option<PathBuf>);

pub struct Context {
    /// `--seed` or MARC_SEED, if given.
    pub seed: Option<u64>,
}

impl Context {
    fn seed_for(&self, cfg: Option<&RunConfig>) -> u64 {
        self.seed.or(cfg.and_then(|c| c.seed)).unwrap_or(0)
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect(),
    }
}

/// Loaded config, its model and the `output` path it names.
struct Loaded {
    run: Option<RunConfig>,
    model: DualBandConfig,
}

impl Loaded {
    fn output(&self) -> Option<PathBuf> {
        self.run.as_ref().and_then(|r| r.output.clone())
    }

    fn tol(&self) -> Option<f64> {
        self.run.as_ref().and_then(|r| r.tol)
    }
}

fn load(ctx: &Context, path: Option<&PathBuf>, fallback: impl FnOnce() -> DualBandConfig) -> Result<Loaded, CliError> {
    match path {
        Some(p) => {
            let run = RunConfig::load(p)?;
            let model = run.model(ctx.seed_for(Some(&run)));
            Ok(Loaded { run: Some(run), model })
        }
        None => {
            let mut model = fallback();
            model.qmc.seed = ctx.seed_for(None);
            Ok(Loaded { run: None, model })
        }
    }
}

/// Gains, the microwave summary used for `Σ_R`/`Σ_D`, and the config's output path.
struct Resolved {
    gains: MmWaveGains,
    summary: MicrowaveSummary,
    alpha: f64,
    output: Option<PathBuf>,
}

fn resolve(ctx: &Context, args: &GainArgs, alpha: f64) -> Result<Resolved, CliError> {
    if let Some(path) = &args.config {
        let loaded = load(ctx, Some(path), presets::joint_scenario)?;
        let mut model = loaded.model;
        if args.gamma.is_some() {
            model.gamma = args.gamma;
        }
        let mut gains = model.mmwave_gains()?;
        for (slot, v) in [(&mut gains.r1, args.r1), (&mut gains.r2, args.r2), (&mut gains.d1, args.d1), (&mut gains.d2, args.d2)] {
            if let Some(v) = v {
                *slot = v;
            }
        }
        gains.validate()?;
        let summary = microwave_summary(&model)?;
        return Ok(Resolved { gains, summary, alpha: model.alpha, output: loaded.output() });
    }
    let need = |name: &str, v: Option<f64>| v.ok_or_else(|| CliError::Usage(format!("--{name} is required without --config")));
    let gains = MmWaveGains::new(
        need("r1", args.r1)?,
        need("r2", args.r2)?,
        need("d1", args.d1)?,
        need("d2", args.d2)?,
        need("gamma", args.gamma)?,
    )?;
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(CliError::Usage(format!("--alpha must be positive (got {alpha})")));
    }
    Ok(Resolved { gains, summary: MicrowaveSummary::from_gamma(gains.gamma, alpha), alpha, output: None })
}

fn allocation_cells(a: &Allocation) -> Vec<Cell> {
    a.as_array().into_iter().map(Cell::from).collect()
}

pub fn allocate(ctx: &Context, args: &GainArgs, budget: f64, alpha: f64) -> Result<Output, CliError> {
    let r = resolve(ctx, args, alpha)?;
    let (a, lgr) = allocator::allocate(&r.gains, budget)?;
    let s = sum_rates(&r.summary, &r.gains, &a, r.alpha);
    let mut t = ResultTable::new(&["p1", "q1", "p2", "q2", "lgr", "sigma_big_r", "sigma_big_d", "rate"]);
    let mut row = allocation_cells(&a);
    row.extend([lgr.label().into(), s.sigma_big_r.into(), s.sigma_big_d.into(), s.rate.into()]);
    t.push(row);
    Ok((t, r.output))
}

fn sample_table(samples: &[(f64, Allocation, LgrId)]) -> ResultTable {
    let mut t = ResultTable::new(&["budget", "p1", "q1", "p2", "q2", "lgr"]);
    for (p, a, l) in samples {
        let mut row = vec![Cell::from(*p)];
        row.extend(allocation_cells(a));
        row.push(l.label().into());
        t.push(row);
    }
    t
}

pub fn path(ctx: &Context, args: &GainArgs, dense: Option<usize>, p_max: f64) -> Result<Output, CliError> {
    let r = resolve(ctx, args, 1.0)?;
    if let Some(n) = dense {
        return Ok((sample_table(&sample_allocations(&r.gains, p_max, n)?), r.output));
    }
    let path = lgr_path(&r.gains)?;
    let label = path.label.map(|l| l.to_string()).unwrap_or_default();
    let mut t = ResultTable::new(&["path_label", "lgr", "p_lo", "p_hi"]);
    for s in &path.segments {
        t.push(vec![label.clone().into(), s.lgr.label().into(), s.p_lo.into(), s.p_hi.into()]);
    }
    Ok((t, r.output))
}

pub fn thresholds(ctx: &Context, args: &GainArgs) -> Result<Output, CliError> {
    let r = resolve(ctx, args, 1.0)?;
    let tp = threshold_powers(&r.gains);
    let mut t = ResultTable::new(&["name", "value"]);
    for (name, v) in tp.named() {
        t.push(vec![name.into(), v.into()]);
    }
    Ok((t, r.output))
}

pub fn summary(ctx: &Context, args: &GainArgs) -> Result<Output, CliError> {
    let r = resolve(ctx, args, 1.0)?;
    let g = r.gains;
    let mut t = ResultTable::new(&["name", "value"]);
    let mut put = |k: &str, v: Cell| t.push(vec![k.into(), v]);
    put("sigma_r", r.summary.sigma_r.into());
    put("sigma_d", r.summary.sigma_d.into());
    put("gamma", g.gamma.into());
    put("alpha", r.alpha.into());
    for (k, v) in [("r1", g.r1), ("r2", g.r2), ("d1", g.d1), ("d2", g.d2)] {
        put(k, v.into());
    }
    put("relay_regime", relay_regime(g.r1, g.r2, g.gamma).to_string().into());
    let path = lgr_path(&g)?;
    put("path_label", path.label.map(|l| l.to_string()).unwrap_or_default().into());
    put("lgrs", path.lgrs().iter().map(|l| l.label()).collect::<Vec<_>>().join(" ").into());
    if g.gamma > 1.0 {
        let s = saturation_info(&g)?;
        put("p_sat", s.p_sat.into());
        put("p_fin", s.p_fin.into());
        put("saturation_lgr", s.saturation_lgr.label().into());
        put("final_lgr", s.final_lgr.label().into());
        let (q1, q2) = s.q_bar.unwrap_or((f64::NAN, f64::NAN));
        put("q_bar1", q1.into());
        put("q_bar2", q2.into());
    }
    Ok((t, r.output))
}

pub fn region(ctx: &Context, args: &ConfigArg, direct_p1: f64, direct_p2: f64) -> Result<Output, CliError> {
    let l = load(ctx, args.config.as_ref(), || presets::near_scenario(1.0))?;
    let mut region = rmarc_achievable_region(&l.model, RelayLinkPowers::from_config(&l.model))?;
    if direct_p1 != 0.0 || direct_p2 != 0.0 {
        region = drmarc_region(&region, &l.model, DirectLinkPowers { source1: direct_p1, source2: direct_p2 })?;
    }
    let mut t = ResultTable::new(&["kind", "coeff_r1", "coeff_r2", "bound"]);
    for c in &region.constraints {
        t.push(vec![c.kind.name().into(), (c.coeff_r1 as f64).into(), (c.coeff_r2 as f64).into(), c.bound.into()]);
    }
    Ok((t, l.output()))
}

pub fn check_near(ctx: &Context, args: &ConfigArg, threshold: bool, criterion: Criterion) -> Result<Output, CliError> {
    let l = load(ctx, args.config.as_ref(), || presets::near_scenario(1.0))?;
    if threshold {
        let geometry = match l.model.placement {
            marc_core::channel::Placement::Geometry(g) => g,
            _ => return Err(CliError::Usage("--threshold needs a geometry placement".into())),
        };
        let mut opts = BisectionOptions {
            criterion: match criterion {
                Criterion::Sum => NearCriterion::Sum,
                Criterion::All => NearCriterion::All,
            },
            ..BisectionOptions::default()
        };
        if let Some(tol) = l.tol() {
            opts.tol = tol;
        }
        let d = threshold_distance(&l.model, geometry.d_rd, geometry.phi, l.model.alpha, opts)?;
        let mut t = ResultTable::new(&["d_rd", "phi", "alpha", "criterion", "d_sr_threshold"]);
        let name = match criterion {
            Criterion::Sum => "sum",
            Criterion::All => "all",
        };
        t.push(vec![geometry.d_rd.into(), geometry.phi.into(), l.model.alpha.into(), name.into(), d.into()]);
        return Ok((t, l.output()));
    }
    let rep = jointly_near_check(&l.model, RelayLinkPowers::from_config(&l.model))?;
    let mut t = ResultTable::new(&["condition", "holds", "margin"]);
    for (name, c) in [("user1", rep.cond_r1), ("user2", rep.cond_r2), ("sum", rep.cond_sum)] {
        t.push(vec![name.into(), c.holds.into(), c.margin.into()]);
    }
    Ok((t, l.output()))
}

fn mode_table(template: &DualBandConfig, budget: f64, phi: &[f64], dsr: &[f64]) -> Result<ResultTable, CliError> {
    let rows: Vec<_> = phi
        .par_iter()
        .map(|&p| sweep_2d_topology(template, &[p], dsr, budget))
        .collect::<Result<_, _>>()?;
    let mut t = ResultTable::new(&["phi", "d_sr", "gamma", "mode"]);
    for grid in rows {
        for c in grid.cells {
            t.push(vec![c.phi.into(), c.d_sr.into(), c.gamma.into(), c.mode.label().into()]);
        }
    }
    Ok(t)
}

pub fn sweep2d(ctx: &Context, args: &ConfigArg, budget: f64, phi: &[f64], dsr: &[f64]) -> Result<Output, CliError> {
    let l = load(ctx, args.config.as_ref(), presets::mode_map_scenario)?;
    Ok((mode_table(&l.model, budget, phi, dsr)?, l.output()))
}

/// Tolerances of the agreement suite.
const RATE_GAP: f64 = 1e-5;
const COMPONENT_TOL: f64 = 1e-3;
const STRICT_MARGIN: f64 = 1e-6;
const KKT_TOL: f64 = 1e-6;
const BUDGET_TOL: f64 = 1e-12;
const ORACLE_TOL: f64 = 1e-10;

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

/// Gains log-uniform on `[0.05, 20]`, `γ` uniform on `(1, 30]`, budget uniform on `[0, 100]`.
fn random_tuple(rng: &mut ChaCha8Rng) -> (MmWaveGains, f64) {
    let r1 = log_uniform(rng, 0.05, 20.0);
    let r2 = log_uniform(rng, 0.05, 20.0);
    let d1 = log_uniform(rng, 0.05, 20.0);
    let d2 = log_uniform(rng, 0.05, 20.0);
    let gamma = 30.0 - 29.0 * rng.random::<f64>();
    let budget = 100.0 * rng.random::<f64>();
    (MmWaveGains { r1, r2, d1, d2, gamma }, budget)
}

#[derive(Clone, Copy, Default)]
struct TrialWorst {
    rate_gap: f64,
    component: f64,
    kkt: f64,
    budget: f64,
    failures: usize,
    not_converged: usize,
    ties: usize,
}

impl TrialWorst {
    fn merge(self, o: Self) -> Self {
        TrialWorst {
            rate_gap: self.rate_gap.max(o.rate_gap),
            component: self.component.max(o.component),
            kkt: self.kkt.max(o.kkt),
            budget: self.budget.max(o.budget),
            failures: self.failures + o.failures,
            not_converged: self.not_converged + o.not_converged,
            ties: self.ties + o.ties,
        }
    }
}

fn trial(g: &MmWaveGains, p: f64) -> TrialWorst {
    let (Ok((a, _)), Ok(o)) = (allocator::allocate(g, p), solve_p1(g, p, ORACLE_TOL)) else {
        return TrialWorst { failures: 1, ..Default::default() };
    };
    let Ok(k) = kkt_residuals(g, p, &a) else {
        return TrialWorst { failures: 1, ..Default::default() };
    };
    let rate = marc_core::regions::normalized_rate(g, &a);
    let strict = k.strict_margin > STRICT_MARGIN;
    TrialWorst {
        rate_gap: (rate - o.rate).abs(),
        component: if strict { a.max_abs_diff(&o.allocation) } else { 0.0 },
        kkt: k.max_residual(),
        budget: a.budget_error(p),
        failures: 0,
        not_converged: usize::from(!o.converged),
        ties: usize::from(!strict),
    }
}

pub fn verify(ctx: &Context, trials: usize) -> Result<Output, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed_for(None));
    let tuples: Vec<_> = (0..trials).map(|_| random_tuple(&mut rng)).collect();
    let w = tuples
        .par_iter()
        .map(|(g, p)| trial(g, *p))
        .reduce(TrialWorst::default, TrialWorst::merge);
    let mut t = ResultTable::new(&["metric", "value", "tolerance", "pass"]);
    let rows: [(&str, f64, f64); 7] = [
        ("max_rate_gap", w.rate_gap, RATE_GAP),
        ("max_component_diff_strict", w.component, COMPONENT_TOL),
        ("max_kkt_residual", w.kkt, KKT_TOL),
        ("max_budget_error", w.budget, BUDGET_TOL),
        ("failed_trials", w.failures as f64, 0.0),
        ("oracle_not_converged", w.not_converged as f64, 0.0),
        ("ties", w.ties as f64, f64::INFINITY),
    ];
    let mut all = true;
    for (name, v, tol) in rows {
        let ok = v <= tol;
        all &= ok;
        t.push(vec![name.into(), v.into(), tol.into(), ok.into()]);
    }
    eprintln!(
        "{} trials={trials} max rate gap {:.3e} (<= {RATE_GAP:e}), max KKT residual {:.3e}, max component diff {:.3e}",
        if all { "PASS" } else { "FAIL" },
        w.rate_gap,
        w.kkt,
        w.component
    );
    Ok((t, None))
}

fn p2_table(cfg: &DualBandConfig, budgets: &[f64], opts: SupergradientOptions) -> Result<ResultTable, CliError> {
    let solved: Vec<_> = budgets.par_iter().map(|&p| solve_p2(cfg, p, opts)).collect::<Result<_, _>>()?;
    let mut cols = vec!["budget"];
    cols.extend(JointPowers::NAMES);
    cols.push("rate");
    let mut t = ResultTable::new(&cols);
    for (p, o) in budgets.iter().zip(solved) {
        let joint = o.joint.unwrap_or_default();
        let mut row = vec![Cell::from(*p)];
        row.extend(joint.as_array().into_iter().map(Cell::from));
        row.push(o.rate.into());
        t.push(row);
    }
    Ok(t)
}

pub fn p2(
    ctx: &Context,
    args: &ConfigArg,
    budget: Option<f64>,
    p_max: f64,
    steps: usize,
    iterations: usize,
) -> Result<Output, CliError> {
    let l = load(ctx, args.config.as_ref(), presets::joint_scenario)?;
    let opts = SupergradientOptions { iterations, ..SupergradientOptions::default() };
    let budgets = match budget {
        Some(p) => vec![p],
        None => linspace(0.0, p_max, steps),
    };
    Ok((p2_table(&l.model, &budgets, opts)?, l.output()))
}

fn fig2a() -> Result<ResultTable, CliError> {
    let dsr = linspace(0.025, 2.5, 100);
    let curve = |d_rd: f64| -> Result<Vec<(f64, f64)>, CliError> {
        let template = presets::near_scenario(d_rd);
        dsr.par_iter()
            .map(|&d_sr| {
                let cfg = template.with_geometry(marc_core::channel::Geometry { d_rd, d_sr, phi: FRAC_PI_4 });
                let region = rmarc_achievable_region(&cfg, RelayLinkPowers::from_config(&cfg))?;
                let relay = region.bound(BoundKind::RelaySum).unwrap_or(f64::INFINITY);
                let dest = region.bound(BoundKind::DestSum).unwrap_or(f64::INFINITY);
                Ok((relay.min(dest), dest))
            })
            .collect()
    };
    let (a, b) = (curve(1.0)?, curve(0.5)?);
    let mut t = ResultTable::new(&["d_sr", "asr_rd1", "ob_rd1", "asr_rd05", "ob_rd05"]);
    for i in 0..dsr.len() {
        t.push(vec![dsr[i].into(), a[i].0.into(), a[i].1.into(), b[i].0.into(), b[i].1.into()]);
    }
    Ok(t)
}

fn fig7a() -> Result<ResultTable, CliError> {
    let cfg = presets::joint_scenario();
    let gamma = microwave_summary(&cfg)?.gamma;
    let mut t = ResultTable::new(&["budget", "p1", "q1", "p2", "q2", "lgr", "gamma"]);
    for p in linspace(0.0, 5.0, 201) {
        let (a, l) = symmetric_allocate(1.0, 1.5, gamma, p)?;
        let mut row = vec![Cell::from(p)];
        row.extend(allocation_cells(&a));
        row.extend([l.label().into(), gamma.into()]);
        t.push(row);
    }
    Ok(t)
}

pub fn figure(ctx: &Context, id: FigureId) -> Result<ResultTable, CliError> {
    let seeded = |mut c: DualBandConfig| {
        c.qmc.seed = ctx.seed_for(None);
        c
    };
    match id {
        FigureId::Fig2a => fig2a(),
        FigureId::Fig5 => mode_table(
            &seeded(presets::mode_map_scenario()),
            10.0,
            &linspace(0.0, PI * 0.99, 61),
            &linspace(0.025, 2.5, 100),
        ),
        FigureId::Fig6a => Ok(sample_table(&sample_allocations(&presets::moderate_gains(), 2.0, 201)?)),
        FigureId::Fig6b => Ok(sample_table(&sample_allocations(&presets::strong_gains(), 2.0, 201)?)),
        FigureId::Fig7a => fig7a(),
        FigureId::Fig7b => {
            let mut grid: Vec<f64> = (1..=100).map(|i| 0.05 * i as f64).collect();
            grid.extend((6..=100).map(|i| i as f64));
            p2_table(&seeded(presets::joint_scenario()), &grid, SupergradientOptions::default())
        }
    }
}
