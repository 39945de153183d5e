use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use super::scenario_file::{load_scenario, ScenarioFile};
use super::table::{Cell, ResultTable};
use crate::concave::concave_pressure_profile;
use crate::efficiency::solve_pressure_profile;
use crate::error::{Error, Result};
use crate::model::{validate_scenario, PayoffSpec, PeerMatrix, Scenario};
use crate::monitoring::{monitoring_value, monitoring_value_interior};
use crate::sbr::solve_sbr;
use crate::stability::{default_lambda_grid, stability_scan, DEFAULT_EPSILONS};
use crate::statics::{
    dlambda_dalphahat, dlambda_dpkk, dlambda_dq, ProportionalVariation, StatReport,
};
use crate::two_group::{classify_case, figure_sweep, RegimeTag, TwoGroupParams};

/// Caps the worker pool used by grid commands.
pub const THREADS_ENV: &str = "PEERPRESS_THREADS";

#[derive(Debug, Parser)]
#[command(name = "peerpress", version, about = "Efficient conformity weights under misspecified beliefs")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the table to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Best responses at the file's conformity weights (zero if absent)
    Solve(ScenarioArg),
    /// Efficient weight, regime and induced effort per group
    Pressure(ScenarioArg),
    /// Invasion of one group's misspecified type by same-belief mutants
    Invade(InvadeArgs),
    /// Analytic and finite-difference derivatives of efficient weights
    Cstat(CstatArgs),
    /// Perceived value of observing peers
    Monitor(ScenarioArg),
    /// Efficient weights along an assortativity grid (two groups)
    Figure(GridArgs),
    /// Corner taxonomy along an assortativity grid (two groups)
    Corners(GridArgs),
    /// Repeats a command over a one-parameter grid
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct ScenarioArg {
    scenario: PathBuf,
}

#[derive(Debug, Args, Clone, Default)]
struct TargetOpts {
    /// Group index, 1-based
    #[arg(long)]
    group: Option<usize>,
    /// Mutant conformity weight (default: 21-point grid on [0, 1])
    #[arg(long)]
    lambda_mutant: Option<f64>,
    /// Mutant share (default: 1e-2, 1e-3, 1e-4)
    #[arg(long)]
    epsilon: Option<f64>,
    /// alpha_hat, p_kk or q:<j> (default: all)
    #[arg(long)]
    target: Option<String>,
}

#[derive(Debug, Args)]
struct InvadeArgs {
    scenario: PathBuf,
    #[command(flatten)]
    opts: TargetOpts,
}

#[derive(Debug, Args)]
struct CstatArgs {
    scenario: PathBuf,
    #[command(flatten)]
    opts: TargetOpts,
}

#[derive(Debug, Args)]
struct GridArgs {
    scenario: PathBuf,
    /// start:stop:count, inclusive
    #[arg(long, default_value = "0:0.99:100")]
    p_grid: String,
}

#[derive(Debug, Args)]
struct SweepArgs {
    scenario: PathBuf,
    /// p, p_kk:<k>, alpha:<k>, alpha_hat:<k>, q:<k> or c
    #[arg(long, default_value = "p")]
    param: String,
    /// start:stop:count, inclusive
    #[arg(long, default_value = "0:0.99:100")]
    p_grid: String,
    /// solve, pressure, invade, cstat or monitor
    #[arg(long, default_value = "pressure")]
    run: String,
    #[command(flatten)]
    opts: TargetOpts,
}

/// Inclusive linear grid from `start:stop:count`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("grid `{spec}` is not start:stop:count"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err(bad());
    };
    let start: f64 = a.trim().parse().map_err(|_| bad())?;
    let stop: f64 = b.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if n == 0 || !start.is_finite() || !stop.is_finite() {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![start]);
    }
    let step = (stop - start) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i == n - 1 { stop } else { start + step * i as f64 })
        .collect())
}

fn group_index(group: Option<usize>, s: &Scenario) -> Result<Option<usize>> {
    match group {
        None => Ok(None),
        Some(g) if g >= 1 && g <= s.num_groups() => Ok(Some(g - 1)),
        Some(g) => Err(Error::InvalidArgument(format!(
            "--group {g} is outside 1..={}",
            s.num_groups()
        ))),
    }
}

/// The file's weights when it sets any, otherwise the efficient profile.
fn incumbent_scenario(file: &ScenarioFile) -> Result<Scenario> {
    if file.has_lambdas {
        Ok(file.scenario.clone())
    } else {
        let prof = solve_pressure_profile(&file.scenario)?;
        Ok(file.scenario.with_group_lambdas(&prof.lambda_star))
    }
}

fn solve_table(file: &ScenarioFile) -> Result<ResultTable> {
    let s = &file.scenario;
    let lambdas = s.lambdas();
    let sol = solve_sbr(s, &lambdas)?;
    let mut t = ResultTable::new([
        "type", "group", "role", "mass", "lambda", "belief", "x", "peer_expectation",
    ]);
    for (i, ty) in s.types.iter().enumerate() {
        t.push(vec![
            (i + 1).into(),
            (ty.group + 1).into(),
            format!("{:?}", ty.role).into(),
            ty.mass.into(),
            lambdas[i].into(),
            ty.belief.into(),
            sol.x[i].into(),
            sol.peer_expectation[ty.group].into(),
        ]);
    }
    Ok(t)
}

fn pressure_table(s: &Scenario) -> Result<ResultTable> {
    if let PayoffSpec::Concave(_) = s.payoff {
        let prof = concave_pressure_profile(s)?;
        let mut t = ResultTable::new(["group", "lambda_star", "regime", "x_induced", "tilde_lambda_star"]);
        for k in 0..s.num_groups() {
            let regime = if prof.tilde_lambda_star[k] == 0.0 { "CornerZero" } else { "Interior" };
            t.push(vec![
                (k + 1).into(),
                prof.lambda_star[k].into(),
                regime.into(),
                prof.effort[k].into(),
                prof.tilde_lambda_star[k].into(),
            ]);
        }
        return Ok(t);
    }
    let prof = solve_pressure_profile(s)?;
    let mut t = ResultTable::new(["group", "lambda_star", "regime", "x_induced", "equilibrium_class"]);
    for k in 0..s.num_groups() {
        let x = prof.misspecified_effort(s, k).unwrap_or(s.groups[k].alpha);
        t.push(vec![
            (k + 1).into(),
            prof.lambda_star[k].into(),
            prof.regime[k].to_string().into(),
            x.into(),
            prof.equilibrium_class.to_string().into(),
        ]);
    }
    Ok(t)
}

fn invade_table(file: &ScenarioFile, opts: &TargetOpts) -> Result<ResultTable> {
    let s = incumbent_scenario(file)?;
    let k = group_index(opts.group, &s)?
        .ok_or_else(|| Error::InvalidArgument("invade needs --group".into()))?;
    let mutants = opts.lambda_mutant.map_or_else(default_lambda_grid, |l| vec![l]);
    let eps = opts.epsilon.map_or_else(|| DEFAULT_EPSILONS.to_vec(), |e| vec![e]);
    let reports = stability_scan(&s, k, &mutants, &eps)?;
    let mut t = ResultTable::new([
        "group",
        "lambda_incumbent",
        "lambda_mutant",
        "epsilon",
        "incumbent_fitness",
        "mutant_fitness",
        "verdict",
        "epsilon_threshold",
    ]);
    for r in &reports {
        for (i, e) in r.epsilon_grid.iter().enumerate() {
            t.push(vec![
                (k + 1).into(),
                r.lambda_incumbent.into(),
                r.lambda_mutant.into(),
                (*e).into(),
                r.incumbent_fitness[i].into(),
                r.mutant_fitness[i].into(),
                r.verdict.to_string().into(),
                r.epsilon_threshold.map_or_else(|| Cell::text("none"), Cell::Real),
            ]);
        }
    }
    Ok(t)
}

enum StatTarget {
    AlphaHat,
    Pkk,
    Q(usize),
}

fn parse_target(spec: &str, s: &Scenario) -> Result<StatTarget> {
    match spec {
        "alpha_hat" => Ok(StatTarget::AlphaHat),
        "p_kk" => Ok(StatTarget::Pkk),
        other => {
            let j = other
                .strip_prefix("q:")
                .and_then(|j| j.parse::<usize>().ok())
                .ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "--target `{other}` is not alpha_hat, p_kk or q:<j>"
                    ))
                })?;
            Ok(StatTarget::Q(group_index(Some(j), s)?.expect("some")))
        }
    }
}

fn stat(s: &Scenario, k: usize, target: &StatTarget) -> Result<StatReport> {
    match target {
        StatTarget::AlphaHat => dlambda_dalphahat(s, k),
        StatTarget::Pkk => dlambda_dpkk(s, &ProportionalVariation::from_scenario(s, k)?),
        StatTarget::Q(j) => dlambda_dq(s, k, *j),
    }
}

fn cstat_table(s: &Scenario, opts: &TargetOpts) -> Result<ResultTable> {
    let groups: Vec<usize> = match group_index(opts.group, s)? {
        Some(k) => vec![k],
        None => (0..s.num_groups()).collect(),
    };
    let single = opts.target.is_some() && groups.len() == 1;
    let targets: Vec<(String, StatTarget)> = match &opts.target {
        Some(spec) => vec![(spec.clone(), parse_target(spec, s)?)],
        None => {
            let mut v = vec![
                ("alpha_hat".to_string(), StatTarget::AlphaHat),
                ("p_kk".to_string(), StatTarget::Pkk),
            ];
            v.extend((0..s.num_groups()).map(|j| (format!("q:{}", j + 1), StatTarget::Q(j))));
            v
        }
    };
    let mut t = ResultTable::new(["group", "target", "analytic", "numeric", "agrees", "sign_prediction"]);
    for &k in &groups {
        for (name, target) in &targets {
            match stat(s, k, target) {
                Ok(r) => t.push(vec![
                    (k + 1).into(),
                    name.as_str().into(),
                    r.analytic.into(),
                    r.numeric.into(),
                    r.agrees.into(),
                    r.sign_prediction.into(),
                ]),
                Err(e) if single => return Err(e),
                Err(e) => t.push(vec![
                    (k + 1).into(),
                    name.as_str().into(),
                    e.label().into(),
                    e.label().into(),
                    Cell::text(""),
                    Cell::text(""),
                ]),
            }
        }
    }
    Ok(t)
}

fn monitor_table(file: &ScenarioFile) -> Result<ResultTable> {
    let s = incumbent_scenario(file)?;
    let lambdas = s.lambdas();
    let sol = solve_sbr(&s, &lambdas)?;
    let v = monitoring_value(&s, &lambdas, &sol);
    let closed = monitoring_value_interior(&file.scenario);
    let mut t = ResultTable::new(["group", "lambda", "peer_expectation", "delta", "delta_interior"]);
    for k in 0..s.num_groups() {
        let l = s.misspecified_type(k).map_or(0.0, |i| lambdas[i]);
        t.push(vec![
            (k + 1).into(),
            l.into(),
            sol.peer_expectation[k].into(),
            v.delta[k].into(),
            match &closed {
                Ok(c) => c.delta[k].into(),
                Err(e) => e.label().into(),
            },
        ]);
    }
    Ok(t)
}

fn figure_table(s: &Scenario, grid: &[f64]) -> Result<ResultTable> {
    let t2 = TwoGroupParams::from_scenario(s)?;
    let rows: Vec<Vec<Cell>> = grid
        .par_iter()
        .map(|&p| match figure_sweep(&t2, &[p]) {
            Ok(r) => vec![
                p.into(),
                r[0].lambda_star[0].into(),
                r[0].lambda_star[1].into(),
                r[0].regime[0].to_string().into(),
                r[0].regime[1].to_string().into(),
            ],
            Err(e) => vec![
                p.into(),
                e.label().into(),
                e.label().into(),
                e.label().into(),
                e.label().into(),
            ],
        })
        .collect();
    let mut t = ResultTable::new(["p", "lambda_star_1", "lambda_star_2", "regime_1", "regime_2"]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

fn corners_table(s: &Scenario, grid: &[f64]) -> Result<ResultTable> {
    let t2 = TwoGroupParams::from_scenario(s)?;
    let rows: Vec<Vec<Cell>> = grid
        .par_iter()
        .map(|&p| {
            let tp = t2.with_p(p);
            let mut row: Vec<Cell> = vec![p.into()];
            for j in 0..2 {
                match classify_case(&tp, j) {
                    Ok(c) => {
                        row.push(c.tag().to_string().into());
                        row.push(c.condition().into());
                    }
                    Err(e) => {
                        row.push(e.label().into());
                        row.push(Cell::text(""));
                    }
                }
            }
            match tp.scenario("corners").and_then(|sc| solve_pressure_profile(&sc)) {
                Ok(prof) => {
                    for j in 0..2 {
                        row.push(RegimeTag::from(prof.regime[j]).to_string().into());
                    }
                }
                Err(e) => {
                    row.push(e.label().into());
                    row.push(e.label().into());
                }
            }
            row
        })
        .collect();
    let mut t = ResultTable::new([
        "p",
        "tag_1",
        "condition_1",
        "tag_2",
        "condition_2",
        "solved_1",
        "solved_2",
    ]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

enum SweepParam {
    P,
    Pkk(usize),
    Alpha(usize),
    AlphaHat(usize),
    Q(usize),
    C,
}

fn parse_param(spec: &str, s: &Scenario) -> Result<SweepParam> {
    if spec == "p" {
        return Ok(SweepParam::P);
    }
    if spec == "c" {
        return Ok(SweepParam::C);
    }
    let bad = || {
        Error::InvalidArgument(format!(
            "--param `{spec}` is not p, c, p_kk:<k>, alpha:<k>, alpha_hat:<k> or q:<k>"
        ))
    };
    let (name, k) = spec.split_once(':').ok_or_else(bad)?;
    let k: usize = k.parse().map_err(|_| bad())?;
    let k = group_index(Some(k), s)?.expect("some");
    match name {
        "p_kk" => Ok(SweepParam::Pkk(k)),
        "alpha" => Ok(SweepParam::Alpha(k)),
        "alpha_hat" => Ok(SweepParam::AlphaHat(k)),
        "q" => Ok(SweepParam::Q(k)),
        _ => Err(bad()),
    }
}

fn with_param(s: &Scenario, param: &SweepParam, v: f64) -> Result<Scenario> {
    let mut out = s.clone();
    match param {
        SweepParam::P => {
            if s.num_groups() != 2 {
                return Err(Error::InvalidArgument("--param p needs two groups".into()));
            }
            out.peer = PeerMatrix::two_group(v);
        }
        SweepParam::Pkk(k) => {
            out = ProportionalVariation::from_scenario(s, *k)?.apply(s, v)?;
        }
        SweepParam::Alpha(k) => out.groups[*k].alpha = v,
        SweepParam::AlphaHat(k) => out.groups[*k].alpha_hat = v,
        SweepParam::Q(k) => out.groups[*k].q = v,
        SweepParam::C => match &mut out.payoff {
            PayoffSpec::Quadratic { c } => *c = v,
            PayoffSpec::Concave(_) => return Err(Error::RequiresQuadratic),
        },
    }
    out.resync_canonical_types();
    validate_scenario(out)
}

fn sweep_table(file: &ScenarioFile, args: &SweepArgs) -> Result<ResultTable> {
    let inner = args.run.as_str();
    if !matches!(inner, "solve" | "pressure" | "invade" | "cstat" | "monitor") {
        return Err(Error::InvalidArgument(format!(
            "--run `{inner}` is not solve, pressure, invade, cstat or monitor"
        )));
    }
    let param = parse_param(&args.param, &file.scenario)?;
    let grid = parse_grid(&args.p_grid)?;
    let results: Vec<Result<ResultTable>> = grid
        .par_iter()
        .map(|&v| {
            let s = with_param(&file.scenario, &param, v)?;
            let f = ScenarioFile {
                scenario: s,
                has_lambdas: file.has_lambdas,
            };
            match inner {
                "solve" => solve_table(&f),
                "pressure" => pressure_table(&f.scenario),
                "invade" => invade_table(&f, &args.opts),
                "cstat" => cstat_table(&f.scenario, &args.opts),
                _ => monitor_table(&f),
            }
        })
        .collect();
    let inner_cols = results
        .iter()
        .find_map(|r| r.as_ref().ok().map(|t| t.columns.clone()))
        .unwrap_or_else(|| vec!["error".to_string()]);
    let mut columns = vec![args.param.clone()];
    columns.extend(inner_cols.iter().cloned());
    let mut t = ResultTable::new(columns);
    for (v, r) in grid.iter().zip(results) {
        match r {
            Ok(inner) => {
                for row in inner.rows {
                    let mut full = vec![Cell::Real(*v)];
                    full.extend(row);
                    t.push(full);
                }
            }
            Err(e) => {
                let mut full = vec![Cell::Real(*v), e.label().into()];
                full.resize(inner_cols.len() + 1, Cell::text(""));
                t.push(full);
            }
        }
    }
    Ok(t)
}

fn dispatch(cli: &Cli) -> Result<ResultTable> {
    let load = |p: &Path| load_scenario(p);
    match &cli.command {
        Command::Solve(a) => solve_table(&load(&a.scenario)?),
        Command::Pressure(a) => pressure_table(&load(&a.scenario)?.scenario),
        Command::Invade(a) => invade_table(&load(&a.scenario)?, &a.opts),
        Command::Cstat(a) => cstat_table(&load(&a.scenario)?.scenario, &a.opts),
        Command::Monitor(a) => monitor_table(&load(&a.scenario)?),
        Command::Figure(a) => figure_table(&load(&a.scenario)?.scenario, &parse_grid(&a.p_grid)?),
        Command::Corners(a) => corners_table(&load(&a.scenario)?.scenario, &parse_grid(&a.p_grid)?),
        Command::Sweep(a) => sweep_table(&load(&a.scenario)?, a),
    }
}

/// Parses `args` (program name first) and computes the command's table.
pub fn run<I, T>(args: I) -> Result<ResultTable>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    dispatch(&cli)
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Error::InvalidArgument(format!("{THREADS_ENV}={v} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
}

/// Full command-line entry: writes the table to stdout or `--out`,
/// diagnostics to `err`, and returns the process exit code.
pub fn execute<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    2
                }
            };
        }
    };
    let result = configure_threads()
        .and_then(|_| dispatch(&cli))
        .and_then(|t| t.to_csv());
    match result {
        Ok(csv) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, csv.as_bytes())
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => out.write_all(csv.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => 0,
                Err(m) => {
                    let _ = writeln!(err, "error: {m}");
                    2
                }
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
