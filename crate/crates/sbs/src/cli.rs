//! Batch command-line layer: TOML experiment configs in, CSV artifacts out.
//! Every command validates its whole config before doing any work, all
//! randomness flows from the single `seed` field (overridable with
//! `--seed`), and `--jobs` only changes how replications are scheduled,
//! never what they compute.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::analysis;
use crate::csvio;
use crate::dynamics::{
    simulate, Backend, InitialCondition, ModelParams, RunConfig, SimOutput,
};
use crate::error::Error;
use crate::graph::GraphTopology;
use crate::meanfield::{self, OdeState};
use crate::seeding;
use crate::{coupling, Result};

/// Failure classes mapped to process exit codes: validation problems exit
/// with 2, runtime (I/O) problems with 3.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(msg) | CliError::Runtime(msg) => msg,
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        match err {
            Error::Io(e) => CliError::Runtime(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Flags shared by every subcommand.
#[derive(Debug, Clone)]
pub struct CommonOpts {
    pub config: PathBuf,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out: PathBuf,
    pub dry_run: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphConfig {
    pub kind: String,
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub seed: Option<u64>,
    pub require_connected: Option<bool>,
    pub components: Option<usize>,
    pub size: Option<usize>,
    pub path: Option<PathBuf>,
}

impl GraphConfig {
    fn reject_unused(&self, kind: &str, used: &[&str]) -> CliResult<()> {
        let fields: [(&str, bool); 7] = [
            ("n", self.n.is_some()),
            ("d", self.d.is_some()),
            ("seed", self.seed.is_some()),
            ("require_connected", self.require_connected.is_some()),
            ("components", self.components.is_some()),
            ("size", self.size.is_some()),
            ("path", self.path.is_some()),
        ];
        for (name, present) in fields {
            if present && !used.contains(&name) {
                return Err(CliError::Validation(format!(
                    "graph: field `{name}` is not used by kind `{kind}`"
                )));
            }
        }
        Ok(())
    }

    fn need<T: Clone>(&self, field: Option<&T>, name: &str) -> CliResult<T> {
        field.cloned().ok_or_else(|| {
            CliError::Validation(format!(
                "graph: kind `{}` requires field `{name}`",
                self.kind
            ))
        })
    }

    pub fn build(&self) -> CliResult<GraphTopology> {
        let g = match self.kind.as_str() {
            "complete" => {
                self.reject_unused("complete", &["n"])?;
                GraphTopology::build_complete(self.need(self.n.as_ref(), "n")?)?
            }
            "cycle" => {
                self.reject_unused("cycle", &["n"])?;
                GraphTopology::build_cycle(self.need(self.n.as_ref(), "n")?)?
            }
            "random_regular" => {
                self.reject_unused("random_regular", &["n", "d", "seed", "require_connected"])?;
                GraphTopology::build_random_regular(
                    self.need(self.n.as_ref(), "n")?,
                    self.need(self.d.as_ref(), "d")?,
                    self.need(self.seed.as_ref(), "seed")?,
                    self.require_connected.unwrap_or(false),
                )?
            }
            "disjoint_cliques" => {
                self.reject_unused("disjoint_cliques", &["components", "size"])?;
                GraphTopology::build_disjoint_cliques(
                    self.need(self.components.as_ref(), "components")?,
                    self.need(self.size.as_ref(), "size")?,
                )?
            }
            "edge_list" => {
                self.reject_unused("edge_list", &["path"])?;
                GraphTopology::read_edge_list(&self.need(self.path.as_ref(), "path")?)?
            }
            other => {
                return Err(CliError::Validation(format!(
                    "graph: unknown kind `{other}` (expected complete | cycle | random_regular \
                     | disjoint_cliques | edge_list)"
                )))
            }
        };
        Ok(g)
    }

    fn describe(&self) -> String {
        let mut out = format!("kind={}", self.kind);
        let fields: [(&str, Option<String>); 5] = [
            ("n", self.n.map(|v| v.to_string())),
            ("d", self.d.map(|v| v.to_string())),
            ("components", self.components.map(|v| v.to_string())),
            ("size", self.size.map(|v| v.to_string())),
            ("path", self.path.as_ref().map(|p| p.display().to_string())),
        ];
        for (name, value) in fields {
            if let Some(value) = value {
                out.push_str(&format!(" {name}={value}"));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub rewards: Vec<f64>,
    pub exploration: f64,
    pub clock_rate: f64,
}

impl ParamsConfig {
    pub fn build(&self) -> CliResult<ModelParams> {
        Ok(ModelParams::new(
            self.rewards.clone(),
            self.exploration,
            self.clock_rate,
        )?)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitConfig {
    pub kind: String,
    pub memories: Option<Vec<u8>>,
    pub counts: Option<Vec<u64>>,
    pub q: Option<Vec<f64>>,
}

impl InitConfig {
    pub fn build(&self) -> CliResult<InitialCondition> {
        let wrong = |msg: &str| Err(CliError::Validation(format!("init: {msg}")));
        match self.kind.as_str() {
            "explicit" => match (&self.memories, &self.counts, &self.q) {
                (Some(m), None, None) => Ok(InitialCondition::Explicit(m.clone())),
                _ => wrong("kind `explicit` takes exactly the `memories` field"),
            },
            "counts" => match (&self.memories, &self.counts, &self.q) {
                (None, Some(z), None) => Ok(InitialCondition::Counts(z.clone())),
                _ => wrong("kind `counts` takes exactly the `counts` field"),
            },
            "iid" => match (&self.memories, &self.counts, &self.q) {
                (None, None, Some(q)) => Ok(InitialCondition::Iid(q.clone())),
                _ => wrong("kind `iid` takes exactly the `q` field"),
            },
            other => wrong(&format!(
                "unknown kind `{other}` (expected explicit | counts | iid)"
            )),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub t_max: f64,
    pub record_grid: f64,
    pub record_jumps: Option<bool>,
    pub stop_on_absorption: Option<bool>,
    pub backend: Option<String>,
}

impl RunSection {
    pub fn build(&self, seed: u64) -> CliResult<RunConfig> {
        let backend = match self.backend.as_deref() {
            None | Some("behavioral") => Backend::Behavioral,
            Some("pathwise") => Backend::Pathwise,
            Some(other) => {
                return Err(CliError::Validation(format!(
                    "run: unknown backend `{other}` (expected behavioral | pathwise)"
                )))
            }
        };
        let cfg = RunConfig {
            t_max: self.t_max,
            seed,
            backend,
            record_grid: self.record_grid,
            record_jumps: self.record_jumps.unwrap_or(false),
            stop_on_absorption: self.stop_on_absorption.unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub seed: u64,
    pub graph: GraphConfig,
    pub params: ParamsConfig,
    pub init: InitConfig,
    pub run: RunSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeanfieldConfig {
    pub params: ParamsConfig,
    pub y0: Vec<f64>,
    pub t_end: f64,
    pub h: Option<f64>,
    pub bound_c: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    pub seed: u64,
    pub graph: GraphConfig,
    pub params: ParamsConfig,
    pub init: InitConfig,
    pub run: RunSection,
    pub h: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnabilityConfig {
    pub seed: u64,
    pub graph: GraphConfig,
    pub params: ParamsConfig,
    pub init: InitConfig,
    pub replications: u64,
    pub t_max: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingConfig {
    pub seed: u64,
    pub graph: GraphConfig,
    pub params: ParamsConfig,
    pub q: Vec<f64>,
    pub horizon: f64,
    pub replications: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub n: usize,
    pub params: ParamsConfig,
    pub replications: u64,
    pub t_max: Option<f64>,
    pub q: Option<Vec<f64>>,
}

fn load_config<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Validation(format!("config error: {e}")))
}

fn write_file(dir: &Path, name: &str, content: &[u8]) -> CliResult<PathBuf> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, content)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

/// Runs `f` on a rayon pool with the requested thread count (or the ambient
/// pool when unset). Replication results are keyed by index, so the thread
/// count never changes any output.
fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    match jobs {
        None => Ok(f()),
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| CliError::Runtime(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

pub fn cmd_simulate(opts: &CommonOpts) -> CliResult<()> {
    let config: SimulateConfig = load_config(&opts.config)?;
    let seed = opts.seed.unwrap_or(config.seed);
    let graph = config.graph.build()?;
    let params = config.params.build()?;
    let init = config.init.build()?;
    let run = config.run.build(seed)?;
    // Validate the initial condition against the realized sizes up front.
    crate::dynamics::init_state(graph.num_agents(), params.num_arms(), &init, seed)?;
    if opts.dry_run {
        println!(
            "plan: simulate graph[{}] N={} K={} t_max={} backend={:?} seed={seed} out={}",
            config.graph.describe(),
            graph.num_agents(),
            params.num_arms(),
            run.t_max,
            run.backend,
            opts.out.display()
        );
        return Ok(());
    }
    let out = simulate(&graph, &params, &init, &run)?;
    let mut buf = Vec::new();
    csvio::write_sim_trajectory(&mut buf, &out).map_err(io_runtime)?;
    write_file(&opts.out, "trajectory.csv", &buf)?;
    if run.record_jumps {
        let mut buf = Vec::new();
        csvio::write_jump_chain(&mut buf, &out).map_err(io_runtime)?;
        write_file(&opts.out, "jumps.csv", &buf)?;
    }
    println!(
        "simulate: {} events, status {:?}",
        out.event_count, out.absorption.status
    );
    Ok(())
}

pub fn cmd_meanfield(opts: &CommonOpts) -> CliResult<()> {
    let config: MeanfieldConfig = load_config(&opts.config)?;
    let params = config.params.build()?;
    let y0 = OdeState::new(config.y0.clone())?;
    let h = config.h.unwrap_or(1e-3);
    let c = config.bound_c.unwrap_or(0.5);
    validate_step(h)?;
    if !c.is_finite() || c <= 0.0 || c >= 1.0 {
        return Err(CliError::Validation(format!(
            "bound_c must lie strictly inside (0, 1), got {c}"
        )));
    }
    if opts.dry_run {
        println!(
            "plan: meanfield K={} t_end={} h={h} bound_c={c} out={}",
            params.num_arms(),
            config.t_end,
            opts.out.display()
        );
        return Ok(());
    }
    let traj = meanfield::integrate(&y0, &params, config.t_end, h)?;
    let mut buf = Vec::new();
    csvio::write_ode_trajectory(&mut buf, &traj).map_err(io_runtime)?;
    write_file(&opts.out, "ode_trajectory.csv", &buf)?;

    match meanfield::convergence_bound(&params, &y0, c) {
        Ok(bound) => {
            let mut buf = Vec::new();
            use std::io::Write;
            writeln!(buf, "t,y1_lower_bound,y0_upper_bound").map_err(io_runtime)?;
            for (t, _) in traj.grid() {
                writeln!(
                    buf,
                    "{},{},{}",
                    csvio::fmt_f64(t),
                    csvio::fmt_f64(bound.lower_bound_y1(t)),
                    csvio::fmt_f64(bound.y0_upper_bound(t))
                )
                .map_err(io_runtime)?;
            }
            write_file(&opts.out, "bounds.csv", &buf)?;
            println!(
                "meanfield: rate={} delay={}",
                csvio::fmt_f64(bound.rate()),
                csvio::fmt_f64(bound.delay())
            );
        }
        Err(err) => log::warn!("no convergence envelope written: {err}"),
    }
    Ok(())
}

pub fn cmd_compare(opts: &CommonOpts) -> CliResult<()> {
    let config: CompareConfig = load_config(&opts.config)?;
    let seed = opts.seed.unwrap_or(config.seed);
    let graph = config.graph.build()?;
    let params = config.params.build()?;
    let init = config.init.build()?;
    let run = config.run.build(seed)?;
    let h = config.h.unwrap_or(1e-3);
    validate_step(h)?;
    let n = graph.num_agents();
    // The limit system starts from the i.i.d. law when one is given, and
    // from the realized initial fractions otherwise.
    let y0_vec = match &init {
        InitialCondition::Iid(q) => q.clone(),
        _ => {
            let state = crate::dynamics::init_state(n, params.num_arms(), &init, seed)?;
            state
                .occupancy()
                .iter()
                .map(|&z| z as f64 / n as f64)
                .collect()
        }
    };
    let y0 = OdeState::new(y0_vec)?;
    if opts.dry_run {
        println!(
            "plan: compare graph[{}] N={n} t_max={} h={h} seed={seed} out={}",
            config.graph.describe(),
            run.t_max,
            opts.out.display()
        );
        return Ok(());
    }
    let sim = simulate(&graph, &params, &init, &run)?;
    let ode = meanfield::integrate(&y0, &params, run.t_max, h)?;
    let rows: Vec<(f64, Vec<u64>, Vec<f64>)> = sim
        .trajectory
        .iter()
        .map(|(t, z)| (*t, z.clone(), ode.eta_at(*t)))
        .collect();
    let mut buf = Vec::new();
    csvio::write_compare(&mut buf, n, &rows).map_err(io_runtime)?;
    write_file(&opts.out, "compare.csv", &buf)?;

    let k = params.num_arms();
    let mut max_gap = vec![0.0f64; k + 1];
    for (_, z, y) in &rows {
        for i in 0..=k {
            max_gap[i] = max_gap[i].max((z[i] as f64 / n as f64 - y[i]).abs());
        }
    }
    let mut summary: Vec<(String, String)> = Vec::new();
    for (i, gap) in max_gap.iter().enumerate() {
        summary.push((format!("max_abs_diff_y{i}"), csvio::fmt_f64(*gap)));
    }
    summary.push(("grid_points".to_string(), rows.len().to_string()));
    let rows_ref: Vec<(&str, String)> = summary
        .iter()
        .map(|(k, v)| (k.as_str(), v.clone()))
        .collect();
    let mut buf = Vec::new();
    csvio::write_summary(&mut buf, &rows_ref).map_err(io_runtime)?;
    write_file(&opts.out, "summary.csv", &buf)?;
    println!("compare: max |Y1 - y1| = {}", csvio::fmt_f64(max_gap[1]));
    Ok(())
}

pub fn cmd_learnability(opts: &CommonOpts) -> CliResult<()> {
    let config: LearnabilityConfig = load_config(&opts.config)?;
    let seed = opts.seed.unwrap_or(config.seed);
    let graph = config.graph.build()?;
    let params = config.params.build()?;
    let init = config.init.build()?;
    crate::dynamics::init_state(graph.num_agents(), params.num_arms(), &init, seed)?;
    let t_max = config
        .t_max
        .unwrap_or_else(|| analysis::default_t_max(graph.num_agents(), params.clock_rate()));
    if opts.dry_run {
        println!(
            "plan: learnability graph[{}] N={} replications={} t_max={t_max} seed={seed} out={}",
            config.graph.describe(),
            graph.num_agents(),
            config.replications,
            opts.out.display()
        );
        return Ok(());
    }
    let est = with_jobs(opts.jobs, || {
        analysis::estimate_learnability(&graph, &params, &init, config.replications, t_max, seed)
    })??;
    let rows = csvio::learnability_summary_rows(&est);
    let mut buf = Vec::new();
    csvio::write_summary(&mut buf, &rows).map_err(io_runtime)?;
    write_file(&opts.out, "summary.csv", &buf)?;
    println!(
        "learnability: {}/{} successes ({} timeouts), estimate {}",
        est.successes,
        est.replications,
        est.timeouts,
        csvio::fmt_f64(est.point_estimate)
    );
    Ok(())
}

pub fn cmd_coupling(opts: &CommonOpts) -> CliResult<()> {
    let config: CouplingConfig = load_config(&opts.config)?;
    let seed = opts.seed.unwrap_or(config.seed);
    let graph = config.graph.build()?;
    let params = config.params.build()?;
    crate::dynamics::validate_simplex(&config.q, params.num_arms() + 1)?;
    if opts.dry_run {
        println!(
            "plan: coupling graph[{}] N={} horizon={} replications={} seed={seed} out={}",
            config.graph.describe(),
            graph.num_agents(),
            config.horizon,
            config.replications,
            opts.out.display()
        );
        return Ok(());
    }
    let report = with_jobs(opts.jobs, || {
        coupling::coupling_error(
            &graph,
            &params,
            &config.q,
            config.horizon,
            config.replications,
            seed,
        )
    })??;
    let mut buf = Vec::new();
    csvio::write_coupling(&mut buf, &report).map_err(io_runtime)?;
    write_file(&opts.out, "coupling.csv", &buf)?;
    println!(
        "coupling: max_error {} (bound {}, vacuous {})",
        csvio::fmt_f64(report.max_error),
        csvio::fmt_f64(report.theoretical_bound),
        report.vacuous
    );
    Ok(())
}

pub fn cmd_scenario(name: &str, opts: &CommonOpts) -> CliResult<()> {
    let config: ScenarioConfig = load_config(&opts.config)?;
    let seed = opts.seed.unwrap_or(config.seed);
    let params = config.params.build()?;
    match name {
        "example1" => scenario_example1(&config, &params, seed, opts),
        "example2" => scenario_example2(&config, &params, seed, opts),
        other => Err(CliError::Validation(format!(
            "unknown scenario `{other}` (expected example1 | example2)"
        ))),
    }
}

fn scenario_example1(
    config: &ScenarioConfig,
    params: &ModelParams,
    seed: u64,
    opts: &CommonOpts,
) -> CliResult<()> {
    if params.num_arms() < 2 {
        return Err(CliError::Validation(
            "scenario example1 needs at least two arms".into(),
        ));
    }
    let (graph, init) = analysis::scenario_example1(config.n)?;
    let t_max = config
        .t_max
        .unwrap_or_else(|| analysis::default_t_max(config.n, params.clock_rate()));
    if opts.dry_run {
        println!(
            "plan: scenario example1 cycle N={} replications={} t_max={t_max} seed={seed} out={}",
            config.n,
            config.replications,
            opts.out.display()
        );
        return Ok(());
    }
    let outputs: Vec<Result<SimOutput>> = with_jobs(opts.jobs, || {
        seeding::run_replications(config.replications, seed, |_, run_seed| {
            simulate(
                &graph,
                params,
                &init,
                &RunConfig {
                    t_max,
                    seed: run_seed,
                    backend: Backend::Behavioral,
                    record_grid: t_max,
                    record_jumps: true,
                    stop_on_absorption: true,
                },
            )
        })
    })?;
    let outputs = outputs.into_iter().collect::<Result<Vec<_>>>()?;
    let stats = analysis::jump_chain_stats(&outputs, &graph, params)?;
    let mut rows = csvio::jump_summary_rows(&stats);
    rows.push(("replications", config.replications.to_string()));
    let mut buf = Vec::new();
    csvio::write_summary(&mut buf, &rows).map_err(io_runtime)?;
    write_file(&opts.out, "summary.csv", &buf)?;
    println!(
        "scenario example1: up_fraction {} over {} jumps",
        csvio::fmt_f64(stats.up_fraction),
        stats.num_jumps
    );
    Ok(())
}

fn scenario_example2(
    config: &ScenarioConfig,
    params: &ModelParams,
    seed: u64,
    opts: &CommonOpts,
) -> CliResult<()> {
    let scenario = analysis::scenario_example2(config.n)?;
    let q = config
        .q
        .clone()
        .unwrap_or_else(|| scenario.suggested_q.clone());
    crate::dynamics::validate_simplex(&q, params.num_arms() + 1)?;
    let n = scenario.graph.num_agents();
    let t_max = config
        .t_max
        .unwrap_or_else(|| analysis::default_t_max(n, params.clock_rate()));
    if opts.dry_run {
        println!(
            "plan: scenario example2 {} cliques of {} ({} dropped) replications={} t_max={t_max} \
             seed={seed} out={}",
            scenario.num_components,
            scenario.component_size,
            scenario.dropped_agents,
            config.replications,
            opts.out.display()
        );
        return Ok(());
    }
    let init = InitialCondition::Iid(q);
    let graph = &scenario.graph;
    let results: Vec<Result<(bool, bool)>> = with_jobs(opts.jobs, || {
        seeding::run_replications(config.replications, seed, |_, run_seed| {
            let out = simulate(
                graph,
                params,
                &init,
                &RunConfig {
                    t_max,
                    seed: run_seed,
                    backend: Backend::Behavioral,
                    record_grid: t_max,
                    record_jumps: false,
                    stop_on_absorption: true,
                },
            )?;
            let wrong = out
                .absorption
                .per_component_consensus
                .as_ref()
                .map(|arms| arms.iter().any(|&a| a >= 2))
                .unwrap_or(false);
            let timed_out = out.absorption.absorption_time.is_none();
            Ok((wrong, timed_out))
        })
    })?;
    let mut wrong_count = 0u64;
    let mut timeouts = 0u64;
    for r in results {
        let (wrong, timed_out) = r?;
        if wrong {
            wrong_count += 1;
        }
        if timed_out {
            timeouts += 1;
        }
    }
    let fraction = wrong_count as f64 / config.replications as f64;
    let rows = vec![
        ("wrong_component_fraction", csvio::fmt_f64(fraction)),
        ("components", scenario.num_components.to_string()),
        ("component_size", scenario.component_size.to_string()),
        ("dropped_agents", scenario.dropped_agents.to_string()),
        ("replications", config.replications.to_string()),
        ("timeouts", timeouts.to_string()),
    ];
    let mut buf = Vec::new();
    csvio::write_summary(&mut buf, &rows).map_err(io_runtime)?;
    write_file(&opts.out, "summary.csv", &buf)?;
    println!("scenario example2: wrong-consensus fraction {}", csvio::fmt_f64(fraction));
    Ok(())
}

fn validate_step(h: f64) -> CliResult<()> {
    if h.is_nan() || h <= 0.0 || h > meanfield::MAX_STEP {
        return Err(CliError::Validation(format!(
            "h must satisfy 0 < h <= {}, got {h}",
            meanfield::MAX_STEP
        )));
    }
    Ok(())
}

fn io_runtime(e: std::io::Error) -> CliError {
    CliError::Runtime(e.to_string())
}
