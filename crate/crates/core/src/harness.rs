//! Benchmark harness behind the command-line tool: scenario generation,
//! planner sweeps into CSV, normalized summaries, and oracle comparison.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridRun, GridSpec};
use crate::oracle::{build_complete_graph, exact_solve, DEFAULT_NODE_LIMIT};
use crate::par;
use crate::scenario::{generate, Scenario, ScenarioSpec};
use crate::sparse::{size_bound, PlanOutcome, PlanStats, PlannerParams, SparsePlanner};
use crate::steering::{SteeringSpec, System};
use crate::world::Bounds;

/// Grid search budget when a config gives none.
pub const GRID_MAX_ITERATIONS: usize = 1_000_000;

/// Fixed CSV column order.
pub const CSV_HEADER: &str = "scenario_id,seed,planner,grid_discr,angular_discr,connectivity,cost,plan_time_ms,nodes,edges,edge_checks,iterations,area_sensed,status";

/// Angles in config files may be radians or text such as `"pi/8"`.
mod angle {
    use super::*;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Radians(f64),
        Text(String),
    }

    pub fn parse(text: &str) -> Option<f64> {
        let t = text.trim().to_ascii_lowercase().replace(' ', "");
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (n.to_string(), d.parse::<f64>().ok()?),
            None => (t.clone(), 1.0),
        };
        let scale = match num.strip_suffix("pi") {
            Some("") => 1.0,
            Some(k) => k.strip_suffix('*').unwrap_or(k).parse::<f64>().ok()?,
            None => return (den == 1.0).then(|| num.parse::<f64>().ok()).flatten(),
        };
        Some(scale * PI / den)
    }

    fn resolve<E: serde::de::Error>(r: Repr) -> std::result::Result<f64, E> {
        match r {
            Repr::Radians(x) => Ok(x),
            Repr::Text(s) => parse(&s).ok_or_else(|| E::custom(format!("cannot read `{s}` as an angle"))),
        }
    }

    pub fn de<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        resolve(Repr::deserialize(d)?)
    }

    pub fn de_opt<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<f64>, D::Error> {
        Option::<Repr>::deserialize(d)?.map(resolve).transpose()
    }

    /// Radians rounded to six decimals with trailing zeros dropped.
    pub fn short(x: f64) -> String {
        let s = format!("{x:.6}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    }
}

pub use angle::parse as parse_angle;

fn default_size() -> f64 {
    2.0
}

fn default_delta() -> f64 {
    0.25
}

fn default_angular() -> f64 {
    PI / 8.0
}

/// Scenario family parameters shared by `generate` and `oracle-check`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    pub system: SteeringSpec,
    /// Signed so that negative values reach validation.
    pub obstacle_count: i64,
    #[serde(default = "default_size")]
    pub obstacle_size: f64,
    /// Defaults to `[0, 30]` in every dimension.
    #[serde(default)]
    pub bounds: Option<Bounds>,
    /// Explicit seeds; when absent, `seed_count` seeds starting at the base seed.
    #[serde(default)]
    pub seeds: Option<Vec<u64>>,
    #[serde(default)]
    pub seed_count: Option<u64>,
    #[serde(default = "default_delta")]
    pub boundary_delta: f64,
    #[serde(default = "default_angular", deserialize_with = "angle::de")]
    pub angular_delta: f64,
}

impl ScenarioParams {
    pub fn validate(&self) -> Result<()> {
        if self.obstacle_count < 0 {
            return Err(Error::invalid("obstacle_count", "must not be negative"));
        }
        if self.seeds.is_none() && self.seed_count.is_none() {
            return Err(Error::invalid("seeds", "give either `seeds` or `seed_count`"));
        }
        if let Some(b) = &self.bounds {
            if b.dim() != self.system.system.dim() {
                return Err(Error::invalid("bounds", "dimension does not match the system"));
            }
        }
        self.spec_for(0).validate()
    }

    /// Seeds to generate; `base` offsets a `seed_count` range.
    pub fn seed_list(&self, base: u64) -> Vec<u64> {
        match (&self.seeds, self.seed_count) {
            (Some(s), _) => s.clone(),
            (None, Some(n)) => (base..base + n).collect(),
            (None, None) => Vec::new(),
        }
    }

    pub fn spec_for(&self, seed: u64) -> ScenarioSpec {
        let mut spec = ScenarioSpec::standard(self.system, self.obstacle_count.max(0) as usize, self.obstacle_size, seed);
        if let Some(b) = &self.bounds {
            spec.bounds = b.clone();
        }
        spec.boundary_delta = self.boundary_delta;
        spec.angular_delta = self.angular_delta;
        spec
    }
}

/// Reads scenario parameters from a file holding either the parameters
/// themselves or a sweep configuration with a `scenarios` section.
pub fn load_scenario_params(path: &Path) -> Result<ScenarioParams> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::json(path, e))?;
    let section = match value.get("scenarios") {
        Some(inner) if value.get("planners").is_some() => inner.clone(),
        _ => value,
    };
    let params: ScenarioParams = match serde_json::from_value(section) {
        Ok(p) => p,
        // re-parse the text so the error carries a line and column
        Err(_) if text.contains("\"planners\"") => {
            let sweep: SweepConfig = serde_json::from_str(&text).map_err(|e| Error::json(path, e))?;
            sweep
                .scenarios
                .ok_or_else(|| with_path(path, Error::invalid("scenarios", "missing")))?
        }
        Err(_) => serde_json::from_str(&text).map_err(|e| Error::json(path, e))?,
    };
    params.validate().map_err(|e| with_path(path, e))?;
    Ok(params)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "planner", rename_all = "snake_case")]
pub enum PlannerConfig {
    Sparse {
        /// Boundary spacing; the scenario's own when absent.
        #[serde(default)]
        delta: Option<f64>,
        #[serde(default, deserialize_with = "angle::de_opt")]
        angular_delta: Option<f64>,
        #[serde(default)]
        max_iterations: Option<usize>,
        #[serde(default)]
        max_edges: Option<usize>,
    },
    Grid {
        spacing: f64,
        connectivity: u32,
        #[serde(default, deserialize_with = "angle::de_opt")]
        angular_delta: Option<f64>,
        #[serde(default)]
        prune_factor: Option<f64>,
        #[serde(default)]
        max_iterations: Option<usize>,
    },
}

impl PlannerConfig {
    pub fn kind(&self) -> PlannerKind {
        match self {
            PlannerConfig::Sparse { .. } => PlannerKind::Sparse,
            PlannerConfig::Grid { .. } => PlannerKind::Grid,
        }
    }

    fn validate(&self, system: System) -> Result<()> {
        let positive = |v: Option<f64>, field: &str| match v {
            Some(x) if !(x > 0.0) => Err(Error::invalid(field, "must be positive")),
            _ => Ok(()),
        };
        match *self {
            PlannerConfig::Sparse {
                delta,
                angular_delta,
                max_iterations,
                max_edges,
            } => {
                positive(delta, "delta")?;
                positive(angular_delta, "angular_delta")?;
                if max_iterations == Some(0) {
                    return Err(Error::invalid("max_iterations", "must be at least 1"));
                }
                if max_edges == Some(0) {
                    return Err(Error::invalid("max_edges", "must be at least 1"));
                }
            }
            PlannerConfig::Grid {
                spacing,
                angular_delta,
                prune_factor,
                max_iterations,
                ..
            } => {
                positive(Some(spacing), "spacing")?;
                positive(angular_delta, "angular_delta")?;
                if system == System::Dubins && angular_delta.is_none() {
                    return Err(Error::invalid("angular_delta", "required for a Dubins lattice"));
                }
                if let Some(p) = prune_factor {
                    if !(p > 1.0) {
                        return Err(Error::invalid("prune_factor", "must exceed 1"));
                    }
                }
                if max_iterations == Some(0) {
                    return Err(Error::invalid("max_iterations", "must be at least 1"));
                }
            }
        }
        Ok(())
    }
}

/// A sweep: which planners to run and which one normalizes the others.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Scenario family for `generate`; `run` only needs the planners.
    #[serde(default)]
    pub scenarios: Option<ScenarioParams>,
    pub planners: Vec<PlannerConfig>,
    /// A configuration label, or a planner kind that matches exactly one entry.
    pub reference: String,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(s) = &self.scenarios {
            s.validate()?;
        }
        if self.planners.is_empty() {
            return Err(Error::invalid("planners", "at least one planner is required"));
        }
        let system = self.scenarios.as_ref().map_or(System::Holonomic2d, |s| s.system.system);
        for p in &self.planners {
            p.validate(system)?;
        }
        let kinds: Vec<PlannerKind> = self.planners.iter().map(PlannerConfig::kind).collect();
        let by_kind = kinds.iter().filter(|k| k.as_str() == self.reference).count();
        let mentions = self.planners.iter().any(|p| config_label(p, None) == self.reference) || by_kind == 1;
        // labels that depend on scenario defaults can only be resolved at summarize time
        let deferred = self.reference.contains('/');
        if !mentions && !deferred {
            return Err(Error::invalid(
                "reference",
                format!("`{}` does not name exactly one planner configuration", self.reference),
            ));
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: SweepConfig = serde_json::from_str(&text).map_err(|e| Error::json(path, e))?;
        cfg.validate().map_err(|e| with_path(path, e))?;
        Ok(cfg)
    }
}

fn with_path(path: &Path, e: Error) -> Error {
    match e {
        Error::Invalid { field, reason } => Error::Invalid {
            field,
            reason: format!("{reason} (in {})", path.display()),
        },
        other => other,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlannerKind {
    Sparse,
    Grid,
}

impl PlannerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PlannerKind::Sparse => "sparse",
            PlannerKind::Grid => "grid",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Solved,
    Infeasible,
    Budget,
    /// The configuration could not be applied to the scenario (for example a
    /// start state off the lattice).
    Error,
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub scenario_id: String,
    pub seed: u64,
    pub planner: PlannerKind,
    /// Lattice spacing for grid rows, boundary spacing δ for sparse rows.
    pub grid_discr: Option<f64>,
    pub angular_discr: Option<f64>,
    pub connectivity: Option<u32>,
    pub cost: Option<f64>,
    pub plan_time_ms: f64,
    pub nodes: usize,
    pub edges: usize,
    pub edge_checks: usize,
    pub iterations: usize,
    pub area_sensed: usize,
    pub status: RunStatus,
}

impl RunMetrics {
    /// `planner/grid/angular/connectivity`, `-` for absent fields; the angle is
    /// in radians rounded to six decimals.
    pub fn label(&self) -> String {
        label_parts(self.planner, self.grid_discr, self.angular_discr, self.connectivity)
    }
}

fn label_parts(planner: PlannerKind, grid: Option<f64>, angular: Option<f64>, conn: Option<u32>) -> String {
    let g = grid.map_or("-".to_string(), |v| format!("{v}"));
    let a = angular.map_or("-".to_string(), angle::short);
    let c = conn.map_or("-".to_string(), |v| v.to_string());
    format!("{}/{g}/{a}/{c}", planner.as_str())
}

/// Label of a configuration as it will appear for a scenario with the given
/// spec (defaults resolved); with `None`, unresolved defaults stay absent.
pub fn config_label(config: &PlannerConfig, spec: Option<&ScenarioSpec>) -> String {
    let (grid, angular, conn) = resolved_columns(config, spec);
    label_parts(config.kind(), grid, angular, conn)
}

fn resolved_columns(config: &PlannerConfig, spec: Option<&ScenarioSpec>) -> (Option<f64>, Option<f64>, Option<u32>) {
    let dubins = spec.map(|s| s.system.system == System::Dubins);
    match *config {
        PlannerConfig::Sparse {
            delta, angular_delta, ..
        } => {
            let grid = delta.or(spec.map(|s| s.boundary_delta));
            let angular = match dubins {
                Some(false) => None,
                _ => angular_delta.or(spec.map(|s| s.angular_delta)),
            };
            (grid, angular, None)
        }
        PlannerConfig::Grid {
            spacing,
            connectivity,
            angular_delta,
            ..
        } => {
            let angular = if dubins == Some(false) { None } else { angular_delta };
            (Some(spacing), angular, Some(connectivity))
        }
    }
}

/// Runs one planner configuration on one scenario. The clock covers planner
/// construction and the planning loop only.
pub fn run_config(scenario: &Scenario, config: &PlannerConfig, timing: bool) -> RunMetrics {
    let spec = &scenario.spec;
    let (grid_discr, angular_discr, connectivity) = resolved_columns(config, Some(spec));
    let mut world = scenario.world.clone();
    let mut stats = PlanStats::default();
    let clock = Instant::now();
    let result: Result<PlanOutcome> = match *config {
        PlannerConfig::Sparse {
            delta,
            angular_delta,
            max_iterations,
            max_edges,
        } => {
            let delta = delta.unwrap_or(spec.boundary_delta);
            let angular_delta = angular_delta.unwrap_or(spec.angular_delta);
            let params = PlannerParams {
                delta,
                angular_delta,
                max_iterations: max_iterations.unwrap_or_else(|| size_bound(spec, delta, angular_delta)),
                max_edges: max_edges.unwrap_or(PlannerParams::DEFAULT_MAX_EDGES),
                steering: spec.system,
            };
            SparsePlanner::new(&mut world, scenario.start, scenario.goal, params).and_then(|mut p| {
                let r = p.run();
                stats = p.stats();
                r
            })
        }
        PlannerConfig::Grid {
            spacing,
            connectivity,
            angular_delta,
            prune_factor,
            max_iterations,
        } => {
            let mut gs = GridSpec::new(spacing, connectivity, angular_delta.unwrap_or(0.0), spec.bounds.clone());
            if let Some(p) = prune_factor {
                gs.prune_factor = p;
            }
            let budget = max_iterations.unwrap_or(GRID_MAX_ITERATIONS);
            GridRun::new(&mut world, scenario.start, scenario.goal, &gs, spec.system, budget).and_then(|mut r| {
                let out = r.run();
                stats = r.stats();
                out
            })
        }
    };
    let elapsed = clock.elapsed().as_secs_f64() * 1e3;
    let (status, cost) = match result {
        Ok(PlanOutcome::Solved { cost, .. }) => (RunStatus::Solved, Some(cost)),
        Ok(PlanOutcome::Infeasible) => (RunStatus::Infeasible, None),
        Err(Error::IterationBudgetExceeded(_) | Error::EdgeBudgetExceeded(_)) => (RunStatus::Budget, None),
        Err(_) => (RunStatus::Error, None),
    };
    RunMetrics {
        scenario_id: scenario.id.clone(),
        seed: spec.seed,
        planner: config.kind(),
        grid_discr,
        angular_discr,
        connectivity,
        cost,
        plan_time_ms: if timing { elapsed } else { 0.0 },
        nodes: stats.nodes,
        edges: stats.edges,
        edge_checks: stats.edge_checks,
        iterations: stats.iterations,
        area_sensed: stats.area_sensed,
        status,
    }
}

/// Writes one pretty JSON file per seed into `out_dir`; returns the paths.
pub fn cmd_generate(params: &ScenarioParams, base_seed: u64, out_dir: &Path) -> Result<Vec<PathBuf>> {
    params.validate()?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();
    for seed in params.seed_list(base_seed) {
        let scenario = generate(&params.spec_for(seed))?;
        let path = out_dir.join(format!("{}.json", scenario.id));
        fs::write(&path, scenario.to_json()).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

/// Loads every `*.json` scenario in a directory, ordered by file name.
pub fn load_scenarios(dir: &Path) -> Result<Vec<Scenario>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            Scenario::from_json(&text).map_err(|e| Error::json(p, e))
        })
        .collect()
}

/// Runs every configuration on every scenario. Scenarios may be spread over
/// `jobs` workers; each run stays on one worker and rows keep scenario-major,
/// configuration-minor order.
pub fn run_sweep(scenarios: &[Scenario], planners: &[PlannerConfig], jobs: usize, timing: bool) -> Vec<RunMetrics> {
    let indices: Vec<usize> = (0..scenarios.len()).collect();
    par::map(jobs, indices, |i| {
        planners
            .iter()
            .map(|p| run_config(&scenarios[i], p, timing))
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Host description written as a CSV comment.
pub fn host_info(jobs: usize) -> String {
    let cpus = std::thread::available_parallelism().map_or(1, |n| n.get());
    format!(
        "host: os={} arch={} cpus={cpus} jobs={jobs} parallel={}",
        std::env::consts::OS,
        std::env::consts::ARCH,
        par::available()
    )
}

/// Serializes rows with a leading `#` comment line per entry of `comments`.
pub fn write_csv(rows: &[RunMetrics], comments: &[String]) -> Result<String> {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        out.push_str(CSV_HEADER);
        out.push('\n');
        return Ok(out);
    }
    for r in rows {
        w.serialize(r).map_err(|e| Error::Csv {
            path: PathBuf::from("<memory>"),
            source: e,
        })?;
    }
    let bytes = w.into_inner().map_err(|e| Error::io("<memory>", e.into_error()))?;
    out.push_str(&String::from_utf8(bytes).expect("csv output is UTF-8"));
    Ok(out)
}

pub fn read_csv(text: &str, path: &Path) -> Result<Vec<RunMetrics>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    r.deserialize()
        .map(|row| {
            row.map_err(|e| Error::Csv {
                path: path.to_path_buf(),
                source: e,
            })
        })
        .collect()
}

/// Runs the sweep over a scenario directory and writes the CSV.
pub fn cmd_run(scenario_dir: &Path, sweep: &SweepConfig, out_csv: &Path, jobs: usize, timing: bool) -> Result<Vec<RunMetrics>> {
    sweep.validate()?;
    let scenarios = load_scenarios(scenario_dir)?;
    let rows = run_sweep(&scenarios, &sweep.planners, jobs, timing);
    let text = write_csv(&rows, &[host_info(jobs)])?;
    if let Some(parent) = out_csv.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(out_csv, text).map_err(|e| Error::io(out_csv, e))?;
    Ok(rows)
}

/// Mean, median and central 95% interval of a sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub mean: f64,
    pub median: f64,
    pub p2_5: f64,
    pub p97_5: f64,
}

/// Linear-interpolation percentile of sorted data, `q` in `[0, 1]`.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of an empty sample");
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

impl Spread {
    pub fn of(values: &[f64]) -> Option<Spread> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Some(Spread {
            mean: v.iter().sum::<f64>() / v.len() as f64,
            median: percentile(&v, 0.5),
            p2_5: percentile(&v, 0.025),
            p97_5: percentile(&v, 0.975),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigSummary {
    pub label: String,
    pub runs: usize,
    pub solved: usize,
    /// Scenarios where both this configuration and the reference solved.
    pub compared: usize,
    pub cost_ratio: Option<Spread>,
    /// Absent when the reference timings are zero (timing disabled).
    pub time_ratio: Option<Spread>,
    pub mean_cost: Option<f64>,
    pub mean_time_ms: f64,
    pub mean_nodes: f64,
    pub mean_edges: f64,
    pub mean_area_sensed: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub reference: String,
    pub scenarios: usize,
    pub configs: Vec<ConfigSummary>,
}

/// Resolves a reference key against row labels: an exact label, or a
/// planner kind shared by exactly one label.
pub fn resolve_reference(rows: &[RunMetrics], reference: &str) -> Result<String> {
    let mut labels: Vec<String> = rows.iter().map(RunMetrics::label).collect();
    labels.sort();
    labels.dedup();
    if labels.iter().any(|l| l == reference) {
        return Ok(reference.to_string());
    }
    let kind: Vec<&String> = labels
        .iter()
        .filter(|l| l.split('/').next() == Some(reference))
        .collect();
    match kind.as_slice() {
        [one] => Ok((*one).clone()),
        _ => Err(Error::invalid(
            "reference",
            format!("`{reference}` matches {} configurations", kind.len()),
        )),
    }
}

/// Normalizes every configuration by the reference row of the same scenario.
pub fn summarize(rows: &[RunMetrics], reference: &str) -> Result<Summary> {
    let reference = resolve_reference(rows, reference)?;
    let mut scenario_ids: Vec<&str> = rows.iter().map(|r| r.scenario_id.as_str()).collect();
    scenario_ids.sort();
    scenario_ids.dedup();
    let mut refs = std::collections::BTreeMap::new();
    for id in &scenario_ids {
        let row = rows
            .iter()
            .find(|r| r.scenario_id == *id && r.label() == reference)
            .ok_or_else(|| Error::MissingReference(id.to_string()))?;
        refs.insert(*id, row);
    }
    let mut labels: Vec<String> = Vec::new();
    for r in rows {
        let l = r.label();
        if !labels.contains(&l) {
            labels.push(l);
        }
    }
    let configs = labels
        .into_iter()
        .map(|label| {
            let mine: Vec<&RunMetrics> = rows.iter().filter(|r| r.label() == label).collect();
            let mut cost_ratios = Vec::new();
            let mut time_ratios = Vec::new();
            for r in &mine {
                let base = refs[r.scenario_id.as_str()];
                if let (Some(c), Some(bc)) = (r.cost, base.cost) {
                    cost_ratios.push(if c == bc { 1.0 } else { c / bc });
                    if base.plan_time_ms > 0.0 {
                        time_ratios.push(if r.plan_time_ms == base.plan_time_ms {
                            1.0
                        } else {
                            r.plan_time_ms / base.plan_time_ms
                        });
                    }
                }
            }
            let solved: Vec<f64> = mine.iter().filter_map(|r| r.cost).collect();
            let n = mine.len() as f64;
            ConfigSummary {
                runs: mine.len(),
                solved: solved.len(),
                compared: cost_ratios.len(),
                cost_ratio: Spread::of(&cost_ratios),
                time_ratio: Spread::of(&time_ratios),
                mean_cost: (!solved.is_empty()).then(|| solved.iter().sum::<f64>() / solved.len() as f64),
                mean_time_ms: mine.iter().map(|r| r.plan_time_ms).sum::<f64>() / n,
                mean_nodes: mine.iter().map(|r| r.nodes as f64).sum::<f64>() / n,
                mean_edges: mine.iter().map(|r| r.edges as f64).sum::<f64>() / n,
                mean_area_sensed: mine.iter().map(|r| r.area_sensed as f64).sum::<f64>() / n,
                label,
            }
        })
        .collect();
    Ok(Summary {
        reference,
        scenarios: scenario_ids.len(),
        configs,
    })
}

/// Tab-separated plot data: for every configuration the median point and the
/// four corners of its central-95% box in (time ratio, cost ratio).
pub fn plot_table(summary: &Summary) -> String {
    let mut out = String::from("config\tpoint\ttime_ratio\tcost_ratio\n");
    let fmt = |v: Option<f64>| v.map_or("nan".to_string(), |x| format!("{x}"));
    for c in &summary.configs {
        let Some(cost) = c.cost_ratio else { continue };
        let t = c.time_ratio;
        let corners = [
            ("median", t.map(|t| t.median), cost.median),
            ("lo_lo", t.map(|t| t.p2_5), cost.p2_5),
            ("hi_lo", t.map(|t| t.p97_5), cost.p2_5),
            ("hi_hi", t.map(|t| t.p97_5), cost.p97_5),
            ("lo_hi", t.map(|t| t.p2_5), cost.p97_5),
        ];
        for (name, x, y) in corners {
            let _ = writeln!(out, "{}\t{name}\t{}\t{y}", c.label, fmt(x));
        }
    }
    out
}

/// Reads a metrics CSV and writes `summary.json`-style output plus the plot table.
pub fn cmd_summarize(csv_path: &Path, reference: &str, out_json: &Path, out_table: Option<&Path>) -> Result<Summary> {
    let text = fs::read_to_string(csv_path).map_err(|e| Error::io(csv_path, e))?;
    let rows = read_csv(&text, csv_path)?;
    let summary = summarize(&rows, reference)?;
    let mut json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    json.push('\n');
    fs::write(out_json, json).map_err(|e| Error::io(out_json, e))?;
    if let Some(p) = out_table {
        fs::write(p, plot_table(&summary)).map_err(|e| Error::io(p, e))?;
    }
    Ok(summary)
}

/// Sparse planner versus complete-graph optimum on one scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleCase {
    pub scenario_id: String,
    pub seed: u64,
    pub sparse_cost: Option<f64>,
    pub oracle_cost: Option<f64>,
    pub discrepancy: f64,
    pub oracle_nodes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub cases: Vec<OracleCase>,
    pub max_discrepancy: f64,
    pub tolerance: f64,
    pub mismatches: usize,
}

/// `|a − b|` with two infinities counting as agreement.
fn discrepancy(a: Option<f64>, b: Option<f64>) -> f64 {
    match (a, b) {
        (Some(x), Some(y)) => (x - y).abs(),
        (None, None) => 0.0,
        _ => f64::INFINITY,
    }
}

/// Compares the sparse planner against the complete-graph optimum on every
/// scenario of the family. Edge checking in the oracle uses `jobs` workers.
pub fn oracle_check(params: &ScenarioParams, base_seed: u64, tolerance: f64, jobs: usize) -> Result<OracleReport> {
    params.validate()?;
    let mut cases = Vec::new();
    for seed in params.seed_list(base_seed) {
        let spec = params.spec_for(seed);
        let scenario = generate(&spec)?;
        let mut world = scenario.world.clone();
        let mut planner = SparsePlanner::new(&mut world, scenario.start, scenario.goal, PlannerParams::for_scenario(&spec))?;
        let sparse_cost = match planner.run()? {
            PlanOutcome::Solved { cost, .. } => Some(cost),
            PlanOutcome::Infeasible => None,
        };
        let graph = build_complete_graph(&scenario, spec.boundary_delta, spec.angular_delta, DEFAULT_NODE_LIMIT, jobs)?;
        let oracle_cost = exact_solve(&graph);
        cases.push(OracleCase {
            scenario_id: scenario.id.clone(),
            seed,
            sparse_cost,
            oracle_cost,
            discrepancy: discrepancy(sparse_cost, oracle_cost),
            oracle_nodes: graph.node_count(),
        });
    }
    let max_discrepancy = cases.iter().map(|c| c.discrepancy).fold(0.0, f64::max);
    let mismatches = cases.iter().filter(|c| !(c.discrepancy <= tolerance)).count();
    Ok(OracleReport {
        cases,
        max_discrepancy,
        tolerance,
        mismatches,
    })
}
