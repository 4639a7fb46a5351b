use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use coherence_core::construct::{self, ConstructionJson, GridSpec};
use coherence_core::costs;
use coherence_core::infogeo::{measure_report, MeasureReport};
use coherence_core::linops::io::parse_matrix;
use coherence_core::linops::DensityMatrix;
use coherence_core::measure::{BoundComparison, ErrorReport, ImplementationJson, TransferReport};
use coherence_core::monotone::{parse_list, MonotoneFunction};
use coherence_core::suites::{self, relation_instance, relation_seed, SuiteResult, SuiteSizes};

#[derive(Parser, Debug)]
#[command(name = "coherence", version, about = "Skew-information uncertainty relations and measurement-cost checks")]
struct Cli {
    /// JSON run configuration; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed for every random ensemble.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 1 runs sequentially.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// V, V^f, I^f and U^f of an observable in a state.
    Measures {
        #[arg(long)]
        rho: Option<PathBuf>,
        #[arg(long)]
        obs: Option<PathBuf>,
        /// Comma-separated functions, e.g. sld,wy,wyd:0.3.
        #[arg(long = "f")]
        f_names: Option<String>,
    },
    /// Random-ensemble check of every uncertainty relation, as CSV.
    Relations {
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long = "f")]
        f_names: Option<String>,
    },
    /// Error, bounds and identities for one measurement implementation.
    Way {
        #[arg(long = "impl")]
        implementation: Option<PathBuf>,
        #[arg(long)]
        b: Option<PathBuf>,
        /// System state; the worst-case state when absent.
        #[arg(long)]
        rho: Option<PathBuf>,
        #[arg(long = "f")]
        f_names: Option<String>,
    },
    /// Gaussian-pointer construction at ξ_ε for each target error, as CSV.
    ConstructSweep {
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        /// Grid cross-check as `subdivision,half_extent`.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Lower and upper coherence-cost bounds, as CSV.
    CostTable {
        #[arg(long)]
        norm_comm: Option<f64>,
        #[arg(long)]
        norm_a: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        #[arg(long = "f")]
        f_name: Option<String>,
    },
    /// Runs every invariant suite; exits nonzero on any violation.
    Selftest {
        /// Shrinks every ensemble by this factor (1 is the full size).
        #[arg(long)]
        reduce: Option<usize>,
    },
}

/// Everything a run can be configured with. Fields left out fall back to the
/// command defaults.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    command: Option<String>,
    seed: Option<u64>,
    dims: Option<Vec<usize>>,
    f_names: Option<String>,
    trials: Option<usize>,
    eps_list: Option<Vec<f64>>,
    rho: Option<PathBuf>,
    obs: Option<PathBuf>,
    implementation: Option<PathBuf>,
    b: Option<PathBuf>,
    spec: Option<PathBuf>,
    grid: Option<String>,
    norm_comm: Option<f64>,
    norm_a: Option<f64>,
    reduce: Option<usize>,
    jobs: Option<usize>,
    output: Option<PathBuf>,
}

impl RunConfig {
    fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Overlays the command-line flags.
    fn merge(mut self, cli: &Cli) -> Self {
        fn set<T: Clone>(slot: &mut Option<T>, flag: &Option<T>) {
            if flag.is_some() {
                *slot = flag.clone();
            }
        }
        set(&mut self.seed, &cli.seed);
        set(&mut self.jobs, &cli.jobs);
        set(&mut self.output, &cli.out);
        let name = match &cli.command {
            Command::Measures { rho, obs, f_names } => {
                set(&mut self.rho, rho);
                set(&mut self.obs, obs);
                set(&mut self.f_names, f_names);
                "measures"
            }
            Command::Relations { dims, trials, f_names } => {
                set(&mut self.dims, dims);
                set(&mut self.trials, trials);
                set(&mut self.f_names, f_names);
                "relations"
            }
            Command::Way { implementation, b, rho, f_names } => {
                set(&mut self.implementation, implementation);
                set(&mut self.b, b);
                set(&mut self.rho, rho);
                set(&mut self.f_names, f_names);
                "way"
            }
            Command::ConstructSweep { spec, eps, grid } => {
                set(&mut self.spec, spec);
                set(&mut self.eps_list, eps);
                set(&mut self.grid, grid);
                "construct-sweep"
            }
            Command::CostTable { norm_comm, norm_a, eps, f_name } => {
                set(&mut self.norm_comm, norm_comm);
                set(&mut self.norm_a, norm_a);
                set(&mut self.eps_list, eps);
                set(&mut self.f_names, f_name);
                "cost-table"
            }
            Command::Selftest { reduce } => {
                set(&mut self.reduce, reduce);
                "selftest"
            }
        };
        self.command = Some(name.to_string());
        self
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(42)
    }

    fn functions(&self, default: &str) -> Result<Vec<MonotoneFunction>> {
        let names = self.f_names.as_deref().unwrap_or(default);
        parse_list(names).with_context(|| format!("parsing function list `{names}`"))
    }

    fn require<'a, T>(value: &'a Option<T>, flag: &str) -> Result<&'a T> {
        value.as_ref().with_context(|| format!("missing --{flag} (flag or config field)"))
    }

    /// First 16 hex digits of SHA-256 over the effective configuration.
    /// Thread count and output path do not change results, so they are left
    /// out and a parallel run hashes the same as a sequential one.
    fn hash(&self) -> String {
        let scrubbed = Self { jobs: None, output: None, ..self.clone() };
        let canonical = serde_json::to_vec(&scrubbed).expect("config serializes");
        Sha256::digest(&canonical).iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

fn read(path: &Path, what: &str) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {what} from {}", path.display()))
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).with_context(|| format!("creating output {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json<T: Serialize>(cfg: &RunConfig, value: &T) -> Result<()> {
    let mut out = open_output(&cfg.output)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn csv_writer(cfg: &RunConfig) -> Result<csv::Writer<Box<dyn Write>>> {
    Ok(csv::Writer::from_writer(open_output(&cfg.output)?))
}

fn run_measures(cfg: &RunConfig) -> Result<bool> {
    let rho_path = RunConfig::require(&cfg.rho, "rho")?;
    let obs_path = RunConfig::require(&cfg.obs, "obs")?;
    let rho = parse_matrix(&read(rho_path, "state")?)?.to_density().with_context(|| format!("state {}", rho_path.display()))?;
    let obs = parse_matrix(&read(obs_path, "observable")?)?.to_hermitian().with_context(|| format!("observable {}", obs_path.display()))?;
    let reports = cfg
        .functions("sld,wy")?
        .iter()
        .map(|f| measure_report(&rho, &obs, f))
        .collect::<coherence_core::error::Result<Vec<MeasureReport>>>()?;
    write_json(cfg, &reports)?;
    Ok(true)
}

#[derive(Serialize)]
struct RelationCsvRow<'a> {
    relation: &'a str,
    f_name: &'a str,
    dim: usize,
    seed: u64,
    lhs: f64,
    rhs: f64,
    slack: f64,
    holds: bool,
    config_hash: &'a str,
}

fn run_relations(cfg: &RunConfig) -> Result<bool> {
    let dims = cfg.dims.clone().unwrap_or_else(|| vec![2, 3, 4, 8]);
    if dims.iter().any(|&d| d < 2) {
        bail!("relation dims must each be at least 2, got {dims:?}");
    }
    let trials = cfg.trials.unwrap_or(1000);
    if trials == 0 {
        bail!("trials must be at least 1");
    }
    let fs = cfg.functions("sld,wy,wyd:0.5")?;
    let seed = cfg.seed();
    let tasks: Vec<(usize, u64)> =
        dims.iter().flat_map(|&d| (0..trials).map(move |t| (d, relation_seed(seed, d, t)))).collect();
    // order-preserving collect keeps the CSV identical for any thread count
    let rows = tasks
        .par_iter()
        .map(|&(dim, s)| relation_instance(dim, s, &fs))
        .collect::<coherence_core::error::Result<Vec<_>>>()?;
    let hash = cfg.hash();
    let mut w = csv_writer(cfg)?;
    let mut all_hold = true;
    for r in rows.iter().flatten() {
        all_hold &= r.holds;
        w.serialize(RelationCsvRow {
            relation: &r.relation,
            f_name: &r.f_name,
            dim: r.dim,
            seed: r.seed,
            lhs: r.lhs,
            rhs: r.rhs,
            slack: r.slack,
            holds: r.holds,
            config_hash: &hash,
        })?;
    }
    w.flush()?;
    Ok(all_hold)
}

#[derive(Serialize)]
struct WayOutput {
    state: &'static str,
    report: ErrorReport,
    worst_error: f64,
    transfer: TransferReport,
    comparison: BoundComparison,
    shift: f64,
    seed: u64,
    config_hash: String,
}

fn run_way(cfg: &RunConfig) -> Result<bool> {
    let impl_path = RunConfig::require(&cfg.implementation, "impl")?;
    let b_path = RunConfig::require(&cfg.b, "b")?;
    let set = ImplementationJson::parse(&read(impl_path, "implementation")?)?
        .to_set()
        .with_context(|| format!("implementation {}", impl_path.display()))?;
    let b = parse_matrix(&read(b_path, "observable")?)?.to_hermitian().with_context(|| format!("observable {}", b_path.display()))?;
    let (state, rho): (&'static str, DensityMatrix) = match &cfg.rho {
        Some(p) => ("given", parse_matrix(&read(p, "state")?)?.to_density().with_context(|| format!("state {}", p.display()))?),
        None => ("worst-case", set.worst_case(&b)?.1),
    };
    let fs = cfg.functions("sld,wy")?;
    let report = set.error_report(&b, &rho, &fs)?;
    let transfer = set.commutator_transfer_check(&b, &rho)?;
    let comparison = set.korzekwa_comparison(&b, &rho)?;
    let bounds_hold = report.bound_f.values().all(|&bd| report.epsilon_sq >= bd - 1e-9 * bd.abs().max(1.0));
    let ok = bounds_hold && transfer.holds && comparison.ordered;
    let out = WayOutput {
        state,
        worst_error: set.worst_error(&b)?,
        report,
        transfer,
        comparison,
        shift: set.shift(),
        seed: cfg.seed(),
        config_hash: cfg.hash(),
    };
    write_json(cfg, &out)?;
    Ok(ok)
}

fn parse_grid(text: &str) -> Result<GridSpec> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [m, l] = parts.as_slice() else {
        bail!("--grid expects `subdivision,half_extent`, got `{text}`");
    };
    Ok(GridSpec {
        subdivision: m.parse().with_context(|| format!("grid subdivision `{m}`"))?,
        half_extent: l.parse().with_context(|| format!("grid half extent `{l}`"))?,
    })
}

#[derive(Serialize)]
struct SweepRow<'a> {
    eps: f64,
    xi: f64,
    eps_exact: f64,
    eps_bound: f64,
    cost: f64,
    eps_grid: Option<f64>,
    seed: u64,
    config_hash: &'a str,
}

fn run_construct_sweep(cfg: &RunConfig) -> Result<bool> {
    let spec_path = RunConfig::require(&cfg.spec, "spec")?;
    let spec = ConstructionJson::parse(&read(spec_path, "construction spec")?)
        .with_context(|| format!("construction spec {}", spec_path.display()))?;
    let eps_list = RunConfig::require(&cfg.eps_list, "eps")?;
    if eps_list.is_empty() || eps_list.iter().any(|&e| e.is_nan() || e <= 0.0) {
        bail!("eps list must be nonempty and positive, got {eps_list:?}");
    }
    let grid = cfg.grid.as_deref().map(parse_grid).transpose()?;
    let (nc, na) = (spec.norm_comm(), spec.norm_a());
    let rows = eps_list
        .par_iter()
        .map(|&eps| -> Result<(f64, f64, f64, f64, Option<f64>)> {
            let xi = construct::xi_for_epsilon(nc, na, eps).with_context(|| format!("eps {eps}"))?;
            let at = spec.with_xi(xi)?;
            // a grid too narrow for this ξ is skipped, not fatal
            let grid_err = match grid.map(|g| construct::discretize(&at, g)) {
                Some(Ok(set)) => Some(set.worst_error(at.b())?),
                Some(Err(e)) => {
                    eprintln!("grid skipped at eps {eps} (xi {xi}): {e}");
                    None
                }
                None => None,
            };
            Ok((eps, xi, construct::exact_worst_error(&at), construct::error_bound(&at).sqrt(), grid_err))
        })
        .collect::<Result<Vec<_>>>()?;
    let hash = cfg.hash();
    let mut w = csv_writer(cfg)?;
    let mut ok = true;
    for (eps, xi, exact, bound, grid_err) in rows {
        ok &= exact <= eps && exact <= bound * (1.0 + 1e-12);
        ok &= grid_err.is_none_or(|g| (g - exact).abs() <= 1e-6);
        let cost = construct::pointer_coherence(&spec.with_xi(xi)?);
        w.serialize(SweepRow { eps, xi, eps_exact: exact, eps_bound: bound, cost, eps_grid: grid_err, seed: cfg.seed(), config_hash: &hash })?;
    }
    w.flush()?;
    Ok(ok)
}

#[derive(Serialize)]
struct CostRow<'a> {
    eps: f64,
    f_name: &'a str,
    lower_sqrt: f64,
    upper_sqrt: Option<f64>,
    achieved_sqrt: Option<f64>,
    eps_times_lower: f64,
    eps_times_upper: Option<f64>,
    in_window: bool,
    seed: u64,
    config_hash: &'a str,
}

fn run_cost_table(cfg: &RunConfig) -> Result<bool> {
    let nc = *RunConfig::require(&cfg.norm_comm, "norm-comm")?;
    let na = *RunConfig::require(&cfg.norm_a, "norm-a")?;
    let eps_list = RunConfig::require(&cfg.eps_list, "eps")?;
    let fs = cfg.functions("sld")?;
    let [f] = fs.as_slice() else {
        bail!("cost-table takes exactly one function");
    };
    let table = costs::asymptotic_table(nc, na, eps_list, f)?;
    let hash = cfg.hash();
    let mut w = csv_writer(cfg)?;
    for r in &table.rows {
        w.serialize(CostRow {
            eps: r.eps,
            f_name: &r.f_name,
            lower_sqrt: r.lower_sqrt,
            upper_sqrt: r.upper_sqrt,
            achieved_sqrt: r.achieved_sqrt,
            eps_times_lower: r.eps_times_lower(),
            eps_times_upper: r.eps_times_upper(),
            in_window: r.in_window,
            seed: cfg.seed(),
            config_hash: &hash,
        })?;
    }
    w.flush()?;
    if !table.equality_claimed {
        eprintln!(
            "f(0) = {} ≠ 1/2: eps·lower → {:.6} and eps·upper → {:.6}, relative gap {:.4}",
            f.f0(),
            table.limit_lower,
            table.limit_upper,
            table.relative_gap
        );
    }
    Ok(table.rows.iter().all(|r| r.sandwiched()) && table.within_order_a)
}

#[derive(Serialize)]
struct SelftestOutput {
    seed: u64,
    config_hash: String,
    passed: bool,
    suites: Vec<SuiteResult>,
}

fn run_selftest(cfg: &RunConfig) -> Result<bool> {
    let reduce = cfg.reduce.unwrap_or(1).max(1);
    let full = SuiteSizes::default();
    let sizes = SuiteSizes {
        relation_trials: (full.relation_trials / reduce).max(1),
        ensemble_trials: (full.ensemble_trials / reduce).max(1),
        way_trials: (full.way_trials / reduce).max(1),
        spec_trials: (full.spec_trials / reduce).max(1),
    };
    let seed = cfg.seed();
    let results: Vec<SuiteResult> = suites::selftest_tasks(seed, sizes).par_iter().map(|task| task()).collect();
    let passed = results.iter().all(SuiteResult::passed);
    for r in &results {
        let status = if r.passed() { "ok  " } else { "FAIL" };
        let slack = r.min_slack.map(|s| format!("  min slack {s:.3e}")).unwrap_or_default();
        eprintln!("{status} {:<24} {:>7} checks  {} violations{slack}", r.name, r.checks, r.violations);
        for f in &r.failures {
            eprintln!("       {f}");
        }
    }
    eprintln!("{}", if passed { "selftest passed" } else { "selftest FAILED" });
    if cfg.output.is_some() {
        write_json(cfg, &SelftestOutput { seed, config_hash: cfg.hash(), passed, suites: results })?;
    }
    Ok(passed)
}

fn run(cli: &Cli) -> Result<bool> {
    let base = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let cfg = base.merge(cli);
    let jobs = cfg.jobs.unwrap_or(1);
    if jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    pool.install(|| match &cli.command {
        Command::Measures { .. } => run_measures(&cfg),
        Command::Relations { .. } => run_relations(&cfg),
        Command::Way { .. } => run_way(&cfg),
        Command::ConstructSweep { .. } => run_construct_sweep(&cfg),
        Command::CostTable { .. } => run_cost_table(&cfg),
        Command::Selftest { .. } => run_selftest(&cfg),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
