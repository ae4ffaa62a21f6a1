//! The `dcfci` command line: discover, score, simulate, benchmark.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dcfci_core::ancestral::{check_pag, PagDefect};
use dcfci_core::bayes::BffConfig;
use dcfci_core::citest::CiSource;
use dcfci_core::graph::MixedGraph;
use dcfci_core::scoring::{comparable_scores, straightforward_score};
use dcfci_core::search::{dcfci, DcfciConfig, TieMode};

use crate::bench::{
    results_csv, run_benchmark, simulate_replicate, summary_text, ties_name, Scenario,
};
use crate::cache::CachedDataSource;
use crate::io::{
    graph_hash, parse_ci_table, parse_graph, parse_schema, read_dataset, read_file, score_line,
    write_dataset, write_file, write_graph, write_schema, InputError,
};
use crate::parallel::RayonExecutor;
use crate::sim::var_names;

/// Exit status for unreadable or malformed input.
pub const EXIT_INPUT: i32 = 2;
/// Exit status when the engine itself fails.
pub const EXIT_ENGINE: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "dcfci",
    version,
    about = "Causal discovery with data-compatibility scored FCI"
)]
pub struct Cli {
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Learn ranked PAGs from data or a table of CI results.
    Discover {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        engine: EngineArgs,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a PAG against data, optionally alongside competitors.
    Score {
        #[arg(long)]
        graph: PathBuf,
        /// Competing PAGs scored on their shared distinguishing hypotheses.
        #[arg(long, num_args = 1..)]
        against: Vec<PathBuf>,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        rmax: Option<usize>,
    },
    /// Write simulated datasets with their true PAGs.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the FCI baseline and dcFCI on simulated replicates.
    Benchmark {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        out: PathBuf,
        /// Record wall times in the results; they are NA otherwise.
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Args, Debug)]
pub struct InputArgs {
    /// CSV with a header row.
    #[arg(long, requires = "schema", conflicts_with = "ci_table")]
    pub data: Option<PathBuf>,
    /// One `name=kind` line per column.
    #[arg(long, requires = "data")]
    pub schema: Option<PathBuf>,
    /// Precomputed p-values and posteriors in place of data.
    #[arg(long, required_unless_present = "data")]
    pub ci_table: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Ties {
    Strict,
    EqualUpper,
    Overlap,
}

impl From<Ties> for TieMode {
    fn from(t: Ties) -> Self {
        match t {
            Ties::Strict => TieMode::Strict,
            Ties::EqualUpper => TieMode::EqualUpper,
            Ties::Overlap => TieMode::Overlap,
        }
    }
}

#[derive(Args, Debug)]
pub struct EngineArgs {
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Largest separator size; defaults to p - 2.
    #[arg(long)]
    pub rmax: Option<usize>,
    #[arg(long, value_enum, default_value_t = Ties::Strict)]
    pub ties: Ties,
}

/// A scenario file with command-line overrides.
#[derive(Args, Debug)]
pub struct ScenarioArgs {
    /// `key=value` scenario file; missing keys take defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub rmax: Option<usize>,
    #[arg(long, value_enum)]
    pub ties: Option<Ties>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("{0}")]
    Engine(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Engine(_) => EXIT_ENGINE,
        }
    }
}

fn input(context: &str, msg: impl Into<String>) -> CliError {
    CliError::Input(InputError::Invalid {
        context: context.into(),
        msg: msg.into(),
    })
}

fn engine(e: impl std::fmt::Display) -> CliError {
    CliError::Engine(e.to_string())
}

/// Either a dataset behind a cache or a fixed table.
enum Source {
    Data(Box<dcfci_core::citest::Dataset>),
    Table(dcfci_core::citest::TableSource),
}

struct Loaded {
    names: Vec<String>,
    source: Source,
    /// What the inputs were, for the manifest.
    origin: String,
}

fn load_input(args: &InputArgs) -> Result<Loaded, CliError> {
    match (&args.data, &args.schema, &args.ci_table) {
        (Some(data), Some(schema), None) => {
            let schema_text = read_file(schema)?;
            let schema_cols = parse_schema(&schema_text)?;
            let d = read_dataset(&read_file(data)?, &schema_cols)?;
            let origin = format!(
                "data={}\nschema={}\nrows={}\n",
                data.display(),
                schema.display(),
                d.n()
            );
            Ok(Loaded {
                names: d.names().to_vec(),
                source: Source::Data(Box::new(d)),
                origin,
            })
        }
        (None, None, Some(table)) => {
            let (names, t) = parse_ci_table(&read_file(table)?)?;
            let origin = format!("ci_table={}\nentries={}\n", table.display(), t.len());
            Ok(Loaded {
                names,
                source: Source::Table(t),
                origin,
            })
        }
        _ => Err(input(
            "input",
            "give either --data with --schema, or --ci-table",
        )),
    }
}

/// Runs `f` with the loaded source behind the `CiSource` trait.
fn with_source<R>(src: &Source, f: impl FnOnce(&dyn CiSource) -> R) -> R {
    match src {
        Source::Data(d) => f(&CachedDataSource::new(d, BffConfig::default())),
        Source::Table(t) => f(t),
    }
}

fn executor(threads: usize) -> Result<RayonExecutor, CliError> {
    RayonExecutor::new(threads).map_err(engine)
}

fn resolve_rmax(rmax: Option<usize>, p: usize) -> Result<usize, CliError> {
    let max = p.saturating_sub(2);
    match rmax {
        Some(r) if r > max => Err(input("rmax", format!("{r} exceeds p - 2 = {max}"))),
        Some(r) => Ok(r),
        None => Ok(max),
    }
}

fn make_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|source| {
        CliError::Input(InputError::Io {
            path: dir.to_path_buf(),
            source,
        })
    })
}

fn discover(
    threads: usize,
    input_args: &InputArgs,
    e: &EngineArgs,
    out: &Path,
) -> Result<(), CliError> {
    if !(e.alpha > 0.0 && e.alpha < 1.0) {
        return Err(input("alpha", "must lie in (0, 1)"));
    }
    if e.k == 0 {
        return Err(input("k", "must be at least 1"));
    }
    let loaded = load_input(input_args)?;
    let p = loaded.names.len();
    if p < 2 {
        return Err(input("input", "need at least two variables"));
    }
    let r_max = resolve_rmax(e.rmax, p)?;
    let cfg = DcfciConfig {
        alpha: e.alpha,
        k: e.k,
        r_max: Some(r_max),
        ties: e.ties.into(),
        ..Default::default()
    };
    let exec = executor(threads)?;
    let result = with_source(&loaded.source, |s| dcfci(p, &s, &cfg, &exec)).map_err(engine)?;

    make_dir(out)?;
    let mut scores = String::from("# rank hash lower upper n_diff\n");
    for (i, c) in result.candidates.iter().enumerate() {
        let hash = graph_hash(&c.graph, &loaded.names);
        write_file(
            &out.join(format!("pag-{}.txt", i + 1)),
            &write_graph(&c.graph, &loaded.names),
        )?;
        let _ = writeln!(
            scores,
            "{} {}",
            i + 1,
            score_line(&hash, &c.score, c.n_diff, 6)
        );
    }
    write_file(&out.join("scores.txt"), &scores)?;

    let mut manifest = String::new();
    let _ = writeln!(manifest, "dcfci {}", env!("CARGO_PKG_VERSION"));
    manifest.push_str(&loaded.origin);
    let _ = writeln!(manifest, "vars={}", loaded.names.join(","));
    let _ = writeln!(
        manifest,
        "alpha={}\nk={}\nrmax={}\nties={}\nn_r_cap={}\ncertainty_threshold={}\nmax_retained={}",
        cfg.alpha,
        cfg.k,
        r_max,
        ties_name(cfg.ties),
        cfg.n_r_cap,
        cfg.certainty_threshold,
        cfg.max_retained
    );
    for h in &result.history {
        let _ = writeln!(
            manifest,
            "level r={} generated={} invalid={} scored={} retained={}",
            h.r,
            h.generated,
            h.invalid,
            h.ranked.len(),
            h.retained
        );
    }
    let _ = writeln!(manifest, "pags={}", result.candidates.len());
    write_file(&out.join("manifest.txt"), &manifest)?;
    Ok(())
}

fn load_pag(path: &Path, names: &[String]) -> Result<MixedGraph, CliError> {
    let context = path.display().to_string();
    let (gnames, g) = parse_graph(&read_file(path)?).map_err(|e| match e {
        InputError::Syntax { line, msg, .. } => InputError::Syntax {
            context: context.clone(),
            line,
            msg,
        },
        InputError::Invalid { msg, .. } => InputError::Invalid {
            context: context.clone(),
            msg,
        },
        other => other,
    })?;
    if gnames != names {
        return Err(input(
            &context,
            format!(
                "variables {} differ from the input's {}",
                gnames.join(" "),
                names.join(" ")
            ),
        ));
    }
    check_pag(&g).map_err(|d| {
        let stage = match d {
            PagDefect::Marks(_) => "mark check",
            PagDefect::NoMag(_) => "MAG selection",
            PagDefect::RoundTrip => "MAG-to-PAG round trip",
        };
        input(&context, format!("not a valid PAG (failed {stage}): {d}"))
    })?;
    Ok(g)
}

fn score(
    threads: usize,
    graph: &Path,
    against: &[PathBuf],
    input_args: &InputArgs,
    rmax: Option<usize>,
) -> Result<String, CliError> {
    let loaded = load_input(input_args)?;
    let r_max = resolve_rmax(rmax, loaded.names.len())?;
    let g = load_pag(graph, &loaded.names)?;
    let mut graphs = vec![g];
    for a in against {
        graphs.push(load_pag(a, &loaded.names)?);
    }
    let exec = executor(threads)?;
    with_source(&loaded.source, |s| {
        let b = straightforward_score(&graphs[0], &s, r_max).map_err(engine)?;
        let mut out = format!("{:.3} {:.3}\n", b.lower, b.upper);
        if !against.is_empty() {
            let scored = comparable_scores(&graphs, r_max, &s, &exec).map_err(engine)?;
            out.push_str("# comparable: file hash lower upper n_diff\n");
            let files = std::iter::once(graph).chain(against.iter().map(PathBuf::as_path));
            for ((file, g), c) in files.zip(&graphs).zip(&scored) {
                let hash = graph_hash(g, &loaded.names);
                let _ = writeln!(
                    out,
                    "{} {}",
                    file.display(),
                    score_line(&hash, &c.bounds, c.n_diff, 3)
                );
            }
        }
        Ok(out)
    })
}

fn scenario(args: &ScenarioArgs) -> Result<Scenario, CliError> {
    let mut s = match &args.config {
        Some(path) => Scenario::parse(&read_file(path)?)?,
        None => Scenario::default(),
    };
    if let Some(v) = args.seed {
        s.seed = v;
    }
    if let Some(v) = args.replicates {
        s.replicates = v;
    }
    if let Some(v) = args.alpha {
        s.alpha = v;
    }
    if let Some(v) = args.k {
        s.k = v;
    }
    if args.rmax.is_some() {
        s.r_max = args.rmax;
    }
    if let Some(v) = args.ties {
        s.ties = v.into();
    }
    s.validate()?;
    Ok(s)
}

fn simulate(threads: usize, args: &ScenarioArgs, out: &Path) -> Result<(), CliError> {
    let s = scenario(args)?;
    let exec = executor(threads)?;
    make_dir(out)?;
    let idx: Vec<usize> = (0..s.replicates).collect();
    let names = var_names(s.p);
    let files = dcfci_core::exec::Executor::map(&exec, &idx, |&i| {
        let rep = simulate_replicate(&s, i);
        (
            write_dataset(&rep.data),
            write_schema(&rep.data),
            write_graph(&rep.truth.pag, &names),
        )
    });
    for (i, (csv, schema, pag)) in files.iter().enumerate() {
        write_file(&out.join(format!("rep-{i:04}.csv")), csv)?;
        write_file(&out.join(format!("rep-{i:04}.schema")), schema)?;
        write_file(&out.join(format!("rep-{i:04}.pag.txt")), pag)?;
    }
    write_file(&out.join("scenario.txt"), &s.to_text())?;
    Ok(())
}

fn benchmark(
    threads: usize,
    args: &ScenarioArgs,
    out: &Path,
    timing: bool,
) -> Result<(), CliError> {
    let s = scenario(args)?;
    let exec = executor(threads)?;
    let results = run_benchmark(&s, &exec);
    make_dir(out)?;
    write_file(&out.join("results.csv"), &results_csv(&results, timing))?;
    write_file(&out.join("summary.txt"), &summary_text(&s, &results))?;
    Ok(())
}

/// Executes a parsed command line. Anything meant for stdout is returned.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let t = cli.threads;
    match &cli.command {
        Command::Discover { input, engine, out } => {
            discover(t, input, engine, out).map(|_| String::new())
        }
        Command::Score {
            graph,
            against,
            input,
            rmax,
        } => score(t, graph, against, input, *rmax),
        Command::Simulate { scenario, out } => simulate(t, scenario, out).map(|_| String::new()),
        Command::Benchmark {
            scenario,
            out,
            timing,
        } => benchmark(t, scenario, out, *timing).map(|_| String::new()),
    }
}
