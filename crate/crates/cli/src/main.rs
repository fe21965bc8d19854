//! `sparse-interp`: batch experiments on sparse random constraint models.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use sparse_interp::models::{ModelKind, ModelSpec};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(sparse_interp::Error),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<sparse_interp::Error> for CliError {
    fn from(e: sparse_interp::Error) -> Self {
        CliError::Core(e)
    }
}

#[derive(Parser, Debug)]
#[command(name = "sparse-interp", version, about = "Interpolation checks for sparse random constraint models")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct GlobalArgs {
    /// Flat `key = value` file; command-line flags override its entries.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Also write the report estimates as CSV.
    #[arg(long, global = true, value_name = "FILE")]
    pub csv: Option<PathBuf>,
    /// Also write plot data as `series,x,y,yerr` rows.
    #[arg(long = "emit-plot-data", global = true, value_name = "FILE")]
    pub emit_plot_data: Option<PathBuf>,
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

/// Model selection shared by most subcommands.
#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// is, maxcut, ising, coloring, ksat or nae.
    #[arg(long)]
    pub model: Option<String>,
    /// Alphabet size (coloring).
    #[arg(long)]
    pub q: Option<usize>,
    /// Arity K.
    #[arg(long)]
    pub k: Option<usize>,
    /// Ising coupling.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Ising external field B.
    #[arg(long, alias = "b")]
    pub field: Option<f64>,
}

impl ModelArgs {
    pub fn spec_opt(&self) -> Result<Option<ModelSpec>, CliError> {
        let Some(name) = &self.model else {
            if self.q.is_some() || self.beta.is_some() || self.field.is_some() {
                return Err(CliError::Usage("--q, --beta and --field need --model".into()));
            }
            return Ok(None);
        };
        let kind = ModelKind::parse(name).map_err(|e| CliError::Usage(format!("--model: {e}")))?;
        let mut spec = ModelSpec::default_for(kind);
        if let Some(q) = self.q {
            spec.q = q;
        }
        if let Some(k) = self.k {
            spec.k = k;
        }
        if let Some(b) = self.beta {
            spec.beta = b;
        }
        if let Some(b) = self.field {
            spec.field = b;
        }
        spec.validate()?;
        Ok(Some(spec))
    }

    pub fn spec(&self) -> Result<ModelSpec, CliError> {
        self.spec_opt()?.ok_or_else(|| CliError::Usage("--model is required".into()))
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenEnsemble {
    /// Directed K-tuples with replacement.
    Er,
    /// Distinct K-sets without replacement.
    ErSimple,
    /// Interpolated graph `G(N, M, r)` between the whole and the split ensemble.
    ErInterp,
    /// Partial configuration-model matching with `T` edges.
    Config,
    /// Full configuration-model matching.
    Regular,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnsembleArg {
    Directed,
    Simple,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Analytic {
    /// `3N`.
    Linear,
    /// `N - sqrt(N)`.
    Sqrt,
    /// `2N - ln N`.
    Log,
    /// `2N + sin N + 1`.
    Noise,
    /// `N sin N` (violates the premise).
    Oscillating,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample a hypergraph (or an instance, with --model).
    Gen {
        #[arg(long, value_enum, default_value = "er")]
        ensemble: GenEnsemble,
        #[arg(long)]
        n: usize,
        /// Edge count (ER ensembles).
        #[arg(long)]
        m: Option<usize>,
        /// Edge density; M = floor(cN) when --m is absent.
        #[arg(long)]
        c: Option<f64>,
        /// Chain index (er-interp) or degree bound (config, regular).
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        n1: Option<usize>,
        /// Matching size (config).
        #[arg(long)]
        t: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Exact ground state of an instance file.
    Solve {
        #[arg(long)]
        input: PathBuf,
        /// Seed for sign tuples when the input is a bare hypergraph.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also list the Ising levels and their partitions.
        #[arg(long)]
        levels: bool,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Exact log-partition function at fugacity lambda.
    Logz {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit the whole Gibbs table.
        #[arg(long)]
        table: bool,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Exact one-step comparison of the Erdős–Rényi interpolation at a base graph.
    InterpEr {
        /// Base instance; sampled from --n, --m and --seed when absent.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n1: usize,
        /// Log-partition mode at this fugacity; ground state otherwise.
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// One run of the regular-graph interpolation, as JSON lines.
    InterpReg {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Initial matching size (default N r / K - floor(N^(2/3) / K)).
        #[arg(long)]
        t: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Verification checks with pass/fail verdicts.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Satisfiability probability p(N, M), exact when enumerable.
    Satprob {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 20_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum)]
        ensemble: Option<EnsembleArg>,
        /// Only the exact rational value.
        #[arg(long)]
        exact: bool,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Near-superadditive sequence: premise scan and limit estimate.
    Limit {
        /// CSV of `N,a_N` rows.
        #[arg(long, conflicts_with = "analytic")]
        sequence: Option<PathBuf>,
        #[arg(long, value_enum)]
        analytic: Option<Analytic>,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// C in the correction C N^alpha (default 0, or the analytic sequence's own).
        #[arg(long)]
        constant: Option<f64>,
        #[arg(long)]
        n_max: Option<usize>,
        /// Known limit to compare against.
        #[arg(long)]
        known: Option<f64>,
    },
}

#[derive(Subcommand, Debug)]
pub enum CheckCommand {
    /// E[H] of the whole Erdős–Rényi graph against the sum over the split.
    SuperaddEr {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 20_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Compare P(H = M) instead of E[H].
        #[arg(long)]
        satisfiability: bool,
    },
    /// E[H] of the whole regular graph against the sum over the split.
    SuperaddReg {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 20_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// C in the allowance C N^(5/6).
        #[arg(long, default_value_t = 1.0)]
        constant: f64,
    },
    /// Monte Carlo expectations along the Erdős–Rényi chain.
    ErChain {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        c: f64,
        /// Chain indices (default 0..=M).
        #[arg(long, value_delimiter = ',')]
        r_values: Option<Vec<usize>>,
        #[arg(long, default_value_t = 2_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        satisfiability: bool,
    },
    /// Exact one-step identities on random small base graphs.
    OnestepEr {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 200)]
        instances: u64,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        #[arg(long, default_value_t = 12)]
        m_max: usize,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exact regular-graph one-step comparison on random partial matchings.
    OnestepReg {
        #[arg(long, default_value_t = 100)]
        configs: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Bookkeeping, freeze and insertion-side law of the regular chain.
    RegChain {
        #[arg(long, default_value_t = 1_000)]
        runs: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Brute force against the three-case Ising edge rule.
    IsingLemma {
        #[arg(long, default_value_t = 200)]
        instances: u64,
        #[arg(long, default_value_t = 9)]
        n_max: usize,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
        betas: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0,0.3")]
        fields: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Z(G) >= Z(G+e) >= Z(G)/(1+lambda) for independent sets.
    LogzSandwich {
        #[arg(long, default_value_t = 100)]
        instances: u64,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        #[arg(long, default_value_t = 12)]
        m_max: usize,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,10")]
        lambdas: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// p(N, M+m) against delta^m p(N, M) minus the unusual-graph bound.
    LemmaA1 {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Extra edges m.
        #[arg(long)]
        extra: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long, value_enum)]
        ensemble: Option<EnsembleArg>,
    },
    /// p(N, M+1) >= factor p(N, M), exactly.
    SatChain {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m_max: usize,
        #[arg(long, value_enum, default_value = "directed")]
        ensemble: EnsembleArg,
    },
    /// Frequency of delta-unusual graphs against its bounds.
    Unusual {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        q: usize,
        #[arg(long)]
        delta: f64,
    },
    /// H along nested edge sets: direction and Lipschitz bound.
    Monotone {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',')]
        m_ladder: Vec<usize>,
        #[arg(long, default_value_t = 1_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Spread of H/N over a ladder of sizes.
    Concentration {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        /// Erdős–Rényi density.
        #[arg(long, conflicts_with = "r")]
        c: Option<f64>,
        /// Regular degree.
        #[arg(long)]
        r: Option<usize>,
        #[arg(long, default_value_t = 2_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// |H(G) - H(G')| <= L times the edge edit distance.
    EditBound {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        edits: usize,
        #[arg(long, default_value_t = 1_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Subcommand names selected in `m`, outermost first.
fn subcommand_path(m: &clap::ArgMatches) -> (Vec<String>, &clap::ArgMatches) {
    let mut path = Vec::new();
    let mut cur = m;
    while let Some((name, sub)) = cur.subcommand() {
        path.push(name.to_string());
        cur = sub;
    }
    (path, cur)
}

fn command() -> clap::Command {
    fn override_self(c: clap::Command) -> clap::Command {
        c.args_override_self(true).mut_subcommands(override_self)
    }
    override_self(Cli::command())
}

/// Same tree with nothing required, used only to locate the subcommand before
/// the config file is merged.
fn lenient(c: clap::Command) -> clap::Command {
    c.ignore_errors(true).mut_args(|a| a.required(false)).mut_subcommands(lenient)
}

fn run(args: Vec<String>) -> Result<i32, CliError> {
    let mut cmd = command();
    let path = match lenient(cmd.clone()).try_get_matches_from(&args) {
        Ok(m) => subcommand_path(&m).0,
        Err(_) => Vec::new(),
    };
    let args = match config::config_path(&args) {
        Some(p) if !path.is_empty() => {
            let text = std::fs::read_to_string(&p).map_err(|e| CliError::Io(format!("{p}: {e}")))?;
            let pairs = config::parse_config(&text, p.as_ref())?;
            config::merge(&cmd, &args, &path, &pairs)?
        }
        _ => args,
    };
    let matches = match cmd.try_get_matches_from_mut(&args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return Ok(e.exit_code());
        }
    };
    let (_, leaf_matches) = subcommand_path(&matches);
    let effective = config::effective(config::leaf(&cmd, &path), leaf_matches);
    let cli = Cli::from_arg_matches(&matches).map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(j) = cli.global.jobs {
        if j == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--jobs: {e}")))?;
    }
    let run = output::Run::new(path.join(" "), effective);
    let doc = commands::execute(&cli.command)?;
    run.emit(doc, &cli.global)
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    match run(args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
