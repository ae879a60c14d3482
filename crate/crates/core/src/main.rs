use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use covertime::bounds::BoundOptions;
use covertime::experiments::{
    bound_report, run_edge_addition, run_evolution, run_gw_scaling, EdgeAdditionConfig, EdgeMode,
    EvolutionConfig, GraphSource, Regime, TreeScalingConfig,
};
use covertime::generators::{BaseGraphSpec, BaseKind};
use covertime::{simulate, Error, Quantity, SimConfig, StartPolicy};

#[derive(Parser)]
#[command(name = "covertime", version, about = "Random-walk cover time bounds and experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Also write a CSV table of the report rows.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Worker threads; never changes results.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Entropy upper bound and lower bounds for a graph.
    Bound {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 4096)]
        k_exact: usize,
        #[arg(long)]
        no_matthews: bool,
    },
    /// Monte Carlo estimate of a walk quantity.
    Simulate {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_enum, default_value_t = QuantityArg::Cover)]
        quantity: QuantityArg,
        /// Target vertex for hitting and commute times.
        #[arg(long)]
        target: Option<usize>,
        /// Start vertex, `worst` or `stationary`.
        #[arg(long, default_value = "0")]
        start: String,
        #[arg(long)]
        emit_samples: Option<PathBuf>,
    },
    /// Cover time of the largest component of G(n, p) around p = 1/n.
    Evolution {
        #[arg(long, value_enum)]
        regime: RegimeArg,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, value_delimiter = ',', default_value = "4000,8000,16000,32000")]
        n_grid: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        seeds: u64,
        #[arg(long, default_value_t = 0.25)]
        epsilon_exponent: f64,
        #[arg(long)]
        no_bounds: bool,
    },
    /// Cover time of uniform random trees.
    GwScaling {
        #[arg(long, value_delimiter = ',', default_value = "256,1024,4096")]
        k_grid: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        seeds: u64,
        #[arg(long)]
        no_bounds: bool,
    },
    /// Worst-start cover time before and after adding edges.
    EdgeAdd {
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        #[arg(long, default_value_t = 1)]
        k_edges: usize,
        #[arg(long, default_value_t = 200)]
        instances: usize,
        /// Independent batches of instances.
        #[arg(long, default_value_t = 1)]
        seeds: usize,
        #[arg(long, default_value_t = 10)]
        max_vertices: usize,
    },
    /// Sample a graph and write it as an edge list.
    Generate {
        #[command(flatten)]
        graph: GraphArgs,
    },
}

#[derive(Args)]
struct GraphArgs {
    #[arg(long, conflicts_with = "model")]
    edges: Option<PathBuf>,
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Percolation base graph.
    #[arg(long, value_enum)]
    base: Option<BaseArg>,
    /// Hypercube dimension.
    #[arg(long)]
    m: Option<u32>,
    /// Torus side length.
    #[arg(long)]
    side: Option<usize>,
    /// Torus dimension.
    #[arg(long)]
    dim: Option<u32>,
    /// Degree of a random regular base graph.
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    base_file: Option<PathBuf>,
    #[arg(long, default_value_t = 1_000_000)]
    size_cap: usize,
    #[arg(long)]
    largest_component: bool,
    /// Export the (possibly restricted) graph as an edge list.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Gnp,
    Tree,
    Pgw,
    Giant,
    Percolation,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaseArg {
    Complete,
    Hypercube,
    Torus,
    Regular,
    File,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum QuantityArg {
    Cover,
    CoverReturn,
    Blanket,
    Hitting,
    Commute,
    Return,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    A,
    B,
    C,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Mc,
}

fn need<T>(value: Option<T>, flag: &str) -> Result<T, Error> {
    value.ok_or_else(|| Error::Contract(format!("missing --{flag}")))
}

impl GraphArgs {
    fn source(&self) -> Result<GraphSource, Error> {
        if let Some(path) = &self.edges {
            return Ok(GraphSource::Edges(path.clone()));
        }
        let model = need(self.model, "edges or --model")?;
        Ok(match model {
            ModelArg::Gnp => GraphSource::Gnp {
                n: need(self.n, "n")?,
                p: need(self.p, "p")?,
            },
            ModelArg::Tree => GraphSource::Tree { k: need(self.k, "k")? },
            ModelArg::Pgw => GraphSource::Pgw {
                mu: self.mu.unwrap_or(1.0),
                size_cap: self.size_cap,
            },
            ModelArg::Giant => GraphSource::Giant {
                n: need(self.n, "n")?,
                epsilon: need(self.epsilon, "epsilon")?,
            },
            ModelArg::Percolation => {
                let kind = match need(self.base, "base")? {
                    BaseArg::Complete => BaseKind::Complete(need(self.n, "n")?),
                    BaseArg::Hypercube => BaseKind::Hypercube(need(self.m, "m")?),
                    BaseArg::Torus => BaseKind::Torus {
                        side: need(self.side, "side")?,
                        dim: self.dim.unwrap_or(2),
                    },
                    BaseArg::Regular => BaseKind::RandomRegular {
                        n: need(self.n, "n")?,
                        d: need(self.d, "d")?,
                    },
                    BaseArg::File => BaseKind::FromFile(need(self.base_file.clone(), "base-file")?),
                };
                GraphSource::Percolation(BaseGraphSpec {
                    kind,
                    p: need(self.p, "p")?,
                })
            }
        })
    }

    fn load(&self, seed: u64, require_connected: bool) -> Result<covertime::MultiGraph, Error> {
        let source = self.source()?;
        let g = if require_connected || self.largest_component {
            source.build_connected(seed, self.largest_component)?
        } else {
            source.build(seed)?
        };
        if let Some(path) = &self.dump {
            std::fs::write(path, g.to_edge_list())?;
        }
        Ok(g)
    }
}

fn parse_start(s: &str) -> Result<StartPolicy, Error> {
    match s {
        "worst" => Ok(StartPolicy::WorstOverAllStarts),
        "stationary" => Ok(StartPolicy::Stationary),
        v => v
            .parse()
            .map(StartPolicy::Fixed)
            .map_err(|_| Error::Contract(format!("bad --start {v:?}"))),
    }
}

fn emit<T: Serialize>(cli: &Cli, value: &T) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Contract(e.to_string()))?;
    text.push('\n');
    match &cli.json {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn write_csv(cli: &Cli, csv: impl FnOnce() -> String) -> Result<(), Error> {
    if let Some(path) = &cli.csv {
        std::fs::write(path, csv())?;
    }
    Ok(())
}

/// Ok(false) signals a failed exact-mode assertion.
fn run(cli: &Cli) -> Result<bool, Error> {
    match &cli.command {
        Command::Bound {
            graph,
            k_exact,
            no_matthews,
        } => {
            let g = graph.load(cli.seed, true)?;
            let report = bound_report(
                &g,
                BoundOptions {
                    k_exact: *k_exact,
                    matthews: !no_matthews,
                },
            )?;
            emit(cli, &report)?;
        }
        Command::Simulate {
            graph,
            quantity,
            target,
            start,
            emit_samples,
        } => {
            let g = graph.load(cli.seed, true)?;
            let quantity = match quantity {
                QuantityArg::Cover => Quantity::Cover,
                QuantityArg::CoverReturn => Quantity::CoverReturn,
                QuantityArg::Blanket => Quantity::Blanket,
                QuantityArg::Hitting => Quantity::Hitting {
                    target: need(*target, "target")?,
                },
                QuantityArg::Commute => Quantity::Commute {
                    target: need(*target, "target")?,
                },
                QuantityArg::Return => Quantity::Return,
            };
            let mut config = SimConfig::new(quantity, parse_start(start)?, cli.trials.unwrap_or(1000), cli.seed);
            if emit_samples.is_some() {
                config = config.with_samples();
            }
            let estimate = simulate(&g, &config)?;
            if let (Some(path), Some(samples)) = (emit_samples, &estimate.samples) {
                let lines: String = samples.iter().map(|s| format!("{s}\n")).collect();
                std::fs::write(path, lines)?;
            }
            emit(cli, &estimate)?;
        }
        Command::Evolution {
            regime,
            lambda,
            n_grid,
            seeds,
            epsilon_exponent,
            no_bounds,
        } => {
            let regime = match regime {
                RegimeArg::A => Regime::Subcritical,
                RegimeArg::B => Regime::Critical { lambda: *lambda },
                RegimeArg::C => Regime::Supercritical,
            };
            let mut config = EvolutionConfig::new(regime, n_grid.clone());
            config.seeds = *seeds;
            config.trials = cli.trials.unwrap_or(config.trials);
            config.master_seed = cli.seed;
            config.epsilon_exponent = *epsilon_exponent;
            config.bounds = !no_bounds;
            let report = run_evolution(&config)?;
            write_csv(cli, || report.to_csv())?;
            emit(cli, &report)?;
        }
        Command::GwScaling {
            k_grid,
            seeds,
            no_bounds,
        } => {
            let mut config = TreeScalingConfig::new(k_grid.clone());
            config.seeds = *seeds;
            config.trials = cli.trials.unwrap_or(config.trials);
            config.master_seed = cli.seed;
            config.bounds = !no_bounds;
            let report = run_gw_scaling(&config)?;
            write_csv(cli, || report.to_csv())?;
            emit(cli, &report)?;
        }
        Command::EdgeAdd {
            mode,
            k_edges,
            instances,
            seeds,
            max_vertices,
        } => {
            let mode = match mode {
                ModeArg::Exact => EdgeMode::ExactDp,
                ModeArg::Mc => EdgeMode::MonteCarlo,
            };
            let mut config = EdgeAdditionConfig::new(mode, *k_edges, instances * seeds);
            config.master_seed = cli.seed;
            config.max_vertices = *max_vertices;
            config.trials = cli.trials.unwrap_or(config.trials);
            let report = run_edge_addition(&config)?;
            write_csv(cli, || report.to_csv())?;
            emit(cli, &report)?;
            if mode == EdgeMode::ExactDp && report.violations > 0 {
                return Ok(false);
            }
        }
        Command::Generate { graph } => {
            let g = graph.load(cli.seed, false)?;
            if graph.dump.is_none() {
                std::io::stdout().write_all(g.to_edge_list().as_bytes())?;
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: exact-mode bound violated");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io(_) | Error::Solver(_) | Error::StepCap { .. } => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
