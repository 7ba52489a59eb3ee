//! `mmm` — analytic and simulated metrics for multi-server queues.
//!
//! Exit codes: 0 on success, 2 on usage or argument errors, 3 when a
//! delay-model quantity is requested at or past saturation (`a >= m`).

mod commands;
mod output;

use clap::{ArgGroup, Args, Parser, Subcommand};
use mmm_core::erlang::QueueSpec;
use mmm_core::sim::Discipline;
use mmm_core::{Error, Result};

use commands::{Curves, SimulateArgs};
use output::Format;

#[derive(Parser)]
#[command(
    name = "mmm",
    version,
    about = "Erlang B/C, waiting and residence times, morphing bounds, root loci \
             and a discrete-event simulator for M/M/m queues"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FormatArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Decimal places for numeric output
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u8).range(1..=17))]
    precision: u8,
}

#[derive(Args)]
#[command(group(ArgGroup::new("load").required(true).args(["traffic", "lambda"])))]
struct PointArgs {
    /// Number of servers
    #[arg(short = 'm', long = "servers")]
    servers: u32,
    /// Offered traffic a = lambda * s, in erlangs
    #[arg(short = 'a', long = "traffic")]
    traffic: Option<f64>,
    /// Mean arrival rate (alternative to -a)
    #[arg(short = 'l', long = "lambda")]
    lambda: Option<f64>,
    /// Mean service time S
    #[arg(short = 's', long = "service", default_value_t = 1.0)]
    service: f64,
}

impl PointArgs {
    fn to_spec(&self) -> Result<QueueSpec> {
        match (self.traffic, self.lambda) {
            (Some(a), None) => QueueSpec::from_traffic(self.servers, a, self.service),
            (None, Some(lambda)) => QueueSpec::new(self.servers, lambda, self.service),
            // clap's arg group enforces exactly-one before we get here.
            _ => Err(Error::InvalidArgument(
                "give exactly one of --traffic or --lambda".into(),
            )),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exact and morphing metrics at a single operating point
    Calc {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        fmt: FormatArgs,
    },
    /// Reference metrics table: m in {1,2,3,4,8,16,32} at rho = 0.75, S = 1
    Table {
        /// Output format
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Erlang curves over a traffic range, as plot-ready records
    Sweep {
        /// Number of servers
        #[arg(short = 'm', long = "servers")]
        servers: u32,
        /// Lowest traffic intensity
        #[arg(long, default_value_t = 0.0)]
        a_min: f64,
        /// Highest traffic intensity (may exceed m; delay fields clip)
        #[arg(long)]
        a_max: f64,
        /// Number of grid points, endpoints included
        #[arg(long, default_value_t = 50)]
        steps: usize,
        /// Which curve family to emit
        #[arg(long, value_enum, default_value_t = Curves::Metrics)]
        curves: Curves,
        #[command(flatten)]
        fmt: FormatArgs,
    },
    /// Root loci of the residence-time denominators, plus the Szego curve
    Roots {
        /// Largest polynomial order to include (tabulated up to 8)
        #[arg(long, default_value_t = 8)]
        m_max: u32,
        /// Append Szego curve samples (kind = "szego", m = 0)
        #[arg(long)]
        include_szego: bool,
        /// Number of Szego samples
        #[arg(long, default_value_t = 256)]
        szego_points: usize,
        #[command(flatten)]
        fmt: FormatArgs,
    },
    /// Discrete-event simulation with the analytic value as reference
    Simulate {
        /// Number of servers
        #[arg(short = 'm', long = "servers")]
        servers: u32,
        /// Offered traffic a = lambda * s, in erlangs
        #[arg(short = 'a', long = "traffic", conflicts_with = "util_sweep")]
        traffic: Option<f64>,
        /// Mean arrival rate (alternative to -a)
        #[arg(short = 'l', long = "lambda", conflicts_with_all = ["traffic", "util_sweep"])]
        lambda: Option<f64>,
        /// Mean service time S
        #[arg(short = 's', long = "service", default_value_t = 1.0)]
        service: f64,
        /// Queueing discipline
        #[arg(long, value_enum, default_value_t = DisciplineArg::Fifo)]
        discipline: DisciplineArg,
        /// Completions per replication
        #[arg(short = 'n', long = "completions", default_value_t = 100_000)]
        completions: u64,
        /// Independent replications
        #[arg(long, default_value_t = 10)]
        reps: u32,
        /// Completions discarded per replication (default: completions / 10)
        #[arg(long)]
        warmup: Option<u64>,
        /// Base RNG seed; replication i runs on stream i
        #[arg(long, default_value_t = 12345)]
        seed: u64,
        /// Measure per-server utilization over these traffic values
        /// instead of estimating one operating point
        #[arg(long, value_delimiter = ',')]
        util_sweep: Option<Vec<f64>>,
        #[command(flatten)]
        fmt: FormatArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum DisciplineArg {
    Fifo,
    Loss,
}

impl From<DisciplineArg> for Discipline {
    fn from(d: DisciplineArg) -> Self {
        match d {
            DisciplineArg::Fifo => Discipline::Fifo,
            DisciplineArg::Loss => Discipline::Loss,
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Calc { point, fmt } => {
            commands::cmd_calc(&point.to_spec()?, fmt.format, fmt.precision.into())
        }
        Command::Table { format } => commands::cmd_table(format),
        Command::Sweep {
            servers,
            a_min,
            a_max,
            steps,
            curves,
            fmt,
        } => commands::cmd_sweep(
            servers,
            a_min,
            a_max,
            steps,
            curves,
            fmt.format,
            fmt.precision.into(),
        ),
        Command::Roots {
            m_max,
            include_szego,
            szego_points,
            fmt,
        } => commands::cmd_roots(
            m_max,
            include_szego,
            szego_points,
            fmt.format,
            fmt.precision.into(),
        ),
        Command::Simulate {
            servers,
            traffic,
            lambda,
            service,
            discipline,
            completions,
            reps,
            warmup,
            seed,
            util_sweep,
            fmt,
        } => {
            if let Some(a_values) = util_sweep {
                return commands::cmd_util_sweep(
                    servers,
                    &a_values,
                    discipline.into(),
                    seed,
                    fmt.format,
                    fmt.precision.into(),
                );
            }
            let spec = match (traffic, lambda) {
                (Some(a), None) => QueueSpec::from_traffic(servers, a, service)?,
                (None, Some(l)) => QueueSpec::new(servers, l, service)?,
                _ => {
                    return Err(Error::InvalidArgument(
                        "give exactly one of --traffic or --lambda (or --util-sweep)".into(),
                    ))
                }
            };
            commands::cmd_simulate(
                &SimulateArgs {
                    spec,
                    discipline: discipline.into(),
                    completions,
                    reps,
                    warmup,
                    seed,
                },
                fmt.format,
                fmt.precision.into(),
            )
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("{err}");
        let code = match err {
            Error::Unstable { .. } => 3,
            _ => 2,
        };
        std::process::exit(code);
    }
}
