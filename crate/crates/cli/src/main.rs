use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rumin_core::chartfile::chart_to_toml;
use rumin_core::expr::parse;
use rumin_core::frame::{build_frame_with_tol, DEFAULT_FRAME_TOL};
use rumin_core::jet::{degree, factorial, MAX_ORDER};
use rumin_core::models::{model, ModelName, ModelParams};
use rumin_core::runner::{run, Format, RunConfig, Suite, Target, DEFAULT_RUN_ORDER};
use rumin_core::sampling::DEFAULT_POINTS;
use rumin_core::{Error, Jet64};

#[derive(Parser)]
#[command(
    name = "rumin",
    version,
    about = "Verify CR frame calculus and immersion conditions on 3-dimensional charts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and print a report.
    Run(RunArgs),
    /// Print the jet of an expression or a structure function at points.
    Eval(EvalArgs),
    /// Write a built-in model as a chart file.
    Export(ExportArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct TargetArgs {
    /// Built-in model: sphere, cylinder or heisenberg.
    #[arg(long)]
    model: Option<String>,
    /// Chart file in TOML.
    #[arg(long)]
    chart: Option<PathBuf>,
}

impl TargetArgs {
    fn resolve(&self) -> Result<Target, Error> {
        match (&self.model, &self.chart) {
            (Some(name), _) => Target::model(name.parse()?),
            (_, Some(path)) => Target::chart_file(path),
            _ => unreachable!("clap enforces one target"),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    target: TargetArgs,
    /// Comma-separated suites; defaults to every suite the target supports.
    #[arg(long, value_delimiter = ',')]
    suite: Option<Vec<String>>,
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    points: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-suite tolerance override, e.g. `frame=1e-10`; repeatable.
    #[arg(long = "tol", value_name = "SUITE=VALUE")]
    tol: Vec<String>,
    /// Jet order.
    #[arg(long, default_value_t = DEFAULT_RUN_ORDER)]
    order: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
    Text,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Json => Format::Json,
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Text => Format::Text,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Structure {
    A,
    B,
    C,
}

#[derive(Args)]
struct EvalArgs {
    /// Expression in the chart coordinates u1, u2, u3.
    #[arg(long, conflicts_with = "structure", required_unless_present = "structure")]
    expr: Option<String>,
    /// Structure function of the chart's frame.
    #[arg(long, value_enum)]
    structure: Option<Structure>,
    /// Evaluation point `x,y,z`; repeatable.
    #[arg(long, required = true, allow_hyphen_values = true, value_parser = parse_point)]
    point: Vec<[f64; 3]>,
    #[arg(long, default_value_t = 2)]
    order: usize,
    #[arg(long, conflicts_with = "chart")]
    model: Option<String>,
    #[arg(long)]
    chart: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    model: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_point(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<_> = s.split(',').map(|p| p.trim().parse::<f64>()).collect();
    match parts.as_slice() {
        [Ok(x), Ok(y), Ok(z)] => Ok([*x, *y, *z]),
        _ => Err(format!("expected three comma-separated numbers, got `{s}`")),
    }
}

fn parse_tolerances(items: &[String]) -> Result<BTreeMap<Suite, f64>, Error> {
    let mut out = BTreeMap::new();
    for item in items {
        let bad = |message: String| Error::Config {
            field: "tol".into(),
            message,
        };
        let (suite, value) = item
            .split_once('=')
            .ok_or_else(|| bad(format!("expected SUITE=VALUE, got `{item}`")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| bad(format!("`{value}` is not a number")))?;
        out.insert(suite.parse()?, value);
    }
    Ok(out)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Config {
            field: "out".into(),
            message: format!("{}: {e}", path.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_run(args: &RunArgs) -> Result<bool, Error> {
    let mut config = RunConfig::new(args.target.resolve()?);
    config.suites = args
        .suite
        .as_ref()
        .map(|list| list.iter().map(|s| s.parse()).collect::<Result<Vec<_>, _>>())
        .transpose()?;
    config.points = args.points;
    config.seed = args.seed;
    config.tolerances = parse_tolerances(&args.tol)?;
    config.order = args.order;
    config.format = args.format.into();
    let report = run(&config)?;
    emit(&config.format.render(&report), args.out.as_deref())?;
    Ok(report.pass())
}

/// One row per multi-index: Taylor coefficient and the derivative it encodes,
/// each as real and imaginary parts.
fn jet_table(jet: &Jet64) -> String {
    let mut out = format!(
        "{:<6} {:>5} {:>20} {:>20} {:>20} {:>20}\n",
        "index", "|a|", "coeff.re", "coeff.im", "deriv.re", "deriv.im"
    );
    for (alpha, c) in jet.terms() {
        let d = c * factorial(alpha);
        let _ = writeln!(
            out,
            "{:<6} {:>5} {:>20.12e} {:>20.12e} {:>20.12e} {:>20.12e}",
            format!("{}{}{}", alpha[0], alpha[1], alpha[2]),
            degree(alpha),
            c.re,
            c.im,
            d.re,
            d.im
        );
    }
    out
}

fn cmd_eval(args: &EvalArgs) -> Result<(), Error> {
    let chart = match (&args.model, &args.chart) {
        (Some(name), _) => Some(Target::model(name.parse()?)?.chart),
        (_, Some(path)) => Some(Target::chart_file(path)?.chart),
        _ => None,
    };
    let expr = args
        .expr
        .as_deref()
        .map(|src| {
            parse(src).map_err(|source| Error::Expr {
                field: "expr".into(),
                source,
            })
        })
        .transpose()?;
    let mut out = String::new();
    for p in &args.point {
        let jet = match (&expr, args.structure) {
            (Some(e), _) => e.eval(*p, args.order)?,
            (None, Some(which)) => {
                let chart = chart.as_ref().ok_or_else(|| Error::Config {
                    field: "structure".into(),
                    message: "needs --model or --chart".into(),
                })?;
                // the frame loses two orders to brackets
                if args.order + 2 > MAX_ORDER {
                    return Err(Error::Config {
                        field: "order".into(),
                        message: format!("structure functions are available up to order {}", MAX_ORDER - 2),
                    });
                }
                let frame = build_frame_with_tol(chart, *p, args.order + 2, DEFAULT_FRAME_TOL)?;
                match which {
                    Structure::A => frame.a,
                    Structure::B => frame.b,
                    Structure::C => frame.c,
                }
                .truncate(args.order)
            }
            _ => unreachable!("clap requires --expr or --structure"),
        };
        let _ = writeln!(out, "point {}, {}, {}", p[0], p[1], p[2]);
        out.push_str(&jet_table(&jet));
    }
    print!("{out}");
    Ok(())
}

fn cmd_export(args: &ExportArgs) -> Result<(), Error> {
    let name: ModelName = args.model.parse()?;
    let d = model(name, &ModelParams::default())?;
    emit(&chart_to_toml(&d.chart, d.embedding.as_ref()), args.out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Eval(args) => cmd_eval(args).map(|()| true),
        Command::Export(args) => cmd_export(args).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
