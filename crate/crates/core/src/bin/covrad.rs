use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use covrad::experiments::{
    append_meta, constants_table, run_arcsine_study, run_epsnet_study, run_expectation_study, run_fgrid,
    run_random_vs_structured, run_tail_study, run_zn_study, to_csv, ArcsineConfig, CsvRow, CsvSink, EpsNetConfig,
    FgridConfig, MetaRecord, StudyConfig, TailConfig, VersusConfig, ZnConfig, BUDGET_LIMIT,
};
use covrad::Error;

#[derive(Parser)]
#[command(name = "covrad", version, about = "Covering radius studies for random point samples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct StudyArgs {
    /// JSON config file.
    #[arg(long)]
    config: PathBuf,
    /// Overrides `master_seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `trials`.
    #[arg(long)]
    trials: Option<usize>,
    /// Overrides `output`; without any output path rows go to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run even when the cost estimate exceeds the budget.
    #[arg(long)]
    force: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Expectation study of E[ρ^p] against the limit constant.
    Study(StudyArgs),
    /// Tail probabilities P(ρ ≥ t).
    Tail(StudyArgs),
    /// Z_N distribution on the circle or the 2-sphere.
    Zn(StudyArgs),
    /// Window covering radii of arcsine samples.
    Arcsine(StudyArgs),
    /// Fraction of samples that are ε-nets.
    Epsnet(StudyArgs),
    /// Random samples against the centred grid in the cube.
    Versus(StudyArgs),
    /// Occupancy function grid.
    Fgrid {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Table of limit constants.
    Constants {
        #[arg(long, default_value_t = 1.0)]
        p: f64,
    },
}

fn load<C: DeserializeOwned>(path: &Path, args: Option<&StudyArgs>) -> covrad::Result<C> {
    let mut value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    if let (Some(a), Some(obj)) = (args, value.as_object_mut()) {
        if let Some(s) = a.seed {
            obj.insert("master_seed".into(), s.into());
        }
        if let Some(t) = a.trials {
            obj.insert("trials".into(), t.into());
        }
        if let Some(o) = &a.out {
            obj.insert("output".into(), o.to_string_lossy().into_owned().into());
        }
    }
    Ok(serde_json::from_value(value)?)
}

/// Streams rows to a CSV file, or collects them for stdout.
enum Sink<R> {
    File(CsvSink, PathBuf),
    Stdout(Vec<R>),
}

impl<R: CsvRow + Clone> Sink<R> {
    fn open(output: Option<&Path>) -> covrad::Result<Self> {
        Ok(match output {
            Some(p) => Sink::File(CsvSink::create::<R>(p)?, p.to_path_buf()),
            None => Sink::Stdout(Vec::new()),
        })
    }

    fn push(&mut self, row: &R) -> covrad::Result<()> {
        match self {
            Sink::File(s, _) => s.write(row),
            Sink::Stdout(rows) => {
                rows.push(row.clone());
                Ok(())
            }
        }
    }

    fn finish(self, study: &str, config: &impl Serialize, started: SystemTime, clock: Instant, rows: usize) -> covrad::Result<()> {
        match self {
            Sink::File(_, path) => {
                let meta = MetaRecord::new(study, config, started, clock.elapsed(), rows)?;
                append_meta(&path, &meta)
            }
            Sink::Stdout(rows) => {
                print!("{}", to_csv(&rows));
                std::io::stdout().flush()?;
                Ok(())
            }
        }
    }
}

fn report_cost(cost: f64) {
    eprintln!("estimated cost: {cost:.3e} distance evaluations (budget {BUDGET_LIMIT:.0e})");
}

fn run_streaming<C, R>(
    study: &str,
    args: &StudyArgs,
    output: impl Fn(&C) -> Option<PathBuf>,
    cost: impl Fn(&C) -> covrad::Result<f64>,
    run: impl Fn(&C, bool, &mut dyn FnMut(&R) -> covrad::Result<()>) -> covrad::Result<Vec<R>>,
) -> covrad::Result<()>
where
    C: DeserializeOwned + Serialize,
    R: CsvRow + Clone,
{
    let config: C = load(&args.config, Some(args))?;
    report_cost(cost(&config)?);
    let started = SystemTime::now();
    let clock = Instant::now();
    let out = output(&config);
    let mut sink = Sink::<R>::open(out.as_deref())?;
    let rows = run(&config, args.force, &mut |r| sink.push(r))?;
    sink.finish(study, &config, started, clock, rows.len())
}

fn dispatch(cli: Cli) -> covrad::Result<()> {
    match cli.command {
        Command::Study(a) => run_streaming(
            "study",
            &a,
            |c: &StudyConfig| c.output.clone(),
            |c| Ok(c.estimated_cost()),
            |c, f, sink| run_expectation_study(c, f, sink),
        ),
        Command::Zn(a) => run_streaming(
            "zn",
            &a,
            |c: &ZnConfig| c.output.clone(),
            |c| c.estimated_cost(),
            |c, f, sink| run_zn_study(c, f, sink),
        ),
        Command::Arcsine(a) => run_streaming(
            "arcsine",
            &a,
            |c: &ArcsineConfig| c.output.clone(),
            |c| Ok(c.estimated_cost()),
            |c, f, sink| run_arcsine_study(c, f, sink),
        ),
        Command::Epsnet(a) => run_streaming(
            "epsnet",
            &a,
            |c: &EpsNetConfig| c.output.clone(),
            |c| Ok(c.estimated_cost()),
            |c, f, sink| run_epsnet_study(c, f, sink),
        ),
        Command::Versus(a) => run_streaming(
            "versus",
            &a,
            |c: &VersusConfig| c.output.clone(),
            |c| c.estimated_cost(),
            |c, f, sink| run_random_vs_structured(c, f, sink),
        ),
        Command::Tail(a) => run_streaming(
            "tail",
            &a,
            |c: &TailConfig| c.output.clone(),
            |c| Ok(c.estimated_cost()),
            |c, f, sink| {
                let rows = run_tail_study(c, f)?;
                rows.iter().try_for_each(&mut *sink)?;
                Ok(rows)
            },
        ),
        Command::Fgrid { config, out } => {
            let mut c: FgridConfig = load(&config, None)?;
            if out.is_some() {
                c.output = out;
            }
            let started = SystemTime::now();
            let clock = Instant::now();
            let rows = run_fgrid(&c)?;
            let mut sink = Sink::open(c.output.as_deref())?;
            rows.iter().try_for_each(|r| sink.push(r))?;
            sink.finish("fgrid", &c, started, clock, rows.len())
        }
        Command::Constants { p } => {
            print!("{}", to_csv(&constants_table(p)?));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::BudgetRefused { .. }) => {
            eprintln!("error: {e}; rerun with --force to proceed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
