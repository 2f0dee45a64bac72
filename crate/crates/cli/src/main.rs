use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use puncture_cli::{run_job, CliError, JobConfig};

/// Run a job file, or the reproduction suite when no job is given.
#[derive(Parser, Debug)]
#[command(name = "puncture", version, about)]
struct Args {
    /// JSON job file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Directory for report.json and trace-*.csv.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    #[arg(long, value_name = "N")]
    quad_order: Option<usize>,

    #[arg(long, value_name = "K")]
    eps_decades: Option<usize>,

    /// Seed for the randomized suite rows.
    #[arg(long, value_name = "S")]
    seed: Option<u64>,

    /// Print the JSON report instead of the summary.
    #[arg(long)]
    json_only: bool,

    #[arg(long, value_name = "W")]
    workers: Option<usize>,

    /// Dimension of the suite when no job file is given.
    #[arg(long, default_value_t = 3)]
    dim: usize,
}

fn load(args: &Args) -> Result<JobConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => JobConfig::from_json(&fs::read_to_string(path)?)?,
        None => JobConfig::reproduce(args.dim),
    };
    if let Some(q) = args.quad_order {
        cfg.options.quad_order = q;
    }
    if let Some(k) = args.eps_decades {
        cfg.options.eps_decades = k;
    }
    if let Some(s) = args.seed {
        cfg.options.seed = s;
    }
    if args.workers.is_some() {
        cfg.options.workers = args.workers;
    }
    if args.out.is_some() {
        cfg.output.dir = args.out.clone();
    }
    cfg.output.json_only |= args.json_only;
    cfg.validate()?;
    Ok(cfg)
}

fn run(args: &Args) -> Result<(), CliError> {
    let cfg = load(args)?;
    let bundle = run_job(&cfg)?;
    if let Some(dir) = &cfg.output.dir {
        bundle.write_to(dir)?;
    }
    if cfg.output.json_only {
        print!("{}", bundle.json_text());
    } else {
        print!("{}", bundle.summary_text());
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let obj = e.to_object();
            println!("{}", serde_json::json!({ "error": obj }));
            ExitCode::from(obj.exit_code as u8)
        }
    }
}
