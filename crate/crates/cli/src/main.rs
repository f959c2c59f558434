use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use flatg_cli::{all_passed, emit_report, rank_range, run_suite, CliError, Config, Format, Suite};

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

/// Run a verification suite and print its certificate.
#[derive(Parser)]
#[command(name = "verify", version)]
struct Args {
    /// lattice, folding, cubic, configs, moduli, liealg, repbundles or all
    suite: String,
    /// key = value config file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Σ ≅ Z/m1 × Z/m2
    #[arg(long, value_name = "m1,m2")]
    sigma: Option<String>,
    /// Σ = E(F_p) for y² = x³ + ax + b
    #[arg(long, value_name = "p,a,b")]
    curve: Option<String>,
    /// B ranks 2..=N
    #[arg(long, value_name = "N")]
    rank_b: Option<usize>,
    /// C ranks 2..=N
    #[arg(long, value_name = "N")]
    rank_c: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    #[arg(long)]
    out: Option<PathBuf>,
    /// run the modules of `all` on separate threads
    #[arg(long)]
    parallel: bool,
}

fn ints(flag: &str, v: &str, n: usize) -> Result<Vec<i64>, CliError> {
    let xs: Vec<i64> = v
        .split(',')
        .map(|p| p.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::InvalidConfig(format!("--{flag} {v}")))?;
    if xs.len() != n {
        return Err(CliError::InvalidConfig(format!("--{flag} expects {n} integers")));
    }
    Ok(xs)
}

fn run(args: Args) -> Result<bool, CliError> {
    let suite: Suite = args.suite.parse()?;
    let mut config = match &args.config {
        Some(p) => Config::parse(&std::fs::read_to_string(p)?)?,
        None => Config::default(),
    };
    if let Some(s) = &args.sigma {
        let v = ints("sigma", s, 2)?;
        config.sigma = (v[0], v[1]);
        config.curve = None;
    }
    if let Some(c) = &args.curve {
        let v = ints("curve", c, 3)?;
        config.curve = Some((v[0], v[1], v[2]));
    }
    if let Some(n) = args.rank_b {
        config.ranks_b = rank_range(n)?;
    }
    if let Some(n) = args.rank_c {
        config.ranks_c = rank_range(n)?;
    }
    let format = match args.format {
        FormatArg::Text => Format::Text,
        FormatArg::Json => Format::Json,
    };
    let reports = run_suite(suite, &config, args.parallel)?;
    let text = emit_report(&reports, &config, format);
    match &args.out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(all_passed(&reports))
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("verify: {e}");
            ExitCode::from(2)
        }
    }
}
