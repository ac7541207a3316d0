//! `flagdyn`: control sets of matrix semigroups from the command line.

mod config;
mod error;
mod export;
mod run;

use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use flagdyn_core::{iwasawa_decompose, GroupElement, Matrix};
use serde_json::json;

use config::{RunArgs, RunConfig};
use error::CliError;

#[derive(Parser)]
#[command(name = "flagdyn", version, about = "Control sets of semigroups of SL(n, R) on SO(n), flags and projective space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iwasawa factors g = k a n of one matrix.
    Decompose {
        /// Rows as JSON (`[[2,1],[1,1]]`) or as text with `;` or newlines between rows.
        #[arg(long)]
        matrix: String,
    },
    /// Samples the configured spaces and writes their control sets.
    ControlSets(RunArgs),
    /// Runs numerical checks of the structure theory and writes `verify.json`.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated check tags; all by default.
        #[arg(long, value_delimiter = ',')]
        theorems: Option<Vec<String>>,
    },
}

fn parse_matrix(text: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let trimmed = text.trim();
    let rows: Vec<Vec<f64>> = if trimmed.starts_with('[') {
        serde_json::from_str(trimmed).map_err(|e| CliError::Usage(format!("cannot parse matrix: {e}")))?
    } else {
        trimmed
            .split(['\n', ';'])
            .filter(|r| !r.trim().is_empty())
            .map(|r| {
                r.split([' ', ',', '\t'])
                    .filter(|x| !x.is_empty())
                    .map(|x| x.parse::<f64>().map_err(|_| CliError::Usage(format!("not a number: {x:?}"))))
                    .collect()
            })
            .collect::<Result<_, _>>()?
    };
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Usage("matrix must be square and non-empty".into()));
    }
    Ok(rows)
}

fn print_matrix(name: &str, m: &Matrix) {
    println!("{name} =");
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:>12.6}")).collect();
        println!("  [{}]", cells.join(" "));
    }
}

fn decompose(text: &str) -> Result<(), CliError> {
    let g = GroupElement::from_rows(&parse_matrix(text)?)?;
    let t = iwasawa_decompose(&g)?;
    print_matrix("k", &t.k);
    print_matrix("a", &t.a);
    print_matrix("n", &t.nfac);
    let rebuilt = &(&t.k * &t.a) * &t.nfac;
    let err = rebuilt.sub(g.matrix()).frobenius_norm() / g.matrix().frobenius_norm();
    println!("relative reconstruction error: {err:.3e}");
    Ok(())
}

fn control_sets(args: &RunArgs) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(args, None)?;
    let analyses = run::analyze_spaces(&cfg)?;
    for a in &analyses {
        for path in export::write_analysis(&cfg, a)? {
            log::info!("wrote {}", path.display());
        }
    }
    println!("{}", export::summary(&analyses));
    analyses.iter().flat_map(export::table).for_each(|line| println!("{line}"));
    Ok(())
}

fn verify(args: &RunArgs, theorems: Option<Vec<String>>) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(args, theorems)?;
    let tags = cfg.theorems.clone().unwrap_or_else(|| run::THEOREMS.iter().map(|t| t.to_string()).collect());
    let (subgroups, reports) = run::run_checks(&cfg, &tags)?;
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let doc = json!({
        "metadata": { "tool": "flagdyn", "version": env!("CARGO_PKG_VERSION"), "timestamp": timestamp },
        "config": cfg,
        "subgroups": subgroups,
        "reports": reports,
    });
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join("verify.json");
    let text = serde_json::to_string_pretty(&doc).expect("reports serialize");
    std::fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;

    for r in &reports {
        println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.theorem_tag, r.details);
    }
    match reports.iter().filter(|r| !r.passed).count() {
        0 => Ok(()),
        failed => Err(CliError::ChecksFailed(failed, reports.len())),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Decompose { matrix } => decompose(matrix),
        Command::ControlSets(args) => control_sets(args),
        Command::Verify { run, theorems } => verify(run, theorems.clone()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
