use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use filmgrp::cli::{
    cmd_convergence, cmd_grp_check, cmd_riemann, cmd_run, fmt_num, parse_config, parse_state,
    worker_threads,
};
use filmgrp::ConservedState;

macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(name = "filmgrp", version, about = "GRP solvers for the two-layer thin-film system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation described by a `key = value` config file.
    Run { config: PathBuf },
    /// Travelling-wave convergence study for GRP and MUSCL.
    Convergence {
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Sample the exact Riemann solution.
    Riemann {
        #[arg(long, value_parser = state_arg, allow_hyphen_values = true)]
        left: ConservedState,
        #[arg(long, value_parser = state_arg, allow_hyphen_values = true)]
        right: ConservedState,
        #[arg(long)]
        time: f64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value = "riemann.csv")]
        out: PathBuf,
    },
    /// Compare GRP time derivatives with the fine-grid oracle.
    GrpCheck {
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn state_arg(s: &str) -> Result<ConservedState, String> {
    parse_state(s)
}

fn run(cli: Cli) -> filmgrp::Result<bool> {
    match cli.command {
        Command::Run { config } => {
            let text = std::fs::read_to_string(&config)?;
            let cfg = parse_config(&text)?;
            for p in cmd_run(&cfg)? {
                say!("wrote {}", p.display());
            }
            Ok(true)
        }
        Command::Convergence { out } => {
            let (path, rows) = cmd_convergence(&out, worker_threads())?;
            for r in rows.iter().filter(|r| r.var == "f" || r.var == "b") {
                let order = r.orders.map(|o| format!("{:.2}", o[0])).unwrap_or_else(|| "-".into());
                say!("{:>6} {:>4} {:>2}  L1 {:<24} order {order}", r.scheme.name(), r.n, r.var, fmt_num(r.norms.l1));
            }
            say!("wrote {}", path.display());
            Ok(true)
        }
        Command::Riemann { left, right, time, samples, out } => {
            let summary = cmd_riemann(&left, &right, time, samples, &out)?;
            say!("{}", summary.trim_end());
            say!("wrote {}", out.display());
            Ok(true)
        }
        Command::GrpCheck { out } => {
            let (path, results) = cmd_grp_check(&out)?;
            let mut ok = true;
            for r in &results {
                let pass = r.pass.iter().all(|&p| p);
                ok &= pass;
                say!("{} {} [{}]", if pass { "PASS" } else { "FAIL" }, r.case.name, r.structure);
            }
            say!("wrote {}", path.display());
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
