//! Batch front end for the minsurf solver: configuration parsing, CSV/JSON
//! artifacts, and the solve / check / convergence / svd-report subcommands.

pub mod commands;
pub mod config;
pub mod fields_csv;
pub mod report;

use commands::{EXIT_CONFIG, EXIT_OK};
use config::RunConfig;

const USAGE: &str = "\
minsurf — minimal surface system solver and geometry auditor

USAGE:
    minsurf <solve|check|convergence> [--config FILE.json] [--KEY VALUE]...
    minsurf svd-report --matrix \"a,b;c,d\"

Every configuration key can be given as a flag with the same name; flag
values are JSON literals (numbers, arrays) or bare strings. The output
directory comes from --outdir, the MINSURF_OUTDIR environment variable, or
the config file, in that order of precedence.

Exit codes: 0 success, 1 config/input error, 2 not converged, 3 audit failed.
";

/// Entry point shared by the binary and the integration tests.
pub fn run(args: &[String]) -> i32 {
    let Some(subcommand) = args.first() else {
        eprint!("{USAGE}");
        return EXIT_CONFIG;
    };
    if subcommand == "-h" || subcommand == "--help" || subcommand == "help" {
        print!("{USAGE}");
        return EXIT_OK;
    }

    // Flags: --key value pairs after the subcommand.
    let mut config_path = None;
    let mut matrix = None;
    let mut overrides: Vec<(String, String)> = Vec::new();
    let mut outdir_flag = false;
    let mut it = args[1..].iter();
    while let Some(arg) = it.next() {
        let Some(key) = arg.strip_prefix("--") else {
            eprintln!("unexpected argument {arg:?} (flags are --key value)");
            return EXIT_CONFIG;
        };
        let Some(value) = it.next() else {
            eprintln!("flag --{key} is missing its value");
            return EXIT_CONFIG;
        };
        match key {
            "config" => config_path = Some(value.clone()),
            "matrix" if subcommand == "svd-report" => matrix = Some(value.clone()),
            _ => {
                if key == "outdir" {
                    outdir_flag = true;
                }
                overrides.push((key.to_string(), value.clone()));
            }
        }
    }

    if subcommand == "svd-report" {
        let Some(matrix) = matrix else {
            eprintln!("svd-report needs --matrix \"a,b;c,d\"");
            return EXIT_CONFIG;
        };
        return match commands::cmd_svd_report(&matrix) {
            Ok(code) => code,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_CONFIG
            }
        };
    }

    let cfg = match RunConfig::load(config_path.as_deref(), &overrides) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let outdir = cfg.resolve_outdir(outdir_flag);

    let result = match subcommand.as_str() {
        "solve" => commands::cmd_solve(&cfg, &outdir),
        "check" => commands::cmd_check(&cfg, &outdir),
        "convergence" => commands::cmd_convergence(&cfg, &outdir),
        other => {
            eprintln!("unknown subcommand {other:?}");
            eprint!("{USAGE}");
            return EXIT_CONFIG;
        }
    };
    match result {
        Ok((_, code)) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}
