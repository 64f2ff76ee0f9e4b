use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use burniat_cli::{cmd_check, cmd_eigensystem, cmd_glct_upper, cmd_invariants, cmd_lct, default_cert_dir, CheckMode, Format, Report};
use burniat_core::surface::Catalog;

#[derive(Parser)]
#[command(name = "burniat", version, about = "Exact checks for the K^2 = 5 secondary Burniat surface")]
struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: FormatArg,
    /// Alternative curve catalog (TOML).
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// K^2, p_g, chi, q, the K_X.C table and the building-data checks.
    Invariants,
    /// lct of a divisor expression such as `4*H13 + 2*E3` or a witness `@D1-odd`.
    Lct {
        expr: String,
        #[arg(long)]
        n: Option<i64>,
    },
    /// Upper bound for glct(X, 2K_X) from pulled-back decompositions of -K_Y.
    GlctUpper {
        #[arg(long, default_value_t = 4)]
        max_coeff: u32,
    },
    /// Eigenspace dimensions of |mK_X|.
    Eigensystem { m: u64 },
    /// Check certificate files, or the whole corpus with --all.
    Check {
        paths: Vec<PathBuf>,
        #[arg(long)]
        all: bool,
        /// Run the ±1 mutation harness instead of plain checking.
        #[arg(long)]
        mutate: bool,
        /// Largest n for the instantiation pass.
        #[arg(long, default_value_t = 25)]
        max_n: i64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let owned;
    let cat = match &cli.catalog {
        None => Catalog::standard(),
        Some(p) => {
            let loaded = std::fs::read_to_string(p).map_err(|e| e.to_string()).and_then(|t| Catalog::from_toml(&t).map_err(|e| e.to_string()));
            match loaded {
                Ok(c) => {
                    owned = c;
                    &owned
                }
                Err(e) => {
                    eprintln!("error: catalog {}: {e}", p.display());
                    return ExitCode::from(2);
                }
            }
        }
    };
    let result: Result<Report, burniat_cli::CliError> = match cli.cmd {
        Cmd::Invariants => Ok(cmd_invariants(cat)),
        Cmd::Lct { expr, n } => cmd_lct(cat, &expr, n),
        Cmd::GlctUpper { max_coeff } => cmd_glct_upper(cat, max_coeff),
        Cmd::Eigensystem { m } => cmd_eigensystem(cat, m),
        Cmd::Check { paths, all, mutate, max_n } => {
            if all == !paths.is_empty() {
                eprintln!("error: give certificate paths or --all, not both or neither");
                return ExitCode::from(2);
            }
            let mode = if mutate { CheckMode::Mutate } else { CheckMode::Verify { max_n } };
            cmd_check(cat, &default_cert_dir(), &paths, &mode)
        }
    };
    match result {
        Ok(r) => {
            let format = match cli.format {
                FormatArg::Text => Format::Text,
                FormatArg::Json => Format::Json,
            };
            let mut text = r.render(format);
            if format == Format::Json {
                text.push('\n');
            }
            // a closed pipe is not an error worth a panic
            let _ = std::io::stdout().write_all(text.as_bytes());
            if r.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
