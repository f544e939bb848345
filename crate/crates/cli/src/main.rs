//! `octoform`: expand forms, derive and verify representation-number
//! formulas, audit the coefficient tables.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use octoform::bases::{basis_for_space, verify_rank, SpaceId};
use octoform::modforms::resolve;
use octoform::solver::derive_formula;
use octoform::tables::{published_forms, PublishedTable, TABLE_IDS};
use octoform::verify::{audit_table, brute_force_count, verify_forms};
use octoform::{Error, QuadraticForm, DEFAULT_PRECISION};

use output::{Emitter, Outcome};

#[derive(Parser, Debug)]
#[command(name = "octoform", version, about = "Representation numbers of octonary quadratic forms with coefficients 1, 2, 3, 4, 6")]
struct Cli {
    #[command(flatten)]
    config: Config,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Config {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Pretty, global = true)]
    format: Format,

    /// Worker threads for batch verification and table audits.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: Option<u16>,

    /// Directory holding tableNN.txt files; the shipped tables are used otherwise.
    #[arg(long, env = "OCTOFORM_TABLES_DIR", global = true)]
    tables_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the q-expansion of a named form, e.g. `f_{4,8}`, `E_4,1,chi8`, `theta^2@3`.
    Expand {
        name: String,
        /// Number of coefficients.
        #[arg(long, default_value_t = DEFAULT_PRECISION as u32, value_parser = clap::value_parser!(u32).range(1..))]
        prec: u32,
    },
    /// Derive the basis coefficients for a form given by its exponents `i j k l [m]`.
    Formula {
        #[arg(num_args = 1.., required = true)]
        exponents: Vec<String>,
        #[arg(long)]
        prec: Option<usize>,
    },
    /// Check a derived formula against direct point counts for n = 0..nmax.
    Verify {
        /// Exponents `i j k l [m]`, optionally followed by nmax.
        #[arg(num_args = 0..)]
        args: Vec<String>,
        #[arg(long)]
        nmax: Option<usize>,
        /// Verify every form of the two published case lists.
        #[arg(long, conflicts_with = "args")]
        all: bool,
    },
    /// Compare derived constants with the transcribed tables (default: all).
    Tables { ids: Vec<u8>, #[arg(long)] prec: Option<usize> },
    /// Count points of a1 x1² + ... + a8 x8² = n directly.
    Count {
        #[arg(num_args = 9, required = true, value_names = ["A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "N"])]
        values: Vec<u64>,
    },
    /// Dump the labeled basis of a space.
    Basis { space: String, #[arg(long)] prec: Option<usize> },
    /// Exact rank of each basis, with dependencies when deficient.
    Rank { spaces: Vec<String>, #[arg(long)] prec: Option<usize> },
}

fn checked_prec(prec: Option<usize>) -> Result<usize, Outcome> {
    match prec {
        Some(p) if p < DEFAULT_PRECISION => Err(Outcome::usage(format!(
            "--prec must be at least {DEFAULT_PRECISION}, got {p}"
        ))),
        Some(p) => Ok(p),
        None => Ok(DEFAULT_PRECISION),
    }
}

fn parse_form(words: &[String]) -> Result<QuadraticForm, Outcome> {
    QuadraticForm::parse(&words.join(" ")).map_err(|e| Outcome::usage(e.to_string()))
}

/// Splits `i j k l [m] [nmax]`; a trailing count is recognised when the
/// exponents before it already sum to 8.
fn split_verify_args(args: &[String]) -> Result<(QuadraticForm, Option<usize>), Outcome> {
    let nums: Vec<usize> = args
        .iter()
        .map(|a| a.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| Outcome::usage(format!("expected integers, got {args:?}")))?;
    let sums_to_8 = |xs: &[usize]| xs.iter().sum::<usize>() == 8;
    let (exps, nmax) = match nums.len() {
        6 => (&args[..5], Some(nums[5])),
        5 if !sums_to_8(&nums) && sums_to_8(&nums[..4]) => (&args[..4], Some(nums[4])),
        _ => (args, None),
    };
    Ok((parse_form(exps)?, nmax))
}

fn run(cli: Cli) -> Outcome {
    let out = Emitter::new(cli.config.format);
    let tables_dir = cli.config.tables_dir.as_deref();
    match cli.command {
        Command::Expand { name, prec } => match resolve(&name).and_then(|r| r.expand(prec as usize)) {
            Ok(series) => out.series(&name, &series),
            Err(e @ Error::UnknownName { .. }) => out.error(Outcome::usage(e.to_string())),
            Err(e) => out.error(Outcome::finding(e.to_string())),
        },
        Command::Formula { exponents, prec } => {
            let run = || -> Result<Outcome, Outcome> {
                let prec = checked_prec(prec)?;
                let form = parse_form(&exponents)?;
                let formula = derive_formula(&form, prec).map_err(|e| Outcome::finding(e.to_string()))?;
                let doc = formula.document().map_err(|e| Outcome::finding(e.to_string()))?;
                Ok(out.formula(&doc))
            };
            run().unwrap_or_else(|o| out.error(o))
        }
        Command::Verify { args, nmax, all } => {
            let run = || -> Result<Outcome, Outcome> {
                let (forms, n_max) = if all {
                    let forms: Vec<QuadraticForm> = published_forms().iter().map(|l| l.form).collect();
                    (forms, nmax.unwrap_or(100))
                } else {
                    if args.is_empty() {
                        return Err(Outcome::usage("verify needs exponents or --all".into()));
                    }
                    let (form, trailing) = split_verify_args(&args)?;
                    (vec![form], nmax.or(trailing).unwrap_or(100))
                };
                if n_max == 0 {
                    return Err(Outcome::usage("nmax must be positive".into()));
                }
                let reports = verify_forms(&forms, n_max, tables_dir);
                Ok(out.reports(&reports, all))
            };
            run().unwrap_or_else(|o| out.error(o))
        }
        Command::Tables { ids, prec } => {
            let run = || -> Result<Outcome, Outcome> {
                let prec = checked_prec(prec)?;
                let ids = if ids.is_empty() { TABLE_IDS.to_vec() } else { ids };
                let mut rows = Vec::new();
                for id in ids {
                    if !TABLE_IDS.contains(&id) {
                        return Err(Outcome::usage(format!("no table {id}; tables are 3 to 10")));
                    }
                    let table = PublishedTable::load(tables_dir, id).map_err(|e| Outcome::usage(e.to_string()))?;
                    rows.extend(audit_table(&table, prec));
                }
                Ok(out.table_audit(&rows))
            };
            run().unwrap_or_else(|o| out.error(o))
        }
        Command::Count { values } => {
            let (coeffs, n) = values.split_at(8);
            if coeffs.contains(&0) {
                return out.error(Outcome::usage("coefficients must be positive".into()));
            }
            out.count(coeffs, n[0], brute_force_count(coeffs, n[0] as usize))
        }
        Command::Basis { space, prec } => {
            let run = || -> Result<Outcome, Outcome> {
                let prec = checked_prec(prec)?;
                let space: SpaceId = space.parse().map_err(|e: Error| Outcome::usage(e.to_string()))?;
                let basis = basis_for_space(space, prec).map_err(|e| Outcome::finding(e.to_string()))?;
                Ok(out.basis(space, &basis))
            };
            run().unwrap_or_else(|o| out.error(o))
        }
        Command::Rank { spaces, prec } => {
            let run = || -> Result<Outcome, Outcome> {
                let prec = checked_prec(prec)?;
                let spaces: Vec<SpaceId> = if spaces.is_empty() {
                    SpaceId::ALL.to_vec()
                } else {
                    spaces
                        .iter()
                        .map(|s| s.parse().map_err(|e: Error| Outcome::usage(e.to_string())))
                        .collect::<Result<_, _>>()?
                };
                let reports = spaces
                    .into_iter()
                    .map(|s| verify_rank(s, prec).map_err(|e| Outcome::finding(e.to_string())))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(out.ranks(&reports))
            };
            run().unwrap_or_else(|o| out.error(o))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.config.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs as usize)
            .build_global()
            .expect("thread pool is configured once");
    }
    run(cli).exit_code()
}
