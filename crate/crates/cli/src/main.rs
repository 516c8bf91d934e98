//! `lpo-codes`: tables, constructions, verification and simulations.
//!
//! Exit codes: 0 success, 1 usage, 2 input, 3 resource limit, 4 failed
//! verification.

use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lpo_codes::bounds::{assemble_table, lightcode_critical, table_to_csv, BoundKind};
use lpo_codes::codes::{
    construct_graham_sloane, construct_orbit, construct_tournament, exact_l, verify_light, LightCode,
};
use lpo_codes::cwords::{format_words, parse_words};
use lpo_codes::grid::CriticalGrid;
use lpo_codes::johnson::format_orientation;
use lpo_codes::lpocv::{
    empirical_critical_table, simulate_null, type2_experiment, type2_to_csv, LearnerSpec, Scenario, Setup,
    SimulationConfig, LEARNER_NAMES, SCENARIO_NAMES,
};
use lpo_codes::wilcoxon::wmw_critical;
use lpo_codes::Error;

#[derive(Parser, Debug)]
#[command(
    name = "lpo-codes",
    version,
    about = "Light constant-weight codes and LPOCV significance tests"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lower, upper and exact bounds on L(W, n, w) as CSV.
    Bounds {
        /// Inclusive range such as `3..6`, or a single value.
        #[arg(long)]
        n_range: String,
        #[arg(long)]
        w_range: String,
        #[arg(long = "W-range")]
        lightness_range: String,
        /// Search exactly when C(n, w) <= 24.
        #[arg(long)]
        exact_when_small: bool,
        /// Also emit rows with w > n/2, which mirror their complements.
        #[arg(long)]
        include_complements: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grid of critical values, rows by ones and columns by zeros.
    Critical {
        #[arg(long, value_enum)]
        test: CriticalTest,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 20)]
        max_size: usize,
        /// Setups for the empirical table, one `learner;params;scenario;seed` per line.
        #[arg(long, required_if_eq("test", "empirical"))]
        configs: Option<PathBuf>,
        /// Replications per cell and setup for the empirical table.
        #[arg(long, default_value_t = 10_000)]
        reps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Builds a light code and writes it with a witness orientation.
    Construct {
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long)]
        n: usize,
        /// Weight; implied by tournament (1) and orbit (2).
        #[arg(long)]
        w: Option<usize>,
        #[arg(long = "W")]
        lightness: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Checks whether a code file is W-light.
    Verify {
        #[arg(long)]
        code: PathBuf,
        #[arg(long = "W")]
        lightness: usize,
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Null histograms or type-II error proportions.
    Simulate {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        learner: String,
        /// Learner parameters as `key=value,...`.
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        w: Option<usize>,
        /// Fresh samples; in null mode a single sample gives the distribution over its labelings.
        #[arg(long, default_value_t = 1)]
        reps: usize,
        /// Labelings drawn when a sample's labelings are too many to enumerate.
        #[arg(long, default_value_t = 10_000)]
        permutations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Balanced sample sizes for type2 mode.
        #[arg(long, value_delimiter = ',', default_value = "12,16,20,24,28,32,36,40")]
        sizes: Vec<usize>,
        /// Critical grid CSV for type2 mode; defaults to the WMW grid at --alpha.
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive L(W, n, w) for C(n, w) <= 24.
    ExactL {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        w: usize,
        #[arg(long = "W")]
        lightness: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        witness: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CriticalTest {
    Wmw,
    LightcodeLower,
    LightcodeUpper,
    Empirical,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Tournament,
    Orbit,
    GrahamSloane,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Null,
    Type2,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Lib(Error),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn parse_range(flag: &str, text: &str) -> Result<RangeInclusive<usize>, Failure> {
    let bad = || usage(format!("--{flag} expects a..b or a single value, got '{text}'"));
    let (lo, hi) = match text.split_once("..") {
        Some((lo, hi)) => (lo, hi.strip_prefix('=').unwrap_or(hi)),
        None => (text, text),
    };
    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
    let hi: usize = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(usage(format!("--{flag} range {text} is empty")));
    }
    Ok(lo..=hi)
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::Lib(Error::Input(format!("cannot write {}: {e}", path.display()))))
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Lib(Error::Input(format!("cannot read {}: {e}", path.display()))))
}

fn cmd_bounds(
    n_range: &str,
    w_range: &str,
    lightness_range: &str,
    exact: bool,
    complements: bool,
    out: Option<&Path>,
) -> Outcome {
    let n = parse_range("n-range", n_range)?;
    let w = parse_range("w-range", w_range)?;
    let l = parse_range("W-range", lightness_range)?;
    if *n.end() > 64 {
        return Err(usage("--n-range is limited to n <= 64"));
    }
    let mut rows = assemble_table(n, w, l, exact)?;
    if !complements {
        rows.retain(|r| 2 * r.w <= r.n);
    }
    emit(out, &table_to_csv(&rows))
}

fn cmd_critical(
    test: CriticalTest,
    alpha: f64,
    max_size: usize,
    configs: Option<&Path>,
    reps: usize,
    out: Option<&Path>,
) -> Outcome {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(usage(format!("--alpha must lie in (0, 1), got {alpha}")));
    }
    if max_size == 0 || 2 * max_size > 64 {
        return Err(usage("--max-size must be between 1 and 32"));
    }
    let grid = match test {
        CriticalTest::Empirical => {
            let path = configs.ok_or_else(|| usage("--test empirical needs --configs"))?;
            if reps == 0 {
                return Err(usage("--reps must be positive"));
            }
            let setups = Setup::parse_lines(&read_file(path)?)?;
            empirical_critical_table(&setups, alpha, max_size, reps)?
        }
        _ => {
            let mut grid = CriticalGrid::new(max_size);
            for ones in 1..=max_size {
                for zeros in 1..=max_size {
                    let n = ones + zeros;
                    let value = match test {
                        CriticalTest::Wmw => wmw_critical(alpha, n, ones)?,
                        CriticalTest::LightcodeLower => lightcode_critical(alpha, n, ones, BoundKind::Lower)?,
                        CriticalTest::LightcodeUpper => lightcode_critical(alpha, n, ones, BoundKind::Upper)?,
                        CriticalTest::Empirical => unreachable!("handled above"),
                    };
                    grid.set(ones, zeros, value);
                }
            }
            grid
        }
    };
    emit(out, &grid.to_csv())
}

fn write_code(code: &LightCode, out: &Path, witness: Option<&Path>) -> Outcome {
    let checked = verify_light(code).ok_or_else(|| {
        Failure::Verification(format!("code of size {} is not {}-light", code.len(), code.lightness()))
    })?;
    let orientation = match code.witness() {
        Some(o) if code.witness_is_valid() && o.audit(code.lightness()) => o.clone(),
        _ => checked,
    };
    if !orientation.audit(code.lightness()) {
        return Err(Failure::Verification("witness orientation failed its audit".into()));
    }
    write_file(out, &format_words(code.words()))?;
    if let Some(path) = witness {
        write_file(path, &format_orientation(&orientation))?;
    }
    Ok(())
}

fn cmd_construct(
    method: Method,
    n: usize,
    w: Option<usize>,
    lightness: usize,
    out: &Path,
    witness: Option<&Path>,
) -> Outcome {
    let implied = match method {
        Method::Tournament => Some(1),
        Method::Orbit => Some(2),
        Method::GrahamSloane => None,
    };
    let w = match (implied, w) {
        (Some(i), Some(w)) if i != w => return Err(usage(format!("{method:?} codes have weight {i}, not {w}"))),
        (Some(i), _) => i,
        (None, Some(w)) => w,
        (None, None) => return Err(usage("--method graham-sloane needs --w")),
    };
    let code = match method {
        Method::Tournament => construct_tournament(n, lightness)?,
        Method::Orbit => construct_orbit(n, lightness)?,
        Method::GrahamSloane => construct_graham_sloane(n, w, lightness)?,
    };
    write_code(&code, out, witness)?;
    println!("method={method:?} n={n} w={w} W={lightness} size={}", code.len());
    Ok(())
}

fn cmd_verify(path: &Path, lightness: usize, witness: Option<&Path>) -> Outcome {
    let words = parse_words(&read_file(path)?)?;
    let (n, w) = (words[0].len(), words[0].weight());
    let code = LightCode::new(n, w, lightness, words)?;
    println!("code: {}", path.display());
    println!("n={n} w={w} size={} W={lightness}", code.len());
    match verify_light(&code) {
        Some(o) => {
            println!("feasible: yes");
            if let Some(p) = witness {
                write_file(p, &format_orientation(&o))?;
                println!("witness: {}", p.display());
            }
            Ok(())
        }
        None => {
            println!("feasible: no");
            Err(Failure::Verification(format!("code is not {lightness}-light")))
        }
    }
}

fn parse_learner(name: &str, params: &str) -> Result<LearnerSpec, Failure> {
    if !LEARNER_NAMES.contains(&name) {
        return Err(usage(format!(
            "unknown learner '{name}', expected one of {}",
            LEARNER_NAMES.join(", ")
        )));
    }
    LearnerSpec::parse(name, params).map_err(|e| usage(e.to_string()))
}

fn parse_scenario(id: &str) -> Result<Scenario, Failure> {
    if !id.starts_with("csv:") && !SCENARIO_NAMES.contains(&id) {
        return Err(usage(format!(
            "unknown scenario '{id}', expected one of {}",
            SCENARIO_NAMES.join(", ")
        )));
    }
    Ok(Scenario::parse(id)?)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    mode: Mode,
    learner: &str,
    params: &str,
    scenario: &str,
    n: Option<usize>,
    w: Option<usize>,
    reps: usize,
    permutations: usize,
    seed: u64,
    sizes: &[usize],
    table: Option<&Path>,
    alpha: f64,
    out: Option<&Path>,
) -> Outcome {
    let setup = Setup {
        learner: parse_learner(learner, params)?,
        scenario: parse_scenario(scenario)?,
        seed,
    };
    if reps == 0 {
        return Err(usage("--reps must be positive"));
    }
    match mode {
        Mode::Null => {
            let (Some(n), Some(w)) = (n, w) else {
                return Err(usage("--mode null needs --n and --w"));
            };
            if w == 0 || w >= n || n > 64 {
                return Err(usage(format!("need 0 < w < n <= 64, got n={n}, w={w}")));
            }
            let config = SimulationConfig {
                setup,
                n,
                w,
                replications: reps,
                permutations,
            };
            emit(out, &simulate_null(&config)?.to_csv())
        }
        Mode::Type2 => {
            if sizes.iter().any(|&s| s < 2 || s % 2 == 1 || s > 64) {
                return Err(usage("--sizes must be even numbers between 2 and 64"));
            }
            let grid = match table {
                Some(path) => CriticalGrid::parse_csv(&read_file(path)?)?,
                None => {
                    if !(alpha > 0.0 && alpha < 1.0) {
                        return Err(usage(format!("--alpha must lie in (0, 1), got {alpha}")));
                    }
                    let half = sizes.iter().max().map_or(1, |s| s / 2);
                    let mut grid = CriticalGrid::new(half);
                    for ones in 1..=half {
                        for zeros in 1..=half {
                            grid.set(ones, zeros, wmw_critical(alpha, ones + zeros, ones)?);
                        }
                    }
                    grid
                }
            };
            emit(out, &type2_to_csv(&type2_experiment(&setup, sizes, &grid, reps)?))
        }
    }
}

fn cmd_exact_l(n: usize, w: usize, lightness: usize, out: Option<&Path>, witness: Option<&Path>) -> Outcome {
    let code = exact_l(n, w, lightness)?;
    if let Some(path) = out {
        write_code(&code, path, witness)?;
    } else if verify_light(&code).is_none() {
        return Err(Failure::Verification("optimal code failed verification".into()));
    }
    println!("{}", code.len());
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Bounds {
            n_range,
            w_range,
            lightness_range,
            exact_when_small,
            include_complements,
            out,
        } => cmd_bounds(
            &n_range,
            &w_range,
            &lightness_range,
            exact_when_small,
            include_complements,
            out.as_deref(),
        ),
        Command::Critical {
            test,
            alpha,
            max_size,
            configs,
            reps,
            out,
        } => cmd_critical(test, alpha, max_size, configs.as_deref(), reps, out.as_deref()),
        Command::Construct {
            method,
            n,
            w,
            lightness,
            out,
            witness,
        } => cmd_construct(method, n, w, lightness, &out, witness.as_deref()),
        Command::Verify {
            code,
            lightness,
            witness,
        } => cmd_verify(&code, lightness, witness.as_deref()),
        Command::Simulate {
            mode,
            learner,
            params,
            scenario,
            n,
            w,
            reps,
            permutations,
            seed,
            sizes,
            table,
            alpha,
            out,
        } => cmd_simulate(
            mode,
            &learner,
            &params,
            &scenario,
            n,
            w,
            reps,
            permutations,
            seed,
            &sizes,
            table.as_deref(),
            alpha,
            out.as_deref(),
        ),
        Command::ExactL {
            n,
            w,
            lightness,
            out,
            witness,
        } => cmd_exact_l(n, w, lightness, out.as_deref(), witness.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            let (code, msg) = match failure {
                Failure::Usage(m) => (1, m),
                Failure::Lib(Error::Parameter(m)) => (1, m),
                Failure::Lib(Error::Input(m)) => (2, m),
                Failure::Lib(Error::Resource(m)) => (3, m),
                Failure::Verification(m) => (4, m),
            };
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
