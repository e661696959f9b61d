//! `causal-lab`: error tables, query plans, noisy rates and verification suites.

mod output;
mod suites;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use causal_lab::combinatorics::{cause_approx_plan, cause_exact_plan, YoungDiagram};
use causal_lab::discrimination::{classical_error_exact, classical_monte_carlo, quantum_k_no_ref_success};
use causal_lab::rates::{
    chernoff_numeric, heralded_error_default, min_queries, noisy_intermediary_states, noisy_rates,
    rates_summary, scenario_error, Scenario,
};
use causal_lab::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;

use output::{render, Format, Provenance, Record};
use suites::{run_suite, Suite, SuiteParams};

const DEFAULT_SEED: u64 = 0xC0FFEE;

/// Largest `d` for which noisy states are built densely in `sweep --brute-force`.
const MAX_BRUTE_FORCE_D: usize = 4;

#[derive(Parser, Debug)]
#[command(name = "causal-lab", version, about = "Discrimination of causal structures: tables, plans, rates and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed for every random draw.
    #[arg(long, default_value_t = DEFAULT_SEED, value_parser = parse_seed)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Noiseless rates and the noisy Chernoff/heralded rates.
    Rates {
        #[arg(long, default_value_t = 2, value_parser = parse_d)]
        d: usize,
        /// Noise levels; defaults to 0, 0.05, …, 0.5.
        #[arg(long, value_delimiter = ',', value_parser = parse_p)]
        p: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Error probability against the number of queries.
    Table {
        #[arg(long, value_enum)]
        scenario: TableScenario,
        #[arg(long, default_value_t = 2, value_parser = parse_d)]
        d: usize,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..=4096))]
        n_max: u64,
        /// Number of hypotheses (default 2, or 3 for the k-scenarios).
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        k: Option<u64>,
        /// Add Monte Carlo rows with this many trials (classical scenarios).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Fewest queries reaching a target error.
    Plan {
        #[arg(long, value_enum)]
        scenario: PlanScenario,
        #[arg(long, default_value_t = 2, value_parser = parse_d)]
        d: usize,
        #[arg(long, value_parser = parse_eps)]
        eps: f64,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(2..))]
        k: u64,
        /// Slack of the approximate cause plan.
        #[arg(long, default_value_t = 0.0, value_parser = parse_slack)]
        slack: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Run a named oracle suite; exits 1 on any failure.
    Verify {
        #[arg(long, value_parser = parse_suite)]
        suite: Suite,
        #[arg(long, value_parser = parse_d)]
        d: Option<usize>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=64))]
        n: Option<u64>,
        #[arg(long, value_parser = parse_p)]
        p: Option<f64>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Noisy rates over a uniform grid of noise levels.
    Sweep {
        #[arg(long, default_value_t = 2, value_parser = parse_d)]
        d: usize,
        #[arg(long, default_value_t = 0.0, value_parser = parse_p)]
        p_min: f64,
        #[arg(long, default_value_t = 0.5, value_parser = parse_p)]
        p_max: f64,
        #[arg(long, default_value_t = 11, value_parser = clap::value_parser!(u64).range(1..=10_000))]
        steps: u64,
        /// Also report the finite-N heralded error at this many queries.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=200))]
        n: Option<u64>,
        /// Also evaluate the Chernoff rate numerically on dense states.
        #[arg(long)]
        brute_force: bool,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableScenario {
    Classical,
    Coherent,
    Superposed,
    KClassical,
    KQuantum,
    CauseId,
}

impl TableScenario {
    fn name(self) -> &'static str {
        match self {
            TableScenario::Classical => "classical",
            TableScenario::Coherent => "coherent",
            TableScenario::Superposed => "superposed",
            TableScenario::KClassical => "k-classical",
            TableScenario::KQuantum => "k-quantum",
            TableScenario::CauseId => "cause-id",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlanScenario {
    Classical,
    Coherent,
    Superposed,
    CauseId,
}

impl From<PlanScenario> for Scenario {
    fn from(s: PlanScenario) -> Self {
        match s {
            PlanScenario::Classical => Scenario::Classical,
            PlanScenario::Coherent => Scenario::Coherent,
            PlanScenario::Superposed => Scenario::Superposed,
            PlanScenario::CauseId => Scenario::CauseId,
        }
    }
}

fn parse_seed(s: &str) -> std::result::Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed '{s}': {e}"))
}

fn parse_d(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(d) if (2..=64).contains(&d) => Ok(d),
        Ok(d) => Err(format!("d = {d} outside [2, 64]")),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_p(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(p) if (0.0..=1.0).contains(&p) => Ok(p),
        Ok(p) => Err(format!("p = {p} outside [0, 1]")),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_eps(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(e) if e > 0.0 && e < 1.0 => Ok(e),
        Ok(e) => Err(format!("eps = {e} outside (0, 1)")),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_slack(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(e) if e >= 0.0 && e.is_finite() => Ok(e),
        Ok(e) => Err(format!("slack = {e} must be finite and non-negative")),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    s.parse()
}

/// Failure outcome: exit code plus message.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if suites::is_usage_error(&e) { 2 } else { 1 };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn rates(d: usize, ps: &[f64]) -> Result<Vec<Record>> {
    let summary = rates_summary(d)?;
    let mut out = vec![
        Record::new("rate-classical", summary.r_classical, Provenance::Formula).d(d),
        Record::new("rate-quantum", summary.r_quantum, Provenance::Formula).d(d),
    ];
    let grid: Vec<f64> = if ps.is_empty() {
        (0..=10).map(|i| i as f64 * 0.05).collect()
    } else {
        ps.to_vec()
    };
    let reports = grid.par_iter().map(|&p| noisy_rates(d, p)).collect::<Result<Vec<_>>>()?;
    if let Some(first) = reports.first() {
        out.push(Record::new("advantage-boundary", first.advantage_boundary, Provenance::Formula).d(d));
        out.push(Record::new("heralded-threshold", first.threshold_heralded, Provenance::Formula).d(d));
    }
    for r in reports {
        out.push(Record::new("chernoff-rate", r.chernoff_rate, Provenance::Formula).d(d).p(r.p));
        out.push(Record::new("heralded-rate", r.heralded_rate, Provenance::Formula).d(d).p(r.p));
    }
    Ok(out)
}

fn table(scenario: TableScenario, d: usize, n_max: usize, k: Option<u64>, trials: Option<u64>, seed: u64) -> Result<Vec<Record>> {
    let name = scenario.name();
    let k = match scenario {
        TableScenario::KClassical | TableScenario::KQuantum => k.unwrap_or(3),
        TableScenario::Superposed => match k {
            Some(k) if k != 2 => return Err(Error::InvalidInput("the superposed scenario is binary (k = 2)".into())),
            _ => 2,
        },
        _ => k.unwrap_or(2),
    } as usize;
    let step = if scenario == TableScenario::Superposed { d } else { 1 };
    let ns: Vec<usize> = (1..=n_max / step).map(|i| i * step).collect();
    let rows = ns
        .par_iter()
        .map(|&n| -> Result<Vec<Record>> {
            let value = match scenario {
                TableScenario::Classical => scenario_error(Scenario::Classical, d, n, k)?.0,
                TableScenario::Coherent => scenario_error(Scenario::Coherent, d, n, k)?.0,
                TableScenario::Superposed => scenario_error(Scenario::Superposed, d, n, k)?.0,
                TableScenario::CauseId => scenario_error(Scenario::CauseId, d, n, k)?.0,
                TableScenario::KClassical => classical_error_exact(d, n, k, 1)?.to_f64().unwrap_or(f64::NAN),
                TableScenario::KQuantum => {
                    let rect = YoungDiagram::balanced(n, d)?;
                    let err = num_rational::BigRational::one() - quantum_k_no_ref_success(d, n, k, &rect)?;
                    err.to_f64().unwrap_or(f64::NAN)
                }
            };
            let mut row = vec![Record::new(name, value, Provenance::Formula).d(d).n(n).k(k as u64)];
            if let (Some(t), TableScenario::Classical | TableScenario::KClassical) = (trials, scenario) {
                // Each row draws from its own seed so rows are independent of the table length.
                let mc = classical_monte_carlo(d, n, k, t, seed.wrapping_add(n as u64))?;
                row.push(Record::new(name, mc, Provenance::MonteCarlo).d(d).n(n).k(k as u64));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.into_iter().flatten().collect())
}

fn plan(scenario: PlanScenario, d: usize, eps: f64, k: u64, slack: f64) -> Result<Vec<Record>> {
    let result = min_queries(scenario.into(), d, eps, k as usize)?;
    let name = Scenario::from(scenario).name();
    let mut out = vec![Record::new(name, result.achieved_err, Provenance::Formula)
        .d(d)
        .n(result.n)
        .k(k)];
    if let Some(prev) = result.previous_err {
        out.push(
            Record::new(format!("{name}/previous"), prev, Provenance::Formula)
                .d(d)
                .n(result.n - result.step)
                .k(k),
        );
    }
    if scenario == PlanScenario::CauseId {
        let exact = cause_exact_plan(k, d)?;
        out.push(Record::new("cause-exact-plan", exact.error_bound, Provenance::Formula).d(d).n(exact.n).k(k));
        let approx = cause_approx_plan(k, d, slack)?;
        out.push(Record::new("cause-approx-plan", approx.error_bound, Provenance::Formula).d(d).n(approx.n).k(k));
    }
    Ok(out)
}

fn sweep(d: usize, p_min: f64, p_max: f64, steps: usize, n: Option<usize>, brute_force: bool) -> Result<Vec<Record>> {
    if p_min > p_max {
        return Err(Error::InvalidInput(format!("p-min {p_min} exceeds p-max {p_max}")));
    }
    if brute_force && d > MAX_BRUTE_FORCE_D {
        return Err(Error::InvalidInput(format!("--brute-force needs d ≤ {MAX_BRUTE_FORCE_D}")));
    }
    let grid: Vec<f64> = if steps == 1 {
        vec![p_min]
    } else {
        (0..steps).map(|i| p_min + (p_max - p_min) * i as f64 / (steps - 1) as f64).collect()
    };
    let rows = grid
        .par_iter()
        .map(|&p| -> Result<Vec<Record>> {
            let r = noisy_rates(d, p)?;
            let mut row = vec![
                Record::new("chernoff-rate", r.chernoff_rate, Provenance::Formula).d(d).p(p),
                Record::new("heralded-rate", r.heralded_rate, Provenance::Formula).d(d).p(p),
            ];
            if brute_force {
                let (a, b) = noisy_intermediary_states(d, p)?;
                let numeric = chernoff_numeric(&a, &b, 41)?;
                row.push(Record::new("chernoff-rate", numeric, Provenance::BruteForce).d(d).p(p));
            }
            if let Some(n) = n {
                let e = heralded_error_default(d, p, n)?;
                row.push(Record::new("heralded-error", e, Provenance::Formula).d(d).n(n).p(p));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.into_iter().flatten().collect())
}

fn emit(records: &[Record], common: &Common) -> std::result::Result<(), Failure> {
    let text = render(records, common.format);
    match &common.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure {
            code: 1,
            message: format!("cannot write {}: {e}", path.display()),
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| Failure {
                code: 1,
                message: format!("cannot write output: {e}"),
            })
        }
    }
}

fn configure_threads() -> std::result::Result<(), Failure> {
    let Ok(raw) = std::env::var("CAUSAL_LAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| usage(format!("CAUSAL_LAB_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure {
            code: 1,
            message: format!("cannot start worker pool: {e}"),
        })
}

fn run(cli: Cli) -> std::result::Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Rates { d, p, common } => emit(&rates(d, &p)?, &common),
        Command::Table {
            scenario,
            d,
            n_max,
            k,
            trials,
            common,
        } => emit(&table(scenario, d, n_max as usize, k, trials, common.seed)?, &common),
        Command::Plan {
            scenario,
            d,
            eps,
            k,
            slack,
            common,
        } => emit(&plan(scenario, d, eps, k, slack)?, &common),
        Command::Sweep {
            d,
            p_min,
            p_max,
            steps,
            n,
            brute_force,
            common,
        } => emit(
            &sweep(d, p_min, p_max, steps as usize, n.map(|n| n as usize), brute_force)?,
            &common,
        ),
        Command::Verify {
            suite,
            d,
            n,
            p,
            trials,
            common,
        } => {
            let params = SuiteParams {
                d,
                n: n.map(|n| n as usize),
                p,
                trials,
                seed: common.seed,
            };
            let checks = run_suite(suite, &params)?;
            let failed = checks.iter().filter(|c| !c.passed).count();
            for c in &checks {
                let verdict = if c.passed { "PASS" } else { "FAIL" };
                eprintln!("{verdict} {}: {}", c.record.scenario, c.detail);
            }
            eprintln!("{suite}: {} passed, {failed} failed", checks.len() - failed);
            let records: Vec<Record> = checks.into_iter().map(|c| c.record).collect();
            emit(&records, &common)?;
            if failed > 0 {
                Err(Failure {
                    code: 1,
                    message: format!("suite {suite} failed"),
                })
            } else {
                Ok(())
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("causal-lab: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
