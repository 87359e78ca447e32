//! `shorsim`: run order finding, factoring and discrete logarithms on the
//! simulator, print exact distributions, and check probability bounds.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use shorsim_core::bounds::{all_pass, dlog_bounds, factoring_bounds, order_bounds, BoundCheck};
use shorsim_core::dlog::{find_dlog_report, DlogPolicy};
use shorsim_core::numtheory::{classify_n, NClass};
use shorsim_core::shor::{analytic_c_distribution, choose_q, factor_report, find_order_report, Backend, OrderPolicy};
use shorsim_core::{seeded_rng, Error};

const EXIT_FAILURE: u8 = 1;
const EXIT_PRECONDITION: u8 = 2;
const EXIT_BUDGET: u8 = 3;

/// Largest q accepted by `dist`.
const MAX_DIST_Q: u64 = 1 << 20;

#[derive(Parser, Debug)]
#[command(name = "shorsim", version, about = "Simulate order finding, factoring and discrete logarithms")]
struct Cli {
    /// Seed for every random draw. Generated and printed when omitted.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Require an explicit seed.
    #[arg(long, global = true, env = "SHORSIM_TEST_MODE", value_parser = clap::builder::FalseyValueParser::new())]
    test_mode: bool,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Output file. Defaults to a generated name in --out-dir, or stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, env = "SHORSIM_OUT_DIR")]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Find a nontrivial divisor of an odd composite.
    Factor {
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Find the order of x modulo n.
    Order {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        x: u64,
        #[command(flatten)]
        run: RunArgs,
        /// Approximate-QFT cutoff (gate-level backend only).
        #[arg(long)]
        qft_cutoff: Option<usize>,
    },
    /// Find r with g^r = target (mod p).
    Dlog {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        g: u64,
        #[arg(long)]
        target: u64,
        #[arg(long, value_enum, default_value_t = BackendArg::ClosedForm)]
        backend: BackendArg,
        /// Sample budget (default 480 t).
        #[arg(long)]
        trials: Option<usize>,
        /// Constraints collected before the first assembly.
        #[arg(long, default_value_t = 4)]
        t: usize,
    },
    /// Exact first-register distribution for an element of order r.
    Dist {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        r: u64,
    },
    /// Compare probability lower bounds with exact values.
    ///
    /// Give --q and --r, or --n and --x (optionally --q), or --p, --g and --target.
    VerifyBounds {
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        r: Option<u64>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        x: Option<u64>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        g: Option<u64>,
        #[arg(long)]
        target: Option<u64>,
    },
}

#[derive(clap::Args, Debug, Clone)]
struct RunArgs {
    /// First-register size; must be a power of two.
    #[arg(long)]
    q: Option<u64>,
    #[arg(long, value_enum, default_value_t = BackendArg::ClosedForm)]
    backend: BackendArg,
    /// Quantum sample budget.
    #[arg(long, default_value_t = 20)]
    trials: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum BackendArg {
    GateLevel,
    ClosedForm,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::GateLevel => Backend::GateLevel,
            BackendArg::ClosedForm => Backend::ClosedForm,
        }
    }
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn precondition(message: impl Into<String>) -> Self {
        Self { code: EXIT_PRECONDITION, kind: "precondition", message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::BudgetExhausted { .. } => (EXIT_BUDGET, "budget_exhausted"),
            e if e.is_precondition() => (EXIT_PRECONDITION, "precondition"),
            _ => (EXIT_FAILURE, "internal"),
        };
        Self { code, kind, message: e.to_string() }
    }
}

/// Rendered output plus the exit code it implies.
struct Output {
    body: String,
    default_name: String,
    code: u8,
}

/// Decimal with 12 significant digits.
fn sig12(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return "0".to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    let decimals = (11 - exp).max(0) as usize;
    format!("{v:.decimals$}")
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Failure { code: EXIT_FAILURE, kind: "internal", message: e.to_string() })?;
    s.push('\n');
    Ok(s)
}

fn json_only(format: Format) -> Result<(), Failure> {
    if format == Format::Csv {
        return Err(Failure::precondition("CSV output is only available for dist and verify-bounds"));
    }
    Ok(())
}

fn resolve_seed(cli: &Cli) -> Result<u64, Failure> {
    match (cli.seed, cli.test_mode) {
        (Some(s), _) => Ok(s),
        (None, true) => Err(Failure::precondition("test mode requires --seed")),
        (None, false) => {
            let s: u64 = rand::random();
            eprintln!("seed: {s}");
            Ok(s)
        }
    }
}

fn warn_small_q(n: u64, q: Option<u64>) {
    if let Some(q) = q {
        if (q as u128) < (n as u128) * (n as u128) {
            eprintln!("warning: q = {q} is below n^2 = {}; the fraction nearest c/q may not be unique", n as u128 * n as u128);
        }
    }
}

fn order_policy(run: &RunArgs, qft_cutoff: Option<usize>) -> OrderPolicy {
    OrderPolicy { max_trials: run.trials, backend: run.backend.into(), q: run.q, qft_cutoff, ..Default::default() }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Dist { q, r } => {
            if !q.is_power_of_two() || *q < 2 || *q > MAX_DIST_Q {
                return Err(Failure::precondition(format!("q = {q} must be a power of two in [2, 2^20]")));
            }
            if *r == 0 || r >= q {
                return Err(Failure::precondition(format!("r = {r} must satisfy 1 <= r < q")));
            }
            let dist = analytic_c_distribution(*q, *r)?;
            let format = cli.format.unwrap_or(Format::Csv);
            let body = match format {
                Format::Csv => {
                    let mut s = String::with_capacity(*q as usize * 20);
                    s.push_str("c,probability\n");
                    for (c, p) in dist.marginal.iter().enumerate() {
                        let _ = writeln!(s, "{c},{}", sig12(*p));
                    }
                    s
                }
                Format::Json => to_json(&json!({ "command": "dist", "config": { "q": q, "r": r }, "result": dist }))?,
            };
            Ok(Output { body, default_name: format!("dist_q{q}_r{r}.{}", ext(format)), code: 0 })
        }

        Command::Factor { n, run } => {
            json_only(cli.format.unwrap_or(Format::Json))?;
            match classify_n(*n)? {
                NClass::CompositeOk => {}
                other => {
                    return Err(Failure::precondition(format!(
                        "n = {n} is {}; only odd composites with two distinct prime factors are handled",
                        describe_class(other)
                    )))
                }
            }
            warn_small_q(*n, run.q);
            let seed = resolve_seed(cli)?;
            let policy = order_policy(run, None);
            let report = factor_report(*n, &policy, &mut seeded_rng(seed))?;
            let (status, code) = if report.divisor.is_some() { ("ok", 0) } else { ("budget_exhausted", EXIT_BUDGET) };
            let body = to_json(&json!({
                "command": "factor",
                "status": status,
                "seed": seed,
                "config": { "n": n, "policy": policy },
                "result": report,
            }))?;
            Ok(Output { body, default_name: format!("factor_n{n}_seed{seed}.json"), code })
        }

        Command::Order { n, x, run, qft_cutoff } => {
            json_only(cli.format.unwrap_or(Format::Json))?;
            warn_small_q(*n, run.q);
            let seed = resolve_seed(cli)?;
            let policy = order_policy(run, *qft_cutoff);
            let report = find_order_report(*n, *x, &policy, &mut seeded_rng(seed))?;
            let (status, code) = if report.order.is_some() { ("ok", 0) } else { ("budget_exhausted", EXIT_BUDGET) };
            let body = to_json(&json!({
                "command": "order",
                "status": status,
                "seed": seed,
                "config": { "n": n, "x": x, "policy": policy },
                "result": report,
            }))?;
            Ok(Output { body, default_name: format!("order_n{n}_x{x}_seed{seed}.json"), code })
        }

        Command::Dlog { p, g, target, backend, trials, t } => {
            json_only(cli.format.unwrap_or(Format::Json))?;
            let seed = resolve_seed(cli)?;
            let policy = DlogPolicy { t: *t, max_trials: *trials, backend: (*backend).into(), ..Default::default() };
            let report = find_dlog_report(*p, *g, *target, &policy, &mut seeded_rng(seed))?;
            let (status, code) = if report.r.is_some() { ("ok", 0) } else { ("budget_exhausted", EXIT_BUDGET) };
            let body = to_json(&json!({
                "command": "dlog",
                "status": status,
                "seed": seed,
                "config": { "p": p, "g": g, "target": target, "policy": policy },
                "result": report,
            }))?;
            Ok(Output { body, default_name: format!("dlog_p{p}_g{g}_x{target}_seed{seed}.json"), code })
        }

        Command::VerifyBounds { q, r, n, x, p, g, target } => {
            let (label, checks) = match (q, r, n, x, p, g, target) {
                (Some(q), Some(r), None, None, None, None, None) => {
                    if *r == 0 || r >= q {
                        return Err(Failure::precondition("r must satisfy 1 <= r < q"));
                    }
                    if *q > MAX_DIST_Q {
                        return Err(Failure::precondition("instance too large for exact evaluation"));
                    }
                    (format!("q{q}_r{r}"), order_bounds(*q, *r)?)
                }
                (q, None, Some(n), Some(x), None, None, None) => {
                    let q = match q {
                        Some(q) => *q,
                        None => choose_q(*n)?,
                    };
                    if !q.is_power_of_two() || q > MAX_DIST_Q {
                        return Err(Failure::precondition("q must be a power of two no larger than 2^20"));
                    }
                    (format!("n{n}_x{x}_q{q}"), factoring_bounds(*n, *x, q)?)
                }
                (None, None, None, None, Some(p), Some(g), Some(t)) => {
                    if *p > 200 {
                        return Err(Failure::precondition("instance too large for exact evaluation (p <= 200)"));
                    }
                    (format!("p{p}_g{g}_x{t}"), dlog_bounds(*p, *g, *t)?)
                }
                _ => {
                    return Err(Failure::precondition(
                        "give --q and --r, or --n and --x (with optional --q), or --p, --g and --target",
                    ))
                }
            };
            let code = if all_pass(&checks) { 0 } else { EXIT_FAILURE };
            let format = cli.format.unwrap_or(Format::Json);
            let body = match format {
                Format::Csv => bounds_csv(&checks),
                Format::Json => to_json(&json!({
                    "command": "verify-bounds",
                    "status": if code == 0 { "pass" } else { "fail" },
                    "instance": label,
                    "checks": checks,
                }))?,
            };
            Ok(Output { body, default_name: format!("bounds_{label}.{}", ext(format)), code })
        }
    }
}

fn bounds_csv(checks: &[BoundCheck]) -> String {
    let mut s = String::from("name,observed,bound,pass\n");
    for c in checks {
        let _ = writeln!(s, "{},{},{},{}", c.name, sig12(c.observed), sig12(c.bound), c.pass);
    }
    s
}

fn describe_class(c: NClass) -> String {
    match c {
        NClass::Even => "even".into(),
        NClass::Prime => "prime".into(),
        NClass::PrimePower { p, k } => format!("the prime power {p}^{k}"),
        NClass::CompositeOk => "an odd composite".into(),
    }
}

fn ext(f: Format) -> &'static str {
    match f {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

fn emit(cli: &Cli, out: &Output) -> std::io::Result<()> {
    let path = match (&cli.out, &cli.out_dir) {
        (Some(p), _) => Some(p.clone()),
        (None, Some(dir)) => {
            std::fs::create_dir_all(dir)?;
            Some(dir.join(&out.default_name))
        }
        (None, None) => None,
    };
    match path {
        Some(p) => {
            std::fs::write(&p, &out.body)?;
            eprintln!("wrote {}", p.display());
        }
        None => std::io::stdout().write_all(out.body.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if let Err(e) = emit(&cli, &out) {
                eprintln!("{}", json!({ "status": "error", "kind": "io", "message": e.to_string() }));
                return ExitCode::from(EXIT_FAILURE);
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("{}", json!({ "status": "error", "kind": f.kind, "message": f.message }));
            ExitCode::from(f.code)
        }
    }
}
