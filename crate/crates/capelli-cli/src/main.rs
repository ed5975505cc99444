//! `capelli` — exact verification of Capelli-type determinant identities.
//!
//! Exit codes: 0 when a verification (or pin) succeeds, 1 when it runs but
//! the statement fails to hold, 2 for usage errors of any kind.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use capelli_core::identities::{
    self, load_ledger, pin_convention, save_ledger, upsert_convention, Identity, PinError,
    VerificationReport,
};
use capelli_core::{fiber, CapelliConfig};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "capelli",
    version,
    about = "Verify Capelli-type determinant identities by exact normal-form computation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify an identity at a given size and report the residual.
    Verify(VerifyArgs),
    /// Print the configurations of a class C^m as JSON, one per line.
    ConfigsEnumerate(EnumerateArgs),
    /// Run a configuration through the straightening steps, printing each.
    ConfigsTrace(TraceArgs),
    /// Print the preimages of a configuration under one straightening step.
    Fiber(FiberArgs),
    /// Search the offset conventions for an identity and record the unique
    /// surviving one in the ledger.
    Pin(PinArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// One of: capelli, theorem1, cauchy-binet, turnbull, turnbull-lemma,
    /// cayley, dual-capelli.
    identity: String,
    /// Matrix size (grid column count). Sizes 1-3 run immediately; 4 needs
    /// --allow-slow.
    #[arg(long)]
    n: usize,
    /// Minor size for cauchy-binet (required there, rejected elsewhere).
    #[arg(long)]
    m: Option<usize>,
    /// Power of det(X) for cayley (required there, rejected elsewhere).
    #[arg(long)]
    s: Option<u32>,
    /// Emit the report as a single JSON line instead of text.
    #[arg(long)]
    json: bool,
    /// Permit n = 4, which can take minutes for some identities.
    #[arg(long)]
    allow_slow: bool,
    /// Add a constant to every diagonal offset (capelli only; a nonzero
    /// value must make the verification fail).
    #[arg(long, hide = true)]
    perturb_offset: Option<i64>,
}

#[derive(Args)]
struct EnumerateArgs {
    /// Configuration size.
    #[arg(long)]
    n: usize,
    /// Class cut point m, from 1 (all configurations) to n+1 (the final
    /// class). Defaults to 1.
    #[arg(long)]
    class: Option<usize>,
}

#[derive(Args)]
struct TraceArgs {
    /// Configuration size; must match the file.
    #[arg(long)]
    n: usize,
    /// Path to a configuration JSON file {"n":..,"sigma":[..],"phi":{..}}.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct FiberArgs {
    /// Configuration size; must match the file.
    #[arg(long)]
    n: usize,
    /// Cut point of the straightening step, 1 <= m <= n. The configuration
    /// must lie in C^(m+1).
    #[arg(long)]
    m: usize,
    /// Path to the target configuration JSON file.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct PinArgs {
    /// One of: cauchy-binet, turnbull, dual-capelli.
    identity: String,
    /// Size at which to run the search.
    #[arg(long)]
    n: usize,
    /// Ledger file to update (default: $CAPELLI_LEDGER or conventions.json).
    #[arg(long)]
    ledger: Option<PathBuf>,
}

/// A usage mistake: reported on stderr, exit code 2.
struct UsageError(String);

macro_rules! usage_from {
    ($($ty:ty),*) => {$(
        impl From<$ty> for UsageError {
            fn from(e: $ty) -> Self {
                UsageError(e.to_string())
            }
        }
    )*};
}

usage_from!(
    serde_json::Error,
    capelli_core::identities::VerifyError,
    capelli_core::identities::PinError,
    capelli_core::identities::LedgerError
);

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Verify(args) => run_verify(args),
        Command::ConfigsEnumerate(args) => run_enumerate(args),
        Command::ConfigsTrace(args) => run_trace(args),
        Command::Fiber(args) => run_fiber(args),
        Command::Pin(args) => run_pin(args),
    };
    match outcome {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn parse_identity(name: &str) -> Result<Identity, UsageError> {
    name.parse::<Identity>().map_err(|e| {
        UsageError(format!(
            "{e}; expected one of capelli, theorem1, cauchy-binet, turnbull, turnbull-lemma, \
             cayley, dual-capelli"
        ))
    })
}

fn check_verify_size(n: usize, allow_slow: bool) -> Result<(), UsageError> {
    match n {
        1..=3 => Ok(()),
        4 if allow_slow => Ok(()),
        4 => Err(UsageError(
            "n = 4 can take minutes of exact computation; pass --allow-slow to proceed".into(),
        )),
        _ => Err(UsageError(format!(
            "n = {n} is outside the exact-verification budget (supported: 1 <= n <= 4)"
        ))),
    }
}

fn run_verify(args: VerifyArgs) -> Result<ExitCode, UsageError> {
    let identity = parse_identity(&args.identity)?;
    check_verify_size(args.n, args.allow_slow)?;
    if args.m.is_some() && identity != Identity::CauchyBinet {
        return Err(UsageError(format!("--m does not apply to {identity}")));
    }
    if args.s.is_some() && identity != Identity::Cayley {
        return Err(UsageError(format!("--s does not apply to {identity}")));
    }
    if args.perturb_offset.is_some() && identity != Identity::Capelli {
        return Err(UsageError(format!("--perturb-offset does not apply to {identity}")));
    }
    let report = match identity {
        Identity::Capelli => match args.perturb_offset {
            Some(shift) => identities::verify_capelli_with_offset_shift(args.n, shift),
            None => identities::verify_capelli(args.n),
        },
        Identity::Theorem1 => identities::verify_theorem1(args.n),
        Identity::CauchyBinet => {
            let m = args
                .m
                .ok_or_else(|| UsageError("cauchy-binet needs a minor size --m".into()))?;
            identities::verify_cauchy_binet(args.n, m)
        }
        Identity::Turnbull => identities::verify_turnbull(args.n),
        Identity::TurnbullLemma => identities::verify_turnbull_lemma(args.n),
        Identity::Cayley => {
            let s = args.s.ok_or_else(|| UsageError("cayley needs a power --s".into()))?;
            identities::verify_cayley(args.n, s)
        }
        Identity::DualCapelli => identities::verify_dual_capelli(args.n),
    }?;
    print_report(&report, args.json)?;
    Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn print_report(report: &VerificationReport, json: bool) -> Result<(), UsageError> {
    if json {
        println!("{}", serde_json::to_string(report)?);
        return Ok(());
    }
    let mut size = format!("n={}", report.n);
    if let Some(m) = report.m {
        size.push_str(&format!(" m={m}"));
    }
    if let Some(s) = report.s {
        size.push_str(&format!(" s={s}"));
    }
    let verdict = if report.passed { "PASS" } else { "FAIL" };
    let convention = match &report.pinned_convention {
        Some(c) => format!(" [{c}]"),
        None => String::new(),
    };
    println!(
        "{} {size}: {verdict} ({} residual terms, {} ms){convention}",
        report.identity, report.residual_terms, report.elapsed_ms
    );
    Ok(())
}

fn run_enumerate(args: EnumerateArgs) -> Result<ExitCode, UsageError> {
    if args.n < 1 || args.n > 6 {
        return Err(UsageError(format!(
            "enumeration grows factorially; supported sizes are 1 <= n <= 6 (got {})",
            args.n
        )));
    }
    let m = args.class.unwrap_or(1);
    if m < 1 || m > args.n + 1 {
        return Err(UsageError(format!(
            "--class must lie between 1 and n + 1 = {} (got {m})",
            args.n + 1
        )));
    }
    for config in capelli_core::enumerate_configs(args.n, m) {
        println!("{}", serde_json::to_string(&config)?);
    }
    Ok(ExitCode::SUCCESS)
}

fn load_config(path: &Path, expected_n: usize) -> Result<CapelliConfig, UsageError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
    let config: CapelliConfig = serde_json::from_str(&text)
        .map_err(|e| UsageError(format!("{} is not a valid configuration: {e}", path.display())))?;
    if config.n() != expected_n {
        return Err(UsageError(format!(
            "{} holds a configuration of size {}, but --n {} was given",
            path.display(),
            config.n(),
            expected_n
        )));
    }
    Ok(config)
}

fn run_trace(args: TraceArgs) -> Result<ExitCode, UsageError> {
    let mut config = load_config(&args.config, args.n)?;
    let n = config.n();
    println!("start      {}", config.diagram());
    for m in 1..=n {
        let next = config.lambda_step(m).expect("the trace stays inside C^m at every step");
        if next != config {
            config = next;
            println!("Lambda^{m}   {}", config.diagram());
        } else {
            println!("Lambda^{m}   unchanged");
        }
    }
    debug_assert!(config.is_in_class(n + 1));
    println!("final      {} (in C^{})", config.diagram(), n + 1);
    Ok(ExitCode::SUCCESS)
}

fn run_fiber(args: FiberArgs) -> Result<ExitCode, UsageError> {
    let config = load_config(&args.config, args.n)?;
    if args.m < 1 || args.m > args.n {
        return Err(UsageError(format!(
            "--m must lie between 1 and n = {} (got {})",
            args.n, args.m
        )));
    }
    let preimages = fiber(&config, args.m)
        .map_err(|e| UsageError(format!("{e}; fiber targets must lie one class up")))?;
    for c in preimages {
        println!("{}", serde_json::to_string(&c)?);
    }
    Ok(ExitCode::SUCCESS)
}

fn run_pin(args: PinArgs) -> Result<ExitCode, UsageError> {
    let identity = parse_identity(&args.identity)?;
    let convention = match pin_convention(identity, args.n) {
        Ok(c) => c,
        // a failed search is a result, not a usage mistake
        Err(e @ (PinError::NoSurvivor { .. } | PinError::Ambiguous { .. } | PinError::MirrorAsymmetry { .. })) => {
            eprintln!("{e}");
            return Ok(ExitCode::from(1));
        }
        Err(e) => return Err(e.into()),
    };
    let path = args.ledger.unwrap_or_else(identities::ledger_path);
    let mut entries = load_ledger(&path)?;
    upsert_convention(&mut entries, convention.clone());
    save_ledger(&path, &entries)?;
    println!("pinned {} at n = {}: {}", convention.identity, convention.pinned_n, convention.describe());
    println!("recorded in {}", path.display());
    Ok(ExitCode::SUCCESS)
}
