//! Command-line front end: compute coaction derivations, certify
//! unramifiedness, evaluate (regularized) Euler sums, mine integer
//! relations, and batch-verify identity catalogs.
//!
//! Exit codes: 0 success, 1 verification failure, 2 parse error,
//! 3 domain error, 4 precision error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use mes_core::motivic::{
    certify_unramified, coaction_cuts, derivation, CertOutcome, FamilyName, KnowledgeBase,
};
use mes_core::numerics::{eval_regularized, EvalError, RegKind};
use mes_core::relations::{
    find_relation, mzv_basis, verify_identity, Identity, RelationOutcome, RelationProblem,
};
use mes_core::words::{format_composition, parse_composition, rho, SignedComposition};

#[derive(Parser)]
#[command(name = "mes", about = "Motivic Euler sum toolkit", version)]
struct Cli {
    /// Working precision in decimal digits (also via MES_DIGITS).
    #[arg(long, global = true)]
    digits: Option<u32>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Recursion depth limit for certification.
    #[arg(long, global = true, default_value_t = 48)]
    depth_limit: u32,
    /// Enable rewrite rules that depend on unproven identities.
    #[arg(long, global = true)]
    conjectural: bool,
    /// Worker threads for batch evaluation.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print the simplified coaction derivation of a composition.
    Dr(DrArgs),
    /// Certify compositions or whole families as unramified.
    Certify(CertifyArgs),
    /// Evaluate a (regularized) Euler sum to high precision.
    Eval(EvalArgs),
    /// Search for an integer relation between values with LLL.
    Relate(RelateArgs),
    /// Verify an identity catalog numerically.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct DrArgs {
    /// Composition in the bar grammar, e.g. "b2,3" or "a1;(b2,3)^2".
    #[arg(long)]
    comp: String,
    /// Extra leading zeros, added to any `aN;` prefix in the grammar.
    #[arg(long, default_value_t = 0)]
    a: u32,
    /// Cut length (odd, smaller than the weight).
    #[arg(long)]
    r: u32,
    /// Also list the raw cuts before cancellation.
    #[arg(long)]
    raw: bool,
}

#[derive(Args)]
struct CertifyArgs {
    /// Family name: bar23, bar23-bar2, 3bar2, 3bar2-3, bar21, bar21-bar2,
    /// 1bar2, 1bar2-1, or singles(m,d).
    #[arg(long, conflicts_with = "comp")]
    family: Option<String>,
    /// Repetition range for the family, e.g. "1..3" or "2".
    #[arg(long, default_value = "1..3", conflicts_with = "comp")]
    ell: String,
    /// Leading-zero range, e.g. "0..2" or "0".
    #[arg(long, default_value = "0..0")]
    a: String,
    /// A single composition to certify.
    #[arg(long)]
    comp: Option<String>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    comp: String,
    #[arg(long, default_value_t = 0)]
    a: u32,
    /// Regularization for divergent compositions.
    #[arg(long, value_enum, default_value_t = Reg::None)]
    reg: Reg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Reg {
    None,
    Shuffle,
    Stuffle,
}

impl From<Reg> for RegKind {
    fn from(r: Reg) -> RegKind {
        match r {
            Reg::None => RegKind::None,
            Reg::Shuffle => RegKind::Shuffle,
            Reg::Stuffle => RegKind::Stuffle,
        }
    }
}

#[derive(Args)]
struct RelateArgs {
    /// Target compositions (repeatable).
    #[arg(long, required = true)]
    target: Vec<String>,
    /// Include the spanning set of this weight (2..=12).
    #[arg(long)]
    basis: Option<u32>,
    /// Coefficient bound.
    #[arg(long, default_value = "10000000000")]
    bound: String,
}

#[derive(Args)]
struct VerifyArgs {
    /// Path to the identity catalog JSON.
    catalog: PathBuf,
}

fn default_digits(cli: &Cli) -> u32 {
    cli.digits
        .or_else(|| {
            std::env::var("MES_DIGITS")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(60)
}

const EXIT_VERIFY: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_DOMAIN: u8 = 3;
const EXIT_PRECISION: u8 = 4;

fn fail(code: u8, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(code)
}

fn parse_comp_arg(text: &str, extra_zeros: u32) -> Result<SignedComposition, ExitCode> {
    match parse_composition(text) {
        Ok(mut c) => {
            c.leading_zeros += extra_zeros;
            Ok(c)
        }
        Err(e) => Err(fail(EXIT_PARSE, e)),
    }
}

/// "lo..hi" (inclusive) or a single number.
fn parse_range(text: &str) -> Result<(u32, u32), ExitCode> {
    let parse_u32 = |s: &str| {
        s.trim()
            .parse::<u32>()
            .map_err(|_| fail(EXIT_PARSE, format!("bad range component {s:?}")))
    };
    if let Some((lo, hi)) = text.split_once("..") {
        Ok((parse_u32(lo)?, parse_u32(hi)?))
    } else {
        let v = parse_u32(text)?;
        Ok((v, v))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let digits = default_digits(&cli);
    if digits < 20 {
        return fail(EXIT_DOMAIN, "precision must be at least 20 digits");
    }
    if cli.depth_limit < 1 {
        return fail(EXIT_DOMAIN, "depth limit must be at least 1");
    }
    match &cli.command {
        Command::Dr(args) => run_dr(&cli, args),
        Command::Certify(args) => run_certify(&cli, args),
        Command::Eval(args) => run_eval(&cli, args, digits),
        Command::Relate(args) => run_relate(&cli, args, digits),
        Command::Verify(args) => run_verify(&cli, args, digits),
    }
}

fn run_dr(cli: &Cli, args: &DrArgs) -> ExitCode {
    let comp = match parse_comp_arg(&args.comp, args.a) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let sum = match derivation(&comp, args.r) {
        Ok(sum) => sum,
        Err(e) => return fail(EXIT_DOMAIN, e),
    };
    let raw = if args.raw {
        match coaction_cuts(&rho(&comp), args.r) {
            Ok(cuts) => Some(cuts),
            Err(e) => return fail(EXIT_DOMAIN, e),
        }
    } else {
        None
    };
    match cli.format {
        Format::Json => {
            let mut v = sum.to_json();
            if let Some(cuts) = raw {
                v["raw"] = serde_json::Value::Array(
                    cuts.iter()
                        .map(|c| {
                            serde_json::json!({
                                "position": c.position,
                                "left": c.left.to_string(),
                                "right": c.right.to_string(),
                            })
                        })
                        .collect(),
                );
            }
            println!("{}", serde_json::to_string_pretty(&v).unwrap());
        }
        Format::Text => {
            println!(
                "D_{}[zeta({})] =",
                args.r,
                format_composition(&comp)
            );
            for line in sum.render_text().lines() {
                println!("  {line}");
            }
            if let Some(cuts) = raw {
                println!("raw cuts ({}):", cuts.len());
                for c in cuts {
                    println!("  p={}: {} (x) {}", c.position, c.left, c.right);
                }
            }
        }
    }
    ExitCode::SUCCESS
}

fn run_certify(cli: &Cli, args: &CertifyArgs) -> ExitCode {
    let kb = KnowledgeBase::new().with_conjectural(cli.conjectural);
    let mut instances: Vec<(String, SignedComposition)> = Vec::new();
    if let Some(comp_text) = &args.comp {
        let (a_lo, a_hi) = match parse_range(&args.a) {
            Ok(r) => r,
            Err(code) => return code,
        };
        let comp = match parse_comp_arg(comp_text, 0) {
            Ok(c) => c,
            Err(code) => return code,
        };
        for a in a_lo..=a_hi {
            let mut c = comp.clone();
            c.leading_zeros += a;
            instances.push((format_composition(&c), c));
        }
    } else if let Some(name) = &args.family {
        let family_name = match FamilyName::from_str(name) {
            Ok(f) => f,
            Err(e) => return fail(EXIT_PARSE, e),
        };
        let (ell_lo, ell_hi) = match parse_range(&args.ell) {
            Ok(r) => r,
            Err(code) => return code,
        };
        let (a_lo, a_hi) = match parse_range(&args.a) {
            Ok(r) => r,
            Err(code) => return code,
        };
        // The singles family carries its own repetition count.
        let (ell_lo, ell_hi) = if matches!(family_name, FamilyName::Singles { .. }) {
            (0, 0)
        } else {
            (ell_lo, ell_hi)
        };
        for ell in ell_lo..=ell_hi {
            for a in a_lo..=a_hi {
                let c = mes_core::motivic::family(family_name, ell, a);
                let label = if matches!(family_name, FamilyName::Singles { .. }) {
                    format!("{family_name} a={a}")
                } else {
                    format!("{family_name} ell={ell} a={a}")
                };
                instances.push((label, c));
            }
        }
    } else {
        return fail(EXIT_PARSE, "certify needs --family or --comp");
    }
    let mut rows = Vec::new();
    let mut all_verified = true;
    for (label, comp) in &instances {
        let outcome = certify_unramified(comp, &kb, cli.depth_limit);
        let row = match &outcome {
            CertOutcome::Verified(cert) => {
                serde_json::json!({
                    "instance": label,
                    "comp": format_composition(comp),
                    "status": "verified",
                    "certificate_nodes": cert.node_count(),
                    // All odd derivations vanish: the value is a rational
                    // multiple of the single zeta value of its weight.
                    "rational_zeta_multiple": cert.rational_zeta_multiple(),
                })
            }
            CertOutcome::Unknown(reason) => {
                all_verified = false;
                serde_json::json!({
                    "instance": label,
                    "comp": format_composition(comp),
                    "status": "unknown",
                    "reason": reason,
                })
            }
        };
        rows.push(row);
    }
    match cli.format {
        Format::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::json!({
                    "instances": rows,
                    "all_verified": all_verified,
                }))
                .unwrap()
            );
        }
        Format::Text => {
            for row in &rows {
                let status = row["status"].as_str().unwrap();
                if status == "verified" {
                    println!(
                        "{:<28} Verified ({} certificate nodes{})",
                        row["instance"].as_str().unwrap(),
                        row["certificate_nodes"],
                        if row["rational_zeta_multiple"].as_bool() == Some(true) {
                            "; rational multiple of the single zeta value"
                        } else {
                            ""
                        }
                    );
                } else {
                    println!(
                        "{:<28} Unknown: {}",
                        row["instance"].as_str().unwrap(),
                        row["reason"].as_str().unwrap()
                    );
                }
            }
        }
    }
    if all_verified {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY)
    }
}

fn run_eval(cli: &Cli, args: &EvalArgs, digits: u32) -> ExitCode {
    let comp = match parse_comp_arg(&args.comp, args.a) {
        Ok(c) => c,
        Err(code) => return code,
    };
    match eval_regularized(&comp, args.reg.into(), digits) {
        Ok(value) => {
            match cli.format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&serde_json::json!({
                        "comp": format_composition(&comp),
                        "reg": match args.reg {
                            Reg::None => "none",
                            Reg::Shuffle => "shuffle",
                            Reg::Stuffle => "stuffle",
                        },
                        "digits": digits,
                        "value": value.to_decimal(digits),
                    }))
                    .unwrap()
                ),
                Format::Text => println!("{}", value.to_decimal(digits)),
            }
            ExitCode::SUCCESS
        }
        Err(e @ EvalError::DivergentWord) => fail(EXIT_DOMAIN, e),
        Err(e) => fail(EXIT_DOMAIN, e),
    }
}

fn run_relate(cli: &Cli, args: &RelateArgs, digits: u32) -> ExitCode {
    let Ok(bound) = args.bound.parse::<BigInt>() else {
        return fail(EXIT_PARSE, "bad bound");
    };
    let mut comps: Vec<(String, SignedComposition)> = Vec::new();
    for t in &args.target {
        match parse_comp_arg(t, 0) {
            Ok(c) => comps.push((format_composition(&c), c)),
            Err(code) => return code,
        }
    }
    if let Some(weight) = args.basis {
        match mzv_basis(weight) {
            Ok(basis) => {
                for c in basis {
                    comps.push((format_composition(&c), c));
                }
            }
            Err(e) => return fail(EXIT_DOMAIN, e),
        }
    }
    let threads = cli
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    let values: Vec<_> = parallel_map(&comps, threads, |(_, c)| {
        eval_regularized(c, RegKind::None, digits)
    });
    let mut labels = Vec::new();
    let mut nums = Vec::new();
    for ((label, _), value) in comps.iter().zip(values) {
        match value {
            Ok(v) => {
                labels.push(label.clone());
                nums.push(v);
            }
            Err(e) => return fail(EXIT_DOMAIN, format!("{label}: {e}")),
        }
    }
    let problem = RelationProblem {
        labels: labels.clone(),
        values: nums,
        digits,
        bound,
    };
    let outcome = match find_relation(&problem) {
        Ok(o) => o,
        Err(mes_core::relations::RelationError::PrecisionTooLow { needed }) => {
            return fail(
                EXIT_PRECISION,
                format!("precision too low; pass --digits {needed} or more"),
            )
        }
        Err(e) => return fail(EXIT_DOMAIN, e),
    };
    let (found, cand) = match &outcome {
        RelationOutcome::Found(c) => (true, c),
        RelationOutcome::NoneFound { best } => (false, best),
    };
    match cli.format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::json!({
                "found": found,
                "labels": labels,
                "coefficients": cand.coefficients.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "residual": cand.residual.to_decimal(digits.min(40)),
                "confidence_digits": cand.confidence_digits,
            }))
            .unwrap()
        ),
        Format::Text => {
            if found {
                println!("relation found:");
                for (label, c) in labels.iter().zip(&cand.coefficients) {
                    if !num_traits::Zero::is_zero(c) {
                        println!("  {c:>12} * {label}");
                    }
                }
                println!("  residual ~ {}", cand.residual.to_decimal(digits.min(40)));
            } else {
                println!("no relation found (bound {})", problem.bound);
                println!(
                    "  best vector {:?} with residual {}",
                    cand.coefficients,
                    cand.residual.to_decimal(digits.min(40))
                );
            }
        }
    }
    ExitCode::SUCCESS
}

fn run_verify(cli: &Cli, args: &VerifyArgs, digits: u32) -> ExitCode {
    let text = match std::fs::read_to_string(&args.catalog) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_PARSE, format!("{}: {e}", args.catalog.display())),
    };
    let catalog: Vec<Identity> = match serde_json::from_str(&text) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_PARSE, e),
    };
    let threads = cli
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    let reports = parallel_map(&catalog, threads, |id| verify_identity(id, digits));
    let mut rows = Vec::new();
    let mut proven_failures = 0usize;
    for (id, report) in catalog.iter().zip(reports) {
        match report {
            Ok(rep) => {
                if !rep.pass && matches!(id.status, mes_core::relations::IdentityStatus::Proven) {
                    proven_failures += 1;
                }
                rows.push(serde_json::json!({
                    "name": rep.name,
                    "status": match id.status {
                        mes_core::relations::IdentityStatus::Proven => "proven",
                        mes_core::relations::IdentityStatus::Conjectural => "conjectural",
                    },
                    "abs_error": rep.abs_error.to_decimal(digits.min(60)),
                    "pass": rep.pass,
                }));
            }
            Err(e) => return fail(EXIT_PARSE, format!("{}: {e}", id.name)),
        }
    }
    match cli.format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::json!({
                "digits": digits,
                "rows": rows,
                "proven_failures": proven_failures,
            }))
            .unwrap()
        ),
        Format::Text => {
            for row in &rows {
                println!(
                    "{:<24} {:<12} {:<6} abs_error={}",
                    row["name"].as_str().unwrap(),
                    row["status"].as_str().unwrap(),
                    if row["pass"].as_bool().unwrap() {
                        "pass"
                    } else {
                        "FAIL"
                    },
                    row["abs_error"].as_str().unwrap(),
                );
            }
        }
    }
    if proven_failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY)
    }
}

/// Runs `f` over `items` on up to `threads` workers, preserving order.
fn parallel_map<T: Sync, R: Send>(
    items: &[T],
    threads: usize,
    f: impl Fn(&T) -> R + Sync,
) -> Vec<R> {
    let threads = threads.max(1).min(items.len().max(1));
    if threads <= 1 || items.len() <= 1 {
        return items.iter().map(f).collect();
    }
    let mut results: Vec<Option<R>> = (0..items.len()).map(|_| None).collect();
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots: Vec<std::sync::Mutex<&mut Option<R>>> =
        results.iter_mut().map(std::sync::Mutex::new).collect();
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let value = f(&items[i]);
                **slots[i].lock().unwrap() = Some(value);
            });
        }
    });
    results.into_iter().map(|r| r.unwrap()).collect()
}
