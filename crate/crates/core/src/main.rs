use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::Integer;
use serde_json::json;

use hookrec::asymptotics::{self, AsymptoticExpansion};
use hookrec::cache::SeriesCache;
use hookrec::constant::{self, ConstantEstimate, ConstantMatch, DEFAULT_PRECISION_BITS, DEFAULT_SEARCH_BOUND};
use hookrec::recurrence::{self, FitBounds, RecurrenceOperator, VerificationReport};
use hookrec::reproduce::{self, Perturbation, ReproductionOptions};
use hookrec::sequence::{self, SeriesKey, SequenceRecord};
use hookrec::Error;

const EXIT_FAILURE: u8 = 1;
const EXIT_NO_OPERATOR: u8 = 3;
const EXIT_VERIFICATION: u8 = 4;
const EXIT_UNSUPPORTED: u8 = 5;

#[derive(Parser, Debug)]
#[command(name = "hookrec", version, about = "Hook-restricted tableaux sums: terms, recurrences and asymptotics")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Cache directory (falls back to $HOOKREC_CACHE_DIR; no caching when neither is set).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print S(1..=n).
    Seq {
        #[command(flatten)]
        series: SeriesArgs,
        /// Last index n to print.
        #[arg(short = 'n', long = "terms")]
        n_max: u32,
    },
    /// Fit an annihilating operator and verify it on held-out terms.
    Fit {
        #[command(flatten)]
        series: SeriesArgs,
        #[command(flatten)]
        fit: FitArgs,
    },
    /// Asymptotic expansion with the estimated constant.
    Asy {
        #[command(flatten)]
        series: SeriesArgs,
        #[command(flatten)]
        fit: FitArgs,
        #[command(flatten)]
        asy: AsyArgs,
    },
    /// Extend the sequence with the fitted recurrence.
    Extend {
        #[command(flatten)]
        series: SeriesArgs,
        #[command(flatten)]
        fit: FitArgs,
        /// Last index to produce.
        #[arg(long)]
        to: u64,
    },
    /// Estimate and identify the constant factor.
    Const {
        #[command(flatten)]
        series: SeriesArgs,
        #[command(flatten)]
        fit: FitArgs,
        #[command(flatten)]
        asy: AsyArgs,
        /// Largest numerator and denominator tried.
        #[arg(long, default_value_t = DEFAULT_SEARCH_BOUND)]
        search_bound: u32,
    },
    /// Reproduce the four reference cases and print a pass/fail table.
    Paper {
        /// Held-out terms checked after fitting on 60.
        #[arg(long, default_value_t = 20)]
        holdout: usize,
        /// Expansion order used for the constant.
        #[arg(short = 'J', long = "order", default_value_t = asymptotics::DEFAULT_ORDER)]
        order: usize,
        #[arg(long, default_value_t = 300)]
        at_n: u64,
        /// Test mode: alter expected term N of case C (written C:N).
        #[arg(long, hide = true, value_parser = parse_perturbation)]
        perturb: Option<Perturbation>,
    },
}

#[derive(Args, Debug)]
struct SeriesArgs {
    #[arg(short = 'k', default_value_t = 2)]
    k: u32,
    #[arg(short = 'l', default_value_t = 1)]
    l: u32,
    /// Exponent applied to each tableau count.
    #[arg(short = 'z', default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    z: u32,
    /// Read terms A(0), A(1), ... from a file instead of computing S.
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FitArgs {
    /// Terms used for fitting.
    #[arg(short = 'n', long = "terms", default_value_t = 60)]
    terms: usize,
    /// Additional terms used only for verification.
    #[arg(long, default_value_t = 20)]
    holdout: usize,
    #[arg(long, default_value_t = 8)]
    max_order: usize,
    #[arg(long, default_value_t = 8)]
    max_degree: usize,
}

#[derive(Args, Debug)]
struct AsyArgs {
    /// Expansion order J.
    #[arg(short = 'J', long = "order", default_value_t = asymptotics::DEFAULT_ORDER)]
    order: usize,
    /// Index at which the constant is estimated.
    #[arg(long, default_value_t = 300)]
    at_n: u64,
}

fn parse_perturbation(s: &str) -> Result<Perturbation, String> {
    let (case, n) = s.split_once(':').ok_or("expected CASE:N")?;
    Ok(Perturbation {
        case: case.parse().map_err(|e| format!("case: {e}"))?,
        n: n.parse().map_err(|e| format!("n: {e}"))?,
    })
}

/// A failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::UnsupportedAsymptotics(_) | Error::DegeneratePivot { .. } => EXIT_UNSUPPORTED,
            _ => EXIT_FAILURE,
        };
        Failure { code, message: e.to_string() }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

struct Context {
    format: Format,
    cache: Option<SeriesCache>,
}

impl Context {
    fn emit(&self, text: impl FnOnce() -> String, value: impl FnOnce() -> serde_json::Value) {
        match self.format {
            Format::Text => println!("{}", text()),
            Format::Json => println!("{}", serde_json::to_string_pretty(&value()).expect("json value")),
        }
    }

    fn key(&self, args: &SeriesArgs) -> CliResult<Option<SeriesKey>> {
        if args.input.is_some() {
            return Ok(None);
        }
        Ok(Some(SeriesKey::new(args.k, args.l, args.z)?))
    }

    /// Terms `A(0..=n_max)` (fewer when read from a short file).
    fn series(&self, args: &SeriesArgs, n_max: u32) -> CliResult<SequenceRecord> {
        if let Some(path) = &args.input {
            let seq = read_terms(path)?;
            return Ok(seq.truncated(u64::from(n_max)));
        }
        let key = SeriesKey::new(args.k, args.l, args.z)?;
        Ok(match &self.cache {
            Some(cache) => cache.series(key, n_max)?,
            None => sequence::compute_series(key.k, key.l, key.z, n_max)?,
        })
    }
}

fn read_terms(path: &PathBuf) -> CliResult<SequenceRecord> {
    let text = fs::read_to_string(path).map_err(|e| Failure { code: EXIT_FAILURE, message: format!("{}: {e}", path.display()) })?;
    let terms = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<Integer>()
                .map_err(|e| Failure { code: EXIT_FAILURE, message: format!("{}: bad term {t:?}: {e}", path.display()) })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(SequenceRecord::from_terms(terms))
}

fn terms_json(seq: &SequenceRecord, key: Option<SeriesKey>) -> serde_json::Value {
    json!({
        "k": key.map(|k| k.k),
        "l": key.map(|k| k.l),
        "z": key.map(|k| k.z),
        "start": seq.start,
        "terms": seq.terms.iter().map(Integer::to_string).collect::<Vec<_>>(),
    })
}

/// Terms from `n = 1` (or from the first stored index if later), comma separated.
fn terms_text(seq: &SequenceRecord) -> String {
    let skip = usize::from(seq.start == 0);
    seq.terms.iter().skip(skip).map(Integer::to_string).collect::<Vec<_>>().join(", ")
}

fn cmd_seq(ctx: &Context, series: &SeriesArgs, n_max: u32) -> CliResult {
    let seq = ctx.series(series, n_max)?;
    let key = ctx.key(series)?;
    ctx.emit(|| terms_text(&seq), || terms_json(&seq, key));
    Ok(())
}

struct Fitted {
    op: RecurrenceOperator,
    report: VerificationReport,
    seq: SequenceRecord,
}

/// Fits on `terms` terms, verifies on the next `holdout`, and records the operator in the cache.
fn fit_and_verify(ctx: &Context, series: &SeriesArgs, fit: &FitArgs) -> CliResult<Fitted> {
    let total = fit.terms + fit.holdout;
    let seq = ctx.series(series, total.saturating_sub(1) as u32)?;
    let train_len = fit.terms.min(seq.len());
    let holdout = seq.len() - train_len;
    let train = seq.truncated(seq.start + train_len.saturating_sub(1) as u64);
    let bounds = FitBounds { max_order: fit.max_order, max_degree: fit.max_degree, ..FitBounds::default() };
    let Some(op) = recurrence::fit_recurrence(&train, bounds)? else {
        return Err(Failure {
            code: EXIT_NO_OPERATOR,
            message: format!("no operator with order ≤ {} and degree ≤ {} fits {train_len} terms", fit.max_order, fit.max_degree),
        });
    };
    let report = recurrence::verify(&op, &seq, holdout);
    if report.passed() {
        if let (Some(cache), Some(key)) = (&ctx.cache, ctx.key(series)?) {
            cache.attach(key, &seq, &op, None)?;
        }
    }
    Ok(Fitted { op, report, seq })
}

fn verified(fitted: Fitted) -> CliResult<Fitted> {
    if fitted.report.passed() {
        Ok(fitted)
    } else {
        Err(Failure { code: EXIT_VERIFICATION, message: format!("operator {} failed verification: {}", fitted.op, fitted.report) })
    }
}

fn cmd_fit(ctx: &Context, series: &SeriesArgs, fit: &FitArgs) -> CliResult {
    let Fitted { op, report, .. } = fit_and_verify(ctx, series, fit)?;
    ctx.emit(
        || format!("operator (L={}, D={}): {op}\n{report}", op.order(), op.degree()),
        || json!({ "operator": op.to_json(), "display": op.to_string(), "verification": report, "passed": report.passed() }),
    );
    if report.passed() {
        Ok(())
    } else {
        Err(Failure { code: EXIT_VERIFICATION, message: "verification failed".into() })
    }
}

fn cmd_extend(ctx: &Context, series: &SeriesArgs, fit: &FitArgs, to: u64) -> CliResult {
    let Fitted { op, seq, .. } = verified(fit_and_verify(ctx, series, fit)?)?;
    let extended = sequence::extend_via_recurrence(&seq, &op, to)?.truncated(to);
    let key = ctx.key(series)?;
    ctx.emit(|| terms_text(&extended), || terms_json(&extended, key));
    Ok(())
}

struct Asymptotics {
    expansion: AsymptoticExpansion,
    estimate: ConstantEstimate,
    search: ConstantMatch,
}

fn asymptotics_for(ctx: &Context, series: &SeriesArgs, fit: &FitArgs, asy: &AsyArgs, bound: u32) -> CliResult<Asymptotics> {
    let Fitted { op, seq, .. } = verified(fit_and_verify(ctx, series, fit)?)?;
    // The constant always uses at least the default order; `-J` only limits what is printed.
    let full = asymptotics::expansion(&op, asy.order.max(asymptotics::DEFAULT_ORDER))?;
    let expansion = full.truncated(asy.order);
    let long = sequence::extend_via_recurrence(&seq, &op, asy.at_n + 1)?;
    let mut estimate = constant::estimate_constant(&long, &full, asy.at_n, DEFAULT_PRECISION_BITS)?;
    let search = constant::search_constant(&estimate.value, bound);
    estimate.matched = search.clone().candidate();
    if let (Some(cache), Some(key)) = (&ctx.cache, ctx.key(series)?) {
        let mut json = expansion.to_json();
        json.constant = Some(estimate.to_json());
        cache.attach(key, &seq, &op, Some(json))?;
    }
    Ok(Asymptotics { expansion, estimate, search })
}

fn match_text(search: &ConstantMatch) -> String {
    match search {
        ConstantMatch::Unique(c) => format!("matched: {c}"),
        ConstantMatch::NotFound => "matched: none".into(),
        ConstantMatch::Ambiguous(cs) => {
            format!("matched: ambiguous ({})", cs.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))
        }
    }
}

fn constant_text(est: &ConstantEstimate, search: &ConstantMatch) -> String {
    let mut out = format!(
        "C ≈ {} (n = {}, relative drift from n = {}: {:.3e})",
        est.value_decimal(30),
        est.at_n,
        est.at_n / 2,
        est.drift()
    );
    if let Some(c2) = &est.companion_value {
        out.push_str(&format!("\nC' ≈ {}", c2.to_string_radix(10, Some(30))));
    }
    out.push('\n');
    out.push_str(&match_text(search));
    out
}

fn cmd_asy(ctx: &Context, series: &SeriesArgs, fit: &FitArgs, asy: &AsyArgs) -> CliResult {
    let a = asymptotics_for(ctx, series, fit, asy, DEFAULT_SEARCH_BOUND)?;
    ctx.emit(
        || {
            let e = &a.expansion;
            let mut out = format!("mu = {}\ntheta = {}\n", e.mu, e.theta);
            for (j, c) in e.coeffs.iter().enumerate() {
                out.push_str(&format!("a_{} = {c}\n", j + 1));
            }
            if let Some(c) = &e.companion {
                out.push_str(&format!("companion: mu' = {}, theta' = {}\n", c.mu, c.theta));
            }
            out.push_str(&format!("A(n) ~ {e}\n"));
            out.push_str(&constant_text(&a.estimate, &a.search));
            out
        },
        || {
            let mut json = a.expansion.to_json();
            json.constant = Some(a.estimate.to_json());
            serde_json::to_value(json).expect("expansion json")
        },
    );
    Ok(())
}

fn cmd_const(ctx: &Context, series: &SeriesArgs, fit: &FitArgs, asy: &AsyArgs, bound: u32) -> CliResult {
    let a = asymptotics_for(ctx, series, fit, asy, bound)?;
    ctx.emit(
        || constant_text(&a.estimate, &a.search),
        || {
            json!({
                "at_n": a.estimate.at_n,
                "value_decimal": a.estimate.value_decimal(30),
                "drift": a.estimate.drift(),
                "matched": a.estimate.matched.as_ref().map(|c| c.to_json()),
            })
        },
    );
    Ok(())
}

fn cmd_paper(ctx: &Context, opts: ReproductionOptions) -> CliResult {
    let report = reproduce::run_reproduction(&opts);
    ctx.emit(
        || report.to_string(),
        || {
            json!({
                "passed": report.passed(),
                "first_mismatch": report.first_failure(),
                "cases": report.cases.iter().map(|c| json!({
                    "case": c.label,
                    "passed": c.passed(),
                    "first_mismatch": c.first_failure(),
                })).collect::<Vec<_>>(),
            })
        },
    );
    match report.first_failure() {
        None => Ok(()),
        Some(message) => Err(Failure { code: EXIT_FAILURE, message }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Context { format: cli.format, cache: SeriesCache::resolve(cli.cache_dir.as_deref()) };
    let result = match &cli.command {
        Command::Seq { series, n_max } => cmd_seq(&ctx, series, *n_max),
        Command::Fit { series, fit } => cmd_fit(&ctx, series, fit),
        Command::Asy { series, fit, asy } => cmd_asy(&ctx, series, fit, asy),
        Command::Extend { series, fit, to } => cmd_extend(&ctx, series, fit, *to),
        Command::Const { series, fit, asy, search_bound } => cmd_const(&ctx, series, fit, asy, *search_bound),
        Command::Paper { holdout, order, at_n, perturb } => cmd_paper(
            &ctx,
            ReproductionOptions { holdout: *holdout, order: *order, at_n: *at_n, perturb: perturb.clone(), ..Default::default() },
        ),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
