//! Command-line front end: analyze single states, sweep family grids to
//! CSV, reproduce the threshold tables, and run the absolute-property
//! falsification search.
//!
//! Exit codes: 0 success, 1 internal error, 2 invalid input or usage
//! error, 3 search budget exhausted without a counterexample.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qcorr::absolute::{falsify_absolute, AbsoluteError, AbsoluteProperty};
use qcorr::criteria::CriterionVerdict;
use qcorr::linalg::{Dims, Subsystem, Tolerances};
use qcorr::report::{analyze, bisect_threshold, PropertyReport, StateDescriptor};
use qcorr::states::{
    bell, gisin, random_density, seeded_rng, werner, weyl, BellState, DensityMatrix,
};

#[derive(Parser)]
#[command(
    name = "qcorr",
    version,
    about = "Classify bipartite quantum states by their correlation properties"
)]
struct Cli {
    /// Tolerance file with key=value lines (herm_tol, psd_tol, eq_tol).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Hermiticity tolerance override.
    #[arg(long, global = true)]
    herm_tol: Option<f64>,
    /// Positivity tolerance override.
    #[arg(long, global = true)]
    psd_tol: Option<f64>,
    /// Numeric-equality tolerance override.
    #[arg(long, global = true)]
    eq_tol: Option<f64>,
    /// RNG seed (falls back to QCORR_SEED, then 7).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one state and print a JSON or text report.
    Analyze(AnalyzeArgs),
    /// Evaluate properties over a family parameter grid as CSV.
    Sweep(SweepArgs),
    /// Reproduce the werner and gisin threshold tables by bisection.
    Tables,
    /// Search for a global unitary that breaks an absolute property.
    Search(SearchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Werner,
    Gisin,
    Bell,
    Weyl,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct StateArgs {
    /// Named family; alternative to --file.
    #[arg(long, value_enum, conflicts_with = "file")]
    family: Option<Family>,
    /// JSON state file (dims + complex matrix).
    #[arg(long)]
    file: Option<PathBuf>,
    /// werner: mixing weight in [-1/3, 1].
    #[arg(long, allow_hyphen_values = true)]
    w: Option<f64>,
    /// gisin: pure-state weight in [0, 1].
    #[arg(long)]
    lambda: Option<f64>,
    /// gisin: Schmidt angle.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// bell: one of phi+, phi-, psi+, psi-.
    #[arg(long)]
    which: Option<String>,
    /// weyl: correlation-tensor diagonal.
    #[arg(long, allow_hyphen_values = true)]
    t1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t3: Option<f64>,
    /// random: rank of the sampled state (two-qubit).
    #[arg(long)]
    rank: Option<usize>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    state: StateArgs,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Decimal digits in text output.
    #[arg(long, default_value_t = 9)]
    digits: usize,
}

#[derive(Args)]
struct SweepArgs {
    /// Family to sweep: werner (1D in w) or gisin (2D in lambda, theta).
    #[arg(long, value_enum)]
    family: Family,
    /// Column names, comma separated; with none given, only the header is
    /// printed. See `--properties help`.
    #[arg(long, value_delimiter = ',')]
    properties: Vec<String>,
    /// werner: start of the weight range.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    from: f64,
    /// werner: end of the weight range.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    to: f64,
    /// werner: number of grid points.
    #[arg(long, default_value_t = 50)]
    steps: usize,
    #[arg(long, default_value_t = 0.0)]
    lambda_from: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda_to: f64,
    #[arg(long, default_value_t = 25)]
    lambda_steps: usize,
    #[arg(long, default_value_t = 0.0)]
    theta_from: f64,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
    theta_to: f64,
    #[arg(long, default_value_t = 25)]
    theta_steps: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum PropertyArg {
    Separability,
    Ppt,
    Locality,
    Unsteerability3,
    NonnegativeConditionalEntropy,
    ZeroDiscord,
    Product,
}

impl From<PropertyArg> for AbsoluteProperty {
    fn from(p: PropertyArg) -> Self {
        match p {
            PropertyArg::Separability => AbsoluteProperty::Separability,
            PropertyArg::Ppt => AbsoluteProperty::Ppt,
            PropertyArg::Locality => AbsoluteProperty::Locality,
            PropertyArg::Unsteerability3 => AbsoluteProperty::Unsteerability3,
            PropertyArg::NonnegativeConditionalEntropy => {
                AbsoluteProperty::NonnegativeConditionalEntropy
            }
            PropertyArg::ZeroDiscord => AbsoluteProperty::ZeroDiscord,
            PropertyArg::Product => AbsoluteProperty::Product,
        }
    }
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Absolute property to attack.
    #[arg(long, value_enum)]
    property: PropertyArg,
    /// Maximum number of candidate unitaries.
    #[arg(long, default_value_t = 10_000)]
    budget: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is::<InvalidInput>() { 2 } else { 1 })
        }
    }
}

type CliError = Box<dyn std::error::Error>;

/// Bad user input (unreadable file, malformed state, out-of-range family
/// parameter). Separated from internal errors so `main` can exit 2.
#[derive(Debug)]
struct InvalidInput(String);

impl std::fmt::Display for InvalidInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InvalidInput {}

fn invalid(msg: impl std::fmt::Display) -> CliError {
    Box::new(InvalidInput(msg.to_string()))
}

/// Writes to stdout, treating a closed pipe as a normal early exit so that
/// `qcorr ... | head` does not panic.
fn emit(s: &str) -> Result<(), CliError> {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(s.as_bytes()).and_then(|_| stdout.flush()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        Err(e) => Err(e.into()),
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let tols = resolve_tolerances(&cli)?;
    let seed = cli
        .seed
        .or_else(|| {
            std::env::var("QCORR_SEED")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(7);
    match cli.command {
        Command::Analyze(args) => {
            let (rho, descriptor, used_seed) = build_state(&args.state, seed, &tols)?;
            let mut report = analyze(&rho, descriptor, &tols)?;
            report.seed = used_seed;
            match args.format {
                Format::Json => emit(&format!("{}\n", serde_json::to_string_pretty(&report)?))?,
                Format::Text => emit(&render_text(&report, args.digits))?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep(args) => {
            sweep(&args, &tols)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Tables => {
            tables(&tols)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Search(args) => {
            let (rho, descriptor, _) = build_state(&args.state, seed, &tols)?;
            let property: AbsoluteProperty = args.property.into();
            match falsify_absolute(&rho, property, args.budget, seed, &tols) {
                Ok(hit) => {
                    let out = json!({
                        "state": { "label": descriptor.label, "params": descriptor.params },
                        "property": property.key(),
                        "broken": true,
                        "margin": hit.margin,
                        "candidates_tried": hit.candidates_tried,
                        "unitary": hit.unitary.to_entry_rows(),
                    });
                    emit(&format!("{}\n", serde_json::to_string_pretty(&out)?))?;
                    Ok(ExitCode::SUCCESS)
                }
                Err(AbsoluteError::BudgetExhausted {
                    budget,
                    best_margin,
                }) => {
                    let out = json!({
                        "state": { "label": descriptor.label, "params": descriptor.params },
                        "property": property.key(),
                        "broken": false,
                        "budget": budget,
                        "best_margin": best_margin,
                    });
                    emit(&format!("{}\n", serde_json::to_string_pretty(&out)?))?;
                    Ok(ExitCode::from(3))
                }
                Err(other) => Err(other.into()),
            }
        }
    }
}

fn resolve_tolerances(cli: &Cli) -> Result<Tolerances, CliError> {
    let mut tols = Tolerances::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| invalid(format!("{}:{}: expected key=value", path.display(), lineno + 1)))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|e| invalid(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
            match key.trim() {
                "herm_tol" => tols.herm_tol = value,
                "psd_tol" => tols.psd_tol = value,
                "eq_tol" => tols.eq_tol = value,
                other => {
                    return Err(invalid(format!(
                        "{}:{}: unknown tolerance key {other:?}",
                        path.display(),
                        lineno + 1
                    )))
                }
            }
        }
    }
    if let Some(v) = cli.herm_tol {
        tols.herm_tol = v;
    }
    if let Some(v) = cli.psd_tol {
        tols.psd_tol = v;
    }
    if let Some(v) = cli.eq_tol {
        tols.eq_tol = v;
    }
    Ok(tols)
}

fn require<T: Copy>(opt: Option<T>, flag: &str, family: &str) -> Result<T, CliError> {
    opt.ok_or_else(|| invalid(format!("--{flag} is required for --family {family}")))
}

fn fnv1a64(text: &str) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in text.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn build_state(
    args: &StateArgs,
    seed: u64,
    tols: &Tolerances,
) -> Result<(DensityMatrix, StateDescriptor, Option<u64>), CliError> {
    if let Some(path) = &args.file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        let rho = DensityMatrix::from_json(&text, tols).map_err(invalid)?;
        let descriptor = StateDescriptor {
            label: "file".into(),
            params: json!({
                "path": path.display().to_string(),
                "content_fnv1a64": format!("{:016x}", fnv1a64(&text)),
            }),
        };
        return Ok((rho, descriptor, None));
    }
    let family = args
        .family
        .ok_or_else(|| invalid("one of --family or --file is required"))?;
    match family {
        Family::Werner => {
            let w = require(args.w, "w", "werner")?;
            Ok((
                werner(w, tols).map_err(invalid)?,
                StateDescriptor::family("werner", json!({ "w": w })),
                None,
            ))
        }
        Family::Gisin => {
            let lambda = require(args.lambda, "lambda", "gisin")?;
            let theta = require(args.theta, "theta", "gisin")?;
            Ok((
                gisin(lambda, theta, tols).map_err(invalid)?,
                StateDescriptor::family("gisin", json!({ "lambda": lambda, "theta": theta })),
                None,
            ))
        }
        Family::Bell => {
            let which = args
                .which
                .as_deref()
                .ok_or_else(|| invalid("--which is required for --family bell"))?;
            let state: BellState = which.parse().map_err(invalid)?;
            Ok((
                bell(state),
                StateDescriptor::family("bell", json!({ "which": which })),
                None,
            ))
        }
        Family::Weyl => {
            let t = [
                require(args.t1, "t1", "weyl")?,
                require(args.t2, "t2", "weyl")?,
                require(args.t3, "t3", "weyl")?,
            ];
            Ok((
                weyl(t, tols).map_err(invalid)?,
                StateDescriptor::family("weyl", json!({ "t": t })),
                None,
            ))
        }
        Family::Random => {
            let rank = args.rank.unwrap_or(4);
            let mut rng = seeded_rng(seed);
            let rho = random_density(Dims::new(2, 2), rank, &mut rng, tols).map_err(invalid)?;
            Ok((
                rho,
                StateDescriptor::family("random", json!({ "rank": rank, "seed": seed })),
                Some(seed),
            ))
        }
    }
}

/// The sweepable scalar columns.
const SWEEP_PROPERTIES: &[(&str, &str)] = &[
    ("product", "product-test margin"),
    ("ppt", "smallest partial-transpose eigenvalue (+tolerance)"),
    ("chsh", "best CHSH expectation"),
    ("steering3", "three-setting steering value"),
    ("discord-ba", "discord D(B|A), measurement on A"),
    ("discord-ab", "discord D(A|B), measurement on B"),
    ("mutual", "mutual information in bits"),
    ("cond-ab", "conditional entropy S(A|B)"),
    ("cond-ba", "conditional entropy S(B|A)"),
    ("purity", "tr(rho^2)"),
    ("entropy", "joint von Neumann entropy"),
    ("abs-sep", "absolute separability margin"),
    ("abs-ppt", "absolute PPT margin"),
    ("abs-local", "absolute locality margin"),
    ("abs-unsteer3", "absolute unsteerability margin"),
    ("abs-nnce", "absolute conditional-entropy margin"),
    ("abs-zero-discord", "absolute zero-discord margin"),
];

fn property_column(name: &str, rho: &DensityMatrix, tols: &Tolerances) -> Result<f64, CliError> {
    use qcorr::absolute as abs;
    use qcorr::criteria as cr;
    let spectrum = rho.spectrum();
    let dims = rho.dims();
    let v = match name {
        "product" => cr::is_product(rho, tols)?.margin,
        "ppt" => cr::is_ppt(rho, tols)?.margin,
        "chsh" => cr::chsh_max(rho, tols)?.0,
        "steering3" => cr::steerable_three(rho, tols)?.0,
        "discord-ba" => cr::discord_numeric(rho, Subsystem::A, tols)?,
        "discord-ab" => cr::discord_numeric(rho, Subsystem::B, tols)?,
        "mutual" => qcorr::entropy::entropy_report(rho, tols)?.mutual,
        "cond-ab" => qcorr::entropy::entropy_report(rho, tols)?.cond_a_given_b,
        "cond-ba" => qcorr::entropy::entropy_report(rho, tols)?.cond_b_given_a,
        "purity" => rho.purity(),
        "entropy" => qcorr::entropy::von_neumann(rho),
        "abs-sep" => abs::absolutely_separable_2xn(spectrum, dims)?.margin,
        "abs-ppt" => abs::absolutely_ppt(spectrum, dims, tols)?.margin,
        "abs-local" => abs::absolutely_local(spectrum)?.margin,
        "abs-unsteer3" => abs::absolutely_unsteerable3(spectrum)?.margin,
        "abs-nnce" => abs::absolutely_nonneg_cond_entropy(spectrum)?.margin,
        "abs-zero-discord" => abs::absolutely_zero_discord(spectrum)?.margin,
        other => {
            let known: Vec<&str> = SWEEP_PROPERTIES.iter().map(|(n, _)| *n).collect();
            return Err(invalid(format!(
                "unknown property {other:?}; known: {}",
                known.join(", ")
            )));
        }
    };
    Ok(v)
}

fn grid(from: f64, to: f64, steps: usize) -> Vec<f64> {
    if steps <= 1 {
        return vec![from];
    }
    (0..steps)
        .map(|i| from + (to - from) * i as f64 / (steps - 1) as f64)
        .collect()
}

fn sweep(args: &SweepArgs, tols: &Tolerances) -> Result<(), CliError> {
    if args.properties.len() == 1 && args.properties[0] == "help" {
        let mut listing = String::new();
        for (name, help) in SWEEP_PROPERTIES {
            listing.push_str(&format!("{name}: {help}\n"));
        }
        emit(&listing)?;
        return Ok(());
    }
    let props: Vec<&str> = args
        .properties
        .iter()
        .map(|s| s.as_str())
        .filter(|s| !s.is_empty())
        .collect();
    let mut out = String::new();
    match args.family {
        Family::Werner => {
            out.push('w');
            for p in &props {
                out.push(',');
                out.push_str(p);
            }
            out.push('\n');
            if !props.is_empty() {
                for w in grid(args.from, args.to, args.steps) {
                    let rho = werner(w, tols)?;
                    out.push_str(&format!("{w:.9e}"));
                    for p in &props {
                        out.push_str(&format!(",{:.9e}", property_column(p, &rho, tols)?));
                    }
                    out.push('\n');
                }
            }
        }
        Family::Gisin => {
            out.push_str("lambda,theta");
            for p in &props {
                out.push(',');
                out.push_str(p);
            }
            out.push('\n');
            if !props.is_empty() {
                for lambda in grid(args.lambda_from, args.lambda_to, args.lambda_steps) {
                    for theta in grid(args.theta_from, args.theta_to, args.theta_steps) {
                        let rho = gisin(lambda, theta, tols)?;
                        out.push_str(&format!("{lambda:.9e},{theta:.9e}"));
                        for p in &props {
                            out.push_str(&format!(
                                ",{:.9e}",
                                property_column(p, &rho, tols)?
                            ));
                        }
                        out.push('\n');
                    }
                }
            }
        }
        _ => return Err("sweep supports --family werner or gisin".into()),
    }
    emit(&out)?;
    Ok(())
}

fn tables(tols: &Tolerances) -> Result<(), CliError> {
    use qcorr::absolute as abs;
    use qcorr::criteria as cr;
    let mut out = String::new();
    out.push_str("family            property                     boundary\n");
    out.push_str("--------------------------------------------------------\n");
    let t = *tols;

    // Werner: ordinary and spectrum-only criteria coincide; each row is an
    // independent bisection over the weight.
    let rows: Vec<(&str, Box<dyn FnMut(f64) -> f64>)> = vec![
        (
            "separability",
            Box::new(move |w| cr::is_ppt(&werner(w, &t).unwrap(), &t).unwrap().margin),
        ),
        (
            "unsteerability-3",
            Box::new(move |w| 1.0 - cr::steerable_three(&werner(w, &t).unwrap(), &t).unwrap().0),
        ),
        (
            "locality",
            Box::new(move |w| 2.0 - cr::chsh_max(&werner(w, &t).unwrap(), &t).unwrap().0),
        ),
        (
            "nonneg-cond-entropy",
            Box::new(move |w| {
                let r = qcorr::entropy::entropy_report(&werner(w, &t).unwrap(), &t).unwrap();
                r.cond_a_given_b.min(r.cond_b_given_a)
            }),
        ),
        (
            "abs-separability",
            Box::new(move |w| {
                abs::absolutely_separable_2xn(werner(w, &t).unwrap().spectrum(), Dims::new(2, 2))
                    .unwrap()
                    .margin
            }),
        ),
        (
            "abs-unsteerability-3",
            Box::new(move |w| {
                abs::absolutely_unsteerable3(werner(w, &t).unwrap().spectrum())
                    .unwrap()
                    .margin
            }),
        ),
        (
            "abs-locality",
            Box::new(move |w| {
                abs::absolutely_local(werner(w, &t).unwrap().spectrum())
                    .unwrap()
                    .margin
            }),
        ),
        (
            "abs-nonneg-cond-entropy",
            Box::new(move |w| {
                abs::absolutely_nonneg_cond_entropy(werner(w, &t).unwrap().spectrum())
                    .unwrap()
                    .margin
            }),
        ),
    ];
    for (name, mut f) in rows {
        let b = bisect_threshold(&mut f, 0.0, 1.0, 1e-7)
            .map_err(|e| format!("werner/{name}: {e}"))?;
        out.push_str(&format!("werner            {name:<28} {:.6}\n", b.threshold));
    }

    // Gisin at theta = pi/4. The absolute rows depend only on lambda (the
    // spectrum is theta-independent). Every margin of this family turns at
    // lambda = 1/3, where the spectrum passes through the uniform-rank-3
    // point, so the scans start just past the turn; there is no
    // absolute-separability row because that margin only touches zero at
    // the turning point itself.
    let quarter = std::f64::consts::FRAC_PI_4;
    let rows: Vec<(&str, Box<dyn FnMut(f64) -> f64>)> = vec![
        (
            "separability",
            Box::new(move |l| cr::is_ppt(&gisin(l, quarter, &t).unwrap(), &t).unwrap().margin),
        ),
        (
            "unsteerability-3",
            Box::new(move |l| {
                1.0 - cr::steerable_three(&gisin(l, quarter, &t).unwrap(), &t)
                    .unwrap()
                    .0
            }),
        ),
        (
            "locality",
            Box::new(move |l| 2.0 - cr::chsh_max(&gisin(l, quarter, &t).unwrap(), &t).unwrap().0),
        ),
        (
            "abs-unsteerability-3",
            Box::new(move |l| {
                abs::absolutely_unsteerable3(gisin(l, quarter, &t).unwrap().spectrum())
                    .unwrap()
                    .margin
            }),
        ),
        (
            "abs-locality",
            Box::new(move |l| {
                abs::absolutely_local(gisin(l, quarter, &t).unwrap().spectrum())
                    .unwrap()
                    .margin
            }),
        ),
        (
            "abs-nonneg-cond-entropy",
            Box::new(move |l| {
                abs::absolutely_nonneg_cond_entropy(gisin(l, quarter, &t).unwrap().spectrum())
                    .unwrap()
                    .margin
            }),
        ),
    ];
    for (name, mut f) in rows {
        let b = bisect_threshold(&mut f, 0.4, 1.0, 1e-7)
            .map_err(|e| format!("gisin/{name}: {e}"))?;
        out.push_str(&format!("gisin(theta=pi/4) {name:<28} {:.6}\n", b.threshold));
    }
    emit(&out)?;
    Ok(())
}

fn yn(v: &CriterionVerdict, digits: usize) -> String {
    format!(
        "{} (margin {:+.digits$e})",
        if v.holds { "yes" } else { "no" },
        v.margin,
        digits = digits
    )
}

fn render_text(report: &PropertyReport, digits: usize) -> String {
    let mut s = String::new();
    let d = digits;
    s.push_str(&format!(
        "state: {} {}\n",
        report.state.label, report.state.params
    ));
    s.push_str(&format!("dims: {}x{}\n", report.dims[0], report.dims[1]));
    let spectrum: Vec<String> = report
        .spectrum
        .iter()
        .map(|x| format!("{x:.d$}"))
        .collect();
    s.push_str(&format!("spectrum: [{}]\n", spectrum.join(", ")));
    s.push_str(&format!("purity: {:.d$}\n", report.purity));
    let e = &report.entropy;
    s.push_str(&format!(
        "entropy: joint={:.d$} a={:.d$} b={:.d$} cond(a|b)={:.d$} cond(b|a)={:.d$} mutual={:.d$}\n",
        e.s_joint, e.s_a, e.s_b, e.cond_a_given_b, e.cond_b_given_a, e.mutual
    ));
    let c = &report.criteria;
    s.push_str(&format!("product: {}\n", yn(&c.product, d)));
    match &c.pure_separability {
        Some(v) => s.push_str(&format!("pure-separability: {}\n", yn(v, d))),
        None => s.push_str("pure-separability: n/a (mixed state)\n"),
    }
    s.push_str(&format!("ppt: {}\n", yn(&c.ppt, d)));
    if let (Some(value), Some(v)) = (c.chsh_value, &c.nonlocal) {
        s.push_str(&format!("chsh: value={value:.d$} nonlocal={}\n", yn(v, d)));
    }
    if let (Some(value), Some(v)) = (c.steering_value, &c.steerable) {
        s.push_str(&format!(
            "steering3: value={value:.d$} steerable={}\n",
            yn(v, d)
        ));
    }
    if let (Some(ba), Some(ab)) = (c.discord_b_given_a, c.discord_a_given_b) {
        s.push_str(&format!("discord: D(B|A)={ba:.d$} D(A|B)={ab:.d$}\n"));
    }
    if let Some(v) = &c.zero_discord_bloch_a {
        s.push_str(&format!("zero-discord bloch(A): {}\n", yn(v, d)));
    }
    s.push_str(&format!(
        "zero-discord blocks: A={} B={}\n",
        yn(&c.zero_discord_blocks_a, d),
        yn(&c.zero_discord_blocks_b, d)
    ));
    s.push_str(&format!(
        "classicality: {}\n",
        serde_json::to_value(c.classicality)
            .expect("enum serializes")
            .as_str()
            .unwrap_or("?")
    ));
    s.push_str(&format!(
        "zero-super-discord: {}\n",
        yn(&c.zero_super_discord, d)
    ));
    let a = &report.absolute;
    let mut abs_line = String::from("absolute:");
    for (name, v) in [
        ("separability", &a.separability),
        ("ppt", &a.ppt),
        ("locality", &a.locality),
        ("unsteerability3", &a.unsteerability3),
        ("nnce", &a.nonnegative_conditional_entropy),
        ("zero-discord", &a.zero_discord),
        ("family-step1", &a.family_step1),
    ] {
        if let Some(v) = v {
            abs_line.push_str(&format!(
                " {name}={}",
                if v.holds { "yes" } else { "no" }
            ));
        }
    }
    s.push_str(&abs_line);
    s.push('\n');
    if report.hierarchy_violations.is_empty() {
        s.push_str("hierarchy: consistent\n");
    } else {
        for v in &report.hierarchy_violations {
            s.push_str(&format!("hierarchy violation: {v}\n"));
        }
    }
    s
}
