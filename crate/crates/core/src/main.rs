use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use tspace_core::binom::{case_table, Case};
use tspace_core::bivar::{check_g_formula, g_closed_form, g_of, h_of_binomial_f, random_alphas};
use tspace_core::constructions::{b1r_set, en_set, un_basis, wn_generators, yn_set};
use tspace_core::poly::parse_poly;
use tspace_core::quotient::QuotCtx;
use tspace_core::suites::{field_for_q, run_suite, Options, Search, SuiteArgs, SuiteError};
use tspace_core::tclosure::{ClosureError, Engine};
use tspace_core::{verify_certificate, Certificate, ClosureStrategy, Poly};

const EXIT_FAIL: u8 = 1;
const EXIT_UNDECIDED: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "tspace-lab", version, about = "T-spaces of k<x>_0 over finite fields: constructions, closures and verification suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite.
    Suite(SuiteCmd),
    /// Print an explicit construction as JSON.
    Emit(EmitCmd),
    /// Compute the T-space (or T-ideal) closure of generators in A_n.
    Closure(ClosureCmd),
    /// Decide whether f lies in the closure of the generators, taken modulo U_n.
    Membership(MembershipCmd),
    /// CSV of a binomial closed form against the digit product.
    BinomTable(BinomCmd),
    /// Check one of the two-variable identities.
    IdentityCheck(IdentityCmd),
    /// Replay a closure certificate.
    CheckCert(CheckCertCmd),
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Exhaustive,
    Random,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, value_enum, default_value = "exhaustive")]
    strategy: StrategyArg,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Consecutive non-growing samples before a randomized search stops.
    #[arg(long)]
    stall: Option<usize>,
}

impl SearchArgs {
    fn closure_strategy(&self) -> ClosureStrategy {
        match self.strategy {
            StrategyArg::Exhaustive => ClosureStrategy::Exhaustive,
            StrategyArg::Random => ClosureStrategy::Randomized {
                seed: self.seed,
                stall_threshold: self.stall,
            },
        }
    }
}

#[derive(Args)]
struct SuiteCmd {
    /// bases, wn-props, containment, sum, maximality, summary, binom, identities
    name: String,
    #[arg(long)]
    q: u32,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    r: Option<u32>,
    #[arg(long)]
    s: Option<u32>,
    #[arg(long)]
    m: Option<u64>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[command(flatten)]
    search: SearchArgs,
    /// Write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write certificates under <dir>/<suite>/.
    #[arg(long)]
    certs: Option<PathBuf>,
    /// Record wall time per check (reports are then not reproducible).
    #[arg(long)]
    timings: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Object {
    Wn,
    Un,
    En,
    Yn,
    B1r,
}

#[derive(Args)]
struct EmitCmd {
    #[arg(long, value_enum)]
    object: Object,
    #[arg(long)]
    q: u32,
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[arg(long)]
    r: Option<u64>,
    /// Number of U_n basis elements.
    #[arg(long, default_value_t = 4)]
    count: usize,
}

#[derive(Args)]
struct ClosureCmd {
    #[arg(long)]
    q: u32,
    #[arg(long, default_value_t = 1)]
    n: u32,
    /// Generator such as "x + x^3"; repeat for several.
    #[arg(long = "gen", required = true)]
    gens: Vec<String>,
    /// Close under multiplication by x as well (T-ideal).
    #[arg(long)]
    ideal: bool,
    #[command(flatten)]
    search: SearchArgs,
    /// Write the certificate here.
    #[arg(long)]
    cert: Option<PathBuf>,
}

#[derive(Args)]
struct MembershipCmd {
    #[arg(long)]
    q: u32,
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[arg(long = "gen", required = true)]
    gens: Vec<String>,
    #[arg(long)]
    f: String,
    #[arg(long)]
    ideal: bool,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Args)]
struct BinomCmd {
    #[arg(long)]
    q: u64,
    /// I, II, III or IV
    #[arg(long = "case")]
    case: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    GBase,
    GStep,
    H,
}

#[derive(Args)]
struct IdentityCmd {
    #[arg(long, value_enum)]
    which: Which,
    #[arg(long)]
    q: u32,
    #[arg(long)]
    r: Option<u64>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    trials: usize,
}

#[derive(Args)]
struct CheckCertCmd {
    file: PathBuf,
}

/// Error split by exit code.
enum Failure {
    Usage(String),
    Runtime(String),
    Undecided(String),
}

impl From<SuiteError> for Failure {
    fn from(e: SuiteError) -> Self {
        match e {
            SuiteError::Closure(ClosureError::TooLarge { .. }) => Failure::Undecided(e.to_string()),
            SuiteError::Precondition(_) | SuiteError::Binom(_) | SuiteError::Field(_) => Failure::Usage(e.to_string()),
            SuiteError::Construction(_) | SuiteError::Quot(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn runtime(e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Suite(c) => suite(c),
        Command::Emit(c) => emit(c),
        Command::Closure(c) => closure(c),
        Command::Membership(c) => membership(c),
        Command::BinomTable(c) => binom_table(c),
        Command::IdentityCheck(c) => identity_check(c),
        Command::CheckCert(c) => check_cert(c),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_FAIL)
        }
        Err(Failure::Undecided(m)) => {
            eprintln!("skipped: {m}");
            ExitCode::from(EXIT_UNDECIDED)
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| runtime(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| runtime(format!("{}: {e}", path.display())))
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn suite(c: SuiteCmd) -> Result<u8, Failure> {
    let opts = Options {
        search: match c.search.strategy {
            StrategyArg::Exhaustive => Search::Exhaustive,
            StrategyArg::Random => Search::Random,
        },
        seed: c.search.seed,
        stall: c.search.stall,
        trials: c.trials,
        timings: c.timings,
        engine: Engine::from_env(),
    };
    let args = SuiteArgs {
        q: c.q,
        n: c.n,
        r: c.r,
        s: c.s,
        m: c.m,
    };
    let report = run_suite(&c.name, &args, &opts)?;
    for check in &report.checks {
        let status = serde_json::to_value(check.status).expect("status");
        println!("[{}] {} ({})", status.as_str().unwrap_or("?"), check.claim, check.anchor);
    }
    let overall = serde_json::to_value(report.status()).expect("status");
    println!("suite {}: {}", report.suite, overall.as_str().unwrap_or("?"));
    if let Some(path) = &c.json {
        write_file(path, &report.to_json())?;
    }
    if let Some(dir) = &c.certs {
        for (stem, cert) in &report.certificates {
            write_file(&dir.join(&report.suite).join(format!("{stem}.json")), &pretty(cert))?;
        }
    }
    Ok(report.exit_code() as u8)
}

fn emit(c: EmitCmd) -> Result<u8, Failure> {
    let field = field_for_q(c.q)?;
    let polys: Vec<Poly> = match c.object {
        Object::Wn => wn_generators(&field, c.n).map_err(usage)?,
        Object::Un => un_basis(&field, c.n, c.count).map_err(usage)?,
        Object::En => en_set(&field, c.n).map_err(usage)?,
        Object::Yn => yn_set(&field, c.n).map_err(usage)?,
        Object::B1r => {
            let r = c.r.ok_or_else(|| usage("--r is required for b1r"))?;
            b1r_set(&field, r).map_err(usage)?
        }
    };
    let name = match c.object {
        Object::Wn => "wn",
        Object::Un => "un",
        Object::En => "en",
        Object::Yn => "yn",
        Object::B1r => "b1r",
    };
    let mut out = json!({
        "object": name,
        "field": field.spec(),
        "polys": polys.iter().map(Poly::to_repr).collect::<Vec<_>>(),
    });
    if !matches!(c.object, Object::B1r) {
        out["n"] = json!(c.n);
    }
    if let Some(r) = c.r.filter(|_| matches!(c.object, Object::B1r)) {
        out["r"] = json!(r);
    }
    print!("{}", pretty(&out));
    Ok(0)
}

fn parse_gens(field: &tspace_core::Gf, gens: &[String]) -> Result<Vec<Poly>, Failure> {
    gens.iter().map(|g| parse_poly(field, g).map_err(usage)).collect()
}

fn run_closure(
    engine: &Engine,
    gens: &[Poly],
    ctx: &QuotCtx,
    ideal: bool,
    strategy: &ClosureStrategy,
) -> Result<tspace_core::tclosure::Closure, Failure> {
    let res = if ideal {
        engine.t_closure(gens, ctx, strategy)
    } else {
        engine.s_closure(gens, ctx, strategy)
    };
    res.map_err(|e| match e {
        ClosureError::TooLarge { .. } => Failure::Undecided(e.to_string()),
        other => runtime(other),
    })
}

fn closure(c: ClosureCmd) -> Result<u8, Failure> {
    let field = field_for_q(c.q)?;
    let ctx = QuotCtx::new(&field, c.n).map_err(usage)?;
    let gens = parse_gens(&field, &c.gens)?;
    let strategy = c.search.closure_strategy();
    let cl = run_closure(&Engine::from_env(), &gens, &ctx, c.ideal, &strategy)?;
    let out = json!({
        "D": ctx.dim(),
        "dim": cl.basis.dim(),
        "exact": cl.exact,
        "full": cl.basis.is_full(),
        "pivots": cl.basis.pivot_exponents(),
        "basis": cl.basis.to_repr(),
    });
    print!("{}", pretty(&out));
    if let Some(path) = &c.cert {
        write_file(path, &pretty(&cl.certificate))?;
    }
    Ok(0)
}

fn membership(c: MembershipCmd) -> Result<u8, Failure> {
    let field = field_for_q(c.q)?;
    let ctx = QuotCtx::new(&field, c.n).map_err(usage)?;
    let gens = parse_gens(&field, &c.gens)?;
    let f = parse_poly(&field, &c.f).map_err(usage)?;
    let strategy = c.search.closure_strategy();
    let cl = run_closure(&Engine::from_env(), &gens, &ctx, c.ideal, &strategy)?;
    let member = cl.basis.contains(&ctx.project(&f).map_err(usage)?).map_err(runtime)?;
    let verdict = match (member, cl.exact) {
        (true, _) => "member modulo U_n",
        (false, true) => "not a member",
        (false, false) => "undecided",
    };
    let out = json!({"member": member, "exact": cl.exact, "closure_dim": cl.basis.dim(), "D": ctx.dim(), "verdict": verdict});
    print!("{}", pretty(&out));
    Ok(if member || cl.exact { 0 } else { EXIT_UNDECIDED })
}

fn binom_table(c: BinomCmd) -> Result<u8, Failure> {
    let case = Case::parse(&c.case).ok_or_else(|| usage(format!("unknown case {:?}", c.case)))?;
    let rows = case_table(case, c.q).map_err(usage)?;
    println!("r,t,j,formula,oracle,match");
    for row in &rows {
        println!("{},{},{},{},{},{}", row.r, row.t, row.j, row.formula, row.oracle, row.matches());
    }
    Ok(if rows.iter().all(|r| r.matches()) { 0 } else { EXIT_FAIL })
}

fn identity_check(c: IdentityCmd) -> Result<u8, Failure> {
    let field = field_for_q(c.q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let record = match c.which {
        Which::GBase | Which::GStep => {
            let r = match c.which {
                Which::GBase => 1,
                _ => c.r.unwrap_or(2),
            };
            if matches!(c.which, Which::GStep) && r < 2 {
                return Err(usage("g-step needs r >= 2"));
            }
            let mut failure = None;
            for _ in 0..c.trials {
                let alphas = random_alphas(&field, r, &mut rng).map_err(usage)?;
                if !check_g_formula(&field, r, &alphas).map_err(usage)? {
                    failure = Some(alphas);
                    break;
                }
            }
            match failure {
                None => json!({"which": name_of(c.which), "q": c.q, "r": r, "trials": c.trials, "status": "pass"}),
                Some(a) => {
                    let alphas: BTreeMap<String, Vec<u32>> =
                        a.iter().map(|(t, v)| (t.to_string(), field.coords(*v))).collect();
                    json!({
                        "which": name_of(c.which), "q": c.q, "r": r, "status": "fail",
                        "alphas": alphas,
                        "expansion": g_of(&field, r, &a).map_err(runtime)?.to_string(),
                        "closed_form": g_closed_form(&field, r, &a).map_err(runtime)?.to_string(),
                    })
                }
            }
        }
        Which::H => {
            let r = c.r.ok_or_else(|| usage("--r is required for h"))?;
            let ctx = QuotCtx::new(&field, 1).map_err(usage)?;
            let h = h_of_binomial_f(&ctx, r).map_err(usage)?;
            let mut rec = json!({
                "which": "h", "q": c.q, "r": r,
                "status": if h.holds() { "pass" } else { "fail" },
                "h": h.h.lift().to_string(),
                "in_en_span": h.in_en_span,
            });
            if !h.holds() {
                rec["closed_form"] = json!(h.closed_form.lift().to_string());
            }
            rec
        }
    };
    print!("{}", pretty(&record));
    Ok(if record["status"] == "pass" { 0 } else { EXIT_FAIL })
}

fn name_of(w: Which) -> &'static str {
    match w {
        Which::GBase => "g-base",
        Which::GStep => "g-step",
        Which::H => "h",
    }
}

fn check_cert(c: CheckCertCmd) -> Result<u8, Failure> {
    let text = fs::read_to_string(&c.file).map_err(|e| runtime(format!("{}: {e}", c.file.display())))?;
    let cert: Certificate = serde_json::from_str(&text).map_err(|e| runtime(format!("malformed certificate: {e}")))?;
    match verify_certificate(&cert) {
        Ok(true) => {
            println!("valid: dim {} ({} witnesses)", cert.dim, cert.witnesses.len());
            Ok(0)
        }
        Ok(false) => {
            println!("invalid: replay does not reach the claimed dimension {}", cert.dim);
            Ok(EXIT_FAIL)
        }
        Err(e) => Err(runtime(e)),
    }
}
