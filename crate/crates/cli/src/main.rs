use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use descentlab_core::bounds::{bound_report, BoundReport};
use descentlab_core::descent::{build_system, Flavor, Generators, PolySystem};
use descentlab_core::engine::{solving_degree, TraceRow};
use descentlab_core::fields::{Elem, Field};
use descentlab_core::hfe::{hfe_attack, hfe_decrypt, hfe_encrypt, hfe_keygen, HfePublicKey};
use descentlab_core::io;
use descentlab_core::lastfall::last_fall_exact;
use descentlab_core::multipoly::{MultiPoly, TermOrder};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

mod sweep;
mod verify;

#[derive(Parser)]
#[command(name = "descentlab", version, about = "Weil descent systems, solving degrees and last fall degrees over finite fields")]
struct Cli {
    /// Base seed for anything randomised.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; DESCENTLAB_THREADS takes precedence.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Report::Json)]
    report: Report,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Report {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Order {
    Drl,
    Lex,
}

impl From<Order> for TermOrder {
    fn from(o: Order) -> TermOrder {
        match o {
            Order::Drl => TermOrder::Drl,
            Order::Lex => TermOrder::Lex,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write the descended system of a univariate system file.
    Descend {
        system: PathBuf,
        #[arg(long, default_value = "Fprime_f")]
        flavor: String,
    },
    /// Measure the solving degree.
    Solve {
        system: PathBuf,
        /// Descent to apply to a univariate system first.
        #[arg(long, default_value = "Fprime_f")]
        flavor: String,
        #[arg(long, value_enum, default_value_t = Order::Drl)]
        order: Order,
        #[arg(long)]
        dmax: Option<u32>,
        /// Per-degree matrix statistics as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Compute the last fall degree.
    Lfd {
        system: PathBuf,
        #[arg(long, default_value = "Fprime_f")]
        flavor: String,
        #[arg(long)]
        dmax: Option<u32>,
        /// Fall events as CSV.
        #[arg(long)]
        events: Option<PathBuf>,
    },
    /// Closed-form bounds for a univariate system.
    Bounds { system: PathBuf },
    #[command(subcommand)]
    Hfe(HfeCommand),
    /// Run a generated or listed corpus and stream one CSV row per instance.
    Sweep(sweep::SweepArgs),
    /// Run the worked-example battery.
    VerifyPaper(verify::VerifyArgs),
}

#[derive(Subcommand)]
enum HfeCommand {
    /// Generate a key pair.
    Keygen {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: u32,
        /// Key pair output (stdout when absent).
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    Encrypt(KeyText<PlainArg>),
    Decrypt(KeyText<CipherArg>),
    /// Recover plaintexts from the public key alone.
    Attack {
        #[command(flatten)]
        io: KeyText<CipherArg>,
        #[arg(long)]
        dmax: Option<u32>,
    },
}

#[derive(Args)]
struct KeyText<T: Args> {
    /// Key pair or public key file.
    #[arg(long)]
    key: PathBuf,
    #[command(flatten)]
    text: T,
}

#[derive(Args)]
struct PlainArg {
    /// Digits over GF(q), comma separated.
    #[arg(long)]
    plaintext: String,
}

#[derive(Args)]
struct CipherArg {
    #[arg(long)]
    ciphertext: String,
}

/// Failure classes mapped to exit codes.
pub enum Failure {
    /// A claim or computation did not hold (exit 1).
    Claim(String),
    /// Bad input or configuration (exit 2).
    Usage(String),
}

impl From<descentlab_core::Error> for Failure {
    fn from(e: descentlab_core::Error) -> Failure {
        use descentlab_core::Error as E;
        match e {
            E::Parse(_) | E::NotPrime(_) | E::Reducible { .. } | E::InvalidModulus(_) | E::DependentBasis | E::FieldTooLarge(_) | E::ParamOutOfRange(_) | E::LengthMismatch { .. } | E::EmptyOrConstant | E::ConstantInInput(_) | E::MismatchedField | E::MismatchedContext(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Claim(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, Failure>;

pub fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

pub fn parse_flavor(tag: &str) -> CliResult<Flavor> {
    Flavor::from_tag(tag).ok_or_else(|| usage(format!("unknown flavor {tag:?}")))
}

/// SHA-256 of the canonical serialisation.
pub fn system_hash(sys: &PolySystem) -> String {
    hex::encode(Sha256::digest(io::write_system(sys).as_bytes()))
}

/// Multivariate generators of a system file, descending univariate input.
pub fn multivariate_of(sys: &PolySystem, flavor: Flavor) -> CliResult<PolySystem> {
    match sys.generators() {
        Generators::Multivariate(_) => Ok(sys.clone()),
        Generators::Univariate(f) => {
            if flavor.is_univariate() || flavor == Flavor::Custom {
                return Err(usage(format!("flavor {flavor} does not give a multivariate system")));
            }
            Ok(build_system(f, flavor)?)
        }
    }
}

pub fn default_dmax(polys: &[MultiPoly]) -> u32 {
    let q = polys.first().map_or(2, |p| p.field().characteristic());
    descentlab_core::engine::default_dmax(polys, q) + 2
}

fn polys_of(sys: &PolySystem) -> CliResult<&[MultiPoly]> {
    sys.multivariate().filter(|p| !p.is_empty()).ok_or_else(|| usage("empty system"))
}

pub const BOUNDS_CSV_HEADER: &str = "q,n,max_degree,min_degree,max_fake_degree,main_d,lfd_main,lfd_rival,sd_fake_general,sd_fake_log_form,sd_fake_hfe,hfe_t,lfd_hfe,u";

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

pub fn bounds_csv(b: &BoundReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        b.q, b.n, b.max_degree, b.min_degree, b.max_fake_degree, b.main_d, b.lfd_main, b.lfd_rival, b.sd_fake_general, b.sd_fake_log_form,
        opt(b.sd_fake_hfe), opt(b.hfe_t), opt(b.lfd_hfe), b.u
    )
}

pub fn bounds_json(b: &BoundReport) -> Value {
    json!({
        "q": b.q, "n": b.n, "max_degree": b.max_degree, "min_degree": b.min_degree,
        "max_fake_degree": b.max_fake_degree, "main_d": b.main_d, "lfd_main": b.lfd_main,
        "lfd_rival": b.lfd_rival, "sd_fake_general": b.sd_fake_general,
        "sd_fake_log_form": b.sd_fake_log_form, "sd_fake_hfe": b.sd_fake_hfe,
        "hfe_t": b.hfe_t, "lfd_hfe": b.lfd_hfe, "u": b.u,
    })
}

fn print_value(v: &Value) {
    println!("{}", io::to_canonical_string(v));
}

fn cmd_solve(cli: &Cli, path: &Path, flavor: &str, order: Order, dmax: Option<u32>, trace: Option<&Path>) -> CliResult<()> {
    let sys = multivariate_of(&io::parse_system(&read_text(path)?)?, parse_flavor(flavor)?)?;
    let polys = polys_of(&sys)?;
    let d_max = dmax.unwrap_or_else(|| default_dmax(polys));
    let r = solving_degree(polys, order.into(), d_max)?;
    if let Some(t) = trace {
        let mut text = format!("{}\n", TraceRow::CSV_HEADER);
        for row in &r.trace {
            text.push_str(&row.to_csv());
            text.push('\n');
        }
        write_text(t, &text)?;
    }
    let k = sys.coefficient_field();
    match cli.report {
        Report::Json => print_value(&json!({
            "system": system_hash(&sys),
            "flavor": sys.flavor().tag(),
            "order": r.order.name(),
            "solving_degree": r.degree,
            "basis": r.basis.polys.iter().map(io::multipoly_to_json).collect::<Vec<_>>(),
            "solution": r.solution.as_ref().map(|s| io::elems_to_json(&k, s)),
            "linear_signature": r.linear_signature_holds(),
            "final_rank": r.final_rank,
            "final_cols": r.final_cols,
        })),
        Report::Csv => {
            println!("system,flavor,order,solving_degree,final_rank,final_cols");
            println!("{},{},{},{},{},{}", system_hash(&sys), sys.flavor(), r.order.name(), r.degree, r.final_rank, r.final_cols);
        }
    }
    Ok(())
}

fn cmd_lfd(cli: &Cli, path: &Path, flavor: &str, dmax: Option<u32>, events: Option<&Path>) -> CliResult<()> {
    let sys = multivariate_of(&io::parse_system(&read_text(path)?)?, parse_flavor(flavor)?)?;
    let polys = polys_of(&sys)?;
    let d_max = dmax.unwrap_or_else(|| default_dmax(polys));
    let r = last_fall_exact(polys, d_max)?;
    if let Some(p) = events {
        let mut text = String::from("degree,new_lt_count,sample_lts\n");
        for e in &r.events {
            let sample: Vec<String> = e.leading.iter().take(3).map(|m| format!("{m:?}")).collect();
            text.push_str(&format!("{},{},{}\n", e.degree, e.leading.len(), sample.join(";")));
        }
        write_text(p, &text)?;
    }
    match cli.report {
        Report::Json => print_value(&json!({
            "system": system_hash(&sys),
            "flavor": sys.flavor().tag(),
            "exact": r.exact,
            "lower": r.lower,
            "upper": r.upper,
            "stabilization": r.stabilization,
            "dimensions": r.dimensions.iter().map(|d| json!([d.degree, d.span, d.ideal])).collect::<Vec<_>>(),
        })),
        Report::Csv => {
            println!("system,flavor,exact,lower,upper,stabilization");
            println!("{},{},{},{},{},{}", system_hash(&sys), sys.flavor(), opt(r.exact), r.lower, opt(r.upper), opt(r.stabilization));
        }
    }
    Ok(())
}

fn cmd_bounds(cli: &Cli, path: &Path) -> CliResult<()> {
    let sys = io::parse_system(&read_text(path)?)?;
    let f = sys.univariate().ok_or_else(|| usage("bounds needs a univariate system"))?;
    let b = bound_report(f)?;
    match cli.report {
        Report::Json => print_value(&bounds_json(&b)),
        Report::Csv => {
            println!("{BOUNDS_CSV_HEADER}");
            println!("{}", bounds_csv(&b));
        }
    }
    Ok(())
}

fn parse_digits(text: &str, n: usize, q: u32) -> CliResult<Vec<Elem>> {
    let digits: Vec<Elem> = text
        .split(',')
        .map(|s| s.trim().parse::<u32>().ok().filter(|&d| d < q).map(Elem))
        .collect::<Option<_>>()
        .ok_or_else(|| usage(format!("expected {n} comma-separated digits below {q}")))?;
    if digits.len() != n {
        return Err(usage(format!("expected {n} digits, got {}", digits.len())));
    }
    Ok(digits)
}

fn show_digits(v: &[Elem]) -> String {
    v.iter().map(|e| e.0.to_string()).collect::<Vec<_>>().join(",")
}

fn load_public(path: &Path) -> CliResult<HfePublicKey> {
    let v = io::parse_json(&read_text(path)?)?;
    if v.get("public").is_some() {
        Ok(io::keypair_from_json(&v)?.public)
    } else {
        Ok(io::public_key_from_json(&v)?)
    }
}

fn cmd_hfe(cli: &Cli, cmd: &HfeCommand) -> CliResult<()> {
    match cmd {
        HfeCommand::Keygen { q, n, t, out } => {
            let kp = hfe_keygen(*q, *n, *t, cli.seed)?;
            let text = io::to_canonical_string(&io::keypair_to_json(&kp));
            match out {
                Some(p) => write_text(p, &format!("{text}\n"))?,
                None => println!("{text}"),
            }
        }
        HfeCommand::Encrypt(a) => {
            let pk = load_public(&a.key)?;
            let x = parse_digits(&a.text.plaintext, pk.n, pk.q)?;
            println!("{}", show_digits(&hfe_encrypt(&pk, &x)?));
        }
        HfeCommand::Decrypt(a) => {
            let v = io::parse_json(&read_text(&a.key)?)?;
            let sk = io::keypair_from_json(&v)?.private;
            let c = parse_digits(&a.text.ciphertext, sk.field.degree(), sk.field.characteristic())?;
            for x in hfe_decrypt(&sk, &c)? {
                println!("{}", show_digits(&x));
            }
        }
        HfeCommand::Attack { io: a, dmax } => {
            let pk = load_public(&a.key)?;
            let c = parse_digits(&a.text.ciphertext, pk.n, pk.q)?;
            let d_max = dmax.unwrap_or((pk.q - 1) * pk.n as u32 + 4);
            let r = hfe_attack(&pk, &c, d_max)?;
            let k = Field::prime(pk.q)?;
            print_value(&json!({
                "candidates": r.candidates.iter().map(|x| show_digits(x)).collect::<Vec<_>>(),
                "solving_degree": r.solve.degree,
                "read_from_rows": r.read_from_rows,
                "solution": r.solve.solution.as_ref().map(|s| io::elems_to_json(&k, s)),
                "sd_fake_bound": r.sd_fake_bound,
                "lfd_bound": r.lfd_bound,
                "final_rank": r.solve.final_rank,
                "final_cols": r.solve.final_cols,
            }));
        }
    }
    Ok(())
}

fn thread_count(flag: Option<usize>) -> CliResult<Option<usize>> {
    match std::env::var("DESCENTLAB_THREADS") {
        Ok(v) => v.trim().parse::<usize>().map(Some).map_err(|_| usage(format!("DESCENTLAB_THREADS={v:?} is not a number"))),
        Err(_) => Ok(flag),
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    if let Some(t) = thread_count(cli.threads)? {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(|e| usage(e.to_string()))?;
    }
    match &cli.command {
        Command::Descend { system, flavor } => {
            let sys = io::parse_system(&read_text(system)?)?;
            let f = sys.univariate().ok_or_else(|| usage("descend needs a univariate system"))?;
            println!("{}", io::write_system(&build_system(f, parse_flavor(flavor)?)?));
            Ok(())
        }
        Command::Solve { system, flavor, order, dmax, trace } => cmd_solve(cli, system, flavor, *order, *dmax, trace.as_deref()),
        Command::Lfd { system, flavor, dmax, events } => cmd_lfd(cli, system, flavor, *dmax, events.as_deref()),
        Command::Bounds { system } => cmd_bounds(cli, system),
        Command::Hfe(h) => cmd_hfe(cli, h),
        Command::Sweep(a) => sweep::run(cli.seed, a),
        Command::VerifyPaper(a) => verify::run(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Claim(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
