//! Corpus runner. Rows are computed in parallel and printed in instance
//! order.

use std::path::PathBuf;

use clap::Args;
use descentlab_core::bounds::bound_report;
use descentlab_core::descent::{build_system, Flavor, PolySystem};
use descentlab_core::engine::solving_degree;
use descentlab_core::fields::{Elem, Field};
use descentlab_core::io;
use descentlab_core::lastfall::last_fall_exact;
use descentlab_core::unipoly::UniPoly;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;

use crate::{bounds_csv, default_dmax, multivariate_of, parse_flavor, system_hash, usage, CliResult, Order, BOUNDS_CSV_HEADER};

pub const SCHEMA: &str = "# descentlab-sweep v1";

#[derive(Args)]
pub struct SweepArgs {
    /// JSON file with the same fields as the flags; flags are then ignored.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    q: u32,
    /// Extension degrees, comma separated.
    #[arg(long, default_value = "3,4,5", value_delimiter = ',')]
    n: Vec<usize>,
    /// Instances per extension degree.
    #[arg(long, default_value_t = 20)]
    count: usize,
    /// Polynomials per instance.
    #[arg(long, default_value_t = 1)]
    polys: usize,
    /// Terms per polynomial.
    #[arg(long, default_value_t = 3)]
    terms: usize,
    /// Degree cap; defaults to q^n - 1.
    #[arg(long)]
    max_degree: Option<u64>,
    /// System files to run instead of a generated corpus.
    #[arg(long, value_delimiter = ',')]
    inputs: Vec<PathBuf>,
    #[arg(long, default_value = "Fprime_f")]
    flavor: String,
    #[arg(long, value_enum, default_value_t = Order::Drl)]
    order: Order,
    #[arg(long)]
    dmax: Option<u32>,
}

/// The validated experiment description.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_q")]
    pub q: u32,
    #[serde(default = "default_n")]
    pub n: Vec<usize>,
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default = "default_one")]
    pub polys: usize,
    #[serde(default = "default_terms")]
    pub terms: usize,
    #[serde(default)]
    pub max_degree: Option<u64>,
    #[serde(default)]
    pub inputs: Vec<PathBuf>,
    #[serde(default = "default_flavor")]
    pub flavor: String,
    #[serde(default = "default_order")]
    pub order: String,
    #[serde(default)]
    pub dmax: Option<u32>,
    #[serde(default)]
    pub threads: Option<usize>,
}

fn default_q() -> u32 {
    2
}
fn default_n() -> Vec<usize> {
    vec![3, 4, 5]
}
fn default_count() -> usize {
    20
}
fn default_one() -> usize {
    1
}
fn default_terms() -> usize {
    3
}
fn default_flavor() -> String {
    "Fprime_f".into()
}
fn default_order() -> String {
    "drl".into()
}

impl ExperimentConfig {
    fn from_args(seed: u64, a: &SweepArgs) -> CliResult<ExperimentConfig> {
        if let Some(p) = &a.config {
            let text = std::fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            let mut cfg: ExperimentConfig = serde_json::from_str(&text).map_err(|e| usage(format!("config: {e}")))?;
            cfg.seed.get_or_insert(seed);
            return Ok(cfg);
        }
        Ok(ExperimentConfig {
            seed: Some(seed),
            q: a.q,
            n: a.n.clone(),
            count: a.count,
            polys: a.polys,
            terms: a.terms,
            max_degree: a.max_degree,
            inputs: a.inputs.clone(),
            flavor: a.flavor.clone(),
            order: match a.order {
                Order::Drl => "drl".into(),
                Order::Lex => "lex".into(),
            },
            dmax: a.dmax,
            threads: None,
        })
    }

    fn validate(&self) -> CliResult<(Flavor, Order)> {
        let flavor = parse_flavor(&self.flavor)?;
        if flavor.is_univariate() {
            return Err(usage("sweep needs a multivariate flavor"));
        }
        let order = match self.order.to_ascii_lowercase().as_str() {
            "drl" => Order::Drl,
            "lex" => Order::Lex,
            o => return Err(usage(format!("unknown order {o:?}"))),
        };
        if self.inputs.is_empty() {
            Field::prime(self.q).map_err(|e| usage(e.to_string()))?;
            if self.n.iter().any(|&n| n == 0 || (self.q as u64).checked_pow(n as u32).is_none_or(|s| s > 1 << 16)) {
                return Err(usage("every n must satisfy 1 <= n and q^n <= 2^16"));
            }
            if self.polys == 0 || self.terms == 0 {
                return Err(usage("polys and terms must be positive"));
            }
        }
        Ok((flavor, order))
    }
}

/// One instance: a label, its seed, and the univariate input.
struct Instance {
    seed: Option<u64>,
    system: CliResult<PolySystem>,
}

/// A sparse system drawn from `seed` alone, so a row can be replayed with
/// `--seed <row seed> --n <row n> --count 1`.
pub fn generate(q: u32, n: usize, polys: usize, terms: usize, max_degree: Option<u64>, seed: u64) -> CliResult<Vec<UniPoly>> {
    let k = Field::with_default_modulus(q, n)?;
    let top = max_degree.unwrap_or(k.size() - 1).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < polys {
        let mut t: Vec<(u64, Elem)> = vec![(rng.gen_range(1..=top), Elem(rng.gen_range(1..k.size() as u32)))];
        for _ in 1..terms {
            t.push((rng.gen_range(0..=top), Elem(rng.gen_range(1..k.size() as u32))));
        }
        let f = UniPoly::from_terms(&k, t);
        if !f.is_constant() {
            out.push(f);
        }
    }
    Ok(out)
}

/// Bound columns after `q,n`, which the row already carries.
fn bound_columns() -> &'static str {
    BOUNDS_CSV_HEADER.strip_prefix("q,n,").unwrap_or(BOUNDS_CSV_HEADER)
}

pub fn header() -> String {
    format!(
        "{SCHEMA}\ninstance,seed,system,q,n,flavor,order,sd,d_e,d_e_lower,d_e_upper,{},max_rows,max_cols,max_rank,within_bounds,error",
        bound_columns()
    )
}

fn row(index: usize, inst: &Instance, flavor: Flavor, order: Order, dmax: Option<u32>) -> String {
    let seed = inst.seed.map_or(String::new(), |s| s.to_string());
    let fail = |hash: &str, q: String, n: String, msg: String| {
        let blanks = ",".repeat(bound_columns().matches(',').count() + 8);
        format!("{index},{seed},{hash},{q},{n},{flavor},{},,{blanks},{}", order_name(order), msg.replace([',', '\n'], ";"))
    };
    let sys = match &inst.system {
        Ok(s) => s,
        Err(e) => return fail("", String::new(), String::new(), message(e)),
    };
    let (q, n) = (sys.q().to_string(), sys.n().to_string());
    let hash = system_hash(sys);
    let result: CliResult<String> = (|| {
        let multi = multivariate_of(sys, flavor)?;
        let polys = multi.multivariate().unwrap_or(&[]);
        if polys.is_empty() {
            return Err(usage("empty system"));
        }
        let d_max = dmax.unwrap_or_else(|| default_dmax(polys));
        let sd = solving_degree(polys, order.into(), d_max)?;
        let lf = last_fall_exact(polys, d_max)?;
        let bounds = sys.univariate().map(bound_report).transpose()?;
        let (max_rows, max_cols, max_rank) = sd.trace.iter().fold((0, 0, 0), |a, t| (a.0.max(t.rows), a.1.max(t.cols), a.2.max(t.rank)));
        let within = bounds.as_ref().and_then(|b| match flavor {
            Flavor::WeilFprimeField => lf.exact.map(|e| e <= b.lfd_main),
            Flavor::FakeFbarField if b.n > 0 && sys.univariate().is_some_and(|f| f.len() == 1) => Some(sd.degree <= b.sd_fake_general),
            _ => None,
        });
        let opt = |v: Option<u32>| v.map_or(String::new(), |x| x.to_string());
        let bcsv = match &bounds {
            Some(b) => bounds_csv(b).splitn(3, ',').nth(2).unwrap_or_default().to_string(),
            None => ",".repeat(bound_columns().matches(',').count()),
        };
        Ok(format!(
            "{index},{seed},{hash},{q},{n},{flavor},{},{},{},{},{},{bcsv},{max_rows},{max_cols},{max_rank},{},",
            order_name(order),
            sd.degree,
            opt(lf.exact),
            lf.lower,
            opt(lf.upper),
            within.map_or(String::new(), |w| w.to_string()),
        ))
    })();
    result.unwrap_or_else(|e| fail(&hash, q.clone(), n.clone(), message(&e)))
}

fn order_name(o: Order) -> &'static str {
    match o {
        Order::Drl => "drl",
        Order::Lex => "lex",
    }
}

fn message(e: &crate::Failure) -> String {
    match e {
        crate::Failure::Claim(m) | crate::Failure::Usage(m) => m.clone(),
    }
}

/// Builds the CSV text for a validated configuration.
pub fn render(cfg: &ExperimentConfig) -> CliResult<String> {
    let (flavor, order) = cfg.validate()?;
    let base = cfg.seed.unwrap_or(0);
    let instances: Vec<Instance> = if cfg.inputs.is_empty() {
        cfg.n
            .iter()
            .flat_map(|&n| (0..cfg.count as u64).map(move |i| (n, base.wrapping_add(i))))
            .map(|(n, seed)| Instance {
                seed: Some(seed),
                system: generate(cfg.q, n, cfg.polys, cfg.terms, cfg.max_degree, seed).and_then(|f| Ok(build_system(&f, Flavor::UnivariateF)?)),
            })
            .collect()
    } else {
        cfg.inputs
            .iter()
            .map(|p| Instance {
                seed: None,
                system: std::fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display()))).and_then(|t| Ok(io::parse_system(&t)?)),
            })
            .collect()
    };
    let work = || instances.par_iter().enumerate().map(|(i, inst)| row(i, inst, flavor, order, cfg.dmax)).collect::<Vec<_>>();
    let rows = match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new().num_threads(t).build().map_err(|e| usage(e.to_string()))?.install(work),
        None => work(),
    };
    let mut out = header();
    out.push('\n');
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    Ok(out)
}

pub fn run(seed: u64, a: &SweepArgs) -> CliResult<()> {
    let cfg = ExperimentConfig::from_args(seed, a)?;
    print!("{}", render(&cfg)?);
    Ok(())
}
