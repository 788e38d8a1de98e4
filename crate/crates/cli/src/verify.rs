//! Fixed battery of worked examples, one verdict line per claim.

use std::sync::Arc;

use clap::Args;
use descentlab_core::bounds::bound_lfd_main;
use descentlab_core::descent::{build_system, fake_descend, Flavor};
use descentlab_core::engine::{in_vd, solving_degree};
use descentlab_core::fields::{Elem, Field};
use descentlab_core::lastfall::{last_fall_exact, membership_lemma_suite};
use descentlab_core::multipoly::{AffineMap, Monomial, MultiPoly, TermOrder};
use descentlab_core::unipoly::UniPoly;

use crate::{usage, CliResult, Failure};

#[derive(Args)]
pub struct VerifyArgs {
    /// Run a single claim.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(CLAIMS))]
    only: Option<String>,
    /// Replace the modulus of the extension-field fixtures, low degree first.
    #[arg(long, value_delimiter = ',')]
    modulus: Option<Vec<u32>>,
}

pub const CLAIMS: [&str; 5] = ["single-generator", "lex-gap", "coordinate-change", "gf4-remainder", "boundachieved"];

fn poly(k: &Arc<Field>, n: usize, terms: &[(&[u32], u32)]) -> MultiPoly {
    MultiPoly::from_terms(k, n, terms.iter().map(|(e, c)| (Monomial::from_exps(e), Elem(*c))))
}

fn extension(p: u32, modulus: &[u32], fixture: &Option<Vec<u32>>) -> CliResult<Arc<Field>> {
    Ok(Field::new(p, fixture.clone().unwrap_or_else(|| modulus.to_vec()), None)?)
}

/// sd equals deg g under both orders while the last fall degree is 0.
fn single_generator() -> CliResult<(bool, String)> {
    let k = Field::prime(3)?;
    let g = poly(&k, 2, &[(&[2, 1], 1), (&[0, 1], 2), (&[0, 0], 1)]);
    let mut ok = true;
    let mut notes = Vec::new();
    for order in [TermOrder::Drl, TermOrder::Lex] {
        let sd = solving_degree(std::slice::from_ref(&g), order, 6)?.degree;
        ok &= sd == 3;
        notes.push(format!("sd_{}={sd}", order.name()));
    }
    let lf = last_fall_exact(std::slice::from_ref(&g), 6)?;
    ok &= lf.exact == Some(0);
    notes.push(format!("d_E={:?}", lf.exact));
    Ok((ok, format!("{} (want 3, 3, Some(0))", notes.join(", "))))
}

fn lex_gap() -> CliResult<(bool, String)> {
    let k = Field::prime(3)?;
    let mut ok = true;
    let mut notes = Vec::new();
    for d in 3..=5u32 {
        let g1 = poly(&k, 3, &[(&[1, 0, 0], 1), (&[1, 0, d - 1], 2)]);
        let g2 = poly(&k, 3, &[(&[0, 1, 0], 1), (&[0, 0, d], 2)]);
        let sys = [g1, g2];
        let f = poly(&k, 3, &[(&[1, 0, 1], 1), (&[1, 1, 0], 2)]);
        let sd = solving_degree(&sys, TermOrder::Lex, d + 2)?.degree;
        let outside = !in_vd(&f, &sys, d)?;
        let lower = last_fall_exact(&sys, d + 1)?.lower;
        ok &= sd == d && outside && lower > d;
        notes.push(format!("d={d}: sd_lex={sd}, d_E>={lower}"));
    }
    Ok((ok, notes.join("; ")))
}

fn coordinate_change() -> CliResult<(bool, String)> {
    let k = Field::prime(3)?;
    let e = [poly(&k, 2, &[(&[2, 0], 1)]), poly(&k, 2, &[(&[0, 2], 1)])];
    let phi = AffineMap::new(&k, vec![vec![Elem(1), Elem(0)], vec![Elem(1), Elem(1)]], vec![Elem(0), Elem(0)])?;
    let pe = e.iter().map(|p| phi.apply(p)).collect::<descentlab_core::Result<Vec<_>>>()?;
    let before = solving_degree(&e, TermOrder::Drl, 6)?.degree;
    let after = solving_degree(&pe, TermOrder::Drl, 6)?.degree;
    Ok((before == 2 && after == 3, format!("sd(E)={before}, sd(phi E)={after} (want 2 < 3)")))
}

fn gf4_remainder(modulus: &Option<Vec<u32>>) -> CliResult<(bool, String)> {
    let k = extension(2, &[1, 1, 1], modulus)?;
    let t = k.generator_t();
    let h1 = UniPoly::from_terms(&k, [(3, Elem::ONE), (2, t), (1, Elem::ONE), (0, k.mul(t, t))]);
    let h2 = UniPoly::from_terms(&k, [(1, Elem::ONE), (0, Elem::ONE)]);
    let diff = fake_descend(&h1).sub(&fake_descend(&UniPoly::one(&k)))?;
    let sys = build_system(std::slice::from_ref(&h2), Flavor::FakeFbarField)?;
    let polys = sys.multivariate().unwrap_or(&[]);
    let member = in_vd(&diff, polys, 2)?;
    let report = membership_lemma_suite(polys, &h1, &h2)?;
    Ok((member && report.u == 2, format!("difference in V_2={member}, u={} (want 2)", report.u)))
}

fn boundachieved(modulus: &Option<Vec<u32>>) -> CliResult<(bool, String)> {
    let k = extension(2, &[1, 0, 1, 0, 0, 1], modulus)?;
    let t = k.generator_t();
    let f = [UniPoly::from_terms(&k, [(11, k.pow(t, 16)), (0, Elem::ONE)]), UniPoly::from_terms(&k, [(31, t), (0, Elem::ONE)])];
    let bound = bound_lfd_main(&f)?;
    let sys = build_system(&f, Flavor::WeilFprimeField)?;
    let sd = solving_degree(sys.multivariate().unwrap_or(&[]), TermOrder::Drl, 12)?.degree;
    Ok((sd == 6 && bound == (11, 6), format!("sd_drl={sd} (want 6), bound={bound:?} (want (11, 6))")))
}

pub fn run(a: &VerifyArgs) -> CliResult<()> {
    let mut first_failure = None;
    for name in CLAIMS {
        if a.only.as_deref().is_some_and(|o| o != name) {
            continue;
        }
        let (ok, detail) = match name {
            "single-generator" => single_generator(),
            "lex-gap" => lex_gap(),
            "coordinate-change" => coordinate_change(),
            "gf4-remainder" => gf4_remainder(&a.modulus),
            "boundachieved" => boundachieved(&a.modulus),
            _ => return Err(usage(format!("unknown claim {name}"))),
        }
        .map_err(|e| match e {
            Failure::Usage(m) | Failure::Claim(m) => Failure::Usage(format!("{name}: {m}")),
        })?;
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok && first_failure.is_none() {
            first_failure = Some(name);
        }
    }
    match first_failure {
        Some(name) => Err(Failure::Claim(format!("claim {name} failed"))),
        None => Ok(()),
    }
}
