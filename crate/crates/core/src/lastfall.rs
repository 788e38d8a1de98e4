//! Exact last fall degrees through a finite certificate.
//!
//! With `G` the reduced DRL basis, `I_{<=j}` has one element per monomial of
//! degree at most `j` in the leading-term ideal. Once `V_j` contains `G`,
//! every `f` in the ideal of degree `e >= j` is a combination of multiples
//! `u g` of degree at most `e`, so `V_e = I_{<=e}` from there on. The last
//! fall degree is one past the last degree below that point where
//! `V_j != I_{<=j}`.

use std::collections::HashSet;

use crate::bounds::remainder_threshold;
use crate::descent::{build_system, fake_descend, Flavor};
use crate::engine::{buchberger_gb, compute_wd, GroebnerBasis, WdSequence};
use crate::error::{Error, Result};
use crate::multipoly::{monomials_up_to, Monomial, MultiPoly, TermOrder};
use crate::unipoly::UniPoly;

/// New leading monomials of degree below `degree` that appear in `W_degree`
/// but not in `W_{degree-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FallEvent {
    pub degree: u32,
    pub leading: Vec<Monomial>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionRow {
    pub degree: u32,
    pub span: usize,
    pub ideal: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LastFallReport {
    /// The last fall degree, when the certificate closed within the cap.
    pub exact: Option<u32>,
    pub lower: u32,
    pub upper: Option<u32>,
    /// First degree whose `V_j` contains the reduced DRL basis.
    pub stabilization: Option<u32>,
    pub events: Vec<FallEvent>,
    pub dimensions: Vec<DimensionRow>,
    pub basis: GroebnerBasis,
}

impl LastFallReport {
    /// `(lower, upper)` as a display pair; `upper` is `None` when unknown.
    pub fn bracket(&self) -> (u32, Option<u32>) {
        (self.lower, self.upper)
    }
}

fn ideal_dimension(nvars: usize, leads: &[Monomial], j: u32) -> usize {
    if leads.iter().any(|l| l.degree() == 0) {
        return monomials_up_to(nvars, j).len();
    }
    monomials_up_to(nvars, j).iter().filter(|m| leads.iter().any(|l| l.divides(m))).count()
}

pub fn last_fall_exact(polys: &[MultiPoly], d_max: u32) -> Result<LastFallReport> {
    let basis = buchberger_gb(polys, TermOrder::Drl);
    last_fall_with_basis(polys, d_max, basis)
}

pub fn last_fall_with_basis(polys: &[MultiPoly], d_max: u32, basis: GroebnerBasis) -> Result<LastFallReport> {
    let nvars = polys.first().ok_or(Error::EmptyOrConstant)?.nvars();
    let leads = basis.leading_monomials();
    let mut seq = WdSequence::new(polys, TermOrder::Drl)?;
    let mut events = Vec::new();
    let mut dimensions = Vec::new();
    let mut last_gap: Option<u32> = None;
    let mut prev: HashSet<Monomial> = HashSet::new();
    for j in 0..=d_max {
        let w = seq.advance();
        let here = w.leading_monomials();
        let fresh: Vec<Monomial> = here.iter().filter(|m| m.degree() < j && !prev.contains(m)).copied().collect();
        if !fresh.is_empty() {
            events.push(FallEvent { degree: j, leading: fresh });
        }
        prev = here.into_iter().collect();
        let span = w.rank();
        let ideal = ideal_dimension(nvars, &leads, j);
        dimensions.push(DimensionRow { degree: j, span, ideal });
        if span != ideal {
            last_gap = Some(j);
        }
        let closed = basis.polys.iter().all(|g| g.degree().unwrap_or(0) <= j && w.contains(g).unwrap_or(false));
        if closed {
            let d = last_gap.map_or(0, |g| g + 1);
            return Ok(LastFallReport { exact: Some(d), lower: d, upper: Some(d), stabilization: Some(j), events, dimensions, basis });
        }
    }
    let lower = last_gap.map_or(0, |g| g + 1);
    Ok(LastFallReport { exact: None, lower, upper: None, stabilization: None, events, dimensions, basis })
}

/// Both sides of the comparison between the last fall degrees of the Weil
/// descent and of the fake descent, each with field equations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelateWeilReport {
    pub weil: LastFallReport,
    pub fake: LastFallReport,
    pub q: u32,
    /// Largest degree of the descended polynomials.
    pub descent_degree: u32,
    pub lhs: Option<u32>,
    pub rhs: Option<u32>,
    pub holds: Option<bool>,
}

pub fn relate_weil_check(polys: &[UniPoly], d_max: u32) -> Result<RelateWeilReport> {
    let weil_sys = build_system(polys, Flavor::WeilFprimeField)?;
    let fake_sys = build_system(polys, Flavor::FakeFbarField)?;
    let q = weil_sys.q();
    let descended = build_system(polys, Flavor::WeilFprime)?;
    let descent_degree = descended.max_degree();
    let weil = last_fall_exact(weil_sys.multivariate().expect("multivariate"), d_max)?;
    let fake = last_fall_exact(fake_sys.multivariate().expect("multivariate"), d_max)?;
    let side = |r: &LastFallReport| r.exact.map(|d| d.max(q).max(descent_degree));
    let (lhs, rhs) = (side(&weil), side(&fake));
    let holds = match (lhs, rhs) {
        (Some(l), Some(r)) => Some(l <= r),
        (None, Some(r)) => (weil.lower.max(q).max(descent_degree) > r).then_some(false),
        _ => None,
    };
    Ok(RelateWeilReport { weil, fake, q, descent_degree, lhs, rhs, holds })
}

/// Outcome of the sum, product and remainder membership checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipReport {
    pub sum_degree: u32,
    pub product_degree: u32,
    pub u: u32,
    /// Whether `h̄_2` lies in `V_u`; the remainder clause applies only then.
    pub divisor_in_vu: bool,
    pub remainder_degree: u32,
    pub remainder: Option<bool>,
    /// The remainder clause one degree lower, recorded but not required.
    pub remainder_below: Option<bool>,
}

fn member(diff: &MultiPoly, polys: &[MultiPoly], d: u32) -> Result<bool> {
    if diff.degree().unwrap_or(0) > d {
        return Ok(false);
    }
    compute_wd(polys, d, TermOrder::Drl)?.contains(diff)
}

/// Checks, in `V` of the given fake-descent system:
/// `h̄_1 + h̄_2` against the descent of the sum, `h̄_1 h̄_2` against the
/// descent of the product, and, when `h̄_2` lies in `V_u`, the descent of
/// `h_1 mod h_2` against `h̄_1` in degree `max(w(h_1), u)`.
pub fn membership_lemma_suite(polys: &[MultiPoly], h1: &UniPoly, h2: &UniPoly) -> Result<MembershipReport> {
    let (b1, b2) = (fake_descend(h1), fake_descend(h2));
    let (d1, d2) = (b1.degree().unwrap_or(0), b2.degree().unwrap_or(0));

    let sum_degree = d1.max(d2);
    let diff = fake_descend(&h1.add(h2)?).sub(&b1.add(&b2)?)?;
    if !member(&diff, polys, sum_degree)? {
        return Err(Error::MembershipFailed("sum".into()));
    }

    let product_degree = d1 + d2;
    let diff = fake_descend(&h1.mul(h2)?).sub(&b1.mul(&b2)?)?;
    if !member(&diff, polys, product_degree)? {
        return Err(Error::MembershipFailed("product".into()));
    }

    let q = h1.field().characteristic();
    let deg2 = h2.degree().finite().ok_or(Error::ZeroPolynomial)?;
    let u = remainder_threshold(q, deg2.max(1));
    let divisor_in_vu = member(&b2, polys, u)?;
    let remainder_degree = h1.weight()?.max(u);
    let (mut remainder, mut remainder_below) = (None, None);
    if divisor_in_vu {
        let diff = fake_descend(&h1.rem(h2)?).sub(&b1)?;
        let ok = member(&diff, polys, remainder_degree)?;
        if !ok {
            return Err(Error::MembershipFailed("remainder".into()));
        }
        remainder = Some(ok);
        if remainder_degree > 0 {
            remainder_below = Some(member(&diff, polys, remainder_degree - 1)?);
        }
    }
    Ok(MembershipReport { sum_degree, product_degree, u, divisor_in_vu, remainder_degree, remainder, remainder_below })
}

/// Fake descents of the Euclidean remainders of `gcd(X^{q^n} - X, f)` and
/// where they fall.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GcdRemainderReport {
    pub u: u32,
    /// `(degree of g_j, degree of ḡ_j, ḡ_j in V_u)` for `j >= 1`.
    pub remainders: Vec<(u64, u32, bool)>,
}

impl GcdRemainderReport {
    pub fn all_in_vu(&self) -> bool {
        self.remainders.iter().all(|r| r.2)
    }
}

/// Runs the Euclidean algorithm on `X^{q^n} - X` and `f` and tests every
/// remainder's fake descent against `V_u` of the fake descent of `{f}` with
/// cyclic field equations.
pub fn gcd_remainders_in_vu(f: &UniPoly) -> Result<GcdRemainderReport> {
    let k = f.field();
    let sys = build_system(std::slice::from_ref(f), Flavor::FakeFbarField)?;
    let polys = sys.multivariate().expect("multivariate");
    let deg = f.degree().finite().ok_or(Error::ZeroPolynomial)?;
    let u = remainder_threshold(k.characteristic(), deg);
    let (_, trace) = UniPoly::field_equation(k).gcd(f)?;
    let w = compute_wd(polys, u, TermOrder::Drl)?;
    let mut remainders = Vec::new();
    for g in trace.computed() {
        let bar = fake_descend(g);
        let bd = bar.degree().unwrap_or(0);
        let inside = bd <= u && w.contains(&bar)?;
        remainders.push((g.degree().finite().unwrap_or(0), bd, inside));
    }
    Ok(GcdRemainderReport { u, remainders })
}
