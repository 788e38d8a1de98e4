//! Closed-form degree bounds, in exact integer arithmetic.

use num_bigint::BigUint;

use crate::descent::fake_descend;
use crate::error::{Error, Result};
use crate::unipoly::UniPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogMode {
    Floor,
    Ceil,
}

/// Floor: largest k with q^k <= d. Ceil: smallest k with q^k >= d.
pub fn ilog(q: u64, d: u64, mode: LogMode) -> u32 {
    assert!(q >= 2 && d >= 1, "ilog needs q >= 2 and d >= 1");
    let mut k = 0;
    let mut pow: u128 = 1;
    while pow * q as u128 <= d as u128 {
        pow *= q as u128;
        k += 1;
    }
    match mode {
        LogMode::Floor => k,
        LogMode::Ceil if pow == d as u128 => k,
        LogMode::Ceil => k + 1,
    }
}

pub fn ilog_floor(q: u64, d: u64) -> u32 {
    ilog(q, d, LogMode::Floor)
}

pub fn ilog_ceil(q: u64, d: u64) -> u32 {
    ilog(q, d, LogMode::Ceil)
}

/// `(q-1)(ceil(log_q d) + 1) + 1`, the degree at which Euclidean remainders
/// of a degree-`d` polynomial are reached.
pub fn remainder_threshold(q: u32, d: u64) -> u32 {
    (q - 1) * (ilog_ceil(q as u64, d) + 1) + 1
}

fn check_input(polys: &[UniPoly]) -> Result<()> {
    if polys.is_empty() || polys.iter().any(|f| f.is_constant()) {
        return Err(Error::EmptyOrConstant);
    }
    Ok(())
}

/// The least `d >= min deg f` with `deg f̄ <= (q-1)(ceil(log_q d)+1)+1` for
/// every `f`, together with that bound on the last fall degree of the
/// Weil descent with field equations.
pub fn bound_lfd_main(polys: &[UniPoly]) -> Result<(u64, u32)> {
    check_input(polys)?;
    let q = polys[0].field().characteristic();
    let d0 = polys.iter().filter_map(|f| f.degree().finite()).min().expect("nonempty");
    let top = polys.iter().filter_map(|f| fake_descend(f).degree()).max().unwrap_or(0);
    // Least k with (q-1)(k+1)+1 >= top.
    let mut k = 0u32;
    while (q - 1) * (k + 1) + 1 < top {
        k += 1;
    }
    let from_k = if k == 0 { 1 } else { (q as u64).pow(k - 1) + 1 };
    let d = d0.max(from_k);
    Ok((d, remainder_threshold(q, d)))
}

/// Solving-degree bounds for the fake descent with cyclic field equations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FakeSdBounds {
    /// `deg f̄ + (q-1)n`.
    pub general: u32,
    /// `(q-1)(floor(log_q deg f) + 1 + n)`.
    pub log_form: u32,
    /// `(q-1)n + 2` for polynomials of HFE shape.
    pub hfe_form: Option<u32>,
}

pub fn is_power_of(q: u64, mut e: u64) -> bool {
    if e == 0 {
        return false;
    }
    while e % q == 0 {
        e /= q;
    }
    e == 1
}

/// Every exponent is 0, a power of q, or a sum of two powers of q.
pub fn is_hfe_shape(f: &UniPoly) -> bool {
    let q = f.field().characteristic() as u64;
    f.terms().iter().all(|&(e, _)| {
        if e == 0 || is_power_of(q, e) {
            return true;
        }
        let mut a = 1u64;
        while a < e {
            if is_power_of(q, e - a) {
                return true;
            }
            a = match a.checked_mul(q) {
                Some(x) => x,
                None => break,
            };
        }
        false
    })
}

pub fn bound_sd_fake(f: &UniPoly) -> Result<FakeSdBounds> {
    check_input(std::slice::from_ref(f))?;
    let k = f.field();
    let (q, n) = (k.characteristic(), k.degree() as u32);
    let deg = f.degree().finite().expect("nonzero");
    let general = fake_descend(f).degree().unwrap_or(0) + (q - 1) * n;
    let log_form = (q - 1) * (ilog_floor(q as u64, deg) + 1 + n);
    let hfe_form = is_hfe_shape(f).then_some((q - 1) * n + 2);
    Ok(FakeSdBounds { general, log_form, hfe_form })
}

/// `(q-1)(t+1)+1` for central maps of degree at most `q^t`.
pub fn bound_hfe_corollary(q: u32, t: u32) -> u32 {
    (q - 1) * (t + 1) + 1
}

/// `max{floor(2(q-1)(log_q(D+1)+1)), q}` with `D` the largest degree.
/// The floor equals `2(q-1) + floor(log_q((D+1)^{2(q-1)}))`, which is
/// evaluated on big integers.
pub fn bound_lfd_rival(polys: &[UniPoly]) -> Result<u32> {
    check_input(polys)?;
    let q = polys[0].field().characteristic();
    let top = polys.iter().filter_map(|f| f.degree().finite()).max().expect("nonempty");
    let c = 2 * (q - 1);
    let power = BigUint::from(top + 1).pow(c);
    let qb = BigUint::from(q);
    let mut k = 0u32;
    let mut acc = BigUint::from(1u32);
    loop {
        let next = &acc * &qb;
        if next > power {
            break;
        }
        acc = next;
        k += 1;
    }
    Ok((c + k).max(q))
}

/// Every bound for one univariate system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub q: u32,
    pub n: u32,
    pub max_degree: u64,
    pub min_degree: u64,
    pub max_fake_degree: u32,
    /// The `d` of [`bound_lfd_main`].
    pub main_d: u64,
    pub lfd_main: u32,
    pub lfd_rival: u32,
    /// [`FakeSdBounds`] maximised over the system.
    pub sd_fake_general: u32,
    pub sd_fake_log_form: u32,
    pub sd_fake_hfe: Option<u32>,
    /// Smallest `t` with `max deg <= q^t`, when every polynomial has HFE shape.
    pub hfe_t: Option<u32>,
    pub lfd_hfe: Option<u32>,
    /// Remainder threshold at `main_d`.
    pub u: u32,
}

pub fn bound_report(polys: &[UniPoly]) -> Result<BoundReport> {
    check_input(polys)?;
    let k = polys[0].field();
    let (q, n) = (k.characteristic(), k.degree() as u32);
    let (main_d, lfd_main) = bound_lfd_main(polys)?;
    let per: Vec<FakeSdBounds> = polys.iter().map(bound_sd_fake).collect::<Result<_>>()?;
    let max_degree = polys.iter().filter_map(|f| f.degree().finite()).max().expect("nonempty");
    let min_degree = polys.iter().filter_map(|f| f.degree().finite()).min().expect("nonempty");
    let hfe = polys.iter().all(is_hfe_shape);
    let hfe_t = hfe.then(|| ilog_ceil(q as u64, max_degree));
    Ok(BoundReport {
        q,
        n,
        max_degree,
        min_degree,
        max_fake_degree: polys.iter().filter_map(|f| fake_descend(f).degree()).max().unwrap_or(0),
        main_d,
        lfd_main,
        lfd_rival: bound_lfd_rival(polys)?,
        sd_fake_general: per.iter().map(|b| b.general).max().expect("nonempty"),
        sd_fake_log_form: per.iter().map(|b| b.log_form).max().expect("nonempty"),
        sd_fake_hfe: if hfe { per[0].hfe_form } else { None },
        hfe_t,
        lfd_hfe: hfe_t.map(|t| bound_hfe_corollary(q, t)),
        u: remainder_threshold(q, main_d),
    })
}
