//! Sparse univariate polynomials over GF(q^n).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fields::{Elem, Field};

/// Degree of a polynomial; the zero polynomial has degree minus infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    MinusInfinity,
    Finite(u64),
}

impl Degree {
    pub fn finite(self) -> Option<u64> {
        match self {
            Degree::MinusInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::MinusInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Clone)]
pub struct UniPoly {
    field: Arc<Field>,
    /// Strictly decreasing exponents, nonzero coefficients.
    terms: Vec<(u64, Elem)>,
}

impl PartialEq for UniPoly {
    fn eq(&self, other: &Self) -> bool {
        self.field.same_field(&other.field) && self.terms == other.terms
    }
}
impl Eq for UniPoly {}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| format!("{:?}*X^{e}", self.field.digits(*c)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Euclidean remainder sequence `g_{-1}, g_0, g_1, ..., g_k = 0`.
#[derive(Clone, Debug)]
pub struct GcdTrace {
    pub remainders: Vec<UniPoly>,
    pub gcd: UniPoly,
}

impl GcdTrace {
    /// The remainders `g_1, g_2, ...` produced by division steps.
    pub fn computed(&self) -> &[UniPoly] {
        &self.remainders[2..]
    }
}

/// Sum of base-q digits of `e`.
pub fn weight_exp(mut e: u64, q: u32) -> u32 {
    let q = q as u64;
    let mut w = 0;
    while e > 0 {
        w += (e % q) as u32;
        e /= q;
    }
    w
}

// Dense little-endian helpers used by the remainder routines.

fn trim(v: &mut Vec<Elem>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn dense_mul(f: &Field, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Elem::ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    out
}

/// Reduces `a` in place modulo the monic dense polynomial `m`.
fn dense_reduce_monic(f: &Field, a: &mut Vec<Elem>, m: &[Elem]) {
    let dm = m.len() - 1;
    while a.len() > dm {
        let top = *a.last().unwrap();
        if !top.is_zero() {
            let shift = a.len() - 1 - dm;
            for (i, &mi) in m.iter().enumerate() {
                a[shift + i] = f.sub(a[shift + i], f.mul(top, mi));
            }
        }
        a.pop();
    }
    trim(a);
}

impl UniPoly {
    pub fn zero(field: &Arc<Field>) -> UniPoly {
        UniPoly { field: field.clone(), terms: Vec::new() }
    }

    pub fn constant(field: &Arc<Field>, c: Elem) -> UniPoly {
        UniPoly::monomial(field, 0, c)
    }

    pub fn one(field: &Arc<Field>) -> UniPoly {
        UniPoly::constant(field, Elem::ONE)
    }

    pub fn monomial(field: &Arc<Field>, e: u64, c: Elem) -> UniPoly {
        let terms = if c.is_zero() { Vec::new() } else { vec![(e, c)] };
        UniPoly { field: field.clone(), terms }
    }

    /// The polynomial `X`.
    pub fn x(field: &Arc<Field>) -> UniPoly {
        UniPoly::monomial(field, 1, Elem::ONE)
    }

    /// `X^{q^n} - X` for the field's own size.
    pub fn field_equation(field: &Arc<Field>) -> UniPoly {
        UniPoly::from_terms(field, [(field.size(), Elem::ONE), (1, field.neg(Elem::ONE))])
    }

    /// Builds a canonical polynomial, summing repeated exponents.
    pub fn from_terms(field: &Arc<Field>, terms: impl IntoIterator<Item = (u64, Elem)>) -> UniPoly {
        let mut acc: BTreeMap<u64, Elem> = BTreeMap::new();
        for (e, c) in terms {
            let slot = acc.entry(e).or_insert(Elem::ZERO);
            *slot = field.add(*slot, c);
        }
        let terms = acc.into_iter().rev().filter(|(_, c)| !c.is_zero()).collect();
        UniPoly { field: field.clone(), terms }
    }

    fn from_dense(field: &Arc<Field>, v: &[Elem]) -> UniPoly {
        let terms = v
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, &c)| (e as u64, c))
            .collect();
        UniPoly { field: field.clone(), terms }
    }

    fn to_dense(&self) -> Vec<Elem> {
        let Some(d) = self.degree().finite() else {
            return Vec::new();
        };
        let mut v = vec![Elem::ZERO; d as usize + 1];
        for &(e, c) in &self.terms {
            v[e as usize] = c;
        }
        v
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn terms(&self) -> &[(u64, Elem)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Degree {
        self.terms.first().map_or(Degree::MinusInfinity, |t| Degree::Finite(t.0))
    }

    /// True for the zero polynomial and nonzero constants.
    pub fn is_constant(&self) -> bool {
        self.degree() <= Degree::Finite(0)
    }

    pub fn leading_coeff(&self) -> Option<Elem> {
        self.terms.first().map(|t| t.1)
    }

    pub fn coeff(&self, e: u64) -> Elem {
        self.terms
            .iter()
            .find(|t| t.0 == e)
            .map_or(Elem::ZERO, |t| t.1)
    }

    fn check(&self, other: &UniPoly) -> Result<()> {
        if self.field.same_field(&other.field) {
            Ok(())
        } else {
            Err(Error::MismatchedField)
        }
    }

    pub fn add(&self, other: &UniPoly) -> Result<UniPoly> {
        self.check(other)?;
        Ok(UniPoly::from_terms(&self.field, self.terms.iter().chain(other.terms.iter()).copied()))
    }

    pub fn sub(&self, other: &UniPoly) -> Result<UniPoly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> UniPoly {
        self.scale(self.field.neg(Elem::ONE))
    }

    pub fn scale(&self, c: Elem) -> UniPoly {
        let f = &self.field;
        let terms = if c.is_zero() {
            Vec::new()
        } else {
            self.terms.iter().map(|&(e, a)| (e, f.mul(a, c))).collect()
        };
        UniPoly { field: f.clone(), terms }
    }

    pub fn mul(&self, other: &UniPoly) -> Result<UniPoly> {
        self.check(other)?;
        let f = &self.field;
        let prods = self.terms.iter().flat_map(|&(e1, c1)| {
            other.terms.iter().map(move |&(e2, c2)| (e1 + e2, f.mul(c1, c2)))
        });
        Ok(UniPoly::from_terms(f, prods.collect::<Vec<_>>()))
    }

    pub fn monic(&self) -> UniPoly {
        match self.leading_coeff() {
            None => self.clone(),
            Some(lc) => self.scale(self.field.inv(lc).expect("nonzero leading coefficient")),
        }
    }

    /// Quotient and remainder by dense schoolbook long division.
    pub fn div_rem(&self, divisor: &UniPoly) -> Result<(UniPoly, UniPoly)> {
        self.check(divisor)?;
        let Some(dd) = divisor.degree().finite() else {
            return Err(Error::DivisionByZero);
        };
        let f = &self.field;
        let mut r = self.to_dense();
        let b = divisor.to_dense();
        let lc_inv = f.inv(b[dd as usize])?;
        let dd = dd as usize;
        if r.len() <= dd {
            return Ok((UniPoly::zero(f), self.clone()));
        }
        let mut quot = vec![Elem::ZERO; r.len() - dd];
        while r.len() > dd {
            let top = *r.last().unwrap();
            let shift = r.len() - 1 - dd;
            if !top.is_zero() {
                let c = f.mul(top, lc_inv);
                quot[shift] = c;
                for (i, &bi) in b.iter().enumerate() {
                    r[shift + i] = f.sub(r[shift + i], f.mul(c, bi));
                }
            }
            r.pop();
        }
        trim(&mut r);
        Ok((UniPoly::from_dense(f, &quot), UniPoly::from_dense(f, &r)))
    }

    /// Remainder of `self` modulo `divisor`. Uses long division when the
    /// degree gap is moderate, otherwise reduces each term `X^e` by repeated
    /// squaring modulo the divisor.
    pub fn rem(&self, divisor: &UniPoly) -> Result<UniPoly> {
        self.check(divisor)?;
        let Some(dd) = divisor.degree().finite() else {
            return Err(Error::DivisionByZero);
        };
        match self.degree().finite() {
            None => Ok(self.clone()),
            Some(d) if d < dd => Ok(self.clone()),
            Some(d) if d <= 2 * dd + 1024 => Ok(self.div_rem(divisor)?.1),
            Some(_) => self.rem_by_powering(divisor),
        }
    }

    pub(crate) fn rem_by_powering(&self, divisor: &UniPoly) -> Result<UniPoly> {
        self.check(divisor)?;
        let Some(dd) = divisor.degree().finite() else {
            return Err(Error::DivisionByZero);
        };
        let f = &self.field;
        let m = divisor.monic().to_dense();
        let dd = dd as usize;
        let mut acc = vec![Elem::ZERO; dd.max(1)];
        for &(e, c) in &self.terms {
            let r = if (e as usize) < dd {
                let mut v = vec![Elem::ZERO; e as usize + 1];
                v[e as usize] = Elem::ONE;
                v
            } else {
                xpow_mod(f, e, &m)
            };
            for (i, &ri) in r.iter().enumerate() {
                acc[i] = f.add(acc[i], f.mul(c, ri));
            }
        }
        trim(&mut acc);
        Ok(UniPoly::from_dense(f, &acc))
    }

    /// Monic gcd together with the Euclidean remainder sequence starting
    /// from `g_{-1} = self`, `g_0 = other`.
    pub fn gcd(&self, other: &UniPoly) -> Result<(UniPoly, GcdTrace)> {
        self.check(other)?;
        if self.is_zero() && other.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut seq = vec![self.clone(), other.clone()];
        while !seq.last().unwrap().is_zero() {
            let k = seq.len();
            let next = seq[k - 2].rem(&seq[k - 1])?;
            seq.push(next);
        }
        let gcd = seq[seq.len() - 2].monic();
        Ok((gcd.clone(), GcdTrace { remainders: seq, gcd }))
    }

    /// Term-by-term evaluation using field exponentiation.
    pub fn eval(&self, x: Elem) -> Elem {
        let f = &self.field;
        self.terms
            .iter()
            .fold(Elem::ZERO, |acc, &(e, c)| f.add(acc, f.mul(c, f.pow(x, e))))
    }

    /// Horner's rule over the exponent gaps.
    pub fn eval_horner(&self, x: Elem) -> Elem {
        let f = &self.field;
        let mut acc = Elem::ZERO;
        let mut prev: Option<u64> = None;
        for &(e, c) in &self.terms {
            if let Some(pe) = prev {
                acc = f.mul(acc, f.pow(x, pe - e));
            }
            acc = f.add(acc, c);
            prev = Some(e);
        }
        if let Some(pe) = prev {
            acc = f.mul(acc, f.pow(x, pe));
        }
        acc
    }

    /// All roots in the coefficient field, by exhaustive evaluation.
    pub fn roots(&self) -> Result<Vec<Elem>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if self.field.size() > 1 << 16 {
            return Err(Error::FieldTooLarge(self.field.size()));
        }
        Ok(self.field.elements().filter(|&x| self.eval(x).is_zero()).collect())
    }

    /// Maximum base-q digit sum over exponents with nonzero coefficient.
    pub fn weight(&self) -> Result<u32> {
        let q = self.field.characteristic();
        self.terms
            .iter()
            .map(|&(e, _)| weight_exp(e, q))
            .max()
            .ok_or(Error::ZeroPolynomial)
    }
}

/// `X^e mod m` for a monic dense `m` of degree >= 1.
fn xpow_mod(f: &Field, e: u64, m: &[Elem]) -> Vec<Elem> {
    let mut result = vec![Elem::ONE];
    dense_reduce_monic(f, &mut result, m);
    let mut base = vec![Elem::ZERO, Elem::ONE];
    dense_reduce_monic(f, &mut base, m);
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            result = dense_mul(f, &result, &base);
            dense_reduce_monic(f, &mut result, m);
        }
        e >>= 1;
        if e > 0 {
            base = dense_mul(f, &base, &base);
            dense_reduce_monic(f, &mut base, m);
        }
    }
    result
}
