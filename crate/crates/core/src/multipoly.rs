//! Multivariate polynomials, monomials, term orders and affine
//! changes of coordinates.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::fields::{Elem, Field, FieldEmbedding};
use crate::linalg;

pub const MAX_VARS: usize = 16;

/// `X_0^{a_0} ... X_{n-1}^{a_{n-1}}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    exps: [u16; MAX_VARS],
    nvars: u8,
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .exps()
            .iter()
            .enumerate()
            .filter(|(_, &a)| a > 0)
            .map(|(i, &a)| if a == 1 { format!("X{i}") } else { format!("X{i}^{a}") })
            .collect();
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

impl Monomial {
    pub fn one(nvars: usize) -> Monomial {
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} variables");
        Monomial { exps: [0; MAX_VARS], nvars: nvars as u8 }
    }

    pub fn var(nvars: usize, i: usize) -> Monomial {
        let mut m = Monomial::one(nvars);
        m.exps[i] = 1;
        m
    }

    pub fn from_exps(exps: &[u32]) -> Monomial {
        let mut m = Monomial::one(exps.len());
        for (i, &a) in exps.iter().enumerate() {
            m.exps[i] = u16::try_from(a).expect("exponent fits in 16 bits");
        }
        m
    }

    pub fn nvars(&self) -> usize {
        self.nvars as usize
    }

    pub fn exps(&self) -> &[u16] {
        &self.exps[..self.nvars as usize]
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.exps[i] as u32
    }

    pub fn set_exp(&mut self, i: usize, a: u32) {
        self.exps[i] = u16::try_from(a).expect("exponent fits in 16 bits");
    }

    pub fn degree(&self) -> u32 {
        self.exps().iter().map(|&a| a as u32).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut m = *self;
        for i in 0..self.nvars as usize {
            m.exps[i] = self.exps[i].checked_add(other.exps[i]).expect("exponent overflow");
        }
        m
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        (0..self.nvars as usize).all(|i| self.exps[i] <= other.exps[i])
    }

    /// `other / self` when `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        let mut m = *other;
        for i in 0..self.nvars as usize {
            m.exps[i] -= self.exps[i];
        }
        Some(m)
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let mut m = *self;
        for i in 0..self.nvars as usize {
            m.exps[i] = self.exps[i].max(other.exps[i]);
        }
        m
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        (0..self.nvars as usize).all(|i| self.exps[i] == 0 || other.exps[i] == 0)
    }
}

/// All monomials in `nvars` variables of total degree at most `d`.
pub fn monomials_up_to(nvars: usize, d: u32) -> Vec<Monomial> {
    fn rec(i: usize, left: u32, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        if i == cur.nvars() {
            out.push(*cur);
            return;
        }
        for a in 0..=left {
            cur.set_exp(i, a);
            rec(i + 1, left - a, cur, out);
        }
        cur.set_exp(i, 0);
    }
    let mut out = Vec::new();
    let mut cur = Monomial::one(nvars);
    rec(0, d, &mut cur, &mut out);
    out
}

/// Variable precedence is `X_0 > X_1 > ... > X_{n-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TermOrder {
    /// Degree reverse lexicographic.
    Drl,
    Lex,
}

impl TermOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            TermOrder::Drl => a.degree().cmp(&b.degree()).then_with(|| {
                // the smaller exponent in the last differing variable wins
                for i in (0..a.nvars()).rev() {
                    match a.exp(i).cmp(&b.exp(i)) {
                        Ordering::Equal => continue,
                        o => return o.reverse(),
                    }
                }
                Ordering::Equal
            }),
            TermOrder::Lex => a.exps().cmp(b.exps()),
        }
    }

    pub fn is_degree_compatible(&self) -> bool {
        matches!(self, TermOrder::Drl)
    }

    pub fn name(&self) -> &'static str {
        match self {
            TermOrder::Drl => "drl",
            TermOrder::Lex => "lex",
        }
    }
}

#[derive(Clone)]
pub struct MultiPoly {
    field: Arc<Field>,
    nvars: usize,
    terms: BTreeMap<Monomial, Elem>,
}

impl PartialEq for MultiPoly {
    fn eq(&self, other: &Self) -> bool {
        self.field.same_field(&other.field) && self.nvars == other.nvars && self.terms == other.terms
    }
}
impl Eq for MultiPoly {}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .sorted_terms(TermOrder::Drl)
            .iter()
            .map(|(m, c)| {
                let coeff = if self.field.is_prime_field() {
                    format!("{}", c.0)
                } else {
                    format!("{:?}", self.field.digits(*c))
                };
                format!("{coeff}*{m:?}")
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl MultiPoly {
    pub fn zero(field: &Arc<Field>, nvars: usize) -> MultiPoly {
        MultiPoly { field: field.clone(), nvars, terms: BTreeMap::new() }
    }

    pub fn constant(field: &Arc<Field>, nvars: usize, c: Elem) -> MultiPoly {
        MultiPoly::term(field, Monomial::one(nvars), c)
    }

    pub fn one(field: &Arc<Field>, nvars: usize) -> MultiPoly {
        MultiPoly::constant(field, nvars, Elem::ONE)
    }

    pub fn var(field: &Arc<Field>, nvars: usize, i: usize) -> MultiPoly {
        MultiPoly::term(field, Monomial::var(nvars, i), Elem::ONE)
    }

    pub fn term(field: &Arc<Field>, m: Monomial, c: Elem) -> MultiPoly {
        let mut p = MultiPoly::zero(field, m.nvars());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Canonical polynomial from a term list; repeated monomials are summed.
    pub fn from_terms(field: &Arc<Field>, nvars: usize, terms: impl IntoIterator<Item = (Monomial, Elem)>) -> MultiPoly {
        let mut p = MultiPoly::zero(field, nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Elem) {
        debug_assert_eq!(m.nvars(), self.nvars);
        if c.is_zero() {
            return;
        }
        let f = &self.field;
        match self.terms.get_mut(&m) {
            Some(slot) => {
                let s = f.add(*slot, c);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *slot = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Elem)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Elem {
        self.terms.get(m).copied().unwrap_or(Elem::ZERO)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn is_constant(&self) -> bool {
        self.degree().is_none_or(|d| d == 0)
    }

    /// Largest exponent of any single variable.
    pub fn max_var_degree(&self) -> u32 {
        self.terms.keys().flat_map(|m| m.exps().iter().map(|&a| a as u32)).max().unwrap_or(0)
    }

    pub fn leading(&self, ord: TermOrder) -> Option<(Monomial, Elem)> {
        self.terms
            .iter()
            .max_by(|a, b| ord.cmp(a.0, b.0))
            .map(|(m, c)| (*m, *c))
    }

    pub fn leading_monomial(&self, ord: TermOrder) -> Option<Monomial> {
        self.leading(ord).map(|t| t.0)
    }

    /// Terms in decreasing order under `ord`.
    pub fn sorted_terms(&self, ord: TermOrder) -> Vec<(Monomial, Elem)> {
        let mut v: Vec<(Monomial, Elem)> = self.terms.iter().map(|(m, c)| (*m, *c)).collect();
        v.sort_by(|a, b| ord.cmp(&b.0, &a.0));
        v
    }

    fn check(&self, other: &MultiPoly) -> Result<()> {
        if !self.field.same_field(&other.field) {
            return Err(Error::MismatchedContext("different coefficient fields".into()));
        }
        if self.nvars != other.nvars {
            return Err(Error::MismatchedContext(format!("{} vs {} variables", self.nvars, other.nvars)));
        }
        Ok(())
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, *c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MultiPoly {
        self.scale(self.field.neg(Elem::ONE))
    }

    pub fn scale(&self, c: Elem) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(&self.field, self.nvars);
        }
        let f = &self.field;
        MultiPoly {
            field: f.clone(),
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (*m, f.mul(*a, c))).collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check(other)?;
        let f = &self.field;
        let mut acc: HashMap<Monomial, Elem> = HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let slot = acc.entry(m1.mul(m2)).or_insert(Elem::ZERO);
                *slot = f.add(*slot, f.mul(*c1, *c2));
            }
        }
        Ok(MultiPoly {
            field: f.clone(),
            nvars: self.nvars,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }

    pub fn mul_monomial(&self, u: &Monomial) -> MultiPoly {
        MultiPoly {
            field: self.field.clone(),
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.mul(u), *c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> MultiPoly {
        let mut out = MultiPoly::one(&self.field, self.nvars);
        for _ in 0..k {
            out = out.mul(self).expect("same context");
        }
        out
    }

    pub fn monic(&self, ord: TermOrder) -> MultiPoly {
        match self.leading(ord) {
            None => self.clone(),
            Some((_, c)) => self.scale(self.field.inv(c).unwrap()),
        }
    }

    pub fn eval(&self, point: &[Elem]) -> Result<Elem> {
        if point.len() != self.nvars {
            return Err(Error::LengthMismatch { expected: self.nvars, got: point.len() });
        }
        let f = &self.field;
        Ok(self.terms.iter().fold(Elem::ZERO, |acc, (m, c)| {
            let v = m
                .exps()
                .iter()
                .enumerate()
                .fold(*c, |v, (i, &a)| f.mul(v, f.pow(point[i], a as u64)));
            f.add(acc, v)
        }))
    }

    /// Reduces every exponent modulo `X_j^q = X_j`, keeping positive
    /// exponents positive.
    pub fn reduce_field_equations(&self, q: u32) -> MultiPoly {
        let mut out = MultiPoly::zero(&self.field, self.nvars);
        for (m, c) in &self.terms {
            let mut r = *m;
            for i in 0..self.nvars {
                let a = m.exp(i);
                if a >= q {
                    r.set_exp(i, (a - 1) % (q - 1) + 1);
                }
            }
            out.add_term(r, *c);
        }
        out
    }

    /// Applies `embed` to every coefficient.
    pub fn lift(&self, embed: &FieldEmbedding) -> Result<MultiPoly> {
        if !embed.source().same_field(&self.field) {
            return Err(Error::MismatchedField);
        }
        let to = embed.target();
        Ok(MultiPoly {
            field: to.clone(),
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (*m, embed.map(*c))).collect(),
        })
    }

    /// Reinterprets coefficients lying in the prime subfield as elements of
    /// `target`, which must have the same characteristic.
    pub fn with_prime_coefficients(&self, target: &Arc<Field>) -> Result<MultiPoly> {
        if target.characteristic() != self.field.characteristic()
            || self.terms.values().any(|c| !self.field.in_prime_field(*c))
        {
            return Err(Error::MismatchedField);
        }
        Ok(MultiPoly { field: target.clone(), nvars: self.nvars, terms: self.terms.clone() })
    }

    pub fn is_linear(&self) -> bool {
        self.degree().is_some_and(|d| d <= 1)
    }
}

/// `x -> A x + b` with `A` invertible.
#[derive(Clone, Debug)]
pub struct AffineMap {
    field: Arc<Field>,
    n: usize,
    matrix: Vec<Elem>,
    shift: Vec<Elem>,
}

impl PartialEq for AffineMap {
    fn eq(&self, other: &Self) -> bool {
        self.field.same_field(&other.field) && self.matrix == other.matrix && self.shift == other.shift
    }
}
impl Eq for AffineMap {}

impl AffineMap {
    pub fn new(field: &Arc<Field>, matrix: Vec<Vec<Elem>>, shift: Vec<Elem>) -> Result<AffineMap> {
        let n = matrix.len();
        if shift.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: shift.len() });
        }
        if let Some(row) = matrix.iter().find(|r| r.len() != n) {
            return Err(Error::LengthMismatch { expected: n, got: row.len() });
        }
        let flat: Vec<Elem> = matrix.into_iter().flatten().collect();
        if flat.iter().chain(shift.iter()).any(|&c| !field.contains(c)) {
            return Err(Error::Parse("matrix entry outside field".into()));
        }
        linalg::invert(field, &flat, n)?;
        Ok(AffineMap { field: field.clone(), n, matrix: flat, shift })
    }

    pub fn identity(field: &Arc<Field>, n: usize) -> AffineMap {
        let mut matrix = vec![Elem::ZERO; n * n];
        for i in 0..n {
            matrix[i * n + i] = Elem::ONE;
        }
        AffineMap { field: field.clone(), n, matrix, shift: vec![Elem::ZERO; n] }
    }

    /// Uniformly random invertible map (rejection sampling on the matrix).
    pub fn random<R: Rng>(field: &Arc<Field>, n: usize, rng: &mut R) -> AffineMap {
        let size = field.size() as u32;
        loop {
            let matrix: Vec<Elem> = (0..n * n).map(|_| Elem(rng.gen_range(0..size))).collect();
            if linalg::invert(field, &matrix, n).is_ok() {
                let shift = (0..n).map(|_| Elem(rng.gen_range(0..size))).collect();
                return AffineMap { field: field.clone(), n, matrix, shift };
            }
        }
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> Elem {
        self.matrix[i * self.n + j]
    }

    pub fn matrix_rows(&self) -> Vec<Vec<Elem>> {
        self.matrix.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn shift(&self) -> &[Elem] {
        &self.shift
    }

    pub fn inverse(&self) -> AffineMap {
        let f = &self.field;
        let inv = linalg::invert(f, &self.matrix, self.n).expect("invertible by construction");
        let ib = linalg::mat_vec(f, &inv, &self.shift);
        AffineMap { field: f.clone(), n: self.n, matrix: inv, shift: ib.into_iter().map(|c| f.neg(c)).collect() }
    }

    /// `A x + b`.
    pub fn apply_point(&self, x: &[Elem]) -> Result<Vec<Elem>> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: x.len() });
        }
        let f = &self.field;
        Ok(linalg::mat_vec(f, &self.matrix, x)
            .into_iter()
            .zip(&self.shift)
            .map(|(v, &b)| f.add(v, b))
            .collect())
    }

    /// `f(A X + b)`, i.e. the substitution `X_i <- sum_j A_ij X_j + b_i`.
    /// Coefficients of `f` are lifted into the map's field when it is an
    /// extension of `f`'s field.
    pub fn apply(&self, f: &MultiPoly) -> Result<MultiPoly> {
        if f.nvars() != self.n {
            return Err(Error::MismatchedContext(format!("map on {} variables, polynomial in {}", self.n, f.nvars())));
        }
        let f = if f.field().same_field(&self.field) {
            f.clone()
        } else {
            f.lift(&FieldEmbedding::find(f.field(), &self.field)?)?
        };
        let k = &self.field;
        let images: Vec<MultiPoly> = (0..self.n)
            .map(|i| {
                let mut l = MultiPoly::constant(k, self.n, self.shift[i]);
                for j in 0..self.n {
                    l.add_term(Monomial::var(self.n, j), self.entry(i, j));
                }
                l
            })
            .collect();
        let mut powers: Vec<Vec<MultiPoly>> = images.iter().map(|l| vec![MultiPoly::one(k, self.n), l.clone()]).collect();
        let mut out = MultiPoly::zero(k, self.n);
        for (m, c) in f.terms() {
            let mut t = MultiPoly::constant(k, self.n, *c);
            for i in 0..self.n {
                let a = m.exp(i) as usize;
                while powers[i].len() <= a {
                    let next = powers[i].last().unwrap().mul(&images[i])?;
                    powers[i].push(next);
                }
                if a > 0 {
                    t = t.mul(&powers[i][a])?;
                }
            }
            out = out.add(&t)?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mono(e: &[u32]) -> Monomial {
        Monomial::from_exps(e)
    }

    #[test]
    fn products() {
        let f = Field::prime(2).unwrap();
        let x0 = MultiPoly::var(&f, 2, 0);
        let x1 = MultiPoly::var(&f, 2, 1);
        let one = MultiPoly::one(&f, 2);
        let p = x0.add(&one).unwrap().mul(&x1.add(&one).unwrap()).unwrap();
        let expect = MultiPoly::from_terms(&f, 2, [(mono(&[1, 1]), Elem::ONE), (mono(&[1, 0]), Elem::ONE), (mono(&[0, 1]), Elem::ONE), (mono(&[0, 0]), Elem::ONE)]);
        assert_eq!(p, expect);
        assert_eq!(p.add(&MultiPoly::zero(&f, 2)).unwrap(), p);

        let g = Field::new(2, vec![1, 1, 1], None).unwrap();
        let t = g.generator_t();
        let a = MultiPoly::from_terms(&g, 2, [(mono(&[1, 0]), Elem::ONE), (mono(&[0, 0]), t)]);
        let b = MultiPoly::from_terms(&g, 2, [(mono(&[0, 1]), Elem::ONE), (mono(&[0, 0]), Elem::ONE)]);
        let expect = MultiPoly::from_terms(&g, 2, [(mono(&[1, 1]), Elem::ONE), (mono(&[1, 0]), Elem::ONE), (mono(&[0, 1]), t), (mono(&[0, 0]), t)]);
        assert_eq!(a.mul(&b).unwrap(), expect);
        assert!(matches!(a.mul(&x0), Err(Error::MismatchedContext(_))));
    }

    /// Reference DRL: compare degrees, then the exponent vectors read from
    /// the last variable backwards; smaller exponent means larger monomial.
    fn drl_reference(a: &Monomial, b: &Monomial) -> Ordering {
        let (da, db) = (a.degree(), b.degree());
        if da != db {
            return da.cmp(&db);
        }
        let ra: Vec<i64> = a.exps().iter().rev().map(|&x| -(x as i64)).collect();
        let rb: Vec<i64> = b.exps().iter().rev().map(|&x| -(x as i64)).collect();
        ra.cmp(&rb)
    }

    #[test]
    fn drl_matches_reference_and_is_total() {
        for n in 1..=3 {
            let ms = monomials_up_to(n, 4);
            for a in &ms {
                for b in &ms {
                    let o = TermOrder::Drl.cmp(a, b);
                    assert_eq!(o, drl_reference(a, b));
                    assert_eq!(o, TermOrder::Drl.cmp(b, a).reverse());
                    assert_eq!(TermOrder::Lex.cmp(a, b), TermOrder::Lex.cmp(b, a).reverse());
                    assert_eq!(o == Ordering::Equal, a == b);
                    if a.degree() < b.degree() {
                        assert_eq!(o, Ordering::Less);
                    }
                }
            }
            for ord in [TermOrder::Drl, TermOrder::Lex] {
                let mut sorted = ms.clone();
                sorted.sort_by(|a, b| ord.cmp(a, b));
                for w in sorted.windows(3) {
                    assert_eq!(ord.cmp(&w[0], &w[2]), Ordering::Less);
                }
                for a in ms.iter().take(12) {
                    for b in ms.iter().take(12) {
                        for c in ms.iter().take(12) {
                            if ord.cmp(a, b) == Ordering::Less && ord.cmp(b, c) == Ordering::Less {
                                assert_eq!(ord.cmp(a, c), Ordering::Less);
                            }
                        }
                    }
                }
            }
        }
        // X0 X2 > X1^2 under DRL, and lex ignores degree.
        assert_eq!(TermOrder::Drl.cmp(&mono(&[1, 0, 1]), &mono(&[0, 2, 0])), Ordering::Less);
        assert_eq!(TermOrder::Drl.cmp(&mono(&[1, 1, 0]), &mono(&[1, 0, 1])), Ordering::Greater);
        assert_eq!(TermOrder::Lex.cmp(&mono(&[1, 0]), &mono(&[0, 100])), Ordering::Greater);
    }

    #[test]
    fn coordinate_change_of_example() {
        let f = Field::prime(3).unwrap();
        let m = AffineMap::new(&f, vec![vec![Elem(1), Elem(0)], vec![Elem(1), Elem(1)]], vec![Elem(0), Elem(0)]).unwrap();
        let x1sq = MultiPoly::term(&f, mono(&[0, 2]), Elem::ONE);
        let img = m.apply(&x1sq).unwrap();
        let expect = MultiPoly::from_terms(&f, 2, [(mono(&[2, 0]), Elem(1)), (mono(&[1, 1]), Elem(2)), (mono(&[0, 2]), Elem(1))]);
        assert_eq!(img, expect);
        assert_eq!(AffineMap::identity(&f, 2).apply(&x1sq).unwrap(), x1sq);
        assert!(matches!(
            AffineMap::new(&f, vec![vec![Elem(1), Elem(2)], vec![Elem(2), Elem(1)]], vec![Elem(0), Elem(0)]),
            Err(Error::SingularMatrix)
        ));
    }

    fn random_poly(f: &Arc<Field>, n: usize, rng: &mut ChaCha8Rng) -> MultiPoly {
        let ms = monomials_up_to(n, 3);
        MultiPoly::from_terms(
            f,
            n,
            (0..4).map(|_| (ms[rng.gen_range(0..ms.len())], Elem(rng.gen_range(0..f.size() as u32)))).collect::<Vec<_>>(),
        )
    }

    #[test]
    fn affine_maps_are_homomorphisms() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for f in [Field::prime(3).unwrap(), Field::with_default_modulus(2, 2).unwrap(), Field::prime(5).unwrap()] {
            for _ in 0..30 {
                let n = rng.gen_range(1..=3);
                let phi = AffineMap::random(&f, n, &mut rng);
                let a = random_poly(&f, n, &mut rng);
                let b = random_poly(&f, n, &mut rng);
                assert_eq!(phi.apply(&a.mul(&b).unwrap()).unwrap(), phi.apply(&a).unwrap().mul(&phi.apply(&b).unwrap()).unwrap());
                assert_eq!(phi.apply(&a.add(&b).unwrap()).unwrap(), phi.apply(&a).unwrap().add(&phi.apply(&b).unwrap()).unwrap());
                assert_eq!(phi.inverse().apply(&phi.apply(&a).unwrap()).unwrap(), a);
                assert_eq!(phi.apply(&a).unwrap().degree(), a.degree());
                // evaluation: (phi a)(x) = a(A x + b)
                let x: Vec<Elem> = (0..n).map(|_| Elem(rng.gen_range(0..f.size() as u32))).collect();
                assert_eq!(phi.apply(&a).unwrap().eval(&x).unwrap(), a.eval(&phi.apply_point(&x).unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn affine_map_over_extension() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let k = Field::prime(2).unwrap();
        let big = Field::with_default_modulus(2, 2).unwrap();
        let phi = AffineMap::random(&big, 2, &mut rng);
        let a = random_poly(&k, 2, &mut rng);
        let img = phi.apply(&a).unwrap();
        assert!(img.field().same_field(&big));
        assert_eq!(phi.inverse().apply(&img).unwrap(), a.with_prime_coefficients(&big).unwrap());
    }

    #[test]
    fn field_equation_reduction() {
        let f = Field::prime(3).unwrap();
        let p = MultiPoly::from_terms(&f, 2, [(mono(&[3, 4]), Elem(1)), (mono(&[5, 0]), Elem(1))]);
        let r = p.reduce_field_equations(3);
        let expect = MultiPoly::from_terms(&f, 2, [(mono(&[1, 2]), Elem(1)), (mono(&[1, 0]), Elem(1))]);
        assert_eq!(r, expect);
    }
}
