//! Prime fields GF(p) and extensions GF(p^n) = GF(p)[t]/(m(t)).
//!
//! Elements are stored as a single integer code `sum c_i p^i` over the
//! power-basis digits `c_i`, which makes equality syntactic and lets the
//! elimination code keep rows as flat integer arrays. Multiplication uses
//! log/antilog tables for fields up to 2^20 elements and falls back to
//! schoolbook polynomial multiplication modulo `m(t)` beyond that.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Field element code. Only meaningful together with its [`Field`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

const TABLE_LIMIT: u64 = 1 << 20;
const ADD_TABLE_LIMIT: u64 = 729;

struct LogTables {
    /// exp[i] = g^i for i in 0..2(size-1), doubled to skip a reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
}

pub struct Field {
    p: u32,
    n: usize,
    size: u32,
    modulus: Vec<u32>,
    pow_p: Vec<u32>,
    basis: Vec<Elem>,
    /// Row-major n x n matrix over GF(p) mapping power-basis digits to
    /// coordinates in `basis`.
    to_basis: Vec<u32>,
    power_basis: bool,
    tables: Option<LogTables>,
    add_table: Option<Vec<u32>>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("n", &self.n)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}
impl Eq for Field {}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut i = 2u64;
    while i * i <= p as u64 {
        if p as u64 % i == 0 {
            return false;
        }
        i += 1;
    }
    true
}

fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= m {
        if m % f == 0 {
            out.push(f);
            while m % f == 0 {
                m /= f;
            }
        }
        f += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Remainder of `a` modulo `b` over GF(p), little-endian digit vectors.
/// `b` must have a nonzero leading digit.
fn poly_rem_mod_p(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u32> = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = inv_mod_p(b[db], p);
    while r.len() > db {
        let top = *r.last().unwrap();
        if top != 0 {
            let c = mul_mod_p(top, lead_inv, p);
            let shift = r.len() - 1 - db;
            for (i, &bi) in b.iter().enumerate() {
                let sub = mul_mod_p(c, bi, p);
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
        }
        r.pop();
    }
    r
}

#[inline]
fn mul_mod_p(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

fn inv_mod_p(a: u32, p: u32) -> u32 {
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

/// Exhaustive trial division by every monic polynomial of degree
/// `1..=deg/2`.
pub fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let deg = modulus.len() - 1;
    if deg <= 1 {
        return deg == 1;
    }
    for k in 1..=deg / 2 {
        let count = (p as u64).pow(k as u32);
        for code in 0..count {
            let mut divisor = Vec::with_capacity(k + 1);
            let mut c = code;
            for _ in 0..k {
                divisor.push((c % p as u64) as u32);
                c /= p as u64;
            }
            divisor.push(1);
            if poly_rem_mod_p(modulus, &divisor, p).iter().all(|&x| x == 0) {
                return false;
            }
        }
    }
    true
}

/// Inverse of a row-major k x k matrix over GF(p), or `None` if singular.
fn invert_mod_p(m: &[u32], k: usize, p: u32) -> Option<Vec<u32>> {
    let mut a = m.to_vec();
    let mut inv = vec![0u32; k * k];
    for i in 0..k {
        inv[i * k + i] = 1;
    }
    for col in 0..k {
        let pivot = (col..k).find(|&r| a[r * k + col] != 0)?;
        if pivot != col {
            for j in 0..k {
                a.swap(pivot * k + j, col * k + j);
                inv.swap(pivot * k + j, col * k + j);
            }
        }
        let s = inv_mod_p(a[col * k + col], p);
        for j in 0..k {
            a[col * k + j] = mul_mod_p(a[col * k + j], s, p);
            inv[col * k + j] = mul_mod_p(inv[col * k + j], s, p);
        }
        for r in 0..k {
            if r == col || a[r * k + col] == 0 {
                continue;
            }
            let c = a[r * k + col];
            for j in 0..k {
                a[r * k + j] = (a[r * k + j] + p - mul_mod_p(c, a[col * k + j], p)) % p;
                inv[r * k + j] = (inv[r * k + j] + p - mul_mod_p(c, inv[col * k + j], p)) % p;
            }
        }
    }
    Some(inv)
}

impl Field {
    /// GF(p) as a degree-one extension with modulus `t`.
    pub fn prime(p: u32) -> Result<Arc<Field>> {
        Field::new(p, vec![0, 1], None)
    }

    /// GF(p^n) with the smallest monic irreducible modulus, ordered by the
    /// integer code of its lower coefficients.
    pub fn with_default_modulus(p: u32, n: usize) -> Result<Arc<Field>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n == 1 {
            return Field::prime(p);
        }
        let count = (p as u64)
            .checked_pow(n as u32)
            .ok_or(Error::FieldTooLarge(u64::MAX))?;
        for code in 0..count {
            let mut m = Vec::with_capacity(n + 1);
            let mut c = code;
            for _ in 0..n {
                m.push((c % p as u64) as u32);
                c /= p as u64;
            }
            m.push(1);
            if is_irreducible(&m, p) {
                return Field::new(p, m, None);
            }
        }
        unreachable!("an irreducible polynomial exists in every degree")
    }

    /// `modulus` is little-endian and must be monic of degree n >= 1.
    /// `basis` lists n elements by their power-basis digits.
    pub fn new(p: u32, modulus: Vec<u32>, basis: Option<Vec<Vec<u32>>>) -> Result<Arc<Field>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if modulus.len() < 2 {
            return Err(Error::InvalidModulus("degree must be at least 1".into()));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidModulus("coefficient out of range".into()));
        }
        if *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidModulus("modulus must be monic".into()));
        }
        let n = modulus.len() - 1;
        if !is_irreducible(&modulus, p) {
            return Err(Error::Reducible { p, modulus });
        }
        let size64 = (p as u64)
            .checked_pow(n as u32)
            .filter(|&s| s <= u32::MAX as u64)
            .ok_or(Error::FieldTooLarge(u64::MAX))?;
        let size = size64 as u32;
        let mut pow_p = Vec::with_capacity(n + 1);
        let mut acc = 1u64;
        for _ in 0..=n {
            pow_p.push(acc.min(u32::MAX as u64) as u32);
            acc *= p as u64;
        }

        let mut field = Field {
            p,
            n,
            size,
            modulus,
            pow_p,
            basis: Vec::new(),
            to_basis: Vec::new(),
            power_basis: true,
            tables: None,
            add_table: None,
        };

        let basis_digits = match basis {
            Some(b) => {
                if b.len() != n {
                    return Err(Error::LengthMismatch { expected: n, got: b.len() });
                }
                for v in &b {
                    if v.len() > n || v.iter().any(|&c| c >= p) {
                        return Err(Error::Parse("basis element out of range".into()));
                    }
                }
                b.into_iter()
                    .map(|mut v| {
                        v.resize(n, 0);
                        v
                    })
                    .collect::<Vec<_>>()
            }
            None => (0..n)
                .map(|j| {
                    let mut v = vec![0; n];
                    v[j] = 1;
                    v
                })
                .collect(),
        };
        // Column j of this matrix holds the digits of alpha_j.
        let mut mat = vec![0u32; n * n];
        for (j, v) in basis_digits.iter().enumerate() {
            for (i, &c) in v.iter().enumerate() {
                mat[i * n + j] = c;
            }
        }
        let to_basis = invert_mod_p(&mat, n, p).ok_or(Error::DependentBasis)?;
        field.power_basis = basis_digits
            .iter()
            .enumerate()
            .all(|(j, v)| v.iter().enumerate().all(|(i, &c)| c == (i == j) as u32));
        field.basis = basis_digits.iter().map(|v| field.from_digits(v)).collect();
        field.to_basis = to_basis;

        if size64 <= TABLE_LIMIT {
            field.tables = Some(field.build_tables());
        }
        if p != 2 && size64 <= ADD_TABLE_LIMIT {
            let s = size as usize;
            let mut t = vec![0u32; s * s];
            for a in 0..size {
                for b in 0..size {
                    t[a as usize * s + b as usize] = field.add_digitwise(Elem(a), Elem(b)).0;
                }
            }
            field.add_table = Some(t);
        }
        Ok(Arc::new(field))
    }

    fn build_tables(&self) -> LogTables {
        let order = self.size as u64 - 1;
        let factors = prime_factors(order);
        let generator = (1..self.size)
            .map(Elem)
            .find(|&g| {
                factors
                    .iter()
                    .all(|&r| self.pow_schoolbook(g, order / r) != Elem::ONE)
            })
            .expect("multiplicative group is cyclic");
        let ord = order as usize;
        let mut exp = vec![0u32; 2 * ord.max(1)];
        let mut log = vec![0u32; self.size as usize];
        let mut x = Elem::ONE;
        for i in 0..ord {
            exp[i] = x.0;
            log[x.0 as usize] = i as u32;
            x = self.mul_schoolbook(x, generator);
        }
        for i in ord..2 * ord {
            exp[i] = exp[i - ord];
        }
        LogTables { exp, log }
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    /// Extension degree over the prime field.
    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> u64 {
        self.size as u64
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn basis(&self) -> &[Elem] {
        &self.basis
    }

    pub fn has_power_basis(&self) -> bool {
        self.power_basis
    }

    pub fn is_prime_field(&self) -> bool {
        self.n == 1
    }

    /// Same field up to the choice of basis.
    pub fn same_field(&self, other: &Field) -> bool {
        self == other
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.size).map(Elem)
    }

    /// Power-basis digits, little-endian, length n.
    pub fn digits(&self, a: Elem) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.n);
        let mut c = a.0;
        for _ in 0..self.n {
            out.push(c % self.p);
            c /= self.p;
        }
        out
    }

    /// Inverse of [`Field::digits`]; missing high digits are zero.
    pub fn from_digits(&self, digits: &[u32]) -> Elem {
        let mut code = 0u32;
        for (i, &d) in digits.iter().enumerate().take(self.n) {
            code += (d % self.p) * self.pow_p[i];
        }
        Elem(code)
    }

    /// Image of an integer under Z -> GF(p) -> GF(p^n).
    pub fn from_int(&self, v: i64) -> Elem {
        Elem(v.rem_euclid(self.p as i64) as u32)
    }

    /// The class of `t` (the root of the modulus).
    pub fn generator_t(&self) -> Elem {
        if self.n == 1 {
            let m0 = self.modulus[0];
            Elem((self.p - m0) % self.p)
        } else {
            Elem(self.p)
        }
    }

    pub fn contains(&self, a: Elem) -> bool {
        a.0 < self.size
    }

    fn add_digitwise(&self, a: Elem, b: Elem) -> Elem {
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u32;
        for i in 0..self.n {
            let d = (x % self.p + y % self.p) % self.p;
            out += d * self.pow_p[i];
            x /= self.p;
            y /= self.p;
        }
        Elem(out)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.p == 2 {
            Elem(a.0 ^ b.0)
        } else if let Some(t) = &self.add_table {
            Elem(t[a.0 as usize * self.size as usize + b.0 as usize])
        } else {
            self.add_digitwise(a, b)
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        if self.p == 2 || a.0 == 0 {
            return a;
        }
        let mut x = a.0;
        let mut out = 0u32;
        for i in 0..self.n {
            let d = x % self.p;
            out += ((self.p - d) % self.p) * self.pow_p[i];
            x /= self.p;
        }
        Elem(out)
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        if self.p == 2 {
            Elem(a.0 ^ b.0)
        } else {
            self.add(a, self.neg(b))
        }
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        match &self.tables {
            Some(t) => Elem(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize]),
            None => self.mul_schoolbook(a, b),
        }
    }

    /// `dst -= c * src`, elementwise.
    pub fn sub_scaled(&self, dst: &mut [Elem], c: Elem, src: &[Elem]) {
        if c.is_zero() {
            return;
        }
        match &self.tables {
            Some(t) if self.p == 2 => {
                let lc = t.log[c.0 as usize];
                for (d, s) in dst.iter_mut().zip(src) {
                    if s.0 != 0 {
                        d.0 ^= t.exp[(lc + t.log[s.0 as usize]) as usize];
                    }
                }
            }
            Some(t) => {
                let lc = t.log[c.0 as usize];
                for (d, s) in dst.iter_mut().zip(src) {
                    if s.0 != 0 {
                        *d = self.sub(*d, Elem(t.exp[(lc + t.log[s.0 as usize]) as usize]));
                    }
                }
            }
            None => {
                for (d, s) in dst.iter_mut().zip(src) {
                    if s.0 != 0 {
                        *d = self.sub(*d, self.mul(c, *s));
                    }
                }
            }
        }
    }

    /// Multiplication by polynomial product and reduction modulo m(t);
    /// independent of the log tables.
    pub fn mul_schoolbook(&self, a: Elem, b: Elem) -> Elem {
        let p = self.p;
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = vec![0u32; 2 * self.n - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + mul_mod_p(x, y, p)) % p;
            }
        }
        for deg in (self.n..prod.len()).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            for i in 0..self.n {
                let idx = deg - self.n + i;
                prod[idx] = (prod[idx] + p - mul_mod_p(c, self.modulus[i], p)) % p;
            }
            prod[deg] = 0;
        }
        self.from_digits(&prod[..self.n])
    }

    pub fn pow_schoolbook(&self, a: Elem, mut e: u64) -> Elem {
        let mut result = Elem::ONE;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul_schoolbook(result, base);
            }
            base = self.mul_schoolbook(base, base);
            e >>= 1;
        }
        result
    }

    /// `a^e`, with `a^0 = 1` for every `a` including zero.
    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return Elem::ONE;
        }
        if a.is_zero() {
            return Elem::ZERO;
        }
        match &self.tables {
            Some(t) => {
                let order = self.size as u64 - 1;
                let l = t.log[a.0 as usize] as u64;
                let idx = ((l as u128 * (e % order) as u128) % order as u128) as usize;
                Elem(t.exp[idx])
            }
            None => self.pow_schoolbook(a, e),
        }
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match &self.tables {
            Some(t) => {
                let order = self.size - 1;
                let l = t.log[a.0 as usize];
                Elem(t.exp[((order - l) % order.max(1)) as usize])
            }
            None => self.pow_schoolbook(a, self.size as u64 - 2),
        })
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// The q-power map with q = p.
    pub fn frobenius(&self, a: Elem) -> Elem {
        self.pow(a, self.p as u64)
    }

    /// Coordinates `(c_0, ..., c_{n-1})` in GF(p) with `a = sum c_j alpha_j`.
    pub fn decompose(&self, a: Elem) -> Vec<u32> {
        let d = self.digits(a);
        if self.power_basis {
            return d;
        }
        let n = self.n;
        (0..n)
            .map(|i| {
                (0..n).fold(0u32, |acc, k| {
                    (acc + mul_mod_p(self.to_basis[i * n + k], d[k], self.p)) % self.p
                })
            })
            .collect()
    }

    /// `sum c_j alpha_j`.
    pub fn compose(&self, coords: &[u32]) -> Elem {
        let mut acc = Elem::ZERO;
        for (j, &c) in coords.iter().enumerate().take(self.n) {
            if c % self.p != 0 {
                acc = self.add(acc, self.mul(Elem(c % self.p), self.basis[j]));
            }
        }
        acc
    }

    /// Whether `a` lies in the prime subfield (a single low digit).
    pub fn in_prime_field(&self, a: Elem) -> bool {
        a.0 < self.p
    }
}

/// A field element carrying its context, for checked arithmetic.
#[derive(Clone, Debug)]
pub struct FieldElement {
    field: Arc<Field>,
    value: Elem,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.field.same_field(&other.field) && self.value == other.value
    }
}
impl Eq for FieldElement {}

impl FieldElement {
    pub fn new(field: &Arc<Field>, value: Elem) -> Result<FieldElement> {
        if !field.contains(value) {
            return Err(Error::Parse(format!("code {} outside field", value.0)));
        }
        Ok(FieldElement { field: field.clone(), value })
    }

    pub fn from_digits(field: &Arc<Field>, digits: &[u32]) -> Result<FieldElement> {
        if digits.len() > field.degree() || digits.iter().any(|&d| d >= field.characteristic()) {
            return Err(Error::Parse(format!("invalid digits {digits:?}")));
        }
        Ok(FieldElement { field: field.clone(), value: field.from_digits(digits) })
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn value(&self) -> Elem {
        self.value
    }

    pub fn arith(&self, other: &FieldElement, op: FieldOp) -> Result<FieldElement> {
        if !self.field.same_field(&other.field) {
            return Err(Error::MismatchedField);
        }
        let f = &self.field;
        let (a, b) = (self.value, other.value);
        let value = match op {
            FieldOp::Add => f.add(a, b),
            FieldOp::Sub => f.sub(a, b),
            FieldOp::Mul => f.mul(a, b),
            FieldOp::Div => f.div(a, b)?,
        };
        Ok(FieldElement { field: f.clone(), value })
    }

    pub fn pow(&self, e: u64) -> FieldElement {
        FieldElement { field: self.field.clone(), value: self.field.pow(self.value, e) }
    }

    pub fn frobenius(&self) -> FieldElement {
        FieldElement { field: self.field.clone(), value: self.field.frobenius(self.value) }
    }

    pub fn decompose(&self) -> Vec<u32> {
        self.field.decompose(self.value)
    }
}

/// Field homomorphism GF(p^a) -> GF(p^b) fixed by the image of `t`.
#[derive(Clone, Debug)]
pub struct FieldEmbedding {
    from: Arc<Field>,
    to: Arc<Field>,
    image: Elem,
}

impl FieldEmbedding {
    /// Picks the smallest-code root of the source modulus in the target.
    pub fn find(from: &Arc<Field>, to: &Arc<Field>) -> Result<FieldEmbedding> {
        let none = || Error::NoEmbedding { from: from.size(), to: to.size() };
        if from.characteristic() != to.characteristic() || to.degree() % from.degree() != 0 {
            return Err(none());
        }
        if from.degree() == 1 {
            return Ok(FieldEmbedding { from: from.clone(), to: to.clone(), image: to.from_int(from.generator_t().0 as i64) });
        }
        if to.size() > 1 << 20 {
            return Err(Error::FieldTooLarge(to.size()));
        }
        let image = to
            .elements()
            .find(|&g| {
                let mut acc = Elem::ZERO;
                for &c in from.modulus().iter().rev() {
                    acc = to.add(to.mul(acc, g), Elem(c));
                }
                acc.is_zero()
            })
            .ok_or_else(none)?;
        Ok(FieldEmbedding { from: from.clone(), to: to.clone(), image })
    }

    pub fn identity(field: &Arc<Field>) -> FieldEmbedding {
        FieldEmbedding { from: field.clone(), to: field.clone(), image: field.generator_t() }
    }

    pub fn source(&self) -> &Arc<Field> {
        &self.from
    }

    pub fn target(&self) -> &Arc<Field> {
        &self.to
    }

    pub fn map(&self, a: Elem) -> Elem {
        if self.from.degree() == 1 {
            return a;
        }
        let mut acc = Elem::ZERO;
        for &c in self.from.digits(a).iter().rev() {
            acc = self.to.add(self.to.mul(acc, self.image), Elem(c));
        }
        acc
    }
}
