//! Weil descent and fake Weil descent of univariate systems over GF(q^n).

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fields::{Elem, Field};
use crate::multipoly::{Monomial, MultiPoly};
use crate::unipoly::UniPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    /// `F` itself.
    UnivariateF,
    /// `F ∪ {X^{q^n} - X}`.
    FieldF,
    /// Weil descent `F'` over GF(q).
    WeilFprime,
    /// `F' ∪ {X_j^q - X_j}`.
    WeilFprimeField,
    /// Fake Weil descent over GF(q^n).
    FakeFbar,
    /// `F̄ ∪ {X_0^q - X_1, ..., X_{n-1}^q - X_0}`.
    FakeFbarField,
    /// A multivariate system given directly.
    Custom,
}

impl Flavor {
    pub const ALL: [Flavor; 7] = [
        Flavor::UnivariateF,
        Flavor::FieldF,
        Flavor::WeilFprime,
        Flavor::WeilFprimeField,
        Flavor::FakeFbar,
        Flavor::FakeFbarField,
        Flavor::Custom,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Flavor::UnivariateF => "F",
            Flavor::FieldF => "F_f",
            Flavor::WeilFprime => "Fprime",
            Flavor::WeilFprimeField => "Fprime_f",
            Flavor::FakeFbar => "Fbar",
            Flavor::FakeFbarField => "Fbar_f",
            Flavor::Custom => "custom",
        }
    }

    pub fn from_tag(s: &str) -> Option<Flavor> {
        Flavor::ALL.into_iter().find(|f| f.tag().eq_ignore_ascii_case(s))
    }

    pub fn is_univariate(&self) -> bool {
        matches!(self, Flavor::UnivariateF | Flavor::FieldF)
    }

    /// True descent lives over GF(q); everything else over GF(q^n).
    pub fn over_prime_field(&self) -> bool {
        matches!(self, Flavor::WeilFprime | Flavor::WeilFprimeField)
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Where a generator of a [`PolySystem`] came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    Input(usize),
    Descended { input: usize, component: usize },
    FakeDescended(usize),
    /// `X^{q^n} - X`.
    UnivariateFieldEquation,
    /// `X_j^q - X_j`.
    FieldEquation(usize),
    /// `X_j^q - X_{j+1 mod n}`.
    CyclicEquation(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generators {
    Univariate(Vec<UniPoly>),
    Multivariate(Vec<MultiPoly>),
}

#[derive(Clone, Debug)]
pub struct PolySystem {
    extension: Arc<Field>,
    flavor: Flavor,
    generators: Generators,
    origins: Vec<Origin>,
}

impl PolySystem {
    /// A multivariate system supplied as is.
    pub fn custom(polys: Vec<MultiPoly>) -> Result<PolySystem> {
        let first = polys.first().ok_or(Error::EmptyOrConstant)?;
        let field = first.field().clone();
        let n = first.nvars();
        if polys.iter().any(|p| !p.field().same_field(&field) || p.nvars() != n) {
            return Err(Error::MismatchedContext("custom system mixes contexts".into()));
        }
        let origins = (0..polys.len()).map(Origin::Input).collect();
        Ok(PolySystem { extension: field, flavor: Flavor::Custom, generators: Generators::Multivariate(polys), origins })
    }

    pub(crate) fn from_parts(extension: Arc<Field>, flavor: Flavor, generators: Generators, origins: Vec<Origin>) -> PolySystem {
        PolySystem { extension, flavor, generators, origins }
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    /// The field GF(q^n) the system was derived from.
    pub fn extension(&self) -> &Arc<Field> {
        &self.extension
    }

    pub fn q(&self) -> u32 {
        self.extension.characteristic()
    }

    pub fn n(&self) -> usize {
        self.extension.degree()
    }

    pub fn generators(&self) -> &Generators {
        &self.generators
    }

    pub fn origins(&self) -> &[Origin] {
        &self.origins
    }

    pub fn len(&self) -> usize {
        self.origins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.origins.is_empty()
    }

    pub fn multivariate(&self) -> Option<&[MultiPoly]> {
        match &self.generators {
            Generators::Multivariate(v) => Some(v),
            Generators::Univariate(_) => None,
        }
    }

    pub fn univariate(&self) -> Option<&[UniPoly]> {
        match &self.generators {
            Generators::Univariate(v) => Some(v),
            Generators::Multivariate(_) => None,
        }
    }

    /// Field of the generators' coefficients.
    pub fn coefficient_field(&self) -> Arc<Field> {
        match &self.generators {
            Generators::Multivariate(v) if !v.is_empty() => v[0].field().clone(),
            _ => self.extension.clone(),
        }
    }

    /// Maximum total degree of the multivariate generators.
    pub fn max_degree(&self) -> u32 {
        match &self.generators {
            Generators::Multivariate(v) => v.iter().filter_map(|p| p.degree()).max().unwrap_or(0),
            Generators::Univariate(v) => v.iter().filter_map(|p| p.degree().finite()).max().unwrap_or(0) as u32,
        }
    }
}

/// Representative `e'` of `X^e mod X^{q^n} - X`: zero stays zero, and any
/// positive `e` maps into `[1, q^n - 1]` with `e' ≡ e (mod q^n - 1)`.
pub fn reduce_exponent(e: u64, q: u32, n: usize) -> u64 {
    if e == 0 {
        return 0;
    }
    let order = (q as u64).pow(n as u32) - 1;
    (e - 1) % order + 1
}

/// `X^e ↦ X_0^{e'_0} ... X_{n-1}^{e'_{n-1}}` with `e'` in base q.
pub fn fake_descend_monomial(e: u64, q: u32, n: usize) -> Monomial {
    let mut r = reduce_exponent(e, q, n);
    let mut m = Monomial::one(n);
    for j in 0..n {
        m.set_exp(j, (r % q as u64) as u32);
        r /= q as u64;
    }
    m
}

/// k-linear extension of [`fake_descend_monomial`]; the result lives in
/// GF(q^n)[X_0, ..., X_{n-1}].
pub fn fake_descend(f: &UniPoly) -> MultiPoly {
    let k = f.field();
    let (q, n) = (k.characteristic(), k.degree());
    MultiPoly::from_terms(k, n, f.terms().iter().map(|&(e, c)| (fake_descend_monomial(e, q, n), c)))
}

/// Weil descent components `[f]_0, ..., [f]_{n-1}` over GF(q), with
/// `f(sum alpha_j X_j) ≡ sum [f]_j alpha_j` modulo `X_j^q - X_j` and every
/// variable degree at most `q - 1`.
pub fn weil_descend(f: &UniPoly) -> Result<Vec<MultiPoly>> {
    let k = f.field();
    let (q, n) = (k.characteristic(), k.degree());
    let prime = Field::prime(q)?;
    let mut expander = DescentExpander::new(k);
    let mut total = MultiPoly::zero(k, n);
    for &(e, c) in f.terms() {
        let e = reduce_exponent(e, q, n);
        let pw = expander.power(e);
        total = total.add(&pw.scale(c))?;
    }
    let mut parts: Vec<MultiPoly> = (0..n).map(|_| MultiPoly::zero(&prime, n)).collect();
    for (m, c) in total.terms() {
        for (j, &cj) in k.decompose(*c).iter().enumerate() {
            parts[j].add_term(*m, Elem(cj));
        }
    }
    Ok(parts)
}

/// Memoised powers `(sum alpha_j X_j)^e` reduced by `X_j^q = X_j`.
struct DescentExpander {
    q: u32,
    q_pows: Vec<u64>,
    /// `L_i = sum_j alpha_j^{q^i} X_j`, the image of `X^{q^i}`.
    frobenius_forms: Vec<MultiPoly>,
    cache: HashMap<u64, MultiPoly>,
}

impl DescentExpander {
    fn new(k: &Arc<Field>) -> DescentExpander {
        let (q, n) = (k.characteristic(), k.degree());
        let mut frobenius_forms = Vec::with_capacity(n);
        let mut coeffs: Vec<Elem> = k.basis().to_vec();
        for _ in 0..n {
            let l = MultiPoly::from_terms(k, n, coeffs.iter().enumerate().map(|(j, &a)| (Monomial::var(n, j), a)));
            frobenius_forms.push(l);
            coeffs = coeffs.iter().map(|&a| k.frobenius(a)).collect();
        }
        let mut cache = HashMap::new();
        cache.insert(0, MultiPoly::one(k, n));
        DescentExpander { q, q_pows: (0..n).map(|i| (q as u64).pow(i as u32)).collect(), frobenius_forms, cache }
    }

    fn power(&mut self, e: u64) -> MultiPoly {
        if let Some(p) = self.cache.get(&e) {
            return p.clone();
        }
        let mut r = e;
        let mut i = 0;
        while r % self.q as u64 == 0 {
            r /= self.q as u64;
            i += 1;
        }
        let rest = self.power(e - self.q_pows[i]);
        let p = rest
            .mul(&self.frobenius_forms[i])
            .expect("same context")
            .reduce_field_equations(self.q);
        self.cache.insert(e, p.clone());
        p
    }
}

/// `X_j^q - X_j` for every j, over GF(q).
pub fn field_equations(q: u32, n: usize) -> Result<Vec<MultiPoly>> {
    let prime = Field::prime(q)?;
    Ok((0..n)
        .map(|j| {
            let mut mq = Monomial::one(n);
            mq.set_exp(j, q);
            MultiPoly::from_terms(&prime, n, [(mq, Elem::ONE), (Monomial::var(n, j), prime.neg(Elem::ONE))])
        })
        .collect())
}

/// `X_j^q - X_{j+1 mod n}` for every j, over the extension `k`.
pub fn cyclic_equations(k: &Arc<Field>) -> Vec<MultiPoly> {
    let (q, n) = (k.characteristic(), k.degree());
    (0..n)
        .map(|j| {
            let mut mq = Monomial::one(n);
            mq.set_exp(j, q);
            MultiPoly::from_terms(k, n, [(mq, Elem::ONE), (Monomial::var(n, (j + 1) % n), k.neg(Elem::ONE))])
        })
        .collect()
}

/// Builds one of the descent systems of a univariate set `F`.
pub fn build_system(polys: &[UniPoly], flavor: Flavor) -> Result<PolySystem> {
    let first = polys.first().ok_or(Error::EmptyOrConstant)?;
    let k = first.field().clone();
    if polys.iter().any(|f| !f.field().same_field(&k)) {
        return Err(Error::MismatchedField);
    }
    if let Some(i) = polys.iter().position(|f| f.is_constant()) {
        return Err(Error::ConstantInInput(i));
    }
    let (q, n) = (k.characteristic(), k.degree());
    let mut origins = Vec::new();
    let generators = match flavor {
        Flavor::UnivariateF | Flavor::FieldF => {
            let mut v = polys.to_vec();
            origins.extend((0..polys.len()).map(Origin::Input));
            if flavor == Flavor::FieldF {
                v.push(UniPoly::field_equation(&k));
                origins.push(Origin::UnivariateFieldEquation);
            }
            Generators::Univariate(v)
        }
        Flavor::WeilFprime | Flavor::WeilFprimeField => {
            let mut v = Vec::new();
            for (i, f) in polys.iter().enumerate() {
                for (j, part) in weil_descend(f)?.into_iter().enumerate() {
                    v.push(part);
                    origins.push(Origin::Descended { input: i, component: j });
                }
            }
            if flavor == Flavor::WeilFprimeField {
                v.extend(field_equations(q, n)?);
                origins.extend((0..n).map(Origin::FieldEquation));
            }
            Generators::Multivariate(v)
        }
        Flavor::FakeFbar | Flavor::FakeFbarField => {
            let mut v: Vec<MultiPoly> = polys.iter().map(fake_descend).collect();
            origins.extend((0..polys.len()).map(Origin::FakeDescended));
            if flavor == Flavor::FakeFbarField {
                v.extend(cyclic_equations(&k));
                origins.extend((0..n).map(Origin::CyclicEquation));
            }
            Generators::Multivariate(v)
        }
        Flavor::Custom => return Err(Error::ParamOutOfRange("custom systems are not built from univariate input".into())),
    };
    Ok(PolySystem { extension: k, flavor, generators, origins })
}
