//! Basic HFE at toy sizes: a central map `f` over GF(q^n) of the shape
//! `sum beta X^{q^a + q^b} + sum alpha X^{q^c} + mu`, hidden as
//! `T ∘ [f] ∘ S` with secret affine maps over GF(q).

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::descent::{field_equations, weil_descend};
use crate::engine::{solving_degree, GroebnerBasis, SolveReport};
use crate::error::{Error, Result};
use crate::fields::{Elem, Field};
use crate::multipoly::{AffineMap, MultiPoly, TermOrder};
use crate::unipoly::UniPoly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HfePublicKey {
    pub q: u32,
    pub n: usize,
    pub t: u32,
    pub polys: Vec<MultiPoly>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HfePrivateKey {
    pub field: Arc<Field>,
    pub central: UniPoly,
    pub s: AffineMap,
    pub t_map: AffineMap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HfeKeyPair {
    pub seed: u64,
    pub public: HfePublicKey,
    pub private: HfePrivateKey,
}

/// Exponents `q^a + q^b <= q^t` with `a <= b < n`; for q = 2 the case
/// `a = b` is linear and left out.
pub fn quadratic_exponents(q: u32, n: usize, t: u32) -> Vec<u64> {
    let cap = (q as u64).pow(t);
    let mut out = Vec::new();
    for b in 0..n as u32 {
        for a in 0..=b {
            if q == 2 && a == b {
                continue;
            }
            let e = (q as u64).pow(a) + (q as u64).pow(b);
            if e <= cap {
                out.push(e);
            }
        }
    }
    out
}

pub fn linear_exponents(q: u32, n: usize, t: u32) -> Vec<u64> {
    (0..n as u32).map(|c| (q as u64).pow(c)).filter(|&e| e <= (q as u64).pow(t)).collect()
}

fn random_elem(k: &Field, rng: &mut ChaCha8Rng) -> Elem {
    Elem(rng.gen_range(0..k.size() as u32))
}

/// Validates the parameters and samples a key pair from `seed`.
pub fn hfe_keygen(q: u32, n: usize, t: u32, seed: u64) -> Result<HfeKeyPair> {
    if !crate::fields::is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if n < 2 || t < 1 || t as usize > n {
        return Err(Error::ParamOutOfRange(format!("need n >= 2 and 1 <= t <= n, got n={n}, t={t}")));
    }
    if (q as u64).checked_pow(n as u32).is_none_or(|s| s > 1 << 16) {
        return Err(Error::ParamOutOfRange(format!("q^n exceeds 2^16 for q={q}, n={n}")));
    }
    let quad = quadratic_exponents(q, n, t);
    if quad.is_empty() {
        return Err(Error::ParamOutOfRange(format!("no quadratic exponent fits under q^t for q={q}, t={t}")));
    }
    let k = Field::with_default_modulus(q, n)?;
    let prime = Field::prime(q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let central = loop {
        let mut terms: Vec<(u64, Elem)> = quad.iter().map(|&e| (e, random_elem(&k, &mut rng))).collect();
        if terms.iter().all(|(_, c)| c.is_zero()) {
            continue;
        }
        terms.extend(linear_exponents(q, n, t).into_iter().map(|e| (e, random_elem(&k, &mut rng))));
        terms.push((0, random_elem(&k, &mut rng)));
        break UniPoly::from_terms(&k, terms);
    };
    let s = AffineMap::random(&prime, n, &mut rng);
    let t_map = AffineMap::random(&prime, n, &mut rng);
    let polys = compose_public(&central, &s, &t_map)?;
    Ok(HfeKeyPair {
        seed,
        public: HfePublicKey { q, n, t, polys },
        private: HfePrivateKey { field: k, central, s, t_map },
    })
}

/// `T ∘ [f] ∘ S`, reduced by `X_j^q = X_j`.
pub fn compose_public(central: &UniPoly, s: &AffineMap, t_map: &AffineMap) -> Result<Vec<MultiPoly>> {
    let q = central.field().characteristic();
    let n = central.field().degree();
    let prime = s.field().clone();
    let inner: Vec<MultiPoly> = weil_descend(central)?
        .iter()
        .map(|c| s.apply(c).map(|p| p.reduce_field_equations(q)))
        .collect::<Result<_>>()?;
    (0..n)
        .map(|i| {
            let mut out = MultiPoly::constant(&prime, n, t_map.shift()[i]);
            for (j, c) in inner.iter().enumerate() {
                out = out.add(&c.scale(t_map.entry(i, j)))?;
            }
            Ok(out.reduce_field_equations(q))
        })
        .collect()
}

pub fn hfe_encrypt(public: &HfePublicKey, plaintext: &[Elem]) -> Result<Vec<Elem>> {
    if plaintext.len() != public.n {
        return Err(Error::LengthMismatch { expected: public.n, got: plaintext.len() });
    }
    public.polys.iter().map(|p| p.eval(plaintext)).collect()
}

/// Every plaintext mapping to `ciphertext`, sorted.
pub fn hfe_decrypt(private: &HfePrivateKey, ciphertext: &[Elem]) -> Result<Vec<Vec<Elem>>> {
    let k = &private.field;
    let n = k.degree();
    if ciphertext.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: ciphertext.len() });
    }
    let y = private.t_map.inverse().apply_point(ciphertext)?;
    let target = k.compose(&y.iter().map(|e| e.0).collect::<Vec<_>>());
    let shifted = private.central.sub(&UniPoly::constant(k, target))?;
    let (g, _) = UniPoly::field_equation(k).gcd(&shifted)?;
    let s_inv = private.s.inverse();
    let mut out: Vec<Vec<Elem>> = g
        .roots()?
        .into_iter()
        .map(|r| {
            let coords: Vec<Elem> = k.decompose(r).into_iter().map(Elem).collect();
            s_inv.apply_point(&coords)
        })
        .collect::<Result<_>>()?;
    out.sort();
    Ok(out)
}

/// `{p_i - c_i} ∪ {X_j^q - X_j}`.
pub fn attack_system(public: &HfePublicKey, ciphertext: &[Elem]) -> Result<Vec<MultiPoly>> {
    if ciphertext.len() != public.n {
        return Err(Error::LengthMismatch { expected: public.n, got: ciphertext.len() });
    }
    let mut sys: Vec<MultiPoly> = public
        .polys
        .iter()
        .zip(ciphertext)
        .map(|(p, &c)| p.sub(&MultiPoly::constant(p.field(), public.n, c)))
        .collect::<Result<_>>()?;
    sys.extend(field_equations(public.q, public.n)?);
    Ok(sys)
}

#[derive(Clone, Debug)]
pub struct AttackReport {
    pub candidates: Vec<Vec<Elem>>,
    pub solve: SolveReport,
    /// Read off the last rows of the reduced matrix rather than enumerated.
    pub read_from_rows: bool,
    /// `(q-1)n + 2`.
    pub sd_fake_bound: u32,
    /// `(q-1)(t+1) + 1`.
    pub lfd_bound: u32,
}

fn enumerate_zeros(basis: &GroebnerBasis, q: u32, n: usize) -> Result<Vec<Vec<Elem>>> {
    let mut out = Vec::new();
    let total = (q as u64).pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let x: Vec<Elem> = (0..n)
            .map(|_| {
                let d = (c % q as u64) as u32;
                c /= q as u64;
                Elem(d)
            })
            .collect();
        let mut zero = true;
        for g in &basis.polys {
            if !g.eval(&x)?.is_zero() {
                zero = false;
                break;
            }
        }
        if zero {
            out.push(x);
        }
    }
    out.sort();
    Ok(out)
}

/// Solves the public system for `ciphertext` with the matrix engine.
pub fn hfe_attack(public: &HfePublicKey, ciphertext: &[Elem], d_max: u32) -> Result<AttackReport> {
    let sys = attack_system(public, ciphertext)?;
    let solve = solving_degree(&sys, TermOrder::Drl, d_max)?;
    let (q, n) = (public.q, public.n);
    let (candidates, read_from_rows) = match (&solve.solution, solve.linear_signature_holds()) {
        (Some(sol), Some(true)) => (vec![sol.clone()], true),
        _ if solve.basis.is_unit() => (Vec::new(), false),
        _ => (enumerate_zeros(&solve.basis, q, n)?, false),
    };
    Ok(AttackReport {
        candidates,
        solve,
        read_from_rows,
        sd_fake_bound: (q - 1) * n as u32 + 2,
        lfd_bound: crate::bounds::bound_hfe_corollary(q, public.t),
    })
}
