//! Canonical JSON for fields, polynomials, systems and HFE keys.
//!
//! Output is compact with sorted object keys (`serde_json::Map` is a
//! `BTreeMap`), so serialising a parsed canonical file reproduces it byte
//! for byte. Parsers reject unknown keys.

use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::descent::{Flavor, Generators, Origin, PolySystem};
use crate::error::{Error, Result};
use crate::fields::{Elem, Field};
use crate::hfe::{HfeKeyPair, HfePrivateKey, HfePublicKey};
use crate::multipoly::{AffineMap, Monomial, MultiPoly, TermOrder};
use crate::unipoly::UniPoly;

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn object<'a>(v: &'a Value, what: &str, allowed: &[&str]) -> Result<&'a Map<String, Value>> {
    let obj = v.as_object().ok_or_else(|| perr(format!("{what}: expected an object")))?;
    if let Some(k) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(perr(format!("{what}: unknown key {k:?}")));
    }
    Ok(obj)
}

fn field_of<'a>(obj: &'a Map<String, Value>, what: &str, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| perr(format!("{what}: missing key {key:?}")))
}

fn as_u64(v: &Value, what: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| perr(format!("{what}: expected a non-negative integer")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| perr(format!("{what}: expected an array")))
}

fn u32_list(v: &Value, what: &str) -> Result<Vec<u32>> {
    as_array(v, what)?
        .iter()
        .map(|x| as_u64(x, what).and_then(|n| u32::try_from(n).map_err(|_| perr(format!("{what}: value too large")))))
        .collect()
}

/// Compact, key-sorted rendering.
pub fn to_canonical_string(v: &Value) -> String {
    serde_json::to_string(v).expect("values always serialise")
}

pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| perr(e.to_string()))
}

pub fn field_to_json(k: &Field) -> Value {
    let mut obj = Map::new();
    obj.insert("p".into(), json!(k.characteristic()));
    obj.insert("n".into(), json!(k.degree()));
    obj.insert("modulus".into(), json!(k.modulus()));
    if !k.has_power_basis() {
        let basis: Vec<Vec<u32>> = k.basis().iter().map(|&b| k.digits(b)).collect();
        obj.insert("basis".into(), json!(basis));
    }
    Value::Object(obj)
}

pub fn field_from_json(v: &Value) -> Result<Arc<Field>> {
    let what = "field";
    let obj = object(v, what, &["p", "n", "modulus", "basis"])?;
    let p = u32::try_from(as_u64(field_of(obj, what, "p")?, what)?).map_err(|_| perr("field: p too large"))?;
    let modulus = u32_list(field_of(obj, what, "modulus")?, "field.modulus")?;
    let n = as_u64(field_of(obj, what, "n")?, what)? as usize;
    if modulus.len() != n + 1 {
        return Err(perr(format!("field: n = {n} but modulus has degree {}", modulus.len() as i64 - 1)));
    }
    let basis = match obj.get("basis") {
        None => None,
        Some(b) => Some(as_array(b, "field.basis")?.iter().map(|x| u32_list(x, "field.basis")).collect::<Result<Vec<_>>>()?),
    };
    Field::new(p, modulus, basis)
}

/// Power-basis digits, little-endian, always `n` of them.
pub fn elem_to_json(k: &Field, a: Elem) -> Value {
    json!(k.digits(a))
}

pub fn elem_from_json(k: &Field, v: &Value) -> Result<Elem> {
    let d = u32_list(v, "element")?;
    if d.len() != k.degree() {
        return Err(perr(format!("element: expected {} digits, got {}", k.degree(), d.len())));
    }
    if d.iter().any(|&c| c >= k.characteristic()) {
        return Err(perr("element: digit out of range"));
    }
    Ok(k.from_digits(&d))
}

pub fn elems_to_json(k: &Field, v: &[Elem]) -> Value {
    Value::Array(v.iter().map(|&a| elem_to_json(k, a)).collect())
}

pub fn elems_from_json(k: &Field, v: &Value) -> Result<Vec<Elem>> {
    as_array(v, "element list")?.iter().map(|x| elem_from_json(k, x)).collect()
}

/// Exponents decreasing.
pub fn unipoly_to_json(f: &UniPoly) -> Value {
    let k = f.field();
    let terms: Vec<Value> = f.terms().iter().map(|&(e, c)| json!({ "e": e, "c": elem_to_json(k, c) })).collect();
    json!({ "terms": terms })
}

pub fn unipoly_from_json(k: &Arc<Field>, v: &Value) -> Result<UniPoly> {
    let obj = object(v, "polynomial", &["terms"])?;
    let mut terms = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for t in as_array(field_of(obj, "polynomial", "terms")?, "terms")? {
        let to = object(t, "term", &["e", "c"])?;
        let e = as_u64(field_of(to, "term", "e")?, "term.e")?;
        if e >= 1 << 63 {
            return Err(perr("term: exponent exceeds 63 bits"));
        }
        if !seen.insert(e) {
            return Err(perr(format!("term: repeated exponent {e}")));
        }
        terms.push((e, elem_from_json(k, field_of(to, "term", "c")?)?));
    }
    Ok(UniPoly::from_terms(k, terms))
}

/// Terms in decreasing DRL order.
pub fn multipoly_to_json(f: &MultiPoly) -> Value {
    let k = f.field();
    let terms: Vec<Value> = f
        .sorted_terms(TermOrder::Drl)
        .iter()
        .map(|(m, c)| json!({ "m": m.exps(), "c": elem_to_json(k, *c) }))
        .collect();
    json!({ "terms": terms })
}

pub fn multipoly_from_json(k: &Arc<Field>, nvars: usize, v: &Value) -> Result<MultiPoly> {
    let obj = object(v, "polynomial", &["terms"])?;
    let mut out = MultiPoly::zero(k, nvars);
    let mut seen = std::collections::BTreeSet::new();
    for t in as_array(field_of(obj, "polynomial", "terms")?, "terms")? {
        let to = object(t, "term", &["m", "c"])?;
        let exps = u32_list(field_of(to, "term", "m")?, "term.m")?;
        if exps.len() != nvars {
            return Err(Error::LengthMismatch { expected: nvars, got: exps.len() });
        }
        if exps.iter().any(|&a| a > u16::MAX as u32) {
            return Err(perr("term: exponent too large"));
        }
        let m = Monomial::from_exps(&exps);
        if !seen.insert(m) {
            return Err(perr(format!("term: repeated monomial {exps:?}")));
        }
        out.add_term(m, elem_from_json(k, field_of(to, "term", "c")?)?);
    }
    Ok(out)
}

pub fn affine_to_json(a: &AffineMap) -> Value {
    let k = a.field();
    let rows: Vec<Value> = a.matrix_rows().iter().map(|r| elems_to_json(k, r)).collect();
    json!({ "A": rows, "b": elems_to_json(k, a.shift()) })
}

pub fn affine_from_json(k: &Arc<Field>, v: &Value) -> Result<AffineMap> {
    let obj = object(v, "affine map", &["A", "b"])?;
    let rows = as_array(field_of(obj, "affine map", "A")?, "A")?
        .iter()
        .map(|r| elems_from_json(k, r))
        .collect::<Result<Vec<_>>>()?;
    let shift = elems_from_json(k, field_of(obj, "affine map", "b")?)?;
    AffineMap::new(k, rows, shift)
}

fn origin_tag(o: &Origin) -> String {
    match o {
        Origin::Input(i) => format!("input:{i}"),
        Origin::Descended { input, component } => format!("descended:{input}:{component}"),
        Origin::FakeDescended(i) => format!("fake:{i}"),
        Origin::UnivariateFieldEquation => "field_equation".into(),
        Origin::FieldEquation(j) => format!("field_equation:{j}"),
        Origin::CyclicEquation(j) => format!("cyclic:{j}"),
    }
}

fn origin_from_tag(s: &str) -> Result<Origin> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |x: &str| x.parse::<usize>().map_err(|_| perr(format!("origin: bad index in {s:?}")));
    Ok(match parts.as_slice() {
        ["input", i] => Origin::Input(num(i)?),
        ["descended", i, j] => Origin::Descended { input: num(i)?, component: num(j)? },
        ["fake", i] => Origin::FakeDescended(num(i)?),
        ["field_equation"] => Origin::UnivariateFieldEquation,
        ["field_equation", j] => Origin::FieldEquation(num(j)?),
        ["cyclic", j] => Origin::CyclicEquation(num(j)?),
        _ => return Err(perr(format!("origin: unknown tag {s:?}"))),
    })
}

/// A system file. Univariate systems carry their field as `field`;
/// multivariate ones record the coefficient field there and, when it
/// differs, the extension they were derived from as `extension`.
pub fn system_to_json(sys: &PolySystem) -> Value {
    let mut obj = Map::new();
    obj.insert("flavor".into(), json!(sys.flavor().tag()));
    let input_only = sys.origins().iter().enumerate().all(|(i, o)| *o == Origin::Input(i));
    if !input_only {
        obj.insert("origins".into(), json!(sys.origins().iter().map(origin_tag).collect::<Vec<_>>()));
    }
    match sys.generators() {
        Generators::Univariate(v) => {
            obj.insert("kind".into(), json!("univariate"));
            obj.insert("field".into(), field_to_json(sys.extension()));
            obj.insert("polys".into(), Value::Array(v.iter().map(unipoly_to_json).collect()));
        }
        Generators::Multivariate(v) => {
            let coeff = sys.coefficient_field();
            obj.insert("kind".into(), json!("multivariate"));
            obj.insert("field".into(), field_to_json(&coeff));
            if !(coeff.same_field(sys.extension()) && coeff.basis() == sys.extension().basis()) {
                obj.insert("extension".into(), field_to_json(sys.extension()));
            }
            obj.insert("nvars".into(), json!(v.first().map_or(0, |p| p.nvars())));
            obj.insert("polys".into(), Value::Array(v.iter().map(multipoly_to_json).collect()));
        }
    }
    Value::Object(obj)
}

pub fn system_from_json(v: &Value) -> Result<PolySystem> {
    let what = "system";
    let obj = object(v, what, &["kind", "field", "extension", "nvars", "polys", "flavor", "origins"])?;
    let field = field_from_json(field_of(obj, what, "field")?)?;
    let kind = field_of(obj, what, "kind")?.as_str().ok_or_else(|| perr("system: kind must be a string"))?;
    let polys = as_array(field_of(obj, what, "polys")?, "polys")?;
    let flavor = match obj.get("flavor") {
        None => None,
        Some(f) => {
            let s = f.as_str().ok_or_else(|| perr("system: flavor must be a string"))?;
            Some(Flavor::from_tag(s).ok_or_else(|| perr(format!("system: unknown flavor {s:?}")))?)
        }
    };
    let (flavor, extension, generators) = match kind {
        "univariate" => {
            if obj.contains_key("nvars") || obj.contains_key("extension") {
                return Err(perr("system: univariate systems take no nvars or extension"));
            }
            let flavor = flavor.unwrap_or(Flavor::UnivariateF);
            if !flavor.is_univariate() {
                return Err(perr(format!("system: flavor {flavor} is not univariate")));
            }
            let v = polys.iter().map(|p| unipoly_from_json(&field, p)).collect::<Result<Vec<_>>>()?;
            (flavor, field, Generators::Univariate(v))
        }
        "multivariate" => {
            let nvars = as_u64(field_of(obj, what, "nvars")?, "nvars")? as usize;
            if nvars == 0 || nvars > 16 {
                return Err(perr("system: nvars must be in 1..=16"));
            }
            let flavor = flavor.unwrap_or(Flavor::Custom);
            if flavor.is_univariate() {
                return Err(perr(format!("system: flavor {flavor} is univariate")));
            }
            let extension = match obj.get("extension") {
                Some(e) => field_from_json(e)?,
                None => field.clone(),
            };
            let v = polys.iter().map(|p| multipoly_from_json(&field, nvars, p)).collect::<Result<Vec<_>>>()?;
            (flavor, extension, Generators::Multivariate(v))
        }
        other => return Err(perr(format!("system: unknown kind {other:?}"))),
    };
    let count = polys.len();
    let origins = match obj.get("origins") {
        None => (0..count).map(Origin::Input).collect(),
        Some(o) => {
            let tags = as_array(o, "origins")?
                .iter()
                .map(|t| t.as_str().ok_or_else(|| perr("origins: expected strings")).and_then(origin_from_tag))
                .collect::<Result<Vec<_>>>()?;
            if tags.len() != count {
                return Err(Error::LengthMismatch { expected: count, got: tags.len() });
            }
            tags
        }
    };
    Ok(PolySystem::from_parts(extension, flavor, generators, origins))
}

pub fn parse_system(text: &str) -> Result<PolySystem> {
    system_from_json(&parse_json(text)?)
}

pub fn write_system(sys: &PolySystem) -> String {
    to_canonical_string(&system_to_json(sys))
}

pub fn public_key_to_json(pk: &HfePublicKey) -> Value {
    let prime = pk.polys[0].field();
    json!({
        "q": pk.q,
        "n": pk.n,
        "t": pk.t,
        "field": field_to_json(prime),
        "polys": pk.polys.iter().map(multipoly_to_json).collect::<Vec<_>>(),
    })
}

pub fn public_key_from_json(v: &Value) -> Result<HfePublicKey> {
    let what = "public key";
    let obj = object(v, what, &["q", "n", "t", "field", "polys"])?;
    let field = field_from_json(field_of(obj, what, "field")?)?;
    let q = as_u64(field_of(obj, what, "q")?, what)? as u32;
    let n = as_u64(field_of(obj, what, "n")?, what)? as usize;
    let t = as_u64(field_of(obj, what, "t")?, what)? as u32;
    if !field.is_prime_field() || field.characteristic() != q || n == 0 || n > 16 {
        return Err(perr("public key: field must be GF(q) and 1 <= n <= 16"));
    }
    let polys = as_array(field_of(obj, what, "polys")?, "polys")?
        .iter()
        .map(|p| multipoly_from_json(&field, n, p))
        .collect::<Result<Vec<_>>>()?;
    if polys.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: polys.len() });
    }
    Ok(HfePublicKey { q, n, t, polys })
}

pub fn private_key_to_json(sk: &HfePrivateKey) -> Value {
    json!({
        "field": field_to_json(&sk.field),
        "central": unipoly_to_json(&sk.central),
        "S": affine_to_json(&sk.s),
        "T": affine_to_json(&sk.t_map),
    })
}

pub fn private_key_from_json(v: &Value) -> Result<HfePrivateKey> {
    let what = "private key";
    let obj = object(v, what, &["field", "central", "S", "T"])?;
    let field = field_from_json(field_of(obj, what, "field")?)?;
    let prime = Field::prime(field.characteristic())?;
    let central = unipoly_from_json(&field, field_of(obj, what, "central")?)?;
    let s = affine_from_json(&prime, field_of(obj, what, "S")?)?;
    let t_map = affine_from_json(&prime, field_of(obj, what, "T")?)?;
    if s.dim() != field.degree() || t_map.dim() != field.degree() {
        return Err(Error::LengthMismatch { expected: field.degree(), got: s.dim().min(t_map.dim()) });
    }
    Ok(HfePrivateKey { field, central, s, t_map })
}

pub fn keypair_to_json(kp: &HfeKeyPair) -> Value {
    json!({
        "seed": kp.seed,
        "public": public_key_to_json(&kp.public),
        "private": private_key_to_json(&kp.private),
    })
}

pub fn keypair_from_json(v: &Value) -> Result<HfeKeyPair> {
    let what = "key pair";
    let obj = object(v, what, &["seed", "public", "private"])?;
    Ok(HfeKeyPair {
        seed: as_u64(field_of(obj, what, "seed")?, what)?,
        public: public_key_from_json(field_of(obj, what, "public")?)?,
        private: private_key_from_json(field_of(obj, what, "private")?)?,
    })
}
