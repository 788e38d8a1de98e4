//! Acceptance battery. Each test prints one verdict line and then asserts it.

use std::sync::Arc;
use std::time::{Duration, Instant};

use descentlab_core::bounds::bound_lfd_main;
use descentlab_core::descent::{build_system, fake_descend, fake_descend_monomial, field_equations, Flavor};
use descentlab_core::engine::{buchberger_gb, compute_wd, in_vd, solving_degree};
use descentlab_core::fields::{Elem, Field};
use descentlab_core::hfe::{hfe_attack, hfe_decrypt, hfe_encrypt, hfe_keygen};
use descentlab_core::lastfall::{gcd_remainders_in_vu, last_fall_exact, membership_lemma_suite, relate_weil_check};
use descentlab_core::multipoly::{AffineMap, Monomial, MultiPoly, TermOrder};
use descentlab_core::unipoly::{weight_exp, UniPoly};
use descentlab_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(id: u32, name: &str, ok: bool, detail: &str) {
    println!("[{id:02}] {} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
}

fn mono(e: &[u32]) -> Monomial {
    Monomial::from_exps(e)
}

fn poly(k: &Arc<Field>, n: usize, terms: &[(&[u32], Elem)]) -> MultiPoly {
    MultiPoly::from_terms(k, n, terms.iter().map(|(e, c)| (mono(e), *c)))
}

// ---------------------------------------------------------------------------
// Oracles

/// Dense row space in reduced echelon form over a fixed column list.
struct Span {
    field: Arc<Field>,
    cols: Vec<Monomial>,
    rows: Vec<Vec<Elem>>,
    pivots: Vec<usize>,
}

impl Span {
    /// Columns: every monomial of degree <= d, by degree descending with an
    /// arbitrary tie-break.
    fn new(field: &Arc<Field>, nvars: usize, d: u32) -> Span {
        let mut cols = Vec::new();
        let mut stack = vec![(0usize, Vec::<u32>::new(), 0u32)];
        while let Some((i, exps, deg)) = stack.pop() {
            if i == nvars {
                cols.push(mono(&exps));
                continue;
            }
            for a in 0..=(d - deg) {
                let mut e = exps.clone();
                e.push(a);
                stack.push((i + 1, e, deg + a));
            }
        }
        cols.sort_by(|a, b| b.degree().cmp(&a.degree()).then(b.exps().cmp(a.exps())));
        Span { field: field.clone(), cols, rows: Vec::new(), pivots: Vec::new() }
    }

    fn dense(&self, f: &MultiPoly) -> Option<Vec<Elem>> {
        let mut v = vec![Elem::ZERO; self.cols.len()];
        for (m, c) in f.terms() {
            let i = self.cols.iter().position(|x| x == m)?;
            v[i] = *c;
        }
        Some(v)
    }

    fn reduce(&self, v: &mut [Elem]) {
        let k = &self.field;
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            let c = v[p];
            if !c.is_zero() {
                for (x, y) in v.iter_mut().zip(r) {
                    *x = k.sub(*x, k.mul(c, *y));
                }
            }
        }
    }

    fn insert(&mut self, f: &MultiPoly) -> bool {
        let Some(mut v) = self.dense(f) else { return false };
        self.reduce(&mut v);
        let Some(p) = v.iter().position(|c| !c.is_zero()) else { return false };
        let k = self.field.clone();
        let s = k.inv(v[p]).unwrap();
        for x in v.iter_mut() {
            *x = k.mul(*x, s);
        }
        for r in self.rows.iter_mut() {
            let c = r[p];
            if !c.is_zero() {
                for (x, y) in r.iter_mut().zip(&v) {
                    *x = k.sub(*x, k.mul(c, *y));
                }
            }
        }
        self.rows.push(v);
        self.pivots.push(p);
        true
    }

    fn contains(&self, f: &MultiPoly) -> bool {
        let Some(mut v) = self.dense(f) else { return false };
        self.reduce(&mut v);
        v.iter().all(|c| c.is_zero())
    }

    fn row_poly(&self, i: usize, nvars: usize) -> MultiPoly {
        MultiPoly::from_terms(&self.field, nvars, self.cols.iter().zip(&self.rows[i]).map(|(m, c)| (*m, *c)))
    }
}

/// The smallest space holding the generators of degree <= d and closed under
/// multiplication by single variables while the degree stays <= d.
fn vd_closure(polys: &[MultiPoly], d: u32) -> Span {
    let k = polys[0].field().clone();
    let n = polys[0].nvars();
    let mut s = Span::new(&k, n, d);
    for p in polys {
        if p.degree().is_some_and(|e| e <= d) {
            s.insert(p);
        }
    }
    loop {
        let mut grew = false;
        // Rows whose pivot has degree < d span the part of degree < d.
        let low: Vec<MultiPoly> = (0..s.rows.len()).filter(|&i| s.cols[s.pivots[i]].degree() < d).map(|i| s.row_poly(i, n)).collect();
        for r in &low {
            for j in 0..n {
                grew |= s.insert(&r.mul(&MultiPoly::var(&k, n, j)).unwrap());
            }
        }
        if !grew {
            return s;
        }
    }
}

/// Digit sum via Legendre: s_q(e) = e - (q-1) sum_{i>=1} floor(e / q^i).
fn weight_oracle(e: u64, q: u64) -> u64 {
    let mut acc = 0;
    let mut p = q;
    while p <= e {
        acc += e / p;
        p *= q;
    }
    e - (q - 1) * acc
}

/// Smallest k with q^k >= x.
fn ceil_log(q: u64, x: u64) -> u64 {
    let mut k = 0;
    let mut p = 1;
    while p < x {
        p *= q;
        k += 1;
    }
    k
}

/// The bound of the main theorem with its minimal d.
fn main_bound_oracle(polys: &[UniPoly]) -> (u64, u64) {
    let q = polys[0].field().characteristic() as u64;
    let degs: Vec<u64> = polys.iter().map(|f| f.degree().finite().unwrap()).collect();
    let fakes: Vec<u64> = polys.iter().map(|f| fake_descend(f).degree().unwrap_or(0) as u64).collect();
    let u = |d: u64| (q - 1) * (ceil_log(q, d) + 1) + 1;
    let d = (1..).find(|&d| degs.iter().any(|&e| e <= d) && fakes.iter().all(|&w| w <= u(d))).unwrap();
    (d, u(d))
}

fn random_sparse(k: &Arc<Field>, rng: &mut ChaCha8Rng) -> UniPoly {
    let top = k.size() - 1;
    loop {
        let nterms = rng.gen_range(2..=3);
        let terms: Vec<(u64, Elem)> = (0..nterms)
            .map(|i| {
                let e = if i == 0 { rng.gen_range(1..=top) } else { rng.gen_range(0..=top) };
                (e, Elem(rng.gen_range(1..k.size() as u32)))
            })
            .collect();
        let f = UniPoly::from_terms(k, terms);
        if !f.is_constant() {
            return f;
        }
    }
}

/// ≥60 seeded sparse systems over GF(2^n), n = 3, 4, 5.
fn sparse_corpus() -> Vec<Vec<UniPoly>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let mut out = Vec::new();
    for n in 3..=5 {
        let k = Field::with_default_modulus(2, n).unwrap();
        for _ in 0..21 {
            let count = rng.gen_range(1..=2);
            out.push((0..count).map(|_| random_sparse(&k, &mut rng)).collect());
        }
    }
    out
}

fn worked_example() -> Vec<UniPoly> {
    let k = Field::new(2, vec![1, 0, 1, 0, 0, 1], None).unwrap();
    let t = k.generator_t();
    vec![
        UniPoly::from_terms(&k, [(11, k.pow(t, 16)), (0, Elem::ONE)]),
        UniPoly::from_terms(&k, [(31, t), (0, Elem::ONE)]),
    ]
}

// ---------------------------------------------------------------------------

#[test]
fn c01_worked_example_reaches_the_bound() {
    let start = Instant::now();
    let f = worked_example();
    let bound = bound_lfd_main(&f).unwrap();
    let sys = build_system(&f, Flavor::WeilFprimeField).unwrap();
    let sd = solving_degree(sys.multivariate().unwrap(), TermOrder::Drl, 12).map(|r| r.degree);
    let elapsed = start.elapsed();
    let ok = sd == Ok(6) && bound == (11, 6) && elapsed < Duration::from_secs(10);
    verdict(1, "GF(32) pair solving degree", ok, &format!("sd_DRL={sd:?} (want 6), bound={bound:?} (want (11, 6)), {elapsed:?}"));
    assert_eq!(bound, (11, 6));
    assert!(ok);
}

#[test]
fn c02_gf4_remainder_difference() {
    let start = Instant::now();
    let k = Field::with_default_modulus(2, 2).unwrap();
    let t = k.generator_t();
    let t2 = k.mul(t, t);
    let h1 = UniPoly::from_terms(&k, [(3, Elem::ONE), (2, t), (1, Elem::ONE), (0, t2)]);
    let diff = fake_descend(&h1).sub(&fake_descend(&UniPoly::one(&k))).unwrap();
    let want = poly(&k, 2, &[(&[1, 1], Elem::ONE), (&[0, 1], t), (&[1, 0], Elem::ONE), (&[0, 0], t)]);
    let h2 = UniPoly::from_terms(&k, [(1, Elem::ONE), (0, Elem::ONE)]);
    let sys = build_system(std::slice::from_ref(&h2), Flavor::FakeFbarField).unwrap();
    let polys = sys.multivariate().unwrap();
    let in_v2 = in_vd(&diff, polys, 2).unwrap();
    let oracle = vd_closure(polys, 2).contains(&diff);
    let report = membership_lemma_suite(polys, &h1, &h2).unwrap();
    let elapsed = start.elapsed();
    let ok = diff == want && in_v2 && oracle && report.u == 2 && report.remainder == Some(true) && elapsed < Duration::from_secs(1);
    verdict(2, "GF(4) difference in V_2", ok, &format!("diff={diff:?}, in V_2: engine={in_v2} oracle={oracle}, u={}, {elapsed:?}", report.u));
    assert!(ok);
}

#[test]
fn c03_coordinate_change_without_simple_zero() {
    let start = Instant::now();
    let k = Field::prime(3).unwrap();
    let e = vec![poly(&k, 2, &[(&[2, 0], Elem::ONE)]), poly(&k, 2, &[(&[0, 2], Elem::ONE)])];
    let phi = AffineMap::new(&k, vec![vec![Elem(1), Elem(0)], vec![Elem(1), Elem(1)]], vec![Elem(0), Elem(0)]).unwrap();
    let pe: Vec<MultiPoly> = e.iter().map(|p| phi.apply(p).unwrap()).collect();
    let want_pe = poly(&k, 2, &[(&[2, 0], Elem(1)), (&[1, 1], Elem(2)), (&[0, 2], Elem(1))]);
    let sd_e = solving_degree(&e, TermOrder::Drl, 6).unwrap().degree;
    let r = solving_degree(&pe, TermOrder::Drl, 6).unwrap();
    let mut got: Vec<MultiPoly> = r.basis.polys.clone();
    let mut want = vec![
        poly(&k, 2, &[(&[2, 0], Elem(1))]),
        poly(&k, 2, &[(&[1, 1], Elem(1)), (&[0, 2], Elem(2))]),
        poly(&k, 2, &[(&[0, 3], Elem(1))]),
    ];
    let key = |p: &MultiPoly| format!("{p:?}");
    got.sort_by_key(key);
    want.sort_by_key(key);
    let elapsed = start.elapsed();
    let ok = pe[1] == want_pe && sd_e == 2 && r.degree == 3 && r.basis.reduced && got == want && elapsed < Duration::from_secs(1);
    verdict(3, "F3 squares under a shear", ok, &format!("sd(E)={sd_e}, sd(phi E)={}, GB={got:?}, {elapsed:?}", r.degree));
    assert!(ok);
}

#[test]
fn c04_lex_solving_degree_below_last_fall() {
    let start = Instant::now();
    let k = Field::prime(3).unwrap();
    let mut lines = Vec::new();
    let mut ok = true;
    for d in 3..=5u32 {
        let mut e1 = vec![0, 0, 0];
        e1[0] = 1;
        e1[2] = d - 1;
        let g1 = poly(&k, 3, &[(&[1, 0, 0], Elem(1)), (&e1, Elem(2))]);
        let g2 = poly(&k, 3, &[(&[0, 1, 0], Elem(1)), (&[0, 0, d], Elem(2))]);
        let sys = vec![g1, g2];
        let f = poly(&k, 3, &[(&[1, 0, 1], Elem(1)), (&[1, 1, 0], Elem(2))]);
        let sd = solving_degree(&sys, TermOrder::Lex, d + 2).unwrap().degree;
        let below = in_vd(&f, &sys, d).unwrap();
        let above = in_vd(&f, &sys, d + 1).unwrap();
        let oracle = (vd_closure(&sys, d).contains(&f), vd_closure(&sys, d + 1).contains(&f));
        let lf = last_fall_exact(&sys, d + 1).unwrap();
        let good = sd == d && !below && above && oracle == (false, true) && lf.lower > d;
        ok &= good;
        lines.push(format!("d={d}: sd_LEX={sd}, f in V_d={below}, f in V_(d+1)={above}, bracket={:?}", lf.bracket()));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(5);
    verdict(4, "lex solving degree vs last fall", ok, &format!("{}; {elapsed:?}", lines.join("; ")));
    assert!(ok);
}

fn random_system(rng: &mut ChaCha8Rng) -> Vec<MultiPoly> {
    let q = if rng.gen_bool(0.5) { 2 } else { 3 };
    let n = rng.gen_range(1..=3usize);
    let k = Field::prime(q).unwrap();
    let count = rng.gen_range(1..=3);
    let mut out = Vec::new();
    while out.len() < count {
        let deg = rng.gen_range(1..=3u32);
        let mut p = MultiPoly::zero(&k, n);
        for _ in 0..rng.gen_range(1..=4) {
            let mut e = vec![0u32; n];
            let mut left = rng.gen_range(0..=deg);
            for slot in e.iter_mut() {
                let a = rng.gen_range(0..=left);
                *slot = a;
                left -= a;
            }
            p.add_term(mono(&e), Elem(rng.gen_range(1..q)));
        }
        if !p.is_constant() {
            out.push(p);
        }
    }
    out.extend(field_equations(q, n).unwrap());
    out
}

#[test]
fn c05_closure_oracle_matches_wd() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let (mut violations, mut checks) = (0, 0);
    let mut first = String::new();
    for i in 0..120 {
        let sys = random_system(&mut rng);
        let q = sys[0].field().characteristic();
        let n = sys[0].nvars() as u32;
        let d_max = (q - 1) * n + 4;
        for d in 1..=d_max {
            let oracle = vd_closure(&sys, d);
            let same = match compute_wd(&sys, d, TermOrder::Drl) {
                Ok(w) => w.rank() == oracle.rows.len() && w.rows().iter().all(|r| oracle.contains(r)),
                Err(Error::DegreeTooSmall(_)) => oracle.rows.is_empty(),
                Err(_) => false,
            };
            checks += 1;
            if !same {
                violations += 1;
                if first.is_empty() {
                    first = format!("system {i} at d={d}");
                }
            }
        }
        let sd = solving_degree(&sys, TermOrder::Drl, d_max).map(|r| r.degree);
        let de = last_fall_exact(&sys, d_max).map(|r| r.exact);
        match (sd, de) {
            (Ok(s), Ok(Some(e))) if s >= e => {}
            other => {
                violations += 1;
                if first.is_empty() {
                    first = format!("system {i}: sd/d_E = {other:?}");
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = violations == 0 && elapsed < Duration::from_secs(120);
    verdict(5, "closure oracle = W_d and sd >= d_E", ok, &format!("120 systems, {checks} degree checks, {violations} violations {first}, {elapsed:?}"));
    assert!(ok);
}

#[test]
fn c06_c07_main_bound_and_gcd_remainders() {
    let start = Instant::now();
    let corpus = sparse_corpus();
    let (mut bound_bad, mut relate_bad, mut gcd_bad, mut gcd_checks) = (0, 0, 0, 0);
    let mut first = String::new();
    for (i, f) in corpus.iter().enumerate() {
        let (d, bound) = main_bound_oracle(f);
        let engine_bound = bound_lfd_main(f).unwrap();
        let sys = build_system(f, Flavor::WeilFprimeField).unwrap();
        let lf = last_fall_exact(sys.multivariate().unwrap(), 10).unwrap();
        if engine_bound != (d, bound as u32) || !lf.exact.is_some_and(|e| e as u64 <= bound) {
            bound_bad += 1;
            if first.is_empty() {
                first = format!("instance {i}: d_E={:?}, bound={bound}, engine={engine_bound:?}", lf.bracket());
            }
        }
        if relate_weil_check(f, 10).unwrap().holds != Some(true) {
            relate_bad += 1;
        }
        for g in f {
            let r = gcd_remainders_in_vu(g).unwrap();
            gcd_checks += r.remainders.len();
            gcd_bad += r.remainders.iter().filter(|x| !x.2).count();
        }
    }
    let elapsed = start.elapsed();
    let ok6 = bound_bad == 0 && relate_bad == 0 && elapsed < Duration::from_secs(180);
    let ok7 = gcd_bad == 0 && elapsed < Duration::from_secs(180);
    verdict(6, "main bound on sparse GF(2^n) systems", ok6, &format!("{} instances, {bound_bad} bound violations, {relate_bad} comparison violations {first}, {elapsed:?}", corpus.len()));
    verdict(7, "gcd remainders fall in V_u", ok7, &format!("{gcd_checks} remainders, {gcd_bad} outside V_u"));
    assert!(ok6 && ok7);
}

/// A random system over GF(q) whose only zero is simple, with field
/// equations attached.
fn simple_zero_system(q: u32, n: usize, rng: &mut ChaCha8Rng) -> Vec<MultiPoly> {
    let k = Field::prime(q).unwrap();
    loop {
        let a: Vec<Elem> = (0..n).map(|_| Elem(rng.gen_range(0..q))).collect();
        let mut sys = Vec::new();
        for _ in 0..n + 1 {
            let mut p = MultiPoly::zero(&k, n);
            for _ in 0..rng.gen_range(2..=5) {
                let e: Vec<u32> = (0..n).map(|_| rng.gen_range(0..q.min(3))).collect();
                if e.iter().sum::<u32>() <= 2 {
                    p.add_term(mono(&e), Elem(rng.gen_range(1..q)));
                }
            }
            let c = p.eval(&a).unwrap();
            let p = p.sub(&MultiPoly::constant(&k, n, c)).unwrap();
            if !p.is_constant() {
                sys.push(p);
            }
        }
        sys.extend(field_equations(q, n).unwrap());
        if buchberger_gb(&sys, TermOrder::Drl).linear_solution() == Some(a) {
            return sys;
        }
    }
}

#[test]
fn c08_coordinate_invariance_for_simple_zeros() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let (mut total, mut bad, mut over_ext) = (0, 0, 0);
    let mut first = String::new();
    for i in 0..60 {
        let q = if i % 2 == 0 { 2 } else { 3 };
        let n = 2 + (i / 2) % 2;
        let e = simple_zero_system(q, n, &mut rng);
        let target = if i % 3 == 0 {
            over_ext += 1;
            Field::with_default_modulus(q, 2).unwrap()
        } else {
            Field::prime(q).unwrap()
        };
        let phi = AffineMap::random(&target, n, &mut rng);
        let pe: Vec<MultiPoly> = e.iter().map(|p| phi.apply(p).unwrap()).collect();
        let d_max = (q - 1) * n as u32 + 4;
        let r1 = solving_degree(&e, TermOrder::Drl, d_max).unwrap();
        let r2 = solving_degree(&pe, TermOrder::Drl, d_max).unwrap();
        total += 1;
        let good = r1.degree == r2.degree && r1.linear_signature_holds() == Some(true) && r2.linear_signature_holds() == Some(true);
        if !good {
            bad += 1;
            if first.is_empty() {
                first = format!("instance {i}: sd {} vs {}", r1.degree, r2.degree);
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = bad == 0 && total >= 50 && elapsed < Duration::from_secs(120);
    verdict(8, "solving degree invariant under affine maps", ok, &format!("{total} systems ({over_ext} over an extension), {bad} violations {first}, {elapsed:?}"));
    assert!(ok);
}

#[test]
fn c09_hfe_end_to_end() {
    let start = Instant::now();
    let q = 2u32;
    let (mut runs, mut bad) = (0, 0);
    let mut first = String::new();
    for n in 4..=6usize {
        for t in 2..=3u32 {
            for seed in 0..10u64 {
                runs += 1;
                let keys = hfe_keygen(q, n, t, seed).unwrap();
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37);
                let x: Vec<Elem> = (0..n).map(|_| Elem(rng.gen_range(0..q))).collect();
                let c = hfe_encrypt(&keys.public, &x).unwrap();
                let dec = hfe_decrypt(&keys.private, &c).unwrap();
                let att = hfe_attack(&keys.public, &c, (q - 1) * n as u32 + 4).unwrap();
                let central = std::slice::from_ref(&keys.private.central);
                let fake = build_system(central, Flavor::FakeFbarField).unwrap();
                let sd_bound = (q - 1) * n as u32 + 2;
                let sd = solving_degree(fake.multivariate().unwrap(), TermOrder::Drl, sd_bound).map(|r| r.degree);
                let weil = build_system(central, Flavor::WeilFprimeField).unwrap();
                let lf_bound = (q - 1) * (t + 1) + 1;
                let lf = last_fall_exact(weil.multivariate().unwrap(), lf_bound + 3).unwrap();
                let good = dec.contains(&x)
                    && att.candidates == dec
                    && sd.as_ref().is_ok_and(|&s| s <= sd_bound)
                    && lf.exact.is_some_and(|e| e <= lf_bound);
                if !good {
                    bad += 1;
                    if first.is_empty() {
                        first = format!("n={n} t={t} seed={seed}: sd={sd:?}, d_E={:?}, decrypted={}", lf.bracket(), dec.contains(&x));
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = bad == 0 && elapsed < Duration::from_secs(300);
    verdict(9, "HFE round trip, attack and bounds", ok, &format!("{runs} keys, {bad} violations {first}, {elapsed:?}"));
    assert!(ok);
}

#[test]
fn c10_weight_facts_exhaustive() {
    let start = Instant::now();
    let (mut checked, mut bad) = (0u64, 0u64);
    for q in [2u32, 3] {
        for n in 1..=4usize {
            let qn = (q as u64).pow(n as u32);
            for e in 0..3 * qn {
                checked += 1;
                let w = weight_exp(e, q) as u64;
                let mut good = w == weight_oracle(e, q as u64) && w == weight_exp(e * q as u64, q) as u64;
                good &= w <= (q as u64 - 1) * ceil_log(q as u64, e + 1);
                let deg = fake_descend_monomial(e, q, n).degree() as u64;
                let expect = if e == 0 {
                    0
                } else if e % (qn - 1) == 0 {
                    (q as u64 - 1) * n as u64
                } else {
                    weight_oracle(e % (qn - 1), q as u64)
                };
                good &= deg == expect && deg <= w;
                if !good {
                    bad += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = bad == 0 && elapsed < Duration::from_secs(30);
    verdict(10, "weights and fake monomial degrees", ok, &format!("{checked} exponents, {bad} violations, {elapsed:?}"));
    assert!(ok);
}
