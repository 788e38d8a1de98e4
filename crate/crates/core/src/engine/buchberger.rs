//! Buchberger's algorithm on its own sorted-term representation. It shares
//! nothing with the matrix engine beyond field and monomial arithmetic.

use std::cmp::Ordering;
use std::sync::Arc;

use crate::fields::{Elem, Field};
use crate::multipoly::{Monomial, MultiPoly, TermOrder};

/// Terms sorted strictly decreasing under the order.
type Terms = Vec<(Monomial, Elem)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroebnerBasis {
    pub order: TermOrder,
    /// Sorted by increasing leading monomial.
    pub polys: Vec<MultiPoly>,
    pub reduced: bool,
}

impl GroebnerBasis {
    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.polys.iter().map(|g| g.leading_monomial(self.order).expect("nonzero")).collect()
    }

    pub fn is_unit(&self) -> bool {
        self.polys.len() == 1 && self.polys[0].is_constant()
    }

    /// `a_i` when the basis is exactly `{X_i - a_i}`.
    pub fn linear_solution(&self) -> Option<Vec<Elem>> {
        let n = self.polys.first()?.nvars();
        if self.polys.len() != n {
            return None;
        }
        let field = self.polys[0].field();
        let mut sol = vec![Elem::ZERO; n];
        let mut seen = vec![false; n];
        for g in &self.polys {
            let lead = g.leading_monomial(self.order)?;
            if lead.degree() != 1 || g.degree() != Some(1) {
                return None;
            }
            let i = (0..n).find(|&i| lead.exp(i) == 1)?;
            if g.nterms() > 2 || seen[i] {
                return None;
            }
            if g.terms().any(|(m, _)| m.degree() == 1 && *m != lead) {
                return None;
            }
            seen[i] = true;
            sol[i] = field.neg(g.coeff(&Monomial::one(n)));
        }
        Some(sol)
    }

    /// Normal form of `f` modulo the basis.
    pub fn normal_form(&self, f: &MultiPoly) -> MultiPoly {
        let field = f.field().clone();
        let basis: Vec<Terms> = self.polys.iter().map(|g| to_terms(g, self.order)).collect();
        from_terms(&field, f.nvars(), normal_form(&field, self.order, to_terms(f, self.order), &basis))
    }
}

fn to_terms(f: &MultiPoly, ord: TermOrder) -> Terms {
    f.sorted_terms(ord)
}

fn from_terms(field: &Arc<Field>, n: usize, t: Terms) -> MultiPoly {
    MultiPoly::from_terms(field, n, t)
}

/// `a - c * m * b`.
fn sub_mul(field: &Field, ord: TermOrder, a: &[(Monomial, Elem)], c: Elem, m: &Monomial, b: &[(Monomial, Elem)]) -> Terms {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() {
            out.extend_from_slice(&a[i..]);
            break;
        }
        let bm = b[j].0.mul(m);
        if i == a.len() {
            out.push((bm, field.neg(field.mul(c, b[j].1))));
            j += 1;
            continue;
        }
        match ord.cmp(&a[i].0, &bm) {
            Ordering::Greater => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Less => {
                out.push((bm, field.neg(field.mul(c, b[j].1))));
                j += 1;
            }
            Ordering::Equal => {
                let v = field.sub(a[i].1, field.mul(c, b[j].1));
                if !v.is_zero() {
                    out.push((bm, v));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn make_monic(field: &Field, t: &mut Terms) {
    if let Some(&(_, lc)) = t.first() {
        let s = field.inv(lc).expect("nonzero");
        for x in t.iter_mut() {
            x.1 = field.mul(x.1, s);
        }
    }
}

/// Full reduction: no term of the result is divisible by a leading monomial.
fn normal_form(field: &Field, ord: TermOrder, mut p: Terms, basis: &[Terms]) -> Terms {
    let mut rem: Terms = Vec::new();
    let mut start = 0;
    while start < p.len() {
        let (m, c) = p[start];
        match basis.iter().find(|g| g[0].0.divides(&m)) {
            Some(g) => {
                let u = g[0].0.quotient_of(&m).expect("divides");
                let s = field.div(c, g[0].1).expect("nonzero");
                p = sub_mul(field, ord, &p[start..], s, &u, g);
                start = 0;
            }
            None => {
                rem.push((m, c));
                start += 1;
            }
        }
    }
    rem
}

fn s_polynomial(field: &Field, ord: TermOrder, f: &Terms, g: &Terms) -> Terms {
    let l = f[0].0.lcm(&g[0].0);
    let uf = f[0].0.quotient_of(&l).expect("lcm");
    let ug = g[0].0.quotient_of(&l).expect("lcm");
    // f and g are monic here.
    let a = sub_mul(field, ord, &[], field.neg(Elem::ONE), &uf, f);
    sub_mul(field, ord, &a, Elem::ONE, &ug, g)
}

/// Reduced Gröbner basis of the ideal generated by `polys`.
pub fn buchberger_gb(polys: &[MultiPoly], ord: TermOrder) -> GroebnerBasis {
    let Some(first) = polys.first() else {
        return GroebnerBasis { order: ord, polys: Vec::new(), reduced: true };
    };
    let field = first.field().clone();
    let n = first.nvars();
    let mut g: Vec<Terms> = Vec::new();
    for f in polys {
        let mut t = to_terms(f, ord);
        if !t.is_empty() {
            make_monic(&field, &mut t);
            g.push(t);
        }
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..g.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }
    let is_pending = |pairs: &[(usize, usize)], a: usize, b: usize| {
        let key = (a.min(b), a.max(b));
        pairs.contains(&key)
    };
    while !pairs.is_empty() {
        // Normal selection: smallest lcm first, ties by index.
        let (k, _) = pairs
            .iter()
            .enumerate()
            .min_by(|(_, &(a, b)), (_, &(c, d))| {
                let l1 = g[a][0].0.lcm(&g[b][0].0);
                let l2 = g[c][0].0.lcm(&g[d][0].0);
                ord.cmp(&l1, &l2).then((a, b).cmp(&(c, d)))
            })
            .expect("nonempty");
        let (i, j) = pairs.swap_remove(k);
        let (li, lj) = (g[i][0].0, g[j][0].0);
        if li.is_coprime(&lj) {
            continue;
        }
        let l = li.lcm(&lj);
        let chain = (0..g.len()).any(|m| {
            m != i && m != j && g[m][0].0.divides(&l) && !is_pending(&pairs, i, m) && !is_pending(&pairs, j, m)
        });
        if chain {
            continue;
        }
        let s = s_polynomial(&field, ord, &g[i], &g[j]);
        let mut r = normal_form(&field, ord, s, &g);
        if r.is_empty() {
            continue;
        }
        make_monic(&field, &mut r);
        if r[0].0.degree() == 0 {
            return GroebnerBasis { order: ord, polys: vec![MultiPoly::one(&field, n)], reduced: true };
        }
        let new = g.len();
        g.push(r);
        for m in 0..new {
            pairs.push((m, new));
        }
    }
    if g.iter().any(|t| t[0].0.degree() == 0) {
        return GroebnerBasis { order: ord, polys: vec![MultiPoly::one(&field, n)], reduced: true };
    }

    // Minimalise: drop elements whose leading monomial is a multiple of another's.
    let mut keep: Vec<Terms> = Vec::new();
    for (i, t) in g.iter().enumerate() {
        let lead = t[0].0;
        let redundant = g.iter().enumerate().any(|(j, u)| {
            j != i && u[0].0.divides(&lead) && (u[0].0 != lead || j < i)
        });
        if !redundant {
            keep.push(t.clone());
        }
    }
    // Interreduce tails.
    for i in 0..keep.len() {
        let others: Vec<Terms> = keep.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, t)| t.clone()).collect();
        let head = keep[i][0];
        let tail = normal_form(&field, ord, keep[i][1..].to_vec(), &others);
        let mut t = vec![head];
        t.extend(tail);
        keep[i] = t;
    }
    keep.sort_by(|a, b| ord.cmp(&a[0].0, &b[0].0));
    GroebnerBasis { order: ord, polys: keep.into_iter().map(|t| from_terms(&field, n, t)).collect(), reduced: true }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Arc<Field> {
        Field::prime(3).unwrap()
    }

    fn p(field: &Arc<Field>, terms: &[(&[u32], i64)]) -> MultiPoly {
        MultiPoly::from_terms(field, terms[0].0.len(), terms.iter().map(|(e, c)| (Monomial::from_exps(e), field.from_int(*c))))
    }

    #[test]
    fn coprime_squares_are_their_own_basis() {
        let k = f3();
        let e = vec![p(&k, &[(&[2, 0], 1)]), p(&k, &[(&[0, 2], 1)])];
        let gb = buchberger_gb(&e, TermOrder::Drl);
        assert_eq!(gb.polys, vec![e[1].clone(), e[0].clone()]);
    }

    #[test]
    fn transformed_squares() {
        let k = f3();
        let e = vec![p(&k, &[(&[2, 0], 1)]), p(&k, &[(&[2, 0], 1), (&[1, 1], -1), (&[0, 2], 1)])];
        let gb = buchberger_gb(&e, TermOrder::Drl);
        let expect = vec![p(&k, &[(&[1, 1], 1), (&[0, 2], -1)]), p(&k, &[(&[2, 0], 1)]), p(&k, &[(&[0, 3], 1)])];
        let mut got = gb.polys.clone();
        got.sort_by_key(|g| format!("{g:?}"));
        let mut want = expect;
        want.sort_by_key(|g| format!("{g:?}"));
        assert_eq!(got, want);
    }

    #[test]
    fn linear_system_and_unit() {
        let k = f3();
        let e = vec![p(&k, &[(&[1, 0], 1), (&[0, 0], -2)]), p(&k, &[(&[0, 1], 1), (&[0, 0], -1)])];
        let gb = buchberger_gb(&e, TermOrder::Drl);
        assert_eq!(gb.linear_solution(), Some(vec![Elem(2), Elem(1)]));
        let e = vec![p(&k, &[(&[1, 0], 1)]), p(&k, &[(&[1, 0], 1), (&[0, 0], 1)])];
        assert!(buchberger_gb(&e, TermOrder::Lex).is_unit());
    }

    #[test]
    fn basis_is_reduced_and_reproduces_generators() {
        let k = Field::prime(2).unwrap();
        let e = vec![
            p(&k, &[(&[1, 1, 0], 1), (&[0, 0, 1], 1), (&[0, 0, 0], 1)]),
            p(&k, &[(&[0, 1, 1], 1), (&[1, 0, 0], 1)]),
            p(&k, &[(&[2, 0, 0], 1), (&[1, 0, 0], 1)]),
            p(&k, &[(&[0, 2, 0], 1), (&[0, 1, 0], 1)]),
            p(&k, &[(&[0, 0, 2], 1), (&[0, 0, 1], 1)]),
        ];
        for ord in [TermOrder::Drl, TermOrder::Lex] {
            let gb = buchberger_gb(&e, ord);
            let leads = gb.leading_monomials();
            for (i, g) in gb.polys.iter().enumerate() {
                assert_eq!(g.leading(ord).unwrap().1, Elem::ONE);
                for (j, l) in leads.iter().enumerate() {
                    if i != j {
                        assert!(g.terms().all(|(m, _)| !l.divides(m)));
                    }
                }
            }
            for f in &e {
                assert!(gb.normal_form(f).is_zero());
            }
        }
    }
}
