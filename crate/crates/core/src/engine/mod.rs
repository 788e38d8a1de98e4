//! Macaulay matrices, the mutant fixpoint `W_d`, and solving degrees.

mod buchberger;
mod echelon;

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

pub use buchberger::{buchberger_gb, GroebnerBasis};
pub use echelon::SparseRow;
use echelon::Echelon;

use crate::error::{Error, Result};
use crate::fields::{Elem, Field};
use crate::multipoly::{monomials_up_to, Monomial, MultiPoly, TermOrder};

const NO_COL: u32 = u32::MAX;

/// Monomials of degree at most `d`, sorted decreasing, so column 0 holds the
/// largest one.
#[derive(Debug)]
pub struct Columns {
    order: TermOrder,
    nvars: usize,
    degree: u32,
    monos: Vec<Monomial>,
    index: HashMap<Monomial, u32>,
    times_var: Vec<Vec<u32>>,
}

impl Columns {
    pub fn new(nvars: usize, degree: u32, order: TermOrder) -> Columns {
        let mut monos = monomials_up_to(nvars, degree);
        monos.sort_by(|a, b| order.cmp(b, a));
        let index: HashMap<Monomial, u32> = monos.iter().enumerate().map(|(i, m)| (*m, i as u32)).collect();
        let times_var = (0..nvars)
            .map(|v| {
                let x = Monomial::var(nvars, v);
                monos.iter().map(|m| index.get(&m.mul(&x)).copied().unwrap_or(NO_COL)).collect()
            })
            .collect();
        Columns { order, nvars, degree, monos, index, times_var }
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn order(&self) -> TermOrder {
        self.order
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monos
    }

    pub fn monomial(&self, col: u32) -> Monomial {
        self.monos[col as usize]
    }

    pub fn index_of(&self, m: &Monomial) -> Option<u32> {
        self.index.get(m).copied()
    }

    /// Row of `f`, or `None` if some monomial of `f` has degree above the cap.
    pub fn encode(&self, f: &MultiPoly) -> Option<SparseRow> {
        f.terms().map(|(m, c)| self.index_of(m).map(|i| (i, *c))).collect()
    }

    pub fn decode(&self, field: &Arc<Field>, row: &[(u32, Elem)]) -> MultiPoly {
        MultiPoly::from_terms(field, self.nvars, row.iter().map(|&(c, e)| (self.monos[c as usize], e)))
    }

    fn row_degree(&self, row: &[(u32, Elem)]) -> u32 {
        row.iter().map(|&(c, _)| self.monos[c as usize].degree()).max().unwrap_or(0)
    }

    fn shift(&self, row: &[(u32, Elem)], var: usize) -> Option<SparseRow> {
        let t = &self.times_var[var];
        row.iter()
            .map(|&(c, e)| {
                let n = t[c as usize];
                (n != NO_COL).then_some((n, e))
            })
            .collect()
    }
}

/// Where a matrix row came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RowSource {
    /// `multiplier * generator[index]`.
    Generator { index: usize, multiplier: Monomial },
    /// A row of `W_{d-1}` carried into degree `d`.
    Carried,
    /// The product of the variable with a row found in the previous round.
    Mutant { round: usize, variable: usize },
}

impl fmt::Display for RowSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowSource::Generator { index, multiplier } => write!(f, "{multiplier:?}*g{index}"),
            RowSource::Carried => f.write_str("carried"),
            RowSource::Mutant { round, variable } => write!(f, "mutant(r{round},X{variable})"),
        }
    }
}

/// A Macaulay matrix in degree `d`, either as built or after elimination.
#[derive(Clone, Debug)]
pub struct MacaulayState {
    field: Arc<Field>,
    columns: Arc<Columns>,
    /// Rows as built; empty once eliminated.
    raw: Vec<SparseRow>,
    sources: Vec<RowSource>,
    echelon: Option<Echelon>,
    expansions: usize,
}

impl MacaulayState {
    pub fn degree(&self) -> u32 {
        self.columns.degree
    }

    pub fn order(&self) -> TermOrder {
        self.columns.order
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn columns(&self) -> &Columns {
        &self.columns
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    /// Number of rows: built rows before elimination, the rank after.
    pub fn nrows(&self) -> usize {
        match &self.echelon {
            Some(e) => e.rank(),
            None => self.raw.len(),
        }
    }

    pub fn is_echelon(&self) -> bool {
        self.echelon.is_some()
    }

    pub fn is_reduced(&self) -> bool {
        self.echelon.as_ref().is_some_and(|e| e.is_reduced())
    }

    /// Rank of the row space.
    pub fn rank(&self) -> usize {
        match &self.echelon {
            Some(e) => e.rank(),
            None => self.clone().rref().rank(),
        }
    }

    /// Independent rows found by the closure loop.
    pub fn mutant_rows(&self) -> usize {
        self.expansions
    }

    /// Source of each row, aligned with [`MacaulayState::rows`]. After
    /// elimination a row is credited to the row that introduced its pivot.
    pub fn sources(&self) -> Vec<RowSource> {
        match &self.echelon {
            Some(e) => self.pivot_order(e).into_iter().map(|r| self.sources[r]).collect(),
            None => self.sources.clone(),
        }
    }

    fn pivot_order(&self, e: &Echelon) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..e.rank()).collect();
        idx.sort_by_key(|&r| e.pivot(r));
        idx
    }

    /// Rows as polynomials; eliminated rows come by increasing pivot column,
    /// i.e. decreasing leading monomial.
    pub fn rows(&self) -> Vec<MultiPoly> {
        match &self.echelon {
            Some(e) => self.pivot_order(e).into_iter().map(|r| self.columns.decode(&self.field, &e.row(r))).collect(),
            None => self.raw.iter().map(|r| self.columns.decode(&self.field, r)).collect(),
        }
    }

    /// Leading monomials of the row space, decreasing.
    pub fn leading_monomials(&self) -> Vec<Monomial> {
        match &self.echelon {
            Some(e) => {
                let mut p: Vec<u32> = (0..e.rank()).map(|r| e.pivot(r)).collect();
                p.sort_unstable();
                p.into_iter().map(|c| self.columns.monomial(c)).collect()
            }
            None => self.clone().rref().leading_monomials(),
        }
    }

    /// Reduced row echelon form; the row space is unchanged.
    pub fn rref(mut self) -> MacaulayState {
        if self.echelon.is_none() {
            let mut e = Echelon::new(&self.field, self.columns.len());
            let mut sources = Vec::new();
            for (row, src) in self.raw.iter().zip(&self.sources) {
                if e.insert(row).is_some() {
                    sources.push(*src);
                }
            }
            self.raw.clear();
            self.sources = sources;
            self.echelon = Some(e);
        }
        if let Some(e) = self.echelon.as_mut() {
            e.make_reduced();
        }
        self
    }

    /// Membership of `g` in the row space.
    pub fn contains(&self, g: &MultiPoly) -> Result<bool> {
        if !g.field().same_field(&self.field) || g.nvars() != self.columns.nvars {
            return Err(Error::MismatchedContext("polynomial and matrix differ".into()));
        }
        let deg = g.degree().unwrap_or(0);
        if deg > self.degree() {
            return Err(Error::DegreeExceedsD { deg, d: self.degree() });
        }
        let row = self.columns.encode(g).expect("degree checked");
        Ok(match &self.echelon {
            Some(e) => e.contains(&row),
            None => self.clone().rref().contains(g)?,
        })
    }
}

fn check_context(polys: &[MultiPoly]) -> Result<(Arc<Field>, usize)> {
    let first = polys.first().ok_or(Error::EmptyOrConstant)?;
    let field = first.field().clone();
    let n = first.nvars();
    if polys.iter().any(|p| !p.field().same_field(&field) || p.nvars() != n) {
        return Err(Error::MismatchedContext("generators differ in field or variables".into()));
    }
    Ok((field, n))
}

/// One row `u * f` for every generator `f` and monomial `u` with
/// `deg(u f) <= d`; identical rows are kept once.
pub fn macaulay_build(polys: &[MultiPoly], d: u32, ord: TermOrder) -> Result<MacaulayState> {
    let (field, n) = check_context(polys)?;
    let columns = Arc::new(Columns::new(n, d, ord));
    let mut raw = Vec::new();
    let mut sources = Vec::new();
    let mut seen = HashSet::new();
    for (index, f) in polys.iter().enumerate() {
        let Some(deg) = f.degree() else { continue };
        if deg > d {
            continue;
        }
        let mut mults = monomials_up_to(n, d - deg);
        mults.sort_by(|a, b| ord.cmp(b, a));
        for u in mults {
            let mut row = columns.encode(&f.mul_monomial(&u)).expect("degree fits");
            row.sort_unstable_by_key(|&(c, _)| c);
            if seen.insert(row.clone()) {
                raw.push(row);
                sources.push(RowSource::Generator { index, multiplier: u });
            }
        }
    }
    if raw.is_empty() && polys.iter().all(|f| f.degree().is_some_and(|g| g > d)) {
        return Err(Error::DegreeTooSmall(d));
    }
    Ok(MacaulayState { field, columns, raw, sources, echelon: None, expansions: 0 })
}

/// Number of rows `macaulay_build` would produce before deduplication.
pub fn macaulay_row_count(polys: &[MultiPoly], d: u32) -> usize {
    polys
        .iter()
        .filter_map(|f| f.degree())
        .filter(|&g| g <= d)
        .map(|g| binomial(polys[0].nvars() as u64 + (d - g) as u64, polys[0].nvars() as u64) as usize)
        .sum()
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// `W_0, W_1, ...` for one system, each built from the previous one.
pub struct WdSequence {
    polys: Vec<MultiPoly>,
    field: Arc<Field>,
    nvars: usize,
    order: TermOrder,
    state: Option<MacaulayState>,
}

impl WdSequence {
    pub fn new(polys: &[MultiPoly], order: TermOrder) -> Result<WdSequence> {
        let (field, nvars) = check_context(polys)?;
        Ok(WdSequence { polys: polys.iter().filter(|p| !p.is_zero()).cloned().collect(), field, nvars, order, state: None })
    }

    /// The current `W_d`; `None` before the first [`WdSequence::advance`].
    pub fn current(&self) -> Option<&MacaulayState> {
        self.state.as_ref()
    }

    pub fn into_current(self) -> Option<MacaulayState> {
        self.state
    }

    /// Moves to the next degree and returns `W_d`.
    pub fn advance(&mut self) -> &MacaulayState {
        let d = self.state.as_ref().map_or(0, |s| s.degree() + 1);
        self.build(d)
    }

    /// `W_d`, seeded from the current state when it is `W_{d-1}` and the
    /// order is degree compatible.
    pub fn build(&mut self, d: u32) -> &MacaulayState {
        let columns = Arc::new(Columns::new(self.nvars, d, self.order));
        let mut e = Echelon::new(&self.field, columns.len());
        let mut sources = Vec::new();
        let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
        let prev = self.state.take().filter(|s| d > 0 && s.degree() == d - 1);
        let incremental = self.order.is_degree_compatible() && prev.is_some();

        if incremental {
            if let Some(prev) = prev {
                let pe = prev.echelon.as_ref().expect("eliminated");
                for r in 0..pe.rank() {
                    let row: SparseRow = pe
                        .row(r)
                        .into_iter()
                        .map(|(c, x)| (columns.index_of(&prev.columns.monomial(c)).expect("nested"), x))
                        .collect();
                    let top = prev.columns.monomial(pe.pivot(r)).degree();
                    if let Some(i) = e.insert(&row) {
                        sources.push(prev.sources[r]);
                        if top + 1 == d {
                            queue.push_back((i, 0));
                        }
                    }
                }
            }
        }
        for (index, f) in self.polys.iter().enumerate() {
            let deg = f.degree().expect("nonzero");
            if deg > d || (incremental && deg < d) {
                continue;
            }
            let row = columns.encode(f).expect("degree fits");
            if let Some(i) = e.insert(&row) {
                sources.push(RowSource::Generator { index, multiplier: Monomial::one(self.nvars) });
                // Reduction can drop the degree below that of the generator.
                queue.push_back((i, 0));
            }
        }
        let mut expansions = 0;
        while let Some((i, round)) = queue.pop_front() {
            let row = e.row(i);
            if columns.row_degree(&row) >= d {
                continue;
            }
            for v in 0..self.nvars {
                let shifted = columns.shift(&row, v).expect("degree below cap");
                if let Some(j) = e.insert(&shifted) {
                    expansions += 1;
                    sources.push(RowSource::Mutant { round: round + 1, variable: v });
                    queue.push_back((j, round + 1));
                }
            }
        }
        self.state = Some(MacaulayState { field: self.field.clone(), columns, raw: Vec::new(), sources, echelon: Some(e), expansions });
        self.state.as_ref().expect("just set")
    }
}

/// The row space `W_d`: generators of degree at most `d`, closed under
/// multiplication by monomials while the degree stays at most `d`.
pub fn compute_wd(polys: &[MultiPoly], d: u32, ord: TermOrder) -> Result<MacaulayState> {
    let mut seq = WdSequence::new(polys, ord)?;
    if ord.is_degree_compatible() {
        for _ in 0..=d {
            seq.advance();
        }
    } else {
        seq.build(d);
    }
    Ok(seq.into_current().expect("built"))
}

/// Whether `g` lies in `V_d`, computed as `W_d` under DRL.
pub fn in_vd(g: &MultiPoly, polys: &[MultiPoly], d: u32) -> Result<bool> {
    let deg = g.degree().unwrap_or(0);
    if deg > d {
        return Err(Error::DegreeExceedsD { deg, d });
    }
    compute_wd(polys, d, TermOrder::Drl)?.contains(g)
}

/// Per-degree statistics of a solving-degree run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceRow {
    pub d: u32,
    /// Rows of the Macaulay matrix before elimination.
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub mutants: usize,
    /// Leading monomials of degree below `d` that were not leading in `W_{d-1}`.
    pub new_falls: usize,
}

impl TraceRow {
    pub const CSV_HEADER: &'static str = "d,rows,cols,rank,mutants,new_falls";

    pub fn to_csv(&self) -> String {
        format!("{},{},{},{},{},{}", self.d, self.rows, self.cols, self.rank, self.mutants, self.new_falls)
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub degree: u32,
    pub order: TermOrder,
    pub basis: GroebnerBasis,
    pub trace: Vec<TraceRow>,
    /// The common zero when the basis is `{X_i - a_i}`.
    pub solution: Option<Vec<Elem>>,
    /// Last `n` nonzero rows of the reduced matrix at the solving degree,
    /// recorded for systems with a single linear basis.
    pub trailing_rows: Option<Vec<MultiPoly>>,
    pub final_rank: usize,
    pub final_cols: usize,
}

impl SolveReport {
    /// The trailing rows are exactly the linear basis elements.
    pub fn linear_signature_holds(&self) -> Option<bool> {
        let rows = self.trailing_rows.as_ref()?;
        let mut a: Vec<String> = rows.iter().map(|r| format!("{r:?}")).collect();
        let mut b: Vec<String> = self.basis.polys.iter().map(|r| format!("{r:?}")).collect();
        a.sort();
        b.sort();
        Some(a == b)
    }
}

/// Default search cap: `n(q-1)` plus the largest generator degree.
pub fn default_dmax(polys: &[MultiPoly], q: u32) -> u32 {
    let n = polys.first().map_or(0, |p| p.nvars()) as u32;
    n * (q - 1) + polys.iter().filter_map(|p| p.degree()).max().unwrap_or(0)
}

/// Least `d` in `1..=d_max` such that `W_d` contains the reduced Gröbner basis.
pub fn solving_degree(polys: &[MultiPoly], ord: TermOrder, d_max: u32) -> Result<SolveReport> {
    let basis = buchberger_gb(polys, ord);
    solving_degree_with_basis(polys, ord, d_max, basis)
}

pub fn solving_degree_with_basis(polys: &[MultiPoly], ord: TermOrder, d_max: u32, basis: GroebnerBasis) -> Result<SolveReport> {
    let n = check_context(polys)?.1;
    let mut seq = WdSequence::new(polys, ord)?;
    let mut trace = Vec::new();
    let mut prev_leads: HashSet<Monomial> = HashSet::new();
    for d in 0..=d_max {
        let state = seq.build(d);
        if d == 0 {
            // The matrix algorithm starts in degree 1.
            continue;
        }
        let leads = state.leading_monomials();
        let new_falls = leads.iter().filter(|m| m.degree() < d && !prev_leads.contains(m)).count();
        trace.push(TraceRow {
            d,
            rows: macaulay_row_count(polys, d),
            cols: state.ncols(),
            rank: state.rank(),
            mutants: state.mutant_rows(),
            new_falls,
        });
        prev_leads = leads.into_iter().collect();
        let done = basis.polys.iter().all(|g| g.degree().unwrap_or(0) <= d && state.contains(g).unwrap_or(false));
        if done {
            let solution = basis.linear_solution();
            let state = seq.into_current().expect("advanced").rref();
            let trailing_rows = solution.as_ref().map(|_| {
                let rows = state.rows();
                rows[rows.len().saturating_sub(n)..].to_vec()
            });
            return Ok(SolveReport {
                degree: d,
                order: ord,
                basis,
                trace,
                solution,
                trailing_rows,
                final_rank: state.rank(),
                final_cols: state.ncols(),
            });
        }
    }
    let state = seq.current().expect("advanced at least once");
    let missing = basis
        .polys
        .iter()
        .filter(|g| g.degree().unwrap_or(0) > d_max || !state.contains(g).unwrap_or(false))
        .map(|g| g.leading_monomial(ord).expect("nonzero"))
        .collect();
    Err(Error::NotReachedByDmax { d_max, missing })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(field: &Arc<Field>, terms: &[(&[u32], i64)]) -> MultiPoly {
        MultiPoly::from_terms(field, terms[0].0.len(), terms.iter().map(|(e, c)| (Monomial::from_exps(e), field.from_int(*c))))
    }

    #[test]
    fn macaulay_shapes() {
        let k = Field::prime(5).unwrap();
        let m = macaulay_build(&[p(&k, &[(&[1], 1), (&[0], -3)])], 1, TermOrder::Drl).unwrap();
        assert_eq!(m.nrows(), 1);
        assert_eq!(m.columns().monomials(), &[Monomial::from_exps(&[1]), Monomial::from_exps(&[0])]);
        let k3 = Field::prime(3).unwrap();
        let sq = [p(&k3, &[(&[2, 0], 1)]), p(&k3, &[(&[0, 2], 1)])];
        assert_eq!(macaulay_build(&sq, 2, TermOrder::Drl).unwrap().nrows(), 2);
        assert_eq!(macaulay_build(&sq, 1, TermOrder::Drl).unwrap_err(), Error::DegreeTooSmall(1));
        assert_eq!(macaulay_row_count(&sq, 3), 6);
    }

    #[test]
    fn rref_collapses_multiples() {
        let k = Field::prime(7).unwrap();
        let f = p(&k, &[(&[1, 1], 3), (&[0, 0], 1)]);
        let m = macaulay_build(&[f.clone(), f.scale(Elem(2))], 2, TermOrder::Drl).unwrap().rref();
        assert_eq!(m.rows(), vec![f.monic(TermOrder::Drl)]);
        let again = m.clone().rref();
        assert_eq!(again.rows(), m.rows());
    }

    #[test]
    fn transformed_squares_reach_cube() {
        let k = Field::prime(3).unwrap();
        let e = [p(&k, &[(&[2, 0], 1)]), p(&k, &[(&[2, 0], 1), (&[1, 1], -1), (&[0, 2], 1)])];
        let w = compute_wd(&e, 3, TermOrder::Drl).unwrap();
        assert!(w.contains(&p(&k, &[(&[0, 3], 1)])).unwrap());
        assert!(!compute_wd(&e, 2, TermOrder::Drl).unwrap().contains(&p(&k, &[(&[0, 2], 1)])).unwrap());
        let r = solving_degree(&e, TermOrder::Drl, 6).unwrap();
        assert_eq!(r.degree, 3);
        let r = solving_degree(&[p(&k, &[(&[2, 0], 1)]), p(&k, &[(&[0, 2], 1)])], TermOrder::Drl, 6).unwrap();
        assert_eq!(r.degree, 2);
    }

    #[test]
    fn single_generator_solving_degree() {
        let k = Field::prime(2).unwrap();
        let g = p(&k, &[(&[2, 1, 0], 1), (&[0, 1, 1], 1), (&[1, 0, 0], 1)]);
        for ord in [TermOrder::Drl, TermOrder::Lex] {
            assert_eq!(solving_degree(&[g.clone()], ord, 5).unwrap().degree, 3);
        }
    }

    #[test]
    fn incremental_matches_scratch() {
        let k = Field::prime(3).unwrap();
        let e = [p(&k, &[(&[1, 1, 0], 1), (&[0, 0, 1], 2), (&[0, 0, 0], 1)]), p(&k, &[(&[0, 2, 0], 1), (&[1, 0, 0], 1)])];
        let mut seq = WdSequence::new(&e, TermOrder::Drl).unwrap();
        for d in 0..=4 {
            let inc = seq.advance().clone().rref().rows();
            let mut scratch = macaulay_build(&e, d, TermOrder::Drl).map(|m| m.rref());
            if let Ok(s) = scratch.as_mut() {
                let ws = compute_wd(&e, d, TermOrder::Drl).unwrap();
                assert!(s.rows().iter().all(|r| ws.contains(r).unwrap()));
            }
            assert_eq!(inc, compute_wd(&e, d, TermOrder::Drl).unwrap().rref().rows());
        }
    }

    #[test]
    fn not_reached_reports_missing() {
        let k = Field::prime(3).unwrap();
        let e = [p(&k, &[(&[2, 0], 1)]), p(&k, &[(&[2, 0], 1), (&[1, 1], -1), (&[0, 2], 1)])];
        match solving_degree(&e, TermOrder::Drl, 2) {
            Err(Error::NotReachedByDmax { d_max: 2, missing }) => assert_eq!(missing, vec![Monomial::from_exps(&[0, 3])]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn in_vd_degree_guard() {
        let k = Field::prime(2).unwrap();
        let e = [p(&k, &[(&[1, 1], 1), (&[0, 0], 1)])];
        assert!(in_vd(&e[0], &e, 2).unwrap());
        assert_eq!(in_vd(&p(&k, &[(&[2, 1], 1)]), &e, 2), Err(Error::DegreeExceedsD { deg: 3, d: 2 }));
    }
}
