//! Incremental row echelon forms. Column 0 is the largest monomial.

use std::sync::Arc;

use crate::fields::{Elem, Field};

const NONE: u32 = u32::MAX;

/// Sparse input vector: (column, coefficient) pairs, any order, no duplicates.
pub type SparseRow = Vec<(u32, Elem)>;

#[derive(Clone, Debug)]
pub(crate) enum Echelon {
    Gf2(Gf2Echelon),
    Generic(GenericEchelon),
}

impl Echelon {
    pub fn new(field: &Arc<Field>, cols: usize) -> Echelon {
        if field.size() == 2 {
            Echelon::Gf2(Gf2Echelon::new(cols))
        } else {
            Echelon::Generic(GenericEchelon::new(field.clone(), cols))
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            Echelon::Gf2(e) => e.rows.len(),
            Echelon::Generic(e) => e.rows.len(),
        }
    }

    /// Reduces `v` against the current rows and keeps the remainder if it is
    /// nonzero. Returns the index of the new row.
    pub fn insert(&mut self, v: &[(u32, Elem)]) -> Option<usize> {
        match self {
            Echelon::Gf2(e) => e.insert(v),
            Echelon::Generic(e) => e.insert(v),
        }
    }

    pub fn contains(&self, v: &[(u32, Elem)]) -> bool {
        match self {
            Echelon::Gf2(e) => e.contains(v),
            Echelon::Generic(e) => e.contains(v),
        }
    }

    pub fn pivot(&self, row: usize) -> u32 {
        match self {
            Echelon::Gf2(e) => e.pivots[row],
            Echelon::Generic(e) => e.pivots[row],
        }
    }

    pub fn row(&self, row: usize) -> SparseRow {
        match self {
            Echelon::Gf2(e) => e.row(row),
            Echelon::Generic(e) => e.row(row),
        }
    }

    /// Back-substitution; afterwards every pivot column is zero outside its
    /// own row and pivots are 1.
    pub fn make_reduced(&mut self) {
        match self {
            Echelon::Gf2(e) => e.make_reduced(),
            Echelon::Generic(e) => e.make_reduced(),
        }
    }

    pub fn is_reduced(&self) -> bool {
        match self {
            Echelon::Gf2(e) => e.reduced,
            Echelon::Generic(e) => e.reduced,
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Gf2Echelon {
    words: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<u32>,
    row_of_col: Vec<u32>,
    reduced: bool,
}

impl Gf2Echelon {
    fn new(cols: usize) -> Gf2Echelon {
        Gf2Echelon { words: cols.div_ceil(64), rows: Vec::new(), pivots: Vec::new(), row_of_col: vec![NONE; cols], reduced: true }
    }

    fn dense(&self, v: &[(u32, Elem)]) -> Vec<u64> {
        let mut d = vec![0u64; self.words];
        for &(c, e) in v {
            if e.0 & 1 == 1 {
                d[c as usize / 64] ^= 1 << (c % 64);
            }
        }
        d
    }

    /// Clears every pivot column of `d` it meets until the first non-pivot
    /// nonzero column, which is returned.
    fn reduce(&self, d: &mut [u64]) -> Option<u32> {
        let mut w = 0;
        while w < self.words {
            let bits = d[w];
            if bits == 0 {
                w += 1;
                continue;
            }
            let c = (w * 64) as u32 + bits.trailing_zeros();
            let r = self.row_of_col[c as usize];
            if r == NONE {
                return Some(c);
            }
            let row = &self.rows[r as usize];
            for k in w..self.words {
                d[k] ^= row[k];
            }
        }
        None
    }

    fn insert(&mut self, v: &[(u32, Elem)]) -> Option<usize> {
        let mut d = self.dense(v);
        let c = self.reduce(&mut d)?;
        let idx = self.rows.len();
        self.rows.push(d);
        self.pivots.push(c);
        self.row_of_col[c as usize] = idx as u32;
        self.reduced = false;
        Some(idx)
    }

    fn contains(&self, v: &[(u32, Elem)]) -> bool {
        let mut d = self.dense(v);
        self.reduce(&mut d).is_none()
    }

    fn row(&self, r: usize) -> SparseRow {
        let mut out = Vec::new();
        for (w, &bits) in self.rows[r].iter().enumerate() {
            let mut b = bits;
            while b != 0 {
                out.push(((w * 64) as u32 + b.trailing_zeros(), Elem::ONE));
                b &= b - 1;
            }
        }
        out
    }

    fn make_reduced(&mut self) {
        if self.reduced {
            return;
        }
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&r| std::cmp::Reverse(self.pivots[r]));
        for (k, &r) in order.iter().enumerate() {
            let c = self.pivots[r] as usize;
            let (w, bit) = (c / 64, 1u64 << (c % 64));
            let src = self.rows[r].clone();
            for &other in &order[k + 1..] {
                let row = &mut self.rows[other];
                if row[w] & bit != 0 {
                    for i in 0..self.words {
                        row[i] ^= src[i];
                    }
                }
            }
        }
        self.reduced = true;
    }
}

#[derive(Clone, Debug)]
pub(crate) struct GenericEchelon {
    field: Arc<Field>,
    cols: usize,
    rows: Vec<Vec<Elem>>,
    pivots: Vec<u32>,
    row_of_col: Vec<u32>,
    reduced: bool,
}

impl GenericEchelon {
    fn new(field: Arc<Field>, cols: usize) -> GenericEchelon {
        GenericEchelon { field, cols, rows: Vec::new(), pivots: Vec::new(), row_of_col: vec![NONE; cols], reduced: true }
    }

    fn dense(&self, v: &[(u32, Elem)]) -> Vec<Elem> {
        let mut d = vec![Elem::ZERO; self.cols];
        for &(c, e) in v {
            d[c as usize] = e;
        }
        d
    }

    fn reduce(&self, d: &mut [Elem]) -> Option<u32> {
        for c in 0..self.cols {
            let e = d[c];
            if e.is_zero() {
                continue;
            }
            let r = self.row_of_col[c];
            if r == NONE {
                return Some(c as u32);
            }
            self.field.sub_scaled(&mut d[c..], e, &self.rows[r as usize][c..]);
        }
        None
    }

    fn insert(&mut self, v: &[(u32, Elem)]) -> Option<usize> {
        let mut d = self.dense(v);
        let c = self.reduce(&mut d)?;
        let s = self.field.inv(d[c as usize]).expect("nonzero pivot");
        if s != Elem::ONE {
            for x in d[c as usize..].iter_mut() {
                *x = self.field.mul(*x, s);
            }
        }
        let idx = self.rows.len();
        self.rows.push(d);
        self.pivots.push(c);
        self.row_of_col[c as usize] = idx as u32;
        self.reduced = false;
        Some(idx)
    }

    fn contains(&self, v: &[(u32, Elem)]) -> bool {
        let mut d = self.dense(v);
        self.reduce(&mut d).is_none()
    }

    fn row(&self, r: usize) -> SparseRow {
        self.rows[r].iter().enumerate().filter(|(_, e)| !e.is_zero()).map(|(c, &e)| (c as u32, e)).collect()
    }

    fn make_reduced(&mut self) {
        if self.reduced {
            return;
        }
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&r| std::cmp::Reverse(self.pivots[r]));
        for (k, &r) in order.iter().enumerate() {
            let c = self.pivots[r] as usize;
            let src = self.rows[r].clone();
            for &other in &order[k + 1..] {
                let e = self.rows[other][c];
                if !e.is_zero() {
                    self.field.sub_scaled(&mut self.rows[other][c..], e, &src[c..]);
                }
            }
        }
        self.reduced = true;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_rows(field: &Arc<Field>, rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Vec<SparseRow> {
        (0..rows)
            .map(|_| {
                (0..cols as u32)
                    .filter_map(|c| {
                        let e = Elem(rng.gen_range(0..field.size() as u32));
                        (!e.is_zero() && rng.gen_bool(0.4)).then_some((c, e))
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn reduced_form_properties_match_dense_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for field in [Field::prime(2).unwrap(), Field::prime(3).unwrap(), Field::with_default_modulus(2, 3).unwrap()] {
            for _ in 0..30 {
                let (r, c) = (rng.gen_range(1..12), rng.gen_range(1..140));
                let rows = random_rows(&field, r, c, &mut rng);
                let mut e = Echelon::new(&field, c);
                for v in &rows {
                    e.insert(v);
                }
                let mut flat = vec![Elem::ZERO; r * c];
                for (i, v) in rows.iter().enumerate() {
                    for &(j, x) in v {
                        flat[i * c + j as usize] = x;
                    }
                }
                assert_eq!(e.rank(), crate::linalg::rank(&field, &flat, r, c));
                e.make_reduced();
                for v in &rows {
                    assert!(e.contains(v));
                }
                for i in 0..e.rank() {
                    let row = e.row(i);
                    assert_eq!(row[0], (e.pivot(i), Elem::ONE));
                    for k in 0..e.rank() {
                        if k != i {
                            assert!(row.iter().all(|&(col, _)| col != e.pivot(k)));
                        }
                    }
                }
            }
        }
    }
}
