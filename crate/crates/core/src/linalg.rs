//! Small dense matrices over a [`Field`], row-major.

use crate::error::{Error, Result};
use crate::fields::{Elem, Field};

/// Gauss-Jordan inverse of a k x k matrix.
pub fn invert(f: &Field, m: &[Elem], k: usize) -> Result<Vec<Elem>> {
    assert_eq!(m.len(), k * k);
    let mut a = m.to_vec();
    let mut inv = vec![Elem::ZERO; k * k];
    for i in 0..k {
        inv[i * k + i] = Elem::ONE;
    }
    for col in 0..k {
        let pivot = (col..k)
            .find(|&r| !a[r * k + col].is_zero())
            .ok_or(Error::SingularMatrix)?;
        if pivot != col {
            for j in 0..k {
                a.swap(pivot * k + j, col * k + j);
                inv.swap(pivot * k + j, col * k + j);
            }
        }
        let s = f.inv(a[col * k + col])?;
        for j in 0..k {
            a[col * k + j] = f.mul(a[col * k + j], s);
            inv[col * k + j] = f.mul(inv[col * k + j], s);
        }
        for r in 0..k {
            let c = a[r * k + col];
            if r == col || c.is_zero() {
                continue;
            }
            for j in 0..k {
                a[r * k + j] = f.sub(a[r * k + j], f.mul(c, a[col * k + j]));
                inv[r * k + j] = f.sub(inv[r * k + j], f.mul(c, inv[col * k + j]));
            }
        }
    }
    Ok(inv)
}

pub fn rank(f: &Field, m: &[Elem], rows: usize, cols: usize) -> usize {
    let mut a = m.to_vec();
    let mut r = 0;
    for col in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i * cols + col].is_zero()) else {
            continue;
        };
        for j in 0..cols {
            a.swap(p * cols + j, r * cols + j);
        }
        let s = f.inv(a[r * cols + col]).unwrap();
        for j in 0..cols {
            a[r * cols + j] = f.mul(a[r * cols + j], s);
        }
        for i in 0..rows {
            let c = a[i * cols + col];
            if i == r || c.is_zero() {
                continue;
            }
            for j in 0..cols {
                a[i * cols + j] = f.sub(a[i * cols + j], f.mul(c, a[r * cols + j]));
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

pub fn mat_vec(f: &Field, m: &[Elem], v: &[Elem]) -> Vec<Elem> {
    let k = v.len();
    (0..m.len() / k)
        .map(|i| (0..k).fold(Elem::ZERO, |acc, j| f.add(acc, f.mul(m[i * k + j], v[j]))))
        .collect()
}
