//! Exact linear algebra: row reduction over F_p and small dense matrices over F_{q^n}.

use crate::error::{Error, Result};
use crate::gfcore::{FieldCtx, Felt};

fn inv_table(p: u32) -> Vec<u8> {
    let mut t = vec![0u8; p as usize];
    for a in 1..p {
        t[a as usize] = crate::gfcore::fpoly::inv_mod(a, p) as u8;
    }
    t
}

/// A fully reduced row-echelon basis over F_p, grown one vector at a time.
///
/// Rows are kept sorted by pivot column with every pivot equal to 1 and every
/// pivot column cleared in the other rows, so two spans are equal exactly when
/// their `rows()` are equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpRref {
    p: u32,
    width: usize,
    rows: Vec<Vec<u8>>,
    pivots: Vec<usize>,
    inv: Vec<u8>,
}

impl FpRref {
    pub fn new(p: u32, width: usize) -> Self {
        FpRref {
            p,
            width,
            rows: Vec::new(),
            pivots: Vec::new(),
            inv: inv_table(p),
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduce `v` in place against the basis; the result is zero iff v is in the span.
    pub fn reduce(&self, v: &mut [u8]) {
        let p = self.p;
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let f = v[c] as u32;
            if f == 0 {
                continue;
            }
            let m = p - f;
            for (x, &r) in v.iter_mut().zip(row) {
                if r != 0 {
                    *x = ((*x as u32 + m * r as u32) % p) as u8;
                }
            }
        }
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Add `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, mut v: Vec<u8>) -> bool {
        debug_assert_eq!(v.len(), self.width);
        self.reduce(&mut v);
        let Some(c) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let p = self.p;
        let s = self.inv[v[c] as usize] as u32;
        if s != 1 {
            for x in v.iter_mut() {
                *x = ((*x as u32 * s) % p) as u8;
            }
        }
        for row in self.rows.iter_mut() {
            let f = row[c] as u32;
            if f == 0 {
                continue;
            }
            let m = p - f;
            for (x, &r) in row.iter_mut().zip(&v) {
                if r != 0 {
                    *x = ((*x as u32 + m * r as u32) % p) as u8;
                }
            }
        }
        let pos = self.pivots.partition_point(|&q| q < c);
        self.pivots.insert(pos, c);
        self.rows.insert(pos, v);
        true
    }

    /// Basis of the space of coefficient vectors c with Σ c_i rows_i = 0 for the given
    /// (not necessarily independent) vectors, i.e. the left kernel.
    pub fn left_kernel(p: u32, vectors: &[Vec<u8>]) -> Vec<Vec<u8>> {
        let m = vectors.len();
        let width = vectors.first().map_or(0, |v| v.len());
        // augment each vector with an identity block and reduce
        let mut r = FpRref::new(p, width + m);
        for (i, v) in vectors.iter().enumerate() {
            let mut row = v.clone();
            row.resize(width + m, 0);
            row[width + i] = 1;
            r.insert(row);
        }
        r.rows
            .iter()
            .filter(|row| row[..width].iter().all(|&x| x == 0))
            .map(|row| row[width..].to_vec())
            .collect()
    }

    /// Zassenhaus intersection of two spans of equal width.
    pub fn intersect(&self, other: &FpRref) -> FpRref {
        let w = self.width;
        let mut z = FpRref::new(self.p, 2 * w);
        for row in &self.rows {
            let mut v = row.clone();
            v.extend_from_slice(row);
            z.insert(v);
        }
        for row in &other.rows {
            let mut v = row.clone();
            v.resize(2 * w, 0);
            z.insert(v);
        }
        let mut out = FpRref::new(self.p, w);
        for row in &z.rows {
            if row[..w].iter().all(|&x| x == 0) {
                out.insert(row[w..].to_vec());
            }
        }
        out
    }
}

/// Rank of a k×m matrix over F_{q^n}, given as rows.
pub fn field_rank(f: &FieldCtx, rows: &[Vec<Felt>]) -> usize {
    let mut m: Vec<Vec<Felt>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = f.inv(m[rank][c]);
        let pivot_row: Vec<Felt> = m[rank].iter().map(|&x| f.mul(x, inv)).collect();
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_zero() {
                let factor = m[r][c];
                for j in 0..cols {
                    m[r][j] = f.sub(m[r][j], f.mul(factor, pivot_row[j]));
                }
            }
        }
        m[rank] = pivot_row;
        rank += 1;
    }
    rank
}

/// Inverse of a square matrix over F_{q^n}.
pub fn field_inverse(f: &FieldCtx, a: &[Vec<Felt>]) -> Result<Vec<Vec<Felt>>> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension("matrix is not square".into()));
    }
    let mut m: Vec<Vec<Felt>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Felt::ONE } else { Felt::ZERO }));
            row
        })
        .collect();
    for c in 0..n {
        let piv = (c..n)
            .find(|&r| !m[r][c].is_zero())
            .ok_or_else(|| Error::Dimension("matrix is singular".into()))?;
        m.swap(c, piv);
        let inv = f.inv(m[c][c]);
        for x in m[c].iter_mut() {
            *x = f.mul(*x, inv);
        }
        let pivot_row = m[c].clone();
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let factor = m[r][c];
                for (x, &pv) in m[r].iter_mut().zip(&pivot_row) {
                    *x = f.sub(*x, f.mul(factor, pv));
                }
            }
        }
    }
    Ok(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_mul(f: &FieldCtx, a: &[Vec<Felt>], b: &[Vec<Felt>]) -> Vec<Vec<Felt>> {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| f.sum((0..inner).map(|k| f.mul(row[k], b[k][j]))))
                .collect()
        })
        .collect()
}
