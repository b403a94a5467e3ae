//! F_q-subspaces of F_{q^n}^k (k ≤ 3), their linear sets, and the structure
//! theory of clubs of rank h+2 built from a subspace S of F_{q^n}.
//!
//! A subspace is stored as a reduced row-echelon F_p-basis of its flattened
//! coordinate vectors; every constructor closes the span under a generator of
//! F_q, so dim_{F_q} = rank_{F_p} / h.

mod classify;
mod linear_set;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gfcore::{Felt, FieldCtx};
use crate::linalg::FpRref;

pub use classify::{
    club_from_sab, decompose_against, normalize_club, classify_product_case, weight2_points_bijection,
    DecompositionCase, NormalizedClub, ProductCase, ProductCaseReport,
};
#[cfg(test)]
pub(crate) use classify::sab_subspace;
pub use linear_set::{linear_set, point_weight, ClubTag, LinearSetReport};

/// A vector of F_{q^n}^k.
pub type Vector = Vec<Felt>;

#[derive(Clone)]
pub struct QSubspace {
    ctx: Arc<FieldCtx>,
    k: usize,
    rref: FpRref,
}

impl PartialEq for QSubspace {
    fn eq(&self, other: &Self) -> bool {
        *self.ctx == *other.ctx && self.k == other.k && self.rref.rows() == other.rref.rows()
    }
}

impl Eq for QSubspace {}

impl fmt::Debug for QSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QSubspace")
            .field("k", &self.k)
            .field("dim", &self.dim())
            .field("basis", &self.q_basis())
            .finish()
    }
}

impl QSubspace {
    pub fn zero(ctx: &Arc<FieldCtx>, k: usize) -> Result<QSubspace> {
        if !(1..=3).contains(&k) {
            return Err(Error::Param(format!("arity {k} is not in 1..=3")));
        }
        Ok(QSubspace {
            ctx: ctx.clone(),
            k,
            rref: FpRref::new(ctx.p(), k * ctx.degree() as usize),
        })
    }

    /// The F_q-span of the given vectors of F_{q^n}^k.
    pub fn span(ctx: &Arc<FieldCtx>, k: usize, vectors: &[Vector]) -> Result<QSubspace> {
        let mut s = Self::zero(ctx, k)?;
        for v in vectors {
            s.insert(v)?;
        }
        Ok(s)
    }

    /// F_q-span of field elements, as a subspace of F_{q^n}.
    pub fn span1(ctx: &Arc<FieldCtx>, elems: &[Felt]) -> QSubspace {
        let mut s = Self::zero(ctx, 1).expect("arity 1");
        for &e in elems {
            s.insert(&[e]).expect("arity 1");
        }
        s
    }

    /// The F_{q^t}-subfield as an F_q-subspace of F_{q^n}.
    pub fn subfield(ctx: &Arc<FieldCtx>, t: u32) -> Result<QSubspace> {
        Ok(Self::span1(ctx, &ctx.subfield_q_basis(t)?))
    }

    /// The full space F_{q^n}^k.
    pub fn full(ctx: &Arc<FieldCtx>, k: usize) -> Result<QSubspace> {
        let mut s = Self::zero(ctx, k)?;
        let deg = ctx.degree() as usize;
        for i in 0..k * deg {
            let mut row = vec![0u8; k * deg];
            row[i] = 1;
            s.rref.insert(row);
        }
        Ok(s)
    }

    /// Points of F_{q^n}^k over a single F_{q^n}-line: the F_q-subspace F_{q^n}·v.
    pub fn field_line(ctx: &Arc<FieldCtx>, v: &[Felt]) -> Result<QSubspace> {
        let mut s = Self::zero(ctx, v.len())?;
        for i in 0..ctx.degree() {
            let beta = Felt(ctx.p().pow(i));
            let w: Vector = v.iter().map(|&x| ctx.mul(beta, x)).collect();
            s.insert_fp(&w);
        }
        Ok(s)
    }

    pub(crate) fn from_rref(ctx: &Arc<FieldCtx>, k: usize, rref: FpRref) -> QSubspace {
        QSubspace {
            ctx: ctx.clone(),
            k,
            rref,
        }
    }

    pub(crate) fn flatten(&self, v: &[Felt]) -> Vec<u8> {
        let deg = self.ctx.degree() as usize;
        let mut out = vec![0u8; self.k * deg];
        for (j, &x) in v.iter().enumerate() {
            self.ctx.write_digits(x, &mut out[j * deg..(j + 1) * deg]);
        }
        out
    }

    pub(crate) fn unflatten(&self, row: &[u8]) -> Vector {
        let deg = self.ctx.degree() as usize;
        (0..self.k)
            .map(|j| self.ctx.from_digits(&row[j * deg..(j + 1) * deg]))
            .collect()
    }

    fn check_arity(&self, v: &[Felt]) -> Result<()> {
        if v.len() != self.k {
            return Err(Error::ArityMismatch {
                expected: self.k,
                found: v.len(),
            });
        }
        Ok(())
    }

    fn check_compatible(&self, other: &QSubspace) -> Result<()> {
        if *self.ctx != *other.ctx {
            return Err(Error::FieldMismatch);
        }
        if self.k != other.k {
            return Err(Error::ArityMismatch {
                expected: self.k,
                found: other.k,
            });
        }
        Ok(())
    }

    fn insert_fp(&mut self, v: &[Felt]) -> bool {
        let row = self.flatten(v);
        self.rref.insert(row)
    }

    /// Add the F_q-line through v.
    pub fn insert(&mut self, v: &[Felt]) -> Result<bool> {
        self.check_arity(v)?;
        let mut grew = false;
        let w = self.ctx.fq_generator();
        let mut cur: Vector = v.to_vec();
        for _ in 0..self.ctx.h() {
            grew |= self.insert_fp(&cur);
            cur = cur.iter().map(|&x| self.ctx.mul(w, x)).collect();
        }
        Ok(grew)
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    /// Dimension over F_q.
    pub fn dim(&self) -> u32 {
        self.rref.rank() as u32 / self.ctx.h()
    }

    pub fn fp_rank(&self) -> usize {
        self.rref.rank()
    }

    /// Number of vectors, q^dim.
    pub fn size(&self) -> u64 {
        (self.ctx.p() as u64).pow(self.rref.rank() as u32)
    }

    pub fn is_zero(&self) -> bool {
        self.rref.rank() == 0
    }

    pub fn contains(&self, v: &[Felt]) -> Result<bool> {
        self.check_arity(v)?;
        Ok(self.rref.contains(&self.flatten(v)))
    }

    /// Membership for k = 1.
    pub fn contains_elem(&self, x: Felt) -> bool {
        debug_assert_eq!(self.k, 1);
        self.rref.contains(&self.flatten(&[x]))
    }

    pub fn is_subspace_of(&self, other: &QSubspace) -> Result<bool> {
        self.check_compatible(other)?;
        Ok(self.rref.rows().iter().all(|r| other.rref.contains(r)))
    }

    pub fn sum(&self, other: &QSubspace) -> Result<QSubspace> {
        self.check_compatible(other)?;
        let mut r = self.rref.clone();
        for row in other.rref.rows() {
            r.insert(row.clone());
        }
        Ok(Self::from_rref(&self.ctx, self.k, r))
    }

    pub fn intersect(&self, other: &QSubspace) -> Result<QSubspace> {
        self.check_compatible(other)?;
        Ok(Self::from_rref(&self.ctx, self.k, self.rref.intersect(&other.rref)))
    }

    /// The F_p-basis rows as vectors.
    pub fn fp_basis(&self) -> Vec<Vector> {
        self.rref.rows().iter().map(|r| self.unflatten(r)).collect()
    }

    /// An F_q-basis, extracted deterministically from the reduced F_p-basis.
    pub fn q_basis(&self) -> Vec<Vector> {
        let mut acc = QSubspace::zero(&self.ctx, self.k).expect("valid arity");
        let mut out = Vec::new();
        for v in self.fp_basis() {
            if !acc.rref.contains(&acc.flatten(&v)) {
                acc.insert(&v).expect("arity matches");
                out.push(v);
            }
        }
        out
    }

    /// F_q-basis of a subspace of F_{q^n}.
    pub fn q_basis1(&self) -> Vec<Felt> {
        self.q_basis().into_iter().map(|v| v[0]).collect()
    }

    /// Image under an F_p-linear map of F_{q^n}^k into F_{q^n}^{k_out}; the result is
    /// again an F_q-subspace when the map is F_q-semilinear.
    pub fn map_fp_linear<F>(&self, k_out: usize, f: F) -> Result<QSubspace>
    where
        F: Fn(&[Felt]) -> Vector,
    {
        let mut out = QSubspace::zero(&self.ctx, k_out)?;
        for v in self.fp_basis() {
            let w = f(&v);
            out.check_arity(&w)?;
            out.insert_fp(&w);
        }
        Ok(out)
    }

    /// α·U.
    pub fn scale(&self, alpha: Felt) -> QSubspace {
        let ctx = self.ctx.clone();
        self.map_fp_linear(self.k, |v| v.iter().map(|&x| ctx.mul(alpha, x)).collect())
            .expect("same arity")
    }

    /// All vectors, in the deterministic order of F_p-coordinates on the reduced basis
    /// (first basis vector varies slowest).
    pub fn elements(&self) -> Vec<Vector> {
        let flat = self.elements_flat();
        flat.chunks(self.k).map(|c| c.to_vec()).collect()
    }

    /// All vectors concatenated, k entries each.
    pub(crate) fn elements_flat(&self) -> Vec<Felt> {
        let f = &self.ctx;
        let k = self.k;
        let basis = self.fp_basis();
        let total = self.size() as usize;
        let mut out = Vec::with_capacity(total * k);
        out.extend(std::iter::repeat(Felt::ZERO).take(k));
        for b in basis.iter().rev() {
            let len = out.len();
            let mut mult: Vector = b.clone();
            for _ in 1..f.p() {
                for start in (0..len).step_by(k) {
                    for j in 0..k {
                        let x = f.add(out[start + j], mult[j]);
                        out.push(x);
                    }
                }
                mult = mult.iter().zip(b).map(|(&m, &x)| f.add(m, x)).collect();
            }
        }
        out
    }

    /// Elements of a subspace of F_{q^n}.
    pub fn elements1(&self) -> Vec<Felt> {
        debug_assert_eq!(self.k, 1);
        self.elements_flat()
    }

    /// The largest F_{q^t}-subspace contained in U: ∩_{i<t} β^{-i}·U for a generator β of F_{q^t}.
    pub fn subfield_core(&self, t: u32) -> Result<QSubspace> {
        let beta = self.ctx.subfield_generator(t)?;
        let binv = self.ctx.inv(beta);
        let mut core = self.clone();
        let mut shifted = self.clone();
        for _ in 1..t {
            shifted = shifted.scale(binv);
            core = core.intersect(&shifted)?;
        }
        Ok(core)
    }

    /// Whether U is closed under multiplication by F_{q^t}.
    pub fn is_subfield_closed(&self, t: u32) -> Result<bool> {
        let beta = self.ctx.subfield_generator(t)?;
        self.scale(beta).is_subspace_of(self)
    }

    /// Embed a subspace of F_{q^n}^k into F_{q^n}^{k'} (k' ≥ k) by appending zero coordinates.
    pub fn embed(&self, k_out: usize) -> Result<QSubspace> {
        if k_out < self.k {
            return Err(Error::ArityMismatch {
                expected: self.k,
                found: k_out,
            });
        }
        self.map_fp_linear(k_out, |v| {
            let mut w = v.to_vec();
            w.resize(k_out, Felt::ZERO);
            w
        })
    }

    /// Render an F_q-basis as `(x,y);(x,y);...` with element codes.
    pub fn encode(&self) -> String {
        self.q_basis()
            .iter()
            .map(|v| {
                let inner: Vec<String> = v.iter().map(|x| x.0.to_string()).collect();
                format!("({})", inner.join(","))
            })
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// ⟨S·T⟩: the F_q-span of all products s·t for S, T ⊆ F_{q^n}.
pub fn product_span(s: &QSubspace, t: &QSubspace) -> Result<QSubspace> {
    if s.k != 1 || t.k != 1 {
        return Err(Error::Param("product span needs subspaces of F_(q^n)".into()));
    }
    if *s.ctx != *t.ctx {
        return Err(Error::FieldMismatch);
    }
    let f = &s.ctx;
    let tb = t.q_basis1();
    let prods: Vec<Felt> = s
        .q_basis1()
        .iter()
        .flat_map(|&x| tb.iter().map(move |&y| f.mul(x, y)))
        .collect();
    Ok(QSubspace::span1(f, &prods))
}

/// A point of PG(k−1, q^n) in normal form: first nonzero coordinate equal to 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjPoint(pub Vector);

impl ProjPoint {
    /// Normalize a nonzero vector; `None` for the zero vector.
    pub fn from_vector(f: &FieldCtx, v: &[Felt]) -> Option<ProjPoint> {
        let lead = v.iter().copied().find(|x| !x.is_zero())?;
        let inv = f.inv(lead);
        Some(ProjPoint(v.iter().map(|&x| f.mul(inv, x)).collect()))
    }

    pub fn coords(&self) -> &[Felt] {
        &self.0
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inner: Vec<String> = self.0.iter().map(|x| x.0.to_string()).collect();
        write!(f, "<({})>", inner.join(","))
    }
}
