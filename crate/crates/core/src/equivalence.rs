//! ΓL(2, q^n)-equivalence of club subspaces: a search over maps fixing the heavy point,
//! and invariants that certify inequivalence without searching.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gfcore::{fpoly, Felt, FieldCtx};
use crate::linpoly::LinPoly;
use crate::subspaces::{
    linear_set, normalize_club, product_span, classify_product_case, ClubTag, ProductCase, ProjPoint, QSubspace,
    Vector,
};

/// A 2×2 matrix over F_{q^n}, by rows.
pub type Mat2 = [[Felt; 2]; 2];

/// Largest q^{2n} for which the restricted search runs.
pub const SEARCH_LIMIT: u64 = 1 << 20;

pub fn mat_apply(f: &FieldCtx, m: &Mat2, v: &[Felt]) -> Vector {
    vec![
        f.add(f.mul(m[0][0], v[0]), f.mul(m[0][1], v[1])),
        f.add(f.mul(m[1][0], v[0]), f.mul(m[1][1], v[1])),
    ]
}

pub fn mat_mul(f: &FieldCtx, a: &Mat2, b: &Mat2) -> Mat2 {
    let e = |i: usize, j: usize| f.add(f.mul(a[i][0], b[0][j]), f.mul(a[i][1], b[1][j]));
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

pub fn mat_det(f: &FieldCtx, m: &Mat2) -> Felt {
    f.sub(f.mul(m[0][0], m[1][1]), f.mul(m[0][1], m[1][0]))
}

pub fn mat_inv(f: &FieldCtx, m: &Mat2) -> Result<Mat2> {
    let d = mat_det(f, m);
    if d.is_zero() {
        return Err(Error::Param("singular matrix".into()));
    }
    let di = f.inv(d);
    Ok([
        [f.mul(di, m[1][1]), f.neg(f.mul(di, m[0][1]))],
        [f.neg(f.mul(di, m[1][0])), f.mul(di, m[0][0])],
    ])
}

fn mat_frob(f: &FieldCtx, m: &Mat2, e: u32) -> Mat2 {
    m.map(|row| row.map(|x| f.frob_p(x, e)))
}

/// v ↦ M·v^{p^e}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SemilinearMap {
    pub matrix: Mat2,
    pub e: u32,
}

impl SemilinearMap {
    pub fn new(f: &FieldCtx, matrix: Mat2, e: u32) -> Result<Self> {
        if mat_det(f, &matrix).is_zero() {
            return Err(Error::Param("singular matrix".into()));
        }
        Ok(SemilinearMap {
            matrix,
            e: e % f.degree(),
        })
    }

    pub fn linear(f: &FieldCtx, matrix: Mat2) -> Result<Self> {
        Self::new(f, matrix, 0)
    }

    pub fn identity() -> Self {
        SemilinearMap {
            matrix: [[Felt::ONE, Felt::ZERO], [Felt::ZERO, Felt::ONE]],
            e: 0,
        }
    }

    pub fn random<R: Rng>(f: &FieldCtx, rng: &mut R) -> Self {
        loop {
            let mut m = [[Felt::ZERO; 2]; 2];
            for x in m.iter_mut().flatten() {
                *x = Felt(rng.gen_range(0..f.order()));
            }
            if !mat_det(f, &m).is_zero() {
                return SemilinearMap {
                    matrix: m,
                    e: rng.gen_range(0..f.degree()),
                };
            }
        }
    }

    pub fn apply(&self, f: &FieldCtx, v: &[Felt]) -> Vector {
        let w: Vector = v.iter().map(|&x| f.frob_p(x, self.e)).collect();
        mat_apply(f, &self.matrix, &w)
    }

    /// self ∘ first: v ↦ M2 (M1 v^{ρ1})^{ρ2} = M2·M1^{ρ2}·v^{ρ1ρ2}.
    pub fn after(&self, f: &FieldCtx, first: &SemilinearMap) -> SemilinearMap {
        SemilinearMap {
            matrix: mat_mul(f, &self.matrix, &mat_frob(f, &first.matrix, self.e)),
            e: (first.e + self.e) % f.degree(),
        }
    }

    pub fn inverse(&self, f: &FieldCtx) -> SemilinearMap {
        // v = (M^{-1} w)^{ρ^{-1}} = (M^{-1})^{ρ^{-1}} w^{ρ^{-1}}
        let back = (f.degree() - self.e) % f.degree();
        let inv = mat_inv(f, &self.matrix).expect("invertible by construction");
        SemilinearMap {
            matrix: mat_frob(f, &inv, back),
            e: back,
        }
    }
}

impl fmt::Display for SemilinearMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.matrix;
        write!(
            f,
            "[[{},{}],[{},{}]] e={}",
            m[0][0].0, m[0][1].0, m[1][0].0, m[1][1].0, self.e
        )
    }
}

pub fn apply_semilinear(u: &QSubspace, g: &SemilinearMap) -> Result<QSubspace> {
    if u.arity() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            found: u.arity(),
        });
    }
    let f = u.ctx().clone();
    if mat_det(&f, &g.matrix).is_zero() {
        return Err(Error::Param("singular matrix".into()));
    }
    u.map_fp_linear(2, |v| g.apply(&f, v))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InequivalenceReason {
    DifferentRank,
    DifferentIndex,
    DifferentInvariants,
    ExhaustiveSearch,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivVerdict {
    /// A map g with g(U1) = U2, checked by applying it.
    Equivalent(SemilinearMap),
    Inequivalent(InequivalenceReason),
    Inconclusive(String),
}

fn heavy_point(u: &QSubspace) -> Result<(ProjPoint, u32)> {
    let r = linear_set(u)?;
    match r.tag {
        ClubTag::IClub(i) => Ok((r.points_of_weight(i)[0].clone(), i)),
        tag => Err(Error::Classification(format!("expected a club, got {tag}"))),
    }
}

/// A linear map sending ⟨p⟩ to ⟨(1,0)⟩.
fn to_first_axis(f: &FieldCtx, p: &ProjPoint) -> Mat2 {
    let (x, y) = (p.0[0], p.0[1]);
    // columns p and a vector off the line through p
    let other = if x.is_zero() { [Felt::ONE, Felt::ZERO] } else { [Felt::ZERO, Felt::ONE] };
    let cols = [[x, other[0]], [y, other[1]]];
    mat_inv(f, &cols).expect("independent columns")
}

/// Membership bitmap of a set of pairs (or single elements) keyed by element codes.
struct Bitmap {
    bits: Vec<u64>,
    order: usize,
}

impl Bitmap {
    fn pairs(f: &FieldCtx, u: &QSubspace) -> Bitmap {
        let order = f.order() as usize;
        let mut bits = vec![0u64; (order * order).div_ceil(64)];
        for v in u.elements() {
            let k = v[0].0 as usize * order + v[1].0 as usize;
            bits[k / 64] |= 1 << (k % 64);
        }
        Bitmap { bits, order }
    }

    fn singles(f: &FieldCtx, elems: impl IntoIterator<Item = Felt>) -> Bitmap {
        let order = f.order() as usize;
        let mut bits = vec![0u64; order.div_ceil(64)];
        for x in elems {
            bits[x.0 as usize / 64] |= 1 << (x.0 % 64);
        }
        Bitmap { bits, order: 1 }
    }

    fn has(&self, x: Felt) -> bool {
        let k = x.0 as usize;
        self.bits[k / 64] >> (k % 64) & 1 == 1
    }

    fn has_pair(&self, x: Felt, y: Felt) -> bool {
        let k = x.0 as usize * self.order + y.0 as usize;
        self.bits[k / 64] >> (k % 64) & 1 == 1
    }
}

/// Representatives of F_{q^n}^* / F_q^*: the smallest code in each coset.
fn scalar_transversal(f: &FieldCtx) -> Vec<Felt> {
    let fq: Vec<Felt> = f.subfield_elements(1).expect("1 divides n").into_iter().filter(|x| !x.is_zero()).collect();
    f.nonzero_elements()
        .filter(|&d| fq.iter().all(|&c| f.mul(c, d).0 >= d.0))
        .collect()
}

/// Exhaustive search for g ∈ ΓL(2, q^n) with g(U1) = U2 among maps sending the heavy point
/// of L_{U1} to that of L_{U2}. Every equivalence of clubs has this property, so an empty
/// search proves inequivalence.
pub fn restricted_equiv_search(u1: &QSubspace, u2: &QSubspace) -> Result<EquivVerdict> {
    let f = u1.ctx().clone();
    if *f != **u2.ctx() {
        return Err(Error::FieldMismatch);
    }
    if u1.arity() != 2 || u2.arity() != 2 {
        return Err(Error::Param("equivalence search needs subspaces of F_(q^n)^2".into()));
    }
    let (p1, i1) = heavy_point(u1)?;
    let (p2, i2) = heavy_point(u2)?;
    if u1.dim() != u2.dim() {
        return Ok(EquivVerdict::Inequivalent(InequivalenceReason::DifferentRank));
    }
    if i1 != i2 {
        return Ok(EquivVerdict::Inequivalent(InequivalenceReason::DifferentIndex));
    }
    if i1 < 2 {
        return Ok(EquivVerdict::Inconclusive("the heavy point is not unique".into()));
    }
    let order = f.order() as u64;
    if order * order > SEARCH_LIMIT {
        return Ok(EquivVerdict::Inconclusive(format!(
            "q^(2n) = {} exceeds the search limit {SEARCH_LIMIT}",
            order * order
        )));
    }
    let n1 = SemilinearMap::linear(&f, to_first_axis(&f, &p1))?;
    let n2 = SemilinearMap::linear(&f, to_first_axis(&f, &p2))?;
    let v1 = apply_semilinear(u1, &n1)?;
    let v2 = apply_semilinear(u2, &n2)?;
    let Some(core) = triangular_search(&f, &v1, &v2)? else {
        return Ok(EquivVerdict::Inequivalent(InequivalenceReason::ExhaustiveSearch));
    };
    let g = n2.inverse(&f).after(&f, &core.after(&f, &n1));
    if apply_semilinear(u1, &g)? != *u2 {
        return Err(Error::claim("equivalence-witness", format!("{g} does not map U1 onto U2")));
    }
    Ok(EquivVerdict::Equivalent(g))
}

/// Search (M, e) with M = [[A, B], [0, D]] and M·V1^{p^e} = V2, both with heavy point ⟨(1,0)⟩.
fn triangular_search(f: &Arc<FieldCtx>, v1: &QSubspace, v2: &QSubspace) -> Result<Option<SemilinearMap>> {
    let axis = QSubspace::field_line(f, &[Felt::ONE, Felt::ZERO])?;
    let target = Bitmap::pairs(f, v2);
    let s2 = Bitmap::singles(f, v2.intersect(&axis)?.elements().into_iter().map(|v| v[0]));
    let proj2 = Bitmap::singles(f, v2.elements().into_iter().map(|v| v[1]));
    let ds = scalar_transversal(f);
    let all: Vec<Felt> = f.elements().collect();
    for e in 0..f.degree() {
        let w = apply_semilinear(v1, &SemilinearMap { matrix: SemilinearMap::identity().matrix, e })?;
        let kernel = w.intersect(&axis)?;
        let s_basis: Vec<Felt> = kernel.fp_basis().into_iter().map(|v| v[0]).collect();
        // vectors of w outside the kernel part, completing it to an F_p-basis
        let mut acc = kernel.clone();
        let mut rest: Vec<Vector> = Vec::new();
        for v in w.fp_basis() {
            if !acc.contains(&v)? {
                acc = acc.sum(&QSubspace::span(f, 2, &[v.clone()])?)?;
                rest.push(v);
            }
        }
        for &d in &ds {
            if !rest.iter().all(|v| proj2.has(f.mul(d, v[1]))) {
                continue;
            }
            for a in f.nonzero_elements() {
                if !s_basis.iter().all(|&s| s2.has(f.mul(a, s))) {
                    continue;
                }
                for &b in &all {
                    let ok = rest.iter().all(|v| {
                        let x = f.add(f.mul(a, v[0]), f.mul(b, v[1]));
                        target.has_pair(x, f.mul(d, v[1]))
                    });
                    if ok {
                        return Ok(Some(SemilinearMap {
                            matrix: [[a, b], [Felt::ZERO, d]],
                            e,
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Quantities preserved by ΓL(2, q^n) for clubs. S is the F_q-subspace {α : α·v ∈ U} for a
/// vector v of the heavy point; it is determined up to S ↦ λS^ρ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClubInvariants {
    pub spectrum: BTreeMap<u32, u64>,
    pub index: u32,
    pub rank: u32,
    /// (t, dimension of the largest F_{q^t}-subspace of S) for each divisor t > 1 of n.
    pub kernel_core_dims: Vec<(u32, u32)>,
    /// dim ⟨S·S⟩.
    pub kernel_square_dim: u32,
    /// For clubs of rank i + 2 with n ≥ 5: the product case and degree of b of the normal form.
    pub normal_form: Option<(ProductCase, u32, u32)>,
}

/// The kernel subspace S at the heavy point.
pub fn heavy_kernel(u: &QSubspace) -> Result<QSubspace> {
    let f = u.ctx().clone();
    let (p, _) = heavy_point(u)?;
    let line = QSubspace::field_line(&f, p.coords())?;
    let j = p.0.iter().position(|x| !x.is_zero()).expect("nonzero point");
    let inv = f.inv(p.0[j]);
    let gens: Vec<Felt> = u.intersect(&line)?.fp_basis().into_iter().map(|v| f.mul(v[j], inv)).collect();
    Ok(QSubspace::span1(&f, &gens))
}

pub fn invariants(u: &QSubspace) -> Result<ClubInvariants> {
    let f = u.ctx().clone();
    let r = linear_set(u)?;
    let ClubTag::IClub(index) = r.tag else {
        return Err(Error::Classification(format!("expected a club, got {}", r.tag)));
    };
    let s = heavy_kernel(u)?;
    let kernel_core_dims = fpoly::divisors(f.n())
        .into_iter()
        .filter(|&t| t > 1)
        .map(|t| Ok((t, s.subfield_core(t)?.dim())))
        .collect::<Result<Vec<_>>>()?;
    let kernel_square_dim = product_span(&s, &s)?.dim();
    let normal_form = if u.dim() == index + 2 && index + 2 == f.n() && f.n() >= 5 {
        let nc = normalize_club(u)?;
        let c = classify_product_case(&nc.s, nc.b)?;
        Some((c.case, c.product_dim, c.t))
    } else {
        None
    };
    Ok(ClubInvariants {
        spectrum: r.spectrum,
        index,
        rank: u.dim(),
        kernel_core_dims,
        kernel_square_dim,
        normal_form,
    })
}

/// Fingerprints first, then the exhaustive search.
pub fn decide_equivalence(u1: &QSubspace, u2: &QSubspace) -> Result<EquivVerdict> {
    let (a, b) = (invariants(u1)?, invariants(u2)?);
    if a.rank != b.rank {
        return Ok(EquivVerdict::Inequivalent(InequivalenceReason::DifferentRank));
    }
    if a.index != b.index {
        return Ok(EquivVerdict::Inequivalent(InequivalenceReason::DifferentIndex));
    }
    if a != b {
        return Ok(EquivVerdict::Inequivalent(InequivalenceReason::DifferentInvariants));
    }
    restricted_equiv_search(u1, u2)
}

/// Parameters of one scattered-trace club (f on F_{q^t}, a, b in F_{q^t}, ω).
#[derive(Clone, Debug)]
pub struct ScatteredTraceParams {
    pub f: LinPoly,
    pub a: Felt,
    pub b: Felt,
    pub omega: Felt,
}

/// Both sides of the reduction of equivalence of scattered-trace clubs to F_{q^t}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionCheck {
    /// U1, U2 equivalent in ΓL(2, q^n).
    pub ambient: bool,
    /// Ū1, Ū2 equivalent in ΓL(2, q^t) by a map fixing ⟨(0,1)⟩.
    pub restricted: bool,
}

impl ReductionCheck {
    pub fn agrees(&self) -> bool {
        self.ambient == self.restricted
    }
}

/// Ū = {(f(x) − ax, bx) : x ∈ F_{q^t}}.
fn small_graph(p: &ScatteredTraceParams) -> Result<QSubspace> {
    let f = p.f.ctx();
    let basis: Vec<Vector> = f
        .subfield_fp_basis(p.f.ext())?
        .into_iter()
        .map(|x| vec![f.sub(p.f.eval(x), f.mul(p.a, x)), f.mul(p.b, x)])
        .collect();
    QSubspace::span(f, 2, &basis)
}

/// Maps [[A, 0], [C, D]] over F_{q^t} with x ↦ x^{p^e} (e < ht) sending Ū1 onto Ū2.
pub fn subfield_stabilizer_search(
    p1: &ScatteredTraceParams,
    p2: &ScatteredTraceParams,
) -> Result<Option<SemilinearMap>> {
    let f = p1.f.ctx().clone();
    let t = p1.f.ext();
    let (w1, w2) = (small_graph(p1)?, small_graph(p2)?);
    let target: HashSet<Vector> = w2.elements().into_iter().collect();
    let sub = f.subfield_elements(t)?;
    let fq: Vec<Felt> = f.subfield_elements(1)?.into_iter().filter(|x| !x.is_zero()).collect();
    let ds: Vec<Felt> = sub
        .iter()
        .copied()
        .filter(|&d| !d.is_zero() && fq.iter().all(|&c| f.mul(c, d).0 >= d.0))
        .collect();
    for e in 0..f.h() * t {
        let basis: Vec<Vector> = w1
            .fp_basis()
            .into_iter()
            .map(|v| v.iter().map(|&x| f.frob_p(x, e)).collect())
            .collect();
        for &d in &ds {
            for &a in sub.iter().filter(|x| !x.is_zero()) {
                for &c in &sub {
                    let m = [[a, Felt::ZERO], [c, d]];
                    if basis.iter().all(|v| target.contains(&mat_apply(&f, &m, v))) {
                        return Ok(Some(SemilinearMap { matrix: m, e }));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Decide both sides of the reduction at desk scale.
pub fn subfield_reduction_check(p1: &ScatteredTraceParams, p2: &ScatteredTraceParams) -> Result<ReductionCheck> {
    use crate::constructions::club_scattered_trace;
    if p1.f.ext() != p2.f.ext() {
        return Err(Error::Param("both polynomials must live on the same subfield".into()));
    }
    let u1 = club_scattered_trace(&p1.f, p1.a, p1.b, p1.omega)?.subspace;
    let u2 = club_scattered_trace(&p2.f, p2.a, p2.b, p2.omega)?.subspace;
    let ambient = match restricted_equiv_search(&u1, &u2)? {
        EquivVerdict::Equivalent(_) => true,
        EquivVerdict::Inequivalent(_) => false,
        EquivVerdict::Inconclusive(why) => return Err(Error::Param(why)),
    };
    let restricted = subfield_stabilizer_search(p1, p2)?.is_some();
    Ok(ReductionCheck { ambient, restricted })
}
