//! Subspaces U = (S × {0}) ⊕ ⟨(1,1)⟩ ⊕ ⟨(a,b)⟩ of F_{q^n}^2, their weight-2 points,
//! and the normal forms of S that decide when L_U is an (n−2)-club.

use std::sync::Arc;

use super::{linear_set, product_span, ClubTag, ProjPoint, QSubspace, Vector};
use crate::error::{Error, Result};
use crate::gfcore::{Felt, FieldCtx};
use crate::linalg::field_inverse;

fn require(cond: bool, name: &'static str, detail: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::pre(name, detail))
    }
}

/// U = (S × {0}) + ⟨(1,1)⟩ + ⟨(a,b)⟩, with the weights of ⟨(1,0)⟩ and ⟨(0,1)⟩ checked.
pub fn club_from_sab(s: &QSubspace, a: Felt, b: Felt) -> Result<QSubspace> {
    let f = s.ctx().clone();
    require(s.arity() == 1, "s-in-field", "S must be a subspace of F_(q^n)")?;
    require(s.contains_elem(Felt::ONE), "one-in-s", "1 is not in S")?;
    require(!s.contains_elem(a), "a-not-in-s", format!("a = {a} lies in S"))?;
    require(!f.is_in_subfield(b, 1), "b-not-in-fq", format!("b = {b} lies in F_q"))?;
    require(
        s.dim() + 2 <= f.n(),
        "dim-s-at-most-n-minus-2",
        format!("dim S = {} > n - 2", s.dim()),
    )?;
    let u = sab_subspace(s, a, b);
    let heavy = super::point_weight(&u, &ProjPoint(vec![Felt::ONE, Felt::ZERO]))?;
    let inf = super::point_weight(&u, &ProjPoint(vec![Felt::ZERO, Felt::ONE]))?;
    if heavy != s.dim() || inf != 1 || u.dim() != s.dim() + 2 {
        return Err(Error::claim(
            "sab-weights",
            format!("w(<(1,0)>) = {heavy}, w(<(0,1)>) = {inf}, rank {}", u.dim()),
        ));
    }
    Ok(u)
}

pub(crate) fn sab_subspace(s: &QSubspace, a: Felt, b: Felt) -> QSubspace {
    let f = s.ctx();
    let mut vs: Vec<Vector> = s.q_basis1().into_iter().map(|x| vec![x, Felt::ZERO]).collect();
    vs.push(vec![Felt::ONE, Felt::ONE]);
    vs.push(vec![a, b]);
    QSubspace::span(f, 2, &vs).expect("arity 2")
}

/// S ∩ (a + bS) as a list of elements.
pub(crate) fn shifted_intersection(s: &QSubspace, a: Felt, b: Felt) -> Vec<Felt> {
    let f = s.ctx();
    let binv = f.inv(b);
    s.elements1()
        .into_iter()
        .filter(|&x| s.contains_elem(f.mul(f.sub(x, a), binv)))
        .collect()
}

/// {⟨(−s + a, b)⟩ : s ∈ S ∩ (a + bS)}, sorted.
pub fn weight2_points_bijection(s: &QSubspace, a: Felt, b: Felt) -> Result<Vec<ProjPoint>> {
    club_from_sab(s, a, b)?;
    let f = s.ctx();
    let mut pts: Vec<ProjPoint> = shifted_intersection(s, a, b)
        .into_iter()
        .map(|x| ProjPoint::from_vector(f, &[f.sub(a, x), b]).expect("b is nonzero"))
        .collect();
    pts.sort();
    Ok(pts)
}

/// Which case of the (n−2)-dimensional trichotomy a pair (S, b) falls into,
/// by d = dim⟨S·⟨1,b⟩⟩.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductCase {
    /// d = n: L_U is never a club.
    Full,
    /// d = n − 1: a club iff a ∉ ⟨S·T⟩.
    Hyperplane,
    /// d = n − 2: S is an F_{q^2}-subspace.
    Closed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductCaseReport {
    pub case: ProductCase,
    pub product_dim: u32,
    /// Degree of b over F_q.
    pub t: u32,
    /// The normal form of S found for this case.
    pub form: Option<DecompositionCase>,
}

/// Structure of S relative to S ∩ μS.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecompositionCase {
    /// S ∩ μS = S: S is closed under F_q(μ) = F_{q^t}.
    FieldClosed { t: u32 },
    /// S = c·⟨1, μ, ..., μ^{k−1}⟩.
    Power { c: Felt },
    /// S = S̄ ⊕ c·⟨1, μ, ..., μ^{m−1}⟩ with S̄ an F_{q^t}-subspace of dimension ℓ and cF_{q^t} ∩ S̄ = 0.
    Split { sbar: QSubspace, c: Felt, ell: u32, m: u32 },
    /// S = c·⟨1, γ, ..., γ^{r−2}⟩ over F_{q^2}, r = n/2.
    HyperplaneOverQ2 { c: Felt, gamma: Felt },
    /// dim(S ∩ μS) ≤ k − 2: none of the cases apply.
    NoCase { intersection_dim: u32 },
}

fn powers(f: &FieldCtx, c: Felt, mu: Felt, count: u32) -> Vec<Felt> {
    (0..count).map(|i| f.mul(c, f.pow(mu, i as u64))).collect()
}

/// Case analysis of S (dim k ≥ 2) against μ ∉ F_q according to dim(S ∩ μS), with the
/// witnesses b, S̄ found by exhaustive search over S.
pub fn decompose_against(s: &QSubspace, mu: Felt) -> Result<DecompositionCase> {
    let f = s.ctx().clone();
    let k = s.dim();
    require(s.arity() == 1, "s-in-field", "S must be a subspace of F_(q^n)")?;
    require(k >= 2, "dim-s-at-least-2", format!("dim S = {k}"))?;
    require(!f.is_in_subfield(mu, 1), "mu-not-in-fq", format!("mu = {mu} lies in F_q"))?;
    let t = f.degree_over_base(mu);
    let j = s.intersect(&s.scale(mu))?.dim();
    if j == k {
        if !s.is_subfield_closed(t)? {
            return Err(Error::claim("invariant-means-closed", "S = μS but S is not F_q(μ)-closed"));
        }
        return Ok(DecompositionCase::FieldClosed { t });
    }
    if j + 1 < k {
        return Ok(DecompositionCase::NoCase { intersection_dim: j });
    }
    if t >= k {
        if t == k {
            return Err(Error::claim("power-form-degree", format!("t = k = {k} with dim(S ∩ μS) = k − 1")));
        }
        let c = s
            .elements1()
            .into_iter()
            .filter(|x| !x.is_zero())
            .find(|&c| QSubspace::span1(&f, &powers(&f, c, mu, k)) == *s)
            .ok_or_else(|| Error::claim("power-form", "no c with S = c<1, mu, ..., mu^(k-1)>"))?;
        return Ok(DecompositionCase::Power { c });
    }
    let (ell, m) = (k / t, k % t);
    if m == 0 {
        return Err(Error::claim("split-remainder", format!("k = {k} is a multiple of t = {t}")));
    }
    let sbar = s.subfield_core(t)?;
    if sbar.dim() != t * ell {
        return Err(Error::claim(
            "split-core-dim",
            format!("F_(q^{t})-core has dimension {}, expected {}", sbar.dim(), t * ell),
        ));
    }
    let field_t = QSubspace::subfield(&f, t)?;
    let c = s
        .elements1()
        .into_iter()
        .filter(|x| !x.is_zero())
        .find(|&c| {
            let tail = QSubspace::span1(&f, &powers(&f, c, mu, m));
            let whole = sbar.sum(&tail).expect("same field");
            whole == *s
                && whole.dim() == sbar.dim() + m
                && field_t.scale(c).intersect(&sbar).expect("same field").is_zero()
        })
        .ok_or_else(|| Error::claim("split-form", "no c completing the F_(q^t)-core"))?;
    Ok(DecompositionCase::Split { sbar, c, ell, m })
}

/// First γ (in element order) with F_{q^2}(γ) = F_{q^n}.
fn q2_generator(f: &FieldCtx) -> Felt {
    let r = f.n() / 2;
    let beta = f.subfield_generator(2).expect("n even");
    f.nonzero_elements()
        .find(|&g| {
            let mut elems = Vec::new();
            for i in 0..r {
                let gi = f.pow(g, i as u64);
                elems.push(gi);
                elems.push(f.mul(beta, gi));
            }
            f.fq_rank(&elems) == f.n() as usize
        })
        .expect("a primitive element works")
}

/// Classify an (n−2)-dimensional S with 1 ∈ S against b ∉ F_q by d = dim⟨S·⟨1,b⟩⟩,
/// and find the normal form of S the case predicts.
pub fn classify_product_case(s: &QSubspace, b: Felt) -> Result<ProductCaseReport> {
    let f = s.ctx().clone();
    let n = f.n();
    require(n >= 5, "n-at-least-5", format!("n = {n}"))?;
    require(s.arity() == 1, "s-in-field", "S must be a subspace of F_(q^n)")?;
    require(s.dim() + 2 == n, "dim-s-is-n-minus-2", format!("dim S = {}", s.dim()))?;
    require(s.contains_elem(Felt::ONE), "one-in-s", "1 is not in S")?;
    require(!f.is_in_subfield(b, 1), "b-not-in-fq", format!("b = {b} lies in F_q"))?;
    let t = f.degree_over_base(b);
    let d = product_span(s, &QSubspace::span1(&f, &[Felt::ONE, b]))?.dim();
    match n - d {
        0 => Ok(ProductCaseReport {
            case: ProductCase::Full,
            product_dim: d,
            t,
            form: None,
        }),
        1 => {
            let form = decompose_against(s, b)?;
            let ok = match &form {
                DecompositionCase::Power { .. } => t == n,
                DecompositionCase::Split { ell, m, .. } => t >= 3 && *m == t - 2 && n == t * (ell + 1),
                _ => false,
            };
            if !ok {
                return Err(Error::claim("hyperplane-case-form", format!("t = {t}, form {form:?}")));
            }
            Ok(ProductCaseReport {
                case: ProductCase::Hyperplane,
                product_dim: d,
                t,
                form: Some(form),
            })
        }
        2 => {
            if n % 2 != 0 || t != 2 || !s.is_subfield_closed(2)? {
                return Err(Error::claim(
                    "closed-case-structure",
                    format!("n = {n}, t = {t}: S must be an F_(q^2)-subspace with n even"),
                ));
            }
            let gamma = q2_generator(&f);
            let r = n / 2;
            let beta = f.subfield_generator(2)?;
            let c = s
                .elements1()
                .into_iter()
                .filter(|x| !x.is_zero())
                .find(|&c| {
                    let mut gens = Vec::new();
                    for x in powers(&f, c, gamma, r - 1) {
                        gens.push(x);
                        gens.push(f.mul(beta, x));
                    }
                    QSubspace::span1(&f, &gens) == *s
                })
                .ok_or_else(|| Error::claim("closed-case-form", "no c with S = c<1, gamma, ...> over F_(q^2)"))?;
            Ok(ProductCaseReport {
                case: ProductCase::Closed,
                product_dim: d,
                t,
                form: Some(DecompositionCase::HyperplaneOverQ2 { c, gamma }),
            })
        }
        _ => Err(Error::claim(
            "product-dim-at-least-n-minus-2",
            format!("dim<S*T> = {d} < n - 2"),
        )),
    }
}

/// An h-club of rank h+2 brought to (S × {0}) ⊕ ⟨(1,1)⟩ ⊕ ⟨(a,b)⟩ form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedClub {
    pub s: QSubspace,
    pub a: Felt,
    pub b: Felt,
    /// Matrix M (rows) with M·W = club_from_sab(S, a, b).
    pub map: [[Felt; 2]; 2],
}

fn apply2(f: &FieldCtx, m: &[[Felt; 2]; 2], v: &[Felt]) -> Vector {
    vec![
        f.add(f.mul(m[0][0], v[0]), f.mul(m[0][1], v[1])),
        f.add(f.mul(m[1][0], v[0]), f.mul(m[1][1], v[1])),
    ]
}

/// Send a vector of the heavy point to (1,0) and a vector of the first weight-1 point
/// to (1,1), then read off S, a and b.
pub fn normalize_club(w: &QSubspace) -> Result<NormalizedClub> {
    let f: Arc<FieldCtx> = w.ctx().clone();
    if w.arity() != 2 {
        return Err(Error::Classification("normal form needs a subspace of F_(q^n)^2".into()));
    }
    let report = linear_set(w)?;
    let h = match report.tag {
        ClubTag::IClub(h) if w.dim() == h + 2 => h,
        tag => {
            return Err(Error::Classification(format!(
                "expected an h-club of rank h+2, got {tag} of rank {}",
                w.dim()
            )))
        }
    };
    let heavy = report.points_of_weight(h)[0].clone();
    let light = report.points_of_weight(1)[0].clone();
    let first_vector = |p: &ProjPoint| -> Result<Vector> {
        let line = QSubspace::field_line(&f, p.coords())?;
        Ok(w.intersect(&line)?.fp_basis()[0].clone())
    };
    let v1 = first_vector(&heavy)?;
    let v2 = first_vector(&light)?;
    // columns v1, v2
    let cols = vec![vec![v1[0], v2[0]], vec![v1[1], v2[1]]];
    let inv = field_inverse(&f, &cols)?;
    // M = [[1,1],[0,1]] · inv
    let m = [
        [f.add(inv[0][0], inv[1][0]), f.add(inv[0][1], inv[1][1])],
        [inv[1][0], inv[1][1]],
    ];
    let u = w.map_fp_linear(2, |v| apply2(&f, &m, v))?;
    let axis = QSubspace::field_line(&f, &[Felt::ONE, Felt::ZERO])?;
    let s_vecs: Vec<Felt> = u.intersect(&axis)?.q_basis().into_iter().map(|v| v[0]).collect();
    let s = QSubspace::span1(&f, &s_vecs);
    let base = u.intersect(&axis)?.sum(&QSubspace::span(&f, 2, &[vec![Felt::ONE, Felt::ONE]])?)?;
    let ab = u
        .fp_basis()
        .into_iter()
        .find(|v| !base.contains(v).expect("arity 2"))
        .ok_or_else(|| Error::claim("normal-form-complement", "U has no vector outside S x 0 + <(1,1)>"))?;
    let (a, b) = (ab[0], ab[1]);
    let rebuilt = club_from_sab(&s, a, b)?;
    if rebuilt != u {
        return Err(Error::claim("normal-form-rebuild", "club_from_sab(S, a, b) differs from M·W"));
    }
    let sb = s.sum(&s.scale(b))?;
    if sb.contains_elem(a) {
        return Err(Error::claim("normal-form-club", "a lies in S + bS although L_W is a club"));
    }
    Ok(NormalizedClub { s, a, b, map: m })
}
