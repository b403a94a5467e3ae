//! Rédei-type linear blocking sets in PG(2, q^n) built from clubs, their line profiles,
//! and translation KM-arcs in PG(2, 2^n).

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gfcore::{Felt, FieldCtx};
use crate::subspaces::{linear_set, ClubTag, LinearSetReport, ProjPoint, QSubspace, Vector};

/// Largest q^n for which line profiles scan every line.
pub const FULL_SCAN_LIMIT: u64 = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointSetKind {
    BlockingSet,
    KmArc,
    Raw,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet2D {
    pub ctx: Arc<FieldCtx>,
    /// Sorted, normalized, without duplicates.
    pub points: Vec<ProjPoint>,
    pub kind: PointSetKind,
}

impl PointSet2D {
    pub fn new(ctx: &Arc<FieldCtx>, points: impl IntoIterator<Item = ProjPoint>, kind: PointSetKind) -> Self {
        let mut points: Vec<ProjPoint> = points
            .into_iter()
            .map(|p| ProjPoint::from_vector(ctx, &p.0).expect("nonzero point"))
            .collect();
        points.sort();
        points.dedup();
        PointSet2D {
            ctx: ctx.clone(),
            points,
            kind,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn key(v: &[Felt]) -> u64 {
    v.iter().fold(0u64, |k, x| (k << 21) | x.0 as u64)
}

fn dot(f: &FieldCtx, a: &[Felt], b: &[Felt]) -> Felt {
    f.sum(a.iter().zip(b).map(|(&x, &y)| f.mul(x, y)))
}

/// All normalized points of PG(k−1, q^n), in coordinate order.
pub fn projective_points(f: &FieldCtx, k: usize) -> Vec<ProjPoint> {
    let mut out = Vec::new();
    for lead in 0..k {
        let free = k - 1 - lead;
        let total = (f.order() as u64).pow(free as u32);
        for mut idx in 0..total {
            let mut v = vec![Felt::ZERO; k];
            v[lead] = Felt::ONE;
            for j in (lead + 1..k).rev() {
                v[j] = Felt((idx % f.order() as u64) as u32);
                idx /= f.order() as u64;
            }
            out.push(ProjPoint(v));
        }
    }
    out
}

/// The q^n + 1 lines through p, as normalized dual coordinates.
pub fn lines_through(f: &FieldCtx, p: &ProjPoint) -> Vec<ProjPoint> {
    let j = p.0.iter().position(|x| !x.is_zero()).expect("nonzero point");
    let inv = f.inv(p.0[j]);
    let others: Vec<usize> = (0..3).filter(|&k| k != j).collect();
    projective_points(f, 2)
        .into_iter()
        .map(|free| {
            let mut l = vec![Felt::ZERO; 3];
            for (c, &k) in free.0.iter().zip(&others) {
                l[k] = *c;
            }
            let s = f.sum(others.iter().map(|&k| f.mul(l[k], p.0[k])));
            l[j] = f.neg(f.mul(s, inv));
            ProjPoint::from_vector(f, &l).expect("nonzero line")
        })
        .collect()
}

/// W = U × {0} ⊕ ⟨v⟩ for a club U ⊆ F_{q^n}^2, with |L_W| checked against the club size formula.
pub fn redei_blocking_set(u: &QSubspace, v: Option<&[Felt]>) -> Result<(QSubspace, u32)> {
    let f = u.ctx().clone();
    if u.arity() != 2 {
        return Err(Error::Param("a Rédei blocking set needs a subspace of F_(q^n)^2".into()));
    }
    let r = linear_set(u)?;
    let i = match r.tag {
        ClubTag::IClub(i) if i < f.n() => i,
        tag => return Err(Error::Classification(format!("expected an i-club with i < n, got {tag}"))),
    };
    let v = v.map(|v| v.to_vec()).unwrap_or_else(|| vec![Felt::ZERO, Felt::ZERO, Felt::ONE]);
    if v.len() != 3 || v[2].is_zero() {
        return Err(Error::pre("v-outside-span", "v must not lie in the span of U"));
    }
    let w = u.embed(3)?.sum(&QSubspace::span(&f, 3, &[v])?)?;
    let size = linear_set(&w)?.size();
    let expected = crate::constructions::club_size(f.q() as u64, f.n() + 1, i);
    if size != expected {
        return Err(Error::claim("blocking-set-size", format!("|L_W| = {size}, expected {expected}")));
    }
    Ok((w, i))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineProfile {
    /// dim_{F_q}(W ∩ ℓ) → number of lines.
    pub weights: BTreeMap<u32, u64>,
    /// |L_W ∩ ℓ| → number of lines.
    pub sizes: BTreeMap<u64, u64>,
    /// (weight, |L_W ∩ ℓ|) → number of lines.
    pub joint: BTreeMap<(u32, u64), u64>,
    pub lines_scanned: u64,
    pub exhaustive: bool,
    /// Seed and number of random lines used above the full-scan limit.
    pub sample: Option<(u64, u64)>,
}

/// Weight and point count of every line of PG(2, q^n) (or, above the limit, of the pencil
/// through `focus` plus `trials` random lines).
pub fn line_profile(w: &QSubspace, focus: Option<&ProjPoint>, seed: u64, trials: u64) -> Result<LineProfile> {
    let f = w.ctx().clone();
    if w.arity() != 3 {
        return Err(Error::Param("line profiles need a subspace of F_(q^n)^3".into()));
    }
    let report = linear_set(w)?;
    let q_basis = w.q_basis();
    let dim = w.dim();
    let counts = pencil_counts(&f, report.points.iter().map(|(p, _)| p));
    let exhaustive = f.order() as u64 <= FULL_SCAN_LIMIT;
    let (lines, sample) = if exhaustive {
        (projective_points(&f, 3), None)
    } else {
        let mut lines = match focus {
            Some(p) => lines_through(&f, p),
            None => Vec::new(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..trials {
            let v: Vector = (0..3).map(|_| Felt(rng.gen_range(0..f.order()))).collect();
            if let Some(l) = ProjPoint::from_vector(&f, &v) {
                lines.push(l);
            }
        }
        (lines, Some((seed, trials)))
    };
    let mut prof = LineProfile {
        weights: BTreeMap::new(),
        sizes: BTreeMap::new(),
        joint: BTreeMap::new(),
        lines_scanned: lines.len() as u64,
        exhaustive,
        sample,
    };
    for l in &lines {
        let images: Vec<Felt> = q_basis.iter().map(|v| dot(&f, &l.0, v)).collect();
        let wt = dim - f.fq_rank(&images) as u32;
        let size = counts.get(&key(&l.0)).copied().unwrap_or(0);
        *prof.weights.entry(wt).or_insert(0) += 1;
        *prof.sizes.entry(size).or_insert(0) += 1;
        *prof.joint.entry((wt, size)).or_insert(0) += 1;
    }
    Ok(prof)
}

/// Number of points of the set on each line meeting it, keyed by the line's coordinates.
fn pencil_counts<'a>(f: &FieldCtx, points: impl Iterator<Item = &'a ProjPoint>) -> HashMap<u64, u64> {
    let mut counts = HashMap::new();
    for p in points {
        for l in lines_through(f, p) {
            *counts.entry(key(&l.0)).or_insert(0) += 1;
        }
    }
    counts
}

/// The statements about lines of a Rédei blocking set from an i-club with i ≤ n − 2.
pub fn check_redei_profile(prof: &LineProfile, q: u64, n: u32, i: u32) -> Result<()> {
    if !prof.exhaustive {
        return Err(Error::Param("profile claims need a full line scan".into()));
    }
    let total = q.pow(2 * n) + q.pow(n) + 1;
    if prof.lines_scanned != total {
        return Err(Error::claim("line-count", format!("{} lines, expected {total}", prof.lines_scanned)));
    }
    let w = |x: u32| prof.weights.get(&x).copied().unwrap_or(0);
    if w(n) != 1 {
        return Err(Error::claim("unique-redei-line", format!("{} lines of weight n", w(n))));
    }
    if w(i + 1) != q.pow(n - i) {
        return Err(Error::claim(
            "heavy-line-count",
            format!("{} lines of weight i+1, expected {}", w(i + 1), q.pow(n - i)),
        ));
    }
    if let Some(bad) = prof.weights.keys().find(|&&x| ![1, 2, i, i + 1, n].contains(&x)) {
        return Err(Error::claim("line-weights", format!("a line of weight {bad}")));
    }
    if !prof.sizes.contains_key(&(q + 1)) {
        return Err(Error::claim("q-plus-1-secant", "no line meets L_W in q+1 points"));
    }
    let redei = crate::constructions::club_size(q, n, i);
    if prof.joint.get(&(n, redei)) != Some(&1) {
        return Err(Error::claim("redei-line-size", format!("the weight-n line does not carry {redei} points")));
    }
    Ok(())
}

/// A(U, v) = (L_{U ⊕ ⟨v⟩} \ ℓ) ∪ (ℓ \ L_U), with ℓ: X_2 = 0. Needs q = 2.
pub fn km_arc(u: &QSubspace, v: Option<&[Felt]>) -> Result<(PointSet2D, u32)> {
    let f = u.ctx().clone();
    if f.q() != 2 {
        return Err(Error::pre("q-equals-2", format!("KM-arcs from F_2-linear sets need q = 2, got q = {}", f.q())));
    }
    if u.arity() != 2 {
        return Err(Error::Param("a KM-arc needs a subspace of F_(2^n)^2".into()));
    }
    let lu: LinearSetReport = linear_set(u)?;
    let i = match lu.tag {
        ClubTag::IClub(i) => i,
        tag => return Err(Error::Classification(format!("expected a club, got {tag}"))),
    };
    let v = v.map(|v| v.to_vec()).unwrap_or_else(|| vec![Felt::ZERO, Felt::ZERO, Felt::ONE]);
    if v.len() != 3 || v[2].is_zero() {
        return Err(Error::pre("v-outside-span", "v must not lie in the span of U"));
    }
    let w = u.embed(3)?.sum(&QSubspace::span(&f, 3, &[v])?)?;
    let mut pts: Vec<ProjPoint> = linear_set(&w)?
        .points
        .into_iter()
        .map(|(p, _)| p)
        .filter(|p| !p.0[2].is_zero())
        .collect();
    for p in projective_points(&f, 2) {
        if lu.weight_of(&p) == 0 {
            pts.push(ProjPoint(vec![p.0[0], p.0[1], Felt::ZERO]));
        }
    }
    let set = PointSet2D::new(&f, pts, PointSetKind::KmArc);
    let expected = (1u64 << f.n()) + (1u64 << i);
    if set.len() as u64 != expected {
        return Err(Error::claim("km-arc-size", format!("|A| = {}, expected {expected}", set.len())));
    }
    Ok((set, i))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KmArcCheck {
    pub ok: bool,
    /// |A ∩ ℓ| → number of lines, over all lines of PG(2, q^n).
    pub histogram: BTreeMap<u64, u64>,
}

/// Every line meets A in 0, 2 or t points.
pub fn verify_km_arc(a: &PointSet2D, t: u64) -> KmArcCheck {
    let f = &a.ctx;
    let qn = f.order() as u64;
    let counts = pencil_counts(f, a.points.iter());
    let mut histogram = BTreeMap::new();
    for &c in counts.values() {
        *histogram.entry(c).or_insert(0) += 1;
    }
    let met = counts.len() as u64;
    histogram.insert(0, qn * qn + qn + 1 - met);
    histogram.retain(|_, c| *c > 0);
    let ok = histogram.keys().all(|&s| s == 0 || s == 2 || s == t) && a.len() as u64 == qn + t;
    KmArcCheck { ok, histogram }
}
