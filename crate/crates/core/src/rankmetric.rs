//! F_{q^n}-linear rank-metric codes of dimension 2 and 3, their systems, and weight
//! distributions computed both geometrically and from codeword entries.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::constructions::{club_size, ClubRecipe};
use crate::error::{Error, Result};
use crate::geomapps::{line_profile, projective_points};
use crate::gfcore::{Felt, FieldCtx};
use crate::linalg::field_rank;
use crate::subspaces::{linear_set, ClubTag, QSubspace, Vector};

/// Largest q^{nk} for which the direct enumeration of codewords runs.
pub const DIRECT_LIMIT: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankCode {
    pub ctx: Arc<FieldCtx>,
    /// k rows of length N.
    pub generator: Vec<Vec<Felt>>,
}

/// weight → number of nonzero codewords.
pub type WeightDistribution = BTreeMap<u32, u64>;

impl RankCode {
    pub fn new(ctx: &Arc<FieldCtx>, generator: Vec<Vec<Felt>>) -> Result<RankCode> {
        let k = generator.len();
        if !(2..=3).contains(&k) {
            return Err(Error::Param(format!("code dimension {k} is not 2 or 3")));
        }
        let len = generator[0].len();
        if generator.iter().any(|r| r.len() != len) {
            return Err(Error::Dimension("generator rows differ in length".into()));
        }
        if field_rank(ctx, &generator) != k {
            return Err(Error::Dimension("generator rows are dependent".into()));
        }
        Ok(RankCode {
            ctx: ctx.clone(),
            generator,
        })
    }

    pub fn k(&self) -> usize {
        self.generator.len()
    }

    pub fn length(&self) -> usize {
        self.generator[0].len()
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.length()).map(|j| self.generator.iter().map(|r| r[j]).collect()).collect()
    }

    /// The F_q-span of the columns.
    pub fn system(&self) -> QSubspace {
        QSubspace::span(&self.ctx, self.k(), &self.columns()).expect("arity 2 or 3")
    }

    /// Columns independent over F_q.
    pub fn is_nondegenerate(&self) -> bool {
        self.system().dim() as usize == self.length()
    }

    pub fn encode(&self, x: &[Felt]) -> Vec<Felt> {
        let f = &self.ctx;
        (0..self.length())
            .map(|j| f.sum(x.iter().zip(&self.generator).map(|(&a, r)| f.mul(a, r[j]))))
            .collect()
    }
}

/// dim_{F_q} of the span of the entries.
pub fn codeword_weight(f: &FieldCtx, c: &[Felt]) -> u32 {
    f.fq_rank(c) as u32
}

/// The code whose generator columns are the given F_q-basis of U (or U's own basis).
pub fn code_from_system(u: &QSubspace, basis: Option<&[Vector]>) -> Result<RankCode> {
    let f = u.ctx().clone();
    let cols: Vec<Vector> = match basis {
        Some(b) => b.to_vec(),
        None => u.q_basis(),
    };
    if cols.len() != u.dim() as usize || QSubspace::span(&f, u.arity(), &cols)? != *u {
        return Err(Error::Dimension("the columns are not an F_q-basis of U".into()));
    }
    let gen: Vec<Vec<Felt>> = (0..u.arity()).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
    if field_rank(&f, &gen) != u.arity() {
        return Err(Error::pre("system-spans", "U does not span F_(q^n)^k over F_(q^n)"));
    }
    let code = RankCode::new(&f, gen)?;
    if code.system() != *u {
        return Err(Error::claim("system-round-trip", "column span differs from U"));
    }
    Ok(code)
}

/// x^⊥ = {y : x·y = 0} as an F_q-subspace.
fn perp(f: &Arc<FieldCtx>, x: &[Felt]) -> Result<QSubspace> {
    let k = x.len();
    let j = x.iter().position(|c| !c.is_zero()).expect("nonzero x");
    let inv = f.inv(x[j]);
    let mut h = QSubspace::zero(f, k)?;
    for m in (0..k).filter(|&m| m != j) {
        let mut v = vec![Felt::ZERO; k];
        v[m] = Felt::ONE;
        v[j] = f.neg(f.mul(x[m], inv));
        h = h.sum(&QSubspace::field_line(f, &v)?)?;
    }
    Ok(h)
}

/// w(xG) = N − dim(U ∩ x^⊥) over the projective points ⟨x⟩, each counted q^n − 1 times.
pub fn weight_distribution_geometric(c: &RankCode) -> Result<WeightDistribution> {
    let f = &c.ctx;
    let u = c.system();
    let len = c.length() as u32;
    let mult = f.order() as u64 - 1;
    let mut dist = WeightDistribution::new();
    for x in projective_points(f, c.k()) {
        let w = len - u.intersect(&perp(f, &x.0)?)?.dim();
        *dist.entry(w).or_insert(0) += mult;
    }
    Ok(dist)
}

/// Every nonzero message, weight from the codeword entries.
pub fn weight_distribution_direct(c: &RankCode) -> Result<WeightDistribution> {
    let f = &c.ctx;
    let k = c.k();
    let total = (f.order() as u64).pow(k as u32);
    if total > DIRECT_LIMIT {
        return Err(Error::Param(format!("q^(nk) = {total} exceeds {DIRECT_LIMIT}")));
    }
    let mut dist = WeightDistribution::new();
    for mut idx in 1..total {
        let mut x = vec![Felt::ZERO; k];
        for xi in x.iter_mut() {
            *xi = Felt((idx % f.order() as u64) as u32);
            idx /= f.order() as u64;
        }
        *dist.entry(codeword_weight(f, &c.encode(&x))).or_insert(0) += 1;
    }
    Ok(dist)
}

/// Geometric distribution, checked against the direct one when that is feasible.
pub fn weight_distribution(c: &RankCode) -> Result<WeightDistribution> {
    let geo = weight_distribution_geometric(c)?;
    if (c.ctx.order() as u64).pow(c.k() as u32) <= DIRECT_LIMIT {
        let direct = weight_distribution_direct(c)?;
        if direct != geo {
            return Err(Error::claim(
                "geometric-weights",
                format!("geometric {geo:?} differs from direct {direct:?}"),
            ));
        }
    }
    Ok(geo)
}

pub fn minimum_distance(dist: &WeightDistribution) -> Option<u32> {
    dist.iter().find(|(_, &c)| c > 0).map(|(&w, _)| w)
}

/// The three-weight distribution of a code from an i-club of rank n.
pub fn iclub_distribution(q: u64, n: u32, i: u32) -> WeightDistribution {
    let units = q.pow(n) - 1;
    let mid: u64 = (i..n).map(|j| q.pow(j)).sum();
    let mut d = WeightDistribution::new();
    *d.entry(n - i).or_insert(0) += units;
    *d.entry(n - 1).or_insert(0) += units * mid;
    *d.entry(n).or_insert(0) += units * (q.pow(n) - mid);
    d
}

/// i if the distribution has q^n − 1 words of weight n − i and all others of weight n − 1 or n.
pub fn club_index_from_distribution(dist: &WeightDistribution, q: u64, n: u32) -> Option<u32> {
    let units = q.pow(n) - 1;
    let low: Vec<(&u32, &u64)> = dist.iter().filter(|(&w, _)| w < n - 1).collect();
    match low[..] {
        [(&w, &c)] if c == units && w >= 1 => Some(n - w),
        _ => None,
    }
}

pub fn iclub_code(recipe: &ClubRecipe) -> Result<(RankCode, WeightDistribution)> {
    let f = recipe.ctx();
    let n = f.n();
    if recipe.subspace.dim() != n {
        return Err(Error::pre("rank-n", format!("rank {} ≠ n", recipe.subspace.dim())));
    }
    let code = code_from_system(&recipe.subspace, None)?;
    let dist = weight_distribution(&code)?;
    let i = recipe.predicted_index;
    let expect = iclub_distribution(f.q() as u64, n, i);
    if dist != expect {
        return Err(Error::claim(
            "three-weight-distribution",
            format!("{} gives {dist:?}, expected {expect:?}", recipe.family),
        ));
    }
    Ok((code, dist))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockingCodeReport {
    pub code: RankCode,
    pub distribution: WeightDistribution,
    pub weight_one: u64,
    pub weight_two: u64,
    /// Some line meets W in a 2-dimensional F_q-space spanning it.
    pub q_nondegenerate: bool,
}

/// The [n+1, 3, 1] code of a Rédei blocking set W: columns are an F_q-basis of W ∩ (X_2 = 0)
/// followed by a vector of W off that plane ((0,0,1) when it lies in W).
pub fn blocking_code(w: &QSubspace) -> Result<BlockingCodeReport> {
    let f = w.ctx().clone();
    let n = f.n();
    if w.arity() != 3 || w.dim() != n + 1 {
        return Err(Error::pre("rank-n-plus-1", format!("need rank n + 1 in F_(q^n)^3, got {}", w.dim())));
    }
    let plane = QSubspace::field_line(&f, &[Felt::ONE, Felt::ZERO, Felt::ZERO])?
        .sum(&QSubspace::field_line(&f, &[Felt::ZERO, Felt::ONE, Felt::ZERO])?)?;
    let base = w.intersect(&plane)?;
    if base.dim() != n {
        return Err(Error::pre("redei-line", "W meets X_2 = 0 in dimension ≠ n"));
    }
    let mut cols = base.q_basis();
    let e3 = vec![Felt::ZERO, Felt::ZERO, Felt::ONE];
    let last = if w.contains(&e3)? {
        e3
    } else {
        w.q_basis().into_iter().find(|v| !base.contains(v).expect("arity 3")).expect("dim n + 1")
    };
    cols.push(last);
    let code = code_from_system(w, Some(&cols))?;
    let distribution = weight_distribution(&code)?;
    let prof = line_profile(w, None, 0, 0)?;
    let q = f.q() as u64;
    Ok(BlockingCodeReport {
        weight_one: distribution.get(&1).copied().unwrap_or(0),
        weight_two: distribution.get(&2).copied().unwrap_or(0),
        q_nondegenerate: prof.joint.contains_key(&(2, q + 1)),
        code,
        distribution,
    })
}

/// A system classifies as an i-club exactly when its code has the three-weight distribution.
pub fn check_club_code_converse(u: &QSubspace) -> Result<bool> {
    let f = u.ctx();
    let code = code_from_system(u, None)?;
    let dist = weight_distribution(&code)?;
    let from_code = club_index_from_distribution(&dist, f.q() as u64, f.n());
    let tag = linear_set(u)?.tag;
    let from_set = match tag {
        ClubTag::IClub(i) => Some(i),
        _ => None,
    };
    if let Some(i) = from_code {
        if linear_set(u)?.size() != club_size(f.q() as u64, f.n(), i) {
            return Ok(false);
        }
    }
    Ok(from_code == from_set)
}
