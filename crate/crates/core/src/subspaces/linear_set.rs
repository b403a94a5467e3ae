use std::collections::{BTreeMap, HashMap};
use std::fmt;

use super::{ProjPoint, QSubspace};
use crate::error::{Error, Result};
use crate::gfcore::{Felt, FieldCtx};
use crate::linpoly::weight_of_count;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClubTag {
    Scattered,
    IClub(u32),
    Other,
}

impl fmt::Display for ClubTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClubTag::Scattered => write!(f, "scattered"),
            ClubTag::IClub(i) => write!(f, "{i}-club"),
            ClubTag::Other => write!(f, "other"),
        }
    }
}

/// Points of L_U with their weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSetReport {
    /// Points with weight ≥ 1, sorted by normalized coordinates.
    pub points: Vec<(ProjPoint, u32)>,
    /// weight → number of points of that weight.
    pub spectrum: BTreeMap<u32, u64>,
    pub rank: u32,
    pub tag: ClubTag,
}

impl LinearSetReport {
    pub fn size(&self) -> u64 {
        self.points.len() as u64
    }

    /// The points of weight ≥ 2.
    pub fn heavy_points(&self) -> Vec<(ProjPoint, u32)> {
        self.points.iter().filter(|(_, w)| *w >= 2).cloned().collect()
    }

    pub fn weight_of(&self, p: &ProjPoint) -> u32 {
        self.points
            .binary_search_by(|(x, _)| x.cmp(p))
            .map(|i| self.points[i].1)
            .unwrap_or(0)
    }

    pub fn points_of_weight(&self, w: u32) -> Vec<ProjPoint> {
        self.points.iter().filter(|(_, x)| *x == w).map(|(p, _)| p.clone()).collect()
    }
}

/// q^{w-1} + ... + q + 1.
pub(crate) fn theta(q: u64, w: u32) -> u64 {
    (0..w).map(|i| q.pow(i)).sum()
}

/// Key of a normalized vector; lexicographic order of coordinates equals key order.
fn point_key(f: &FieldCtx, v: &[Felt]) -> Option<u64> {
    let lead = v.iter().copied().find(|x| !x.is_zero())?;
    let inv = f.inv(lead);
    let mut key = 0u64;
    for &x in v {
        key = (key << 21) | f.mul(inv, x).0 as u64;
    }
    Some(key)
}

fn key_to_point(k: usize, key: u64) -> ProjPoint {
    ProjPoint(
        (0..k)
            .map(|j| Felt(((key >> (21 * (k - 1 - j))) & ((1 << 21) - 1)) as u32))
            .collect(),
    )
}

/// Enumerate L_U by normalizing every nonzero vector of U. A point of weight w is hit
/// exactly q^w − 1 times, which gives its weight without any per-point rank computation.
pub fn linear_set(u: &QSubspace) -> Result<LinearSetReport> {
    let f = u.ctx().clone();
    let k = u.arity();
    if k < 2 {
        return Err(Error::Param("linear sets need arity 2 or 3".into()));
    }
    if u.is_zero() {
        return Err(Error::EmptySet);
    }
    let q = f.q() as u64;
    let flat = u.elements_flat();
    let mut counts: HashMap<u64, u64> = HashMap::new();
    for v in flat.chunks(k).skip(1) {
        let key = point_key(&f, v).expect("only the first element is zero");
        *counts.entry(key).or_insert(0) += 1;
    }
    let mut keys: Vec<(u64, u64)> = counts.into_iter().collect();
    keys.sort_unstable();
    let mut points = Vec::with_capacity(keys.len());
    let mut spectrum = BTreeMap::new();
    for (key, c) in keys {
        let w = weight_of_count(q, c)
            .ok_or_else(|| Error::claim("point-multiplicity", format!("{c} vectors on one point")))?;
        points.push((key_to_point(k, key), w));
        *spectrum.entry(w).or_insert(0u64) += 1;
    }
    let rank = u.dim();
    let report = LinearSetReport {
        tag: tag_of(&spectrum),
        points,
        spectrum,
        rank,
    };
    check_counting_identities(q, &report)?;
    Ok(report)
}

fn tag_of(spectrum: &BTreeMap<u32, u64>) -> ClubTag {
    let heavy: Vec<(&u32, &u64)> = spectrum.iter().filter(|(&w, _)| w >= 2).collect();
    match heavy[..] {
        [] => ClubTag::Scattered,
        [(&w, &1)] => ClubTag::IClub(w),
        _ => ClubTag::Other,
    }
}

fn check_counting_identities(q: u64, r: &LinearSetReport) -> Result<()> {
    let size = r.size();
    if size > theta(q, r.rank) {
        return Err(Error::claim("size-bound", format!("{size} points exceed (q^k-1)/(q-1)")));
    }
    if r.spectrum.values().sum::<u64>() != size {
        return Err(Error::claim("weight-count-sum", "N_i do not add up to the size"));
    }
    let weighted: u64 = r.spectrum.iter().map(|(&w, &c)| c * theta(q, w)).sum();
    if weighted != theta(q, r.rank) {
        return Err(Error::claim(
            "weighted-count-sum",
            format!("Σ N_i θ_i = {weighted}, expected {}", theta(q, r.rank)),
        ));
    }
    let mut ws: Vec<u32> = r.points.iter().map(|&(_, w)| w).collect();
    ws.sort_unstable_by(|a, b| b.cmp(a));
    let top = ws.first().copied().unwrap_or(0) + ws.get(1).copied().unwrap_or(0);
    if top > r.rank {
        return Err(Error::claim("weight-pair-bound", format!("two weights sum to {top} > rank {}", r.rank)));
    }
    Ok(())
}

/// w_{L_U}(P) = dim_{F_q}(U ∩ ⟨P⟩_{F_{q^n}}), by subspace intersection.
pub fn point_weight(u: &QSubspace, p: &ProjPoint) -> Result<u32> {
    let line = QSubspace::field_line(u.ctx(), p.coords())?;
    Ok(u.intersect(&line)?.dim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfcore::FieldCtx;
    use crate::subspaces::Vector;

    fn graph(f: &std::sync::Arc<FieldCtx>, g: impl Fn(Felt) -> Felt) -> QSubspace {
        let basis: Vec<Vector> = f
            .subfield_fp_basis(f.n())
            .unwrap()
            .into_iter()
            .map(|x| vec![x, g(x)])
            .collect();
        QSubspace::span(f, 2, &basis).unwrap()
    }

    #[test]
    fn trace_graph_is_a_club() {
        let f = FieldCtx::new(2, 1, 3).unwrap();
        let u = graph(&f, |x| f.trace(x, 1).unwrap());
        let r = linear_set(&u).unwrap();
        assert_eq!(r.size(), 5);
        assert_eq!(r.tag, ClubTag::IClub(2));
        assert_eq!(r.spectrum, BTreeMap::from([(1, 4), (2, 1)]));
        let heavy = ProjPoint(vec![Felt::ONE, Felt::ZERO]);
        assert_eq!(r.weight_of(&heavy), 2);
        for (p, w) in &r.points {
            assert_eq!(point_weight(&u, p).unwrap(), *w);
        }
    }

    #[test]
    fn single_vector() {
        let f = FieldCtx::new(3, 1, 2).unwrap();
        let u = QSubspace::span(&f, 2, &[vec![Felt::ONE, Felt::ZERO]]).unwrap();
        let r = linear_set(&u).unwrap();
        assert_eq!(r.points, vec![(ProjPoint(vec![Felt::ONE, Felt::ZERO]), 1)]);
        assert_eq!(r.tag, ClubTag::Scattered);
        assert!(matches!(linear_set(&QSubspace::zero(&f, 2).unwrap()), Err(Error::EmptySet)));
    }

    #[test]
    fn pseudoregulus_is_scattered() {
        for (p, n) in [(2, 4), (3, 3)] {
            let f = FieldCtx::new(p, 1, n).unwrap();
            let u = graph(&f, |x| f.frobenius(x, 1));
            let r = linear_set(&u).unwrap();
            let q = p as u64;
            assert_eq!(r.size(), (q.pow(n) - 1) / (q - 1));
            assert_eq!(r.tag, ClubTag::Scattered);
        }
    }

    #[test]
    fn rank_route_agrees_with_enumeration_on_every_point() {
        let f = FieldCtx::new(2, 1, 4).unwrap();
        let u = graph(&f, |x| f.add(f.frobenius(x, 2), x));
        let r = linear_set(&u).unwrap();
        for y in f.elements() {
            let p = ProjPoint(vec![Felt::ONE, y]);
            assert_eq!(point_weight(&u, &p).unwrap(), r.weight_of(&p));
        }
        let inf = ProjPoint(vec![Felt::ZERO, Felt::ONE]);
        assert_eq!(point_weight(&u, &inf).unwrap(), r.weight_of(&inf));
    }
}
