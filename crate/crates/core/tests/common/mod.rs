#![allow(dead_code)]

use std::sync::Arc;

use clubs::subspaces::{ProjPoint, QSubspace};
use clubs::{Felt, FieldCtx};
use rand::Rng;

/// The fields (q, n) every size-sensitive check runs on.
pub const SMALL_FIELDS: [(u32, u32); 7] = [(2, 3), (2, 4), (2, 5), (3, 3), (3, 4), (3, 5), (2, 6)];

pub fn field(q: u32, n: u32) -> Arc<FieldCtx> {
    let (p, h) = match q {
        4 => (2, 2),
        8 => (2, 3),
        9 => (3, 2),
        _ => (q, 1),
    };
    FieldCtx::new(p, h, n).expect("supported field")
}

pub fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n % d == 0).collect()
}

pub fn pow(q: u64, e: u32) -> u64 {
    q.pow(e)
}

/// q^{n−1} + ... + q^i + 1.
pub fn club_size(q: u64, n: u32, i: u32) -> u64 {
    (i..n).map(|k| q.pow(k)).sum::<u64>() + 1
}

pub fn random_elem<R: Rng>(f: &FieldCtx, rng: &mut R) -> Felt {
    f.element(rng.gen_range(0..f.order())).unwrap()
}

pub fn random_nonzero<R: Rng>(f: &FieldCtx, rng: &mut R) -> Felt {
    f.element(rng.gen_range(1..f.order())).unwrap()
}

pub fn random_outside_fq<R: Rng>(f: &FieldCtx, rng: &mut R) -> Felt {
    loop {
        let b = random_elem(f, rng);
        if !f.is_in_subfield(b, 1) {
            return b;
        }
    }
}

/// Random F_q-subspace of F_{q^n} of dimension `dim` containing all of `seed`.
pub fn random_subspace<R: Rng>(f: &Arc<FieldCtx>, dim: u32, seed: &[Felt], rng: &mut R) -> QSubspace {
    let mut gens = seed.to_vec();
    let mut s = QSubspace::span1(f, &gens);
    assert!(s.dim() <= dim);
    while s.dim() < dim {
        gens.push(random_nonzero(f, rng));
        s = QSubspace::span1(f, &gens);
        if s.dim() > dim {
            gens.pop();
            s = QSubspace::span1(f, &gens);
        }
    }
    s
}

/// Random F_{q^t}-subspace of F_q-dimension `t·k`.
pub fn random_closed_subspace<R: Rng>(f: &Arc<FieldCtx>, t: u32, k: u32, rng: &mut R) -> QSubspace {
    let sub = f.subfield_q_basis(t).unwrap();
    let mut gens: Vec<Felt> = Vec::new();
    let mut s = QSubspace::span1(f, &[]);
    while s.dim() < t * k {
        let x = random_nonzero(f, rng);
        let mut trial = gens.clone();
        trial.extend(sub.iter().map(|&y| f.mul(x, y)));
        let next = QSubspace::span1(f, &trial);
        if next.dim() <= t * k {
            gens = trial;
            s = next;
        }
    }
    s
}

/// ⟨(x, y)⟩ normalized.
pub fn point(f: &FieldCtx, x: Felt, y: Felt) -> ProjPoint {
    ProjPoint::from_vector(f, &[x, y]).expect("nonzero vector")
}

/// Brute-force F_q-span of all products of S and T.
pub fn product_span(f: &Arc<FieldCtx>, s: &QSubspace, t: &QSubspace) -> QSubspace {
    let mut prods = Vec::new();
    for x in s.q_basis1() {
        for y in t.q_basis1() {
            prods.push(f.mul(x, y));
        }
    }
    QSubspace::span1(f, &prods)
}
