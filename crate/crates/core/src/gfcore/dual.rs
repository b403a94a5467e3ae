//! Trace-dual bases of F_{q^n} over F_q.
//!
//! The generic route inverts the Gram matrix [Tr(ξ_i ξ_j)]. For a polynomial
//! basis (1, λ, ..., λ^{n-1}) the dual can be read off the minimal polynomial of
//! λ, with simpler shapes when that polynomial is a binomial x^n − d or a
//! trinomial x^n − c·x^k − 1.

use super::{Felt, FieldCtx};
use crate::error::{Error, Result};
use crate::linalg::field_inverse;

/// Which computation produced a dual basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualRoute {
    Gram,
    Polynomial,
    Binomial,
    Trinomial,
}

fn check_basis(f: &FieldCtx, basis: &[Felt]) -> Result<()> {
    let n = f.n() as usize;
    if basis.len() != n || f.fq_rank(basis) != n {
        return Err(Error::Dimension(format!(
            "expected an F_q-basis of {n} elements, got {} elements of rank {}",
            basis.len(),
            f.fq_rank(basis)
        )));
    }
    Ok(())
}

/// Dual basis by inverting the trace Gram matrix.
pub fn dual_basis(f: &FieldCtx, basis: &[Felt]) -> Result<Vec<Felt>> {
    check_basis(f, basis)?;
    let n = basis.len();
    let gram: Vec<Vec<Felt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| f.trace(f.mul(basis[i], basis[j]), 1).expect("1 divides n"))
                .collect()
        })
        .collect();
    let inv = field_inverse(f, &gram)?;
    Ok((0..n)
        .map(|j| f.sum((0..n).map(|k| f.mul(inv[k][j], basis[k]))))
        .collect())
}

fn polynomial_basis(f: &FieldCtx, lambda: Felt) -> Result<Vec<Felt>> {
    let basis: Vec<Felt> = (0..f.n()).map(|i| f.pow(lambda, i as u64)).collect();
    check_basis(f, &basis)?;
    Ok(basis)
}

/// Closed form for the dual of (1, λ, ..., λ^{n-1}): δ^{-1}·γ_i with δ = f'(λ)
/// and γ_i = Σ_{j=1}^{n-i} λ^{j-1} a_{i+j}, where f = Σ a_k x^k is the minimal polynomial.
pub fn dual_basis_polynomial(f: &FieldCtx, lambda: Felt) -> Result<Vec<Felt>> {
    polynomial_basis(f, lambda)?;
    let a = f.min_poly(lambda, 1)?;
    let n = f.n() as usize;
    let delta = f.sum(
        (1..=n).map(|k| f.mul(f.scalar(k as u32), f.mul(a[k], f.pow(lambda, k as u64 - 1)))),
    );
    let dinv = f.inv(delta);
    Ok((0..n)
        .map(|i| {
            let gamma = f.sum((1..=n - i).map(|j| f.mul(f.pow(lambda, j as u64 - 1), a[i + j])));
            f.mul(dinv, gamma)
        })
        .collect())
}

/// Dual of (1, λ, ..., λ^{n-1}) when λ^n = d: (λ^n, λ^{n-1}, ..., λ)/(n·d).
///
/// `Ok(None)` when the minimal polynomial is not a binomial or p divides n·d.
pub fn dual_basis_binomial(f: &FieldCtx, lambda: Felt) -> Result<Option<Vec<Felt>>> {
    polynomial_basis(f, lambda)?;
    let a = f.min_poly(lambda, 1)?;
    let n = f.n() as usize;
    if a[1..n].iter().any(|c| !c.is_zero()) {
        return Ok(None);
    }
    let d = f.neg(a[0]);
    let nd = f.mul(f.scalar(f.n()), d);
    if nd.is_zero() {
        return Ok(None);
    }
    let s = f.inv(nd);
    let mut out = vec![f.mul(f.pow(lambda, n as u64), s)];
    out.extend((1..n).map(|i| f.mul(f.pow(lambda, (n - i) as u64), s)));
    Ok(Some(out))
}

/// Dual of (1, λ, ..., λ^{n-1}) when λ^n = c·λ^k + 1 with c ≠ 0, 0 < k < n.
///
/// `Ok(None)` when the minimal polynomial has another shape.
pub fn dual_basis_trinomial(f: &FieldCtx, lambda: Felt) -> Result<Option<Vec<Felt>>> {
    polynomial_basis(f, lambda)?;
    let a = f.min_poly(lambda, 1)?;
    let n = f.n() as usize;
    if a[0] != f.neg(Felt::ONE) {
        return Ok(None);
    }
    let middle: Vec<usize> = (1..n).filter(|&i| !a[i].is_zero()).collect();
    let [k] = middle[..] else {
        return Ok(None);
    };
    let c = f.neg(a[k]);
    let num = f.sub(
        f.mul(f.scalar(n as u32), f.pow(lambda, n as u64 - 1)),
        f.mul(f.mul(c, f.scalar(k as u32)), f.pow(lambda, k as u64 - 1)),
    );
    let den = f.sub(f.pow(lambda, (n - k) as u64), c);
    let dinv = f.div(den, num);
    let mut out: Vec<Felt> = (0..k).map(|j| f.mul(dinv, f.pow(lambda, (k - 1 - j) as u64))).collect();
    out.extend((k..n).map(|j| f.mul(dinv, f.pow(lambda, (n - 1 - (j - k)) as u64))));
    Ok(Some(out))
}

/// Dual basis with the cheapest applicable route. A basis of the form
/// (1, λ, ..., λ^{n-1}) uses the binomial or trinomial shortcut when possible,
/// then the minimal-polynomial closed form; anything else goes through the Gram matrix.
pub fn dual_basis_with_route(f: &FieldCtx, basis: &[Felt]) -> Result<(Vec<Felt>, DualRoute)> {
    check_basis(f, basis)?;
    let lambda = basis.get(1).copied().unwrap_or(Felt::ONE);
    let is_polynomial = basis[0] == Felt::ONE
        && basis
            .iter()
            .enumerate()
            .all(|(i, &x)| x == f.pow(lambda, i as u64));
    if is_polynomial && f.n() >= 2 {
        if let Some(d) = dual_basis_binomial(f, lambda)? {
            return Ok((d, DualRoute::Binomial));
        }
        if let Some(d) = dual_basis_trinomial(f, lambda)? {
            return Ok((d, DualRoute::Trinomial));
        }
        return Ok((dual_basis_polynomial(f, lambda)?, DualRoute::Polynomial));
    }
    Ok((dual_basis(f, basis)?, DualRoute::Gram))
}
