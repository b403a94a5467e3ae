//! q-polynomials Σ a_i x^{q^i} acting on a subfield F_{q^e} of the ambient field.
//!
//! A `LinPoly` carries its own extension degree e (a divisor of n): coefficients
//! live in F_{q^e}, indices run over 0..e and the map is an F_q-linear
//! endomorphism of F_{q^e}. Most callers use e = n.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gfcore::{Felt, FieldCtx};
use crate::linalg::FpRref;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinPoly {
    ctx: Arc<FieldCtx>,
    ext: u32,
    coeffs: Vec<Felt>,
}

impl LinPoly {
    /// f = Σ coeffs[i]·x^{q^i} on the full field F_{q^n}; indices ≥ n wrap around.
    pub fn new(ctx: &Arc<FieldCtx>, coeffs: &[Felt]) -> LinPoly {
        let n = ctx.n();
        Self::over(ctx, n, coeffs).expect("every element lies in F_{q^n}")
    }

    /// f over F_{q^ext}; coefficients must lie in F_{q^ext}.
    pub fn over(ctx: &Arc<FieldCtx>, ext: u32, coeffs: &[Felt]) -> Result<LinPoly> {
        ctx.check_divisor(ext)?;
        let mut c = vec![Felt::ZERO; ext as usize];
        for (i, &a) in coeffs.iter().enumerate() {
            if !ctx.is_in_subfield(a, ext) {
                return Err(Error::Param(format!(
                    "coefficient {a} of x^(q^{i}) is not in F_(q^{ext})"
                )));
            }
            let j = i % ext as usize;
            c[j] = ctx.add(c[j], a);
        }
        Ok(LinPoly {
            ctx: ctx.clone(),
            ext,
            coeffs: c,
        })
    }

    pub fn zero(ctx: &Arc<FieldCtx>, ext: u32) -> Result<LinPoly> {
        Self::over(ctx, ext, &[])
    }

    /// α·x^{q^k}.
    pub fn monomial(ctx: &Arc<FieldCtx>, ext: u32, alpha: Felt, k: u32) -> Result<LinPoly> {
        let mut c = vec![Felt::ZERO; k as usize + 1];
        c[k as usize] = alpha;
        Self::over(ctx, ext, &c)
    }

    pub fn identity(ctx: &Arc<FieldCtx>) -> LinPoly {
        Self::new(ctx, &[Felt::ONE])
    }

    /// Tr_{q^n/q^t}(x) as a polynomial on F_{q^n}.
    pub fn trace(ctx: &Arc<FieldCtx>, t: u32) -> Result<LinPoly> {
        ctx.check_divisor(t)?;
        let mut c = vec![Felt::ZERO; ctx.n() as usize];
        for i in 0..ctx.n() / t {
            c[(i * t) as usize] = Felt::ONE;
        }
        Ok(Self::new(ctx, &c))
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn ext(&self) -> u32 {
        self.ext
    }

    pub fn coeffs(&self) -> &[Felt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Largest i with a_i ≠ 0.
    pub fn q_degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    fn same_ring(&self, other: &LinPoly) -> Result<()> {
        if *self.ctx != *other.ctx {
            return Err(Error::FieldMismatch);
        }
        if self.ext != other.ext {
            return Err(Error::Param(format!(
                "polynomials over F_(q^{}) and F_(q^{}) cannot be combined",
                self.ext, other.ext
            )));
        }
        Ok(())
    }

    pub fn eval(&self, x: Felt) -> Felt {
        let f = &self.ctx;
        let mut acc = Felt::ZERO;
        let mut xi = x;
        for &a in &self.coeffs {
            acc = f.add(acc, f.mul(a, xi));
            xi = f.frobenius(xi, 1);
        }
        acc
    }

    /// f ∘ g: c_k = Σ_{i+j ≡ k} a_i·b_j^{q^i}.
    pub fn compose(&self, g: &LinPoly) -> Result<LinPoly> {
        self.same_ring(g)?;
        let f = &self.ctx;
        let e = self.ext as usize;
        let mut c = vec![Felt::ZERO; e];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in g.coeffs.iter().enumerate() {
                let k = (i + j) % e;
                c[k] = f.add(c[k], f.mul(a, f.frobenius(b, i as u32)));
            }
        }
        Ok(LinPoly {
            ctx: self.ctx.clone(),
            ext: self.ext,
            coeffs: c,
        })
    }

    pub fn add(&self, g: &LinPoly) -> Result<LinPoly> {
        self.same_ring(g)?;
        let f = &self.ctx;
        Ok(LinPoly {
            ctx: self.ctx.clone(),
            ext: self.ext,
            coeffs: self.coeffs.iter().zip(&g.coeffs).map(|(&a, &b)| f.add(a, b)).collect(),
        })
    }

    pub fn sub(&self, g: &LinPoly) -> Result<LinPoly> {
        self.same_ring(g)?;
        let f = &self.ctx;
        Ok(LinPoly {
            ctx: self.ctx.clone(),
            ext: self.ext,
            coeffs: self.coeffs.iter().zip(&g.coeffs).map(|(&a, &b)| f.sub(a, b)).collect(),
        })
    }

    /// Multiply every coefficient by α on the left, giving α·f(x).
    pub fn scale(&self, alpha: Felt) -> Result<LinPoly> {
        Self::over(
            &self.ctx,
            self.ext,
            &self.coeffs.iter().map(|&a| self.ctx.mul(alpha, a)).collect::<Vec<_>>(),
        )
    }

    /// f(x) − m·x.
    pub fn minus_mx(&self, m: Felt) -> Result<LinPoly> {
        if !self.ctx.is_in_subfield(m, self.ext) {
            return Err(Error::Param(format!("{m} is not in F_(q^{})", self.ext)));
        }
        let mut c = self.coeffs.clone();
        c[0] = self.ctx.sub(c[0], m);
        Ok(LinPoly {
            ctx: self.ctx.clone(),
            ext: self.ext,
            coeffs: c,
        })
    }

    /// The domain F_{q^ext} in deterministic order.
    pub fn domain(&self) -> Vec<Felt> {
        self.ctx.subfield_elements(self.ext).expect("ext divides n")
    }

    /// F_p-rank of f as a map on F_{q^ext}.
    fn fp_rank(&self) -> usize {
        let f = &self.ctx;
        let basis = f.subfield_fp_basis(self.ext).expect("ext divides n");
        let mut r = FpRref::new(f.p(), f.degree() as usize);
        for b in basis {
            r.insert(f.digits(self.eval(b)));
        }
        r.rank()
    }

    /// dim_{F_q} ker f on F_{q^ext}.
    pub fn kernel_dim(&self) -> u32 {
        let h = self.ctx.h();
        (h * self.ext - self.fp_rank() as u32) / h
    }

    pub fn is_invertible(&self) -> bool {
        self.kernel_dim() == 0
    }

    /// Multiplicities of f(α)/α over α ∈ F_{q^ext}^*.
    pub fn value_spectrum(&self) -> BTreeMap<Felt, u64> {
        let f = &self.ctx;
        let mut m = BTreeMap::new();
        for x in self.domain().into_iter().filter(|x| !x.is_zero()) {
            *m.entry(f.div(self.eval(x), x)).or_insert(0) += 1;
        }
        m
    }

    /// dim ker(f − m·x) ≤ 1 for every m. Only values m = f(α)/α can have a nonzero kernel,
    /// so those are the ones tested.
    pub fn is_scattered(&self) -> bool {
        self.value_spectrum()
            .keys()
            .all(|&m| self.minus_mx(m).expect("value lies in the domain").kernel_dim() <= 1)
    }

    /// Index i ≥ 2 of the unique heavy value (multiplicity q^i − 1) when every other
    /// value has multiplicity q − 1.
    pub fn club_polynomial_index(&self) -> Option<u32> {
        let q = self.ctx.q() as u64;
        let mut heavy = None;
        for &count in self.value_spectrum().values() {
            if count == q - 1 {
                continue;
            }
            if heavy.is_some() {
                return None;
            }
            let w = weight_of_count(q, count)?;
            if w < 2 {
                return None;
            }
            heavy = Some(w);
        }
        heavy
    }

    /// Largest divisor i of ext such that a_j = 0 whenever i ∤ j.
    pub fn max_field_of_linearity(&self) -> Result<u32> {
        if self.is_zero() {
            return Err(Error::Undefined("the zero polynomial is linear over every subfield".into()));
        }
        Ok(crate::gfcore::fpoly::divisors(self.ext)
            .into_iter()
            .rev()
            .find(|&i| {
                self.coeffs
                    .iter()
                    .enumerate()
                    .all(|(j, c)| c.is_zero() || j as u32 % i == 0)
            })
            .unwrap_or(1))
    }

    /// Render as comma-separated coefficient codes.
    pub fn encode(&self) -> String {
        self.coeffs.iter().map(|c| c.0.to_string()).collect::<Vec<_>>().join(",")
    }
}

/// w with q^w − 1 = count, if any.
pub(crate) fn weight_of_count(q: u64, count: u64) -> Option<u32> {
    let mut w = 0;
    let mut qw = 1u64;
    while qw - 1 < count {
        qw *= q;
        w += 1;
    }
    (qw - 1 == count).then_some(w)
}

/// Scatteredness of a0·x + a1·x^q + a2·x^{q^2} over F_{q^3} without enumeration:
/// scattered iff a1 = 0 ≠ a2, or a1 ≠ 0 and N_{q^3/q}(a2/a1) ≠ 1.
pub fn is_scattered_t3_closed_form(ctx: &FieldCtx, a0: Felt, a1: Felt, a2: Felt) -> Result<bool> {
    ctx.check_divisor(3)?;
    for c in [a0, a1, a2] {
        if !ctx.is_in_subfield(c, 3) {
            return Err(Error::Param(format!("{c} is not in F_(q^3)")));
        }
    }
    if a1.is_zero() {
        return Ok(!a2.is_zero());
    }
    let r = ctx.div(a2, a1);
    let norm = ctx.mul(r, ctx.mul(ctx.frobenius(r, 1), ctx.frobenius(r, 2)));
    Ok(norm != Felt::ONE)
}
