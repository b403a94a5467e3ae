//! Exact arithmetic in F_{q^n} = F_{p^{hn}}.
//!
//! Every element lives in F_p[x]/(modulus) for a single modulus of degree h·n.
//! An element is stored as the base-p integer whose digits are its coefficients
//! (constant term least significant); that integer is also the deterministic
//! enumeration order used throughout the crate. Multiplication goes through
//! discrete log tables over a primitive element, and addition in odd
//! characteristic through a Zech logarithm table, so both are O(1).
//!
//! Intermediate fields F_{q^t} (t | n) are not modelled as separate types: they
//! are the fixed points of x ↦ x^{q^t}.

mod dual;
pub(crate) mod fpoly;
mod moduli;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::FpRref;

pub use dual::{
    dual_basis, dual_basis_binomial, dual_basis_polynomial, dual_basis_trinomial,
    dual_basis_with_route, DualRoute,
};

/// Upper bound on the field size handled at desk scale.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

const NO_LOG: u32 = u32::MAX;

/// An element of F_{q^n}, encoded as a base-p integer of its coefficient vector.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Felt(pub u32);

impl Felt {
    pub const ZERO: Felt = Felt(0);
    pub const ONE: Felt = Felt(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn index(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Felt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Parameters and tables of one field F_{q^n}, q = p^h.
pub struct FieldCtx {
    p: u32,
    h: u32,
    n: u32,
    degree: u32,
    order: u32,
    modulus: Vec<u32>,
    // exp has length 2·(order-1) so that sums of two logs index it directly
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
    primitive: Felt,
    fq_gen: Felt,
    minus_one_log: u32,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("h", &self.h)
            .field("n", &self.n)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.h == other.h && self.n == other.n && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

impl FieldCtx {
    /// F_{q^n} with q = p^h and the built-in modulus for degree h·n.
    pub fn new(p: u32, h: u32, n: u32) -> Result<Arc<FieldCtx>> {
        Self::validate_params(p, h, n)?;
        let degree = h * n;
        let modulus = match moduli::lookup(p, degree) {
            Some(m) => m.to_vec(),
            None => fpoly::first_primitive(p, degree),
        };
        Self::build(p, h, n, modulus)
    }

    /// F_{q^n} over an explicit modulus (monic, constant term first), checked for irreducibility.
    pub fn with_modulus(p: u32, h: u32, n: u32, modulus: Vec<u32>) -> Result<Arc<FieldCtx>> {
        Self::validate_params(p, h, n)?;
        let degree = h * n;
        if modulus.len() as u32 != degree + 1 {
            return Err(Error::Param(format!(
                "modulus must have {} coefficients (degree {}), got {}",
                degree + 1,
                degree,
                modulus.len()
            )));
        }
        if let Some(c) = modulus.iter().find(|&&c| c >= p) {
            return Err(Error::Param(format!("modulus coefficient {c} is not reduced mod {p}")));
        }
        if modulus[degree as usize] != 1 {
            return Err(Error::Param("modulus must be monic".into()));
        }
        if let Some(detail) = fpoly::irreducibility_failure(&modulus, p) {
            return Err(Error::Reducible { p, detail });
        }
        Self::build(p, h, n, modulus)
    }

    fn validate_params(p: u32, h: u32, n: u32) -> Result<()> {
        if !fpoly::is_prime(p) || p > 251 {
            return Err(Error::Param(format!("p = {p} must be a prime below 256")));
        }
        if h == 0 || n == 0 {
            return Err(Error::Param("h and n must be positive".into()));
        }
        let degree = h * n;
        if (p as u64).checked_pow(degree).map_or(true, |o| o > MAX_FIELD_ORDER) {
            return Err(Error::FieldTooLarge { p, degree });
        }
        Ok(())
    }

    fn build(p: u32, h: u32, n: u32, modulus: Vec<u32>) -> Result<Arc<FieldCtx>> {
        let degree = h * n;
        let order = p.pow(degree);
        let group = (order - 1) as usize;
        let deg = degree as usize;

        let to_poly = |idx: u32| -> Vec<u32> {
            let mut c = idx;
            (0..deg)
                .map(|_| {
                    let d = c % p;
                    c /= p;
                    d
                })
                .collect()
        };
        let from_poly = |v: &[u32]| -> u32 { v.iter().rev().fold(0u32, |acc, &d| acc * p + d) };

        let generator_poly: Vec<u32> = if fpoly::x_is_primitive(&modulus, p) {
            fpoly::rem(&[0, 1], &modulus, p)
        } else {
            let cofactors: Vec<u64> = fpoly::prime_factors((order - 1) as u64)
                .into_iter()
                .map(|r| (order - 1) as u64 / r)
                .collect();
            (2..order)
                .map(to_poly)
                .find(|g| {
                    cofactors
                        .iter()
                        .all(|&e| fpoly::pow_poly_mod(g, e, &modulus, p) != vec![1])
                })
                .ok_or_else(|| Error::Param("no primitive element found".into()))?
        };
        let mut gp = generator_poly.clone();
        gp.resize(deg, 0);
        let primitive = Felt(from_poly(&gp));

        let mut exp = vec![0u32; 2 * group.max(1)];
        let mut log = vec![NO_LOG; order as usize];
        let mut cur = vec![0u32; deg];
        cur[0] = 1;
        for k in 0..group {
            let idx = from_poly(&cur);
            exp[k] = idx;
            log[idx as usize] = k as u32;
            let mut next = fpoly::mul_mod(&cur, &generator_poly, &modulus, p);
            next.resize(deg, 0);
            cur = next;
        }
        for k in group..exp.len() {
            exp[k] = exp[k - group];
        }

        let zech = if p == 2 {
            Vec::new()
        } else {
            (0..group)
                .map(|k| {
                    let mut v = to_poly(exp[k]);
                    v[0] = (v[0] + 1) % p;
                    let idx = from_poly(&v);
                    if idx == 0 {
                        NO_LOG
                    } else {
                        log[idx as usize]
                    }
                })
                .collect()
        };

        let q = p.pow(h);
        let mut ctx = FieldCtx {
            p,
            h,
            n,
            degree,
            order,
            modulus,
            exp,
            log,
            zech,
            primitive,
            fq_gen: Felt::ONE,
            minus_one_log: if p == 2 { 0 } else { (group / 2) as u32 },
        };
        ctx.fq_gen = ctx.pow(primitive, ((order - 1) / (q - 1)) as u64);
        Ok(Arc::new(ctx))
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.p.pow(self.h)
    }

    /// Degree h·n of the field over F_p.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Number of elements p^{hn}.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn primitive(&self) -> Felt {
        self.primitive
    }

    /// A primitive element of the subfield F_q; its first h powers are an F_p-basis of F_q.
    pub fn fq_generator(&self) -> Felt {
        self.fq_gen
    }

    /// q^t as an integer.
    pub fn q_pow(&self, t: u32) -> u64 {
        (self.q() as u64).pow(t)
    }

    pub fn elements(&self) -> impl Iterator<Item = Felt> {
        (0..self.order).map(Felt)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = Felt> {
        (1..self.order).map(Felt)
    }

    /// The F_p element c, embedded as a constant.
    pub fn scalar(&self, c: u32) -> Felt {
        Felt(c % self.p)
    }

    pub fn check_divisor(&self, t: u32) -> Result<()> {
        if t == 0 || self.n % t != 0 {
            return Err(Error::Param(format!("t = {t} does not divide n = {}", self.n)));
        }
        Ok(())
    }

    // ---- arithmetic ----

    #[inline]
    pub fn add(&self, a: Felt, b: Felt) -> Felt {
        if self.p == 2 {
            return Felt(a.0 ^ b.0);
        }
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        let group = self.order - 1;
        let la = self.log[a.0 as usize];
        let lb = self.log[b.0 as usize];
        let d = if lb >= la { lb - la } else { lb + group - la };
        let z = self.zech[d as usize];
        if z == NO_LOG {
            Felt::ZERO
        } else {
            Felt(self.exp[(la + z) as usize])
        }
    }

    #[inline]
    pub fn neg(&self, a: Felt) -> Felt {
        if self.p == 2 || a.0 == 0 {
            return a;
        }
        Felt(self.exp[(self.log[a.0 as usize] + self.minus_one_log) as usize])
    }

    #[inline]
    pub fn sub(&self, a: Felt, b: Felt) -> Felt {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Felt, b: Felt) -> Felt {
        if a.0 == 0 || b.0 == 0 {
            return Felt::ZERO;
        }
        Felt(self.exp[(self.log[a.0 as usize] + self.log[b.0 as usize]) as usize])
    }

    /// Multiplicative inverse; panics on zero.
    #[inline]
    pub fn inv(&self, a: Felt) -> Felt {
        assert!(!a.is_zero(), "inverse of zero");
        let group = self.order - 1;
        let la = self.log[a.0 as usize];
        Felt(self.exp[((group - la) % group) as usize])
    }

    #[inline]
    pub fn div(&self, a: Felt, b: Felt) -> Felt {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: Felt, e: u64) -> Felt {
        if e == 0 {
            return Felt::ONE;
        }
        if a.is_zero() {
            return Felt::ZERO;
        }
        let group = (self.order - 1) as u64;
        let l = self.log[a.0 as usize] as u64 * (e % group) % group;
        Felt(self.exp[l as usize])
    }

    /// Discrete logarithm to the base of the primitive element.
    pub fn log(&self, a: Felt) -> Option<u32> {
        if a.is_zero() {
            None
        } else {
            Some(self.log[a.0 as usize])
        }
    }

    /// g^k for the primitive element g.
    pub fn exp(&self, k: u64) -> Felt {
        Felt(self.exp[(k % (self.order as u64 - 1)) as usize])
    }

    /// x ↦ x^{p^e}, the e-th power of the absolute Frobenius.
    pub fn frob_p(&self, a: Felt, e: u32) -> Felt {
        if a.is_zero() {
            return a;
        }
        let group = (self.order - 1) as u64;
        let mut m = 1u64;
        for _ in 0..(e % self.degree) {
            m = m * self.p as u64 % group.max(1);
        }
        let l = self.log[a.0 as usize] as u64 * m % group.max(1);
        Felt(self.exp[l as usize])
    }

    /// x ↦ x^{q^k}.
    pub fn frobenius(&self, a: Felt, k: u32) -> Felt {
        self.frob_p(a, (self.h * k) % self.degree)
    }

    pub fn sum<I: IntoIterator<Item = Felt>>(&self, it: I) -> Felt {
        it.into_iter().fold(Felt::ZERO, |acc, x| self.add(acc, x))
    }

    /// Evaluate a polynomial (coefficients constant term first) by Horner's rule.
    pub fn eval_poly(&self, coeffs: &[Felt], x: Felt) -> Felt {
        coeffs
            .iter()
            .rev()
            .fold(Felt::ZERO, |acc, &c| self.add(self.mul(acc, x), c))
    }

    // ---- coordinates over F_p ----

    pub fn digits(&self, a: Felt) -> Vec<u8> {
        let mut c = a.0;
        (0..self.degree)
            .map(|_| {
                let d = (c % self.p) as u8;
                c /= self.p;
                d
            })
            .collect()
    }

    pub(crate) fn write_digits(&self, a: Felt, out: &mut [u8]) {
        let mut c = a.0;
        for slot in out.iter_mut().take(self.degree as usize) {
            *slot = (c % self.p) as u8;
            c /= self.p;
        }
    }

    pub fn from_digits(&self, d: &[u8]) -> Felt {
        Felt(d.iter().rev().fold(0u32, |acc, &x| acc * self.p + x as u32))
    }

    /// Parse the base-p integer encoding of an element.
    pub fn element(&self, code: u32) -> Result<Felt> {
        if code >= self.order {
            return Err(Error::Param(format!(
                "element code {code} out of range for a field of order {}",
                self.order
            )));
        }
        Ok(Felt(code))
    }

    // ---- subfields and F_q-structure ----

    /// Tr_{q^n/q^t}(x) = Σ_{i < n/t} x^{q^{ti}}.
    pub fn trace(&self, x: Felt, t: u32) -> Result<Felt> {
        self.check_divisor(t)?;
        Ok(self.sum((0..self.n / t).map(|i| self.frobenius(x, t * i))))
    }

    /// N_{q^n/q^t}(x) = x^{(q^n-1)/(q^t-1)}.
    pub fn norm(&self, x: Felt, t: u32) -> Result<Felt> {
        self.check_divisor(t)?;
        let e = (self.order as u64 - 1) / (self.q_pow(t) - 1);
        Ok(if x.is_zero() { x } else { self.pow(x, e) })
    }

    pub fn is_in_subfield(&self, x: Felt, t: u32) -> bool {
        self.frobenius(x, t) == x
    }

    /// Smallest t | n with x^{q^t} = x.
    pub fn degree_over_base(&self, x: Felt) -> u32 {
        fpoly::divisors(self.n)
            .into_iter()
            .find(|&t| self.is_in_subfield(x, t))
            .unwrap_or(self.n)
    }

    /// All elements of F_{q^t}, in increasing code order.
    pub fn subfield_elements(&self, t: u32) -> Result<Vec<Felt>> {
        self.check_divisor(t)?;
        Ok(self.elements().filter(|&x| self.is_in_subfield(x, t)).collect())
    }

    /// A primitive element of F_{q^t}.
    pub fn subfield_generator(&self, t: u32) -> Result<Felt> {
        self.check_divisor(t)?;
        Ok(self.pow(
            self.primitive,
            (self.order as u64 - 1) / (self.q_pow(t) - 1),
        ))
    }

    /// An F_p-basis of F_{q^t}: the first h·t powers of a primitive element of F_{q^t}.
    pub fn subfield_fp_basis(&self, t: u32) -> Result<Vec<Felt>> {
        let beta = self.subfield_generator(t)?;
        Ok((0..self.h * t).map(|i| self.pow(beta, i as u64)).collect())
    }

    /// An F_q-basis of F_{q^t}.
    pub fn subfield_q_basis(&self, t: u32) -> Result<Vec<Felt>> {
        let beta = self.subfield_generator(t)?;
        // 1, β, ..., β^{t-1} spans F_q(β) = F_{q^t} over F_q
        Ok((0..t).map(|i| self.pow(beta, i as u64)).collect())
    }

    /// Minimal polynomial of λ over F_{q^t}, monic, constant term first.
    pub fn min_poly(&self, lambda: Felt, t: u32) -> Result<Vec<Felt>> {
        self.check_divisor(t)?;
        let mut conjugates = vec![lambda];
        let mut cur = self.frobenius(lambda, t);
        while cur != lambda {
            conjugates.push(cur);
            cur = self.frobenius(cur, t);
        }
        let mut poly = vec![Felt::ONE];
        for c in conjugates {
            // poly ← poly · (X − c)
            let mut next = vec![Felt::ZERO; poly.len() + 1];
            for (i, &a) in poly.iter().enumerate() {
                next[i + 1] = self.add(next[i + 1], a);
                next[i] = self.sub(next[i], self.mul(a, c));
            }
            poly = next;
        }
        Ok(poly)
    }

    /// F_q-dimension of the F_q-span of the given elements.
    pub fn fq_rank(&self, elems: &[Felt]) -> usize {
        if self.p == 2 {
            let mut basis: Vec<u32> = Vec::with_capacity(self.degree as usize);
            for &e in elems {
                let mut m = e;
                for _ in 0..self.h {
                    let mut v = m.0;
                    for &b in &basis {
                        v = v.min(v ^ b);
                    }
                    if v != 0 {
                        // keep leading bits in decreasing order so the min-reduction is exact
                        let at = basis.partition_point(|&b| b > v);
                        basis.insert(at, v);
                    }
                    m = self.mul(m, self.fq_gen);
                }
            }
            return basis.len() / self.h as usize;
        }
        let mut rref = FpRref::new(self.p, self.degree as usize);
        for &e in elems {
            let mut m = e;
            for _ in 0..self.h {
                rref.insert(self.digits(m));
                m = self.mul(m, self.fq_gen);
            }
        }
        rref.rank() / self.h as usize
    }
}
