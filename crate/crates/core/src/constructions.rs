//! Known families of clubs, as subspaces of F_{q^n}^2 and as q-polynomials.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gfcore::{dual_basis, dual_basis_polynomial, fpoly, Felt, FieldCtx};
use crate::linpoly::LinPoly;
use crate::subspaces::{linear_set, ClubTag, LinearSetReport, QSubspace, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    TraceTower,
    Lambda,
    ScatteredTrace,
    Canonical,
    LambdaPoly,
    ScatteredTracePoly,
    CanonicalPoly,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::TraceTower,
        Family::Lambda,
        Family::ScatteredTrace,
        Family::Canonical,
        Family::LambdaPoly,
        Family::ScatteredTracePoly,
        Family::CanonicalPoly,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::TraceTower => "trace-tower",
            Family::Lambda => "lambda",
            Family::ScatteredTrace => "scattered-trace",
            Family::Canonical => "canonical",
            Family::LambdaPoly => "lambda-poly",
            Family::ScatteredTracePoly => "scattered-trace-poly",
            Family::CanonicalPoly => "canonical-poly",
        }
    }

    pub fn parse(s: &str) -> Result<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Param(format!("unknown family `{s}`")))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A realized club with the index its construction predicts.
#[derive(Clone, Debug)]
pub struct ClubRecipe {
    pub family: Family,
    /// Human-readable parameter list, element codes in base-p encoding.
    pub params: Vec<(String, String)>,
    pub predicted_index: u32,
    pub subspace: QSubspace,
    pub poly: Option<LinPoly>,
}

impl ClubRecipe {
    pub fn ctx(&self) -> &Arc<FieldCtx> {
        self.subspace.ctx()
    }

    /// q^{n−1} + ... + q^i + 1.
    pub fn predicted_size(&self) -> u64 {
        club_size(self.ctx().q() as u64, self.ctx().n(), self.predicted_index)
    }

    /// Classify the realized subspace (and polynomial) and compare with the prediction.
    pub fn verify(&self) -> Result<LinearSetReport> {
        let r = linear_set(&self.subspace)?;
        let expected = match self.predicted_index {
            1 => ClubTag::Scattered,
            i => ClubTag::IClub(i),
        };
        if r.tag != expected || r.size() != self.predicted_size() {
            return Err(Error::claim(
                "recipe-index",
                format!(
                    "{} predicted a {}-club of size {}, found {} of size {}",
                    self.family,
                    self.predicted_index,
                    self.predicted_size(),
                    r.tag,
                    r.size()
                ),
            ));
        }
        if let Some(p) = &self.poly {
            let idx = match p.club_polynomial_index() {
                None if p.is_scattered() => Some(1),
                i => i,
            };
            if idx != Some(self.predicted_index) {
                return Err(Error::claim(
                    "recipe-polynomial-index",
                    format!("{} polynomial has index {idx:?}, predicted {}", self.family, self.predicted_index),
                ));
            }
        }
        Ok(r)
    }
}

pub fn club_size(q: u64, n: u32, i: u32) -> u64 {
    (i..n).map(|j| q.pow(j)).sum::<u64>() + 1
}

fn code(x: Felt) -> String {
    x.0.to_string()
}

/// U_f = {(x, f(x)) : x ∈ F_{q^n}}.
pub fn graph_subspace(f: &LinPoly) -> QSubspace {
    let ctx = f.ctx();
    let basis: Vec<Vector> = ctx
        .subfield_fp_basis(f.ext())
        .expect("ext divides n")
        .into_iter()
        .map(|x| vec![x, f.eval(x)])
        .collect();
    QSubspace::span(ctx, 2, &basis).expect("arity 2")
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// T(x) = Tr_{q^{ℓm}/q^m}(x^{q^s}) with n = ℓm and gcd(s, m) = 1; an m(ℓ−1)-club.
pub fn trace_tower_club(ctx: &Arc<FieldCtx>, m: u32, ell: u32, s: u32) -> Result<ClubRecipe> {
    if m == 0 || ell == 0 || m * ell != ctx.n() {
        return Err(Error::pre("n-equals-l-times-m", format!("l·m = {}·{} ≠ n = {}", ell, m, ctx.n())));
    }
    if gcd(s, m) != 1 {
        return Err(Error::pre("gcd-s-m-is-1", format!("gcd({s}, {m}) ≠ 1")));
    }
    if ell < 2 {
        return Err(Error::pre("l-at-least-2", "l = 1 gives x^(q^s), which is scattered"));
    }
    let n = ctx.n();
    let mut c = vec![Felt::ZERO; n as usize];
    for i in 0..ell {
        c[((s + m * i) % n) as usize] = Felt::ONE;
    }
    let poly = LinPoly::new(ctx, &c);
    Ok(ClubRecipe {
        family: Family::TraceTower,
        params: vec![("m".into(), m.to_string()), ("l".into(), ell.to_string()), ("s".into(), s.to_string())],
        predicted_index: m * (ell - 1),
        subspace: graph_subspace(&poly),
        poly: Some(poly),
    })
}

/// First element of degree n over F_q, in element order.
pub fn default_lambda(ctx: &FieldCtx) -> Felt {
    ctx.nonzero_elements()
        .find(|&x| ctx.degree_over_base(x) == ctx.n())
        .expect("F_{q^n} has elements of full degree")
}

fn check_full_degree(ctx: &FieldCtx, lambda: Felt) -> Result<()> {
    if ctx.degree_over_base(lambda) != ctx.n() {
        return Err(Error::pre(
            "lambda-degree-n",
            format!("{lambda} has degree {} < n = {}", ctx.degree_over_base(lambda), ctx.n()),
        ));
    }
    Ok(())
}

/// U_λ = {(t_1λ + ... + t_{n−1}λ^{n−1}, t_{n−1} + t_nλ)}, an (n−2)-club of rank n.
pub fn club_lambda(ctx: &Arc<FieldCtx>, lambda: Felt) -> Result<ClubRecipe> {
    check_full_degree(ctx, lambda)?;
    let n = ctx.n();
    if n < 3 {
        return Err(Error::pre("n-at-least-3", format!("n = {n}")));
    }
    Ok(ClubRecipe {
        family: Family::Lambda,
        params: vec![("lambda".into(), code(lambda))],
        predicted_index: n - 2,
        subspace: lambda_subspace(ctx, lambda),
        poly: None,
    })
}

pub(crate) fn lambda_subspace(ctx: &Arc<FieldCtx>, lambda: Felt) -> QSubspace {
    let n = ctx.n();
    let pw = |i: u32| ctx.pow(lambda, i as u64);
    let mut vs: Vec<Vector> = (1..n - 1).map(|i| vec![pw(i), Felt::ZERO]).collect();
    vs.push(vec![pw(n - 1), Felt::ONE]);
    vs.push(vec![Felt::ZERO, lambda]);
    QSubspace::span(ctx, 2, &vs).expect("arity 2")
}

/// First ω (element order) such that (1, ω, ..., ω^{r−1}) is an F_{q^t}-basis of F_{q^n}.
pub fn default_omega(ctx: &FieldCtx, t: u32) -> Result<Felt> {
    ctx.check_divisor(t)?;
    ctx.nonzero_elements()
        .find(|&w| is_tower_basis(ctx, t, w))
        .ok_or_else(|| Error::Param("no F_(q^t)-polynomial basis found".into()))
}

fn is_tower_basis(ctx: &FieldCtx, t: u32, omega: Felt) -> bool {
    let r = ctx.n() / t;
    let sub = ctx.subfield_q_basis(t).expect("t divides n");
    let mut elems = Vec::new();
    for i in 0..r {
        let wi = ctx.pow(omega, i as u64);
        elems.extend(sub.iter().map(|&b| ctx.mul(b, wi)));
    }
    ctx.fq_rank(&elems) == ctx.n() as usize
}

/// U_{a,b} = {(f(x_0) − a·x_0, b·x_0 + Σ_{i≥1} x_i ω^i) : x_i ∈ F_{q^t}} for f scattered on F_{q^t}.
pub fn club_scattered_trace(f: &LinPoly, a: Felt, b: Felt, omega: Felt) -> Result<ClubRecipe> {
    let ctx = f.ctx().clone();
    let t = f.ext();
    let n = ctx.n();
    let r = n / t;
    if t < 2 || r < 2 {
        return Err(Error::pre("r-and-t-above-1", format!("n = {n} = {r}·{t}")));
    }
    if !f.is_scattered() {
        return Err(Error::pre("f-scattered", "f is not scattered on F_(q^t)"));
    }
    if !ctx.is_in_subfield(a, t) || !ctx.is_in_subfield(b, t) {
        return Err(Error::pre("a-b-in-subfield", "a and b must lie in F_(q^t)"));
    }
    if b.is_zero() {
        return Err(Error::pre("b-nonzero", "b = 0"));
    }
    if !is_tower_basis(&ctx, t, omega) {
        return Err(Error::pre("omega-basis", format!("powers of {omega} are not an F_(q^t)-basis")));
    }
    let shifted = f.minus_mx(a)?;
    let predicted_index = if shifted.is_invertible() { t * (r - 1) } else { t * (r - 1) + 1 };
    let sub = ctx.subfield_q_basis(t)?;
    let mut vs: Vec<Vector> = sub.iter().map(|&x| vec![shifted.eval(x), ctx.mul(b, x)]).collect();
    for i in 1..r {
        let wi = ctx.pow(omega, i as u64);
        vs.extend(sub.iter().map(|&x| vec![Felt::ZERO, ctx.mul(x, wi)]));
    }
    Ok(ClubRecipe {
        family: Family::ScatteredTrace,
        params: vec![
            ("t".into(), t.to_string()),
            ("f".into(), f.encode()),
            ("a".into(), code(a)),
            ("b".into(), code(b)),
            ("omega".into(), code(omega)),
        ],
        predicted_index,
        subspace: QSubspace::span(&ctx, 2, &vs)?,
        poly: None,
    })
}

/// x^q on F_{q^t}, the default scattered polynomial.
pub fn pseudoregulus(ctx: &Arc<FieldCtx>, t: u32) -> Result<LinPoly> {
    LinPoly::monomial(ctx, t, Felt::ONE, 1)
}

/// Parameters of the canonical (n−2)-club form
/// {(s̄ + Σ_{i≤t−3} c x_i b^i + α + βa, α + βb)}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalParams {
    pub b: Felt,
    pub c: Felt,
    pub a: Felt,
    /// F_q-basis of S̄ (an F_{q^t}-subspace, possibly zero).
    pub sbar: Vec<Felt>,
}

impl CanonicalParams {
    /// S = S̄ ⊕ c⟨1, b, ..., b^{t−3}⟩.
    pub fn s(&self, ctx: &Arc<FieldCtx>) -> QSubspace {
        let t = ctx.degree_over_base(self.b);
        let mut gens = self.sbar.clone();
        gens.extend((0..t.saturating_sub(2)).map(|i| ctx.mul(self.c, ctx.pow(self.b, i as u64))));
        QSubspace::span1(ctx, &gens)
    }

    /// S̄ ⊕ c⟨1, b, ..., b^{t−2}⟩.
    pub fn extended(&self, ctx: &Arc<FieldCtx>) -> QSubspace {
        let t = ctx.degree_over_base(self.b);
        let mut gens = self.sbar.clone();
        gens.extend((0..t - 1).map(|i| ctx.mul(self.c, ctx.pow(self.b, i as u64))));
        QSubspace::span1(ctx, &gens)
    }
}

/// Default canonical parameters for a given t | n, t ≥ 2: b generates F_{q^t}, S̄ is spanned over
/// F_{q^t} by powers of the primitive element, 1 ∈ S, and a is the first element outside
/// S̄ ⊕ c⟨1, ..., b^{t−2}⟩ (or, with `a_inside`, the first element of it outside S).
pub fn default_canonical_params(ctx: &Arc<FieldCtx>, t: u32, a_inside: bool) -> Result<CanonicalParams> {
    let n = ctx.n();
    ctx.check_divisor(t)?;
    if t < 2 {
        return Err(Error::pre("t-at-least-2", "t = 1"));
    }
    let ell = n / t - 1;
    let b = ctx.subfield_generator(t)?;
    let g = ctx.primitive();
    let sub = ctx.subfield_q_basis(t)?;
    let span_t = |first: u32, count: u32| -> Vec<Felt> {
        (first..first + count)
            .flat_map(|i| sub.iter().map(move |&x| (x, i)))
            .map(|(x, i)| ctx.mul(x, ctx.pow(g, i as u64)))
            .collect()
    };
    let (sbar, c) = if t == 2 {
        (span_t(0, ell), ctx.pow(g, ell as u64))
    } else {
        (span_t(1, ell), Felt::ONE)
    };
    let mut params = CanonicalParams { b, c, a: Felt::ZERO, sbar };
    let ext = params.extended(ctx);
    let s = params.s(ctx);
    params.a = ctx
        .nonzero_elements()
        .find(|&x| if a_inside { ext.contains_elem(x) && !s.contains_elem(x) } else { !ext.contains_elem(x) })
        .ok_or_else(|| Error::Param("no admissible a".into()))?;
    Ok(params)
}

fn check_canonical(ctx: &Arc<FieldCtx>, p: &CanonicalParams) -> Result<u32> {
    let n = ctx.n();
    let t = ctx.degree_over_base(p.b);
    if t < 2 {
        return Err(Error::pre("b-not-in-fq", format!("b = {} lies in F_q", p.b)));
    }
    let ell = n / t - 1;
    let sbar = QSubspace::span1(ctx, &p.sbar);
    if sbar.dim() != ell * t || !sbar.is_subfield_closed(t)? {
        return Err(Error::pre(
            "sbar-subspace",
            format!("S̄ must be an F_(q^{t})-subspace of F_q-dimension {}", ell * t),
        ));
    }
    if p.c.is_zero() || !QSubspace::subfield(ctx, t)?.scale(p.c).intersect(&sbar)?.is_zero() {
        return Err(Error::pre("c-fqt-meets-sbar-trivially", "cF_(q^t) ∩ S̄ ≠ 0"));
    }
    if !p.extended(ctx).contains_elem(Felt::ONE) {
        return Err(Error::pre("one-in-extended-space", "1 ∉ S̄ ⊕ c<1, ..., b^(t-2)>"));
    }
    // for t = 2, S is F_{q^2}-closed and every a ∉ S works
    if t >= 3 && p.extended(ctx).contains_elem(p.a) {
        return Err(Error::pre("a-outside-extended-space", "a ∈ S̄ ⊕ c<1, ..., b^(t-2)>"));
    }
    Ok(t)
}

/// The (n−2)-club {(s̄ + Σ c x_i b^i + α + βa, α + βb)}.
pub fn canonical_club(ctx: &Arc<FieldCtx>, p: &CanonicalParams) -> Result<ClubRecipe> {
    let t = check_canonical(ctx, p)?;
    let n = ctx.n();
    if !p.s(ctx).contains_elem(Felt::ONE) {
        return Err(Error::pre("one-in-s", "1 ∉ S̄ ⊕ c<1, ..., b^(t-3)>"));
    }
    if p.s(ctx).contains_elem(p.a) {
        return Err(Error::pre("a-not-in-s", "a ∈ S"));
    }
    let subspace = crate::subspaces::club_from_sab(&p.s(ctx), p.a, p.b)?;
    Ok(ClubRecipe {
        family: Family::Canonical,
        params: vec![
            ("t".into(), t.to_string()),
            ("b".into(), code(p.b)),
            ("c".into(), code(p.c)),
            ("a".into(), code(p.a)),
            ("sbar".into(), p.sbar.iter().map(|x| x.0.to_string()).collect::<Vec<_>>().join(",")),
        ],
        predicted_index: n - 2,
        subspace,
        poly: None,
    })
}

/// Result of the polynomial description of U_λ.
#[derive(Clone, Debug)]
pub struct LambdaPolyForm {
    pub recipe: ClubRecipe,
    pub omega: Felt,
    /// Dual basis of (1, λ, ..., λ^{n−3}, λ^{n−2} + ω, ωλ).
    pub dual: Vec<Felt>,
    /// Rows of [[λ^{-1}, ω], [0, 1]], which maps U_λ onto U_p.
    pub map: [[Felt; 2]; 2],
}

fn lambda_poly_basis(ctx: &FieldCtx, lambda: Felt, omega: Felt) -> Vec<Felt> {
    let n = ctx.n();
    let pw = |i: u32| ctx.pow(lambda, i as u64);
    let mut b: Vec<Felt> = (0..n - 2).map(pw).collect();
    b.push(ctx.add(pw(n - 2), omega));
    b.push(ctx.mul(omega, lambda));
    b
}

/// p(x) = Tr(c_{n−2}x) + λ·Tr(c_{n−1}x) for the first ω (element order) making the basis valid.
pub fn lambda_poly_scan(ctx: &Arc<FieldCtx>, lambda: Felt) -> Result<LambdaPolyForm> {
    check_full_degree(ctx, lambda)?;
    let n = ctx.n() as usize;
    let omega = ctx
        .elements()
        .find(|&w| ctx.fq_rank(&lambda_poly_basis(ctx, lambda, w)) == n)
        .ok_or_else(|| Error::claim("omega-exists", "no ω gives a basis"))?;
    lambda_poly_with_omega(ctx, lambda, omega)
}

/// As [`lambda_poly_scan`]; for odd q uses ω = λ^{n−2}, whose dual basis is the
/// polynomial-basis dual with the (n−2)-th entry halved.
pub fn lambda_poly(ctx: &Arc<FieldCtx>, lambda: Felt) -> Result<LambdaPolyForm> {
    check_full_degree(ctx, lambda)?;
    if ctx.p() == 2 {
        return lambda_poly_scan(ctx, lambda);
    }
    let n = ctx.n();
    let omega = ctx.pow(lambda, n as u64 - 2);
    let out = lambda_poly_with_omega(ctx, lambda, omega)?;
    let closed = dual_basis_polynomial(ctx, lambda)?;
    let half = ctx.inv(ctx.scalar(2));
    let expect = [ctx.mul(half, closed[n as usize - 2]), closed[n as usize - 1]];
    if out.dual[n as usize - 2..] != expect {
        return Err(Error::claim(
            "odd-q-shortcut",
            "dual entries for ω = λ^(n-2) differ from the closed form",
        ));
    }
    Ok(out)
}

pub fn lambda_poly_with_omega(ctx: &Arc<FieldCtx>, lambda: Felt, omega: Felt) -> Result<LambdaPolyForm> {
    check_full_degree(ctx, lambda)?;
    let n = ctx.n() as usize;
    let basis = lambda_poly_basis(ctx, lambda, omega);
    let dual = dual_basis(ctx, &basis)
        .map_err(|_| Error::pre("omega-basis", format!("ω = {omega} does not give a basis")))?;
    let p = trace_form(ctx, dual[n - 2], lambda, dual[n - 1]);
    let map = [[ctx.inv(lambda), omega], [Felt::ZERO, Felt::ONE]];
    let image = apply_matrix(ctx, &map, &lambda_subspace(ctx, lambda));
    let subspace = graph_subspace(&p);
    if image != subspace {
        return Err(Error::claim("lambda-polynomial-map", "[[1/λ, ω], [0, 1]]·U_λ ≠ U_p"));
    }
    Ok(LambdaPolyForm {
        recipe: ClubRecipe {
            family: Family::LambdaPoly,
            params: vec![("lambda".into(), code(lambda)), ("omega".into(), code(omega))],
            predicted_index: n as u32 - 2,
            subspace,
            poly: Some(p),
        },
        omega,
        dual,
        map,
    })
}

/// Tr(ξx) + β·Tr(ηx) as a q-polynomial: coefficient of x^{q^i} is ξ^{q^i} + β·η^{q^i}.
pub fn trace_form(ctx: &Arc<FieldCtx>, xi: Felt, beta: Felt, eta: Felt) -> LinPoly {
    let c: Vec<Felt> = (0..ctx.n())
        .map(|i| ctx.add(ctx.frobenius(xi, i), ctx.mul(beta, ctx.frobenius(eta, i))))
        .collect();
    LinPoly::new(ctx, &c)
}

pub(crate) fn apply_matrix(ctx: &FieldCtx, m: &[[Felt; 2]; 2], u: &QSubspace) -> QSubspace {
    u.map_fp_linear(2, |v| {
        vec![
            ctx.add(ctx.mul(m[0][0], v[0]), ctx.mul(m[0][1], v[1])),
            ctx.add(ctx.mul(m[1][0], v[0]), ctx.mul(m[1][1], v[1])),
        ]
    })
    .expect("arity 2")
}

/// Lift f on F_{q^t} to the same coefficients acting on F_{q^n}.
fn lift(f: &LinPoly) -> LinPoly {
    LinPoly::new(f.ctx(), f.coeffs())
}

/// p(x) = Tr_{q^n/q^t}(f(x) − a·x), predicted index t(r−1) or t(r−1)+1 by invertibility of f − ax.
pub fn scattered_trace_poly_shifted(f: &LinPoly, a: Felt) -> Result<ClubRecipe> {
    let ctx = f.ctx().clone();
    let t = f.ext();
    let n = ctx.n();
    let r = n / t;
    if t < 2 || r < 2 {
        return Err(Error::pre("r-and-t-above-1", format!("n = {n} = {r}·{t}")));
    }
    if !f.is_scattered() {
        return Err(Error::pre("f-scattered", "f is not scattered on F_(q^t)"));
    }
    let inner = lift(f).sub(&LinPoly::new(&ctx, &[a]))?;
    let p = LinPoly::trace(&ctx, t)?.compose(&inner)?;
    let invertible = f.minus_mx(a)?.is_invertible();
    Ok(ClubRecipe {
        family: Family::ScatteredTracePoly,
        params: vec![("t".into(), t.to_string()), ("f".into(), f.encode()), ("a".into(), code(a))],
        predicted_index: if invertible { t * (r - 1) } else { t * (r - 1) + 1 },
        subspace: graph_subspace(&p),
        poly: Some(p),
    })
}

/// p(x) = Tr_{q^n/q^t}(f(x) − x).
pub fn scattered_trace_poly(f: &LinPoly) -> Result<ClubRecipe> {
    scattered_trace_poly_shifted(f, Felt::ONE)
}

#[derive(Clone, Debug)]
pub struct CanonicalPolyForm {
    pub recipe: ClubRecipe,
    pub omega: Felt,
    pub xi: Felt,
    pub eta: Felt,
    /// (s_1, ..., s_{ℓt}, c, cb, ..., cb^{t−3}, 1 + ω, a + ωb).
    pub basis: Vec<Felt>,
    pub dual: Vec<Felt>,
}

fn canonical_poly_basis(ctx: &FieldCtx, p: &CanonicalParams, s_basis: &[Felt], omega: Felt) -> Vec<Felt> {
    let mut b = s_basis.to_vec();
    b.push(ctx.add(Felt::ONE, omega));
    b.push(ctx.add(p.a, ctx.mul(omega, p.b)));
    b
}

/// Polynomial form Tr(ξx) + b·Tr(ηx) of the canonical (n−2)-club, with ω the first element
/// completing the basis. ⟨ξ, η⟩^⊥ is checked to be S = S̄ ⊕ c⟨1, ..., b^{t−3}⟩.
pub fn canonical_poly(ctx: &Arc<FieldCtx>, p: &CanonicalParams) -> Result<CanonicalPolyForm> {
    let t = check_canonical(ctx, p)?;
    let n = ctx.n() as usize;
    let mut s_basis = p.sbar.clone();
    s_basis.extend((0..t - 2).map(|i| ctx.mul(p.c, ctx.pow(p.b, i as u64))));
    let omega = ctx
        .elements()
        .find(|&w| ctx.fq_rank(&canonical_poly_basis(ctx, p, &s_basis, w)) == n)
        .ok_or_else(|| Error::claim("omega-exists", "no ω completes the basis"))?;
    let basis = canonical_poly_basis(ctx, p, &s_basis, omega);
    let dual = dual_basis(ctx, &basis)?;
    let (xi, eta) = (dual[n - 2], dual[n - 1]);
    let poly = trace_form(ctx, xi, p.b, eta);

    // ⟨ξ, η⟩^⊥ under (x, y) ↦ Tr(xy)
    let perp: Vec<Felt> = ctx
        .elements()
        .filter(|&x| {
            ctx.trace(ctx.mul(x, xi), 1).expect("1 | n").is_zero()
                && ctx.trace(ctx.mul(x, eta), 1).expect("1 | n").is_zero()
        })
        .collect();
    let s = QSubspace::span1(ctx, &s_basis);
    if QSubspace::span1(ctx, &perp) != s {
        return Err(Error::claim("perp-is-s", "<xi, eta>^perp differs from S"));
    }

    let u = QSubspace::span1(ctx, &s_basis);
    let u = crate::subspaces::club_from_sab(&u, p.a, p.b)?;
    let image = apply_matrix(ctx, &[[Felt::ONE, omega], [Felt::ZERO, Felt::ONE]], &u);
    let subspace = graph_subspace(&poly);
    if image != subspace {
        return Err(Error::claim("canonical-polynomial-map", "[[1, ω], [0, 1]]·U ≠ U_p"));
    }
    Ok(CanonicalPolyForm {
        recipe: ClubRecipe {
            family: Family::CanonicalPoly,
            params: vec![
                ("t".into(), t.to_string()),
                ("b".into(), code(p.b)),
                ("c".into(), code(p.c)),
                ("a".into(), code(p.a)),
                ("omega".into(), code(omega)),
            ],
            predicted_index: n as u32 - 2,
            subspace,
            poly: Some(poly),
        },
        omega,
        xi,
        eta,
        basis,
        dual,
    })
}

/// Divisors t of n usable for the canonical form: t = n, 3 ≤ t ≤ n − 3, or t = 2 (n even).
pub fn canonical_degrees(n: u32) -> Vec<u32> {
    fpoly::divisors(n)
        .into_iter()
        .filter(|&t| t == n || (3..=n.saturating_sub(3)).contains(&t) || (t == 2 && n >= 4))
        .filter(|&t| t >= 2)
        .collect()
}

/// Every recipe this module can build with default parameters on F_{q^n}.
pub fn default_recipes(ctx: &Arc<FieldCtx>) -> Result<Vec<ClubRecipe>> {
    let n = ctx.n();
    let mut out = Vec::new();
    for m in fpoly::divisors(n) {
        let ell = n / m;
        if ell < 2 {
            continue;
        }
        for s in 0..n {
            if gcd(s, m) == 1 {
                out.push(trace_tower_club(ctx, m, ell, s)?);
                break;
            }
        }
    }
    if n >= 3 {
        let lambda = default_lambda(ctx);
        out.push(club_lambda(ctx, lambda)?);
        out.push(lambda_poly(ctx, lambda)?.recipe);
        if ctx.p() != 2 {
            out.push(lambda_poly_scan(ctx, lambda)?.recipe);
        }
    }
    for t in fpoly::divisors(n) {
        if t < 2 || t == n {
            continue;
        }
        let f = pseudoregulus(ctx, t)?;
        let omega = default_omega(ctx, t)?;
        let sub = ctx.subfield_elements(t)?;
        // one invertible and one singular shift when both exist
        let mut seen = [false, false];
        let mut one_done = false;
        for &a in &sub {
            let inv = f.minus_mx(a)?.is_invertible();
            if !seen[inv as usize] {
                seen[inv as usize] = true;
                out.push(club_scattered_trace(&f, a, Felt::ONE, omega)?);
                out.push(scattered_trace_poly_shifted(&f, a)?);
                one_done |= a == Felt::ONE;
            }
        }
        if !one_done {
            out.push(scattered_trace_poly(&f)?);
        }
    }
    if n >= 5 {
        for t in canonical_degrees(n) {
            let p = default_canonical_params(ctx, t, false)?;
            out.push(canonical_club(ctx, &p)?);
            out.push(canonical_poly(ctx, &p)?.recipe);
        }
    }
    Ok(out)
}
