//! Acceptance run: one line per criterion, exact counts, no tolerance.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use clubs::constructions::{
    canonical_degrees, default_canonical_params, default_recipes, lambda_poly, lambda_poly_scan, scattered_trace_poly_shifted,
    canonical_poly, canonical_club, ClubRecipe, Family,
};
use clubs::equivalence::{apply_semilinear, invariants, restricted_equiv_search, EquivVerdict, InequivalenceReason, SemilinearMap};
use clubs::geomapps::{km_arc, line_profile, redei_blocking_set, verify_km_arc};
use clubs::gfcore::{dual_basis, dual_basis_binomial, dual_basis_polynomial, dual_basis_trinomial};
use clubs::linpoly::LinPoly;
use clubs::rankmetric::{code_from_system, iclub_code, weight_distribution_direct, weight_distribution_geometric};
use clubs::subspaces::{
    club_from_sab, decompose_against, linear_set, classify_product_case, weight2_points_bijection, ClubTag,
    DecompositionCase, ProductCase, QSubspace,
};
use clubs::{Felt, FieldCtx};
use common::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(format!($($arg)*));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>, what: &str) -> Result<T, String> {
    r.map_err(|e| format!("{what}: {e}"))
}

fn gate(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    ensure!(elapsed < limit, "{what} took {elapsed:?}, limit {limit:?}");
    Ok(())
}

/// Index-1 recipes realize scattered sets; everything else must be exactly IClub(i).
fn expected_tag(i: u32) -> ClubTag {
    if i == 1 {
        ClubTag::Scattered
    } else {
        ClubTag::IClub(i)
    }
}

fn check_recipe(r: &ClubRecipe) -> Result<(), String> {
    let f = r.ctx();
    let (q, n, i) = (f.q() as u64, f.n(), r.predicted_index);
    let ls = ok(linear_set(&r.subspace), "linear set")?;
    ensure!(ls.tag == expected_tag(i), "{} {:?}: tag {} for predicted index {i}", r.family.name(), r.params, ls.tag);
    ensure!(
        ls.size() == club_size(q, n, i),
        "{} {:?}: size {} != {}",
        r.family.name(),
        r.params,
        ls.size(),
        club_size(q, n, i)
    );
    ensure!(ls.rank == n, "{}: rank {}", r.family.name(), ls.rank);
    Ok(())
}

fn c1_recipes() -> Outcome {
    let mut total = 0;
    let mut per_family: BTreeMap<&str, usize> = BTreeMap::new();
    for (q, n) in SMALL_FIELDS {
        let start = Instant::now();
        let f = field(q, n);
        let recipes = ok(default_recipes(&f), "recipes")?;
        ensure!(!recipes.is_empty(), "no recipes at q={q} n={n}");
        for r in &recipes {
            check_recipe(r)?;
            *per_family.entry(r.family.name()).or_default() += 1;
            total += 1;
        }
        gate(start.elapsed(), Duration::from_secs(1), &format!("q={q} n={n}"))?;
    }
    Ok(format!("{total} recipes on 7 fields, all at predicted index and size; {per_family:?}"))
}

struct SabSample {
    s: QSubspace,
    a: Felt,
    b: Felt,
}

/// Random valid (S, a, b): 1 ∈ S, dim S = h ≤ n − 2, a ∉ S, b ∉ F_q. About half the time a is
/// drawn from (S + bS) \ S so both sides of the club criterion are exercised.
fn sab_samples(f: &std::sync::Arc<FieldCtx>, count: usize, seed: u64) -> Vec<SabSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = f.n();
    let mut out = Vec::new();
    while out.len() < count {
        let h = rand::Rng::gen_range(&mut rng, 1..=n - 2);
        let s = random_subspace(f, h, &[Felt::ONE], &mut rng);
        let b = random_outside_fq(f, &mut rng);
        let spb = s.sum(&s.scale(b)).unwrap();
        let inside: Vec<Felt> = spb.elements1().into_iter().filter(|&x| !s.contains_elem(x)).collect();
        let a = if out.len() % 2 == 0 && !inside.is_empty() {
            *inside.choose(&mut rng).unwrap()
        } else {
            loop {
                let a = random_elem(f, &mut rng);
                if !s.contains_elem(a) {
                    break a;
                }
            }
        };
        out.push(SabSample { s, a, b });
    }
    out
}

fn c2_c3_bijection_and_counts() -> (Outcome, Outcome) {
    let mut c2 = Vec::new();
    let mut c3 = Vec::new();
    let mut fail2 = None;
    let mut fail3 = None;
    for (q, n) in SMALL_FIELDS {
        let f = field(q, n);
        let start = Instant::now();
        let (mut clubs, mut nonclubs, mut counted) = (0, 0, 0);
        for (k, smp) in sab_samples(&f, 100, 1000 + (q * 10 + n) as u64).iter().enumerate() {
            let res = (|| -> Result<(), String> {
                let h = smp.s.dim();
                let u = ok(club_from_sab(&smp.s, smp.a, smp.b), "club_from_sab")?;
                let ls = ok(linear_set(&u), "linear set")?;
                let heavy = point(&f, Felt::ONE, Felt::ZERO);
                ensure!(ls.weight_of(&heavy) == h, "heavy weight {} != {h}", ls.weight_of(&heavy));
                let others: Vec<_> = ls.points.iter().filter(|(p, _)| *p != heavy).collect();
                ensure!(others.iter().all(|(_, w)| *w <= 2), "a non-heavy point of weight > 2");
                let enumerated: BTreeSet<_> = others.iter().filter(|(_, w)| *w == 2).map(|(p, _)| p.clone()).collect();
                let predicted: BTreeSet<_> = ok(weight2_points_bijection(&smp.s, smp.a, smp.b), "bijection")?
                    .into_iter()
                    .collect();
                ensure!(enumerated == predicted, "sample {k}: weight-2 sets differ ({} vs {})", enumerated.len(), predicted.len());
                let in_sum = smp.s.sum(&smp.s.scale(smp.b)).unwrap().contains_elem(smp.a);
                let is_club = enumerated.is_empty();
                ensure!(is_club == !in_sum, "sample {k}: club {is_club} but a ∈ S+bS is {in_sum}");
                if is_club {
                    ensure!(ls.tag == expected_tag(h), "sample {k}: club tagged {}", ls.tag);
                    clubs += 1;
                } else {
                    nonclubs += 1;
                }
                Ok(())
            })();
            if let Err(e) = res {
                fail2.get_or_insert(format!("q={q} n={n}: {e}"));
            }
            if smp.s.sum(&smp.s.scale(smp.b)).unwrap().contains_elem(smp.a) {
                let res = (|| -> Result<(), String> {
                    let (h, qq) = (smp.s.dim(), q as u64);
                    let j = smp.s.intersect(&smp.s.scale(smp.b)).unwrap().dim();
                    let u = ok(club_from_sab(&smp.s, smp.a, smp.b), "club_from_sab")?;
                    let ls = ok(linear_set(&u), "linear set")?;
                    let heavy = point(&f, Felt::ONE, Felt::ZERO);
                    let w2 = ls.points.iter().filter(|(p, w)| *w == 2 && *p != heavy).count() as u64;
                    ensure!(w2 == qq.pow(j), "sample {k}: {w2} weight-2 points, expected q^{j}");
                    let size = qq.pow(h + 1) + qq.pow(h) + 1 - qq.pow(j + 1);
                    ensure!(ls.size() == size, "sample {k} (h={h}, j={j}): size {} != {size}", ls.size());
                    counted += 1;
                    Ok(())
                })();
                if let Err(e) = res {
                    fail3.get_or_insert(format!("q={q} n={n}: {e}"));
                }
            }
        }
        if start.elapsed() >= Duration::from_secs(10) {
            fail2.get_or_insert(format!("q={q} n={n}: {:?} over the 10 s limit", start.elapsed()));
        }
        c2.push(format!("q{q}n{n}:{clubs}+{nonclubs}"));
        c3.push(format!("q{q}n{n}:{counted}"));
    }
    let r2 = match fail2 {
        Some(e) => Err(e),
        None => Ok(format!("100 samples per field, clubs+non-clubs: {}", c2.join(" "))),
    };
    let r3 = match fail3 {
        Some(e) => Err(e),
        None => Ok(format!("samples with a ∈ S+bS checked: {}", c3.join(" "))),
    };
    (r2, r3)
}

/// S = ⟨1, b, ..., b^{n−3}⟩ with b of degree n: the power form of the hyperplane case.
fn power_form(f: &std::sync::Arc<FieldCtx>) -> (QSubspace, Felt) {
    let b = f.primitive();
    let gens: Vec<Felt> = (0..f.n() - 2).map(|i| f.pow(b, i as u64)).collect();
    (QSubspace::span1(f, &gens), b)
}

fn spectrum_of(u: &QSubspace) -> Result<(u64, u64, BTreeMap<u32, u64>), String> {
    let ls = ok(linear_set(u), "linear set")?;
    let f = u.ctx();
    let heavy = point(f, Felt::ONE, Felt::ZERO);
    let w2 = ls.points.iter().filter(|(p, w)| *w == 2 && *p != heavy).count() as u64;
    Ok((w2, ls.size(), ls.spectrum))
}

fn c4_trichotomy() -> Outcome {
    let mut lines = Vec::new();
    for (q, n) in [(2u32, 5u32), (2, 6), (3, 5)] {
        let f = field(q, n);
        let qq = q as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(44 + n as u64);
        let mut done = Vec::new();

        // Case 1: ⟨S·T⟩ = F_{q^n}
        let start = Instant::now();
        let (s, b) = loop {
            let s = random_subspace(&f, n - 2, &[Felt::ONE], &mut rng);
            let b = random_outside_fq(&f, &mut rng);
            if product_span(&f, &s, &QSubspace::span1(&f, &[Felt::ONE, b])).dim() == n {
                break (s, b);
            }
        };
        let case = ok(classify_product_case(&s, b), "case 1")?;
        ensure!(case.case == ProductCase::Full, "q={q} n={n}: expected the full case, got {:?}", case.case);
        let a = loop {
            let a = random_elem(&f, &mut rng);
            if !s.contains_elem(a) {
                break a;
            }
        };
        let (w2, size, _) = spectrum_of(&ok(club_from_sab(&s, a, b), "case 1 U")?)?;
        ensure!(w2 == qq.pow(n - 4), "q={q} n={n} case 1: {w2} weight-2 points");
        let want = qq.pow(n - 1) + qq.pow(n - 2) + 1 - qq.pow(n - 3);
        ensure!(size == want, "q={q} n={n} case 1: size {size} != {want}");
        gate(start.elapsed(), Duration::from_secs(5), "case 1")?;
        done.push("1");

        // Case 2 with a ∈ ⟨S·T⟩ \ S
        let start = Instant::now();
        let (s, b) = power_form(&f);
        let st = product_span(&f, &s, &QSubspace::span1(&f, &[Felt::ONE, b]));
        ensure!(st.dim() == n - 1, "power form has dim<S·T> = {}", st.dim());
        let a = st.elements1().into_iter().find(|&x| !s.contains_elem(x)).unwrap();
        let (w2, size, _) = spectrum_of(&ok(club_from_sab(&s, a, b), "case 2 U")?)?;
        ensure!(w2 == qq.pow(n - 3), "q={q} n={n} case 2 non-club: {w2} weight-2 points");
        ensure!(size == qq.pow(n - 1) + 1, "q={q} n={n} case 2 non-club: size {size}");
        gate(start.elapsed(), Duration::from_secs(5), "case 2 non-club")?;
        done.push("2(a∈ST)");

        // Case 2.1, 2.2 and 3 from the canonical parameters
        for t in canonical_degrees(n) {
            let start = Instant::now();
            let p = ok(default_canonical_params(&f, t, false), "params")?;
            let r = ok(canonical_club(&f, &p), "canonical club")?;
            check_recipe(&r)?;
            let c = ok(classify_product_case(&p.s(&f), p.b), "case")?;
            let label = match (&c.case, &c.form) {
                (ProductCase::Hyperplane, Some(DecompositionCase::Power { .. })) if t == n => "2.1",
                (ProductCase::Hyperplane, Some(DecompositionCase::Split { .. })) if (3..=n - 3).contains(&t) => "2.2",
                (ProductCase::Closed, Some(DecompositionCase::HyperplaneOverQ2 { .. })) if t == 2 => "3",
                _ => return Err(format!("q={q} n={n} t={t}: unexpected case {:?} {:?}", c.case, c.form)),
            };
            if label == "3" {
                // a ∈ S: every other point has weight 2
                let s = p.s(&f);
                let a = s.elements1().into_iter().find(|x| !x.is_zero()).unwrap();
                let mut vs: Vec<Vec<Felt>> = s.q_basis1().into_iter().map(|x| vec![x, Felt::ZERO]).collect();
                vs.push(vec![Felt::ONE, Felt::ONE]);
                vs.push(vec![a, p.b]);
                let u = QSubspace::span(&f, 2, &vs).unwrap();
                let ls = ok(linear_set(&u), "case 3 a ∈ S")?;
                let heavy = point(&f, Felt::ONE, Felt::ZERO);
                ensure!(
                    ls.points.iter().all(|(pt, w)| *pt == heavy || *w == 2),
                    "q={q} n={n} case 3 with a ∈ S: a point of weight ≠ 2"
                );
                ensure!(ls.size() == qq.pow(n - 2) + 1, "case 3 with a ∈ S: size {}", ls.size());
                done.push("3(a∈S)");
            }
            gate(start.elapsed(), Duration::from_secs(5), label)?;
            done.push(label);
        }
        lines.push(format!("q{q}n{n}:[{}]", done.join(",")));
    }
    Ok(lines.join(" "))
}

fn kronecker_ok(f: &FieldCtx, basis: &[Felt], dual: &[Felt]) -> bool {
    basis.iter().enumerate().all(|(i, &x)| {
        dual.iter().enumerate().all(|(j, &y)| {
            let tr = f.trace(f.mul(x, y), 1).unwrap();
            tr == if i == j { Felt::ONE } else { Felt::ZERO }
        })
    })
}

fn c5_dual_bases() -> Outcome {
    let mut summary = Vec::new();
    for (q, n) in SMALL_FIELDS.into_iter().chain([(4, 3)]) {
        let start = Instant::now();
        let f = field(q, n);
        let mut lambdas: Vec<Felt> = f.nonzero_elements().filter(|&x| f.degree_over_base(x) == n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        lambdas.shuffle(&mut rng);
        lambdas.truncate(50);
        let (mut bin, mut tri) = (0, 0);
        for &l in &lambdas {
            let basis: Vec<Felt> = (0..n as u64).map(|i| f.pow(l, i)).collect();
            let gram = ok(dual_basis(&f, &basis), "gram")?;
            let poly = ok(dual_basis_polynomial(&f, l), "closed form")?;
            ensure!(kronecker_ok(&f, &basis, &gram), "q={q} n={n} λ={l}: Gram dual fails Tr(ξ_i ξ*_j) = δ_ij");
            ensure!(kronecker_ok(&f, &basis, &poly), "q={q} n={n} λ={l}: closed form fails the trace identity");
            ensure!(gram == poly, "q={q} n={n} λ={l}: closed form differs from Gram");
            if let Some(d) = ok(dual_basis_binomial(&f, l), "binomial")? {
                ensure!(d == gram && kronecker_ok(&f, &basis, &d), "q={q} n={n} λ={l}: binomial shortcut differs");
                bin += 1;
            }
            if let Some(d) = ok(dual_basis_trinomial(&f, l), "trinomial")? {
                ensure!(d == gram && kronecker_ok(&f, &basis, &d), "q={q} n={n} λ={l}: trinomial shortcut differs");
                tri += 1;
            }
        }
        let mut binomial_l = 0;
        let mut trinomial_l = 0;
        // every λ admitting a shortcut, not only the sampled ones
        for l in f.nonzero_elements().filter(|&x| f.degree_over_base(x) == n) {
            let gram = ok(dual_basis(&f, &(0..n as u64).map(|i| f.pow(l, i)).collect::<Vec<_>>()), "gram")?;
            if let Some(d) = ok(dual_basis_binomial(&f, l), "binomial")? {
                ensure!(d == gram, "q={q} n={n} λ={l}: binomial shortcut differs");
                binomial_l += 1;
            }
            if let Some(d) = ok(dual_basis_trinomial(&f, l), "trinomial")? {
                ensure!(d == gram, "q={q} n={n} λ={l}: trinomial shortcut differs");
                trinomial_l += 1;
            }
        }
        summary.push(format!("q{q}n{n}:{}λ(bin {bin}/{binomial_l},tri {tri}/{trinomial_l})", lambdas.len()));
        gate(start.elapsed(), Duration::from_secs(1), &format!("q={q} n={n}"))?;
    }
    Ok(format!("{} (fields with fewer than 50 generators use all of them)", summary.join(" ")))
}

fn check_poly_recipe(r: &ClubRecipe) -> Result<(), String> {
    check_recipe(r)?;
    let p = r.poly.as_ref().ok_or("recipe without polynomial")?;
    let got = p.club_polynomial_index();
    if r.predicted_index == 1 {
        ensure!(got.is_none() && p.is_scattered(), "{}: index-1 polynomial is not scattered", r.family.name());
    } else {
        ensure!(got == Some(r.predicted_index), "{} {:?}: polynomial index {got:?}", r.family.name(), r.params);
    }
    Ok(())
}

fn c6_polynomial_forms() -> Outcome {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for q in [2u32, 3] {
        for n in 3..=6 {
            let f = field(q, n);
            for l in f.nonzero_elements().filter(|&x| f.degree_over_base(x) == n) {
                check_poly_recipe(&ok(lambda_poly(&f, l), "lambda-poly")?.recipe)?;
                *counts.entry("lambda-poly").or_default() += 1;
                if q % 2 == 1 {
                    check_poly_recipe(&ok(lambda_poly_scan(&f, l), "lambda-poly scan")?.recipe)?;
                    *counts.entry("lambda-poly-scan").or_default() += 1;
                }
            }
            for t in divisors(n).into_iter().filter(|&t| t >= 2 && n / t >= 2) {
                let sub = f.subfield_elements(t).unwrap();
                let mut fs = Vec::new();
                for s in (1..t).filter(|s| gcd(*s, t) == 1) {
                    fs.push(ok(LinPoly::monomial(&f, t, Felt::ONE, s), "monomial")?);
                }
                if t >= 3 {
                    // δx^q + x^{q^{t−1}}, for every δ that makes it scattered
                    for &d in sub.iter().filter(|d| !d.is_zero()) {
                        let mut c = vec![Felt::ZERO; t as usize];
                        c[1] = d;
                        c[t as usize - 1] = Felt::ONE;
                        let g = ok(LinPoly::over(&f, t, &c), "binomial")?;
                        if g.is_scattered() {
                            fs.push(g);
                        }
                    }
                }
                for g in &fs {
                    for &a in &sub {
                        check_poly_recipe(&ok(scattered_trace_poly_shifted(g, a), "scattered-trace-poly")?)?;
                        *counts.entry("scattered-trace-poly").or_default() += 1;
                    }
                }
            }
            if n >= 5 {
                for t in canonical_degrees(n) {
                    let base = ok(default_canonical_params(&f, t, false), "params")?;
                    let ext = base.extended(&f);
                    let s = base.s(&f);
                    for a in f.nonzero_elements() {
                        let admissible = if t >= 3 { !ext.contains_elem(a) } else { !s.contains_elem(a) };
                        if !admissible {
                            continue;
                        }
                        let mut p = base.clone();
                        p.a = a;
                        check_poly_recipe(&ok(canonical_poly(&f, &p), "canonical-poly")?.recipe)?;
                        *counts.entry("canonical-poly").or_default() += 1;
                    }
                }
            }
        }
    }
    Ok(format!("all realized parameter sets classify at the predicted index: {counts:?}"))
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Points v = (x, y, 1) outside the plane of U: the default and three random ones.
fn v_choices(f: &FieldCtx, seed: u64) -> Vec<Vec<Felt>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![vec![Felt::ZERO, Felt::ZERO, Felt::ONE]];
    for _ in 0..3 {
        out.push(vec![random_elem(f, &mut rng), random_elem(f, &mut rng), Felt::ONE]);
    }
    out
}

fn club_recipes(f: &std::sync::Arc<FieldCtx>) -> Result<Vec<ClubRecipe>, String> {
    Ok(ok(default_recipes(f), "recipes")?.into_iter().filter(|r| r.predicted_index >= 2).collect())
}

fn c7_km_arcs() -> Outcome {
    let start = Instant::now();
    let mut summary = Vec::new();
    for n in [3u32, 4, 5] {
        let f = field(2, n);
        let mut arcs = 0;
        let mut types = BTreeSet::new();
        for r in club_recipes(&f)? {
            for v in v_choices(&f, n as u64) {
                let (arc, i) = ok(km_arc(&r.subspace, Some(&v)), "km arc")?;
                let t = 1u64 << i;
                ensure!(arc.len() as u64 == (1 << n) + t, "n={n}: |A| = {} != 2^n + {t}", arc.len());
                let chk = verify_km_arc(&arc, t);
                ensure!(chk.ok, "n={n} {}: line sizes {:?}", r.family.name(), chk.histogram);
                let lines: u64 = chk.histogram.values().sum();
                ensure!(lines == (1 << (2 * n)) + (1 << n) + 1, "n={n}: {lines} lines scanned");
                let incidences: u64 = chk.histogram.iter().map(|(s, c)| *s as u64 * c).sum();
                ensure!(incidences == arc.len() as u64 * ((1 << n) + 1), "n={n}: incidence count {incidences}");
                arcs += 1;
                types.insert(t);
            }
        }
        summary.push(format!("n{n}:{arcs} arcs, types {types:?}"));
    }
    gate(start.elapsed(), Duration::from_secs(5), "km-arcs")?;
    Ok(summary.join(" "))
}

fn c8_redei_profiles() -> Outcome {
    let mut summary = Vec::new();
    for n in [3u32, 4, 5] {
        let f = field(2, n);
        let q = 2u64;
        let (mut inside, mut edge) = (0, 0);
        for r in club_recipes(&f)? {
            for v in v_choices(&f, 80 + n as u64) {
                let (w, i) = ok(redei_blocking_set(&r.subspace, Some(&v)), "blocking set")?;
                let prof = ok(line_profile(&w, None, 0, 0), "profile")?;
                ensure!(prof.exhaustive, "n={n}: profile not exhaustive");
                ensure!(prof.lines_scanned == q.pow(2 * n) + q.pow(n) + 1, "n={n}: {} lines", prof.lines_scanned);
                let wt = |x: u32| prof.weights.get(&x).copied().unwrap_or(0);
                if i + 2 <= n {
                    ensure!(wt(n) == 1, "n={n} i={i}: {} lines of weight n", wt(n));
                    ensure!(wt(i + 1) == q.pow(n - i), "n={n} i={i}: {} lines of weight i+1", wt(i + 1));
                    ensure!(
                        prof.joint.get(&(n, club_size(q, n, i))) == Some(&1),
                        "n={n} i={i}: the weight-n line does not carry L_U"
                    );
                    inside += 1;
                } else {
                    // i = n − 1: every line through the heavy point has weight n
                    ensure!(wt(n) == q + 1, "n={n} i={i}: {} lines of weight n", wt(n));
                    edge += 1;
                }
            }
        }
        summary.push(format!("n{n}:{inside} W with i≤n−2, {edge} with i=n−1"));
    }
    Ok(format!(
        "{} (i=n−1 lies outside the i ≤ n−2 range and has q+1 weight-n lines)",
        summary.join(" ")
    ))
}

/// Weight distribution of a club code read off the linear set: a point of weight w gives q^n − 1
/// codewords of weight n − w.
fn geometric_expectation(u: &QSubspace) -> Result<BTreeMap<u32, u64>, String> {
    let f = u.ctx();
    let (q, n) = (f.q() as u64, f.n());
    let ls = ok(linear_set(u), "linear set")?;
    let mut d = BTreeMap::new();
    for (_, w) in &ls.points {
        *d.entry(n - w).or_insert(0) += q.pow(n) - 1;
    }
    let missing = q.pow(n) + 1 - ls.size();
    if missing > 0 {
        *d.entry(n).or_insert(0) += missing * (q.pow(n) - 1);
    }
    Ok(d)
}

fn c9_codes() -> Outcome {
    let mut codes = 0;
    let f = field(2, 3);
    let trace = default_recipes(&f)
        .unwrap()
        .into_iter()
        .find(|r| r.family == Family::TraceTower && r.predicted_index == 2)
        .ok_or("no trace club at q=2 n=3")?;
    let (_, d) = ok(iclub_code(&trace), "trace code")?;
    let want: BTreeMap<u32, u64> = [(1, 7), (2, 28), (3, 28)].into_iter().collect();
    ensure!(d == want, "trace code at q=2 n=3: {d:?}");

    for (q, n) in SMALL_FIELDS {
        let f = field(q, n);
        for r in ok(default_recipes(&f), "recipes")? {
            let (code, dist) = ok(iclub_code(&r), "club code")?;
            let direct = ok(weight_distribution_direct(&code), "direct")?;
            let geo = ok(weight_distribution_geometric(&code), "geometric")?;
            let expected = geometric_expectation(&r.subspace)?;
            ensure!(direct == geo, "q={q} n={n} {}: direct {direct:?} vs geometric {geo:?}", r.family.name());
            ensure!(direct == dist && direct == expected, "q={q} n={n} {}: {direct:?} vs {expected:?}", r.family.name());
            let i = r.predicted_index;
            let (qq, total) = (q as u64, (q as u64).pow(n) - 1);
            if i >= 2 {
                let mut three = BTreeMap::new();
                three.insert(n - i, total);
                three.insert(n - 1, (club_size(qq, n, i) - 1) * total);
                three.insert(n, (qq.pow(n) - club_size(qq, n, i) + 1) * total);
                ensure!(direct == three, "q={q} n={n} i={i}: not the three-weight distribution");
            }
            codes += 1;
        }
    }
    // random systems of dimension 3 with q^{3n} ≤ 2^20
    let mut random = 0;
    for (q, n) in [(2u32, 3u32), (2, 4), (2, 5), (2, 6), (3, 3), (3, 4)] {
        let f = field(q, n);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..3 {
            let dim = rand::Rng::gen_range(&mut rng, 3..=n + 2);
            let u = loop {
                let vs: Vec<Vec<Felt>> = (0..dim)
                    .map(|_| (0..3).map(|_| random_elem(&f, &mut rng)).collect())
                    .collect();
                let u = QSubspace::span(&f, 3, &vs).unwrap();
                if u.dim() == dim && code_from_system(&u, None).is_ok() {
                    break u;
                }
            };
            let code = ok(code_from_system(&u, None), "system")?;
            let direct = ok(weight_distribution_direct(&code), "direct")?;
            let geo = ok(weight_distribution_geometric(&code), "geometric")?;
            ensure!(direct == geo, "q={q} n={n} random system: {direct:?} vs {geo:?}");
            random += 1;
        }
    }
    Ok(format!("q=2 n=3 trace code {{1:7,2:28,3:28}}; {codes} club codes and {random} random 3-dim systems agree exhaustively"))
}

fn c10_equivalence() -> Outcome {
    let mut planted = 0;
    let mut instances = 0;
    for (q, n) in [(2u32, 4u32), (2, 5), (2, 6), (3, 4), (3, 5)] {
        let f = field(q, n);
        let mut rng = ChaCha8Rng::seed_from_u64(10 + n as u64);
        for r in club_recipes(&f)? {
            let inv = ok(invariants(&r.subspace), "invariants")?;
            for _ in 0..50 {
                let g = SemilinearMap::random(&f, &mut rng);
                let w = ok(apply_semilinear(&r.subspace, &g), "image")?;
                match ok(restricted_equiv_search(&r.subspace, &w), "search")? {
                    EquivVerdict::Equivalent(h) => {
                        ensure!(ok(apply_semilinear(&r.subspace, &h), "witness")? == w, "witness does not map U onto its image");
                    }
                    v => return Err(format!("q={q} n={n} {} under {g}: {v:?}", r.family.name())),
                }
                ensure!(ok(invariants(&w), "invariants")? == inv, "invariants moved under {g}");
                planted += 1;
            }
            instances += 1;
        }
    }
    let start = Instant::now();
    let f = field(2, 6);
    let u1 = ok(canonical_club(&f, &default_canonical_params(&f, 6, false).unwrap()), "power form")?.subspace;
    let u3 = ok(canonical_club(&f, &default_canonical_params(&f, 2, false).unwrap()), "closed form")?.subspace;
    for (x, y) in [(&u1, &u3), (&u3, &u1)] {
        let v = ok(restricted_equiv_search(x, y), "n=6 search")?;
        ensure!(
            v == EquivVerdict::Inequivalent(InequivalenceReason::ExhaustiveSearch),
            "n=6 power vs closed form: {v:?}"
        );
    }
    gate(start.elapsed(), Duration::from_secs(600), "n=6 search")?;
    Ok(format!(
        "{planted} planted images over {instances} clubs recovered; q=2 n=6 power and F_4-closed forms inequivalent in both directions ({:?})",
        start.elapsed()
    ))
}

fn c11_property_suites() -> Outcome {
    let mut summary = Vec::new();
    for (q, n) in SMALL_FIELDS.into_iter().chain([(2, 8), (4, 3)]) {
        let f = field(q, n);
        let mut rng = ChaCha8Rng::seed_from_u64(11 + (q * 16 + n) as u64);
        let proper: Vec<u32> = divisors(n).into_iter().filter(|&t| t > 1).collect();

        // linear Cauchy–Davenport dichotomy
        let (mut big, mut closed) = (0, 0);
        for k in 0..200 {
            let small: Vec<u32> = proper.iter().copied().filter(|&t| t < n).collect();
            let (s, t) = match (k % 4, small.choose(&mut rng)) {
                // S closed under F_{q^t}, T arbitrary
                (0, Some(&t)) => {
                    let ks = rand::Rng::gen_range(&mut rng, 1..=n / t);
                    let dim_t = rand::Rng::gen_range(&mut rng, 1..=n);
                    (random_closed_subspace(&f, t, ks, &mut rng), random_subspace(&f, dim_t, &[], &mut rng))
                }
                // S closed under F_{q^t}, T inside F_{q^t}: ⟨S·T⟩ = S falls short of the bound
                (1, Some(&t)) if t >= 2 => {
                    let ks = rand::Rng::gen_range(&mut rng, 1..n / t);
                    let sub = f.subfield_elements(t).unwrap();
                    let dim_t = rand::Rng::gen_range(&mut rng, 2..=t);
                    let mut gens = Vec::new();
                    let mut tt = QSubspace::span1(&f, &[]);
                    while tt.dim() < dim_t {
                        gens.push(*sub.choose(&mut rng).unwrap());
                        tt = QSubspace::span1(&f, &gens);
                        if tt.dim() > dim_t {
                            gens.pop();
                            tt = QSubspace::span1(&f, &gens);
                        }
                    }
                    (random_closed_subspace(&f, t, ks.max(1), &mut rng), tt)
                }
                _ => (
                    random_subspace(&f, rand::Rng::gen_range(&mut rng, 1..=n), &[], &mut rng),
                    random_subspace(&f, rand::Rng::gen_range(&mut rng, 1..=n), &[], &mut rng),
                ),
            };
            let st = product_span(&f, &s, &t);
            if st.dim() >= (s.dim() + t.dim() - 1).min(n) {
                big += 1;
            } else {
                let stabilized = proper.iter().any(|&t| st.is_subfield_closed(t).unwrap());
                ensure!(stabilized, "q={q} n={n}: dim<ST> = {} with no subfield stabilizer", st.dim());
                closed += 1;
            }
        }

        // case analysis of S against μ
        let mut cases: BTreeMap<&str, usize> = BTreeMap::new();
        let split_degrees: Vec<u32> = proper.iter().copied().filter(|&t| t >= 3 && t < n).collect();
        for k in 0..200 {
            let mu = match split_degrees.choose(&mut rng) {
                Some(&t) if k % 4 == 2 => {
                    let sub = f.subfield_elements(t).unwrap();
                    loop {
                        let x = *sub.choose(&mut rng).unwrap();
                        if f.degree_over_base(x) == t {
                            break x;
                        }
                    }
                }
                _ => random_outside_fq(&f, &mut rng),
            };
            let tdeg = f.degree_over_base(mu);
            let s = match k % 4 {
                0 if n >= 3 => {
                    let kk = rand::Rng::gen_range(&mut rng, 2..=n.min(tdeg).max(2));
                    let c = random_nonzero(&f, &mut rng);
                    QSubspace::span1(&f, &(0..kk).map(|i| f.mul(c, f.pow(mu, i as u64))).collect::<Vec<_>>())
                }
                1 if tdeg < n => random_closed_subspace(&f, tdeg, rand::Rng::gen_range(&mut rng, 1..=n / tdeg), &mut rng),
                2 if tdeg < n && tdeg >= 3 => {
                    let ell = rand::Rng::gen_range(&mut rng, 1..n / tdeg);
                    let sbar = random_closed_subspace(&f, tdeg, ell, &mut rng);
                    let m = rand::Rng::gen_range(&mut rng, 1..tdeg);
                    let field_t = QSubspace::subfield(&f, tdeg).unwrap();
                    let c = loop {
                        let c = random_nonzero(&f, &mut rng);
                        if field_t.scale(c).intersect(&sbar).unwrap().is_zero() {
                            break c;
                        }
                    };
                    let tail: Vec<Felt> = (0..m).map(|i| f.mul(c, f.pow(mu, i as u64))).collect();
                    sbar.sum(&QSubspace::span1(&f, &tail)).unwrap()
                }
                _ => random_subspace(&f, rand::Rng::gen_range(&mut rng, 2..=n), &[], &mut rng),
            };
            if s.dim() < 2 {
                continue;
            }
            let j = s.intersect(&s.scale(mu)).unwrap().dim();
            let kdim = s.dim();
            let got = ok(decompose_against(&s, mu), "decomposition")?;
            let name = match &got {
                DecompositionCase::FieldClosed { t } => {
                    ensure!(j == kdim && s.is_subfield_closed(*t).unwrap(), "closed case on a non-closed S");
                    "closed"
                }
                DecompositionCase::Power { c } => {
                    let span = QSubspace::span1(&f, &(0..kdim).map(|i| f.mul(*c, f.pow(mu, i as u64))).collect::<Vec<_>>());
                    ensure!(j + 1 == kdim && span == s, "power witness does not span S");
                    "power"
                }
                DecompositionCase::Split { sbar, c, ell, m } => {
                    let tail: Vec<Felt> = (0..*m).map(|i| f.mul(*c, f.pow(mu, i as u64))).collect();
                    ensure!(
                        j + 1 == kdim
                            && sbar.is_subfield_closed(tdeg).unwrap()
                            && sbar.dim() == ell * tdeg
                            && sbar.sum(&QSubspace::span1(&f, &tail)).unwrap() == s,
                        "split witness does not rebuild S"
                    );
                    "split"
                }
                DecompositionCase::NoCase { intersection_dim } => {
                    ensure!(*intersection_dim == j && j + 2 <= kdim, "no-case with dim(S∩μS) = {j}, k = {kdim}");
                    "none"
                }
                DecompositionCase::HyperplaneOverQ2 { .. } => return Err("unexpected hyperplane form".into()),
            };
            *cases.entry(name).or_default() += 1;
        }
        let total: usize = cases.values().sum();
        ensure!(total >= 150, "q={q} n={n}: only {total} decomposition samples");
        summary.push(format!("q{q}n{n}:CD {big}+{closed} L{cases:?}"));
    }
    Ok(summary.join(" "))
}

fn main() {
    let started = Instant::now();
    let (c2, c3) = c2_c3_bijection_and_counts();
    let mut results: Vec<(&str, Outcome)> = vec![("club sizes and spectra", c1_recipes())];
    results.push(("weight-2 bijection and club criterion", c2));
    results.push(("non-club counts", c3));
    let rest: [(&str, fn() -> Outcome); 8] = [
        ("(n-2)-club trichotomy", c4_trichotomy),
        ("dual-basis routes", c5_dual_bases),
        ("polynomial forms", c6_polynomial_forms),
        ("KM-arcs", c7_km_arcs),
        ("blocking-set line profiles", c8_redei_profiles),
        ("rank-metric weight distributions", c9_codes),
        ("equivalence engine", c10_equivalence),
        ("property suites", c11_property_suites),
    ];
    for (name, f) in rest {
        results.push((name, f()));
    }
    let mut failed = 0;
    for (k, (name, res)) in results.iter().enumerate() {
        match res {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", k + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {e}", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass ({:?})", results.len() - failed, results.len(), started.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
