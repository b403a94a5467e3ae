//! Command-line front end. Every command prints one deterministic report; the exit code is
//! 0 on success, 1 for invalid input and 2 when a checked claim fails.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::constructions::{
    club_lambda, club_scattered_trace, default_canonical_params, default_lambda, default_omega,
    default_recipes, lambda_poly, scattered_trace_poly, scattered_trace_poly_shifted, canonical_poly, pseudoregulus, canonical_club,
    trace_tower_club, ClubRecipe, Family,
};
use crate::equivalence::{apply_semilinear, decide_equivalence, invariants, EquivVerdict, SemilinearMap};
use crate::error::{Error, Result};
use crate::geomapps::{check_redei_profile, km_arc, line_profile, redei_blocking_set, verify_km_arc};
use crate::gfcore::{dual_basis, dual_basis_with_route, fpoly, Felt, FieldCtx};
use crate::linpoly::LinPoly;
use crate::rankmetric::{blocking_code, iclub_code, minimum_distance};
use crate::subspaces::{linear_set, normalize_club, classify_product_case, ClubTag, LinearSetReport, QSubspace, Vector};

#[derive(Parser, Debug)]
#[command(name = "clubs", about = "Clubs of PG(1, q^n) and the objects built from them")]
pub struct Cli {
    #[command(flatten)]
    pub field: FieldArgs,

    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, default_value_t = 20)]
    pub trials: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Append wall-clock time to the report (makes output non-reproducible).
    #[arg(long, global = true)]
    pub timing: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Records,
}

#[derive(Args, Debug, Clone, Default)]
pub struct FieldArgs {
    /// Field config file with `key = value` lines (p, h, n, modulus, seed).
    #[arg(long, global = true)]
    pub config: Option<String>,
    /// q as a prime power; alternative to --p/--h.
    #[arg(long, global = true)]
    pub q: Option<u32>,
    #[arg(long, global = true)]
    pub p: Option<u32>,
    #[arg(long, global = true)]
    pub h: Option<u32>,
    #[arg(long, global = true)]
    pub n: Option<u32>,
    /// Coefficients over F_p of a monic irreducible of degree hn, constant term first.
    #[arg(long, global = true)]
    pub modulus: Option<String>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct RecipeArgs {
    /// trace-tower (alias trace), lambda, scattered-trace, canonical, lambda-poly, scattered-trace-poly, canonical-poly.
    #[arg(long)]
    pub family: Option<String>,
    /// Extra parameters as key=value, comma-separated.
    #[arg(long)]
    pub params: Option<String>,
    #[arg(long)]
    pub lambda: Option<u32>,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub l: Option<u32>,
    #[arg(long)]
    pub s: Option<u32>,
    #[arg(long)]
    pub t: Option<u32>,
    #[arg(long)]
    pub a: Option<u32>,
    #[arg(long)]
    pub b: Option<u32>,
    #[arg(long)]
    pub omega: Option<u32>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Field parameters, modulus, primitive element and subfields.
    FieldInfo,
    /// Build a club from a named family and classify it.
    Construct(RecipeArgs),
    /// Classify a subspace given by an F_q-basis, or the graph of a q-polynomial.
    Analyze {
        /// Basis vectors `(x,y);(x,y);...` with element codes.
        #[arg(long)]
        basis: Option<String>,
        /// Coefficients a_0,a_1,... of Σ a_i x^(q^i).
        #[arg(long)]
        poly: Option<String>,
    },
    /// Decide ΓL(2, q^n)-equivalence of two clubs given as family specs `name:key=value,...`.
    Equiv {
        #[arg(long)]
        left: String,
        /// Omit to test random images of the left club.
        #[arg(long)]
        right: Option<String>,
    },
    /// Line profile of the Rédei blocking set of a club.
    BlockingProfile(RecipeArgs),
    /// Translation KM-arc from a club (q = 2).
    KmArc(RecipeArgs),
    /// Weight distribution of the rank-metric code of a club.
    CodeWeights(RecipeArgs),
    /// Run every check that applies at the given field.
    VerifySuite,
}

/// Parsed contents of a field config file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FieldConfig {
    pub p: Option<u32>,
    pub h: Option<u32>,
    pub n: Option<u32>,
    pub modulus: Option<Vec<u32>>,
    pub seed: Option<u64>,
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| Error::Parse(format!("`{key}` expects a number, got `{v}`")))
}

fn parse_list(v: &str) -> Result<Vec<u32>> {
    v.split(',').map(|x| parse_num("list", x)).collect()
}

impl FieldConfig {
    pub fn parse(text: &str) -> Result<FieldConfig> {
        let mut c = FieldConfig::default();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", no + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "p" => c.p = Some(parse_num(k, v)?),
                "h" => c.h = Some(parse_num(k, v)?),
                "n" => c.n = Some(parse_num(k, v)?),
                "modulus" => c.modulus = Some(parse_list(v)?),
                "seed" => c.seed = Some(parse_num(k, v)?),
                _ => return Err(Error::Parse(format!("line {}: unknown key `{k}`", no + 1))),
            }
        }
        Ok(c)
    }
}

/// Split a prime power q into (p, h).
pub fn split_prime_power(q: u32) -> Result<(u32, u32)> {
    let ps = fpoly::prime_factors(q as u64);
    match ps[..] {
        [p] => {
            let (mut h, mut r) = (0, q);
            while r > 1 {
                r /= p as u32;
                h += 1;
            }
            Ok((p as u32, h))
        }
        _ => Err(Error::Param(format!("q = {q} is not a prime power"))),
    }
}

fn build_field(a: &FieldArgs) -> Result<(Arc<FieldCtx>, Option<u64>)> {
    let mut c = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Param(format!("cannot read {path}: {e}")))?;
            FieldConfig::parse(&text)?
        }
        None => FieldConfig::default(),
    };
    if let Some(q) = a.q {
        let (p, h) = split_prime_power(q)?;
        if a.p.is_some_and(|x| x != p) || a.h.is_some_and(|x| x != h) {
            return Err(Error::Param(format!("--q {q} disagrees with --p/--h")));
        }
        c.p = Some(p);
        c.h = Some(h);
    }
    if a.p.is_some() {
        c.p = a.p;
    }
    if a.h.is_some() {
        c.h = a.h;
    }
    if a.n.is_some() {
        c.n = a.n;
    }
    if let Some(m) = &a.modulus {
        c.modulus = Some(parse_list(m)?);
    }
    let p = c.p.ok_or_else(|| Error::Param("the field needs --q or --p".into()))?;
    let h = c.h.unwrap_or(1);
    let n = c.n.ok_or_else(|| Error::Param("the field needs --n".into()))?;
    let ctx = match c.modulus {
        Some(m) => FieldCtx::with_modulus(p, h, n, m)?,
        None => FieldCtx::new(p, h, n)?,
    };
    Ok((ctx, c.seed))
}

/// Key/value lines plus named tables; rendered as aligned text or one record per line.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub command: String,
    pub fields: Vec<(String, String)>,
    pub tables: Vec<(String, Vec<String>, Vec<Vec<String>>)>,
}

impl Report {
    fn new(command: &str) -> Report {
        Report {
            command: command.into(),
            ..Report::default()
        }
    }

    fn set(&mut self, k: &str, v: impl ToString) {
        self.fields.push((k.into(), v.to_string()));
    }

    fn table(&mut self, name: &str, header: &[&str], rows: Vec<Vec<String>>) {
        self.tables
            .push((name.into(), header.iter().map(|s| s.to_string()).collect(), rows));
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Text => {
                let _ = writeln!(out, "command: {}", self.command);
                let width = self.fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                for (k, v) in &self.fields {
                    let _ = writeln!(out, "{k:<width$} : {v}");
                }
                for (name, header, rows) in &self.tables {
                    let _ = writeln!(out, "\n[{name}]");
                    let _ = writeln!(out, "{}", header.join("\t"));
                    for r in rows {
                        let _ = writeln!(out, "{}", r.join("\t"));
                    }
                }
            }
            Format::Records => {
                let _ = writeln!(out, "command={}", self.command);
                for (k, v) in &self.fields {
                    let _ = writeln!(out, "{k}={v}");
                }
                for (name, header, rows) in &self.tables {
                    for r in rows {
                        let cells: Vec<String> = header.iter().zip(r).map(|(h, c)| format!("{h}={c}")).collect();
                        let _ = writeln!(out, "{name}\t{}", cells.join("\t"));
                    }
                }
            }
        }
        out
    }
}

fn field_fields(r: &mut Report, f: &FieldCtx) {
    r.set("p", f.p());
    r.set("h", f.h());
    r.set("q", f.q());
    r.set("n", f.n());
    r.set("modulus", join(f.modulus()));
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn spectrum_string(s: &BTreeMap<u32, u64>) -> String {
    s.iter().map(|(w, c)| format!("{w}:{c}")).collect::<Vec<_>>().join(" ")
}

fn elem(f: &FieldCtx, code: u32) -> Result<Felt> {
    f.element(code)
}

/// Parameters of a recipe as a key → value map, from flags and `--params`.
fn recipe_map(a: &RecipeArgs) -> Result<BTreeMap<String, u32>> {
    let mut m = BTreeMap::new();
    if let Some(ps) = &a.params {
        for kv in ps.split(',').filter(|s| !s.trim().is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{kv}`")))?;
            m.insert(k.trim().to_string(), parse_num(k, v)?);
        }
    }
    for (k, v) in [
        ("lambda", a.lambda),
        ("m", a.m),
        ("l", a.l),
        ("s", a.s),
        ("t", a.t),
        ("a", a.a),
        ("b", a.b),
        ("omega", a.omega),
    ] {
        if let Some(v) = v {
            m.insert(k.into(), v);
        }
    }
    Ok(m)
}

/// `name` or `name:key=value,...`.
fn parse_spec(spec: &str) -> Result<RecipeArgs> {
    let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
    Ok(RecipeArgs {
        family: Some(name.to_string()),
        params: Some(rest.to_string()),
        ..RecipeArgs::default()
    })
}

fn smallest_proper_divisor(n: u32) -> Result<u32> {
    fpoly::divisors(n)
        .into_iter()
        .find(|&t| t > 1 && t < n)
        .ok_or_else(|| Error::Param(format!("n = {n} has no proper divisor t > 1")))
}

pub fn build_recipe(f: &Arc<FieldCtx>, a: &RecipeArgs) -> Result<ClubRecipe> {
    let name = a.family.as_deref().ok_or_else(|| Error::Param("--family is required".into()))?;
    let name = if name == "trace" { "trace-tower" } else { name };
    let fam = Family::parse(name)?;
    let p = recipe_map(a)?;
    let get = |k: &str| p.get(k).copied();
    let felt = |k: &str, d: Felt| -> Result<Felt> { get(k).map(|c| elem(f, c)).unwrap_or(Ok(d)) };
    let n = f.n();
    let lambda = || felt("lambda", default_lambda(f));
    match fam {
        Family::TraceTower => {
            let m = get("m").unwrap_or(1);
            let ell = get("l").unwrap_or(n / m.max(1));
            let s = get("s").unwrap_or(if m == 1 { 0 } else { 1 });
            trace_tower_club(f, m, ell, s)
        }
        Family::Lambda => club_lambda(f, lambda()?),
        Family::ScatteredTrace => {
            let t = match get("t") {
                Some(t) => t,
                None => smallest_proper_divisor(n)?,
            };
            f.check_divisor(t)?;
            let omega = match get("omega") {
                Some(c) => elem(f, c)?,
                None => default_omega(f, t)?,
            };
            club_scattered_trace(&pseudoregulus(f, t)?, felt("a", Felt::ZERO)?, felt("b", Felt::ONE)?, omega)
        }
        Family::Canonical | Family::CanonicalPoly => {
            let t = get("t").unwrap_or(n);
            let mut params = default_canonical_params(f, t, false)?;
            if let Some(c) = get("a") {
                params.a = elem(f, c)?;
            }
            if fam == Family::CanonicalPoly {
                Ok(canonical_poly(f, &params)?.recipe)
            } else {
                canonical_club(f, &params)
            }
        }
        Family::LambdaPoly => Ok(lambda_poly(f, lambda()?)?.recipe),
        Family::ScatteredTracePoly => {
            let t = match get("t") {
                Some(t) => t,
                None => smallest_proper_divisor(n)?,
            };
            let g = pseudoregulus(f, t)?;
            match get("a") {
                Some(c) => scattered_trace_poly_shifted(&g, elem(f, c)?),
                None => scattered_trace_poly(&g),
            }
        }
    }
}

fn report_linear_set(r: &mut Report, ls: &LinearSetReport) {
    r.set("rank", ls.rank);
    r.set("classification", ls.tag);
    r.set("size", ls.size());
    r.set("spectrum", spectrum_string(&ls.spectrum));
    let heavy: Vec<Vec<String>> = ls
        .heavy_points()
        .into_iter()
        .map(|(p, w)| vec![p.to_string(), w.to_string()])
        .collect();
    if !heavy.is_empty() {
        r.table("heavy-points", &["point", "weight"], heavy);
    }
}

fn report_recipe(r: &mut Report, rec: &ClubRecipe) -> Result<LinearSetReport> {
    r.set("family", rec.family);
    for (k, v) in &rec.params {
        r.set(&format!("param.{k}"), v);
    }
    r.set("predicted-index", rec.predicted_index);
    r.set("predicted-size", rec.predicted_size());
    let ls = rec.verify()?;
    report_linear_set(r, &ls);
    if let Some(p) = &rec.poly {
        r.set("polynomial", p.encode());
        r.set(
            "polynomial-index",
            p.club_polynomial_index().map(|i| i.to_string()).unwrap_or_else(|| "none".into()),
        );
    }
    r.set("basis", rec.subspace.encode());
    Ok(ls)
}

fn parse_basis(f: &FieldCtx, s: &str) -> Result<Vec<Vector>> {
    s.split(';')
        .filter(|v| !v.trim().is_empty())
        .map(|v| {
            let inner = v.trim().trim_start_matches('(').trim_end_matches(')');
            parse_list(inner)?.into_iter().map(|c| elem(f, c)).collect()
        })
        .collect()
}

fn cmd_analyze(f: &Arc<FieldCtx>, r: &mut Report, basis: Option<&str>, poly: Option<&str>) -> Result<()> {
    let u = match (basis, poly) {
        (Some(b), None) => {
            let vs = parse_basis(f, b)?;
            let k = vs.first().map(|v| v.len()).ok_or_else(|| Error::Parse("empty basis".into()))?;
            QSubspace::span(f, k, &vs)?
        }
        (None, Some(p)) => {
            let coeffs: Vec<Felt> = parse_list(p)?.into_iter().map(|c| elem(f, c)).collect::<Result<_>>()?;
            let lp = LinPoly::new(f, &coeffs);
            r.set("scattered", lp.is_scattered());
            r.set("kernel-dim", lp.kernel_dim());
            r.set(
                "polynomial-index",
                lp.club_polynomial_index().map(|i| i.to_string()).unwrap_or_else(|| "none".into()),
            );
            crate::constructions::graph_subspace(&lp)
        }
        _ => return Err(Error::Param("give exactly one of --basis and --poly".into())),
    };
    let ls = linear_set(&u)?;
    report_linear_set(r, &ls);
    if let ClubTag::IClub(h) = ls.tag {
        if u.arity() == 2 && u.dim() == h + 2 {
            let nc = normalize_club(&u)?;
            r.set("normal-form.a", nc.a.0);
            r.set("normal-form.b", nc.b.0);
            r.set("normal-form.s", nc.s.encode());
            if f.n() >= 5 && h + 2 == f.n() {
                let c = classify_product_case(&nc.s, nc.b)?;
                r.set("product-case", format!("{:?}", c.case));
                r.set("product-dim", c.product_dim);
                r.set("degree-of-b", c.t);
            }
        }
    }
    Ok(())
}

fn verdict_string(v: &EquivVerdict) -> String {
    match v {
        EquivVerdict::Equivalent(g) => format!("equivalent via {g}"),
        EquivVerdict::Inequivalent(why) => format!("inequivalent ({why:?})"),
        EquivVerdict::Inconclusive(why) => format!("inconclusive ({why})"),
    }
}

fn cmd_equiv(f: &Arc<FieldCtx>, r: &mut Report, left: &str, right: Option<&str>, seed: u64, trials: u64) -> Result<()> {
    let u1 = build_recipe(f, &parse_spec(left)?)?;
    r.set("left", left);
    let inv1 = invariants(&u1.subspace)?;
    r.set("left.index", inv1.index);
    r.set("left.kernel-core-dims", format!("{:?}", inv1.kernel_core_dims));
    match right {
        Some(spec) => {
            let u2 = build_recipe(f, &parse_spec(spec)?)?;
            let inv2 = invariants(&u2.subspace)?;
            r.set("right", spec);
            r.set("right.index", inv2.index);
            r.set("right.kernel-core-dims", format!("{:?}", inv2.kernel_core_dims));
            r.set("verdict", verdict_string(&decide_equivalence(&u1.subspace, &u2.subspace)?));
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut rows = Vec::new();
            for k in 0..trials {
                let g = SemilinearMap::random(f, &mut rng);
                let w = apply_semilinear(&u1.subspace, &g)?;
                let v = crate::equivalence::restricted_equiv_search(&u1.subspace, &w)?;
                if !matches!(v, EquivVerdict::Equivalent(_)) {
                    return Err(Error::claim("planted-equivalence", format!("image under {g} not recognized")));
                }
                rows.push(vec![k.to_string(), g.to_string(), verdict_string(&v)]);
            }
            r.set("planted", trials);
            r.table("planted", &["trial", "map", "verdict"], rows);
        }
    }
    Ok(())
}

fn cmd_blocking(f: &Arc<FieldCtx>, r: &mut Report, a: &RecipeArgs, seed: u64, trials: u64) -> Result<()> {
    let rec = build_recipe(f, a)?;
    r.set("family", rec.family);
    let (w, i) = redei_blocking_set(&rec.subspace, None)?;
    r.set("club-index", i);
    r.set("blocking-set-size", linear_set(&w)?.size());
    let heavy = linear_set(&w)?.heavy_points().first().map(|(p, _)| p.clone());
    let prof = line_profile(&w, heavy.as_ref(), seed, trials)?;
    r.set("lines-scanned", prof.lines_scanned);
    r.set("exhaustive", prof.exhaustive);
    if let Some((s, t)) = prof.sample {
        r.set("sample", format!("heavy-point pencil plus {t} random lines, seed {s}"));
    }
    if prof.exhaustive && i + 2 <= f.n() {
        check_redei_profile(&prof, f.q() as u64, f.n(), i)?;
        r.set("line-claims", "ok");
    }
    let rows = prof
        .joint
        .iter()
        .map(|((w, s), c)| vec![w.to_string(), s.to_string(), c.to_string()])
        .collect();
    r.table("lines", &["weight", "points", "count"], rows);
    let code = blocking_code(&w)?;
    r.set("code.weight-1", code.weight_one);
    r.set("code.weight-2", code.weight_two);
    r.set("code.q-nondegenerate", code.q_nondegenerate);
    Ok(())
}

fn cmd_km(f: &Arc<FieldCtx>, r: &mut Report, a: &RecipeArgs) -> Result<()> {
    let rec = build_recipe(f, a)?;
    r.set("family", rec.family);
    let (arc, i) = km_arc(&rec.subspace, None)?;
    let t = 1u64 << i;
    r.set("type", t);
    r.set("size", arc.len());
    let chk = verify_km_arc(&arc, t);
    if !chk.ok {
        return Err(Error::claim("km-arc-lines", format!("line sizes {:?}", chk.histogram)));
    }
    r.set("verified", chk.ok);
    let rows = chk.histogram.iter().map(|(s, c)| vec![s.to_string(), c.to_string()]).collect();
    r.table("lines", &["points", "count"], rows);
    r.table(
        "points",
        &["point"],
        arc.points.iter().map(|p| vec![p.to_string()]).collect(),
    );
    Ok(())
}

fn cmd_code(f: &Arc<FieldCtx>, r: &mut Report, a: &RecipeArgs) -> Result<()> {
    let rec = build_recipe(f, a)?;
    r.set("family", rec.family);
    r.set("club-index", rec.predicted_index);
    let (code, dist) = iclub_code(&rec)?;
    r.set("length", code.length());
    r.set("dimension", code.k());
    r.set("minimum-distance", minimum_distance(&dist).unwrap_or(0));
    r.set("distribution", spectrum_string(&dist));
    let rows = code.generator.iter().map(|row| vec![join(&row.iter().map(|x| x.0).collect::<Vec<_>>())]).collect();
    r.table("generator", &["row"], rows);
    Ok(())
}

fn cmd_suite(f: &Arc<FieldCtx>, r: &mut Report, seed: u64, trials: u64) -> Result<()> {
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut failed: Option<Error> = None;
    let mut record = |name: String, res: Result<String>| match res {
        Ok(detail) => rows.push(vec![name, "ok".into(), detail]),
        Err(e @ Error::ClaimFailed { .. }) => {
            rows.push(vec![name, "FAILED".into(), e.to_string()]);
            failed.get_or_insert(e);
        }
        Err(e) => rows.push(vec![name, "skipped".into(), e.to_string()]),
    };

    // dual bases
    let res = (|| -> Result<String> {
        let mut agree = 0;
        for x in f.nonzero_elements().filter(|&x| f.degree_over_base(x) == f.n()).take(50) {
            let powers: Vec<Felt> = (0..f.n() as u64).map(|i| f.pow(x, i)).collect();
            let g = dual_basis(f, &powers)?;
            let (d, route) = dual_basis_with_route(f, &powers)?;
            if g != d {
                return Err(Error::claim("dual-basis-routes", format!("{route:?} disagrees with Gram at {x}")));
            }
            agree += 1;
        }
        Ok(format!("{agree} elements"))
    })();
    record("dual-basis".into(), res);

    let recipes = default_recipes(f);
    match recipes {
        Ok(recipes) => {
            for rec in &recipes {
                let res = rec.verify().map(|ls| format!("{} size {}", ls.tag, ls.size()));
                let name = format!("recipe {} {}", rec.family, params_short(rec));
                record(name, res);
                if rec.subspace.dim() == f.n() {
                    let res = iclub_code(rec).map(|(_, d)| spectrum_string(&d));
                    record(format!("code {} {}", rec.family, params_short(rec)), res);
                }
                if f.q() == 2 && rec.predicted_index >= 2 {
                    let res = km_arc(&rec.subspace, None).and_then(|(a, i)| {
                        let chk = verify_km_arc(&a, 1 << i);
                        if chk.ok {
                            Ok(format!("{} points, type {}", a.len(), 1u64 << i))
                        } else {
                            Err(Error::claim("km-arc-lines", format!("{:?}", chk.histogram)))
                        }
                    });
                    record(format!("km-arc {} {}", rec.family, params_short(rec)), res);
                }
                if f.order() as u64 <= crate::geomapps::FULL_SCAN_LIMIT && rec.predicted_index >= 2 && rec.predicted_index + 2 <= f.n() {
                    let res = redei_blocking_set(&rec.subspace, None).and_then(|(w, i)| {
                        let prof = line_profile(&w, None, seed, 0)?;
                        check_redei_profile(&prof, f.q() as u64, f.n(), i)?;
                        Ok(format!("{} lines", prof.lines_scanned))
                    });
                    record(format!("blocking {} {}", rec.family, params_short(rec)), res);
                }
            }
            if let Some(rec) = recipes.iter().find(|r| r.predicted_index >= 2) {
                let res = (|| -> Result<String> {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    for _ in 0..trials {
                        let g = SemilinearMap::random(f, &mut rng);
                        let w = apply_semilinear(&rec.subspace, &g)?;
                        if !matches!(
                            crate::equivalence::restricted_equiv_search(&rec.subspace, &w)?,
                            EquivVerdict::Equivalent(_)
                        ) {
                            return Err(Error::claim("planted-equivalence", format!("{g}")));
                        }
                        if invariants(&w)? != invariants(&rec.subspace)? {
                            return Err(Error::claim("invariants-preserved", format!("{g}")));
                        }
                    }
                    Ok(format!("{trials} images of {}", rec.family))
                })();
                record("planted-equivalence".into(), res);
            }
        }
        Err(e) => record("recipes".into(), Err(e)),
    }
    let total = rows.len();
    let ok = rows.iter().filter(|r| r[1] == "ok").count();
    r.set("checks", total);
    r.set("passed", ok);
    r.table("checks", &["check", "status", "detail"], rows);
    match failed {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn params_short(rec: &ClubRecipe) -> String {
    rec.params
        .iter()
        .filter(|(k, _)| k != "f" && k != "sbar")
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn execute(cli: &Cli, r: &mut Report) -> Result<()> {
    let (f, cfg_seed) = build_field(&cli.field)?;
    let seed = if cli.seed == 0 { cfg_seed.unwrap_or(0) } else { cli.seed };
    field_fields(r, &f);
    match &cli.command {
        Command::FieldInfo => {
            r.set("order", f.order());
            r.set("primitive", f.primitive().0);
            r.set("fq-generator", f.fq_generator().0);
            let rows = fpoly::divisors(f.n())
                .into_iter()
                .map(|t| {
                    let g = f.subfield_generator(t).expect("t divides n");
                    vec![t.to_string(), f.q_pow(t).to_string(), g.0.to_string()]
                })
                .collect();
            r.table("subfields", &["t", "size", "generator"], rows);
        }
        Command::Construct(a) => {
            let rec = build_recipe(&f, a)?;
            report_recipe(r, &rec)?;
        }
        Command::Analyze { basis, poly } => cmd_analyze(&f, r, basis.as_deref(), poly.as_deref())?,
        Command::Equiv { left, right } => cmd_equiv(&f, r, left, right.as_deref(), seed, cli.trials)?,
        Command::BlockingProfile(a) => cmd_blocking(&f, r, a, seed, cli.trials)?,
        Command::KmArc(a) => cmd_km(&f, r, a)?,
        Command::CodeWeights(a) => cmd_code(&f, r, a)?,
        Command::VerifySuite => cmd_suite(&f, r, seed, cli.trials)?,
    }
    Ok(())
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::FieldInfo => "field-info",
        Command::Construct(_) => "construct",
        Command::Analyze { .. } => "analyze",
        Command::Equiv { .. } => "equiv",
        Command::BlockingProfile(_) => "blocking-profile",
        Command::KmArc(_) => "km-arc",
        Command::CodeWeights(_) => "code-weights",
        Command::VerifySuite => "verify-suite",
    }
}

/// Parse arguments, run, and return (exit code, stdout text, stderr text).
pub fn run<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            return (code, if code == 0 { e.to_string() } else { String::new() }, if code == 0 { String::new() } else { e.to_string() });
        }
    };
    let start = Instant::now();
    let mut r = Report::new(command_name(&cli.command));
    let res = execute(&cli, &mut r);
    let (code, err) = match &res {
        Ok(()) => (0, String::new()),
        Err(e @ Error::ClaimFailed { .. }) => {
            r.set("status", "claim-failed");
            (2, format!("error: {e}\n"))
        }
        Err(e) => {
            r.set("status", "invalid-input");
            (1, format!("error: {e}\n"))
        }
    };
    if code == 0 {
        r.set("status", "ok");
    }
    if cli.timing {
        r.set("elapsed-ms", start.elapsed().as_millis());
    }
    (code, r.render(cli.format), err)
}
