//! Subcommand implementations. Each returns the text to print on stdout; failures carry
//! an optional partial report that is still printed before the error.

use std::fmt::Write as _;
use std::str::FromStr;

use gsp4::boundary::{boundary_summands, hida_rank, HidaGroupParams, LevelType, PlaceData, BOUNDARY_SCHEMA};
use gsp4::bruhat::{bruhat_decompose, verify_certificate};
use gsp4::flags::{contraction_report, enumerate_flags, EnumerationMode, SemigroupElement, DEFAULT_POINT_BUDGET};
use gsp4::hecke::{
    char_poly, evaluation_kernel_check, hecke_matrix, hecke_multiply, spherical_decomposition_count, standard_operators,
};
use gsp4::kostant::{kostant_weights, KostantCohomology, Nilradical};
use gsp4::polygons::{
    filtration_verdict, induced_hodge_polygon, induced_newton_polygon, ordinary_slopes, polygon_compare,
    slopes_from_valuations, HodgeTateData, OrdinarySlopes, Point, Polygon,
};
use gsp4::roots::{weyl_group, ParabolicType, WeightCharacter, WeylElement};
use gsp4::tables::{emit_tables, emit_tables_json};
use gsp4::weights::Weight;
use gsp4::Error;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::{Check, Cli, CliError, Command, FileConfig, Format, LevelArgs, DEFAULT_SEED};

pub type Outcome = Result<String, (CliError, Option<String>)>;

const VERIFY_SCHEMA: &str = "gsp4.verify.v1";

fn fail<E: Into<CliError>>(e: E) -> (CliError, Option<String>) {
    (e.into(), None)
}

fn usage(msg: impl Into<String>) -> (CliError, Option<String>) {
    (CliError::Usage(msg.into()), None)
}

/// Serializes `value` with a top-level `schema` field, as pretty JSON plus a newline.
fn with_schema<T: Serialize>(schema: &str, value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("report types serialize");
    match v {
        Value::Object(ref mut map) => {
            map.insert("schema".into(), Value::String(schema.into()));
        }
        other => v = json!({ "schema": schema, "result": other }),
    }
    let mut s = serde_json::to_string_pretty(&v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn parabolic(s: &str) -> Result<ParabolicType, CliError> {
    match ParabolicType::parse(s)? {
        ParabolicType::Full => Err(CliError::Usage(format!("unknown parabolic {s:?}: expected B, P or P*"))),
        q => Ok(q),
    }
}

fn list<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| CliError::Usage(format!("cannot parse {what} entry {x:?}"))))
        .collect()
}

fn fixed<T: FromStr + Copy, const N: usize>(s: &str, what: &str) -> Result<[T; N], CliError> {
    let v: Vec<T> = list(s, what)?;
    v.try_into().map_err(|_| CliError::Usage(format!("{what} needs {N} comma-separated entries")))
}

fn weight(s: &str) -> Result<Weight, CliError> {
    let [a, b] = fixed::<i64, 2>(s, "weight")?;
    Ok(Weight::new(a, b))
}

fn rational(s: &str, what: &str) -> Result<BigRational, CliError> {
    s.trim().parse().map_err(|_| CliError::Usage(format!("cannot parse {what} {s:?} as a rational")))
}

fn resolve_format(cli: &Cli, cfg: &FileConfig) -> Result<Option<Format>, CliError> {
    if cli.format.is_some() {
        return Ok(cli.format);
    }
    match cfg.pick(None::<String>, "format")?.as_deref() {
        None => Ok(None),
        Some("json") => Ok(Some(Format::Json)),
        Some("tsv") => Ok(Some(Format::Tsv)),
        Some(other) => Err(CliError::Usage(format!("unknown format {other:?}"))),
    }
}

pub fn run(cli: Cli) -> Outcome {
    let cfg = match &cli.config {
        Some(path) => FileConfig::load(path).map_err(fail)?,
        None => FileConfig::default(),
    };
    let format = resolve_format(&cli, &cfg).map_err(fail)?;
    let seed = cfg.or(cli.seed, "seed", DEFAULT_SEED).map_err(fail)?;
    match &cli.command {
        Command::Tables { q } => tables(&cfg, q.clone(), format),
        Command::Verify { check, level, weight, element, budget } => {
            json_only(format)?;
            verify(&cfg, *check, level, weight.clone(), element.clone(), *budget)
        }
        Command::Polygon { weight, q, field, hecke_vals } => {
            polygon(&cfg, weight, q.clone(), field.clone(), hecke_vals.clone(), format)
        }
        Command::Kostant { weight, q, stratum } => kostant(&cfg, weight.clone(), q.clone(), stratum.clone(), format),
        Command::Boundary { q, degree, level, weight } => {
            boundary(&cfg, q.clone(), *degree, level.clone(), weight.clone(), format)
        }
        Command::Charpoly { t, r, s, q } => charpoly(&cfg, [t, r, s, q].map(Clone::clone), format),
        Command::HidaRank { d, delta, types, degrees } => {
            hida(&cfg, *d, *delta, types.clone(), degrees.clone(), format)
        }
        Command::Bruhat { u, w, p, precision, random } => {
            json_only(format)?;
            bruhat(&cfg, u.clone(), w.clone(), *p, *precision, *random, seed)
        }
    }
}

fn json_only(format: Option<Format>) -> Result<(), (CliError, Option<String>)> {
    match format {
        Some(Format::Tsv) => Err(usage("TSV output is not available for this subcommand")),
        _ => Ok(()),
    }
}

fn tables(cfg: &FileConfig, q: Option<String>, format: Option<Format>) -> Outcome {
    let q = parabolic(&cfg.require(q, "q").map_err(fail)?).map_err(fail)?;
    match format.unwrap_or(Format::Tsv) {
        Format::Tsv => emit_tables(q).map_err(fail),
        Format::Json => emit_tables_json(q).map(|s| s + "\n").map_err(fail),
    }
}

/// Prints a passing report, or prints it and exits with a verification failure.
fn report<T: Serialize>(check: &str, value: &T, pass: bool) -> Outcome {
    let mut v = serde_json::to_value(value).expect("report types serialize");
    if let Value::Object(ref mut map) = v {
        map.insert("check".into(), Value::String(check.into()));
    }
    let text = with_schema(VERIFY_SCHEMA, &v);
    if pass {
        Ok(text)
    } else {
        Err((CliError::Failed(format!("{check} check failed")), Some(text)))
    }
}

fn verify(
    cfg: &FileConfig,
    check: Check,
    level: &LevelArgs,
    weight: Option<String>,
    element: Option<String>,
    budget: Option<usize>,
) -> Outcome {
    let q = parabolic(&cfg.require(level.q.clone(), "q").map_err(fail)?).map_err(fail)?;
    let p = cfg.require(level.p, "p").map_err(fail)?;
    let budget = cfg.or(budget, "budget", DEFAULT_POINT_BUDGET).map_err(fail)?;
    match check {
        Check::Contract => {
            let r = cfg.require(level.r, "r").map_err(fail)?;
            let s = cfg.require(level.s, "s").map_err(fail)?;
            if s == 0 || s > r {
                return Err(usage(format!("need 1 <= s <= r, got r = {r}, s = {s}")));
            }
            let rep = contraction_report(q, p, r, s, budget).map_err(fail)?;
            report("contract", &rep, rep.pass)
        }
        Check::Hecke => {
            let r = cfg.require(level.r, "r").map_err(fail)?;
            verify_hecke(q, p, r, budget)
        }
        Check::Kernel => {
            let r = cfg.require(level.r, "r").map_err(fail)?;
            let s = cfg.require(level.s, "s").map_err(fail)?;
            let chi = match cfg.pick(weight, "weight").map_err(fail)? {
                Some(w) => {
                    let [a1, a2, b] = fixed::<i64, 3>(&w, "weight").map_err(fail)?;
                    WeightCharacter::new(a1, a2, b).map_err(fail)?
                }
                None => WeightCharacter::trivial(),
            };
            let rep = evaluation_kernel_check(q, p, r, s, chi).map_err(fail)?;
            report("kernel", &rep, rep.pass)
        }
        Check::Spherical => {
            let d = match cfg.pick(element, "element").map_err(fail)? {
                Some(e) => {
                    let [a1, a2, b] = fixed::<i64, 3>(&e, "element").map_err(fail)?;
                    SemigroupElement::new(a1, a2, b)
                }
                None => SemigroupElement::contracting(q).map_err(fail)?,
            };
            let rep = spherical_decomposition_count(q, &d, p).map_err(fail)?;
            report("spherical", &rep, rep.pass)
        }
    }
}

fn verify_hecke(q: ParabolicType, p: u64, r: u32, budget: usize) -> Outcome {
    let space = enumerate_flags(q, p, r, 1, EnumerationMode::Exhaustive { budget }).map_err(fail)?;
    let ops = standard_operators(q, p, r).map_err(fail)?;
    let mats = ops
        .iter()
        .map(|h| hecke_matrix(h, &space, r, WeightCharacter::trivial()).map(|m| m.to_dense()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(fail)?;
    let mut pairs = Vec::new();
    let mut pass = true;
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            let matrices_commute = mats[i].mul(&mats[j]) == mats[j].mul(&mats[i]);
            let ab = hecke_multiply(&ops[i], &ops[j]).map_err(fail)?;
            let ba = hecke_multiply(&ops[j], &ops[i]).map_err(fail)?;
            let mut lhs = ab.terms.clone();
            let mut rhs = ba.terms.clone();
            lhs.sort_by_key(|(e, _)| e.flag_exponents());
            rhs.sort_by_key(|(e, _)| e.flag_exponents());
            let products_agree = ab.unresolved == 0 && ba.unresolved == 0 && lhs == rhs;
            pass &= matrices_commute && products_agree;
            pairs.push(json!({
                "pair": [ops[i].element, ops[j].element],
                "matrices_commute": matrices_commute,
                "products_agree": products_agree,
                "product": ab.terms,
            }));
        }
    }
    let body = json!({
        "parameters": { "parabolic": q.short_name(), "p": p, "r": r },
        "counts": { "module_rank": space.len(), "operators": ops.len() },
        "degrees": ops.iter().map(|h| h.degree).collect::<Vec<_>>(),
        "pairs": pairs,
        "pass": pass,
    });
    report("hecke", &body, pass)
}

/// Parses `a,b,c` triples sharing one central integer `c`.
fn gsp4_weights(raw: &[String]) -> Result<(Vec<(i64, i64)>, i64), CliError> {
    let mut pairs = Vec::new();
    let mut central = None;
    for s in raw {
        let [a, b, c] = fixed::<i64, 3>(s, "weight")?;
        if *central.get_or_insert(c) != c {
            return Err(CliError::Usage("all embeddings must share the central integer c".into()));
        }
        if a < b || b < 0 {
            return Err(Error::NonDominant.into());
        }
        if (a + b - c).rem_euclid(2) != 0 {
            return Err(Error::ParityViolation.into());
        }
        pairs.push((a, b));
    }
    let c = central.ok_or_else(|| CliError::Usage("missing required value --weight".into()))?;
    Ok((pairs, c))
}

fn optional_rational(s: &str, what: &str) -> Result<Option<BigRational>, CliError> {
    if s.trim() == "_" {
        Ok(None)
    } else {
        rational(s, what).map(Some)
    }
}

/// Vertices as `["x", "y"]` string pairs so rationals stay exact and readable.
fn points(v: &[Point]) -> Value {
    v.iter().map(|(x, y)| json!([x.to_string(), y.to_string()])).collect()
}

fn polygon(
    cfg: &FileConfig,
    weights: &[String],
    q: Option<String>,
    field: Option<String>,
    hecke_vals: Option<String>,
    format: Option<Format>,
) -> Outcome {
    let raw = if weights.is_empty() { cfg.pick(None::<String>, "weight").map_err(fail)?.into_iter().collect() } else { weights.to_vec() };
    let (mut pairs, c) = gsp4_weights(&raw).map_err(fail)?;
    let q = parabolic(&cfg.require(q, "q").map_err(fail)?).map_err(fail)?;
    let [e, f] = fixed::<u32, 2>(&cfg.or(field, "field", "1,1".to_string()).map_err(fail)?, "field").map_err(fail)?;
    let local = (e * f) as usize;
    if pairs.len() == 1 && local > 1 {
        pairs = vec![pairs[0]; local];
    }
    let ht = HodgeTateData::from_gsp4(&pairs, c, e, f).map_err(fail)?;
    let slopes: OrdinarySlopes = match cfg.pick(hecke_vals, "hecke-vals").map_err(fail)? {
        Some(v) => {
            let parts: Vec<&str> = v.split(',').collect();
            if parts.len() != 2 {
                return Err(usage("--hecke-vals needs v(T),v(qR)"));
            }
            let vt = optional_rational(parts[0], "v(T)").map_err(fail)?;
            let vqr = optional_rational(parts[1], "v(qR)").map_err(fail)?;
            slopes_from_valuations(q, f, c, vt, vqr).map_err(fail)?
        }
        None => ordinary_slopes(q, e, f, &pairs, c).map_err(fail)?,
    };
    let hodge = induced_hodge_polygon(&ht).map_err(fail)?;
    let newton: Option<Polygon> = match slopes.to_slope_data() {
        Ok(sd) => Some(induced_newton_polygon(&sd, ht.local_degree()).map_err(fail)?),
        Err(Error::UnderdeterminedCase(_)) => None,
        Err(err) => return Err(fail(err)),
    };
    let comparison = newton.as_ref().map(|n| polygon_compare(n, &hodge)).transpose().map_err(fail)?;
    let verdict = filtration_verdict(&ht, &slopes, &[1, 2, 3]).map_err(fail)?;
    if format == Some(Format::Tsv) {
        let mut out = String::from("# hodge\n");
        out.push_str(&hodge.to_tsv());
        if let Some(n) = &newton {
            out.push_str("# newton\n");
            out.push_str(&n.to_tsv());
        }
        return Ok(out);
    }
    let diagnostics: Vec<Value> = verdict
        .diagnostics
        .iter()
        .map(|d| {
            json!({
                "t": d.t,
                "separated": d.separated,
                "testable": d.testable,
                "hodge_side": d.hodge_side.as_ref().map(ToString::to_string),
                "newton_side": d.newton_side.as_ref().map(ToString::to_string),
                "passes": d.passes,
                "stable_dimension": d.stable_dimension,
            })
        })
        .collect();
    let body = json!({
        "parameters": { "parabolic": q.short_name(), "weights": pairs, "c": c, "e": e, "f": f },
        "slopes": {
            "alpha": slopes.alpha.iter().map(|a| a.as_ref().map(ToString::to_string)).collect::<Vec<_>>(),
            "prefix": slopes.prefix.iter().map(|a| a.as_ref().map(ToString::to_string)).collect::<Vec<_>>(),
        },
        "hodge": points(&hodge.vertices),
        "newton": newton.as_ref().map(|n| points(&n.vertices)),
        "comparison": comparison.as_ref().map(|c| json!({
            "lies_above": c.lies_above,
            "meeting_vertices": points(&c.meeting_vertices),
        })),
        "verdict": {
            "stable_subspaces_at": verdict.stable_subspaces_at,
            "stable_dimensions": verdict.stable_dimensions,
            "dual_parabolic": verdict.dual_parabolic.map(ParabolicType::short_name),
            "diagnostics": diagnostics,
        },
    });
    Ok(with_schema("gsp4.polygon.v1", &body))
}

fn kostant(
    cfg: &FileConfig,
    weight_arg: Option<String>,
    q: Option<String>,
    stratum: Option<String>,
    format: Option<Format>,
) -> Outcome {
    let lambda = weight(&cfg.or(weight_arg, "weight", "0,0".to_string()).map_err(fail)?).map_err(fail)?;
    let q = parabolic(&cfg.require(q, "q").map_err(fail)?).map_err(fail)?;
    let nil = match cfg.pick(stratum, "stratum").map_err(fail)? {
        None => Nilradical::Parabolic(q),
        Some(s) => {
            let (sigma, w) =
                s.split_once(',').ok_or_else(|| usage("--stratum needs Sigma,w (for example P,s2)"))?;
            Nilradical::Stratum {
                q,
                sigma: parabolic(sigma).map_err(fail)?,
                w: WeylElement::parse(w.trim()).map_err(fail)?,
            }
        }
    };
    let coh: KostantCohomology = kostant_weights(nil, lambda).map_err(fail)?;
    if format == Some(Format::Tsv) {
        let mut out = String::from("degree\tv\ta\tb\n");
        for d in &coh.degrees {
            for t in &d.terms {
                let _ = writeln!(out, "{}\t{}\t{}\t{}", d.degree, t.v, t.weight.a, t.weight.b);
            }
        }
        return Ok(out);
    }
    let mut body = serde_json::to_value(&coh).expect("report types serialize");
    if let Value::Object(ref mut map) = body {
        map.insert("euler_characteristic".into(), json!(coh.euler_characteristic()));
        map.insert("support".into(), json!(coh.support()));
    }
    Ok(with_schema("gsp4.kostant.v1", &body))
}

fn boundary(
    cfg: &FileConfig,
    q: Option<String>,
    degree: Option<u32>,
    level: Option<String>,
    weight_arg: Option<String>,
    format: Option<Format>,
) -> Outcome {
    let q = parabolic(&cfg.require(q, "q").map_err(fail)?).map_err(fail)?;
    let degree = cfg.require(degree, "degree").map_err(fail)?;
    let level = match cfg.or(level, "level", "gamma0".to_string()).map_err(fail)?.to_lowercase().as_str() {
        "gamma0" | "0" => LevelType::Gamma0,
        "gamma1" | "1" => LevelType::Gamma1,
        other => return Err(usage(format!("unknown level {other:?}: expected gamma0 or gamma1"))),
    };
    let lambda = weight(&cfg.or(weight_arg, "weight", "0,0".to_string()).map_err(fail)?).map_err(fail)?;
    let summands = boundary_summands(q, degree, level, lambda).map_err(fail)?;
    if format == Some(Format::Tsv) {
        let mut out = String::from("stratum\tweylClass\tleviDegree\tmodule\tleviElement\ta\tb\tinduction\ttorsion\n");
        for s in &summands {
            let ind = s.induction_index.as_ref().map_or("-".to_string(), ToString::to_string);
            let hw = &s.highest_weight;
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                s.stratum, s.weyl_class, s.levi_degree, hw.module, hw.levi_element, hw.weight.a, hw.weight.b, ind, s.torsion
            );
        }
        return Ok(out);
    }
    let body = json!({
        "parabolic": q.short_name(),
        "degree": degree,
        "level": level,
        "weight": lambda,
        "summands": summands,
    });
    Ok(with_schema(BOUNDARY_SCHEMA, &body))
}

/// `X^4 - X^3 + 10X^2 - 8X + 64` style rendering, constant term last.
fn render_poly(coefficients: &[BigRational; 5]) -> String {
    let mut out = String::new();
    for k in (0..5).rev() {
        let c = &coefficients[k];
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        let show_mag = k == 0 || !mag.is_one();
        if show_mag {
            out.push_str(&mag.to_string());
        }
        match k {
            0 => {}
            1 => out.push('X'),
            _ => {
                let _ = write!(out, "X^{k}");
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn charpoly(cfg: &FileConfig, args: [Option<String>; 4], format: Option<Format>) -> Outcome {
    let [t, r, s, q] = args;
    let t = rational(&cfg.require(t, "T").map_err(fail)?, "T").map_err(fail)?;
    let r = rational(&cfg.require(r, "R").map_err(fail)?, "R").map_err(fail)?;
    let s = rational(&cfg.require(s, "S").map_err(fail)?, "S").map_err(fail)?;
    let q = rational(&cfg.require(q, "q").map_err(fail)?, "q").map_err(fail)?;
    let poly = char_poly(&t, &r, &s, &q);
    let text = render_poly(&poly.coefficients);
    let autodual = poly.autoduality_holds(&q, &s);
    let out = if format == Some(Format::Json) {
        let body = json!({
            "polynomial": text,
            "coefficients": poly.coefficients.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "autodual": autodual,
        });
        with_schema("gsp4.charpoly.v1", &body)
    } else {
        text + "\n"
    };
    if autodual {
        Ok(out)
    } else {
        Err((CliError::Failed("autoduality identities fail".into()), Some(out)))
    }
}

fn hida(
    cfg: &FileConfig,
    d: Option<u32>,
    delta: Option<u32>,
    types: Option<String>,
    degrees: Option<String>,
    format: Option<Format>,
) -> Outcome {
    let d = cfg.require(d, "d").map_err(fail)?;
    let delta = cfg.or(delta, "delta", 0).map_err(fail)?;
    let types: Vec<ParabolicType> = cfg
        .or(types, "types", "B".to_string())
        .map_err(fail)?
        .split(',')
        .map(parabolic)
        .collect::<Result<_, _>>()
        .map_err(fail)?;
    let degrees: Vec<u32> = match cfg.pick(degrees, "degrees").map_err(fail)? {
        Some(s) => list(&s, "degrees").map_err(fail)?,
        None if types.len() == 1 => vec![d],
        None => vec![1; types.len()],
    };
    if degrees.len() != types.len() {
        return Err(usage("--degrees needs one entry per place in --types"));
    }
    let places = types
        .iter()
        .zip(&degrees)
        .map(|(&parabolic, &local_degree)| PlaceData { local_degree, parabolic })
        .collect();
    let params = HidaGroupParams { d, delta, places };
    let rank = hida_rank(&params).map_err(fail)?;
    if format == Some(Format::Json) {
        Ok(with_schema("gsp4.hida.v1", &json!({ "parameters": params, "rank": rank })))
    } else {
        Ok(format!("{rank}\n"))
    }
}

fn random_padic(rng: &mut ChaCha8Rng, p: u64) -> BigRational {
    if rng.gen_bool(0.15) {
        return BigRational::zero();
    }
    let unit: i64 = loop {
        let n = rng.gen_range(-40i64..=40);
        if n != 0 && n % p as i64 != 0 {
            break n;
        }
    };
    let k: i32 = rng.gen_range(-3..=3);
    let pk = BigInt::from(p).pow(k.unsigned_abs());
    if k >= 0 {
        BigRational::from_integer(BigInt::from(unit) * pk)
    } else {
        BigRational::new(BigInt::from(unit), pk)
    }
}

fn bruhat(
    cfg: &FileConfig,
    u: Option<String>,
    w: Option<String>,
    p: Option<u64>,
    precision: Option<u32>,
    random: Option<usize>,
    seed: u64,
) -> Outcome {
    let p = cfg.or(p, "p", 3).map_err(fail)?;
    let precision = cfg.or(precision, "precision", 8).map_err(fail)?;
    if let Some(n) = cfg.pick(random, "random").map_err(fail)? {
        return bruhat_sweep(n, p, precision, seed);
    }
    let raw: Vec<String> = list(&cfg.require(u, "u").map_err(fail)?, "u").map_err(fail)?;
    let params: Vec<BigRational> = raw.iter().map(|x| rational(x, "u")).collect::<Result<_, _>>().map_err(fail)?;
    let params: [BigRational; 4] = params.try_into().map_err(|_| usage("--u needs four entries x1,x2,x3,x4"))?;
    let w = WeylElement::parse(&cfg.require(w, "w").map_err(fail)?).map_err(fail)?;
    let cert = bruhat_decompose(&params, w, p, precision).map_err(fail)?;
    let verified = verify_certificate(&params, &cert, p);
    let mut body = serde_json::to_value(&cert).expect("report types serialize");
    if let Value::Object(ref mut map) = body {
        map.insert("verified".into(), json!(verified));
        map.insert("iwahori".into(), json!(format!("{:?}", cert.iwahori)));
        map.insert("borel".into(), json!(format!("{:?}", cert.borel)));
    }
    let text = with_schema("gsp4.bruhat.v1", &body);
    if verified {
        Ok(text)
    } else {
        Err((CliError::Failed("certificate does not verify".into()), Some(text)))
    }
}

fn bruhat_sweep(n: usize, p: u64, precision: u32, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let group = weyl_group();
    let (mut verified, mut exhausted, mut hypothesis, mut dropped) = (0usize, 0usize, 0usize, 0usize);
    let mut violations = Vec::new();
    let mut failures = Vec::new();
    for i in 0..n {
        let params: [BigRational; 4] = std::array::from_fn(|_| random_padic(&mut rng, p));
        let w = group[rng.gen_range(0..group.len())];
        let cert = match bruhat_decompose(&params, w, p, precision) {
            Ok(c) => c,
            Err(Error::PrecisionExhausted) => {
                exhausted += 1;
                continue;
            }
            Err(e) => return Err(fail(e)),
        };
        if verify_certificate(&params, &cert, p) {
            verified += 1;
        } else if failures.len() < 5 {
            failures.push(json!({ "sample": i, "w": w }));
        }
        if cert.length_drop_hypothesis {
            hypothesis += 1;
            if cert.w_prime.length() < w.length() {
                dropped += 1;
            } else if violations.len() < 5 {
                let x: Vec<String> = params.iter().map(ToString::to_string).collect();
                violations.push(json!({ "sample": i, "u": x, "w": w, "w_prime": cert.w_prime }));
            }
        }
    }
    let pass = failures.is_empty() && violations.is_empty();
    let body = json!({
        "parameters": { "samples": n, "p": p, "precision": precision, "seed": seed },
        "counts": {
            "verified": verified,
            "precision_exhausted": exhausted,
            "length_drop_hypothesis": hypothesis,
            "length_dropped": dropped,
        },
        "failed_certificates": failures,
        "length_drop_violations": violations,
        "pass": pass,
    });
    let text = with_schema("gsp4.bruhat-sweep.v1", &body);
    if pass {
        Ok(text)
    } else {
        let what = if failures.is_empty() { "length-drop clause violated" } else { "certificate failed to verify" };
        Err((CliError::Failed(what.into()), Some(text)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_rendering() {
        let c = [64, -8, 10, -1, 1].map(|k| BigRational::from_integer(k.into()));
        assert_eq!(render_poly(&c), "X^4 - X^3 + 10X^2 - 8X + 64");
        let c = [0, 0, 0, 0, 1].map(|k| BigRational::from_integer(k.into()));
        assert_eq!(render_poly(&c), "X^4");
        let half = BigRational::new(1.into(), 2.into());
        let c = [half.clone(), BigRational::zero(), BigRational::zero(), -half, BigRational::one()];
        assert_eq!(render_poly(&c), "X^4 - 1/2X^3 + 1/2");
    }
}
