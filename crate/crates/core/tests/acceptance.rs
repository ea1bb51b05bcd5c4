//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use gsp4::arith::{rat, val_rat};
use gsp4::boundary::{hida_rank, HidaGroupParams, PlaceData};
use gsp4::bruhat::bruhat_decompose;
use gsp4::flags::{contraction_report, SemigroupElement};
use gsp4::hecke::{
    char_poly, evaluation_kernel_check, hecke_matrix, hecke_multiply, module_space, spherical_decomposition_count,
    standard_operators, HeckeDoubleCoset,
};
use gsp4::kostant::{kostant_weights, Nilradical};
use gsp4::matrix::RatMat;
use gsp4::polygons::{
    filtration_verdict, hodge_polygon, newton_polygon, ordinary_slopes, polygon_compare, symbolic_hodge_vertices,
    symbolic_newton_vertices, HodgeTateData,
};
use gsp4::roots::{degree_stats, weyl_group, ParabolicType, WeightCharacter, WeylElement};
use gsp4::symplectic::{upper_unipotent, weyl_lift};
use gsp4::tables::emit_tables;
use gsp4::weights::{weyl_dimension, Weight};
use gsp4::Error;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::Wt;

const SEED: u64 = 20_240_501;

/// Enough for the largest flag set at p = 3, r = 2, s = 1.
const CONTRACTION_BUDGET: usize = 200_000;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e(err: Error) -> String {
    err.to_string()
}

const PARABOLICS: [ParabolicType; 3] = [ParabolicType::Borel, ParabolicType::Siegel, ParabolicType::Klingen];

fn golden(name: &str) -> String {
    let path = format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|err| panic!("{path}: {err}"))
}

fn c1_tables() -> Outcome {
    let mut cells = 0;
    for (q, file) in [
        (ParabolicType::Borel, "tables_B.tsv"),
        (ParabolicType::Siegel, "tables_P.tsv"),
        (ParabolicType::Klingen, "tables_Pstar.tsv"),
    ] {
        let got = emit_tables(q).map_err(e)?;
        let want = golden(file);
        for (i, (g, w)) in got.lines().zip(want.lines()).enumerate() {
            ensure(g == w, format!("{file} line {}: got {g:?}, want {w:?}", i + 1))?;
        }
        ensure(got.lines().count() == want.lines().count(), format!("{file}: line counts differ"))?;
        ensure(emit_tables(q).map_err(e)? == got, "output is not byte-stable")?;
        cells += want
            .lines()
            .filter(|l| !l.starts_with('#') && !l.starts_with("w\t") && !l.starts_with("Sigma") && !l.starts_with("q\t"))
            .map(|l| l.split('\t').count() - 1)
            .sum::<usize>();
    }
    Ok(format!("3 strata tables + 3 degree blocks match, {cells} cells"))
}

fn c2_borel_identity() -> Outcome {
    let lengths = common::bfs_lengths();
    for w in weyl_group() {
        let (qp, qf) = degree_stats(ParabolicType::Borel, ParabolicType::Borel, w);
        ensure(qp == qf && qp == 4 - lengths[&w], format!("n_w = {qp} for {w}"))?;
    }
    Ok("n_w = 4 - length(w) for all 8 elements".into())
}

fn c3_contraction() -> Outcome {
    let mut parts = Vec::new();
    for q in PARABOLICS {
        let r = contraction_report(q, 3, 2, 1, CONTRACTION_BUDGET).map_err(e)?;
        ensure(r.pass, format!("{q}: {:?}", r.witnesses))?;
        ensure(r.counts.landed_in_marked_fiber == r.counts.points, format!("{q}: not every point landed"))?;
        if q == ParabolicType::Borel {
            ensure(r.counts.points == 2916, format!("Borel flag count {}", r.counts.points))?;
        }
        parts.push(format!("{}={}", q.short_name(), r.counts.points));
    }
    Ok(format!("all points land in the marked fibre ({})", parts.join(", ")))
}

fn c4_hecke() -> Outcome {
    let b = ParabolicType::Borel;
    let space = module_space(b, 3, 2).map_err(e)?;
    let ops = standard_operators(b, 3, 2).map_err(e)?;
    ensure(ops.len() == 3, "expected T1, T2, T3")?;
    let mats: Vec<_> = ops
        .iter()
        .map(|h| hecke_matrix(h, &space, 2, WeightCharacter::trivial()).map(|m| m.to_dense()))
        .collect::<Result<_, _>>()
        .map_err(e)?;
    for i in 0..3 {
        for j in i + 1..3 {
            ensure(mats[i].mul(&mats[j]) == mats[j].mul(&mats[i]), format!("T{} and T{} do not commute", i + 1, j + 1))?;
        }
    }
    let prod = hecke_multiply(&ops[0], &ops[1]).map_err(e)?;
    ensure(
        prod.unresolved == 0 && prod.terms == vec![(SemigroupElement::d3(), 1)],
        format!("[Cd1C][Cd2C] = {:?} (unresolved {})", prod.terms, prod.unresolved),
    )?;
    let elems = [SemigroupElement::d1(), SemigroupElement::d2(), SemigroupElement::d3()];
    for x in &elems {
        for y in &elems {
            let dx = HeckeDoubleCoset::new(b, 3, 2, *x).map_err(e)?.degree;
            let dy = HeckeDoubleCoset::new(b, 3, 2, *y).map_err(e)?.degree;
            let dxy = HeckeDoubleCoset::new(b, 3, 2, x.mul(y)).map_err(e)?.degree;
            ensure(dxy == dx * dy, format!("degree not multiplicative at {x:?}, {y:?}"))?;
        }
    }
    Ok(format!("dim {} module: T1,T2,T3 commute; T1*T2 = 1*[Cd3C]; degrees multiplicative", space.len()))
}

fn c5_kernel() -> Outcome {
    let mut parts = Vec::new();
    for q in PARABOLICS {
        let r = evaluation_kernel_check(q, 3, 2, 2, WeightCharacter::trivial()).map_err(e)?;
        ensure(r.idempotent_kills_kernel, format!("{q}: e does not kill the kernel: {:?}", r.witnesses))?;
        parts.push(format!("{} rank {}", q.short_name(), r.counts.kernel_rank));
    }
    Ok(format!("e*K = 0 ({})", parts.join(", ")))
}

fn c6_spherical() -> Outcome {
    let p = 3u64;
    let r = spherical_decomposition_count(ParabolicType::Siegel, &SemigroupElement::d1(), p).map_err(e)?;
    let brute = common::brute_force_lagrangians(p) as u128;
    let closed = ((p + 1) * (p * p + 1)) as u128;
    ensure(r.total == brute && brute == closed, format!("count {} vs brute force {brute} vs {closed}", r.total))?;
    Ok(format!("cell total {} = lagrangian count {brute}", r.total))
}

fn nilradical_roots(q: ParabolicType) -> (Vec<Wt>, Option<Wt>) {
    match q {
        ParabolicType::Borel => (common::POS.to_vec(), None),
        ParabolicType::Siegel => (vec![(0, 2), (1, 1), (2, 0)], Some((1, -1))),
        ParabolicType::Klingen => (vec![(1, -1), (1, 1), (2, 0)], Some((0, 2))),
        ParabolicType::Full => unreachable!(),
    }
}

/// Kostant's prediction expanded to `T`-weights, per degree.
fn predicted(q: ParabolicType, lambda: Wt) -> Result<Vec<BTreeMap<Wt, usize>>, String> {
    let (roots, levi) = nilradical_roots(q);
    let k = kostant_weights(Nilradical::Parabolic(q), Weight::new(lambda.0, lambda.1)).map_err(e)?;
    let mut out = vec![BTreeMap::new(); roots.len() + 1];
    for d in &k.degrees {
        for t in &d.terms {
            let mu = (t.weight.a, t.weight.b);
            let weights = match levi {
                None => vec![mu],
                Some(g) => common::levi_string(mu, g),
            };
            for w in weights {
                *out[d.degree].entry(w).or_insert(0) += 1;
            }
        }
    }
    Ok(out)
}

fn c7_kostant() -> Outcome {
    for lambda in [(0, 0), (1, 0), (1, 1), (2, 1)] {
        for q in PARABOLICS {
            let (roots, _) = nilradical_roots(q);
            let ce = common::ce_cohomology(&roots, lambda);
            let want = predicted(q, lambda)?;
            ensure(ce == want, format!("{q}, {lambda:?}: CE {ce:?} vs Kostant {want:?}"))?;
        }
    }
    let mut checked = 0;
    for a in 0..=6 {
        for b in 0..=a {
            let ch = common::freudenthal((a, b));
            for q in PARABOLICS {
                let (roots, _) = nilradical_roots(q);
                let mut lhs: BTreeMap<Wt, i64> = BTreeMap::new();
                for mask in 0u32..(1 << roots.len()) {
                    let sign = if mask.count_ones() % 2 == 0 { 1 } else { -1 };
                    let shift = (0..roots.len())
                        .filter(|i| mask & (1 << i) != 0)
                        .fold((0, 0), |acc, i| (acc.0 - roots[i].0, acc.1 - roots[i].1));
                    for (mu, m) in &ch {
                        *lhs.entry((mu.0 + shift.0, mu.1 + shift.1)).or_insert(0) += sign * *m as i64;
                    }
                }
                lhs.retain(|_, v| *v != 0);
                let mut rhs: BTreeMap<Wt, i64> = BTreeMap::new();
                for (deg, weights) in predicted(q, (a, b))?.into_iter().enumerate() {
                    let sign = if deg % 2 == 0 { 1 } else { -1 };
                    for (w, m) in weights {
                        *rhs.entry(w).or_insert(0) += sign * m as i64;
                    }
                }
                rhs.retain(|_, v| *v != 0);
                ensure(lhs == rhs, format!("Euler characters differ for {q}, ({a},{b})"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("CE oracle agrees on 12 cases; Euler character identity on {checked} cases"))
}

fn c8_dimension() -> Outcome {
    let mut n = 0;
    for a in 0..=6 {
        for b in 0..=a {
            let closed = weyl_dimension(Weight::new(a, b)).map_err(e)?;
            let oracle = common::freudenthal_dimension((a, b));
            ensure(closed == oracle, format!("({a},{b}): {closed} vs {oracle}"))?;
            n += 1;
        }
    }
    ensure(n == 28, "expected 28 weights")?;
    Ok(format!("{n} weights agree with Freudenthal"))
}

fn c9_polygons() -> Outcome {
    let ht = HodgeTateData::from_gsp4(&[(5, 3)], 8, 1, 1).map_err(e)?;
    let borel = ordinary_slopes(ParabolicType::Borel, 1, 1, &[(5, 3)], 8).map_err(e)?;
    let hodge = hodge_polygon(&ht.embeddings[0]).map_err(e)?;
    let newton = newton_polygon(&borel.to_slope_data().map_err(e)?).map_err(e)?;
    ensure(hodge.vertices == newton.vertices, "Borel Newton and Hodge vertices differ")?;
    let cmp = polygon_compare(&newton, &hodge).map_err(e)?;
    ensure(cmp.lies_above, "Newton polygon below Hodge")?;
    let expected: Vec<(BigRational, BigRational)> =
        [(0, 0), (1, 0), (2, 4), (3, 11), (4, 22)].iter().map(|&(x, y)| (rat(x), rat(y))).collect();
    ensure(hodge.vertices == expected, format!("Hodge vertices {:?}", hodge.vertices))?;
    let v = filtration_verdict(&ht, &borel, &[1, 2, 3]).map_err(e)?;
    ensure(
        v.dual_parabolic == Some(ParabolicType::Borel) && v.stable_subspaces_at == [1, 2, 3],
        format!("Borel verdict {:?}", v.dual_parabolic),
    )?;
    let siegel = ordinary_slopes(ParabolicType::Siegel, 1, 1, &[(5, 3)], 8).map_err(e)?;
    let v = filtration_verdict(&ht, &siegel, &[1, 2, 3]).map_err(e)?;
    ensure(
        v.dual_parabolic == Some(ParabolicType::Klingen) && v.stable_dimensions.contains(&3),
        format!("Siegel verdict {:?} at {:?}", v.dual_parabolic, v.stable_subspaces_at),
    )?;
    let show = |l: Vec<(i64, gsp4::polygons::LinExpr)>| l.iter().map(|(_, x)| x.to_string()).collect::<Vec<_>>();
    ensure(show(symbolic_hodge_vertices()) == ["0", "0", "b+1", "a+b+3", "2a+2b+6"], "symbolic Hodge list")?;
    let newton_lists = [
        (ParabolicType::Borel, ["0", "0", "b+1", "a+b+3", "2a+2b+6"]),
        (ParabolicType::Siegel, ["0", "0", "t1", "a+b+3", "2a+2b+6"]),
        (ParabolicType::Klingen, ["0", "t0", "b+1", "a+b+t0+3", "2a+2b+6"]),
    ];
    for (q, want) in newton_lists {
        let got = show(symbolic_newton_vertices(q).map_err(e)?);
        ensure(got == want, format!("symbolic Newton list for {q}: {got:?}"))?;
    }
    Ok("Borel polygons coincide (full flag); Siegel gives the Klingen-dual line; symbolic lists match".into())
}

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    let n: i64 = rng.gen_range(-50..=50);
    let d: i64 = rng.gen_range(1..=50);
    BigRational::new(n.into(), d.into())
}

fn c10_char_poly() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for i in 0..1000 {
        let t = random_rational(&mut rng);
        let r = random_rational(&mut rng);
        let mut s = random_rational(&mut rng);
        let mut q = random_rational(&mut rng);
        if s.is_zero() {
            s = BigRational::one();
        }
        if q.is_zero() {
            q = rat(3);
        }
        let poly = char_poly(&t, &r, &s, &q);
        let c = &poly.coefficients;
        let q3s = &q * &q * &q * &s;
        ensure(c[1] == &c[3] * &q3s && c[0] == &q3s * &q3s, format!("sample {i}: coefficient identity fails"))?;
        // X⁴·P(q³S/X) = (q³S)²·P(X) at five points pins the same identities.
        for k in 1..=5 {
            let x = rat(k) + &t;
            if x.is_zero() {
                continue;
            }
            let lhs = &x * &x * &x * &x * poly.evaluate(&(&q3s / &x));
            ensure(lhs == &q3s * &q3s * poly.evaluate(&x), format!("sample {i}: functional equation fails"))?;
        }
    }
    Ok("1000 samples: c1 = c3*q^3*S and c0 = (q^3*S)^2".into())
}

fn in_iwahori_oracle(m: &RatMat, p: u64) -> bool {
    let f = m.to_flag_basis();
    let integral = (0..4).all(|i| (0..4).all(|j| val_rat(&f.m[i][j], p).is_none_or(|v| v >= 0)));
    let lower_small = (0..4).all(|i| (0..i).all(|j| val_rat(&f.m[i][j], p).is_none_or(|v| v >= 1)));
    let det_unit = val_rat(&f.det(), p) == Some(0);
    integral && lower_small && det_unit
}

fn upper_in_flag_basis(m: &RatMat) -> bool {
    let f = m.to_flag_basis();
    (0..4).all(|i| (0..i).all(|j| f.m[i][j].is_zero()))
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

fn c11_bruhat() -> Outcome {
    let p = 3u64;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0xB70);
    let group = weyl_group();
    let (mut verified, mut exhausted, mut hyp, mut dropped) = (0, 0, 0, 0);
    let mut first_violation: Option<String> = None;
    for i in 0..1000 {
        let params: [BigRational; 4] = std::array::from_fn(|_| random_padic(&mut rng, p));
        let w: WeylElement = group[rng.gen_range(0..group.len())];
        let cert = match bruhat_decompose(&params, w, p, 8) {
            Ok(c) => c,
            Err(Error::PrecisionExhausted) => {
                exhausted += 1;
                continue;
            }
            Err(err) => return Err(format!("sample {i}: {err}")),
        };
        let lhs = upper_unipotent(&params).mul(&weyl_lift(w));
        let rhs = cert.iwahori.mul(&weyl_lift(cert.w_prime)).mul(&cert.borel);
        ensure(lhs == rhs, format!("sample {i}: factorization does not remultiply"))?;
        ensure(in_iwahori_oracle(&cert.iwahori, p), format!("sample {i}: left factor not Iwahori"))?;
        ensure(upper_in_flag_basis(&cert.borel), format!("sample {i}: right factor not in B"))?;
        ensure(common::subword_leq(cert.w_prime, w), format!("sample {i}: {} is not below {w}", cert.w_prime))?;
        verified += 1;
        if cert.length_drop_hypothesis {
            hyp += 1;
            if cert.w_prime.length() < w.length() {
                dropped += 1;
            } else if first_violation.is_none() {
                first_violation = Some(format!("sample {i}: w = {w}, w' = {}", cert.w_prime));
            }
        }
    }
    let summary = format!(
        "{verified} certificates verified, {exhausted} precision-exhausted; length drop in {dropped}/{hyp} cases meeting its hypothesis"
    );
    match first_violation {
        None => Ok(summary),
        Some(v) => Err(format!("{summary}; length-drop clause violated ({v})")),
    }
}

fn c12_hida() -> Outcome {
    ensure(hida_rank(&HidaGroupParams::uniform(1, 0, ParabolicType::Borel)).map_err(e)? == 3, "F = Q Borel rank")?;
    let mut n = 0;
    for d in 1..=5u32 {
        for delta in 0..=3u32 {
            let split = HidaGroupParams {
                d,
                delta,
                places: vec![PlaceData { local_degree: 1, parabolic: ParabolicType::Borel }; d as usize],
            };
            let inert = HidaGroupParams::uniform(d, delta, ParabolicType::Borel);
            for params in [split, inert] {
                ensure(hida_rank(&params).map_err(e)? == 2 * d + 1 + delta, format!("d = {d}, delta = {delta}"))?;
                n += 1;
            }
        }
    }
    Ok(format!("rank 3 over Q; 2d+1+delta on {n} all-Borel inputs"))
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "table reproduction", budget: Duration::from_secs(1), run: c1_tables },
        Criterion { id: 2, name: "B-table identity", budget: Duration::from_secs(1), run: c2_borel_identity },
        Criterion { id: 3, name: "contraction", budget: Duration::from_secs(60), run: c3_contraction },
        Criterion { id: 4, name: "Hecke algebra", budget: Duration::from_secs(60), run: c4_hecke },
        Criterion { id: 5, name: "idempotent annihilation", budget: Duration::from_secs(60), run: c5_kernel },
        Criterion { id: 6, name: "spherical degree", budget: Duration::from_secs(10), run: c6_spherical },
        Criterion { id: 7, name: "Kostant vs brute force", budget: Duration::from_secs(120), run: c7_kostant },
        Criterion { id: 8, name: "Weyl dimension", budget: Duration::from_secs(10), run: c8_dimension },
        Criterion { id: 9, name: "polygon pipeline", budget: Duration::from_secs(1), run: c9_polygons },
        Criterion { id: 10, name: "char-poly autoduality", budget: Duration::from_secs(1), run: c10_char_poly },
        Criterion { id: 11, name: "Bruhat certificates", budget: Duration::from_secs(60), run: c11_bruhat },
        Criterion { id: 12, name: "Hida rank", budget: Duration::from_secs(1), run: c12_hida },
    ];
    let filter: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for c in criteria.iter().filter(|c| filter.is_none_or(|f| f == c.id)) {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > c.budget => Err(format!("{detail} (took {elapsed:.2?}, budget {:?})", c.budget)),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {} [{elapsed:.2?}]: {detail}", c.id, c.name),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {} [{elapsed:.2?}]: {detail}", c.id, c.name);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
