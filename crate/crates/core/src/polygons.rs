//! Hodge and Newton polygons for 4-dimensional crystalline data: Hodge–Tate weights of
//! a `GSp4` weight, slopes forced by ordinarity for a parabolic, polygon comparison and
//! the induced-representation vertex criterion producing stable filtrations.
//!
//! Polygons are normalized so that the coefficient field never enters vertex coordinates;
//! the induced mode scales abscissae by `[K : Q_p]` instead.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{rat, rat_frac};
use crate::roots::ParabolicType;
use crate::{Error, Result};

pub const VERDICT_SCHEMA: &str = "gsp4.verdict.v1";

/// The four Hodge–Tate weights `((a+b+c)/2+3, (a−b+c)/2+2, (−a+b+c)/2+1, (−a−b+c)/2)`.
pub fn hodge_tate_weights(a: i64, b: i64, c: i64) -> Result<[i64; 4]> {
    if (a + b - c).rem_euclid(2) != 0 {
        return Err(Error::ParityViolation);
    }
    Ok([(a + b + c) / 2 + 3, (a - b + c) / 2 + 2, (-a + b + c) / 2 + 1, (-a - b + c) / 2])
}

/// Hodge–Tate weights of one embedding, strictly increasing, with their Hodge numbers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingWeights {
    pub weights: Vec<i64>,
    pub hodge_numbers: Vec<u64>,
}

/// Hodge–Tate data of a representation of `Gal(K̄/K)`, one entry per embedding of `K`,
/// with `[K : Q_p] = e·f`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HodgeTateData {
    pub embeddings: Vec<EmbeddingWeights>,
    pub e: u32,
    pub f: u32,
}

impl HodgeTateData {
    pub fn new(embeddings: Vec<EmbeddingWeights>, e: u32, f: u32) -> Result<Self> {
        if e == 0 || f == 0 || embeddings.is_empty() {
            return Err(Error::InvalidInput("empty Hodge–Tate data".into()));
        }
        for emb in &embeddings {
            if emb.weights.len() != emb.hodge_numbers.len() || emb.weights.is_empty() {
                return Err(Error::InvalidInput("weights and Hodge numbers differ in length".into()));
            }
            if emb.weights.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::UnsortedInput);
            }
            if emb.hodge_numbers.contains(&0) {
                return Err(Error::InvalidInput("Hodge numbers must be positive".into()));
            }
        }
        Ok(HodgeTateData { embeddings, e, f })
    }

    /// Data attached to a `GSp4` weight with one `(a_σ, b_σ)` per embedding above `p`.
    pub fn from_gsp4(weights: &[(i64, i64)], c: i64, e: u32, f: u32) -> Result<Self> {
        if weights.len() != (e * f) as usize {
            return Err(Error::InvalidInput(format!(
                "{} embeddings given for a local degree {}",
                weights.len(),
                e * f
            )));
        }
        let mut embeddings = Vec::new();
        for &(a, b) in weights {
            let mut w = hodge_tate_weights(a, b, c)?.to_vec();
            w.sort_unstable();
            if w.windows(2).any(|x| x[0] == x[1]) {
                return Err(Error::InvalidInput("Hodge–Tate weights collide".into()));
            }
            embeddings.push(EmbeddingWeights { weights: w, hodge_numbers: vec![1; 4] });
        }
        HodgeTateData::new(embeddings, e, f)
    }

    pub fn local_degree(&self) -> u32 {
        self.e * self.f
    }

    /// (Indep I) and (Indep II): same number of weights and same Hodge numbers everywhere.
    pub fn check_independence(&self) -> Result<()> {
        let first = &self.embeddings[0].hodge_numbers;
        if self.embeddings.iter().all(|e| &e.hodge_numbers == first) {
            Ok(())
        } else {
            Err(Error::IndependenceViolated)
        }
    }

    pub fn dimension(&self) -> u64 {
        self.embeddings[0].hodge_numbers.iter().sum()
    }
}

/// Frobenius slopes `α_1 < … < α_l` with multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlopeData {
    pub slopes: Vec<BigRational>,
    pub multiplicities: Vec<u64>,
}

impl SlopeData {
    pub fn new(slopes: Vec<BigRational>, multiplicities: Vec<u64>) -> Result<Self> {
        if slopes.len() != multiplicities.len() || slopes.is_empty() {
            return Err(Error::InvalidInput("slopes and multiplicities differ in length".into()));
        }
        if slopes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::UnsortedInput);
        }
        Ok(SlopeData { slopes, multiplicities })
    }

    /// Groups a weakly increasing list of slopes into distinct values with multiplicities.
    pub fn from_sorted_list(list: &[BigRational]) -> Result<Self> {
        if list.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::UnsortedInput);
        }
        let mut slopes: Vec<BigRational> = Vec::new();
        let mut mult: Vec<u64> = Vec::new();
        for s in list {
            if slopes.last() == Some(s) {
                *mult.last_mut().unwrap() += 1;
            } else {
                slopes.push(s.clone());
                mult.push(1);
            }
        }
        SlopeData::new(slopes, mult)
    }

    pub fn dimension(&self) -> u64 {
        self.multiplicities.iter().sum()
    }
}

pub type Point = (BigRational, BigRational);

/// A lower convex polygon given by its break points, starting at the origin.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polygon {
    pub vertices: Vec<Point>,
}

impl Polygon {
    /// Concatenates segments of the given slopes and horizontal lengths.
    /// Slopes must be strictly increasing.
    pub fn from_segments(segments: &[(BigRational, BigRational)]) -> Result<Self> {
        if segments.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::UnsortedInput);
        }
        let mut x = BigRational::zero();
        let mut y = BigRational::zero();
        let mut vertices = vec![(x.clone(), y.clone())];
        for (slope, len) in segments {
            if !len.is_positive() {
                return Err(Error::InvalidInput("segment lengths must be positive".into()));
            }
            x += len;
            y += slope * len;
            vertices.push((x.clone(), y.clone()));
        }
        Ok(Polygon { vertices })
    }

    /// Unit-length segments, one per listed slope; the list must be weakly increasing.
    pub fn from_unit_slopes(slopes: &[BigRational]) -> Result<Self> {
        if slopes.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::UnsortedInput);
        }
        let mut x = BigRational::zero();
        let mut y = BigRational::zero();
        let mut vertices = vec![(x.clone(), y.clone())];
        for s in slopes {
            x += rat(1);
            y += s;
            vertices.push((x.clone(), y.clone()));
        }
        Ok(Polygon { vertices })
    }

    pub fn width(&self) -> &BigRational {
        &self.vertices.last().unwrap().0
    }

    pub fn height(&self) -> &BigRational {
        &self.vertices.last().unwrap().1
    }

    /// Points where the slope genuinely changes, plus both endpoints.
    pub fn genuine_vertices(&self) -> Vec<Point> {
        let v = &self.vertices;
        let mut out = vec![v[0].clone()];
        for i in 1..v.len().saturating_sub(1) {
            let s1 = (&v[i].1 - &v[i - 1].1) / (&v[i].0 - &v[i - 1].0);
            let s2 = (&v[i + 1].1 - &v[i].1) / (&v[i + 1].0 - &v[i].0);
            if s1 != s2 {
                out.push(v[i].clone());
            }
        }
        if v.len() > 1 {
            out.push(v[v.len() - 1].clone());
        }
        out
    }

    /// Height at abscissa `x` by linear interpolation; `None` outside `[0, width]`.
    pub fn height_at(&self, x: &BigRational) -> Option<BigRational> {
        let v = &self.vertices;
        if x < &v[0].0 || x > &v[v.len() - 1].0 {
            return None;
        }
        for w in v.windows(2) {
            if x >= &w[0].0 && x <= &w[1].0 {
                let t = (x - &w[0].0) / (&w[1].0 - &w[0].0);
                return Some(&w[0].1 + t * (&w[1].1 - &w[0].1));
            }
        }
        None
    }

    pub fn is_convex(&self) -> bool {
        let v = &self.vertices;
        let slopes: Vec<BigRational> =
            v.windows(2).map(|w| (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0)).collect();
        v.windows(2).all(|w| w[0].0 < w[1].0) && slopes.windows(2).all(|s| s[0] <= s[1])
    }

    /// Tab-separated vertex dump, one `x\ty` line per vertex.
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("x\ty\n");
        for (x, y) in &self.vertices {
            s.push_str(&format!("{x}\t{y}\n"));
        }
        s
    }
}

/// Hodge polygon of one embedding: each weight contributes a segment of its Hodge number.
pub fn hodge_polygon(emb: &EmbeddingWeights) -> Result<Polygon> {
    let segs: Vec<(BigRational, BigRational)> = emb
        .weights
        .iter()
        .zip(&emb.hodge_numbers)
        .map(|(&w, &h)| (rat(w), rat(h as i64)))
        .collect();
    Polygon::from_segments(&segs)
}

pub fn newton_polygon(sd: &SlopeData) -> Result<Polygon> {
    let segs: Vec<(BigRational, BigRational)> = sd
        .slopes
        .iter()
        .zip(&sd.multiplicities)
        .map(|(s, &m)| (s.clone(), rat(m as i64)))
        .collect();
    Polygon::from_segments(&segs)
}

/// Hodge polygon of the representation induced to `Q_p`: all weights of all embeddings.
pub fn induced_hodge_polygon(ht: &HodgeTateData) -> Result<Polygon> {
    let mut all: BTreeMap<i64, u64> = BTreeMap::new();
    for emb in &ht.embeddings {
        for (&w, &h) in emb.weights.iter().zip(&emb.hodge_numbers) {
            *all.entry(w).or_default() += h;
        }
    }
    let segs: Vec<(BigRational, BigRational)> =
        all.into_iter().map(|(w, h)| (rat(w), rat(h as i64))).collect();
    Polygon::from_segments(&segs)
}

/// Newton polygon of the induced representation: multiplicities scaled by `[K : Q_p]`.
pub fn induced_newton_polygon(sd: &SlopeData, local_degree: u32) -> Result<Polygon> {
    let scaled = SlopeData {
        slopes: sd.slopes.clone(),
        multiplicities: sd.multiplicities.iter().map(|m| m * local_degree as u64).collect(),
    };
    newton_polygon(&scaled)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolygonComparison {
    pub lies_above: bool,
    pub meeting_vertices: Vec<Point>,
}

/// Exact comparison of a Newton polygon against a Hodge polygon of the same width.
/// Meeting vertices are the points that are genuine vertices of both polygons.
pub fn polygon_compare(newton: &Polygon, hodge: &Polygon) -> Result<PolygonComparison> {
    if newton.width() != hodge.width() || newton.vertices[0] != hodge.vertices[0] {
        return Err(Error::EndpointMismatch);
    }
    let mut xs: Vec<BigRational> = newton.vertices.iter().map(|v| v.0.clone()).collect();
    xs.extend(hodge.vertices.iter().map(|v| v.0.clone()));
    let lies_above = xs.iter().all(|x| newton.height_at(x).unwrap() >= hodge.height_at(x).unwrap());
    let hv = hodge.genuine_vertices();
    let meeting_vertices = newton.genuine_vertices().into_iter().filter(|v| hv.contains(v)).collect();
    Ok(PolygonComparison { lies_above, meeting_vertices })
}

/// (Sep t): `a_σ^t < a_σ'^{t+1}` for all embeddings `σ, σ'` (weights indexed from 1).
pub fn sep_check(ht: &HodgeTateData, t: usize) -> bool {
    if t == 0 || ht.embeddings.iter().any(|e| e.weights.len() <= t) {
        return false;
    }
    ht.embeddings
        .iter()
        .all(|x| ht.embeddings.iter().all(|y| x.weights[t - 1] < y.weights[t]))
}

/// Slope information for the four roots of the Hecke polynomial at `v`, normalized by
/// `v(p) = 1`: `alpha[i]` when individually known and the partial sums
/// `prefix[t] = α_0 + … + α_{t−1}` when known.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrdinarySlopes {
    pub parabolic: ParabolicType,
    pub f: u32,
    pub alpha: [Option<BigRational>; 4],
    pub prefix: [Option<BigRational>; 5],
}

impl OrdinarySlopes {
    fn from_parts(q: ParabolicType, f: u32, alpha: [Option<BigRational>; 4], pair: BigRational) -> Self {
        let mut prefix: [Option<BigRational>; 5] = Default::default();
        prefix[0] = Some(BigRational::zero());
        prefix[4] = Some(&pair + &pair);
        let mut acc = Some(BigRational::zero());
        for i in 0..4 {
            acc = match (acc, &alpha[i]) {
                (Some(s), Some(a)) => Some(s + a),
                _ => None,
            };
            if acc.is_some() {
                prefix[i + 1] = acc.clone();
            }
        }
        OrdinarySlopes { parabolic: q, f, alpha, prefix }
    }

    /// Absolute Frobenius slopes `α_i / f`, when every slope is determined.
    pub fn to_slope_data(&self) -> Result<SlopeData> {
        let mut list = Vec::new();
        for (i, a) in self.alpha.iter().enumerate() {
            match a {
                Some(x) => list.push(x / rat(self.f as i64)),
                None => {
                    return Err(Error::UnderdeterminedCase(format!(
                        "alpha_{i} is not determined for {}",
                        self.parabolic.short_name()
                    )))
                }
            }
        }
        SlopeData::from_sorted_list(&list)
    }

    /// `α_0 + … + α_{t−1}` divided by `f`, when known.
    pub fn absolute_prefix(&self, t: usize) -> Option<BigRational> {
        self.prefix.get(t)?.as_ref().map(|s| s / rat(self.f as i64))
    }
}

/// Slopes forced by `Q`-ordinarity at a place with ramification `e`, residue degree `f`,
/// one `(a_σ, b_σ)` per embedding above the place and central integer `c`.
///
/// * Borel: `α_0 = Σ(c−a_σ−b_σ)/2e`, `α_1 = f + Σ(c+b_σ−a_σ)/2e`, and the rest by
///   `α_0 + α_3 = α_1 + α_2 = f(3+c)`.
/// * Siegel: `α_0` as above and `α_3 = f(3+c) − α_0`; `α_1, α_2` individually unknown.
/// * Klingen: only `α_0 + α_1 = f + Σ(c−a_σ)/e` and its complement are known.
pub fn ordinary_slopes(q: ParabolicType, e: u32, f: u32, weights: &[(i64, i64)], c: i64) -> Result<OrdinarySlopes> {
    if e == 0 || f == 0 || weights.is_empty() {
        return Err(Error::InvalidInput("empty slope input".into()));
    }
    for &(a, b) in weights {
        if (a + b - c).rem_euclid(2) != 0 {
            return Err(Error::ParityViolation);
        }
    }
    let e_r = rat(e as i64);
    let f_r = rat(f as i64);
    let pair = &f_r * rat(3 + c);
    let sum = |g: &dyn Fn(i64, i64) -> i64| weights.iter().map(|&(a, b)| g(a, b)).sum::<i64>();
    let a0 = rat(sum(&|a, b| c - a - b)) / (rat(2) * &e_r);
    match q {
        ParabolicType::Borel => {
            let a1 = &f_r + rat(sum(&|a, b| c + b - a)) / (rat(2) * &e_r);
            let a2 = &pair - &a1;
            let a3 = &pair - &a0;
            let out = OrdinarySlopes::from_parts(q, f, [Some(a0), Some(a1), Some(a2), Some(a3)], pair.clone());
            check_pairing(&out, &pair)?;
            Ok(out)
        }
        ParabolicType::Siegel => {
            let a3 = &pair - &a0;
            let mut out = OrdinarySlopes::from_parts(q, f, [Some(a0.clone()), None, None, Some(a3)], pair.clone());
            out.prefix[3] = Some(&a0 + &pair);
            Ok(out)
        }
        ParabolicType::Klingen => {
            let s01 = &f_r + rat(sum(&|a, _| c - a)) / &e_r;
            let mut out = OrdinarySlopes::from_parts(q, f, [None, None, None, None], pair);
            out.prefix[2] = Some(s01);
            Ok(out)
        }
        ParabolicType::Full => Err(Error::InvalidInput("ordinarity needs a proper parabolic".into())),
    }
}

/// Slopes from caller-supplied valuations: `v_t = v(λ(T))` determines `α_0`, and
/// `v_qr = v(λ(q·R))` (the operator `R` already multiplied by the residue cardinality)
/// determines `α_0 + α_1`.
pub fn slopes_from_valuations(
    q: ParabolicType,
    f: u32,
    c: i64,
    v_t: Option<BigRational>,
    v_qr: Option<BigRational>,
) -> Result<OrdinarySlopes> {
    let pair = rat(f as i64) * rat(3 + c);
    let need = |v: Option<BigRational>, what: &str| {
        v.ok_or_else(|| Error::UnderdeterminedCase(format!("{what} is required for {}", q.short_name())))
    };
    match q {
        ParabolicType::Siegel => {
            let a0 = need(v_t, "v(T)")?;
            let mut out =
                OrdinarySlopes::from_parts(q, f, [Some(a0.clone()), None, None, Some(&pair - &a0)], pair.clone());
            out.prefix[3] = Some(&a0 + &pair);
            Ok(out)
        }
        ParabolicType::Klingen => {
            let s01 = need(v_qr, "v(qR)")?;
            let mut out = OrdinarySlopes::from_parts(q, f, [None, None, None, None], pair);
            out.prefix[2] = Some(s01);
            Ok(out)
        }
        ParabolicType::Borel => {
            let a0 = need(v_t, "v(T)")?;
            let a1 = need(v_qr, "v(qR)")? - &a0;
            let out = OrdinarySlopes::from_parts(
                q,
                f,
                [Some(a0.clone()), Some(a1.clone()), Some(&pair - &a1), Some(&pair - &a0)],
                pair.clone(),
            );
            check_pairing(&out, &pair)?;
            Ok(out)
        }
        ParabolicType::Full => Err(Error::InvalidInput("ordinarity needs a proper parabolic".into())),
    }
}

fn check_pairing(s: &OrdinarySlopes, pair: &BigRational) -> Result<()> {
    if let [Some(a0), Some(a1), Some(a2), Some(a3)] = &s.alpha {
        if &(a0 + a3) != pair || &(a1 + a2) != pair {
            return Err(Error::CounterexampleFound("slope pairing identity fails".into()));
        }
    }
    Ok(())
}

/// The parabolic of the dual group whose shape the Galois image is expected to take.
pub fn langlands_dual(q: ParabolicType) -> ParabolicType {
    match q {
        ParabolicType::Siegel => ParabolicType::Klingen,
        ParabolicType::Klingen => ParabolicType::Siegel,
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BreakpointDiagnostic {
    pub t: usize,
    pub separated: bool,
    pub testable: bool,
    pub hodge_side: Option<BigRational>,
    pub newton_side: Option<BigRational>,
    pub passes: bool,
    pub stable_dimension: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationVerdict {
    pub schema: String,
    pub stable_subspaces_at: Vec<usize>,
    pub stable_dimensions: Vec<u64>,
    pub dual_parabolic: Option<ParabolicType>,
    pub diagnostics: Vec<BreakpointDiagnostic>,
}

/// Tests the induced-polygon vertex equality at each requested breakpoint `t`:
/// `Σ_{i≤t} h_i Σ_σ a_σ^i = [K:Q_p] · Σ_{i≤t} α_i d_i` (absolute slopes, one per root),
/// under (Sep t). Each passing `t` yields a stable subspace of dimension `Σ_{i>t} h_i`.
/// A break at 2 alone reads as a Siegel-type stable plane, breaks at 1 or 3 as a
/// Klingen-type stable line (or its orthogonal), and both kinds together as a full flag.
pub fn filtration_verdict(ht: &HodgeTateData, slopes: &OrdinarySlopes, breakpoints: &[usize]) -> Result<FiltrationVerdict> {
    ht.check_independence()?;
    let h = &ht.embeddings[0].hodge_numbers;
    if h.len() != 4 || h.iter().any(|&x| x != 1) {
        return Err(Error::InvalidInput("the verdict expects four weights with Hodge number 1".into()));
    }
    let degree = rat(ht.local_degree() as i64);
    let mut diagnostics = Vec::new();
    let mut passed = Vec::new();
    let mut dims = Vec::new();
    let mut sorted: Vec<usize> = breakpoints.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for t in sorted {
        if t == 0 || t >= 4 {
            return Err(Error::InvalidInput(format!("breakpoint {t} outside 1..=3")));
        }
        let separated = sep_check(ht, t);
        let hodge_side: BigRational =
            ht.embeddings.iter().map(|e| rat(e.weights[..t].iter().sum::<i64>())).sum();
        let newton_side = slopes.absolute_prefix(t).map(|s| &degree * s);
        let testable = newton_side.is_some();
        let passes = separated && newton_side.as_ref() == Some(&hodge_side);
        let stable_dimension = passes.then(|| h[t..].iter().sum());
        if passes {
            passed.push(t);
            dims.push(stable_dimension.unwrap());
        }
        diagnostics.push(BreakpointDiagnostic {
            t,
            separated,
            testable,
            hodge_side: Some(hodge_side),
            newton_side,
            passes,
            stable_dimension,
        });
    }
    let middle = passed.contains(&2);
    let outer = passed.contains(&1) || passed.contains(&3);
    let dual_parabolic = match (middle, outer) {
        (true, true) => Some(ParabolicType::Borel),
        (true, false) => Some(ParabolicType::Siegel),
        (false, true) => Some(ParabolicType::Klingen),
        (false, false) => None,
    };
    Ok(FiltrationVerdict {
        schema: VERDICT_SCHEMA.to_string(),
        stable_subspaces_at: passed,
        stable_dimensions: dims,
        dual_parabolic,
        diagnostics,
    })
}

/// An affine expression `k + Σ c_x·x` in named symbols with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LinExpr {
    pub constant: BigRational,
    pub terms: BTreeMap<String, BigRational>,
}

impl LinExpr {
    pub fn constant(k: i64) -> Self {
        LinExpr { constant: rat(k), terms: BTreeMap::new() }
    }

    pub fn var(name: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(name.to_string(), rat(1));
        LinExpr { constant: BigRational::zero(), terms }
    }

    /// Builds `k + Σ c_x·x` from integer coefficients.
    pub fn from_terms(k: i64, terms: &[(&str, i64)]) -> Self {
        let mut out = LinExpr::constant(k);
        for &(name, c) in terms {
            out = out.add(&LinExpr::var(name).scale(&rat(c)));
        }
        out
    }

    pub fn add(&self, o: &LinExpr) -> LinExpr {
        let mut terms = self.terms.clone();
        for (k, v) in &o.terms {
            let e = terms.entry(k.clone()).or_insert_with(BigRational::zero);
            *e += v;
        }
        terms.retain(|_, v| !v.is_zero());
        LinExpr { constant: &self.constant + &o.constant, terms }
    }

    pub fn neg(&self) -> LinExpr {
        self.scale(&rat(-1))
    }

    pub fn sub(&self, o: &LinExpr) -> LinExpr {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &BigRational) -> LinExpr {
        let mut terms: BTreeMap<String, BigRational> =
            self.terms.iter().map(|(n, v)| (n.clone(), v * k)).collect();
        terms.retain(|_, v| !v.is_zero());
        LinExpr { constant: &self.constant * k, terms }
    }

    pub fn coeff(&self, name: &str) -> BigRational {
        self.terms.get(name).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn evaluate(&self, values: &BTreeMap<String, BigRational>) -> Option<BigRational> {
        let mut acc = self.constant.clone();
        for (k, v) in &self.terms {
            acc += v * values.get(k)?;
        }
        Some(acc)
    }

    /// `true` when the expression is positive for every integer pair `a ≥ b ≥ 0` and
    /// involves no other symbol.
    pub fn positive_on_dominant_chamber(&self) -> bool {
        if self.terms.keys().any(|k| k != "a" && k != "b") {
            return false;
        }
        let ca = self.coeff("a");
        let cb = self.coeff("b");
        !ca.is_negative() && !(&ca + &cb).is_negative() && self.constant.is_positive()
    }
}

impl fmt::Display for LinExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (name, c) in &self.terms {
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{sign}")?;
            }
            if mag != rat(1) {
                write!(f, "{mag}")?;
            }
            write!(f, "{name}")?;
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)
        } else if self.constant.is_positive() {
            write!(f, "+{}", self.constant)
        } else if self.constant.is_negative() {
            write!(f, "-{}", -&self.constant)
        } else {
            Ok(())
        }
    }
}

/// Hodge–Tate weights after the twist `c = a + b`, in increasing order on the regular
/// dominant chamber: `0, b+1, a+2, a+b+3`.
pub fn symbolic_hodge_tate_weights() -> Vec<LinExpr> {
    let a = LinExpr::var("a");
    let b = LinExpr::var("b");
    let c = a.add(&b);
    let half = rat_frac(1, 2);
    let mut w = vec![
        a.add(&b).add(&c).scale(&half).add(&LinExpr::constant(3)),
        a.sub(&b).add(&c).scale(&half).add(&LinExpr::constant(2)),
        b.sub(&a).add(&c).scale(&half).add(&LinExpr::constant(1)),
        c.sub(&a).sub(&b).scale(&half),
    ];
    w.sort_by(|x, y| {
        if x == y {
            std::cmp::Ordering::Equal
        } else if y.sub(x).positive_on_dominant_chamber() {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    });
    w
}

pub type SymbolicVertex = (i64, LinExpr);

fn partial_sums(slopes: &[LinExpr]) -> Vec<SymbolicVertex> {
    let mut acc = LinExpr::default();
    let mut out = vec![(0, acc.clone())];
    for (i, s) in slopes.iter().enumerate() {
        acc = acc.add(s);
        out.push((i as i64 + 1, acc.clone()));
    }
    out
}

/// Vertices of the Hodge polygon for symbolic `(a, b)` with `c = a + b`.
pub fn symbolic_hodge_vertices() -> Vec<SymbolicVertex> {
    partial_sums(&symbolic_hodge_tate_weights())
}

/// Vertices of the Newton polygon forced by `Q`-ordinarity for symbolic `(a, b)`,
/// `c = a + b`, `e = f = 1`. Undetermined slopes are named `t0` (Klingen: the smallest
/// slope) and `t1` (Siegel: the second slope).
pub fn symbolic_newton_vertices(q: ParabolicType) -> Result<Vec<SymbolicVertex>> {
    let a = LinExpr::var("a");
    let b = LinExpr::var("b");
    let c = a.add(&b);
    let half = rat_frac(1, 2);
    let pair = c.add(&LinExpr::constant(3));
    let a0 = c.sub(&a).sub(&b).scale(&half);
    let slopes = match q {
        ParabolicType::Borel => {
            let a1 = LinExpr::constant(1).add(&c.add(&b).sub(&a).scale(&half));
            vec![a0.clone(), a1.clone(), pair.sub(&a1), pair.sub(&a0)]
        }
        ParabolicType::Siegel => {
            let a1 = LinExpr::var("t1");
            vec![a0.clone(), a1.clone(), pair.sub(&a1), pair.sub(&a0)]
        }
        ParabolicType::Klingen => {
            let a0 = LinExpr::var("t0");
            let s01 = LinExpr::constant(1).add(&c.sub(&a));
            let a1 = s01.sub(&a0);
            vec![a0.clone(), a1.clone(), pair.sub(&a1), pair.sub(&a0)]
        }
        ParabolicType::Full => return Err(Error::InvalidInput("ordinarity needs a proper parabolic".into())),
    };
    Ok(partial_sums(&slopes))
}
