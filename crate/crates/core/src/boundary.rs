//! Ordinary boundary cohomology over `Q`: graded summands per degree, cusp fibres,
//! the Hida–Iwasawa rank and the contribution filter for Eisenstein classes.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::arith::{check_odd_prime, modulus, rat, rat_frac};
use crate::kostant::{kostant_weights, Nilradical};
use crate::roots::{degree_stats, double_cosets, weyl_group, ParabolicType, WeylElement};
use crate::tables::selector_element;
use crate::weights::{HighestWeight, Weight, RHO};
use crate::{Error, Result};

pub const BOUNDARY_SCHEMA: &str = "gsp4.boundary.v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LevelType {
    Gamma0,
    Gamma1,
}

/// The coefficient module `L_{Σ,w,l}` and the highest weight describing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientWeight {
    pub module: String,
    pub levi_element: String,
    pub weight: Weight,
}

/// The subgroup one induces from in the `Γ1` description: `T¹_{Σ,w}(Z/p^r)·Ē` (or `Ē`
/// alone), mapped into `ambient` (`T` for the Borel, `C_Q` for a maximal parabolic).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InductionIndex {
    pub torus: Option<(String, String)>,
    pub ambient: String,
}

impl fmt::Display for InductionIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.torus {
            Some((s, w)) => write!(f, "T1[{s},{w}](Z/p^r).E -> {}(Z/p^r)", self.ambient),
            None => write!(f, "E -> {}(Z/p^r)", self.ambient),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundarySummand {
    pub stratum: String,
    pub weyl_class: String,
    pub levi_degree: u32,
    pub highest_weight: CoefficientWeight,
    pub induction_index: Option<InductionIndex>,
    pub torsion: bool,
}

fn coefficient(q: ParabolicType, sigma: ParabolicType, w: WeylElement, l: usize, lambda: Weight) -> Result<CoefficientWeight> {
    let coh = kostant_weights(Nilradical::Stratum { q, sigma, w }, lambda)?;
    let datum = coh.degrees.iter().find(|d| d.degree == l).filter(|d| d.terms.len() == 1).ok_or_else(|| {
        Error::HypothesisViolated(format!("no single Kostant weight for ({sigma}, {w}) in degree {l}"))
    })?;
    let term = &datum.terms[0];
    let module = if q == ParabolicType::Borel {
        format!("L_{{{},{}}}", sigma.short_name(), w.name())
    } else {
        format!("L_{{{},{},{}}}", sigma.short_name(), w.name(), l)
    };
    Ok(CoefficientWeight { module, levi_element: term.v.name().to_string(), weight: term.weight })
}

fn induction(q: ParabolicType, sigma: ParabolicType, w: WeylElement, level: LevelType, with_torus: bool) -> Option<InductionIndex> {
    if level == LevelType::Gamma0 {
        return None;
    }
    let ambient = if q == ParabolicType::Borel { "T".to_string() } else { format!("C_{}", q.short_name()) };
    let torus = with_torus.then(|| (sigma.short_name().to_string(), w.name().to_string()));
    Some(InductionIndex { torus, ambient })
}

/// Graded pieces of the ordinary boundary cohomology over `Q` in degree `q`.
///
/// For the Borel: nothing in degrees 0 and 5; the Borel-stratum classes with `n_w = q`
/// in degrees 1 and 4; and in degrees 1 to 4 one cuspidal `H¹` for each maximal stratum at
/// the selected class. For a maximal `Q` (degree 3 only): an `H¹` for each maximal
/// stratum class whose degree window contains 2, and the torsion `H⁰` of the stratum
/// `Σ = Q`, `w = id` with coefficients in degree 3.
pub fn boundary_summands(q: ParabolicType, degree: u32, level: LevelType, lambda: Weight) -> Result<Vec<BoundarySummand>> {
    if !lambda.is_dominant() {
        return Err(Error::NonDominant);
    }
    let maximal = [ParabolicType::Siegel, ParabolicType::Klingen];
    let mut out = Vec::new();
    match q {
        ParabolicType::Borel => {
            if degree > 5 {
                return Err(Error::UnsupportedDegree(degree));
            }
            if degree == 0 || degree == 5 {
                return Ok(out);
            }
            if degree == 1 || degree == 4 {
                for class in double_cosets(q, ParabolicType::Borel) {
                    let (n, _) = degree_stats(q, ParabolicType::Borel, class.label);
                    if n == degree as usize {
                        out.push(BoundarySummand {
                            stratum: "B".into(),
                            weyl_class: class.label.name().into(),
                            levi_degree: 0,
                            highest_weight: coefficient(q, ParabolicType::Borel, class.label, n, lambda)?,
                            induction_index: induction(q, ParabolicType::Borel, class.label, level, false),
                            torsion: false,
                        });
                    }
                }
            }
            for sigma in maximal {
                let w = selector_element(sigma, degree as usize)?;
                let (n, _) = degree_stats(q, sigma, w);
                out.push(BoundarySummand {
                    stratum: sigma.short_name().into(),
                    weyl_class: w.name().into(),
                    levi_degree: 1,
                    highest_weight: coefficient(q, sigma, w, n, lambda)?,
                    induction_index: induction(q, sigma, w, level, true),
                    torsion: false,
                });
            }
        }
        ParabolicType::Siegel | ParabolicType::Klingen => {
            if degree != 3 {
                return Err(Error::UnsupportedDegree(degree));
            }
            let own = q;
            let other = if q == ParabolicType::Siegel { ParabolicType::Klingen } else { ParabolicType::Siegel };
            for sigma in [own, other] {
                for class in double_cosets(q, sigma) {
                    let (qp, qf) = degree_stats(q, sigma, class.label);
                    if (qp..=qf).contains(&2) {
                        out.push(BoundarySummand {
                            stratum: sigma.short_name().into(),
                            weyl_class: class.label.name().into(),
                            levi_degree: 1,
                            highest_weight: coefficient(q, sigma, class.label, 2, lambda)?,
                            induction_index: induction(q, sigma, class.label, level, true),
                            torsion: false,
                        });
                    }
                }
                if sigma == own {
                    out.push(BoundarySummand {
                        stratum: sigma.short_name().into(),
                        weyl_class: WeylElement::ID.name().into(),
                        levi_degree: 0,
                        highest_weight: coefficient(q, sigma, WeylElement::ID, 3, lambda)?,
                        induction_index: induction(q, sigma, WeylElement::ID, level, false),
                        torsion: true,
                    });
                }
            }
        }
        ParabolicType::Full => return Err(Error::InvalidInput("no boundary for G itself".into())),
    }
    Ok(out)
}

/// Over a totally real field of degree `d`, only the shape of the degree-`3d` answer for
/// maximal `Q` is produced: the two stratum summands `H^d_{!,ord}` with coefficients of
/// Levi degree `2d`, valid up to finite kernel and cokernel. Unit-group exterior powers
/// beyond the bottom one are not modelled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralFieldSkeleton {
    pub parabolic: String,
    pub degree: u32,
    pub summands: Vec<BoundarySummand>,
    pub isogeny_only: bool,
}

pub fn general_field_skeleton(q: ParabolicType, d: u32, level: LevelType) -> Result<GeneralFieldSkeleton> {
    if d == 0 || q == ParabolicType::Full {
        return Err(Error::InvalidInput("need d ≥ 1 and a proper parabolic".into()));
    }
    let mut summands = Vec::new();
    for (sigma, w) in [(ParabolicType::Klingen, WeylElement::S1), (ParabolicType::Siegel, WeylElement::S2)] {
        summands.push(BoundarySummand {
            stratum: sigma.short_name().into(),
            weyl_class: w.name().into(),
            levi_degree: d,
            highest_weight: CoefficientWeight {
                module: format!("L_{{{},{},{}}}", sigma.short_name(), w.name(), 2 * d),
                levi_element: String::new(),
                weight: Weight::ZERO,
            },
            induction_index: (level == LevelType::Gamma1).then(|| InductionIndex {
                torus: Some((sigma.short_name().into(), w.name().into())),
                ambient: format!("C_{}", q.short_name()),
            }),
            torsion: false,
        });
    }
    Ok(GeneralFieldSkeleton { parabolic: q.short_name().into(), degree: 3 * d, summands, isogeny_only: true })
}

/// Cocharacter spanning `T ∩ M_Σ^1` in `(t1, t2)` exponents, before conjugation by `w`.
fn derived_torus_cocharacters(sigma: ParabolicType) -> Vec<(i64, i64)> {
    match sigma {
        ParabolicType::Siegel => vec![(1, -1)],
        ParabolicType::Klingen => vec![(0, 1)],
        ParabolicType::Borel => vec![],
        ParabolicType::Full => vec![(1, 0), (0, 1)],
    }
}

/// Image of `(t1, t2)` in the cocentre `C_Q = T/(T ∩ M_Q^1)`.
fn cocentre(q: ParabolicType, t: (u64, u64), n: u64) -> Vec<u64> {
    match q {
        ParabolicType::Borel => vec![t.0, t.1],
        ParabolicType::Siegel => vec![t.0 * t.1 % n],
        ParabolicType::Klingen => vec![t.0],
        ParabolicType::Full => vec![],
    }
}

fn pow_mod(mut b: u64, mut e: i64, n: u64) -> u64 {
    if e < 0 {
        b = crate::arith::inv_mod(b, n).expect("unit");
        e = -e;
    }
    let mut acc = 1 % n;
    let mut base = b % n;
    let mut e = e as u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % n;
        }
        base = base * base % n;
        e >>= 1;
    }
    acc
}

/// Number of `Γ1(p^r)`-cusps over a `Γ0(p^r)`-cusp of type `(Σ, w)`:
/// `|C_Q(Z/p^r) / i_Q(T¹_{Σ,w}(Z/p^r)·Ē)|`, with `Ē` given by generators in `T(Z/p^r)`.
/// The `Γ0` count is always 1.
pub fn cusp_fiber(
    sigma: ParabolicType,
    w: WeylElement,
    q: ParabolicType,
    p: u64,
    r: u32,
    unit_image: &[(u64, u64)],
    level: LevelType,
) -> Result<u64> {
    if level == LevelType::Gamma0 {
        return Ok(1);
    }
    check_odd_prime(p)?;
    let n = modulus(p, r)?;
    let units: Vec<u64> = (1..n).filter(|x| x % p != 0).collect();
    let mut gens: Vec<Vec<u64>> = Vec::new();
    for (c1, c2) in derived_torus_cocharacters(sigma) {
        let (d1, d2) = w.apply((c1, c2));
        for &u in &units {
            gens.push(cocentre(q, (pow_mod(u, d1, n), pow_mod(u, d2, n)), n));
        }
    }
    for &(u1, u2) in unit_image {
        if u1 % p == 0 || u2 % p == 0 {
            return Err(Error::InvalidInput("unit image must consist of units".into()));
        }
        gens.push(cocentre(q, (u1 % n, u2 % n), n));
    }
    let rank = cocentre(q, (1, 1), n).len();
    let identity = vec![1 % n; rank];
    let mut group: BTreeSet<Vec<u64>> = BTreeSet::new();
    group.insert(identity.clone());
    let mut frontier = vec![identity];
    while let Some(x) = frontier.pop() {
        for g in &gens {
            let y: Vec<u64> = x.iter().zip(g).map(|(a, b)| a * b % n).collect();
            if group.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    let total = (units.len() as u64).pow(rank as u32);
    Ok(total / group.len() as u64)
}

/// One place of `F` above `p`: its local degree and the parabolic chosen there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceData {
    pub local_degree: u32,
    pub parabolic: ParabolicType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HidaGroupParams {
    pub d: u32,
    pub delta: u32,
    pub places: Vec<PlaceData>,
}

impl HidaGroupParams {
    pub fn uniform(d: u32, delta: u32, q: ParabolicType) -> Self {
        HidaGroupParams { d, delta, places: vec![PlaceData { local_degree: d, parabolic: q }] }
    }
}

/// `1 + δ + Σ_v r_v d_v` with `r_v = 2` at Borel places and `1` at maximal ones.
pub fn hida_rank(params: &HidaGroupParams) -> Result<u32> {
    if params.places.iter().map(|v| v.local_degree).sum::<u32>() != params.d {
        return Err(Error::InconsistentDegrees);
    }
    let mut rank = 1 + params.delta;
    for v in &params.places {
        let r = match v.parabolic {
            ParabolicType::Borel => 2,
            ParabolicType::Siegel | ParabolicType::Klingen => 1,
            ParabolicType::Full => {
                return Err(Error::InvalidInput("each place needs a proper parabolic".into()))
            }
        };
        rank += r * v.local_degree;
    }
    Ok(rank)
}

/// Projection of a weight onto the real span of the split centre of `M_Σ`, as
/// coefficients on `(λ1, λ2)`.
pub fn franke_projection(sigma: ParabolicType, lambda: &HighestWeight) -> (BigRational, BigRational) {
    let sx: i64 = lambda.embeddings.iter().map(|w| w.a).sum();
    let sy: i64 = lambda.embeddings.iter().map(|w| w.b).sum();
    match sigma {
        ParabolicType::Borel => (rat(sx), rat(sy)),
        ParabolicType::Siegel => {
            let h = rat_frac(sx + sy, 2);
            (h.clone(), h)
        }
        ParabolicType::Klingen => (rat(sx), rat(0)),
        ParabolicType::Full => (rat(0), rat(0)),
    }
}

/// Minimal-length representatives of `W_Σ\W` on the right: `w⁻¹(α) > 0` for the
/// positive roots of the Levi of `Σ`.
pub fn franke_representatives(sigma: ParabolicType) -> Vec<WeylElement> {
    let levi = sigma.positive_levi_roots();
    weyl_group()
        .into_iter()
        .filter(|w| levi.iter().all(|&a| w.inverse().apply_root(a).is_positive()))
        .collect()
}

/// Whether `−w(μ)` restricted to the split centre of `M_Σ` lies in the closed chamber.
fn negative_on_centre(sigma: ParabolicType, mu: Weight) -> bool {
    match sigma {
        ParabolicType::Siegel => mu.a + mu.b <= 0,
        ParabolicType::Klingen => mu.a <= 0,
        ParabolicType::Borel => mu.a <= 0 && -mu.a >= -mu.b && mu.b <= 0,
        ParabolicType::Full => false,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrankeContribution {
    pub per_embedding: Vec<WeylElement>,
    pub length: usize,
    pub degree: usize,
    /// The restrictions of `w(λ+ρ)` to the centre agree across embeddings.
    pub central_character_constant: bool,
}

/// Classes `w = (w_σ)` that can contribute to Eisenstein cohomology from the stratum `Σ`
/// for a regular weight, with their minimal contribution degree, keeping those of degree
/// at most `max_degree`. Per embedding `w_σ` runs over the representatives with
/// `−w_σ(λ_σ+ρ)` in the chamber on the centre of `M_Σ`; the degree is `l(w) + d` for a
/// maximal `Σ` and `l(w)` for the Borel.
pub fn franke_contribution_filter(sigma: ParabolicType, lambda: &HighestWeight, max_degree: usize) -> Result<Vec<FrankeContribution>> {
    if lambda.embeddings.iter().any(|w| !w.is_strictly_dominant()) {
        return Err(Error::NonRegular);
    }
    if sigma == ParabolicType::Full {
        return Err(Error::InvalidInput("Σ must be a proper parabolic".into()));
    }
    let reps = franke_representatives(sigma);
    let per: Vec<Vec<WeylElement>> = lambda
        .embeddings
        .iter()
        .map(|&l| {
            reps.iter().copied().filter(|&w| negative_on_centre(sigma, l.add(RHO).apply(w))).collect()
        })
        .collect();
    let d = lambda.degree();
    let mut out = Vec::new();
    let mut idx = vec![0usize; d];
    if per.iter().any(|x| x.is_empty()) {
        return Ok(out);
    }
    loop {
        let choice: Vec<WeylElement> = idx.iter().enumerate().map(|(i, &k)| per[i][k]).collect();
        let length: usize = choice.iter().map(|w| w.length()).sum();
        let degree = if sigma == ParabolicType::Borel { length } else { length + d };
        let restrictions: Vec<Vec<i64>> = choice
            .iter()
            .zip(&lambda.embeddings)
            .map(|(&w, &l)| crate::kostant::centre_restriction(sigma, l.add(RHO).apply(w)))
            .collect();
        if degree <= max_degree {
            out.push(FrankeContribution {
                per_embedding: choice,
                length,
                degree,
                central_character_constant: restrictions.windows(2).all(|x| x[0] == x[1]),
            });
        }
        let mut i = 0;
        loop {
            if i == d {
                return Ok(out);
            }
            idx[i] += 1;
            if idx[i] < per[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}
