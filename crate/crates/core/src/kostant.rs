//! Highest weights of nilradical cohomology (Kostant) and the central characters they
//! induce on boundary strata.

use serde::{Deserialize, Serialize};

use crate::roots::{degree_stats, double_cosets, weyl_group, ParabolicType, Root, WeylElement, POSITIVE_ROOTS};
use crate::weights::{dot_action, DotGroup, HighestWeight, Weight};
use crate::{Error, Result};

/// Which unipotent group's cohomology is being described.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Nilradical {
    /// The unipotent radical of a standard parabolic of `Sp4`.
    Parabolic(ParabolicType),
    /// `M_Q ∩ U_{w(R_Σ)}` inside the Levi of `Q`, for a class `w ∈ W_Q\W/W_Σ`.
    Stratum { q: ParabolicType, sigma: ParabolicType, w: WeylElement },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KostantTerm {
    pub v: WeylElement,
    pub weight: Weight,
}

/// The highest weights contributing in one cohomological degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KostantDatum {
    pub degree: usize,
    pub terms: Vec<KostantTerm>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KostantCohomology {
    pub nilradical: Nilradical,
    pub lambda: Weight,
    pub degrees: Vec<KostantDatum>,
    /// Integral statements are isomorphisms (not only isogenies) for primes above this bound.
    pub prime_bound: i64,
}

impl KostantCohomology {
    pub fn is_isomorphism_at(&self, p: u64) -> bool {
        p as i64 > self.prime_bound
    }

    pub fn count_in_degree(&self, q: usize) -> usize {
        self.degrees.iter().find(|d| d.degree == q).map_or(0, |d| d.terms.len())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.degrees.iter().map(|d| sign(d.degree) * d.terms.len() as i64).sum()
    }

    pub fn support(&self) -> Vec<usize> {
        self.degrees.iter().filter(|d| !d.terms.is_empty()).map(|d| d.degree).collect()
    }
}

fn sign(k: usize) -> i64 {
    if k.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `{v ∈ W : R⁺ ∩ v(R⁻) ⊂ R_U}` for the positive roots `R_U` of a unipotent subgroup.
pub fn kostant_set(r_u: &[Root]) -> Vec<WeylElement> {
    weyl_group()
        .into_iter()
        .filter(|&v| {
            let inv = v.inverse();
            POSITIVE_ROOTS
                .iter()
                .filter(|&&beta| !inv.apply_root(beta).is_positive())
                .all(|beta| r_u.contains(beta))
        })
        .collect()
}

/// `W_{Q,Σ,w} = {w_Q ∈ W_Q : Δ_Q⁺ ∩ w_Q(Δ_Q⁻) ⊂ w(R_Σ) ∩ Δ_Q}`, where the class label
/// is first moved inside `W_Q w` so that `w(R_Σ) ∩ Δ_Q` consists of positive roots. This
/// leaves `q'` and `q` unchanged and amounts to accepting `β` when `±β ∈ w(R_Σ)`.
pub fn levi_kostant_set(q: ParabolicType, sigma: ParabolicType, w: WeylElement) -> Vec<WeylElement> {
    let delta_plus = q.positive_levi_roots();
    let image: Vec<Root> = sigma.positive_unipotent_roots().into_iter().map(|r| w.apply_root(r)).collect();
    q.weyl_subgroup()
        .into_iter()
        .filter(|&wq| {
            let inv = wq.inverse();
            delta_plus
                .iter()
                .filter(|&&beta| !inv.apply_root(beta).is_positive())
                .all(|beta| image.contains(beta) || image.contains(&beta.neg()))
        })
        .collect()
}

/// Highest weights `v·λ` of the cohomology of the chosen nilradical, grouped by degree.
///
/// For a parabolic radical the degree is `length(v)` and the dot action is that of `Sp4`.
/// For a stratum the degree is `q'_{Σ,w} + length(w_Q)` and the dot action is that of the
/// Levi of `Q`; weights exist exactly in degrees `q'_{Σ,w} ..= q_{Σ,w}`.
pub fn kostant_weights(nil: Nilradical, lambda: Weight) -> Result<KostantCohomology> {
    if !lambda.is_dominant() {
        return Err(Error::NonDominant);
    }
    let (pairs, lo, hi): (Vec<(usize, KostantTerm)>, usize, usize) = match nil {
        Nilradical::Parabolic(p) => {
            let r_u = p.positive_unipotent_roots();
            let mut pairs = Vec::new();
            for v in kostant_set(&r_u) {
                let weight = dot_action(v, lambda, DotGroup::G)?;
                pairs.push((v.length(), KostantTerm { v, weight }));
            }
            (pairs, 0, r_u.len())
        }
        Nilradical::Stratum { q, sigma, w } => {
            let (qp, qf) = degree_stats(q, sigma, w);
            let mut pairs = Vec::new();
            for wq in levi_kostant_set(q, sigma, w) {
                let weight = dot_action(wq, lambda, DotGroup::Levi(q))?;
                pairs.push((qp + wq.length(), KostantTerm { v: wq, weight }));
            }
            (pairs, qp, qf)
        }
    };
    let mut degrees = Vec::new();
    for k in lo..=hi {
        let terms: Vec<KostantTerm> = pairs.iter().filter(|(d, _)| *d == k).map(|(_, t)| t.clone()).collect();
        degrees.push(KostantDatum { degree: k, terms });
    }
    Ok(KostantCohomology { nilradical: nil, lambda, degrees, prime_bound: lambda.a + lambda.b })
}

/// `Σ_{v ∈ W_U} (−1)^{length(v)}`.
pub fn signed_kostant_count(r_u: &[Root]) -> i64 {
    kostant_set(r_u).iter().map(|v| sign(v.length())).sum()
}

/// The character `ω = w⁻¹(w_Q·λ) + Σ_{α ∈ R_Σ, w(α) ∈ R_Q} α` of the stratum units,
/// together with its restriction to the centre of the Levi of `Σ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CentralCharacter {
    pub weight: Weight,
    /// Exponents of the restriction to the connected centre of `M_Σ`: `a + b` (Siegel),
    /// `a` (Klingen) or the full pair (Borel).
    pub restriction: Vec<i64>,
}

/// The root-sum range is read literally: `α` runs over `R_Σ` with `w(α) ∈ R_Q`.
pub fn central_character(
    q: ParabolicType,
    sigma: ParabolicType,
    w: WeylElement,
    wq: WeylElement,
    lambda: Weight,
) -> Result<CentralCharacter> {
    if !levi_kostant_set(q, sigma, w).contains(&wq) {
        return Err(Error::InvalidWQ(wq.name().to_string()));
    }
    let twisted = dot_action(wq, lambda, DotGroup::Levi(q))?.apply(w.inverse());
    let r_q = q.positive_unipotent_roots();
    let shift = sigma
        .positive_unipotent_roots()
        .into_iter()
        .filter(|&alpha| r_q.contains(&w.apply_root(alpha)))
        .fold(Weight::ZERO, |acc, alpha| acc.add(Weight::from_root(alpha)));
    let weight = twisted.add(shift);
    Ok(CentralCharacter { weight, restriction: centre_restriction(sigma, weight) })
}

pub fn centre_restriction(sigma: ParabolicType, wt: Weight) -> Vec<i64> {
    match sigma {
        ParabolicType::Siegel => vec![wt.a + wt.b],
        ParabolicType::Klingen => vec![wt.a],
        ParabolicType::Borel => vec![wt.a, wt.b],
        ParabolicType::Full => vec![],
    }
}

/// Central characters at several places of a totally real field, one `(w, w_Q)` and one
/// weight per place, with the test whether they glue to a multiple of the norm (all
/// per-place restrictions equal), which is the condition for non-vanishing on a
/// finite-index subgroup of the global units.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalCentralCharacter {
    pub per_place: Vec<CentralCharacter>,
    pub norm_multiple: bool,
}

pub fn global_central_character(
    q: ParabolicType,
    sigma: ParabolicType,
    classes: &[(WeylElement, WeylElement)],
    lambda: &HighestWeight,
) -> Result<GlobalCentralCharacter> {
    if classes.len() != lambda.degree() {
        return Err(Error::InconsistentDegrees);
    }
    let per_place = classes
        .iter()
        .zip(&lambda.embeddings)
        .map(|(&(w, wq), &wt)| central_character(q, sigma, w, wq, wt))
        .collect::<Result<Vec<_>>>()?;
    let norm_multiple = per_place.windows(2).all(|x| x[0].restriction == x[1].restriction);
    Ok(GlobalCentralCharacter { per_place, norm_multiple })
}

/// All strata data for `Q`: every `(Σ, w)` class with its Kostant weights.
pub fn stratum_cohomology(q: ParabolicType, lambda: Weight) -> Result<Vec<KostantCohomology>> {
    let mut out = Vec::new();
    for sigma in [ParabolicType::Siegel, ParabolicType::Klingen, ParabolicType::Borel] {
        for class in double_cosets(q, sigma) {
            out.push(kostant_weights(Nilradical::Stratum { q, sigma, w: class.label }, lambda)?);
        }
    }
    Ok(out)
}
