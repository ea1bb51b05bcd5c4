//! Weights of the diagonal torus, dominance tests and the dot action.
//!
//! A weight `(a, b)` is the character `diag(t1, t2, t1⁻¹, t2⁻¹) ↦ t1^a t2^b`, i.e. the same
//! `(m1, m2)` coordinates used for roots. The similitude part is carried by a separate
//! central integer `c`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::polygons::hodge_tate_weights;
use crate::roots::{ParabolicType, Root, WeylElement, ALL_ROOTS};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Weight {
    pub a: i64,
    pub b: i64,
}

impl Weight {
    pub const ZERO: Weight = Weight { a: 0, b: 0 };

    pub const fn new(a: i64, b: i64) -> Self {
        Weight { a, b }
    }

    pub fn add(self, o: Weight) -> Weight {
        Weight::new(self.a + o.a, self.b + o.b)
    }

    pub fn sub(self, o: Weight) -> Weight {
        Weight::new(self.a - o.a, self.b - o.b)
    }

    pub fn scale(self, k: i64) -> Weight {
        Weight::new(self.a * k, self.b * k)
    }

    pub fn apply(self, w: WeylElement) -> Weight {
        let (a, b) = w.apply((self.a, self.b));
        Weight::new(a, b)
    }

    pub fn from_root(r: Root) -> Weight {
        Weight::new(r.m1, r.m2)
    }

    /// The pairing `⟨λ, β^∨⟩` with the coroot of `β`.
    pub fn coroot_pairing(self, r: Root) -> i64 {
        let num = 2 * (self.a * r.m1 + self.b * r.m2);
        let den = r.m1 * r.m1 + r.m2 * r.m2;
        num / den
    }

    /// `a ≥ b ≥ 0`.
    pub fn is_dominant(self) -> bool {
        self.a >= self.b && self.b >= 0
    }

    /// `a > b > 0`, i.e. `λ` strictly inside the dominant chamber away from both walls.
    pub fn is_strictly_dominant(self) -> bool {
        self.a > self.b && self.b > 0
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

/// Half the sum of the positive roots of `Sp4`.
pub const RHO: Weight = Weight::new(2, 1);

/// The group whose `ρ` enters the dot action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DotGroup {
    G,
    Levi(ParabolicType),
}

/// `w·λ = w(λ + ρ) − ρ`, with `ρ` the half-sum of the positive roots of the chosen group.
/// For a Levi the element must lie in its Weyl group, which keeps the result integral.
pub fn dot_action(w: WeylElement, lambda: Weight, group: DotGroup) -> Result<Weight> {
    match group {
        DotGroup::G | DotGroup::Levi(ParabolicType::Full) => {
            Ok(lambda.add(RHO).apply(w).sub(RHO))
        }
        DotGroup::Levi(m) => {
            if !m.weyl_subgroup().contains(&w) {
                return Err(Error::InvalidWQ(w.name().to_string()));
            }
            let (r1, r2) = m.levi_rho_doubled();
            let rho2 = Weight::new(r1, r2);
            let twice = lambda.scale(2).add(rho2).apply(w).sub(rho2);
            debug_assert!(twice.a % 2 == 0 && twice.b % 2 == 0);
            Ok(Weight::new(twice.a / 2, twice.b / 2))
        }
    }
}

/// Weyl dimension formula for `Sp4`: `(a−b+1)(b+1)(a+2)(a+b+3)/6`.
pub fn weyl_dimension(lambda: Weight) -> Result<u64> {
    if !lambda.is_dominant() {
        return Err(Error::NonDominant);
    }
    let (a, b) = (lambda.a as u64, lambda.b as u64);
    Ok((a - b + 1) * (b + 1) * (a + 2) * (a + b + 3) / 6)
}

/// Dimension of the irreducible `GL2`-module of highest weight `(a, b)`, `a ≥ b`.
pub fn gl2_dimension(a: i64, b: i64) -> Result<u64> {
    if a < b {
        return Err(Error::NonDominant);
    }
    Ok((a - b + 1) as u64)
}

/// Product over positive roots of `⟨λ+ρ, β^∨⟩/⟨ρ, β^∨⟩`, evaluated exactly; equals
/// [`weyl_dimension`] on dominant weights and is used to cross-check the closed form.
pub fn weyl_dimension_product(lambda: Weight) -> Result<u64> {
    if !lambda.is_dominant() {
        return Err(Error::NonDominant);
    }
    let shifted = lambda.add(RHO);
    let (mut num, mut den) = (1i64, 1i64);
    for r in ALL_ROOTS.iter().filter(|r| r.is_positive()) {
        num *= shifted.coroot_pairing(*r);
        den *= RHO.coroot_pairing(*r);
    }
    Ok((num / den) as u64)
}

/// `(a, b) = (a1 − 3, a2 − 3)`, the shift relating the two weight normalizations in use.
pub fn shift_by_three(a1: i64, a2: i64) -> (i64, i64) {
    (a1 - 3, a2 - 3)
}

/// A `GSp4` weight over a totally real field: one `(a_σ, b_σ)` per embedding and a shared
/// central integer `c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HighestWeight {
    pub embeddings: Vec<Weight>,
    pub c: i64,
}

impl HighestWeight {
    pub fn new(embeddings: Vec<Weight>, c: i64) -> Result<Self> {
        if embeddings.is_empty() {
            return Err(Error::InvalidInput("a weight needs at least one embedding".into()));
        }
        if embeddings.iter().any(|w| (w.a + w.b - c).rem_euclid(2) != 0) {
            return Err(Error::ParityViolation);
        }
        Ok(HighestWeight { embeddings, c })
    }

    pub fn single(a: i64, b: i64, c: i64) -> Result<Self> {
        HighestWeight::new(vec![Weight::new(a, b)], c)
    }

    pub fn degree(&self) -> usize {
        self.embeddings.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominanceFlags {
    pub dominant: bool,
    pub regular: bool,
    pub separable: bool,
    pub sufficiently_separable: bool,
    pub v_admissible: bool,
}

/// Closed-form dominance, regularity, separability and admissibility tests.
///
/// Regular means `c ≥ a_σ` and `a_σ > b_σ > 0` for every embedding. Separability compares
/// distinct embeddings `σ ≠ σ'`: `a_σ ≠ b_σ'` and `a_σ + b_σ ≠ a_σ' − b_σ'` (sufficiently
/// separable: both gaps exceed 3). Admissibility asks for embedding-independent Hodge–Tate
/// weights, all embeddings being taken above one place.
pub fn dominance_tests(lambda: &HighestWeight) -> Result<DominanceFlags> {
    let e = &lambda.embeddings;
    let dominant = e.iter().all(|w| w.is_dominant());
    let regular = e.iter().all(|w| lambda.c >= w.a && w.is_strictly_dominant());
    let mut separable = true;
    let mut sufficiently = true;
    for (i, x) in e.iter().enumerate() {
        for (j, y) in e.iter().enumerate() {
            if i == j {
                continue;
            }
            let gap1 = x.a - y.b;
            let gap2 = (x.a + x.b) - (y.a - y.b);
            separable &= gap1 != 0 && gap2 != 0;
            sufficiently &= gap1.abs() > 3 && gap2.abs() > 3;
        }
    }
    let first = hodge_tate_weights(e[0].a, e[0].b, lambda.c)?;
    let mut v_admissible = true;
    for w in &e[1..] {
        v_admissible &= hodge_tate_weights(w.a, w.b, lambda.c)? == first;
    }
    Ok(DominanceFlags { dominant, regular, separable, sufficiently_separable: sufficiently, v_admissible })
}

/// The shortcut `inf a_σ > sup b_σ`, which forces separability.
pub fn separated_by_extremes(lambda: &HighestWeight) -> bool {
    let inf_a = lambda.embeddings.iter().map(|w| w.a).min().unwrap();
    let sup_b = lambda.embeddings.iter().map(|w| w.b).max().unwrap();
    inf_a > sup_b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::weyl_group;

    #[test]
    fn dot_action_examples() {
        let g = DotGroup::G;
        assert_eq!(dot_action(WeylElement::ID, Weight::new(5, 3), g).unwrap(), Weight::new(5, 3));
        assert_eq!(dot_action(WeylElement::NEG_ID, Weight::ZERO, g).unwrap(), Weight::new(-4, -2));
        for (a, b) in [(0, 0), (3, 1), (7, 2)] {
            assert_eq!(dot_action(WeylElement::S1, Weight::new(a, b), g).unwrap(), Weight::new(b - 1, a + 1));
        }
    }

    #[test]
    fn dot_action_composes() {
        let lam = Weight::new(4, 1);
        for x in weyl_group() {
            for y in weyl_group() {
                let lhs = dot_action(x, dot_action(y, lam, DotGroup::G).unwrap(), DotGroup::G).unwrap();
                assert_eq!(lhs, dot_action(x.compose(y), lam, DotGroup::G).unwrap());
            }
        }
    }

    #[test]
    fn levi_dot_action_stays_integral() {
        let lam = Weight::new(3, 1);
        let s = dot_action(WeylElement::S1, lam, DotGroup::Levi(ParabolicType::Siegel)).unwrap();
        assert_eq!(s, Weight::new(0, 4));
        let k = dot_action(WeylElement::S2, lam, DotGroup::Levi(ParabolicType::Klingen)).unwrap();
        assert_eq!(k, Weight::new(3, -3));
        assert!(dot_action(WeylElement::S2, lam, DotGroup::Levi(ParabolicType::Siegel)).is_err());
    }

    #[test]
    fn dimensions() {
        assert_eq!(weyl_dimension(Weight::new(0, 0)).unwrap(), 1);
        assert_eq!(weyl_dimension(Weight::new(1, 0)).unwrap(), 4);
        assert_eq!(weyl_dimension(Weight::new(1, 1)).unwrap(), 5);
        assert_eq!(weyl_dimension(Weight::new(2, 1)).unwrap(), 16);
        assert!(weyl_dimension(Weight::new(0, 1)).is_err());
        for a in 0..=6 {
            for b in 0..=a {
                let w = Weight::new(a, b);
                assert_eq!(weyl_dimension(w).unwrap(), weyl_dimension_product(w).unwrap());
            }
        }
    }

    #[test]
    fn flags_single_embedding() {
        let f = dominance_tests(&HighestWeight::single(5, 3, 8).unwrap()).unwrap();
        assert!(f.dominant && f.regular && f.separable && f.sufficiently_separable && f.v_admissible);
        assert_eq!(HighestWeight::single(5, 2, 8), Err(Error::ParityViolation));
    }

    #[test]
    fn flags_two_embeddings() {
        let same = HighestWeight::new(vec![Weight::new(5, 3); 2], 8).unwrap();
        let f = dominance_tests(&same).unwrap();
        assert!(f.separable && f.v_admissible);
        assert!(separated_by_extremes(&same));
        let diff = HighestWeight::new(vec![Weight::new(5, 3), Weight::new(7, 5)], 12).unwrap();
        assert!(!dominance_tests(&diff).unwrap().v_admissible);
    }
}
