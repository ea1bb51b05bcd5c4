//! The C2 root datum of Sp4, its Weyl group as signed permutations, Bruhat order and
//! the standard parabolic types.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::OnceLock;

/// A root in `(m1, m2)` coordinates with respect to `(λ1, λ2)`; the central coordinate is 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Root {
    pub m1: i64,
    pub m2: i64,
}

impl Root {
    pub const ALPHA1: Root = Root { m1: 1, m2: -1 };
    pub const ALPHA2: Root = Root { m1: 0, m2: 2 };
    pub const ALPHA12: Root = Root { m1: 1, m2: 1 };
    pub const ALPHA112: Root = Root { m1: 2, m2: 0 };

    pub const fn new(m1: i64, m2: i64) -> Self {
        Root { m1, m2 }
    }

    pub fn is_root(self) -> bool {
        ALL_ROOTS.contains(&self)
    }

    pub fn is_positive(self) -> bool {
        self.m1 > 0 || (self.m1 == 0 && self.m2 > 0)
    }

    pub fn neg(self) -> Root {
        Root::new(-self.m1, -self.m2)
    }

    /// `val_p α(τ(p^a1, p^a2; p^b))`.
    pub fn valuation_on(self, a1: i64, a2: i64, b: i64) -> i64 {
        let twice = 2 * (a1 * self.m1 + a2 * self.m2) + b * (-self.m1 - self.m2);
        debug_assert!(twice % 2 == 0);
        twice / 2
    }

    pub fn name(self) -> &'static str {
        match (self.m1, self.m2) {
            (1, -1) => "a1",
            (0, 2) => "a2",
            (1, 1) => "a1+a2",
            (2, 0) => "2a1+a2",
            (-1, 1) => "-a1",
            (0, -2) => "-a2",
            (-1, -1) => "-(a1+a2)",
            (-2, 0) => "-(2a1+a2)",
            _ => "?",
        }
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Positive roots in the fixed order `(α1, α2, α1+α2, 2α1+α2)`.
pub const POSITIVE_ROOTS: [Root; 4] = [Root::ALPHA1, Root::ALPHA2, Root::ALPHA12, Root::ALPHA112];

pub const ALL_ROOTS: [Root; 8] = [
    Root::ALPHA1,
    Root::ALPHA2,
    Root::ALPHA12,
    Root::ALPHA112,
    Root::new(-1, 1),
    Root::new(0, -2),
    Root::new(-1, -1),
    Root::new(-2, 0),
];

/// A character `t1^a1 t2^a2 x^((b-a1-a2)/2)` of the diagonal torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeightCharacter {
    pub a1: i64,
    pub a2: i64,
    pub b: i64,
}

impl WeightCharacter {
    pub fn new(a1: i64, a2: i64, b: i64) -> Result<Self> {
        if (a1 + a2 - b).rem_euclid(2) != 0 {
            return Err(Error::ParityViolation);
        }
        Ok(WeightCharacter { a1, a2, b })
    }

    pub fn trivial() -> Self {
        WeightCharacter { a1: 0, a2: 0, b: 0 }
    }

    /// Exponent of `x` in the evaluation formula.
    pub fn x_exponent(&self) -> i64 {
        (self.b - self.a1 - self.a2) / 2
    }

    /// p-adic valuation of the character on `τ(p^e1, p^e2; p^f)`.
    pub fn valuation_on(&self, e1: i64, e2: i64, f: i64) -> i64 {
        self.a1 * e1 + self.a2 * e2 + self.x_exponent() * f
    }
}

/// An element of the Weyl group of type C2, stored as a signed permutation matrix
/// acting on `(m1, m2)` coordinates.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct WeylElement {
    pub mat: [[i8; 2]; 2],
}

impl WeylElement {
    pub const ID: WeylElement = WeylElement { mat: [[1, 0], [0, 1]] };
    pub const S1: WeylElement = WeylElement { mat: [[0, 1], [1, 0]] };
    pub const S2: WeylElement = WeylElement { mat: [[1, 0], [0, -1]] };
    pub const S1S2: WeylElement = WeylElement { mat: [[0, -1], [1, 0]] };
    pub const S2S1: WeylElement = WeylElement { mat: [[0, 1], [-1, 0]] };
    /// `-s2 = s1 s2 s1`
    pub const NEG_S2: WeylElement = WeylElement { mat: [[-1, 0], [0, 1]] };
    /// `-s1 = s2 s1 s2`
    pub const NEG_S1: WeylElement = WeylElement { mat: [[0, -1], [-1, 0]] };
    pub const NEG_ID: WeylElement = WeylElement { mat: [[-1, 0], [0, -1]] };

    /// Composition `self ∘ other`.
    pub fn compose(self, other: WeylElement) -> WeylElement {
        let a = self.mat;
        let b = other.mat;
        let mut m = [[0i8; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        WeylElement { mat: m }
    }

    pub fn inverse(self) -> WeylElement {
        // Signed permutation matrices are orthogonal.
        let m = self.mat;
        WeylElement { mat: [[m[0][0], m[1][0]], [m[0][1], m[1][1]]] }
    }

    pub fn apply(self, v: (i64, i64)) -> (i64, i64) {
        let m = self.mat;
        (
            m[0][0] as i64 * v.0 + m[0][1] as i64 * v.1,
            m[1][0] as i64 * v.0 + m[1][1] as i64 * v.1,
        )
    }

    pub fn apply_root(self, r: Root) -> Root {
        let (a, b) = self.apply((r.m1, r.m2));
        Root::new(a, b)
    }

    pub fn apply_weight(self, w: WeightCharacter) -> WeightCharacter {
        let (a1, a2) = self.apply((w.a1, w.a2));
        WeightCharacter { a1, a2, b: w.b }
    }

    /// Number of positive roots sent to negative roots.
    pub fn length(self) -> usize {
        POSITIVE_ROOTS
            .iter()
            .filter(|r| !self.apply_root(**r).is_positive())
            .count()
    }

    /// Lexicographically smallest reduced word over `{1, 2}` (meaning `s1`, `s2`).
    pub fn reduced_word(self) -> Vec<u8> {
        weyl_table().words[&self].clone()
    }

    pub fn from_word(word: &[u8]) -> Result<WeylElement> {
        let mut w = WeylElement::ID;
        for &g in word {
            w = w.compose(match g {
                1 => WeylElement::S1,
                2 => WeylElement::S2,
                _ => return Err(Error::InvalidInput(format!("generator s{g} does not exist"))),
            });
        }
        Ok(w)
    }

    pub fn name(self) -> &'static str {
        match self {
            WeylElement::ID => "id",
            WeylElement::NEG_ID => "-id",
            WeylElement::S1 => "s1",
            WeylElement::NEG_S1 => "-s1",
            WeylElement::S2 => "s2",
            WeylElement::NEG_S2 => "-s2",
            WeylElement::S1S2 => "s1s2",
            WeylElement::S2S1 => "s2s1",
            _ => unreachable!("not a Weyl element"),
        }
    }

    /// Parses `id`, `-id`, `s1`, `-s1`, `s2`, `-s2`, `s1s2`, `s2s1` or any word such as `s2s1s2`.
    pub fn parse(s: &str) -> Result<WeylElement> {
        let t = s.trim().replace(' ', "");
        if let Some(w) = weyl_group().into_iter().find(|w| w.name() == t) {
            return Ok(w);
        }
        if t == "1" || t.is_empty() {
            return Ok(WeylElement::ID);
        }
        let body = t.strip_prefix('-');
        let (neg, body) = match body {
            Some(b) => (true, b),
            None => (false, t.as_str()),
        };
        let mut word = Vec::new();
        let mut chars = body.chars().peekable();
        while let Some(c) = chars.next() {
            if c != 's' {
                return Err(Error::InvalidInput(format!("cannot parse Weyl element {s:?}")));
            }
            match chars.next() {
                Some('1') => word.push(1),
                Some('2') => word.push(2),
                _ => return Err(Error::InvalidInput(format!("cannot parse Weyl element {s:?}"))),
            }
        }
        let w = WeylElement::from_word(&word)?;
        Ok(if neg { WeylElement::NEG_ID.compose(w) } else { w })
    }

    pub fn word_string(self) -> String {
        let w = self.reduced_word();
        if w.is_empty() {
            return "1".into();
        }
        w.iter().map(|g| format!("s{g}")).collect()
    }
}

impl From<WeylElement> for String {
    fn from(w: WeylElement) -> String {
        w.name().to_string()
    }
}

impl TryFrom<String> for WeylElement {
    type Error = Error;

    fn try_from(s: String) -> Result<WeylElement> {
        WeylElement::parse(&s)
    }
}

impl fmt::Debug for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

struct WeylTable {
    elements: Vec<WeylElement>,
    words: HashMap<WeylElement, Vec<u8>>,
}

fn weyl_table() -> &'static WeylTable {
    static TABLE: OnceLock<WeylTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut words: HashMap<WeylElement, Vec<u8>> = HashMap::new();
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        words.insert(WeylElement::ID, Vec::new());
        order.push(WeylElement::ID);
        queue.push_back(WeylElement::ID);
        while let Some(w) = queue.pop_front() {
            for (g, s) in [(1u8, WeylElement::S1), (2u8, WeylElement::S2)] {
                let n = w.compose(s);
                if !words.contains_key(&n) {
                    let mut word = words[&w].clone();
                    word.push(g);
                    words.insert(n, word);
                    order.push(n);
                    queue.push_back(n);
                }
            }
        }
        WeylTable { elements: order, words }
    })
}

/// The eight Weyl elements in breadth-first order from the generators.
pub fn weyl_group() -> Vec<WeylElement> {
    weyl_table().elements.clone()
}

/// Order in which tables list Weyl elements.
pub const TABLE_ORDER: [WeylElement; 8] = [
    WeylElement::ID,
    WeylElement::NEG_ID,
    WeylElement::S2,
    WeylElement::NEG_S2,
    WeylElement::S1,
    WeylElement::NEG_S1,
    WeylElement::S1S2,
    WeylElement::S2S1,
];

/// Subword criterion on the reduced word of `w`.
pub fn bruhat_leq(w_prime: WeylElement, w: WeylElement) -> bool {
    let word = w.reduced_word();
    (0u32..(1 << word.len())).any(|mask| {
        let sub: Vec<u8> = word
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, g)| *g)
            .collect();
        WeylElement::from_word(&sub).unwrap() == w_prime
    })
}

/// The standard parabolic subgroups containing the upper Borel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ParabolicType {
    Borel,
    Siegel,
    Klingen,
    Full,
}

impl ParabolicType {
    pub const MAXIMAL_AND_BOREL: [ParabolicType; 3] =
        [ParabolicType::Siegel, ParabolicType::Klingen, ParabolicType::Borel];

    /// Accepts `B`, `P`, `P*` and the long names.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "B" | "b" | "Borel" | "borel" => Ok(ParabolicType::Borel),
            "P" | "p" | "Siegel" | "siegel" => Ok(ParabolicType::Siegel),
            "P*" | "p*" | "Klingen" | "klingen" => Ok(ParabolicType::Klingen),
            "G" | "Full" | "full" => Ok(ParabolicType::Full),
            other => Err(Error::UnknownParabolic(other.to_string())),
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            ParabolicType::Borel => "B",
            ParabolicType::Siegel => "P",
            ParabolicType::Klingen => "P*",
            ParabolicType::Full => "G",
        }
    }

    /// `R_Q`: positive roots in the unipotent radical, in the fixed root order.
    pub fn positive_unipotent_roots(self) -> Vec<Root> {
        match self {
            ParabolicType::Borel => POSITIVE_ROOTS.to_vec(),
            ParabolicType::Siegel => vec![Root::ALPHA2, Root::ALPHA12, Root::ALPHA112],
            ParabolicType::Klingen => vec![Root::ALPHA1, Root::ALPHA12, Root::ALPHA112],
            ParabolicType::Full => vec![],
        }
    }

    pub fn negative_unipotent_roots(self) -> Vec<Root> {
        self.positive_unipotent_roots().into_iter().map(Root::neg).collect()
    }

    /// `Δ_Q`: the roots of the Levi factor.
    pub fn levi_roots(self) -> Vec<Root> {
        match self {
            ParabolicType::Borel => vec![],
            ParabolicType::Siegel => vec![Root::ALPHA1, Root::ALPHA1.neg()],
            ParabolicType::Klingen => vec![Root::ALPHA2, Root::ALPHA2.neg()],
            ParabolicType::Full => ALL_ROOTS.to_vec(),
        }
    }

    pub fn positive_levi_roots(self) -> Vec<Root> {
        self.levi_roots().into_iter().filter(|r| r.is_positive()).collect()
    }

    /// `W_M`, the Weyl group of the Levi factor.
    pub fn weyl_subgroup(self) -> Vec<WeylElement> {
        match self {
            ParabolicType::Borel => vec![WeylElement::ID],
            ParabolicType::Siegel => vec![WeylElement::ID, WeylElement::S1],
            ParabolicType::Klingen => vec![WeylElement::ID, WeylElement::S2],
            ParabolicType::Full => weyl_group(),
        }
    }

    /// Diagonal block sizes in the flag basis `(e1, e2, f2, f1)`.
    pub fn block_shape(self) -> &'static [usize] {
        match self {
            ParabolicType::Borel => &[1, 1, 1, 1],
            ParabolicType::Siegel => &[2, 2],
            ParabolicType::Klingen => &[1, 2, 1],
            ParabolicType::Full => &[4],
        }
    }

    /// Half the sum of the positive Levi roots, in `(m1, m2)` coordinates, doubled to stay integral.
    pub fn levi_rho_doubled(self) -> (i64, i64) {
        let mut s = (0, 0);
        let roots = if self == ParabolicType::Full {
            POSITIVE_ROOTS.to_vec()
        } else {
            self.positive_levi_roots()
        };
        for r in roots {
            s.0 += r.m1;
            s.1 += r.m2;
        }
        s
    }
}

impl fmt::Display for ParabolicType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

/// One class of `W_Q \ W / W_Σ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DoubleCoset {
    /// Name used in the printed tables: the first element of [`TABLE_ORDER`] in the class.
    pub label: WeylElement,
    /// The unique element of minimal length in the class.
    pub minimal: WeylElement,
    pub members: Vec<WeylElement>,
}

/// Classes of `W_Q \ W / W_Σ`, ordered by their table labels.
pub fn double_cosets(q: ParabolicType, sigma: ParabolicType) -> Vec<DoubleCoset> {
    let wq = q.weyl_subgroup();
    let ws = sigma.weyl_subgroup();
    let mut seen: BTreeSet<WeylElement> = BTreeSet::new();
    let mut out = Vec::new();
    for &w in TABLE_ORDER.iter() {
        if seen.contains(&w) {
            continue;
        }
        let mut members: Vec<WeylElement> = Vec::new();
        for &a in &wq {
            for &b in &ws {
                let x = a.compose(w).compose(b);
                if !members.contains(&x) {
                    members.push(x);
                }
            }
        }
        members.sort_by_key(|x| TABLE_ORDER.iter().position(|y| y == x));
        seen.extend(members.iter().copied());
        let minimal = *members.iter().min_by_key(|x| x.length()).unwrap();
        out.push(DoubleCoset { label: w, minimal, members });
    }
    out
}

/// `(q'_{Σ,w}, q_{Σ,w}) = (|R_Q ∩ w(R_Σ)|, |R_Σ| − |R_Q⁻ ∩ w(R_Σ)|)`.
pub fn degree_stats(q: ParabolicType, sigma: ParabolicType, w: WeylElement) -> (usize, usize) {
    let rq = q.positive_unipotent_roots();
    let rq_neg = q.negative_unipotent_roots();
    let image: Vec<Root> = sigma
        .positive_unipotent_roots()
        .into_iter()
        .map(|r| w.apply_root(r))
        .collect();
    let q_prime = image.iter().filter(|r| rq.contains(r)).count();
    let q_full = image.len() - image.iter().filter(|r| rq_neg.contains(r)).count();
    (q_prime, q_full)
}

/// Number of roots of `w(R_Σ)` inside the Levi of `Q`.
pub fn levi_overlap(q: ParabolicType, sigma: ParabolicType, w: WeylElement) -> usize {
    let levi = q.levi_roots();
    sigma
        .positive_unipotent_roots()
        .into_iter()
        .filter(|r| levi.contains(&w.apply_root(*r)))
        .count()
}

/// Left coset representatives of `W / W_M` of minimal length.
pub fn minimal_left_coset_reps(m: ParabolicType) -> Vec<WeylElement> {
    let wm = m.weyl_subgroup();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &w in TABLE_ORDER.iter() {
        if seen.contains(&w) {
            continue;
        }
        let coset: Vec<WeylElement> = wm.iter().map(|&x| w.compose(x)).collect();
        seen.extend(coset.iter().copied());
        out.push(*coset.iter().min_by_key(|x| x.length()).unwrap());
    }
    out
}
