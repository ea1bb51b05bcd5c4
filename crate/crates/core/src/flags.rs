//! Finite flag sets `Y^a_s(Z/p^r)` in Iwahori-canonical form and the action of the
//! dominant torus semigroup on them.

use crate::arith::{inv_mod, modulus, rat};
use crate::error::{Error, Result};
use crate::matrix::{block_diagonal_mod, block_lu_mod, ModMat, RatMat};
use crate::roots::{ParabolicType, Root};
use crate::symplectic::{root_element_mod, TorusElement};
use serde::Serialize;
use std::collections::HashMap;

/// Default exhaustive-mode ceiling on the number of enumerated points.
pub const DEFAULT_POINT_BUDGET: usize = 50_000;

/// A torus element `ζ·τ(p^a1, p^a2; p^b)` of the contracting semigroup, where `ζ` is an
/// optional unit part `τ(u1, u2; ux)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SemigroupElement {
    pub a1: i64,
    pub a2: i64,
    pub b: i64,
    pub unit: [i64; 3],
}

impl SemigroupElement {
    pub fn new(a1: i64, a2: i64, b: i64) -> Self {
        SemigroupElement { a1, a2, b, unit: [1, 1, 1] }
    }

    pub fn identity() -> Self {
        Self::new(0, 0, 0)
    }

    /// `d₁ = μ(1₂; p) = diag(1, 1, p, p)`.
    pub fn d1() -> Self {
        Self::new(0, 0, 1)
    }

    /// `d₂ = μ*(1, p·1₂) = diag(1, p, p², p)`.
    pub fn d2() -> Self {
        Self::new(0, 1, 2)
    }

    /// `d₃ = d₁d₂ = diag(1, p, p³, p²)`.
    pub fn d3() -> Self {
        Self::new(0, 1, 3)
    }

    /// The central element `p·1₄`.
    pub fn t0() -> Self {
        Self::new(1, 1, 2)
    }

    /// The contracting element attached to a parabolic: `d₁`, `d₂` or `d₃`.
    pub fn contracting(q: ParabolicType) -> Result<Self> {
        match q {
            ParabolicType::Siegel => Ok(Self::d1()),
            ParabolicType::Klingen => Ok(Self::d2()),
            ParabolicType::Borel => Ok(Self::d3()),
            ParabolicType::Full => Err(Error::InvalidInput("the full group has no contracting element".into())),
        }
    }

    pub fn with_unit(mut self, unit: [i64; 3]) -> Self {
        self.unit = unit;
        self
    }

    pub fn mul(&self, o: &Self) -> Self {
        SemigroupElement {
            a1: self.a1 + o.a1,
            a2: self.a2 + o.a2,
            b: self.b + o.b,
            unit: [self.unit[0] * o.unit[0], self.unit[1] * o.unit[1], self.unit[2] * o.unit[2]],
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::identity();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Membership in the cone `D` of the given parabolic.
    pub fn in_cone(&self, q: ParabolicType) -> bool {
        let (a1, a2, b) = (self.a1, self.a2, self.b);
        match q {
            ParabolicType::Siegel => a1 == a2 && 0 <= 2 * a1 && 2 * a1 <= b,
            ParabolicType::Klingen => 0 <= a1 && a1 <= a2 && b == 2 * a2,
            ParabolicType::Borel => 0 <= a1 && a1 <= a2 && 2 * a2 <= b,
            ParabolicType::Full => a1 == 0 && a2 == 0 && b == 0,
        }
    }

    pub fn torus(&self, p: u64) -> TorusElement {
        let t = TorusElement::p_power(p, self.a1, self.a2, self.b);
        TorusElement {
            t1: t.t1 * rat(self.unit[0]),
            t2: t.t2 * rat(self.unit[1]),
            x: t.x * rat(self.unit[2]),
        }
    }

    pub fn matrix(&self, p: u64) -> RatMat {
        self.torus(p).matrix()
    }

    pub fn has_unit_part(&self) -> bool {
        self.unit != [1, 1, 1]
    }

    /// p-adic valuations of the diagonal in the flag basis `(e1, e2, f2, f1)`.
    pub fn flag_exponents(&self) -> [i64; 4] {
        [self.a1, self.a2, self.b - self.a2, self.b - self.a1]
    }

    /// `val_p α(d)` for a root `α`.
    pub fn root_valuation(&self, r: Root) -> i64 {
        r.valuation_on(self.a1, self.a2, self.b)
    }
}

/// A point `u⁻·m·Q⁺` of `Y^a_s(Z/p^r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FlagPoint {
    /// Lower unipotent factor with off-diagonal entries in `p^s`, stored mod `p^r`
    /// in the basis `(e1, e2, f1, f2)`.
    pub u_minus: ModMat,
    /// Element of `M'(Z/p^r)`, the Levi of `Q` inside `Sp4`.
    pub levi: ModMat,
}

impl FlagPoint {
    pub fn marked(n: u64) -> Self {
        FlagPoint { u_minus: ModMat::identity(n), levi: ModMat::identity(n) }
    }

    pub fn matrix(&self) -> ModMat {
        self.u_minus.mul(&self.levi)
    }

    /// True when the point lies over the marked point of `X`.
    pub fn in_marked_fiber(&self) -> bool {
        self.u_minus.is_identity()
    }

    /// Smallest `t` with `u⁻ ≡ 1 mod p^t` (capped at `r`).
    pub fn depth(&self, p: u64, r: u32) -> u32 {
        let mut t = r;
        for i in 0..4 {
            for j in 0..4 {
                let x = self.u_minus.m[i][j];
                let target = if i == j { 1 % self.u_minus.modulus } else { 0 };
                let diff = (x + self.u_minus.modulus - target) % self.u_minus.modulus;
                if diff != 0 {
                    let mut v = 0;
                    let mut y = diff;
                    while y.is_multiple_of(p) {
                        y /= p;
                        v += 1;
                    }
                    t = t.min(v);
                }
            }
        }
        t
    }
}

/// Canonical factorization of a matrix `g ∈ I'_s` modulo `p^r` into a flag point.
pub fn canonical_point(g: &ModMat, q: ParabolicType) -> Result<FlagPoint> {
    let shape = q.block_shape();
    let (l, u) = block_lu_mod(&g.to_flag_basis(), shape)?;
    let levi = block_diagonal_mod(&u, shape);
    Ok(FlagPoint { u_minus: l.from_flag_basis(), levi: levi.from_flag_basis() })
}

/// Whether to list every point or only report the closed-form size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnumerationMode {
    Exhaustive { budget: usize },
    CountOnly,
}

impl Default for EnumerationMode {
    fn default() -> Self {
        EnumerationMode::Exhaustive { budget: DEFAULT_POINT_BUDGET }
    }
}

/// The enumerated flag set together with an index for lookups.
#[derive(Debug, Clone)]
pub struct FlagSpace {
    pub parabolic: ParabolicType,
    pub p: u64,
    pub r: u32,
    pub s: u32,
    pub modulus: u64,
    pub points: Vec<FlagPoint>,
    index: HashMap<FlagPoint, usize>,
}

impl FlagSpace {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index_of(&self, y: &FlagPoint) -> Option<usize> {
        self.index.get(y).copied()
    }

    pub fn marked_index(&self) -> usize {
        self.index[&FlagPoint::marked(self.modulus)]
    }

    /// Indices of the points over the marked point of `X`.
    pub fn marked_fiber(&self) -> Vec<usize> {
        (0..self.points.len()).filter(|&i| self.points[i].in_marked_fiber()).collect()
    }

    /// The projection to `X`: the index of the `u⁻` component among distinct ones.
    pub fn projection(&self) -> Vec<usize> {
        let mut ids: HashMap<ModMat, usize> = HashMap::new();
        self.points
            .iter()
            .map(|y| {
                let n = ids.len();
                *ids.entry(y.u_minus).or_insert(n)
            })
            .collect()
    }
}

fn euler_phi_prime_power(p: u64, r: u32) -> u64 {
    p.pow(r - 1) * (p - 1)
}

/// `|M'(Z/p^r)|` for the Levi of `Q` inside `Sp4`.
pub fn levi_order(q: ParabolicType, p: u64, r: u32) -> u128 {
    let p128 = p as u128;
    let phi = euler_phi_prime_power(p, r) as u128;
    let gl2 = p128.pow(4 * (r - 1)) * (p128 * p128 - 1) * (p128 * p128 - p128);
    let sl2 = p128.pow(3 * (r - 1)) * p128 * (p128 * p128 - 1);
    match q {
        ParabolicType::Borel => phi * phi,
        ParabolicType::Siegel => gl2,
        ParabolicType::Klingen => phi * sl2,
        ParabolicType::Full => {
            // |Sp4(F_p)| = p^4 (p^2 - 1)(p^4 - 1), lifted by p^{10(r-1)}.
            p128.pow(10 * (r - 1)) * p128.pow(4) * (p128 * p128 - 1) * (p128.pow(4) - 1)
        }
    }
}

/// `|Y^a_s(Z/p^r)| = p^{(r−s)|R_Q⁻|}·|M'(Z/p^r)|`.
pub fn flag_count(q: ParabolicType, p: u64, r: u32, s: u32) -> u128 {
    let n_roots = q.positive_unipotent_roots().len() as u32;
    (p as u128).pow((r - s) * n_roots) * levi_order(q, p, r)
}

fn check_scale(p: u64, r: u32, s: u32) -> Result<()> {
    crate::arith::check_odd_prime(p)?;
    if s == 0 || s > r {
        return Err(Error::InvalidInput(format!("depth s = {s} must satisfy 1 <= s <= r = {r}")));
    }
    Ok(())
}

/// Elements of `M'(Z/p^r)`, the Levi of `Q` in `Sp4`, in a fixed order.
pub fn levi_elements(q: ParabolicType, n: u64) -> Vec<ModMat> {
    let units: Vec<u64> = (1..n).filter(|&x| inv_mod(x, n).is_some()).collect();
    let mut out = Vec::new();
    match q {
        ParabolicType::Borel => {
            for &t1 in &units {
                for &t2 in &units {
                    let mut m = ModMat::identity(n);
                    m.m[0][0] = t1;
                    m.m[1][1] = t2;
                    m.m[2][2] = inv_mod(t1, n).unwrap();
                    m.m[3][3] = inv_mod(t2, n).unwrap();
                    out.push(m);
                }
            }
        }
        ParabolicType::Siegel => {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            let det = (a * d % n + n - b * c % n) % n;
                            let di = match inv_mod(det, n) {
                                Some(x) => x,
                                None => continue,
                            };
                            let mut m = ModMat::identity(n);
                            m.m[0][0] = a;
                            m.m[0][1] = b;
                            m.m[1][0] = c;
                            m.m[1][1] = d;
                            // ᵗA⁻¹ = det⁻¹·[[d, −c], [−b, a]]
                            m.m[2][2] = d * di % n;
                            m.m[2][3] = (n - c) % n * di % n;
                            m.m[3][2] = (n - b) % n * di % n;
                            m.m[3][3] = a * di % n;
                            out.push(m);
                        }
                    }
                }
            }
        }
        ParabolicType::Klingen => {
            for &a in &units {
                for x in 0..n {
                    for y in 0..n {
                        for z in 0..n {
                            for w in 0..n {
                                if (x * w % n + n - y * z % n) % n != 1 % n {
                                    continue;
                                }
                                let mut m = ModMat::identity(n);
                                m.m[0][0] = a;
                                m.m[2][2] = inv_mod(a, n).unwrap();
                                m.m[1][1] = x;
                                m.m[1][3] = y;
                                m.m[3][1] = z;
                                m.m[3][3] = w;
                                out.push(m);
                            }
                        }
                    }
                }
            }
        }
        ParabolicType::Full => panic!("the full Levi is not enumerated"),
    }
    out
}

/// Lower unipotent elements of `Q⁻(p^s)` modulo `p^r`.
pub fn lower_unipotents(q: ParabolicType, p: u64, r: u32, s: u32) -> Vec<ModMat> {
    let n = p.pow(r);
    let step = p.pow(s);
    let count = p.pow(r - s);
    let roots = q.negative_unipotent_roots();
    let mut out = vec![ModMat::identity(n)];
    for root in roots {
        let mut next = Vec::with_capacity(out.len() * count as usize);
        for m in &out {
            for k in 0..count {
                next.push(m.mul(&root_element_mod(root, k * step, n)));
            }
        }
        out = next;
    }
    out
}

/// Lists `Y^a_s(Z/p^r)` for `Q`.
pub fn enumerate_flags(q: ParabolicType, p: u64, r: u32, s: u32, mode: EnumerationMode) -> Result<FlagSpace> {
    check_scale(p, r, s)?;
    let n = modulus(p, r)?;
    let size = flag_count(q, p, r, s);
    let budget = match mode {
        EnumerationMode::CountOnly => {
            return Err(Error::InvalidInput(format!(
                "count-only mode: |Y| = {size}; use flag_count for the number alone"
            )))
        }
        EnumerationMode::Exhaustive { budget } => budget,
    };
    if q == ParabolicType::Full || size > budget as u128 {
        return Err(Error::ScaleRefused(format!(
            "|Y^a_{s}(Z/{p}^{r})| = {size} for {q} exceeds the budget of {budget} points"
        )));
    }
    let lowers = lower_unipotents(q, p, r, s);
    let levis = levi_elements(q, n);
    let mut points = Vec::with_capacity(size as usize);
    for l in &lowers {
        for m in &levis {
            points.push(FlagPoint { u_minus: *l, levi: *m });
        }
    }
    let index: HashMap<FlagPoint, usize> = points.iter().enumerate().map(|(i, y)| (*y, i)).collect();
    if index.len() != points.len() {
        return Err(Error::CounterexampleFound("flag enumeration produced duplicates".into()));
    }
    Ok(FlagSpace { parabolic: q, p, r, s, modulus: n, points, index })
}

/// `d·y`: the coset of `d·g·d⁻¹`, computed over exact rationals and reduced mod `p^r`.
pub fn act(d: &SemigroupElement, y: &FlagPoint, q: ParabolicType, p: u64, r: u32) -> Result<FlagPoint> {
    let n = modulus(p, r)?;
    let g = y.matrix().to_rat();
    let t = d.matrix(p);
    let ti = t.inverse().ok_or(Error::SingularBlock)?;
    let c = t.mul(&g).mul(&ti);
    if !c.is_p_integral(p) {
        return Err(Error::NonIntegralConjugate);
    }
    let reduced = c.reduce(p, r, n)?;
    canonical_point(&reduced, q)
}

/// The same action computed directly modulo `p^r` by rescaling entries; agrees with
/// [`act`] whenever that is defined.
pub fn act_fast(d: &SemigroupElement, y: &FlagPoint, q: ParabolicType, p: u64) -> Result<FlagPoint> {
    let g = y.matrix().to_flag_basis();
    canonical_point(&conjugate_flag_mod(d, &g, p)?.from_flag_basis(), q)
}

/// Flag-basis diagonal of the unit part `τ(u1, u2; ux)` modulo `n`.
pub(crate) fn unit_diagonal_mod(d: &SemigroupElement, n: u64) -> Result<[u64; 4]> {
    let red = |x: i64| x.rem_euclid(n as i64) as u64;
    let [u1, u2, ux] = d.unit;
    let i1 = inv_mod(red(u1), n).ok_or(Error::NonInvertibleMultiplier)?;
    let i2 = inv_mod(red(u2), n).ok_or(Error::NonInvertibleMultiplier)?;
    inv_mod(red(ux), n).ok_or(Error::NonInvertibleMultiplier)?;
    Ok([red(u1), red(u2), red(ux) * i2 % n, red(ux) * i1 % n])
}

pub(crate) fn conjugate_flag_mod(d: &SemigroupElement, g_flag: &ModMat, p: u64) -> Result<ModMat> {
    let n = g_flag.modulus;
    let e = d.flag_exponents();
    let z = unit_diagonal_mod(d, n)?;
    let zi: Vec<u64> = z.iter().map(|&x| inv_mod(x, n).unwrap()).collect();
    let mut out = *g_flag;
    for i in 0..4 {
        for j in 0..4 {
            let x = g_flag.m[i][j];
            if x == 0 {
                continue;
            }
            let k = e[i] - e[j];
            if k < 0 {
                return Err(Error::NonIntegralConjugate);
            }
            let mut v = x;
            for _ in 0..k.min(64) {
                v = v * p % n;
            }
            out.m[i][j] = v * z[i] % n * zi[j] % n;
        }
    }
    Ok(out)
}

/// Left translation of a point by an element of `I'_s` given modulo `p^r`.
pub fn translate(u: &ModMat, y: &FlagPoint, q: ParabolicType) -> Result<FlagPoint> {
    canonical_point(&u.mul(&y.matrix()), q)
}

/// Right translation by `m ∈ M'(Z/p^r)`.
pub fn right_translate(y: &FlagPoint, m: &ModMat) -> FlagPoint {
    FlagPoint { u_minus: y.u_minus, levi: y.levi.mul(m) }
}

/// Outcome of an exhaustive contraction check.
#[derive(Debug, Clone, Serialize)]
pub struct ContractionReport {
    pub parameters: ContractionParameters,
    pub counts: ContractionCounts,
    /// `val_p α(d_Q)` for each `α ∈ R_Q`, all negative.
    pub root_valuations: Vec<(String, i64)>,
    pub pass: bool,
    pub witnesses: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContractionParameters {
    pub parabolic: String,
    pub p: u64,
    pub r: u32,
    pub s: u32,
    pub element: SemigroupElement,
    pub applications: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContractionCounts {
    pub points: usize,
    pub landed_in_marked_fiber: usize,
    pub depth_increase_checked: usize,
}

/// Applies `d_Q^{r−s}` to every point of `Y^a_s(Z/p^r)` and checks that all images lie
/// over the marked point. Also checks that one application raises depth by one.
pub fn contraction_report(q: ParabolicType, p: u64, r: u32, s: u32, budget: usize) -> Result<ContractionReport> {
    let space = enumerate_flags(q, p, r, s, EnumerationMode::Exhaustive { budget })?;
    let d = SemigroupElement::contracting(q)?;
    let power = d.pow(r - s);
    let root_valuations: Vec<(String, i64)> = q
        .positive_unipotent_roots()
        .into_iter()
        .map(|a| (a.name().to_string(), d.root_valuation(a)))
        .collect();
    let mut landed = 0;
    let mut depth_checked = 0;
    let mut witnesses = Vec::new();
    for y in &space.points {
        let img = act(&power, y, q, p, r)?;
        if img.in_marked_fiber() {
            landed += 1;
        } else if witnesses.len() < 5 {
            witnesses.push(format!("{:?} -> {:?}", y.u_minus.m, img.u_minus.m));
        }
        if s < r {
            let one = act(&d, y, q, p, r)?;
            let before = y.depth(p, r);
            if one.depth(p, r) < (before + 1).min(r) {
                if witnesses.len() < 5 {
                    witnesses.push(format!("depth did not increase at {:?}", y.u_minus.m));
                }
            } else {
                depth_checked += 1;
            }
        }
    }
    let pass = landed == space.len() && (s == r || depth_checked == space.len());
    if !pass {
        return Err(Error::CounterexampleFound(witnesses.join("; ")));
    }
    Ok(ContractionReport {
        parameters: ContractionParameters {
            parabolic: q.short_name().into(),
            p,
            r,
            s,
            element: d,
            applications: r - s,
        },
        counts: ContractionCounts {
            points: space.len(),
            landed_in_marked_fiber: landed,
            depth_increase_checked: depth_checked,
        },
        root_valuations,
        pass,
        witnesses,
    })
}

/// Lagrangian subspaces of `F_p^4` for the standard form, each given by its reduced
/// row-echelon basis.
pub fn lagrangians(p: u64) -> Vec<[[u64; 4]; 2]> {
    let form = |v: &[u64; 4], w: &[u64; 4]| -> u64 {
        // ⟨v, w⟩ = v0 w2 + v1 w3 − v2 w0 − v3 w1
        (v[0] * w[2] + v[1] * w[3] + 2 * p * p - v[2] * w[0] - v[3] * w[1]) % p
    };
    let mut out = Vec::new();
    // Pivot positions i < j; free entries fill the non-pivot columns to the right.
    for i in 0..4 {
        for j in i + 1..4 {
            let free1: Vec<usize> = (i + 1..4).filter(|&c| c != j).collect();
            let free2: Vec<usize> = (j + 1..4).collect();
            let n1 = p.pow(free1.len() as u32);
            let n2 = p.pow(free2.len() as u32);
            for a in 0..n1 {
                for b in 0..n2 {
                    let mut v = [0u64; 4];
                    let mut w = [0u64; 4];
                    v[i] = 1;
                    w[j] = 1;
                    let mut x = a;
                    for &c in &free1 {
                        v[c] = x % p;
                        x /= p;
                    }
                    let mut x = b;
                    for &c in &free2 {
                        w[c] = x % p;
                        x /= p;
                    }
                    if form(&v, &w) == 0 {
                        out.push([v, w]);
                    }
                }
            }
        }
    }
    out
}
