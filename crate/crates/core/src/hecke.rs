//! Parahoric Hecke double cosets `[CξC]`, their right-coset decompositions and
//! products, operators on function modules over flag sets, the ordinary idempotent,
//! spherical cell counts and the characteristic polynomial `Q(X)`.

use crate::arith::{inv_mod, modulus};
use crate::error::{Error, Result};
use crate::flags::{
    act_fast, canonical_point, conjugate_flag_mod, enumerate_flags, lower_unipotents, translate,
    unit_diagonal_mod, EnumerationMode, FlagPoint, FlagSpace, SemigroupElement,
};
use crate::matrix::ModMat;
use crate::roots::{ParabolicType, Root, WeightCharacter, WeylElement, ALL_ROOTS};
use crate::symplectic::root_nilpotent;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;

/// Largest number of right cosets whose keys are materialized.
pub const DEFAULT_COSET_BUDGET: u128 = 5_000_000;

/// Which subgroup `C` the double coset is taken with respect to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum LevelGroup {
    /// The parahoric `I'_r` itself.
    Full,
    /// `C = {g ∈ I'_r : the Levi part of g mod p^r is in the derived group}`; classes
    /// then carry a torus unit graded by `T'(Z/p^r)`.
    Derived,
}

/// The double coset `[CξC]` for a torus element `ξ` of the semigroup.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HeckeDoubleCoset {
    pub parabolic: ParabolicType,
    pub p: u64,
    pub level: u32,
    pub element: SemigroupElement,
    pub group: LevelGroup,
    pub degree: u128,
}

impl HeckeDoubleCoset {
    pub fn new(q: ParabolicType, p: u64, level: u32, element: SemigroupElement) -> Result<Self> {
        Self::with_group(q, p, level, element, LevelGroup::Full)
    }

    pub fn with_group(
        q: ParabolicType,
        p: u64,
        level: u32,
        element: SemigroupElement,
        group: LevelGroup,
    ) -> Result<Self> {
        crate::arith::check_odd_prime(p)?;
        if level == 0 {
            return Err(Error::InvalidInput("level must be positive".into()));
        }
        if !element.in_cone(q) {
            return Err(Error::NonIntegralConjugate);
        }
        let degree = (p as u128).pow(rep_exponents(q, &element).iter().map(|(_, k)| *k).sum());
        Ok(HeckeDoubleCoset { parabolic: q, p, level, element, group, degree })
    }

    pub fn identity(q: ParabolicType, p: u64, level: u32) -> Result<Self> {
        Self::new(q, p, level, SemigroupElement::identity())
    }

    /// Number of right cosets.
    pub fn degree(&self) -> u128 {
        self.degree
    }

    /// Parameters of the `j`-th representative `u_j`, in the order
    /// `(α1, α2, α1+α2, 2α1+α2)` restricted to the unipotent radical.
    pub fn rep_params(&self, mut j: u128) -> Vec<(Root, u64)> {
        let ranges = rep_exponents(self.parabolic, &self.element);
        let mut out = vec![(Root::ALPHA1, 0u64); ranges.len()];
        for (slot, (root, k)) in ranges.iter().enumerate().rev() {
            let m = (self.p as u128).pow(*k);
            out[slot] = (*root, (j % m) as u64);
            j /= m;
        }
        out
    }

    /// All representatives `u_j` reduced mod `n`, in lexicographic parameter order.
    pub fn unipotent_reps_mod(&self, n: u64) -> Result<Vec<ModMat>> {
        self.check_budget()?;
        Ok((0..self.degree)
            .map(|j| {
                let mut m = ModMat::identity(n);
                for (root, x) in self.rep_params(j) {
                    m = m.mul(&crate::symplectic::root_element_mod(root, x % n, n));
                }
                m
            })
            .collect())
    }

    /// The representative `u_j` as an exact integer matrix in the flag basis.
    pub fn unipotent_rep_flag(&self, j: u128) -> IntMat {
        let mut m = int_identity();
        for (root, x) in self.rep_params(j) {
            m = int_mul(&m, &root_element_int(root, x as i128));
        }
        to_flag_int(&m)
    }

    fn check_budget(&self) -> Result<()> {
        if self.degree > DEFAULT_COSET_BUDGET {
            return Err(Error::ScaleRefused(format!(
                "degree {} exceeds the coset budget {}",
                self.degree, DEFAULT_COSET_BUDGET
            )));
        }
        Ok(())
    }

    /// Canonical keys of the right cosets `Cξ_j`.
    pub fn coset_keys(&self) -> Result<Vec<CosetKey>> {
        self.check_budget()?;
        (0..self.degree)
            .into_par_iter()
            .map(|j| {
                let v = self.unipotent_rep_flag(j);
                coset_key(&scale_rows(&v, &self.element, self.p), &self.element, self.p, self.level, self.group)
            })
            .collect()
    }

    fn same_algebra(&self, o: &Self) -> Result<()> {
        if self.level != o.level || self.parabolic != o.parabolic || self.p != o.p || self.group != o.group {
            return Err(Error::LevelMismatch);
        }
        Ok(())
    }
}

/// `(α, |val_p α(d)|)` for the roots of the unipotent radical.
pub fn rep_exponents(q: ParabolicType, d: &SemigroupElement) -> Vec<(Root, u32)> {
    q.positive_unipotent_roots()
        .into_iter()
        .map(|a| (a, d.root_valuation(a).unsigned_abs() as u32))
        .collect()
}

/// Representatives and degree of `CξC = ∐ Cξ_j`.
#[derive(Debug, Clone, Serialize)]
pub struct CosetDecomposition {
    pub degree: u128,
    pub root_exponents: Vec<(String, u32)>,
    /// Parameter vectors of the `u_j` with `ξ_j = ξ·u_j`, when materialized.
    pub representatives: Option<Vec<Vec<u64>>>,
    pub pairwise_inequivalent: Option<bool>,
}

pub fn coset_decomposition(h: &HeckeDoubleCoset, materialize: bool) -> Result<CosetDecomposition> {
    let root_exponents = rep_exponents(h.parabolic, &h.element)
        .into_iter()
        .map(|(a, k)| (a.name().to_string(), k))
        .collect();
    let (representatives, pairwise_inequivalent) = if materialize {
        let keys = h.coset_keys()?;
        let mut sorted = keys.clone();
        sorted.sort();
        sorted.dedup();
        let reps = (0..h.degree)
            .map(|j| h.rep_params(j).into_iter().map(|(_, x)| x).collect())
            .collect();
        (Some(reps), Some(sorted.len() == keys.len()))
    } else {
        (None, None)
    };
    Ok(CosetDecomposition { degree: h.degree, root_exponents, representatives, pairwise_inequivalent })
}

pub type IntMat = [[i128; 4]; 4];

fn int_identity() -> IntMat {
    let mut m = [[0i128; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1;
    }
    m
}

fn int_mul(a: &IntMat, b: &IntMat) -> IntMat {
    let mut m = [[0i128; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    m
}

fn root_element_int(r: Root, x: i128) -> IntMat {
    let e = root_nilpotent(r);
    let mut m = int_identity();
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] += x * e[i][j] as i128;
        }
    }
    m
}

fn to_flag_int(a: &IntMat) -> IntMat {
    let mut m = [[0i128; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = a[crate::matrix::FLAG_ORDER[i]][crate::matrix::FLAG_ORDER[j]];
        }
    }
    m
}

/// `D·V` for the p-power torus part `D` of `d` (the unit part is tracked separately).
fn scale_rows(v: &IntMat, d: &SemigroupElement, p: u64) -> IntMat {
    let e = d.flag_exponents();
    let mut m = *v;
    for i in 0..4 {
        let f = (p as i128).pow(e[i] as u32);
        for x in m[i].iter_mut() {
            *x *= f;
        }
    }
    m
}

/// `d'⁻¹·V·d'` for upper unitriangular `V`; integral because `d'` lies in the cone.
fn conjugate_down(v: &IntMat, d: &SemigroupElement, p: u64) -> Result<IntMat> {
    let e = d.flag_exponents();
    let mut m = *v;
    for i in 0..4 {
        for j in 0..4 {
            if m[i][j] == 0 {
                continue;
            }
            let k = e[j] - e[i];
            if k < 0 {
                return Err(Error::NonIntegralConjugate);
            }
            m[i][j] *= (p as i128).pow(k as u32);
        }
    }
    Ok(m)
}

/// Canonical invariant of the right coset `C·g` for an upper-triangular `g` in the flag
/// basis whose diagonal is `p^{e_i}` times units.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CosetKey {
    pub exponents: [u32; 4],
    /// Entries above the diagonal, each reduced modulo `p^{e_j}` of its column.
    pub entries: [i128; 6],
    /// Diagonal units modulo `p^r`, kept only for [`LevelGroup::Derived`].
    pub units: Option<[u64; 4]>,
}

/// Row Hermite normal form of `ζ·g` under left multiplication by upper-triangular
/// elements of `C`.
pub fn coset_key(g: &IntMat, d: &SemigroupElement, p: u64, level: u32, group: LevelGroup) -> Result<CosetKey> {
    for i in 0..4 {
        for j in 0..i {
            if g[i][j] != 0 {
                return Err(Error::InvalidInput("coset keys need upper-triangular input".into()));
            }
        }
    }
    let mut exps = [0u32; 4];
    let mut units = [0i128; 4];
    for i in 0..4 {
        let mut x = g[i][i];
        if x == 0 {
            return Err(Error::SingularBlock);
        }
        let mut e = 0;
        while x % p as i128 == 0 {
            x /= p as i128;
            e += 1;
        }
        exps[i] = e;
        units[i] = x;
    }
    let emax = *exps.iter().max().unwrap();
    let n = (p as i128).pow(emax.max(level));
    let mut m = [[0i128; 4]; 4];
    for i in 0..4 {
        let ui = inv_mod(units[i].rem_euclid(n) as u64, n as u64).ok_or(Error::SingularBlock)? as i128;
        for j in i..4 {
            m[i][j] = (g[i][j].rem_euclid(n) * ui).rem_euclid(n);
        }
    }
    for j in 1..4 {
        let pj = (p as i128).pow(exps[j]);
        for i in 0..j {
            let c = m[i][j] / pj;
            if c != 0 {
                for k in j..4 {
                    m[i][k] = (m[i][k] - c * m[j][k]).rem_euclid(n);
                }
            }
        }
    }
    let entries = [m[0][1], m[0][2], m[0][3], m[1][2], m[1][3], m[2][3]];
    let units = match group {
        LevelGroup::Full => None,
        LevelGroup::Derived => {
            let nr = modulus(p, level)?;
            let z = unit_diagonal_mod(d, nr)?;
            let mut u = [0u64; 4];
            for i in 0..4 {
                u[i] = (units[i].rem_euclid(nr as i128) as u64) * z[i] % nr;
            }
            Some(u)
        }
    };
    Ok(CosetKey { exponents: exps, entries, units })
}

/// A formal sum `Σ c_η [CηC]` together with any right cosets that could not be
/// attributed to a known double coset.
#[derive(Debug, Clone, Serialize)]
pub struct HeckeProduct {
    pub terms: Vec<(SemigroupElement, u64)>,
    pub unresolved: usize,
    pub products_examined: u128,
}

/// `[Cξ C]·[Cξ' C]` by the counting formula `c_η = #{(i, j) : Cξ_iξ'_j = Cη}`.
pub fn hecke_multiply(h1: &HeckeDoubleCoset, h2: &HeckeDoubleCoset) -> Result<HeckeProduct> {
    h1.same_algebra(h2)?;
    let total = h1.degree * h2.degree;
    if total > DEFAULT_COSET_BUDGET {
        return Err(Error::ScaleRefused(format!("{total} products exceed the coset budget")));
    }
    let p = h1.p;
    let prod_elem = h1.element.mul(&h2.element);
    let second: Vec<IntMat> = (0..h2.degree).map(|j| h2.unipotent_rep_flag(j)).collect();
    let keys: Vec<CosetKey> = (0..h1.degree)
        .into_par_iter()
        .flat_map_iter(|i| {
            let u = conjugate_down(&h1.unipotent_rep_flag(i), &h2.element, p).expect("cone element");
            let second = &second;
            second.iter().map(move |v| {
                let g = scale_rows(&int_mul(&u, v), &prod_elem, p);
                coset_key(&g, &prod_elem, p, h1.level, h1.group).expect("upper triangular product")
            })
        })
        .collect();
    let mut counts: HashMap<CosetKey, u64> = HashMap::new();
    for k in keys {
        *counts.entry(k).or_insert(0) += 1;
    }
    let target = HeckeDoubleCoset::with_group(h1.parabolic, p, h1.level, prod_elem, h1.group)?;
    let target_keys: std::collections::HashSet<CosetKey> = target.coset_keys()?.into_iter().collect();
    let mut coefficient: Option<u64> = None;
    let mut uniform = true;
    let mut unresolved = 0usize;
    for (k, c) in &counts {
        if target_keys.contains(k) {
            match coefficient {
                None => coefficient = Some(*c),
                Some(c0) if c0 != *c => uniform = false,
                _ => {}
            }
        } else {
            unresolved += 1;
        }
    }
    let covered = counts.keys().filter(|k| target_keys.contains(*k)).count();
    let mut terms = Vec::new();
    if uniform && covered == target_keys.len() {
        if let Some(c) = coefficient {
            terms.push((prod_elem, c));
        }
    } else {
        unresolved += covered;
    }
    Ok(HeckeProduct { terms, unresolved, products_examined: total })
}

/// Sparse square matrix over `Z/modulus`, stored by rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    pub modulus: u64,
    pub rows: Vec<Vec<(usize, u64)>>,
}

impl SparseMatrix {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn identity(dim: usize, modulus: u64) -> Self {
        SparseMatrix { modulus, rows: (0..dim).map(|i| vec![(i, 1 % modulus)]).collect() }
    }

    fn normalize(mut row: Vec<(usize, u64)>, n: u64) -> Vec<(usize, u64)> {
        row.sort_unstable_by_key(|e| e.0);
        let mut out: Vec<(usize, u64)> = Vec::with_capacity(row.len());
        for (c, v) in row {
            match out.last_mut() {
                Some(last) if last.0 == c => last.1 = (last.1 + v) % n,
                _ => out.push((c, v % n)),
            }
        }
        out.retain(|e| e.1 != 0);
        out
    }

    pub fn mul(&self, o: &SparseMatrix) -> SparseMatrix {
        let n = self.modulus;
        let rows = self
            .rows
            .par_iter()
            .map(|row| {
                let mut acc: Vec<(usize, u64)> = Vec::new();
                for &(k, a) in row {
                    for &(j, b) in &o.rows[k] {
                        acc.push((j, a * b % n));
                    }
                }
                Self::normalize(acc, n)
            })
            .collect();
        SparseMatrix { modulus: n, rows }
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.rows.iter().map(|r| r.iter().fold(0, |s, e| (s + e.1) % self.modulus)).collect()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let d = self.dim();
        let mut m = DenseMatrix::zero(d, self.modulus);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                m.data[i * d + j] = v;
            }
        }
        m
    }
}

/// Dense square matrix over `Z/modulus`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DenseMatrix {
    pub dim: usize,
    pub modulus: u64,
    pub data: Vec<u64>,
}

impl DenseMatrix {
    pub fn zero(dim: usize, modulus: u64) -> Self {
        DenseMatrix { dim, modulus, data: vec![0; dim * dim] }
    }

    pub fn identity(dim: usize, modulus: u64) -> Self {
        let mut m = Self::zero(dim, modulus);
        for i in 0..dim {
            m.data[i * dim + i] = 1 % modulus;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u64>], modulus: u64) -> Self {
        let dim = rows.len();
        let data = rows.iter().flat_map(|r| r.iter().map(|x| x % modulus)).collect();
        DenseMatrix { dim, modulus, data }
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.dim + j]
    }

    pub fn mul(&self, o: &DenseMatrix) -> DenseMatrix {
        let (d, n) = (self.dim, self.modulus);
        let data = (0..d)
            .into_par_iter()
            .flat_map_iter(|i| {
                let mut row = vec![0u64; d];
                for k in 0..d {
                    let a = self.data[i * d + k];
                    if a == 0 {
                        continue;
                    }
                    let orow = &o.data[k * d..(k + 1) * d];
                    for j in 0..d {
                        row[j] = (row[j] + a * orow[j]) % n;
                    }
                }
                row
            })
            .collect();
        DenseMatrix { dim: d, modulus: n, data }
    }

    pub fn pow(&self, mut e: u64) -> DenseMatrix {
        let mut base = self.clone();
        let mut acc = Self::identity(self.dim, self.modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.data.chunks(self.dim).map(|c| c.to_vec()).collect()
    }

    pub fn column_is_zero(&self, j: usize) -> bool {
        (0..self.dim).all(|i| self.get(i, j) == 0)
    }
}

/// Hard cap on the factorial iteration.
pub const IDEMPOTENT_CAP: u64 = 64;

/// `e = lim T^{n!}`, stopping at the first `T^{n!}` that is idempotent.
pub fn ordinary_idempotent(t: &DenseMatrix) -> DenseMatrix {
    let mut cur = t.clone();
    for n in 2..=IDEMPOTENT_CAP {
        if cur.mul(&cur) == cur {
            return cur;
        }
        cur = cur.pow(n);
    }
    cur
}

/// Exponent of the normalized weight twist on the one-dimensional coefficient:
/// `val χ(d) − min_w val (wχ)(d)`, which is zero for the trivial weight.
pub fn weight_twist_exponent(d: &SemigroupElement, chi: WeightCharacter) -> i64 {
    let v = |c: WeightCharacter| c.valuation_on(d.a1, d.a2, d.b);
    let min = crate::roots::weyl_group().into_iter().map(|w| v(w.apply_weight(chi))).min().unwrap();
    v(chi) - min
}

fn twist_factor(d: &SemigroupElement, chi: WeightCharacter, p: u64, n: u64) -> u64 {
    let e = weight_twist_exponent(d, chi);
    let mut f = 1 % n;
    for _ in 0..e.min(64) {
        f = f * p % n;
    }
    f
}

/// Coefficient ring `Z/p^m` for module matrices.
fn coefficient_modulus(p: u64, m: u32) -> Result<u64> {
    if m == 0 {
        return Err(Error::InvalidInput("coefficient precision must be positive".into()));
    }
    modulus(p, m)
}

/// Matrix of `f ↦ Σ_j ξ_j⁻¹·f(ξ_j · −)` on functions `Y^a_s(Z/p^r) → Z/p^m`.
pub fn hecke_matrix(
    h: &HeckeDoubleCoset,
    space: &FlagSpace,
    coefficient_precision: u32,
    weight: WeightCharacter,
) -> Result<SparseMatrix> {
    if h.parabolic != space.parabolic || h.p != space.p {
        return Err(Error::LevelMismatch);
    }
    let nm = coefficient_modulus(h.p, coefficient_precision)?;
    let reps = h.unipotent_reps_mod(space.modulus)?;
    let factor = twist_factor(&h.element, weight, h.p, nm);
    let q = space.parabolic;
    let rows: Result<Vec<Vec<(usize, u64)>>> = space
        .points
        .par_iter()
        .map(|y| {
            let mut row = Vec::with_capacity(reps.len());
            for u in &reps {
                let img = act_fast(&h.element, &translate(u, y, q)?, q, h.p)?;
                let idx = space.index_of(&img).ok_or_else(|| {
                    Error::CounterexampleFound("Hecke image left the enumerated flag set".into())
                })?;
                row.push((idx, factor));
            }
            Ok(SparseMatrix::normalize(row, nm))
        })
        .collect();
    Ok(SparseMatrix { modulus: nm, rows: rows? })
}

/// The quotient `X^a(Z/p^s) = Y^a(Z/p^s)/M'`: lower unipotents of depth one mod `p^s`.
#[derive(Debug, Clone)]
pub struct QuotientSpace {
    pub parabolic: ParabolicType,
    pub p: u64,
    pub s: u32,
    pub modulus: u64,
    pub points: Vec<ModMat>,
    index: HashMap<ModMat, usize>,
}

impl QuotientSpace {
    pub fn new(q: ParabolicType, p: u64, s: u32) -> Result<Self> {
        crate::arith::check_odd_prime(p)?;
        let n = modulus(p, s)?;
        let count = (p as u128).pow((s - 1) * q.positive_unipotent_roots().len() as u32);
        if count > crate::flags::DEFAULT_POINT_BUDGET as u128 {
            return Err(Error::ScaleRefused(format!("|X| = {count} exceeds the point budget")));
        }
        let points = lower_unipotents(q, p, s, 1);
        let index = points.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        Ok(QuotientSpace { parabolic: q, p, s, modulus: n, points, index })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn marked_index(&self) -> usize {
        self.index[&ModMat::identity(self.modulus)]
    }

    pub fn index_of(&self, u: &ModMat) -> Option<usize> {
        self.index.get(u).copied()
    }
}

/// Value of an algebraic character of `M'` on a Levi element modulo `n`.
pub fn levi_character(q: ParabolicType, chi: WeightCharacter, m: &ModMat) -> Result<u64> {
    let n = m.modulus;
    let pow = |x: u64, e: i64| -> Result<u64> {
        let base = if e < 0 { inv_mod(x, n).ok_or(Error::SingularBlock)? } else { x };
        let mut acc = 1 % n;
        for _ in 0..e.unsigned_abs() {
            acc = acc * base % n;
        }
        Ok(acc)
    };
    match q {
        ParabolicType::Borel => Ok(pow(m.m[0][0], chi.a1)? * pow(m.m[1][1], chi.a2)? % n),
        ParabolicType::Siegel => {
            if chi.a1 != chi.a2 {
                return Err(Error::InvalidInput("Siegel Levi characters need a1 = a2".into()));
            }
            let det = (m.m[0][0] * m.m[1][1] % n + n - m.m[0][1] * m.m[1][0] % n) % n;
            pow(det, chi.a1)
        }
        ParabolicType::Klingen => {
            if chi.a2 != 0 {
                return Err(Error::InvalidInput("Klingen Levi characters need a2 = 0".into()));
            }
            pow(m.m[0][0], chi.a1)
        }
        ParabolicType::Full => Ok(1 % n),
    }
}

/// The operator on `M'`-equivariant functions (`f(ym) = χ(m)⁻¹f(y)`), written on the
/// quotient `X^a(Z/p^s)` through the section `x ↦ (x, 1)`.
pub fn quotient_hecke_matrix(
    h: &HeckeDoubleCoset,
    space: &QuotientSpace,
    coefficient_precision: u32,
    weight: WeightCharacter,
) -> Result<DenseMatrix> {
    let nm = coefficient_modulus(h.p, coefficient_precision)?;
    if nm > space.modulus {
        return Err(Error::InvalidInput("coefficients must be a quotient of Z/p^s".into()));
    }
    let reps = h.unipotent_reps_mod(space.modulus)?;
    let factor = twist_factor(&h.element, weight, h.p, nm);
    let q = space.parabolic;
    let rows: Result<Vec<Vec<u64>>> = space
        .points
        .par_iter()
        .map(|x| {
            let y = FlagPoint { u_minus: *x, levi: ModMat::identity(space.modulus) };
            let mut row = vec![0u64; space.len()];
            for u in &reps {
                let img = act_fast(&h.element, &translate(u, &y, q)?, q, h.p)?;
                let idx = space.index_of(&img.u_minus).ok_or_else(|| {
                    Error::CounterexampleFound("Hecke image left the quotient".into())
                })?;
                let mut levi = img.levi;
                for row_l in levi.m.iter_mut() {
                    for v in row_l.iter_mut() {
                        *v %= nm;
                    }
                }
                levi.modulus = nm;
                let c = levi_character(q, weight, &levi)?;
                let ci = inv_mod(c, nm).ok_or(Error::SingularBlock)?;
                row[idx] = (row[idx] + factor * ci) % nm;
            }
            Ok(row)
        })
        .collect();
    Ok(DenseMatrix::from_rows(&rows?, nm))
}

/// Outcome of the annihilation check for the evaluation kernel.
#[derive(Debug, Clone, Serialize)]
pub struct KernelReport {
    pub parameters: KernelParameters,
    pub counts: KernelCounts,
    /// `T_Q^{s−1}` kills every basis function of the kernel.
    pub power_kills_kernel: bool,
    /// `e·K = 0`.
    pub idempotent_kills_kernel: bool,
    /// Scalar by which `T_Q` acts on the value at the marked point, and whether it is a unit.
    pub fiber_scalar: u64,
    pub fiber_scalar_is_unit: bool,
    pub idempotent_rank_nonzero: bool,
    pub pass: bool,
    pub witnesses: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelParameters {
    pub parabolic: String,
    pub p: u64,
    pub coefficient_precision: u32,
    pub s: u32,
    pub weight: WeightCharacter,
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelCounts {
    pub module_rank: usize,
    pub kernel_rank: usize,
    pub hecke_degree: u128,
}

/// Builds the equivariant function module on `Y^a(Z/p^s)` with coefficients `Z/p^r`,
/// the kernel `K` of evaluation at the marked point, and checks `T_Q^{s−1}K = 0`
/// and `e·K = 0`.
pub fn evaluation_kernel_check(
    q: ParabolicType,
    p: u64,
    r: u32,
    s: u32,
    weight: WeightCharacter,
) -> Result<KernelReport> {
    if r == 0 || r > s {
        return Err(Error::InvalidInput(format!("need 1 <= r <= s, got r = {r}, s = {s}")));
    }
    let space = QuotientSpace::new(q, p, s)?;
    let d = SemigroupElement::contracting(q)?;
    let h = HeckeDoubleCoset::new(q, p, s, d)?;
    let t = quotient_hecke_matrix(&h, &space, r, weight)?;
    let marked = space.marked_index();
    let power = t.pow((s - 1) as u64);
    let e = ordinary_idempotent(&t);
    let mut witnesses = Vec::new();
    let mut power_ok = true;
    let mut e_ok = true;
    for j in 0..space.len() {
        if j == marked {
            continue;
        }
        if !power.column_is_zero(j) {
            power_ok = false;
            if witnesses.len() < 5 {
                witnesses.push(format!("T^(s-1) does not kill the indicator of point {j}"));
            }
        }
        if !e.column_is_zero(j) {
            e_ok = false;
            if witnesses.len() < 5 {
                witnesses.push(format!("e does not kill the indicator of point {j}"));
            }
        }
    }
    if !power_ok && s > 1 {
        return Err(Error::CounterexampleFound(witnesses.join("; ")));
    }
    let fiber_scalar = t.get(marked, marked);
    Ok(KernelReport {
        parameters: KernelParameters {
            parabolic: q.short_name().into(),
            p,
            coefficient_precision: r,
            s,
            weight,
        },
        counts: KernelCounts { module_rank: space.len(), kernel_rank: space.len() - 1, hecke_degree: h.degree },
        power_kills_kernel: power_ok || s == 1,
        idempotent_kills_kernel: e_ok,
        fiber_scalar,
        fiber_scalar_is_unit: fiber_scalar % p != 0,
        idempotent_rank_nonzero: !e.is_zero(),
        pass: e_ok,
        witnesses,
    })
}

/// One Weyl cell of `K'dK'/K'`.
#[derive(Debug, Clone, Serialize)]
pub struct SphericalCell {
    pub w: WeylElement,
    pub size: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct SphericalReport {
    pub parameters: SphericalParameters,
    pub counts: Vec<SphericalCell>,
    pub total: u128,
    pub pass: bool,
    pub witnesses: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SphericalParameters {
    pub parabolic: String,
    pub element: SemigroupElement,
    pub p: u64,
}

/// Cell sizes `[I' : I' ∩ (τw)d K'(τw d)⁻¹]` for `w ∈ W/W_M`, by counting root
/// valuations, together with their total.
pub fn spherical_decomposition_count(q: ParabolicType, d: &SemigroupElement, p: u64) -> Result<SphericalReport> {
    crate::arith::check_odd_prime(p)?;
    // W/W_M, with W_M the stabilizer of d: classes are the distinct conjugates of d,
    // recorded through the valuations of all roots on them.
    let conj_key = |w: WeylElement| -> Vec<i64> {
        ALL_ROOTS.iter().map(|b| d.root_valuation(w.inverse().apply_root(*b))).collect()
    };
    let mut reps: Vec<WeylElement> = Vec::new();
    let mut seen: Vec<Vec<i64>> = Vec::new();
    for w in crate::roots::TABLE_ORDER {
        let k = conj_key(w);
        match seen.iter().position(|x| *x == k) {
            Some(i) => {
                if w.length() < reps[i].length() {
                    reps[i] = w;
                }
            }
            None => {
                seen.push(k);
                reps.push(w);
            }
        }
    }
    let tau = WeylElement::NEG_ID;
    let mut cells = Vec::new();
    for w in reps {
        let tw = tau.compose(w);
        let mut exp = 0i64;
        for beta in ALL_ROOTS {
            let v = d.root_valuation(tw.inverse().apply_root(beta)) - if beta.is_positive() { 0 } else { 1 };
            exp += v.max(0);
        }
        cells.push(SphericalCell { w, size: (p as u128).pow(exp as u32) });
    }
    let total = cells.iter().map(|c| c.size).sum();
    Ok(SphericalReport {
        parameters: SphericalParameters { parabolic: q.short_name().into(), element: *d, p },
        counts: cells,
        total,
        pass: true,
        witnesses: Vec::new(),
    })
}

/// Coefficients of `X⁴ − T·X³ + q(R + (1+q²)S)·X² − q³TS·X + q⁶S²`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HeckeCharPoly {
    /// `[c0, c1, c2, c3, c4]`, constant term first.
    pub coefficients: [BigRational; 5],
}

impl HeckeCharPoly {
    /// `c1 = c3·q³S` and `c0 = (q³S)²`.
    pub fn autoduality_holds(&self, q: &BigRational, s: &BigRational) -> bool {
        let q3s = q * q * q * s;
        let c = &self.coefficients;
        c[1] == &c[3] * &q3s && c[0] == &q3s * &q3s
    }

    pub fn evaluate(&self, x: &BigRational) -> BigRational {
        self.coefficients.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }
}

pub fn char_poly(t: &BigRational, r: &BigRational, s: &BigRational, q: &BigRational) -> HeckeCharPoly {
    let one = BigRational::one();
    let q2 = q * q;
    let q3 = &q2 * q;
    let c2 = q * (r + (&one + &q2) * s);
    HeckeCharPoly {
        coefficients: [&q3 * &q3 * s * s, -(&q3 * t * s), c2, -t.clone(), one],
    }
}

/// Convenience: the three standard operators `T₁ = [Cd₁C]`, `T₂ = [Cd₂C]`, `T₃ = [Cd₃C]`.
pub fn standard_operators(q: ParabolicType, p: u64, level: u32) -> Result<Vec<HeckeDoubleCoset>> {
    [SemigroupElement::d1(), SemigroupElement::d2(), SemigroupElement::d3()]
        .into_iter()
        .filter(|d| d.in_cone(q))
        .map(|d| HeckeDoubleCoset::new(q, p, level, d))
        .collect()
}

/// Enumerates `Y^a_1(Z/p^r)` for module computations.
pub fn module_space(q: ParabolicType, p: u64, r: u32) -> Result<FlagSpace> {
    enumerate_flags(q, p, r, 1, EnumerationMode::default())
}

/// `d·y` for a unit-twisted torus element computed modulo `p^r` (used for the
/// finite-group classes).
pub fn act_mod(d: &SemigroupElement, y: &FlagPoint, q: ParabolicType, p: u64) -> Result<FlagPoint> {
    let g = y.matrix().to_flag_basis();
    canonical_point(&conjugate_flag_mod(d, &g, p)?.from_flag_basis(), q)
}
