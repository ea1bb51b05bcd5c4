//! Symplectic similitudes, torus and Levi constructors, root subgroups, parahoric
//! membership and Iwahori factorization.

use crate::arith::{is_p_integral, modulus, rat, reduce_rat, val_rat, CoefficientContext};
use crate::error::{Error, Result};
use crate::matrix::{
    below_blocks, block_diagonal_mod, block_lu_mod, block_lu_rat, ModMat, RatMat,
};
use crate::roots::{ParabolicType, Root, WeylElement};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// The standard alternating form `[[0, 1₂], [−1₂, 0]]`.
pub fn j_matrix() -> RatMat {
    RatMat::from_ints([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]])
}

/// A matrix certified to satisfy `ᵗg J g = ν J` with `ν` invertible in its context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimilitudeMatrix {
    pub entries: RatMat,
    pub multiplier: BigRational,
    pub context: CoefficientContext,
}

impl SimilitudeMatrix {
    pub fn mul(&self, other: &SimilitudeMatrix) -> Result<SimilitudeMatrix> {
        if self.context != other.context {
            return Err(Error::InvalidContext("operands live in different contexts".into()));
        }
        similitude_check(&self.entries.mul(&other.entries), self.context)
    }

    pub fn inverse(&self) -> Result<SimilitudeMatrix> {
        match self.context {
            CoefficientContext::Residue { p, r } => {
                let m = modulus(p, r)?;
                let a = self.entries.reduce(p, r, m)?;
                let (l, u) = block_lu_mod(&a, &[4])?;
                debug_assert!(l.is_identity());
                // `u` is `a` itself here; invert through the full 4x4 pivot block instead.
                let inv = mod_inverse(&u)?;
                similitude_check(&inv.to_rat(), self.context)
            }
            _ => {
                let inv = self.entries.inverse().ok_or(Error::NonSimilitude)?;
                similitude_check(&inv, self.context)
            }
        }
    }
}

fn mod_inverse(a: &ModMat) -> Result<ModMat> {
    // Solve a·x = 1 column by column via block LU with a single 4x4 block.
    let n = a.modulus;
    let mut aug = *a;
    let mut inv = ModMat::identity(n);
    for c in 0..4 {
        let piv = (c..4)
            .find(|&r| crate::arith::inv_mod(aug.m[r][c], n).is_some())
            .ok_or(Error::SingularBlock)?;
        aug.m.swap(piv, c);
        inv.m.swap(piv, c);
        let d = crate::arith::inv_mod(aug.m[c][c], n).unwrap();
        for k in 0..4 {
            aug.m[c][k] = aug.m[c][k] * d % n;
            inv.m[c][k] = inv.m[c][k] * d % n;
        }
        for r in 0..4 {
            if r == c {
                continue;
            }
            let f = aug.m[r][c];
            for k in 0..4 {
                aug.m[r][k] = (aug.m[r][k] + n - f * aug.m[c][k] % n) % n;
                inv.m[r][k] = (inv.m[r][k] + n - f * inv.m[c][k] % n) % n;
            }
        }
    }
    Ok(inv)
}

fn is_integer(x: &BigRational) -> bool {
    x.denom().is_one()
}

/// Returns the similitude certificate of `m` in the given context.
///
/// In the residue context the identity is tested modulo `p^r` and the entries are
/// stored reduced. Over the integers the multiplier must be `±1`.
pub fn similitude_check(m: &RatMat, ctx: CoefficientContext) -> Result<SimilitudeMatrix> {
    let j = j_matrix();
    match ctx {
        CoefficientContext::Integers => {
            if !m.m.iter().flatten().all(is_integer) {
                return Err(Error::InvalidInput("entries must be integers".into()));
            }
            let lhs = m.transpose().mul(&j).mul(m);
            let nu = lhs.m[0][2].clone();
            if lhs != j.scale(&nu) {
                return Err(Error::NonSimilitude);
            }
            if nu.abs() != BigRational::one() {
                return Err(Error::NonInvertibleMultiplier);
            }
            Ok(SimilitudeMatrix { entries: m.clone(), multiplier: nu, context: ctx })
        }
        CoefficientContext::ValuedRationals { .. } => {
            let lhs = m.transpose().mul(&j).mul(m);
            let nu = lhs.m[0][2].clone();
            if lhs != j.scale(&nu) {
                return Err(Error::NonSimilitude);
            }
            if nu.is_zero() {
                return Err(Error::NonInvertibleMultiplier);
            }
            Ok(SimilitudeMatrix { entries: m.clone(), multiplier: nu, context: ctx })
        }
        CoefficientContext::Residue { p, r } => {
            let n = modulus(p, r)?;
            let a = m.reduce(p, r, n)?;
            let jm = j.reduce(p, r, n)?;
            let mut at = a;
            for i in 0..4 {
                for k in 0..4 {
                    at.m[i][k] = a.m[k][i];
                }
            }
            let lhs = at.mul(&jm).mul(&a);
            let nu = lhs.m[0][2];
            for i in 0..4 {
                for k in 0..4 {
                    if lhs.m[i][k] != (jm.m[i][k] * nu) % n {
                        return Err(Error::NonSimilitude);
                    }
                }
            }
            if nu % p == 0 {
                return Err(Error::NonInvertibleMultiplier);
            }
            Ok(SimilitudeMatrix {
                entries: a.to_rat(),
                multiplier: rat(nu as i64),
                context: ctx,
            })
        }
    }
}

/// `τ(t1, t2; x) = diag(t1, t2, x/t1, x/t2)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusElement {
    pub t1: BigRational,
    pub t2: BigRational,
    pub x: BigRational,
}

impl TorusElement {
    pub fn new(t1: BigRational, t2: BigRational, x: BigRational) -> Result<Self> {
        if t1.is_zero() || t2.is_zero() || x.is_zero() {
            return Err(Error::InvalidInput("torus coordinates must be invertible".into()));
        }
        Ok(TorusElement { t1, t2, x })
    }

    /// `τ(p^a1, p^a2; p^b)`.
    pub fn p_power(p: u64, a1: i64, a2: i64, b: i64) -> Self {
        TorusElement {
            t1: crate::arith::pow_rat(p, a1),
            t2: crate::arith::pow_rat(p, a2),
            x: crate::arith::pow_rat(p, b),
        }
    }

    pub fn matrix(&self) -> RatMat {
        RatMat::diag([
            self.t1.clone(),
            self.t2.clone(),
            &self.x / &self.t1,
            &self.x / &self.t2,
        ])
    }

    /// Value of a root on this torus element.
    pub fn root_value(&self, r: Root) -> BigRational {
        let pow = |b: &BigRational, e: i64| -> BigRational {
            if e >= 0 {
                num_traits::pow(b.clone(), e as usize)
            } else {
                num_traits::pow(b.recip(), (-e) as usize)
            }
        };
        let xe = (-r.m1 - r.m2) / 2;
        pow(&self.t1, r.m1) * pow(&self.t2, r.m2) * pow(&self.x, xe)
    }

    /// `val_p α(t)` for a root `α`.
    pub fn root_valuation(&self, r: Root, p: u64) -> i64 {
        val_rat(&self.root_value(r), p).expect("torus coordinates are nonzero")
    }
}

/// Levi data for [`levi_constructors`].
#[derive(Debug, Clone)]
pub enum LeviData {
    /// `μ(A; x) = diag(A, x·ᵗA⁻¹)`.
    Siegel { a: [[BigRational; 2]; 2], x: BigRational },
    /// `μ*(a, X)` with `a` on `e1`, `X` on `(e2, f2)` and `b = det X / a` on `f1`.
    Klingen { a: BigRational, block: [[BigRational; 2]; 2] },
}

pub fn levi_constructors(data: &LeviData, ctx: CoefficientContext) -> Result<SimilitudeMatrix> {
    let m = levi_matrix(data)?;
    similitude_check(&m, ctx)
}

pub fn levi_matrix(data: &LeviData) -> Result<RatMat> {
    let z = BigRational::zero;
    match data {
        LeviData::Siegel { a, x } => {
            let det = &a[0][0] * &a[1][1] - &a[0][1] * &a[1][0];
            if det.is_zero() {
                return Err(Error::SingularBlock);
            }
            if x.is_zero() {
                return Err(Error::NonInvertibleMultiplier);
            }
            // x·ᵗA⁻¹ = (x/det)·[[d, -c], [-b, a]]
            let f = x / &det;
            let mut m = RatMat::zero();
            m.m[0][0] = a[0][0].clone();
            m.m[0][1] = a[0][1].clone();
            m.m[1][0] = a[1][0].clone();
            m.m[1][1] = a[1][1].clone();
            m.m[2][2] = &f * &a[1][1];
            m.m[2][3] = -(&f * &a[1][0]);
            m.m[3][2] = -(&f * &a[0][1]);
            m.m[3][3] = &f * &a[0][0];
            let _ = z;
            Ok(m)
        }
        LeviData::Klingen { a, block } => {
            let det = &block[0][0] * &block[1][1] - &block[0][1] * &block[1][0];
            if det.is_zero() || a.is_zero() {
                return Err(Error::SingularBlock);
            }
            let b = &det / a;
            let mut m = RatMat::zero();
            m.m[0][0] = a.clone();
            m.m[2][2] = b;
            m.m[1][1] = block[0][0].clone();
            m.m[1][3] = block[0][1].clone();
            m.m[3][1] = block[1][0].clone();
            m.m[3][3] = block[1][1].clone();
            Ok(m)
        }
    }
}

/// `μ(1₂; x)`.
pub fn siegel_scalar(x: BigRational) -> RatMat {
    let one = BigRational::one;
    levi_matrix(&LeviData::Siegel {
        a: [[one(), BigRational::zero()], [BigRational::zero(), one()]],
        x,
    })
    .unwrap()
}

/// `μ*(a, y·1₂)`.
pub fn klingen_scalar(a: BigRational, y: BigRational) -> RatMat {
    levi_matrix(&LeviData::Klingen {
        a,
        block: [[y.clone(), BigRational::zero()], [BigRational::zero(), y]],
    })
    .unwrap()
}

/// The nilpotent `E_γ` with `u_γ(x) = 1 + x·E_γ`, in the basis `(e1, e2, f1, f2)`.
pub fn root_nilpotent(r: Root) -> [[i64; 4]; 4] {
    let mut e = [[0i64; 4]; 4];
    match (r.m1, r.m2) {
        (1, -1) => {
            e[0][1] = 1;
            e[3][2] = -1;
        }
        (0, 2) => e[1][3] = 1,
        (1, 1) => {
            e[0][3] = 1;
            e[1][2] = 1;
        }
        (2, 0) => e[0][2] = 1,
        (-1, 1) => {
            e[1][0] = 1;
            e[2][3] = -1;
        }
        (0, -2) => e[3][1] = 1,
        (-1, -1) => {
            e[3][0] = 1;
            e[2][1] = 1;
        }
        (-2, 0) => e[2][0] = 1,
        _ => panic!("{r:?} is not a root"),
    }
    e
}

/// The root-group element `u_γ(x)`.
pub fn root_element(r: Root, x: &BigRational) -> RatMat {
    let e = root_nilpotent(r);
    let mut m = RatMat::identity();
    for i in 0..4 {
        for j in 0..4 {
            if e[i][j] != 0 {
                m.m[i][j] = x * rat(e[i][j]);
            }
        }
    }
    m
}

/// `u_γ(x)` modulo `n` for an integer parameter.
pub fn root_element_mod(r: Root, x: u64, n: u64) -> ModMat {
    let e = root_nilpotent(r);
    let mut m = ModMat::identity(n);
    for i in 0..4 {
        for j in 0..4 {
            if e[i][j] != 0 {
                m.m[i][j] = (e[i][j].rem_euclid(n as i64) as u64) * (x % n) % n;
            }
        }
    }
    m
}

/// `u = u_{α1}(x1)·u_{α2}(x2)·u_{α1+α2}(x3)·u_{2α1+α2}(x4)`.
pub fn upper_unipotent(params: &[BigRational; 4]) -> RatMat {
    let mut m = RatMat::identity();
    for (r, x) in crate::roots::POSITIVE_ROOTS.iter().zip(params.iter()) {
        m = m.mul(&root_element(*r, x));
    }
    m
}

/// Reads the parameters of [`upper_unipotent`] back off a matrix of `U_B`.
pub fn upper_unipotent_params(u: &RatMat) -> Option<[BigRational; 4]> {
    let mut rest = u.clone();
    let mut out: [BigRational; 4] = Default::default();
    for (k, r) in crate::roots::POSITIVE_ROOTS.iter().enumerate() {
        let e = root_nilpotent(*r);
        let (i, j) = primary_entry(&e);
        let x = rest.m[i][j].clone() / rat(e[i][j]);
        rest = root_element(*r, &(-x.clone())).mul(&rest);
        out[k] = x;
    }
    if rest.is_identity() {
        Some(out)
    } else {
        None
    }
}

fn primary_entry(e: &[[i64; 4]; 4]) -> (usize, usize) {
    for i in 0..4 {
        for j in 0..4 {
            if e[i][j] != 0 {
                return (i, j);
            }
        }
    }
    unreachable!()
}

/// `n_α = u_α(1)·u_{−α}(−1)·u_α(1)`, the lift of the reflection `s_α`.
pub fn reflection_lift(r: Root) -> RatMat {
    let one = BigRational::one();
    root_element(r, &one)
        .mul(&root_element(r.neg(), &(-one.clone())))
        .mul(&root_element(r, &one))
}

/// The lift `ẇ` obtained by multiplying simple reflection lifts along the reduced word.
pub fn weyl_lift(w: WeylElement) -> RatMat {
    let mut m = RatMat::identity();
    for g in w.reduced_word() {
        let r = if g == 1 { Root::ALPHA1 } else { Root::ALPHA2 };
        m = m.mul(&reflection_lift(r));
    }
    m
}

/// Which Levi subgroup the parahoric test uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParahoricVariant {
    /// `g mod p^r ∈ Q`.
    Full,
    /// `g mod p^r ∈ M¹·Q⁺`, the derived Levi times the unipotent radical.
    Derived,
}

/// Tests whether `g mod p^level` lies in `Q` (or in `M¹Q⁺`).
pub fn parahoric_membership(
    g: &SimilitudeMatrix,
    q: ParabolicType,
    level: u32,
    variant: ParahoricVariant,
) -> Result<bool> {
    let (p, precision) = match g.context {
        CoefficientContext::Residue { p, r } => (p, r),
        CoefficientContext::ValuedRationals { p, precision } => (p, precision),
        CoefficientContext::Integers => {
            return Err(Error::InvalidContext("parahoric membership needs a prime".into()))
        }
    };
    if level > precision {
        return Err(Error::LevelExceedsPrecision { level, precision });
    }
    if level == 0 {
        return Err(Error::InvalidInput("level must be positive".into()));
    }
    if !g.entries.is_p_integral(p) || !is_p_integral(&g.multiplier, p) {
        return Ok(false);
    }
    let nu_val = val_rat(&g.multiplier, p).unwrap_or(i64::MAX);
    if nu_val != 0 {
        return Ok(false);
    }
    let n = modulus(p, level)?;
    let a = g.entries.reduce(p, level, n)?.to_flag_basis();
    let shape = q.block_shape();
    if !below_blocks(&a.m, shape, |x| *x == 0) {
        return Ok(false);
    }
    if variant == ParahoricVariant::Full {
        return Ok(true);
    }
    let nu = reduce_rat(&g.multiplier, p, level)?;
    let d = block_diagonal_mod(&a, shape);
    let ok = match q {
        ParabolicType::Borel => (0..4).all(|i| d.m[i][i] == 1 % n),
        ParabolicType::Siegel => {
            let det = (d.m[0][0] * d.m[1][1] % n + n - d.m[0][1] * d.m[1][0] % n) % n;
            det == 1 % n && nu == 1 % n
        }
        ParabolicType::Klingen => d.m[0][0] == 1 % n && d.m[3][3] == 1 % n,
        ParabolicType::Full => nu == 1 % n,
    };
    Ok(ok)
}

/// `g = u⁻·q` with `u⁻` lower unipotent in `Q⁻(p^r)` and `q ∈ Q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IwahoriFactorization {
    pub u_minus: RatMat,
    pub q_part: RatMat,
}

pub fn iwahori_factorize(g: &SimilitudeMatrix, q: ParabolicType, level: u32) -> Result<IwahoriFactorization> {
    if !parahoric_membership(g, q, level, ParahoricVariant::Full)? {
        return Err(Error::NotInParahoric);
    }
    let shape = q.block_shape();
    match g.context {
        CoefficientContext::Residue { p, r } => {
            let n = modulus(p, r)?;
            let a = g.entries.reduce(p, r, n)?.to_flag_basis();
            let (l, u) = block_lu_mod(&a, shape)?;
            Ok(IwahoriFactorization {
                u_minus: l.from_flag_basis().to_rat(),
                q_part: u.from_flag_basis().to_rat(),
            })
        }
        _ => {
            let (l, u) = block_lu_rat(&g.entries.to_flag_basis(), shape)?;
            Ok(IwahoriFactorization { u_minus: l.from_flag_basis(), q_part: u.from_flag_basis() })
        }
    }
}

/// Integer matrix helper used by tests and the CLI.
pub fn int_matrix(a: [[i64; 4]; 4]) -> RatMat {
    RatMat::from_ints(a)
}

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}
