//! 4x4 matrices over exact rationals and over `Z/m`, plus block LU in the flag basis.
//!
//! The public basis is `(e1, e2, f1, f2)` with the form `J = [[0, 1], [-1, 0]]`.
//! Parabolics become block upper triangular after reordering to `(e1, e2, f2, f1)`.

use crate::arith::{inv_mod, reduce_rat, val_rat};
use crate::error::{Error, Result};
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt;

/// Index order `(e1, e2, f2, f1)` in which every standard parabolic is block upper triangular.
pub const FLAG_ORDER: [usize; 4] = [0, 1, 3, 2];

pub type RatMat = Mat4<BigRational>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat4<T> {
    pub m: [[T; 4]; 4],
}

impl<T: fmt::Display> fmt::Debug for Mat4<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.m.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
            }
        }
        write!(f, "]")
    }
}

impl<T: Clone> Mat4<T> {
    pub fn from_fn(f: impl Fn(usize, usize) -> T) -> Self {
        Mat4 {
            m: std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))),
        }
    }

    pub fn transpose(&self) -> Self {
        Mat4::from_fn(|i, j| self.m[j][i].clone())
    }

    /// Entries permuted into the flag basis.
    pub fn to_flag_basis(&self) -> Self {
        Mat4::from_fn(|i, j| self.m[FLAG_ORDER[i]][FLAG_ORDER[j]].clone())
    }

    pub fn from_flag_basis(&self) -> Self {
        // FLAG_ORDER is an involution.
        self.to_flag_basis()
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Mat4<U> {
        Mat4::from_fn(|i, j| f(&self.m[i][j]))
    }
}

impl Mat4<BigRational> {
    pub fn zero() -> Self {
        Mat4::from_fn(|_, _| BigRational::zero())
    }

    pub fn identity() -> Self {
        Mat4::from_fn(|i, j| if i == j { BigRational::one() } else { BigRational::zero() })
    }

    pub fn diag(d: [BigRational; 4]) -> Self {
        Mat4::from_fn(|i, j| if i == j { d[i].clone() } else { BigRational::zero() })
    }

    pub fn from_ints(a: [[i64; 4]; 4]) -> Self {
        Mat4::from_fn(|i, j| BigRational::from_integer(a[i][j].into()))
    }

    pub fn mul(&self, o: &Self) -> Self {
        Mat4::from_fn(|i, j| {
            let mut s = BigRational::zero();
            for k in 0..4 {
                if !self.m[i][k].is_zero() && !o.m[k][j].is_zero() {
                    s += &self.m[i][k] * &o.m[k][j];
                }
            }
            s
        })
    }

    pub fn add(&self, o: &Self) -> Self {
        Mat4::from_fn(|i, j| &self.m[i][j] + &o.m[i][j])
    }

    pub fn sub(&self, o: &Self) -> Self {
        Mat4::from_fn(|i, j| &self.m[i][j] - &o.m[i][j])
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Mat4::from_fn(|i, j| &self.m[i][j] * c)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn det(&self) -> BigRational {
        let mut a = self.m.clone();
        let mut det = BigRational::one();
        for c in 0..4 {
            let piv = match (c..4).find(|&r| !a[r][c].is_zero()) {
                None => return BigRational::zero(),
                Some(r) => r,
            };
            if piv != c {
                a.swap(piv, c);
                det = -det;
            }
            det *= &a[c][c];
            for r in c + 1..4 {
                if a[r][c].is_zero() {
                    continue;
                }
                let f = &a[r][c] / &a[c][c];
                for k in c..4 {
                    let t = &f * &a[c][k];
                    a[r][k] -= t;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Self> {
        let mut a = self.m.clone();
        let mut inv = Self::identity().m;
        for c in 0..4 {
            let piv = (c..4).find(|&r| !a[r][c].is_zero())?;
            a.swap(piv, c);
            inv.swap(piv, c);
            let d = a[c][c].clone();
            for k in 0..4 {
                a[c][k] = &a[c][k] / &d;
                inv[c][k] = &inv[c][k] / &d;
            }
            for r in 0..4 {
                if r == c || a[r][c].is_zero() {
                    continue;
                }
                let f = a[r][c].clone();
                for k in 0..4 {
                    let t = &f * &a[c][k];
                    a[r][k] -= t;
                    let t = &f * &inv[c][k];
                    inv[r][k] -= t;
                }
            }
        }
        Some(Mat4 { m: inv })
    }

    /// Smallest p-adic valuation among the entries (`None` for the zero matrix).
    pub fn min_val(&self, p: u64) -> Option<i64> {
        self.m
            .iter()
            .flatten()
            .filter_map(|x| val_rat(x, p))
            .min()
    }

    pub fn is_p_integral(&self, p: u64) -> bool {
        self.min_val(p).is_none_or(|v| v >= 0)
    }

    pub fn reduce(&self, p: u64, r: u32, m: u64) -> Result<ModMat> {
        let mut out = [[0u64; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = reduce_rat(&self.m[i][j], p, r)?;
            }
        }
        Ok(ModMat { m: out, modulus: m })
    }
}

/// Sizes of the diagonal blocks (in the flag basis) for a parabolic.
pub type BlockShape = &'static [usize];

fn block_starts(shape: BlockShape) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut s = 0;
    for &b in shape {
        out.push((s, s + b));
        s += b;
    }
    out
}

/// True when every entry strictly below the diagonal blocks satisfies `pred`.
pub fn below_blocks<T>(a: &[[T; 4]; 4], shape: BlockShape, mut pred: impl FnMut(&T) -> bool) -> bool {
    for (bi, &(r0, r1)) in block_starts(shape).iter().enumerate() {
        for &(c0, c1) in block_starts(shape).iter().take(bi) {
            for row in a.iter().take(r1).skip(r0) {
                for x in row.iter().take(c1).skip(c0) {
                    if !pred(x) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Block LU over the rationals in the flag basis: `a = l * u` with `l` block lower
/// unipotent and `u` block upper. Fails when a leading pivot block is singular.
pub fn block_lu_rat(a: &RatMat, shape: BlockShape) -> Result<(RatMat, RatMat)> {
    // Row-reduce with pivot blocks; the multipliers assemble into `l`.
    let blocks = block_starts(shape);
    let mut u = a.m.clone();
    let mut l = RatMat::identity().m;
    for (k, &(k0, k1)) in blocks.iter().enumerate() {
        let size = k1 - k0;
        let pinv = invert_small_rat(&u, k0, size).ok_or(Error::SingularBlock)?;
        for &(r0, r1) in blocks.iter().skip(k + 1) {
            // multiplier block M = U[r, k] * P^{-1}
            let mut mult = vec![vec![BigRational::zero(); size]; r1 - r0];
            for (ri, row) in mult.iter_mut().enumerate() {
                for (cj, x) in row.iter_mut().enumerate() {
                    let mut s = BigRational::zero();
                    for t in 0..size {
                        s += &u[r0 + ri][k0 + t] * &pinv[t][cj];
                    }
                    *x = s;
                }
            }
            for (ri, row) in mult.iter().enumerate() {
                for c in 0..4 {
                    let mut s = BigRational::zero();
                    for (t, x) in row.iter().enumerate() {
                        s += x * &u[k0 + t][c];
                    }
                    u[r0 + ri][c] -= s;
                }
                for (cj, x) in row.iter().enumerate() {
                    l[r0 + ri][k0 + cj] = x.clone();
                }
            }
        }
    }
    Ok((Mat4 { m: l }, Mat4 { m: u }))
}

fn invert_small_rat(a: &[[BigRational; 4]; 4], k0: usize, size: usize) -> Option<Vec<Vec<BigRational>>> {
    match size {
        1 => {
            let x = &a[k0][k0];
            if x.is_zero() {
                None
            } else {
                Some(vec![vec![x.recip()]])
            }
        }
        2 => {
            let (p, q, r, s) = (&a[k0][k0], &a[k0][k0 + 1], &a[k0 + 1][k0], &a[k0 + 1][k0 + 1]);
            let det = p * s - q * r;
            if det.is_zero() {
                return None;
            }
            let di = det.recip();
            Some(vec![vec![s * &di, -(q * &di)], vec![-(r * &di), p * &di]])
        }
        4 => {
            let m = Mat4 { m: a.clone() }.inverse()?;
            Some(m.m.iter().map(|r| r.to_vec()).collect())
        }
        _ => unreachable!("block sizes are 1, 2 or 4"),
    }
}

/// A 4x4 matrix over `Z/modulus`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct ModMat {
    pub m: [[u64; 4]; 4],
    pub modulus: u64,
}

impl ModMat {
    pub fn identity(modulus: u64) -> Self {
        let mut m = [[0u64; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1 % modulus;
        }
        ModMat { m, modulus }
    }

    pub fn from_signed(a: [[i64; 4]; 4], modulus: u64) -> Self {
        let mut m = [[0u64; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = a[i][j].rem_euclid(modulus as i64) as u64;
            }
        }
        ModMat { m, modulus }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.modulus;
        let mut m = [[0u64; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let mut s = 0u64;
                for k in 0..4 {
                    s += self.m[i][k] * o.m[k][j] % n;
                }
                m[i][j] = s % n;
            }
        }
        ModMat { m, modulus: n }
    }

    pub fn to_flag_basis(&self) -> Self {
        let mut m = [[0u64; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = self.m[FLAG_ORDER[i]][FLAG_ORDER[j]];
            }
        }
        ModMat { m, modulus: self.modulus }
    }

    pub fn from_flag_basis(&self) -> Self {
        self.to_flag_basis()
    }

    pub fn to_rat(&self) -> RatMat {
        Mat4::from_fn(|i, j| BigRational::from_integer(self.m[i][j].into()))
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.modulus)
    }
}

/// Block LU modulo `m = p^r` in the flag basis. Pivot blocks must be units mod `p`.
pub fn block_lu_mod(a: &ModMat, shape: BlockShape) -> Result<(ModMat, ModMat)> {
    let n = a.modulus;
    let blocks = block_starts(shape);
    let mut u = a.m;
    let mut l = ModMat::identity(n).m;
    for (k, &(k0, k1)) in blocks.iter().enumerate() {
        let size = k1 - k0;
        let pinv = invert_small_mod(&u, k0, size, n).ok_or(Error::SingularBlock)?;
        for &(r0, r1) in blocks.iter().skip(k + 1) {
            let mut mult = [[0u64; 4]; 4];
            for ri in 0..r1 - r0 {
                for cj in 0..size {
                    let mut s = 0u64;
                    for t in 0..size {
                        s += u[r0 + ri][k0 + t] * pinv[t][cj] % n;
                    }
                    mult[ri][cj] = s % n;
                }
            }
            for ri in 0..r1 - r0 {
                for c in 0..4 {
                    let mut s = 0u64;
                    for t in 0..size {
                        s += mult[ri][t] * u[k0 + t][c] % n;
                    }
                    u[r0 + ri][c] = (u[r0 + ri][c] + n - s % n) % n;
                }
                for cj in 0..size {
                    l[r0 + ri][k0 + cj] = mult[ri][cj];
                }
            }
        }
    }
    Ok((ModMat { m: l, modulus: n }, ModMat { m: u, modulus: n }))
}

fn invert_small_mod(a: &[[u64; 4]; 4], k0: usize, size: usize, n: u64) -> Option<[[u64; 4]; 4]> {
    let mut out = [[0u64; 4]; 4];
    match size {
        1 => {
            out[0][0] = inv_mod(a[k0][k0], n)?;
        }
        2 => {
            let (p, q, r, s) = (a[k0][k0], a[k0][k0 + 1], a[k0 + 1][k0], a[k0 + 1][k0 + 1]);
            let det = (p * s % n + n - q * r % n) % n;
            let di = inv_mod(det, n)?;
            out[0][0] = s * di % n;
            out[0][1] = (n - q) % n * di % n;
            out[1][0] = (n - r) % n * di % n;
            out[1][1] = p * di % n;
        }
        4 => {
            // Gauss-Jordan with unit pivots.
            let mut m = *a;
            let mut inv = ModMat::identity(n).m;
            for c in 0..4 {
                let piv = (c..4).find(|&r| inv_mod(m[r][c], n).is_some())?;
                m.swap(piv, c);
                inv.swap(piv, c);
                let d = inv_mod(m[c][c], n)?;
                for k in 0..4 {
                    m[c][k] = m[c][k] * d % n;
                    inv[c][k] = inv[c][k] * d % n;
                }
                for r in 0..4 {
                    if r == c || m[r][c] == 0 {
                        continue;
                    }
                    let f = m[r][c];
                    for k in 0..4 {
                        m[r][k] = (m[r][k] + n - f * m[c][k] % n) % n;
                        inv[r][k] = (inv[r][k] + n - f * inv[c][k] % n) % n;
                    }
                }
            }
            out = inv;
        }
        _ => unreachable!("block sizes are 1, 2 or 4"),
    }
    Some(out)
}

/// Zero out everything but the diagonal blocks.
pub fn block_diagonal_mod(a: &ModMat, shape: BlockShape) -> ModMat {
    let blocks = block_starts(shape);
    let mut m = [[0u64; 4]; 4];
    for &(s, e) in &blocks {
        for i in s..e {
            for j in s..e {
                m[i][j] = a.m[i][j];
            }
        }
    }
    ModMat { m, modulus: a.modulus }
}

pub fn block_diagonal_rat(a: &RatMat, shape: BlockShape) -> RatMat {
    let blocks = block_starts(shape);
    let mut m = RatMat::zero();
    for &(s, e) in &blocks {
        for i in s..e {
            for j in s..e {
                m.m[i][j] = a.m[i][j].clone();
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_det() {
        let a = RatMat::from_ints([[2, 1, 0, 0], [1, 1, 0, 0], [0, 0, 1, 3], [0, 0, 0, 1]]);
        assert_eq!(a.det(), BigRational::from_integer(1.into()));
        assert!(a.mul(&a.inverse().unwrap()).is_identity());
    }

    #[test]
    fn block_lu_recomposes() {
        let a = RatMat::from_ints([[1, 2, 3, 4], [3, 1, 1, 0], [9, 3, 2, 1], [6, 0, 3, 5]]);
        for shape in [&[1usize, 1, 1, 1][..], &[2, 2][..], &[1, 2, 1][..]] {
            let (l, u) = block_lu_rat(&a, shape).unwrap();
            assert_eq!(l.mul(&u), a);
        }
    }

    #[test]
    fn block_lu_mod_recomposes() {
        let a = ModMat::from_signed([[1, 2, 3, 4], [3, 1, 1, 0], [9, 3, 2, 1], [6, 0, 3, 5]], 9);
        for shape in [&[2usize, 2][..], &[1, 2, 1][..]] {
            let (l, u) = block_lu_mod(&a, shape).unwrap();
            assert_eq!(l.mul(&u), a);
        }
    }
}
