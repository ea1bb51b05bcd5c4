//! Constructive decomposition `U_B(K)·ẇ ⊂ ∐_{w' ≺ w} I·ẇ'·B(K)` over the rationals with
//! a p-adic valuation, and the Weyl-type transition for cusps under torus translation.

use crate::arith::val_rat;
use crate::error::{Error, Result};
use crate::matrix::RatMat;
use crate::roots::{bruhat_leq, ParabolicType, Root, WeylElement};
use crate::symplectic::{reflection_lift, root_element, upper_unipotent, upper_unipotent_params, weyl_lift, TorusElement};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

/// Which case of the rank-one step was taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RankOneBranch {
    /// `w(α) > 0` and `a` integral: the cell index grows by `s_α`.
    PositiveIntegral,
    /// `w(α) < 0` and `a` in the maximal ideal: the cell index grows by `s_α`.
    NegativeSmall,
    /// `w(α) > 0` and `a` not integral: the cell index is unchanged.
    PositiveLarge,
    /// `w(α) < 0` and `a` a unit or larger: the cell index is unchanged.
    NegativeLarge,
}

/// `u·ẇ = i·ẇ'·b` with `i` in the Iwahori subgroup and `b` in `B(K)`.
#[derive(Debug, Clone, Serialize)]
pub struct BruhatCertificate {
    pub w: WeylElement,
    pub w_prime: WeylElement,
    #[serde(skip)]
    pub iwahori: RatMat,
    #[serde(skip)]
    pub borel: RatMat,
    pub branches: Vec<RankOneBranch>,
    /// `u ∉ U_B(A)` and `ẇ⁻¹uẇ ∉ U_B(K)`.
    pub length_drop_hypothesis: bool,
    pub length_dropped: bool,
}

impl BruhatCertificate {
    /// Recomputes `i·ẇ'·b`.
    pub fn product(&self) -> RatMat {
        self.iwahori.mul(&weyl_lift(self.w_prime)).mul(&self.borel)
    }
}

fn is_upper_flag(m: &RatMat) -> bool {
    let f = m.to_flag_basis();
    (0..4).all(|i| (0..i).all(|j| f.m[i][j].is_zero()))
}

/// Membership in the Iwahori subgroup of `Sp4(Z_p)`: integral, invertible over `Z_p`,
/// and upper triangular modulo `p` in the flag basis.
pub fn in_iwahori(m: &RatMat, p: u64) -> bool {
    if !m.is_p_integral(p) {
        return false;
    }
    let f = m.to_flag_basis();
    for i in 0..4 {
        for j in 0..i {
            if let Some(v) = val_rat(&f.m[i][j], p) {
                if v < 1 {
                    return false;
                }
            }
        }
        if val_rat(&f.m[i][i], p) != Some(0) {
            return false;
        }
    }
    true
}

/// Membership of an upper unipotent matrix in `U_B(Z_p)`.
fn integral_unipotent(m: &RatMat, p: u64) -> bool {
    m.is_p_integral(p)
}

/// Splits `m = u_{−α}(a)·m'` with `m'` upper triangular in the flag basis.
fn split_negative(alpha: Root, m: &RatMat) -> Result<(BigRational, RatMat)> {
    let e = root_element(alpha.neg(), &BigRational::one()).sub(&RatMat::identity());
    let em = e.mul(m).to_flag_basis();
    let mf = m.to_flag_basis();
    let mut a = BigRational::zero();
    'outer: for i in 0..4 {
        for j in 0..i {
            if !em.m[i][j].is_zero() {
                a = &mf.m[i][j] / &em.m[i][j];
                break 'outer;
            }
        }
    }
    let rest = root_element(alpha.neg(), &(-a.clone())).mul(m);
    if !is_upper_flag(&rest) {
        return Err(Error::CounterexampleFound("rank-one splitting failed".into()));
    }
    Ok((a, rest))
}

fn check_precision(x: &BigRational, p: u64, precision: u32) -> Result<()> {
    if let Some(v) = val_rat(x, p) {
        if v.unsigned_abs() >= precision as u64 {
            return Err(Error::PrecisionExhausted);
        }
    }
    Ok(())
}

/// Decomposes `u·ẇ` for an upper unipotent `u = u_{α1}(x1)u_{α2}(x2)u_{α1+α2}(x3)u_{2α1+α2}(x4)`.
pub fn bruhat_decompose(params: &[BigRational; 4], w: WeylElement, p: u64, precision: u32) -> Result<BruhatCertificate> {
    crate::arith::check_odd_prime(p)?;
    for x in params {
        check_precision(x, p, precision)?;
    }
    let u = upper_unipotent(params);
    let mut g0 = RatMat::identity();
    let mut lift = RatMat::identity();
    let mut current = WeylElement::ID;
    let mut b = u.clone();
    let mut branches = Vec::new();
    for g in w.reduced_word() {
        let alpha = if g == 1 { Root::ALPHA1 } else { Root::ALPHA2 };
        let s_alpha = if g == 1 { WeylElement::S1 } else { WeylElement::S2 };
        let n = reflection_lift(alpha);
        let n_inv = n.inverse().expect("Weyl lifts are invertible");
        let m = n_inv.mul(&b).mul(&n);
        let (a, m_rest) = split_negative(alpha, &m)?;
        check_precision(&a, p, precision)?;
        let beta = current.apply_root(alpha);
        let lift_inv = lift.inverse().expect("Weyl lifts are invertible");
        let x = lift
            .mul(&n)
            .mul(&root_element(alpha.neg(), &a))
            .mul(&n_inv)
            .mul(&lift_inv);
        if in_iwahori(&x, p) {
            branches.push(if beta.is_positive() {
                RankOneBranch::PositiveIntegral
            } else {
                RankOneBranch::NegativeSmall
            });
            g0 = g0.mul(&x);
            lift = lift.mul(&n);
            current = current.compose(s_alpha);
            b = m_rest;
        } else {
            let a_inv = BigRational::one() / &a;
            let (y0, h) = [a_inv.clone(), -a_inv]
                .into_iter()
                .map(|y| {
                    let h = root_element(alpha.neg(), &(-y.clone()))
                        .mul(&n)
                        .mul(&root_element(alpha.neg(), &a));
                    (y, h)
                })
                .find(|(_, h)| is_upper_flag(h))
                .ok_or_else(|| Error::CounterexampleFound("rank-one identity failed".into()))?;
            let z = lift.mul(&root_element(alpha.neg(), &y0)).mul(&lift_inv);
            if !in_iwahori(&z, p) {
                return Err(Error::CounterexampleFound("rank-one correction left the Iwahori subgroup".into()));
            }
            branches.push(if beta.is_positive() {
                RankOneBranch::PositiveLarge
            } else {
                RankOneBranch::NegativeLarge
            });
            g0 = g0.mul(&z);
            b = h.mul(&m_rest);
        }
    }
    // Replace the accumulated lift by the standard lift of w'; they differ by a sign torus.
    let standard = weyl_lift(current);
    let sign = standard.inverse().expect("Weyl lifts are invertible").mul(&lift);
    let borel = sign.mul(&b);
    let w_lift = weyl_lift(w);
    let conj = w_lift.inverse().expect("Weyl lifts are invertible").mul(&u).mul(&w_lift);
    let length_drop_hypothesis = !integral_unipotent(&u, p) && !is_upper_flag(&conj);
    let cert = BruhatCertificate {
        w,
        w_prime: current,
        iwahori: g0,
        borel,
        branches,
        length_drop_hypothesis,
        length_dropped: current.length() < w.length(),
    };
    debug_assert!(bruhat_leq(cert.w_prime, w));
    Ok(cert)
}

/// Checks a certificate: exact remultiplication, Iwahori and Borel membership, and
/// `w' ≺ w`.
pub fn verify_certificate(params: &[BigRational; 4], cert: &BruhatCertificate, p: u64) -> bool {
    let lhs = upper_unipotent(params).mul(&weyl_lift(cert.w));
    lhs == cert.product() && in_iwahori(&cert.iwahori, p) && is_upper_flag(&cert.borel) && bruhat_leq(cert.w_prime, cert.w)
}

/// Result of translating a cusp of Weyl type `w` and depth `r_s` by a torus element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Transition {
    /// Same Weyl type, depth increased; `None` stands for infinite depth.
    SameType { w: WeylElement, depth: Option<u32> },
    /// A new Weyl type from the decomposition of the non-integral part.
    Shorter { w: WeylElement, old_length: usize, new_length: usize },
}

/// One step of the cusp-translation argument: conjugate `u⁺` by `t`; if it stays integral
/// the type is kept and the depth grows, otherwise the non-integral part is decomposed.
pub fn weyl_type_transition(
    q: ParabolicType,
    w: WeylElement,
    depth: u32,
    level: u32,
    t: &TorusElement,
    u_plus: &[BigRational; 4],
    p: u64,
    precision: u32,
) -> Result<Transition> {
    for alpha in q.negative_unipotent_roots() {
        if t.root_valuation(alpha, p) <= 0 {
            return Err(Error::HypothesisViolated(format!(
                "val {}(t) must be positive on the opposite unipotent radical",
                alpha.neg().name()
            )));
        }
    }
    let depth_after = |d: u32| if d + 1 >= level { None } else { Some(d + 1) };
    if depth >= level {
        return Ok(Transition::SameType { w, depth: None });
    }
    let tm = t.matrix();
    let conj_m = tm.mul(&upper_unipotent(u_plus)).mul(&tm.inverse().ok_or(Error::SingularBlock)?);
    let conj = upper_unipotent_params(&conj_m).expect("torus conjugation preserves U_B");
    if conj.iter().all(|x| crate::arith::is_p_integral(x, p)) {
        return Ok(Transition::SameType { w, depth: depth_after(depth) });
    }
    let cert = bruhat_decompose(&conj, w, p, precision)?;
    Ok(Transition::Shorter { w: cert.w_prime, old_length: w.length(), new_length: cert.w_prime.length() })
}
