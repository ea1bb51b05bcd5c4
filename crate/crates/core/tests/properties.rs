mod common;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use gsp4::arith::rat;
use gsp4::boundary::{cusp_fiber, LevelType};
use gsp4::bruhat::{bruhat_decompose, verify_certificate};
use gsp4::flags::{act, act_fast, levi_elements, lower_unipotents, right_translate, FlagPoint, SemigroupElement};
use gsp4::hecke::{char_poly, ordinary_idempotent, DenseMatrix, HeckeDoubleCoset};
use gsp4::kostant::{kostant_weights, Nilradical};
use gsp4::matrix::ModMat;
use gsp4::polygons::{hodge_polygon, HodgeTateData, Polygon};
use gsp4::roots::{weyl_group, ParabolicType, WeylElement};
use gsp4::tables::selector_element;
use gsp4::weights::{dot_action, DotGroup, Weight};
use gsp4::Error;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

const P: u64 = 3;
const R: u32 = 2;
const PARABOLICS: [ParabolicType; 3] = [ParabolicType::Borel, ParabolicType::Siegel, ParabolicType::Klingen];

struct Pieces {
    unipotents: Vec<ModMat>,
    levis: Vec<ModMat>,
}

fn pieces(q: ParabolicType) -> &'static Pieces {
    static CACHE: OnceLock<Vec<Pieces>> = OnceLock::new();
    let all = CACHE.get_or_init(|| {
        PARABOLICS
            .iter()
            .map(|&q| Pieces { unipotents: lower_unipotents(q, P, R, 1), levis: levi_elements(q, P.pow(R)) })
            .collect()
    });
    &all[PARABOLICS.iter().position(|&x| x == q).unwrap()]
}

fn point(q: ParabolicType, i: usize, j: usize) -> FlagPoint {
    let pc = pieces(q);
    FlagPoint { u_minus: pc.unipotents[i % pc.unipotents.len()], levi: pc.levis[j % pc.levis.len()] }
}

fn parabolic() -> impl Strategy<Value = ParabolicType> {
    prop::sample::select(PARABOLICS.to_vec())
}

fn weyl() -> impl Strategy<Value = WeylElement> {
    prop::sample::select(weyl_group())
}

fn cone_element(q: ParabolicType) -> impl Strategy<Value = SemigroupElement> {
    (0i64..3, 0i64..3, 0i64..3).prop_map(move |(x, y, z)| match q {
        ParabolicType::Siegel => SemigroupElement::new(x, x, 2 * x + y),
        ParabolicType::Klingen => SemigroupElement::new(x, x + y, 2 * (x + y)),
        _ => SemigroupElement::new(x, x + y, 2 * (x + y) + z),
    })
}

fn padic() -> impl Strategy<Value = BigRational> {
    (-30i64..30, -3i32..=3).prop_map(|(n, k)| {
        let pk = BigInt::from(P).pow(k.unsigned_abs());
        if k >= 0 {
            BigRational::from_integer(BigInt::from(n) * pk)
        } else {
            BigRational::new(n.into(), pk)
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn semigroup_action_composes(
        (q, x, y) in parabolic().prop_flat_map(|q| (Just(q), cone_element(q), cone_element(q))),
        i in any::<usize>(),
        j in any::<usize>(),
    ) {
        let pt = point(q, i, j);
        let lhs = act(&x.mul(&y), &pt, q, P, R).unwrap();
        let rhs = act(&x, &act(&y, &pt, q, P, R).unwrap(), q, P, R).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(act_fast(&x, &pt, q, P).unwrap(), act(&x, &pt, q, P, R).unwrap());
    }

    #[test]
    fn contracting_action_commutes_with_levi_translation(
        q in parabolic(),
        k in 0u32..3,
        i in any::<usize>(),
        j in any::<usize>(),
        m in any::<usize>(),
    ) {
        let d = SemigroupElement::contracting(q).unwrap().pow(k);
        let pt = point(q, i, j);
        let levis = &pieces(q).levis;
        let g = levis[m % levis.len()];
        let lhs = act(&d, &right_translate(&pt, &g), q, P, R).unwrap();
        let rhs = right_translate(&act(&d, &pt, q, P, R).unwrap(), &g);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn hecke_degree_is_multiplicative(
        (q, x, y) in parabolic().prop_flat_map(|q| (Just(q), cone_element(q), cone_element(q))),
    ) {
        let deg = |e: SemigroupElement| HeckeDoubleCoset::new(q, P, 2, e).unwrap().degree;
        prop_assert_eq!(deg(x.mul(&y)), deg(x) * deg(y));
    }

    #[test]
    fn ordinary_idempotent_is_idempotent(dim in 1usize..6, entries in prop::collection::vec(0u64..9, 36)) {
        let rows: Vec<Vec<u64>> = (0..dim).map(|i| entries[i * dim..(i + 1) * dim].to_vec()).collect();
        let t = DenseMatrix::from_rows(&rows, 9);
        let e = ordinary_idempotent(&t);
        prop_assert_eq!(e.mul(&e), e.clone());
        prop_assert_eq!(e.mul(&t), t.mul(&e));
    }

    #[test]
    fn char_poly_is_autodual(t in -40i64..40, r in -40i64..40, s in 1i64..20, q in 1i64..12) {
        let (q, s) = (rat(q), rat(s));
        let poly = char_poly(&rat(t), &rat(r), &s, &q);
        prop_assert!(poly.autoduality_holds(&q, &s));
        let q3s = &q * &q * &q * &s;
        for x in 1..4 {
            let x = rat(x);
            let lhs = &x * &x * &x * &x * poly.evaluate(&(&q3s / &x));
            prop_assert_eq!(lhs, &q3s * &q3s * poly.evaluate(&x));
        }
    }

    #[test]
    fn bruhat_certificates_verify(params in prop::array::uniform4(padic()), w in weyl()) {
        match bruhat_decompose(&params, w, P, 8) {
            Ok(cert) => {
                prop_assert!(verify_certificate(&params, &cert, P));
                prop_assert!(common::subword_leq(cert.w_prime, w));
            }
            Err(Error::PrecisionExhausted) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn dot_action_is_affine_action(a in 0i64..12, b in 0i64..12, x in weyl(), y in weyl()) {
        let lam = Weight::new(a.max(b), a.min(b));
        let g = DotGroup::G;
        prop_assert_eq!(dot_action(WeylElement::ID, lam, g).unwrap(), lam);
        let lhs = dot_action(x, dot_action(y, lam, g).unwrap(), g).unwrap();
        prop_assert_eq!(lhs, dot_action(x.compose(y), lam, g).unwrap());
    }

    #[test]
    fn kostant_euler_character(a in 0i64..9, b in 0i64..9) {
        let (a, b) = (a.max(b), a.min(b));
        let ch = common::freudenthal((a, b));
        let roots = common::POS;
        let mut lhs: BTreeMap<(i64, i64), i64> = BTreeMap::new();
        for mask in 0u32..16 {
            let sign = if mask.count_ones() % 2 == 0 { 1 } else { -1 };
            let shift = (0..4).filter(|i| mask & (1 << i) != 0).fold((0, 0), |s, i| (s.0 - roots[i].0, s.1 - roots[i].1));
            for (mu, m) in &ch {
                *lhs.entry((mu.0 + shift.0, mu.1 + shift.1)).or_insert(0) += sign * *m as i64;
            }
        }
        lhs.retain(|_, v| *v != 0);
        let k = kostant_weights(Nilradical::Parabolic(ParabolicType::Borel), Weight::new(a, b)).unwrap();
        let mut rhs: BTreeMap<(i64, i64), i64> = BTreeMap::new();
        for d in &k.degrees {
            for t in &d.terms {
                *rhs.entry((t.weight.a, t.weight.b)).or_insert(0) += if d.degree % 2 == 0 { 1 } else { -1 };
            }
        }
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(k.euler_characteristic(), 0);
    }

    #[test]
    fn polygons_are_convex(a in 0i64..20, b in 0i64..20, extra in 0i64..10, slopes in prop::collection::vec(-20i64..20, 1..8)) {
        let (a, b) = (a.max(b), a.min(b));
        let c = a + b + 2 * extra;
        let ht = HodgeTateData::from_gsp4(&[(a, b)], c, 1, 1).unwrap();
        let poly = hodge_polygon(&ht.embeddings[0]).unwrap();
        prop_assert!(poly.is_convex());
        prop_assert_eq!(poly.height().clone(), rat(2 * c + 6));
        let mut s: Vec<BigRational> = slopes.into_iter().map(rat).collect();
        s.sort();
        prop_assert!(Polygon::from_unit_slopes(&s).unwrap().is_convex());
    }

    #[test]
    fn gamma1_fibres_divide_the_cocentre(q in parabolic(), sigma in parabolic(), w in weyl(), r in 1u32..3) {
        let n = P.pow(r);
        let units = n - n / P;
        let rank = if q == ParabolicType::Borel { 2 } else { 1 };
        let count = cusp_fiber(sigma, w, q, P, r, &[], LevelType::Gamma1).unwrap();
        prop_assert!(count >= 1);
        prop_assert_eq!(units.pow(rank) % count, 0);
        prop_assert_eq!(cusp_fiber(sigma, w, q, P, r, &[], LevelType::Gamma0).unwrap(), 1);
    }
}

#[test]
fn selectors_are_mirrored() {
    for sigma in [ParabolicType::Siegel, ParabolicType::Klingen] {
        for q in 1..=4 {
            let w = selector_element(sigma, q).unwrap();
            let mirror = selector_element(sigma, 5 - q).unwrap();
            assert_eq!(mirror, WeylElement::NEG_ID.compose(w));
        }
    }
}

#[test]
fn freudenthal_matches_model_dimension() {
    for lambda in [(0, 0), (1, 0), (1, 1), (2, 0), (2, 1), (2, 2)] {
        let model = common::Model::new(lambda);
        assert_eq!(model.dimension() as u64, common::freudenthal_dimension(lambda));
        for (mu, basis) in &model.spaces {
            assert_eq!(common::freudenthal(lambda)[mu], basis.len() as u64);
        }
    }
}

#[test]
fn lagrangian_oracle_matches_library() {
    for p in [3, 5] {
        let brute = common::brute_force_lagrangians(p);
        assert_eq!(brute as u64, (p + 1) * (p * p + 1));
        assert_eq!(gsp4::flags::lagrangians(p).len(), brute);
    }
}
