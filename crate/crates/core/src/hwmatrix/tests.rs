use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use super::limits::series_mod_pk;
use super::*;
use crate::laurent::parse_poly;
use crate::ring::{int_matrix, DerivationMap};
use crate::series::TruncatedSeries;

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn zab() -> Ring {
    RingDescriptor::new(BaseRing::Integers, names(&["a", "b"]), None).unwrap()
}

fn cubic() -> LaurentPoly {
    parse_poly("1+a*x+b*x^2+x^3", &names(&["x"]), &zab()).unwrap()
}

fn torus() -> LaurentPoly {
    parse_poly(
        "x+y+x^-1*y^-1",
        &names(&["x", "y"]),
        &RingDescriptor::integers(),
    )
    .unwrap()
}

fn poly1(text: &str) -> LaurentPoly {
    parse_poly(text, &names(&["x"]), &RingDescriptor::integers()).unwrap()
}

fn ctx(f: &LaurentPoly, p: u64, k: Option<u32>, n: Option<u32>) -> HWContext {
    HWContext::new(
        f,
        p,
        HWOptions {
            precision: k,
            trunc: n,
            ..HWOptions::default()
        },
    )
    .unwrap()
}

fn all_points(f: &LaurentPoly, p: u64, k: Option<u32>) -> HWContext {
    HWContext::new(
        f,
        p,
        HWOptions {
            mode: LatticeMode::All,
            precision: k,
            ..HWOptions::default()
        },
    )
    .unwrap()
}

fn texts(m: &SquareMatrix) -> Vec<Vec<String>> {
    m.to_text_rows()
}

fn rows(v: &[&[&str]]) -> Vec<Vec<String>> {
    v.iter()
        .map(|r| r.iter().map(|s| s.to_string()).collect())
        .collect()
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

/// Constant term of `(x+y+1/(xy))^(3k)`: the multinomial `(3k)!/(k!)^3`.
fn torus_constant(k: u64) -> BigInt {
    factorial(3 * k) / factorial(k).pow(3)
}

#[test]
fn cubic_betas_are_exact() {
    let c = ctx(&cubic(), 5, None, None);
    assert_eq!(c.index_set().len(), 2);
    assert_eq!(
        texts(&c.beta_matrix(1).unwrap()),
        rows(&[&["1", "0"], &["0", "1"]])
    );
    assert_eq!(
        texts(&c.beta_matrix(2).unwrap()),
        rows(&[&["a", "1"], &["1", "b"]])
    );
    assert_eq!(
        texts(&c.beta_matrix(3).unwrap()),
        rows(&[&["a^2 + 2*b", "2*b"], &["2*a", "2*a + b^2"]])
    );
    assert!(c.beta_matrix(0).is_err());
}

#[test]
fn alphas_and_hasse_witt() {
    let c = ctx(&cubic(), 2, None, None);
    assert!(c
        .alpha_matrix(0)
        .unwrap()
        .entries()
        .iter()
        .enumerate()
        .all(|(i, e)| e.is_one() == (i % 3 == 0)));
    assert_eq!(
        texts(&c.alpha_matrix(1).unwrap()),
        rows(&[&["a", "1"], &["1", "b"]])
    );
    let (hw, unit) = c.hasse_witt().unwrap();
    assert_eq!(texts(&hw), rows(&[&["a", "1"], &["1", "b"]]));
    assert!(unit);

    // modulo 3 the determinant of beta_3 has no constant term
    let c3 = ctx(&cubic(), 3, None, None);
    let (hw3, unit3) = c3.hasse_witt().unwrap();
    assert!(!unit3);
    assert!(hw3.det().constant_term().is_zero());

    let t = ctx(&torus(), 7, None, None);
    assert_eq!(t.g(), 1);
    assert_eq!(
        t.alpha_matrix(1).unwrap().get(0, 0).constant_term(),
        torus_constant(2)
    );
    assert_eq!(torus_constant(2), BigInt::from(90));
    let (hw7, unit7) = t.hasse_witt().unwrap();
    assert_eq!(hw7.get(0, 0).to_i64(), Some(6));
    assert!(unit7);
}

#[test]
fn empty_index_set_is_rejected() {
    let f = poly1("1+x");
    assert!(matches!(
        HWContext::new(&f, 2, HWOptions::default()),
        Err(Error::EmptyJ)
    ));
    assert_eq!(all_points(&f, 2, None).g(), 2);
}

#[test]
fn delta_examples() {
    // 1+x with sigma = id: delta_2 = (1+x)^3 - (1+x)(1+x^2) = 2x + 2x^2
    let c = all_points(&poly1("1+x"), 2, None);
    let ds = c.delta_sequence(2).unwrap();
    assert_eq!(ds[0].delta, poly1("1+x"));
    assert_eq!(ds[1].delta.to_text(), "2*x + 2*x^2");
    assert_eq!(ds[1].valuation, Valuation::Finite(1));

    // 1+x+x^2: delta_2 = f^3 - f(x) f(x^2) = 2x + 4x^2 + 6x^3 + 4x^4 + 2x^5
    let c = ctx(&poly1("1+x+x^2"), 2, None, None);
    let ds = c.delta_sequence(2).unwrap();
    assert_eq!(ds[1].delta.to_text(), "2*x + 4*x^2 + 6*x^3 + 4*x^4 + 2*x^5");
    let gs = c.gamma_matrices(2).unwrap();
    assert_eq!(gs[0], c.alpha_matrix(1).unwrap());
    assert_eq!(gs[1].get(0, 0).to_i64(), Some(6));
}

#[test]
fn delta_recursion_reassembles_the_power() {
    let f = torus();
    let c = ctx(&f, 3, None, None);
    let ds = c.delta_sequence(3).unwrap();
    let sigma = c.sigma().clone();
    let mut acc = LaurentPoly::zero(c.work_ring(), f.vars().to_vec());
    for (i, d) in ds.iter().enumerate() {
        let i = i as u32 + 1;
        let tail = f
            .pow_reduced(3u64.pow(3 - i) - 1, c.work_ring(), &Budget::default())
            .unwrap();
        acc = acc
            .add(
                &d.delta
                    .mul(&tail.frobenius_poly(&sigma, 3, i).unwrap())
                    .unwrap(),
            )
            .unwrap();
    }
    assert_eq!(
        acc,
        f.pow_reduced(26, c.work_ring(), &Budget::default())
            .unwrap()
    );
    assert!(ds.iter().all(|d| d.outside_polytope == 0));
}

#[test]
fn lemma_checks_small() {
    let c = ctx(&poly1("1+x+x^2"), 2, None, None);
    let r = c.verify_lemma23_iii(&[3], 1).unwrap();
    assert!(r.iter().all(|x| x.pass));
    // beta_6 - gamma_1 beta_3 = 51 - 3 = 48: valuation 4
    assert_eq!(r[0].defect_valuation, Valuation::Finite(4));
    let one = c.verify_lemma23_iii(&[1], 2).unwrap();
    assert!(one
        .iter()
        .all(|x| x.defect_valuation == Valuation::Infinite));

    let t = ctx(&torus(), 3, None, None);
    let r = t.verify_lemma23_iii(&[2], 2).unwrap();
    assert!(r.iter().all(|x| x.pass), "{r:?}");
    assert!(t.verify_lemma23_ii(2).unwrap().iter().all(|x| x.pass));
    assert!(t.verify_lemma21(2).unwrap().iter().all(|x| x.pass));
}

#[test]
fn lemma31_examples() {
    let r = RingDescriptor::new(BaseRing::Integers, names(&["t"]), None).unwrap();
    let t = RingElement::param(&r, 0);
    let d = DerivationMap::partial(&r, 0).unwrap();
    let s3 = FrobeniusMap::standard(&r, 3);
    let reps = verify_lemma31(&s3, &d, std::slice::from_ref(&t), 2).unwrap();
    assert_eq!(reps[1].defect_valuation, Valuation::Finite(1));
    assert_eq!(reps[2].defect_valuation, Valuation::Finite(2));
    let s2 = FrobeniusMap::standard(&r, 2);
    let one_t = &RingElement::one(&r) + &t;
    let reps = verify_lemma31(&s2, &d, &[one_t], 2).unwrap();
    assert_eq!(reps[2].defect_valuation, Valuation::Finite(2));
    assert!(reps.iter().all(|x| x.pass));
}

#[test]
fn theorem_on_cubic_family() {
    let c = ctx(&cubic(), 5, Some(3), Some(6));
    let ii = c.verify_theorem1(TheoremPart::II, 1, 0, None).unwrap();
    assert!(ii.iter().all(|r| r.pass), "{ii:?}");
    let da = DerivationMap::parse(&zab(), "d/da").unwrap();
    let iii = c
        .verify_theorem1(TheoremPart::III, 1, 0, Some(&da))
        .unwrap();
    assert!(iii.iter().all(|r| r.pass), "{iii:?}");
    let i = c.verify_theorem1(TheoremPart::I, 2, 0, None).unwrap();
    assert!(i.iter().all(|r| r.pass));

    let c3 = ctx(&cubic(), 3, Some(2), Some(4));
    assert!(matches!(
        c3.verify_theorem1(TheoremPart::II, 1, 0, None),
        Err(Error::NotInvertibleModP(_))
    ));
    let exact = ctx(&cubic(), 5, None, Some(4));
    assert!(matches!(
        exact.verify_theorem1(TheoremPart::II, 1, 0, None),
        Err(Error::PrecisionTooLow { .. })
    ));
}

#[test]
fn frobenius_limit_examples() {
    let f = poly1("1+x^3");
    let c = ctx(&f, 5, Some(2), None);
    let (hw, _) = c.hasse_witt().unwrap();
    let f1 = c.frobenius_limit(1).unwrap();
    assert_eq!(texts(&f1), texts(&hw));
    // (1+x^3)^4: x^9 and x^3 carry 4, x^4 and x^8 vanish
    assert_eq!(texts(&f1), rows(&[&["0", "4"], &["4", "0"]]));

    let t = ctx(&torus(), 7, Some(2), None);
    let lim = t.frobenius_limit(2).unwrap();
    let m = BigInt::from(49);
    let a2 = torus_constant(16) % &m;
    let a1 = torus_constant(2) % &m;
    let want = (a2 * crate::ring::mod_inverse(&a1, &m).unwrap()) % &m;
    assert_eq!(lim.get(0, 0).constant_term(), want);
    // stabilization: precision 2 agrees with precision 1 modulo p
    let one = t.frobenius_limit(1).unwrap();
    assert_eq!(lim.reduce_to(one.ring()).unwrap(), one);
}

#[test]
fn connection_limits_match_cubic_matrices() {
    let c = ctx(&cubic(), 5, Some(2), Some(6));
    let ring =
        RingDescriptor::new(BaseRing::ModPk { p: 5, k: 2 }, names(&["a", "b"]), Some(6)).unwrap();
    let fam = cubic_connection_matrices(6).unwrap();
    for (i, name) in ["d/da", "d/db"].iter().enumerate() {
        let d = DerivationMap::parse(&zab(), name).unwrap();
        let got = c.connection_limit(&d, 2).unwrap();
        let want = SquareMatrix::from_entries(
            &ring,
            2,
            fam.matrices[i]
                .iter()
                .map(|s| series_mod_pk(s, &ring).unwrap())
                .collect(),
        )
        .unwrap();
        assert_eq!(got.entries(), want.entries(), "{name}");
    }
    let zero = DerivationMap::zero(&zab());
    assert!(c.connection_limit(&zero, 2).unwrap().is_zero());
}

#[test]
fn frame_examples() {
    // zero connection: U = I
    let zero = FrameFamily {
        params: names(&["a"]),
        g: 2,
        n: 3,
        matrices: vec![vec![TruncatedSeries::zero(names(&["a"]), 3); 4]],
    };
    let u = horizontal_frame(&zero, 3, &[]).unwrap();
    assert!(
        u[0].coeff(&[0]).is_one() && u[1].is_zero() && u[2].is_zero() && u[3].coeff(&[0]).is_one()
    );

    // dU/da = -[[0,1],[0,0]] U gives U = I - [[0,a],[0,0]]
    let one = TruncatedSeries::one(names(&["a"]), 3);
    let z = TruncatedSeries::zero(names(&["a"]), 3);
    let toy = FrameFamily {
        params: names(&["a"]),
        g: 2,
        n: 3,
        matrices: vec![vec![z.clone(), one, z.clone(), z]],
    };
    let u = horizontal_frame(&toy, 3, &[]).unwrap();
    assert_eq!(u[1].to_text(), "-a");
    assert_eq!(u[0].to_text(), "1");
    assert_eq!(u[3].to_text(), "1");

    let fam = cubic_connection_matrices(4).unwrap();
    let u = horizontal_frame(&fam, 4, &[3]).unwrap();
    let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    assert_eq!(u[0].truncate(2).to_text(), "1 + 2/9*a*b");
    assert_eq!(u[1].truncate(2).to_text(), "-1/3*a + 1/9*b^2");
    assert_eq!(u[2].truncate(2).to_text(), "-1/3*b + 1/9*a^2");
    assert_eq!(u[3].coeff(&[1, 1]), q(2, 9));
    assert!(matches!(
        horizontal_frame(&fam, 4, &[]),
        Err(Error::DisallowedDivision { prime: 3 })
    ));

    let antidiag = int_matrix(&RingDescriptor::integers(), &[&[0, -1], &[-1, 0]]);
    let ident = int_matrix(&RingDescriptor::integers(), &[&[1, 0], &[0, 1]]);
    let c7 = ctx(&cubic(), 7, Some(1), Some(4));
    let c5 = ctx(&cubic(), 5, Some(1), Some(4));
    let ok7 = c7.verify_frame_factorization(&u, &ident, 1).unwrap();
    let ok5 = c5.verify_frame_factorization(&u, &antidiag, 1).unwrap();
    assert!(ok7.pass && ok7.soft, "{ok7:?}");
    assert!(ok5.pass, "{ok5:?}");
    let bad7 = c7.verify_frame_factorization(&u, &antidiag, 1).unwrap();
    let bad5 = c5.verify_frame_factorization(&u, &ident, 1).unwrap();
    assert_eq!(bad7.defect_valuation, Valuation::Finite(0));
    assert_eq!(bad5.defect_valuation, Valuation::Finite(0));
}

#[test]
fn integrability_failure_is_reported() {
    // d/da U = -b E12 U and d/db U = 0 cannot both hold
    let vars = names(&["a", "b"]);
    let b = TruncatedSeries::var(vars.clone(), 3, 1);
    let z = TruncatedSeries::zero(vars.clone(), 3);
    let fam = FrameFamily {
        params: vars,
        g: 2,
        n: 3,
        matrices: vec![vec![z.clone(), b, z.clone(), z.clone()], vec![z.clone(); 4]],
    };
    assert!(matches!(
        horizontal_frame(&fam, 3, &[]),
        Err(Error::Integrability { degree: 2, .. })
    ));
}

#[test]
fn all_points_variant_passes() {
    let f = parse_poly(
        "1 + x + y + x*y - x^2*y",
        &names(&["x", "y"]),
        &RingDescriptor::integers(),
    )
    .unwrap();
    let c = HWContext::new(
        &f,
        3,
        HWOptions {
            mode: LatticeMode::All,
            precision: Some(3),
            ..HWOptions::default()
        },
    )
    .unwrap();
    let (_, unit) = c.hasse_witt().unwrap();
    if unit {
        assert!(c
            .verify_theorem1(TheoremPart::II, 2, 0, None)
            .unwrap()
            .iter()
            .all(|r| r.pass));
    }
    assert!(c
        .verify_theorem1(TheoremPart::I, 2, 0, None)
        .unwrap()
        .iter()
        .all(|r| r.pass));
    assert!(c.verify_lemma23_ii(2).unwrap().iter().all(|r| r.pass));
}

#[test]
fn reports_serialize() {
    let r = CongruenceReport::new("theorem1-ii", 5, Some(2), Valuation::Infinite).with("s", 2u32);
    let j = serde_json::to_value(&r).unwrap();
    assert_eq!(j["modulus"], "5^2");
    assert_eq!(j["defect_valuation"], "inf");
    assert_eq!(j["pass"], true);
    assert!(!CongruenceReport::new("x", 5, Some(2), Valuation::Finite(1)).pass);
    assert!(CongruenceReport::new("x", 5, None, Valuation::Finite(9)).is_hard_failure());
}

fn arb_poly() -> impl Strategy<Value = Vec<((i64, i64), i64)>> {
    prop::collection::vec(((-1i64..=2, -1i64..=2), -3i64..=3), 3..=6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn theorem_part_two_on_random_polynomials(t in arb_poly(), p in prop::sample::select(vec![2u64, 3, 5])) {
        let z = RingDescriptor::integers();
        let f = LaurentPoly::from_terms(
            &z,
            names(&["x", "y"]),
            t.iter().map(|&((a, b), c)| (ExponentVector(vec![a, b]), RingElement::from_int(&z, c))),
        ).unwrap();
        prop_assume!(!f.is_zero());
        let c = HWContext::new(&f, p, HWOptions { precision: Some(2), ..HWOptions::default() });
        prop_assume!(c.is_ok());
        let c = c.unwrap();
        prop_assume!(c.hasse_witt().unwrap().1);
        for r in c.verify_theorem1(TheoremPart::II, 2, 0, None).unwrap() {
            prop_assert!(r.pass, "{:?}", r);
        }
        for r in c.verify_lemma21(2).unwrap() {
            prop_assert!(r.pass, "{:?}", r);
        }
    }
}
