use num_bigint::BigInt;
use proptest::prelude::*;

use super::*;
use crate::budget::Budget;
use crate::hwmatrix::{HWContext, HWOptions};
use crate::laurent::{parse_poly, LaurentPoly};
use crate::ring::RingDescriptor;

const GENUS2: &str = "y^2 - x^5 - 2*x^2 - x - 1";

fn poly(text: &str, vars: &[&str]) -> LaurentPoly {
    let vars: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
    parse_poly(text, &vars, &RingDescriptor::integers()).unwrap()
}

fn ctx(text: &str, p: u64, precision: Option<u32>) -> HWContext {
    HWContext::new(
        &poly(text, &["x", "y"]),
        p,
        HWOptions {
            precision,
            ..HWOptions::default()
        },
    )
    .unwrap()
}

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn int_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn count(text: &str, vars: &[&str], p: u64, m: u32, v: Variety) -> u64 {
    count_points(
        &poly(text, vars),
        &FiniteFieldSpec::new(p, 1).unwrap(),
        m,
        v,
        &Budget::default(),
    )
    .unwrap()
}

#[test]
fn least_irreducible_moduli() {
    assert_eq!(FiniteFieldSpec::new(2, 2).unwrap().modulus, vec![1, 1, 1]);
    assert_eq!(FiniteFieldSpec::new(3, 2).unwrap().modulus, vec![1, 0, 1]);
    assert_eq!(FiniteFieldSpec::new(11, 2).unwrap().modulus, vec![1, 0, 1]);
    assert_eq!(
        FiniteFieldSpec::new(2, 3).unwrap().modulus,
        vec![1, 1, 0, 1]
    );
    assert_eq!(FiniteFieldSpec::new(7, 1).unwrap().modulus, vec![0, 1]);
    // x^2 + 1 splits mod 5; x^2 + 2 does not
    assert_eq!(FiniteFieldSpec::new(5, 2).unwrap().modulus, vec![2, 0, 1]);
}

#[test]
fn small_counts() {
    assert_eq!(count("x - 1", &["x"], 5, 1, Variety::Affine), 1);
    assert_eq!(count("x + y + 1", &["x", "y"], 2, 1, Variety::Torus), 0);
    // y = -1 - x on the torus misses x = 0 and x = -1
    for (p, m) in [(2u64, 2u32), (3, 1), (3, 2), (5, 1), (7, 2)] {
        assert_eq!(
            count("x + y + 1", &["x", "y"], p, m, Variety::Torus),
            p.pow(m) - 2
        );
    }
    assert!(count_points(
        &poly("x^-1 + 1", &["x"]),
        &FiniteFieldSpec::new(3, 1).unwrap(),
        1,
        Variety::Affine,
        &Budget::default()
    )
    .is_err());
}

#[test]
fn genus2_affine_count_matches_brute_force() {
    let h = |x: i64| (x.pow(5) + 2 * x * x + x + 1).rem_euclid(11);
    let naive = (0..11i64)
        .flat_map(|x| (0..11i64).map(move |y| (x, y)))
        .filter(|&(x, y)| (y * y).rem_euclid(11) == h(x))
        .count() as u64;
    assert_eq!(naive, 14);
    assert_eq!(count(GENUS2, &["x", "y"], 11, 1, Variety::AffineCurve), 14);
    // the character shortcut agrees with plain enumeration over F_121 too
    for m in 1..=2 {
        assert_eq!(
            count(GENUS2, &["x", "y"], 11, m, Variety::AffineCurve),
            count(GENUS2, &["x", "y"], 11, m, Variety::Affine)
        );
    }
}

#[test]
fn genus2_zeta_numerator() {
    let curve = HyperellipticCurve::new(&poly(GENUS2, &["x", "y"]), 11).unwrap();
    assert_eq!(curve.genus, 2);
    let z = curve_zeta(&curve, 2).unwrap();
    assert_eq!(z.counts[0], 15);
    assert_eq!(z.numerator, vec![1, 3, 18, 33, 121]);
    assert_eq!(z.numerator, int_mul(&[1, 4, 11], &[1, -1, 11]));
    assert!(z.satisfies_functional_equation());
    assert_eq!(z.text(), "1 + 3*T + 18*T^2 + 33*T^3 + 121*T^4");
    assert_eq!(
        zeta_numerator_genus2(z.counts[0], z.counts[1], 11).unwrap(),
        z
    );

    // a third count over F_1331 is predicted by the numerator
    let z3 = curve_zeta(&curve, 3).unwrap();
    assert_eq!(z3.numerator, z.numerator);
    let mut wrong = z3.counts.clone();
    wrong[2] += 1;
    assert!(matches!(
        zeta_numerator(&wrong, 11, 2),
        Err(Error::InconsistentCounts(_))
    ));
}

#[test]
fn degenerate_and_inconsistent_counts() {
    let q = 7u64;
    let z = zeta_numerator_genus2(q + 1, q * q + 1, q).unwrap();
    assert_eq!(z.numerator, vec![1, 0, 0, 0, 49]);
    // S_1 = 1 and S_2 = 0 make c_2 = 1/2
    assert!(matches!(
        zeta_numerator_genus2(q, q * q + 1, q),
        Err(Error::InconsistentCounts(_))
    ));
}

#[test]
fn genus2_unit_roots() {
    let a = hensel_unit_roots(&big(&[11, 4, 1]), 11, 3).unwrap();
    assert_eq!(a.roots, big(&[7 + 2 * 11 + 2 * 121]));
    let b = hensel_unit_roots(&big(&[11, -1, 1]), 11, 3).unwrap();
    assert_eq!(b.roots, big(&[1 + 10 * 11 + 9 * 121]));
    let all = hensel_unit_roots(&reversed(&big(&[1, 3, 18, 33, 121])), 11, 3).unwrap();
    assert_eq!(
        all.roots,
        big(&[7 + 2 * 11 + 2 * 121, 1 + 10 * 11 + 9 * 121])
    );
    let m = 1331;
    let sum: i64 = all
        .roots
        .iter()
        .map(|r| i64::try_from(r).unwrap())
        .sum::<i64>()
        % m;
    let prod: i64 = all
        .roots
        .iter()
        .map(|r| i64::try_from(r).unwrap())
        .product::<i64>()
        % m;
    assert_eq!(sum, 8 + 11 + 121);
    assert_eq!(prod, 7 + 6 * 11 + 3 * 121);
    assert_eq!(
        crate::ring::padic_text(&a.roots[0], 11, 3),
        "7 + 2*11 + 2*11^2"
    );
}

#[test]
fn hensel_edge_cases() {
    for p in [2u64, 5, 13] {
        assert_eq!(
            hensel_unit_roots(&big(&[-1, 1]), p, 3).unwrap().roots,
            big(&[1])
        );
    }
    assert!(matches!(
        hensel_unit_roots(&big(&[1, -2, 1]), 5, 2),
        Err(Error::NonSimpleRoot { root: 1, p: 5 })
    ));
}

#[test]
fn hasse_witt_factor_of_genus2_curve() {
    let c = ctx(GENUS2, 11, Some(1));
    let f = charpoly_hw_modp(&c, 1).unwrap();
    assert_eq!(f.coeffs, big(&[1, 3, 7]));
    let r = f
        .divisibility("hw-divides-zeta", &big(&[1, 3, 18, 33, 121]))
        .unwrap();
    assert!(r.pass, "{r:?}");
}

fn elliptic(text: &str, p: u64) -> (HWContext, ZetaData) {
    let curve = HyperellipticCurve::new(&poly(text, &["x", "y"]), p).unwrap();
    assert_eq!(curve.genus, 1);
    (ctx(text, p, Some(3)), curve_zeta(&curve, 3).unwrap())
}

#[test]
fn elliptic_divisibility() {
    for (text, p) in [
        ("y^2 - x^3 - x - 1", 5u64),
        ("y^2 - x^3 - x - 1", 7),
        ("y^2 - x^3 + x", 5),
        ("y^2 - x^3 - 2", 7),
        ("y^2 - x^3 - 2", 5),
    ] {
        let (c, z) = elliptic(text, p);
        assert!(z.satisfies_functional_equation());
        let f = charpoly_hw_modp(&c, 1).unwrap();
        let r = f
            .divisibility("hw-divides-zeta", &z.numerator_big())
            .unwrap();
        assert!(r.pass, "{text} at {p}: {r:?}");
        let (_, unit) = c.hasse_witt().unwrap();
        if unit {
            assert_eq!(z.unit_root_count(p), c.g());
        }
    }
}

#[test]
fn vanishing_hasse_witt_gives_constant_factor() {
    // y^2 = x^3 + 2 is supersingular at 5
    let c = ctx("y^2 - x^3 - 2", 5, Some(1));
    assert!(c.hasse_witt().unwrap().0.is_zero());
    assert_eq!(charpoly_hw_modp(&c, 1).unwrap().coeffs, big(&[1]));
}

#[test]
fn torus_curve_trace_matches_counts() {
    // x^2 y + x y^2 + z^3 has three points off the torus
    for p in [5u64, 7, 11, 13] {
        let n = count("x + y + x^-1*y^-1", &["x", "y"], p, 1, Variety::Torus) + 3;
        let ap = (p + 1) as i64 - n as i64;
        let c = ctx("x + y + x^-1*y^-1", p, Some(1));
        let f = charpoly_hw_modp(&c, 1).unwrap();
        let r = f
            .divisibility("hw-divides-zeta", &big(&[1, -ap, p as i64]))
            .unwrap();
        assert!(r.pass, "p = {p}");
    }
}

#[test]
fn unit_root_factor_stabilizes() {
    let c = ctx(GENUS2, 11, Some(2));
    let k1 = unit_root_factor(&c, 1, 1).unwrap();
    let k2 = unit_root_factor(&c, 1, 2).unwrap();
    assert_eq!(k1, charpoly_hw_modp(&c, 1).unwrap());
    assert_eq!(PolyModPk::new(11, 1, &k2.coeffs), k1);
    assert!(
        k2.divisibility("factor-divides-zeta", &big(&[1, 3, 18, 33, 121]))
            .unwrap()
            .pass
    );

    let (e, z) = elliptic("y^2 - x^3 - x - 1", 7);
    let f3 = unit_root_factor(&e, 1, 3).unwrap();
    let f2 = unit_root_factor(&e, 1, 2).unwrap();
    assert_eq!(PolyModPk::new(7, 2, &f3.coeffs), f2);
    assert!(
        f3.divisibility("factor-divides-zeta", &z.numerator_big())
            .unwrap()
            .pass
    );
}

#[test]
fn unit_eigenvalues_match_limit_mod_121() {
    let c = ctx(GENUS2, 11, Some(2));
    let roots = hensel_unit_roots(&reversed(&big(&[1, 3, 18, 33, 121])), 11, 2).unwrap();
    for r in verify_unit_eigenvalue_match(&c, &roots, 2).unwrap() {
        assert!(r.pass, "{r:?}");
    }
    let short = PadicRootList {
        p: 11,
        precision: 2,
        roots: roots.roots[..1].to_vec(),
    };
    assert!(matches!(
        verify_unit_eigenvalue_match(&c, &short, 2),
        Err(Error::SizeMismatch(_))
    ));
}

#[test]
fn asd_on_genus2_curve() {
    let c = ctx(GENUS2, 11, Some(4));
    let z = ZetaData {
        q: 11,
        genus: 2,
        counts: vec![],
        numerator: vec![1, 3, 18, 33, 121],
    };
    let res = asd_check(&c, &z, &[1, 2, 11, 22, 121], (0, 4)).unwrap();
    let c_min = res.minimal_c.expect("some constant works");
    for r in &res.reports {
        assert!(r.soft);
        assert!(r.pass, "{r:?}");
    }
    // m prime to p is vacuous for c >= 0
    assert!(res.reports[0].pass && res.reports[1].pass);
    assert!(c_min <= 1);
}

#[test]
fn asd_runs_on_supersingular_curve() {
    let (c, z) = elliptic("y^2 - x^3 - x", 3);
    let res = asd_check(&c, &z, &[3, 9, 6], (0, 3)).unwrap();
    assert_eq!(res.reports.len(), 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(pk in prop::sample::select(vec![(2u64, 3u32), (3, 2), (5, 2), (2, 4), (7, 1)]), a in 0u32..10_000, b in 0u32..10_000, c in 0u32..10_000) {
        let f = Field::new(&FiniteFieldSpec::new(pk.0, pk.1).unwrap());
        let q = f.size();
        let (a, b, c) = (a % q, b % q, c % q);
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), 0);
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
    }

    #[test]
    fn hensel_roots_are_roots(r1 in 1i64..50, r2 in 1i64..50, k in 1u32..5) {
        // (T - r1)(T - r2 p) has the unit root r1 when p does not divide r1
        let p = 7i64;
        prop_assume!(r1 % p != 0);
        let poly = big(&[r1 * r2 * p, -(r1 + r2 * p), 1]);
        let roots = hensel_unit_roots(&poly, p as u64, k).unwrap();
        let m = BigInt::from(p).pow(k);
        prop_assert_eq!(roots.roots, vec![BigInt::from(r1).mod_floor(&m)]);
    }
}
