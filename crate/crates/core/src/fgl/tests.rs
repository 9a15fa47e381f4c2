use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use super::*;
use crate::hwmatrix::{HWContext, HWOptions};
use crate::laurent::{parse_poly, LatticeMode};
use crate::ring::{RingDescriptor, SquareMatrix};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn ctx(text: &str, vars: &[&str], p: u64, mode: LatticeMode) -> HWContext {
    let vars: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
    let f = parse_poly(text, &vars, &RingDescriptor::integers()).unwrap();
    HWContext::new(
        &f,
        p,
        HWOptions {
            mode,
            ..HWOptions::default()
        },
    )
    .unwrap()
}

fn torus(p: u64) -> HWContext {
    ctx("x + y + x^-1*y^-1", &["x", "y"], p, LatticeMode::Interior)
}

fn series1(n: u32, coeffs: &[(u32, BigRational)]) -> TruncatedSeries {
    TruncatedSeries::from_terms(
        vec!["t1".into()],
        n,
        coeffs.iter().map(|(k, c)| (vec![*k], c.clone())),
    )
}

fn law1(n: u32, coeffs: &[((u32, u32), BigRational)]) -> SeriesTuple {
    let vars = vec!["t1".to_string(), "t1'".to_string()];
    SeriesTuple::new(vec![TruncatedSeries::from_terms(
        vars,
        n,
        coeffs.iter().map(|((a, b), c)| (vec![*a, *b], c.clone())),
    )])
    .unwrap()
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

#[test]
fn logarithm_linear_part_is_identity() {
    for c in [
        torus(2),
        ctx("1 + 2*x - x^2 + x^3", &["x"], 3, LatticeMode::Interior),
    ] {
        let l = logarithm(&c, 6).unwrap();
        assert_eq!(l.g(), c.g());
        for (u, comp) in l.components().iter().enumerate() {
            assert_eq!(
                comp.homogeneous(1),
                TruncatedSeries::var(l.vars().to_vec(), 6, u)
            );
        }
    }
}

#[test]
fn torus_logarithm_matches_multinomial_counts() {
    let l = logarithm(&torus(7), 10).unwrap();
    let comp = &l.components()[0];
    for m in 1..=10u32 {
        // constant term of f^(m-1) is (3k)!/(k!)^3 when m - 1 = 3k, else 0
        let want = if (m - 1) % 3 == 0 {
            let k = ((m - 1) / 3) as u64;
            BigRational::new(factorial(3 * k) / factorial(k).pow(3), BigInt::from(m))
        } else {
            BigRational::zero()
        };
        assert_eq!(comp.coeff(&[m]), want, "t^{m}");
    }
    assert_eq!(comp.coeff(&[4]), q(3, 2));
}

#[test]
fn cubic_tau_squared_is_half_beta2() {
    // specialisations of beta_2 = [[a, 1], [1, b]]
    for (a, b) in [(2i64, -1i64), (0, 3), (-3, 5)] {
        let text = format!("1 + ({a})*x + ({b})*x^2 + x^3");
        let l = logarithm(&ctx(&text, &["x"], 2, LatticeMode::Interior), 3).unwrap();
        let beta2 = [[a, 1], [1, b]];
        for u in 0..2 {
            for v in 0..2 {
                let mut e = vec![0, 0];
                e[v] = 2;
                assert_eq!(
                    l.components()[u].coeff(&e),
                    q(beta2[u][v], 2),
                    "({a},{b}) entry {u},{v}"
                );
            }
        }
    }
}

#[test]
fn inverse_examples() {
    let id = SeriesTuple::new(vec![series1(5, &[(1, q(1, 1))])]).unwrap();
    assert_eq!(invert_series(&id, 5, &Budget::default()).unwrap(), id);

    let l = SeriesTuple::new(vec![series1(3, &[(1, q(1, 1)), (2, q(1, 1))])]).unwrap();
    let inv = invert_series(&l, 3, &Budget::default()).unwrap();
    assert_eq!(
        inv.components()[0],
        series1(3, &[(1, q(1, 1)), (2, q(-1, 1)), (3, q(2, 1))])
    );

    let bad = SeriesTuple::new(vec![series1(3, &[(1, q(2, 1))])]).unwrap();
    assert!(invert_series(&bad, 3, &Budget::default()).is_err());
}

#[test]
fn torus_round_trip() {
    let l = logarithm(&torus(2), 8).unwrap();
    let inv = invert_series(&l, 8, &Budget::default()).unwrap();
    let id = SeriesTuple::identity(l.vars().to_vec(), 8);
    assert_eq!(inv.compose(&l).unwrap(), id);
    assert_eq!(l.compose(&inv).unwrap(), id);
}

#[test]
fn law_of_tau_plus_tau_squared() {
    let l = SeriesTuple::new(vec![series1(3, &[(1, q(1, 1)), (2, q(1, 1))])]).unwrap();
    let g = group_law_from_log(&l, 3, &Budget::default()).unwrap();
    let want = law1(
        3,
        &[
            ((1, 0), q(1, 1)),
            ((0, 1), q(1, 1)),
            ((1, 1), q(-2, 1)),
            ((2, 1), q(4, 1)),
            ((1, 2), q(4, 1)),
        ],
    );
    assert_eq!(g, want);
}

#[test]
fn identity_betas_give_multiplicative_law() {
    let ring = RingDescriptor::integers();
    let betas: Vec<SquareMatrix> = (0..8).map(|_| SquareMatrix::identity(&ring, 1)).collect();
    let l = logarithm_from_betas(&betas).unwrap();
    let g = group_law_from_log(&l, 8, &Budget::default()).unwrap();
    assert_eq!(
        g,
        law1(
            8,
            &[((1, 0), q(1, 1)), ((0, 1), q(1, 1)), ((1, 1), q(-1, 1))]
        )
    );
    assert!(check_integrality(&g, 2).pass);
}

#[test]
fn linear_law_at_degree_one() {
    let g = group_law(&torus(3), 1).unwrap();
    assert_eq!(g, law1(1, &[((1, 0), q(1, 1)), ((0, 1), q(1, 1))]));
}

#[test]
fn torus_law_is_integral() {
    let g = group_law(&torus(2), 6).unwrap();
    for p in [2, 3, 5, 7, 11, 13] {
        let r = check_integrality(&g, p);
        assert!(r.pass, "p = {p}: {:?}", r.violations);
        assert!(r.min_valuation.at_least(0));
    }
    assert!(g.components()[0].is_integral());
}

#[test]
fn counterexample_has_one_violation() {
    for p in [2u64, 3, 7] {
        let s = SeriesTuple::new(vec![series1(4, &[(1, q(1, 1)), (2, q(1, p as i64))])]).unwrap();
        let r = check_integrality(&s, p);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].valuation, -1);
        assert_eq!(r.min_valuation, Valuation::Finite(-1));
        assert!(!r.pass);
    }
}

#[test]
fn axioms_of_known_laws() {
    let additive = law1(6, &[((1, 0), q(1, 1)), ((0, 1), q(1, 1))]);
    let r = check_fgl_axioms(&additive, 6).unwrap();
    assert!(r.pass);
    assert_eq!(r.associativity_check, "exact");

    let mult = law1(
        6,
        &[((1, 0), q(1, 1)), ((0, 1), q(1, 1)), ((1, 1), q(-1, 1))],
    );
    assert!(check_fgl_axioms(&mult, 6).unwrap().pass);

    let corrupted = law1(
        6,
        &[((1, 0), q(1, 1)), ((0, 1), q(1, 1)), ((2, 0), q(1, 1))],
    );
    let r = check_fgl_axioms(&corrupted, 6).unwrap();
    assert!(!r.unit);
    assert!(!r.pass);

    // unital and commutative, but x + y + x^2 y^2 is not associative
    let skew = law1(
        6,
        &[((1, 0), q(1, 1)), ((0, 1), q(1, 1)), ((2, 2), q(1, 1))],
    );
    let r = check_fgl_axioms(&skew, 6).unwrap();
    assert!(r.unit && r.commutative && !r.associative);
}

#[test]
fn random_lines_catch_non_associativity() {
    let vars: Vec<String> = ["t1", "t2", "t1'", "t2'"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let s = |terms: &[([u32; 4], i64)]| {
        TruncatedSeries::from_terms(
            vars.clone(),
            8,
            terms.iter().map(|(e, c)| (e.to_vec(), q(*c, 1))),
        )
    };
    let good = SeriesTuple::new(vec![
        s(&[([1, 0, 0, 0], 1), ([0, 0, 1, 0], 1)]),
        s(&[([0, 1, 0, 0], 1), ([0, 0, 0, 1], 1)]),
    ])
    .unwrap();
    let r = check_fgl_axioms(&good, 8).unwrap();
    assert!(r.pass);
    assert!(r.associativity_check.contains("random lines"));

    let bad = SeriesTuple::new(vec![
        s(&[([1, 0, 0, 0], 1), ([0, 0, 1, 0], 1), ([2, 0, 2, 0], 1)]),
        s(&[([0, 1, 0, 0], 1), ([0, 0, 0, 1], 1)]),
    ])
    .unwrap();
    let r = check_fgl_axioms(&bad, 8).unwrap();
    assert!(r.unit && r.commutative && !r.associative);
}

#[test]
fn generated_laws_satisfy_axioms() {
    for c in [
        torus(2),
        ctx("1 + x + x^2 + x^3", &["x"], 2, LatticeMode::Interior),
    ] {
        let g = group_law(&c, 8).unwrap();
        let r = check_fgl_axioms(&g, 8).unwrap();
        assert!(r.pass, "{r:?}");
    }
}

#[test]
fn witness_for_one_plus_x_plus_x_squared() {
    let c = ctx("1 + x + x^2", &["x"], 2, LatticeMode::All);
    let r = functional_equation_witness(&c, 8).unwrap();
    assert_eq!(r.levels, 3);
    assert!(r.coefficient_identity);
    assert!(r.pass, "{r:?}");
    assert!(r.min_valuation.at_least(0));
}

#[test]
fn witness_coefficient_at_k_equal_p() {
    // coefficient of t_v^p in h_u is (beta_p - gamma_1)_(u,v) / p
    let c = ctx("1 + x + x^2", &["x"], 3, LatticeMode::All);
    let r = functional_equation_witness(&c, 3).unwrap();
    assert!(r.pass);
    let g = c.g();
    let beta = c.beta_matrix(3).unwrap();
    let gamma = &c.gamma_matrices(1).unwrap()[0];
    let l = logarithm(&c, 3).unwrap();
    for u in 0..g {
        for v in 0..g {
            let mut e = vec![0; g];
            e[v] = 3;
            let lc = l.components()[u].coeff(&e);
            let want = BigRational::new(
                beta.get(u, v).constant_term() - gamma.get(u, v).constant_term(),
                3.into(),
            );
            // h = l - gamma_1 l(t^3)/3, and l(t^3) contributes t_v^3 with coefficient delta_(w,v)
            let h = lc - BigRational::new(gamma.get(u, v).constant_term(), 3.into());
            assert_eq!(h, want);
        }
    }
}

#[test]
fn witness_on_torus() {
    for p in [2, 3, 5] {
        let r = functional_equation_witness(&torus(p), 12).unwrap();
        assert!(r.pass, "p = {p}: {r:?}");
    }
}

#[test]
fn inexact_context_is_rejected() {
    let vars = vec!["x".to_string(), "y".to_string()];
    let f = parse_poly("x + y + x^-1*y^-1", &vars, &RingDescriptor::integers()).unwrap();
    let c = HWContext::new(
        &f,
        5,
        HWOptions {
            precision: Some(2),
            ..HWOptions::default()
        },
    )
    .unwrap();
    assert!(matches!(logarithm(&c, 4), Err(Error::InvalidArgument(_))));
}

#[test]
fn tuple_json_round_trip() {
    let g = group_law(&torus(2), 4).unwrap();
    let text = serde_json::to_string(&g.to_json()).unwrap();
    let back: SeriesTupleJson = serde_json::from_str(&text).unwrap();
    assert_eq!(SeriesTuple::from_json(&back).unwrap(), g);
}

fn small_poly() -> impl Strategy<Value = String> {
    // one-variable polynomials with a constant term and top degree 1..4
    (1usize..=4, proptest::collection::vec(-3i64..=3, 4)).prop_filter_map(
        "nonzero ends",
        |(deg, cs)| {
            let mut terms = vec!["1".to_string()];
            for (k, c) in cs.iter().enumerate().take(deg - 1) {
                if *c != 0 {
                    terms.push(format!("({c})*x^{}", k + 1));
                }
            }
            let lead = if cs[deg - 1] == 0 { 1 } else { cs[deg - 1] };
            terms.push(format!("({lead})*x^{deg}"));
            Some(terms.join(" + "))
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn laws_are_integral_and_invertible(text in small_poly(), all in any::<bool>()) {
        let mode = if all { LatticeMode::All } else { LatticeMode::Interior };
        let f = parse_poly(&text, &["x".to_string()], &RingDescriptor::integers()).unwrap();
        let c = HWContext::new(&f, 2, HWOptions { mode, ..HWOptions::default() });
        prop_assume!(c.as_ref().is_ok_and(|c| c.g() <= 3));
        let c = c.unwrap();
        let l = logarithm(&c, 6).unwrap();
        let inv = invert_series(&l, 6, &Budget::default()).unwrap();
        prop_assert_eq!(inv.compose(&l).unwrap(), SeriesTuple::identity(l.vars().to_vec(), 6));
        let g = group_law_from_log(&l, 6, &Budget::default()).unwrap();
        for p in [2, 3, 5, 7] {
            prop_assert!(check_integrality(&g, p).pass);
        }
        prop_assert!(check_fgl_axioms(&g, 6).unwrap().pass);
    }
}
