use proptest::prelude::*;

use super::*;

fn ab(base: BaseRing, trunc: Option<u32>) -> Ring {
    RingDescriptor::new(base, vec!["a".into(), "b".into()], trunc).unwrap()
}

fn arb_elem(max_deg: u32) -> impl Strategy<Value = Vec<((u32, u32), i64)>> {
    prop::collection::vec(((0..=max_deg, 0..=max_deg), -20i64..=20), 0..5)
}

fn build(ring: &Ring, t: &[((u32, u32), i64)]) -> RingElement {
    RingElement::from_terms(
        ring,
        t.iter().map(|&((i, j), c)| (vec![i, j], BigInt::from(c))),
    )
}

fn arb_matrix(n: usize) -> impl Strategy<Value = Vec<Vec<((u32, u32), i64)>>> {
    prop::collection::vec(arb_elem(2), n * n)
}

fn build_matrix(ring: &Ring, n: usize, cells: &[Vec<((u32, u32), i64)>]) -> SquareMatrix {
    SquareMatrix::from_entries(ring, n, cells.iter().map(|c| build(ring, c)).collect()).unwrap()
}

#[test]
fn inverse_of_parameter_matrix() {
    let r = ab(BaseRing::ModPk { p: 5, k: 3 }, Some(2));
    let a = RingElement::param(&r, 0);
    let b = RingElement::param(&r, 1);
    let one = RingElement::one(&r);
    let m = SquareMatrix::from_entries(&r, 2, vec![a, one.clone(), one, b]).unwrap();
    let inv = m.inverse_mod_pk().unwrap();
    let consts: Vec<i64> = inv
        .entries()
        .iter()
        .map(|e| e.truncate(0).to_i64().unwrap())
        .collect();
    assert_eq!(consts, vec![0, 1, 1, 0]);
    assert_eq!(m.mul(&inv).unwrap(), SquareMatrix::identity(&r, 2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn frobenius_is_a_ring_map(x in arb_elem(3), y in arb_elem(3), p in prop::sample::select(vec![2u64, 3, 5]), m in 0u32..3) {
        let r = ab(BaseRing::Integers, None);
        let s = FrobeniusMap::standard(&r, p);
        let (x, y) = (build(&r, &x), build(&r, &y));
        let sx = s.apply(&x, m).unwrap();
        let sy = s.apply(&y, m).unwrap();
        prop_assert_eq!(s.apply(&(&x + &y), m).unwrap(), &sx + &sy);
        prop_assert_eq!(s.apply(&(&x * &y), m).unwrap(), &sx * &sy);
        prop_assert!(verify_frobenius_lift(&s, &[x.clone(), y.clone()], p));
    }

    #[test]
    fn frobenius_on_truncated_ring(x in arb_elem(3), y in arb_elem(3)) {
        let r = ab(BaseRing::ModPk { p: 3, k: 4 }, Some(7));
        let s = FrobeniusMap::standard(&r, 3);
        let (x, y) = (build(&r, &x), build(&r, &y));
        prop_assert_eq!(s.apply(&(&x * &y), 1).unwrap(), &s.apply(&x, 1).unwrap() * &s.apply(&y, 1).unwrap());
    }

    #[test]
    fn derivations_obey_leibniz(x in arb_elem(4), y in arb_elem(4), c in arb_elem(2), e in arb_elem(2)) {
        let r = ab(BaseRing::Integers, None);
        let d = DerivationMap::new(&r, vec![build(&r, &c), build(&r, &e)]).unwrap();
        let (x, y) = (build(&r, &x), build(&r, &y));
        let lhs = d.apply(&(&x * &y)).unwrap();
        let rhs = &(&d.apply(&x).unwrap() * &y) + &(&x * &d.apply(&y).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn derivative_of_frobenius_image_is_divisible(x in arb_elem(3), m in 0u32..3) {
        let r = ab(BaseRing::Integers, None);
        let s = FrobeniusMap::standard(&r, 3);
        let d = DerivationMap::partial(&r, 0).unwrap();
        let v = derivation_frobenius_valuation(&s, &d, &build(&r, &x), m).unwrap();
        prop_assert!(v.at_least(m as i64));
    }

    #[test]
    fn modular_arithmetic_commutes_with_reduction(x in arb_elem(3), y in arb_elem(3), p in prop::sample::select(vec![2u64, 3, 7]), k in 1u32..4) {
        let z = ab(BaseRing::Integers, None);
        let r = ab(BaseRing::ModPk { p, k }, None);
        let (xz, yz) = (build(&z, &x), build(&z, &y));
        let (xr, yr) = (xz.reduce_to(&r).unwrap(), yz.reduce_to(&r).unwrap());
        prop_assert_eq!((&xz * &yz).reduce_to(&r).unwrap(), &xr * &yr);
        prop_assert_eq!((&xz - &yz).reduce_to(&r).unwrap(), &xr - &yr);
        prop_assert_eq!(xz.pow(3).reduce_to(&r).unwrap(), xr.pow(3));
    }

    #[test]
    fn modular_inverse_is_two_sided(cells in arb_matrix(3), p in prop::sample::select(vec![2u64, 3, 5])) {
        let r = ab(BaseRing::ModPk { p, k: 4 }, Some(3));
        let m = build_matrix(&r, 3, &cells);
        match m.inverse_mod_pk() {
            Ok(inv) => {
                prop_assert!(m.is_invertible_mod_p());
                prop_assert_eq!(m.mul(&inv).unwrap(), SquareMatrix::identity(&r, 3));
                prop_assert_eq!(inv.mul(&m).unwrap(), SquareMatrix::identity(&r, 3));
            }
            Err(e) => {
                prop_assert!(matches!(e, crate::Error::NotInvertibleModP(_)));
                prop_assert!(!m.is_invertible_mod_p());
            }
        }
    }

    #[test]
    fn scalar_inverse_matches_determinant(cells in prop::collection::vec(-9i64..=9, 9), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let r = RingDescriptor::mod_pk(p, 3).unwrap();
        let rows: Vec<&[i64]> = cells.chunks(3).collect();
        let m = int_matrix(&r, &rows);
        let det_unit = !m.det().valuation(p).at_least(1);
        prop_assert_eq!(m.inverse_mod_pk().is_ok(), det_unit);
    }

    #[test]
    fn charpoly_kills_matrix(cells in prop::collection::vec(-5i64..=5, 9)) {
        // Cayley-Hamilton over the integers
        let z = RingDescriptor::integers();
        let rows: Vec<&[i64]> = cells.chunks(3).collect();
        let m = int_matrix(&z, &rows);
        let c = m.charpoly();
        prop_assert_eq!(c.len(), 4);
        // det(xI - A) = x^3 + c1 x^2 + c2 x + c3 with c = [1, c1, c2, c3]
        let mut acc = SquareMatrix::zero(&z, 3);
        let mut pw = SquareMatrix::identity(&z, 3);
        for k in (0..4).rev() {
            acc = acc.add(&pw.scale(&c[k])).unwrap();
            pw = pw.mul(&m).unwrap();
        }
        prop_assert!(acc.is_zero());
    }
}
