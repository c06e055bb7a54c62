use conformal_core::scalar::{parse_rational, Jet, Rational, Scalar};
use conformal_core::tensor::linalg::determinant;
use conformal_core::tensor::{generalized_delta, Down, Permutation, Tensor, Up, Variance};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn r(v: i64) -> Rational {
    Rational::from_i64(v)
}

fn tensor_strategy(dim: usize, valence: Vec<Variance>) -> impl Strategy<Value = Tensor<Rational>> {
    let len = dim.pow(valence.len() as u32);
    prop::collection::vec(-9i64..=9, len)
        .prop_map(move |data| Tensor::new(dim, valence.clone(), data.into_iter().map(r).collect()).unwrap())
}

fn tensors(valence: Vec<Variance>, count: usize) -> impl Strategy<Value = Vec<Tensor<Rational>>> {
    (2usize..=5).prop_flat_map(move |n| prop::collection::vec(tensor_strategy(n, valence.clone()), count))
}

fn inversions(images: &[usize]) -> usize {
    (0..images.len()).flat_map(|i| (i + 1..images.len()).map(move |j| (i, j))).filter(|&(i, j)| images[i] > images[j]).count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn contraction_is_multilinear(
        ts in tensors(vec![Up, Down, Down], 2),
        a in -5i64..=5,
        b in -5i64..=5,
    ) {
        let combo = ts[0].scale(&r(a)).try_add(&ts[1].scale(&r(b))).unwrap();
        let lhs = combo.contract(&[(0, 1)]).unwrap();
        let rhs = ts[0].contract(&[(0, 1)]).unwrap().scale(&r(a)).try_add(&ts[1].contract(&[(0, 1)]).unwrap().scale(&r(b))).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn contraction_commutes_with_antisymmetrization(
        ts in tensors(vec![Up, Down, Down, Down], 1),
    ) {
        let t = &ts[0];
        let first = t.contract(&[(0, 1)]).unwrap().antisymmetrize(&[0, 1]).unwrap();
        let second = t.antisymmetrize(&[2, 3]).unwrap().contract(&[(0, 1)]).unwrap();
        prop_assert_eq!(first, second);
    }

    #[test]
    fn generalized_delta_is_a_determinant(
        (n, p, lower, upper) in (2usize..=5, 1usize..=3).prop_flat_map(|(n, p)| {
            (Just(n), Just(p), prop::collection::vec(0..n, p), prop::collection::vec(0..n, p))
        }),
    ) {
        let delta = generalized_delta::<Rational>(p, n).unwrap();
        let rows: Vec<Vec<Rational>> = lower
            .iter()
            .map(|&i| upper.iter().map(|&j| if i == j { r(1) } else { r(0) }).collect())
            .collect();
        let idx: Vec<usize> = lower.iter().chain(&upper).copied().collect();
        prop_assert_eq!(delta.get(&idx).clone(), determinant(&rows));
    }

    #[test]
    fn permutation_sign_is_parity(images in (1usize..=7).prop_flat_map(|p| Just((0..p).collect::<Vec<_>>()).prop_shuffle())) {
        let perm = Permutation::from_images(images.clone()).unwrap();
        let expected = if inversions(&images).is_multiple_of(2) { 1 } else { -1 };
        prop_assert_eq!(perm.sign(), expected);
        prop_assert_eq!(perm.compose(&perm.inverse()), Permutation::identity(images.len()));
    }

    #[test]
    fn jet_products_obey_leibniz(
        (vars, order, a, b, v) in (1usize..=3, 1usize..=5).prop_flat_map(|(vars, order)| {
            let len = Jet::<Rational>::constant_with(vars, order, r(0)).coeffs().len();
            (
                Just(vars),
                Just(order),
                prop::collection::vec(-6i64..=6, len),
                prop::collection::vec(-6i64..=6, len),
                0..vars,
            )
        }),
    ) {
        let jet = |c: Vec<i64>| Jet::from_coeffs(vars, order, c.into_iter().map(r).collect()).unwrap();
        let (a, b) = (jet(a), jet(b));
        let lhs = (a.clone() * &b).derivative(v).unwrap();
        let rhs = a.derivative(v).unwrap() * &b.truncate(order - 1) + &(a.truncate(order - 1) * &b.derivative(v).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn rationals_are_stored_in_lowest_terms(num in -1000i64..=1000, den in 1i64..=1000, flip in any::<bool>()) {
        let den = if flip { -den } else { den };
        let q = parse_rational(&format!("{num}/{den}")).unwrap();
        prop_assert!(q.denom().is_positive());
        let g = gcd(q.numer().clone(), q.denom().clone());
        prop_assert!(g.is_one() || q.numer() == &BigInt::zero());
        prop_assert_eq!(q * r(den), r(num));
    }
}

fn gcd(mut a: BigInt, mut b: BigInt) -> BigInt {
    a = a.abs();
    b = b.abs();
    while !b.is_zero() {
        let t = &a % &b;
        a = b;
        b = t;
    }
    a
}

#[test]
fn double_hodge_star_sign() {
    use conformal_core::tensor::{antisymmetric_from_sorted, hodge_star, VolumeForm};
    for n in 1..=5 {
        let g = Tensor::from_fn(n, vec![Down, Down], |i| if i[0] == i[1] { r(1) } else { r(0) });
        let ginv = Tensor::from_fn(n, vec![Up, Up], |i| if i[0] == i[1] { r(1) } else { r(0) });
        let vol = VolumeForm::new(&g, 1).unwrap();
        for k in 1..=n {
            let mut seed = 1;
            let alpha = antisymmetric_from_sorted(n, k, |_| {
                seed = (seed * 7 + 3) % 11;
                r(seed - 5)
            });
            let twice = hodge_star(&hodge_star(&alpha, &ginv, &vol).unwrap(), &ginv, &vol).unwrap();
            let sign = if (k * (n - k)) % 2 == 0 { 1 } else { -1 };
            assert_eq!(twice, alpha.scale(&r(sign)), "n = {n}, k = {k}");
        }
    }
}
