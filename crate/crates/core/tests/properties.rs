use compalg::algebra::{associator, AlgebraElement, Product, Sign};
use compalg::class::{CompositionClass, Hbar};
use compalg::phase::{moyal_cosine, moyal_sine, poisson, star, PhasePoly};
use compalg::scalar::{rat, Epsilon, PairScalar};
use compalg::tensor::{compose_alpha, compose_sigma, phase_flatten, CoproductTable, TensorElement};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn scalar(eps: Epsilon) -> impl Strategy<Value = PairScalar> {
    (-20i64..=20, 1i64..=6, -20i64..=20, 1i64..=6).prop_map(move |(a, b, c, d)| PairScalar::new(rat(a, b), rat(c, d), eps))
}

fn eps() -> impl Strategy<Value = Epsilon> {
    prop_oneof![Just(Epsilon::Minus), Just(Epsilon::Zero), Just(Epsilon::Plus)]
}

fn triple() -> impl Strategy<Value = (PairScalar, PairScalar, PairScalar)> {
    eps().prop_flat_map(|e| (scalar(e), scalar(e), scalar(e)))
}

proptest! {
    #[test]
    fn scalars_form_a_commutative_ring((x, y, z) in triple()) {
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&x * &PairScalar::one(x.eps()), x.clone());
        prop_assert_eq!(&x - &x, PairScalar::zero(x.eps()));
    }

    #[test]
    fn conjugation_is_a_ring_automorphism((x, y, _) in triple()) {
        prop_assert_eq!((&x * &y).conj(), &x.conj() * &y.conj());
        prop_assert_eq!((&x + &y).conj(), &x.conj() + &y.conj());
        prop_assert_eq!(x.conj().conj(), x.clone());
        let m = &x * &x.conj();
        prop_assert!(m.is_real());
        prop_assert_eq!(m.re().clone(), x.modulus());
        prop_assert_eq!((&x * &y).modulus(), x.modulus() * y.modulus());
    }

    #[test]
    fn inverse_when_modulus_nonzero((x, _, _) in triple()) {
        match x.inv() {
            Ok(inv) => prop_assert!((&x * &inv).is_one()),
            Err(_) => prop_assert_eq!(x.modulus(), rat(0, 1)),
        }
    }

    #[test]
    fn unit_squares_to_eps(e in eps()) {
        let u = PairScalar::unit_u(e);
        prop_assert_eq!(&u * &u, PairScalar::real(e.as_rational(), e));
    }

    #[test]
    fn dual_part_is_nilpotent(b in -20i64..=20, d in 1i64..=6) {
        let nil = PairScalar::new(rat(0, 1), rat(b, d), Epsilon::Zero);
        prop_assert!((&nil * &nil).is_zero());
    }

    #[test]
    fn moyal_brackets_have_opposite_symmetry(seed in any::<u64>(), n in 1usize..=2) {
        let class = CompositionClass::elliptic(Hbar::Formal);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = PhasePoly::random(n, Epsilon::Minus, 3, 3, false, &mut rng);
        let g = PhasePoly::random(n, Epsilon::Minus, 3, 3, false, &mut rng);
        prop_assert_eq!(moyal_sine(&f, &g, &class).unwrap(), moyal_sine(&g, &f, &class).unwrap().neg());
        prop_assert_eq!(moyal_cosine(&f, &g, &class).unwrap(), moyal_cosine(&g, &f, &class).unwrap());
        prop_assert_eq!(poisson(&f, &g).unwrap(), poisson(&g, &f).unwrap().neg());
    }

    #[test]
    fn star_product_is_associative(seed in any::<u64>(), plus in any::<bool>()) {
        let class = CompositionClass::elliptic(Hbar::Formal);
        let sign = if plus { 1 } else { -1 };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || PhasePoly::random(1, Epsilon::Minus, 3, 2, true, &mut rng);
        let (f, g, h) = (draw(), draw(), draw());
        let left = star(&star(&f, &g, &class, sign).unwrap(), &h, &class, sign).unwrap();
        let right = star(&f, &star(&g, &h, &class, sign).unwrap(), &class, sign).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn beta_on_matrices_is_associative(seed in any::<u64>(), plus in any::<bool>()) {
        let class = CompositionClass::hyperbolic(Hbar::Numeric(rat(2, 3)));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || AlgebraElement::matrix(&class, compalg::matrix::SquareMatrix::random(3, Epsilon::Plus, &mut rng)).unwrap();
        let (f, g, h) = (draw(), draw(), draw());
        let sign = if plus { Sign::Plus } else { Sign::Minus };
        prop_assert!(associator(Product::Beta(sign), &f, &g, &h).unwrap().is_zero());
    }

    #[test]
    fn composite_moyal_is_joint_moyal(seed in any::<u64>()) {
        let class = CompositionClass::elliptic(Hbar::Formal);
        let table = CoproductTable::canonical(&class);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || AlgebraElement::phase(&class, PhasePoly::random(1, Epsilon::Minus, 2, 2, false, &mut rng)).unwrap();
        let one = PairScalar::one(Epsilon::Minus);
        let f = TensorElement::pure(one.clone(), draw(), draw()).unwrap();
        let g = TensorElement::pure(one, draw(), draw()).unwrap();
        let (ff, gf) = (phase_flatten(&f).unwrap(), phase_flatten(&g).unwrap());
        prop_assert_eq!(phase_flatten(&compose_alpha(&table, &f, &g).unwrap()).unwrap(), moyal_sine(&ff, &gf, &class).unwrap());
        prop_assert_eq!(phase_flatten(&compose_sigma(&table, &f, &g).unwrap()).unwrap(), moyal_cosine(&ff, &gf, &class).unwrap());
    }
}
