use padic_sde::antider::{antider_u, by_parts_residual};
use padic_sde::charfun::{character, charfun_modulus, GaussianSpec};
use padic_sde::grid::GridFunction;
use padic_sde::measure::TreeWiener;
use padic_sde::padic::{BallSpec, PAdic};
use proptest::prelude::*;

const P: [u32; 3] = [2, 3, 5];

fn padic(p: u32, n: u32) -> impl Strategy<Value = PAdic> {
    let m = (p as i128).pow(n);
    (-3i64..4, 0..m).prop_map(move |(v, u)| PAdic::from_int(p, n, u).shift(v))
}

fn prime_and_pair() -> impl Strategy<Value = (PAdic, PAdic)> {
    (0usize..3).prop_flat_map(|k| (padic(P[k], 6), padic(P[k], 6)))
}

proptest! {
    #[test]
    fn ultrametric_triangle((x, y) in prime_and_pair()) {
        let s = &x + &y;
        if !s.is_zero() {
            let bound = x.norm().max(if y.is_zero() { 0.0 } else { y.norm() });
            prop_assert!(s.norm() <= bound);
            if !x.is_zero() && !y.is_zero() && x.norm() != y.norm() {
                prop_assert_eq!(s.norm(), bound);
            }
        }
    }

    #[test]
    fn add_sub_round_trip((x, y) in prime_and_pair()) {
        prop_assert!((&(&x + &y) - &y).agrees_with(&x));
    }

    #[test]
    fn inverse_is_inverse((x, _y) in prime_and_pair()) {
        prop_assume!(!x.is_zero());
        let one = PAdic::one(x.prime(), x.precision());
        prop_assert!((&x * &x.inv().unwrap()).agrees_with(&one));
    }

    #[test]
    fn text_round_trip((x, _y) in prime_and_pair()) {
        let back: PAdic = x.to_string().parse().unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn character_is_additive((x, y) in prime_and_pair(), g in -2i64..3) {
        let gamma = PAdic::p_power(x.prime(), 6, g);
        let lhs = character(&gamma, &(&x + &y));
        let rhs = character(&gamma, &x).add(&character(&gamma, &y));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn charfun_modulus_bounded_and_ultrametric((h1, h2) in prime_and_pair(), beta in 0.1f64..10.0) {
        let p = h1.prime();
        let spec = GaussianSpec::one_dim(beta, 1.0, PAdic::zero(p, 6)).unwrap();
        let g = [PAdic::one(p, 6)];
        let m = |h: &PAdic| charfun_modulus(&spec, &g, h);
        prop_assert!(m(&h1) <= 1.0);
        prop_assert!(m(&(&h1 + &h2)) >= m(&h1).min(m(&h2)));
    }

    #[test]
    fn sigma_is_idempotent((x, _y) in prime_and_pair(), j in 0u32..6) {
        let s = x.sigma(j).unwrap();
        prop_assert_eq!(s.sigma(j).unwrap(), s);
    }

    #[test]
    fn by_parts_is_exact(k in 0usize..3, seed in any::<u64>(), t in 0u64..64, c in 0i128..64) {
        let p = P[k];
        let d = BallSpec::unit_ball(p, 6, 3);
        let t = t % d.len();
        let w = TreeWiener::standard(1.0, 1.0, d.clone()).unwrap().sample(seed);
        let x = GridFunction::from_fn(d.clone(), |_, u| &(u * u) + &PAdic::from_int(p, 6, c));
        prop_assert!(by_parts_residual(&x, &w.values, t).unwrap().is_zero());
    }

    #[test]
    fn antiderivative_of_one_is_time(k in 0usize..3, t in 0u64..125) {
        let d = BallSpec::unit_ball(P[k], 6, 3);
        let t = t % d.len();
        let one = GridFunction::constant(d.clone(), PAdic::one(P[k], 6));
        prop_assert_eq!(antider_u(&one, t).unwrap(), d.point(t));
    }

    #[test]
    fn lazy_tree_path_matches_full(seed in any::<u64>(), t in 0u64..125) {
        let d = BallSpec::unit_ball(5, 6, 3);
        let tw = TreeWiener::standard(1.0, 1.0, d).unwrap();
        let (lazy, full) = (tw.sample_on(seed, &[t]), tw.sample(seed));
        prop_assert_eq!(lazy.at(t).unwrap(), full.at(t).unwrap());
    }
}
