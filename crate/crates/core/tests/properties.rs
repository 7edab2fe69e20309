use bhlab::dirichlet::{bohr_lift, rearrangement_comparison, unlift, PrimeTable};
use bhlab::forms::{eval_form, poly_from_symmetric, symmetric_from_poly};
use bhlab::interpolate::{k_functional, k_functional_l1_l2};
use bhlab::lorentz::{lorentz_norm, marcinkiewicz_norm, LorentzParams};
use bhlab::rng::stream_rng;
use bhlab::verify::{random_complex_vec, random_symmetric_poly, random_tensor};
use num_complex::Complex64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lift_preserves_rearrangement(seed in 0u64..10_000, m in 1usize..4, n in 1usize..6) {
        let table = PrimeTable::new(1000);
        let c = random_symmetric_poly(&mut stream_rng(seed, 0), m, n).unwrap();
        let d = bohr_lift(&c, &table).unwrap();
        prop_assert_eq!(unlift(&d, n, &table).unwrap(), c.clone());
        let (a, b) = rearrangement_comparison(&d);
        prop_assert!(a <= b * (1.0 + 1e-12));
        let params = LorentzParams::new(1.5, 1.0).unwrap();
        let x = lorentz_norm(c.values(), &params).unwrap();
        let y = lorentz_norm(&d.values(), &params).unwrap();
        prop_assert!((x - y).abs() <= 1e-12 * x.max(1.0));
    }

    #[test]
    fn symmetric_form_agrees_with_polynomial(seed in 0u64..10_000, m in 1usize..4, n in 1usize..4) {
        let mut rng = stream_rng(seed, 1);
        let c = random_symmetric_poly(&mut rng, m, n).unwrap();
        let a = symmetric_from_poly(&c).unwrap();
        prop_assert_eq!(poly_from_symmetric(&a).unwrap().values().len(), c.values().len());
        let z = random_complex_vec(&mut rng, n);
        let xs = vec![z.clone(); m];
        let lhs = eval_form(&a, &xs).unwrap();
        let rhs = c.eval(&z).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1.0));
    }

    #[test]
    fn k_functionals_are_ordered_and_concave(seed in 0u64..10_000, t in 0.05f64..8.0) {
        let mut rng = stream_rng(seed, 2);
        let x: Vec<Complex64> = random_complex_vec(&mut rng, 7);
        let (k1, k2) = (k_functional(&x, t).unwrap(), k_functional_l1_l2(&x, t).unwrap());
        // the l2 norm dominates l_inf, so the second endpoint costs more
        prop_assert!(k1 <= k2 * (1.0 + 1e-12));
        let mid = k_functional_l1_l2(&x, t + 0.5).unwrap();
        let (lo, hi) = (k_functional_l1_l2(&x, t).unwrap(), k_functional_l1_l2(&x, t + 1.0).unwrap());
        prop_assert!(mid >= 0.5 * (lo + hi) - 1e-12 * hi);
    }

    #[test]
    fn weak_norm_sits_inside_marcinkiewicz(seed in 0u64..10_000, p in 1.1f64..4.0) {
        let a = random_tensor(&mut stream_rng(seed, 3), 2, 3).unwrap();
        let weak = lorentz_norm(a.values(), &LorentzParams::weak(p).unwrap()).unwrap();
        let mp = marcinkiewicz_norm(a.values(), p).unwrap();
        let pc = p / (p - 1.0);
        prop_assert!(mp / pc <= weak * (1.0 + 1e-12));
        prop_assert!(weak <= mp * (1.0 + 1e-12));
    }
}
