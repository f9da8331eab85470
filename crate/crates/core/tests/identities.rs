use gcdmoment_core::abgroup::{self, AbelianGroup};
use gcdmoment_core::igusa::{self, IgusaQuery};
use gcdmoment_core::moments::{self, Exponent};
use gcdmoment_core::{numtheory, BigRational, Complex64};
use num_bigint::BigUint;
use proptest::prelude::*;

fn moduli_strategy(max: u64) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(1..=max, 1..=3)
}

fn repeat(moduli: &[u64], w: usize) -> Vec<u64> {
    moduli.iter().copied().cycle().take(moduli.len() * w).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn first_moment_is_order_reciprocal_sum(moduli in moduli_strategy(40)) {
        let group = AbelianGroup::new(&moduli).unwrap();
        prop_assert_eq!(moments::euler_product_exact(&moduli, 1).unwrap(), abgroup::mu(&group, 1));
    }

    #[test]
    fn higher_moment_is_first_moment_of_power_group(moduli in moduli_strategy(30), w in 1u32..=3) {
        let direct = moments::euler_product_exact(&moduli, w).unwrap();
        let powered = moments::euler_product_exact(&repeat(&moduli, w as usize), 1).unwrap();
        prop_assert_eq!(&direct, &powered);
        let enumerated = abgroup::mu_bruteforce(&repeat(&moduli, w as usize), 10_000_000);
        if let Ok(e) = enumerated {
            prop_assert_eq!(direct, e);
        }
    }

    #[test]
    fn second_moment_dominates_square_of_first(moduli in moduli_strategy(60)) {
        let m1 = moments::euler_product_exact(&moduli, 1).unwrap();
        let m2 = moments::euler_product_exact(&moduli, 2).unwrap();
        prop_assert!(m2 >= &m1 * &m1);
    }

    #[test]
    fn hom_count_at_the_period(r in 0u32..=2, moduli in moduli_strategy(30)) {
        let lcm = numtheory::lcm_all(&moduli).unwrap();
        let l = u64::try_from(&lcm).unwrap();
        let order = AbelianGroup::new(&moduli).unwrap().order().clone();
        prop_assert_eq!(igusa::hom_count(r, &moduli, l).unwrap(), lcm.pow(r) * order);
    }

    #[test]
    fn closed_forms_agree(r in 0u32..=1, moduli in moduli_strategy(24), re in 0.2f64..3.0, im in -4.0f64..4.0) {
        let s = Complex64::new(r as f64 + 1.0 + re, im);
        let a = igusa::zeta_euler_product(r, &moduli, s).unwrap();
        let b = igusa::zeta_hurwitz_sum(r, &moduli, s).unwrap();
        prop_assert!((a - b).norm() <= 1e-9 * a.norm().max(1.0), "{} vs {}", a, b);
    }

    #[test]
    fn complex_route_matches_exact_at_integers(moduli in moduli_strategy(60), w in 0u32..=3) {
        let exact = moments::rational_to_f64(&moments::euler_product_exact(&moduli, w).unwrap());
        let z = moments::euler_product_complex(&moduli, Complex64::new(w as f64, 0.0)).unwrap();
        prop_assert!((z.re - exact).abs() <= 1e-12 * exact && z.im.abs() <= 1e-12 * exact);
    }
}

#[test]
fn series_converges_toward_closed_form() {
    let s = Complex64::new(2.5, 1.0);
    let closed = igusa::zeta_euler_product(0, &[6, 4], s).unwrap();
    let mut last = f64::INFINITY;
    for m in [100u64, 1000, 10_000, 100_000] {
        let q = IgusaQuery { r: 0, moduli: vec![6, 4], s, truncation: m };
        let partial = igusa::series_partial(&q).unwrap();
        let gap = (partial.value - closed).norm();
        assert!(gap <= partial.tail_bound + 1e-12);
        assert!(gap < last);
        last = gap;
    }
}

#[test]
fn residue_target_is_first_moment() {
    for moduli in [vec![1u64], vec![12], vec![6, 4], vec![8, 4, 2]] {
        let est = igusa::residue_at_pole(1, &moduli).unwrap();
        assert_eq!(est.target, moments::euler_product_exact(&moduli, 1).unwrap());
        assert!(est.relative_error < 1e-6, "{moduli:?}: {}", est.relative_error);
    }
}

#[test]
fn exact_entry_point() {
    let exact = moments::euler_product_moment(&[6, 4], &Exponent::Integer(1)).unwrap();
    assert_eq!(exact.as_exact(), Some(&BigRational::new(35.into(), 6.into())));
}

#[test]
fn divisor_sum_of_720720() {
    let total: BigUint = numtheory::divisors(&numtheory::factorize(720720).unwrap()).into_iter().sum();
    assert_eq!(total, BigUint::from(3_249_792u64));
}
