mod common;

use largeorder::potential::PotentialSpec;
use largeorder::series::{Normalization, SeriesTable};
use proptest::prelude::*;
use rug::{Float, Rational};

use common::{harmonic_rs_energies, order_residual};

fn q(p: i64, d: i64) -> Rational {
    Rational::from((p, d))
}

#[test]
fn cubic_energies_match_harmonic_basis() {
    let spec = PotentialSpec::monomial(3, 1).unwrap();
    let table = SeriesTable::build(spec.clone(), Normalization::GaussianOrthogonal, 8);
    let oracle = harmonic_rs_energies(&spec, 8, 120, 256);
    assert_eq!(*table.energy(1).unwrap(), 0);
    assert_eq!(*table.energy(2).unwrap(), q(-11, 8));
    for k in 1..=8 {
        let exact = Float::with_val(256, table.energy(k).unwrap());
        if exact.is_zero() {
            assert!(oracle[k].clone().abs() < 1e-60, "k={k}");
        } else {
            let rel = Float::with_val(256, &oracle[k] - &exact) / &exact;
            assert!(rel.abs() < 1e-20, "k={k}");
        }
    }
}

#[test]
fn mixed_potential_matches_harmonic_basis() {
    let spec = PotentialSpec::new([(3, q(1, 2)), (4, q(-1, 3))], None).unwrap();
    let table = SeriesTable::build(spec.clone(), Normalization::GaussianOrthogonal, 6);
    let oracle = harmonic_rs_energies(&spec, 6, 120, 256);
    for k in 1..=6 {
        let exact = Float::with_val(256, table.energy(k).unwrap());
        let diff = Float::with_val(256, &oracle[k] - &exact).abs();
        assert!(diff < 1e-40, "k={k}");
    }
}

#[test]
fn quartic_energies_are_single_signed() {
    let table = SeriesTable::build(PotentialSpec::monomial(4, -1).unwrap(), Normalization::GaussianOrthogonal, 30);
    for k in (2..=30).step_by(2) {
        assert!(*table.energy(k).unwrap() < 0, "k={k}");
    }
}

#[test]
fn energies_do_not_depend_on_normalization() {
    let spec = PotentialSpec::new([(3, q(-1, 1)), (4, q(1, 5))], None).unwrap();
    let a = SeriesTable::build(spec.clone(), Normalization::GaussianOrthogonal, 16);
    let b = SeriesTable::build(spec, Normalization::ZeroConstant, 16);
    for k in 0..=16 {
        assert_eq!(a.energy(k).unwrap(), b.energy(k).unwrap(), "k={k}");
        assert_eq!(b.polynomial(k).unwrap().coeff(0), if k == 0 { 1 } else { 0 });
    }
}

#[test]
fn extending_matches_building() {
    let spec = PotentialSpec::monomial(3, 1).unwrap();
    let mut grown = SeriesTable::new(spec.clone(), Normalization::GaussianOrthogonal);
    grown.extend(5);
    grown.extend(3);
    grown.extend(9);
    let built = SeriesTable::build(spec, Normalization::GaussianOrthogonal, 9);
    assert_eq!(grown.orders(), built.orders());
}

#[test]
fn moment_of_order_zero_is_gaussian() {
    let t = SeriesTable::build(PotentialSpec::monomial(4, -1).unwrap(), Normalization::GaussianOrthogonal, 0);
    // int x^6 exp(-x^2) / int exp(-x^2) = 15/8
    assert_eq!(t.moment_order(0, 3).unwrap(), q(15, 8));
}

#[test]
fn large_arguments_stay_finite() {
    let t = SeriesTable::build(PotentialSpec::monomial(3, -1).unwrap(), Normalization::GaussianOrthogonal, 60);
    let x = Float::with_val(600, 40);
    let v = t.eval_order(60, &x, 600).unwrap();
    assert!(v.log_magnitude.is_finite());
    assert_ne!(v.sign, 0);
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-4i64..=4, 1i64..=4).prop_map(|(p, d)| Rational::from((p, d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn every_order_solves_its_equation(v3 in small_rational(), v4 in small_rational(), xp in -6i64..=6, xd in 1i64..=5) {
        prop_assume!(v3 != 0 || v4 != 0);
        let spec = PotentialSpec::new([(3, v3), (4, v4)], None).unwrap();
        let table = SeriesTable::build(spec.clone(), Normalization::GaussianOrthogonal, 7);
        let x = Rational::from((xp, xd));
        for k in 1..=7 {
            prop_assert_eq!(order_residual(&table, &spec, k, &x), Rational::new());
        }
    }

    #[test]
    fn gaussian_orthogonality_holds(v3 in small_rational(), v5 in small_rational()) {
        prop_assume!(v3 != 0 || v5 != 0);
        let spec = PotentialSpec::new([(3, v3), (5, v5)], None).unwrap();
        let table = SeriesTable::build(spec, Normalization::GaussianOrthogonal, 6);
        for k in 1..=6 {
            prop_assert_eq!(common::gaussian_mean(table.polynomial(k).unwrap()), Rational::new());
        }
    }

    #[test]
    fn even_potentials_have_no_odd_orders(v4 in small_rational(), v6 in small_rational()) {
        prop_assume!(v4 != 0 || v6 != 0);
        let spec = PotentialSpec::new([(4, v4), (6, v6)], None).unwrap();
        let table = SeriesTable::build(spec, Normalization::GaussianOrthogonal, 7);
        for k in (1..=7).step_by(2) {
            prop_assert!(table.polynomial(k).unwrap().is_zero());
            prop_assert_eq!(table.energy(k).unwrap().clone(), Rational::new());
        }
    }

    #[test]
    fn integer_forms_reconstruct_orders(k in 0usize..12) {
        let table = SeriesTable::build(PotentialSpec::monomial(3, -2).unwrap(), Normalization::GaussianOrthogonal, 12);
        let p = table.polynomial(k).unwrap();
        let (nums, den) = p.to_integer_form();
        for (n, c) in nums.iter().enumerate() {
            prop_assert_eq!(Rational::from((c.clone(), den.clone())), p.coeff(n));
        }
        prop_assert!(den > 0);
    }
}
