use num_complex::Complex;
use proptest::prelude::*;

use schlicht::bounds::{report_convex, report_s};
use schlicht::families::{
    convex_from_schwarz, random_normalized, random_schwarz, starlike_from_schwarz,
};
use schlicht::grunsky::{grunsky_form, grunsky_odd_table, grunsky_table, WeightVector};
use schlicht::invert::{closed_form_inverse_gamma, inverse_log_coefficients, revert, CoeffTriple};
use schlicht::{CRat, Scalar, Series, C64};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn starlike_members_satisfy_class_s_bounds(seed in any::<u64>(), degree in 1usize..=6) {
        let f = starlike_from_schwarz(&random_schwarz(degree, seed), 8).unwrap();
        let r = report_s(&f, "starlike", 1e-9).unwrap();
        prop_assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn convex_members_satisfy_convex_bounds(seed in any::<u64>(), degree in 1usize..=6) {
        let f = convex_from_schwarz(&random_schwarz(degree, seed), 8).unwrap();
        let r = report_convex(&f, "convex", 1e-9).unwrap();
        prop_assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn grunsky_inequality_on_starlike_members(
        seed in any::<u64>(),
        degree in 1usize..=6,
        weights in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 3),
    ) {
        let f = starlike_from_schwarz(&random_schwarz(degree, seed), 12).unwrap();
        let table = grunsky_odd_table(&f, 5).unwrap();
        let x = WeightVector::new(
            weights.iter().enumerate().map(|(i, &(re, im))| (2 * i + 1, Complex::new(re, im))),
        );
        if let Ok(x) = x {
            let form = grunsky_form(&table, &x, 5).unwrap();
            prop_assert!(form.margin() >= -1e-9 * (1.0 + form.rhs.re.abs()), "{:?}", form);
        }
    }

    #[test]
    fn reversion_is_a_two_sided_inverse(seed in any::<u64>()) {
        let f: Series<CRat> = random_normalized(7, seed);
        let g = revert(&f).unwrap();
        prop_assert_eq!(f.compose(&g).unwrap(), Series::identity(7));
        prop_assert_eq!(g.compose(&f).unwrap(), Series::identity(7));
        prop_assert_eq!(revert(&g).unwrap(), f);
    }

    #[test]
    fn inverse_log_coefficients_match_closed_form(seed in any::<u64>()) {
        let f: Series<CRat> = random_normalized(4, seed);
        let big = inverse_log_coefficients(&f).unwrap();
        let closed = closed_form_inverse_gamma(&CoeffTriple::from_series(&f).unwrap());
        for n in 1..=3 {
            prop_assert_eq!(big.get(n).unwrap(), &closed[n - 1]);
        }
    }

    #[test]
    fn first_row_is_twice_the_log_coefficients(seed in any::<u64>()) {
        let f: Series<CRat> = random_normalized(9, seed);
        let table = grunsky_table(&f, 4).unwrap();
        let gamma = schlicht::invert::log_coefficients(&f).unwrap();
        for p in 1..=4 {
            let two = <CRat as Scalar>::from_i64(2);
            prop_assert_eq!(table.omega(p, 0), &(gamma.get(p).unwrap().clone() * two));
            prop_assert_eq!(table.omega(p, 0), table.omega(0, p));
        }
        prop_assert_eq!(table.max_asymmetry(), 0.0);
    }
}

#[test]
fn float_and_exact_tables_agree() {
    let f: Series<CRat> = random_normalized(11, 3);
    let ff = Series::<C64>::new(f.coeffs().iter().map(Scalar::to_c64).collect()).unwrap();
    let exact = grunsky_table(&f, 5).unwrap();
    let float = grunsky_table(&ff, 5).unwrap();
    for p in 0..=5 {
        for q in 0..=5 {
            let e = Scalar::to_c64(exact.omega(p, q));
            let scale = 1.0 + e.norm();
            assert!((e - float.omega(p, q)).norm() < 1e-9 * scale, "({p},{q})");
        }
    }
}
