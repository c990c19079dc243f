//! Grunsky coefficients and the Grunsky quadratic-form inequality.
//!
//! For normalized `f`, the coefficients `omega_{p,q}` are read off the
//! bivariate logarithm `log((f(t) - f(z)) / (t - z))`. Odd tables hold the
//! coefficients of the square-root transform `f_2(z) = sqrt(f(z^2))`, indexed
//! by the underlying odd integers (`omega_{1,3}` is entry `(1, 3)`).

use std::collections::BTreeMap;

use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::{difference_quotient, BiSeries, Series};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Full,
    Odd,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrunskyTable<S> {
    parity: Parity,
    entries: BiSeries<S>,
}

impl<S: Scalar> GrunskyTable<S> {
    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn max_index(&self) -> usize {
        self.entries.order()
    }

    /// `omega_{p,q}`. Panics outside `0..=max_index`.
    pub fn omega(&self, p: usize, q: usize) -> &S {
        self.entries.coeff(p, q)
    }

    pub fn get(&self, p: usize, q: usize) -> Option<&S> {
        self.entries.get(p, q)
    }

    pub fn max_asymmetry(&self) -> f64 {
        self.entries.max_asymmetry()
    }

    pub fn as_biseries(&self) -> &BiSeries<S> {
        &self.entries
    }
}

impl<S: Scalar> Serialize for GrunskyTable<S> {
    /// Triplets `[p, q, [re, im]]` for every stored entry (odd pairs only for
    /// odd tables).
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
        let p_max = self.max_index();
        let keep = |p: usize, q: usize| self.parity == Parity::Full || (p % 2 == 1 && q % 2 == 1);
        let mut seq = serializer.serialize_seq(None)?;
        for p in 0..=p_max {
            for q in 0..=p_max {
                if keep(p, q) {
                    let c = self.omega(p, q).to_c64();
                    seq.serialize_element(&(p, q, [c.re, c.im]))?;
                }
            }
        }
        seq.end()
    }
}

/// `f_2(z) = z sqrt(f(z^2) / z^2)`; order `2N - 1` for `f` of order `N`.
pub fn odd_transform<S: Scalar>(f: &Series<S>) -> Result<Series<S>> {
    f.require_normalized()?;
    let root = f.div_z()?.substitute_power(2).sqrt1()?;
    Ok(root.mul_z())
}

/// Full Grunsky table up to index `max_index`.
///
/// Needs `2 * max_index + 1 <= order` so that every grid entry is fixed by
/// the truncation.
pub fn grunsky_table<S: Scalar>(f: &Series<S>, max_index: usize) -> Result<GrunskyTable<S>> {
    f.require_normalized()?;
    let needed = 2 * max_index + 1;
    if f.order() < needed {
        return Err(Error::InsufficientOrder {
            needed,
            got: f.order(),
        });
    }
    let quotient = difference_quotient(&f.truncate(needed))?;
    Ok(GrunskyTable {
        parity: Parity::Full,
        entries: quotient.log1()?,
    })
}

/// Odd-index table `omega_{2p-1, 2q-1}` of `f_2`, up to odd index `max_index`.
///
/// Requires `f` of order at least `max_index + 1`.
pub fn grunsky_odd_table<S: Scalar>(f: &Series<S>, max_index: usize) -> Result<GrunskyTable<S>> {
    f.require_normalized()?;
    if f.order() < max_index + 1 {
        return Err(Error::InsufficientOrder {
            needed: max_index + 1,
            got: f.order(),
        });
    }
    let f2 = odd_transform(&f.truncate(max_index + 1))?;
    let full = grunsky_table(&f2, max_index)?;
    let entries = BiSeries::from_fn(max_index, |p, q| {
        if p % 2 == 1 && q % 2 == 1 {
            full.omega(p, q).clone()
        } else {
            S::zero()
        }
    });
    Ok(GrunskyTable {
        parity: Parity::Odd,
        entries,
    })
}

/// Finite-support weights `x_p`, `p >= 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector<S> {
    entries: BTreeMap<usize, S>,
}

impl<S: Scalar> WeightVector<S> {
    pub fn new(entries: impl IntoIterator<Item = (usize, S)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (p, x) in entries {
            if p == 0 {
                return Err(Error::IndexOutOfRange { index: 0, max: 0 });
            }
            if !x.is_finite() {
                return Err(Error::NonFinite(p));
            }
            if !x.is_zero() {
                map.insert(p, x);
            }
        }
        if map.is_empty() {
            return Err(Error::ZeroWeights);
        }
        Ok(Self { entries: map })
    }

    /// The unit vector `e_p`.
    pub fn unit(p: usize) -> Result<Self> {
        Self::new([(p, S::one())])
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &S)> {
        self.entries.iter().map(|(p, x)| (*p, x))
    }
}

/// Both sides of the Grunsky inequality, as real scalars.
#[derive(Clone, Debug, PartialEq)]
pub struct GrunskyForm<S> {
    pub lhs: S,
    pub rhs: S,
}

impl<S: Scalar> GrunskyForm<S> {
    /// `rhs - lhs`; nonnegative when the inequality holds.
    pub fn margin(&self) -> f64 {
        self.rhs.to_c64().re - self.lhs.to_c64().re
    }

    /// Whether the two sides agree within `tol`. This never certifies the
    /// analytic equality condition, only numerical closeness.
    pub fn near_equality(&self, tol: f64) -> bool {
        self.margin().abs() <= tol
    }
}

/// `lhs = sum_{q <= Q} q |sum_p omega_{p,q} x_p|^2`, `rhs = sum_p |x_p|^2 / p`.
///
/// On odd tables the sums run over odd indices only (even rows and columns
/// are zero), so the weight of row `q` is the odd integer `q` itself.
pub fn grunsky_form<S: Scalar>(
    table: &GrunskyTable<S>,
    x: &WeightVector<S>,
    max_row: usize,
) -> Result<GrunskyForm<S>> {
    let top = table.max_index();
    if max_row > top {
        return Err(Error::IndexOutOfRange {
            index: max_row,
            max: top,
        });
    }
    for (p, _) in x.iter() {
        if p > top {
            return Err(Error::IndexOutOfRange { index: p, max: top });
        }
        if table.parity == Parity::Odd && p % 2 == 0 {
            return Err(Error::EvenWeightIndex(p));
        }
    }
    let rows = (1..=max_row).filter(|q| table.parity == Parity::Full || q % 2 == 1);
    let mut lhs = S::zero();
    for q in rows {
        let mut inner = S::zero();
        for (p, xp) in x.iter() {
            inner = inner + table.omega(p, q).clone() * xp.clone();
        }
        lhs = lhs + inner.norm_sqr() * S::from_i64(q as i64);
    }
    let rhs = x.iter().fold(S::zero(), |acc, (p, xp)| {
        acc + xp.norm_sqr() / S::from_i64(p as i64)
    });
    Ok(GrunskyForm { lhs, rhs })
}

/// Residuals of the relations expressing `a_2, a_3, a_4` through the odd
/// Grunsky coefficients, plus the derived bound `|2 omega_13 - omega_11^2| <= 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructuralReport<S> {
    pub omega11: S,
    pub omega13: S,
    pub omega33: S,
    pub omega15: S,
    /// `a_2 - 2 w11`, `a_3 - (2 w13 + 3 w11^2)`,
    /// `a_4 - (2 w33 + 8 w11 w13 + 10/3 w11^3)`,
    /// `3 w15 - 3 w11 w13 + w11^3 - 3 w33`.
    pub residuals: [S; 4],
    /// `|2 w13 - w11^2|`.
    pub second_coeff_functional: f64,
}

impl<S: Scalar> StructuralReport<S> {
    pub fn max_residual(&self) -> f64 {
        self.residuals
            .iter()
            .map(|r| r.abs_f64())
            .fold(0.0, f64::max)
    }

    /// `|2 w13 - w11^2| <= 1 + tol`.
    pub fn second_coeff_bound_holds(&self, tol: f64) -> bool {
        self.second_coeff_functional <= 1.0 + tol
    }
}

pub fn verify_structural<S: Scalar>(f: &Series<S>) -> Result<StructuralReport<S>> {
    f.require_normalized()?;
    if f.order() < 6 {
        return Err(Error::InsufficientOrder {
            needed: 6,
            got: f.order(),
        });
    }
    let t = grunsky_odd_table(f, 5)?;
    let w11 = t.omega(1, 1).clone();
    let w13 = t.omega(1, 3).clone();
    let w33 = t.omega(3, 3).clone();
    let w15 = t.omega(1, 5).clone();
    let n = |k: i64| S::from_i64(k);
    let w11_sq = w11.clone() * w11.clone();
    let w11_cube = w11_sq.clone() * w11.clone();
    let residuals = [
        f.coeff(2).clone() - n(2) * w11.clone(),
        f.coeff(3).clone() - (n(2) * w13.clone() + n(3) * w11_sq.clone()),
        f.coeff(4).clone()
            - (n(2) * w33.clone()
                + n(8) * w11.clone() * w13.clone()
                + S::ratio(10, 3) * w11_cube.clone()),
        n(3) * w15.clone() - n(3) * w11.clone() * w13.clone() + w11_cube - n(3) * w33.clone(),
    ];
    let second = (n(2) * w13.clone() - w11_sq).abs_f64();
    Ok(StructuralReport {
        omega11: w11,
        omega13: w13,
        omega33: w33,
        omega15: w15,
        residuals,
        second_coeff_functional: second,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{convex_from_schwarz, koebe, random_schwarz, starlike_from_schwarz};
    use crate::invert::log_coefficients;
    use crate::scalar::{CRat, C64};

    fn q(n: i64, d: i64) -> CRat {
        CRat::ratio(n, d)
    }

    #[test]
    fn odd_transform_of_koebe() {
        let f2 = odd_transform(&koebe::<CRat>(8)).unwrap();
        assert_eq!(f2.order(), 15);
        for n in 0..=15 {
            let expected = if n % 2 == 1 { q(1, 1) } else { q(0, 1) };
            assert_eq!(f2.coeff(n), &expected);
        }
        let id = Series::<CRat>::identity(5);
        assert_eq!(odd_transform(&id).unwrap(), Series::identity(9));
    }

    #[test]
    fn odd_transform_has_zero_even_coefficients() {
        for seed in 0..10 {
            let f = starlike_from_schwarz(&random_schwarz(4, seed), 8).unwrap();
            let f2 = odd_transform(&f).unwrap();
            for n in (0..=f2.order()).step_by(2) {
                assert_eq!(f2.coeff(n), &C64::new(0.0, 0.0));
            }
            assert_eq!(f2.coeff(1), &C64::new(1.0, 0.0));
        }
    }

    #[test]
    fn koebe_full_table() {
        let t = grunsky_table(&koebe::<CRat>(11), 5).unwrap();
        assert_eq!(t.parity(), Parity::Full);
        assert_eq!(t.omega(0, 0), &q(0, 1));
        for p in 1..=5 {
            assert_eq!(t.omega(p, 0), &q(2, p as i64));
            for qq in 1..=5 {
                let expected = if p == qq { q(-1, p as i64) } else { q(0, 1) };
                assert_eq!(t.omega(p, qq), &expected);
            }
        }
        assert!(matches!(
            grunsky_table(&koebe::<CRat>(10), 5),
            Err(Error::InsufficientOrder {
                needed: 11,
                got: 10
            })
        ));
    }

    #[test]
    fn identity_tables_vanish() {
        let id = Series::<CRat>::identity(11);
        let full = grunsky_table(&id, 5).unwrap();
        let odd = grunsky_odd_table(&id, 5).unwrap();
        for p in 0..=5 {
            for qq in 0..=5 {
                assert_eq!(full.omega(p, qq), &q(0, 1));
                assert_eq!(odd.omega(p, qq), &q(0, 1));
            }
        }
    }

    #[test]
    fn first_row_is_twice_log_coefficients() {
        let f = starlike_from_schwarz(&random_schwarz(5, 3), 12).unwrap();
        let t = grunsky_table(&f, 5).unwrap();
        let gamma = log_coefficients(&f).unwrap();
        for p in 1..=5 {
            let diff = t.omega(p, 0) - gamma.get(p).unwrap() * 2.0;
            assert!(diff.norm() < 1e-12);
        }
        // omega_{0,1} = 2 gamma_1 as well, by symmetry.
        assert!((t.omega(0, 1) - f.coeff(2)).norm() < 1e-12);
    }

    #[test]
    fn koebe_odd_table() {
        let t = grunsky_odd_table(&koebe::<CRat>(12), 11).unwrap();
        assert_eq!(t.parity(), Parity::Odd);
        assert_eq!(t.omega(1, 1), &q(1, 1));
        assert_eq!(t.omega(1, 3), &q(0, 1));
        assert_eq!(t.omega(3, 3), &q(1, 3));
        assert_eq!(t.omega(1, 5), &q(0, 1));
        assert_eq!(t.omega(5, 5), &q(1, 5));
        for p in 0..=11 {
            for qq in 0..=11 {
                if p % 2 == 0 || qq % 2 == 0 {
                    assert_eq!(t.omega(p, qq), &q(0, 1));
                }
            }
        }
    }

    #[test]
    fn grunsky_form_koebe_equality_cases() {
        let k = koebe::<CRat>(11);
        let full = grunsky_table(&k, 5).unwrap();
        let e1 = WeightVector::unit(1).unwrap();
        let form = grunsky_form(&full, &e1, 5).unwrap();
        assert_eq!(form.lhs, q(1, 1));
        assert_eq!(form.rhs, q(1, 1));
        assert!(form.near_equality(1e-12));

        let odd = grunsky_odd_table(&k, 5).unwrap();
        let form = grunsky_form(&odd, &e1, 5).unwrap();
        assert_eq!(form.lhs, q(1, 1));
        assert_eq!(form.rhs, q(1, 1));
    }

    #[test]
    fn grunsky_form_identity_and_errors() {
        let id = grunsky_table(&Series::<CRat>::identity(11), 5).unwrap();
        let x =
            WeightVector::new([(1, q(2, 1)), (3, CRat::complex_ratio((1, 1), (-1, 2)))]).unwrap();
        let form = grunsky_form(&id, &x, 5).unwrap();
        assert_eq!(form.lhs, q(0, 1));
        assert!(form.margin() > 0.0);

        assert!(matches!(
            grunsky_form(&id, &x, 6),
            Err(Error::IndexOutOfRange { index: 6, max: 5 })
        ));
        let far = WeightVector::unit(7).unwrap();
        assert!(grunsky_form(&id, &far, 5).is_err());

        let odd = grunsky_odd_table(&Series::<CRat>::identity(6), 5).unwrap();
        let even = WeightVector::unit(2).unwrap();
        assert_eq!(grunsky_form(&odd, &even, 5), Err(Error::EvenWeightIndex(2)));

        assert_eq!(
            WeightVector::<CRat>::new([(1, q(0, 1))]),
            Err(Error::ZeroWeights)
        );
    }

    #[test]
    fn convex_samples_satisfy_odd_corollaries() {
        for seed in 0..40 {
            let w = random_schwarz(1 + (seed as usize % 6), seed);
            let f = convex_from_schwarz(&w, 8).unwrap();
            let t = grunsky_odd_table(&f, 5).unwrap();
            let e1 = WeightVector::unit(1).unwrap();
            let e3 = WeightVector::unit(3).unwrap();
            let first = grunsky_form(&t, &e1, 5).unwrap();
            assert!(first.lhs.re <= 1.0 + 1e-9);
            // Dropping the q = 5 row gives |w13|^2 + 3|w33|^2 <= 1/3.
            let second = grunsky_form(&t, &e3, 3).unwrap();
            let direct = t.omega(1, 3).norm_sqr() + 3.0 * t.omega(3, 3).norm_sqr();
            assert!((second.lhs.re - direct).abs() < 1e-14);
            assert!(direct <= 1.0 / 3.0 + 1e-9);
        }
    }

    #[test]
    fn structural_relations_for_koebe_and_identity() {
        let report = verify_structural(&koebe::<CRat>(6)).unwrap();
        assert_eq!(report.omega11, q(1, 1));
        assert_eq!(report.omega33, q(1, 3));
        assert!(report.residuals.iter().all(|r| r == &q(0, 1)));
        assert!((report.second_coeff_functional - 1.0).abs() < 1e-15);

        let report = verify_structural(&Series::<CRat>::identity(6)).unwrap();
        assert!(report.residuals.iter().all(|r| r == &q(0, 1)));

        assert!(matches!(
            verify_structural(&koebe::<CRat>(5)),
            Err(Error::InsufficientOrder { needed: 6, got: 5 })
        ));
    }

    #[test]
    fn structural_relations_hold_exactly_for_rational_data() {
        let f = crate::families::random_normalized::<CRat>(6, 99);
        let report = verify_structural(&f).unwrap();
        assert!(report.residuals.iter().all(|r| r == &q(0, 1)));
    }

    #[test]
    fn starlike_structural_residuals() {
        for seed in 0..30 {
            let f = starlike_from_schwarz(&random_schwarz(1 + seed as usize % 6, seed), 8).unwrap();
            let report = verify_structural(&f).unwrap();
            assert!(report.max_residual() <= 1e-9, "seed {seed}");
            assert!(report.second_coeff_bound_holds(1e-9));
        }
    }

    #[test]
    fn table_json_triplets() {
        let t = grunsky_odd_table(&koebe::<CRat>(4), 3).unwrap();
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(
            json,
            "[[1,1,[1.0,0.0]],[1,3,[0.0,0.0]],[3,1,[0.0,0.0]],[3,3,[0.3333333333333333,0.0]]]"
        );
    }
}
