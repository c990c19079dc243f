//! Series reversion and logarithmic coefficients of `f` and `f^{-1}`.
//!
//! For normalized `f(z) = z + a_2 z^2 + ...`, the logarithmic coefficients
//! are defined by `log(f(z)/z) = 2 sum gamma_n z^n`. The inverse
//! coefficients `Gamma_n` are the same quantities for the compositional
//! inverse `f^{-1}`. Both are available through the series pipeline and,
//! for indices 1..=3, through polynomial closed forms in `a_2, a_3, a_4`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::Series;

/// Compositional inverse `g` with `f(g(w)) = w + O(w^{N+1})`.
///
/// Triangular solve of `g = w - sum_{k>=2} a_k g^k`: the coefficient of
/// `w^n` in `g^k` (`k >= 2`) only involves `g_1..g_{n-1}`, so `g_n` follows
/// from a table of truncated powers that is extended one column at a time.
pub fn revert<S: Scalar>(f: &Series<S>) -> Result<Series<S>> {
    f.require_normalized()?;
    let n = f.order();
    // powers[k][m] = [w^m] g^k for 1 <= k <= m <= n; zero below the diagonal.
    let mut powers: Vec<Vec<S>> = vec![vec![S::zero(); n + 1]; n + 1];
    let mut g = vec![S::zero(); n + 1];
    if n >= 1 {
        g[1] = S::one();
        powers[1][1] = S::one();
    }
    for m in 2..=n {
        for k in (2..=m).rev() {
            // [w^m] g^k = sum_j g_j [w^{m-j}] g^{k-1}, with j <= m - k + 1.
            let mut acc = S::zero();
            for j in 1..=(m - k + 1) {
                let p = &powers[k - 1][m - j];
                if !p.is_zero() && !g[j].is_zero() {
                    acc = acc + g[j].clone() * p.clone();
                }
            }
            powers[k][m] = acc;
        }
        let mut gm = S::zero();
        for k in 2..=m {
            let a = f.coeff(k);
            if !a.is_zero() {
                gm = gm - a.clone() * powers[k][m].clone();
            }
        }
        powers[1][m] = gm.clone();
        g[m] = gm;
    }
    Ok(Series::from_vec_unchecked(g))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogSource {
    /// Coefficients of `f` itself (`gamma_n`).
    Direct,
    /// Coefficients of `f^{-1}` (`Gamma_n`).
    Inverse,
}

/// Logarithmic coefficients indexed from 1.
#[derive(Clone, Debug, PartialEq)]
pub struct LogCoeffVector<S> {
    values: Vec<S>,
    source: LogSource,
}

impl<S: Scalar> LogCoeffVector<S> {
    pub fn source(&self) -> LogSource {
        self.source
    }

    /// Highest available index.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The `n`-th coefficient, `1 <= n <= len()`. Indices the truncation
    /// cannot determine are refused.
    pub fn get(&self, n: usize) -> Result<&S> {
        if n == 0 || n > self.values.len() {
            return Err(Error::IndexOutOfRange {
                index: n,
                max: self.values.len(),
            });
        }
        Ok(&self.values[n - 1])
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &S)> {
        self.values.iter().enumerate().map(|(i, v)| (i + 1, v))
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }
}

fn half_log_coefficients<S: Scalar>(f: &Series<S>, source: LogSource) -> Result<LogCoeffVector<S>> {
    f.require_normalized()?;
    let log = f.div_z()?.log1()?;
    let half = S::ratio(1, 2);
    let values = log.coeffs()[1..]
        .iter()
        .map(|c| c.clone() * half.clone())
        .collect();
    Ok(LogCoeffVector { values, source })
}

/// `gamma_1..gamma_{N-1}` from `(1/2) log(f(z)/z)`.
pub fn log_coefficients<S: Scalar>(f: &Series<S>) -> Result<LogCoeffVector<S>> {
    half_log_coefficients(f, LogSource::Direct)
}

/// `Gamma_1..Gamma_{N-1}`, the logarithmic coefficients of `f^{-1}`.
pub fn inverse_log_coefficients<S: Scalar>(f: &Series<S>) -> Result<LogCoeffVector<S>> {
    half_log_coefficients(&revert(f)?, LogSource::Inverse)
}

/// The coefficients `a_2, a_3, a_4` of a normalized function.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffTriple<S> {
    pub a2: S,
    pub a3: S,
    pub a4: S,
}

impl<S: Scalar> CoeffTriple<S> {
    pub fn new(a2: S, a3: S, a4: S) -> Self {
        Self { a2, a3, a4 }
    }

    pub fn from_series(f: &Series<S>) -> Result<Self> {
        f.require_normalized()?;
        if f.order() < 4 {
            return Err(Error::InsufficientOrder {
                needed: 4,
                got: f.order(),
            });
        }
        Ok(Self::new(
            f.coeff(2).clone(),
            f.coeff(3).clone(),
            f.coeff(4).clone(),
        ))
    }

    /// `z + a_2 z^2 + a_3 z^3 + a_4 z^4` as an order-4 series.
    pub fn to_series(&self) -> Series<S> {
        Series::from_vec_unchecked(vec![
            S::zero(),
            S::one(),
            self.a2.clone(),
            self.a3.clone(),
            self.a4.clone(),
        ])
    }
}

fn r<S: Scalar>(n: i64, d: i64) -> S {
    S::ratio(n, d)
}

/// `gamma_1, gamma_2, gamma_3` as polynomials in `a_2, a_3, a_4`.
pub fn closed_form_gamma<S: Scalar>(t: &CoeffTriple<S>) -> [S; 3] {
    let (a2, a3, a4) = (t.a2.clone(), t.a3.clone(), t.a4.clone());
    let a2sq = a2.clone() * a2.clone();
    [
        a2.clone() * r(1, 2),
        (a3.clone() - a2sq.clone() * r(1, 2)) * r(1, 2),
        (a4 - a2.clone() * a3 + a2sq * a2 * r(1, 3)) * r(1, 2),
    ]
}

/// `A_2, A_3, A_4`, the leading coefficients of `f^{-1}`.
pub fn closed_form_inverse_coeffs<S: Scalar>(t: &CoeffTriple<S>) -> [S; 3] {
    let (a2, a3, a4) = (t.a2.clone(), t.a3.clone(), t.a4.clone());
    let a2sq = a2.clone() * a2.clone();
    [
        -a2.clone(),
        -a3.clone() + a2sq.clone() * S::from_i64(2),
        -a4 + a2.clone() * a3 * S::from_i64(5) - a2sq * a2 * S::from_i64(5),
    ]
}

/// `Gamma_1, Gamma_2, Gamma_3` as polynomials in `a_2, a_3, a_4`.
pub fn closed_form_inverse_gamma<S: Scalar>(t: &CoeffTriple<S>) -> [S; 3] {
    let (a2, a3, a4) = (t.a2.clone(), t.a3.clone(), t.a4.clone());
    let a2sq = a2.clone() * a2.clone();
    [
        -a2.clone() * r(1, 2),
        (-a3.clone() + a2sq.clone() * r(3, 2)) * r(1, 2),
        (-a4 + a2.clone() * a3 * S::from_i64(4) - a2sq * a2 * r(10, 3)) * r(1, 2),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{CRat, C64};

    fn q(n: i64, d: i64) -> CRat {
        CRat::ratio(n, d)
    }

    fn koebe(order: usize) -> Series<CRat> {
        Series::from_fn(order, |n| CRat::from_i64(n as i64))
    }

    fn halfplane(order: usize) -> Series<CRat> {
        Series::from_fn(order, |n| if n == 0 { q(0, 1) } else { q(1, 1) })
    }

    #[test]
    fn revert_halfplane_alternates() {
        let g = revert(&halfplane(8)).unwrap();
        for n in 1..=8 {
            let sign = if n % 2 == 1 { 1 } else { -1 };
            assert_eq!(g.coeff(n), &CRat::from_i64(sign));
        }
    }

    #[test]
    fn revert_koebe_gives_signed_catalan_pattern() {
        // Solving w (1 - g)^2 = g gives g = (1 + 2w - sqrt(1 + 4w)) / (2w).
        let g = revert(&koebe(8)).unwrap();
        let sqrt = Series::<CRat>::from_fn(8, |n| match n {
            0 => q(1, 1),
            1 => q(4, 1),
            _ => q(0, 1),
        })
        .sqrt1()
        .unwrap();
        // (1 + 2w - sqrt(1+4w)) / 2 has zero constant and linear terms; dividing by w
        // shifts down by one.
        let numer = Series::from_fn(8, |n| {
            let base = match n {
                0 => q(1, 1),
                1 => q(2, 1),
                _ => q(0, 1),
            };
            (base - sqrt.coeff(n).clone()) * q(1, 2)
        });
        let closed = numer.div_z().unwrap();
        for n in 1..=7 {
            assert_eq!(g.coeff(n), closed.coeff(n), "n = {n}");
        }
        assert_eq!(g.coeff(2), &q(-2, 1));
        assert_eq!(g.coeff(3), &q(5, 1));
        assert_eq!(g.coeff(4), &q(-14, 1));
    }

    #[test]
    fn revert_identity_and_rejects_unnormalized() {
        let id = Series::<CRat>::identity(5);
        assert_eq!(revert(&id).unwrap(), id);
        let bad = Series::new(vec![q(0, 1), q(2, 1), q(1, 1)]).unwrap();
        assert_eq!(revert(&bad), Err(Error::NotNormalized));
    }

    #[test]
    fn koebe_log_coefficients_are_reciprocals() {
        let gamma = log_coefficients(&koebe(10)).unwrap();
        assert_eq!(gamma.len(), 9);
        for (n, g) in gamma.iter() {
            assert_eq!(g, &q(1, n as i64));
        }
        assert!(matches!(gamma.get(10), Err(Error::IndexOutOfRange { .. })));
        assert!(gamma.get(0).is_err());
    }

    #[test]
    fn first_log_coefficient_is_half_a2() {
        let a2 = CRat::complex_ratio((3, 7), (-1, 2));
        let f = Series::new(vec![q(0, 1), q(1, 1), a2.clone(), q(0, 1)]).unwrap();
        let gamma = log_coefficients(&f).unwrap();
        assert_eq!(gamma.get(1).unwrap(), &(a2 * q(1, 2)));
    }

    #[test]
    fn koebe_inverse_log_coefficients() {
        let big = inverse_log_coefficients(&koebe(8)).unwrap();
        assert_eq!(big.source(), LogSource::Inverse);
        assert_eq!(big.get(1).unwrap(), &q(-1, 1));
        assert_eq!(big.get(2).unwrap(), &q(3, 2));
        assert_eq!(big.get(3).unwrap(), &q(-10, 3));
    }

    #[test]
    fn identity_has_zero_coefficients() {
        let id = Series::<CRat>::identity(6);
        assert!(log_coefficients(&id)
            .unwrap()
            .values()
            .iter()
            .all(|v| v == &q(0, 1)));
        assert!(inverse_log_coefficients(&id)
            .unwrap()
            .values()
            .iter()
            .all(|v| v == &q(0, 1)));
    }

    #[test]
    fn halfplane_inverse_moduli() {
        let big = inverse_log_coefficients(&halfplane(6)).unwrap();
        let abs: Vec<_> = (1..=3)
            .map(|n| big.get(n).unwrap().exact_abs().unwrap())
            .collect();
        assert_eq!(abs[0], q(1, 2).re);
        assert_eq!(abs[1], q(1, 4).re);
        assert_eq!(abs[2], q(1, 6).re);
    }

    #[test]
    fn closed_forms_at_named_points() {
        let koebe = CoeffTriple::new(q(2, 1), q(3, 1), q(4, 1));
        assert_eq!(closed_form_gamma(&koebe), [q(1, 1), q(1, 2), q(1, 3)]);
        assert_eq!(
            closed_form_inverse_coeffs(&koebe),
            [q(-2, 1), q(5, 1), q(-14, 1)]
        );
        assert_eq!(
            closed_form_inverse_gamma(&koebe),
            [q(-1, 1), q(3, 2), q(-10, 3)]
        );

        let ones = CoeffTriple::new(q(1, 1), q(1, 1), q(1, 1));
        assert_eq!(closed_form_gamma(&ones), [q(1, 2), q(1, 4), q(1, 6)]);
        assert_eq!(
            closed_form_inverse_coeffs(&ones),
            [q(-1, 1), q(1, 1), q(-1, 1)]
        );

        let zeros = CoeffTriple::new(q(0, 1), q(0, 1), q(0, 1));
        assert_eq!(closed_form_gamma(&zeros), [q(0, 1), q(0, 1), q(0, 1)]);
        assert_eq!(
            closed_form_inverse_coeffs(&zeros),
            [q(0, 1), q(0, 1), q(0, 1)]
        );
        assert_eq!(
            closed_form_inverse_gamma(&zeros),
            [q(0, 1), q(0, 1), q(0, 1)]
        );
    }

    #[test]
    fn closed_form_inverse_gamma_at_sqrt_two_fifths() {
        let l = (0.4f64).sqrt();
        let t = CoeffTriple::new(C64::new(l, 0.0), C64::new(0.6, 0.0), C64::new(0.8 * l, 0.0));
        let [g1, g2, g3] = closed_form_inverse_gamma(&t);
        let s10 = 10f64.sqrt();
        assert!((g1.re + s10 / 10.0).abs() < 1e-15);
        assert!(g2.norm() < 1e-15);
        assert!((g3.re - 2.0 * s10 / 75.0).abs() < 1e-15);
    }

    #[test]
    fn closed_forms_need_order_four() {
        let f = Series::<CRat>::identity(3);
        assert!(matches!(
            CoeffTriple::from_series(&f),
            Err(Error::InsufficientOrder { needed: 4, got: 3 })
        ));
    }
}
