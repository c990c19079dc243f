//! Bound checkers for the inverse logarithmic coefficients.
//!
//! A [`BoundReport`] evaluates `|Gamma_1|, |Gamma_2|, |Gamma_3|`, their
//! successive differences and `|a_3 - a_2^2|` for one function, and compares
//! them against the sharp constants for class `S` or for convex functions.
//! Margins are signed so that a nonnegative margin always means "holds".

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::SchwarzPoly;
use crate::invert::inverse_log_coefficients;
use crate::scalar::Scalar;
use crate::series::Series;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Functional {
    #[serde(rename = "G1")]
    Gamma1,
    #[serde(rename = "G2")]
    Gamma2,
    #[serde(rename = "G3")]
    Gamma3,
    #[serde(rename = "G2minusG1")]
    Gamma2MinusGamma1,
    #[serde(rename = "G3minusG2")]
    Gamma3MinusGamma2,
    #[serde(rename = "a3minusa2sq")]
    SecondCoeff,
}

impl Functional {
    pub const ALL: [Functional; 6] = [
        Functional::Gamma1,
        Functional::Gamma2,
        Functional::Gamma3,
        Functional::Gamma2MinusGamma1,
        Functional::Gamma3MinusGamma2,
        Functional::SecondCoeff,
    ];

    /// Command-line name.
    pub fn name(self) -> &'static str {
        match self {
            Functional::Gamma1 => "G1",
            Functional::Gamma2 => "G2",
            Functional::Gamma3 => "G3",
            Functional::Gamma2MinusGamma1 => "G2minusG1",
            Functional::Gamma3MinusGamma2 => "G3minusG2",
            Functional::SecondCoeff => "a3minusa2sq",
        }
    }

    /// Human-readable formula, used as the quantity key in reports.
    pub fn label(self) -> &'static str {
        match self {
            Functional::Gamma1 => "|G1|",
            Functional::Gamma2 => "|G2|",
            Functional::Gamma3 => "|G3|",
            Functional::Gamma2MinusGamma1 => "|G2|-|G1|",
            Functional::Gamma3MinusGamma2 => "|G3|-|G2|",
            Functional::SecondCoeff => "|a3-a2^2|",
        }
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Functional {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Functional::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s) || f.label() == s)
            .ok_or_else(|| Error::UnknownFunctional(s.to_string()))
    }
}

/// Real quantities computed through the reversion pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Quantities {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub second_coeff: f64,
}

impl Quantities {
    pub fn of<S: Scalar>(f: &Series<S>) -> Result<Self> {
        f.require_normalized()?;
        if f.order() < 4 {
            return Err(Error::InsufficientOrder {
                needed: 4,
                got: f.order(),
            });
        }
        let big = inverse_log_coefficients(&f.truncate(4))?;
        let a2 = f.coeff(2).clone();
        let second = (f.coeff(3).clone() - a2.clone() * a2).abs_f64();
        Ok(Self {
            gamma1: big.get(1)?.abs_f64(),
            gamma2: big.get(2)?.abs_f64(),
            gamma3: big.get(3)?.abs_f64(),
            second_coeff: second,
        })
    }

    pub fn value(&self, functional: Functional) -> f64 {
        match functional {
            Functional::Gamma1 => self.gamma1,
            Functional::Gamma2 => self.gamma2,
            Functional::Gamma3 => self.gamma3,
            Functional::Gamma2MinusGamma1 => self.gamma2 - self.gamma1,
            Functional::Gamma3MinusGamma2 => self.gamma3 - self.gamma2,
            Functional::SecondCoeff => self.second_coeff,
        }
    }
}

/// The named real functional of `f`, computed from the series pipeline.
pub fn evaluate_functional<S: Scalar>(f: &Series<S>, functional: Functional) -> Result<f64> {
    Ok(Quantities::of(f)?.value(functional))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Upper,
    Lower,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    /// The result the bound belongs to.
    pub source: &'static str,
    pub kind: BoundKind,
    pub value: f64,
    pub bound: f64,
    /// `bound - value` for upper bounds, `value - bound` for lower bounds.
    pub margin: f64,
    pub pass: bool,
}

impl BoundCheck {
    fn new(
        source: &'static str,
        functional: &str,
        kind: BoundKind,
        value: f64,
        bound: f64,
        bound_text: &str,
        tol: f64,
    ) -> Self {
        let (margin, op) = match kind {
            BoundKind::Upper => (bound - value, "<="),
            BoundKind::Lower => (value - bound, ">="),
        };
        Self {
            name: format!("{functional} {op} {bound_text}"),
            source,
            kind,
            value,
            bound,
            margin,
            pass: margin >= -tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundReport {
    pub function_id: String,
    pub tolerance: f64,
    pub quantities: BTreeMap<String, f64>,
    pub checks: Vec<BoundCheck>,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &BoundCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Smallest margin over all checks.
    pub fn min_margin(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| c.margin)
            .fold(f64::INFINITY, f64::min)
    }
}

pub const SOURCE_S_MODULI: &str = "class S: inverse log-coefficient moduli";
pub const SOURCE_S_DIFF21: &str = "class S: |G2|-|G1| two-sided bound";
pub const SOURCE_S_DIFF32: &str = "class S: |G3|-|G2| upper bound";
pub const SOURCE_S_SECOND: &str = "class S: |a3-a2^2| <= 1";
pub const SOURCE_C_MODULI: &str = "convex: inverse log-coefficient moduli";
pub const SOURCE_C_DIFFS: &str = "convex: successive difference bounds";
pub const SOURCE_C_SECOND: &str = "convex: |a3-a2^2| <= (1-|a2|^2)/3";

fn quantity_map(q: &Quantities) -> BTreeMap<String, f64> {
    Functional::ALL
        .into_iter()
        .map(|f| (f.label().to_string(), q.value(f)))
        .collect()
}

/// Class-`S` checks. Membership of `f` in `S` is the caller's responsibility.
pub fn report_s<S: Scalar>(f: &Series<S>, function_id: &str, tol: f64) -> Result<BoundReport> {
    use BoundKind::*;
    use Functional::*;
    let q = Quantities::of(f)?;
    let half_sqrt2 = std::f64::consts::SQRT_2 / 2.0;
    let checks = vec![
        BoundCheck::new(
            SOURCE_S_MODULI,
            "|G1|",
            Upper,
            q.value(Gamma1),
            1.0,
            "1",
            tol,
        ),
        BoundCheck::new(
            SOURCE_S_MODULI,
            "|G2|",
            Upper,
            q.value(Gamma2),
            1.5,
            "3/2",
            tol,
        ),
        BoundCheck::new(
            SOURCE_S_MODULI,
            "|G3|",
            Upper,
            q.value(Gamma3),
            10.0 / 3.0,
            "10/3",
            tol,
        ),
        BoundCheck::new(
            SOURCE_S_DIFF21,
            "|G2|-|G1|",
            Lower,
            q.value(Gamma2MinusGamma1),
            -half_sqrt2,
            "-sqrt(2)/2",
            tol,
        ),
        BoundCheck::new(
            SOURCE_S_DIFF21,
            "|G2|-|G1|",
            Upper,
            q.value(Gamma2MinusGamma1),
            0.5,
            "1/2",
            tol,
        ),
        BoundCheck::new(
            SOURCE_S_DIFF32,
            "|G3|-|G2|",
            Upper,
            q.value(Gamma3MinusGamma2),
            11.0 / 6.0,
            "11/6",
            tol,
        ),
        BoundCheck::new(
            SOURCE_S_SECOND,
            "|a3-a2^2|",
            Upper,
            q.value(SecondCoeff),
            1.0,
            "1",
            tol,
        ),
    ];
    Ok(BoundReport {
        function_id: function_id.to_string(),
        tolerance: tol,
        quantities: quantity_map(&q),
        checks,
    })
}

/// Convex-class checks. Membership is the caller's responsibility.
pub fn report_convex<S: Scalar>(f: &Series<S>, function_id: &str, tol: f64) -> Result<BoundReport> {
    use BoundKind::*;
    use Functional::*;
    let q = Quantities::of(f)?;
    let sqrt10 = 10f64.sqrt();
    let second = convex_second_coeff_check(f)?;
    let checks = vec![
        BoundCheck::new(
            SOURCE_C_MODULI,
            "|G1|",
            Upper,
            q.value(Gamma1),
            0.5,
            "1/2",
            tol,
        ),
        BoundCheck::new(
            SOURCE_C_MODULI,
            "|G2|",
            Upper,
            q.value(Gamma2),
            0.25,
            "1/4",
            tol,
        ),
        BoundCheck::new(
            SOURCE_C_MODULI,
            "|G3|",
            Upper,
            q.value(Gamma3),
            1.0 / 6.0,
            "1/6",
            tol,
        ),
        BoundCheck::new(
            SOURCE_C_DIFFS,
            "|G2|-|G1|",
            Lower,
            q.value(Gamma2MinusGamma1),
            -sqrt10 / 10.0,
            "-sqrt(10)/10",
            tol,
        ),
        BoundCheck::new(
            SOURCE_C_DIFFS,
            "|G2|-|G1|",
            Upper,
            q.value(Gamma2MinusGamma1),
            1.0 / 6.0,
            "1/6",
            tol,
        ),
        BoundCheck::new(
            SOURCE_C_DIFFS,
            "|G3|-|G2|",
            Upper,
            q.value(Gamma3MinusGamma2),
            2.0 * sqrt10 / 75.0,
            "2sqrt(10)/75",
            tol,
        ),
        BoundCheck::new(
            SOURCE_C_SECOND,
            "|a3-a2^2|",
            Upper,
            second.value,
            second.bound,
            "(1-|a2|^2)/3",
            tol,
        ),
    ];
    Ok(BoundReport {
        function_id: function_id.to_string(),
        tolerance: tol,
        quantities: quantity_map(&q),
        checks,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SecondCoeffCheck {
    pub value: f64,
    pub bound: f64,
}

impl SecondCoeffCheck {
    pub fn margin(&self) -> f64 {
        self.bound - self.value
    }

    pub fn pass(&self, tol: f64) -> bool {
        self.margin() >= -tol
    }
}

/// `|a_3 - a_2^2|` against `(1 - |a_2|^2) / 3`.
pub fn convex_second_coeff_check<S: Scalar>(f: &Series<S>) -> Result<SecondCoeffCheck> {
    f.require_normalized()?;
    if f.order() < 3 {
        return Err(Error::InsufficientOrder {
            needed: 3,
            got: f.order(),
        });
    }
    let a2 = f.coeff(2).clone();
    let value = (f.coeff(3).clone() - a2.clone() * a2.clone()).abs_f64();
    let a2_sq = a2.norm_sqr().to_c64().re;
    Ok(SecondCoeffCheck {
        value,
        bound: (1.0 - a2_sq) / 3.0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiArgs {
    pub mu: f64,
    pub nu: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    /// `2 <= |mu| <= 4`, `nu >= (mu^2 + 8)/12`.
    LargeMu,
    /// `1/2 <= |mu| <= 2`, `-(2/3)(|mu|+1) <= nu <= (4/27)(|mu|+1)^3 - (|mu|+1)`.
    SmallMu,
    Outside,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhiValue {
    pub region: Region,
    pub value: Option<f64>,
}

const REGION_TOL: f64 = 1e-12;

/// Sharp bound `Phi(mu, nu)` for `|c_3 + mu c_1 c_2 + nu c_1^3|` on the two
/// closed regions where it is available here; `Outside` elsewhere.
pub fn phi_bound(args: PhiArgs) -> PhiValue {
    let PhiArgs { mu, nu } = args;
    if !mu.is_finite() || !nu.is_finite() {
        return PhiValue {
            region: Region::Outside,
            value: None,
        };
    }
    let m = mu.abs();
    let in_large_mu = (2.0 - REGION_TOL..=4.0 + REGION_TOL).contains(&m)
        && nu >= (mu * mu + 8.0) / 12.0 - REGION_TOL;
    if in_large_mu {
        return PhiValue {
            region: Region::LargeMu,
            value: Some(nu.abs()),
        };
    }
    let m1 = m + 1.0;
    let in_small_mu = (0.5 - REGION_TOL..=2.0 + REGION_TOL).contains(&m)
        && nu >= -2.0 / 3.0 * m1 - REGION_TOL
        && nu <= 4.0 / 27.0 * m1.powi(3) - m1 + REGION_TOL;
    if in_small_mu {
        let value = 2.0 / 3.0 * m1 * (m1 / (3.0 * (m1 + nu))).sqrt();
        return PhiValue {
            region: Region::SmallMu,
            value: Some(value),
        };
    }
    PhiValue {
        region: Region::Outside,
        value: None,
    }
}

/// `|c_3 + mu c_1 c_2 + nu c_1^3|` for a Schwarz polynomial (missing
/// coefficients are zero).
pub fn psi_schwarz<S: Scalar>(w: &SchwarzPoly<S>, args: PhiArgs) -> f64 {
    let (c1, c2, c3) = (w.c(1).to_c64(), w.c(2).to_c64(), w.c(3).to_c64());
    (c3 + args.mu * c1 * c2 + args.nu * c1 * c1 * c1).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{
        convex_from_schwarz, convex_lambda, halfplane, koebe, random_schwarz, starlike_from_schwarz,
    };
    use crate::scalar::{CRat, C64};

    const TOL: f64 = 1e-9;

    fn margin(r: &BoundReport, name: &str) -> f64 {
        r.check(name)
            .unwrap_or_else(|| panic!("missing check {name}"))
            .margin
    }

    #[test]
    fn koebe_attains_class_s_bounds() {
        let r = report_s(&koebe::<CRat>(8), "koebe", TOL).unwrap();
        assert!(r.passed());
        for name in [
            "|G1| <= 1",
            "|G2| <= 3/2",
            "|G3| <= 10/3",
            "|G2|-|G1| <= 1/2",
            "|G3|-|G2| <= 11/6",
        ] {
            assert!(margin(&r, name).abs() < 1e-12, "{name}");
        }
        assert!((r.quantities["|G3|-|G2|"] - 11.0 / 6.0).abs() < 1e-12);
        assert_eq!(r.checks.len(), 7);
        assert!(r.checks.iter().all(|c| c.source.starts_with("class S")));
    }

    #[test]
    fn identity_report_is_all_zero() {
        let r = report_s(&Series::<CRat>::identity(6), "z", TOL).unwrap();
        assert!(r.passed());
        assert!(r.quantities.values().all(|v| *v == 0.0));
        let r = report_convex(&Series::<CRat>::identity(6), "z", TOL).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn starlike_samples_pass() {
        for seed in 0..100 {
            let f = starlike_from_schwarz(&random_schwarz(1 + seed as usize % 6, seed), 8).unwrap();
            let r = report_s(&f, "starlike", TOL).unwrap();
            assert!(
                r.passed(),
                "seed {seed}: {:?}",
                r.failures().collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn convex_sharpness_witnesses() {
        let l = (0.4f64).sqrt();
        let f = convex_lambda(&C64::new(l, 0.0), 8).unwrap();
        let r = report_convex(&f, "f_sqrt(2/5)", TOL).unwrap();
        assert!(r.passed());
        assert!((r.quantities["|G2|-|G1|"] + 10f64.sqrt() / 10.0).abs() < 1e-12);
        assert!(margin(&r, "|G2|-|G1| >= -sqrt(10)/10").abs() < 1e-12);
        assert!(margin(&r, "|G3|-|G2| <= 2sqrt(10)/75").abs() < 1e-12);

        let f0 = convex_lambda(&CRat::ratio(0, 1), 8).unwrap();
        let r = report_convex(&f0, "f_0", TOL).unwrap();
        assert!(margin(&r, "|G2|-|G1| <= 1/6").abs() < 1e-15);

        let h = report_convex(&halfplane::<CRat>(8), "halfplane", TOL).unwrap();
        for name in ["|G1| <= 1/2", "|G2| <= 1/4", "|G3| <= 1/6"] {
            assert!(margin(&h, name).abs() < 1e-15, "{name}");
        }
    }

    #[test]
    fn convex_samples_pass() {
        for seed in 0..100 {
            let f = convex_from_schwarz(&random_schwarz(1 + seed as usize % 6, seed), 8).unwrap();
            assert!(
                report_convex(&f, "convex", TOL).unwrap().passed(),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn second_coeff_examples() {
        let f = convex_lambda(&CRat::ratio(1, 2), 4).unwrap();
        assert_eq!(f.coeff(3), &CRat::ratio(1, 2));
        let c = convex_second_coeff_check(&f).unwrap();
        assert!((c.value - 0.25).abs() < 1e-15);
        assert!((c.bound - 0.25).abs() < 1e-15);
        assert!(c.margin().abs() < 1e-15);

        let id = convex_second_coeff_check(&Series::<CRat>::identity(4)).unwrap();
        assert_eq!(id.value, 0.0);
        assert!((id.bound - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn second_coeff_equality_along_lambda_family() {
        for i in 0..=20 {
            let f = convex_lambda(&C64::new(i as f64 / 20.0, 0.0), 4).unwrap();
            assert!(convex_second_coeff_check(&f).unwrap().margin().abs() < 1e-14);
        }
    }

    #[test]
    fn phi_regions_and_values() {
        let large_mu = phi_bound(PhiArgs { mu: 3.0, nu: 2.0 });
        assert_eq!(large_mu.region, Region::LargeMu);
        assert_eq!(large_mu.value, Some(2.0));

        let small_mu = phi_bound(PhiArgs { mu: -1.4, nu: -0.4 });
        assert_eq!(small_mu.region, Region::SmallMu);
        let expected = 1.6 * (0.4f64).sqrt();
        assert!((small_mu.value.unwrap() - expected).abs() < 1e-12);
        assert!((small_mu.value.unwrap() - 1.01193).abs() < 1e-5);
        assert!((small_mu.value.unwrap() / 12.0 - 2.0 * 10f64.sqrt() / 75.0).abs() < 1e-15);

        let out = phi_bound(PhiArgs { mu: 0.0, nu: 0.0 });
        assert_eq!(
            out,
            PhiValue {
                region: Region::Outside,
                value: None
            }
        );
        assert_eq!(
            phi_bound(PhiArgs {
                mu: f64::NAN,
                nu: 0.0
            })
            .region,
            Region::Outside
        );

        // Shared corner of the two regions: both formulas give 1.
        let corner = phi_bound(PhiArgs { mu: 2.0, nu: 1.0 });
        assert_eq!(corner.value, Some(1.0));
    }

    #[test]
    fn psi_examples() {
        let args = PhiArgs { mu: -1.4, nu: -0.4 };
        let z3 = SchwarzPoly::new(vec![
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
        ])
        .unwrap();
        assert_eq!(psi_schwarz(&z3, args), 1.0);
        assert_eq!(psi_schwarz(&z3, PhiArgs { mu: 3.0, nu: 2.0 }), 1.0);
        let z = SchwarzPoly::new(vec![C64::new(1.0, 0.0)]).unwrap();
        assert!((psi_schwarz(&z, args) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn psi_below_phi_on_random_schwarz() {
        let bound = phi_bound(PhiArgs { mu: -1.4, nu: -0.4 }).value.unwrap();
        for seed in 0..500 {
            let w = random_schwarz(1 + seed as usize % 6, seed);
            assert!(psi_schwarz(&w, PhiArgs { mu: -1.4, nu: -0.4 }) <= bound + 1e-9);
            assert!(psi_schwarz(&w, PhiArgs { mu: 3.0, nu: 2.0 }) <= 2.0 + 1e-9);
        }
    }

    #[test]
    fn functional_names_parse() {
        for f in Functional::ALL {
            assert_eq!(f.name().parse::<Functional>().unwrap(), f);
            assert_eq!(f.label().parse::<Functional>().unwrap(), f);
        }
        assert!(matches!(
            "G4".parse::<Functional>(),
            Err(Error::UnknownFunctional(_))
        ));
        assert_eq!(
            serde_json::to_string(&Functional::Gamma3MinusGamma2).unwrap(),
            "\"G3minusG2\""
        );
    }

    #[test]
    fn evaluate_functional_examples() {
        let k = koebe::<CRat>(6);
        let v = evaluate_functional(&k, Functional::Gamma3MinusGamma2).unwrap();
        assert!((v - 11.0 / 6.0).abs() < 1e-15);
        let l = (0.4f64).sqrt();
        let f = convex_lambda(&C64::new(l, 0.0), 6).unwrap();
        let v = evaluate_functional(&f, Functional::Gamma2MinusGamma1).unwrap();
        assert!((v + 0.3162278).abs() < 1e-7);
        assert_eq!(
            evaluate_functional(&Series::<CRat>::identity(4), Functional::Gamma2MinusGamma1)
                .unwrap(),
            0.0
        );
        assert!(matches!(
            evaluate_functional(&Series::<CRat>::identity(3), Functional::Gamma1),
            Err(Error::InsufficientOrder { needed: 4, got: 3 })
        ));
    }
}
