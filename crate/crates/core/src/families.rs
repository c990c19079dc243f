//! Generators for normalized univalent functions.
//!
//! Named extremal functions (Koebe, the half-plane map, the integral family
//! `f_lambda`) are built in closed form or from elementary series. Random
//! convex and starlike members come from polynomial Schwarz functions through
//! `1 + z f''/f' = (1 + w)/(1 - w)` and `z f'/f = (1 + w)/(1 - w)`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, C64};
use crate::series::Series;

/// Boundary grid used by the admissibility certificate.
pub const ADMISSIBILITY_GRID: usize = 4096;
const ADMISSIBILITY_SLACK: f64 = 1e-12;

/// Polynomial Schwarz function `w(z) = c_1 z + ... + c_K z^K`.
#[derive(Clone, Debug, PartialEq)]
pub struct SchwarzPoly<S> {
    coeffs: Vec<S>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub max_modulus: f64,
}

impl<S: Scalar> SchwarzPoly<S> {
    /// `coeffs[k]` is `c_{k+1}`. An empty list is the zero function.
    pub fn new(coeffs: Vec<S>) -> Result<Self> {
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite(i + 1));
        }
        Ok(Self { coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// `c_n` for `n >= 1`, zero past the degree.
    pub fn c(&self, n: usize) -> S {
        assert!(n >= 1, "Schwarz coefficients start at c_1");
        self.coeffs.get(n - 1).cloned().unwrap_or_else(S::zero)
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// `w` as a series of the given order (exact: `w` is a polynomial).
    pub fn to_series(&self, order: usize) -> Series<S> {
        Series::from_fn(order, |n| if n == 0 { S::zero() } else { self.c(n) })
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, c| (acc + c.to_c64()) * z)
    }

    /// Max of `|w|` over `grid_size` equally spaced boundary points.
    pub fn boundary_max(&self, grid_size: usize) -> f64 {
        if grid_size == ADMISSIBILITY_GRID {
            return default_grid()
                .iter()
                .map(|&z| self.eval(z).norm())
                .fold(0.0, f64::max);
        }
        unit_grid(grid_size)
            .iter()
            .map(|&z| self.eval(z).norm())
            .fold(0.0, f64::max)
    }

    /// Necessary-condition check `max |w| <= 1` on a boundary grid.
    pub fn admissibility(&self, grid_size: usize) -> Admissibility {
        assert!(grid_size >= 256, "grid size must be at least 256");
        let max_modulus = self.boundary_max(grid_size);
        Admissibility {
            admissible: max_modulus <= 1.0 + ADMISSIBILITY_SLACK,
            max_modulus,
        }
    }

    fn require_admissible(&self) -> Result<()> {
        let a = self.admissibility(ADMISSIBILITY_GRID);
        if a.admissible {
            Ok(())
        } else {
            Err(Error::InadmissibleSchwarz(a.max_modulus))
        }
    }

    /// `2w / ((1 - w) z)` as a series of the given order.
    fn log_derivative_kernel(&self, order: usize) -> Result<Series<S>> {
        let w = self.to_series(order + 1);
        let h = w
            .scale(&S::from_i64(2))
            .try_div(&(&Series::one(order + 1) - &w))?;
        h.div_z()
    }
}

impl SchwarzPoly<C64> {
    /// Coefficients as `[re, im]` pairs.
    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        self.coeffs.iter().map(|c| [c.re, c.im]).collect()
    }

    pub fn from_pairs(pairs: &[[f64; 2]]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|[re, im]| Complex::new(*re, *im))
                .collect(),
        )
    }
}

fn unit_grid(n: usize) -> Vec<C64> {
    (0..n)
        .map(|j| Complex::from_polar(1.0, 2.0 * PI * j as f64 / n as f64))
        .collect()
}

fn default_grid() -> &'static [C64] {
    static GRID: OnceLock<Vec<C64>> = OnceLock::new();
    GRID.get_or_init(|| unit_grid(ADMISSIBILITY_GRID))
}

/// `schwarz_admissible`: admissibility flag and boundary max.
pub fn schwarz_admissible<S: Scalar>(w: &SchwarzPoly<S>, grid_size: usize) -> Admissibility {
    w.admissibility(grid_size)
}

fn require_order(order: usize, needed: usize) -> Result<()> {
    if order < needed {
        Err(Error::InsufficientOrder { needed, got: order })
    } else {
        Ok(())
    }
}

/// Koebe function `z / (1 - z)^2`, `a_n = n`.
pub fn koebe<S: Scalar>(order: usize) -> Series<S> {
    Series::from_fn(order, |n| S::from_i64(n as i64))
}

/// Rotation `e^{-i theta} k(e^{i theta} z)`: `a_n = n e^{i theta (n - 1)}`.
pub fn koebe_rotated(theta: f64, order: usize) -> Series<C64> {
    Series::from_fn(order, |n| {
        if n == 0 {
            C64::zero()
        } else {
            Complex::from_polar(n as f64, theta * (n as f64 - 1.0))
        }
    })
}

/// Half-plane map `z / (1 - z)`, `a_n = 1`.
pub fn halfplane<S: Scalar>(order: usize) -> Series<S> {
    Series::from_fn(order, |n| if n == 0 { S::zero() } else { S::one() })
}

/// `f_lambda(z) = int_0^z ((1 + t)/(1 - t))^lambda / (1 - t^2) dt`, `0 <= lambda <= 1`.
pub fn convex_lambda<S: Scalar>(lambda: &S, order: usize) -> Result<Series<S>> {
    require_order(order, 1)?;
    let l = lambda.to_c64();
    if !lambda.is_real() || !(0.0..=1.0).contains(&l.re) {
        return Err(Error::ParameterRange {
            name: "lambda",
            value: l.re,
            range: "[0, 1]",
        });
    }
    let m = order - 1;
    let one_plus = Series::from_fn(m, |n| if n <= 1 { S::one() } else { S::zero() });
    let one_minus = Series::from_fn(m, |n| match n {
        0 => S::one(),
        1 => -S::one(),
        _ => S::zero(),
    });
    let one_minus_sq = Series::from_fn(m, |n| match n {
        0 => S::one(),
        2 => -S::one(),
        _ => S::zero(),
    });
    let ratio = one_plus.try_div(&one_minus)?.pow(lambda)?;
    Ok(ratio.try_div(&one_minus_sq)?.integral())
}

/// Convex function with `1 + z f''/f' = (1 + w)/(1 - w)`.
pub fn convex_from_schwarz<S: Scalar>(w: &SchwarzPoly<S>, order: usize) -> Result<Series<S>> {
    require_order(order, 2)?;
    w.require_admissible()?;
    // (log f')' = 2w / ((1 - w) z)
    let log_fprime = w.log_derivative_kernel(order - 2)?.integral();
    Ok(log_fprime.exp0()?.integral())
}

/// Starlike function with `z f'/f = (1 + w)/(1 - w)`.
pub fn starlike_from_schwarz<S: Scalar>(w: &SchwarzPoly<S>, order: usize) -> Result<Series<S>> {
    require_order(order, 2)?;
    w.require_admissible()?;
    // (log(f/z))' = 2w / ((1 - w) z)
    let log_ratio = w.log_derivative_kernel(order - 2)?.integral();
    Ok(log_ratio.exp0()?.mul_z())
}

fn unit_disk_point(rng: &mut ChaCha8Rng) -> C64 {
    let r = rng.gen::<f64>().sqrt();
    let theta = rng.gen::<f64>() * 2.0 * PI;
    Complex::from_polar(r, theta)
}

/// Deterministic random Schwarz polynomial of degree `degree`.
///
/// Coefficients are drawn from the unit disk; when the boundary maximum
/// (inflated by the grid-to-circle factor `sec(pi K / grid)`) exceeds one,
/// the polynomial is rescaled just below the unit circle.
pub fn random_schwarz(degree: usize, seed: u64) -> SchwarzPoly<C64> {
    assert!(degree >= 1, "degree must be at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs: Vec<C64> = (0..degree).map(|_| unit_disk_point(&mut rng)).collect();
    let probe = SchwarzPoly {
        coeffs: coeffs.clone(),
    };
    let grid_factor = 1.0 / (PI * degree as f64 / ADMISSIBILITY_GRID as f64).cos();
    let bound = probe.boundary_max(ADMISSIBILITY_GRID) * grid_factor;
    if bound > 1.0 {
        let s = bound * (1.0 + 1e-6);
        coeffs.iter_mut().for_each(|c| *c /= s);
    }
    SchwarzPoly { coeffs }
}

/// Deterministic normalized series with `|a_n| <= n`, real and imaginary
/// parts rational with denominators up to 8.
pub fn random_normalized<S: Scalar>(order: usize, seed: u64) -> Series<S> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Series::from_fn(order, |n| match n {
        0 => S::zero(),
        1 => S::one(),
        _ => {
            // |re|, |im| <= n/2 keeps the modulus below n.
            let part = |rng: &mut ChaCha8Rng| {
                let den: i64 = rng.gen_range(1..=8);
                let lim = (n as i64 * den) / 2;
                (rng.gen_range(-lim..=lim), den)
            };
            let re = part(&mut rng);
            let im = part(&mut rng);
            S::complex_ratio(re, im)
        }
    })
}

/// The classes whose bounds a generated function is known to satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Class {
    /// Normalized univalent functions.
    S,
    /// Convex functions (also in `S`).
    Convex,
}

/// A named family member with its parameters, as addressed from the CLI.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyParam {
    Koebe { theta: f64 },
    Halfplane,
    ConvexLambda { lambda: f64 },
    ConvexSchwarz { schwarz: Vec<[f64; 2]> },
    StarlikeSchwarz { schwarz: Vec<[f64; 2]> },
}

impl FamilyParam {
    pub fn class(&self) -> Class {
        match self {
            FamilyParam::Koebe { .. } | FamilyParam::StarlikeSchwarz { .. } => Class::S,
            FamilyParam::Halfplane
            | FamilyParam::ConvexLambda { .. }
            | FamilyParam::ConvexSchwarz { .. } => Class::Convex,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FamilyParam::Koebe { theta } if !(0.0..2.0 * PI).contains(theta) => {
                Err(Error::ParameterRange {
                    name: "theta",
                    value: *theta,
                    range: "[0, 2pi)",
                })
            }
            FamilyParam::ConvexLambda { lambda } if !(0.0..=1.0).contains(lambda) => {
                Err(Error::ParameterRange {
                    name: "lambda",
                    value: *lambda,
                    range: "[0, 1]",
                })
            }
            _ => Ok(()),
        }
    }

    /// Builds the floating series of the given order.
    pub fn build(&self, order: usize) -> Result<Series<C64>> {
        self.validate()?;
        match self {
            FamilyParam::Koebe { theta } => Ok(koebe_rotated(*theta, order)),
            FamilyParam::Halfplane => Ok(halfplane(order)),
            FamilyParam::ConvexLambda { lambda } => {
                convex_lambda(&Complex::new(*lambda, 0.0), order)
            }
            FamilyParam::ConvexSchwarz { schwarz } => {
                convex_from_schwarz(&SchwarzPoly::from_pairs(schwarz)?, order)
            }
            FamilyParam::StarlikeSchwarz { schwarz } => {
                starlike_from_schwarz(&SchwarzPoly::from_pairs(schwarz)?, order)
            }
        }
    }

    /// Short identifier used in reports, e.g. `convex_lambda(0.5)`.
    pub fn id(&self) -> String {
        match self {
            FamilyParam::Koebe { theta } => format!("koebe(theta={theta})"),
            FamilyParam::Halfplane => "halfplane".to_string(),
            FamilyParam::ConvexLambda { lambda } => format!("convex_lambda({lambda})"),
            FamilyParam::ConvexSchwarz { schwarz } => {
                format!("convex_schwarz(K={})", schwarz.len())
            }
            FamilyParam::StarlikeSchwarz { schwarz } => {
                format!("starlike_schwarz(K={})", schwarz.len())
            }
        }
    }
}
