//! Turning command-line function descriptions into series.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, ValueEnum};
use num_complex::Complex;
use num_traits::{Signed, Zero};
use schlicht::families::{
    convex_from_schwarz, convex_lambda, halfplane, koebe, koebe_rotated, random_schwarz,
    starlike_from_schwarz, Class, SchwarzPoly,
};
use schlicht::scalar::{parse_rational, CRat, Scalar, C64};
use schlicht::series::Series;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum FamilyName {
    Identity,
    Koebe,
    Halfplane,
    ConvexLambda,
    ConvexSchwarz,
    StarlikeSchwarz,
}

#[derive(Clone, Debug, Args)]
pub struct FunctionArgs {
    /// Named family.
    #[arg(long, value_enum, conflicts_with = "inline")]
    pub family: Option<FamilyName>,

    /// Coefficients a2,a3,... (a1 = 1 implied). Each entry is `re` or `re:im`,
    /// with rationals like `-2/5` or decimals.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub inline: Option<Vec<String>>,

    /// Rotation angle for the Koebe family (radians, float mode only unless 0).
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,

    /// Parameter of f_lambda in [0, 1]; accepts `p/q`, decimals or `sqrt(x)`.
    #[arg(long)]
    pub lambda: Option<String>,

    /// Schwarz coefficients c1,c2,... in the same syntax as --inline.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub schwarz: Option<Vec<String>>,

    /// Draw the Schwarz polynomial at random from this seed instead.
    #[arg(long)]
    pub schwarz_seed: Option<u64>,

    /// Degree of the random Schwarz polynomial.
    #[arg(long, default_value_t = 3)]
    pub schwarz_degree: usize,
}

/// Scalars that can be read from command-line literals.
pub trait CliScalar: Scalar {
    fn parse_real(text: &str) -> Result<Self>;
    fn from_c64(z: C64) -> Result<Self>;
    /// Exact rendering, `None` for floating point scalars.
    fn exact_text(&self) -> Option<String>;
}

impl CliScalar for C64 {
    fn parse_real(text: &str) -> Result<Self> {
        let t = text.trim();
        if let Some(inner) = t.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
            let x = Self::parse_real(inner)?.re;
            if x < 0.0 {
                bail!("sqrt of negative value in `{text}`");
            }
            return Ok(Complex::new(x.sqrt(), 0.0));
        }
        if let Some(q) = parse_rational(t) {
            return Ok(Complex::new(schlicht::scalar::rational_to_f64(&q), 0.0));
        }
        let x: f64 = t
            .parse()
            .with_context(|| format!("invalid number `{text}`"))?;
        Ok(Complex::new(x, 0.0))
    }

    fn from_c64(z: C64) -> Result<Self> {
        Ok(z)
    }

    fn exact_text(&self) -> Option<String> {
        None
    }
}

impl CliScalar for CRat {
    fn parse_real(text: &str) -> Result<Self> {
        let q = parse_rational(text).ok_or_else(|| {
            anyhow!("`{text}` is not an exact rational (use float mode for irrational values)")
        })?;
        Ok(Complex::new(q, Zero::zero()))
    }

    fn from_c64(_: C64) -> Result<Self> {
        bail!("this input is only available in float mode")
    }

    fn exact_text(&self) -> Option<String> {
        if self.im.is_zero() {
            return Some(self.re.to_string());
        }
        let sign = if self.im.is_negative() { "-" } else { "+" };
        Some(format!("{}{}{}i", self.re, sign, self.im.abs()))
    }
}

pub fn parse_complex<S: CliScalar>(text: &str) -> Result<S> {
    match text.split_once(':') {
        Some((re, im)) => Ok(S::parse_real(re)? + S::i() * S::parse_real(im)?),
        None => S::parse_real(text),
    }
}

/// A built function with its identifier and the class its generator guarantees.
pub struct Built<S> {
    pub id: String,
    pub series: Series<S>,
    pub class: Option<Class>,
}

impl FunctionArgs {
    fn schwarz<S: CliScalar>(&self) -> Result<(SchwarzPoly<S>, String)> {
        if let Some(list) = &self.schwarz {
            let coeffs = list
                .iter()
                .map(|t| parse_complex::<S>(t))
                .collect::<Result<Vec<_>>>()?;
            return Ok((SchwarzPoly::new(coeffs)?, format!("[{}]", list.join(","))));
        }
        if let Some(seed) = self.schwarz_seed {
            if self.schwarz_degree == 0 {
                bail!("--schwarz-degree must be at least 1");
            }
            let w = random_schwarz(self.schwarz_degree, seed);
            let coeffs = w
                .coeffs()
                .iter()
                .map(|&c| S::from_c64(c))
                .collect::<Result<Vec<_>>>()?;
            return Ok((
                SchwarzPoly::new(coeffs)?,
                format!("seed={seed},K={}", self.schwarz_degree),
            ));
        }
        bail!("this family needs --schwarz or --schwarz-seed")
    }

    pub fn build<S: CliScalar>(&self, order: usize) -> Result<Built<S>> {
        if let Some(list) = &self.inline {
            let mut coeffs = vec![S::zero(), S::one()];
            for t in list {
                coeffs.push(parse_complex::<S>(t)?);
            }
            // The inline polynomial is exact, so its tail is genuinely zero.
            coeffs.resize(order.max(1) + 1, S::zero());
            coeffs.truncate(order + 1);
            return Ok(Built {
                id: format!("inline[{}]", list.join(",")),
                series: Series::new(coeffs)?,
                class: None,
            });
        }
        let family = self
            .family
            .ok_or_else(|| anyhow!("give either --family or --inline"))?;
        let built = match family {
            FamilyName::Identity => Built {
                id: "identity".into(),
                series: Series::identity(order),
                class: Some(Class::Convex),
            },
            FamilyName::Koebe => {
                let series = if self.theta == 0.0 {
                    koebe::<S>(order)
                } else {
                    let rotated = koebe_rotated(self.theta, order);
                    Series::new(
                        rotated
                            .coeffs()
                            .iter()
                            .map(|&c| S::from_c64(c))
                            .collect::<Result<Vec<_>>>()
                            .context("rotated Koebe functions need float mode")?,
                    )?
                };
                Built {
                    id: format!("koebe(theta={})", self.theta),
                    series,
                    class: Some(Class::S),
                }
            }
            FamilyName::Halfplane => Built {
                id: "halfplane".into(),
                series: halfplane::<S>(order),
                class: Some(Class::Convex),
            },
            FamilyName::ConvexLambda => {
                let text = self
                    .lambda
                    .as_deref()
                    .ok_or_else(|| anyhow!("convex_lambda needs --lambda"))?;
                Built {
                    id: format!("convex_lambda({text})"),
                    series: convex_lambda(&S::parse_real(text)?, order)?,
                    class: Some(Class::Convex),
                }
            }
            FamilyName::ConvexSchwarz => {
                let (w, tag) = self.schwarz::<S>()?;
                Built {
                    id: format!("convex_schwarz({tag})"),
                    series: convex_from_schwarz(&w, order)?,
                    class: Some(Class::Convex),
                }
            }
            FamilyName::StarlikeSchwarz => {
                let (w, tag) = self.schwarz::<S>()?;
                Built {
                    id: format!("starlike_schwarz({tag})"),
                    series: starlike_from_schwarz(&w, order)?,
                    class: Some(Class::S),
                }
            }
        };
        Ok(built)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_complex_literals() {
        let z: CRat = parse_complex("1/2:-3").unwrap();
        assert_eq!(z, CRat::complex_ratio((1, 2), (-3, 1)));
        let w: C64 = parse_complex("sqrt(2/5)").unwrap();
        assert!((w.re - 0.4f64.sqrt()).abs() < 1e-16);
        assert!(parse_complex::<CRat>("sqrt(2)").is_err());
        assert!(parse_complex::<C64>("x").is_err());
        assert_eq!(z.exact_text().unwrap(), "1/2-3i");
        assert!(w.exact_text().is_none());
    }
}
