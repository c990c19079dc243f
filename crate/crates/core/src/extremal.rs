//! One-parameter extremal search over function families.
//!
//! The search is a deterministic uniform-grid scan followed by rounds of
//! re-gridding on the bracketing subinterval around the incumbent. The
//! functionals involve moduli and so have kinks; no derivatives are used.

use std::f64::consts::PI;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{evaluate_functional, Functional};
use crate::error::{Error, Result};
use crate::families::{
    convex_from_schwarz, convex_lambda, koebe_rotated, random_schwarz, starlike_from_schwarz,
    SchwarzPoly,
};
use crate::scalar::C64;
use crate::series::Series;

/// A family with exactly one free real parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyTemplate {
    /// Rotated Koebe function, parameter `theta`.
    KoebeRotation,
    /// Integral family `f_lambda`, parameter `lambda`.
    ConvexLambda,
    /// Convex function driven by `r w`, parameter `r`.
    ConvexSchwarzScale { schwarz: Vec<[f64; 2]> },
    /// Starlike function driven by `r w`, parameter `r`.
    StarlikeSchwarzScale { schwarz: Vec<[f64; 2]> },
}

impl FamilyTemplate {
    pub fn natural_interval(&self) -> (f64, f64) {
        match self {
            FamilyTemplate::KoebeRotation => (0.0, 2.0 * PI),
            _ => (0.0, 1.0),
        }
    }

    pub fn instantiate(&self, param: f64, order: usize) -> Result<Series<C64>> {
        let scaled = |pairs: &[[f64; 2]]| {
            SchwarzPoly::new(
                pairs
                    .iter()
                    .map(|[re, im]| Complex::new(re * param, im * param))
                    .collect(),
            )
        };
        match self {
            FamilyTemplate::KoebeRotation => Ok(koebe_rotated(param, order)),
            FamilyTemplate::ConvexLambda => convex_lambda(&Complex::new(param, 0.0), order),
            FamilyTemplate::ConvexSchwarzScale { schwarz } => {
                convex_from_schwarz(&scaled(schwarz)?, order)
            }
            FamilyTemplate::StarlikeSchwarzScale { schwarz } => {
                starlike_from_schwarz(&scaled(schwarz)?, order)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Maximize,
    Minimize,
}

impl Direction {
    /// True when `a` is strictly better than `b`.
    fn better(self, a: f64, b: f64) -> bool {
        match self {
            Direction::Maximize => a > b,
            Direction::Minimize => a < b,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchSpec {
    pub family: FamilyTemplate,
    pub interval: (f64, f64),
    pub functional: Functional,
    pub direction: Direction,
    pub grid_points: usize,
    pub refine_iterations: usize,
    pub order: usize,
}

impl SearchSpec {
    pub fn new(family: FamilyTemplate, functional: Functional, direction: Direction) -> Self {
        let interval = family.natural_interval();
        Self {
            family,
            interval,
            functional,
            direction,
            grid_points: 64,
            refine_iterations: 6,
            order: 8,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.interval;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidSearch(format!("empty interval [{lo}, {hi}]")));
        }
        if self.grid_points < 8 {
            return Err(Error::InvalidSearch(format!(
                "grid_points = {} (need at least 8)",
                self.grid_points
            )));
        }
        if self.order < 4 {
            return Err(Error::InvalidSearch(format!(
                "order = {} (need at least 4)",
                self.order
            )));
        }
        Ok(())
    }

    fn evaluate(&self, param: f64) -> Result<f64> {
        let f = self.family.instantiate(param, self.order);
        f.and_then(|f| evaluate_functional(&f, self.functional))
            .map_err(|e| Error::Evaluation {
                param,
                source: Box::new(e),
            })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchRound {
    pub interval: (f64, f64),
    pub best_param: f64,
    pub best_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    /// Best parameter found (maximizer or minimizer, per the direction).
    pub argbest: f64,
    pub value: f64,
    pub trace: Vec<SearchRound>,
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// Grid scan plus `refine_iterations` rounds on the bracketing subinterval.
///
/// Each round keeps the incumbent, so the best value is monotone across the
/// trace. Ties go to the smaller parameter.
pub fn grid_refine_search(spec: &SearchSpec) -> Result<SearchResult> {
    spec.validate()?;
    let n = spec.grid_points;
    let (mut lo, mut hi) = spec.interval;
    let mut best: Option<(f64, f64)> = None;
    let mut trace = Vec::with_capacity(spec.refine_iterations + 1);
    for _round in 0..=spec.refine_iterations {
        let points = grid(lo, hi, n);
        let values = points
            .par_iter()
            .map(|&x| spec.evaluate(x))
            .collect::<Result<Vec<f64>>>()?;
        let mut round_best = best;
        let mut best_idx = None;
        for (i, (&x, &v)) in points.iter().zip(&values).enumerate() {
            let take = match round_best {
                None => true,
                Some((bx, bv)) => spec.direction.better(v, bv) || (v == bv && x < bx),
            };
            if take {
                round_best = Some((x, v));
                best_idx = Some(i);
            }
        }
        let (bx, bv) = round_best.expect("grid is nonempty");
        best = Some((bx, bv));
        trace.push(SearchRound {
            interval: (lo, hi),
            best_param: bx,
            best_value: bv,
        });
        // Bracket the incumbent by its grid neighbours (or the incumbent's own
        // half-step when it came from an earlier round).
        let step = (hi - lo) / (n - 1) as f64;
        let (new_lo, new_hi) = match best_idx {
            Some(i) => (points[i.saturating_sub(1)], points[(i + 1).min(n - 1)]),
            None => (bx - step, bx + step),
        };
        lo = new_lo.max(spec.interval.0);
        hi = new_hi.min(spec.interval.1);
        if hi <= lo {
            break;
        }
    }
    let (argbest, value) = best.expect("at least one round runs");
    Ok(SearchResult {
        argbest,
        value,
        trace,
    })
}

/// Best result over one-parameter sweeps along random Schwarz directions.
///
/// This is a heuristic for multi-parameter families: each restart draws a
/// Schwarz polynomial and sweeps its scale `r` in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RestartResult {
    pub seed: u64,
    pub schwarz: Vec<[f64; 2]>,
    pub result: SearchResult,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchwarzClass {
    Convex,
    Starlike,
}

pub fn schwarz_restart_search(
    class: SchwarzClass,
    functional: Functional,
    direction: Direction,
    restarts: usize,
    seed: u64,
) -> Result<RestartResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<(u64, usize)> = (0..restarts.max(1))
        .map(|_| (rng.gen(), rng.gen_range(1..=6)))
        .collect();
    let results = seeds
        .par_iter()
        .map(|&(s, degree)| {
            let schwarz = random_schwarz(degree, s).to_pairs();
            let family = match class {
                SchwarzClass::Convex => FamilyTemplate::ConvexSchwarzScale {
                    schwarz: schwarz.clone(),
                },
                SchwarzClass::Starlike => FamilyTemplate::StarlikeSchwarzScale {
                    schwarz: schwarz.clone(),
                },
            };
            let mut spec = SearchSpec::new(family, functional, direction);
            spec.grid_points = 16;
            spec.refine_iterations = 3;
            grid_refine_search(&spec).map(|result| RestartResult {
                seed: s,
                schwarz,
                result,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best = results[0].clone();
    for r in results.into_iter().skip(1) {
        if direction.better(r.result.value, best.result.value) {
            best = r;
        }
    }
    Ok(best)
}
