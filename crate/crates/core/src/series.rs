//! Truncated power series in one and two variables.
//!
//! A [`Series`] of order `N` stores `c_0..=c_N` and represents
//! `c_0 + c_1 z + ... + c_N z^N + O(z^{N+1})`. Binary operations truncate to
//! the smaller order; every operation states the order of its result.
//!
//! A [`BiSeries`] of order `M` stores the full square grid `0 <= p, q <= M`
//! and represents a series in `t, z` modulo `(t^{M+1}, z^{M+1})`.

use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarMode, C64};

#[derive(Clone, Debug, PartialEq)]
pub struct Series<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Series<S> {
    /// Builds a series of order `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<S>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyCoefficients);
        }
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { coeffs })
    }

    /// Like [`Series::new`], additionally checking the declared order.
    pub fn with_order(coeffs: Vec<S>, order: usize) -> Result<Self> {
        if !coeffs.is_empty() && coeffs.len() != order + 1 {
            return Err(Error::InsufficientOrder {
                needed: order,
                got: coeffs.len() - 1,
            });
        }
        Self::new(coeffs)
    }

    pub(crate) fn from_vec_unchecked(coeffs: Vec<S>) -> Self {
        debug_assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::from_vec_unchecked(vec![S::zero(); order + 1])
    }

    pub fn one(order: usize) -> Self {
        Self::monomial(S::one(), 0, order)
    }

    /// The identity map `z`, truncated at `order`.
    pub fn identity(order: usize) -> Self {
        Self::monomial(S::one(), 1, order)
    }

    pub fn monomial(c: S, power: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if power <= order {
            s.coeffs[power] = c;
        }
        s
    }

    /// Builds `1 + c_1 z + ...` style series from a closure over indices.
    pub fn from_fn(order: usize, f: impl FnMut(usize) -> S) -> Self {
        Self::from_vec_unchecked((0..=order).map(f).collect())
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn mode(&self) -> ScalarMode {
        S::MODE
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    /// Coefficient of `z^n`. Panics if `n` exceeds the order.
    pub fn coeff(&self, n: usize) -> &S {
        &self.coeffs[n]
    }

    pub fn get(&self, n: usize) -> Option<&S> {
        self.coeffs.get(n)
    }

    /// Drops terms above `order`; never extends.
    pub fn truncate(&self, order: usize) -> Self {
        let n = order.min(self.order());
        Self::from_vec_unchecked(self.coeffs[..=n].to_vec())
    }

    /// `c_0 = 0` and `c_1 = 1`, with order at least 1.
    pub fn is_normalized(&self) -> bool {
        self.order() >= 1 && self.coeffs[0].is_zero() && self.coeffs[1].is_one()
    }

    pub(crate) fn require_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::NotNormalized)
        }
    }

    pub fn scale(&self, k: &S) -> Self {
        Self::from_vec_unchecked(self.coeffs.iter().map(|c| c.clone() * k.clone()).collect())
    }

    /// Formal quotient `self / rhs`, truncated to the smaller order.
    pub fn try_div(&self, rhs: &Self) -> Result<Self> {
        let b0 = &rhs.coeffs[0];
        if b0.is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let n = self.order().min(rhs.order());
        let mut q: Vec<S> = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let mut acc = self.coeffs[i].clone();
            for k in 1..=i {
                acc = acc - rhs.coeffs[k].clone() * q[i - k].clone();
            }
            q.push(acc / b0.clone());
        }
        Ok(Self::from_vec_unchecked(q))
    }

    /// Termwise derivative; order drops by one (order 0 stays 0 and yields zero).
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        Self::from_fn(self.order() - 1, |n| {
            self.coeffs[n + 1].clone() * S::from_i64(n as i64 + 1)
        })
    }

    /// Termwise antiderivative vanishing at 0; order grows by one.
    pub fn integral(&self) -> Self {
        Self::from_fn(self.order() + 1, |n| {
            if n == 0 {
                S::zero()
            } else {
                self.coeffs[n - 1].clone() / S::from_i64(n as i64)
            }
        })
    }

    /// `self / z` for a series with zero constant term; order drops by one.
    pub fn div_z(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() || self.order() == 0 {
            return Err(Error::ConstantTerm {
                op: "division by z",
                expected: 0,
            });
        }
        Ok(Self::from_vec_unchecked(self.coeffs[1..].to_vec()))
    }

    /// `z * self`; order grows by one.
    pub fn mul_z(&self) -> Self {
        let mut v = Vec::with_capacity(self.coeffs.len() + 1);
        v.push(S::zero());
        v.extend(self.coeffs.iter().cloned());
        Self::from_vec_unchecked(v)
    }

    /// `self(z^k)`; order becomes `k * order`.
    pub fn substitute_power(&self, k: usize) -> Self {
        assert!(k >= 1);
        let mut out = Self::zero(self.order() * k);
        for (n, c) in self.coeffs.iter().enumerate() {
            out.coeffs[n * k] = c.clone();
        }
        out
    }

    /// `self(g(z))` by Horner accumulation, truncated to the smaller order.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        if !g.coeffs[0].is_zero() {
            return Err(Error::ConstantTerm {
                op: "compose",
                expected: 0,
            });
        }
        let n = self.order().min(g.order());
        let g = g.truncate(n);
        let mut acc = Self::monomial(self.coeffs[n].clone(), 0, n);
        for k in (0..n).rev() {
            acc = &acc * &g;
            acc.coeffs[0] = acc.coeffs[0].clone() + self.coeffs[k].clone();
        }
        Ok(acc)
    }

    fn require_constant(&self, expected: u8, op: &'static str) -> Result<()> {
        let ok = match expected {
            0 => self.coeffs[0].is_zero(),
            _ => self.coeffs[0].is_one(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::ConstantTerm { op, expected })
        }
    }

    /// `log f` for `f(0) = 1`, via `(log f)' = f'/f`. Same order as `self`.
    pub fn log1(&self) -> Result<Self> {
        self.require_constant(1, "log")?;
        if self.order() == 0 {
            return Ok(Self::zero(0));
        }
        let dlog = self
            .derivative()
            .try_div(&self.truncate(self.order() - 1))?;
        Ok(dlog.integral())
    }

    /// `exp f` for `f(0) = 0`, via `g' = f' g`. Same order as `self`.
    pub fn exp0(&self) -> Result<Self> {
        self.require_constant(0, "exp")?;
        let n = self.order();
        let mut g: Vec<S> = Vec::with_capacity(n + 1);
        g.push(S::one());
        for i in 1..=n {
            let mut acc = S::zero();
            for k in 1..=i {
                acc = acc + S::from_i64(k as i64) * self.coeffs[k].clone() * g[i - k].clone();
            }
            g.push(acc / S::from_i64(i as i64));
        }
        Ok(Self::from_vec_unchecked(g))
    }

    /// `f^alpha` for `f(0) = 1` (principal branch), via `f g' = alpha f' g`.
    pub fn pow(&self, alpha: &S) -> Result<Self> {
        self.require_constant(1, "pow")?;
        let n = self.order();
        let mut g: Vec<S> = Vec::with_capacity(n + 1);
        g.push(S::one());
        for i in 1..=n {
            let mut acc = S::zero();
            for k in 1..=i {
                let w = alpha.clone() * S::from_i64(k as i64) - S::from_i64((i - k) as i64);
                acc = acc + w * self.coeffs[k].clone() * g[i - k].clone();
            }
            g.push(acc / S::from_i64(i as i64));
        }
        Ok(Self::from_vec_unchecked(g))
    }

    /// Principal square root for `f(0) = 1`.
    pub fn sqrt1(&self) -> Result<Self> {
        self.require_constant(1, "sqrt")?;
        self.pow(&S::ratio(1, 2))
    }

    /// Evaluates the truncated polynomial at a complex point.
    pub fn eval_c64(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, c| acc * z + c.to_c64())
    }

    /// Largest coefficientwise distance to `other` over the common order.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a.clone() - b.clone()).abs_f64())
            .fold(0.0, f64::max)
    }
}

fn zip_with<S: Scalar>(a: &Series<S>, b: &Series<S>, f: impl Fn(&S, &S) -> S) -> Series<S> {
    Series::from_vec_unchecked(
        a.coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(x, y)| f(x, y))
            .collect(),
    )
}

impl<S: Scalar> Add for &Series<S> {
    type Output = Series<S>;
    fn add(self, rhs: Self) -> Series<S> {
        zip_with(self, rhs, |x, y| x.clone() + y.clone())
    }
}

impl<S: Scalar> Sub for &Series<S> {
    type Output = Series<S>;
    fn sub(self, rhs: Self) -> Series<S> {
        zip_with(self, rhs, |x, y| x.clone() - y.clone())
    }
}

impl<S: Scalar> Neg for &Series<S> {
    type Output = Series<S>;
    fn neg(self) -> Series<S> {
        Series::from_vec_unchecked(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl<S: Scalar> Mul for &Series<S> {
    type Output = Series<S>;
    /// Cauchy product truncated to the smaller order.
    fn mul(self, rhs: Self) -> Series<S> {
        let n = self.order().min(rhs.order());
        Series::from_fn(n, |i| {
            let mut acc = S::zero();
            for k in 0..=i {
                if self.coeffs[k].is_zero() {
                    continue;
                }
                acc = acc + self.coeffs[k].clone() * rhs.coeffs[i - k].clone();
            }
            acc
        })
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<S: Scalar> $tr for Series<S> {
            type Output = Series<S>;
            fn $m(self, rhs: Self) -> Series<S> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

impl<S: Scalar> Serialize for Series<S> {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
        let mut seq = serializer.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            seq.serialize_element(&pair(c.to_c64()))?;
        }
        seq.end()
    }
}

/// Truncated series in two variables `t` (index `p`) and `z` (index `q`).
#[derive(Clone, Debug, PartialEq)]
pub struct BiSeries<S> {
    order: usize,
    data: Vec<S>,
}

impl<S: Scalar> BiSeries<S> {
    pub fn zero(order: usize) -> Self {
        Self {
            order,
            data: vec![S::zero(); (order + 1) * (order + 1)],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut b = Self::zero(order);
        b.data[0] = S::one();
        b
    }

    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity((order + 1) * (order + 1));
        for p in 0..=order {
            for q in 0..=order {
                data.push(f(p, q));
            }
        }
        Self { order, data }
    }

    /// Builds from an explicit map; every grid entry must be present.
    pub fn from_entries(order: usize, entries: &HashMap<(usize, usize), S>) -> Result<Self> {
        let mut data = Vec::with_capacity((order + 1) * (order + 1));
        for p in 0..=order {
            for q in 0..=order {
                let c = entries.get(&(p, q)).ok_or(Error::MissingEntry(p, q))?;
                data.push(c.clone());
            }
        }
        Ok(Self { order, data })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn idx(&self, p: usize, q: usize) -> usize {
        p * (self.order + 1) + q
    }

    /// Coefficient of `t^p z^q`. Panics outside the grid.
    pub fn coeff(&self, p: usize, q: usize) -> &S {
        assert!(
            p <= self.order && q <= self.order,
            "({p}, {q}) outside grid"
        );
        &self.data[self.idx(p, q)]
    }

    pub fn get(&self, p: usize, q: usize) -> Option<&S> {
        (p <= self.order && q <= self.order).then(|| &self.data[self.idx(p, q)])
    }

    pub fn scale(&self, k: &S) -> Self {
        Self {
            order: self.order,
            data: self.data.iter().map(|c| c.clone() * k.clone()).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let m = self.order.min(rhs.order);
        Self::from_fn(m, |p, q| {
            let mut acc = S::zero();
            for i in 0..=p {
                for j in 0..=q {
                    let a = self.coeff(i, j);
                    if a.is_zero() {
                        continue;
                    }
                    acc = acc + a.clone() * rhs.coeff(p - i, q - j).clone();
                }
            }
            acc
        })
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let m = self.order.min(rhs.order);
        Self::from_fn(m, |p, q| self.coeff(p, q).clone() + rhs.coeff(p, q).clone())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let m = self.order.min(rhs.order);
        Self::from_fn(m, |p, q| self.coeff(p, q).clone() - rhs.coeff(p, q).clone())
    }

    /// Bivariate logarithm of a series `D` with constant term 1.
    ///
    /// Solved from `D dL/dt = dD/dt` for `p >= 1` and from the univariate
    /// relation in `z` on the row `p = 0`, which avoids the cancellation of
    /// the alternating power sum.
    pub fn log1(&self) -> Result<Self> {
        if !self.data[0].is_one() {
            return Err(Error::ConstantTerm {
                op: "bivariate log",
                expected: 1,
            });
        }
        let m = self.order;
        let mut out = Self::zero(m);
        for q in 1..=m {
            let mut acc = S::from_i64(q as i64) * self.coeff(0, q).clone();
            for j in 1..q {
                acc = acc
                    - self.coeff(0, j).clone()
                        * S::from_i64((q - j) as i64)
                        * out.coeff(0, q - j).clone();
            }
            let k = out.idx(0, q);
            out.data[k] = acc / S::from_i64(q as i64);
        }
        for p in 1..=m {
            for q in 0..=m {
                let mut acc = S::from_i64(p as i64) * self.coeff(p, q).clone();
                for i in 0..p {
                    for j in 0..=q {
                        if i == 0 && j == 0 {
                            continue;
                        }
                        let d = self.coeff(i, j);
                        if d.is_zero() {
                            continue;
                        }
                        acc = acc
                            - d.clone()
                                * S::from_i64((p - i) as i64)
                                * out.coeff(p - i, q - j).clone();
                    }
                }
                let k = out.idx(p, q);
                out.data[k] = acc / S::from_i64(p as i64);
            }
        }
        Ok(out)
    }

    /// Bivariate exponential of a series `H` with zero constant term, from
    /// `dE/dt = E dH/dt` and the univariate relation on the row `p = 0`.
    pub fn exp0(&self) -> Result<Self> {
        if !self.data[0].is_zero() {
            return Err(Error::ConstantTerm {
                op: "bivariate exp",
                expected: 0,
            });
        }
        let m = self.order;
        let mut out = Self::one(m);
        for q in 1..=m {
            let mut acc = S::zero();
            for j in 1..=q {
                acc = acc
                    + S::from_i64(j as i64)
                        * self.coeff(0, j).clone()
                        * out.coeff(0, q - j).clone();
            }
            let k = out.idx(0, q);
            out.data[k] = acc / S::from_i64(q as i64);
        }
        for p in 1..=m {
            for q in 0..=m {
                let mut acc = S::zero();
                for i in 1..=p {
                    for j in 0..=q {
                        let h = self.coeff(i, j);
                        if h.is_zero() {
                            continue;
                        }
                        acc = acc
                            + S::from_i64(i as i64) * h.clone() * out.coeff(p - i, q - j).clone();
                    }
                }
                let k = out.idx(p, q);
                out.data[k] = acc / S::from_i64(p as i64);
            }
        }
        Ok(out)
    }

    /// `max |c(p,q) - c(q,p)|` over the grid.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for p in 0..=self.order {
            for q in (p + 1)..=self.order {
                let d = (self.coeff(p, q).clone() - self.coeff(q, p).clone()).abs_f64();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Largest entrywise distance to `other` over the common grid.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let m = self.order.min(other.order);
        let mut worst = 0.0f64;
        for p in 0..=m {
            for q in 0..=m {
                let d = (self.coeff(p, q).clone() - other.coeff(p, q).clone()).abs_f64();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// The `z^0` column as a series in `t`.
    pub fn row_q0(&self) -> Series<S> {
        Series::from_fn(self.order, |p| self.coeff(p, 0).clone())
    }
}

/// `(f(t) - f(z)) / (t - z)` for normalized `f` of order `N`.
///
/// The coefficient of `t^p z^q` is `a_{p+q+1}`, so the square grid is exact
/// only up to `M = (N - 1) / 2`; that is the order of the result.
pub fn difference_quotient<S: Scalar>(f: &Series<S>) -> Result<BiSeries<S>> {
    f.require_normalized()?;
    let m = (f.order() - 1) / 2;
    Ok(BiSeries::from_fn(m, |p, q| f.coeff(p + q + 1).clone()))
}

impl<S: Scalar> Serialize for BiSeries<S> {
    /// Rows `p = 0..=M`, each a list of `[re, im]` pairs over `q`.
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
        let mut seq = serializer.serialize_seq(Some(self.order + 1))?;
        for p in 0..=self.order {
            let row: Vec<[f64; 2]> = (0..=self.order)
                .map(|q| pair(self.coeff(p, q).to_c64()))
                .collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}
