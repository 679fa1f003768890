//! Ratios of Laurent polynomials, compared by cross-multiplication, and their
//! truncated power-series expansions.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::lambda::LambdaPoly;
use super::laurent::{Laurent, TLaurent};
use super::rat::Rat;
use crate::error::{Error, Result};

/// `num / (f₁·f₂·…)`, never gcd-reduced. The denominator is kept as a list of
/// factors so sums use the factor-wise least common multiple and comparisons
/// cancel shared factors before cross-multiplying.
#[derive(Clone, Debug)]
pub struct RatFunc<const N: usize> {
    num: Laurent<N>,
    den: Vec<Laurent<N>>,
}

pub type TRatFunc = RatFunc<1>;

/// Removes from `a` and `b` the factors they share; returns the leftovers and
/// the shared part.
fn split_common<const N: usize>(
    a: &[Laurent<N>],
    b: &[Laurent<N>],
) -> (Vec<Laurent<N>>, Vec<Laurent<N>>, Vec<Laurent<N>>) {
    let mut rest_b: Vec<Option<&Laurent<N>>> = b.iter().map(Some).collect();
    let mut rest_a = Vec::new();
    let mut common = Vec::new();
    for f in a {
        match rest_b.iter_mut().find(|g| g.is_some_and(|g| g == f)) {
            Some(slot) => {
                *slot = None;
                common.push(f.clone());
            }
            None => rest_a.push(f.clone()),
        }
    }
    let rest_b = rest_b.into_iter().flatten().cloned().collect();
    (rest_a, rest_b, common)
}

fn product<const N: usize>(fs: &[Laurent<N>]) -> Laurent<N> {
    match fs.split_first() {
        None => Laurent::one(),
        Some((f, rest)) => rest.iter().fold(f.clone(), |acc, g| &acc * g),
    }
}

impl<const N: usize> RatFunc<N> {
    pub fn new(num: Laurent<N>, den: Laurent<N>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self { num, den: vec![den] })
    }

    pub fn from_poly(num: Laurent<N>) -> Self {
        Self { num, den: Vec::new() }
    }

    pub fn constant(c: impl Into<LambdaPoly>) -> Self {
        Self::from_poly(Laurent::constant(c))
    }

    /// `1 / den`.
    pub fn inverse_of(den: Laurent<N>) -> Result<Self> {
        Self::new(Laurent::one(), den)
    }

    pub fn num(&self) -> &Laurent<N> {
        &self.num
    }

    /// The expanded denominator.
    pub fn den(&self) -> Laurent<N> {
        product(&self.den)
    }

    pub fn den_factors(&self) -> &[Laurent<N>] {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn recip(&self) -> Result<Self> {
        Self::new(self.den(), self.num.clone())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut den = Vec::new();
        for _ in 0..e {
            den.extend(self.den.iter().cloned());
        }
        Self { num: self.num.pow(e), den }
    }

    pub fn eval(&self, point: &[Rat; N], lambda: &Rat) -> Result<Rat> {
        let mut d = Rat::one();
        for f in &self.den {
            d *= f.eval(point, lambda)?;
        }
        if d.is_zero() {
            return Err(Error::Pole);
        }
        Ok(self.num.eval(point, lambda)? / d)
    }

    fn map(&self, f: impl Fn(&Laurent<N>) -> Laurent<N>) -> Self {
        Self { num: f(&self.num), den: self.den.iter().map(f).collect() }
    }

    pub fn specialize_lambda(&self, lambda: &Rat) -> Self {
        self.map(|p| p.specialize_lambda(lambda))
    }

    pub fn compose_lambda(&self, p: &LambdaPoly) -> Self {
        self.map(|f| f.compose_lambda(p))
    }

    pub fn substitute<const M: usize>(&self, subs: &[(Rat, [i32; M]); N]) -> Result<RatFunc<M>> {
        let den: Vec<Laurent<M>> = self.den.iter().map(|f| f.substitute(subs)).collect();
        if den.iter().any(|f| f.is_zero()) {
            return Err(Error::ZeroDenominator);
        }
        Ok(RatFunc { num: self.num.substitute(subs), den })
    }

    /// Cross-multiplied difference after cancelling shared denominator
    /// factors; zero iff the functions are equal.
    pub fn cross_difference(&self, other: &Self) -> Laurent<N> {
        let (ra, rb, _) = split_common(&self.den, &other.den);
        &(&self.num * &product(&rb)) - &(&other.num * &product(&ra))
    }

    /// Power-series coefficients of total degree ≤ `k`. Numerator and
    /// denominator must be polynomials and the denominator's constant term a
    /// nonzero rational.
    pub fn expand_total(&self, k: i32) -> Result<BTreeMap<[i32; N], LambdaPoly>> {
        let den = self.den();
        for (e, _) in self.num.terms().chain(den.terms()) {
            if e.iter().any(|&x| x < 0) {
                return Err(Error::NegativeExponent(e.to_vec()));
            }
        }
        let d0 = den.coeff([0; N]);
        let d0 = match d0.as_constant() {
            Some(c) if !c.is_zero() => c,
            _ => return Err(Error::NonInvertibleLeading(d0.to_string())),
        };
        let inv = d0.recip();
        let den_rest: Vec<([i32; N], LambdaPoly)> = den
            .truncate_total(k)
            .terms()
            .filter(|(e, _)| **e != [0; N])
            .map(|(e, c)| (*e, c.clone()))
            .collect();
        let mut out: BTreeMap<[i32; N], LambdaPoly> = BTreeMap::new();
        for deg in 0..=k {
            for e in exponents_of_degree::<N>(deg) {
                let mut acc = self.num.coeff(e);
                for (de, dc) in &den_rest {
                    let mut rest = e;
                    let mut ok = true;
                    for i in 0..N {
                        rest[i] -= de[i];
                        ok &= rest[i] >= 0;
                    }
                    if !ok {
                        continue;
                    }
                    if let Some(c) = out.get(&rest) {
                        acc = &acc - &(dc * c);
                    }
                }
                let c = acc.scale(&inv);
                if !c.is_zero() {
                    out.insert(e, c);
                }
            }
        }
        Ok(out)
    }
}

/// All exponent vectors in `N` variables with nonnegative entries summing to `deg`.
pub fn exponents_of_degree<const N: usize>(deg: i32) -> Vec<[i32; N]> {
    fn rec<const N: usize>(i: usize, left: i32, cur: &mut [i32; N], out: &mut Vec<[i32; N]>) {
        if i + 1 == N {
            cur[i] = left;
            out.push(*cur);
            return;
        }
        for a in 0..=left {
            cur[i] = a;
            rec(i + 1, left - a, cur, out);
        }
    }
    let mut out = Vec::new();
    if N == 0 {
        return out;
    }
    rec(0, deg, &mut [0; N], &mut out);
    out
}

/// First `order + 1` Laurent coefficients starting at `lowest`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    pub lowest: i32,
    pub coeffs: Vec<LambdaPoly>,
}

impl TruncatedSeries {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `t^k`, zero below `lowest`; panics beyond the order.
    pub fn coeff(&self, k: i32) -> LambdaPoly {
        if k < self.lowest {
            return LambdaPoly::zero();
        }
        self.coeffs[(k - self.lowest) as usize].clone()
    }

    pub fn to_laurent(&self) -> TLaurent {
        TLaurent::from_terms(
            self.coeffs.iter().enumerate().map(|(i, c)| ([self.lowest + i as i32], c.clone())),
        )
    }
}

impl TRatFunc {
    /// `c · t^k`.
    pub fn t(k: i32, c: impl Into<LambdaPoly>) -> Self {
        Self::from_poly(TLaurent::t(k, c))
    }

    pub fn eval_t(&self, t0: &Rat, lambda: &Rat) -> Result<Rat> {
        self.eval(&[t0.clone()], lambda)
    }

    /// Long division producing `order + 1` coefficients from the lowest
    /// possible exponent.
    pub fn series_expand(&self, order: usize) -> Result<TruncatedSeries> {
        let den = self.den();
        let (dlo, _) = den.exponent_range().ok_or(Error::ZeroDenominator)?;
        let d0 = den.coeff_t(dlo);
        let d0 = match d0.as_constant() {
            Some(c) if !c.is_zero() => c,
            _ => return Err(Error::NonInvertibleLeading(d0.to_string())),
        };
        let inv = d0.recip();
        let nlo = match self.num.exponent_range() {
            Some((lo, _)) => lo,
            None => {
                return Ok(TruncatedSeries { lowest: 0, coeffs: vec![LambdaPoly::zero(); order + 1] })
            }
        };
        let lowest = nlo - dlo;
        let mut coeffs: Vec<LambdaPoly> = Vec::with_capacity(order + 1);
        for i in 0..=order as i32 {
            let mut acc = self.num.coeff_t(nlo + i);
            for j in 1..=i {
                let dj = den.coeff_t(dlo + j);
                if !dj.is_zero() {
                    acc = &acc - &(&dj * &coeffs[(i - j) as usize]);
                }
            }
            coeffs.push(acc.scale(&inv));
        }
        Ok(TruncatedSeries { lowest, coeffs })
    }
}

impl<const N: usize> PartialEq for RatFunc<N> {
    fn eq(&self, other: &Self) -> bool {
        self.cross_difference(other).is_zero()
    }
}

impl<const N: usize> Eq for RatFunc<N> {}

impl<const N: usize> From<Laurent<N>> for RatFunc<N> {
    fn from(p: Laurent<N>) -> Self {
        Self::from_poly(p)
    }
}

impl<'a, const N: usize> Add<&'a RatFunc<N>> for &'a RatFunc<N> {
    type Output = RatFunc<N>;
    fn add(self, rhs: &RatFunc<N>) -> RatFunc<N> {
        let (ra, rb, mut common) = split_common(&self.den, &rhs.den);
        let num = &(&self.num * &product(&rb)) + &(&rhs.num * &product(&ra));
        common.extend(ra);
        common.extend(rb);
        RatFunc { num, den: common }
    }
}

impl<'a, const N: usize> Sub<&'a RatFunc<N>> for &'a RatFunc<N> {
    type Output = RatFunc<N>;
    fn sub(self, rhs: &RatFunc<N>) -> RatFunc<N> {
        self + &(-rhs)
    }
}

impl<'a, const N: usize> Mul<&'a RatFunc<N>> for &'a RatFunc<N> {
    type Output = RatFunc<N>;
    fn mul(self, rhs: &RatFunc<N>) -> RatFunc<N> {
        let mut den = self.den.clone();
        den.extend(rhs.den.iter().cloned());
        RatFunc { num: &self.num * &rhs.num, den }
    }
}

impl<'a, const N: usize> Div<&'a RatFunc<N>> for &'a RatFunc<N> {
    type Output = RatFunc<N>;
    /// Panics when dividing by the zero function.
    fn div(self, rhs: &RatFunc<N>) -> RatFunc<N> {
        assert!(!rhs.num.is_zero(), "division by the zero rational function");
        let (ra, rb, _) = split_common(&self.den, &rhs.den);
        let mut den = ra;
        den.push(rhs.num.clone());
        RatFunc { num: &self.num * &product(&rb), den }
    }
}

impl<const N: usize> Neg for &RatFunc<N> {
    type Output = RatFunc<N>;
    fn neg(self) -> RatFunc<N> {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
}

impl<const N: usize> Neg for RatFunc<N> {
    type Output = RatFunc<N>;
    fn neg(self) -> RatFunc<N> {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<const N: usize> $tr<RatFunc<N>> for RatFunc<N> {
            type Output = RatFunc<N>;
            fn $m(self, rhs: RatFunc<N>) -> RatFunc<N> {
                (&self).$m(&rhs)
            }
        }
        impl<'a, const N: usize> $tr<&'a RatFunc<N>> for RatFunc<N> {
            type Output = RatFunc<N>;
            fn $m(self, rhs: &RatFunc<N>) -> RatFunc<N> {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl<const N: usize> fmt::Display for RatFunc<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] / [{}]", self.num, self.den())
    }
}
