//! Sparse Laurent polynomials in `N` commuting variables with `LambdaPoly`
//! coefficients. `TLaurent` is the univariate case in t = q^{-s}.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::lambda::LambdaPoly;
use super::rat::{self, Rat};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Laurent<const N: usize> {
    terms: BTreeMap<[i32; N], LambdaPoly>,
}

pub type TLaurent = Laurent<1>;

impl<const N: usize> Default for Laurent<N> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<const N: usize> Laurent<N> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(LambdaPoly::one())
    }

    pub fn constant(c: impl Into<LambdaPoly>) -> Self {
        Self::monomial([0; N], c)
    }

    pub fn monomial(exp: [i32; N], c: impl Into<LambdaPoly>) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Self { terms }
    }

    /// The variable with index `i`.
    pub fn var(i: usize) -> Self {
        let mut e = [0; N];
        e[i] = 1;
        Self::monomial(e, LambdaPoly::one())
    }

    /// The constant polynomial λ.
    pub fn lambda() -> Self {
        Self::constant(LambdaPoly::lambda())
    }

    pub fn from_terms(it: impl IntoIterator<Item = ([i32; N], LambdaPoly)>) -> Self {
        let mut out = Self::zero();
        for (e, c) in it {
            out.add_term(e, &c);
        }
        out
    }

    pub fn add_term(&mut self, exp: [i32; N], c: &LambdaPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exp) {
            Some(old) => {
                let s = &*old + c;
                if s.is_zero() {
                    self.terms.remove(&exp);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(exp, c.clone());
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i32; N], &LambdaPoly)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: [i32; N]) -> LambdaPoly {
        self.terms.get(&exp).cloned().unwrap_or_default()
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, a)| (*e, a.scale(c))))
    }

    pub fn scale_poly(&self, c: &LambdaPoly) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, a)| (*e, a * c)))
    }

    /// Multiply by the monomial with exponent `shift`.
    pub fn shift(&self, shift: [i32; N]) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(e, a)| {
                    let mut f = *e;
                    for i in 0..N {
                        f[i] += shift[i];
                    }
                    (f, a.clone())
                })
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Componentwise minimum exponent over all terms.
    pub fn min_exponents(&self) -> Option<[i32; N]> {
        let mut it = self.terms.keys();
        let mut m = *it.next()?;
        for e in it {
            for i in 0..N {
                m[i] = m[i].min(e[i]);
            }
        }
        Some(m)
    }

    pub fn max_lambda_degree(&self) -> usize {
        self.terms.values().filter_map(|c| c.degree()).max().unwrap_or(0)
    }

    /// Substitute λ = λ0 in every coefficient.
    pub fn specialize_lambda(&self, lambda: &Rat) -> Self {
        Self::from_terms(
            self.terms.iter().map(|(e, a)| (*e, LambdaPoly::constant(a.eval(lambda)))),
        )
    }

    /// Substitute the polynomial `p(λ)` for λ in every coefficient.
    pub fn compose_lambda(&self, p: &LambdaPoly) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, a)| {
            let mut v = LambdaPoly::zero();
            for c in a.coeffs().iter().rev() {
                v = &(&v * p) + &LambdaPoly::constant(c.clone());
            }
            (*e, v)
        }))
    }

    pub fn eval(&self, point: &[Rat; N], lambda: &Rat) -> Result<Rat> {
        let mut acc = Rat::zero();
        for (e, a) in &self.terms {
            let mut m = a.eval(lambda);
            for i in 0..N {
                if e[i] < 0 && point[i].is_zero() {
                    return Err(Error::Pole);
                }
                m *= rat::pow(&point[i], e[i]);
            }
            acc += m;
        }
        Ok(acc)
    }

    /// Monomial substitution `x_i ↦ c_i · y^{e_i}` into `M` new variables.
    pub fn substitute<const M: usize>(&self, subs: &[(Rat, [i32; M]); N]) -> Laurent<M> {
        let mut out = Laurent::<M>::zero();
        for (e, a) in &self.terms {
            let mut c = Rat::one();
            let mut f = [0i32; M];
            for i in 0..N {
                c *= rat::pow(&subs[i].0, e[i]);
                for j in 0..M {
                    f[j] += subs[i].1[j] * e[i];
                }
            }
            out.add_term(f, &a.scale(&c));
        }
        out
    }

    /// Terms of total degree at most `k`.
    pub fn truncate_total(&self, k: i32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<i32>() <= k)
                .map(|(e, a)| (*e, a.clone()))
                .collect(),
        }
    }
}

impl TLaurent {
    /// `c · t^k`.
    pub fn t(k: i32, c: impl Into<LambdaPoly>) -> Self {
        Self::monomial([k], c)
    }

    /// Lowest and highest t-exponents.
    pub fn exponent_range(&self) -> Option<(i32, i32)> {
        let lo = self.terms.keys().next()?[0];
        let hi = self.terms.keys().next_back()?[0];
        Some((lo, hi))
    }

    pub fn coeff_t(&self, k: i32) -> LambdaPoly {
        self.coeff([k])
    }
}

impl<'a, const N: usize> Add<&'a Laurent<N>> for &'a Laurent<N> {
    type Output = Laurent<N>;
    fn add(self, rhs: &Laurent<N>) -> Laurent<N> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c);
        }
        out
    }
}

impl<'a, const N: usize> Sub<&'a Laurent<N>> for &'a Laurent<N> {
    type Output = Laurent<N>;
    fn sub(self, rhs: &Laurent<N>) -> Laurent<N> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, &-c);
        }
        out
    }
}

impl<'a, const N: usize> Mul<&'a Laurent<N>> for &'a Laurent<N> {
    type Output = Laurent<N>;
    fn mul(self, rhs: &Laurent<N>) -> Laurent<N> {
        let mut acc: BTreeMap<[i32; N], LambdaPoly> = BTreeMap::new();
        for (ea, a) in &self.terms {
            for (eb, b) in &rhs.terms {
                let mut e = *ea;
                for i in 0..N {
                    e[i] += eb[i];
                }
                let p = a * b;
                let slot = acc.entry(e).or_default();
                *slot = &*slot + &p;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Laurent { terms: acc }
    }
}

impl<const N: usize> Neg for &Laurent<N> {
    type Output = Laurent<N>;
    fn neg(self) -> Laurent<N> {
        Laurent { terms: self.terms.iter().map(|(e, a)| (*e, -a)).collect() }
    }
}

impl<const N: usize> Neg for Laurent<N> {
    type Output = Laurent<N>;
    fn neg(self) -> Laurent<N> {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<const N: usize> $tr<Laurent<N>> for Laurent<N> {
            type Output = Laurent<N>;
            fn $m(self, rhs: Laurent<N>) -> Laurent<N> {
                (&self).$m(&rhs)
            }
        }
        impl<'a, const N: usize> $tr<&'a Laurent<N>> for Laurent<N> {
            type Output = Laurent<N>;
            fn $m(self, rhs: &Laurent<N>) -> Laurent<N> {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

const VAR_NAMES: [&str; 3] = ["x", "y", "z"];

impl<const N: usize> fmt::Display for Laurent<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (i, k) in e.iter().enumerate() {
                let name = if N == 1 { "t" } else { VAR_NAMES.get(i).copied().unwrap_or("v") };
                match k {
                    0 => {}
                    1 => write!(f, "*{name}")?,
                    _ => write!(f, "*{name}^{k}")?,
                }
            }
        }
        Ok(())
    }
}
