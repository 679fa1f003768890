//! Square classes and quadratic étale algebras over a local field of odd residue
//! characteristic, and the local L-factors that the closed forms are built from.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::algebra::rat::{self, qpow, Rat};
use crate::algebra::{LambdaPoly, TLaurent, TRatFunc};
use crate::error::{Error, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// `Some(p)` when `q` is a power of the prime `p`.
pub fn prime_power_base(q: u64) -> Option<u64> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while q % p != 0 {
        p += 1;
    }
    let mut r = q;
    while r % p == 0 {
        r /= p;
    }
    (r == 1).then_some(p)
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u128;
    let m128 = m as u128;
    let mut base = (b % m) as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m128;
        }
        base = base * base % m128;
        e >>= 1;
    }
    b = acc as u64;
    b
}

/// Legendre symbol of a unit `u` modulo an odd prime `p`, by Euler's criterion.
pub fn legendre(u: i64, p: u64) -> Result<i8> {
    if p % 2 == 0 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let r = u.rem_euclid(p as i64) as u64;
    if r == 0 {
        return Err(Error::NotAUnit { u, p });
    }
    Ok(if pow_mod(r, (p - 1) / 2, p) == 1 { 1 } else { -1 })
}

fn legendre_big(u: &BigInt, p: u64) -> i8 {
    let r = u.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits");
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EtaleKind {
    Split,
    Inert,
    Ramified,
}

impl EtaleKind {
    pub const ALL: [EtaleKind; 3] = [EtaleKind::Split, EtaleKind::Inert, EtaleKind::Ramified];

    pub fn class(self) -> EtaleClass {
        EtaleClass::new(self)
    }
}

impl fmt::Display for EtaleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EtaleKind::Split => "split",
            EtaleKind::Inert => "inert",
            EtaleKind::Ramified => "ramified",
        })
    }
}

impl FromStr for EtaleKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "split" => Ok(EtaleKind::Split),
            "inert" => Ok(EtaleKind::Inert),
            "ramified" => Ok(EtaleKind::Ramified),
            _ => Err(Error::Parse(s.to_string())),
        }
    }
}

/// A quadratic étale algebra up to isomorphism, with the data the formulas read.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct EtaleClass {
    pub kind: EtaleKind,
    /// η(ϖ); zero for the ramified class, where it is never read.
    pub eta_at_uniformizer: i8,
    pub conductor_norm_exponent: u8,
    pub deltas: [u8; 3],
}

impl EtaleClass {
    pub fn new(kind: EtaleKind) -> Self {
        let (eta, cond, deltas) = match kind {
            EtaleKind::Split => (1, 0, [1, 0, 0]),
            EtaleKind::Inert => (-1, 0, [0, 1, 0]),
            EtaleKind::Ramified => (0, 1, [0, 0, 1]),
        };
        Self { kind, eta_at_uniformizer: eta, conductor_norm_exponent: cond, deltas }
    }

    pub fn is_ramified(&self) -> bool {
        self.kind == EtaleKind::Ramified
    }

    /// Valuation of the normalized discriminant d.
    pub fn d_valuation(&self) -> u32 {
        self.conductor_norm_exponent as u32
    }
}

/// Residue field data; `q` is an odd prime power.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LocalPrime {
    pub p: u64,
    pub q: u64,
}

impl LocalPrime {
    pub fn new(q: u64) -> Result<Self> {
        match prime_power_base(q) {
            Some(p) if p != 2 => Ok(Self { p, q }),
            _ => Err(Error::BadResidueCardinality(q)),
        }
    }
}

/// Classifies `d` with `val_p(d) ∈ {0, 1}`.
pub fn classify_quadratic(d: &Rat, p: u64) -> Result<EtaleClass> {
    if p % 2 == 0 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    if d.is_zero() {
        return Err(Error::ZeroDiscriminant);
    }
    let v = rat::valuation(d, p);
    match v {
        0 => {
            // a/b and ab share a square class.
            let u = d.numer() * d.denom();
            Ok(if legendre_big(&u, p) == 1 { EtaleKind::Split } else { EtaleKind::Inert }.class())
        }
        1 => Ok(EtaleKind::Ramified.class()),
        _ => Err(Error::ValuationOutOfRange(v)),
    }
}

/// Removes even powers of `p` so the valuation lands in {0, 1}.
pub fn normalize_square_class(d: &Rat, p: u64) -> Result<Rat> {
    if d.is_zero() {
        return Err(Error::ZeroDiscriminant);
    }
    let v = rat::valuation(d, p);
    let k = v.div_euclid(2) as i32;
    Ok(d * qpow(p, -2 * k))
}

pub fn classify_normalized(d: &Rat, p: u64) -> Result<EtaleClass> {
    classify_quadratic(&normalize_square_class(d, p)?, p)
}

/// The local L-factor shapes that occur; all are Laurent in t = q^{-s}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum LFactorKind {
    ZetaAt1,
    ZetaAt2,
    LEtaAt1,
    ZetaAt2sMinus1,
    AdAt2sMinus1,
    StdAt2sMinusHalf,
}

impl FromStr for LFactorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ZETA_AT_1" => Self::ZetaAt1,
            "ZETA_AT_2" => Self::ZetaAt2,
            "L_ETA_AT_1" => Self::LEtaAt1,
            "ZETA_AT_2S_MINUS_1" => Self::ZetaAt2sMinus1,
            "AD_AT_2S_MINUS_1" => Self::AdAt2sMinus1,
            "STD_AT_2S_MINUS_HALF" => Self::StdAt2sMinusHalf,
            other => return Err(Error::UnsupportedLFactor(other.to_string())),
        })
    }
}

fn c(r: Rat) -> LambdaPoly {
    LambdaPoly::constant(r)
}

/// Denominator polynomial of the adjoint factor at 2s−1:
/// 1 − (λ²/q − 1)q t² + (λ²/q − 1)q² t⁴ − q³t⁶.
pub fn adjoint_denominator(q: u64, lambda: &LambdaPoly) -> TLaurent {
    let a = &(lambda * lambda).scale(&qpow(q, -1)) - &LambdaPoly::one();
    let mut d = TLaurent::one();
    d.add_term([2], &-a.scale(&qpow(q, 1)));
    d.add_term([4], &a.scale(&qpow(q, 2)));
    d.add_term([6], &c(-qpow(q, 3)));
    d
}

/// The requested local factor as a rational function of t with unit constant
/// term in the denominator.
pub fn lfactor(kind: LFactorKind, q: u64, lambda: &LambdaPoly, class: &EtaleClass) -> TRatFunc {
    let one = Rat::one();
    let inv = |d: TLaurent| TRatFunc::inverse_of(d).expect("nonzero denominator");
    match kind {
        LFactorKind::ZetaAt1 => TRatFunc::constant(c((&one - qpow(q, -1)).recip())),
        LFactorKind::ZetaAt2 => TRatFunc::constant(c((&one - qpow(q, -2)).recip())),
        LFactorKind::LEtaAt1 => match class.kind {
            EtaleKind::Ramified => TRatFunc::constant(c(one)),
            _ => {
                let eta = rat::int(class.eta_at_uniformizer as i64);
                TRatFunc::constant(c((&one - eta * qpow(q, -1)).recip()))
            }
        },
        LFactorKind::ZetaAt2sMinus1 => inv(&TLaurent::one() - &TLaurent::t(2, c(qpow(q, 1)))),
        LFactorKind::AdAt2sMinus1 => inv(adjoint_denominator(q, lambda)),
        LFactorKind::StdAt2sMinusHalf => {
            let mut d = TLaurent::one();
            d.add_term([2], &-lambda);
            d.add_term([4], &c(qpow(q, 1)));
            inv(d)
        }
    }
}

/// Sign of a rational as ±1/0, handy for reports.
pub fn sign(r: &Rat) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat::{frac, int};

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre(4, 5).unwrap(), 1);
        assert_eq!(legendre(1, 7).unwrap(), 1);
        assert_eq!(legendre(2, 5).unwrap(), -1);
        assert!(legendre(5, 5).is_err());
        assert!(legendre(3, 4).is_err());
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_quadratic(&int(1), 7).unwrap().kind, EtaleKind::Split);
        assert_eq!(classify_quadratic(&int(2), 5).unwrap().kind, EtaleKind::Inert);
        assert_eq!(classify_quadratic(&int(5), 5).unwrap().kind, EtaleKind::Ramified);
        assert_eq!(classify_quadratic(&frac(2, 3), 5).unwrap().kind, EtaleKind::Split);
        assert!(matches!(classify_quadratic(&int(25), 5), Err(Error::ValuationOutOfRange(2))));
        assert_eq!(classify_normalized(&int(50), 5).unwrap().kind, EtaleKind::Inert);
        assert_eq!(classify_normalized(&frac(1, 5), 5).unwrap().kind, EtaleKind::Ramified);
    }

    #[test]
    fn class_invariants() {
        for k in EtaleKind::ALL {
            let c = k.class();
            assert_eq!(c.deltas.iter().map(|&d| d as u32).sum::<u32>(), 1);
        }
        assert_eq!(EtaleKind::Inert.class().eta_at_uniformizer, -1);
        assert_eq!(EtaleKind::Ramified.class().conductor_norm_exponent, 1);
    }

    #[test]
    fn residue_cardinality() {
        assert_eq!(LocalPrime::new(9).unwrap().p, 3);
        assert!(LocalPrime::new(8).is_err());
        assert!(LocalPrime::new(15).is_err());
        assert!(LocalPrime::new(1).is_err());
    }

    #[test]
    fn lfactor_shapes() {
        let lam = LambdaPoly::lambda();
        let split = EtaleKind::Split.class();
        let z = lfactor(LFactorKind::ZetaAt2sMinus1, 3, &lam, &split);
        let expect = TRatFunc::inverse_of(&TLaurent::one() - &TLaurent::t(2, int(3))).unwrap();
        assert_eq!(z, expect);

        // At λ = 0 the adjoint denominator factors as (1 + qt²)(1 − q²t⁴).
        for q in [3u64, 5, 7] {
            let d = adjoint_denominator(q, &LambdaPoly::zero());
            let f = &(&TLaurent::one() + &TLaurent::t(2, int(q as i64)))
                * &(&TLaurent::one() - &TLaurent::t(4, int((q * q) as i64)));
            assert_eq!(d, f);
        }

        let std = lfactor(LFactorKind::StdAt2sMinusHalf, 5, &lam, &split);
        assert_eq!(std.den().coeff_t(2), -LambdaPoly::lambda());
        assert_eq!(std.den().coeff_t(4), LambdaPoly::constant(int(5)));

        let ram = lfactor(LFactorKind::LEtaAt1, 3, &lam, &EtaleKind::Ramified.class());
        assert_eq!(ram, TRatFunc::constant(int(1)));
        let inert = lfactor(LFactorKind::LEtaAt1, 3, &lam, &EtaleKind::Inert.class());
        assert_eq!(inert.eval_t(&int(0), &int(0)).unwrap(), frac(3, 4));

        assert!(matches!(
            "ZETA_AT_3S".parse::<LFactorKind>(),
            Err(Error::UnsupportedLFactor(_))
        ));
    }

    #[test]
    fn every_denominator_is_unit_normalized() {
        let lam = LambdaPoly::lambda();
        for kind in [
            LFactorKind::ZetaAt1,
            LFactorKind::ZetaAt2,
            LFactorKind::LEtaAt1,
            LFactorKind::ZetaAt2sMinus1,
            LFactorKind::AdAt2sMinus1,
            LFactorKind::StdAt2sMinusHalf,
        ] {
            for k in EtaleKind::ALL {
                let r = lfactor(kind, 7, &lam, &k.class());
                assert_eq!(r.den().coeff_t(0), LambdaPoly::one(), "{kind:?} {k}");
                assert!(r.series_expand(6).is_ok(), "{kind:?} {k}");
            }
        }
    }
}
