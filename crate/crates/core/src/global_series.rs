//! Truncated Euler products over ℚ: the Dirichlet series 𝒟_E^S, the ξ skeleton
//! with opaque per-field weights, and the one-dimensional explicit formulas.
//!
//! Everything here is binary64 except the exact per-prime factorization check.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use num_traits::One;
use serde::Serialize;

use crate::algebra::rat::{int, parse_rat, qpow, to_f64, Rat};
use crate::error::{Error, Result};
use crate::local_field::{is_prime, legendre, EtaleKind};

/// Kronecker symbol (D0/p) for a prime p.
pub fn kronecker(d0: i64, p: u64) -> i8 {
    if p == 2 {
        return match d0.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
    }
    if d0.rem_euclid(p as i64) == 0 {
        return 0;
    }
    legendre(d0, p).expect("p is an odd prime")
}

/// Local type of ℚ(√D0) at p.
pub fn local_kind(d0: i64, p: u64) -> EtaleKind {
    match kronecker(d0, p) {
        1 => EtaleKind::Split,
        -1 => EtaleKind::Inert,
        _ => EtaleKind::Ramified,
    }
}

pub fn primes_up_to(x: u64) -> Vec<u64> {
    if x < 2 {
        return Vec::new();
    }
    let n = x as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            for j in (i * i..=n).step_by(i) {
                composite[j] = true;
            }
        }
    }
    out
}

fn is_squarefree(mut n: u64) -> bool {
    let mut d = 2;
    while d * d <= n {
        if n % (d * d) == 0 {
            return false;
        }
        if n % d == 0 {
            n /= d;
        }
        d += 1;
    }
    true
}

/// Neumaier-compensated sum.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    c: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.c
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeckeEntry {
    #[serde(serialize_with = "crate::serde_rat::ser")]
    pub lambda: Rat,
    /// |λ_p| ≤ 2√p
    pub tempered: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct HeckeData {
    pub label: String,
    pub entries: BTreeMap<u64, HeckeEntry>,
}

impl HeckeData {
    pub fn new(label: impl Into<String>) -> Self {
        HeckeData { label: label.into(), entries: BTreeMap::new() }
    }

    pub fn insert(&mut self, p: u64, lambda: Rat) -> Result<()> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if self.entries.contains_key(&p) {
            return Err(Error::DuplicatePrime(p));
        }
        let tempered = &lambda * &lambda <= int(4 * p as i64);
        self.entries.insert(p, HeckeEntry { lambda, tempered });
        Ok(())
    }

    /// Data with λ_p = f(p) for every prime p ≤ x.
    pub fn from_fn(label: impl Into<String>, x: u64, f: impl Fn(u64) -> Rat) -> Self {
        let mut h = HeckeData::new(label);
        for p in primes_up_to(x) {
            h.insert(p, f(p)).expect("distinct primes");
        }
        h
    }

    pub fn lambda(&self, p: u64) -> Option<&Rat> {
        self.entries.get(&p).map(|e| &e.lambda)
    }

    pub fn all_tempered(&self) -> bool {
        self.entries.values().all(|e| e.tempered)
    }
}

/// Parses rows "p,lambda" with an optional header; lambda is an integer,
/// fraction "a/b" or finite decimal.
pub fn parse_hecke_csv(text: &str, label: &str) -> Result<HeckeData> {
    let mut data = HeckeData::new(label);
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let malformed = |msg: &str| Error::MalformedRow { line: i + 1, msg: msg.to_string() };
        let (p, lam) = line.split_once(',').ok_or_else(|| malformed("expected two fields"))?;
        let p = match p.trim().parse::<u64>() {
            Ok(p) => p,
            Err(_) if i == 0 => continue,
            Err(_) => return Err(malformed("prime is not an integer")),
        };
        let lambda = parse_rat(lam).map_err(|_| malformed("eigenvalue is not a rational number"))?;
        data.insert(p, lambda)?;
    }
    Ok(data)
}

pub fn load_hecke_csv(path: &Path) -> Result<HeckeData> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_hecke_csv(&text, &path.display().to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadraticField {
    pub d0: i64,
}

impl QuadraticField {
    pub fn new(d0: i64) -> Result<Self> {
        let fundamental = match d0.rem_euclid(4) {
            _ if d0 == 0 || d0 == 1 => false,
            1 => is_squarefree(d0.unsigned_abs()),
            0 => {
                let m = d0 / 4;
                matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
            }
            _ => false,
        };
        if !fundamental {
            return Err(Error::NotFundamental(d0));
        }
        Ok(QuadraticField { d0 })
    }

    pub fn eta(&self, p: u64) -> i8 {
        kronecker(self.d0, p)
    }

    /// ∏_{p ∉ S} p^{v_p(D0)}: the conductor norm away from S.
    pub fn conductor_norm(&self, s_set: &BTreeSet<u64>) -> u64 {
        let mut n = self.d0.unsigned_abs();
        let mut out = 1;
        let mut p = 2;
        while n > 1 {
            while n % p == 0 {
                n /= p;
                if !s_set.contains(&p) {
                    out *= p;
                }
            }
            p += 1;
        }
        out
    }

    /// Σ_{n ≤ x} χ(n)/n with the heuristic error |D0|/x.
    pub fn l1_eta(&self, x: u64) -> (f64, f64) {
        // Smallest prime factors, then χ is completely multiplicative.
        let n = x as usize;
        let mut spf = vec![0u32; n + 1];
        for i in 2..=n {
            if spf[i] == 0 {
                for j in (i..=n).step_by(i) {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                }
            }
        }
        let mut chi = vec![0i8; n + 1];
        let mut sum = CompensatedSum::default();
        if n >= 1 {
            chi[1] = 1;
            sum.add(1.0);
        }
        for m in 2..=n {
            let p = spf[m] as usize;
            chi[m] = chi[m / p] * self.eta(p as u64);
            sum.add(f64::from(chi[m]) / m as f64);
        }
        (sum.value(), self.d0.unsigned_abs() as f64 / x.max(1) as f64)
    }
}

/// ℛ_E(π_p, s): 1 + p^{-1} + p^{-2s} − 2η p^{-1}λ if η is unramified, 1 if ramified.
pub fn local_r(lambda: f64, eta: i8, p: u64, s: f64) -> f64 {
    if eta == 0 {
        return 1.0;
    }
    let pf = p as f64;
    1.0 + 1.0 / pf + pf.powf(-2.0 * s) - 2.0 * f64::from(eta) * lambda / pf
}

/// ℛ_E(π_p, s) exactly at integer s.
pub fn local_r_exact(lambda: &Rat, eta: i8, p: u64, s: i32) -> Rat {
    if eta == 0 {
        return Rat::one();
    }
    Rat::one() + qpow(p, -1) + qpow(p, -2 * s) - int(2 * i64::from(eta)) * lambda * qpow(p, -1)
}

/// (1 + ℛp^{1−2s})·ζ_p(2s−1)·ζ_p(2s) at λ = η(p+1), exactly; equals 1.
pub fn onedim_factor_product(p: u64, eta: i8, s: i32) -> Rat {
    let lambda = int(i64::from(eta) * (p as i64 + 1));
    let d = Rat::one() + local_r_exact(&lambda, eta, p, s) * qpow(p, 1 - 2 * s);
    d / ((Rat::one() - qpow(p, 1 - 2 * s)) * (Rat::one() - qpow(p, -2 * s)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EulerD {
    pub value: f64,
    /// Bound on |log 𝒟 − log(truncation)| assuming every omitted λ_p is tempered.
    pub log_tail_estimate: f64,
    pub tempered: bool,
    pub primes_used: usize,
}

fn check_s(s: f64, min: f64) -> Result<()> {
    if s.is_nan() || s <= min {
        return Err(Error::OutOfRange { s, min });
    }
    Ok(())
}

/// Σ_{n>x} 2(1 + n^{-1} + 4n^{-1/2} + n^{-2s})n^{1−2s}: bounds Σ_{p>x} |log(1 + ℛp^{1−2s})|
/// when |λ_p| ≤ 2√p, since |log(1+u)| ≤ 2|u| for |u| ≤ ½.
fn tempered_tail(s: f64, x: f64) -> f64 {
    let x = x.max(2.0);
    2.0 * (1.0 + 1.0 / x + 4.0 / x.sqrt() + x.powf(-2.0 * s)) * x.powf(2.0 - 2.0 * s) / (2.0 * s - 2.0)
}

/// ∏_{p ≤ X, p ∉ S} (1 + ℛ_E(π_p,s) p^{1−2s}).
pub fn euler_d(s: f64, hecke: &HeckeData, field: &QuadraticField, s_set: &BTreeSet<u64>, x: u64) -> Result<EulerD> {
    check_s(s, 1.0)?;
    let mut log = CompensatedSum::default();
    let mut used = 0;
    let mut tempered = true;
    for p in primes_up_to(x).into_iter().filter(|p| !s_set.contains(p)) {
        let entry = hecke.entries.get(&p).ok_or(Error::MissingEigenvalue(p))?;
        tempered &= entry.tempered;
        let r = local_r(to_f64(&entry.lambda), field.eta(p), p, s);
        log.add((r * (p as f64).powf(1.0 - 2.0 * s)).ln_1p());
        used += 1;
    }
    Ok(EulerD { value: log.value().exp(), log_tail_estimate: tempered_tail(s, x as f64), tempered, primes_used: used })
}

/// ∏_{p ≤ X, p ∉ S} (1 − p^{-a})^{-1}
pub fn zeta_truncated(a: f64, s_set: &BTreeSet<u64>, x: u64) -> f64 {
    let mut log = CompensatedSum::default();
    for p in primes_up_to(x).into_iter().filter(|p| !s_set.contains(p)) {
        log.add(-(-(p as f64).powf(-a)).ln_1p());
    }
    log.value().exp()
}

/// L_p(a, π, Ad)^{-1} = (1 − p^{-a})(1 − (λ²/p − 2)p^{-a} + p^{-2a}).
fn adjoint_inverse(lambda: f64, p: u64, a: f64) -> f64 {
    let u = (p as f64).powf(-a);
    (1.0 - u) * (1.0 - (lambda * lambda / p as f64 - 2.0) * u + u * u)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct XiTerm {
    pub d0: i64,
    pub conductor_norm: u64,
    pub l1_eta: f64,
    pub l1_eta_error: f64,
    pub d_es_truncated: f64,
    pub log_tail_estimate: f64,
    pub placeholder_weight: f64,
    /// weight·L(1,η)·𝒟/N(f)^{s−1}
    pub contribution: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct XiBreakdown {
    pub s: f64,
    pub truncation_prime: u64,
    /// ζ^S(2s−1)L^S(2s−1,Ad)/ζ^S(2)³
    pub prefactor_value: f64,
    pub per_e_terms: Vec<XiTerm>,
    #[serde(serialize_with = "crate::serde_rat::ser")]
    pub global_constant: Rat,
    pub value: f64,
}

#[derive(Clone, Debug)]
pub struct XiInput<'a> {
    pub hecke: &'a HeckeData,
    pub fields: &'a [QuadraticField],
    pub s_set: &'a BTreeSet<u64>,
    pub x: u64,
    /// One weight per field; standing in for α_E^#·L(1/2,π_E) (or L(1,η)|𝒫_E(φ)|²).
    pub weights: &'a [f64],
    /// Optional local types required at primes of S.
    pub local_conditions: &'a BTreeMap<u64, EtaleKind>,
    pub global_constant: Rat,
}

pub fn xi_skeleton(s: f64, input: &XiInput<'_>) -> Result<XiBreakdown> {
    check_s(s, 1.0)?;
    let mut log_adj = CompensatedSum::default();
    for p in primes_up_to(input.x).into_iter().filter(|p| !input.s_set.contains(p)) {
        let lambda = input.hecke.lambda(p).ok_or(Error::MissingEigenvalue(p))?;
        log_adj.add(-adjoint_inverse(to_f64(lambda), p, 2.0 * s - 1.0).ln());
    }
    let prefactor = zeta_truncated(2.0 * s - 1.0, input.s_set, input.x) * log_adj.value().exp()
        / zeta_truncated(2.0, input.s_set, input.x).powi(3);
    let mut terms = Vec::new();
    for (field, &weight) in input.fields.iter().zip(input.weights) {
        if input.local_conditions.iter().any(|(&p, &kind)| local_kind(field.d0, p) != kind) {
            continue;
        }
        let d = euler_d(s, input.hecke, field, input.s_set, input.x)?;
        let (l1, l1_err) = field.l1_eta(input.x);
        let cond = field.conductor_norm(input.s_set);
        let contribution = weight * l1 * d.value / (cond as f64).powf(s - 1.0);
        terms.push(XiTerm {
            d0: field.d0,
            conductor_norm: cond,
            l1_eta: l1,
            l1_eta_error: l1_err,
            d_es_truncated: d.value,
            log_tail_estimate: d.log_tail_estimate,
            placeholder_weight: weight,
            contribution,
        });
    }
    let mut sum = CompensatedSum::default();
    terms.iter().for_each(|t| sum.add(t.contribution));
    let value = to_f64(&input.global_constant) * prefactor * sum.value();
    Ok(XiBreakdown {
        s,
        truncation_prime: input.x,
        prefactor_value: prefactor,
        per_e_terms: terms,
        global_constant: input.global_constant.clone(),
        value,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OneDimKind {
    Trivial,
    Eta,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OneDimBreakdown {
    pub kind: OneDimKind,
    pub s: f64,
    pub factors: BTreeMap<String, f64>,
    /// max over unramified p ∉ S of |(1+ℛp^{1−2s}) − (1−p^{1−2s})(1−p^{−2s})|, eta kind only
    pub d_factor_max_deviation: Option<f64>,
    pub value: f64,
}

/// The one-dimensional explicit formulas without the local factors at S and
/// without the sum over E (trivial kind) or the global constants.
pub fn onedim_series(kind: OneDimKind, s: f64, d0: Option<i64>, s_set: &BTreeSet<u64>, x: u64) -> Result<OneDimBreakdown> {
    check_s(s, 1.5)?;
    let mut factors = BTreeMap::new();
    let z = |a: f64| zeta_truncated(a, s_set, x);
    factors.insert("zeta_S(2s-2)".to_string(), z(2.0 * s - 2.0));
    factors.insert("zeta_S(2s-1)".to_string(), z(2.0 * s - 1.0));
    factors.insert("zeta_S(2)".to_string(), z(2.0));
    match kind {
        OneDimKind::Trivial => {
            factors.insert("zeta_S(2s)".to_string(), z(2.0 * s));
            let value = factors["zeta_S(2s-2)"] * factors["zeta_S(2s-1)"].powi(2) * factors["zeta_S(2s)"]
                / (2.0 * factors["zeta_S(2)"].powi(3));
            Ok(OneDimBreakdown { kind, s, factors, d_factor_max_deviation: None, value })
        }
        OneDimKind::Eta => {
            let field = QuadraticField::new(d0.ok_or(Error::NotFundamental(0))?)?;
            let (l1, _) = field.l1_eta(x.max(1000));
            let cond = field.conductor_norm(s_set) as f64;
            let mut dev: f64 = 0.0;
            for p in primes_up_to(x).into_iter().filter(|p| !s_set.contains(p)) {
                let eta = field.eta(p);
                if eta == 0 {
                    continue;
                }
                let lambda = f64::from(eta) * (p as f64 + 1.0);
                let pf = p as f64;
                let lhs = 1.0 + local_r(lambda, eta, p, s) * pf.powf(1.0 - 2.0 * s);
                let rhs = (1.0 - pf.powf(1.0 - 2.0 * s)) * (1.0 - pf.powf(-2.0 * s));
                dev = dev.max((lhs - rhs).abs());
            }
            factors.insert("L(1,eta)".to_string(), l1);
            factors.insert("N(f)".to_string(), cond);
            let value = l1 * l1 / (2.0 * factors["zeta_S(2)"].powi(3) * cond.powf(s - 1.0))
                * factors["zeta_S(2s-1)"]
                * factors["zeta_S(2s-2)"];
            Ok(OneDimBreakdown { kind, s, factors, d_factor_max_deviation: Some(dev), value })
        }
    }
}

/// Whether λ = η(p+1) satisfies the exact one-dimensional factorization at p.
pub fn onedim_identity_holds(p: u64, eta: i8, s: i32) -> bool {
    onedim_factor_product(p, eta, s).is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat::frac;

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(5, 11), 1);
        assert_eq!(kronecker(-4, 3), -1);
        assert_eq!(kronecker(8, 2), 0);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(local_kind(-4, 5), EtaleKind::Split);
    }

    #[test]
    fn fundamental_discriminants() {
        for d in [-3, -4, 5, 8, -8, 12, -7, 13, 24] {
            assert!(QuadraticField::new(d).is_ok(), "{d}");
        }
        for d in [0, 1, 2, 3, -1, 9, 16, -12, 20, 45] {
            assert_eq!(QuadraticField::new(d), Err(Error::NotFundamental(d)));
        }
        let s2 = BTreeSet::from([2]);
        assert_eq!(QuadraticField::new(-4).unwrap().conductor_norm(&s2), 1);
        assert_eq!(QuadraticField::new(-20).unwrap().conductor_norm(&s2), 5);
        assert_eq!(QuadraticField::new(-20).unwrap().conductor_norm(&BTreeSet::new()), 20);
    }

    #[test]
    fn local_r_examples() {
        assert_eq!(local_r(7.0, 0, 5, 1.3), 1.0);
        assert!((local_r(0.0, -1, 3, 1.0) - 13.0 / 9.0).abs() < 1e-15);
        assert_eq!(local_r_exact(&int(0), -1, 3, 1), frac(13, 9));
        for p in primes_up_to(60) {
            for eta in [1, -1] {
                assert!(onedim_identity_holds(p, eta, 2));
                assert!(onedim_identity_holds(p, eta, 3));
            }
        }
    }

    #[test]
    fn l1_eta_matches_known_values() {
        // L(1, χ_{-4}) = π/4, L(1, χ_5) = 2 log φ / √5.
        let (l, err) = QuadraticField::new(-4).unwrap().l1_eta(100_000);
        assert!((l - std::f64::consts::FRAC_PI_4).abs() < err);
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        let (l, err) = QuadraticField::new(5).unwrap().l1_eta(100_000);
        assert!((l - 2.0 * golden.ln() / 5f64.sqrt()).abs() < err);
    }

    #[test]
    fn csv_parsing() {
        let h = parse_hecke_csv("2,1\n3,-2\n", "t").unwrap();
        assert_eq!(h.lambda(2), Some(&int(1)));
        assert_eq!(h.lambda(3), Some(&int(-2)));
        let h = parse_hecke_csv("p,lambda\n5,1/2\n7,-0.25\n", "t").unwrap();
        assert_eq!(h.lambda(7), Some(&frac(-1, 4)));
        assert_eq!(parse_hecke_csv("4,1", "t"), Err(Error::NotPrime(4)));
        assert_eq!(parse_hecke_csv("3,1\n3,2", "t"), Err(Error::DuplicatePrime(3)));
        assert!(matches!(parse_hecke_csv("3;1", "t"), Err(Error::MalformedRow { line: 1, .. })));
        assert!(matches!(parse_hecke_csv("3,1\nx,2", "t"), Err(Error::MalformedRow { line: 2, .. })));
        let h = parse_hecke_csv("3,5", "t").unwrap();
        assert!(!h.entries[&3].tempered);
        assert!(parse_hecke_csv("3,3", "t").unwrap().entries[&3].tempered);
    }

    #[test]
    fn euler_d_behaviour() {
        let field = QuadraticField::new(-4).unwrap();
        let s_set = BTreeSet::from([2]);
        // One-dimensional specialization: per-factor identity.
        let h = HeckeData::from_fn("eta", 200, |p| int(i64::from(field.eta(p)) * (p as i64 + 1)));
        let d = euler_d(1.7, &h, &field, &s_set, 200).unwrap();
        let mut expected = 1.0;
        for p in primes_up_to(200).into_iter().filter(|p| !s_set.contains(p)) {
            let pf = p as f64;
            expected *= if field.eta(p) == 0 { 1.0 + pf.powf(1.0 - 3.4) } else { (1.0 - pf.powf(-2.4)) * (1.0 - pf.powf(-3.4)) };
        }
        assert!((d.value - expected).abs() < 1e-12);
        // Empty product.
        let d = euler_d(1.3, &HeckeData::new("none"), &field, &s_set, 2).unwrap();
        assert_eq!(d.value, 1.0);
        assert_eq!(euler_d(1.3, &HeckeData::new("none"), &field, &s_set, 3), Err(Error::MissingEigenvalue(3)));
        assert!(matches!(euler_d(1.0, &h, &field, &s_set, 10), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn euler_d_tail_is_consistent() {
        // Tempered data λ_p = 2√p·cos(p), rounded down in absolute value.
        let h = HeckeData::from_fn("synthetic", 10_000, |p| {
            let v = 2.0 * (p as f64).sqrt() * (p as f64).cos();
            Rat::new(((v * 1000.0).trunc() as i64).into(), 1000.into())
        });
        assert!(h.all_tempered());
        let field = QuadraticField::new(5).unwrap();
        let s_set = BTreeSet::new();
        let a = euler_d(1.2, &h, &field, &s_set, 1000).unwrap();
        let b = euler_d(1.2, &h, &field, &s_set, 10_000).unwrap();
        assert!((a.value.ln() - b.value.ln()).abs() <= a.log_tail_estimate);
    }

    #[test]
    fn xi_is_linear_in_weights() {
        let h = HeckeData::from_fn("zero", 500, |_| int(0));
        let fields = [QuadraticField::new(-4).unwrap(), QuadraticField::new(5).unwrap()];
        let s_set = BTreeSet::from([2]);
        let conditions = BTreeMap::new();
        let mk = |w: &'static [f64]| XiInput {
            hecke: &h,
            fields: &fields,
            s_set: &s_set,
            x: 500,
            weights: w,
            local_conditions: &conditions,
            global_constant: int(1),
        };
        let a = xi_skeleton(1.5, &mk(&[1.0, 0.5])).unwrap();
        let b = xi_skeleton(1.5, &mk(&[2.0, 1.0])).unwrap();
        for (x, y) in a.per_e_terms.iter().zip(&b.per_e_terms) {
            assert!((2.0 * x.contribution - y.contribution).abs() < 1e-12);
        }
        let zero = xi_skeleton(1.5, &mk(&[0.0, 0.0])).unwrap();
        assert!(zero.per_e_terms.iter().all(|t| t.contribution == 0.0));
        // λ = 0 adjoint factor: (1 − x)^{-1}(1 + x)^{-2} with x = p^{1−2s}.
        let mut expected = zeta_truncated(2.0, &s_set, 500).powi(-3);
        for p in primes_up_to(500).into_iter().filter(|p| *p != 2) {
            let x = (p as f64).powf(-2.0);
            expected *= 1.0 / (1.0 - x) / ((1.0 - x) * (1.0 + x).powi(2));
        }
        assert!((a.prefactor_value / expected - 1.0).abs() < 1e-12);
        // Local conditions filter fields: -4 is ramified at 2, 5 is inert at 2.
        let inert_at_2 = BTreeMap::from([(2, EtaleKind::Inert)]);
        let filtered = XiInput { local_conditions: &inert_at_2, ..mk(&[1.0, 1.0]) };
        let f = xi_skeleton(1.5, &filtered).unwrap();
        assert_eq!(f.per_e_terms.len(), 1);
        assert_eq!(f.per_e_terms[0].d0, 5);
        // Closer to s = 1 the ζ^S(2s−1) truncation grows.
        let near = xi_skeleton(1.05, &mk(&[1.0, 1.0])).unwrap();
        assert!(near.prefactor_value > a.prefactor_value);
    }

    #[test]
    fn onedim() {
        let s_set = BTreeSet::from([2]);
        let e = onedim_series(OneDimKind::Eta, 2.0, Some(-4), &s_set, 1000).unwrap();
        assert_eq!(e.factors["N(f)"], 1.0);
        assert!(e.d_factor_max_deviation.unwrap() < 1e-15);
        let t = onedim_series(OneDimKind::Trivial, 2.0, None, &s_set, 2).unwrap();
        assert_eq!(t.value, 0.5);
        assert!(matches!(onedim_series(OneDimKind::Trivial, 1.4, None, &s_set, 10), Err(Error::OutOfRange { .. })));
    }
}
