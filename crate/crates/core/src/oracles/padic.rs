//! Adaptive p-adic integration of Z_E(π,s) = ∫_{V_E(o)} β(l₁,l₂)|P(x)|^{s−2} dx.
//!
//! Homogeneity reduces the integral to primitive x, with an overall factor
//! (1 − q^{-4s})^{-1}. The primitive points are split by which of the pencils
//! F₃, F₁, F₂ is nonzero mod p. On each piece, K-invariance moves x to a
//! normal form depending on a matrix Z ∈ M₂(o), weighted by the reciprocal of
//! the number of admissible pencil directions. The rank-one reductions (orbit
//! X1) are one orbit mod p and reduce to a four-variable fiber integral.
//!
//! Cells z₀ + p^n o^D are refined until the integrand is known on the cell. A
//! polynomial f with integer coefficients satisfies f(z₀ + p^n h) ≡ f(z₀) mod
//! p^{min(n+g, 2n)} with g = v(∇f(z₀)). When g < n, f maps the cell onto
//! f(z₀) + p^{n+g}o with uniform push-forward measure, so a cell with known
//! m₁, m₂ has an exactly computable average even if v(P) is not yet fixed.

use std::collections::HashMap;
use std::ops::{Add, Mul, Sub};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::rat::{int, qpow, Rat};
use crate::error::{Error, Result};
use crate::local_field::{is_prime, legendre, EtaleClass, EtaleKind};
use crate::waldspurger::{beta_bound, beta_values};

use super::census::{pencil_forms, projective_roots, Mat2};

/// Environment variable overriding the default coset-visit budget.
pub const BUDGET_ENV: &str = "TORIC_ZETA_COSET_BUDGET";
pub const DEFAULT_BUDGET: u64 = 100_000_000;
/// Terms of the exact valuation series on a uniform ball before the tail bound.
const BALL_TERMS: u32 = 48;
/// Exact β values scanned before switching to the geometric envelope c·ρ^l.
const SUP_WINDOW: u32 = 24;

pub fn default_budget() -> u64 {
    std::env::var(BUDGET_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_BUDGET)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleEstimate {
    #[serde(serialize_with = "crate::serde_rat::ser")]
    pub value: Rat,
    #[serde(serialize_with = "crate::serde_rat::ser")]
    pub tail_bound: Rat,
    pub depth: u32,
    pub visits: u64,
}

impl OracleEstimate {
    pub fn contains(&self, x: &Rat) -> bool {
        (x - &self.value).abs() <= self.tail_bound
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleMode {
    /// Four-variable normal forms on each K-stable piece.
    NormalForm,
    /// Direct refinement of (Z_p)^8; only practical for small depth.
    Flat,
}

#[derive(Clone, Debug)]
pub struct OracleConfig {
    pub depth: u32,
    pub budget: u64,
    pub mode: OracleMode,
}

impl OracleConfig {
    pub fn new(depth: u32) -> Self {
        OracleConfig { depth, budget: default_budget(), mode: OracleMode::NormalForm }
    }
}

/// A polynomial restricted to a cell z = z₀ + p^n h, as a polynomial in h:
/// exact constant and linear terms, a lower bound `eta` on the valuation of
/// every coefficient of degree ≥ 2, and `eta_var[i]`, the same bound restricted
/// to the degree ≥ 2 monomials containing h_i. Products use Gauss's lemma.
#[derive(Clone, Copy, Debug)]
pub(super) struct Jet<const D: usize> {
    pub(super) v: i128,
    d: [i128; D],
    eta: u32,
    eta_var: [u32; D],
    p: i128,
}

impl<const D: usize> Jet<D> {
    pub(super) fn constant(v: i128, p: i128) -> Self {
        Jet { v, d: [0; D], eta: INF, eta_var: [INF; D], p }
    }

    /// z_i = z₀ + p^n h_i.
    pub(super) fn var(v: i128, i: usize, step: i128, p: i128) -> Self {
        let mut d = [0; D];
        d[i] = step;
        Jet { v, d, eta: INF, eta_var: [INF; D], p }
    }

    pub(super) fn scale(mut self, k: i128) -> Self {
        let vk = val(k, self.p);
        self.v *= k;
        self.d.iter_mut().for_each(|x| *x *= k);
        self.eta = sat_add(self.eta, vk);
        self.eta_var.iter_mut().for_each(|e| *e = sat_add(*e, vk));
        self
    }

    fn lin_vals(&self) -> [u32; D] {
        self.d.map(|x| val(x, self.p))
    }

    fn lin_val(&self) -> u32 {
        self.lin_vals().into_iter().min().unwrap_or(INF)
    }

    /// Whether h ↦ f(z₀ + p^n h) pushes Haar measure forward to the uniform
    /// measure on f(z₀) + p^g o, g the valuation of the linear part: some h_i
    /// has a linear coefficient of valuation g and only appears elsewhere at
    /// strictly higher valuation, and no other term is below g.
    pub(super) fn submersive(&self) -> bool {
        let g = self.lin_val();
        g <= self.eta && self.lin_vals().iter().zip(&self.eta_var).any(|(&li, &ei)| li == g && g < ei)
    }
}

fn sat_add(a: u32, b: u32) -> u32 {
    a.saturating_add(b).min(INF)
}

impl<const D: usize> Add for Jet<D> {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        self.v += o.v;
        for i in 0..D {
            self.d[i] += o.d[i];
            self.eta_var[i] = self.eta_var[i].min(o.eta_var[i]);
        }
        self.eta = self.eta.min(o.eta);
        self
    }
}

impl<const D: usize> Sub for Jet<D> {
    type Output = Self;
    fn sub(mut self, o: Self) -> Self {
        self.v -= o.v;
        for i in 0..D {
            self.d[i] -= o.d[i];
            self.eta_var[i] = self.eta_var[i].min(o.eta_var[i]);
        }
        self.eta = self.eta.min(o.eta);
        self
    }
}

impl<const D: usize> Mul for Jet<D> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut d = [0; D];
        for i in 0..D {
            d[i] = self.v * o.d[i] + self.d[i] * o.v;
        }
        let p = self.p;
        let (v0, w0) = (val(self.v, p), val(o.v, p));
        let (lf, lg) = (self.lin_vals(), o.lin_vals());
        let l0 = lf.iter().copied().min().unwrap_or(INF);
        let m0 = lg.iter().copied().min().unwrap_or(INF);
        let eta = [
            sat_add(l0, m0),
            sat_add(v0, o.eta),
            sat_add(w0, self.eta),
            sat_add(l0, o.eta),
            sat_add(self.eta, m0),
            sat_add(self.eta, o.eta),
        ]
        .into_iter()
        .min()
        .expect("nonempty");
        let eta_var = std::array::from_fn(|i| {
            [
                sat_add(lf[i], m0),
                sat_add(l0, lg[i]),
                sat_add(v0, o.eta_var[i]),
                sat_add(w0, self.eta_var[i]),
                sat_add(lf[i], o.eta),
                sat_add(l0, o.eta_var[i]),
                sat_add(self.eta_var[i], m0),
                sat_add(self.eta, lg[i]),
                sat_add(self.eta_var[i], o.eta),
                sat_add(self.eta, o.eta_var[i]),
            ]
            .into_iter()
            .min()
            .expect("nonempty")
        });
        Jet { v: self.v * o.v, d, eta, eta_var, p }
    }
}

pub(super) const INF: u32 = u32::MAX / 4;

fn val(mut x: i128, p: i128) -> u32 {
    if x == 0 {
        return INF;
    }
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// (v(f(z₀)), valuation of the linear part, precision to which f is constant on the cell).
pub(super) fn probe<const D: usize>(f: &Jet<D>) -> (u32, u32, u32) {
    let g = f.lin_val();
    (val(f.v, f.p), g, g.min(f.eta))
}

/// min_e v(f_e) on the cell, if it is determined.
pub(super) fn resolved_min<const D: usize>(f: &[Jet<D>; 3]) -> Option<u32> {
    let probes = f.map(|e| probe(&e));
    let lb = probes.iter().map(|&(v, _, prec)| v.min(prec)).min().expect("three entries");
    probes.iter().any(|&(v, _, prec)| v < prec && v == lb).then_some(lb)
}

/// An upper bound for min_e v(f_e) on the cell, from entries of known valuation.
fn min_upper<const D: usize>(f: &[Jet<D>; 3]) -> u32 {
    f.iter().map(probe).filter(|&(v, _, prec)| v < prec).map(|(v, _, _)| v).min().unwrap_or(INF)
}

/// (F₁, F₂, P) from x = (x11, x12, x21, x22, y11, y12, y21, y22).
fn invariants<const D: usize>(x: &[Jet<D>; 8]) -> ([Jet<D>; 3], [Jet<D>; 3], Jet<D>) {
    let [x11, x12, x21, x22, y11, y12, y21, y22] = *x;
    let f1 = [
        x11 * y12 - x12 * y11,
        (x11 * y22 - x12 * y21) + (x21 * y12 - x22 * y11),
        x21 * y22 - x22 * y21,
    ];
    let f2 = [
        x11 * y21 - y11 * x21,
        (x11 * y22 - y12 * x21) + (x12 * y21 - y11 * x22),
        x12 * y22 - y12 * x22,
    ];
    let disc = f1[1] * f1[1] - (f1[0] * f1[2]).scale(4);
    (f1, f2, disc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum CellKind {
    /// v(P), l₁, l₂ all fixed and P in the target class.
    Exact { v: u32, l1: u32, l2: u32 },
    /// P uniform on p^r o with m₁, m₂ fixed.
    Ball { r: u32, m1: u32, m2: u32 },
    /// Unresolved at the depth limit; v(P) ≥ lb and l_j ≥ lmin_j on the cell.
    Deep { lb: u32, lmin: [u32; 2] },
    /// (I, Z) with Z scalar mod p: q^{-2(s−2)}·μ·J by self-similarity.
    Scalar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Key {
    region: u8,
    weight: u64,
    level: u32,
    kind: CellKind,
}

struct Region<const D: usize> {
    map: fn(&[Jet<D>; D], i128) -> [Jet<D>; 8],
    /// Piece membership and pencil-direction count from x mod p.
    weight: fn(&Mat2, &Mat2, u64) -> Option<u64>,
    /// None for the auxiliary unweighted integral J.
    factor: Option<Rat>,
    /// Whether Z ≡ scalar mod p is closed through J instead of refined.
    scalar_closure: bool,
}

fn residues(x: &[i128; 8], p: i128) -> (Mat2, Mat2) {
    let r = |i: usize| x[i].rem_euclid(p) as u64;
    ([[r(0), r(1)], [r(2), r(3)]], [[r(4), r(5)], [r(6), r(7)]])
}

fn nonzero(f: &[u64; 3]) -> bool {
    f.iter().any(|&c| c != 0)
}

fn pencil_weight(f: &[u64; 3], q: u64) -> u64 {
    q + 1 - projective_roots(f, q)
}

fn weight_r3(a: &Mat2, b: &Mat2, q: u64) -> Option<u64> {
    let [_, _, f3] = pencil_forms(a, b, q);
    nonzero(&f3).then(|| pencil_weight(&f3, q))
}

fn weight_r1(a: &Mat2, b: &Mat2, q: u64) -> Option<u64> {
    let [f1, _, f3] = pencil_forms(a, b, q);
    (!nonzero(&f3) && nonzero(&f1)).then(|| pencil_weight(&f1, q))
}

fn weight_r2(a: &Mat2, b: &Mat2, q: u64) -> Option<u64> {
    let [f1, f2, f3] = pencil_forms(a, b, q);
    (!nonzero(&f3) && !nonzero(&f1) && nonzero(&f2)).then(|| pencil_weight(&f2, q))
}

fn weight_one(a: &Mat2, b: &Mat2, _q: u64) -> Option<u64> {
    let zero = |m: &Mat2| m.iter().flatten().all(|&c| c == 0);
    (!(zero(a) && zero(b))).then_some(1)
}

fn weight_all(_a: &Mat2, _b: &Mat2, _q: u64) -> Option<u64> {
    Some(1)
}

type J4 = Jet<4>;

/// (I, Z). Translating Z by scalars (Y ↦ Y − cX) and scaling Y by p show
/// Φ(I, cI + pW) = q^{-2(s−2)}Φ(I, W): F₁, F₂ gain a factor p and P gains p².
fn map_r3(z: &[J4; 4], p: i128) -> [J4; 8] {
    let (o, l) = (J4::constant(0, p), J4::constant(1, p));
    [l, o, o, l, z[0], z[1], z[2], z[3]]
}

/// X = [[1,0],[a,b]], Y = [[0,1],[c,d]].
fn map_r1(z: &[J4; 4], p: i128) -> [J4; 8] {
    let (o, l) = (J4::constant(0, p), J4::constant(1, p));
    [l, o, z[0], z[1], o, l, z[2], z[3]]
}

/// X = [[1,a],[0,c]], Y = [[0,b],[1,d]].
fn map_r2(z: &[J4; 4], p: i128) -> [J4; 8] {
    let (o, l) = (J4::constant(0, p), J4::constant(1, p));
    [l, z[0], o, z[2], o, z[1], l, z[3]]
}

/// X = diag(1, ϖx), Y = [[0, ϖy], [ϖz, ϖw]].
fn map_x1(z: &[J4; 4], p: i128) -> [J4; 8] {
    let (o, l) = (J4::constant(0, p), J4::constant(1, p));
    [l, o, o, z[0].scale(p), o, z[1].scale(p), z[2].scale(p), z[3].scale(p)]
}

fn map_flat(z: &[Jet<8>; 8], _p: i128) -> [Jet<8>; 8] {
    *z
}

struct Target {
    vd: u32,
    chi: i8,
}

impl Target {
    fn of(class: &EtaleClass) -> Self {
        match class.kind {
            EtaleKind::Split => Target { vd: 0, chi: 1 },
            EtaleKind::Inert => Target { vd: 0, chi: -1 },
            // d = p
            EtaleKind::Ramified => Target { vd: 1, chi: 1 },
        }
    }
}

struct Walker<'a, const D: usize> {
    p: i128,
    depth: u32,
    target: &'a Target,
    region: &'a Region<D>,
    region_id: u8,
    budget: u64,
    visits: &'a AtomicU64,
    exhausted: &'a AtomicBool,
}

impl<const D: usize> Walker<'_, D> {
    fn visit(&self, z0: [i128; D], n: u32, weight: u64, out: &mut HashMap<Key, u64>) {
        if self.visits.fetch_add(1, Ordering::Relaxed) >= self.budget {
            self.exhausted.store(true, Ordering::Relaxed);
            return;
        }
        let p = self.p;
        let step = p.pow(n);
        let jets: [Jet<D>; D] = std::array::from_fn(|i| Jet::var(z0[i], i, step, p));
        let x = (self.region.map)(&jets, p);
        let (f1, f2, disc) = invariants(&x);
        let key = |kind| Key { region: self.region_id, weight, level: n, kind };
        let (pv, pg, pprec) = probe(&disc);
        if let (Some(m1), Some(m2)) = (resolved_min(&f1), resolved_min(&f2)) {
            if pv < pprec {
                let unit = (disc.v / p.pow(pv)).rem_euclid(p) as i64;
                let chi = legendre(unit, p as u64).expect("unit mod odd prime");
                if pv % 2 == self.target.vd % 2 && chi == self.target.chi {
                    let half = (pv - self.target.vd) / 2;
                    let kind = CellKind::Exact { v: pv, l1: half - m1, l2: half - m2 };
                    *out.entry(key(kind)).or_default() += 1;
                }
                return;
            }
            if disc.submersive() {
                *out.entry(key(CellKind::Ball { r: pg, m1, m2 })).or_default() += 1;
                return;
            }
        }
        if n == self.depth {
            let lb = pv.min(pprec);
            // v(P) ≡ v(d) mod 2 on the target, so l_j ≥ ⌈(lb − v(d))/2⌉ − m_j.
            let half = (lb.saturating_sub(self.target.vd) + 1) / 2;
            let lmin = [min_upper(&f1), min_upper(&f2)].map(|m| half.saturating_sub(m));
            *out.entry(key(CellKind::Deep { lb, lmin })).or_default() += 1;
            return;
        }
        let children = (p as u64).pow(D as u32);
        for c in 0..children {
            let mut z = z0;
            let mut k = c;
            for zi in z.iter_mut() {
                *zi += (k % p as u64) as i128 * step;
                k /= p as u64;
            }
            self.visit(z, n + 1, weight, out);
            if self.exhausted.load(Ordering::Relaxed) {
                return;
            }
        }
    }
}

/// Runs every level-1 cell of a region; returns per-key cell counts.
fn walk_region<const D: usize>(
    p: u64,
    region: &Region<D>,
    region_id: u8,
    target: &Target,
    cfg: &OracleConfig,
    visits: &AtomicU64,
    exhausted: &AtomicBool,
) -> HashMap<Key, u64> {
    let pi = p as i128;
    let walker = Walker { p: pi, depth: cfg.depth, target, region, region_id, budget: cfg.budget, visits, exhausted };
    (0..p.pow(D as u32))
        .into_par_iter()
        .map(|c| {
            let mut out = HashMap::new();
            let mut k = c;
            let z0: [i128; D] = std::array::from_fn(|_| {
                let r = (k % p) as i128;
                k /= p;
                r
            });
            let jets: [Jet<D>; D] = std::array::from_fn(|i| Jet::constant(z0[i], pi));
            let xv = (region.map)(&jets, pi).map(|j| j.v);
            let (a, b) = residues(&xv, pi);
            if let Some(w) = (region.weight)(&a, &b, p) {
                if region.scalar_closure && z0[1] == 0 && z0[2] == 0 && z0[3] == z0[0] {
                    *out.entry(Key { region: region_id, weight: w, level: 1, kind: CellKind::Scalar }).or_default() += 1;
                } else {
                    walker.visit(z0, 1, w, &mut out);
                }
            }
            out
        })
        .reduce(HashMap::new, |mut x, y| {
            for (k, v) in y {
                *x.entry(k).or_default() += v;
            }
            x
        })
}

fn check_precision(p: u64, depth: u32) -> Result<()> {
    // Coordinates stay below p^{depth+1}; P has degree 4 with small coefficients.
    let bits = (4.0 * f64::from(depth + 1) * (p as f64).log2()).ceil() as u32 + 8;
    if bits > 126 {
        return Err(Error::PrecisionOverflow { needed: bits });
    }
    Ok(())
}

/// Certified enclosure of Z_E(π,s) at integer s ≥ 2 and rational λ.
pub fn padic_oracle_ze(p: u64, class: &EtaleClass, lambda: &Rat, s: i64, depth: u32) -> Result<OracleEstimate> {
    padic_oracle_ze_with(p, class, lambda, s, &OracleConfig::new(depth))
}

pub fn padic_oracle_ze_with(
    p: u64,
    class: &EtaleClass,
    lambda: &Rat,
    s: i64,
    cfg: &OracleConfig,
) -> Result<OracleEstimate> {
    if p % 2 == 0 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    if s < 2 {
        return Err(Error::BadExponent(s));
    }
    if cfg.depth == 0 {
        return Err(Error::LevelTooSmall { n: 0, l1: 0, l2: 0 });
    }
    check_precision(p, cfg.depth)?;
    let bound = beta_bound(p, class, lambda)?;
    let target = Target::of(class);
    let visits = AtomicU64::new(0);
    let exhausted = AtomicBool::new(false);

    let q = int(p as i64);
    let gl2 = (Rat::one() - q.recip()) * (Rat::one() - qpow(p, -2));
    let mut counts: Vec<(HashMap<Key, u64>, Option<Rat>, u32)> = Vec::new();
    match cfg.mode {
        OracleMode::NormalForm => {
            let pencil = (&q + Rat::one()) * &gl2;
            let rank_one = num_traits::pow(&q + Rat::one(), 3) * (&q - Rat::one()) * qpow(p, -8);
            let region = |map, weight, factor, scalar_closure| Region { map, weight, factor, scalar_closure };
            let regions: [Region<4>; 5] = [
                region(map_r3, weight_r3, Some(pencil.clone()), true),
                region(map_r1, weight_r1, Some(pencil.clone()), false),
                region(map_r2, weight_r2, Some(pencil), false),
                region(map_x1, weight_one, Some(rank_one), false),
                region(map_r3, weight_all, None, true),
            ];
            for (i, r) in regions.iter().enumerate() {
                let c = walk_region(p, r, i as u8, &target, cfg, &visits, &exhausted);
                counts.push((c, r.factor.clone(), 4));
            }
        }
        OracleMode::Flat => {
            let r = Region::<8> { map: map_flat, weight: weight_one, factor: Some(Rat::one()), scalar_closure: false };
            let c = walk_region(p, &r, 0, &target, cfg, &visits, &exhausted);
            counts.push((c, r.factor, 8));
        }
    }
    if exhausted.load(Ordering::Relaxed) {
        return Err(Error::BudgetExceeded { budget: cfg.budget });
    }

    // β up to the largest index any exact or ball key can reach.
    let mut lmax = 0u32;
    for (c, _, _) in &counts {
        for k in c.keys() {
            lmax = lmax.max(match k.kind {
                CellKind::Exact { l1, l2, .. } => l1.max(l2),
                CellKind::Ball { r, .. } => (r + BALL_TERMS) / 2 + 1,
                CellKind::Deep { lmin, .. } => lmin[0].max(lmin[1]) + SUP_WINDOW,
                CellKind::Scalar => 0,
            });
        }
    }
    let beta = beta_values(p, class, lambda, lmax as usize + 1);
    let c2 = &bound.c * &bound.c;
    // sup_{l ≥ l0} |β(l)|
    let sup_beta = |l0: u32| -> Rat {
        let envelope = &bound.c * num_traits::pow(bound.rho.clone(), (l0 + SUP_WINDOW) as usize);
        beta[l0 as usize..(l0 + SUP_WINDOW) as usize].iter().map(|b| b.abs()).fold(envelope, |a, b| a.max(b))
    };
    let weight_s = |v: u32| qpow(p, -((v as i64 * (s - 2)) as i32));
    let mut ball_cache: HashMap<(u32, u32, u32), (Rat, Rat)> = HashMap::new();
    let mut ball = |r: u32, m1: u32, m2: u32| -> (Rat, Rat) {
        ball_cache
            .entry((r, m1, m2))
            .or_insert_with(|| {
                // P = p^r·u with u uniform on o: v(P) = r+i with mass (1−q^{-1})q^{-i},
                // half of which lies in each unit square class.
                let mut sum = Rat::zero();
                let shell = (Rat::one() - q.recip()) / int(2);
                for i in 0..BALL_TERMS {
                    let v = r + i;
                    if v % 2 != target.vd % 2 {
                        continue;
                    }
                    let half = (v - target.vd) / 2;
                    let (l1, l2) = ((half - m1) as usize, (half - m2) as usize);
                    sum += &shell * qpow(p, -(i as i32)) * &beta[l1] * &beta[l2] * weight_s(v);
                }
                let tail = qpow(p, -(BALL_TERMS as i32)) / int(2) * &c2 * weight_s(r);
                (sum, tail)
            })
            .clone()
    };

    // Per region: resolved sum, tail, and the coefficient of J from scalar cells.
    let mut parts = Vec::new();
    for (c, factor, dim) in &counts {
        let (mut value, mut tail, mut sigma) = (Rat::zero(), Rat::zero(), Rat::zero());
        for (k, &n) in c {
            let mass = int(n as i64) * qpow(p, -((dim * k.level) as i32)) / int(k.weight as i64);
            match k.kind {
                CellKind::Exact { v, l1, l2 } => value += mass * &beta[l1 as usize] * &beta[l2 as usize] * weight_s(v),
                CellKind::Ball { r, m1, m2 } => {
                    let (e, t) = ball(r, m1, m2);
                    value += &mass * e;
                    tail += mass * t;
                }
                CellKind::Deep { lb, lmin } => tail += mass * sup_beta(lmin[0]) * sup_beta(lmin[1]) * weight_s(lb),
                CellKind::Scalar => sigma += mass * weight_s(2 * k.level),
            }
        }
        parts.push((factor, value, tail, sigma));
    }
    // J = A + σJ for the unweighted pencil integral.
    let (j_value, j_tail) = parts
        .iter()
        .find(|(f, ..)| f.is_none())
        .map(|(_, a, t, sigma)| {
            let inv = (Rat::one() - sigma).recip();
            (a * &inv, t * &inv)
        })
        .unwrap_or_default();
    let mut value = Rat::zero();
    let mut tail = Rat::zero();
    for (factor, a, t, sigma) in &parts {
        if let Some(f) = factor {
            value += f * (a + sigma * &j_value);
            tail += f * (t + sigma * &j_tail);
        }
    }
    let homogeneity = (Rat::one() - qpow(p, -4 * s as i32)).recip();
    Ok(OracleEstimate {
        value: value * &homogeneity,
        tail_bound: tail * homogeneity,
        depth: cfg.depth,
        visits: visits.load(Ordering::Relaxed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_zeta::closed_local_zeta;

    fn reference(kind: EtaleKind, p: u64, lambda: i64, s: i64) -> Rat {
        closed_local_zeta(&kind.class(), p).eval(s as i32, &int(lambda)).unwrap()
    }

    #[test]
    fn contains_closed_form_and_shrinks() {
        for kind in EtaleKind::ALL {
            let class = kind.class();
            let z = reference(kind, 3, 2, 2);
            let mut prev: Option<Rat> = None;
            for depth in 1..=3 {
                let est = padic_oracle_ze(3, &class, &int(2), 2, depth).unwrap();
                assert!(est.contains(&z), "{kind:?} depth {depth}");
                if let Some(t) = prev {
                    assert!(est.tail_bound < t);
                }
                prev = Some(est.tail_bound);
            }
        }
    }

    #[test]
    fn higher_exponent_and_prime() {
        let class = EtaleKind::Inert.class();
        let est = padic_oracle_ze(5, &class, &int(-3), 3, 2).unwrap();
        assert!(est.contains(&reference(EtaleKind::Inert, 5, -3, 3)));
    }

    #[test]
    fn flat_refinement_agrees() {
        let class = EtaleKind::Ramified.class();
        let cfg = OracleConfig { depth: 1, budget: DEFAULT_BUDGET, mode: OracleMode::Flat };
        let est = padic_oracle_ze_with(3, &class, &int(0), 2, &cfg).unwrap();
        // Every residue class but 0.
        assert_eq!(est.visits, 6560);
        assert!(est.contains(&reference(EtaleKind::Ramified, 3, 0, 2)));
    }

    #[test]
    fn errors() {
        let class = EtaleKind::Split.class();
        let tiny = OracleConfig { depth: 3, budget: 100, mode: OracleMode::NormalForm };
        assert_eq!(padic_oracle_ze_with(3, &class, &int(0), 2, &tiny), Err(Error::BudgetExceeded { budget: 100 }));
        assert!(matches!(padic_oracle_ze(3, &class, &int(5), 2, 1), Err(Error::SpectralBound { .. })));
        assert_eq!(padic_oracle_ze(3, &class, &int(0), 1, 1), Err(Error::BadExponent(1)));
        assert_eq!(padic_oracle_ze(9, &class, &int(0), 2, 1), Err(Error::NotOddPrime(9)));
        assert!(matches!(padic_oracle_ze(3, &class, &int(0), 2, 40), Err(Error::PrecisionOverflow { .. })));
    }

    #[test]
    fn jets_track_gradients() {
        // Cell 3 + 9h₀, 5 + 9h₁ at p = 3.
        let x = Jet::<2>::var(3, 0, 9, 3);
        let y = Jet::<2>::var(5, 1, 9, 3);
        let f = x * x * y - y.scale(2);
        assert_eq!(f.v, 35);
        assert_eq!(f.d, [270, 63]);
        // Degree ≥ 2 part: 405h₀² + 486h₀h₁ + 729h₀²h₁.
        assert_eq!(f.eta, 4);
        assert_eq!(f.eta_var, [4, 5]);
        // h₁ enters linearly at valuation 2 and elsewhere only at 5.
        assert!(f.submersive());
        let z = Jet::<2>::var(0, 0, 9, 3);
        assert!(!(z * z).submersive());
    }
}
