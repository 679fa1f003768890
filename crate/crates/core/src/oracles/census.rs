//! Orbit classification of pairs of 2×2 matrices over F_q and the full census.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::rat::{frac, int, qpow, Rat};
use crate::error::{Error, Result};
use crate::local_field::{is_prime, legendre};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum OrbitClass {
    X0,
    X1,
    X2,
    X3,
    X4,
    X5,
    X6,
    X7,
}

impl OrbitClass {
    pub const ALL: [OrbitClass; 8] = [
        OrbitClass::X0,
        OrbitClass::X1,
        OrbitClass::X2,
        OrbitClass::X3,
        OrbitClass::X4,
        OrbitClass::X5,
        OrbitClass::X6,
        OrbitClass::X7,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for OrbitClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Row-major 2×2 matrix with entries in [0, q).
pub type Mat2 = [[u64; 2]; 2];

fn det(m: &Mat2, q: u64) -> u64 {
    (m[0][0] * m[1][1] % q + q * q - m[0][1] * m[1][0] % q) % q
}

fn is_zero(m: &Mat2) -> bool {
    m.iter().flatten().all(|&x| x == 0)
}

/// det[[a,b],[c,d]] mod q.
fn d2(a: u64, b: u64, c: u64, d: u64, q: u64) -> u64 {
    (a * d % q + q - b * c % q) % q
}

/// The three binary quadratic forms attached to (A, B): row pencil F₁, column
/// pencil F₂ and determinant pencil F₃, each as (u², uv, v²) coefficients mod q.
pub fn pencil_forms(a: &Mat2, b: &Mat2, q: u64) -> [[u64; 3]; 3] {
    let [[x11, x12], [x21, x22]] = *a;
    let [[y11, y12], [y21, y22]] = *b;
    let f1 = [
        d2(x11, x12, y11, y12, q),
        (d2(x11, x12, y21, y22, q) + d2(x21, x22, y11, y12, q)) % q,
        d2(x21, x22, y21, y22, q),
    ];
    let f2 = [
        d2(x11, y11, x21, y21, q),
        (d2(x11, y12, x21, y22, q) + d2(x12, y11, x22, y21, q)) % q,
        d2(x12, y12, x22, y22, q),
    ];
    let cross = (x11 * y22 + y11 * x22 + 2 * q * q - x12 * y21 - y12 * x21) % q;
    let f3 = [det(a, q), cross, det(b, q)];
    [f1, f2, f3]
}

/// Discriminant b² − 4ac of a binary form mod q; equals P(x) for any of the three.
pub fn discriminant(f: &[u64; 3], q: u64) -> u64 {
    (f[1] * f[1] % q + 4 * q * q - 4 * (f[0] * f[2] % q)) % q
}

/// Number of points of P¹(F_q) where the binary form vanishes.
pub fn projective_roots(f: &[u64; 3], q: u64) -> u64 {
    let at = |u: u64, v: u64| (f[0] * u % q * u + f[1] * u % q * v + f[2] * v % q * v) % q;
    let mut n = u64::from(at(0, 1) == 0);
    for u in 0..q {
        n += u64::from(at(1, u) == 0);
    }
    n
}

/// Orbit of (A, B) ∈ V(F_q) under GL₂×GL₂×GL₂.
pub fn classify_orbit(a: &Mat2, b: &Mat2, q: u64) -> OrbitClass {
    if is_zero(a) && is_zero(b) {
        return OrbitClass::X0;
    }
    let va = [a[0][0], a[0][1], a[1][0], a[1][1]];
    let vb = [b[0][0], b[0][1], b[1][0], b[1][1]];
    let dependent = (0..4).all(|i| (i..4).all(|j| (va[i] * vb[j] + q * q - va[j] * vb[i]) % q == 0));
    if dependent {
        let g = if is_zero(a) { b } else { a };
        return if det(g, q) == 0 { OrbitClass::X1 } else { OrbitClass::X2 };
    }
    let [f1, _, f3] = pencil_forms(a, b, q);
    let disc = discriminant(&f1, q);
    if disc != 0 {
        return match legendre(disc as i64, q).expect("odd prime, unit") {
            1 => OrbitClass::X6,
            _ => OrbitClass::X7,
        };
    }
    if f3.iter().any(|&c| c != 0) {
        return OrbitClass::X5;
    }
    // A two-dimensional space of singular matrices: a common image or a common kernel.
    let image_of = |m: &Mat2| if m[0][0] != 0 || m[1][0] != 0 { (m[0][0], m[1][0]) } else { (m[0][1], m[1][1]) };
    let (ia, ib) = (image_of(a), image_of(b));
    if (ia.0 * ib.1 + q * q - ia.1 * ib.0) % q == 0 {
        OrbitClass::X3
    } else {
        OrbitClass::X4
    }
}

/// Orbit sizes over F_q.
pub fn orbit_sizes(q: u64) -> [Rat; 8] {
    let one = int(1);
    let a = &one + qpow(q, -1);
    let b = &one - qpow(q, -1);
    let c = &one - qpow(q, -2);
    [
        int(1),
        qpow(q, 4) * &a * &a * &c,
        qpow(q, 5) * &c * &c,
        qpow(q, 5) * &c * &c,
        qpow(q, 5) * &c * &c,
        qpow(q, 7) * &c * &c * &c,
        frac(1, 2) * qpow(q, 8) * &a * &c * &c,
        frac(1, 2) * qpow(q, 8) * &b * &b * &b * &c,
    ]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusResult {
    pub q: u64,
    pub counts: [u64; 8],
}

impl CensusResult {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Largest q whose q⁸ points are enumerated.
pub const CENSUS_MAX_Q: u64 = 7;

/// Classifies every point of V(F_q).
pub fn orbit_census(q: u64) -> Result<CensusResult> {
    if q % 2 == 0 || !is_prime(q) {
        return Err(Error::NotOddPrime(q));
    }
    if q > CENSUS_MAX_Q {
        return Err(Error::CensusBudget { q });
    }
    let q4 = q.pow(4);
    let unpack = |i: u64| -> Mat2 { [[i % q, i / q % q], [i / (q * q) % q, i / (q * q * q)]] };
    let counts = (0..q4)
        .into_par_iter()
        .map(|i| {
            let a = unpack(i);
            let mut c = [0u64; 8];
            for j in 0..q4 {
                c[classify_orbit(&a, &unpack(j), q).index()] += 1;
            }
            c
        })
        .reduce(|| [0u64; 8], |mut x, y| {
            for k in 0..8 {
                x[k] += y[k];
            }
            x
        });
    Ok(CensusResult { q, counts })
}

/// Applies (g₁, g₂, g₃): (A, B) ↦ (g₁⁻¹Ag₂, g₁⁻¹Bg₂)·g₃, with `g1_inv` given directly.
pub fn act(a: &Mat2, b: &Mat2, g1_inv: &Mat2, g2: &Mat2, g3: &Mat2, q: u64) -> (Mat2, Mat2) {
    let mul = |x: &Mat2, y: &Mat2| -> Mat2 {
        let mut r = [[0u64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                r[i][j] = (x[i][0] * y[0][j] + x[i][1] * y[1][j]) % q;
            }
        }
        r
    };
    let a1 = mul(&mul(g1_inv, a), g2);
    let b1 = mul(&mul(g1_inv, b), g2);
    let comb = |s: u64, t: u64| -> Mat2 {
        let mut r = [[0u64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                r[i][j] = (s * a1[i][j] + t * b1[i][j]) % q;
            }
        }
        r
    };
    (comb(g3[0][0], g3[1][0]), comb(g3[0][1], g3[1][1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize, j: usize) -> Mat2 {
        let mut m = [[0; 2]; 2];
        m[i][j] = 1;
        m
    }

    #[test]
    fn representatives() {
        let z = [[0; 2]; 2];
        assert_eq!(classify_orbit(&z, &e(0, 1), 3), OrbitClass::X1);
        assert_eq!(classify_orbit(&e(0, 0), &e(0, 1), 3), OrbitClass::X3);
        assert_eq!(classify_orbit(&e(0, 0), &e(1, 0), 3), OrbitClass::X4);
        let id = [[1, 0], [0, 1]];
        assert_eq!(classify_orbit(&z, &id, 5), OrbitClass::X2);
        // x(δ) = (I, [[0,1],[d,0]]) has P = 4d.
        assert_eq!(classify_orbit(&id, &[[0, 1], [2, 0]], 5), OrbitClass::X7);
        assert_eq!(classify_orbit(&id, &[[0, 1], [1, 0]], 5), OrbitClass::X6);
        // (I, nilpotent): pencil (u)² has a double root.
        assert_eq!(classify_orbit(&id, &e(0, 1), 5), OrbitClass::X5);
    }

    #[test]
    fn census_q3() {
        let c = orbit_census(3).unwrap();
        assert_eq!(c.counts, [1, 128, 192, 192, 192, 1536, 3456, 864]);
        assert_eq!(c.total(), 6561);
        for (k, size) in orbit_sizes(3).iter().enumerate() {
            assert_eq!(size, &int(c.counts[k] as i64));
        }
        assert!(matches!(orbit_census(11), Err(Error::CensusBudget { .. })));
        assert!(orbit_census(9).is_err());
    }

    #[test]
    fn all_forms_share_the_discriminant() {
        let q = 7;
        for i in 0..200u64 {
            let a = [[i % 7, i * 3 % 7], [i * 5 % 7, (i * i + 1) % 7]];
            let b = [[(i + 2) % 7, i * i % 7], [(3 * i + 1) % 7, (i / 7) % 7]];
            let f = pencil_forms(&a, &b, q);
            let d = discriminant(&f[0], q);
            assert_eq!(discriminant(&f[1], q), d);
            assert_eq!(discriminant(&f[2], q), d);
        }
    }
}
