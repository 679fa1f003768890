//! Volumes of the strata S_E(l₁,l₂) ⊂ W(o) = Sym²(o²), by refinement of the
//! residue classes of W(o) mod p^n up to a level limit N.

use num_traits::{One, Zero};

use crate::algebra::rat::{int, qpow, Rat};
use crate::error::{Error, Result};
use crate::local_field::{is_prime, legendre, EtaleClass, EtaleKind};

use super::padic::{probe, resolved_min, Jet};

type J3 = Jet<3>;

struct Stratum {
    p: i128,
    level_limit: u32,
    l1: u32,
    /// Required v(Q) = 2l₁ + 2l₂ + v(d).
    vq: u32,
    chi: i8,
}

impl Stratum {
    /// Volume of S_E(l₁,l₂) inside the cell z₀ + p^n o³.
    fn cell(&self, z0: [i128; 3], n: u32) -> Result<Rat> {
        let p = self.p;
        let step = p.pow(n);
        let [x1, x12, x2]: [J3; 3] = std::array::from_fn(|i| Jet::var(z0[i], i, step, p));
        // Q = −4 det [[x1, x12/2], [x12/2, x2]]
        let q = x12 * x12 - (x1 * x2).scale(4);
        let coords = [x1, x12, x2];
        let content_lb = coords.iter().map(|c| {
            let (v, _, prec) = probe(c);
            v.min(prec)
        });
        let (qv, qg, qprec) = probe(&q);
        if content_lb.min().expect("three") > self.l1 || qv.min(qprec) > self.vq {
            return Ok(Rat::zero());
        }
        let mass = qpow(p as u64, -3 * n as i32);
        match resolved_min(&coords) {
            Some(m) if m != self.l1 => return Ok(Rat::zero()),
            Some(_) if qv < qprec => {
                let unit = (q.v / p.pow(qv)).rem_euclid(p) as i64;
                let chi = legendre(unit, p as u64).expect("unit mod odd prime");
                return Ok(if qv == self.vq && chi == self.chi { mass } else { Rat::zero() });
            }
            Some(_) if q.submersive() => {
                // Q uniform on p^r o.
                let r = qg;
                if r > self.vq {
                    return Ok(Rat::zero());
                }
                let shell = (Rat::one() - qpow(p as u64, -1)) / int(2);
                return Ok(mass * shell * qpow(p as u64, -((self.vq - r) as i32)));
            }
            _ => {}
        }
        if n >= self.level_limit {
            return Err(Error::LevelTooSmall { n: self.level_limit, l1: self.l1, l2: (self.vq - 2 * self.l1) / 2 });
        }
        let mut total = Rat::zero();
        for c in 0..(p * p * p) {
            let h = [c % p, c / p % p, c / (p * p)];
            total += self.cell(std::array::from_fn(|i| z0[i] + h[i] * step), n + 1)?;
        }
        Ok(total)
    }
}

/// vol S_E(l₁,l₂) from residue classes mod p^n, n ≤ N. Fails if some class
/// of level N still straddles the stratum boundary.
pub fn sym_volume_census(p: u64, level_limit: u32, class: &EtaleClass, l1: u32, l2: u32) -> Result<Rat> {
    if p % 2 == 0 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let (vd, chi) = match class.kind {
        EtaleKind::Split => (0, 1),
        EtaleKind::Inert => (0, -1),
        EtaleKind::Ramified => (1, 1),
    };
    let stratum = Stratum { p: p as i128, level_limit, l1, vq: 2 * l1 + 2 * l2 + vd, chi };
    let pi = p as i128;
    let mut total = Rat::zero();
    for c in 0..(pi * pi * pi) {
        total += stratum.cell([c % pi, c / pi % pi, c / (pi * pi)], 1)?;
    }
    Ok(total)
}

/// ½(1−q^{-1})(1−q^{-2})·{q^{-3l₁}L(1,η) | q^{-3l₁−2l₂} | q^{-3l₁−2l₂−1}}.
pub fn sym_volume_closed(q: u64, class: &EtaleClass, l1: u32, l2: u32) -> Rat {
    let base = (Rat::one() - qpow(q, -1)) * (Rat::one() - qpow(q, -2)) / int(2);
    let (l1, l2) = (l1 as i32, l2 as i32);
    match class.kind {
        EtaleKind::Ramified => base * qpow(q, -3 * l1 - 2 * l2 - 1),
        _ if l2 > 0 => base * qpow(q, -3 * l1 - 2 * l2),
        _ => {
            let eta = int(i64::from(class.eta_at_uniformizer));
            base * qpow(q, -3 * l1) / (Rat::one() - eta / int(q as i64))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat::frac;

    #[test]
    fn examples() {
        let split = EtaleKind::Split.class();
        assert_eq!(sym_volume_census(3, 4, &split, 0, 0).unwrap(), frac(4, 9));
        assert_eq!(sym_volume_closed(3, &split, 0, 0), frac(4, 9));
        let ram = EtaleKind::Ramified.class();
        assert_eq!(sym_volume_census(3, 4, &ram, 0, 0).unwrap(), frac(8, 81));
    }

    #[test]
    fn matches_closed_form_and_fills_less_than_everything() {
        for p in [3u64, 5] {
            let mut sum = Rat::zero();
            for kind in EtaleKind::ALL {
                let class = kind.class();
                for l1 in 0..=1 {
                    for l2 in 0..=1 {
                        let v = sym_volume_census(p, 4, &class, l1, l2).unwrap();
                        assert_eq!(v, sym_volume_closed(p, &class, l1, l2), "p={p} {kind:?} {l1} {l2}");
                        sum += v;
                    }
                }
            }
            assert!(sum < Rat::one());
        }
    }

    #[test]
    fn level_limit_enforced() {
        let split = EtaleKind::Split.class();
        assert!(matches!(sym_volume_census(3, 1, &split, 1, 0), Err(Error::LevelTooSmall { .. })));
    }
}
