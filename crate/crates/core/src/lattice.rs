//! Rank-2 sublattices of `Z + tau Z` in Hermite normal form, used as an
//! independent model of ideal arithmetic.

use crate::arith::{ext_gcd, gcd, pow, val, Val};
use crate::error::{Error, Result};
use crate::order::OrderContext;

/// The lattice with basis `(n, 0)` and `(a, g)` in coordinates `(1, tau)`,
/// with `n > 0`, `g > 0` and `0 <= a < n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lattice {
    pub n: i128,
    pub a: i128,
    pub g: i128,
}

fn ov() -> Error {
    Error::Overflow("lattice reduction")
}

impl Lattice {
    /// Hermite normal form of the lattice spanned by `gens`.
    pub fn from_generators(gens: &[(i128, i128)]) -> Result<Lattice> {
        let mut n: i128 = 0;
        let mut cur: Option<(i128, i128)> = None;
        for &(u, v) in gens {
            if v == 0 {
                n = gcd(n, u);
                continue;
            }
            match cur {
                None => cur = Some((u, v)),
                Some((a, g)) => {
                    let (h, s, t) = ext_gcd(g, v);
                    let na = s.checked_mul(a).and_then(|x| x.checked_add(t.checked_mul(u)?)).ok_or_else(ov)?;
                    let kern =
                        (v / h).checked_mul(a).and_then(|x| x.checked_sub((g / h).checked_mul(u)?)).ok_or_else(ov)?;
                    n = gcd(n, kern);
                    cur = Some((na, h));
                }
            }
        }
        let (a, g) = match cur {
            Some(c) if n != 0 => c,
            _ => return Err(Error::Invariant("generators do not span a full-rank lattice".into())),
        };
        let (a, g) = if g < 0 { (-a, -g) } else { (a, g) };
        Ok(Lattice { n, a: a.rem_euclid(n), g })
    }

    pub fn contains(&self, u: i128, v: i128) -> bool {
        if v % self.g != 0 {
            return false;
        }
        let k = v / self.g;
        match k.checked_mul(self.a).and_then(|x| u.checked_sub(x)) {
            Some(r) => r % self.n == 0,
            None => false,
        }
    }

    /// Index in `Z + tau Z`.
    pub fn index(&self) -> Option<i128> {
        self.n.checked_mul(self.g)
    }

    pub fn basis(&self) -> [(i128, i128); 2] {
        [(self.n, 0), (self.a, self.g)]
    }

    /// The ideal `p^x (p^y Z + (z + tau) Z)`.
    pub fn of_triple(p: i128, x: u32, y: u32, z: i128) -> Result<Lattice> {
        let px = pow(p, x)?;
        let pxy = px.checked_mul(pow(p, y)?).ok_or_else(ov)?;
        Lattice::from_generators(&[(pxy, 0), (px.checked_mul(z).ok_or_else(ov)?, px)])
    }

    /// Product of two ideals given as lattices.
    pub fn mul(&self, other: &Lattice, ctx: &OrderContext) -> Result<Lattice> {
        let mut gens = Vec::with_capacity(4);
        for x in self.basis() {
            for y in other.basis() {
                gens.push(ctx.mul_elements(x, y)?);
            }
        }
        Lattice::from_generators(&gens)
    }

    /// The principal ideal generated by `a + b tau`.
    pub fn principal(a: i128, b: i128, ctx: &OrderContext) -> Result<Lattice> {
        let t = ctx.mul_elements((a, b), (0, 1))?;
        Lattice::from_generators(&[(a, b), t])
    }

    /// Whether the lattice is an ideal: closed under multiplication by tau.
    pub fn is_ideal(&self, ctx: &OrderContext) -> bool {
        self.basis().iter().all(|&x| match ctx.mul_elements(x, (0, 1)) {
            Ok((u, v)) => self.contains(u, v),
            Err(_) => false,
        })
    }

    /// Reads off the standard form `p^x (p^y Z + (z + tau) Z)`; fails when
    /// the lattice is not of that shape.
    pub fn to_triple(&self, p: i128) -> Result<(u32, u32, i128)> {
        let bad = || Error::Invariant(format!("lattice {self:?} is not a {p}-primary standard form"));
        let l = self.g;
        if self.n % l != 0 || self.a % l != 0 {
            return Err(bad());
        }
        let m = self.n / l;
        let x = pure_power(l, p).ok_or_else(bad)?;
        let y = pure_power(m, p).ok_or_else(bad)?;
        Ok((x, y, (self.a / l).rem_euclid(m)))
    }
}

fn pure_power(n: i128, p: i128) -> Option<u32> {
    match val(n, p) {
        Val::Fin(k) if pow(p, k).ok()? == n => Some(k),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::make_order;

    #[test]
    fn hnf_basic() {
        let l = Lattice::from_generators(&[(8, 0), (4, 2), (6, 4)]).unwrap();
        assert_eq!(l, Lattice { n: 2, a: 0, g: 2 });
        let l = Lattice::from_generators(&[(3, 5), (7, 2)]).unwrap();
        assert_eq!(l.index(), Some(29));
        assert!(Lattice::from_generators(&[(1, 1), (2, 2)]).is_err());
    }

    #[test]
    fn membership_brute_force() {
        let l = Lattice::from_generators(&[(6, 4), (10, -2), (3, 3)]).unwrap();
        for u in -30..30 {
            for v in -30..30 {
                // (u, v) in the span iff it is an integer combination of the basis
                let k = v / l.g;
                let direct = v % l.g == 0 && (u - k * l.a) % l.n == 0;
                assert_eq!(l.contains(u, v), direct);
            }
        }
        for g in [(6, 4), (10, -2), (3, 3)] {
            assert!(l.contains(g.0, g.1));
        }
    }

    #[test]
    fn pp_equals_p_times_p() {
        let o = make_order(-2, 2).unwrap();
        let p = Lattice::of_triple(2, 0, 1, 0).unwrap();
        assert!(p.is_ideal(&o));
        let pp = p.mul(&p, &o).unwrap();
        assert_eq!(pp.to_triple(2).unwrap(), (1, 1, 0));
        let tau = Lattice::principal(0, 1, &o).unwrap();
        assert_eq!(tau.to_triple(2).unwrap(), (0, 3, 0));
    }
}
