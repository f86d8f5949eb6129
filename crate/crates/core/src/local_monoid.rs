//! The monoid `M_{f,p}` of p-primary ideals of `O_f`, written as triples
//! `(x, y, z)` standing for `p^x (p^y Z + (z + tau) Z)`.

use std::cmp::Ordering;
use std::fmt;

use crate::arith::{mod_inverse, pow, val, Val};
use crate::error::{arg, Error, Result};
use crate::lattice::Lattice;
use crate::order::{make_order, OrderContext, SplittingType};

/// Default ceiling on the modulus `p^m` scanned by brute-force enumeration.
pub const DEFAULT_MAX_MODULUS: i128 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LocalTriple {
    pub p: i128,
    pub x: u32,
    pub y: u32,
    pub z: i128,
}

impl LocalTriple {
    pub const fn new(p: i128, x: u32, y: u32, z: i128) -> Self {
        LocalTriple { p, x, y, z }
    }

    pub const fn identity(p: i128) -> Self {
        LocalTriple { p, x: 0, y: 0, z: 0 }
    }

    /// The atom `pO`.
    pub const fn p_o(p: i128) -> Self {
        LocalTriple { p, x: 1, y: 0, z: 0 }
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.y == 0
    }

    /// `2x + y`; the norm is `p^(2x+y)`.
    pub fn norm_exponent(&self) -> u32 {
        2 * self.x + self.y
    }

    /// Sort key: norm exponent, then `y`, then `z`.
    pub fn key(&self) -> (u32, u32, i128, u32) {
        (self.norm_exponent(), self.y, self.z, self.x)
    }
}

impl PartialOrd for LocalTriple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LocalTriple {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.p, self.key()).cmp(&(other.p, other.key()))
    }
}

impl fmt::Display for LocalTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.x, self.y, self.z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomClass {
    /// The atom `pO = (1, 0, 0)`.
    PrincipalP,
    /// An atom `(0, m, r)` with `m >= 1`.
    Nontrivial { m: u32, r: i128 },
}

/// Whether `t` lies in `M_{f,p}`.
pub fn is_member(ctx: &OrderContext, t: &LocalTriple) -> Result<bool> {
    let py = pow(t.p, t.y)?;
    if t.z < 0 || t.z >= py {
        return Ok(false);
    }
    Ok(val(ctx.norm_form(t.z)?, t.p).at_least(t.y))
}

/// Validates `t` as an element of `M_{f,p}` with `p | f`.
pub fn validate(ctx: &OrderContext, t: &LocalTriple) -> Result<()> {
    ctx.require_conductor_prime(t.p)?;
    if !is_member(ctx, t)? {
        return arg(format!("{t} is not an element of M_(f,{})", t.p));
    }
    Ok(())
}

/// The product on `M_{f,p}`.
pub fn star(ctx: &OrderContext, s: &LocalTriple, t: &LocalTriple) -> Result<LocalTriple> {
    if s.p != t.p {
        return arg("triples belong to different primes");
    }
    validate(ctx, s)?;
    validate(ctx, t)?;
    star_unchecked(ctx, s, t)
}

/// The product without membership checks. Inputs must be valid.
pub fn star_unchecked(ctx: &OrderContext, s: &LocalTriple, t: &LocalTriple) -> Result<LocalTriple> {
    star_with(ctx, s, t, None)
}

fn star_with(ctx: &OrderContext, s: &LocalTriple, t: &LocalTriple, t_shift: Option<i128>) -> Result<LocalTriple> {
    let p = s.p;
    let (u, v, w) = (s.x, s.y, s.z);
    let (x, y, z) = (t.x, t.y, t.z);
    let ov = || Error::Overflow("star product");
    let nw = ctx.norm_form(w)?;
    let nz = ctx.norm_form(z)?;
    let sum = w + z + ctx.eps;
    let g = v.min(y).min(match val(sum, p) {
        Val::Fin(k) => k,
        Val::Inf => u32::MAX,
    });
    let e = [Val::Fin(g), val(w - z, p), val(nw, p).minus(v), val(nz, p).minus(y)]
        .into_iter()
        .min()
        .and_then(Val::finite)
        .expect("bounded by g");
    let a = u + x + g;
    let b = v + y + e - 2 * g;
    let pg = pow(p, g)?;
    let modulus = pow(p, v.min(y) - g)?;
    let mut tt =
        mod_inverse(sum / pg, modulus).ok_or_else(|| Error::Invariant("star coefficient is not invertible".into()))?;
    if let Some(k) = t_shift {
        tt += k * modulus;
    }
    let h = if y >= v { z } else { w };
    let nh = ctx.norm_form(h)?;
    if nh % pg != 0 {
        return Err(Error::Invariant("norm not divisible by p^g".into()));
    }
    let pb = pow(p, b)?;
    let c = tt.checked_mul(nh / pg).and_then(|q| h.checked_sub(q)).ok_or_else(ov)?.rem_euclid(pb);
    Ok(LocalTriple { p, x: a, y: b, z: c })
}

/// The product computed with the coefficient `t` replaced by
/// `t + k p^(min(v,y)-g)`; the result must not depend on `k`.
pub fn star_shifted(ctx: &OrderContext, s: &LocalTriple, t: &LocalTriple, k: i128) -> Result<LocalTriple> {
    star_with(ctx, s, t, Some(k))
}

pub fn norm_exponent(t: &LocalTriple) -> u32 {
    t.norm_exponent()
}

/// Invertibility: `v_p(N(z + tau)) = y` exactly; `y = 0` is always invertible.
pub fn is_invertible(ctx: &OrderContext, t: &LocalTriple) -> Result<bool> {
    if t.y == 0 {
        return Ok(true);
    }
    Ok(val(ctx.norm_form(t.z)?, t.p) == Val::Fin(t.y))
}

pub fn is_atom(t: &LocalTriple) -> Result<bool> {
    if t.is_identity() {
        return arg("the identity is neither an atom nor a non-atom");
    }
    Ok((t.x == 1 && t.y == 0) || (t.x == 0 && t.y >= 1))
}

pub fn atom_class(t: &LocalTriple) -> Result<Option<AtomClass>> {
    if !is_atom(t)? {
        return Ok(None);
    }
    Ok(Some(if t.y == 0 { AtomClass::PrincipalP } else { AtomClass::Nontrivial { m: t.y, r: t.z } }))
}

pub fn conjugate(ctx: &OrderContext, t: &LocalTriple) -> Result<LocalTriple> {
    let py = pow(t.p, t.y)?;
    Ok(LocalTriple { z: (py - t.z - ctx.eps).rem_euclid(py), ..*t })
}

/// All atoms `(0, m, r)` of norm exponent `m`, ascending in `r`. The atom
/// `pO` is not included.
pub fn enumerate_atoms(
    ctx: &OrderContext,
    p: i128,
    m: u32,
    invertible_only: bool,
    max_modulus: i128,
) -> Result<Vec<LocalTriple>> {
    ctx.require_conductor_prime(p)?;
    if m == 0 {
        return arg("norm exponent must be positive");
    }
    let pm = match pow(p, m) {
        Ok(q) if q <= max_modulus => q,
        _ => return Err(Error::Resource(format!("{p}^{m} exceeds the modulus ceiling {max_modulus}"))),
    };
    let mut out = Vec::new();
    for r in 0..pm {
        let vr = val(ctx.norm_form(r)?, p);
        let ok = if invertible_only { vr == Val::Fin(m) } else { vr.at_least(m) };
        if ok {
            out.push(LocalTriple::new(p, 0, m, r));
        }
    }
    Ok(out)
}

fn phi_ppow(p: i128, k: u32) -> Result<i128> {
    if k == 0 {
        return Ok(1);
    }
    Ok(pow(p, k - 1)? * (p - 1))
}

/// Closed-form number of invertible atoms `(0, m, r)` of norm `p^m`.
pub fn atom_count_closed_form(ctx: &OrderContext, p: i128, m: u32) -> Result<i128> {
    let v = ctx.require_conductor_prime(p)?;
    let split = ctx.splitting(p);
    if m == 0 {
        return arg("norm exponent must be positive");
    }
    if m % 2 == 0 && m / 2 < v {
        return phi_ppow(p, m / 2);
    }
    Ok(if m == 2 * v {
        match split {
            SplittingType::Inert => pow(p, v)?,
            SplittingType::Ramified => phi_ppow(p, v)?,
            SplittingType::Split => pow(p, v - 1)? * (p - 2),
        }
    } else if m == 2 * v + 1 {
        match split {
            SplittingType::Inert => 0,
            SplittingType::Ramified => pow(p, v)?,
            SplittingType::Split => 2 * phi_ppow(p, v)?,
        }
    } else if m > 2 * v + 1 && split == SplittingType::Split {
        2 * phi_ppow(p, v)?
    } else {
        0
    })
}

/// Largest norm exponent of an invertible atom, `None` when `p` splits.
pub fn max_atom_exponent(ctx: &OrderContext, p: i128) -> Result<Option<u32>> {
    let v = ctx.require_conductor_prime(p)?;
    Ok(match ctx.splitting(p) {
        SplittingType::Inert => Some(2 * v),
        SplittingType::Ramified => Some(2 * v + 1),
        SplittingType::Split => None,
    })
}

/// Writes `t = (pO)^n * v` with `v` an atom or the identity.
pub fn normal_form(t: &LocalTriple) -> (u32, LocalTriple) {
    if t.y >= 1 {
        (t.x, LocalTriple::new(t.p, 0, t.y, t.z))
    } else if t.x >= 1 {
        (t.x - 1, LocalTriple::p_o(t.p))
    } else {
        (0, LocalTriple::identity(t.p))
    }
}

/// The isomorphism `M_{f,p} -> M_{f',p}` with `f' = p^(v_p(f))`.
pub fn reduce_conductor(t: &LocalTriple, ctx_f: &OrderContext, ctx_fp: &OrderContext) -> Result<LocalTriple> {
    let (c, shift) = conductor_shift(t.p, ctx_f, ctx_fp)?;
    validate(ctx_f, t)?;
    let py = pow(t.p, t.y)?;
    let inv = mod_inverse(c, py).ok_or_else(|| Error::Invariant("cofactor not invertible".into()))?;
    let z = inv.checked_mul((t.z + shift).rem_euclid(py)).ok_or(Error::Overflow("conductor reduction"))?.rem_euclid(py);
    Ok(LocalTriple { z, ..*t })
}

/// `(c, k)` with `c = f / f'` and `tau = c tau' + k`.
fn conductor_shift(p: i128, ctx_f: &OrderContext, ctx_fp: &OrderContext) -> Result<(i128, i128)> {
    let v = ctx_f.require_conductor_prime(p)?;
    if ctx_f.d != ctx_fp.d || ctx_fp.f != pow(p, v)? {
        return arg(format!("target conductor must be {p}^{v} in the same field"));
    }
    let c = ctx_f.f / ctx_fp.f;
    let diff = ctx_f.eps - c * ctx_fp.eps;
    if diff % 2 != 0 {
        return Err(Error::Invariant("eps - c eps' is odd".into()));
    }
    Ok((c, diff / 2))
}

/// The conductor reduction computed through lattices: extends the ideal to
/// `O_{f'}` and reads off its standard form.
pub fn reduce_conductor_oracle(t: &LocalTriple, ctx_f: &OrderContext, ctx_fp: &OrderContext) -> Result<LocalTriple> {
    let (c, k) = conductor_shift(t.p, ctx_f, ctx_fp)?;
    let l = Lattice::of_triple(t.p, t.x, t.y, t.z)?;
    let mut gens = Vec::new();
    for (a, b) in l.basis() {
        // a + b tau = (a + b k) + b c tau'
        let e = (a + b * k, b * c);
        gens.push(e);
        gens.push(ctx_fp.mul_elements(e, (0, 1))?);
    }
    let (x, y, z) = Lattice::from_generators(&gens)?.to_triple(t.p)?;
    Ok(LocalTriple::new(t.p, x, y, z))
}

/// The order `O_{p^(v_p(f))}` of the same field.
pub fn local_conductor_order(ctx: &OrderContext, p: i128) -> Result<OrderContext> {
    let v = ctx.require_conductor_prime(p)?;
    make_order(ctx.d, pow(p, v)?)
}

/// Product computed by multiplying the ideals as lattices.
pub fn lattice_oracle_mul(ctx: &OrderContext, s: &LocalTriple, t: &LocalTriple) -> Result<LocalTriple> {
    if s.p != t.p {
        return arg("triples belong to different primes");
    }
    let a = Lattice::of_triple(s.p, s.x, s.y, s.z)?;
    let b = Lattice::of_triple(t.p, t.x, t.y, t.z)?;
    let (x, y, z) = a.mul(&b, ctx)?.to_triple(s.p)?;
    Ok(LocalTriple::new(s.p, x, y, z))
}
