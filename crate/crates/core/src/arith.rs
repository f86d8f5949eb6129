//! Integer primitives: valuations, residues, inverses, Kronecker symbols,
//! squares modulo prime powers and root counts.
//!
//! Everything works on `i128`. Functions that can overflow use checked
//! operations and report [`Error::Overflow`].

use std::cmp::Ordering;
use std::fmt;

use crate::error::{arg, Error, Result};

/// A p-adic valuation. `Inf` is the valuation of zero and compares above
/// every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Val {
    Fin(u32),
    Inf,
}

impl Val {
    pub fn is_inf(self) -> bool {
        matches!(self, Val::Inf)
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            Val::Fin(k) => Some(k),
            Val::Inf => None,
        }
    }

    /// `self - k`, saturating at zero for finite values. `Inf - k = Inf`.
    pub fn minus(self, k: u32) -> Val {
        match self {
            Val::Fin(v) => Val::Fin(v.saturating_sub(k)),
            Val::Inf => Val::Inf,
        }
    }

    /// True when the valuation is at least `k`.
    pub fn at_least(self, k: u32) -> bool {
        match self {
            Val::Fin(v) => v >= k,
            Val::Inf => true,
        }
    }
}

impl PartialOrd for Val {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Val {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Val::Fin(a), Val::Fin(b)) => a.cmp(b),
            (Val::Fin(_), Val::Inf) => Ordering::Less,
            (Val::Inf, Val::Fin(_)) => Ordering::Greater,
            (Val::Inf, Val::Inf) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Fin(k) => write!(f, "{k}"),
            Val::Inf => write!(f, "inf"),
        }
    }
}

/// A prime power `p^n` with its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimePower {
    pub p: i128,
    pub n: u32,
    pub value: i128,
}

impl PrimePower {
    pub fn new(p: i128, n: u32) -> Result<Self> {
        require_prime(p)?;
        Ok(PrimePower { p, n, value: pow(p, n)? })
    }
}

fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    // operands are below 2^64, so the product fits in u128
    (a * b) % m
}

fn pow_mod(mut b: u128, mut e: u128, m: u128) -> u128 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin, exact for every `n < 2^64`. Larger inputs
/// are rejected as non-prime.
pub fn is_prime(n: i128) -> bool {
    if n < 2 || n > u64::MAX as i128 {
        return false;
    }
    let n = n as u128;
    const SMALL: [u128; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub(crate) fn require_prime(p: i128) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        arg(format!("{p} is not prime"))
    }
}

/// Checked `b^e`.
pub fn pow(b: i128, e: u32) -> Result<i128> {
    b.checked_pow(e).ok_or(Error::Overflow("power"))
}

/// Valuation without the primality check. `p` must be a prime.
pub fn val(x: i128, p: i128) -> Val {
    if x == 0 {
        return Val::Inf;
    }
    if p == 2 {
        return Val::Fin(x.trailing_zeros());
    }
    let mut x = x;
    let mut k = 0;
    if let Ok(mut s) = i64::try_from(x) {
        let q = p as i64;
        while s % q == 0 {
            s /= q;
            k += 1;
        }
        return Val::Fin(k);
    }
    while x % p == 0 {
        x /= p;
        k += 1;
    }
    Val::Fin(k)
}

/// Largest `k` with `p^k | x`, or `Inf` for `x = 0`.
pub fn vp(x: i128, p: i128) -> Result<Val> {
    require_prime(p)?;
    Ok(val(x, p))
}

/// The residue of `x` in `[0, y-1]`.
pub fn rem(x: i128, y: i128) -> Result<i128> {
    if y <= 0 {
        return arg(format!("modulus {y} must be positive"));
    }
    Ok(x.rem_euclid(y))
}

/// Extended gcd: returns `(g, s, t)` with `s*a + t*b = g >= 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `u` in `[0, m-1]` with `t*u = 1 mod m`, or `None` when `gcd(t, m) > 1`.
/// For `m = 1` this is `Some(0)`.
pub fn mod_inverse(t: i128, m: i128) -> Option<i128> {
    if m < 1 {
        return None;
    }
    if m == 1 {
        return Some(0);
    }
    let (g, s, _) = ext_gcd(t.rem_euclid(m), m);
    if g != 1 {
        return None;
    }
    Some(s.rem_euclid(m))
}

/// Kronecker symbol `(a/p)` for a prime `p`.
pub fn kronecker(a: i128, p: i128) -> Result<i32> {
    require_prime(p)?;
    if p == 2 {
        if a % 2 == 0 {
            return Ok(0);
        }
        return Ok(match a.rem_euclid(8) {
            1 | 7 => 1,
            _ => -1,
        });
    }
    let r = a.rem_euclid(p);
    if r == 0 {
        return Ok(0);
    }
    let e = pow_mod(r as u128, ((p - 1) / 2) as u128, p as u128);
    Ok(if e == 1 { 1 } else { -1 })
}

/// Whether `c` (coprime to `p`) is a square modulo `p^l`, `l >= 1`.
fn unit_is_square(c: i128, p: i128, l: u32) -> bool {
    if p == 2 {
        match l {
            1 => true,
            2 => c.rem_euclid(4) == 1,
            _ => c.rem_euclid(8) == 1,
        }
    } else {
        kronecker(c, p) == Ok(1)
    }
}

/// Whether `a` is a square modulo `p^n`.
pub fn is_square_mod_ppow(a: i128, p: i128, n: u32) -> Result<bool> {
    require_prime(p)?;
    if n == 0 {
        return Ok(true);
    }
    let k = match val(a, p) {
        Val::Inf => return Ok(true),
        Val::Fin(k) => k,
    };
    if k >= n {
        return Ok(true);
    }
    if k % 2 == 1 {
        return Ok(false);
    }
    let c = a / pow(p, k)?;
    Ok(unit_is_square(c, p, n - k))
}

/// Number of `y` in `[0, p^l - 1]` with `y^2 = c mod p^l`, for `c` coprime to `p`.
pub fn count_roots_gl(c: i128, p: i128, l: u32) -> Result<u64> {
    require_prime(p)?;
    if l == 0 {
        return arg("l must be positive");
    }
    if c.rem_euclid(p) == 0 {
        return arg(format!("{c} is not coprime to {p}"));
    }
    Ok(if p == 2 {
        match l {
            1 => 1,
            2 if c.rem_euclid(4) == 1 => 2,
            2 => 0,
            _ if c.rem_euclid(8) == 1 => 4,
            _ => 0,
        }
    } else if kronecker(c, p)? == 1 {
        2
    } else {
        0
    })
}

fn phi_ppow(p: i128, k: u32) -> Result<i128> {
    if k == 0 {
        return Ok(1);
    }
    Ok(pow(p, k - 1)? * (p - 1))
}

/// Number of `x` in `[0, p^m - 1]` with `v_p(x^2 - a) = m`, by the closed
/// form case split.
///
/// For odd `p` with `p` not dividing `a` and `a` a square modulo `p^m` the
/// count depends on the residue of `a` beyond `p^m` and has no closed form;
/// that input is rejected.
pub fn count_valuation_exact(a: i128, p: i128, m: u32) -> Result<i128> {
    require_prime(p)?;
    if a == 0 || m == 0 {
        return arg("a must be nonzero and m positive");
    }
    let va = match val(a, p) {
        Val::Fin(k) => k,
        Val::Inf => unreachable!(),
    };
    let c = a / pow(p, va)?;
    if m < va {
        return if m % 2 == 0 { phi_ppow(p, m / 2) } else { Ok(0) };
    }
    if m == va {
        return if is_square_mod_ppow(a, p, m + 1)? {
            if p == 2 {
                pow(2, m / 2 - 1)
            } else {
                Ok(pow(p, m / 2 - 1)? * (p - 2))
            }
        } else {
            pow(p, m / 2)
        };
    }
    if !is_square_mod_ppow(a, p, m)? {
        return Ok(0);
    }
    let k = m - va;
    let gk = count_roots_gl(c, p, k)? as i128;
    let gk1 = count_roots_gl(c, p, k + 1)? as i128;
    let inner = p * gk - gk1;
    if va >= 2 {
        Ok(pow(p, va / 2 - 1)? * inner)
    } else if p == 2 {
        // va = 0: x and x + 2^m have equal squares modulo 2^(m+1)
        Ok(inner / 2)
    } else {
        arg(format!("no closed form for v_{p}(x^2 - {a}) = {m} when p does not divide a"))
    }
}

/// Trial-division factorization of `n >= 1` into `(prime, exponent)` pairs.
pub fn factorize(mut n: i128) -> Vec<(i128, u32)> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n % q == 0 {
            let mut e = 0;
            while n % q == 0 {
                n /= q;
                e += 1;
            }
            out.push((q, e));
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_squarefree(n: i128) -> bool {
    n != 0 && factorize(n.abs()).iter().all(|&(_, e)| e == 1)
}

/// Integer square root of `n >= 0`.
pub fn isqrt(n: i128) -> i128 {
    if n < 2 {
        return n.max(0);
    }
    let mut x = (n as f64).sqrt() as i128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_square(a: i128, p: i128, n: u32) -> bool {
        let m = p.pow(n);
        (0..m).any(|y| (y * y - a).rem_euclid(m) == 0)
    }

    fn brute_roots(c: i128, p: i128, l: u32) -> u64 {
        let m = p.pow(l);
        (0..m).filter(|y| (y * y - c).rem_euclid(m) == 0).count() as u64
    }

    fn brute_exact(a: i128, p: i128, m: u32) -> i128 {
        let q = p.pow(m);
        (0..q).filter(|x| val(x * x - a, p) == Val::Fin(m)).count() as i128
    }

    #[test]
    fn examples() {
        assert_eq!(vp(12, 2).unwrap(), Val::Fin(2));
        assert_eq!(vp(0, 5).unwrap(), Val::Inf);
        assert_eq!(vp(8, 2).unwrap(), Val::Fin(3));
        assert!(vp(8, 4).is_err());
        assert_eq!(rem(-4, 2).unwrap(), 0);
        assert_eq!(rem(7, 5).unwrap(), 2);
        assert_eq!(rem(-1, 8).unwrap(), 7);
        assert!(rem(3, 0).is_err());
        assert_eq!(mod_inverse(3, 8), Some(3));
        assert_eq!(mod_inverse(2, 8), None);
        assert_eq!(mod_inverse(5, 1), Some(0));
        assert_eq!(kronecker(3, 5).unwrap(), -1);
        assert_eq!(kronecker(2, 5).unwrap(), -1);
        assert_eq!(kronecker(0, 7).unwrap(), 0);
        assert!(!is_square_mod_ppow(18, 2, 3).unwrap());
        assert!(is_square_mod_ppow(68, 2, 5).unwrap());
        assert!(is_square_mod_ppow(25, 5, 1).unwrap());
        assert_eq!(count_roots_gl(17, 2, 3).unwrap(), 4);
        assert_eq!(count_roots_gl(1, 2, 1).unwrap(), 1);
        assert_eq!(count_roots_gl(2, 5, 2).unwrap(), 0);
        assert!(count_roots_gl(10, 5, 2).is_err());
        assert_eq!(count_valuation_exact(8, 2, 2).unwrap(), 1);
        assert_eq!(count_valuation_exact(8, 2, 1).unwrap(), 0);
        assert_eq!(count_valuation_exact(4, 2, 2).unwrap(), 1);
    }

    #[test]
    fn valuation_order() {
        assert!(Val::Fin(1000) < Val::Inf);
        assert_eq!(Val::Fin(3).min(Val::Inf), Val::Fin(3));
        assert_eq!(Val::Inf.minus(4), Val::Inf);
    }

    #[test]
    fn primality_matches_sieve() {
        let n = 20_000usize;
        let mut sieve = vec![true; n];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..n {
            if sieve[i] {
                let mut j = i * i;
                while j < n {
                    sieve[j] = false;
                    j += i;
                }
            }
        }
        for (i, &s) in sieve.iter().enumerate() {
            assert_eq!(is_prime(i as i128), s, "{i}");
        }
        assert!(is_prime(18446744073709551557));
        assert!(!is_prime(3215031751));
    }

    #[test]
    fn squares_against_brute_force() {
        for p in [2i128, 3, 5, 7, 11, 13] {
            let mut n = 0;
            while p.pow(n + 1) <= 1 << 12 {
                n += 1;
            }
            for e in 1..=n {
                let m = p.pow(e);
                for a in -3 * m..3 * m {
                    if a == 0 {
                        continue;
                    }
                    assert_eq!(is_square_mod_ppow(a, p, e).unwrap(), brute_square(a, p, e), "{a} {p} {e}");
                    if a % p != 0 {
                        assert_eq!(count_roots_gl(a, p, e).unwrap(), brute_roots(a, p, e));
                    }
                }
            }
        }
    }

    #[test]
    fn exact_valuation_count_against_brute_force() {
        for p in [2i128, 3, 5, 7] {
            for m in 1..=8u32 {
                if p.pow(m) > 1 << 12 {
                    break;
                }
                for a in (-400i128..400).filter(|&a| a != 0) {
                    match count_valuation_exact(a, p, m) {
                        Ok(n) => assert_eq!(n, brute_exact(a, p, m), "a={a} p={p} m={m}"),
                        Err(_) => assert!(p != 2 && a % p != 0),
                    }
                }
            }
        }
    }

    #[test]
    fn factorize_and_squarefree() {
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(1), vec![]);
        assert!(is_squarefree(-30));
        assert!(!is_squarefree(12));
        assert_eq!(isqrt(99), 9);
        assert_eq!(isqrt(100), 10);
    }

    #[test]
    fn ext_gcd_identity() {
        for a in -30i128..30 {
            for b in -30i128..30 {
                let (g, s, t) = ext_gcd(a, b);
                assert_eq!(s * a + t * b, g);
                assert_eq!(g, gcd(a, b));
            }
        }
    }
}
