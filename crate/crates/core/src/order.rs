//! Orders `O_f = Z + tau Z` in quadratic fields `Q(sqrt d)`.
//!
//! The generator `tau = (eps + f sqrt(d_K)) / 2` is never formed; all
//! arithmetic goes through `(eps, eta)` and `tau^2 = eps tau - eta`.

use std::fmt;

use crate::arith::{self, factorize, is_squarefree, kronecker, require_prime};
use crate::error::{arg, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SplittingType {
    Inert,
    Split,
    Ramified,
}

impl fmt::Display for SplittingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplittingType::Inert => "inert",
            SplittingType::Split => "split",
            SplittingType::Ramified => "ramified",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderContext {
    pub d: i128,
    pub f: i128,
    pub d_k: i128,
    pub eps: i128,
    pub eta: i128,
    /// `(p, v_p(f))` for every prime divisor of `f`, ascending.
    pub conductor_primes: Vec<(i128, u32)>,
}

/// Field discriminant of `Q(sqrt d)`.
pub fn field_discriminant(d: i128) -> i128 {
    if d.rem_euclid(4) == 1 {
        d
    } else {
        4 * d
    }
}

/// Builds the order of conductor `f` in `Q(sqrt d)`.
pub fn make_order(d: i128, f: i128) -> Result<OrderContext> {
    if d == 0 || d == 1 {
        return arg(format!("d = {d} does not define a quadratic field"));
    }
    if !is_squarefree(d) {
        return arg(format!("d = {d} is not squarefree"));
    }
    if f < 1 {
        return arg(format!("conductor f = {f} must be positive"));
    }
    if d.abs() > 1 << 40 || f > 1 << 30 {
        return Err(Error::Resource("d or f too large for checked arithmetic".into()));
    }
    let d_k = field_discriminant(d);
    let eps = (f * d_k).rem_euclid(2);
    let num = eps - f * f * d_k;
    debug_assert_eq!(num.rem_euclid(4), 0);
    Ok(OrderContext { d, f, d_k, eps, eta: num / 4, conductor_primes: factorize(f) })
}

impl OrderContext {
    /// `N(r + tau) = r^2 + eps r + eta`.
    pub fn norm_form(&self, r: i128) -> Result<i128> {
        r.checked_mul(r)
            .and_then(|s| s.checked_add(self.eps * r))
            .and_then(|s| s.checked_add(self.eta))
            .ok_or(Error::Overflow("norm form"))
    }

    /// Norm of `a + b tau`: `a^2 + eps a b + eta b^2`.
    pub fn norm_element(&self, a: i128, b: i128) -> Result<i128> {
        let t1 = a.checked_mul(a);
        let t2 = a.checked_mul(b).and_then(|x| x.checked_mul(self.eps));
        let t3 = b.checked_mul(b).and_then(|x| x.checked_mul(self.eta));
        match (t1, t2, t3) {
            (Some(x), Some(y), Some(z)) => {
                x.checked_add(y).and_then(|s| s.checked_add(z)).ok_or(Error::Overflow("element norm"))
            }
            _ => Err(Error::Overflow("element norm")),
        }
    }

    /// Product `(a1 + b1 tau)(a2 + b2 tau)` in the basis `(1, tau)`.
    pub fn mul_elements(&self, x: (i128, i128), y: (i128, i128)) -> Result<(i128, i128)> {
        let ov = || Error::Overflow("element product");
        let (a1, b1) = x;
        let (a2, b2) = y;
        let bb = b1.checked_mul(b2).ok_or_else(ov)?;
        let c0 = a1.checked_mul(a2).and_then(|s| s.checked_sub(bb.checked_mul(self.eta)?)).ok_or_else(ov)?;
        let c1 = a1
            .checked_mul(b2)
            .and_then(|s| s.checked_add(a2.checked_mul(b1)?))
            .and_then(|s| s.checked_add(bb.checked_mul(self.eps)?))
            .ok_or_else(ov)?;
        Ok((c0, c1))
    }

    pub fn vp_f(&self, p: i128) -> u32 {
        self.conductor_primes.iter().find(|&&(q, _)| q == p).map(|&(_, e)| e).unwrap_or(0)
    }

    /// Checks that `p` is a prime dividing `f`.
    pub fn require_conductor_prime(&self, p: i128) -> Result<u32> {
        match self.vp_f(p) {
            0 => arg(format!("{p} is not a prime divisor of f = {}", self.f)),
            v => Ok(v),
        }
    }

    pub fn splitting(&self, p: i128) -> SplittingType {
        splitting(self.d_k, p).expect("conductor primes are prime")
    }

    pub fn require_nonmaximal(&self) -> Result<()> {
        if self.f < 2 {
            return arg("this computation needs conductor f >= 2");
        }
        Ok(())
    }

    /// `|Pic(O)|` from the class number of the maximal order and the unit
    /// index `(O_K^x : O^x)`.
    pub fn picard_number(&self, h_k: i128, unit_index: i128) -> Result<i128> {
        picard_number(self, h_k, unit_index)
    }
}

/// Splitting behaviour of the prime `p` in the field of discriminant `d_k`.
pub fn splitting(d_k: i128, p: i128) -> Result<SplittingType> {
    require_prime(p)?;
    if p == 2 {
        return Ok(match d_k.rem_euclid(8) {
            5 => SplittingType::Inert,
            1 => SplittingType::Split,
            _ => SplittingType::Ramified,
        });
    }
    Ok(match kronecker(d_k, p)? {
        -1 => SplittingType::Inert,
        1 => SplittingType::Split,
        _ => SplittingType::Ramified,
    })
}

/// `h_K * f / unit_index * prod_{p | f} (1 - (d_K/p)/p)`, required to be an
/// integer.
pub fn picard_number(ctx: &OrderContext, h_k: i128, unit_index: i128) -> Result<i128> {
    if h_k < 1 || unit_index < 1 {
        return arg("class number and unit index must be positive");
    }
    // f * prod (1 - chi/p) = prod p^(v-1) (p - chi)
    let mut num = h_k;
    for &(p, v) in &ctx.conductor_primes {
        let chi = kronecker(ctx.d_k, p)? as i128;
        num = num
            .checked_mul(arith::pow(p, v - 1)?)
            .and_then(|x| x.checked_mul(p - chi))
            .ok_or(Error::Overflow("picard number"))?;
    }
    if num % unit_index != 0 {
        return Err(Error::Data(format!(
            "class number formula gives the non-integer {num}/{unit_index} for d = {}, f = {}",
            ctx.d, ctx.f
        )));
    }
    Ok(num / unit_index)
}
