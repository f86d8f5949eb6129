//! Invariants of the whole ideal monoid: the classification by conductor,
//! aggregation of local windows, elasticities, and the test for
//! `min Delta(O) = 2`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::arith::{is_prime, isqrt, kronecker, pow};
use crate::error::{arg, Error, Result};
use crate::factor_engine::WindowReport;
use crate::lattice::Lattice;
use crate::local_monoid::{enumerate_atoms, is_atom, is_invertible, star_unchecked, validate, LocalTriple};
use crate::order::{make_order, OrderContext, SplittingType};

/// An ideal supported on the conductor primes, one triple per prime. The
/// part coprime to `f` is free and is not represented.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalIdeal {
    pub ctx: OrderContext,
    pub components: BTreeMap<i128, LocalTriple>,
}

impl GlobalIdeal {
    pub fn new(ctx: &OrderContext, parts: impl IntoIterator<Item = LocalTriple>) -> Result<GlobalIdeal> {
        let mut components = BTreeMap::new();
        for t in parts {
            validate(ctx, &t)?;
            if t.is_identity() {
                continue;
            }
            if components.insert(t.p, t).is_some() {
                return arg(format!("two components for the prime {}", t.p));
            }
        }
        Ok(GlobalIdeal { ctx: ctx.clone(), components })
    }

    pub fn mul(&self, other: &GlobalIdeal) -> Result<GlobalIdeal> {
        if self.ctx != other.ctx {
            return arg("ideals of different orders");
        }
        let mut out = self.components.clone();
        for (p, t) in &other.components {
            let c = match out.get(p) {
                Some(s) => star_unchecked(&self.ctx, s, t)?,
                None => *t,
            };
            out.insert(*p, c);
        }
        Ok(GlobalIdeal { ctx: self.ctx.clone(), components: out })
    }

    pub fn norm(&self) -> Result<i128> {
        let mut n: i128 = 1;
        for (p, t) in &self.components {
            n = n.checked_mul(pow(*p, t.norm_exponent())?).ok_or(Error::Overflow("ideal norm"))?;
        }
        Ok(n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassCase {
    HalfFactorial,
    Squarefree,
    NonSquarefreeGeneric,
    NonSquarefreeDyadic,
}

impl fmt::Display for ClassCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassCase::HalfFactorial => "half-factorial",
            ClassCase::Squarefree => "squarefree",
            ClassCase::NonSquarefreeGeneric => "non-squarefree",
            ClassCase::NonSquarefreeDyadic => "non-squarefree-dyadic",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub half_factorial: bool,
    pub case: ClassCase,
    pub predicted_delta: BTreeSet<u32>,
    pub predicted_ca_full: BTreeSet<u32>,
    pub predicted_ca_invertible: BTreeSet<u32>,
    pub predicted_c: u32,
}

fn interval(a: u32, b: u32) -> BTreeSet<u32> {
    (a..=b).collect()
}

/// Predicted invariants of the ideal monoids from the conductor alone.
pub fn classify(ctx: &OrderContext) -> Result<Classification> {
    ctx.require_nonmaximal()?;
    let squarefree = ctx.conductor_primes.iter().all(|&(_, v)| v == 1);
    let all_inert = ctx.conductor_primes.iter().all(|&(p, _)| ctx.splitting(p) == SplittingType::Inert);
    let (case, delta, c) = if squarefree && all_inert {
        (ClassCase::HalfFactorial, BTreeSet::new(), 2)
    } else if squarefree {
        (ClassCase::Squarefree, interval(1, 1), 3)
    } else if [2, 3].contains(&ctx.vp_f(2)) && ctx.d_k.rem_euclid(8) == 1 {
        (ClassCase::NonSquarefreeDyadic, interval(1, 3), 5)
    } else {
        (ClassCase::NonSquarefreeGeneric, interval(1, 2), 4)
    };
    Ok(Classification {
        half_factorial: case == ClassCase::HalfFactorial,
        case,
        predicted_delta: delta,
        predicted_ca_full: interval(1, c),
        predicted_ca_invertible: interval(2, c),
        predicted_c: c,
    })
}

/// Combines one report per conductor prime into the report of the whole
/// monoid: unions of distances and catenary degrees, maximum catenary
/// degree. Unions of sets of lengths are not combined.
pub fn aggregate(ctx: &OrderContext, reports: &[WindowReport]) -> Result<WindowReport> {
    let first = reports.first().ok_or_else(|| Error::Argument("no component reports".into()))?;
    let mut seen = BTreeSet::new();
    for r in reports {
        let p = r.p.ok_or_else(|| Error::Argument("component report without a prime".into()))?;
        ctx.require_conductor_prime(p)?;
        if r.norm_bound != first.norm_bound || r.invertible_only != first.invertible_only {
            return arg("component reports use different windows");
        }
        if (r.d, r.f) != (ctx.d, ctx.f) {
            return arg("component report belongs to another order");
        }
        seen.insert(p);
    }
    for &(p, _) in &ctx.conductor_primes {
        if !seen.contains(&p) {
            return arg(format!("missing report for the prime {p}"));
        }
    }
    let class = classify(ctx)?;
    let computed_delta: BTreeSet<u32> = reports.iter().flat_map(|r| r.computed_delta.iter().copied()).collect();
    let computed_ca: BTreeSet<u32> = reports.iter().flat_map(|r| r.computed_ca.iter().copied()).collect();
    Ok(WindowReport {
        d: ctx.d,
        f: ctx.f,
        p: None,
        norm_bound: first.norm_bound,
        invertible_only: first.invertible_only,
        element_count: reports.iter().map(|r| r.element_count).sum(),
        factorization_count: reports.iter().map(|r| r.factorization_count).sum(),
        max_length: reports.iter().map(|r| r.max_length).max().unwrap_or(0),
        max_atom_exponent: reports.iter().map(|r| r.max_atom_exponent).try_fold(0, |acc, n| n.map(|n| acc.max(n))),
        computed_c: reports.iter().map(|r| r.computed_c).max().unwrap_or(0),
        computed_delta,
        computed_ca,
        computed_uk: BTreeMap::new(),
        uk_bound: BTreeMap::new(),
        uk_complete: BTreeMap::new(),
        predicted_delta: class.predicted_delta,
        predicted_ca: if first.invertible_only { class.predicted_ca_invertible } else { class.predicted_ca_full },
        predicted_c: class.predicted_c,
        predicted_uk: BTreeMap::new(),
    })
}

/// Closed form of `U_l` intersected with `[l, inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnionForm {
    /// Every integer `>= 2`.
    AllFrom2,
    Interval(u32, u32),
}

impl UnionForm {
    pub fn contains(&self, n: u32) -> bool {
        match *self {
            UnionForm::AllFrom2 => n >= 2,
            UnionForm::Interval(a, b) => a <= n && n <= b,
        }
    }
}

impl fmt::Display for UnionForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnionForm::AllFrom2 => write!(f, "[2,inf)"),
            UnionForm::Interval(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

/// `U_l` of the local monoid at `p`, restricted to lengths `>= l`.
pub fn unions_closed_form(ctx: &OrderContext, p: i128, l: u32) -> Result<UnionForm> {
    let v = ctx.require_conductor_prime(p)?;
    if l < 2 {
        return arg("l must be at least 2");
    }
    let n = match ctx.splitting(p) {
        SplittingType::Split => return Ok(UnionForm::AllFrom2),
        SplittingType::Inert => 2 * v,
        SplittingType::Ramified => 2 * v + 1,
    };
    Ok(UnionForm::Interval(l, l * n / 2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Elasticity {
    Unbounded,
    /// `rho_k` and the elasticity `rho = num / den`.
    Finite {
        rho_k: u32,
        rho_num: u32,
        rho_den: u32,
    },
}

/// `rho_k` and the elasticity of the ideal monoid.
pub fn rho_k_closed_form(ctx: &OrderContext, k: u32) -> Result<Elasticity> {
    ctx.require_nonmaximal()?;
    if k < 2 {
        return arg("k must be at least 2");
    }
    if ctx.conductor_primes.iter().any(|&(p, _)| ctx.splitting(p) == SplittingType::Split) {
        return Ok(Elasticity::Unbounded);
    }
    let m = ctx.conductor_primes.iter().map(|&(_, v)| v).max().unwrap_or(0);
    let ramified_at_max =
        ctx.conductor_primes.iter().any(|&(p, v)| v == m && ctx.splitting(p) == SplittingType::Ramified);
    Ok(if ramified_at_max {
        Elasticity::Finite { rho_k: k * m + k / 2, rho_num: 2 * m + 1, rho_den: 2 }
    } else {
        Elasticity::Finite { rho_k: k * m, rho_num: m, rho_den: 1 }
    })
}

/// `u + v sqrt(d)` in the basis `(1, tau)` of `O_f`, or `None` when it is
/// not in `O_f`.
pub fn to_tau_basis(ctx: &OrderContext, u: i128, v: i128) -> Option<(i128, i128)> {
    // tau = (eps + f s sqrt(d)) / 2 with sqrt(d_K) = s sqrt(d)
    let s = if ctx.d.rem_euclid(4) == 1 { 1 } else { 2 };
    let fs = ctx.f * s;
    let two_v = v.checked_mul(2)?;
    if two_v % fs != 0 {
        return None;
    }
    let b = two_v / fs;
    let twice_a = u.checked_mul(2)?.checked_sub(b.checked_mul(ctx.eps)?)?;
    if twice_a % 2 != 0 {
        return None;
    }
    Some((twice_a / 2, b))
}

/// The standard form of the principal ideal `(a + b tau) O` when it is
/// p-primary for a conductor prime `p`.
pub fn principal_ideal_triple(ctx: &OrderContext, a: i128, b: i128) -> Result<Option<LocalTriple>> {
    let l = Lattice::principal(a, b, ctx)?;
    for &(p, _) in &ctx.conductor_primes {
        if let Ok((x, y, z)) = l.to_triple(p) {
            return Ok(Some(LocalTriple::new(p, x, y, z)));
        }
    }
    Ok(None)
}

/// Outcome of checking a claimed generator `u + v sqrt(d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorCheck {
    pub norm_matches: bool,
    pub in_order: bool,
    /// The ideal generated, in standard form, when it is primary at a
    /// conductor prime.
    pub ideal: Option<LocalTriple>,
    pub ideal_is_atom: bool,
}

/// Checks `|u^2 - v^2 d| = target_norm`, that `u + v sqrt(d)` lies in `O_f`,
/// and that it generates an ideal of that norm in standard form.
pub fn check_generator(d: i128, f: i128, u: i128, v: i128, target_norm: i128) -> Result<GeneratorCheck> {
    let ctx = make_order(d, f)?;
    let n = u
        .checked_mul(u)
        .and_then(|x| x.checked_sub(v.checked_mul(v)?.checked_mul(d)?))
        .ok_or(Error::Overflow("generator norm"))?;
    let norm_matches = n.abs() == target_norm;
    let Some((a, b)) = to_tau_basis(&ctx, u, v) else {
        return Ok(GeneratorCheck { norm_matches, in_order: false, ideal: None, ideal_is_atom: false });
    };
    debug_assert_eq!(ctx.norm_element(a, b)?, n);
    let ideal = principal_ideal_triple(&ctx, a, b)?;
    let ideal_is_atom = match ideal {
        Some(t) if !t.is_identity() => is_atom(&t)?,
        _ => false,
    };
    // a generator lies in the ideal it generates; check the lattice agrees
    if let Some(t) = ideal {
        let l = Lattice::of_triple(t.p, t.x, t.y, t.z)?;
        if !l.contains(a, b) || l.index() != Some(n.abs()) {
            return Err(Error::Invariant("principal ideal lattice disagrees with its generator".into()));
        }
    }
    Ok(GeneratorCheck { norm_matches, in_order: true, ideal, ideal_is_atom })
}

/// True when `u + v sqrt(d)` has absolute norm `target_norm`, lies in `O_f`
/// and generates an ideal of norm `target_norm`: `O_f` itself for norm 1,
/// otherwise a primary ideal at a conductor prime.
pub fn generator_identity_check(d: i128, f: i128, u: i128, v: i128, target_norm: i128) -> Result<bool> {
    let c = check_generator(d, f, u, v, target_norm)?;
    let ideal_ok = match c.ideal {
        Some(t) => t.is_identity() == (target_norm == 1),
        None => false,
    };
    Ok(c.norm_matches && c.in_order && (ideal_ok || (target_norm == 1 && c.norm_matches && c.in_order)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Principality {
    /// Generated by `a + b tau`.
    Principal {
        a: i128,
        b: i128,
    },
    NotPrincipal,
}

/// Decides whether the ideal `t` of an imaginary quadratic order is
/// principal, by solving the norm equation over the finite range allowed by
/// the positive definite norm form.
pub fn principality_search_imaginary(ctx: &OrderContext, t: &LocalTriple, budget: i128) -> Result<Principality> {
    if ctx.d >= 0 {
        return arg("principality search needs an imaginary quadratic field");
    }
    validate(ctx, t)?;
    if !is_invertible(ctx, t)? {
        return arg(format!("{t} is not invertible"));
    }
    let n = pow(t.p, t.norm_exponent())?;
    // 4N = (2a + eps b)^2 + f^2 |d_K| b^2
    let disc = ctx.f * ctx.f * -ctx.d_k;
    let four_n = n.checked_mul(4).ok_or(Error::Overflow("norm bound"))?;
    let b_max = isqrt(four_n / disc);
    if b_max > budget {
        return Err(Error::Resource(format!("principality search range {b_max} exceeds budget {budget}")));
    }
    let lattice = Lattice::of_triple(t.p, t.x, t.y, t.z)?;
    let mut bs = vec![0];
    for b in 1..=b_max {
        bs.push(b);
        bs.push(-b);
    }
    for b in bs {
        let rest = four_n - disc * b * b;
        let s = isqrt(rest);
        if s * s != rest {
            continue;
        }
        for root in [s, -s] {
            let twice_a = root - ctx.eps * b;
            if twice_a % 2 != 0 {
                continue;
            }
            let a = twice_a / 2;
            if lattice.contains(a, b) {
                return Ok(Principality::Principal { a, b });
            }
        }
    }
    Ok(Principality::NotPrincipal)
}

/// Class group data supplied from outside.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PicData {
    /// `|Pic(O)|` given directly.
    pub pic_order: Option<i128>,
    /// `|Pic(O_K)|`.
    pub h_k: Option<i128>,
    /// `(O_K^x : O^x)`.
    pub unit_index: Option<i128>,
}

impl PicData {
    /// `|Pic(O)|` from the direct value or the class number formula. Both
    /// must agree when both are present.
    pub fn resolve(&self, ctx: &OrderContext) -> Result<Option<i128>> {
        let formula = match (self.h_k, self.unit_index) {
            (Some(h), Some(k)) => Some(ctx.picard_number(h, k)?),
            _ => None,
        };
        match (self.pic_order, formula) {
            (Some(a), Some(b)) if a != b => {
                Err(Error::Data(format!("|Pic(O)| given as {a} but the class number formula gives {b}")))
            }
            (Some(a), _) => Ok(Some(a)),
            (None, b) => Ok(b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinDelta {
    One,
    Two,
    Unknown,
}

impl fmt::Display for MinDelta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MinDelta::One => "1",
            MinDelta::Two => "2",
            MinDelta::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub kind: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinDeltaVerdict {
    pub value: MinDelta,
    pub certificates: Vec<Certificate>,
    pub assumptions: Vec<String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MinDeltaInput {
    pub pic: PicData,
    /// Claimed generators `u + v sqrt(d)` of primary ideals.
    pub witnesses: Vec<(i128, i128)>,
    /// Largest `|b|` scanned by the imaginary principality search.
    pub search_budget: i128,
}

impl MinDeltaInput {
    pub fn new(pic: PicData) -> Self {
        MinDeltaInput { pic, witnesses: Vec::new(), search_budget: 1 << 20 }
    }
}

/// The sufficient condition for all norm `p^3` atoms at a ramified `p` with
/// `v_p(f) = 1` to be non-principal (real fields only). Returns the prime
/// `q` used, or `p` itself for the first alternative.
pub fn cubic_atoms_nonprincipal_criterion(ctx: &OrderContext, p: i128) -> Result<Option<i128>> {
    if ctx.d < 2 || ctx.vp_f(p) != 1 || ctx.splitting(p) != SplittingType::Ramified {
        return arg("criterion needs d > 1 and a ramified p with v_p(f) = 1");
    }
    if p % 4 == 1 && ctx.d % p == 0 && kronecker(ctx.d / p, p)? == -1 {
        return Ok(Some(p));
    }
    let df = (ctx.d * ctx.f).abs();
    for (q, _) in crate::arith::factorize(df) {
        if q % 4 == 1 && kronecker(p, q)? == -1 {
            return Ok(Some(q));
        }
    }
    Ok(None)
}

fn cert(kind: &'static str, detail: String) -> Certificate {
    Certificate { kind, detail }
}

/// Decides `min Delta(O)` where the conductor and the supplied data allow.
/// The verdict presupposes that `O` is not half-factorial.
pub fn min_delta_check(ctx: &OrderContext, input: &MinDeltaInput) -> Result<MinDeltaVerdict> {
    ctx.require_nonmaximal()?;
    let mut v = MinDeltaVerdict {
        value: MinDelta::Unknown,
        certificates: Vec::new(),
        assumptions: vec!["O is not half-factorial".into()],
        warnings: Vec::new(),
    };
    let class = classify(ctx)?;
    if class.half_factorial {
        v.warnings.push(
            "the ideal monoid is half-factorial; O itself may be half-factorial, which is not decided here".into(),
        );
    } else {
        v.certificates.push(cert(
            "not-half-factorial",
            "the invertible ideal monoid is not half-factorial, so neither is O".into(),
        ));
    }
    let done = |mut v: MinDeltaVerdict, value, c: Certificate| {
        v.value = value;
        v.certificates.push(c);
        Ok(v)
    };

    // structure of the conductor
    if let Some(&(p, e)) = ctx.conductor_primes.iter().find(|&&(_, e)| e > 1) {
        return done(v, MinDelta::One, cert("conductor", format!("f is not squarefree: v_{p}(f) = {e}")));
    }
    if let Some(&(p, _)) = ctx.conductor_primes.iter().find(|&&(p, _)| ctx.splitting(p) == SplittingType::Split) {
        return done(v, MinDelta::One, cert("conductor", format!("{p} divides f and splits")));
    }
    let ramified: Vec<i128> =
        ctx.conductor_primes.iter().map(|&(p, _)| p).filter(|&p| ctx.splitting(p) == SplittingType::Ramified).collect();
    let inert: Vec<i128> =
        ctx.conductor_primes.iter().map(|&(p, _)| p).filter(|&p| ctx.splitting(p) == SplittingType::Inert).collect();
    if ramified.is_empty() {
        return done(v, MinDelta::One, cert("conductor", "no ramified prime divides f".into()));
    }
    v.certificates
        .push(cert("conductor", format!("f is squarefree, ramified primes {ramified:?}, inert primes {inert:?}")));

    // claimed generators of norm p^3 atoms
    for &(u, w) in &input.witnesses {
        let Some((a, b)) = to_tau_basis(ctx, u, w) else {
            v.warnings.push(format!("witness {u} + {w} sqrt({}) is not in O", ctx.d));
            continue;
        };
        if let Some(t) = principal_ideal_triple(ctx, a, b)? {
            let n = ctx.norm_element(a, b)?;
            if ramified.contains(&t.p) && t.x == 0 && t.y == 3 {
                return done(
                    v,
                    MinDelta::One,
                    cert(
                        "principal-cubic-atom",
                        format!("{u} + {w} sqrt({}) has norm {n} and generates the atom {t} of norm {}^3", ctx.d, t.p),
                    ),
                );
            }
            v.warnings.push(format!("witness {u} + {w} sqrt({}) generates {t}, which decides nothing", ctx.d));
        } else {
            v.warnings.push(format!("witness {u} + {w} sqrt({}) does not generate a primary ideal", ctx.d));
        }
    }

    // imaginary fields: decide principality of every atom directly
    if ctx.d < 0 {
        for &p in ramified.iter().chain(inert.iter()) {
            let max_m = if ramified.contains(&p) { 3 } else { 2 };
            for m in (2..=max_m).rev() {
                for t in enumerate_atoms(ctx, p, m, true, 1 << 24)? {
                    let pr = principality_search_imaginary(ctx, &t, input.search_budget)?;
                    match (m, pr) {
                        (3, Principality::Principal { a, b }) => {
                            return done(
                                v,
                                MinDelta::One,
                                cert(
                                    "principal-cubic-atom",
                                    format!("{a} + {b} tau generates the atom {t} of norm {p}^3"),
                                ),
                            );
                        }
                        (2, Principality::NotPrincipal) => {
                            return done(
                                v,
                                MinDelta::One,
                                cert(
                                    "nonprincipal-quadratic-atom",
                                    format!("the atom {t} of norm {p}^2 is not principal"),
                                ),
                            );
                        }
                        _ => {}
                    }
                }
            }
        }
    }

    let pic = match input.pic.resolve(ctx)? {
        Some(n) => n,
        None => {
            v.warnings.push("no class group data supplied".into());
            return Ok(v);
        }
    };
    if pic != 2 {
        return done(v, MinDelta::One, cert("picard", format!("|Pic(O)| = {pic}")));
    }
    v.certificates.push(cert("picard", "|Pic(O)| = 2".into()));

    if ctx.d < 0 {
        // every condition holds, which the classification forbids for imaginary fields
        v.warnings.push("all conditions certified for an imaginary field; inconsistent input data".into());
        return Err(Error::Invariant("min Delta = 2 conditions hold in an imaginary quadratic order".into()));
    }

    let mut unknown = false;
    for &p in &ramified {
        match cubic_atoms_nonprincipal_criterion(ctx, p)? {
            Some(q) if q == p => v
                .certificates
                .push(cert("cubic-atoms-nonprincipal", format!("{p} = 1 mod 4 and ({}/{p}) = -1", ctx.d / p))),
            Some(q) => v
                .certificates
                .push(cert("cubic-atoms-nonprincipal", format!("q = {q} = 1 mod 4 divides df and ({p}/{q}) = -1"))),
            None => {
                unknown = true;
                v.warnings.push(format!("principality of the norm {p}^3 atoms is not decided"));
                continue;
            }
        }
        v.certificates.push(cert(
            "quadratic-atoms-principal",
            format!("|Pic(O)| = 2 and no norm {p}^3 atom is principal, so every norm {p}^2 atom is principal"),
        ));
    }
    if !inert.is_empty() {
        match input.pic.h_k {
            Some(2) => v.certificates.push(cert(
                "inert-atoms-principal",
                format!("|Pic(O)| = |Pic(O_K)| = 2, so every atom at the inert primes {inert:?} is principal"),
            )),
            Some(h) => {
                unknown = true;
                v.warnings.push(format!("|Pic(O_K)| = {h}; principality at inert primes is not decided"));
            }
            None => {
                unknown = true;
                v.warnings.push("|Pic(O_K)| is needed to decide principality at inert primes".into());
            }
        }
    }
    if unknown {
        return Ok(v);
    }
    let g: i128 = inert.iter().product();
    let g_ok = g == 1 || is_prime(g) || (g % 2 == 0 && g / 2 != 2 && is_prime(g / 2));
    if !g_ok {
        v.warnings.push(format!("inert part {g} of f is not 1, a prime or twice an odd prime"));
    }
    v.value = MinDelta::Two;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_examples() {
        let c = classify(&make_order(5, 2).unwrap()).unwrap();
        assert!(c.half_factorial);
        assert_eq!(c.predicted_c, 2);
        let c = classify(&make_order(-2, 2).unwrap()).unwrap();
        assert_eq!(c.case, ClassCase::Squarefree);
        assert_eq!(c.predicted_delta, BTreeSet::from([1]));
        let c = classify(&make_order(17, 4).unwrap()).unwrap();
        assert_eq!(c.case, ClassCase::NonSquarefreeDyadic);
        assert_eq!(c.predicted_delta, BTreeSet::from([1, 2, 3]));
        assert_eq!(c.predicted_ca_invertible, BTreeSet::from([2, 3, 4, 5]));
        let c = classify(&make_order(5, 9).unwrap()).unwrap();
        assert_eq!(c.case, ClassCase::NonSquarefreeGeneric);
        assert!(classify(&make_order(5, 1).unwrap()).is_err());
    }

    #[test]
    fn elasticity_examples() {
        let o = make_order(-2, 2).unwrap();
        for k in 2..10 {
            assert_eq!(
                rho_k_closed_form(&o, k).unwrap(),
                Elasticity::Finite { rho_k: k + k / 2, rho_num: 3, rho_den: 2 }
            );
        }
        // 3 and 7 inert in Q(sqrt 5)... 3 inert, 7 inert
        let o = make_order(5, 63).unwrap();
        assert_eq!(o.splitting(3), SplittingType::Inert);
        assert_eq!(o.splitting(7), SplittingType::Inert);
        assert_eq!(rho_k_closed_form(&o, 3).unwrap(), Elasticity::Finite { rho_k: 6, rho_num: 2, rho_den: 1 });
        let o = make_order(17, 4).unwrap();
        assert_eq!(rho_k_closed_form(&o, 3).unwrap(), Elasticity::Unbounded);
    }

    #[test]
    fn unions_examples() {
        let o = make_order(-2, 2).unwrap();
        assert_eq!(unions_closed_form(&o, 2, 4).unwrap(), UnionForm::Interval(4, 6));
        let o = make_order(17, 4).unwrap();
        assert_eq!(unions_closed_form(&o, 2, 5).unwrap(), UnionForm::AllFrom2);
        let o = make_order(5, 2).unwrap();
        assert_eq!(unions_closed_form(&o, 2, 7).unwrap(), UnionForm::Interval(7, 7));
    }

    #[test]
    fn generator_examples() {
        assert!(generator_identity_check(30, 5, 12625, 2305, 125).unwrap());
        assert_eq!(12625i128 * 12625 - 2305 * 2305 * 30, -125);
        assert!(generator_identity_check(42, 7, 825601, 127393, 343).unwrap());
        assert!(generator_identity_check(-2, 2, 1, 0, 1).unwrap());
        assert!(generator_identity_check(30, 5, 1, 0, 1).unwrap());
        assert!(!generator_identity_check(30, 5, 12625, 2305, 124).unwrap());
        let c = check_generator(30, 5, 12625, 2305, 125).unwrap();
        assert_eq!(c.ideal, Some(LocalTriple::new(5, 0, 3, 0)));
        assert!(c.ideal_is_atom);
    }

    #[test]
    fn imaginary_principality() {
        let o = make_order(-2, 2).unwrap();
        let i = LocalTriple::new(2, 0, 3, 0);
        assert_eq!(principality_search_imaginary(&o, &i, 100).unwrap(), Principality::Principal { a: 0, b: 1 });
        let j = LocalTriple::new(2, 0, 3, 4);
        assert_eq!(principality_search_imaginary(&o, &j, 100).unwrap(), Principality::NotPrincipal);
        let id = LocalTriple::identity(2);
        assert_eq!(principality_search_imaginary(&o, &id, 100).unwrap(), Principality::Principal { a: 1, b: 0 });
        assert!(principality_search_imaginary(&make_order(3, 2).unwrap(), &id, 100).is_err());
    }

    #[test]
    fn min_delta_examples() {
        let o = make_order(15, 2).unwrap();
        let pic = PicData { pic_order: None, h_k: Some(2), unit_index: Some(2) };
        let v = min_delta_check(&o, &MinDeltaInput::new(pic)).unwrap();
        assert_eq!(v.value, MinDelta::Two);
        assert!(v.certificates.iter().any(|c| c.detail.contains("q = 5")));

        let o = make_order(30, 5).unwrap();
        let mut input = MinDeltaInput::new(PicData { pic_order: None, h_k: Some(2), unit_index: Some(5) });
        input.witnesses.push((12625, 2305));
        assert_eq!(min_delta_check(&o, &input).unwrap().value, MinDelta::One);
        // without the generator nothing decides the ramified prime 5
        input.witnesses.clear();
        assert_eq!(min_delta_check(&o, &input).unwrap().value, MinDelta::Unknown);

        let o = make_order(42, 7).unwrap();
        let mut input = MinDeltaInput::new(PicData::default());
        input.witnesses.push((825601, 127393));
        assert_eq!(min_delta_check(&o, &input).unwrap().value, MinDelta::One);

        let o = make_order(-2, 2).unwrap();
        let v = min_delta_check(&o, &MinDeltaInput::new(PicData { pic_order: Some(2), ..Default::default() })).unwrap();
        assert_eq!(v.value, MinDelta::One);
        assert_eq!(v.certificates.last().unwrap().kind, "principal-cubic-atom");

        let o = make_order(15, 2).unwrap();
        let v = min_delta_check(&o, &MinDeltaInput::new(PicData::default())).unwrap();
        assert_eq!(v.value, MinDelta::Unknown);
        // non-squarefree conductor
        let v = min_delta_check(&make_order(15, 4).unwrap(), &MinDeltaInput::default()).unwrap();
        assert_eq!(v.value, MinDelta::One);
    }

    #[test]
    fn global_ideals_multiply_componentwise() {
        let o = make_order(-3, 6).unwrap();
        let a = GlobalIdeal::new(&o, [LocalTriple::p_o(2), LocalTriple::p_o(3)]).unwrap();
        let b = a.mul(&a).unwrap();
        assert_eq!(b.norm().unwrap(), 36 * 36);
        assert!(GlobalIdeal::new(&o, [LocalTriple::p_o(5)]).is_err());
    }
}
