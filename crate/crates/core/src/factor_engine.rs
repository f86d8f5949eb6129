//! Factorizations into atoms, sets of lengths, distances, catenary degrees,
//! and window sweeps over all elements of bounded norm.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::arith::pow;
use crate::error::{arg, Error, Result};
use crate::global_monoid::{classify, unions_closed_form, UnionForm};
use crate::local_monoid::{
    enumerate_atoms, is_invertible, is_member, local_conductor_order, max_atom_exponent, normal_form, star_unchecked,
    validate, LocalTriple, DEFAULT_MAX_MODULUS,
};
use crate::order::OrderContext;

/// Resource ceilings for enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest modulus `p^m` scanned when listing atoms or elements.
    pub max_modulus: i128,
    /// Largest number of search nodes visited by one factorization search.
    pub max_nodes: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_modulus: DEFAULT_MAX_MODULUS, max_nodes: 200_000_000 }
    }
}

/// A multiset of atoms, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Factorization {
    pub atoms: Vec<LocalTriple>,
}

impl Factorization {
    pub fn new(mut atoms: Vec<LocalTriple>) -> Self {
        atoms.sort();
        Factorization { atoms }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Star product of the members.
    pub fn product(&self, ctx: &OrderContext, p: i128) -> Result<LocalTriple> {
        let mut acc = LocalTriple::identity(p);
        for a in &self.atoms {
            acc = star_unchecked(ctx, &acc, a)?;
        }
        Ok(acc)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorizationSet {
    pub target: LocalTriple,
    pub factorizations: Vec<Factorization>,
    pub restricted_to_invertible: bool,
}

/// All atoms of norm exponent at most `bound`, including `pO`, sorted by
/// norm exponent then residue.
pub fn atoms_up_to(
    ctx: &OrderContext,
    p: i128,
    bound: u32,
    invertible_only: bool,
    limits: &Limits,
) -> Result<Vec<LocalTriple>> {
    ctx.require_conductor_prime(p)?;
    let mut out = Vec::new();
    if bound >= 2 {
        out.push(LocalTriple::p_o(p));
    }
    for m in 1..=bound {
        out.extend(enumerate_atoms(ctx, p, m, invertible_only, limits.max_modulus)?);
    }
    out.sort();
    Ok(out)
}

/// All elements `(x, y, z)` with `2x + y <= bound`, sorted.
pub fn enumerate_elements(
    ctx: &OrderContext,
    p: i128,
    bound: u32,
    invertible_only: bool,
    limits: &Limits,
) -> Result<Vec<LocalTriple>> {
    ctx.require_conductor_prime(p)?;
    let mut out = Vec::new();
    for y in 0..=bound {
        let py = match pow(p, y) {
            Ok(q) if q <= limits.max_modulus => q,
            _ => return Err(Error::Resource(format!("{p}^{y} exceeds the modulus ceiling"))),
        };
        for z in 0..py {
            let t = LocalTriple::new(p, 0, y, z);
            if !is_member(ctx, &t)? || (invertible_only && !is_invertible(ctx, &t)?) {
                continue;
            }
            for x in 0..=(bound - y) / 2 {
                out.push(LocalTriple { x, ..t });
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Depth-first search over non-decreasing atom sequences whose running
/// product has norm exponent at most `bound`. Calls `visit` on every
/// nonempty sequence with its product.
struct Search<'a, F> {
    ctx: &'a OrderContext,
    atoms: &'a [LocalTriple],
    bound: u32,
    max_len: usize,
    nodes: u64,
    max_nodes: u64,
    stack: Vec<u16>,
    visit: F,
}

impl<F: FnMut(&LocalTriple, &[u16])> Search<'_, F> {
    fn run(&mut self, start: usize, cur: LocalTriple) -> Result<()> {
        for i in start..self.atoms.len() {
            let a = &self.atoms[i];
            if cur.norm_exponent() + a.norm_exponent() > self.bound {
                break;
            }
            let prod = star_unchecked(self.ctx, &cur, a)?;
            if prod.norm_exponent() > self.bound {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                return Err(Error::Resource(format!("factorization search exceeded {} nodes", self.max_nodes)));
            }
            self.stack.push(i as u16);
            (self.visit)(&prod, &self.stack);
            if self.stack.len() < self.max_len {
                self.run(i, prod)?;
            }
            self.stack.pop();
        }
        Ok(())
    }
}

fn search<F: FnMut(&LocalTriple, &[u16])>(
    ctx: &OrderContext,
    atoms: &[LocalTriple],
    bound: u32,
    max_len: usize,
    limits: &Limits,
    visit: F,
) -> Result<()> {
    if atoms.len() > u16::MAX as usize {
        return Err(Error::Resource("too many atoms in window".into()));
    }
    let p = match atoms.first() {
        Some(a) => a.p,
        None => return Ok(()),
    };
    let mut s = Search { ctx, atoms, bound, max_len, nodes: 0, max_nodes: limits.max_nodes, stack: Vec::new(), visit };
    s.run(0, LocalTriple::identity(p))
}

/// The complete set of factorizations of `target`.
pub fn enumerate_factorizations(
    ctx: &OrderContext,
    target: &LocalTriple,
    invertible_only: bool,
    limits: &Limits,
) -> Result<FactorizationSet> {
    validate(ctx, target)?;
    if target.is_identity() {
        return arg("the identity has only the empty factorization");
    }
    if invertible_only && !is_invertible(ctx, target)? {
        return arg(format!("{target} is not invertible"));
    }
    let bound = target.norm_exponent();
    let atoms = atoms_up_to(ctx, target.p, bound, invertible_only, limits)?;
    let (n, _) = normal_form(target);
    let mut found = Vec::new();
    search(ctx, &atoms, bound, n as usize + 1, limits, |prod, stack| {
        if prod == target {
            found.push(Factorization { atoms: stack.iter().map(|&i| atoms[i as usize]).collect() });
        }
    })?;
    found.sort();
    Ok(FactorizationSet { target: *target, factorizations: found, restricted_to_invertible: invertible_only })
}

pub fn length_set(fs: &FactorizationSet) -> BTreeSet<u32> {
    fs.factorizations.iter().map(|z| z.len() as u32).collect()
}

/// Gaps between consecutive elements of a set of lengths.
pub fn delta_of(lengths: &BTreeSet<u32>) -> BTreeSet<u32> {
    lengths.iter().zip(lengths.iter().skip(1)).map(|(a, b)| b - a).collect()
}

fn common_count<T: Ord>(a: &[T], b: &[T]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

fn sorted_distance<T: Ord>(a: &[T], b: &[T]) -> u32 {
    let c = common_count(a, b);
    (a.len() - c).max(b.len() - c) as u32
}

/// Distance between two factorizations of the same element.
pub fn distance(ctx: &OrderContext, z1: &Factorization, z2: &Factorization) -> Result<u32> {
    let p = match z1.atoms.first().or(z2.atoms.first()) {
        Some(a) => a.p,
        None => return Ok(0),
    };
    if z1.product(ctx, p)? != z2.product(ctx, p)? {
        return arg("factorizations of different elements");
    }
    Ok(sorted_distance(&z1.atoms, &z2.atoms))
}

/// Bottleneck of a minimum spanning tree of the complete graph weighted by
/// `dist`: the least `N` for which the `N`-threshold graph is connected.
fn bottleneck<D: Fn(usize, usize) -> u32>(n: usize, dist: D) -> u32 {
    if n <= 1 {
        return 0;
    }
    let mut in_tree = vec![false; n];
    let mut best = vec![u32::MAX; n];
    best[0] = 0;
    let mut worst = 0;
    for _ in 0..n {
        let mut pick = usize::MAX;
        for i in 0..n {
            if !in_tree[i] && (pick == usize::MAX || best[i] < best[pick]) {
                pick = i;
            }
        }
        in_tree[pick] = true;
        worst = worst.max(best[pick]);
        for i in 0..n {
            if !in_tree[i] {
                best[i] = best[i].min(dist(pick, i));
            }
        }
    }
    worst
}

pub fn catenary_degree(fs: &FactorizationSet) -> u32 {
    let z = &fs.factorizations;
    bottleneck(z.len(), |i, j| sorted_distance(&z[i].atoms, &z[j].atoms))
}

/// Whether `z[i]` and `z[j]` are joined by a chain with steps of distance at
/// most `n`.
pub fn chain_connected(z: &[Factorization], i: usize, j: usize, n: u32) -> bool {
    let mut seen = vec![false; z.len()];
    let mut queue = VecDeque::from([i]);
    seen[i] = true;
    while let Some(k) = queue.pop_front() {
        if k == j {
            return true;
        }
        for (l, s) in seen.iter_mut().enumerate() {
            if !*s && sorted_distance(&z[k].atoms, &z[l].atoms) <= n {
                *s = true;
                queue.push_back(l);
            }
        }
    }
    false
}

/// Every factorization of every element of norm exponent at most `bound`.
#[derive(Debug, Clone)]
pub struct Sweep {
    pub p: i128,
    pub bound: u32,
    pub invertible_only: bool,
    pub atoms: Vec<LocalTriple>,
    /// Factorizations as sorted atom indices, keyed by element.
    pub factorizations: BTreeMap<LocalTriple, Vec<Vec<u16>>>,
}

/// Invariants of one element computed from its factorizations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementStats {
    pub element: LocalTriple,
    pub lengths: BTreeSet<u32>,
    pub catenary: u32,
    pub factorization_count: usize,
}

impl Sweep {
    pub fn run(ctx: &OrderContext, p: i128, bound: u32, invertible_only: bool, limits: &Limits) -> Result<Sweep> {
        let atoms = atoms_up_to(ctx, p, bound, invertible_only, limits)?;
        let mut map: HashMap<LocalTriple, Vec<Vec<u16>>> = HashMap::new();
        search(ctx, &atoms, bound, usize::MAX, limits, |prod, stack| {
            map.entry(*prod).or_default().push(stack.to_vec());
        })?;
        // every non-identity element of the window must be reached
        let elements = enumerate_elements(ctx, p, bound, invertible_only, limits)?;
        let expected = elements.iter().filter(|e| !e.is_identity()).count();
        if expected != map.len() || elements.iter().any(|e| !e.is_identity() && !map.contains_key(e)) {
            return Err(Error::Invariant(format!(
                "window has {expected} elements but {} were reached by atom products",
                map.len()
            )));
        }
        Ok(Sweep { p, bound, invertible_only, atoms, factorizations: map.into_iter().collect() })
    }

    pub fn factorization_set(&self, element: &LocalTriple) -> Option<FactorizationSet> {
        self.factorizations.get(element).map(|zs| FactorizationSet {
            target: *element,
            factorizations: zs
                .iter()
                .map(|z| Factorization { atoms: z.iter().map(|&i| self.atoms[i as usize]).collect() })
                .collect(),
            restricted_to_invertible: self.invertible_only,
        })
    }

    pub fn stats(&self) -> Vec<ElementStats> {
        self.factorizations
            .iter()
            .map(|(e, zs)| ElementStats {
                element: *e,
                lengths: zs.iter().map(|z| z.len() as u32).collect(),
                catenary: bottleneck(zs.len(), |i, j| sorted_distance(&zs[i], &zs[j])),
                factorization_count: zs.len(),
            })
            .collect()
    }

    pub fn factorization_count(&self) -> usize {
        self.factorizations.values().map(Vec::len).sum()
    }
}

/// Window invariants next to the values predicted by the classification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowReport {
    pub d: i128,
    pub f: i128,
    /// `None` for a report aggregated over all conductor primes.
    pub p: Option<i128>,
    pub norm_bound: u32,
    pub invertible_only: bool,
    pub element_count: usize,
    pub factorization_count: usize,
    pub max_length: u32,
    pub max_atom_exponent: Option<u32>,
    pub computed_delta: BTreeSet<u32>,
    pub computed_ca: BTreeSet<u32>,
    pub computed_c: u32,
    pub computed_uk: BTreeMap<u32, BTreeSet<u32>>,
    /// Upper bound `floor(kN/2)` on lengths in `U_k`; `None` when unbounded.
    pub uk_bound: BTreeMap<u32, Option<u32>>,
    /// False when the bound lies beyond every length reachable in the window.
    pub uk_complete: BTreeMap<u32, bool>,
    pub predicted_delta: BTreeSet<u32>,
    pub predicted_ca: BTreeSet<u32>,
    pub predicted_c: u32,
    pub predicted_uk: BTreeMap<u32, UnionForm>,
}

impl WindowReport {
    pub fn delta_matches(&self) -> bool {
        self.computed_delta == self.predicted_delta
    }

    pub fn ca_matches(&self) -> bool {
        self.computed_ca == self.predicted_ca
    }

    pub fn c_matches(&self) -> bool {
        self.computed_c == self.predicted_c
    }

    /// `U_k` restricted to lengths `>= k`.
    pub fn uk_upper(&self, k: u32) -> BTreeSet<u32> {
        self.computed_uk.get(&k).map(|s| s.range(k..).copied().collect()).unwrap_or_default()
    }
}

/// Sweeps the window of norm exponent `bound` of `M_{f,p}`.
pub fn window_sweep(
    ctx: &OrderContext,
    p: i128,
    bound: u32,
    invertible_only: bool,
    ks: &[u32],
    limits: &Limits,
) -> Result<(WindowReport, Sweep)> {
    ctx.require_nonmaximal()?;
    let sweep = Sweep::run(ctx, p, bound, invertible_only, limits)?;
    let stats = sweep.stats();
    let report = report_from_stats(ctx, p, &sweep, &stats, ks)?;
    Ok((report, sweep))
}

fn report_from_stats(
    ctx: &OrderContext,
    p: i128,
    sweep: &Sweep,
    stats: &[ElementStats],
    ks: &[u32],
) -> Result<WindowReport> {
    let mut delta = BTreeSet::new();
    let mut ca = BTreeSet::new();
    let mut max_length = 0;
    let mut uk: BTreeMap<u32, BTreeSet<u32>> = ks.iter().map(|&k| (k, BTreeSet::new())).collect();
    for s in stats {
        delta.extend(delta_of(&s.lengths));
        if s.catenary > 0 {
            ca.insert(s.catenary);
        }
        max_length = max_length.max(*s.lengths.last().unwrap_or(&0));
        for (k, u) in uk.iter_mut() {
            if s.lengths.contains(k) {
                u.extend(s.lengths.iter().copied());
            }
        }
    }
    let n = max_atom_exponent(ctx, p)?;
    let uk_bound: BTreeMap<u32, Option<u32>> = ks.iter().map(|&k| (k, n.map(|n| k * n / 2))).collect();
    let uk_complete = uk_bound.iter().map(|(&k, b)| (k, matches!(b, Some(b) if *b <= max_length))).collect();
    let local = local_conductor_order(ctx, p)?;
    let class = classify(&local)?;
    let predicted_ca =
        if sweep.invertible_only { class.predicted_ca_invertible.clone() } else { class.predicted_ca_full.clone() };
    let mut predicted_uk = BTreeMap::new();
    for &k in ks {
        if k >= 2 {
            predicted_uk.insert(k, unions_closed_form(ctx, p, k)?);
        }
    }
    Ok(WindowReport {
        d: ctx.d,
        f: ctx.f,
        p: Some(p),
        norm_bound: sweep.bound,
        invertible_only: sweep.invertible_only,
        element_count: stats.len() + 1,
        factorization_count: sweep.factorization_count(),
        max_length,
        max_atom_exponent: n,
        computed_c: ca.iter().next_back().copied().unwrap_or(0),
        computed_delta: delta,
        computed_ca: ca,
        computed_uk: uk,
        uk_bound,
        uk_complete,
        predicted_delta: class.predicted_delta,
        predicted_c: class.predicted_c,
        predicted_ca,
        predicted_uk,
    })
}

/// Largest length `l` such that some element has both `k` and `l` in its set
/// of lengths; `None` when `k` occurs in no set of lengths in the window.
pub fn rho_k_window(report: &WindowReport, k: u32) -> Option<u32> {
    report.computed_uk.get(&k).and_then(|u| u.iter().next_back().copied())
}

/// Checks `l <= floor(kN/2)` for every pair `k, l` of lengths of every
/// element in the sweep. Returns the offending elements.
pub fn length_bound_violations(sweep: &Sweep, n: u32) -> Vec<(LocalTriple, u32, u32)> {
    let mut bad = Vec::new();
    for s in sweep.stats() {
        for &k in &s.lengths {
            for &l in &s.lengths {
                if l > k * n / 2 {
                    bad.push((s.element, k, l));
                }
            }
        }
    }
    bad
}
