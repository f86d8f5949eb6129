//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use qorder::arith::{is_squarefree, pow};
use qorder::factor_engine::{
    catenary_degree, enumerate_elements, enumerate_factorizations, length_bound_violations, rho_k_window, window_sweep,
    Factorization, Limits, Sweep, WindowReport,
};
use qorder::global_monoid::{
    classify, generator_identity_check, min_delta_check, principality_search_imaginary, rho_k_closed_form, Elasticity,
    MinDelta, MinDeltaInput, PicData, Principality,
};
use qorder::local_monoid::{
    atom_count_closed_form, conjugate, enumerate_atoms, is_invertible, lattice_oracle_mul, local_conductor_order,
    max_atom_exponent, reduce_conductor, star, star_shifted, star_unchecked, LocalTriple,
};
use qorder::order::{make_order, OrderContext};
use qorder::Result;

type Outcome = Result<(bool, String)>;

fn ctx(d: i128, f: i128) -> OrderContext {
    make_order(d, f).expect("valid order")
}

fn set(v: impl IntoIterator<Item = u32>) -> BTreeSet<u32> {
    v.into_iter().collect()
}

fn fmt_set(s: &BTreeSet<u32>) -> String {
    let v: Vec<String> = s.iter().map(u32::to_string).collect();
    format!("{{{}}}", v.join(","))
}

fn sweep(d: i128, f: i128, p: i128, bound: u32, inv: bool, ks: &[u32]) -> Result<(WindowReport, Sweep)> {
    window_sweep(&ctx(d, f), p, bound, inv, ks, &Limits::default())
}

/// Closed-form atom counts against brute force over the whole census grid.
fn atom_census() -> Outcome {
    let ds: Vec<i128> = (-50..=50).filter(|&d| d != 0 && d != 1 && is_squarefree(d)).collect();
    let results: Vec<Result<(usize, Vec<String>)>> = std::thread::scope(|s| {
        let handles: Vec<_> = ds
            .chunks(ds.len().div_ceil(8))
            .map(|chunk| {
                s.spawn(move || -> Result<(usize, Vec<String>)> {
                    let mut rows = 0;
                    let mut bad = Vec::new();
                    for &d in chunk {
                        for f in 2..=48 {
                            let o = ctx(d, f);
                            for &(p, _) in &o.conductor_primes {
                                let mut m = 1;
                                while pow(p, m)? <= 1 << 16 {
                                    let brute = enumerate_atoms(&o, p, m, true, 1 << 16)?.len() as i128;
                                    let closed = atom_count_closed_form(&o, p, m)?;
                                    rows += 1;
                                    if brute != closed {
                                        bad.push(format!("d={d} f={f} p={p} m={m}: {closed} vs {brute}"));
                                    }
                                    m += 1;
                                }
                            }
                        }
                    }
                    Ok((rows, bad))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("census thread")).collect()
    });
    let mut rows = 0;
    let mut bad = Vec::new();
    for r in results {
        let (n, b) = r?;
        rows += n;
        bad.extend(b);
    }
    Ok((
        bad.is_empty(),
        format!("{rows} (d,f,p,m) rows, {} mismatches {:?}", bad.len(), bad.iter().take(3).collect::<Vec<_>>()),
    ))
}

/// The closed-form product against lattice multiplication.
fn star_vs_lattice() -> Outcome {
    let contexts: [(i128, i128); 22] = [
        (-2, 2),
        (-1, 2),
        (-3, 2),
        (-5, 2),
        (-7, 2),
        (2, 2),
        (3, 2),
        (5, 2),
        (17, 4),
        (-2, 4),
        (-1, 3),
        (2, 3),
        (3, 3),
        (-3, 9),
        (5, 9),
        (-5, 5),
        (5, 5),
        (7, 5),
        (-1, 7),
        (13, 6),
        (-15, 12),
        (6, 8),
    ];
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut pairs = 0;
    let mut bad = Vec::new();
    for &(d, f) in &contexts {
        let o = ctx(d, f);
        for &(p, _) in &o.conductor_primes {
            let bound = if p <= 3 { 8 } else { 5 };
            let elems = enumerate_elements(&o, p, bound, false, &Limits::default())?;
            for _ in 0..600 {
                let a = elems[rng.gen_range(0..elems.len())];
                let b = elems[rng.gen_range(0..elems.len())];
                pairs += 1;
                if star(&o, &a, &b)? != lattice_oracle_mul(&o, &a, &b)? {
                    bad.push(format!("d={d} f={f}: {a} * {b}"));
                }
            }
        }
    }
    let mut exhaustive = 0;
    for (d, f, p) in [(-2, 2, 2), (17, 4, 2), (5, 2, 2), (-1, 3, 3), (3, 2, 2)] {
        let o = ctx(d, f);
        let elems = enumerate_elements(&o, p, 8, false, &Limits::default())?;
        for (i, a) in elems.iter().enumerate() {
            for b in &elems[i..] {
                exhaustive += 1;
                if star_unchecked(&o, a, b)? != lattice_oracle_mul(&o, a, b)? {
                    bad.push(format!("d={d} f={f}: {a} * {b}"));
                }
            }
        }
    }
    Ok((
        pairs >= 10_000 && contexts.len() >= 20 && bad.is_empty(),
        format!(
            "{pairs} random pairs over {} orders, {exhaustive} exhaustive pairs in 5 orders, {} mismatches",
            contexts.len(),
            bad.len()
        ),
    ))
}

/// `Z(pP)` consists of `P*P`, `pO*P` and `A*P` for the invertible atoms `A`
/// of norm `p^2`; its catenary degree is 1; 2 is a catenary degree of the
/// invertible window.
fn p_times_maximal_ideal() -> Outcome {
    let contexts = [
        (-2, 2, 2),
        (5, 2, 2),
        (17, 2, 2),
        (-1, 2, 2),
        (3, 3, 3),
        (-3, 3, 3),
        (2, 3, 3),
        (5, 5, 5),
        (-5, 9, 3),
        (13, 6, 3),
    ];
    let mut notes = Vec::new();
    let mut ok = true;
    for (d, f, p) in contexts {
        let o = ctx(d, f);
        let first = enumerate_atoms(&o, p, 1, false, 1 << 20)?;
        let [big_p] = first[..] else {
            ok = false;
            notes.push(format!("d={d} f={f}: {} atoms of norm {p}", first.len()));
            continue;
        };
        let target = star(&o, &LocalTriple::p_o(p), &big_p)?;
        let fs = enumerate_factorizations(&o, &target, false, &Limits::default())?;
        let want: BTreeSet<Factorization> = [big_p, LocalTriple::p_o(p)]
            .into_iter()
            .chain(enumerate_atoms(&o, p, 2, true, 1 << 20)?)
            .map(|a| Factorization::new(vec![a, big_p]))
            .collect();
        let got: BTreeSet<Factorization> = fs.factorizations.iter().cloned().collect();
        let c = catenary_degree(&fs);
        // for a split p the norm p^2 atoms may be missing, so c = 2 shows up later
        let bound = match p {
            2 => 8,
            3 => 5,
            _ => 4,
        };
        let (report, _) = sweep(d, f, p, bound, true, &[])?;
        let two = report.computed_ca.contains(&2);
        if got != want || c != 1 || !two {
            ok = false;
        }
        notes.push(format!("{d}/{f}/{p}:|Z|={},c={c},2inCa={two}", got.len()));
    }
    Ok((ok, notes.join(" ")))
}

fn classification_windows() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();

    let class = classify(&ctx(5, 2))?;
    let (r, _) = sweep(5, 2, 2, 10, false, &[])?;
    let hf = class.half_factorial && class.predicted_c == 2 && r.computed_delta.is_empty() && r.computed_c == 2;
    ok &= hf;
    notes.push(format!("(5,2) half-factorial={} c={}", r.computed_delta.is_empty(), r.computed_c));

    let cases: [(i128, i128, i128, u32, bool, BTreeSet<u32>, BTreeSet<u32>); 4] = [
        (-2, 2, 2, 10, false, set([1]), set(1..=3)),
        (-2, 2, 2, 10, true, set([1]), set(2..=3)),
        (5, 9, 3, 10, true, set(1..=2), set(2..=4)),
        (17, 4, 2, 12, true, set(1..=3), set(2..=5)),
    ];
    for (d, f, p, bound, inv, delta, ca) in cases {
        let (r, _) = sweep(d, f, p, bound, inv, &[])?;
        let good = r.computed_delta == delta && r.computed_ca == ca && r.delta_matches() && r.ca_matches();
        ok &= good;
        notes.push(format!(
            "({d},{f},p={p},{}) D={} Ca={}",
            if inv { "inv" } else { "full" },
            fmt_set(&r.computed_delta),
            fmt_set(&r.computed_ca)
        ));
    }
    Ok((ok, notes.join("; ")))
}

fn witness_length_sets() -> Outcome {
    let o = ctx(17, 4);
    let (_, sw) = sweep(17, 4, 2, 12, true, &[])?;
    let stats: BTreeMap<LocalTriple, BTreeSet<u32>> = sw.stats().into_iter().map(|s| (s.element, s.lengths)).collect();

    let mut pair = None;
    for (e, zs) in &sw.factorizations {
        if stats[e] == set([2, 4]) {
            if let Some(z) = zs.iter().find(|z| z.len() == 2) {
                pair = Some((sw.atoms[z[0] as usize], sw.atoms[z[1] as usize], *e));
                break;
            }
        }
    }

    let mut norm32 = None;
    for a in sw.atoms.iter().filter(|a| a.norm_exponent() == 5) {
        let prod = star(&o, a, &conjugate(&o, a)?)?;
        if stats.get(&prod) == Some(&set([2, 5])) {
            norm32 = Some((*a, prod));
            break;
        }
    }
    let detail = format!(
        "pair {}; norm-32 atom {}",
        pair.map_or("none".into(), |(i, j, e)| format!("{i}*{j}={e} L={{2,4}}")),
        norm32.map_or("none".into(), |(a, e)| format!("{a}*conj={e} L={{2,5}}")),
    );
    Ok((pair.is_some() && norm32.is_some(), detail))
}

fn union_check(report: &WindowReport, ls: std::ops::RangeInclusive<u32>) -> (bool, Vec<String>) {
    let mut ok = true;
    let mut notes = Vec::new();
    for l in ls {
        let got = report.uk_upper(l);
        let want = set(l..=l * 3 / 2);
        let good = got == want;
        ok &= good;
        let complete = report.uk_complete.get(&l).copied().unwrap_or(false);
        notes.push(format!(
            "U_{l}={}{}{}",
            fmt_set(&got),
            if good { "" } else { "!=" },
            if good {
                String::new()
            } else if complete {
                fmt_set(&want)
            } else {
                format!("{} (window-incomplete)", fmt_set(&want))
            }
        ));
    }
    (ok, notes)
}

fn unions_of_length_sets() -> Outcome {
    let ks: Vec<u32> = (2..=6).collect();
    let (r, _) = sweep(-2, 2, 2, 14, false, &ks)?;
    let (ok, mut notes) = union_check(&r, 2..=6);

    // split prime: 2 splits in Q(sqrt -7)
    let (r, _) = sweep(-7, 2, 2, 10, false, &[2])?;
    let u2 = r.uk_upper(2);
    let b = u2.iter().next_back().copied().unwrap_or(0);
    let split_ok = u2 == set(2..=b) && b > 3 && r.predicted_uk[&2].contains(b);
    notes.push(format!("split (-7,2): U_2=[2,{b}] {}", if split_ok { "covered" } else { "gap" }));

    // the same check one window further out
    let (r18, _) = sweep(-2, 2, 2, 18, false, &ks)?;
    let (ok18, n18) = union_check(&r18, 2..=6);
    println!("  note: (-2,2) at bound 18: {} -> {}", n18.join(" "), if ok18 { "all match" } else { "mismatch" });

    Ok((ok && split_ok, notes.join(" ")))
}

fn elasticities() -> Outcome {
    let o = ctx(-2, 2);
    let ks: Vec<u32> = (2..=6).collect();
    let (r, sw) = sweep(-2, 2, 2, 18, false, &ks)?;
    let n = max_atom_exponent(&o, 2)?.expect("ramified");
    let violations = length_bound_violations(&sw, n);
    let mut ok = violations.is_empty();
    let mut notes = Vec::new();
    for k in 2..=6 {
        let want = k + k / 2;
        let got = rho_k_window(&r, k);
        let closed = match rho_k_closed_form(&o, k)? {
            Elasticity::Finite { rho_k, .. } => Some(rho_k),
            Elasticity::Unbounded => None,
        };
        // a witness element with factorizations of length k and rho_k
        let witness = sw.stats().into_iter().find(|s| s.lengths.contains(&k) && s.lengths.contains(&want));
        let good = got == Some(want) && closed == Some(want) && witness.is_some() && k * n / 2 == want;
        ok &= good;
        notes.push(format!(
            "rho_{k}={} via {}",
            got.map_or("-".into(), |v| v.to_string()),
            witness.map_or("none".into(), |s| s.element.to_string())
        ));
    }
    notes.push(format!("bound violations {}", violations.len()));
    Ok((ok, notes.join(" ")))
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let t = Instant::now();
    let v = f()?;
    Ok((v, t.elapsed().as_secs_f64()))
}

fn min_delta_suite() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();

    let (v, s1) = timed(|| {
        let input = MinDeltaInput::new(PicData { pic_order: Some(2), ..Default::default() });
        min_delta_check(&ctx(15, 2), &input)
    })?;
    let good = v.value == MinDelta::Two && v.certificates.iter().any(|c| c.kind == "cubic-atoms-nonprincipal");
    ok &= good && s1 < 1.0;
    notes.push(format!("(15,2)->{}", v.value));

    for (d, f, u, w, norm) in [(30, 5, 12625, 2305, 125), (42, 7, 825601, 127393, 343)] {
        let (v, s) = timed(|| {
            let id = generator_identity_check(d, f, u, w, norm)?;
            let mut input = MinDeltaInput::new(PicData::default());
            input.witnesses.push((u, w));
            Ok((id, min_delta_check(&ctx(d, f), &input)?))
        })?;
        let (id, v) = v;
        let good = id && v.value == MinDelta::One && v.certificates.iter().any(|c| c.kind == "principal-cubic-atom");
        ok &= good && s < 1.0;
        notes.push(format!("({d},{f}) generator={id} ->{}", v.value));
    }

    let o = ctx(-2, 2);
    let (split, s) = timed(|| {
        let i = principality_search_imaginary(&o, &LocalTriple::new(2, 0, 3, 0), 1 << 20)?;
        let j = principality_search_imaginary(&o, &LocalTriple::new(2, 0, 3, 4), 1 << 20)?;
        Ok((i, j))
    })?;
    let good = matches!(split.0, Principality::Principal { .. }) && split.1 == Principality::NotPrincipal;
    ok &= good && s < 1.0;
    notes.push(format!("(-2,2) I={:?} J={:?}", split.0, split.1));
    Ok((ok, notes.join("; ")))
}

/// Exhaustive versions of the algebraic properties on small windows.
fn property_suites() -> Outcome {
    let mut checked = 0u64;
    let mut bad = Vec::new();
    let contexts = [(-2, 2, 2), (17, 4, 2), (5, 9, 3), (5, 2, 2), (-1, 3, 3), (-7, 2, 2)];
    for (d, f, p) in contexts {
        let o = ctx(d, f);
        let elems = enumerate_elements(&o, p, 5, false, &Limits::default())?;
        for a in &elems {
            let ca = conjugate(&o, a)?;
            if conjugate(&o, &ca)? != *a || is_invertible(&o, &ca)? != is_invertible(&o, a)? {
                bad.push(format!("conjugate {a}"));
            }
            if is_invertible(&o, a)? && star(&o, a, &ca)? != LocalTriple::new(p, a.norm_exponent(), 0, 0) {
                bad.push(format!("I*conj(I) for {a}"));
            }
            for b in &elems {
                checked += 1;
                let ab = star(&o, a, b)?;
                if ab != star(&o, b, a)? || ab != star_shifted(&o, a, b, 1)? {
                    bad.push(format!("{a}*{b} not well defined"));
                }
                let inv = is_invertible(&o, a)? || is_invertible(&o, b)?;
                let sum = a.norm_exponent() + b.norm_exponent();
                if sum > ab.norm_exponent() || (sum == ab.norm_exponent()) != inv {
                    bad.push(format!("norm of {a}*{b}"));
                }
                if !a.is_identity() && !b.is_identity() && ab.x == 0 {
                    bad.push(format!("{a}*{b} not in pO"));
                }
                for c in elems.iter().step_by(3) {
                    if star(&o, &ab, c)? != star(&o, a, &star(&o, b, c)?)? {
                        bad.push(format!("associativity {a} {b} {c}"));
                    }
                }
            }
        }
        // length bound over every windowed factorization
        let (_, sw) = sweep(d, f, p, 8, false, &[])?;
        if let Some(n) = max_atom_exponent(&o, p)? {
            bad.extend(length_bound_violations(&sw, n).iter().map(|v| format!("length bound {v:?}")));
        }
    }
    // conductor reduction is a homomorphism
    for (d, f, p) in [(5, 6, 2), (-2, 6, 3), (17, 12, 2), (-1, 15, 5), (13, 6, 3)] {
        let o = ctx(d, f);
        let local = local_conductor_order(&o, p)?;
        let bound = if p == 5 { 6 } else { 10 };
        let elems = enumerate_elements(&o, p, bound, false, &Limits::default())?;
        for a in &elems {
            for b in &elems {
                if a.norm_exponent() + b.norm_exponent() > bound {
                    continue;
                }
                checked += 1;
                let lhs = reduce_conductor(&star_unchecked(&o, a, b)?, &o, &local)?;
                let rhs = star(&local, &reduce_conductor(a, &o, &local)?, &reduce_conductor(b, &o, &local)?)?;
                if lhs != rhs {
                    bad.push(format!("reduction {a} {b}"));
                }
            }
        }
    }
    Ok((
        bad.is_empty(),
        format!("{checked} checks, {} failures {:?}", bad.len(), bad.iter().take(3).collect::<Vec<_>>()),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 atom census matches closed form", atom_census),
        ("2 star product matches lattice multiplication", star_vs_lattice),
        ("3 factorizations of pP", p_times_maximal_ideal),
        ("4 classification windows", classification_windows),
        ("5 witness sets of lengths", witness_length_sets),
        ("6 unions of sets of lengths", unions_of_length_sets),
        ("7 elasticities", elasticities),
        ("8 min-delta suite", min_delta_suite),
        ("9 property suites", property_suites),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let t = Instant::now();
        let (ok, detail) = match run() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!("{} criterion {name} [{:.1}s]: {detail}", if ok { "PASS" } else { "FAIL" }, t.elapsed().as_secs_f64());
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
