//! Command-line front end. `run` parses arguments, dispatches, and renders
//! the result as json, tsv or plain text.
//!
//! Exit codes: 0 success, 2 bad arguments or input data, 3 resource limit,
//! 4 internal invariant violation (including any oracle mismatch).
//!
//! The resource ceiling on scanned moduli is read from `QORDER_MAX_MODULUS`.
//!
//! Class group data for `min-delta` may come from a file of lines
//! `d f h_K unit_index`, whitespace separated; `#` starts a comment.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::factor_engine::{
    catenary_degree, delta_of, enumerate_elements, enumerate_factorizations, length_set, rho_k_window, window_sweep,
    Limits, WindowReport,
};
use crate::global_monoid::{
    aggregate, classify, min_delta_check, rho_k_closed_form, Elasticity, MinDeltaInput, PicData, UnionForm,
};
use crate::local_monoid::{
    atom_count_closed_form, enumerate_atoms, is_invertible, lattice_oracle_mul, star, LocalTriple,
};
use crate::order::{make_order, OrderContext};

pub const MAX_MODULUS_ENV: &str = "QORDER_MAX_MODULUS";
pub const DEFAULT_BOUND: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
    Human,
}

#[derive(Debug, Parser)]
#[command(name = "qorder", version, about = "Primary ideals of quadratic orders and their factorization invariants")]
struct Cli {
    #[arg(long, value_enum, default_value = "human", global = true)]
    format: Format,
    /// File of `d f h_K unit_index` lines.
    #[arg(long, global = true)]
    pic_data: Option<PathBuf>,
    /// Largest number of search nodes per factorization search.
    #[arg(long, global = true)]
    max_nodes: Option<u64>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Args)]
struct OrderArgs {
    #[arg(long, allow_hyphen_values = true)]
    d: i128,
    #[arg(long)]
    f: i128,
    /// Conductor prime; may be omitted when f has a single prime divisor.
    #[arg(long)]
    p: Option<i128>,
}

#[derive(Debug, Args)]
struct WindowArgs {
    /// Largest norm exponent in the window.
    #[arg(long, default_value_t = DEFAULT_BOUND)]
    bound: u32,
    /// Restrict to invertible ideals.
    #[arg(long)]
    invertible: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form atom counts against brute force, per norm exponent.
    Atoms {
        #[command(flatten)]
        order: OrderArgs,
        #[arg(long, default_value_t = 6)]
        max_m: u32,
    },
    /// Product of two triples, cross-checked by lattice multiplication.
    Star {
        #[command(flatten)]
        order: OrderArgs,
        #[arg(long, value_parser = parse_triple)]
        a: (u32, u32, i128),
        #[arg(long, value_parser = parse_triple)]
        b: (u32, u32, i128),
    },
    /// All factorizations of a triple with its set of lengths and catenary degree.
    Factor {
        #[command(flatten)]
        order: OrderArgs,
        #[arg(long, value_parser = parse_triple)]
        t: (u32, u32, i128),
        #[arg(long)]
        invertible: bool,
    },
    /// Elements of bounded norm.
    Elements {
        #[command(flatten)]
        order: OrderArgs,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Predicted invariants from the conductor, optionally checked on windows.
    Classify {
        #[command(flatten)]
        order: OrderArgs,
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: u32,
    },
    /// Invariants of one window next to their predictions.
    Sweep {
        #[command(flatten)]
        order: OrderArgs,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, value_delimiter = ',', default_values_t = vec![2u32, 3, 4])]
        k: Vec<u32>,
        /// Also list every element with its set of lengths.
        #[arg(long)]
        per_element: bool,
    },
    /// Unions of sets of lengths and elasticities.
    Unions {
        #[command(flatten)]
        order: OrderArgs,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, value_delimiter = ',', default_values_t = vec![2u32, 3, 4, 5, 6])]
        k: Vec<u32>,
    },
    /// Decides whether min Delta(O) is 1 or 2.
    MinDelta {
        #[arg(long, allow_hyphen_values = true)]
        d: i128,
        #[arg(long)]
        f: i128,
        #[arg(long)]
        pic_order: Option<i128>,
        #[arg(long)]
        h_k: Option<i128>,
        #[arg(long)]
        unit_index: Option<i128>,
        /// Claimed generator `u,v` of `u + v sqrt(d)`; repeatable.
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        witness: Vec<(i128, i128)>,
        #[arg(long, default_value_t = 1 << 20)]
        budget: i128,
    },
    /// Atom census over a grid of orders.
    #[command(name = "verify-table1")]
    VerifyCensus {
        #[arg(long, default_value_t = 50)]
        max_abs_d: i128,
        #[arg(long, default_value_t = 48)]
        max_f: i128,
        /// Largest modulus is 2^this.
        #[arg(long, default_value_t = 16)]
        modulus_exp: u32,
    },
    /// Recomputes the classification on the reference windows.
    #[command(name = "verify-thm11")]
    VerifyClassification,
}

fn parse_triple(s: &str) -> std::result::Result<(u32, u32, i128), String> {
    let parts: Vec<&str> = s.trim_matches(|c| c == '(' || c == ')').split(',').map(str::trim).collect();
    match parts[..] {
        [x, y, z] => Ok((
            x.parse().map_err(|e| format!("x: {e}"))?,
            y.parse().map_err(|e| format!("y: {e}"))?,
            z.parse().map_err(|e| format!("z: {e}"))?,
        )),
        _ => Err(format!("expected x,y,z but got {s:?}")),
    }
}

fn parse_pair(s: &str) -> std::result::Result<(i128, i128), String> {
    match s.split(',').map(str::trim).collect::<Vec<_>>()[..] {
        [u, v] => Ok((u.parse().map_err(|e| format!("{e}"))?, v.parse().map_err(|e| format!("{e}"))?)),
        _ => Err(format!("expected u,v but got {s:?}")),
    }
}

/// Structured command output.
#[derive(Debug, Default)]
struct Out {
    fields: Map<String, Value>,
    tables: Vec<(String, Vec<String>, Vec<Vec<Value>>)>,
    /// Set when an oracle disagreed; turns into exit code 4.
    mismatch: Option<String>,
}

impl Out {
    fn field(&mut self, k: &str, v: Value) {
        self.fields.insert(k.to_string(), v);
    }

    fn table(&mut self, name: &str, headers: &[&str], rows: Vec<Vec<Value>>) {
        self.tables.push((name.into(), headers.iter().map(|h| h.to_string()).collect(), rows));
    }
}

fn num(n: impl ToString) -> Value {
    Value::String(n.to_string())
}

fn opt_num<T: ToString>(n: Option<T>) -> Value {
    n.map_or(Value::Null, num)
}

fn nums(s: &BTreeSet<u32>) -> Value {
    Value::Array(s.iter().map(num).collect())
}

fn triple(t: &LocalTriple) -> Value {
    let mut m = Map::new();
    m.insert("p".into(), num(t.p));
    m.insert("x".into(), num(t.x));
    m.insert("y".into(), num(t.y));
    m.insert("z".into(), num(t.z));
    Value::Object(m)
}

fn strings(v: &[String]) -> Value {
    Value::Array(v.iter().cloned().map(Value::String).collect())
}

/// Plain-text form of a value for tsv and human output.
fn plain(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => n.to_string(),
        Value::Array(a) => {
            if a.iter().all(|x| x.is_string() && x.as_str().is_some_and(|s| s.parse::<i128>().is_ok())) {
                format!("{{{}}}", a.iter().map(plain).collect::<Vec<_>>().join(","))
            } else {
                a.iter().map(plain).collect::<Vec<_>>().join("; ")
            }
        }
        Value::Object(m) => match (m.get("x"), m.get("y"), m.get("z")) {
            (Some(x), Some(y), Some(z)) => format!("({},{},{})", plain(x), plain(y), plain(z)),
            _ => serde_json::to_string(v).unwrap_or_default(),
        },
    }
}

/// Field text for tsv and human output; an empty message list reads `none`.
fn plain_field(k: &str, v: &Value) -> String {
    match v {
        Value::Array(a) if a.is_empty() && MESSAGE_FIELDS.contains(&k) => "none".into(),
        _ => plain(v),
    }
}

const MESSAGE_FIELDS: [&str; 2] = ["assumptions", "warnings"];

fn render(out: &Out, command: &str, format: Format) -> String {
    match format {
        Format::Json => {
            let mut top = out.fields.clone();
            top.insert("schema".into(), num(1));
            top.insert("command".into(), Value::String(command.into()));
            for (name, headers, rows) in &out.tables {
                let rows = rows
                    .iter()
                    .map(|r| Value::Object(headers.iter().cloned().zip(r.iter().cloned()).collect()))
                    .collect();
                top.insert(name.clone(), Value::Array(rows));
            }
            let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("json values serialize");
            s.push('\n');
            s
        }
        Format::Tsv => {
            let mut s = String::new();
            for (k, v) in &out.fields {
                s += &format!("{k}\t{}\n", plain_field(k, v));
            }
            for (name, headers, rows) in &out.tables {
                s += &format!("# {name}\n{}\n", headers.join("\t"));
                for r in rows {
                    s += &r.iter().map(plain).collect::<Vec<_>>().join("\t");
                    s.push('\n');
                }
            }
            s
        }
        Format::Human => {
            let mut s = String::new();
            let w = out.fields.keys().map(String::len).max().unwrap_or(0);
            for (k, v) in &out.fields {
                s += &format!("{k:w$}  {}\n", plain_field(k, v));
            }
            for (name, headers, rows) in &out.tables {
                let cells: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(plain).collect()).collect();
                let widths: Vec<usize> = headers
                    .iter()
                    .enumerate()
                    .map(|(i, h)| cells.iter().map(|r| r[i].len()).chain([h.len()]).max().unwrap_or(0))
                    .collect();
                let line = |r: &[String]| {
                    let v: Vec<String> = r.iter().zip(&widths).map(|(c, w)| format!("{c:w$}")).collect();
                    v.join("  ").trim_end().to_string() + "\n"
                };
                s += &format!("\n{name}:\n");
                s += &line(headers);
                for r in &cells {
                    s += &line(r);
                }
            }
            s
        }
    }
}

fn limits(max_nodes: Option<u64>) -> Result<Limits> {
    let mut l = Limits::default();
    if let Ok(v) = std::env::var(MAX_MODULUS_ENV) {
        l.max_modulus = v
            .trim()
            .parse()
            .ok()
            .filter(|&m: &i128| m > 1)
            .ok_or_else(|| Error::Argument(format!("{MAX_MODULUS_ENV} must be an integer > 1, got {v:?}")))?;
    }
    if let Some(n) = max_nodes {
        l.max_nodes = n;
    }
    Ok(l)
}

/// The order and the conductor prime to work at.
fn resolve(a: &OrderArgs) -> Result<(OrderContext, i128)> {
    let o = make_order(a.d, a.f)?;
    o.require_nonmaximal()?;
    let p = match (a.p, &o.conductor_primes[..]) {
        (Some(p), _) => {
            o.require_conductor_prime(p)?;
            p
        }
        (None, [(p, _)]) => *p,
        (None, ps) => {
            let choices: Vec<String> = ps.iter().map(|(p, _)| p.to_string()).collect();
            return Err(Error::Argument(format!(
                "f = {} has several prime divisors; pass --p with one of {}",
                a.f,
                choices.join(", ")
            )));
        }
    };
    Ok((o, p))
}

fn order_fields(out: &mut Out, o: &OrderContext, p: Option<i128>) {
    out.field("d", num(o.d));
    out.field("f", num(o.f));
    if let Some(p) = p {
        out.field("p", num(p));
        out.field("splitting", Value::String(o.splitting(p).to_string()));
    }
}

fn to_triple(p: i128, t: (u32, u32, i128)) -> LocalTriple {
    LocalTriple::new(p, t.0, t.1, t.2)
}

fn cmd_atoms(a: &OrderArgs, max_m: u32, l: &Limits) -> Result<Out> {
    let (o, p) = resolve(a)?;
    let mut out = Out::default();
    order_fields(&mut out, &o, Some(p));
    let mut rows = Vec::new();
    let mut bad = Vec::new();
    for m in 1..=max_m {
        let closed = atom_count_closed_form(&o, p, m)?;
        let brute = enumerate_atoms(&o, p, m, true, l.max_modulus)?.len() as i128;
        if closed != brute {
            bad.push(m.to_string());
        }
        rows.push(vec![num(m), num(closed), num(brute), Value::Bool(closed == brute)]);
    }
    out.table("atoms", &["m", "closed_form", "brute_force", "ok"], rows);
    if !bad.is_empty() {
        out.mismatch = Some(format!("atom counts disagree at m = {}", bad.join(", ")));
    }
    Ok(out)
}

fn cmd_star(a: &OrderArgs, s: (u32, u32, i128), t: (u32, u32, i128)) -> Result<Out> {
    let (o, p) = resolve(a)?;
    let (s, t) = (to_triple(p, s), to_triple(p, t));
    let prod = star(&o, &s, &t)?;
    let oracle = lattice_oracle_mul(&o, &s, &t)?;
    let mut out = Out::default();
    order_fields(&mut out, &o, Some(p));
    out.field("a", triple(&s));
    out.field("b", triple(&t));
    out.field("product", triple(&prod));
    out.field("oracle", triple(&oracle));
    out.field("equal", Value::Bool(prod == oracle));
    if prod != oracle {
        out.mismatch = Some(format!("{s} * {t}: closed form {prod}, lattice {oracle}"));
    }
    Ok(out)
}

fn cmd_factor(a: &OrderArgs, t: (u32, u32, i128), invertible: bool, l: &Limits) -> Result<Out> {
    let (o, p) = resolve(a)?;
    let t = to_triple(p, t);
    let fs = enumerate_factorizations(&o, &t, invertible, l)?;
    let lengths = length_set(&fs);
    let mut out = Out::default();
    order_fields(&mut out, &o, Some(p));
    out.field("target", triple(&t));
    out.field("invertible_only", Value::Bool(invertible));
    out.field("factorization_count", num(fs.factorizations.len()));
    out.field("lengths", nums(&lengths));
    out.field("delta", nums(&delta_of(&lengths)));
    out.field("catenary", num(catenary_degree(&fs)));
    let rows = fs
        .factorizations
        .iter()
        .map(|z| vec![num(z.len()), Value::Array(z.atoms.iter().map(triple).collect())])
        .collect();
    out.table("factorizations", &["length", "atoms"], rows);
    Ok(out)
}

fn cmd_elements(a: &OrderArgs, w: &WindowArgs, l: &Limits) -> Result<Out> {
    let (o, p) = resolve(a)?;
    let elems = enumerate_elements(&o, p, w.bound, w.invertible, l)?;
    let mut out = Out::default();
    order_fields(&mut out, &o, Some(p));
    out.field("bound", num(w.bound));
    out.field("invertible_only", Value::Bool(w.invertible));
    out.field("count", num(elems.len()));
    let mut rows = Vec::new();
    for e in &elems {
        rows.push(vec![triple(e), num(e.norm_exponent()), Value::Bool(is_invertible(&o, e)?)]);
    }
    out.table("elements", &["element", "norm_exponent", "invertible"], rows);
    Ok(out)
}

fn elasticity_value(e: Elasticity) -> Value {
    match e {
        Elasticity::Unbounded => Value::String("inf".into()),
        Elasticity::Finite { rho_num, rho_den: 1, .. } => num(rho_num),
        Elasticity::Finite { rho_num, rho_den, .. } => Value::String(format!("{rho_num}/{rho_den}")),
    }
}

fn report_row(r: &WindowReport) -> Vec<Value> {
    vec![
        opt_num(r.p),
        Value::Bool(r.invertible_only),
        nums(&r.computed_delta),
        nums(&r.predicted_delta),
        nums(&r.computed_ca),
        nums(&r.predicted_ca),
        num(r.computed_c),
        num(r.predicted_c),
        Value::Bool(r.delta_matches() && r.ca_matches() && r.c_matches()),
    ]
}

const REPORT_HEADERS: [&str; 9] =
    ["p", "invertible_only", "delta", "predicted_delta", "ca", "predicted_ca", "c", "predicted_c", "match"];

fn cmd_classify(a: &OrderArgs, verify: bool, bound: u32, l: &Limits) -> Result<Out> {
    let o = make_order(a.d, a.f)?;
    let c = classify(&o)?;
    let mut out = Out::default();
    order_fields(&mut out, &o, None);
    out.field("case", Value::String(c.case.to_string()));
    out.field("half_factorial", Value::Bool(c.half_factorial));
    out.field("predicted_delta", nums(&c.predicted_delta));
    out.field("predicted_ca_full", nums(&c.predicted_ca_full));
    out.field("predicted_ca_invertible", nums(&c.predicted_ca_invertible));
    out.field("predicted_c", num(c.predicted_c));
    out.field("elasticity", elasticity_value(rho_k_closed_form(&o, 2)?));
    if verify {
        out.field("bound", num(bound));
        let mut rows = Vec::new();
        let mut all = true;
        for inv in [false, true] {
            let mut reports = Vec::new();
            for &(p, _) in &o.conductor_primes {
                let (r, _) = window_sweep(&o, p, bound, inv, &[], l)?;
                rows.push(report_row(&r));
                reports.push(r);
            }
            let agg = aggregate(&o, &reports)?;
            all &= agg.delta_matches() && agg.ca_matches() && agg.c_matches();
            rows.push(report_row(&agg));
        }
        out.table("windows", &REPORT_HEADERS, rows);
        // small windows may miss values, so a mismatch here is reported, not fatal
        out.field("verified", Value::Bool(all));
    }
    Ok(out)
}

fn uk_rows(o: &OrderContext, r: &WindowReport, ks: &[u32]) -> Result<Vec<Vec<Value>>> {
    let mut rows = Vec::new();
    for &k in ks {
        let got = r.uk_upper(k);
        let predicted = r.predicted_uk.get(&k);
        // an unbounded union can only be seen as a prefix in a finite window
        let matches = match predicted {
            Some(UnionForm::Interval(lo, hi)) => got == (*lo..=*hi).collect(),
            Some(UnionForm::AllFrom2) => got.iter().next_back().is_some_and(|&t| got == (k..=t).collect()),
            None => false,
        };
        let rho = match rho_k_closed_form(o, k)? {
            Elasticity::Finite { rho_k, .. } => num(rho_k),
            Elasticity::Unbounded => Value::String("inf".into()),
        };
        rows.push(vec![
            num(k),
            nums(&got),
            predicted.map_or(Value::Null, |u| Value::String(u.to_string())),
            opt_num(r.uk_bound.get(&k).copied().flatten()),
            Value::Bool(r.uk_complete.get(&k).copied().unwrap_or(false)),
            Value::Bool(matches),
            opt_num(rho_k_window(r, k)),
            rho,
        ]);
    }
    Ok(rows)
}

const UK_HEADERS: [&str; 8] =
    ["k", "union", "predicted", "length_bound", "window_complete", "match", "rho_k_window", "rho_k"];

fn report_fields(out: &mut Out, r: &WindowReport) {
    out.field("bound", num(r.norm_bound));
    out.field("invertible_only", Value::Bool(r.invertible_only));
    out.field("element_count", num(r.element_count));
    out.field("factorization_count", num(r.factorization_count));
    out.field("max_length", num(r.max_length));
    out.field("max_atom_exponent", opt_num(r.max_atom_exponent));
    out.field("delta", nums(&r.computed_delta));
    out.field("predicted_delta", nums(&r.predicted_delta));
    out.field("ca", nums(&r.computed_ca));
    out.field("predicted_ca", nums(&r.predicted_ca));
    out.field("c", num(r.computed_c));
    out.field("predicted_c", num(r.predicted_c));
}

fn cmd_sweep(a: &OrderArgs, w: &WindowArgs, ks: &[u32], per_element: bool, l: &Limits) -> Result<Out> {
    let (o, p) = resolve(a)?;
    let (r, sweep) = window_sweep(&o, p, w.bound, w.invertible, ks, l)?;
    let mut out = Out::default();
    order_fields(&mut out, &o, Some(p));
    report_fields(&mut out, &r);
    out.table("unions", &UK_HEADERS, uk_rows(&o, &r, ks)?);
    if per_element {
        let rows = sweep
            .stats()
            .iter()
            .map(|s| vec![triple(&s.element), nums(&s.lengths), num(s.catenary), num(s.factorization_count)])
            .collect();
        out.table("elements", &["element", "lengths", "catenary", "factorizations"], rows);
    }
    Ok(out)
}

fn cmd_unions(a: &OrderArgs, w: &WindowArgs, ks: &[u32], l: &Limits) -> Result<Out> {
    let (o, p) = resolve(a)?;
    if ks.iter().any(|&k| k < 2) {
        return Err(Error::Argument("every k must be at least 2".into()));
    }
    let (r, _) = window_sweep(&o, p, w.bound, w.invertible, ks, l)?;
    let mut out = Out::default();
    order_fields(&mut out, &o, Some(p));
    out.field("bound", num(w.bound));
    out.field("invertible_only", Value::Bool(w.invertible));
    out.field("max_length", num(r.max_length));
    out.field("elasticity", elasticity_value(rho_k_closed_form(&o, 2)?));
    out.table("unions", &UK_HEADERS, uk_rows(&o, &r, ks)?);
    Ok(out)
}

/// `(h_K, unit_index)` for `(d, f)` from a pic-data file.
pub fn read_pic_file(path: &Path, d: i128, f: i128) -> Result<Option<(i128, i128)>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Argument(format!("cannot read {}: {e}", path.display())))?;
    parse_pic_data(&text, d, f)
}

pub fn parse_pic_data(text: &str, d: i128, f: i128) -> Result<Option<(i128, i128)>> {
    let mut found = None;
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let vals: Vec<i128> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Data(format!("pic data line {}: {e}", i + 1)))?;
        let [ld, lf, h, u] = vals[..] else {
            return Err(Error::Data(format!("pic data line {}: expected d f h_K unit_index", i + 1)));
        };
        if (ld, lf) == (d, f) {
            if found.is_some_and(|x| x != (h, u)) {
                return Err(Error::Data(format!("conflicting pic data for d = {d}, f = {f}")));
            }
            found = Some((h, u));
        }
    }
    Ok(found)
}

#[allow(clippy::too_many_arguments)]
fn cmd_min_delta(
    d: i128,
    f: i128,
    pic_order: Option<i128>,
    h_k: Option<i128>,
    unit_index: Option<i128>,
    witnesses: &[(i128, i128)],
    budget: i128,
    pic_file: Option<&Path>,
) -> Result<Out> {
    let o = make_order(d, f)?;
    let mut pic = PicData { pic_order, h_k, unit_index };
    if let Some(path) = pic_file {
        if let Some((h, u)) = read_pic_file(path, d, f)? {
            if h_k.is_some_and(|x| x != h) || unit_index.is_some_and(|x| x != u) {
                return Err(Error::Data("pic data file disagrees with the command line".into()));
            }
            pic.h_k = Some(h);
            pic.unit_index = Some(u);
        }
    }
    let mut input = MinDeltaInput::new(pic);
    input.witnesses = witnesses.to_vec();
    input.search_budget = budget;
    let v = min_delta_check(&o, &input)?;
    let mut out = Out::default();
    order_fields(&mut out, &o, None);
    out.field("pic_order", opt_num(pic.resolve(&o)?));
    out.field("min_delta", Value::String(v.value.to_string()));
    out.field("assumptions", strings(&v.assumptions));
    out.field("warnings", strings(&v.warnings));
    let rows =
        v.certificates.iter().map(|c| vec![Value::String(c.kind.into()), Value::String(c.detail.clone())]).collect();
    out.table("certificates", &["kind", "detail"], rows);
    Ok(out)
}

fn cmd_verify_census(max_abs_d: i128, max_f: i128, modulus_exp: u32) -> Result<Out> {
    if modulus_exp > 24 || max_abs_d < 2 || max_f < 2 {
        return Err(Error::Argument("need max-abs-d >= 2, max-f >= 2, modulus-exp <= 24".into()));
    }
    let ceiling = 1i128 << modulus_exp;
    let mut rows = 0u64;
    let mut bad = Vec::new();
    for d in -max_abs_d..=max_abs_d {
        let Ok(o0) = make_order(d, 1) else { continue };
        for f in 2..=max_f {
            let o = make_order(o0.d, f)?;
            for &(p, _) in &o.conductor_primes {
                let mut m = 1;
                while crate::arith::pow(p, m)? <= ceiling {
                    let closed = atom_count_closed_form(&o, p, m)?;
                    let brute = enumerate_atoms(&o, p, m, true, ceiling)?.len() as i128;
                    rows += 1;
                    if closed != brute {
                        bad.push(vec![num(d), num(f), num(p), num(m), num(closed), num(brute)]);
                    }
                    m += 1;
                }
            }
        }
    }
    let mut out = Out::default();
    out.field("rows_checked", num(rows));
    out.field("mismatches", num(bad.len()));
    if !bad.is_empty() {
        out.mismatch = Some(format!("{} atom counts disagree", bad.len()));
    }
    out.table("mismatches", &["d", "f", "p", "m", "closed_form", "brute_force"], bad);
    Ok(out)
}

/// Reference windows: `(d, f, p, bound, invertible_only)`.
pub const REFERENCE_WINDOWS: [(i128, i128, i128, u32, bool); 6] = [
    (5, 2, 2, 10, false),
    (-2, 2, 2, 10, false),
    (-2, 2, 2, 10, true),
    (5, 9, 3, 10, true),
    (5, 9, 3, 10, false),
    (17, 4, 2, 12, true),
];

fn cmd_verify_classification(l: &Limits) -> Result<Out> {
    let mut rows = Vec::new();
    let mut bad = Vec::new();
    for (d, f, p, bound, inv) in REFERENCE_WINDOWS {
        let o = make_order(d, f)?;
        let (r, _) = window_sweep(&o, p, bound, inv, &[], l)?;
        let ok = r.delta_matches() && r.ca_matches() && r.c_matches();
        if !ok {
            bad.push(format!("d={d} f={f} p={p}"));
        }
        let mut row = vec![num(d), num(f), num(bound)];
        row.extend(report_row(&r));
        rows.push(row);
    }
    let mut out = Out::default();
    out.field("windows", num(rows.len()));
    out.field("all_match", Value::Bool(bad.is_empty()));
    let mut headers = vec!["d", "f", "bound"];
    headers.extend(REPORT_HEADERS);
    out.table("windows", &headers, rows);
    if !bad.is_empty() {
        out.mismatch = Some(format!("windows disagree with the classification: {}", bad.join(", ")));
    }
    Ok(out)
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Argument(_) | Error::Data(_) => 2,
        Error::Overflow(_) | Error::Resource(_) => 3,
        Error::Invariant(_) => 4,
    }
}

fn dispatch(cli: &Cli) -> Result<(Out, &'static str)> {
    let l = limits(cli.max_nodes)?;
    Ok(match &cli.cmd {
        Command::Atoms { order, max_m } => (cmd_atoms(order, *max_m, &l)?, "atoms"),
        Command::Star { order, a, b } => (cmd_star(order, *a, *b)?, "star"),
        Command::Factor { order, t, invertible } => (cmd_factor(order, *t, *invertible, &l)?, "factor"),
        Command::Elements { order, window } => (cmd_elements(order, window, &l)?, "elements"),
        Command::Classify { order, verify, bound } => (cmd_classify(order, *verify, *bound, &l)?, "classify"),
        Command::Sweep { order, window, k, per_element } => (cmd_sweep(order, window, k, *per_element, &l)?, "sweep"),
        Command::Unions { order, window, k } => (cmd_unions(order, window, k, &l)?, "unions"),
        Command::MinDelta { d, f, pic_order, h_k, unit_index, witness, budget } => (
            cmd_min_delta(*d, *f, *pic_order, *h_k, *unit_index, witness, *budget, cli.pic_data.as_deref())?,
            "min-delta",
        ),
        Command::VerifyCensus { max_abs_d, max_f, modulus_exp } => {
            (cmd_verify_census(*max_abs_d, *max_f, *modulus_exp)?, "verify-table1")
        }
        Command::VerifyClassification => (cmd_verify_classification(&l)?, "verify-thm11"),
    })
}

/// Runs the command line `args` (program name first) and returns the exit
/// code. Results go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cli) {
        Ok((o, name)) => {
            let _ = out.write_all(render(&o, name, cli.format).as_bytes());
            match o.mismatch {
                Some(m) => {
                    let _ = writeln!(err, "error: oracle mismatch: {m}");
                    4
                }
                None => 0,
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
