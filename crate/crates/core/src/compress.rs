//! Compressing maps `φ = g(x_(e-1)) + η(x_0, ..., x_(e-2))` over `Z/p`.
//!
//! Multivariate polynomials are kept in canonical reduced form (every exponent
//! at most `p - 1`), so two polynomials are equal exactly when they agree as
//! functions. Each value carries both its dense value table and its sparse
//! coefficient map; tuples are indexed by `sum x_i p^i`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::ringcore::{interpolate_line, is_prime, reduce_exponent, UnivariateFn};
use crate::sequences::{LRSequence, LevelSequence};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultivariatePoly {
    p: u32,
    arity: usize,
    table: Vec<u32>,
    coeffs: BTreeMap<Vec<u32>, u32>,
}

fn size(p: u32, arity: usize) -> Result<usize> {
    (p as usize)
        .checked_pow(arity as u32)
        .filter(|&n| n <= 1 << 24)
        .ok_or_else(|| Error::InvalidInput(format!("p^{arity} points is too many to tabulate")))
}

fn exps_of(mut idx: usize, p: u32, arity: usize) -> Vec<u32> {
    let mut v = Vec::with_capacity(arity);
    for _ in 0..arity {
        v.push((idx % p as usize) as u32);
        idx /= p as usize;
    }
    v
}

fn index_of(tuple: &[u32], p: u32) -> usize {
    tuple.iter().rev().fold(0usize, |acc, &x| acc * p as usize + x as usize)
}

/// Applies `line` to every axis-aligned line of a dense `p^arity` array.
fn transform_axes(data: &mut [u32], p: u32, arity: usize, line: impl Fn(&[u32]) -> Vec<u32>) {
    let pu = p as usize;
    let mut stride = 1usize;
    let mut buf = vec![0u32; pu];
    for _ in 0..arity {
        for base in 0..data.len() {
            if (base / stride) % pu != 0 {
                continue;
            }
            for (k, slot) in buf.iter_mut().enumerate() {
                *slot = data[base + k * stride];
            }
            for (k, v) in line(&buf).into_iter().enumerate() {
                data[base + k * stride] = v;
            }
        }
        stride *= pu;
    }
}

fn evaluate_line(coeffs: &[u32], p: u32) -> Vec<u32> {
    let pm = p as u64;
    (0..pm)
        .map(|x| coeffs.iter().rev().fold(0u64, |acc, &c| (acc * x + c as u64) % pm) as u32)
        .collect()
}

impl MultivariatePoly {
    pub fn from_table(p: u32, arity: usize, table: Vec<u32>) -> Result<Self> {
        if !is_prime(p as u64) {
            return invalid(format!("p = {p} is not prime"));
        }
        let n = size(p, arity)?;
        if table.len() != n {
            return invalid(format!("table has {} entries, expected {n}", table.len()));
        }
        if let Some(&bad) = table.iter().find(|&&v| v >= p) {
            return invalid(format!("table value {bad} is not in [0, {p})"));
        }
        let mut dense = table.clone();
        transform_axes(&mut dense, p, arity, |line| interpolate_line(line, p));
        let coeffs = dense
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(idx, &c)| (exps_of(idx, p, arity), c))
            .collect();
        Ok(Self {
            p,
            arity,
            table,
            coeffs,
        })
    }

    /// Sums terms `c * prod x_i^(k_i)`, folding exponents with `x^p = x`.
    pub fn from_terms(p: u32, arity: usize, terms: &[(i64, Vec<u64>)]) -> Result<Self> {
        if !is_prime(p as u64) {
            return invalid(format!("p = {p} is not prime"));
        }
        let n = size(p, arity)?;
        let mut dense = vec![0u32; n];
        for (c, exps) in terms {
            if exps.len() != arity {
                return invalid(format!("term has {} exponents, expected {arity}", exps.len()));
            }
            let reduced: Vec<u32> = exps.iter().map(|&k| reduce_exponent(k, p) as u32).collect();
            let idx = index_of(&reduced, p);
            dense[idx] = ((dense[idx] as i64 + c).rem_euclid(p as i64)) as u32;
        }
        Self::from_dense_coeffs(p, arity, dense)
    }

    fn from_dense_coeffs(p: u32, arity: usize, dense: Vec<u32>) -> Result<Self> {
        let coeffs = dense
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(idx, &c)| (exps_of(idx, p, arity), c))
            .collect();
        let mut table = dense;
        transform_axes(&mut table, p, arity, |line| evaluate_line(line, p));
        Ok(Self {
            p,
            arity,
            table,
            coeffs,
        })
    }

    pub fn zero(p: u32, arity: usize) -> Result<Self> {
        Self::constant(p, arity, 0)
    }

    pub fn constant(p: u32, arity: usize, c: u32) -> Result<Self> {
        Self::from_table(p, arity, vec![c % p; size(p, arity)?])
    }

    /// The single variable `x_i`.
    pub fn variable(p: u32, arity: usize, i: usize) -> Result<Self> {
        if i >= arity {
            return invalid(format!("variable x{i} out of range for arity {arity}"));
        }
        let mut exps = vec![0u64; arity];
        exps[i] = 1;
        Self::from_terms(p, arity, &[(1, exps)])
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    /// Nonzero coefficients keyed by exponent tuple `(k_0, ..., k_(arity-1))`.
    pub fn coeffs(&self) -> &BTreeMap<Vec<u32>, u32> {
        &self.coeffs
    }

    pub fn coeff(&self, exps: &[u32]) -> u32 {
        self.coeffs.get(exps).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, point: &[u32]) -> Result<u32> {
        if point.len() != self.arity {
            return invalid(format!(
                "point has {} coordinates, expected {}",
                point.len(),
                self.arity
            ));
        }
        if let Some(&bad) = point.iter().find(|&&x| x >= self.p) {
            return invalid(format!("coordinate {bad} is not in [0, {})", self.p));
        }
        Ok(self.table[index_of(point, self.p)])
    }

    #[inline]
    pub(crate) fn eval_index(&self, idx: usize) -> u32 {
        self.table[idx]
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.p != other.p || self.arity != other.arity {
            return invalid("polynomials live in different rings");
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let table = self
            .table
            .iter()
            .zip(&other.table)
            .map(|(&a, &b)| (a + b) % self.p)
            .collect();
        Self::from_table(self.p, self.arity, table)
    }

    /// Product of coefficient maps, reducing exponents with `x^p = x`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut terms = Vec::new();
        for (ea, &ca) in &self.coeffs {
            for (eb, &cb) in &other.coeffs {
                let exps = ea.iter().zip(eb).map(|(&a, &b)| (a + b) as u64).collect();
                terms.push((ca as i64 * cb as i64, exps));
            }
        }
        Self::from_terms(self.p, self.arity, &terms)
    }

    /// Terms in the text form's order: exponent tuples descending.
    pub fn terms_desc(&self) -> impl Iterator<Item = (&Vec<u32>, u32)> {
        self.coeffs.iter().rev().map(|(k, &c)| (k, c))
    }

    fn write_terms(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (i, (exps, c)) in self.terms_desc().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{c}:(")?;
            for (k, x) in exps.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }

    /// Term list without header, e.g. `2:(2,0) 1:(0,0)`.
    pub fn terms_text(&self) -> String {
        struct Terms<'a>(&'a MultivariatePoly);
        impl fmt::Display for Terms<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.write_terms(f)
            }
        }
        Terms(self).to_string()
    }

    /// Parses a term list such as `2:(2,0) 1:(0,0)` or `0`.
    pub fn parse_terms(p: u32, arity: usize, body: &str) -> Result<Self> {
        let body = body.trim();
        if body == "0" {
            return Self::zero(p, arity);
        }
        let mut terms = Vec::new();
        for tok in body.split_whitespace() {
            let (c, rest) = tok
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("term {tok:?} lacks ':'")))?;
            let c: i64 = c
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient in {tok:?}")))?;
            let inner = rest
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("exponents in {tok:?} need parentheses")))?;
            let exps: Vec<u64> = if inner.is_empty() {
                vec![]
            } else {
                inner
                    .split(',')
                    .map(|x| x.parse().map_err(|_| Error::Parse(format!("bad exponent in {tok:?}"))))
                    .collect::<Result<_>>()?
            };
            if exps.len() != arity {
                return Err(Error::Parse(format!(
                    "term {tok:?} has {} exponents, expected {arity}",
                    exps.len()
                )));
            }
            terms.push((c, exps));
        }
        if terms.is_empty() {
            return Err(Error::Parse("empty term list".into()));
        }
        Self::from_terms(p, arity, &terms)
    }

    pub fn to_table_json(&self) -> TableJson {
        TableJson {
            p: self.p,
            vars: self.arity,
            table: self.table.clone(),
        }
    }

    pub fn from_table_json(json: &TableJson) -> Result<Self> {
        Self::from_table(json.p, json.vars, json.table.clone())
    }
}

/// JSON table form: values at every tuple, index `sum x_i p^i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableJson {
    pub p: u32,
    pub vars: usize,
    pub table: Vec<u32>,
}

/// `p=<p> vars=<arity>; <terms>`.
impl fmt::Display for MultivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={} vars={}; ", self.p, self.arity)?;
        self.write_terms(f)
    }
}

impl FromStr for MultivariatePoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (header, body) = s
            .split_once(';')
            .ok_or_else(|| Error::Parse(format!("missing ';' in {s:?}")))?;
        let mut p = None;
        let mut vars = None;
        for tok in header.split_whitespace() {
            match tok.split_once('=') {
                Some(("p", v)) => p = v.parse::<u32>().ok(),
                Some(("vars", v)) => vars = v.parse::<usize>().ok(),
                _ => return Err(Error::Parse(format!("unexpected header token {tok:?}"))),
            }
        }
        let (p, vars) = p
            .zip(vars)
            .ok_or_else(|| Error::Parse(format!("header needs p=<p> vars=<n>: {header:?}")))?;
        Self::parse_terms(p, vars, body)
    }
}

/// `φ(x_0, ..., x_(e-1)) = g(x_(e-1)) + η(x_0, ..., x_(e-2))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressingMap {
    e: u32,
    g: UnivariateFn,
    eta: MultivariatePoly,
}

impl CompressingMap {
    pub fn new(g: UnivariateFn, eta: MultivariatePoly, e: u32) -> Result<Self> {
        let p = g.p();
        match g.degree() {
            Some(d) if d >= 1 => {}
            _ => return invalid(format!("g = {g} must have degree in [1, {}]", p - 1)),
        }
        if eta.p() != p {
            return invalid(format!("η is over Z/{} but g is over Z/{p}", eta.p()));
        }
        if e == 0 || eta.arity() != e as usize - 1 {
            return invalid(format!("η has arity {}, expected e - 1 = {}", eta.arity(), e as i64 - 1));
        }
        Ok(Self { e, g, eta })
    }

    pub fn p(&self) -> u32 {
        self.g.p()
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn g(&self) -> &UnivariateFn {
        &self.g
    }

    pub fn eta(&self) -> &MultivariatePoly {
        &self.eta
    }

    pub fn eval(&self, digits: &[u32]) -> Result<u32> {
        if digits.len() != self.e as usize {
            return invalid(format!(
                "expected {} digits, got {}",
                self.e,
                digits.len()
            ));
        }
        let (low, top) = digits.split_at(self.e as usize - 1);
        check_digit(top[0], self.p(), "top digit")?;
        Ok((self.g.eval(top[0]) + self.eta.eval(low)?) % self.p())
    }

    /// `φ` on the digits of a residue mod `p^e`.
    #[inline]
    pub fn eval_residue(&self, v: u32) -> u32 {
        let low_mod = self.p().pow(self.e - 1);
        let low = (v % low_mod) as usize;
        let top = v / low_mod;
        (self.g.eval(top) + self.eta.eval_index(low)) % self.p()
    }

    /// `{φ(x) : x in (Z/p)^e}`.
    pub fn image(&self) -> BTreeSet<u32> {
        let modulus = self.p().pow(self.e);
        let mut out = BTreeSet::new();
        for v in 0..modulus {
            out.insert(self.eval_residue(v));
            if out.len() == self.p() as usize {
                break;
            }
        }
        out
    }

    /// Map-spec form: `g=<poly in x>; eta=<terms>`.
    pub fn to_spec(&self) -> String {
        format!("g={}; eta={}", self.g, self.eta.terms_text())
    }

    /// Parses `g=<poly in x>; eta=<terms | psi(z,w) | table@file | 0>`.
    pub fn parse_spec(p: u32, e: u32, spec: &str) -> Result<Self> {
        if e < 2 {
            return invalid("compressing maps need e >= 2");
        }
        let mut g = None;
        let mut eta = None;
        for part in spec.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {part:?}")))?;
            match key.trim() {
                "g" => g = Some(UnivariateFn::parse(p, value)?),
                "eta" => eta = Some(parse_eta(p, e, value.trim())?),
                other => return Err(Error::Parse(format!("unknown map key {other:?}"))),
            }
        }
        let g = g.ok_or_else(|| Error::Parse("map spec needs g=...".into()))?;
        let eta = match eta {
            Some(eta) => eta,
            None => MultivariatePoly::zero(p, e as usize - 1)?,
        };
        Self::new(g, eta, e)
    }
}

fn parse_eta(p: u32, e: u32, value: &str) -> Result<MultivariatePoly> {
    if let Some(args) = value.strip_prefix("psi(").and_then(|r| r.strip_suffix(')')) {
        let (z, w) = args
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("psi needs two arguments: {value:?}")))?;
        let z: u32 = z.trim().parse().map_err(|_| Error::Parse(format!("bad z in {value:?}")))?;
        let w: u32 = w.trim().parse().map_err(|_| Error::Parse(format!("bad w in {value:?}")))?;
        return psi_zw(p, z, w, e);
    }
    if let Some(path) = value.strip_prefix("table@") {
        let eta = load_table(Path::new(path))?;
        if eta.p() != p || eta.arity() != e as usize - 1 {
            return invalid(format!("table in {path} has the wrong shape"));
        }
        return Ok(eta);
    }
    MultivariatePoly::parse_terms(p, e as usize - 1, value)
}

fn load_table(path: &Path) -> Result<MultivariatePoly> {
    let text = std::fs::read_to_string(path)
        .map_err(|err| Error::InvalidInput(format!("cannot read {}: {err}", path.display())))?;
    let json: TableJson = serde_json::from_str(&text)
        .map_err(|err| Error::Parse(format!("{}: {err}", path.display())))?;
    MultivariatePoly::from_table_json(&json)
}

pub fn eval_map(m: &CompressingMap, digits: &[u32]) -> Result<u32> {
    m.eval(digits)
}

/// Termwise `φ` over one period of `s`.
pub fn compress_sequence(m: &CompressingMap, s: &LRSequence) -> Result<LevelSequence> {
    let ctx = s.ctx();
    if ctx.p() != m.p() || ctx.e() != m.e() {
        return invalid(format!(
            "map over p={} e={} applied to a sequence over {ctx}",
            m.p(),
            m.e()
        ));
    }
    let terms = s.terms().iter().map(|&v| m.eval_residue(v)).collect();
    LevelSequence::new(m.p(), terms)
}

fn check_digit(v: u32, p: u32, what: &str) -> Result<()> {
    if v >= p {
        return invalid(format!("{what} = {v} is not in [0, {p})"));
    }
    Ok(())
}

/// `z` at the all-zero tuple of `(x_0, ..., x_(e-2))`, `w` elsewhere.
pub fn psi_zw(p: u32, z: u32, w: u32, e: u32) -> Result<MultivariatePoly> {
    if e < 2 {
        return invalid("ψ needs e >= 2");
    }
    check_digit(z, p, "z")?;
    check_digit(w, p, "w")?;
    let arity = e as usize - 1;
    let mut table = vec![w; size(p, arity)?];
    table[0] = z;
    MultivariatePoly::from_table(p, arity, table)
}

/// `z` at the zero tuple and `assignment[idx - 1]` at the nonzero tuple with index `idx`,
/// every assigned value drawn from `W`.
pub fn psi_z_set(
    p: u32,
    e: u32,
    z: u32,
    set: &BTreeSet<u32>,
    assignment: &[u32],
) -> Result<MultivariatePoly> {
    if e < 2 {
        return invalid("ψ needs e >= 2");
    }
    check_digit(z, p, "z")?;
    if set.is_empty() {
        return invalid("W must be nonempty");
    }
    let arity = e as usize - 1;
    let n = size(p, arity)?;
    if assignment.len() != n - 1 {
        return invalid(format!(
            "assignment has {} entries, expected {} nonzero tuples",
            assignment.len(),
            n - 1
        ));
    }
    if let Some(&bad) = assignment.iter().find(|v| !set.contains(v)) {
        return invalid(format!("assigned value {bad} is not in W = {set:?}"));
    }
    let mut table = Vec::with_capacity(n);
    table.push(z);
    table.extend_from_slice(assignment);
    MultivariatePoly::from_table(p, arity, table)
}

pub fn image_set(g: &UnivariateFn) -> BTreeSet<u32> {
    (0..g.p()).map(|x| g.eval(x)).collect()
}

pub fn is_permutation(g: &UnivariateFn) -> bool {
    image_set(g).len() == g.p() as usize
}

/// Coefficient of `x_0^(p-1) ... x_(arity-1)^(p-1)`.
pub fn full_monomial_coefficient(eta: &MultivariatePoly) -> u32 {
    eta.coeff(&vec![eta.p() - 1; eta.arity()])
}

/// `(-1)^e (p + 1) / 2 mod p`, the excluded value of the full-monomial coefficient.
pub fn full_monomial_threshold(p: u32, e: u32) -> u32 {
    let half = (p + 1) / 2 % p;
    if e % 2 == 0 {
        half
    } else {
        (p - half) % p
    }
}
