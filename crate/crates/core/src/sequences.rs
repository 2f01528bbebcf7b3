//! Linear recurring sequences over `Z/(p^e)`, their level sequences and the
//! α-sequence `[h_f(x) a_0] mod p`.
//!
//! Every sequence is materialized for exactly one least period and indexed
//! cyclically.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{invalid, Error, Result};
use crate::polyring::{apply_poly_to_sequence, order_of_x, RingPolynomial, Shift};
use crate::primitivity::PrimitivityCertificate;
use crate::ringcore::{carry_c1, gcd, RingContext};

/// Least `d` dividing `terms.len()` such that `terms` is `d`-periodic.
pub fn least_period(terms: &[u32]) -> usize {
    let n = terms.len();
    (1..=n)
        .filter(|d| n % d == 0)
        .find(|&d| (d..n).all(|i| terms[i] == terms[i - d]))
        .unwrap_or(n)
}

fn lcm_usize(a: usize, b: usize) -> usize {
    a / gcd(a as u64, b as u64) as usize * b
}

/// A periodic sequence over `Z/p`, stored as one least period.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LevelSequence {
    p: u32,
    terms: Vec<u32>,
}

impl LevelSequence {
    /// `terms` must be one period (not necessarily the least one).
    pub fn new(p: u32, mut terms: Vec<u32>) -> Result<Self> {
        if terms.is_empty() {
            return invalid("a periodic sequence needs at least one term");
        }
        if let Some(&bad) = terms.iter().find(|&&v| v >= p) {
            return invalid(format!("term {bad} is not in [0, {p})"));
        }
        let d = least_period(&terms);
        terms.truncate(d);
        Ok(Self { p, terms })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn period(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[u32] {
        &self.terms
    }

    #[inline]
    pub fn at(&self, t: usize) -> u32 {
        self.terms[t % self.terms.len()]
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|&v| v == 0)
    }

    /// `x^k` applied: `t -> s(t + k)`.
    pub fn shifted(&self, k: usize) -> Self {
        let n = self.terms.len();
        let terms = (0..n).map(|t| self.terms[(t + k) % n]).collect();
        Self { p: self.p, terms }
    }

    pub fn scaled(&self, c: u32) -> Self {
        let p = self.p as u64;
        let terms = self
            .terms
            .iter()
            .map(|&v| ((v as u64 * c as u64) % p) as u32)
            .collect();
        Self::new(self.p, terms).expect("reduced terms")
    }

    /// Terms `0..len`, cyclically extended.
    pub fn take(&self, len: usize) -> Vec<u32> {
        (0..len).map(|t| self.at(t)).collect()
    }
}

/// `{a(t) : b(t) = k}` over a common period.
pub fn values_where(a: &LevelSequence, b: &LevelSequence, k: u32) -> BTreeSet<u32> {
    let len = lcm_usize(a.period(), b.period());
    (0..len).filter(|&t| b.at(t) == k).map(|t| a.at(t)).collect()
}

/// `Some(λ)` when `a = λ b` termwise, for `b` not identically zero.
pub fn linear_multiple(a: &LevelSequence, b: &LevelSequence) -> Option<u32> {
    let len = lcm_usize(a.period(), b.period());
    (0..a.p()).find(|&lambda| {
        (0..len).all(|t| a.at(t) == ((lambda as u64 * b.at(t) as u64) % a.p() as u64) as u32)
    })
}

/// A sequence in `G(f, p^e)`, one full period of terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LRSequence {
    f: RingPolynomial,
    terms: Vec<u32>,
}

impl LRSequence {
    pub fn f(&self) -> &RingPolynomial {
        &self.f
    }

    pub fn ctx(&self) -> &RingContext {
        self.f.ctx()
    }

    pub fn degree(&self) -> usize {
        self.f.degree().expect("generator has degree >= 1")
    }

    pub fn period(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[u32] {
        &self.terms
    }

    #[inline]
    pub fn at(&self, t: usize) -> u32 {
        self.terms[t % self.terms.len()]
    }

    /// The first `n` terms.
    pub fn initial_state(&self) -> Vec<u32> {
        (0..self.degree()).map(|t| self.at(t)).collect()
    }

    /// `(a_0(t), ..., a_(e-1)(t))`.
    pub fn digits(&self, t: usize) -> Vec<u32> {
        let ctx = self.ctx();
        let v = self.at(t);
        (0..ctx.e()).map(|i| ctx.digit(v, i)).collect()
    }

    pub fn level(&self, i: u32) -> Result<LevelSequence> {
        let ctx = self.ctx();
        if i >= ctx.e() {
            return invalid(format!("level {i} out of range for e = {}", ctx.e()));
        }
        let terms = self.terms.iter().map(|&v| ctx.digit(v, i)).collect();
        LevelSequence::new(ctx.p(), terms)
    }

    /// Rebuilds from one period of terms of some sequence in `G(f, p^e)`.
    fn from_period(f: RingPolynomial, mut terms: Vec<u32>) -> Self {
        let d = least_period(&terms);
        terms.truncate(d);
        Self { f, terms }
    }

    pub fn shifted(&self, k: usize) -> Self {
        let n = self.terms.len();
        let terms = (0..n).map(|t| self.terms[(t + k) % n]).collect();
        Self {
            f: self.f.clone(),
            terms,
        }
    }

    /// `c * a` for `c` in `Z/(p^e)`.
    pub fn scaled(&self, c: u32) -> Self {
        let ctx = *self.ctx();
        let terms = self.terms.iter().map(|&v| ctx.mul(v, c)).collect();
        Self::from_period(self.f.clone(), terms)
    }

    pub fn neg(&self) -> Self {
        self.scaled(self.ctx().modulus() - 1)
    }

    fn combine(&self, other: &Self, op: impl Fn(u32, u32) -> u32) -> Result<Self> {
        if self.f != other.f {
            return invalid("sequences have different generators");
        }
        let len = lcm_usize(self.period(), other.period());
        let terms = (0..len).map(|t| op(self.at(t), other.at(t))).collect();
        Ok(Self::from_period(self.f.clone(), terms))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let ctx = *self.ctx();
        self.combine(other, |a, b| ctx.add(a, b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let ctx = *self.ctx();
        self.combine(other, |a, b| ctx.sub(a, b))
    }

    /// CSV dump: `t,a,a0,...,a{e-1}` plus one column per extra sequence.
    pub fn to_csv(&self, extra: &[(&str, &LevelSequence)]) -> String {
        let e = self.ctx().e();
        let mut out = String::from("t,a");
        for i in 0..e {
            let _ = write!(out, ",a{i}");
        }
        for (name, _) in extra {
            let _ = write!(out, ",{name}");
        }
        out.push('\n');
        for t in 0..self.period() {
            let _ = write!(out, "{t},{}", self.at(t));
            for d in self.digits(t) {
                let _ = write!(out, ",{d}");
            }
            for (_, s) in extra {
                let _ = write!(out, ",{}", s.at(t));
            }
            out.push('\n');
        }
        out
    }
}

fn recurrence_coeffs(f: &RingPolynomial) -> Result<Vec<u32>> {
    let n = match f.degree() {
        Some(n) if n >= 1 && f.is_monic() => n,
        _ => return invalid(format!("{f} must be monic of degree >= 1")),
    };
    let ctx = f.ctx();
    if !ctx.is_unit(f.constant_term()) {
        return invalid(format!("{f}: constant term is not a unit mod p"));
    }
    Ok((0..n).map(|k| ctx.neg(f.coeff(k))).collect())
}

/// One full period of `a(i+n) = c_(n-1) a(i+n-1) + ... + c_0 a(i) mod p^e`.
pub fn generate(f: &RingPolynomial, init: &[u32]) -> Result<LRSequence> {
    let c = recurrence_coeffs(f)?;
    let n = c.len();
    let ctx = *f.ctx();
    if init.len() != n {
        return invalid(format!("initial state has {} entries, expected {n}", init.len()));
    }
    if let Some(&bad) = init.iter().find(|&&v| v >= ctx.modulus()) {
        return invalid(format!("initial value {bad} is not a residue mod {}", ctx.modulus()));
    }
    let bound = order_of_x(f)? as usize;
    let m = ctx.modulus() as u64;
    let mut terms: Vec<u32> = init.to_vec();
    terms.reserve(bound);
    for t in 1..=bound {
        let next = (0..n).fold(0u64, |acc, k| (acc + c[k] as u64 * terms[t - 1 + k] as u64) % m);
        terms.push(next as u32);
        if terms[t..t + n] == *init {
            terms.truncate(t);
            return Ok(LRSequence {
                f: f.clone(),
                terms,
            });
        }
    }
    Err(Error::CertificateCorruption(format!(
        "state of {f} did not return within the order of x"
    )))
}

/// Period predicted from the lowest nonzero level: `p^(e-1-i) T`, or 1 for the zero sequence.
pub fn expected_period(s: &LRSequence, cert: &PrimitivityCertificate) -> Result<u64> {
    check_generator(s, cert)?;
    let ctx = s.ctx();
    for i in 0..ctx.e() {
        if !s.level(i)?.is_zero() {
            return Ok(cert.t() * (ctx.p() as u64).pow(ctx.e() - 1 - i));
        }
    }
    Ok(1)
}

fn check_generator(s: &LRSequence, cert: &PrimitivityCertificate) -> Result<()> {
    if s.f() != cert.f() {
        return invalid(format!(
            "sequence generated by {} but certificate is for {}",
            s.f(),
            cert.f()
        ));
    }
    Ok(())
}

pub fn is_primitive_sequence(s: &LRSequence, cert: &PrimitivityCertificate) -> Result<bool> {
    check_generator(s, cert)?;
    Ok(!s.level(0)?.is_zero())
}

/// `[h_f(x) a_0] mod p`.
pub fn alpha_sequence(s: &LRSequence, cert: &PrimitivityCertificate) -> Result<LevelSequence> {
    if !is_primitive_sequence(s, cert)? {
        return invalid("α is only defined for primitive sequences");
    }
    let a0 = s.level(0)?;
    let terms = apply_poly_to_sequence(cert.h_f(), a0.terms(), Shift::Cyclic)?;
    LevelSequence::new(s.ctx().p(), terms)
}

/// How the two carry terms of the `e >= 4` identity are grouped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CarryReading {
    /// `C1(j (h_(e-2) a_0)(t)) + C1(a_(e-2)(t) + [j α(t)]_p)`.
    Split,
    /// `C1(j (h_(e-2) a_0)(t) + C1(a_(e-2)(t) + [j α(t)]_p))`.
    Nested,
}

/// Shift identities for the top level of a primitive sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecurringIdentity {
    /// `a_(e-1)(t + j p^(e-2) T) - a_(e-1)(t) = j α(t)`, for `e >= 2`.
    TopShift,
    /// Shift by `j p^(e-3) T` with carry terms, for `e >= 4`.
    CarryShift(CarryReading),
    /// Shift by `j T` for `e = 3`, with the extra `C(j,2) h_f^2 a_0` term.
    CarryShiftE3,
}

impl RecurringIdentity {
    pub fn name(&self) -> &'static str {
        match self {
            Self::TopShift => "top-shift",
            Self::CarryShift(CarryReading::Split) => "carry-shift",
            Self::CarryShift(CarryReading::Nested) => "carry-shift-nested",
            Self::CarryShiftE3 => "carry-shift-e3",
        }
    }
}

/// First `t` in one period where the identity fails, or `None` when it holds everywhere.
pub fn find_identity_violation(
    s: &LRSequence,
    cert: &PrimitivityCertificate,
    identity: RecurringIdentity,
    j: u64,
) -> Result<Option<usize>> {
    if !is_primitive_sequence(s, cert)? {
        return invalid("recurring identities need a primitive sequence");
    }
    let ctx = *s.ctx();
    let e = ctx.e();
    let p = ctx.p();
    let pm = p as u64;
    let period = s.period();
    let alpha = alpha_sequence(s, cert)?;
    let top = s.level(e - 1)?;
    let jm = (j % pm) as u32;

    let shift_by = |k: u32| -> usize {
        let step = cert.t() * pm.pow(k);
        ((j % period as u64) * (step % period as u64) % period as u64) as usize
    };
    let lhs = |t: usize, shift: usize| -> u32 { (top.at(t + shift) + p - top.at(t)) % p };

    match identity {
        RecurringIdentity::TopShift => {
            if e < 2 {
                return invalid("the top-shift identity needs e >= 2");
            }
            let shift = shift_by(e - 2);
            Ok((0..period).find(|&t| lhs(t, shift) != (jm * alpha.at(t)) % p))
        }
        RecurringIdentity::CarryShift(reading) => {
            if e < 4 {
                return invalid("the carry-shift identity needs e >= 4");
            }
            let shift = shift_by(e - 3);
            let a0 = s.level(0)?;
            let a1 = s.level(1)?;
            let below_top = s.level(e - 2)?;
            let hf_a1 = apply_poly_to_sequence(cert.h_f(), a1.terms(), Shift::Cyclic)?;
            let h = cert.h(e - 2).expect("e - 2 in [1, e]");
            let h_a0 = apply_poly_to_sequence(h, a0.terms(), Shift::Cyclic)?;
            Ok((0..period).find(|&t| {
                let u = j * h_a0[t % h_a0.len()] as u64;
                let inner = carry_c1(
                    below_top.at(t) as u64 + ((jm * alpha.at(t)) % p) as u64,
                    p,
                ) as u64;
                let carries = match reading {
                    CarryReading::Split => carry_c1(u, p) as u64 + inner,
                    CarryReading::Nested => carry_c1(u + inner, p) as u64,
                };
                let rhs = (j % pm * hf_a1[t % hf_a1.len()] as u64 + carries) % pm;
                lhs(t, shift) as u64 != rhs
            }))
        }
        RecurringIdentity::CarryShiftE3 => {
            if e != 3 {
                return invalid("the e = 3 carry-shift identity needs e = 3");
            }
            let shift = shift_by(0);
            let a0 = s.level(0)?;
            let a1 = s.level(1)?;
            let hf = cert.h_f();
            let hf_sq = hf.mul(hf)?;
            let hf_a1 = apply_poly_to_sequence(hf, a1.terms(), Shift::Cyclic)?;
            let hf2_a0 = apply_poly_to_sequence(&hf_sq, a0.terms(), Shift::Cyclic)?;
            let h1 = cert.h(1).expect("h_1 exists");
            let h1_a0 = apply_poly_to_sequence(h1, a0.terms(), Shift::Cyclic)?;
            let binom = (j * j.saturating_sub(1) / 2) % pm;
            Ok((0..period).find(|&t| {
                let rhs = binom * hf2_a0[t % hf2_a0.len()] as u64
                    + j % pm * hf_a1[t % hf_a1.len()] as u64
                    + carry_c1(j * h1_a0[t % h1_a0.len()] as u64, p) as u64
                    + carry_c1(a1.at(t) as u64 + ((jm * alpha.at(t)) % p) as u64, p) as u64;
                lhs(t, shift) as u64 != rhs % pm
            }))
        }
    }
}

pub fn verify_recurring_identities(
    s: &LRSequence,
    cert: &PrimitivityCertificate,
    identity: RecurringIdentity,
    j: u64,
) -> Result<bool> {
    Ok(find_identity_violation(s, cert, identity, j)?.is_none())
}

/// All `p^(en)` initial states, in lexicographic order.
pub fn all_states(ctx: RingContext, n: usize) -> impl Iterator<Item = Vec<u32>> {
    let m = ctx.modulus() as u64;
    let total = m.pow(n as u32);
    (0..total).map(move |mut idx| {
        let mut state = vec![0u32; n];
        for slot in state.iter_mut().rev() {
            *slot = (idx % m) as u32;
            idx /= m;
        }
        state
    })
}

/// Initial states whose reduction mod p is nonzero.
pub fn primitive_states(ctx: RingContext, n: usize) -> impl Iterator<Item = Vec<u32>> {
    let p = ctx.p();
    all_states(ctx, n).filter(move |s| s.iter().any(|&v| v % p != 0))
}

/// One representative per shift orbit of the primitive sequences of `cert.f`.
pub fn primitive_orbits(cert: &PrimitivityCertificate) -> Result<Vec<LRSequence>> {
    let ctx = *cert.ctx();
    let n = cert.degree();
    let m = ctx.modulus() as usize;
    let index = |state: &[u32]| state.iter().fold(0usize, |acc, &v| acc * m + v as usize);
    let mut seen = vec![false; m.pow(n as u32)];
    let mut reps = Vec::new();
    for state in primitive_states(ctx, n) {
        if seen[index(&state)] {
            continue;
        }
        let s = generate(cert.f(), &state)?;
        for t in 0..s.period() {
            let window: Vec<u32> = (0..n).map(|k| s.at(t + k)).collect();
            seen[index(&window)] = true;
        }
        reps.push(s);
    }
    Ok(reps)
}
