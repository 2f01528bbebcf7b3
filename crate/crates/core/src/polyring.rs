//! Univariate polynomials over `Z/(p^e)`, arithmetic modulo a monic `f(x)`,
//! the multiplicative order of `x`, and the action of polynomials on sequences.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::ringcore::{lcm, prime_factors, RingContext};

/// Polynomial over `Z/(p^e)`, constant term first, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingPolynomial {
    ctx: RingContext,
    coeffs: Vec<u32>,
}

impl RingPolynomial {
    /// Coefficients are reduced mod `p^e`.
    pub fn new(ctx: RingContext, coeffs: &[i64]) -> Self {
        let mut coeffs: Vec<u32> = coeffs.iter().map(|&c| ctx.reduce(c)).collect();
        trim(&mut coeffs);
        Self { ctx, coeffs }
    }

    pub(crate) fn from_raw(ctx: RingContext, mut coeffs: Vec<u32>) -> Self {
        debug_assert!(coeffs.iter().all(|&c| c < ctx.modulus()));
        trim(&mut coeffs);
        Self { ctx, coeffs }
    }

    pub fn zero(ctx: RingContext) -> Self {
        Self { ctx, coeffs: vec![] }
    }

    pub fn one(ctx: RingContext) -> Self {
        Self::constant(ctx, 1)
    }

    pub fn constant(ctx: RingContext, c: i64) -> Self {
        Self::new(ctx, &[c])
    }

    /// The indeterminate `x`.
    pub fn x(ctx: RingContext) -> Self {
        Self::new(ctx, &[0, 1])
    }

    pub fn ctx(&self) -> &RingContext {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> u32 {
        self.coeffs.get(k).copied().unwrap_or(0)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    pub fn constant_term(&self) -> u32 {
        self.coeff(0)
    }

    /// Reinterprets the coefficient list in `Z/(p^e')` for another exponent of the same prime.
    /// Reducing to a smaller exponent takes residues; raising keeps the representatives.
    pub fn lift(&self, target: RingContext) -> Result<Self> {
        if target.p() != self.ctx.p() {
            return Err(Error::ContextMismatch(self.ctx, target));
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| c % target.modulus())
            .collect();
        Ok(Self::from_raw(target, coeffs))
    }

    /// Reduction of the coefficients mod p.
    pub fn mod_p(&self) -> Self {
        self.lift(self.ctx.base_field())
            .expect("base field shares the prime")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_ctx(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| self.ctx.add(self.coeff(k), other.coeff(k)))
            .collect();
        Ok(Self::from_raw(self.ctx, coeffs))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_ctx(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| self.ctx.sub(self.coeff(k), other.coeff(k)))
            .collect();
        Ok(Self::from_raw(self.ctx, coeffs))
    }

    pub fn scale(&self, c: u32) -> Self {
        let coeffs = self.coeffs.iter().map(|&a| self.ctx.mul(a, c)).collect();
        Self::from_raw(self.ctx, coeffs)
    }

    /// Schoolbook product without reduction by any modulus polynomial.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_ctx(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.ctx));
        }
        let m = self.ctx.modulus() as u64;
        let mut acc = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                acc[i + j] = (acc[i + j] + a as u64 * b as u64) % m;
            }
        }
        Ok(Self::from_raw(
            self.ctx,
            acc.into_iter().map(|v| v as u32).collect(),
        ))
    }

    /// Remainder on division by a monic `f`.
    pub fn rem(&self, f: &Self) -> Result<Self> {
        self.same_ctx(f)?;
        let n = check_modulus(f)?;
        let mut r = self.coeffs.clone();
        while r.len() > n {
            let lead = r.pop().expect("nonempty");
            if lead == 0 {
                continue;
            }
            let shift = r.len() - n;
            for (k, &fk) in f.coeffs[..n].iter().enumerate() {
                r[shift + k] = self.ctx.sub(r[shift + k], self.ctx.mul(lead, fk));
            }
        }
        Ok(Self::from_raw(self.ctx, r))
    }

    fn same_ctx(&self, other: &Self) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch(self.ctx, other.ctx));
        }
        Ok(())
    }

    /// Text form `p=<p> e=<e>; f=<c0>,<c1>,...`.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        text.parse()
    }

    /// Parses a bare comma-separated coefficient list in a known context.
    pub fn parse_coeffs(ctx: RingContext, list: &str) -> Result<Self> {
        let coeffs = parse_list(list)?;
        if let Some(&bad) = coeffs.iter().find(|&&c| c < 0 || c >= ctx.modulus() as i64) {
            return Err(Error::Parse(format!(
                "coefficient {bad} outside [0, {})",
                ctx.modulus()
            )));
        }
        Ok(Self::new(ctx, &coeffs))
    }
}

fn trim(coeffs: &mut Vec<u32>) {
    while coeffs.last() == Some(&0) {
        coeffs.pop();
    }
}

fn check_modulus(f: &RingPolynomial) -> Result<usize> {
    match f.degree() {
        Some(n) if n >= 1 && f.is_monic() => Ok(n),
        _ => invalid(format!("modulus {f} must be monic of degree >= 1")),
    }
}

pub(crate) fn parse_list(list: &str) -> Result<Vec<i64>> {
    let list = list.trim();
    if list.is_empty() {
        return Err(Error::Parse("empty coefficient list".into()));
    }
    list.split(',')
        .map(|s| {
            s.trim()
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("bad integer {s:?}")))
        })
        .collect()
}

impl fmt::Display for RingPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={} e={}; f=", self.ctx.p(), self.ctx.e())?;
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for RingPolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (header, body) = s
            .split_once(';')
            .ok_or_else(|| Error::Parse(format!("missing ';' in {s:?}")))?;
        let mut p = None;
        let mut e = None;
        for tok in header.split_whitespace() {
            match tok.split_once('=') {
                Some(("p", v)) => p = v.parse::<u32>().ok(),
                Some(("e", v)) => e = v.parse::<u32>().ok(),
                _ => return Err(Error::Parse(format!("unexpected header token {tok:?}"))),
            }
        }
        let (p, e) = p
            .zip(e)
            .ok_or_else(|| Error::Parse(format!("header needs p=<p> e=<e>: {header:?}")))?;
        let ctx = RingContext::new(p, e)?;
        let body = body.trim();
        let list = body
            .split_once('=')
            .map(|(_, v)| v)
            .ok_or_else(|| Error::Parse(format!("expected f=<coeffs>, got {body:?}")))?;
        RingPolynomial::parse_coeffs(ctx, list)
    }
}

/// `(a * b) mod f`.
pub fn poly_mulmod(a: &RingPolynomial, b: &RingPolynomial, f: &RingPolynomial) -> Result<RingPolynomial> {
    a.mul(b)?.rem(f)
}

/// `base^k mod f` by square-and-multiply.
pub fn poly_powmod(base: &RingPolynomial, mut k: u64, f: &RingPolynomial) -> Result<RingPolynomial> {
    let mut result = RingPolynomial::one(*f.ctx()).rem(f)?;
    let mut b = base.rem(f)?;
    while k > 0 {
        if k & 1 == 1 {
            result = poly_mulmod(&result, &b, f)?;
        }
        k >>= 1;
        if k > 0 {
            b = poly_mulmod(&b, &b, f)?;
        }
    }
    Ok(result)
}

fn x_pow_is_one(k: u64, f: &RingPolynomial) -> Result<bool> {
    let r = poly_powmod(&RingPolynomial::x(*f.ctx()), k, f)?;
    Ok(r.coeffs() == [1])
}

/// Least `T > 0` with `x^T = 1 mod f` over `Z/(p^e)`.
///
/// The order over `Z/p` is found by stripping prime factors from the known
/// multiple `p^c * lcm(p^d - 1 : d <= n)` (with `p^c >= n`), which covers
/// reducible `f mod p` as well. The full order is then the least `T1 * p^j`.
pub fn order_of_x(f: &RingPolynomial) -> Result<u64> {
    let n = check_modulus(f)?;
    let ctx = *f.ctx();
    if !ctx.is_unit(f.constant_term()) {
        return invalid(format!("f(0) = {} is not a unit mod p", f.constant_term()));
    }
    let p = ctx.p() as u64;
    let fp = f.mod_p();

    let overflow = || Error::InvalidInput(format!("order of x mod {f} overflows u64"));
    let mut multiple: u64 = 1;
    let mut pd: u64 = 1;
    for _ in 1..=n {
        pd = pd.checked_mul(p).ok_or_else(overflow)?;
        multiple = lcm(multiple, pd - 1).ok_or_else(overflow)?;
    }
    let mut pc: u64 = 1;
    while pc < n as u64 {
        pc *= p;
    }
    multiple = multiple.checked_mul(pc).ok_or_else(overflow)?;
    if !x_pow_is_one(multiple, &fp)? {
        return Err(Error::CertificateCorruption(format!(
            "x^{multiple} != 1 mod {fp}"
        )));
    }

    let mut order = multiple;
    for q in prime_factors(multiple) {
        while order % q == 0 && x_pow_is_one(order / q, &fp)? {
            order /= q;
        }
    }

    for _ in 0..ctx.e() {
        if x_pow_is_one(order, f)? {
            return Ok(order);
        }
        order = order.checked_mul(p).ok_or_else(overflow)?;
    }
    Err(Error::CertificateCorruption(format!(
        "order of x mod {f} exceeds T1 * p^(e-1)"
    )))
}

/// How a sequence is extended past its materialized terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shift {
    /// Terms are one period; shifts wrap around.
    Cyclic,
    /// Terms are a finite prefix; the output is `deg g` terms shorter.
    Truncate,
}

/// `(g(x) s)(t) = sum_k g_k s(t + k) mod p^e`.
pub fn apply_poly_to_sequence(g: &RingPolynomial, terms: &[u32], shift: Shift) -> Result<Vec<u32>> {
    let ctx = g.ctx();
    let d = g.degree().unwrap_or(0);
    let len = match shift {
        Shift::Cyclic => {
            if terms.is_empty() {
                return invalid("cannot shift an empty periodic sequence");
            }
            terms.len()
        }
        Shift::Truncate => {
            if terms.len() <= d {
                return invalid(format!(
                    "sequence of length {} is too short for a degree-{d} shift",
                    terms.len()
                ));
            }
            terms.len() - d
        }
    };
    let m = ctx.modulus() as u64;
    let period = terms.len();
    Ok((0..len)
        .map(|t| {
            g.coeffs()
                .iter()
                .enumerate()
                .fold(0u64, |acc, (k, &c)| {
                    (acc + c as u64 * (terms[(t + k) % period] as u64 % m)) % m
                }) as u32
        })
        .collect())
}
