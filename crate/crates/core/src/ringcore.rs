//! Arithmetic in `Z/(p^e)`: the ring descriptor, p-adic digits, the carry
//! function `C1`, and functions `Z/p -> Z/p` in their unique reduced
//! polynomial form.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Largest admissible modulus (exclusive). Products of two residues then fit in `u64`.
pub const MODULUS_LIMIT: u64 = 1 << 31;

/// The ring `Z/(p^e)` for an odd prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawContext", into = "RawContext")]
pub struct RingContext {
    p: u32,
    e: u32,
    modulus: u32,
}

#[derive(Serialize, Deserialize)]
struct RawContext {
    p: u32,
    e: u32,
}

impl TryFrom<RawContext> for RingContext {
    type Error = Error;

    fn try_from(raw: RawContext) -> Result<Self> {
        RingContext::new(raw.p, raw.e)
    }
}

impl From<RingContext> for RawContext {
    fn from(ctx: RingContext) -> Self {
        RawContext { p: ctx.p, e: ctx.e }
    }
}

impl RingContext {
    pub fn new(p: u32, e: u32) -> Result<Self> {
        if p == 2 || !is_prime(p as u64) {
            return invalid(format!("p = {p} is not an odd prime"));
        }
        if e == 0 {
            return invalid("exponent e must be at least 1");
        }
        let mut modulus: u64 = 1;
        for _ in 0..e {
            modulus *= p as u64;
            if modulus >= MODULUS_LIMIT {
                return invalid(format!("p^e = {p}^{e} exceeds 2^31"));
            }
        }
        Ok(Self {
            p,
            e,
            modulus: modulus as u32,
        })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn e(&self) -> u32 {
        self.e
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// The same prime with a different exponent.
    pub fn with_exponent(&self, e: u32) -> Result<Self> {
        Self::new(self.p, e)
    }

    /// `Z/p` for the same prime.
    pub fn base_field(&self) -> Self {
        Self {
            p: self.p,
            e: 1,
            modulus: self.p,
        }
    }

    pub fn residue(&self, value: u32) -> Result<Residue> {
        if value >= self.modulus {
            return invalid(format!("{value} is not a residue mod {}", self.modulus));
        }
        Ok(Residue(value))
    }

    /// Reduces an arbitrary integer to its least nonnegative representative.
    #[inline]
    pub fn reduce(&self, v: i64) -> u32 {
        v.rem_euclid(self.modulus as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.modulus as u64) as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.modulus as u64 - b as u64) % self.modulus as u64) as u32
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.modulus as u64) as u32
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    /// `i`-th base-p digit of `a`.
    #[inline]
    pub fn digit(&self, a: u32, i: u32) -> u32 {
        (a / self.p.pow(i)) % self.p
    }

    pub fn is_unit(&self, a: u32) -> bool {
        a % self.p != 0
    }
}

impl fmt::Display for RingContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/({}^{})", self.p, self.e)
    }
}

/// Least nonnegative representative of an element of `Z/(p^e)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Residue(u32);

impl Residue {
    pub fn value(self) -> u32 {
        self.0
    }
}

/// Base-p digits of a residue, least significant first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DigitVector(Vec<u32>);

impl DigitVector {
    pub fn digits(&self) -> &[u32] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<u32> {
        self.0
    }
}

pub fn padic_expand(a: Residue, ctx: &RingContext) -> DigitVector {
    let mut v = a.0;
    let mut digits = Vec::with_capacity(ctx.e as usize);
    for _ in 0..ctx.e {
        digits.push(v % ctx.p);
        v /= ctx.p;
    }
    DigitVector(digits)
}

pub fn padic_compose(digits: &DigitVector, ctx: &RingContext) -> Result<Residue> {
    if digits.0.len() != ctx.e as usize {
        return invalid(format!(
            "expected {} digits, got {}",
            ctx.e,
            digits.0.len()
        ));
    }
    let mut v: u64 = 0;
    for &d in digits.0.iter().rev() {
        if d >= ctx.p {
            return invalid(format!("digit {d} out of range for p = {}", ctx.p));
        }
        v = v * ctx.p as u64 + d as u64;
    }
    Ok(Residue(v as u32))
}

/// Digit 1 of the base-p expansion of a nonnegative integer.
#[inline]
pub fn carry_c1(a: u64, p: u32) -> u32 {
    ((a / p as u64) % p as u64) as u32
}

/// A function `Z/p -> Z/p` stored as its unique polynomial of degree `< p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UnivariateFn {
    p: u32,
    /// Dense, constant first, always `p` entries.
    coeffs: Vec<u32>,
}

impl UnivariateFn {
    /// Builds from arbitrary coefficients, reducing them mod p and folding
    /// exponents `>= p` with `x^p = x`.
    pub fn from_coeffs(p: u32, coeffs: &[i64]) -> Result<Self> {
        if !is_prime(p as u64) {
            return invalid(format!("p = {p} is not prime"));
        }
        let mut dense = vec![0u32; p as usize];
        for (k, &c) in coeffs.iter().enumerate() {
            let slot = reduce_exponent(k as u64, p) as usize;
            dense[slot] = ((dense[slot] as i64 + c).rem_euclid(p as i64)) as u32;
        }
        Ok(Self { p, coeffs: dense })
    }

    pub fn zero(p: u32) -> Self {
        Self {
            p,
            coeffs: vec![0; p as usize],
        }
    }

    /// `x^k`.
    pub fn monomial(p: u32, k: u32) -> Result<Self> {
        let mut c = vec![0i64; k as usize + 1];
        c[k as usize] = 1;
        Self::from_coeffs(p, &c)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> u32 {
        self.coeffs.get(k).copied().unwrap_or(0)
    }

    /// `None` for the zero function.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0)
    }

    pub fn eval(&self, x: u32) -> u32 {
        let p = self.p as u64;
        let x = x as u64 % p;
        self.coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| (acc * x + c as u64) % p) as u32
    }

    pub fn table(&self) -> Vec<u32> {
        (0..self.p).map(|x| self.eval(x)).collect()
    }

    /// Parses a polynomial in `x` such as `x^2 + 2x + 1`, `2*x-1` or `3`.
    pub fn parse(p: u32, text: &str) -> Result<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut coeffs: Vec<i64> = Vec::new();
        let mut rest = compact.as_str();
        let mut first = true;
        while !rest.is_empty() {
            let (sign, body_start) = match rest.as_bytes()[0] {
                b'+' => (1i64, 1),
                b'-' => (-1i64, 1),
                _ if first => (1i64, 0),
                _ => return Err(Error::Parse(format!("expected '+' or '-' in {text:?}"))),
            };
            first = false;
            rest = &rest[body_start..];
            let end = rest.find(['+', '-']).unwrap_or(rest.len());
            let term = &rest[..end];
            rest = &rest[end..];
            let (c, k) = parse_term(term).ok_or_else(|| Error::Parse(format!("bad term {term:?}")))?;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, 0);
            }
            coeffs[k] += sign * c;
        }
        Self::from_coeffs(p, &coeffs)
    }
}

fn parse_term(term: &str) -> Option<(i64, usize)> {
    match term.find('x') {
        None => Some((term.parse().ok()?, 0)),
        Some(pos) => {
            let coef = term[..pos].trim_end_matches('*');
            let c = if coef.is_empty() { 1 } else { coef.parse().ok()? };
            let tail = &term[pos + 1..];
            let k = if tail.is_empty() {
                1
            } else {
                tail.strip_prefix('^')?.parse().ok()?
            };
            Some((c, k))
        }
    }
}

impl fmt::Display for UnivariateFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if wrote {
                f.write_str(" + ")?;
            }
            match (k, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => f.write_str("x")?,
                (1, c) => write!(f, "{c}x")?,
                (k, 1) => write!(f, "x^{k}")?,
                (k, c) => write!(f, "{c}x^{k}")?,
            }
            wrote = true;
        }
        if !wrote {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Folds an exponent with `x^p = x`: the result is in `[0, p)` and agrees as a function on `Z/p`.
pub fn reduce_exponent(k: u64, p: u32) -> u64 {
    let p = p as u64;
    if k < p {
        k
    } else {
        (k - 1) % (p - 1) + 1
    }
}

/// Interpolates a length-p value table into the unique polynomial of degree `< p`.
///
/// Uses `f(x) = sum_a f(a) (1 - (x - a)^(p-1))` and `(x - a)^(p-1) = sum_k a^(p-1-k) x^k`
/// over `Z/p`, so `c_k = [k = 0] sum_a f(a) - sum_a f(a) a^(p-1-k)` with `0^0 = 1`.
pub fn interpolate(values: &[u32], p: u32) -> Result<UnivariateFn> {
    if values.len() != p as usize {
        return invalid(format!(
            "interpolation table has {} entries, expected p = {p}",
            values.len()
        ));
    }
    if let Some(&bad) = values.iter().find(|&&v| v >= p) {
        return invalid(format!("table value {bad} is not in [0, {p})"));
    }
    if !is_prime(p as u64) {
        return invalid(format!("p = {p} is not prime"));
    }
    Ok(UnivariateFn {
        p,
        coeffs: interpolate_line(values, p),
    })
}

/// Value table to dense coefficients, no validation.
pub(crate) fn interpolate_line(values: &[u32], p: u32) -> Vec<u32> {
    let pm = p as u64;
    let mut out = vec![0u32; p as usize];
    let total: u64 = values.iter().map(|&v| v as u64).sum::<u64>() % pm;
    for (k, slot) in out.iter_mut().enumerate() {
        let exp = (p as u64) - 1 - k as u64;
        let mut s = 0u64;
        for (a, &v) in values.iter().enumerate() {
            if v == 0 {
                continue;
            }
            s = (s + v as u64 * mod_pow(a as u64, exp, pm)) % pm;
        }
        let base = if k == 0 { total } else { 0 };
        *slot = ((base + pm - s) % pm) as u32;
    }
    out
}

/// Polynomial of `x -> C1(u + x)` over `Z/p`.
pub fn carry_map_poly(u: u32, p: u32) -> Result<UnivariateFn> {
    if u >= p {
        return invalid(format!("digit {u} out of range for p = {p}"));
    }
    let table: Vec<u32> = (0..p).map(|x| carry_c1(u as u64 + x as u64, p)).collect();
    interpolate(&table, p)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime factors in increasing order, by trial division.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `0^0 = 1`.
pub fn mod_pow(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut result = 1u64;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = ((result as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        exp >>= 1;
    }
    result
}

/// Inverse of a nonzero element of `Z/p`.
pub fn inv_mod_p(a: u32, p: u32) -> Option<u32> {
    if a % p == 0 {
        None
    } else {
        Some(mod_pow(a as u64, p as u64 - 2, p as u64) as u32)
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> Option<u64> {
    if a == 0 || b == 0 {
        return Some(0);
    }
    (a / gcd(a, b)).checked_mul(b)
}
