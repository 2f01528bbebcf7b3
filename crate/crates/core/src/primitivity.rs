//! Primitive and strongly primitive polynomials over `Z/(p^e)`.
//!
//! For primitive `f` of degree `n` with `T = p^n - 1` there are lift polynomials
//! `h_i` of degree `< n` with
//!
//! ```text
//! x^(p^(i-1) T) = 1 + p^i h_i(x)  mod f,   1 <= i <= e,
//! ```
//!
//! all congruent to a nonzero `h_f` mod p. Within `Z/(p^e)` the relation only
//! fixes `h_i` mod `p^(e-i)`, so `h_i` is returned as the representative with
//! coefficients in `[0, p^(e-i))`. For `i = e` the relation is vacuous in
//! `Z/(p^e)`; `h_e` is read off the same coefficient list lifted to `Z/(p^(e+1))`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::polyring::{order_of_x, poly_powmod, RingPolynomial};
use crate::ringcore::RingContext;

/// Above this many candidates `find_primitive` samples instead of enumerating.
pub const EXHAUSTIVE_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimitivityCertificate {
    f: RingPolynomial,
    t: u64,
    period: u64,
    /// `h[i - 1]` is `h_i`.
    h: Vec<RingPolynomial>,
    h_f: RingPolynomial,
    strongly_primitive: bool,
    seed: Option<u64>,
}

impl PrimitivityCertificate {
    pub fn f(&self) -> &RingPolynomial {
        &self.f
    }

    pub fn ctx(&self) -> &RingContext {
        self.f.ctx()
    }

    pub fn degree(&self) -> usize {
        self.f.degree().expect("certified polynomials are nonzero")
    }

    /// `p^n - 1`.
    pub fn t(&self) -> u64 {
        self.t
    }

    /// `p^(e-1) T`.
    pub fn period(&self) -> u64 {
        self.period
    }

    /// `h_i` for `1 <= i <= e`.
    pub fn h(&self, i: u32) -> Option<&RingPolynomial> {
        (i as usize).checked_sub(1).and_then(|k| self.h.get(k))
    }

    pub fn h_all(&self) -> &[RingPolynomial] {
        &self.h
    }

    /// `h_1 mod p`, over `Z/p`.
    pub fn h_f(&self) -> &RingPolynomial {
        &self.h_f
    }

    pub fn strongly_primitive(&self) -> bool {
        self.strongly_primitive
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn to_json(&self) -> CertificateJson {
        let ctx = self.ctx();
        CertificateJson {
            p: ctx.p(),
            e: ctx.e(),
            n: self.degree(),
            f: self.f.coeffs().to_vec(),
            period: self.period,
            h1: self.h[0].coeffs().to_vec(),
            h_f: self.h_f.coeffs().to_vec(),
            strongly_primitive: self.strongly_primitive,
            seed: self.seed,
        }
    }

    /// Rebuilds a certificate from its serialized form and checks every stored field.
    pub fn from_json(json: &CertificateJson) -> Result<Self> {
        let ctx = RingContext::new(json.p, json.e)?;
        let coeffs: Vec<i64> = json.f.iter().map(|&c| c as i64).collect();
        let f = RingPolynomial::new(ctx, &coeffs);
        if f.coeffs() != json.f.as_slice() || f.degree() != Some(json.n) {
            return Err(Error::CertificateCorruption(format!(
                "coefficient list {:?} is not a canonical degree-{} polynomial mod {}",
                json.f,
                json.n,
                ctx.modulus()
            )));
        }
        let mut cert = certify(&f)?;
        cert.seed = json.seed;
        if cert.to_json() != *json {
            return Err(Error::CertificateCorruption(format!(
                "stored certificate fields disagree with recomputation for {f}"
            )));
        }
        Ok(cert)
    }

    fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }
}

/// Serialized certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub p: u32,
    pub e: u32,
    pub n: usize,
    pub f: Vec<u32>,
    pub period: u64,
    pub h1: Vec<u32>,
    pub h_f: Vec<u32>,
    pub strongly_primitive: bool,
    pub seed: Option<u64>,
}

fn check_candidate(f: &RingPolynomial) -> Result<usize> {
    let n = match f.degree() {
        Some(n) if n >= 1 && f.is_monic() => n,
        _ => return invalid(format!("{f} is not monic of degree >= 1")),
    };
    if !f.ctx().is_unit(f.constant_term()) {
        return invalid(format!("{f}: constant term is not a unit mod p"));
    }
    Ok(n)
}

fn ward_bound(ctx: &RingContext, n: usize) -> Result<(u64, u64)> {
    let p = ctx.p() as u64;
    let pn = (0..n)
        .try_fold(1u64, |acc, _| acc.checked_mul(p))
        .ok_or_else(|| Error::InvalidInput(format!("p^n overflows for n = {n}")))?;
    let t = pn - 1;
    let bound = (1..ctx.e())
        .try_fold(t, |acc, _| acc.checked_mul(p))
        .ok_or_else(|| Error::InvalidInput("p^(e-1) T overflows".into()))?;
    Ok((t, bound))
}

/// True iff the order of `x` mod `f` reaches `p^(e-1) (p^n - 1)`.
pub fn is_primitive(f: &RingPolynomial) -> Result<bool> {
    let n = check_candidate(f)?;
    let (_, bound) = ward_bound(f.ctx(), n)?;
    Ok(order_of_x(f)? == bound)
}

/// `h_i` from `x^(p^(i-1) T) - 1 = p^i h_i mod f`.
pub fn compute_h(f: &RingPolynomial, i: u32) -> Result<RingPolynomial> {
    let n = check_candidate(f)?;
    let ctx = *f.ctx();
    if i == 0 || i > ctx.e() {
        return invalid(format!("level index {i} outside [1, {}]", ctx.e()));
    }
    let (t, _) = ward_bound(&ctx, n)?;
    let work = ctx.with_exponent(ctx.e().max(i + 1))?;
    let lifted = f.lift(work)?;
    let exponent = (1..i)
        .try_fold(t, |acc, _| acc.checked_mul(ctx.p() as u64))
        .ok_or_else(|| Error::InvalidInput("exponent overflows".into()))?;
    let r = poly_powmod(&RingPolynomial::x(work), exponent, &lifted)?;
    let r = r.sub(&RingPolynomial::one(work))?;
    let pi = ctx.p().pow(i);
    if let Some(&bad) = r.coeffs().iter().find(|&&c| c % pi != 0) {
        return Err(Error::CertificateCorruption(format!(
            "x^{exponent} - 1 mod {f} has coefficient {bad} not divisible by {pi}"
        )));
    }
    let coeffs: Vec<i64> = r.coeffs().iter().map(|&c| (c / pi) as i64).collect();
    Ok(RingPolynomial::new(ctx, &coeffs))
}

/// Full certificate; errors if `f` is not primitive.
pub fn certify(f: &RingPolynomial) -> Result<PrimitivityCertificate> {
    let n = check_candidate(f)?;
    let ctx = *f.ctx();
    let (t, bound) = ward_bound(&ctx, n)?;
    let period = order_of_x(f)?;
    if period != bound {
        return invalid(format!(
            "{f} is not primitive: order {period}, bound {bound}"
        ));
    }
    let h = (1..=ctx.e())
        .map(|i| compute_h(f, i))
        .collect::<Result<Vec<_>>>()?;
    let h_f = h[0].mod_p();
    for (k, hi) in h.iter().enumerate() {
        if hi.mod_p() != h_f {
            return Err(Error::CertificateCorruption(format!(
                "h_{} = {hi} is not congruent to h_1 mod p",
                k + 1
            )));
        }
    }
    if h_f.is_zero() && ctx.e() >= 2 {
        return Err(Error::CertificateCorruption(format!("h_f vanishes for {f}")));
    }
    let strongly_primitive = h_f.degree().unwrap_or(0) >= 1;
    Ok(PrimitivityCertificate {
        f: f.clone(),
        t,
        period,
        h,
        h_f,
        strongly_primitive,
        seed: None,
    })
}

/// `deg(h_f) >= 1`; errors if `f` is not primitive.
pub fn is_strongly_primitive(f: &RingPolynomial) -> Result<bool> {
    Ok(certify(f)?.strongly_primitive)
}

fn candidate_count(ctx: &RingContext, n: usize) -> Option<u64> {
    (0..n).try_fold(1u64, |acc, _| acc.checked_mul(ctx.modulus() as u64))
}

/// Monic degree-n candidate with index `idx` in lexicographic order of `(c_0, ..., c_(n-1))`.
fn candidate(ctx: RingContext, n: usize, mut idx: u64) -> RingPolynomial {
    let m = ctx.modulus() as u64;
    let mut coeffs = vec![0i64; n + 1];
    for k in (0..n).rev() {
        coeffs[k] = (idx % m) as i64;
        idx /= m;
    }
    coeffs[n] = 1;
    RingPolynomial::new(ctx, &coeffs)
}

fn qualifies(f: &RingPolynomial, strongly: bool) -> Result<Option<PrimitivityCertificate>> {
    if !f.ctx().is_unit(f.constant_term()) || !is_primitive(f)? {
        return Ok(None);
    }
    let cert = certify(f)?;
    Ok((!strongly || cert.strongly_primitive).then_some(cert))
}

/// First qualifying monic degree-n polynomial.
///
/// Enumerates in lexicographic coefficient order when there are at most
/// [`EXHAUSTIVE_LIMIT`] candidates, otherwise samples with a ChaCha8 stream
/// seeded by `seed`. At most `budget` candidates are examined.
pub fn find_primitive(
    ctx: RingContext,
    n: usize,
    strongly: bool,
    budget: u64,
    seed: u64,
) -> Result<Option<PrimitivityCertificate>> {
    if n == 0 {
        return invalid("degree must be at least 1");
    }
    match candidate_count(&ctx, n) {
        Some(total) if total <= EXHAUSTIVE_LIMIT => {
            for idx in 0..total.min(budget) {
                if let Some(cert) = qualifies(&candidate(ctx, n, idx), strongly)? {
                    return Ok(Some(cert));
                }
            }
            Ok(None)
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = ctx.modulus() as i64;
            for _ in 0..budget {
                let mut coeffs: Vec<i64> = (0..n).map(|_| rng.gen_range(0..m)).collect();
                coeffs.push(1);
                let f = RingPolynomial::new(ctx, &coeffs);
                if let Some(cert) = qualifies(&f, strongly)? {
                    return Ok(Some(cert.with_seed(Some(seed))));
                }
            }
            Ok(None)
        }
    }
}

/// Every qualifying monic degree-n polynomial, in lexicographic order.
pub fn enumerate_primitive(
    ctx: RingContext,
    n: usize,
    strongly: bool,
) -> Result<Vec<PrimitivityCertificate>> {
    let total = candidate_count(&ctx, n)
        .filter(|&t| t <= EXHAUSTIVE_LIMIT)
        .ok_or_else(|| Error::InvalidInput(format!("too many degree-{n} candidates over {ctx}")))?;
    let mut out = Vec::new();
    for idx in 0..total {
        if let Some(cert) = qualifies(&candidate(ctx, n, idx), strongly)? {
            out.push(cert);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u32, e: u32) -> RingContext {
        RingContext::new(p, e).unwrap()
    }

    fn fib(c: RingContext) -> RingPolynomial {
        RingPolynomial::new(c, &[-1, -1, 1])
    }

    #[test]
    fn primitivity_examples() {
        assert!(is_primitive(&fib(ctx(3, 2))).unwrap());
        assert!(!is_primitive(&RingPolynomial::new(ctx(3, 2), &[-1, 1])).unwrap());
        assert!(!is_primitive(&RingPolynomial::new(ctx(3, 2), &[-1, 0, 1])).unwrap());
        assert!(is_primitive(&RingPolynomial::new(ctx(3, 2), &[3, 0, 1])).is_err());
        assert!(is_primitive(&RingPolynomial::new(ctx(3, 2), &[1, 1, 2])).is_err());
    }

    #[test]
    fn h_for_fibonacci_over_z9() {
        let f = fib(ctx(3, 2));
        // x^8 = 3x + 4 = 1 + 3 (x + 1)
        let h1 = compute_h(&f, 1).unwrap();
        assert_eq!(h1.coeffs(), &[1, 1]);
        // x^24 = 1 over Z/9; over Z/27, x^24 = 1 + 9 h_2
        let h2 = compute_h(&f, 2).unwrap();
        assert_eq!(h2.mod_p(), h1.mod_p());
        let over27 = f.lift(ctx(3, 3)).unwrap();
        let x24 = poly_powmod(&RingPolynomial::x(ctx(3, 3)), 24, &over27).unwrap();
        let expected: Vec<u32> = {
            let mut v = vec![1u32 + 9 * h2.coeff(0), 9 * h2.coeff(1)];
            while v.last() == Some(&0) {
                v.pop();
            }
            v
        };
        assert_eq!(x24.coeffs(), expected.as_slice());
        assert!(compute_h(&f, 0).is_err());
        assert!(compute_h(&f, 3).is_err());
    }

    #[test]
    fn compute_h_flags_non_primitive() {
        // (x + 1)^2: x^8 = 1 + (x + 1) mod 3, so x^8 - 1 is not divisible by 3
        let f = RingPolynomial::new(ctx(3, 2), &[1, 2, 1]);
        assert!(matches!(compute_h(&f, 1), Err(Error::CertificateCorruption(_))));
    }

    #[test]
    fn strongly_primitive_examples() {
        let cert = certify(&fib(ctx(3, 2))).unwrap();
        assert_eq!(cert.h_f().coeffs(), &[1, 1]);
        assert!(cert.strongly_primitive());
        assert!(is_strongly_primitive(&fib(ctx(3, 2))).unwrap());
        assert!(is_strongly_primitive(&RingPolynomial::new(ctx(3, 2), &[-1, 1])).is_err());
    }

    #[test]
    fn some_primitive_polynomial_is_not_strongly_primitive() {
        let all = enumerate_primitive(ctx(3, 2), 2, false).unwrap();
        let weak: Vec<_> = all.iter().filter(|c| !c.strongly_primitive()).collect();
        assert!(!weak.is_empty());
        for c in weak {
            assert_eq!(c.h_f().degree(), Some(0));
        }
    }

    #[test]
    fn find_examples() {
        let c = find_primitive(ctx(3, 1), 1, false, u64::MAX, 0).unwrap().unwrap();
        assert_eq!(c.f().coeffs(), &[1, 1]); // x + 1 = x - 2
        assert_eq!(c.period(), 2);

        let all = enumerate_primitive(ctx(3, 2), 2, false).unwrap();
        assert!(all.iter().any(|c| c.f() == &fib(ctx(3, 2))));
        let first = find_primitive(ctx(3, 2), 2, false, u64::MAX, 0).unwrap().unwrap();
        assert_eq!(first.f(), all[0].f());

        let strong = find_primitive(ctx(3, 2), 2, true, u64::MAX, 0).unwrap().unwrap();
        assert!(strong.h_f().degree().unwrap() >= 1);
        assert!(find_primitive(ctx(3, 2), 2, false, 0, 0).unwrap().is_none());
    }

    #[test]
    fn sampled_search_is_deterministic() {
        // 27^5 candidates forces sampling
        let c = ctx(3, 3);
        let a = find_primitive(c, 5, true, 2000, 7).unwrap().unwrap();
        let b = find_primitive(c, 5, true, 2000, 7).unwrap().unwrap();
        assert_eq!(a, b);
        assert_eq!(a.seed(), Some(7));
        assert_eq!(a.period(), 9 * 242);
    }

    #[test]
    fn certificates_reconstruct_powers() {
        for e in [2u32, 3] {
            let c = ctx(3, e);
            for cert in enumerate_primitive(c, 2, false).unwrap() {
                let x = RingPolynomial::x(c);
                for i in 1..=e {
                    let lhs = poly_powmod(&x, 3u64.pow(i - 1) * cert.t(), cert.f()).unwrap();
                    let hi = cert.h(i).unwrap();
                    let rhs = RingPolynomial::one(c)
                        .add(&hi.scale(3u32.pow(i) % c.modulus()))
                        .unwrap();
                    assert_eq!(lhs, rhs, "{} i={i}", cert.f());
                    assert_eq!(hi.mod_p(), *cert.h_f());
                }
            }
        }
    }

    #[test]
    fn order_count_over_z3() {
        // monic degree-2 over Z/3 with unit constant term: 6 candidates; x has order 8 for
        // exactly phi(8)/2 = 2 of them (x^2 + x + 2 and x^2 + 2x + 2)
        let c = ctx(3, 1);
        let mut primitive = Vec::new();
        for c0 in 1..3 {
            for c1 in 0..3 {
                let f = RingPolynomial::new(c, &[c0, c1, 1]);
                if order_of_x(&f).unwrap() == 8 {
                    primitive.push(f.coeffs().to_vec());
                }
            }
        }
        assert_eq!(primitive, vec![vec![2, 1, 1], vec![2, 2, 1]]);
    }

    #[test]
    fn json_roundtrip() {
        let cert = certify(&fib(ctx(3, 2))).unwrap();
        let json = cert.to_json();
        let text = serde_json::to_string(&json).unwrap();
        assert_eq!(
            text,
            r#"{"p":3,"e":2,"n":2,"f":[8,8,1],"period":24,"h1":[1,1],"h_f":[1,1],"strongly_primitive":true,"seed":null}"#
        );
        let back: CertificateJson = serde_json::from_str(&text).unwrap();
        assert_eq!(PrimitivityCertificate::from_json(&back).unwrap(), cert);
        let mut bad = back.clone();
        bad.period = 8;
        assert!(matches!(
            PrimitivityCertificate::from_json(&bad),
            Err(Error::CertificateCorruption(_))
        ));
    }
}
