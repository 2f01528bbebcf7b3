use std::collections::BTreeSet;

use serde_json::json;

use super::report::UniformityReport;
use crate::error::{invalid, Result};
use crate::ringcore::{is_prime, mod_pow};

fn check_odd_prime(p: u32) -> Result<()> {
    if p == 2 || !is_prime(p as u64) {
        return invalid(format!("p = {p} is not an odd prime"));
    }
    Ok(())
}

/// `(a/p)` via Euler's criterion.
pub fn legendre(a: i64, p: u32) -> Result<i8> {
    check_odd_prime(p)?;
    let a = a.rem_euclid(p as i64) as u64;
    Ok(match mod_pow(a, (p as u64 - 1) / 2, p as u64) {
        0 => 0,
        1 => 1,
        _ => -1,
    })
}

/// `sum_x ((x^2 + w)/p)`.
pub fn legendre_sum(w: u32, p: u32) -> Result<i64> {
    check_odd_prime(p)?;
    (0..p as i64)
        .map(|x| legendre(x * x + w as i64, p).map(i64::from))
        .sum()
}

/// The image `I` of `x -> x^2`.
pub fn squares(p: u32) -> BTreeSet<u32> {
    (0..p as u64).map(|x| (x * x % p as u64) as u32).collect()
}

/// `|I ∩ (w + I)|` by direct set intersection.
pub fn intersection_count(p: u32, w: u32) -> Result<usize> {
    check_odd_prime(p)?;
    if w % p == 0 {
        return invalid("intersection_count needs w != 0 mod p");
    }
    let i = squares(p);
    Ok(i.iter().filter(|&&x| i.contains(&((x + p - w % p) % p))).count())
}

/// `(p + 1 + (w/p) + (-w/p)) / 4`.
pub fn intersection_formula(p: u32, w: u32) -> Result<i64> {
    if w % p == 0 {
        return invalid("intersection_formula needs w != 0 mod p");
    }
    let num = p as i64 + 1 + legendre(w as i64, p)? as i64 + legendre(-(w as i64), p)? as i64;
    Ok(num / 4)
}

/// Checks the Legendre-sum values for every `w` and the intersection formula for every `w != 0`.
pub fn legendre_report(p: u32, seed: u64) -> Result<UniformityReport> {
    check_odd_prime(p)?;
    let mut report = UniformityReport::new("legendre", seed).param("p", p);
    for w in 0..p {
        let sum = legendre_sum(w, p)?;
        let expected = if w == 0 { p as i64 - 1 } else { -1 };
        report.add_counts(p as u64, 0);
        if sum != expected {
            report.fail(json!({"check": "sum", "w": w, "got": sum, "expected": expected}));
        }
        if w != 0 {
            let count = intersection_count(p, w)? as i64;
            let formula = intersection_formula(p, w)?;
            report.add_counts(1, 0);
            if count != formula {
                report.fail(json!({"check": "intersection", "w": w, "got": count, "expected": formula}));
            }
        }
    }
    Ok(report)
}
