use std::collections::BTreeSet;

use super::legendre::{legendre, squares};
use crate::compress::{image_set, is_permutation, psi_z_set, psi_zw, CompressingMap};
use crate::error::{invalid, Result};
use crate::ringcore::{is_prime, UnivariateFn};

/// `φ = g(x_(e-1)) + ψ(z, w)` for a permutation `g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationConstruction {
    pub z: u32,
    pub w: u32,
    pub map: CompressingMap,
}

/// Solves `g(0) + z = s` and `g((p-1)/2) + w = s`.
pub fn construct_thm7(g: &UnivariateFn, s: u32, e: u32) -> Result<PermutationConstruction> {
    let p = g.p();
    if s >= p {
        return invalid(format!("s = {s} is not in [0, {p})"));
    }
    if !is_permutation(g) {
        return invalid(format!("g = {g} is not a permutation of Z/{p}"));
    }
    let z = (s + p - g.eval(0)) % p;
    let w = (s + p - g.eval((p - 1) / 2)) % p;
    let map = CompressingMap::new(g.clone(), psi_zw(p, z, w, e)?, e)?;
    Ok(PermutationConstruction { z, w, map })
}

/// `g(y) = r` exactly when `g(λ y) = r`.
pub fn scaling_condition_holds(g: &UnivariateFn, r: u32, lambda: u32) -> bool {
    let p = g.p();
    (0..p).all(|y| (g.eval(y) == r) == (g.eval((lambda as u64 * y as u64 % p as u64) as u32) == r))
}

/// `φ = g(x_(e-1)) + ψ(z, W)` with `z = s - r` and `W = {w : s ∉ w + I}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalingConstruction {
    pub z: u32,
    pub set: BTreeSet<u32>,
    pub map: CompressingMap,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScalingOutcome {
    Applicable(ScalingConstruction),
    Inapplicable(String),
}

/// The non-permutation construction. `assignment` fills the nonzero tuples
/// (in index order) and defaults to the constant `min(W)`.
pub fn construct_thm8(
    g: &UnivariateFn,
    s: u32,
    lambda: u32,
    r: u32,
    e: u32,
    assignment: Option<&[u32]>,
) -> Result<ScalingOutcome> {
    let p = g.p();
    if s >= p || r >= p {
        return invalid(format!("s = {s} and r = {r} must lie in [0, {p})"));
    }
    if lambda % p <= 1 {
        return invalid(format!("λ = {lambda} must not be 0 or 1 mod {p}"));
    }
    if e < 2 {
        return invalid("the construction needs e >= 2");
    }
    let image = image_set(g);
    if !image.contains(&r) {
        return invalid(format!("r = {r} is not in the image of g = {g}"));
    }
    if image.len() == p as usize {
        return Ok(ScalingOutcome::Inapplicable(format!(
            "g = {g} is a permutation, so W is empty"
        )));
    }
    let set: BTreeSet<u32> = (0..p)
        .filter(|&w| !image.iter().any(|&i| (w + i) % p == s))
        .collect();
    if set.is_empty() {
        return Ok(ScalingOutcome::Inapplicable(format!("W is empty for s = {s}")));
    }
    if !scaling_condition_holds(g, r, lambda) {
        return Ok(ScalingOutcome::Inapplicable(format!(
            "g(y) = {r} and g({lambda} y) = {r} have different solutions"
        )));
    }
    let z = (s + p - r) % p;
    let tuples = (p as usize).pow(e - 1) - 1;
    let default;
    let assignment = match assignment {
        Some(a) => a,
        None => {
            default = vec![*set.iter().next().expect("W is nonempty"); tuples];
            &default
        }
    };
    let eta = psi_z_set(p, e, z, &set, assignment)?;
    let map = CompressingMap::new(g.clone(), eta, e)?;
    Ok(ScalingOutcome::Applicable(ScalingConstruction { z, set, map }))
}

/// `1` for `p = 3 mod 4`, else the least `w` with `(w/p) = (-w/p) = -1`.
pub fn thm9_choose_w(p: u32) -> Result<u32> {
    if p == 2 || !is_prime(p as u64) {
        return invalid(format!("p = {p} is not an odd prime"));
    }
    if p % 4 == 3 {
        return Ok(1);
    }
    for w in 1..p {
        if legendre(w as i64, p)? == -1 && legendre(-(w as i64), p)? == -1 {
            return Ok(w);
        }
    }
    unreachable!("for p = 1 mod 4, -1 is a square, so any nonresidue works")
}

/// `g = x^2`, `η = ψ(0, w)`.
pub fn thm9_map(p: u32, e: u32, w: u32) -> Result<CompressingMap> {
    CompressingMap::new(UnivariateFn::monomial(p, 2)?, psi_zw(p, 0, w, e)?, e)
}

/// `I \ (w + I)` for `I` the squares mod `p`.
pub fn predicted_uniform_set(p: u32, w: u32) -> BTreeSet<u32> {
    let i = squares(p);
    let shifted: BTreeSet<u32> = i.iter().map(|&x| (x + w) % p).collect();
    i.difference(&shifted).copied().collect()
}
