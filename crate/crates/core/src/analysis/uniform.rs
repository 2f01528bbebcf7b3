use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use super::seeded_rng;
use crate::compress::{compress_sequence, CompressingMap};
use crate::error::{invalid, Result};
use crate::primitivity::PrimitivityCertificate;
use crate::ringcore::{lcm, UnivariateFn};
use crate::sequences::{generate, primitive_orbits, LRSequence, LevelSequence};

/// Which positions an s-uniformity check looks at.
#[derive(Debug, Clone, Copy)]
pub enum UniformMode<'a> {
    /// Every `t`.
    Plain,
    /// Positions with `c(t) != 0`.
    NonzeroOf(&'a LevelSequence),
    /// Positions with `c(t) = k`.
    EqualTo(&'a LevelSequence, u32),
}

/// First `t` in one common period where exactly one of `u(t)`, `v(t)` equals `s`.
pub fn s_uniform_witness(
    u: &LevelSequence,
    v: &LevelSequence,
    s: u32,
    mode: UniformMode<'_>,
) -> Result<Option<usize>> {
    let p = u.p();
    if v.p() != p {
        return invalid(format!("sequences over Z/{p} and Z/{} cannot be compared", v.p()));
    }
    if s >= p {
        return invalid(format!("s = {s} is not in [0, {p})"));
    }
    let mut len = lcm(u.period() as u64, v.period() as u64);
    let keep: Box<dyn Fn(usize) -> bool + '_> = match mode {
        UniformMode::Plain => Box::new(|_| true),
        UniformMode::NonzeroOf(c) | UniformMode::EqualTo(c, _) => {
            if c.p() != p {
                return invalid(format!("selector over Z/{} but sequences over Z/{p}", c.p()));
            }
            len = len.and_then(|l| lcm(l, c.period() as u64));
            match mode {
                UniformMode::EqualTo(_, k) => {
                    if k >= p {
                        return invalid(format!("k = {k} is not in [0, {p})"));
                    }
                    Box::new(move |t| c.at(t) == k)
                }
                _ => Box::new(|t| c.at(t) != 0),
            }
        }
    };
    let len = match len {
        Some(l) if l <= 1 << 32 => l as usize,
        _ => return invalid("common period is too long to scan"),
    };
    Ok((0..len).find(|&t| keep(t) && ((u.at(t) == s) != (v.at(t) == s))))
}

pub fn s_uniform(u: &LevelSequence, v: &LevelSequence, s: u32, mode: UniformMode<'_>) -> Result<bool> {
    Ok(s_uniform_witness(u, v, s, mode)?.is_none())
}

/// Outcome of scanning every `s` for the pairs `(a, λ a)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniformCount {
    /// Non-vacuous `s` for which every tested pair is s-uniform.
    pub holding: BTreeSet<u32>,
    /// `s` outside the image of `φ`.
    pub vacuous: BTreeSet<u32>,
    /// For each failing `s`: initial state of `a` and the first bad `t`.
    pub failing: BTreeMap<u32, (Vec<u32>, usize)>,
    pub sequences: usize,
    pub positions: u64,
    pub sampled: bool,
}

/// Primitive sequences to test: one per shift orbit when the state space fits in
/// `budget / cost_per_sequence`, otherwise a seeded sample of initial states.
pub(crate) fn primitive_sample(
    cert: &PrimitivityCertificate,
    cost_per_sequence: u64,
    budget: u64,
    seed: u64,
) -> Result<(Vec<LRSequence>, bool)> {
    let ctx = *cert.ctx();
    let n = cert.degree();
    let states = (ctx.modulus() as u64).checked_pow(n as u32);
    let affordable = (budget / cost_per_sequence.max(1)).max(1);
    match states {
        Some(total) if total <= affordable.saturating_mul(cert.period()) => {
            Ok((primitive_orbits(cert)?, false))
        }
        _ => {
            let mut rng = seeded_rng(seed);
            let mut out = Vec::new();
            while (out.len() as u64) < affordable {
                let state: Vec<u32> = (0..n).map(|_| rng.gen_range(0..ctx.modulus())).collect();
                if state.iter().all(|&v| v % ctx.p() == 0) {
                    continue;
                }
                out.push(generate(cert.f(), &state)?);
            }
            Ok((out, true))
        }
    }
}

fn is_square_map(g: &UnivariateFn) -> bool {
    g.degree() == Some(2) && g.coeff(2) == 1 && g.coeff(1) == 0 && g.coeff(0) == 0
}

/// Tests every `s` in `Z/p` on the pairs `(compress(a), compress(λ a))` over primitive `a`.
pub fn count_uniform_s(
    cert: &PrimitivityCertificate,
    m: &CompressingMap,
    lambda: i64,
    budget: u64,
    seed: u64,
) -> Result<UniformCount> {
    let ctx = *cert.ctx();
    let p = ctx.p();
    if m.p() != p || m.e() != ctx.e() {
        return invalid(format!("map over p={} e={} does not match {ctx}", m.p(), m.e()));
    }
    if !cert.strongly_primitive() {
        return invalid(format!("{} is not strongly primitive", cert.f()));
    }
    if !is_square_map(m.g()) {
        return invalid(format!("expected g = x^2, got g = {}", m.g()));
    }
    let table = m.eta().table();
    if table[0] != 0 || table[1..].windows(2).any(|w| w[0] != w[1]) {
        return invalid("expected η = ψ(0, w)");
    }
    let scalar = ctx.reduce(lambda);
    if !ctx.is_unit(scalar) {
        return invalid(format!("λ = {lambda} is not a unit mod {}", ctx.modulus()));
    }

    let image = m.image();
    let (seqs, sampled) = primitive_sample(cert, cert.period() * p as u64, budget, seed)?;
    let mut out = UniformCount {
        holding: BTreeSet::new(),
        vacuous: (0..p).filter(|s| !image.contains(s)).collect(),
        failing: BTreeMap::new(),
        sequences: seqs.len(),
        positions: 0,
        sampled,
    };
    let pairs: Vec<(LevelSequence, LevelSequence)> = seqs
        .iter()
        .map(|a| Ok((compress_sequence(m, a)?, compress_sequence(m, &a.scaled(scalar))?)))
        .collect::<Result<_>>()?;
    for s in image {
        let mut failed = None;
        for (a, (u, v)) in seqs.iter().zip(&pairs) {
            out.positions += u.period().max(v.period()) as u64;
            if let Some(t) = s_uniform_witness(u, v, s, UniformMode::Plain)? {
                failed = Some((a.initial_state(), t));
                break;
            }
        }
        match failed {
            Some(w) => {
                out.failing.insert(s, w);
            }
            None => {
                out.holding.insert(s);
            }
        }
    }
    Ok(out)
}
