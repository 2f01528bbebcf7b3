use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use super::report::UniformityReport;
use super::seeded_rng;
use crate::compress::{compress_sequence, CompressingMap};
use crate::error::{invalid, Result};
use crate::primitivity::PrimitivityCertificate;
use crate::ringcore::inv_mod_p;
use crate::sequences::{
    all_states, alpha_sequence, generate, is_primitive_sequence, linear_multiple, primitive_states,
    values_where, LRSequence, LevelSequence,
};

fn check_k(k: u32, p: u32) -> Result<()> {
    if k == 0 || k >= p {
        return invalid(format!("k = {k} must be a nonzero digit mod {p}"));
    }
    Ok(())
}

fn check_map(m: &CompressingMap, cert: &PrimitivityCertificate) -> Result<()> {
    let ctx = cert.ctx();
    if m.p() != ctx.p() || m.e() != ctx.e() {
        return invalid(format!("map over p={} e={} does not match {ctx}", m.p(), m.e()));
    }
    if m.g().degree().unwrap_or(0) >= 2 && !cert.strongly_primitive() {
        return invalid(format!(
            "deg g >= 2 needs a strongly primitive polynomial, but h_f = {} for {}",
            cert.h_f(),
            cert.f()
        ));
    }
    Ok(())
}

/// `φ(a(t)) = φ(b(t))` at every `t` of one period with `α(t) = k`, `α` taken from `s_a`.
pub fn equal_at_alpha_k(
    s_a: &LRSequence,
    s_b: &LRSequence,
    m: &CompressingMap,
    cert: &PrimitivityCertificate,
    k: u32,
) -> Result<bool> {
    let p = cert.ctx().p();
    check_k(k, p)?;
    if !is_primitive_sequence(s_a, cert)? || !is_primitive_sequence(s_b, cert)? {
        return invalid("both sequences must be primitive");
    }
    check_map(m, cert)?;
    let alpha = alpha_sequence(s_a, cert)?;
    let u = compress_sequence(m, s_a)?;
    let v = compress_sequence(m, s_b)?;
    let len = s_a.period().max(s_b.period());
    Ok((0..len).all(|t| alpha.at(t) != k || u.at(t) == v.at(t)))
}

/// Result of scanning ordered pairs `(i, j)`, `i != j`.
struct PairScan {
    positions: u64,
    pairs: u64,
    sampled: bool,
    first: Option<(usize, usize)>,
}

/// Runs `check(i, j) -> (positions, bad)` over all ordered pairs of distinct
/// indices, or over a seeded sample of them when the estimated cost exceeds `budget`.
fn scan_pairs<F>(count: usize, cost_per_pair: u64, budget: u64, seed: u64, check: F) -> PairScan
where
    F: Fn(usize, usize) -> (u64, bool) + Sync,
{
    let total_pairs = (count as u64) * (count as u64).saturating_sub(1);
    let estimate = total_pairs.saturating_mul(cost_per_pair.max(1));
    if estimate <= budget {
        let rows: Vec<(u64, u64, Option<usize>)> = (0..count)
            .into_par_iter()
            .map(|i| {
                let mut positions = 0;
                let mut pairs = 0;
                let mut first = None;
                for j in (0..count).filter(|&j| j != i) {
                    let (pos, bad) = check(i, j);
                    positions += pos;
                    pairs += 1;
                    if bad && first.is_none() {
                        first = Some(j);
                    }
                }
                (positions, pairs, first)
            })
            .collect();
        let first = rows
            .iter()
            .enumerate()
            .find_map(|(i, row)| row.2.map(|j| (i, j)));
        PairScan {
            positions: rows.iter().map(|r| r.0).sum(),
            pairs: rows.iter().map(|r| r.1).sum(),
            sampled: false,
            first,
        }
    } else {
        let wanted = (budget / cost_per_pair.max(1)).max(1) as usize;
        let mut rng = seeded_rng(seed);
        let picks: Vec<(usize, usize)> = (0..wanted)
            .map(|_| {
                let i = rng.gen_range(0..count);
                let j = (i + rng.gen_range(1..count)) % count;
                (i, j)
            })
            .collect();
        let results: Vec<(u64, bool)> = picks.par_iter().map(|&(i, j)| check(i, j)).collect();
        PairScan {
            positions: results.iter().map(|r| r.0).sum(),
            pairs: results.len() as u64,
            sampled: true,
            first: picks.iter().zip(&results).find(|(_, r)| r.1).map(|(pair, _)| *pair),
        }
    }
}

fn cert_params(report: UniformityReport, cert: &PrimitivityCertificate) -> UniformityReport {
    let ctx = cert.ctx();
    report
        .param("p", ctx.p())
        .param("e", ctx.e())
        .param("n", cert.degree())
        .param("f", cert.f().coeffs().to_vec())
}

/// Per primitive state: sequence, compressed sequence, and α.
struct Prepared {
    states: Vec<Vec<u32>>,
    compressed: Vec<Vec<u32>>,
    alphas: Vec<LevelSequence>,
    period: usize,
}

fn prepare(cert: &PrimitivityCertificate, m: &CompressingMap) -> Result<Prepared> {
    let ctx = *cert.ctx();
    let states: Vec<Vec<u32>> = primitive_states(ctx, cert.degree()).collect();
    let period = cert.period() as usize;
    let rows: Vec<(Vec<u32>, LevelSequence)> = states
        .par_iter()
        .map(|state| {
            let s = generate(cert.f(), state)?;
            let c = compress_sequence(m, &s)?;
            let full = (0..period).map(|t| c.at(t)).collect();
            Ok((full, alpha_sequence(&s, cert)?))
        })
        .collect::<Result<_>>()?;
    let (compressed, alphas) = rows.into_iter().unzip();
    Ok(Prepared {
        states,
        compressed,
        alphas,
        period,
    })
}

fn pair_report(
    name: &str,
    cert: &PrimitivityCertificate,
    m: &CompressingMap,
    k: Option<u32>,
    budget: u64,
    seed: u64,
) -> Result<UniformityReport> {
    let prep = prepare(cert, m)?;
    let positions: Vec<Vec<usize>> = prep
        .alphas
        .iter()
        .map(|alpha| (0..prep.period).filter(|&t| k.map_or(true, |k| alpha.at(t) == k)).collect())
        .collect();
    let avg = positions.iter().map(Vec::len).sum::<usize>() as u64 / positions.len().max(1) as u64;
    let scan = scan_pairs(prep.states.len(), avg, budget, seed, |i, j| {
        let (u, v) = (&prep.compressed[i], &prep.compressed[j]);
        let mut checked = 0;
        for &t in &positions[i] {
            checked += 1;
            if u[t] != v[t] {
                return (checked, false);
            }
        }
        (checked, true)
    });
    let mut report = cert_params(UniformityReport::new(name, seed), cert).param("map", m.to_spec());
    if let Some(k) = k {
        report = report.param("k", k);
    }
    report.add_counts(scan.positions, scan.pairs);
    report.set_sampled(scan.sampled);
    if let Some((i, j)) = scan.first {
        report.fail(json!({"a": prep.states[i], "b": prep.states[j]}));
    }
    Ok(report)
}

/// Equal compressed values at every `t` with `α(t) = k` must force equal states.
pub fn verify_alpha_k_injectivity(
    cert: &PrimitivityCertificate,
    m: &CompressingMap,
    k: u32,
    budget: u64,
    seed: u64,
) -> Result<UniformityReport> {
    check_k(k, cert.ctx().p())?;
    check_map(m, cert)?;
    pair_report("alpha-k", cert, m, Some(k), budget, seed)
}

/// Equal compressed sequences must force equal states.
pub fn verify_compress_injectivity(
    cert: &PrimitivityCertificate,
    m: &CompressingMap,
    budget: u64,
    seed: u64,
) -> Result<UniformityReport> {
    check_map(m, cert)?;
    pair_report("injectivity", cert, m, None, budget, seed)
}

/// For `c` in `G(f, p^e)` and `γ` a nonzero m-sequence, `{c_(e-1)(t) : γ(t) = k}` is
/// all of `Z/p`, or the singleton `{λ k}` with the lower levels of `c` zero and `c_(e-1) = λ γ`.
pub fn relation_lemma_report(
    cert: &PrimitivityCertificate,
    budget: u64,
    seed: u64,
) -> Result<UniformityReport> {
    let ctx = *cert.ctx();
    let p = ctx.p();
    let e = ctx.e();
    let n = cert.degree();
    let base = ctx.base_field();
    let f_p = cert.f().mod_p();
    let gammas: Vec<LevelSequence> = primitive_states(base, n)
        .map(|st| generate(&f_p, &st)?.level(0))
        .collect::<Result<_>>()?;
    let per_c = gammas.len() as u64 * (p as u64 - 1) * cert.period();
    let total = (ctx.modulus() as u64).checked_pow(n as u32);
    let affordable = (budget / per_c.max(1)).max(1);
    let (states, sampled): (Vec<Vec<u32>>, bool) = match total {
        Some(t) if t <= affordable => (all_states(ctx, n).collect(), false),
        _ => {
            let mut rng = seeded_rng(seed);
            let picks = (0..affordable)
                .map(|_| (0..n).map(|_| rng.gen_range(0..ctx.modulus())).collect())
                .collect();
            (picks, true)
        }
    };
    let rows: Vec<(u64, u64, Option<serde_json::Value>)> = states
        .par_iter()
        .map(|state| {
            let c = generate(cert.f(), state)?;
            let top = c.level(e - 1)?;
            let low_zero = (0..e - 1).all(|i| c.level(i).map(|l| l.is_zero()).unwrap_or(false));
            let mut positions = 0;
            let mut pairs = 0;
            for (g_idx, gamma) in gammas.iter().enumerate() {
                let lambda = linear_multiple(&top, gamma);
                for k in 1..p {
                    pairs += 1;
                    positions += c.period().max(gamma.period()) as u64;
                    let set = values_where(&top, gamma, k);
                    let ok = if set.len() == p as usize {
                        true
                    } else if set.len() == 1 {
                        match lambda {
                            Some(l) if low_zero => set.contains(&(l * k % p)),
                            _ => false,
                        }
                    } else {
                        false
                    };
                    if !ok {
                        let witness = json!({
                            "c": state,
                            "gamma": primitive_states(base, n).nth(g_idx),
                            "k": k,
                            "values": set,
                        });
                        return Ok((positions, pairs, Some(witness)));
                    }
                }
            }
            Ok((positions, pairs, None))
        })
        .collect::<Result<_>>()?;
    let mut report = cert_params(UniformityReport::new("relation-lemma", seed), cert);
    report.set_sampled(sampled);
    for (positions, pairs, witness) in rows {
        report.add_counts(positions, pairs);
        if let Some(w) = witness {
            report.fail(w);
        }
    }
    Ok(report)
}

/// For primitive `a`, `b` with `β = λ α`: if `b_(e-1)(t) = δ + λ a_(e-1)(t)` at every `t`
/// with `α(t) = k`, then `λ = 1`, `a = b mod p^(e-1)`, and `b_(e-1) - a_(e-1) = δ k^(-1) α`.
pub fn highest_level_report(
    cert: &PrimitivityCertificate,
    budget: u64,
    seed: u64,
) -> Result<UniformityReport> {
    let ctx = *cert.ctx();
    let p = ctx.p();
    let e = ctx.e();
    if e < 2 {
        return invalid("the highest-level check needs e >= 2");
    }
    if !cert.strongly_primitive() {
        return invalid(format!("{} is not strongly primitive", cert.f()));
    }
    let low_mod = p.pow(e - 1);
    let states: Vec<Vec<u32>> = primitive_states(ctx, cert.degree()).collect();
    let period = cert.period() as usize;
    let seqs: Vec<(LRSequence, LevelSequence, LevelSequence)> = states
        .par_iter()
        .map(|st| {
            let s = generate(cert.f(), st)?;
            let alpha = alpha_sequence(&s, cert)?;
            let top = s.level(e - 1)?;
            Ok((s, alpha, top))
        })
        .collect::<Result<_>>()?;
    let hits = std::sync::atomic::AtomicU64::new(0);
    let scan = scan_pairs(states.len(), period as u64 * (p as u64 - 1), budget, seed, |i, j| {
        let (a, alpha, a_top) = &seqs[i];
        let (b, beta, b_top) = &seqs[j];
        let Some(lambda) = linear_multiple(beta, alpha) else {
            return (0, false);
        };
        let mut positions = 0;
        for k in 1..p {
            let ts: Vec<usize> = (0..period).filter(|&t| alpha.at(t) == k).collect();
            positions += ts.len() as u64;
            let delta = (b_top.at(ts[0]) + p - lambda * a_top.at(ts[0]) % p) % p;
            let hypothesis = ts
                .iter()
                .all(|&t| b_top.at(t) == (delta + lambda * a_top.at(t)) % p);
            if !hypothesis {
                continue;
            }
            hits.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            let scale = delta * inv_mod_p(k, p).expect("k != 0") % p;
            let holds = lambda == 1
                && (0..period).all(|t| a.at(t) % low_mod == b.at(t) % low_mod)
                && (0..period).all(|t| (b_top.at(t) + p - a_top.at(t)) % p == scale * alpha.at(t) % p);
            if !holds {
                return (positions, true);
            }
        }
        (positions, false)
    });
    let mut report = cert_params(UniformityReport::new("highest-level", seed), cert);
    report.add_counts(scan.positions, scan.pairs);
    report.set_sampled(scan.sampled);
    report.set_details(json!({"hypothesis_instances": hits.into_inner()}));
    if let Some((i, j)) = scan.first {
        report.fail(json!({"a": states[i], "b": states[j]}));
    }
    Ok(report)
}
