use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::json;

use super::constructions::{
    construct_thm7, construct_thm8, predicted_uniform_set, thm9_choose_w, thm9_map, ScalingOutcome,
};
use super::report::UniformityReport;
use super::seeded_rng;
use super::uniform::{count_uniform_s, primitive_sample, s_uniform_witness, UniformMode};
use crate::compress::{
    compress_sequence, full_monomial_coefficient, full_monomial_threshold, image_set,
    CompressingMap,
};
use crate::error::{invalid, Result};
use crate::polyring::{poly_powmod, RingPolynomial};
use crate::primitivity::PrimitivityCertificate;
use crate::ringcore::{carry_map_poly, UnivariateFn};
use crate::sequences::{
    all_states, expected_period, find_identity_violation, generate, linear_multiple,
    primitive_states, values_where, CarryReading, LRSequence, RecurringIdentity,
};

fn with_cert(report: UniformityReport, cert: &PrimitivityCertificate) -> UniformityReport {
    let ctx = cert.ctx();
    report
        .param("p", ctx.p())
        .param("e", ctx.e())
        .param("n", cert.degree())
        .param("f", cert.f().coeffs().to_vec())
}

/// The `x^(p-1)` coefficient of `x -> C1(u + x)` is `-u` for every `u`.
pub fn carry_report(p: u32, seed: u64) -> Result<UniformityReport> {
    let mut report = UniformityReport::new("carry", seed).param("p", p);
    for u in 0..p {
        let coeff = carry_map_poly(u, p)?.coeff(p as usize - 1);
        report.add_counts(p as u64, 0);
        let expected = (p - u) % p;
        if coeff != expected {
            report.fail(json!({"u": u, "got": coeff, "expected": expected}));
        }
    }
    Ok(report)
}

/// Period law over every state, and the m-sequence value distribution over every pair.
pub fn periods_report(cert: &PrimitivityCertificate, seed: u64) -> Result<UniformityReport> {
    let ctx = *cert.ctx();
    let p = ctx.p();
    let n = cert.degree();
    let mut report = with_cert(UniformityReport::new("periods", seed), cert);
    for state in all_states(ctx, n) {
        let s = generate(cert.f(), &state)?;
        let expected = expected_period(&s, cert)?;
        report.add_counts(s.period() as u64, 0);
        if s.period() as u64 != expected {
            report.fail(json!({"check": "period", "state": state, "got": s.period(), "expected": expected}));
        }
        if !s.level(0)?.is_zero() {
            for i in 0..ctx.e() {
                let got = s.level(i)?.period() as u64;
                if got != cert.t() * (p as u64).pow(i) {
                    report.fail(json!({"check": "level-period", "state": state, "level": i, "got": got}));
                }
            }
        }
    }
    let base = ctx.base_field();
    let f_p = cert.f().mod_p();
    let levels: Vec<_> = all_states(base, n)
        .map(|st| Ok((st.clone(), generate(&f_p, &st)?.level(0)?)))
        .collect::<Result<_>>()?;
    for (sa, a) in &levels {
        for (sb, b) in levels.iter().filter(|(_, b)| !b.is_zero()) {
            for k in 1..p {
                let set = values_where(a, b, k);
                report.add_counts(b.period() as u64, 1);
                let ok = match linear_multiple(a, b) {
                    Some(lambda) => set.len() == 1 && set.contains(&(lambda * k % p)),
                    None => set.len() == p as usize,
                };
                if !ok {
                    report.fail(json!({"check": "linear-relation", "a": sa, "b": sb, "k": k, "values": set}));
                }
            }
        }
    }
    Ok(report)
}

/// `x^(p^(i-1) T) mod f = 1 + p^i h_i` for `1 <= i <= e`, evaluated in `Z/p^max(e, i+1)`,
/// and every `h_i` agrees with `h_1` mod `p`.
pub fn certificate_report(cert: &PrimitivityCertificate, seed: u64) -> Result<UniformityReport> {
    let ctx = *cert.ctx();
    let p = ctx.p();
    let e = ctx.e();
    let mut report = with_cert(UniformityReport::new("certificate", seed), cert);
    let h1 = cert.h(1).expect("h_1 exists").mod_p();
    for i in 1..=e {
        let ring = ctx.with_exponent(e.max(i + 1))?;
        let f = cert.f().lift(ring)?;
        let h = cert.h(i).expect("i in [1, e]").lift(ring)?;
        let exponent = (p as u64).pow(i - 1) * cert.t();
        let lhs = poly_powmod(&RingPolynomial::x(ring), exponent, &f)?;
        let rhs = RingPolynomial::one(ring).add(&h.scale(p.pow(i)))?;
        report.add_counts(1, 0);
        if lhs != rhs {
            report.fail(json!({"check": "power", "i": i, "got": lhs.coeffs(), "expected": rhs.coeffs()}));
        }
        if h.mod_p() != h1 {
            report.fail(json!({"check": "h-mod-p", "i": i}));
        }
    }
    Ok(report)
}

fn identities_for(e: u32) -> Vec<RecurringIdentity> {
    match e {
        2 => vec![RecurringIdentity::TopShift],
        3 => vec![RecurringIdentity::TopShift, RecurringIdentity::CarryShiftE3],
        _ => vec![
            RecurringIdentity::TopShift,
            RecurringIdentity::CarryShift(CarryReading::Split),
        ],
    }
}

/// Shift identities of the top level, for all `j` in `[0, p)`, on `count` seeded primitive states.
/// If the split carry reading fails for `e >= 4`, the nested reading is tried and flagged.
pub fn recurrence_report(
    cert: &PrimitivityCertificate,
    count: usize,
    seed: u64,
) -> Result<UniformityReport> {
    let ctx = *cert.ctx();
    let p = ctx.p();
    if ctx.e() < 2 {
        return invalid("the shift identities need e >= 2");
    }
    let mut states: Vec<Vec<u32>> = primitive_states(ctx, cert.degree()).collect();
    states.shuffle(&mut seeded_rng(seed));
    states.truncate(count);
    let seqs: Vec<LRSequence> = states
        .iter()
        .map(|st| generate(cert.f(), st))
        .collect::<Result<_>>()?;

    let mut report = with_cert(UniformityReport::new("recurrence", seed), cert)
        .param("states", seqs.len());
    let mut identities_used = Vec::new();
    let mut fallback = false;
    for identity in identities_for(ctx.e()) {
        let first_failure = |identity| -> Result<Option<serde_json::Value>> {
            for (st, s) in states.iter().zip(&seqs) {
                for j in 0..p as u64 {
                    if let Some(t) = find_identity_violation(s, cert, identity, j)? {
                        return Ok(Some(json!({
                            "identity": RecurringIdentity::name(&identity),
                            "state": st, "j": j, "t": t,
                        })));
                    }
                }
            }
            Ok(None)
        };
        let positions = seqs.iter().map(|s| s.period() as u64 * p as u64).sum::<u64>();
        report.add_counts(positions, 0);
        let mut used = identity;
        let mut failure = first_failure(identity)?;
        if failure.is_some() && identity == RecurringIdentity::CarryShift(CarryReading::Split) {
            used = RecurringIdentity::CarryShift(CarryReading::Nested);
            fallback = true;
            report.add_counts(positions, 0);
            failure = first_failure(used)?;
        }
        identities_used.push(used.name());
        if let Some(w) = failure {
            report.fail(w);
        }
    }
    report.set_details(json!({"identities": identities_used, "carry_fallback": fallback}));
    Ok(report)
}

fn uniform_over(
    report: &mut UniformityReport,
    seqs: &[LRSequence],
    m: &CompressingMap,
    s: u32,
    lambda: u32,
    tag: serde_json::Value,
) -> Result<()> {
    for a in seqs {
        let b = a.scaled(lambda);
        let u = compress_sequence(m, a)?;
        let v = compress_sequence(m, &b)?;
        report.add_counts(a.period() as u64, 1);
        if let Some(t) = s_uniform_witness(&u, &v, s, UniformMode::Plain)? {
            let mut w = tag.clone();
            w["a"] = json!(a.initial_state());
            w["t"] = json!(t);
            report.fail(w);
            return Ok(());
        }
    }
    Ok(())
}

/// For every `s`, the permutation construction makes `a` and `-a` s-uniform.
pub fn thm7_report(
    cert: &PrimitivityCertificate,
    g: &UnivariateFn,
    budget: u64,
    seed: u64,
) -> Result<UniformityReport> {
    let ctx = *cert.ctx();
    let p = ctx.p();
    let e = ctx.e();
    let mut report = with_cert(UniformityReport::new("thm7", seed), cert).param("g", g.to_string());
    let (seqs, sampled) = primitive_sample(cert, cert.period() * p as u64, budget, seed)?;
    report.set_sampled(sampled);
    let minus_one = ctx.modulus() - 1;
    let mut constructions = Vec::new();
    for s in 0..p {
        let c = construct_thm7(g, s, e)?;
        constructions.push(json!({"s": s, "z": c.z, "w": c.w}));
        uniform_over(&mut report, &seqs, &c.map, s, minus_one, json!({"s": s}))?;
    }
    if *g == UnivariateFn::monomial(p, 1)? {
        let c = construct_thm7(g, 0, e)?;
        let coeff = full_monomial_coefficient(c.map.eta());
        let threshold = full_monomial_threshold(p, e);
        if (c.z, c.w) != (0, (p + 1) / 2) || coeff != threshold {
            report.fail(json!({"check": "identity-map", "z": c.z, "w": c.w, "coefficient": coeff}));
        }
    }
    report.set_details(json!({"constructions": constructions}));
    Ok(report)
}

/// For every `λ` in `[2, p)`, `r` in the image of `g` and `s`, the scaling construction
/// (default assignment plus `extra_assignments` seeded ones) makes `a` and `λ a` s-uniform.
pub fn thm8_report(
    cert: &PrimitivityCertificate,
    g: &UnivariateFn,
    extra_assignments: usize,
    budget: u64,
    seed: u64,
) -> Result<UniformityReport> {
    let ctx = *cert.ctx();
    let p = ctx.p();
    let e = ctx.e();
    let mut report = with_cert(UniformityReport::new("thm8", seed), cert)
        .param("g", g.to_string())
        .param("assignments", extra_assignments + 1);
    let (seqs, sampled) = primitive_sample(cert, cert.period() * p as u64, budget, seed)?;
    report.set_sampled(sampled);
    let mut rng = seeded_rng(seed);
    let tuples = (p as usize).pow(e - 1) - 1;
    let mut applicable = 0u64;
    let mut inapplicable = 0u64;
    for lambda in 2..p {
        for r in image_set(g) {
            for s in 0..p {
                let c = match construct_thm8(g, s, lambda, r, e, None)? {
                    ScalingOutcome::Applicable(c) => c,
                    ScalingOutcome::Inapplicable(_) => {
                        inapplicable += 1;
                        continue;
                    }
                };
                applicable += 1;
                let choices: Vec<u32> = c.set.iter().copied().collect();
                let mut maps = vec![c.map];
                for _ in 0..extra_assignments {
                    let assignment: Vec<u32> =
                        (0..tuples).map(|_| choices[rng.gen_range(0..choices.len())]).collect();
                    if let ScalingOutcome::Applicable(c) =
                        construct_thm8(g, s, lambda, r, e, Some(&assignment))?
                    {
                        maps.push(c.map);
                    }
                }
                for m in &maps {
                    let tag = json!({"lambda": lambda, "r": r, "s": s, "map": m.to_spec()});
                    uniform_over(&mut report, &seqs, m, s, lambda, tag)?;
                }
            }
        }
    }
    report.set_details(json!({"applicable": applicable, "inapplicable": inapplicable}));
    Ok(report)
}

/// `g = x^2`, `η = ψ(0, w)`, `b = -a`: the scanned s-set must equal `I \ (w + I)`, and for the
/// default `w` its size must be `⌊p/4⌋ + 1`. Sizes for other `w` are reported, not asserted.
pub fn thm9_report(
    cert: &PrimitivityCertificate,
    w: Option<u32>,
    budget: u64,
    seed: u64,
) -> Result<UniformityReport> {
    let ctx = *cert.ctx();
    let p = ctx.p();
    let chosen = thm9_choose_w(p)?;
    let w = w.unwrap_or(chosen);
    if w % p == 0 {
        return invalid("w must be nonzero mod p");
    }
    let m = thm9_map(p, ctx.e(), w)?;
    let count = count_uniform_s(cert, &m, -1, budget, seed)?;
    let predicted = predicted_uniform_set(p, w);
    let expected_size = p as usize / 4 + 1;
    let mut report = with_cert(UniformityReport::new("thm9", seed), cert).param("w", w);
    report.add_counts(count.positions, count.sequences as u64);
    report.set_sampled(count.sampled);
    if count.holding != predicted {
        report.fail(json!({"check": "set", "scanned": count.holding, "predicted": predicted}));
    }
    if w == chosen && count.holding.len() != expected_size {
        report.fail(json!({"check": "count", "got": count.holding.len(), "expected": expected_size}));
    }
    let failing: Vec<_> = count
        .failing
        .iter()
        .map(|(s, (a, t))| json!({"s": s, "a": a, "t": t}))
        .collect();
    report.set_details(json!({
        "count": count.holding.len(),
        "holding": count.holding,
        "predicted": predicted,
        "vacuous": count.vacuous,
        "failing": failing,
        "count_asserted": w == chosen,
    }));
    Ok(report)
}
