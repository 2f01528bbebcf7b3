//! Experiment harness: s-uniformity and α(t)=k predicates, Legendre-symbol
//! checks, the ψ-based constructions, and JSON reports for each experiment.

mod alpha;
mod constructions;
mod experiments;
mod legendre;
mod report;
mod uniform;

pub use alpha::{
    equal_at_alpha_k, highest_level_report, relation_lemma_report, verify_alpha_k_injectivity,
    verify_compress_injectivity,
};
pub use constructions::{
    construct_thm7, construct_thm8, predicted_uniform_set, scaling_condition_holds, thm9_choose_w,
    thm9_map, PermutationConstruction, ScalingConstruction, ScalingOutcome,
};
pub use experiments::{
    carry_report, certificate_report, periods_report, recurrence_report, thm7_report, thm8_report, thm9_report,
};
pub use legendre::{
    intersection_count, intersection_formula, legendre, legendre_report, legendre_sum, squares,
};
pub use report::{Counts, UniformityReport, Verdict};
pub use uniform::{count_uniform_s, s_uniform, s_uniform_witness, UniformCount, UniformMode};

/// Elementary checks allowed before a scan switches to seeded sampling.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

pub(crate) fn seeded_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
