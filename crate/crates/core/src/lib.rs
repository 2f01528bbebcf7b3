//! Primitive linear recurring sequences over `Z/(p^e)` for odd primes `p`,
//! their p-adic level decomposition, compressing maps into `Z/p`, and an
//! exhaustive harness for distribution and s-uniformity experiments.

pub mod analysis;
pub mod compress;
pub mod error;
pub mod polyring;
pub mod primitivity;
pub mod ringcore;
pub mod sequences;

pub use compress::{
    compress_sequence, eval_map, full_monomial_coefficient, full_monomial_threshold, image_set, is_permutation, psi_z_set,
    psi_zw, CompressingMap, MultivariatePoly, TableJson,
};
pub use analysis::{UniformityReport, Verdict};
pub use error::{Error, Result};
pub use polyring::{apply_poly_to_sequence, order_of_x, poly_mulmod, poly_powmod, RingPolynomial, Shift};
pub use primitivity::{
    certify, compute_h, enumerate_primitive, find_primitive, is_primitive, is_strongly_primitive,
    CertificateJson, PrimitivityCertificate,
};
pub use ringcore::{
    carry_c1, carry_map_poly, interpolate, padic_compose, padic_expand, DigitVector, Residue,
    RingContext, UnivariateFn,
};
pub use sequences::{
    alpha_sequence, generate, is_primitive_sequence, verify_recurring_identities, CarryReading,
    LRSequence, LevelSequence, RecurringIdentity,
};
