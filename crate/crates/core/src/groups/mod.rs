//! Permutation groups: permutations, Schreier–Sims, factorization and the
//! finite group-theoretic checks built on them.

pub mod bsgs;
pub mod cert;
pub mod factor;
pub mod gates;
pub mod perm;
pub mod steps;
pub mod twoinv;
pub mod universal;

pub use bsgs::Bsgs;
pub use cert::{generator_word_certificate, CertParams, Certifier};
pub use factor::{Factorizer, Letter};
pub use gates::{decompose_even_perm, Decomposer, Gate, GateSequence, GateSet, GateStep};
pub use perm::{alternating_order, Parity, Perm};
pub use twoinv::{two_involution_shift_decomposition, CompositionOrder, TwoInvolutionReport};
pub use steps::{commutator_generation_check, normal_closure_check, GenerationReport};
pub use universal::{
    contains_localized_alt, search_universal_involution, translate_group, translates,
    InvolutionCandidate,
};
