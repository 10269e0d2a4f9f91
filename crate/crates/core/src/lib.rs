//! Reversible cellular automata on full shifts: block maps, controlled
//! permutations, unbordered words and the permutation-group machinery used to
//! check generation results on finite windows.

pub mod alphabet;
pub mod blockmap;
pub mod ctrl;
pub mod error;
pub mod generators;
pub mod groups;
pub mod io;
pub mod words;

pub use alphabet::{Alphabet, PeriodicConfig};
pub use blockmap::{
    compose, compose_all, equal, invert, shift, BlockMap, EqualityMode, EqualityPolicy, Evidence,
    Verdict,
};
pub use ctrl::{CtrlDescriptor, CtrlLayout, Evaluator, Factor, OffsetConvention};
pub use error::{Error, Result};
pub use generators::{net_shift, GenWordCert, Generator, NetShiftVector};
pub use groups::{Bsgs, GateSet, Perm};
pub use words::{MutuallyUnborderedFamily, Word};
