//! Modular data, modular invariants and sector-algebra checks for braided
//! fusion rings.
//!
//! The crate takes fusion coefficients together with rational twist
//! exponents, builds the `Y`, `S` and `T` matrices, decides non-degeneracy,
//! enumerates all modular invariant mass matrices and verifies
//! α-induction branching certificates against them.

pub mod cli;
pub mod fusion_ring;
pub mod generators;
pub mod induction;
pub mod io;
pub mod linalg;
pub mod modular;
pub mod repdecomp;
pub mod search;
pub mod twist;

pub use fusion_ring::{DimensionVector, FusionRing, ValidationReport};
pub use generators::{cyclic_model, named_model, su2_level, su2_s_closed_form, ModelSpec};
pub use modular::{modular_matrices, ModularData, DEFAULT_TOL};
pub use search::{search_invariants, MassMatrix, SearchOptions};
pub use twist::TwistData;
