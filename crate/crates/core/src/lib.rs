//! Integer submodular functions, their base polytopes, and decompositions of
//! integer points of `k·B_f` into at most `dim B_f + 1` distinct integer bases.

pub mod batch;
pub mod corpus;
pub mod decompose;
pub mod error;
pub mod ground;
pub mod instance;
pub mod lp;
pub mod oracle;
pub mod par;
pub mod polytope;
pub mod submodular;

pub use decompose::{
    decompose, merge_direct_sum, split_into_k_bases, verify, DecompositionTrace, Term, TraceNode,
    VerifyReport, WeightedDecomposition,
};
pub use error::{Error, Result};
pub use ground::{GroundSet, IntVector, SubsetMask, DEFAULT_LIMIT_N};
pub use instance::Instance;
pub use polytope::{dimension, face_structure, FaceStructure};
pub use submodular::SubmodularFn;
