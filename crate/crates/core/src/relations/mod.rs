//! Integer-relation detection, the conjectural MZV spanning catalog, and
//! batch identity verification.

mod catalog;
mod lll;

pub use catalog::{
    default_catalog, find_relation, mzv_basis, verify_identity, Identity, IdentityError,
    IdentityLhs, IdentityReport, IdentityRhsTerm, IdentityStatus, RegName, RelationCandidate,
    RelationError, RelationOutcome, RelationProblem,
};
pub use lll::{determinant, lll_reduce, LllError};
