//! Canonicalization of motivic integral words, the coaction derivations,
//! cancellation machinery, and the recursive unramifiedness certifier.

mod canonical;
mod certify;
mod coaction;

pub use canonical::{
    canonicalize_h, canonicalize_l, canonicalize_l_comb, mzv_duality, weight1_class,
    weight1_word, CanonKind, Canonical, LeftPiece,
};
pub use certify::{
    certify_unramified, derivation_identity, family, replay_certificate, zeta_normal_form,
    CertOutcome, CertReason, Certificate, CheckedTerm, DerivationCheck, FamilyName,
    IdentityCheckReport, KnowledgeBase, LeftCheck, RewriteRule,
};
pub use coaction::{
    coaction_cuts, d1_vanishes, derivation, repeated_barred_survivors, to_zeta_basis, DomainError,
    RawCut, SurvivorReport, TensorSum, TensorTerm, ZetaPiece,
};
