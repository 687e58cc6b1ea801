//! Uniform continuity, fixed and periodic points, and the wandering/periodic
//! dichotomy for endomorphisms of `Z^m × F_n` and their continuous extensions
//! to the completion.

pub mod colstruct;
pub mod extmath;
pub mod words;
pub mod endo;
pub mod fixper;
pub mod dynamics;
pub mod oracle;

pub use colstruct::{col_condition, is_uniform, matrix_order, ColError, ColStructure, IntMatrix};
pub use dynamics::{
    check_eventually_lnd, classify_auto_point, classify_type_ii, decide_periodic_abelian,
    decide_periodic_type_ii, dichotomy_lnd, equivs_probe, wandering_certificate, CaseTag,
    Certificate, Classification, DynError, LndOutcome, LndVerdict, OmegaReport,
};
pub use endo::{EndoError, EndoKind, Endomorphism, GroupElement, UcFailure, UcReport, Witness};
pub use extmath::{product_dist, Dyadic, ExtError, ExtInt, ExtVector, Point};
pub use fixper::{fix_basis_abelian, fix_ext_patterns, per_ext_patterns, PatternReport};
pub use words::{BoundaryWord, CompletionWord, FreeEndo, Letter, Word, WordError};
