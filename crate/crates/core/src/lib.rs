//! Exact computation in finitely presented asymptotic couples of logarithmic
//! transseries: the maps psi, s, p, the integral and contraction, model
//! extensions (copy insertion, class cuts, pseudolimits), trace sets and the
//! simple-extension classifier, (B,epsilon)-shifts, the precontraction-group
//! view, and an evaluator for the associated term language.
//!
//! Everything is exact: coefficients are rationals or elements of a real
//! quadratic field, and every order decision is made symbolically.

pub mod checks;
pub mod couple;
pub mod element;
pub mod error;
pub mod extensions;
pub mod lex;
pub mod psi_order;
pub mod scalar;

pub use couple::{CoupleOps, Model};
pub use element::{parse_element, psi_member_name, Element};
pub use error::{Error, Result};
pub use psi_order::{
    CanonicalCut, CopyId, CutDescriptor, InsertResult, PsiOrder, PsiPosition, SClass,
    SClassRelation, SCut, Side,
};
pub use scalar::{parse_scalar, Field, Scalar};
