//! Submodels, trace sets, the simple-extension classifier, primitive
//! elements, class-cut and pseudolimit adjunctions, embeddings and type
//! comparison.

pub mod class_cut;
pub mod classify;
pub mod embed;
pub mod pseudolimit;
pub mod submodel;
pub mod trace;

pub use class_cut::{adjoin_class_cut, same_type_over, ClassCutExtension, ExtensionElement};
pub use classify::{acl_generate, classify_simple_extension, primitive_strip, AclResult, ExtensionReport, ExtensionStep, Terminal};
pub use embed::{embed_universal, CopyImage, Embedding};
pub use pseudolimit::{pc_check, Pseudolimit, PseudolimitSpec};
pub use submodel::Submodel;
pub use trace::{trace_set, trace_set_windowed, DownSet, TraceCase, TraceEntry, TraceResult, Witness, WitnessKind};
