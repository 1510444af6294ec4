//! Second variation along radial geodesics: Jacobi fields, index forms and
//! the local comparison `L(s) ≤ L̃(s)` with a modified model.

mod index;
mod jacobi;
mod key_lemma;

pub use index::{index_form, model_comparison_fields, ModelComparison};
pub use jacobi::{jacobi_field, JacobiField, SampledField, VARIATION_STEP};
pub use key_lemma::{
    key_lemma_check, key_lemma_check_with, KeyLemmaOptions, LegConfig, VariationReport,
};
