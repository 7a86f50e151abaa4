//! Exact rational homological algebra over finite extensional families.
//!
//! Functors are contravariant on the category of concrete epimorphisms
//! between the members; complexes are bounded with homological grading.

mod category;
mod complex;
mod decompose;
mod fixture;
mod functor;
mod linalg;
mod module;
mod pointwise;
mod realize;

pub use category::{EpiCategory, Hom};
pub use complex::{ChainMap, FunctorComplex};
pub use decompose::{
    augmentation_fiber, chi_decompose, verify_retraction, PeelStep, PeelTrace, RetractionReport,
};
pub use fixture::{ComplexFixture, RatMatrix, RestrictionFixture, TermFixture};
pub use functor::{reduce, FunctorRep, NatTrans};
pub use linalg::{q, Matrix, Q};
pub use module::OutModule;
pub use pointwise::{Poincare, RankWindow};
pub use realize::realize;
