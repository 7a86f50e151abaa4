//! Computational companion for derived categories of global representations.
//!
//! The crate is organised bottom-up:
//!
//! * [`abgroup`]: canonical finite abelian groups, the epimorphism preorder
//!   `G ≫ H`, and an element-level oracle that certifies the combinatorial rules.
//! * [`family`]: families of groups, their closure properties and the standard
//!   reflective filtration with explicit reflections `q_n`.
//! * [`spectrum`]: the profinite point space, its clopen algebra, structural
//!   space descriptions and Cantor–Bendixson ranks.
//! * [`ttsupport`]: formal compact objects with exact homological support,
//!   thick and prime ideals, the VI-module classifier and Krull chains.
//! * [`repcore`]: an exact-rational homological engine for essentially finite
//!   families, used as an independent oracle for the support calculus.

pub mod abgroup;
pub mod error;
pub mod family;
pub mod repcore;
pub mod spectrum;
pub mod ttsupport;

pub use abgroup::FinAbGroup;
pub use error::{Error, Result};
pub use family::{Family, FamilySpec, Member};
