//! Exact rational computations for Sullivan models: free loop space cohomology with its
//! word-length (Hodge) splitting, a finite Poincaré-duality quotient of the model, the
//! duality chain map, and the ranks of the rational homotopy groups of the identity
//! component of the self-equivalence monoid.
//!
//! Everything is computed over `Q` with arbitrary-precision rationals; no floating point
//! enters any reported rank.

pub mod error;
pub mod exactq;
pub mod freeloop;
pub mod gca;
pub mod pdquotient;
pub mod sections;
pub mod sullivan;

pub use error::{Error, ErrorClass, Result};
pub use exactq::{Rational, SparseMatrix};
pub use freeloop::{build_free_loop_model, FreeLoopModel, GrowthClass, GrowthReport, HodgeTable};
pub use gca::{Element, Generator, GeneratorSet, Monomial};
pub use pdquotient::{build_quotient, FiniteCdga, QuotientMap};
pub use sections::{DualSectionComplex, ExtendedQuotientModel, TheoremReport, TheoremRow};
pub use sullivan::{parse_model, Completeness, RankTable, SullivanModel, ValidationReport};
