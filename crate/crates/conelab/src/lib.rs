//! Tangent-cone estimation for point-sampled subsets of Euclidean space.
//!
//! The library estimates four cones at a base point x of a sampled set F:
//! the lower and upper tangent cones Tan⁻/Tan⁺ (directions reachable along
//! every scale / along some scale) and the lower and upper paratangent cones
//! pTan⁻/pTan⁺ (the same limits with the base point allowed to move inside F).
//! The per-direction scores are built so that the chain
//!
//!   pTan⁻ ⊂ Tan⁻ ⊂ Tan⁺ ⊂ pTan⁺
//!
//! holds exactly at estimator level. On top of the cones sit Grassmannian
//! subspace angles (module [`exterior`]), linear hulls and subspace fields
//! (module [`subspaces`]), smoothness classifiers with tri-state verdicts
//! (module [`classify`]), and Lie-algebra recovery for sampled matrix groups
//! (module [`liegroup`]).

pub mod classify;
pub mod cones;
pub mod error;
pub mod exterior;
pub mod liegroup;
pub mod setmodel;
pub mod subspaces;

pub use error::{ConelabError, Result};
pub use exterior::{Blade, Subspace};
pub use setmodel::{GeneratorSpec, SampledSet};
