//! Lattice sums over the cuboidal family of three-dimensional lattices.
//!
//! The family is generated by `(u, v, 0)`, `(u, 0, v)` and `(0, v, v)` and is
//! parameterised by the anisotropy `A = u²/v²`. It contains the acc
//! (`A = 1/3`), bcc (`A = 1/2`), mcc (`A = 1/√2`) and fcc (`A = 1`) lattices.
//!
//! - [`lattice`]: basis, Gram matrix, minimum norm, packing density, kissing numbers.
//! - [`zeta`]: truncated Epstein zeta sums `L(A; s)` and their `A`-derivatives,
//!   each with a rigorous truncation bound.
//! - [`minimum`]: numerical checks of the stationary point at bcc and table scans.
//! - [`limits`]: the degenerate limits `A → ∞`, `A → 0` and `s → ∞`.
//! - [`cli`]: the `cuboidal` command-line front end.

pub mod cli;
pub mod error;
pub mod lattice;
pub mod limits;
mod linalg;
pub mod minimum;
pub mod summation;
pub mod zeta;

pub use error::{Error, Result};
pub use lattice::{
    build_lattice, classify, density_derivative, kissing_number, minimum_norm,
    normalization_scale, packing_density, quadratic_form, AnisotropyParam, CuboidalLattice,
    GramMatrix, Regime,
};
pub use summation::Accumulation;
pub use zeta::{
    d2lda2, d2lda2_at_half, dlda, dlda_at_half_symmetrized, epstein_zeta,
    epstein_zeta_transformed, tail_bound, SumSpec, Truncation, ZetaValue,
};
