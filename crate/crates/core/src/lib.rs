//! Linear fractional self-maps of the unit ball in C² and their embedding
//! into continuous one-parameter semigroups.
//!
//! A map `φ(z) = (Az + B) / (⟨z, C⟩ + D)` is carried by its 3×3 associated
//! matrix; composition becomes matrix multiplication, so fractional iterates
//! `φ_t` come from fractional powers of the Jordan form of that matrix.
//!
//! Module map:
//! - [`matalg`]: 3×3 complex algebra, closed-form eigenvalues, Jordan form.
//! - [`lfm`]: evaluation, composition, inversion, fixed points.
//! - [`domains`]: half space, Siegel half space, Cayley map and square-root
//!   intertwiners.
//! - [`model`]: Denjoy-Wolff classification and the Heisenberg-translation
//!   analytic semigroup.
//! - [`semigroup`]: `Λ^t` rules, `φ_t`, verification and orbits.
//! - [`cli`]: the `lfmsg` command line front end.

// Fixed 3×3 index loops read better than iterator chains here.
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod domains;
pub mod error;
pub mod lfm;
pub mod matalg;
pub mod model;
pub mod sampling;
pub mod semigroup;

pub use error::{Error, Result};
pub use lfm::{AssociatedMatrix, FixedPoint, LinearFractionalMap};
pub use matalg::{ComplexScalar, JordanBlock, JordanDecomposition, Mat3, Point};
pub use model::ModelClass;
pub use semigroup::SemigroupElement;
