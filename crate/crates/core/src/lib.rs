//! Exact computation with central rational hyperplane arrangements:
//! intersection lattices, characteristic polynomials, freeness of the
//! derivation module and deciders for the inductively, additionally,
//! divisionally and stair-free classes.

pub mod arrangement;
pub mod battery;
pub mod bitset;
pub mod catalog;
pub mod classes;
pub mod derivations;
pub mod error;
pub mod format;
pub mod iso;
pub mod lattice;
pub mod linalg;
pub mod mpoly;
pub mod poly;

pub use arrangement::{canonicalize, Arrangement, Flat, Hyperplane, Triple};
pub use error::{Error, Result};
pub use lattice::{char_poly, char_poly_whitney, Lattice};
pub use poly::{ExpMultiset, IntPoly, RootFactorization};
