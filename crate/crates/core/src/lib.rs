//! Lax functors from the cube category to the Burnside category, their
//! totalizations, and the Khovanov functor of a link diagram.

pub mod burnside;
pub mod cube;
pub mod error;
pub mod functor;
pub mod khovanov;
pub mod matrix;
pub mod par;
pub mod simplicial;
pub mod totalization;

pub use error::{Error, Result};
