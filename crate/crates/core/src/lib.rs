//! Critical-orbit curves of the critically marked cubic family
//! `P_{a,v}(z) = z^3 - 3a^2 z + 2a^3 + v`.

pub mod atlas;
pub mod dynamics;
pub mod error;
pub mod exactpoly;
pub mod kneading;
pub mod monodromy;
pub mod roots;
pub mod thurston;

pub use error::{Error, Result};
