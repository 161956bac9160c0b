//! Frequency rectangles, orthogonal arrays, Hadamard matrices and
//! t-independent vector sets over prime fields.

pub mod combin;
pub mod constructions;
pub mod designs;
pub mod error;
pub mod format;
pub mod gf;
pub mod hadamard;
pub mod mofs2p;
pub mod search;
pub mod verify;

pub use designs::{FrequencyRectangle, Grid, HadamardMatrix, OrthogonalArray, VectorSet};
pub use error::{Error, Result};
pub use gf::Field;
