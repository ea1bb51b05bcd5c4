//! Exact arithmetic for GSp(4): parahoric flags and Hecke double cosets over `Z/p^r`,
//! Weyl and Bruhat combinatorics, Kostant weights for boundary strata, and
//! Newton/Hodge polygon criteria for ordinarity.

pub mod arith;
pub mod boundary;
pub mod bruhat;
pub mod error;
pub mod flags;
pub mod hecke;
pub mod kostant;
pub mod matrix;
pub mod polygons;
pub mod roots;
pub mod symplectic;
pub mod tables;
pub mod weights;

pub use error::{Error, Result};
