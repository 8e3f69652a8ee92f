//! Dimension theory for planar self-affine sets with positive linear parts.
#![allow(non_snake_case)]

pub mod cli;
pub mod constructions;
pub mod dimension;
pub mod error;
pub mod ifs;
pub mod linalg2;
pub mod projective;
pub mod render;
pub mod rng;

pub use error::{Error, Result};
