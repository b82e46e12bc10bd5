//! Computational workbench for Rankin-Selberg sums of holomorphic newforms:
//! exponential sums, Hecke eigenvalue tables, Voronoi summation, the
//! Heath-Brown delta symbol, shifted convolution sums and the amplified
//! circle-method pipeline, each paired with a brute-force check.

pub mod accum;
pub mod analysis;
pub mod deltam;
pub mod error;
pub mod expsum;
pub mod newform;
pub mod rankin;
pub mod scs;
pub mod voronoi;

pub use error::{Error, Result};
