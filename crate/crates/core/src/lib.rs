//! Exact polarization checks on smooth degree-1 del Pezzo surfaces.

// Rank-9 coordinate loops read better indexed; classes are stored inline.
#![allow(clippy::needless_range_loop, clippy::large_enum_variant)]

pub mod alpha;
pub mod cone;
pub mod error;
pub mod exec;
pub mod kstab;
pub mod lattice;
pub mod lp;
pub mod rational;
pub mod sample;
