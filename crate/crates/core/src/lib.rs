//! Hyperplane arrangements in `R^d` and the volumes of the simplices they cut out.
//!
//! The crate builds arrangements (integer grids, regular-polygon chords,
//! rotation and helix families, tangent hyperplanes to corner surfaces),
//! enumerates every `(d+1)`-subset, and reports volume spectra, simplicial
//! cells, distinct-volume subfamilies and equal-volume certificates. A small
//! derivative-free search looks for plane configurations with many tied
//! maximum-volume tetrahedra.

pub mod affine;
pub mod bounds;
pub mod cells;
pub mod combinatorics;
pub mod constructions;
pub mod error;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod scalar;
pub mod search;
pub mod spectrum;
pub mod verify;

pub use affine::{apply_affine_map, corner_frame, dual_transform, AffineImage, AffineMap, Dual};
pub use error::{Error, Result};
pub use geometry::{
    intersect_point, is_general_position, simplex_of_subset, simplex_volume, Arrangement,
    GeneralPosition, Hyperplane, Point, Simplex, Witness, WitnessKind,
};
pub use scalar::{FieldMode, Rational, Scalar, DEFAULT_EPS_VOL};
