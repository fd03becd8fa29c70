//! Window classification, fundamental holes and loops, and image output.

pub mod components;
pub mod grid;
pub mod hole;
pub mod image;

pub use components::{component_diagnostics, LevelComponents};
pub use grid::{classify_grid, BBox, Cell, Geometry, LevelGrid};
pub use hole::{extract_hole, extract_loop, HoleMask, LoopPolyline};
pub use image::{encode_pgm, encode_ppm, write_level_image, write_mask_image, GridMetadata, Palette};
