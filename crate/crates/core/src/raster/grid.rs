use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::escape::{check_coverage, compute_orbit, level_from_orbit};
use crate::function::EntireFunction;
use crate::growth::ladder::ThresholdLadder;

/// Largest grid side.
pub const MAX_SIDE: usize = 16384;

/// Rectangle given by centre and half extents.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub cx: f64,
    pub cy: f64,
    pub half_width: f64,
    pub half_height: f64,
}

impl BBox {
    pub fn centered(half_width: f64, half_height: f64) -> Self {
        BBox {
            cx: 0.0,
            cy: 0.0,
            half_width,
            half_height,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.cx, self.cy, self.half_width, self.half_height]
            .iter()
            .all(|v| v.is_finite());
        if !finite || !(self.half_width > 0.0) || !(self.half_height > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "bbox needs finite centre and positive half extents, got {:?}",
                self
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Cell {
    pub level: Option<i32>,
    pub indeterminate: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelGrid {
    pub bbox: BBox,
    pub width: usize,
    pub height: usize,
    pub depth: usize,
    pub l_range: (i32, i32),
    #[serde(rename = "R")]
    pub r: f64,
    pub supersample: bool,
    /// Row-major, row 0 at the top of the window.
    pub cells: Vec<Cell>,
}

/// Geometry shared by grids and masks.
pub trait Geometry {
    fn bbox(&self) -> BBox;
    fn dims(&self) -> (usize, usize);

    fn cell_size(&self) -> (f64, f64) {
        let b = self.bbox();
        let (w, h) = self.dims();
        (2.0 * b.half_width / w as f64, 2.0 * b.half_height / h as f64)
    }

    fn center(&self, col: usize, row: usize) -> Complex64 {
        let b = self.bbox();
        let (dx, dy) = self.cell_size();
        Complex64::new(
            b.cx - b.half_width + (col as f64 + 0.5) * dx,
            b.cy + b.half_height - (row as f64 + 0.5) * dy,
        )
    }

    /// Cell whose centre is nearest the origin; ties go to the lowest index.
    fn origin_cell(&self) -> (usize, usize) {
        let b = self.bbox();
        let (w, h) = self.dims();
        let (dx, dy) = self.cell_size();
        let nearest = |pos: f64, n: usize| -> usize {
            // centre index closest to pos, clamped; exact halves round down
            let t = pos - 0.5;
            let lo = t.floor().clamp(0.0, (n - 1) as f64) as usize;
            let hi = (lo + 1).min(n - 1);
            if (hi as f64 - t).abs() < (lo as f64 - t).abs() {
                hi
            } else {
                lo
            }
        };
        let col = nearest((0.0 - (b.cx - b.half_width)) / dx, w);
        let row = nearest(((b.cy + b.half_height) - 0.0) / dy, h);
        (col, row)
    }
}

impl Geometry for LevelGrid {
    fn bbox(&self) -> BBox {
        self.bbox
    }
    fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }
}

impl LevelGrid {
    pub fn cell(&self, col: usize, row: usize) -> Cell {
        self.cells[row * self.width + col]
    }
}

pub fn validate_resolution(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 || width > MAX_SIDE || height > MAX_SIDE {
        return Err(Error::InvalidGrid(format!(
            "resolution {width}x{height} must be within 1..={MAX_SIDE} per side"
        )));
    }
    Ok(())
}

/// Classifies every cell centre by its largest level. With `supersample`
/// the cell takes the lowest level of four sub-samples.
#[allow(clippy::too_many_arguments)]
pub fn classify_grid(
    f: &EntireFunction,
    ladder: &ThresholdLadder,
    bbox: BBox,
    resolution: (usize, usize),
    depth: usize,
    l_range: (i32, i32),
    supersample: bool,
) -> Result<LevelGrid> {
    bbox.validate()?;
    let (width, height) = resolution;
    validate_resolution(width, height)?;
    if l_range.0 > l_range.1 {
        return Err(Error::InvalidParameter("empty level range".into()));
    }
    if depth < 1 {
        return Err(Error::InvalidParameter("depth must be at least 1".into()));
    }
    check_coverage(ladder, depth, l_range.1)?;
    let mut grid = LevelGrid {
        bbox,
        width,
        height,
        depth,
        l_range,
        r: ladder.r,
        supersample,
        cells: Vec::new(),
    };
    let (dx, dy) = grid.cell_size();
    let classify = |z: Complex64| -> Result<Cell> {
        let orbit = compute_orbit(f, z, depth);
        let v = level_from_orbit(&orbit, ladder, depth, l_range)?;
        Ok(Cell {
            level: v.level,
            indeterminate: v.indeterminate,
        })
    };
    let rows: Vec<Result<Vec<Cell>>> = (0..height)
        .into_par_iter()
        .map(|row| {
            (0..width)
                .map(|col| {
                    let z = grid.center(col, row);
                    if !supersample {
                        return classify(z);
                    }
                    let mut out = Cell {
                        level: Some(i32::MAX),
                        indeterminate: false,
                    };
                    for (sx, sy) in [(-0.25, 0.25), (0.25, 0.25), (-0.25, -0.25), (0.25, -0.25)] {
                        let c = classify(z + Complex64::new(sx * dx, sy * dy))?;
                        out.indeterminate |= c.indeterminate;
                        out.level = match (out.level, c.level) {
                            (Some(a), Some(b)) => Some(a.min(b)),
                            _ => None,
                        };
                    }
                    Ok(out)
                })
                .collect()
        })
        .collect();
    let mut cells = Vec::with_capacity(width * height);
    for row in rows {
        cells.extend(row?);
    }
    grid.cells = cells;
    Ok(grid)
}
