use std::collections::{BTreeMap, VecDeque};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::raster::grid::{BBox, Geometry, LevelGrid};

/// Approximation of the fundamental hole `H_n` inside the window.
#[derive(Clone, Debug, Serialize)]
pub struct HoleMask {
    pub bbox: BBox,
    pub width: usize,
    pub height: usize,
    pub level: i32,
    /// Row-major like the grid.
    pub mask: Vec<bool>,
    pub bounded_in_window: bool,
}

impl Geometry for HoleMask {
    fn bbox(&self) -> BBox {
        self.bbox
    }
    fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }
}

impl HoleMask {
    pub fn get(&self, col: usize, row: usize) -> bool {
        self.mask[row * self.width + col]
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    /// True when every cell of `self` is also in `other`.
    pub fn is_subset_of(&self, other: &HoleMask) -> bool {
        self.mask.len() == other.mask.len() && self.mask.iter().zip(&other.mask).all(|(&a, &b)| !a || b)
    }

    /// Builds a mask directly, e.g. for synthetic shapes. Boundedness is
    /// recomputed from the border cells.
    pub fn from_cells(bbox: BBox, width: usize, height: usize, level: i32, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != width * height {
            return Err(Error::InvalidGrid(format!(
                "mask has {} cells, expected {}",
                mask.len(),
                width * height
            )));
        }
        let bounded_in_window = !touches_border(&mask, width, height);
        Ok(HoleMask {
            bbox,
            width,
            height,
            level,
            mask,
            bounded_in_window,
        })
    }
}

fn touches_border(mask: &[bool], w: usize, h: usize) -> bool {
    (0..w).any(|c| mask[c] || mask[(h - 1) * w + c]) || (0..h).any(|r| mask[r * w] || mask[r * w + w - 1])
}

/// 4-connected flood fill of the cells below level `n`, seeded at the cell
/// nearest the origin.
pub fn extract_hole(grid: &LevelGrid, n: i32) -> Result<HoleMask> {
    let (lo, hi) = grid.l_range;
    if n < lo || n > hi {
        return Err(Error::InvalidParameter(format!(
            "level {n} outside the classified range {lo}..={hi}"
        )));
    }
    let (w, h) = (grid.width, grid.height);
    let below = |i: usize| grid.cells[i].level.is_none_or(|l| l < n);
    let (sc, sr) = grid.origin_cell();
    let seed = sr * w + sc;
    if !below(seed) {
        return Err(Error::OriginInLevel(n));
    }
    let mut mask = vec![false; w * h];
    let mut queue = VecDeque::from([seed]);
    mask[seed] = true;
    while let Some(i) = queue.pop_front() {
        let (c, r) = (i % w, i / w);
        let mut visit = |j: usize| {
            if !mask[j] && below(j) {
                mask[j] = true;
                queue.push_back(j);
            }
        };
        if c > 0 {
            visit(i - 1);
        }
        if c + 1 < w {
            visit(i + 1);
        }
        if r > 0 {
            visit(i - w);
        }
        if r + 1 < h {
            visit(i + w);
        }
    }
    HoleMask::from_cells(grid.bbox, w, h, n, mask)
}

#[derive(Clone, Debug, Serialize)]
pub struct LoopPolyline {
    pub level: i32,
    /// Closed: the last vertex connects back to the first.
    pub vertices: Vec<Complex64>,
    /// Same loop in cell units, `x = col + 0.5`, `y = -(row + 0.5)` at centres.
    pub cell_vertices: Vec<(f64, f64)>,
    /// Other boundary components (inner boundaries of the mask), clockwise.
    pub inner_loops: usize,
}

impl LoopPolyline {
    pub fn cell_length(&self) -> f64 {
        ring_length(&self.cell_vertices)
    }

    /// Shoelace area in cell units; positive for counterclockwise.
    pub fn cell_area(&self) -> f64 {
        ring_area(&self.cell_vertices)
    }

    pub fn length(&self) -> f64 {
        let pts: Vec<(f64, f64)> = self.vertices.iter().map(|z| (z.re, z.im)).collect();
        ring_length(&pts)
    }
}

fn ring_length(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len();
    (0..n)
        .map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            (b.0 - a.0).hypot(b.1 - a.1)
        })
        .sum()
}

fn ring_area(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len();
    0.5 * (0..n)
        .map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            a.0 * b.1 - b.0 * a.1
        })
        .sum::<f64>()
}

// Directions on the corner lattice: right, up, left, down.
const DIRS: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];

/// Boundary of the mask as a counterclockwise polyline through the midpoints
/// between inside and outside cell centres (marching squares with midpoint
/// vertices). Diagonal contacts are split so the inside stays 4-connected.
pub fn extract_loop(mask: &HoleMask) -> Result<LoopPolyline> {
    if !mask.bounded_in_window {
        return Err(Error::UnboundedMask);
    }
    let (w, h) = (mask.width, mask.height);
    let inside =
        |c: i64, r: i64| c >= 0 && r >= 0 && (c as usize) < w && (r as usize) < h && mask.get(c as usize, r as usize);

    // Corner (i, j) sits at x = i, y = -j. Edges run with the inside on the left.
    let mut out: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    let mut edges: Vec<((i64, i64), usize)> = Vec::new();
    for r in 0..h as i64 {
        for c in 0..w as i64 {
            if !inside(c, r) {
                continue;
            }
            let sides = [
                (inside(c, r + 1), (c, r + 1), 0usize),
                (inside(c + 1, r), (c + 1, r + 1), 1),
                (inside(c, r - 1), (c + 1, r), 2),
                (inside(c - 1, r), (c, r), 3),
            ];
            for (neighbour, start, dir) in sides {
                if !neighbour {
                    out.entry(start).or_default().push(edges.len());
                    edges.push((start, dir));
                }
            }
        }
    }
    if edges.is_empty() {
        return Err(Error::UnboundedMask);
    }
    let end_of = |e: usize| {
        let ((i, j), d) = edges[e];
        (i + DIRS[d].0, j - DIRS[d].1)
    };
    let mut used = vec![false; edges.len()];
    let mut rings: Vec<Vec<(f64, f64)>> = Vec::new();
    for first in 0..edges.len() {
        if used[first] {
            continue;
        }
        let mut ring = Vec::new();
        let mut e = first;
        loop {
            used[e] = true;
            let ((i, j), d) = edges[e];
            ring.push((i as f64 + 0.5 * DIRS[d].0 as f64, -(j as f64) + 0.5 * DIRS[d].1 as f64));
            let v = end_of(e);
            let candidates = out.get(&v).map(Vec::as_slice).unwrap_or(&[]);
            // left turn first, then straight, then right
            let next = [(d + 1) % 4, d, (d + 3) % 4]
                .iter()
                .find_map(|&nd| candidates.iter().copied().find(|&k| edges[k].1 == nd && !used[k]));
            match next {
                Some(k) => e = k,
                None => break,
            }
        }
        rings.push(ring);
    }
    let (best, _) = rings
        .iter()
        .enumerate()
        .map(|(k, r)| (k, ring_area(r)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one ring");
    let inner_loops = rings.len() - 1;
    let cell_vertices = rings.swap_remove(best);
    let b = mask.bbox;
    let (dx, dy) = mask.cell_size();
    let vertices = cell_vertices
        .iter()
        .map(|&(x, y)| Complex64::new(b.cx - b.half_width + x * dx, b.cy + b.half_height + y * dy))
        .collect();
    Ok(LoopPolyline {
        level: mask.level,
        vertices,
        cell_vertices,
        inner_loops,
    })
}
