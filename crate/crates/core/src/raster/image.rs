use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::raster::grid::{BBox, LevelGrid};
use crate::raster::hole::HoleMask;

/// Grey ramp over a level range; `None` is white, the highest level black.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Palette {
    pub lo: i32,
    pub hi: i32,
}

impl Palette {
    pub fn for_grid(grid: &LevelGrid) -> Self {
        Palette {
            lo: grid.l_range.0,
            hi: grid.l_range.1,
        }
    }

    pub fn color(&self, level: Option<i32>) -> [u8; 3] {
        let Some(l) = level else {
            return [255; 3];
        };
        let l = l.clamp(self.lo, self.hi);
        let steps = (self.hi - self.lo) as f64;
        let g = if steps == 0.0 {
            0.0
        } else {
            220.0 * (self.hi - l) as f64 / steps
        };
        [g.round() as u8; 3]
    }
}

pub fn encode_pgm(mask: &HoleMask) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", mask.width, mask.height).into_bytes();
    out.extend(mask.mask.iter().map(|&b| if b { 255u8 } else { 0 }));
    out
}

pub fn encode_ppm(grid: &LevelGrid, palette: &Palette) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", grid.width, grid.height).into_bytes();
    for c in &grid.cells {
        out.extend_from_slice(&palette.color(c.level));
    }
    out
}

/// Writes through a sibling temporary file and a rename, so a failed run
/// leaves no partial file at `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp{}", std::process::id()));
    let res = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if res.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(res?)
}

pub fn write_mask_image(mask: &HoleMask, path: &Path) -> Result<()> {
    write_atomic(path, &encode_pgm(mask))
}

pub fn write_level_image(grid: &LevelGrid, palette: &Palette, path: &Path) -> Result<()> {
    write_atomic(path, &encode_ppm(grid, palette))
}

/// JSON sidecar describing a rendered grid.
#[derive(Clone, Debug, Serialize)]
pub struct GridMetadata {
    pub function: String,
    pub params: std::collections::BTreeMap<String, f64>,
    pub bbox: BBox,
    pub resolution: (usize, usize),
    pub depth: usize,
    #[serde(rename = "R")]
    pub r: f64,
    pub l_range: (i32, i32),
    pub seed: Option<u64>,
    pub supersample: bool,
}

pub fn write_sidecar<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}
