use serde::Serialize;

use crate::raster::grid::LevelGrid;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelComponents {
    pub level: i32,
    pub cells: usize,
    pub components: usize,
    pub touching_edge: usize,
    /// `None` when the level set is empty.
    pub fraction_touching_edge: Option<f64>,
}

/// 8-connected components of `{level >= L}` for each `L` in the grid range.
/// Diagnostic only: the window edge cuts components.
pub fn component_diagnostics(grid: &LevelGrid) -> Vec<LevelComponents> {
    (grid.l_range.0..=grid.l_range.1)
        .map(|l| label_level(grid, l))
        .collect()
}

fn label_level(grid: &LevelGrid, l: i32) -> LevelComponents {
    let (w, h) = (grid.width, grid.height);
    let member: Vec<bool> = grid.cells.iter().map(|c| c.level.is_some_and(|v| v >= l)).collect();
    let mut seen = vec![false; w * h];
    let mut components = 0;
    let mut touching_edge = 0;
    let mut stack = Vec::new();
    for start in 0..w * h {
        if !member[start] || seen[start] {
            continue;
        }
        components += 1;
        let mut edge = false;
        seen[start] = true;
        stack.push(start);
        while let Some(i) = stack.pop() {
            let (c, r) = ((i % w) as i64, (i / w) as i64);
            edge |= c == 0 || r == 0 || c == w as i64 - 1 || r == h as i64 - 1;
            for dr in -1..=1 {
                for dc in -1..=1 {
                    let (nc, nr) = (c + dc, r + dr);
                    if nc < 0 || nr < 0 || nc >= w as i64 || nr >= h as i64 {
                        continue;
                    }
                    let j = nr as usize * w + nc as usize;
                    if member[j] && !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        if edge {
            touching_edge += 1;
        }
    }
    LevelComponents {
        level: l,
        cells: member.iter().filter(|&&b| b).count(),
        components,
        touching_edge,
        fraction_touching_edge: (components > 0).then(|| touching_edge as f64 / components as f64),
    }
}
