use std::collections::BTreeMap;
use std::sync::OnceLock;

use fastescape::escape::level_membership;
use fastescape::growth::ladder::{build_ladder, find_min_R, ThresholdLadder};
use fastescape::growth::modulus::{max_modulus, min_modulus, series_sup_term};
use fastescape::magnitude::LN_THRESHOLD;
use fastescape::raster::{encode_pgm, extract_hole, extract_loop, BBox, Cell, Geometry, LevelGrid};
use fastescape::{iterate_function, make_builtin, Complex64, EntireFunction, Magnitude};
use proptest::prelude::*;

const NAMES: [&str; 4] = ["exp", "cosh_sq", "quarter_order", "sinh_plus_sq"];
const DEPTH: usize = 10;

struct Setup {
    f: EntireFunction,
    r: f64,
    ladder: ThresholdLadder,
    ladder_hi: ThresholdLadder,
    f2: EntireFunction,
    ladder2: ThresholdLadder,
}

fn setups() -> &'static Vec<Setup> {
    static CELL: OnceLock<Vec<Setup>> = OnceLock::new();
    CELL.get_or_init(|| {
        NAMES
            .iter()
            .map(|name| {
                let f = make_builtin(name, &BTreeMap::new()).unwrap();
                let r = if *name == "quarter_order" {
                    find_min_R(&f, 1e6, 256).unwrap()
                } else {
                    1.0
                };
                let f2 = iterate_function(&f, 2).unwrap();
                Setup {
                    ladder: build_ladder(&f, r, 2 * DEPTH + 4, 256).unwrap(),
                    ladder_hi: build_ladder(&f, 1.5 * r, DEPTH + 4, 256).unwrap(),
                    ladder2: build_ladder(&f2, r, DEPTH / 2 + 4, 256).unwrap(),
                    f,
                    r,
                    f2,
                }
            })
            .collect()
    })
}

fn member(f: &EntireFunction, ladder: &ThresholdLadder, l: i32, z: Complex64, n: usize) -> bool {
    level_membership(f, ladder, l, z, n).unwrap().member
}

/// Points in a box sized to each function's threshold `R`.
fn point(which: usize, u: f64, v: f64) -> Complex64 {
    let h = if NAMES[which] == "quarter_order" { 3e4 } else { 4.0 };
    Complex64::new(h * u, h * v)
}

/// `ln ln x` of the denoted value, finite for canonical forms above e.
fn lnln(m: &Magnitude) -> f64 {
    match m.tower_depth() {
        0 => m.mantissa().ln().ln(),
        1 => m.mantissa().ln(),
        2 => m.mantissa(),
        _ => f64::INFINITY,
    }
}

fn canonical() -> impl Strategy<Value = Magnitude> {
    prop_oneof![
        (3.0f64..1e300).prop_map(|v| Magnitude::normalize(0, v).unwrap()),
        (LN_THRESHOLD..1e300).prop_map(|v| Magnitude::normalize(1, v).unwrap()),
        (LN_THRESHOLD..1e300).prop_map(|v| Magnitude::normalize(2, v).unwrap()),
        (1.0f64..700.0).prop_map(|v| Magnitude::from_ln(v).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn magnitude_order_matches_denoted_values(a in canonical(), b in canonical()) {
        let (x, y) = (lnln(&a), lnln(&b));
        if x < y * (1.0 - 1e-12) {
            prop_assert!(a < b);
        } else if y < x * (1.0 - 1e-12) {
            prop_assert!(b < a);
        }
    }

    #[test]
    fn normalize_preserves_value(v in 0.0f64..LN_THRESHOLD) {
        let m = Magnitude::normalize(1, v).unwrap();
        prop_assert_eq!(m.tower_depth(), 0);
        prop_assert!((m.mantissa() - v.exp()).abs() <= 1e-12 * v.exp());
    }

    #[test]
    fn level_properties(which in 0usize..4, u in -1.0f64..1.0, v in -1.0f64..1.0, l in -2i32..=2) {
        let s = &setups()[which];
        let z = point(which, u, v);
        let m = member(&s.f, &s.ladder, l, z, DEPTH);
        if m {
            prop_assert!(member(&s.f, &s.ladder, l - 1, z, DEPTH), "nesting");
            if let Ok(fz) = s.f.evaluate(z) {
                if fz.norm() < 1e300 {
                    prop_assert!(member(&s.f, &s.ladder, l + 1, fz, DEPTH - 1), "shift");
                }
            }
        }
        if member(&s.f, &s.ladder, l, z, DEPTH + 1) {
            prop_assert!(m, "depth antitonicity");
        }
        if member(&s.f, &s.ladder_hi, l, z, DEPTH) {
            prop_assert!(m, "radius monotonicity");
        }
        if member(&s.f, &s.ladder, 2 * l, z, DEPTH) {
            prop_assert!(member(&s.f2, &s.ladder2, l, z, DEPTH / 2), "iterate containment");
        }
    }

    #[test]
    fn moduli_are_ordered(which in 0usize..4, t in 0.0f64..1.0) {
        let s = &setups()[which];
        let r = s.r * 10f64.powf(2.0 * t) * 0.1;
        let hi = max_modulus(&s.f, r, 128).unwrap().value;
        let lo = min_modulus(&s.f, r, 128).unwrap().value;
        prop_assert!(lo <= hi);
        let (mu, _) = series_sup_term(&s.f, r).unwrap();
        prop_assert!(mu.to_f64().unwrap() <= hi.to_f64().unwrap() * (1.0 + 1e-9));
    }

    #[test]
    fn ladders_grow_with_r(which in 0usize..4, k in 1.0f64..3.0) {
        let s = &setups()[which];
        let a = build_ladder(&s.f, s.r, 4, 256).unwrap();
        let b = build_ladder(&s.f, s.r * k, 4, 256).unwrap();
        prop_assert!(a.rungs.windows(2).all(|w| w[1] > w[0]));
        for (x, y) in a.rungs.iter().zip(&b.rungs) {
            prop_assert!(y >= x);
        }
    }
}

fn blob_grid(bits: &[bool], side: usize) -> LevelGrid {
    // a one-cell frame of level 0 keeps the hole inside the window
    let mut cells = Vec::with_capacity(side * side);
    for row in 0..side {
        for col in 0..side {
            let frame = row == 0 || col == 0 || row == side - 1 || col == side - 1;
            let level = if frame || !bits[(row - 1) * (side - 2) + col - 1] {
                Some(0)
            } else {
                None
            };
            cells.push(Cell {
                level,
                indeterminate: false,
            });
        }
    }
    let mut g = LevelGrid {
        bbox: BBox::centered(side as f64, side as f64),
        width: side,
        height: side,
        depth: 1,
        l_range: (-1, 1),
        r: 1.0,
        supersample: false,
        cells,
    };
    let (c, r) = g.origin_cell();
    g.cells[r * side + c].level = None;
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hole_loops_are_closed_and_counterclockwise(bits in proptest::collection::vec(any::<bool>(), 100)) {
        let side = 12;
        let g = blob_grid(&bits, side);
        let hole = extract_hole(&g, 0).unwrap();
        prop_assert!(hole.bounded_in_window);
        let (c, r) = g.origin_cell();
        prop_assert!(hole.get(c, r));
        let lp = extract_loop(&hole).unwrap();
        prop_assert!(lp.cell_area() > 0.0);
        let inside = |x: i64, y: i64| x >= 0 && y >= 0 && (x as usize) < side && (y as usize) < side && hole.get(x as usize, y as usize);
        let pts = &lp.cell_vertices;
        for (i, &(x, y)) in pts.iter().enumerate() {
            // every vertex is a midpoint between an inside and an outside centre
            let (col, row) = (x - 0.5, -y - 0.5);
            let (a, b) = if col.fract() == 0.0 {
                ((col as i64, row.floor() as i64), (col as i64, row.ceil() as i64))
            } else {
                ((col.floor() as i64, row as i64), (col.ceil() as i64, row as i64))
            };
            prop_assert!(inside(a.0, a.1) != inside(b.0, b.1));
            // consecutive vertices are at most one cell apart, including the closing step
            let (nx, ny) = pts[(i + 1) % pts.len()];
            prop_assert!((nx - x).abs() <= 1.0 && (ny - y).abs() <= 1.0);
        }
        // the whole mask is one 4-connected piece grown from the origin cell
        let count = hole.count();
        let pgm = encode_pgm(&hole);
        prop_assert_eq!(pgm.len(), format!("P5\n{side} {side}\n255\n").len() + side * side);
        prop_assert_eq!(pgm.iter().rev().take(side * side).filter(|&&b| b == 255).count(), count);
    }

    #[test]
    fn holes_nest(bits in proptest::collection::vec(0i32..3, 100)) {
        let side = 12;
        let mut g = blob_grid(&[true; 100], side);
        for row in 1..side - 1 {
            for col in 1..side - 1 {
                g.cells[row * side + col].level = Some(bits[(row - 1) * (side - 2) + col - 1] - 1);
            }
        }
        let (c, r) = g.origin_cell();
        g.cells[r * side + c].level = None;
        for cell in g.cells.iter_mut() {
            if cell.level == Some(0) {
                cell.level = Some(1);
            }
        }
        let masks: Vec<_> = (-1..=1).map(|n| extract_hole(&g, n).unwrap()).collect();
        prop_assert!(masks[0].is_subset_of(&masks[1]));
        prop_assert!(masks[1].is_subset_of(&masks[2]));
    }
}
