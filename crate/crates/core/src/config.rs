//! `key = value` run configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::{iterate_function, make_builtin, make_random_signs, make_table_series, EntireFunction};
use crate::raster::grid::{validate_resolution, BBox};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionSpec {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    /// Coefficient table, one `n re [im]` per line.
    pub series_file: Option<PathBuf>,
    pub sign_seed: Option<u64>,
    pub iterate: u32,
}

impl FunctionSpec {
    pub fn named(name: &str) -> Self {
        FunctionSpec {
            name: name.to_string(),
            params: BTreeMap::new(),
            series_file: None,
            sign_seed: None,
            iterate: 1,
        }
    }

    pub fn build(&self) -> Result<EntireFunction> {
        let mut f = match &self.series_file {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                make_table_series(&self.name, parse_series_table(&text)?)
            }
            None => make_builtin(&self.name, &self.params)?,
        };
        if let Some(seed) = self.sign_seed {
            f = make_random_signs(&f, seed)?;
        }
        iterate_function(&f, self.iterate)
    }

    /// This function as config lines.
    pub fn to_config_lines(&self) -> String {
        let mut s = format!("function = {}\n", self.name);
        for (k, v) in &self.params {
            s.push_str(&format!("param.{k} = {v}\n"));
        }
        if let Some(p) = &self.series_file {
            s.push_str(&format!("series_file = {}\n", p.display()));
        }
        if let Some(seed) = self.sign_seed {
            s.push_str(&format!("sign_seed = {seed}\n"));
        }
        if self.iterate != 1 {
            s.push_str(&format!("iterate = {}\n", self.iterate));
        }
        s
    }
}

/// Parses `n re [im]` lines; `#` starts a comment.
pub fn parse_series_table(text: &str) -> Result<Vec<(u64, Complex64)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let err = |m: &str| Error::Config {
            line: i + 1,
            message: format!("series entry `{line}`: {m}"),
        };
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() < 2 || parts.len() > 3 {
            return Err(err("expected `n re [im]`"));
        }
        let n: u64 = parts[0].parse().map_err(|_| err("bad index"))?;
        let re: f64 = parts[1].parse().map_err(|_| err("bad real part"))?;
        let im: f64 = match parts.get(2) {
            Some(s) => s.parse().map_err(|_| err("bad imaginary part"))?,
            None => 0.0,
        };
        if !re.is_finite() || !im.is_finite() {
            return Err(err("coefficient must be finite"));
        }
        out.push((n, Complex64::new(re, im)));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertifyMethod {
    Disc,
    Regular,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub function: FunctionSpec,
    #[serde(rename = "R")]
    pub r: Option<f64>,
    pub search_max: f64,
    pub depth: usize,
    pub level_min: i32,
    pub level_max: i32,
    pub bbox: Option<BBox>,
    pub resolution: (usize, usize),
    pub samples: usize,
    pub seed: Option<u64>,
    pub supersample: bool,
    pub cert_depth: usize,
    pub method: CertifyMethod,
    pub m: f64,
    pub delta: f64,
    pub cert_samples: usize,
    pub oversample: usize,
    pub level: i32,
    pub n_max: u64,
    pub k_max: u64,
    pub alpha: f64,
    pub scan_points: usize,
    pub points_file: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    fn defaults(function: FunctionSpec) -> Self {
        RunConfig {
            function,
            r: None,
            search_max: 1e6,
            depth: 12,
            level_min: -8,
            level_max: 8,
            bbox: None,
            resolution: (512, 512),
            samples: crate::growth::ladder::DEFAULT_SAMPLES,
            seed: None,
            supersample: false,
            cert_depth: 3,
            method: CertifyMethod::Disc,
            m: 2.0,
            delta: crate::certify::DEFAULT_DELTA,
            cert_samples: crate::certify::DEFAULT_CERT_SAMPLES,
            oversample: 8,
            level: 0,
            n_max: 2000,
            k_max: 200,
            alpha: 3.0,
            scan_points: 32,
            points_file: None,
            output: None,
        }
    }

    pub fn l_range(&self) -> (i32, i32) {
        (self.level_min, self.level_max)
    }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

fn parse_f64(v: &str) -> std::result::Result<f64, String> {
    let x: f64 = v.parse().map_err(|_| format!("`{v}` is not a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("`{v}` is not finite"))
    }
}

fn positive(v: &str) -> std::result::Result<f64, String> {
    let x = parse_f64(v)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(format!("`{v}` must be positive"))
    }
}

fn count(v: &str, min: u64, max: u64) -> std::result::Result<u64, String> {
    let x: u64 = v.parse().map_err(|_| format!("`{v}` is not a non-negative integer"))?;
    if x < min || x > max {
        return Err(format!("{x} must be within {min}..={max}"));
    }
    Ok(x)
}

fn parse_bool(v: &str) -> std::result::Result<bool, String> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("`{v}` is not a boolean")),
    }
}

/// `cx cy hw hh` (commas allowed) or a single half extent centred at 0.
fn parse_bbox(v: &str) -> std::result::Result<BBox, String> {
    let nums: Vec<f64> = v
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(parse_f64)
        .collect::<std::result::Result<_, _>>()?;
    let b = match nums.as_slice() {
        [h] => BBox::centered(*h, *h),
        [cx, cy, hw, hh] => BBox {
            cx: *cx,
            cy: *cy,
            half_width: *hw,
            half_height: *hh,
        },
        _ => return Err("bbox takes `half` or `cx, cy, half_width, half_height`".into()),
    };
    b.validate().map_err(|e| e.to_string())?;
    Ok(b)
}

/// `512` or `640x480`.
fn parse_resolution(v: &str) -> std::result::Result<(usize, usize), String> {
    let parts: Vec<&str> = v.split('x').map(str::trim).collect();
    let side = |s: &str| s.parse::<usize>().map_err(|_| format!("`{v}` is not a resolution"));
    let res = match parts.as_slice() {
        [n] => (side(n)?, side(n)?),
        [w, h] => (side(w)?, side(h)?),
        _ => return Err(format!("`{v}` is not a resolution")),
    };
    validate_resolution(res.0, res.1).map_err(|e| e.to_string())?;
    Ok(res)
}

/// Parses a configuration. Later keys override earlier ones; the function
/// is checked as soon as the whole text is read.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::defaults(FunctionSpec::named(""));
    let mut function_line = None;
    let mut params_line = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let fail = |message: String| Error::Config { line: line_no, message };
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| fail(format!("expected `key = value`, got `{line}`")))?;
        if value.is_empty() {
            return Err(fail(format!("`{key}` has no value")));
        }
        let res: std::result::Result<(), String> = (|| {
            match key {
                "function" => {
                    cfg.function.name = value.to_string();
                    function_line = Some(line_no);
                }
                "series_file" => cfg.function.series_file = Some(PathBuf::from(value)),
                "sign_seed" => cfg.function.sign_seed = Some(count(value, 0, u64::MAX)?),
                "iterate" => cfg.function.iterate = count(value, 1, 64)? as u32,
                "R" => cfg.r = Some(positive(value)?),
                "search_max" => cfg.search_max = positive(value)?,
                "depth" => cfg.depth = count(value, 1, 64)? as usize,
                "level_min" | "level_max" => {
                    let l: i32 = value.parse().map_err(|_| format!("`{value}` is not an integer"))?;
                    if !(-64..=64).contains(&l) {
                        return Err(format!("{l} must be within -64..=64"));
                    }
                    if key == "level_min" {
                        cfg.level_min = l;
                    } else {
                        cfg.level_max = l;
                    }
                }
                "bbox" => cfg.bbox = Some(parse_bbox(value)?),
                "resolution" => cfg.resolution = parse_resolution(value)?,
                "samples" => cfg.samples = count(value, 16, 1 << 20)? as usize,
                "seed" => cfg.seed = Some(count(value, 0, u64::MAX)?),
                "supersample" => cfg.supersample = parse_bool(value)?,
                "cert_depth" => cfg.cert_depth = count(value, 1, 32)? as usize,
                "method" => {
                    cfg.method = match value {
                        "disc" => CertifyMethod::Disc,
                        "regular" => CertifyMethod::Regular,
                        _ => return Err(format!("method `{value}` is not `disc` or `regular`")),
                    }
                }
                "m" => {
                    let m = parse_f64(value)?;
                    if !(m > 1.0) {
                        return Err(format!("m = {m} must exceed 1"));
                    }
                    cfg.m = m;
                }
                "delta" => {
                    let d = positive(value)?;
                    if d >= 1.0 {
                        return Err(format!("delta = {d} must be below 1"));
                    }
                    cfg.delta = d;
                }
                "cert_samples" => cfg.cert_samples = count(value, 16, 1 << 20)? as usize,
                "oversample" => cfg.oversample = count(value, 1, 64)? as usize,
                "level" => cfg.level = value.parse().map_err(|_| format!("`{value}` is not an integer"))?,
                "n_max" => cfg.n_max = count(value, 16, 1 << 22)?,
                "k_max" => cfg.k_max = count(value, 16, 1 << 16)?,
                "alpha" => {
                    let a = parse_f64(value)?;
                    if !(a > 2.0) {
                        return Err(format!("alpha = {a} must exceed 2"));
                    }
                    cfg.alpha = a;
                }
                "scan_points" => cfg.scan_points = count(value, 16, 1 << 16)? as usize,
                "points_file" => cfg.points_file = Some(PathBuf::from(value)),
                "output" => cfg.output = Some(PathBuf::from(value)),
                _ => match key.strip_prefix("param.") {
                    Some(p) if !p.is_empty() => {
                        cfg.function.params.insert(p.to_string(), parse_f64(value)?);
                        params_line.insert(p.to_string(), line_no);
                    }
                    _ => return Err(format!("unknown key `{key}`")),
                },
            }
            Ok(())
        })();
        res.map_err(fail)?;
    }
    let end = text.lines().count() + 1;
    let Some(fline) = function_line else {
        return Err(Error::Config {
            line: end,
            message: "missing `function`".into(),
        });
    };
    if cfg.level_min > cfg.level_max {
        return Err(Error::Config {
            line: end,
            message: format!("level_min {} exceeds level_max {}", cfg.level_min, cfg.level_max),
        });
    }
    if cfg.function.series_file.is_none() {
        if let Err(e) = make_builtin(&cfg.function.name, &cfg.function.params) {
            let line = match &e {
                Error::InvalidParameter(_) => params_line.values().copied().max().unwrap_or(fline),
                _ => fline,
            };
            return Err(Error::Config {
                line,
                message: e.to_string(),
            });
        }
    }
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    parse_config(&std::fs::read_to_string(path)?)
}
