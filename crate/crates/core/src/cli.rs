//! Command-line front end.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use crate::certify::{certify_disc_sequence, certify_regular_growth, verify_certificate, WebCertificate};
use crate::config::{parse_config, CertifyMethod, RunConfig};
use crate::error::{Error, Result};
use crate::escape::classify_points;
use crate::function::EntireFunction;
use crate::growth::ladder::{build_ladder, find_min_R, ThresholdLadder};
use crate::growth::report::{analyze, AnalysisOptions};
use crate::raster::image::write_atomic;
use crate::raster::{
    classify_grid, component_diagnostics, extract_hole, extract_loop, write_level_image, write_mask_image,
    GridMetadata, LevelGrid, Palette,
};

#[derive(Parser, Debug)]
#[command(
    name = "fastescape",
    version,
    about = "Levels of the fast escaping set of entire functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Growth report: ladder, order, gap verdicts and regularity scans.
    Analyze(Common),
    /// Largest level of each point read from `points_file` or stdin.
    Classify(Common),
    /// Spider's-web certificate.
    Certify(Common),
    /// Level image (PPM) of a window.
    Render(Common),
    /// Fundamental hole mask (PGM) and its loop.
    Loops(Common),
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    function: Option<String>,
    #[arg(long = "R")]
    r: Option<String>,
    #[arg(long)]
    depth: Option<String>,
    #[arg(long)]
    bbox: Option<String>,
    #[arg(long)]
    resolution: Option<String>,
    #[arg(long)]
    level: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Any config key, as `key=value`; may repeat.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Common {
    /// Config text with the overrides appended, so they win.
    fn config_text(&self) -> Result<String> {
        let mut text = std::fs::read_to_string(&self.config).map_err(|e| Error::Config {
            line: 0,
            message: format!("cannot read {}: {e}", self.config.display()),
        })?;
        if !text.is_empty() && !text.ends_with('\n') {
            text.push('\n');
        }
        let named = [
            ("function", &self.function),
            ("R", &self.r),
            ("depth", &self.depth),
            ("bbox", &self.bbox),
            ("resolution", &self.resolution),
            ("level", &self.level),
        ];
        for (k, v) in named {
            if let Some(v) = v {
                text.push_str(&format!("{k} = {v}\n"));
            }
        }
        if let Some(o) = &self.output {
            text.push_str(&format!("output = {}\n", o.display()));
        }
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| Error::Config {
                line: 0,
                message: format!("--set expects key=value, got `{kv}`"),
            })?;
            text.push_str(&format!("{} = {}\n", k.trim(), v.trim()));
        }
        Ok(text)
    }
}

#[derive(Serialize)]
struct Metadata<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a str,
    outputs: Vec<String>,
    elapsed_seconds: f64,
}

/// Invalid input maps to 2, everything else to 1.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) | Error::Json(_) | Error::Evaluation(_) | Error::UnrepresentableMagnitude => 1,
        _ => 2,
    }
}

/// Runs the tool on `argv` (including the program name) and returns the exit code.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    let start = Instant::now();
    let (name, common) = match &cmd {
        Command::Analyze(c) => ("analyze", c),
        Command::Classify(c) => ("classify", c),
        Command::Certify(c) => ("certify", c),
        Command::Render(c) => ("render", c),
        Command::Loops(c) => ("loops", c),
    };
    let text = common.config_text()?;
    let cfg = parse_config(&text)?;
    let f = cfg.function.build()?;
    let outputs = match cmd {
        Command::Analyze(_) => cmd_analyze(&f, &cfg)?,
        Command::Classify(_) => cmd_classify(&f, &cfg)?,
        Command::Certify(_) => cmd_certify(&f, &cfg)?,
        Command::Render(_) => cmd_render(&f, &cfg)?,
        Command::Loops(_) => cmd_loops(&f, &cfg)?,
    };
    let meta = Metadata {
        tool: "fastescape",
        version: env!("CARGO_PKG_VERSION"),
        command: name,
        config: &text,
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
        elapsed_seconds: start.elapsed().as_secs_f64(),
    };
    match &cfg.output {
        Some(out) => crate::raster::image::write_sidecar(&meta, &suffixed(out, ".meta.json"))?,
        None => eprintln!("{}", serde_json::to_string(&meta)?),
    }
    Ok(())
}

fn suffixed(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn resolve_r(f: &EntireFunction, cfg: &RunConfig) -> Result<f64> {
    match cfg.r {
        Some(r) => Ok(r),
        None => find_min_R(f, cfg.search_max, cfg.samples),
    }
}

fn level_ladder(f: &EntireFunction, cfg: &RunConfig) -> Result<ThresholdLadder> {
    let r = resolve_r(f, cfg)?;
    let need = cfg.depth as i64 + cfg.level_max.max(0) as i64;
    build_ladder(f, r, need as usize, cfg.samples)
}

/// Data to `output` when set, otherwise to stdout.
fn emit(cfg: &RunConfig, data: &str) -> Result<Vec<PathBuf>> {
    match &cfg.output {
        Some(p) => {
            write_atomic(p, data.as_bytes())?;
            Ok(vec![p.clone()])
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(data.as_bytes())?;
            Ok(vec![])
        }
    }
}

fn cmd_analyze(f: &EntireFunction, cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let opts = AnalysisOptions {
        r: cfg.r,
        search_max: cfg.search_max,
        n_max: cfg.n_max,
        k_max: cfg.k_max,
        alpha: cfg.alpha,
        points: cfg.scan_points,
        samples: cfg.samples,
        ..AnalysisOptions::default()
    };
    let report = analyze(f, &opts)?;
    match &cfg.output {
        Some(p) => {
            let mut s = serde_json::to_string_pretty(&report)?;
            s.push('\n');
            write_atomic(p, s.as_bytes())?;
            print!("{}", report.to_text());
            Ok(vec![p.clone()])
        }
        None => emit(cfg, &report.to_text()),
    }
}

fn parse_point(line: &str, line_no: usize) -> Result<Option<Complex64>> {
    let line = line.split('#').next().unwrap_or("").trim();
    if line.is_empty() {
        return Ok(None);
    }
    let nums: Vec<f64> = line
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Config {
            line: line_no,
            message: format!("point `{line}` is not `re im`"),
        })?;
    match nums.as_slice() {
        [re, im] if re.is_finite() && im.is_finite() => Ok(Some(Complex64::new(*re, *im))),
        _ => Err(Error::Config {
            line: line_no,
            message: format!("point `{line}` is not `re im`"),
        }),
    }
}

fn read_points(cfg: &RunConfig) -> Result<Vec<Complex64>> {
    let lines: Vec<String> = match &cfg.points_file {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| Error::Config {
                line: 0,
                message: format!("cannot read {}: {e}", p.display()),
            })?
            .lines()
            .map(str::to_string)
            .collect(),
        None => std::io::stdin().lock().lines().collect::<std::io::Result<_>>()?,
    };
    let mut pts = Vec::new();
    for (i, l) in lines.iter().enumerate() {
        if let Some(z) = parse_point(l, i + 1)? {
            pts.push(z);
        }
    }
    Ok(pts)
}

fn cmd_classify(f: &EntireFunction, cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let points = read_points(cfg)?;
    let ladder = level_ladder(f, cfg)?;
    let verdicts = classify_points(f, &ladder, &points, cfg.depth, cfg.l_range())?;
    let mut s = String::new();
    for (z, v) in points.iter().zip(&verdicts) {
        let level = v.level.map_or("none".to_string(), |l| l.to_string());
        s.push_str(&format!(
            "{} {} {} {} {}\n",
            z.re, z.im, level, v.depth, v.indeterminate
        ));
    }
    emit(cfg, &s)
}

#[derive(Serialize)]
struct CertReport<'a> {
    #[serde(flatten)]
    certificate: &'a WebCertificate,
    /// Re-check of a certified chain with oversampled circles.
    verified: Option<bool>,
    oversample: usize,
}

fn cmd_certify(f: &EntireFunction, cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let r = resolve_r(f, cfg)?;
    let cert = match cfg.method {
        CertifyMethod::Disc => certify_disc_sequence(f, r, cfg.cert_depth, cfg.cert_samples, cfg.delta)?,
        CertifyMethod::Regular => certify_regular_growth(f, r, cfg.m, cfg.cert_depth, cfg.cert_samples, cfg.delta)?,
    };
    let verified = cert
        .is_certified()
        .then(|| verify_certificate(f, &cert, cfg.oversample));
    eprint!("{}", cert.summary());
    let report = CertReport {
        certificate: &cert,
        verified,
        oversample: cfg.oversample,
    };
    let mut s = serde_json::to_string_pretty(&report)?;
    s.push('\n');
    emit(cfg, &s)
}

fn grid_for(f: &EntireFunction, cfg: &RunConfig) -> Result<LevelGrid> {
    let bbox = cfg
        .bbox
        .ok_or_else(|| Error::InvalidGrid("`bbox` is required".into()))?;
    let ladder = level_ladder(f, cfg)?;
    classify_grid(
        f,
        &ladder,
        bbox,
        cfg.resolution,
        cfg.depth,
        cfg.l_range(),
        cfg.supersample,
    )
}

fn metadata(cfg: &RunConfig, grid: &LevelGrid) -> GridMetadata {
    GridMetadata {
        function: cfg.function.name.clone(),
        params: cfg.function.params.clone(),
        bbox: grid.bbox,
        resolution: (grid.width, grid.height),
        depth: grid.depth,
        r: grid.r,
        l_range: grid.l_range,
        seed: cfg.seed.or(cfg.function.sign_seed),
        supersample: grid.supersample,
    }
}

fn cmd_render(f: &EntireFunction, cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let out = cfg
        .output
        .clone()
        .ok_or_else(|| Error::InvalidParameter("render needs `output`".into()))?;
    let grid = grid_for(f, cfg)?;
    write_level_image(&grid, &Palette::for_grid(&grid), &out)?;
    let side = suffixed(&out, ".json");
    crate::raster::image::write_sidecar(&metadata(cfg, &grid), &side)?;
    for c in component_diagnostics(&grid) {
        let frac = c.fraction_touching_edge.map_or("n/a".to_string(), crate::fmt::sig9);
        println!(
            "level {}: cells {} components {} touching_edge {}",
            c.level, c.cells, c.components, frac
        );
    }
    Ok(vec![out, side])
}

#[derive(Serialize)]
struct LoopReport {
    level: i32,
    hole_cells: usize,
    bounded_in_window: bool,
    loop_vertices: Option<Vec<(f64, f64)>>,
    loop_length: Option<f64>,
}

fn cmd_loops(f: &EntireFunction, cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let out = cfg
        .output
        .clone()
        .ok_or_else(|| Error::InvalidParameter("loops needs `output`".into()))?;
    let grid = grid_for(f, cfg)?;
    let hole = extract_hole(&grid, cfg.level)?;
    let lp = if hole.bounded_in_window {
        Some(extract_loop(&hole)?)
    } else {
        None
    };
    write_mask_image(&hole, &out)?;
    let report = LoopReport {
        level: cfg.level,
        hole_cells: hole.count(),
        bounded_in_window: hole.bounded_in_window,
        loop_length: lp.as_ref().map(|l| l.length()),
        loop_vertices: lp.map(|l| l.vertices.iter().map(|z| (z.re, z.im)).collect()),
    };
    let side = suffixed(&out, ".loop.json");
    crate::raster::image::write_sidecar(&report, &side)?;
    println!(
        "level {}: hole cells {} bounded_in_window {}",
        report.level, report.hole_cells, report.bounded_in_window
    );
    Ok(vec![out, side])
}
