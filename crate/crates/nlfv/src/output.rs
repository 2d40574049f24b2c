//! File output: snapshot CSVs (17 significant digits), SVG line plots, PGM
//! heatmaps, rate/diagnostics tables, and the run manifest with content
//! digests.

use crate::diagnostics::DiagnosticsReport;
use crate::error::Result;
use crate::grid::{Field, Field2d};
use crate::harness::{ConvergenceTable, EtaRow};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

/// Shortest round-trip decimal representation (locale-independent).
pub fn fmt_shortest(x: f64) -> String {
    format!("{x}")
}

/// 17 significant digits; enough to reproduce any f64 exactly.
pub fn fmt_full(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_snapshot_csv_1d(path: &Path, field: &Field) -> Result<()> {
    let mut s = String::with_capacity(field.values.len() * 48 + 16);
    s.push_str("x,u\n");
    for (i, u) in field.values.iter().enumerate() {
        s.push_str(&fmt_full(field.grid.cell_center(i)));
        s.push(',');
        s.push_str(&fmt_full(*u));
        s.push('\n');
    }
    fs::write(path, s)?;
    Ok(())
}

pub fn write_snapshot_csv_2d(path: &Path, field: &Field2d) -> Result<()> {
    let mut s = String::with_capacity(field.values.len() * 64 + 16);
    s.push_str("x,y,u\n");
    for j in 0..field.grid.ny {
        for i in 0..field.grid.nx {
            let (x, y) = field.grid.cell_center(i, j);
            s.push_str(&fmt_full(x));
            s.push(',');
            s.push_str(&fmt_full(y));
            s.push(',');
            s.push_str(&fmt_full(field.at(i, j)));
            s.push('\n');
        }
    }
    fs::write(path, s)?;
    Ok(())
}

/// 8-bit grayscale PGM (P5): u mapped linearly from [0, max(1, max u)] to
/// [255, 0] (dense is dark). The top image row is the largest y.
pub fn write_pgm(path: &Path, field: &Field2d) -> Result<()> {
    let (nx, ny) = (field.grid.nx, field.grid.ny);
    let denom = field
        .values
        .iter()
        .cloned()
        .fold(1.0f64, f64::max);
    let mut bytes = Vec::with_capacity(nx * ny + 32);
    bytes.extend_from_slice(format!("P5\n{nx} {ny}\n255\n").as_bytes());
    for j in (0..ny).rev() {
        for i in 0..nx {
            let u = field.at(i, j).clamp(0.0, denom);
            let pixel = 255.0 - 255.0 * u / denom;
            bytes.push(pixel.round().clamp(0.0, 255.0) as u8);
        }
    }
    fs::write(path, bytes)?;
    Ok(())
}

/// Minimal SVG polyline of cell-center values with min/max axis labels.
/// Presentation only; never parsed back.
pub fn write_svg_1d(path: &Path, field: &Field) -> Result<()> {
    let (w, h, ml, mb) = (800.0, 400.0, 50.0, 30.0);
    let umin = field.values.iter().cloned().fold(f64::INFINITY, f64::min);
    let umax = field.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if (umax - umin).abs() < 1e-300 {
        (umin - 1.0, umax + 1.0)
    } else {
        let pad = 0.05 * (umax - umin);
        (umin - pad, umax + pad)
    };
    let g = field.grid;
    let px = |x: f64| ml + (x - g.x_min) / (g.x_max - g.x_min) * (w - ml - 10.0);
    let py = |u: f64| (h - mb) - (u - lo) / (hi - lo) * (h - mb - 10.0);
    let mut pts = String::new();
    for (i, u) in field.values.iter().enumerate() {
        pts.push_str(&format!("{:.2},{:.2} ", px(g.cell_center(i)), py(*u)));
    }
    let svg = format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" ",
            "viewBox=\"0 0 {w} {h}\">\n",
            "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n",
            "<line x1=\"{ml}\" y1=\"{y0}\" x2=\"{xr}\" y2=\"{y0}\" stroke=\"black\"/>\n",
            "<line x1=\"{ml}\" y1=\"{y0}\" x2=\"{ml}\" y2=\"10\" stroke=\"black\"/>\n",
            "<text x=\"{ml}\" y=\"{yt}\" font-size=\"12\">{xmin}</text>\n",
            "<text x=\"{xr}\" y=\"{yt}\" font-size=\"12\" text-anchor=\"end\">{xmax}</text>\n",
            "<text x=\"4\" y=\"{y0}\" font-size=\"12\">{lo}</text>\n",
            "<text x=\"4\" y=\"16\" font-size=\"12\">{hi}</text>\n",
            "<text x=\"{xr}\" y=\"16\" font-size=\"12\" text-anchor=\"end\">t = {t}</text>\n",
            "<polyline points=\"{pts}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\"/>\n",
            "</svg>\n"
        ),
        w = w,
        h = h,
        ml = ml,
        y0 = h - mb,
        xr = w - 10.0,
        yt = h - 8.0,
        xmin = fmt_shortest(g.x_min),
        xmax = fmt_shortest(g.x_max),
        lo = format!("{lo:.3}"),
        hi = format!("{hi:.3}"),
        t = format!("{:.6}", field.time),
        pts = pts
    );
    fs::write(path, svg)?;
    Ok(())
}

/// `dx,l1_distance,alpha` rows; alpha is blank on the last row.
pub fn write_rate_csv(path: &Path, table: &ConvergenceTable) -> Result<()> {
    let mut s = String::from("dx,l1_distance,alpha\n");
    for r in &table.rows {
        s.push_str(&fmt_shortest(r.dx));
        s.push(',');
        s.push_str(&fmt_shortest(r.l1_distance));
        s.push(',');
        if let Some(a) = r.alpha {
            s.push_str(&fmt_shortest(a));
        }
        s.push('\n');
    }
    fs::write(path, s)?;
    Ok(())
}

pub fn write_eta_csv(path: &Path, rows: &[EtaRow]) -> Result<()> {
    let mut s = String::from("eta,l1_distance_to_local\n");
    for r in rows {
        s.push_str(&fmt_shortest(r.eta));
        s.push(',');
        s.push_str(&fmt_shortest(r.l1_distance_to_local));
        s.push('\n');
    }
    fs::write(path, s)?;
    Ok(())
}

/// One row per recorded step.
pub fn write_diagnostics_csv(path: &Path, report: &DiagnosticsReport) -> Result<()> {
    let mut s = String::from("step,time,mass,min,max,tv,l1_rate,entropy_residual\n");
    for r in &report.records {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.step,
            fmt_shortest(r.time),
            fmt_shortest(r.mass),
            fmt_shortest(r.min),
            fmt_shortest(r.max),
            fmt_shortest(r.tv),
            r.l1_rate.map(fmt_shortest).unwrap_or_default(),
            r.entropy_residual.map(fmt_shortest).unwrap_or_default(),
        ));
    }
    fs::write(path, s)?;
    Ok(())
}

/// JSON summary with the final verdicts.
pub fn diagnostics_summary_json(report: &DiagnosticsReport) -> serde_json::Value {
    let v = report.verdicts();
    let verdict = |ok: bool| if ok { "pass" } else { "fail" };
    serde_json::json!({
        "steps": report.records.last().map(|r| r.step).unwrap_or(0),
        "initial_mass": report.initial_mass,
        "mass_drift_rel_max": report.mass_drift_rel_max,
        "min": report.min_overall,
        "max": report.max_overall,
        "tv_initial": report.tv_initial,
        "tv_max": report.tv_max,
        "entropy_residual_max": if report.entropy_argmax.is_some() { Some(report.entropy_max) } else { None },
        "time_modulus": report.time_modulus,
        "cfl": {
            "lambda_configured": report.lambda_configured,
            "lambda_effective": report.lambda_effective,
            "lambda_bound": report.lambda_bound,
            "satisfied": report.cfl_satisfied(),
        },
        "warnings": report.warnings,
        "verdicts": {
            "mass_conservation": verdict(v.mass_ok),
            "positivity": verdict(v.positivity_ok),
            "max_principle": verdict(v.max_ok),
            "entropy_inequality": if v.entropy_checked { verdict(v.entropy_ok) } else { "not-checked" },
            "all": verdict(v.all_ok()),
        },
    })
}

pub fn write_diagnostics_summary(path: &Path, report: &DiagnosticsReport) -> Result<()> {
    let json = diagnostics_summary_json(report);
    fs::write(path, serde_json::to_string_pretty(&json).unwrap() + "\n")?;
    Ok(())
}

#[derive(Serialize)]
pub struct ManifestFile {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: Vec<(String, String)>,
    /// (phase name, seconds)
    pub phases: Vec<(String, f64)>,
    pub outputs: Vec<ManifestFile>,
}

impl RunManifest {
    pub fn new(command: &str, config_echo: Vec<(String, String)>) -> Self {
        RunManifest {
            tool: "nlfv".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config: config_echo,
            phases: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn add_phase(&mut self, name: &str, seconds: f64) {
        self.phases.push((name.to_string(), seconds));
    }

    /// Register a produced file, digesting its current on-disk content.
    pub fn add_output(&mut self, base: &Path, path: &Path) -> Result<()> {
        let bytes = fs::read(path)?;
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        let digest = hasher.finalize();
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        let rel = path
            .strip_prefix(base)
            .unwrap_or(path)
            .to_string_lossy()
            .to_string();
        self.outputs.push(ManifestFile {
            path: rel,
            bytes: bytes.len() as u64,
            sha256: hex,
        });
        Ok(())
    }

    /// Write `manifest.json` into `dir` and return its path.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("manifest.json");
        fs::write(&path, serde_json::to_string_pretty(self).unwrap() + "\n")?;
        Ok(path)
    }
}
