//! INI-style run configuration: sections `[grid] [time] [model] [kernel]
//! [scheme] [initial] [output]` (plus `[splitting]` in 2D), `key = value`
//! pairs, `#` comments. Unknown keys are rejected with file and line.

use crate::conv::ConvMode;
use crate::diagnostics::DiagLevel;
use crate::error::{Error, Result};
use crate::flux::{CflMode, FluxFamily, InterfaceRule, SchemeConfig, SchemeConfig2d};
use crate::grid::{Boundary, Grid1d, Grid2d};
use crate::kernel::KernelSpec;
use crate::model::Model;
use crate::solver1d::{Initial1d, RunConfig1d};
use crate::solver2d::{Initial2d, Model2d, RunConfig2d};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Clone, Debug)]
pub enum AnyConfig {
    OneD(RunConfig1d),
    TwoD(RunConfig2d),
}

#[derive(Clone, Debug)]
pub struct ParsedConfig {
    pub config: AnyConfig,
    pub output_dir: PathBuf,
    /// Fully resolved `section.key = value` pairs, defaults included.
    pub resolved: Vec<(String, String)>,
}

struct Entry {
    value: String,
    line: usize,
    used: bool,
}

struct Resolver {
    origin: String,
    entries: BTreeMap<String, Entry>,
    resolved: BTreeMap<String, String>,
}

impl Resolver {
    fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (ln, raw) in text.lines().enumerate() {
            let line_no = ln + 1;
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') {
                if !line.ends_with(']') || line.len() < 3 {
                    return Err(Error::Config(format!(
                        "{origin}:{line_no}: malformed section header '{raw}'"
                    )));
                }
                section = line[1..line.len() - 1].trim().to_string();
                continue;
            }
            let Some(eq) = line.find('=') else {
                return Err(Error::Config(format!(
                    "{origin}:{line_no}: expected 'key = value', got '{raw}'"
                )));
            };
            let key = line[..eq].trim();
            let value = line[eq + 1..].trim();
            if section.is_empty() {
                return Err(Error::Config(format!(
                    "{origin}:{line_no}: key '{key}' appears before any [section]"
                )));
            }
            if key.is_empty() {
                return Err(Error::Config(format!("{origin}:{line_no}: empty key")));
            }
            let full = format!("{section}.{key}");
            if entries
                .insert(
                    full.clone(),
                    Entry {
                        value: value.to_string(),
                        line: line_no,
                        used: false,
                    },
                )
                .is_some()
            {
                return Err(Error::Config(format!(
                    "{origin}:{line_no}: duplicate key '{full}'"
                )));
            }
        }
        Ok(Resolver {
            origin: origin.to_string(),
            entries,
            resolved: BTreeMap::new(),
        })
    }

    fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn raw(&mut self, key: &str) -> Option<(String, usize)> {
        if let Some(e) = self.entries.get_mut(key) {
            e.used = true;
            Some((e.value.clone(), e.line))
        } else {
            None
        }
    }

    fn note(&mut self, key: &str, value: impl ToString) {
        self.resolved.insert(key.to_string(), value.to_string());
    }

    fn str_opt(&mut self, key: &str, default: &str) -> String {
        let v = self
            .raw(key)
            .map(|(v, _)| v)
            .unwrap_or_else(|| default.to_string());
        self.note(key, &v);
        v
    }

    fn f64_req(&mut self, key: &str) -> Result<f64> {
        let (v, line) = self.raw(key).ok_or_else(|| {
            Error::Config(format!("{}: missing required key '{key}'", self.origin))
        })?;
        let x: f64 = v.parse().map_err(|_| {
            Error::Config(format!(
                "{}:{line}: key '{key}' expects a number, got '{v}'",
                self.origin
            ))
        })?;
        self.note(key, x);
        Ok(x)
    }

    fn f64_opt(&mut self, key: &str, default: f64) -> Result<f64> {
        match self.raw(key) {
            Some((v, line)) => {
                let x: f64 = v.parse().map_err(|_| {
                    Error::Config(format!(
                        "{}:{line}: key '{key}' expects a number, got '{v}'",
                        self.origin
                    ))
                })?;
                self.note(key, x);
                Ok(x)
            }
            None => {
                self.note(key, default);
                Ok(default)
            }
        }
    }

    fn usize_req(&mut self, key: &str) -> Result<usize> {
        let (v, line) = self.raw(key).ok_or_else(|| {
            Error::Config(format!("{}: missing required key '{key}'", self.origin))
        })?;
        let x: usize = v.parse().map_err(|_| {
            Error::Config(format!(
                "{}:{line}: key '{key}' expects a positive integer, got '{v}'",
                self.origin
            ))
        })?;
        self.note(key, x);
        Ok(x)
    }

    fn bool_opt(&mut self, key: &str, default: bool) -> Result<bool> {
        match self.raw(key) {
            Some((v, line)) => match v.as_str() {
                "true" => {
                    self.note(key, true);
                    Ok(true)
                }
                "false" => {
                    self.note(key, false);
                    Ok(false)
                }
                other => Err(Error::Config(format!(
                    "{}:{line}: key '{key}' expects true|false, got '{other}'",
                    self.origin
                ))),
            },
            None => {
                self.note(key, default);
                Ok(default)
            }
        }
    }

    fn choice(&mut self, key: &str, default: &str, allowed: &[&str]) -> Result<String> {
        let (v, line) = match self.raw(key) {
            Some((v, line)) => (v, Some(line)),
            None => (default.to_string(), None),
        };
        if !allowed.contains(&v.as_str()) {
            let at = line
                .map(|l| format!("{}:{l}", self.origin))
                .unwrap_or_else(|| self.origin.clone());
            return Err(Error::Config(format!(
                "{at}: key '{key}' expects one of {}, got '{v}'",
                allowed.join("|")
            )));
        }
        self.note(key, &v);
        Ok(v)
    }

    fn times_list(&mut self, key: &str) -> Result<Vec<f64>> {
        match self.raw(key) {
            Some((v, line)) => {
                let mut out = Vec::new();
                for part in v.split(',') {
                    let part = part.trim();
                    if part.is_empty() {
                        continue;
                    }
                    out.push(part.parse::<f64>().map_err(|_| {
                        Error::Config(format!(
                            "{}:{line}: key '{key}' expects comma-separated numbers",
                            self.origin
                        ))
                    })?);
                }
                self.note(key, &v);
                Ok(out)
            }
            None => {
                self.note(key, "");
                Ok(vec![])
            }
        }
    }

    fn finish(self) -> Result<Vec<(String, String)>> {
        for (key, e) in &self.entries {
            if !e.used {
                return Err(Error::Config(format!(
                    "{}:{}: unknown key '{key}'",
                    self.origin, e.line
                )));
            }
        }
        Ok(self.resolved.into_iter().collect())
    }
}

fn read_samples_csv(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cell = line.rsplit(',').next().unwrap_or(line).trim();
        if ln == 0 && cell.parse::<f64>().is_err() {
            continue; // header row
        }
        out.push(cell.parse::<f64>().map_err(|_| {
            Error::Config(format!(
                "{}:{}: expected a number, got '{cell}'",
                path.display(),
                ln + 1
            ))
        })?);
    }
    Ok(out)
}

pub fn parse_config(path: &Path) -> Result<ParsedConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config_str(&text, &path.display().to_string())
}

pub fn parse_config_str(text: &str, origin: &str) -> Result<ParsedConfig> {
    let mut r = Resolver::parse(text, origin)?;
    let two_d = r.has("grid.nx") || r.has("grid.ny");
    if two_d && r.has("grid.n_cells") {
        return Err(Error::Config(format!(
            "{origin}: specify either grid.n_cells (1D) or grid.nx/grid.ny (2D), not both"
        )));
    }
    let boundary = match r
        .choice("grid.boundary", "zero-extension", &["zero-extension", "periodic"])?
        .as_str()
    {
        "periodic" => Boundary::Periodic,
        _ => Boundary::ZeroExtension,
    };
    let model_name = match r.raw("model.name") {
        Some((v, _)) => {
            r.note("model.name", &v);
            v
        }
        None => {
            return Err(Error::Config(format!(
                "{origin}: missing required key 'model.name'"
            )))
        }
    };
    let model = Model::builtin(&model_name)?;
    let t_end = r.f64_opt("time.t_end", 0.5)?;
    let snapshots = r.times_list("time.snapshots")?;
    let mode = match r.choice("kernel.mode", "auto", &["direct", "fft", "auto"])?.as_str() {
        "direct" => ConvMode::Direct,
        "fft" => ConvMode::Fft,
        _ => ConvMode::Auto,
    };
    let family_name = r.choice("scheme.family", "lax-friedrichs", &["lax-friedrichs", "godunov"])?;
    let theta = r.f64_opt("scheme.theta", 0.3333)?;
    let family = match family_name.as_str() {
        "godunov" => FluxFamily::Godunov,
        _ => FluxFamily::LaxFriedrichs { theta },
    };
    family.validate()?;
    let recon = match r.choice("scheme.recon", "mean", &["left", "mean", "right"])?.as_str() {
        "left" => InterfaceRule::Left,
        "right" => InterfaceRule::Right,
        _ => InterfaceRule::Mean,
    };
    let output_dir = PathBuf::from(r.str_opt("output.dir", "out"));

    if !two_d {
        let x_min = r.f64_req("grid.x_min")?;
        let x_max = r.f64_req("grid.x_max")?;
        let n_cells = r.usize_req("grid.n_cells")?;
        let grid = Grid1d::new(x_min, x_max, n_cells, boundary)?;
        let kind = r.choice("kernel.kind", "lwr-quadratic-1d", &["lwr-quadratic-1d"])?;
        debug_assert_eq!(kind, "lwr-quadratic-1d");
        let eta = r.f64_opt("kernel.eta", 0.0625)?;
        let kernel = KernelSpec::lwr(eta)?;
        let lambda = r.f64_opt("scheme.lambda", 0.1286)?;
        let cfl = match r.choice("scheme.cfl", "strict", &["strict", "warn"])?.as_str() {
            "warn" => CflMode::Warn,
            _ => CflMode::Strict,
        };
        let initial_name = r.choice(
            "initial.name",
            "riemann-ex1",
            &["riemann-ex1", "riemann", "csv"],
        )?;
        let initial = match initial_name.as_str() {
            "riemann" => Initial1d::Riemann {
                left: r.f64_req("initial.left")?,
                right: r.f64_req("initial.right")?,
                x0: r.f64_opt("initial.x0", 0.0)?,
            },
            "csv" => {
                let p = r.str_opt("initial.path", "");
                if p.is_empty() {
                    return Err(Error::Config(format!(
                        "{origin}: initial.name = csv requires initial.path"
                    )));
                }
                Initial1d::Samples(read_samples_csv(Path::new(&p))?)
            }
            _ => Initial1d::RiemannEx1,
        };
        let cfg = RunConfig1d {
            grid,
            model,
            kernel,
            scheme: SchemeConfig {
                family,
                lambda,
                recon,
                cfl,
            },
            conv_mode: mode,
            t_end,
            initial,
            snapshot_times: snapshots,
            diagnostics: DiagLevel::Basic,
        };
        cfg.scheme.validate()?;
        let resolved = r.finish()?;
        Ok(ParsedConfig {
            config: AnyConfig::OneD(cfg),
            output_dir,
            resolved,
        })
    } else {
        let x_min = r.f64_req("grid.x_min")?;
        let x_max = r.f64_req("grid.x_max")?;
        let y_min = r.f64_req("grid.y_min")?;
        let y_max = r.f64_req("grid.y_max")?;
        let nx = r.usize_req("grid.nx")?;
        let ny = r.usize_req("grid.ny")?;
        let grid = Grid2d::new(x_min, x_max, y_min, y_max, nx, ny, boundary)?;
        let kind = r.choice("kernel.kind", "crowd-bump-2d", &["crowd-bump-2d"])?;
        debug_assert_eq!(kind, "crowd-bump-2d");
        let radius = r.f64_opt("kernel.radius", 0.4)?;
        let kernel = KernelSpec::crowd_bump(radius)?;
        let lambda_x = r.f64_opt("scheme.lambda_x", 0.2857)?;
        let lambda_y = r.f64_opt("scheme.lambda_y", 0.2857)?;
        let cfl = match r.choice("scheme.cfl", "warn", &["strict", "warn"])?.as_str() {
            "strict" => CflMode::Strict,
            _ => CflMode::Warn,
        };
        let initial_name = r.choice("initial.name", "annular", &["annular", "circular", "csv"])?;
        let initial = match initial_name.as_str() {
            "circular" => Initial2d::Circular,
            "csv" => {
                let p = r.str_opt("initial.path", "");
                if p.is_empty() {
                    return Err(Error::Config(format!(
                        "{origin}: initial.name = csv requires initial.path"
                    )));
                }
                Initial2d::Samples(read_samples_csv(Path::new(&p))?)
            }
            _ => Initial2d::Annular,
        };
        let reconvolve_y = r.bool_opt("splitting.reconvolve", false)?;
        let cfg = RunConfig2d {
            grid,
            model: Model2d::isotropic(model),
            kernel_x: kernel.clone(),
            kernel_y: kernel,
            scheme: SchemeConfig2d {
                family,
                lambda_x,
                lambda_y,
                recon,
                cfl,
            },
            conv_mode: mode,
            t_end,
            initial,
            snapshot_times: snapshots,
            diagnostics: DiagLevel::Basic,
            reconvolve_y,
        };
        cfg.scheme.validate()?;
        let resolved = r.finish()?;
        Ok(ParsedConfig {
            config: AnyConfig::TwoD(cfg),
            output_dir,
            resolved,
        })
    }
}

/// Rebuild the grid so its mesh width equals `dx0` (the extent must be an
/// integer multiple of `dx0`). Used by `converge --dx0`.
pub fn override_dx0(config: &mut AnyConfig, dx0: f64) -> Result<()> {
    if !(dx0 > 0.0) {
        return Err(Error::Config(format!("dx0 must be > 0, got {dx0}")));
    }
    let check = |extent: f64| -> Result<usize> {
        let n = extent / dx0;
        if (n - n.round()).abs() > 1e-9 * n.max(1.0) || n.round() < 1.0 {
            return Err(Error::Config(format!(
                "domain extent {extent} is not an integer multiple of dx0 = {dx0}"
            )));
        }
        Ok(n.round() as usize)
    };
    match config {
        AnyConfig::OneD(cfg) => {
            cfg.grid.n_cells = check(cfg.grid.x_max - cfg.grid.x_min)?;
        }
        AnyConfig::TwoD(cfg) => {
            cfg.grid.nx = check(cfg.grid.x_max - cfg.grid.x_min)?;
            cfg.grid.ny = check(cfg.grid.y_max - cfg.grid.y_min)?;
        }
    }
    Ok(())
}
