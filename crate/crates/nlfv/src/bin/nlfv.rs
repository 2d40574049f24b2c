use clap::{Parser, Subcommand};
use nlfv::config::{override_dx0, parse_config, AnyConfig, ParsedConfig};
use nlfv::error::Error;
use nlfv::output::{
    diagnostics_summary_json, write_diagnostics_csv, write_diagnostics_summary, write_eta_csv,
    write_pgm, write_rate_csv, write_snapshot_csv_1d, write_snapshot_csv_2d, write_svg_1d,
    RunManifest,
};
use nlfv::{
    convergence_study_1d, convergence_study_2d, eta_sweep, run_1d, run_2d, ConvMode, DiagLevel,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "nlfv",
    version,
    about = "Finite-volume solver for nonlocal scalar conservation laws",
    after_help = "Worker count is capped by the NLFV_THREADS environment variable (0 = auto)."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a 1D simulation and write snapshot CSV/SVG files
    Run1d {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides output.dir from the config)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_parser = parse_diag, default_value = "basic")]
        diagnostics: DiagLevel,
        /// Comma-separated snapshot times (overrides time.snapshots)
        #[arg(long)]
        snapshots: Option<String>,
    },
    /// Run a 2D simulation and write snapshot CSV/PGM files
    Run2d {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_parser = parse_diag, default_value = "basic")]
        diagnostics: DiagLevel,
        #[arg(long)]
        snapshots: Option<String>,
    },
    /// Mesh-refinement convergence study (dx, dx/2, ...)
    Converge {
        #[arg(long)]
        config: PathBuf,
        /// Number of table rows; levels+1 simulations are run
        #[arg(long, default_value_t = 4)]
        levels: usize,
        /// Override the coarsest mesh width
        #[arg(long)]
        dx0: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Kernel-radius sweep against the local Godunov reference (1D)
    EtaSweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "0.0625,0.03125,0.015625")]
        etas: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant audit on a config; exit 1 on any violation
    Check {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_diag(s: &str) -> Result<DiagLevel, String> {
    match s {
        "off" => Ok(DiagLevel::Off),
        "basic" => Ok(DiagLevel::Basic),
        "full" => Ok(DiagLevel::Full),
        other => Err(format!("expected full|basic|off, got '{other}'")),
    }
}

fn parse_times(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| Error::Config(format!("bad time value '{p}'")))
        })
        .collect()
}

fn main() -> ExitCode {
    let threads = nlfv::parallel::init_threads();
    let cli = Cli::parse();
    match dispatch(cli, threads) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Precondition(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn dispatch(cli: Cli, threads: usize) -> Result<ExitCode, Error> {
    match cli.cmd {
        Cmd::Run1d {
            config,
            out,
            diagnostics,
            snapshots,
        } => cmd_run(&config, out, diagnostics, snapshots, false, threads),
        Cmd::Run2d {
            config,
            out,
            diagnostics,
            snapshots,
        } => cmd_run(&config, out, diagnostics, snapshots, true, threads),
        Cmd::Converge {
            config,
            levels,
            dx0,
            out,
        } => cmd_converge(&config, levels, dx0, out),
        Cmd::EtaSweep { config, etas, out } => cmd_eta(&config, &etas, out),
        Cmd::Check { config, out } => cmd_check(&config, out),
    }
}

fn load(config: &Path, out: Option<PathBuf>) -> Result<(ParsedConfig, PathBuf), Error> {
    let parsed = parse_config(config)?;
    let dir = out.unwrap_or_else(|| parsed.output_dir.clone());
    std::fs::create_dir_all(&dir)?;
    Ok((parsed, dir))
}

fn cmd_run(
    config: &Path,
    out: Option<PathBuf>,
    diagnostics: DiagLevel,
    snapshots: Option<String>,
    expect_2d: bool,
    threads: usize,
) -> Result<ExitCode, Error> {
    let t0 = Instant::now();
    let (mut parsed, dir) = load(config, out)?;
    let snapshot_times = snapshots.as_deref().map(parse_times).transpose()?;
    let parse_secs = t0.elapsed().as_secs_f64();
    let command = if expect_2d { "run2d" } else { "run1d" };
    let mut manifest = RunManifest::new(command, parsed.resolved.clone());
    manifest.add_phase("parse", parse_secs);
    let mut files: Vec<PathBuf> = Vec::new();
    let t1 = Instant::now();
    match (&mut parsed.config, expect_2d) {
        (AnyConfig::OneD(cfg), false) => {
            cfg.diagnostics = diagnostics;
            if let Some(times) = snapshot_times {
                cfg.snapshot_times = times;
            }
            let run = run_1d(cfg)?;
            manifest.add_phase("simulate", t1.elapsed().as_secs_f64());
            let t2 = Instant::now();
            for (idx, snap) in run.snapshots.iter().enumerate() {
                let base = format!("snap_{idx:03}_t{:.6}", snap.time);
                let csv = dir.join(format!("{base}.csv"));
                write_snapshot_csv_1d(&csv, snap)?;
                files.push(csv);
                let svg = dir.join(format!("{base}.svg"));
                write_svg_1d(&svg, snap)?;
                files.push(svg);
            }
            let final_csv = dir.join("final.csv");
            write_snapshot_csv_1d(&final_csv, &run.final_field)?;
            files.push(final_csv);
            if diagnostics != DiagLevel::Off {
                let dcsv = dir.join("diagnostics.csv");
                write_diagnostics_csv(&dcsv, &run.report)?;
                files.push(dcsv);
                let dsum = dir.join("diagnostics.json");
                write_diagnostics_summary(&dsum, &run.report)?;
                files.push(dsum);
                println!(
                    "{}",
                    serde_json::to_string_pretty(&diagnostics_summary_json(&run.report)).unwrap()
                );
            }
            manifest.add_phase("write", t2.elapsed().as_secs_f64());
            println!(
                "run1d: {} steps to t = {}, {} snapshot(s), threads = {threads}",
                run.final_field.step_index,
                run.final_field.time,
                run.snapshots.len()
            );
            for w in &run.report.warnings {
                eprintln!("warning: {w}");
            }
        }
        (AnyConfig::TwoD(cfg), true) => {
            cfg.diagnostics = diagnostics;
            if let Some(times) = snapshot_times {
                cfg.snapshot_times = times;
            }
            let run = run_2d(cfg)?;
            manifest.add_phase("simulate", t1.elapsed().as_secs_f64());
            let t2 = Instant::now();
            for (idx, snap) in run.snapshots.iter().enumerate() {
                let base = format!("snap_{idx:03}_t{:.6}", snap.time);
                let csv = dir.join(format!("{base}.csv"));
                write_snapshot_csv_2d(&csv, snap)?;
                files.push(csv);
                let pgm = dir.join(format!("{base}.pgm"));
                write_pgm(&pgm, snap)?;
                files.push(pgm);
            }
            let final_csv = dir.join("final.csv");
            write_snapshot_csv_2d(&final_csv, &run.final_field)?;
            files.push(final_csv);
            let final_pgm = dir.join("final.pgm");
            write_pgm(&final_pgm, &run.final_field)?;
            files.push(final_pgm);
            if diagnostics != DiagLevel::Off {
                let dcsv = dir.join("diagnostics.csv");
                write_diagnostics_csv(&dcsv, &run.report)?;
                files.push(dcsv);
                let dsum = dir.join("diagnostics.json");
                write_diagnostics_summary(&dsum, &run.report)?;
                files.push(dsum);
            }
            manifest.add_phase("write", t2.elapsed().as_secs_f64());
            println!(
                "run2d: {} steps to t = {}, {} snapshot(s), threads = {threads}",
                run.final_field.step_index,
                run.final_field.time,
                run.snapshots.len()
            );
            for w in &run.report.warnings {
                eprintln!("warning: {w}");
            }
        }
        (AnyConfig::OneD(_), true) => {
            return Err(Error::Config(
                "run2d requires a 2D config (grid.nx/grid.ny)".into(),
            ))
        }
        (AnyConfig::TwoD(_), false) => {
            return Err(Error::Config(
                "run1d requires a 1D config (grid.n_cells)".into(),
            ))
        }
    }
    for f in &files {
        manifest.add_output(&dir, f)?;
    }
    manifest.write(&dir)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_converge(
    config: &Path,
    levels: usize,
    dx0: Option<f64>,
    out: Option<PathBuf>,
) -> Result<ExitCode, Error> {
    let t0 = Instant::now();
    let (mut parsed, dir) = load(config, out)?;
    if let Some(dx0) = dx0 {
        override_dx0(&mut parsed.config, dx0)?;
    }
    let mut manifest = RunManifest::new("converge", parsed.resolved.clone());
    manifest.add_phase("parse", t0.elapsed().as_secs_f64());
    let t1 = Instant::now();
    let table = match &parsed.config {
        AnyConfig::OneD(cfg) => convergence_study_1d(cfg, levels)?,
        AnyConfig::TwoD(cfg) => convergence_study_2d(cfg, levels)?,
    };
    manifest.add_phase("simulate", t1.elapsed().as_secs_f64());
    print!("{table}");
    let t2 = Instant::now();
    let csv = dir.join("rates.csv");
    write_rate_csv(&csv, &table)?;
    manifest.add_phase("write", t2.elapsed().as_secs_f64());
    manifest.add_output(&dir, &csv)?;
    manifest.write(&dir)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_eta(config: &Path, etas: &str, out: Option<PathBuf>) -> Result<ExitCode, Error> {
    let t0 = Instant::now();
    let (parsed, dir) = load(config, out)?;
    let etas = parse_times(etas)?;
    if etas.is_empty() {
        return Err(Error::Config("eta-sweep needs at least one eta".into()));
    }
    let AnyConfig::OneD(cfg) = &parsed.config else {
        return Err(Error::Config("eta-sweep requires a 1D config".into()));
    };
    let mut manifest = RunManifest::new("eta-sweep", parsed.resolved.clone());
    manifest.add_phase("parse", t0.elapsed().as_secs_f64());
    let t1 = Instant::now();
    let rows = eta_sweep(cfg, &etas)?;
    manifest.add_phase("simulate", t1.elapsed().as_secs_f64());
    println!("{:>12}  {:>22}", "eta", "l1_distance_to_local");
    for r in &rows {
        println!("{:>12.8}  {:>22.12e}", r.eta, r.l1_distance_to_local);
    }
    let t2 = Instant::now();
    let csv = dir.join("eta_sweep.csv");
    write_eta_csv(&csv, &rows)?;
    manifest.add_phase("write", t2.elapsed().as_secs_f64());
    manifest.add_output(&dir, &csv)?;
    manifest.write(&dir)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_check(config: &Path, out: Option<PathBuf>) -> Result<ExitCode, Error> {
    let t0 = Instant::now();
    let (mut parsed, dir) = load(config, out)?;
    let mut manifest = RunManifest::new("check", parsed.resolved.clone());
    manifest.add_phase("parse", t0.elapsed().as_secs_f64());
    let t1 = Instant::now();
    // declared model bounds are trusted at run time; cross-check them here
    let model = match &parsed.config {
        AnyConfig::OneD(cfg) => cfg.model,
        AnyConfig::TwoD(cfg) => cfg.model.x,
    };
    let bounds_violation = nlfv::diagnostics::check_model_bounds(&model, 0.0, 1.0, 10_000);
    // the audit thresholds apply to the direct summation path
    let report = match &mut parsed.config {
        AnyConfig::OneD(cfg) => {
            cfg.diagnostics = DiagLevel::Full;
            cfg.conv_mode = ConvMode::Direct;
            run_1d(cfg)?.report
        }
        AnyConfig::TwoD(cfg) => {
            cfg.diagnostics = DiagLevel::Full;
            cfg.conv_mode = ConvMode::Direct;
            run_2d(cfg)?.report
        }
    };
    manifest.add_phase("simulate", t1.elapsed().as_secs_f64());
    let verdicts = report.verdicts();
    let line = |name: &str, ok: bool, detail: String| {
        println!("[{}] {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    };
    line(
        "model bounds",
        bounds_violation.is_none(),
        bounds_violation
            .clone()
            .unwrap_or_else(|| format!("f_lip = {}, nu_sup = {} hold on [0,1]", model.f_lip, model.nu_sup)),
    );
    line(
        "mass conservation",
        verdicts.mass_ok,
        format!("max per-step relative drift {:.3e}", report.mass_drift_rel_max),
    );
    line(
        "positivity",
        verdicts.positivity_ok,
        format!("min value {:.3e}", report.min_overall),
    );
    line(
        "max principle",
        verdicts.max_ok,
        format!("max value {:.16}", report.max_overall),
    );
    line(
        "entropy inequality",
        verdicts.entropy_ok,
        format!("max residual {:.3e}", report.entropy_max),
    );
    println!(
        "cfl: lambda = {} vs bound {:.6} ({})",
        report.lambda_configured,
        report.lambda_bound,
        if report.cfl_satisfied() {
            "satisfied"
        } else {
            "exceeded"
        }
    );
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let t2 = Instant::now();
    let dcsv = dir.join("diagnostics.csv");
    write_diagnostics_csv(&dcsv, &report)?;
    let dsum = dir.join("diagnostics.json");
    write_diagnostics_summary(&dsum, &report)?;
    manifest.add_phase("write", t2.elapsed().as_secs_f64());
    manifest.add_output(&dir, &dcsv)?;
    manifest.add_output(&dir, &dsum)?;
    manifest.write(&dir)?;
    if verdicts.all_ok() && bounds_violation.is_none() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}
