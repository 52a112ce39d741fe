use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measurement::{bloch_trajectory, TrajectoryPoint};

use super::config::{ExperimentConfig, ResolvedSamples, TrajectoryConfig};
use super::sweep::{SweepReport, SweepResultRow};

pub const SWEEP_CSV_HEADER: &str = "sigma_over_T,n_photons,metric,mean,sd,stderr,n_states";
pub const TRAJECTORY_CSV_HEADER: &str = "t_over_T,x,y,z,purity";

/// Significant digits of the numeric sweep columns.
pub const SWEEP_DIGITS: usize = 10;
pub const TRAJECTORY_DIGITS: usize = 6;

/// `%g`-style formatting with `digits` significant digits: fixed notation
/// for exponents in [-4, digits), scientific otherwise, trailing zeros
/// trimmed.
pub fn format_g(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        format!(
            "{}e{}{:02}",
            trim_zeros(mantissa),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_owned()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn sweep_csv(rows: &[SweepResultRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let g = |x: f64| format_g(x, SWEEP_DIGITS);
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            g(r.sigma),
            g(r.n_photons),
            r.metric,
            g(r.mean),
            g(r.sd),
            g(r.stderr),
            r.n_states
        ));
    }
    out
}

pub fn trajectory_csv(points: &[TrajectoryPoint]) -> String {
    let mut out = String::from(TRAJECTORY_CSV_HEADER);
    out.push('\n');
    let g = |x: f64| format_g(x, TRAJECTORY_DIGITS);
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            g(p.t),
            g(p.x),
            g(p.y),
            g(p.z),
            g(p.purity)
        ));
    }
    out
}

#[derive(Debug, Serialize)]
struct SweepManifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: u64,
    samples: ResolvedSamples,
    config: &'a ExperimentConfig,
    outputs: &'a [String],
}

#[derive(Debug, Serialize)]
struct TrajectoryManifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: u64,
    config: &'a TrajectoryConfig,
    outputs: &'a [String],
}

fn write(dir: &Path, name: &str, body: &str, written: &mut Vec<String>) -> Result<()> {
    fs::write(dir.join(name), body)?;
    written.push(name.to_owned());
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Config(e.to_string()))
}

/// Writes `<command>.csv`, optional `states.jsonl` and per-cell count dumps,
/// then `manifest.json` listing them. Returns the manifest path.
pub fn write_sweep_outputs(
    report: &SweepReport,
    cfg: &ExperimentConfig,
    command: &str,
    dir: &Path,
) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    write(
        dir,
        &format!("{command}.csv"),
        &sweep_csv(&report.rows),
        &mut written,
    )?;
    if cfg.state_log {
        let mut body = String::new();
        for s in &report.states {
            body.push_str(&serde_json::to_string(s).map_err(|e| Error::Config(e.to_string()))?);
            body.push('\n');
        }
        write(dir, "states.jsonl", &body, &mut written)?;
    }
    for c in &report.counts {
        let name = format!(
            "counts_sigma_{}_n_{}.csv",
            format_g(c.sigma, SWEEP_DIGITS),
            format_g(c.n_photons, SWEEP_DIGITS)
        );
        let body = format!("{}\n{}", crate::counts::COUNTS_CSV_HEADER, c.csv);
        write(dir, &name, &body, &mut written)?;
    }
    let manifest = SweepManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        seed: cfg.seed,
        samples: cfg.resolved_samples(),
        config: cfg,
        outputs: &written,
    };
    let path = dir.join("manifest.json");
    fs::write(&path, to_json(&manifest)? + "\n")?;
    Ok(path)
}

/// Bloch trajectories of the configured operator, one per sigma.
pub fn emit_trajectory(cfg: &TrajectoryConfig) -> Result<Vec<(f64, Vec<TrajectoryPoint>)>> {
    cfg.validate()?;
    let m0 = cfg.operator.matrix()?;
    let grid = cfg.time_grid();
    cfg.sigma_list
        .iter()
        .map(|&s| {
            let j = cfg.quadrature.jitter(s)?;
            Ok((s, bloch_trajectory(&m0, &cfg.dynamics, &j, &grid)?))
        })
        .collect()
}

pub fn trajectory_file_name(cfg: &TrajectoryConfig, sigma: f64) -> String {
    format!(
        "trajectory_{}_sigma_{}.csv",
        cfg.operator.label(),
        format_g(sigma, TRAJECTORY_DIGITS)
    )
}

pub fn write_trajectory_outputs(
    trajectories: &[(f64, Vec<TrajectoryPoint>)],
    cfg: &TrajectoryConfig,
    seed: u64,
    dir: &Path,
) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (sigma, points) in trajectories {
        write(
            dir,
            &trajectory_file_name(cfg, *sigma),
            &trajectory_csv(points),
            &mut written,
        )?;
    }
    let manifest = TrajectoryManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: "trajectory",
        seed,
        config: cfg,
        outputs: &written,
    };
    let path = dir.join("manifest.json");
    fs::write(&path, to_json(&manifest)? + "\n")?;
    Ok(path)
}
