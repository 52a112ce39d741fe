//! Acceptance gate. Runs every criterion at its fixed tolerance, prints one
//! line per criterion and exits non-zero if any of them fails.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;

use timetomo::counts::{
    coincidence_count_set, qubit_count_set, stream_rng, NoiseConfig, ESTIMATOR_STREAM,
};
use timetomo::estimator::{estimate_state, EstimatorConfig};
use timetomo::harness::sweep::{
    METRIC_CHSH, METRIC_CONCURRENCE, METRIC_FIDELITY, METRIC_TRACE_DISTANCE,
};
use timetomo::harness::{
    emit_trajectory, run_entangled_sweep, run_orthogonality_sweep, run_qubit_sweep,
    write_sweep_outputs, write_trajectory_outputs, ExperimentConfig, Mode, SampleSizes,
    SweepReport, TrajectoryConfig,
};
use timetomo::measurement::{
    evolve_operator, ic_povm_schedule, jittered_operator, m_h_closed_form, JitterModel,
};
use timetomo::metrics::fidelity;
use timetomo::states::{bell_state, bloch_state, sample_bell_states, BlochParams};
use timetomo::{ComplexMatrix, DynamicsParams, Polarization};

const SEED: u64 = 1;
const TABLE_MIXED_GRID: [usize; 3] = [20, 5, 5];
const TABLE_PURE_GRID: [usize; 2] = [16, 8];
const PAIR_GRID: [usize; 2] = [8, 8];
const BELL_COUNT: usize = 50;
const PHOTONS: [f64; 3] = [10.0, 100.0, 1000.0];

type Check = Result<(bool, String), String>;

struct Gate {
    failed: Vec<u32>,
}

impl Gate {
    fn run(
        &mut self,
        id: u32,
        title: &str,
        budget: Option<Duration>,
        check: impl FnOnce() -> Check,
    ) {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let (mut pass, mut detail) = match outcome {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        if let Some(limit) = budget {
            if elapsed > limit {
                pass = false;
                detail.push_str(&format!("; over the {limit:?} budget"));
            }
        }
        println!(
            "criterion {id:>2} {}: {title}: {detail} ({:.2?})",
            if pass { "PASS" } else { "FAIL" },
            elapsed
        );
        if !pass {
            self.failed.push(id);
        }
    }
}

fn err(e: timetomo::Error) -> String {
    e.to_string()
}

fn sweep_config(mode: Mode, sigma_list: Vec<f64>, photon_list: Vec<f64>) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::preset(mode);
    cfg.sigma_list = sigma_list;
    cfg.photon_list = photon_list;
    cfg.seed = SEED;
    cfg.samples = SampleSizes {
        mixed_grid: Some(TABLE_MIXED_GRID),
        pure_grid: Some(match mode {
            Mode::QubitOrthogonalPairs => PAIR_GRID,
            _ => TABLE_PURE_GRID,
        }),
        bell_count: Some(BELL_COUNT),
    };
    cfg
}

fn metric(report: &SweepReport, sigma: f64, n: f64, name: &str) -> Result<(f64, f64), String> {
    report
        .row(sigma, n, name)
        .map(|r| (r.mean, r.sd))
        .ok_or_else(|| format!("missing row sigma={sigma} N={n} {name}"))
}

fn povm_completeness() -> Check {
    let p = DynamicsParams::default();
    let h = Polarization::H.projector();
    let mut sum = ComplexMatrix::zeros(2);
    for &t in ic_povm_schedule().instants() {
        sum.add_scaled(&evolve_operator(&h, &p, t).map_err(err)?.matrix, 1.0 / 3.0);
    }
    let dev = sum.max_abs_diff(&ComplexMatrix::identity(2));
    Ok((dev <= 1e-10, format!("max |(1/3) sum - I| = {dev:.2e}")))
}

fn closed_form_agreement() -> Check {
    let p = DynamicsParams::default();
    let h = Polarization::H.projector();
    let mut worst: f64 = 0.0;
    for k in 0..1000 {
        let t = 4.0 * k as f64 / 1000.0;
        let m = evolve_operator(&h, &p, t).map_err(err)?.matrix;
        worst = worst.max(m.max_abs_diff(&m_h_closed_form(t)));
    }
    Ok((
        worst <= 1e-10,
        format!("max entry error {worst:.2e} over 1000 points"),
    ))
}

fn jitter_oracle() -> Check {
    let p = DynamicsParams::default();
    let h = Polarization::H.projector();
    let mut worst: f64 = 0.0;
    for sigma in [0.1, 0.3, 0.5] {
        let j = JitterModel::new(sigma).map_err(err)?;
        let damp = (-2.0 * PI * PI * sigma * sigma).exp();
        for k in 0..=200 {
            let t = 2.0 * k as f64 / 200.0;
            let m = jittered_operator(&h, &p, &j, t).map_err(err)?.matrix;
            let oracle = 0.5 + 0.5 * damp * (2.0 * PI * t).cos();
            worst = worst.max((m[(0, 0)].re - oracle).abs());
        }
    }
    Ok((worst <= 1e-4, format!("max diagonal deviation {worst:.2e}")))
}

fn noiseless_recovery() -> Check {
    let p = DynamicsParams::default();
    let ideal = JitterModel::ideal();
    let est = EstimatorConfig::default();
    let n = 1000.0;
    let noise = NoiseConfig::noiseless(n);
    let mut rng = stream_rng(SEED, 0, 0);
    let mut worst_qubit: f64 = 1.0;
    for id in 0..50u64 {
        let b = BlochParams {
            r: rng.random::<f64>(),
            theta: rng.random_range(-1.0f64..1.0).acos(),
            phi: rng.random_range(0.0..2.0 * PI),
        };
        let rho = bloch_state(&b).map_err(err)?;
        let recs = qubit_count_set(&rho, &p, &ideal, &noise, id).map_err(err)?;
        let out = estimate_state(
            &recs,
            2,
            n,
            &p,
            &est,
            &mut stream_rng(SEED, id, ESTIMATOR_STREAM),
        )
        .map_err(err)?;
        worst_qubit = worst_qubit.min(fidelity(&rho, &out.rho_out).map_err(err)?);
    }
    let mut worst_bell: f64 = 1.0;
    for (id, b) in sample_bell_states(20).map_err(err)?.iter().enumerate() {
        let rho = bell_state(b);
        let recs = coincidence_count_set(&rho, &p, &ideal, &noise, id as u64).map_err(err)?;
        let out = estimate_state(
            &recs,
            4,
            n,
            &p,
            &est,
            &mut stream_rng(SEED, id as u64, ESTIMATOR_STREAM),
        )
        .map_err(err)?;
        worst_bell = worst_bell.min(fidelity(&rho, &out.rho_out).map_err(err)?);
    }
    Ok((
        worst_qubit >= 0.999 && worst_bell >= 0.999,
        format!("min fidelity {worst_qubit:.6} (50 qubits), {worst_bell:.6} (20 Bell states)"),
    ))
}

fn table_spot_checks() -> Check {
    let mixed = run_qubit_sweep(&sweep_config(
        Mode::QubitMixed,
        vec![0.0, 0.2],
        vec![1000.0],
    ))
    .map_err(err)?;
    let pure = run_qubit_sweep(&sweep_config(Mode::QubitPure, vec![0.1, 0.5], vec![1000.0]))
        .map_err(err)?;
    let cells = [
        ("mixed", &mixed, 0.0, 0.998),
        ("mixed", &mixed, 0.2, 0.95),
        ("pure", &pure, 0.1, 0.91),
        ("pure", &pure, 0.5, 0.54),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (label, report, sigma, target) in cells {
        let (mean, sd) = metric(report, sigma, 1000.0, METRIC_FIDELITY)?;
        pass &= (mean - target).abs() <= 0.02;
        parts.push(format!("{label} s={sigma}: {mean:.4}({sd:.3}) vs {target}"));
    }
    Ok((pass, parts.join(", ")))
}

fn orthogonality_collapse() -> Check {
    let report = run_orthogonality_sweep(&sweep_config(
        Mode::QubitOrthogonalPairs,
        vec![0.0, 0.75],
        vec![1000.0],
    ))
    .map_err(err)?;
    let (d0, _) = metric(&report, 0.0, 1000.0, METRIC_TRACE_DISTANCE)?;
    let (d75, _) = metric(&report, 0.75, 1000.0, METRIC_TRACE_DISTANCE)?;
    let n = report.rows[0].n_states;
    Ok((
        d0 >= 0.97 && d75 <= 0.1 && n == 32,
        format!("D_av {d0:.4} at s=0, {d75:.4} at s=0.75 over {n} pairs"),
    ))
}

fn entanglement_collapse() -> Check {
    let report = run_entangled_sweep(&sweep_config(Mode::Entangled, vec![0.25], PHOTONS.to_vec()))
        .map_err(err)?;
    let mut pass = true;
    let mut parts = Vec::new();
    for n in PHOTONS {
        let (c, _) = metric(&report, 0.25, n, METRIC_CONCURRENCE)?;
        pass &= c <= 0.05;
        parts.push(format!("N={n}: C_av {c:.4}"));
    }
    Ok((pass, parts.join(", ")))
}

fn chsh_boundary() -> Check {
    let report = run_entangled_sweep(&sweep_config(
        Mode::Entangled,
        vec![0.065, 0.07],
        PHOTONS.to_vec(),
    ))
    .map_err(err)?;
    let mut parts = Vec::new();
    let (c, sd) = metric(&report, 0.065, 1000.0, METRIC_CONCURRENCE)?;
    let (flag, _) = metric(&report, 0.065, 1000.0, METRIC_CHSH)?;
    let mut pass = (c - 0.74).abs() <= 0.03 && flag == 1.0;
    parts.push(format!(
        "s=0.065 N=1000: C {c:.4} +/- {:.4} (3 sd) certified={}",
        3.0 * sd,
        flag == 1.0
    ));
    for n in PHOTONS {
        let (c, sd) = metric(&report, 0.07, n, METRIC_CONCURRENCE)?;
        let (flag, _) = metric(&report, 0.07, n, METRIC_CHSH)?;
        pass &= flag == 0.0;
        parts.push(format!(
            "s=0.07 N={n}: C {c:.4} +/- {:.4} certified={}",
            3.0 * sd,
            flag == 1.0
        ));
    }
    Ok((pass, parts.join(", ")))
}

fn low_photon_dispersion() -> Check {
    let sigmas = vec![0.1, 0.2, 0.3, 0.4, 0.5];
    let mut pass = true;
    let mut fails = Vec::new();
    let mut cells = 0;
    for mode in [Mode::QubitMixed, Mode::QubitPure] {
        let report = run_qubit_sweep(&sweep_config(mode, sigmas.clone(), vec![10.0, 1000.0]))
            .map_err(err)?;
        for &s in &sigmas {
            let (_, sd10) = metric(&report, s, 10.0, METRIC_FIDELITY)?;
            let (_, sd1000) = metric(&report, s, 1000.0, METRIC_FIDELITY)?;
            cells += 1;
            if sd10 <= sd1000 {
                pass = false;
                fails.push(format!("{} s={s}: {sd10:.4} <= {sd1000:.4}", mode.as_str()));
            }
        }
    }
    let fig_sigmas: Vec<f64> = (0..=10).map(|i| i as f64 * 0.025).collect();
    let report = run_entangled_sweep(&sweep_config(
        Mode::Entangled,
        fig_sigmas.clone(),
        vec![10.0, 1000.0],
    ))
    .map_err(err)?;
    for &s in &fig_sigmas {
        let (_, sd10) = metric(&report, s, 10.0, METRIC_CONCURRENCE)?;
        let (_, sd1000) = metric(&report, s, 1000.0, METRIC_CONCURRENCE)?;
        cells += 1;
        if sd10 <= sd1000 {
            pass = false;
            fails.push(format!("concurrence s={s}: {sd10:.4} <= {sd1000:.4}"));
        }
    }
    let detail = if fails.is_empty() {
        format!("SD(N=10) > SD(N=1000) in all {cells} cells")
    } else {
        format!("violations: {}", fails.join(", "))
    };
    Ok((pass, detail))
}

fn read_outputs(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .map_err(|e| e.to_string())?
        .map(|e| {
            let e = e.map_err(|e| e.to_string())?;
            let name = e.file_name().to_string_lossy().into_owned();
            Ok((name, fs::read(e.path()).map_err(|e| e.to_string())?))
        })
        .collect::<Result<_, String>>()?;
    files.sort();
    Ok(files)
}

fn determinism() -> Check {
    let root = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut compared = 0;
    let configs = [
        (
            "qubit-sweep",
            sweep_config(Mode::QubitMixed, vec![0.0, 0.2], vec![10.0, 1000.0]),
        ),
        (
            "ortho-sweep",
            sweep_config(Mode::QubitOrthogonalPairs, vec![0.3], vec![100.0]),
        ),
        ("entangled-sweep", {
            let mut c = sweep_config(Mode::Entangled, vec![0.05], vec![10.0, 100.0]);
            c.samples.bell_count = Some(8);
            c.state_log = true;
            c.dump_counts = true;
            c
        }),
    ];
    for (command, base) in configs {
        let mut dumps = Vec::new();
        for (run, threads) in [(0, 1usize), (1, 1), (2, 4)] {
            let mut cfg = base.clone();
            cfg.threads = threads;
            let dir = root.path().join(format!("{command}-{run}"));
            let report = timetomo::harness::run_sweep(&cfg).map_err(err)?;
            // the manifest echoes the thread count; CSV and log files must not differ
            write_sweep_outputs(&report, &cfg, command, &dir).map_err(err)?;
            let files: Vec<_> = read_outputs(&dir)?
                .into_iter()
                .filter(|(name, _)| name != "manifest.json")
                .collect();
            dumps.push(files);
        }
        if dumps.iter().any(|d| *d != dumps[0]) {
            return Ok((false, format!("{command} outputs differ between runs")));
        }
        compared += dumps[0].len();
    }
    let traj = TrajectoryConfig {
        sigma_list: vec![0.0, 0.2],
        ..Default::default()
    };
    let a = root.path().join("traj-a");
    let b = root.path().join("traj-b");
    write_trajectory_outputs(&emit_trajectory(&traj).map_err(err)?, &traj, SEED, &a)
        .map_err(err)?;
    write_trajectory_outputs(&emit_trajectory(&traj).map_err(err)?, &traj, SEED, &b)
        .map_err(err)?;
    let same = read_outputs(&a)? == read_outputs(&b)?;
    compared += 3;
    Ok((
        same,
        format!("{compared} output files byte-identical across runs and 1/4 threads"),
    ))
}

fn main() -> ExitCode {
    let mut gate = Gate { failed: Vec::new() };
    let sec = Duration::from_secs;
    gate.run(1, "POVM completeness", Some(sec(1)), povm_completeness);
    gate.run(
        2,
        "closed-form agreement",
        Some(sec(1)),
        closed_form_agreement,
    );
    gate.run(3, "jitter damping oracle", Some(sec(10)), jitter_oracle);
    gate.run(4, "noiseless recovery", Some(sec(60)), noiseless_recovery);
    gate.run(5, "fidelity table spot checks", None, table_spot_checks);
    gate.run(6, "orthogonality collapse", None, orthogonality_collapse);
    gate.run(7, "entanglement collapse", None, entanglement_collapse);
    gate.run(8, "CHSH boundary", None, chsh_boundary);
    gate.run(9, "low-photon dispersion", None, low_photon_dispersion);
    gate.run(10, "determinism", None, determinism);
    if gate.failed.is_empty() {
        println!("acceptance: all 10 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {:?}", gate.failed);
        ExitCode::FAILURE
    }
}
