use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::counts::{
    count_set_with_operators, records_to_csv, stream_rng, NoiseConfig, ESTIMATOR_STREAM,
};
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::estimator::{estimate_state, EstimateResult};
use crate::measurement::{JitterModel, OperatorSet};
use crate::metrics::{
    aggregate, chsh_guarantee, concurrence, fidelity, trace_distance, MetricsSummary,
};
use crate::states::{
    bell_state, bloch_state, sample_bell_states, sample_mixed_qubits, sample_orthogonal_pairs,
    sample_pure_qubits, BellParams, BlochParams,
};

use super::config::{ExperimentConfig, Mode};

/// Estimates failing to converge above this fraction add a warning row.
pub const NONCONVERGENCE_WARN_FRACTION: f64 = 0.1;

pub const METRIC_FIDELITY: &str = "fidelity";
pub const METRIC_TRACE_DISTANCE: &str = "trace_distance";
pub const METRIC_CONCURRENCE: &str = "concurrence";
pub const METRIC_CHSH: &str = "chsh_guarantee";
pub const METRIC_NONCONVERGED: &str = "warning_nonconverged_fraction";

/// One aggregated (sigma, N, metric) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResultRow {
    pub sigma: f64,
    pub n_photons: f64,
    pub metric: String,
    pub mean: f64,
    pub sd: f64,
    pub stderr: f64,
    pub n_states: usize,
}

/// Input state of one reconstruction, as written to the state log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum InputState {
    Qubit(BlochParams),
    Bell(BellParams),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateLogEntry {
    pub sigma: f64,
    pub n_photons: f64,
    pub state_id: u64,
    pub input: InputState,
    pub w_opt: Vec<f64>,
    pub objective: f64,
    pub converged: bool,
    pub iterations: usize,
    pub metrics: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellCounts {
    pub sigma: f64,
    pub n_photons: f64,
    /// CSV body without header.
    pub csv: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepReport {
    pub rows: Vec<SweepResultRow>,
    /// Filled when the config asks for a state log.
    pub states: Vec<StateLogEntry>,
    /// Filled when the config asks for count dumps.
    pub counts: Vec<CellCounts>,
}

impl SweepReport {
    pub fn row(&self, sigma: f64, n_photons: f64, metric: &str) -> Option<&SweepResultRow> {
        self.rows
            .iter()
            .find(|r| r.sigma == sigma && r.n_photons == n_photons && r.metric == metric)
    }
}

struct Cell<'a> {
    cfg: &'a ExperimentConfig,
    sigma: f64,
    n_photons: f64,
    ideal: OperatorSet,
    jittered: OperatorSet,
    noise: NoiseConfig,
}

struct Reconstruction {
    input: InputState,
    state_id: u64,
    rho_in: DensityMatrix,
    estimate: EstimateResult,
    counts_csv: Option<String>,
}

impl<'a> Cell<'a> {
    fn new(
        cfg: &'a ExperimentConfig,
        ideal: &OperatorSet,
        jitter: JitterModel,
        n_photons: f64,
    ) -> Result<Self> {
        let noise = NoiseConfig {
            mean_photons: n_photons,
            seed: cfg.seed,
            poisson_enabled: cfg.poisson,
            sample_counts: cfg.sample_counts,
        };
        noise.validate()?;
        Ok(Self {
            cfg,
            sigma: jitter.sigma,
            n_photons,
            ideal: ideal.clone(),
            jittered: OperatorSet::horizontal(&cfg.dynamics, &jitter)?,
            noise,
        })
    }

    fn reconstruct(&self, input: InputState, state_id: u64) -> Result<Reconstruction> {
        let rho_in = match input {
            InputState::Qubit(b) => bloch_state(&b)?,
            InputState::Bell(b) => bell_state(&b),
        };
        let records =
            count_set_with_operators(&rho_in, &self.ideal, &self.jittered, &self.noise, state_id)?;
        let mut rng = stream_rng(self.cfg.seed, state_id, ESTIMATOR_STREAM);
        let estimate = estimate_state(
            &records,
            rho_in.dim(),
            self.n_photons,
            &self.cfg.dynamics,
            &self.cfg.estimator,
            &mut rng,
        )?;
        Ok(Reconstruction {
            input,
            state_id,
            rho_in,
            estimate,
            counts_csv: self
                .cfg
                .dump_counts
                .then(|| records_to_csv(state_id, &records)),
        })
    }

    fn log_entry(&self, r: &Reconstruction, metrics: BTreeMap<String, f64>) -> StateLogEntry {
        StateLogEntry {
            sigma: self.sigma,
            n_photons: self.n_photons,
            state_id: r.state_id,
            input: r.input,
            w_opt: r.estimate.w_opt.w.clone(),
            objective: r.estimate.objective,
            converged: r.estimate.converged,
            iterations: r.estimate.iterations,
            metrics,
        }
    }

    fn summary_row(&self, s: &MetricsSummary) -> SweepResultRow {
        SweepResultRow {
            sigma: self.sigma,
            n_photons: self.n_photons,
            metric: s.metric_name.clone(),
            mean: s.mean,
            sd: s.sd,
            stderr: s.stderr(),
            n_states: s.n,
        }
    }

    fn flag_row(&self, metric: &str, value: f64, n: usize) -> SweepResultRow {
        SweepResultRow {
            sigma: self.sigma,
            n_photons: self.n_photons,
            metric: metric.to_owned(),
            mean: value,
            sd: 0.0,
            stderr: 0.0,
            n_states: n,
        }
    }

    fn convergence_warning(&self, recs: &[&Reconstruction]) -> Option<SweepResultRow> {
        let failed = recs.iter().filter(|r| !r.estimate.converged).count();
        let fraction = failed as f64 / recs.len() as f64;
        if fraction > NONCONVERGENCE_WARN_FRACTION {
            log::warn!(
                "sigma={} N={}: {failed}/{} estimates did not converge",
                self.sigma,
                self.n_photons,
                recs.len()
            );
            Some(self.flag_row(METRIC_NONCONVERGED, fraction, recs.len()))
        } else {
            None
        }
    }
}

fn thread_pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

/// Runs `per_cell` over the sigma × N grid in config order.
fn sweep_cells<F>(cfg: &ExperimentConfig, mut per_cell: F) -> Result<SweepReport>
where
    F: FnMut(&Cell<'_>, &mut SweepReport) -> Result<()>,
{
    cfg.validate()?;
    let ideal = OperatorSet::horizontal(&cfg.dynamics, &JitterModel::ideal())?;
    let mut report = SweepReport::default();
    for &sigma in &cfg.sigma_list {
        let jitter = cfg.quadrature.jitter(sigma)?;
        for &n in &cfg.photon_list {
            let cell = Cell::new(cfg, &ideal, jitter, n)?;
            log::info!("cell sigma={sigma} N={n}");
            per_cell(&cell, &mut report)?;
        }
    }
    Ok(report)
}

fn reconstruct_all(
    pool: &rayon::ThreadPool,
    cell: &Cell<'_>,
    jobs: &[(InputState, u64)],
) -> Result<Vec<Reconstruction>> {
    pool.install(|| {
        jobs.par_iter()
            .map(|&(input, id)| cell.reconstruct(input, id))
            .collect()
    })
}

fn push_counts(cell: &Cell<'_>, recs: &[Reconstruction], report: &mut SweepReport) {
    if cell.cfg.dump_counts {
        let csv = recs
            .iter()
            .filter_map(|r| r.counts_csv.as_deref())
            .collect();
        report.counts.push(CellCounts {
            sigma: cell.sigma,
            n_photons: cell.n_photons,
            csv,
        });
    }
}

/// Fidelity of reconstructed qubits (mixed grid or pure shell) per cell.
pub fn run_qubit_sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    let samples = cfg.resolved_samples();
    let states = match cfg.mode {
        Mode::QubitMixed => {
            let [r, t, p] = samples.mixed_grid;
            sample_mixed_qubits(r, t, p)?
        }
        Mode::QubitPure => {
            let [t, p] = samples.pure_grid;
            sample_pure_qubits(t, p)?
        }
        m => {
            return Err(Error::Config(format!(
                "qubit sweep needs mode qubit-mixed or qubit-pure, got {}",
                m.as_str()
            )))
        }
    };
    let jobs: Vec<(InputState, u64)> = states
        .into_iter()
        .enumerate()
        .map(|(i, b)| (InputState::Qubit(b), i as u64))
        .collect();
    let pool = thread_pool(cfg.threads)?;
    sweep_cells(cfg, |cell, report| {
        let recs = reconstruct_all(&pool, cell, &jobs)?;
        let fids = recs
            .iter()
            .map(|r| fidelity(&r.rho_in, &r.estimate.rho_out))
            .collect::<Result<Vec<_>>>()?;
        report
            .rows
            .push(cell.summary_row(&aggregate(METRIC_FIDELITY, &fids)?));
        let refs: Vec<&Reconstruction> = recs.iter().collect();
        report.rows.extend(cell.convergence_warning(&refs));
        if cfg.state_log {
            for (r, f) in recs.iter().zip(&fids) {
                let m = BTreeMap::from([(METRIC_FIDELITY.to_owned(), *f)]);
                report.states.push(cell.log_entry(r, m));
            }
        }
        push_counts(cell, &recs, report);
        Ok(())
    })
}

/// Trace distance between the two independent reconstructions of each
/// orthogonal pair.
pub fn run_orthogonality_sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    if cfg.mode != Mode::QubitOrthogonalPairs {
        return Err(Error::Config(format!(
            "orthogonality sweep needs mode qubit-orthogonal-pairs, got {}",
            cfg.mode.as_str()
        )));
    }
    let [t, p] = cfg.resolved_samples().pure_grid;
    let pairs = sample_orthogonal_pairs(t, p)?;
    let jobs: Vec<(InputState, u64)> = pairs
        .iter()
        .enumerate()
        .flat_map(|(k, (a, b))| {
            let id = 2 * k as u64;
            [(InputState::Qubit(*a), id), (InputState::Qubit(*b), id + 1)]
        })
        .collect();
    let pool = thread_pool(cfg.threads)?;
    sweep_cells(cfg, |cell, report| {
        let recs = reconstruct_all(&pool, cell, &jobs)?;
        let dists = recs
            .chunks_exact(2)
            .map(|pair| trace_distance(&pair[0].estimate.rho_out, &pair[1].estimate.rho_out))
            .collect::<Result<Vec<_>>>()?;
        report
            .rows
            .push(cell.summary_row(&aggregate(METRIC_TRACE_DISTANCE, &dists)?));
        let refs: Vec<&Reconstruction> = recs.iter().collect();
        report.rows.extend(cell.convergence_warning(&refs));
        if cfg.state_log {
            for (pair, d) in recs.chunks_exact(2).zip(&dists) {
                for r in pair {
                    let f = fidelity(&r.rho_in, &r.estimate.rho_out)?;
                    let m = BTreeMap::from([
                        (METRIC_FIDELITY.to_owned(), f),
                        (METRIC_TRACE_DISTANCE.to_owned(), *d),
                    ]);
                    report.states.push(cell.log_entry(r, m));
                }
            }
        }
        push_counts(cell, &recs, report);
        Ok(())
    })
}

/// Concurrence and fidelity of reconstructed Bell states, plus the
/// three-sigma CHSH certification flag per cell.
pub fn run_entangled_sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    if cfg.mode != Mode::Entangled {
        return Err(Error::Config(format!(
            "entangled sweep needs mode entangled, got {}",
            cfg.mode.as_str()
        )));
    }
    let jobs: Vec<(InputState, u64)> = sample_bell_states(cfg.resolved_samples().bell_count)?
        .into_iter()
        .enumerate()
        .map(|(i, b)| (InputState::Bell(b), i as u64))
        .collect();
    let pool = thread_pool(cfg.threads)?;
    sweep_cells(cfg, |cell, report| {
        let recs = reconstruct_all(&pool, cell, &jobs)?;
        let mut conc = Vec::with_capacity(recs.len());
        let mut fids = Vec::with_capacity(recs.len());
        for r in &recs {
            conc.push(concurrence(&r.estimate.rho_out)?);
            fids.push(fidelity(&r.rho_in, &r.estimate.rho_out)?);
        }
        let c_summary = aggregate(METRIC_CONCURRENCE, &conc)?;
        let chsh = chsh_guarantee(&c_summary);
        report.rows.push(cell.summary_row(&c_summary));
        report
            .rows
            .push(cell.summary_row(&aggregate(METRIC_FIDELITY, &fids)?));
        report
            .rows
            .push(cell.flag_row(METRIC_CHSH, if chsh { 1.0 } else { 0.0 }, recs.len()));
        let refs: Vec<&Reconstruction> = recs.iter().collect();
        report.rows.extend(cell.convergence_warning(&refs));
        if cfg.state_log {
            for (r, (c, f)) in recs.iter().zip(conc.iter().zip(&fids)) {
                let m = BTreeMap::from([
                    (METRIC_CONCURRENCE.to_owned(), *c),
                    (METRIC_FIDELITY.to_owned(), *f),
                ]);
                report.states.push(cell.log_entry(r, m));
            }
        }
        push_counts(cell, &recs, report);
        Ok(())
    })
}

/// Dispatches on `cfg.mode`.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    match cfg.mode {
        Mode::QubitMixed | Mode::QubitPure => run_qubit_sweep(cfg),
        Mode::QubitOrthogonalPairs => run_orthogonality_sweep(cfg),
        Mode::Entangled => run_entangled_sweep(cfg),
    }
}
