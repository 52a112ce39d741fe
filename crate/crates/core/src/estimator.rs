//! Maximum-likelihood state reconstruction over Cholesky parameters.
//!
//! The model count of each setting is `N · Tr(M ρ(w))` with the *ideal*
//! (jitter-free) operator, even when the data were produced by a jittered
//! detector. The objective is
//!
//! ```text
//! L(w) = Σ_k (n_M,k − n_E,k)² / n_E,k + ln n_E,k
//! ```
//!
//! with `n_E` floored at a small positive value.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::counts::CountRecord;
use crate::density::DensityMatrix;
use crate::dynamics::DynamicsParams;
use crate::error::{Error, Result};
use crate::linalg::{tensor_product, C64, ZERO};
use crate::measurement::{evolve_operator, Polarization};
use crate::optimize::{GradientDescent, Minimum, NelderMead};
use crate::states::{cholesky_to_density, dim_for_len, lower_positions, CholeskyParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Optimizer {
    NelderMead,
    GradientDescent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimatorConfig {
    pub optimizer: Optimizer,
    pub max_iterations: usize,
    pub convergence_tol: f64,
    pub restarts: usize,
    /// Lower bound on model counts, in photons.
    pub epsilon_floor: f64,
    /// Initial simplex edge (Nelder–Mead) or learning rate (gradient descent).
    pub initial_step: f64,
    /// Standard deviation of the random kick applied before each restart.
    /// With 0 every restart rebuilds a fresh simplex around the incumbent
    /// and the loop ends as soon as a restart stops improving it.
    pub restart_perturbation: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            optimizer: Optimizer::NelderMead,
            max_iterations: 20_000,
            convergence_tol: 1e-9,
            restarts: 10,
            epsilon_floor: 1e-9,
            initial_step: 0.5,
            restart_perturbation: 0.0,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidParameter("restarts must be >= 1".into()));
        }
        if self.epsilon_floor.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::InvalidParameter("epsilon_floor must be > 0".into()));
        }
        if !(self.convergence_tol > 0.0 && self.initial_step > 0.0) {
            return Err(Error::InvalidParameter(
                "convergence_tol and initial_step must be > 0".into(),
            ));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter(
                "max_iterations must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    pub rho_out: DensityMatrix,
    /// Canonical (unit-norm, sign-fixed) optimum.
    pub w_opt: CholeskyParams,
    pub objective: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// The likelihood objective with the ideal operators pre-flattened.
#[derive(Debug, Clone)]
pub struct LikelihoodModel {
    dim: usize,
    positions: Vec<(usize, usize)>,
    /// Transposed operator entries per record, so Tr(Mρ) is an entry-wise dot.
    op_t: Vec<Vec<C64>>,
    measured: Vec<f64>,
    n_photons: f64,
    floor: f64,
}

impl LikelihoodModel {
    pub fn new(
        records: &[CountRecord],
        p: &DynamicsParams,
        n_photons: f64,
        floor: f64,
    ) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::Empty("count records"));
        }
        let pair = records[0].is_coincidence();
        if records.iter().any(|r| r.is_coincidence() != pair) {
            return Err(Error::InvalidParameter(
                "record set mixes single and coincidence settings".into(),
            ));
        }
        let h = Polarization::H.projector();
        let ideal = |t: f64| evolve_operator(&h, p, t).map(|op| op.matrix);
        let op_t = records
            .iter()
            .map(|r| {
                let m = match r.t_j {
                    None => ideal(r.t_i)?,
                    Some(tj) => tensor_product(&ideal(r.t_i)?, &ideal(tj)?),
                };
                let d = m.dim();
                let mut t = vec![ZERO; d * d];
                for a in 0..d {
                    for b in 0..d {
                        t[b * d + a] = m[(a, b)];
                    }
                }
                Ok(t)
            })
            .collect::<Result<Vec<_>>>()?;
        let dim = if pair { 4 } else { 2 };
        Ok(Self {
            dim,
            positions: lower_positions(dim),
            op_t,
            measured: records.iter().map(|r| r.measured).collect(),
            n_photons,
            floor,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.measured.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measured.is_empty()
    }

    /// Model counts N·Tr(M_k ρ(w)); `None` for a degenerate w.
    pub fn model_counts(&self, w: &[f64]) -> Option<Vec<f64>> {
        let gram = self.gram(w)?;
        Some(self.op_t.iter().map(|m| self.count(m, &gram)).collect())
    }

    fn gram(&self, w: &[f64]) -> Option<[C64; 16]> {
        let d = self.dim;
        let mut wm = [ZERO; 16];
        for i in 0..d {
            wm[i * d + i] = C64::new(w[i], 0.0);
        }
        for (k, &(r, c)) in self.positions.iter().enumerate() {
            wm[r * d + c] = C64::new(w[d + 2 * k], w[d + 2 * k + 1]);
        }
        // G = W†W, G_ab = Σ_k conj(W_ka) W_kb
        let mut g = [ZERO; 16];
        let mut trace = 0.0;
        for a in 0..d {
            for b in 0..d {
                let mut acc = ZERO;
                for k in a.max(b)..d {
                    acc += wm[k * d + a].conj() * wm[k * d + b];
                }
                g[a * d + b] = acc;
            }
            trace += g[a * d + a].re;
        }
        if !(trace > 0.0 && trace.is_finite()) {
            return None;
        }
        let inv = 1.0 / trace;
        for z in &mut g[..d * d] {
            *z *= inv;
        }
        Some(g)
    }

    #[inline]
    fn count(&self, op_t: &[C64], rho: &[C64; 16]) -> f64 {
        let mut acc = 0.0;
        for (m, r) in op_t.iter().zip(rho.iter()) {
            acc += m.re * r.re - m.im * r.im;
        }
        self.n_photons * acc
    }

    pub fn value(&self, w: &[f64]) -> f64 {
        let Some(gram) = self.gram(w) else {
            return f64::INFINITY;
        };
        let mut total = 0.0;
        for (m, &measured) in self.op_t.iter().zip(&self.measured) {
            let expected = self.count(m, &gram).max(self.floor);
            let r = measured - expected;
            total += r * r / expected + expected.ln();
        }
        total
    }
}

/// L(w) for one record set.
pub fn likelihood(
    w: &CholeskyParams,
    records: &[CountRecord],
    p: &DynamicsParams,
    n_photons: f64,
    epsilon_floor: f64,
) -> Result<f64> {
    let model = LikelihoodModel::new(records, p, n_photons, epsilon_floor)?;
    if dim_for_len(w.w.len())? != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim() * model.dim(),
            found: w.w.len(),
        });
    }
    Ok(model.value(&w.w))
}

fn run_local(cfg: &EstimatorConfig, model: &LikelihoodModel, start: &[f64]) -> Minimum {
    let f = |w: &[f64]| model.value(w);
    match cfg.optimizer {
        Optimizer::NelderMead => NelderMead {
            initial_step: cfg.initial_step,
            max_iterations: cfg.max_iterations,
            tol: cfg.convergence_tol,
        }
        .minimize(f, start),
        Optimizer::GradientDescent => GradientDescent {
            max_iterations: cfg.max_iterations,
            tol: cfg.convergence_tol,
            fd_step: 1e-7,
            initial_rate: cfg.initial_step * 1e-3,
        }
        .minimize(f, start),
    }
}

/// Best of up to `cfg.restarts` local minimizations. The first start is the
/// maximally mixed state; each later start is the best point found so far,
/// optionally kicked by a Gaussian perturbation.
pub fn estimate_state(
    records: &[CountRecord],
    dim: usize,
    n_photons: f64,
    p: &DynamicsParams,
    cfg: &EstimatorConfig,
    rng: &mut impl Rng,
) -> Result<EstimateResult> {
    cfg.validate()?;
    let model = LikelihoodModel::new(records, p, n_photons, cfg.epsilon_floor)?;
    if model.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: model.dim(),
        });
    }
    let mut best: Option<Minimum> = None;
    let mut iterations = 0;
    let mut start = CholeskyParams::identity(dim).canonical().w;
    for attempt in 0..cfg.restarts {
        if attempt > 0 {
            let base = CholeskyParams {
                w: best.as_ref().map(|m| m.x.clone()).unwrap_or(start.clone()),
            }
            .canonical()
            .w;
            start = base
                .iter()
                .map(|x| {
                    let kick: f64 = StandardNormal.sample(rng);
                    x + cfg.restart_perturbation * kick
                })
                .collect();
        }
        let local = run_local(cfg, &model, &start);
        iterations += local.iterations;
        let gain = match &best {
            None => f64::INFINITY,
            Some(b) => b.value - local.value,
        };
        let stalled = gain <= cfg.convergence_tol * (1.0 + local.value.abs());
        if gain > 0.0 {
            best = Some(local);
        }
        if stalled && cfg.restart_perturbation == 0.0 {
            break;
        }
    }
    let best = best.expect("at least one restart");
    let w_opt = CholeskyParams { w: best.x }.canonical();
    let rho_out = cholesky_to_density(&w_opt)?;
    Ok(EstimateResult {
        rho_out,
        w_opt,
        objective: best.value,
        converged: best.converged,
        iterations,
    })
}
