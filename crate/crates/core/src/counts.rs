//! Forward model: expected and Poisson-noised photon counts.
//!
//! The measured count of one setting is `N' · Tr(M̃ ρ)` where `N'` is a fresh
//! Poisson draw with mean `N` and `M̃` the jitter-smeared operator. Random
//! streams are keyed by (master seed, state index, setting index) so count
//! sets do not depend on evaluation order or thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::dynamics::DynamicsParams;
use crate::error::{Error, Result};
use crate::measurement::{JitterModel, MeasurementOperator, OperatorSet};

/// One measurement setting: its time tag(s), the noiseless count predicted
/// from the ideal operator, and the simulated detector count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub t_i: f64,
    /// Second arm's time tag for coincidence records.
    pub t_j: Option<f64>,
    pub expected: f64,
    pub measured: f64,
}

impl CountRecord {
    pub fn is_coincidence(&self) -> bool {
        self.t_j.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    /// Mean photon (pair) number per setting.
    pub mean_photons: f64,
    pub seed: u64,
    pub poisson_enabled: bool,
    /// Draw the count itself from Pois(N·p) instead of scaling p by a
    /// Poisson-distributed photon number.
    #[serde(default)]
    pub sample_counts: bool,
}

impl NoiseConfig {
    pub fn new(mean_photons: f64, seed: u64, poisson_enabled: bool) -> Result<Self> {
        let cfg = Self {
            mean_photons,
            seed,
            poisson_enabled,
            sample_counts: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn noiseless(mean_photons: f64) -> Self {
        Self {
            mean_photons,
            seed: 0,
            poisson_enabled: false,
            sample_counts: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mean_photons.is_finite() && self.mean_photons > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mean photon number must be positive, got {}",
                self.mean_photons
            )));
        }
        Ok(())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the random stream for (master seed, state, setting).
pub fn stream_seed(master: u64, state: u64, setting: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ state) ^ setting.rotate_left(32))
}

pub fn stream_rng(master: u64, state: u64, setting: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(master, state, setting))
}

/// Setting index reserved for the estimator's restart perturbations.
pub const ESTIMATOR_STREAM: u64 = u64::MAX;

/// N · Tr(M ρ)
pub fn expected_count(rho: &DensityMatrix, m: &MeasurementOperator, n: f64) -> Result<f64> {
    if rho.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: m.dim(),
        });
    }
    Ok(n * m.matrix.trace_product(rho.matrix()).re)
}

/// One sample from Pois(mean).
pub fn poisson_draw(mean: f64, rng: &mut impl Rng) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let dist = Poisson::new(mean).expect("positive finite mean");
    let x: f64 = dist.sample(rng);
    x as u64
}

/// N' · Tr(M̃ ρ_in) with a fresh N' for this setting.
pub fn measured_count(
    rho_in: &DensityMatrix,
    m_jittered: &MeasurementOperator,
    cfg: &NoiseConfig,
    rng: &mut impl Rng,
) -> Result<f64> {
    if rho_in.dim() != m_jittered.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho_in.dim(),
            found: m_jittered.dim(),
        });
    }
    let prob = m_jittered.matrix.trace_product(rho_in.matrix()).re.max(0.0);
    if !cfg.poisson_enabled {
        return Ok(cfg.mean_photons * prob);
    }
    if cfg.sample_counts {
        return Ok(poisson_draw(cfg.mean_photons * prob, rng) as f64);
    }
    Ok(poisson_draw(cfg.mean_photons, rng) as f64 * prob)
}

/// Counts for precomputed ideal/jittered operator sets. `pairs` selects the
/// 36 coincidence settings instead of the six single-arm ones.
pub fn count_set_with_operators(
    rho_in: &DensityMatrix,
    ideal: &OperatorSet,
    jittered: &OperatorSet,
    cfg: &NoiseConfig,
    state_id: u64,
) -> Result<Vec<CountRecord>> {
    cfg.validate()?;
    let n = ideal.single.len();
    match rho_in.dim() {
        2 => ideal
            .single
            .iter()
            .zip(&jittered.single)
            .enumerate()
            .map(|(k, (mi, mj))| {
                let mut rng = stream_rng(cfg.seed, state_id, k as u64);
                Ok(CountRecord {
                    t_i: mi.time,
                    t_j: None,
                    expected: expected_count(rho_in, mi, cfg.mean_photons)?,
                    measured: measured_count(rho_in, mj, cfg, &mut rng)?,
                })
            })
            .collect(),
        4 => {
            let ideal_pairs = ideal.pairs();
            let jittered_pairs = jittered.pairs();
            ideal_pairs
                .iter()
                .zip(&jittered_pairs)
                .enumerate()
                .map(|(k, (mi, mj))| {
                    let mut rng = stream_rng(cfg.seed, state_id, k as u64);
                    Ok(CountRecord {
                        t_i: ideal.single[k / n].time,
                        t_j: Some(ideal.single[k % n].time),
                        expected: expected_count(rho_in, mi, cfg.mean_photons)?,
                        measured: measured_count(rho_in, mj, cfg, &mut rng)?,
                    })
                })
                .collect()
        }
        d => Err(Error::UnsupportedDimension(d)),
    }
}

/// Six single-qubit records over the IC-POVM schedule.
pub fn qubit_count_set(
    rho_in: &DensityMatrix,
    p: &DynamicsParams,
    j: &JitterModel,
    cfg: &NoiseConfig,
    state_id: u64,
) -> Result<Vec<CountRecord>> {
    if rho_in.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho_in.dim(),
        });
    }
    let ideal = OperatorSet::horizontal(p, &JitterModel::ideal())?;
    let jittered = OperatorSet::horizontal(p, j)?;
    count_set_with_operators(rho_in, &ideal, &jittered, cfg, state_id)
}

/// 36 coincidence records over the IC-POVM schedule squared.
pub fn coincidence_count_set(
    rho_in: &DensityMatrix,
    p: &DynamicsParams,
    j: &JitterModel,
    cfg: &NoiseConfig,
    state_id: u64,
) -> Result<Vec<CountRecord>> {
    if rho_in.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho_in.dim(),
        });
    }
    let ideal = OperatorSet::horizontal(p, &JitterModel::ideal())?;
    let jittered = OperatorSet::horizontal(p, j)?;
    count_set_with_operators(rho_in, &ideal, &jittered, cfg, state_id)
}

/// CSV lines `state_id,t_i_over_T,t_j_over_T,expected,measured` (t_j blank
/// for single-arm records).
pub fn records_to_csv(state_id: u64, records: &[CountRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let tj = r.t_j.map(|t| format!("{t}")).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{:.9},{:.9}\n",
            state_id, r.t_i, tj, r.expected, r.measured
        ));
    }
    out
}

pub const COUNTS_CSV_HEADER: &str = "state_id,t_i_over_T,t_j_over_T,expected,measured";
