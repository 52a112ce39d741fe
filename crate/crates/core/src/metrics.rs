//! Figures of merit and sample aggregation.

use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigensystem, psd_sqrt, tensor_product, ComplexMatrix, I, ZERO};

fn same_dim(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

/// Uhlmann fidelity (Tr √(√ρ_out ρ_in √ρ_out))².
pub fn fidelity(rho_in: &DensityMatrix, rho_out: &DensityMatrix) -> Result<f64> {
    same_dim(rho_in, rho_out)?;
    let s = psd_sqrt(rho_out.matrix())?;
    let inner = &(&s * rho_in.matrix()) * &s;
    let sys = hermitian_eigensystem(&inner.hermitian_part())?;
    let root_trace: f64 = sys.values.iter().map(|&l| l.max(0.0).sqrt()).sum();
    Ok((root_trace * root_trace).clamp(0.0, 1.0))
}

/// ½ Σ|λ_i| over the spectrum of ρ_a − ρ_b.
pub fn trace_distance(rho_a: &DensityMatrix, rho_b: &DensityMatrix) -> Result<f64> {
    same_dim(rho_a, rho_b)?;
    let diff = rho_a.matrix() - rho_b.matrix();
    let sys = hermitian_eigensystem(&diff)?;
    Ok((0.5 * sys.values.iter().map(|l| l.abs()).sum::<f64>()).clamp(0.0, 1.0))
}

fn sigma_y_sigma_y() -> ComplexMatrix {
    let sy = ComplexMatrix::from_rows([[ZERO, -I], [I, ZERO]]);
    tensor_product(&sy, &sy)
}

/// Wootters concurrence max(0, λ1 − λ2 − λ3 − λ4).
///
/// The λ_i are the square roots of the eigenvalues of ρ ρ̃ with
/// ρ̃ = (σy⊗σy) ρ* (σy⊗σy); they are computed as the eigenvalues of the
/// Hermitian matrix √(√ρ ρ̃ √ρ), which has the same spectrum.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    let yy = sigma_y_sigma_y();
    let flipped = &(&yy * &rho.matrix().conj()) * &yy;
    let s = psd_sqrt(rho.matrix())?;
    let r = &(&s * &flipped) * &s;
    let sys = hermitian_eigensystem(&r.hermitian_part())?;
    let l: Vec<f64> = sys.values.iter().map(|&x| x.max(0.0).sqrt()).collect();
    Ok((l[0] - l[1] - l[2] - l[3]).clamp(0.0, 1.0))
}

/// Mean, sample standard deviation and size of a set of values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub metric_name: String,
    pub mean: f64,
    pub sd: f64,
    pub n: usize,
}

impl MetricsSummary {
    /// sd / √n
    pub fn stderr(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.sd / (self.n as f64).sqrt()
        }
    }
}

/// Pairwise (cascade) summation; the result depends only on the order of
/// `values`, never on how they were produced.
fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

pub fn aggregate(name: &str, values: &[f64]) -> Result<MetricsSummary> {
    if values.is_empty() {
        return Err(Error::Empty("metric values"));
    }
    let n = values.len();
    let mean = pairwise_sum(values) / n as f64;
    let sd = if n > 1 {
        let dev: Vec<f64> = values.iter().map(|x| (x - mean) * (x - mean)).collect();
        (pairwise_sum(&dev) / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(MetricsSummary {
        metric_name: name.to_owned(),
        mean,
        sd,
        n,
    })
}

/// Three-sigma Bell–CHSH certification: mean − 3·sd > 1/√2.
pub fn chsh_guarantee(s: &MetricsSummary) -> bool {
    s.mean - 3.0 * s.sd > std::f64::consts::FRAC_1_SQRT_2
}
