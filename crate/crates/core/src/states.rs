//! Input states and the Cholesky parametrization used by the estimator.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, ZERO};

/// Spherical coordinates of a qubit inside the Bloch ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochParams {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl BlochParams {
    pub fn new(r: f64, theta: f64, phi: f64) -> Result<Self> {
        let b = Self { r, theta, phi };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.r) {
            return Err(Error::InvalidParameter(format!(
                "r = {} outside [0, 1]",
                self.r
            )));
        }
        if !(0.0..=PI).contains(&self.theta) {
            return Err(Error::InvalidParameter(format!(
                "theta = {} outside [0, π]",
                self.theta
            )));
        }
        if !(0.0..2.0 * PI).contains(&self.phi) {
            return Err(Error::InvalidParameter(format!(
                "phi = {} outside [0, 2π)",
                self.phi
            )));
        }
        Ok(())
    }

    /// The antipodal point (π − θ, φ + π): the unique state orthogonal to a
    /// pure qubit.
    pub fn antipode(&self) -> Self {
        Self {
            r: self.r,
            theta: PI - self.theta,
            phi: (self.phi + PI).rem_euclid(2.0 * PI),
        }
    }
}

/// Relative phase of a maximally entangled pair (|00⟩ + e^{iα}|11⟩)/√2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellParams {
    pub alpha: f64,
}

/// ρ = ½ [[1 + r cosθ, rΔ], [rΔ*, 1 − r cosθ]], Δ = sinθ cosφ − i sinθ sinφ.
pub fn bloch_state(b: &BlochParams) -> Result<DensityMatrix> {
    b.validate()?;
    let (st, ct) = b.theta.sin_cos();
    let delta = C64::new(st * b.phi.cos(), -st * b.phi.sin());
    let m = ComplexMatrix::from_rows([
        [C64::new(0.5 * (1.0 + b.r * ct), 0.0), delta * (0.5 * b.r)],
        [
            delta.conj() * (0.5 * b.r),
            C64::new(0.5 * (1.0 - b.r * ct), 0.0),
        ],
    ]);
    DensityMatrix::new(m)
}

/// Ket of a pure Bloch-sphere state, |ψ⟩ = (cos θ/2, e^{iφ} sin θ/2).
pub fn bloch_ket(theta: f64, phi: f64) -> [C64; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    [C64::new(c, 0.0), C64::from_polar(s, phi)]
}

/// Recovers (r, θ, φ) from a qubit density matrix.
pub fn bloch_params_of(rho: &DensityMatrix) -> Result<BlochParams> {
    let [x, y, z] = rho.bloch_vector()?;
    let r = (x * x + y * y + z * z).sqrt();
    if r == 0.0 {
        return Ok(BlochParams {
            r: 0.0,
            theta: 0.0,
            phi: 0.0,
        });
    }
    let theta = (z / r).clamp(-1.0, 1.0).acos();
    let phi = y.atan2(x).rem_euclid(2.0 * PI);
    Ok(BlochParams {
        r: r.min(1.0),
        theta,
        phi,
    })
}

pub fn bell_ket(alpha: f64) -> [C64; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [C64::new(s, 0.0), ZERO, ZERO, C64::from_polar(s, alpha)]
}

/// |Φ(α)⟩⟨Φ(α)|
pub fn bell_state(b: &BellParams) -> DensityMatrix {
    DensityMatrix::new(ComplexMatrix::projector(&bell_ket(b.alpha)))
        .expect("rank-one projector is a valid state")
}

/// Real parameter vector of a lower-triangular Cholesky factor `W`.
///
/// Layout: the first `d` entries are the real diagonal; the remaining pairs
/// fill the strictly lower triangle as (re, im), sub-diagonal first, then
/// moving away from the diagonal, each sub-diagonal read top to bottom. For
/// d = 2 this is W = [[w1, 0], [w3 + i w4, w2]]; for d = 4 it reproduces the
/// 16-parameter layout (w5 + i w6 at (2,1), w7 + i w8 at (3,2), …,
/// w15 + i w16 at (4,1)).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CholeskyParams {
    pub w: Vec<f64>,
}

impl CholeskyParams {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        dim_for_len(w.len())?;
        Ok(Self { w })
    }

    pub fn dim(&self) -> usize {
        dim_for_len(self.w.len()).expect("length validated at construction")
    }

    /// Parameters for the maximally mixed state (W = identity).
    pub fn identity(dim: usize) -> Self {
        let mut w = vec![0.0; dim * dim];
        w[..dim].iter_mut().for_each(|x| *x = 1.0);
        Self { w }
    }

    /// Rescales to unit norm and fixes the sign so the leading nonzero
    /// entry is positive. `ρ(w)` is invariant under both operations.
    pub fn canonical(&self) -> Self {
        let norm = self.w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return self.clone();
        }
        let sign = self
            .w
            .iter()
            .find(|x| **x != 0.0)
            .map(|x| x.signum())
            .unwrap_or(1.0);
        Self {
            w: self.w.iter().map(|x| sign * x / norm).collect(),
        }
    }
}

pub(crate) fn dim_for_len(len: usize) -> Result<usize> {
    match len {
        4 => Ok(2),
        16 => Ok(4),
        1 => Ok(1),
        9 => Ok(3),
        _ => Err(Error::InvalidParameter(format!(
            "Cholesky vector length {len} is not a square of a supported dimension"
        ))),
    }
}

/// Positions (row, col) of the strictly lower triangle in parameter order.
pub(crate) fn lower_positions(dim: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(dim * (dim - 1) / 2);
    for offset in 1..dim {
        for col in 0..dim - offset {
            out.push((col + offset, col));
        }
    }
    out
}

/// Fills W from a parameter slice (no allocation checks beyond length).
pub(crate) fn fill_lower_triangular(
    w: &[f64],
    dim: usize,
    positions: &[(usize, usize)],
    out: &mut [C64],
) {
    out.iter_mut().for_each(|z| *z = ZERO);
    for i in 0..dim {
        out[i * dim + i] = C64::new(w[i], 0.0);
    }
    for (k, &(r, c)) in positions.iter().enumerate() {
        out[r * dim + c] = C64::new(w[dim + 2 * k], w[dim + 2 * k + 1]);
    }
}

pub fn cholesky_factor(w: &CholeskyParams) -> ComplexMatrix {
    let dim = w.dim();
    let mut data = vec![ZERO; dim * dim];
    fill_lower_triangular(&w.w, dim, &lower_positions(dim), &mut data);
    ComplexMatrix::from_row_major(dim, &data).expect("finite parameters")
}

/// ρ = W†W / Tr(W†W)
pub fn cholesky_to_density(w: &CholeskyParams) -> Result<DensityMatrix> {
    if w.w.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    if w.w.iter().all(|&x| x == 0.0) {
        return Err(Error::InvalidParameter(
            "all-zero Cholesky vector has no trace normalization".into(),
        ));
    }
    let wm = cholesky_factor(w);
    let gram = &wm.adjoint() * &wm;
    DensityMatrix::from_unnormalized(gram)
}

/// Regular grid over the Bloch ball: r ∈ {i/(n_r−1)}, θ ∈ {jπ/(n_θ−1)},
/// φ ∈ {2πk/n_φ}. A count of one pins that coordinate at zero.
pub fn sample_mixed_qubits(n_r: usize, n_theta: usize, n_phi: usize) -> Result<Vec<BlochParams>> {
    if n_r == 0 || n_theta == 0 || n_phi == 0 {
        return Err(Error::InvalidParameter("grid counts must be >= 1".into()));
    }
    let rs = closed_grid(n_r, 1.0);
    let thetas = closed_grid(n_theta, PI);
    let phis: Vec<f64> = (0..n_phi)
        .map(|k| 2.0 * PI * k as f64 / n_phi as f64)
        .collect();
    let mut out = Vec::with_capacity(n_r * n_theta * n_phi);
    for &r in &rs {
        for &theta in &thetas {
            for &phi in &phis {
                out.push(BlochParams { r, theta, phi });
            }
        }
    }
    Ok(out)
}

fn closed_grid(n: usize, max: f64) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    (0..n)
        .map(|i| {
            if i == n - 1 {
                max
            } else {
                max * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// The r = 1 shell of the mixed grid.
pub fn sample_pure_qubits(n_theta: usize, n_phi: usize) -> Result<Vec<BlochParams>> {
    if n_theta == 0 || n_phi == 0 {
        return Err(Error::InvalidParameter("grid counts must be >= 1".into()));
    }
    let thetas = closed_grid(n_theta, PI);
    let mut out = Vec::with_capacity(n_theta * n_phi);
    for &theta in &thetas {
        for k in 0..n_phi {
            out.push(BlochParams {
                r: 1.0,
                theta,
                phi: 2.0 * PI * k as f64 / n_phi as f64,
            });
        }
    }
    Ok(out)
}

/// Splits the pure grid into antipodal pairs. Needs an even `n_phi` so the
/// partner φ + π stays on the grid.
pub fn sample_orthogonal_pairs(
    n_theta: usize,
    n_phi: usize,
) -> Result<Vec<(BlochParams, BlochParams)>> {
    if !n_phi.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "orthogonal pairing needs an even phi count, got {n_phi}"
        )));
    }
    let grid = sample_pure_qubits(n_theta, n_phi)?;
    let idx = |j: usize, k: usize| j * n_phi + k;
    let mut out = Vec::with_capacity(grid.len() / 2);
    for j in 0..n_theta {
        for k in 0..n_phi {
            let partner = idx(n_theta - 1 - j, (k + n_phi / 2) % n_phi);
            if idx(j, k) < partner {
                out.push((grid[idx(j, k)], grid[partner]));
            }
        }
    }
    Ok(out)
}

/// α = 2πk/n for k = 0…n−1.
pub fn sample_bell_states(n: usize) -> Result<Vec<BellParams>> {
    if n == 0 {
        return Err(Error::InvalidParameter("Bell sample needs n >= 1".into()));
    }
    Ok((0..n)
        .map(|k| BellParams {
            alpha: 2.0 * PI * k as f64 / n as f64,
        })
        .collect())
}
