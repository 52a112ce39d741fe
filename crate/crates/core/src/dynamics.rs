//! Time-parametrized single-qubit unitaries.
//!
//! Time is measured in units of the base period `T`, so `t = 0.25` means a
//! quarter period. The evolution is a Z–Y–Z rotation product whose three
//! angles grow linearly in time at angular frequencies `2π/T_i`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, ZERO};

/// Periods of the three rotation factors, in units of `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsParams {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
}

impl Default for DynamicsParams {
    fn default() -> Self {
        Self {
            t1: 4.0,
            t2: 1.0,
            t3: 2.0,
        }
    }
}

impl DynamicsParams {
    pub fn new(t1: f64, t2: f64, t3: f64) -> Result<Self> {
        let p = Self { t1, t2, t3 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("t1", self.t1), ("t2", self.t2), ("t3", self.t3)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "period {name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Angular frequencies ω_i = 2π / T_i.
    pub fn omegas(&self) -> [f64; 3] {
        [2.0 * PI / self.t1, 2.0 * PI / self.t2, 2.0 * PI / self.t3]
    }

    pub fn is_default(&self) -> bool {
        *self == Self::default()
    }
}

/// A 2×2 unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(ComplexMatrix);

impl UnitaryMatrix {
    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// max |U U† − I|
    pub fn unitarity_error(&self) -> f64 {
        (&self.0 * &self.0.adjoint()).max_abs_diff(&ComplexMatrix::identity(self.0.dim()))
    }

    pub fn det(&self) -> C64 {
        let m = &self.0;
        m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
    }
}

fn rz(angle: f64) -> ComplexMatrix {
    ComplexMatrix::from_rows([
        [C64::from_polar(1.0, -angle / 2.0), ZERO],
        [ZERO, C64::from_polar(1.0, angle / 2.0)],
    ])
}

fn ry(angle: f64) -> ComplexMatrix {
    let (s, c) = (angle / 2.0).sin_cos();
    ComplexMatrix::from_rows([
        [C64::new(c, 0.0), C64::new(-s, 0.0)],
        [C64::new(s, 0.0), C64::new(c, 0.0)],
    ])
}

/// `e^{iα} Rz(β) Ry(γ) Rz(δ)`: the generic single-qubit unitary.
pub fn general_unitary(alpha: f64, beta: f64, gamma: f64, delta: f64) -> UnitaryMatrix {
    let u = &(&rz(beta) * &ry(gamma)) * &rz(delta);
    UnitaryMatrix(u.scale(C64::from_polar(1.0, alpha)))
}

/// U(t) for the linear-in-time rotation angles, without global phase.
///
/// Defined for every real `t`; negative times show up inside the jitter
/// convolution window.
pub fn evolution_unitary(p: &DynamicsParams, t: f64) -> UnitaryMatrix {
    let [w1, w2, w3] = p.omegas();
    let u = &(&rz(w1 * t) * &ry(w2 * t)) * &rz(w3 * t);
    UnitaryMatrix(u)
}
