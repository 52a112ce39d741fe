//! Time-continuous measurement operators.
//!
//! A fixed projector `M0` observed through the unitary dynamics becomes the
//! Heisenberg-picture operator `M(t) = U†(t) M0 U(t)`. Detector timing jitter
//! replaces `M(t)` by its Gaussian-weighted average over nearby times, which
//! pulls the operator towards the centre of the Bloch ball.

use std::f64::consts::PI;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolution_unitary, DynamicsParams};
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigensystem, pauli, tensor_product, ComplexMatrix, C64, I, ONE, ZERO,
};

/// Hermitian PSD operator tagged with the nominal time it belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOperator {
    /// Nominal time, units of `T`.
    pub time: f64,
    pub matrix: ComplexMatrix,
    /// Jitter width σ_j the operator was smeared with (0 = ideal).
    pub jitter: f64,
}

impl MeasurementOperator {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// The six polarization projectors used as named initial operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
    D,
    A,
    R,
    L,
}

impl Polarization {
    pub const ALL: [Polarization; 6] = [Self::H, Self::V, Self::D, Self::A, Self::R, Self::L];

    /// Unit-norm ket in the {|H⟩, |V⟩} basis.
    pub fn ket(self) -> [C64; 2] {
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        match self {
            Self::H => [ONE, ZERO],
            Self::V => [ZERO, ONE],
            Self::D => [s, s],
            Self::A => [s, -s],
            Self::R => [s, I * s],
            Self::L => [s, -I * s],
        }
    }

    pub fn projector(self) -> ComplexMatrix {
        ComplexMatrix::projector(&self.ket())
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "H" | "h" => Some(Self::H),
            "V" | "v" => Some(Self::V),
            "D" | "d" => Some(Self::D),
            "A" | "a" => Some(Self::A),
            "R" | "r" => Some(Self::R),
            "L" | "l" => Some(Self::L),
            _ => None,
        }
    }
}

/// Ordered set of time instants at which counts are recorded.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSchedule {
    instants: Vec<f64>,
}

impl MeasurementSchedule {
    pub fn new(instants: Vec<f64>) -> Result<Self> {
        if instants.is_empty() {
            return Err(Error::Empty("measurement schedule"));
        }
        if instants.windows(2).any(|w| w[0] >= w[1]) || instants.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidParameter(
                "schedule instants must be finite and strictly increasing".into(),
            ));
        }
        Ok(Self { instants })
    }

    pub fn instants(&self) -> &[f64] {
        &self.instants
    }

    pub fn len(&self) -> usize {
        self.instants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instants.is_empty()
    }

    pub fn contains(&self, t: f64) -> bool {
        self.instants.iter().any(|&s| (s - t).abs() < 1e-12)
    }
}

/// The six instants whose `M_H(t)` operators, weighted by 1/3, resolve the
/// identity for the default dynamics.
pub const IC_POVM_INSTANTS: [f64; 6] = [0.0, 0.25, 0.5, 0.75, 1.25, 1.75];

pub fn ic_povm_schedule() -> MeasurementSchedule {
    MeasurementSchedule {
        instants: IC_POVM_INSTANTS.to_vec(),
    }
}

/// Gaussian timing-jitter kernel and the quadrature used to apply it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JitterModel {
    /// Kernel standard deviation, units of `T`.
    pub sigma: f64,
    /// Truncation half-width as a multiple of `sigma`.
    #[serde(default = "default_window_sigmas")]
    pub window_sigmas: f64,
    /// Quadrature step as a fraction of `sigma`.
    #[serde(default = "default_step_fraction")]
    pub step_fraction: f64,
}

fn default_window_sigmas() -> f64 {
    6.0
}

fn default_step_fraction() -> f64 {
    0.05
}

impl JitterModel {
    pub fn new(sigma: f64) -> Result<Self> {
        let j = Self {
            sigma,
            window_sigmas: default_window_sigmas(),
            step_fraction: default_step_fraction(),
        };
        j.validate()?;
        Ok(j)
    }

    pub fn ideal() -> Self {
        Self {
            sigma: 0.0,
            window_sigmas: default_window_sigmas(),
            step_fraction: default_step_fraction(),
        }
    }

    pub fn with_step_fraction(mut self, step_fraction: f64) -> Self {
        self.step_fraction = step_fraction;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "jitter sigma must be >= 0, got {}",
                self.sigma
            )));
        }
        if !(self.window_sigmas > 0.0 && self.step_fraction > 0.0) {
            return Err(Error::InvalidParameter(
                "jitter window and step must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn window_halfwidth(&self) -> f64 {
        self.window_sigmas * self.sigma
    }

    pub fn quadrature_step(&self) -> f64 {
        self.step_fraction * self.sigma
    }

    /// q(t) = exp(-t²/2σ²) / √(2πσ²)
    pub fn density(&self, t: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        (-t * t / (2.0 * s2)).exp() / (2.0 * PI * s2).sqrt()
    }

    fn half_nodes(&self) -> usize {
        (self.window_sigmas / self.step_fraction).ceil() as usize
    }

    /// Trapezoid integral of the kernel over the truncated window.
    pub fn kernel_mass(&self) -> f64 {
        if self.sigma == 0.0 {
            return 1.0;
        }
        self.raw_weights().iter().map(|(_, w)| w).sum()
    }

    fn raw_weights(&self) -> Vec<(f64, f64)> {
        let h = self.quadrature_step();
        let k = self.half_nodes() as i64;
        (-k..=k)
            .map(|i| {
                let offset = i as f64 * h;
                let end = if i.abs() == k { 0.5 } else { 1.0 };
                (offset, end * h * self.density(offset))
            })
            .collect()
    }

    /// Quadrature nodes as (offset, weight) pairs; weights sum to one so the
    /// smeared operator keeps its trace exactly.
    pub fn weights(&self) -> Vec<(f64, f64)> {
        if self.sigma == 0.0 {
            return vec![(0.0, 1.0)];
        }
        let mut w = self.raw_weights();
        let total: f64 = w.iter().map(|(_, x)| x).sum();
        for (_, x) in &mut w {
            *x /= total;
        }
        w
    }
}

fn check_psd(m0: &ComplexMatrix) -> Result<()> {
    let sys = hermitian_eigensystem(m0)?;
    let min = sys.values.last().copied().unwrap_or(0.0);
    if min < -1e-10 {
        return Err(Error::NotPositive {
            min_eigenvalue: min,
        });
    }
    Ok(())
}

/// Heisenberg-picture operator `U†(t) M0 U(t)`.
pub fn evolve_operator(
    m0: &ComplexMatrix,
    p: &DynamicsParams,
    t: f64,
) -> Result<MeasurementOperator> {
    if m0.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: m0.dim(),
        });
    }
    check_psd(m0)?;
    Ok(MeasurementOperator {
        time: t,
        matrix: evolve_unchecked(m0, p, t),
        jitter: 0.0,
    })
}

fn evolve_unchecked(m0: &ComplexMatrix, p: &DynamicsParams, t: f64) -> ComplexMatrix {
    m0.conjugate_by(evolution_unitary(p, t).matrix())
}

/// Explicit `M_H(t)` for the default periods (T1, T2, T3) = (4, 1, 2).
pub fn m_h_closed_form(t: f64) -> ComplexMatrix {
    let (s, c) = (PI * t).sin_cos();
    let off = -0.5 * (2.0 * PI * t).sin();
    ComplexMatrix::from_rows([
        [C64::new(c * c, 0.0), C64::from_polar(off, PI * t)],
        [C64::from_polar(off, -PI * t), C64::new(s * s, 0.0)],
    ])
}

/// Jitter-smeared operator `∫ M(τ) q(t − τ) dτ`, evaluated by truncated
/// trapezoid quadrature. With σ = 0 this is exactly [`evolve_operator`].
pub fn jittered_operator(
    m0: &ComplexMatrix,
    p: &DynamicsParams,
    j: &JitterModel,
    t: f64,
) -> Result<MeasurementOperator> {
    j.validate()?;
    let mut op = evolve_operator(m0, p, t)?;
    if j.sigma == 0.0 {
        return Ok(op);
    }
    let mut acc = ComplexMatrix::zeros(m0.dim());
    for (offset, w) in j.weights() {
        acc.add_scaled(&evolve_unchecked(m0, p, t + offset), w);
    }
    op.matrix = acc.hermitian_part();
    op.jitter = j.sigma;
    Ok(op)
}

/// Single-qubit operators at each instant of a schedule, all for one jitter
/// value, together with the two-qubit products built from them.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub schedule: MeasurementSchedule,
    pub single: Vec<MeasurementOperator>,
}

impl OperatorSet {
    pub fn new(
        m0: &ComplexMatrix,
        p: &DynamicsParams,
        j: &JitterModel,
        schedule: &MeasurementSchedule,
    ) -> Result<Self> {
        let single = schedule
            .instants()
            .iter()
            .map(|&t| jittered_operator(m0, p, j, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            schedule: schedule.clone(),
            single,
        })
    }

    /// `M_H` at the IC-POVM instants.
    pub fn horizontal(p: &DynamicsParams, j: &JitterModel) -> Result<Self> {
        Self::new(&Polarization::H.projector(), p, j, &ic_povm_schedule())
    }

    /// All ordered pairs (i, j) of single-qubit operators, tensored, in
    /// row-major order over the schedule.
    pub fn pairs(&self) -> Vec<MeasurementOperator> {
        let mut out = Vec::with_capacity(self.single.len() * self.single.len());
        for a in &self.single {
            for b in &self.single {
                out.push(pair_operator(a, b));
            }
        }
        out
    }
}

fn pair_operator(a: &MeasurementOperator, b: &MeasurementOperator) -> MeasurementOperator {
    MeasurementOperator {
        time: a.time,
        matrix: tensor_product(&a.matrix, &b.matrix),
        jitter: a.jitter.max(b.jitter),
    }
}

/// Two-qubit coincidence operator `M̃_H(t_i) ⊗ M̃_H(t_j)`, jitter applied to
/// each arm independently. Times off the IC-POVM schedule are allowed but
/// logged.
pub fn two_qubit_operator(
    p: &DynamicsParams,
    j: &JitterModel,
    t_i: f64,
    t_j: f64,
) -> Result<MeasurementOperator> {
    let schedule = ic_povm_schedule();
    if !(schedule.contains(t_i) && schedule.contains(t_j)) {
        warn!("two-qubit operator requested at ({t_i}, {t_j}), outside the IC-POVM schedule");
    }
    let h = Polarization::H.projector();
    let a = jittered_operator(&h, p, j, t_i)?;
    let b = jittered_operator(&h, p, j, t_j)?;
    Ok(pair_operator(&a, &b))
}

/// One sample of a Bloch-ball trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub purity: f64,
}

impl TrajectoryPoint {
    pub fn radius(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

/// Bloch coordinates Tr(Mσ_i)/Tr(M) and purity Tr(M²)/Tr(M)² of a
/// (possibly jittered) operator along a time grid.
pub fn bloch_trajectory(
    m0: &ComplexMatrix,
    p: &DynamicsParams,
    j: &JitterModel,
    time_grid: &[f64],
) -> Result<Vec<TrajectoryPoint>> {
    if m0.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: m0.dim(),
        });
    }
    let [sx, sy, sz] = pauli();
    time_grid
        .iter()
        .map(|&t| {
            let m = jittered_operator(m0, p, j, t)?.matrix;
            let tr = m.trace().re;
            Ok(TrajectoryPoint {
                t,
                x: m.trace_product(&sx).re / tr,
                y: m.trace_product(&sy).re / tr,
                z: m.trace_product(&sz).re / tr,
                purity: m.trace_product(&m).re / (tr * tr),
            })
        })
        .collect()
}
