//! Small dense complex matrices and the Hermitian eigen-machinery built on them.
//!
//! Everything here works on 2×2 and 4×4 operators. The 2×2 eigenproblem is
//! solved in closed form; larger Hermitian matrices go through a cyclic
//! complex Jacobi sweep, which converges quadratically and is unconditionally
//! stable for the tiny sizes involved.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Numerical tolerances shared by the matrix and state checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max entry-wise |M - M†| accepted for a density matrix.
    pub hermitian: f64,
    /// Looser Hermiticity check applied before an eigen-decomposition.
    pub eigen_hermitian: f64,
    /// Allowed deviation of a density-matrix trace from one.
    pub trace: f64,
    /// Eigenvalues in `[-psd_floor, 0)` are treated as zero.
    pub psd_floor: f64,
    /// Eigenvalues below `-psd_reject` make a square root fail.
    pub psd_reject: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-10,
            eigen_hermitian: 1e-8,
            trace: 1e-10,
            psd_floor: 1e-10,
            psd_reject: 1e-6,
        }
    }
}

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from a row-major slice; fails on non-square lengths
    /// or non-finite entries.
    pub fn from_row_major(dim: usize, data: &[C64]) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        let m = Self {
            dim,
            data: data.to_vec(),
        };
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(m)
    }

    pub fn from_rows<const N: usize>(rows: [[C64; N]; N]) -> Self {
        Self {
            dim: N,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// Outer product |a⟩⟨b|.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        assert_eq!(a.len(), b.len());
        let dim = a.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = a[i] * b[j].conj();
            }
        }
        m
    }

    /// Projector |v⟩⟨v| onto a (not necessarily normalized) vector.
    pub fn projector(v: &[C64]) -> Self {
        let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        Self::outer(v, v).scale_real(1.0 / norm2)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    /// Entry-wise complex conjugate (not transposed).
    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// `self += s * other`, used by quadrature loops.
    pub fn add_scaled(&mut self, other: &Self, s: f64) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    /// Tr(self · other) without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// max |M - M†| over entries.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// (M + M†)/2
    pub fn hermitian_part(&self) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
            }
        }
        m
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        tensor_product(self, other)
    }

    /// Unitary conjugation `u† · self · u`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        &(&u.adjoint() * self) * u
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Pauli matrices σx, σy, σz.
pub fn pauli() -> [ComplexMatrix; 3] {
    [
        ComplexMatrix::from_rows([[ZERO, ONE], [ONE, ZERO]]),
        ComplexMatrix::from_rows([[ZERO, -I], [I, ZERO]]),
        ComplexMatrix::from_rows([[ONE, ZERO], [ZERO, -ONE]]),
    ]
}

/// Standard Kronecker product; the first factor indexes the most significant
/// position.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim, b.dim);
    let n = na * nb;
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..na {
        for j in 0..na {
            let aij = a[(i, j)];
            for k in 0..nb {
                for l in 0..nb {
                    out[(i * nb + k, j * nb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Eigen-decomposition of a Hermitian matrix.
///
/// Eigenvalues come back in descending order; column `k` of `vectors` is the
/// eigenvector belonging to `values[k]`.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigensystem {
    /// V diag(f(λ)) V†
    pub fn reassemble_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.vectors.dim();
        let mut out = ComplexMatrix::zeros(n);
        for (k, &lam) in self.values.iter().enumerate() {
            let fl = f(lam);
            if fl == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = self.vectors[(i, k)] * fl;
                for j in 0..n {
                    out[(i, j)] += vik * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reassemble(&self) -> ComplexMatrix {
        self.reassemble_with(|x| x)
    }
}

pub fn hermitian_eigensystem(m: &ComplexMatrix) -> Result<Eigensystem> {
    hermitian_eigensystem_with(m, &Tolerances::default())
}

pub fn hermitian_eigensystem_with(m: &ComplexMatrix, tol: &Tolerances) -> Result<Eigensystem> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let deviation = m.hermitian_deviation();
    if deviation > tol.eigen_hermitian {
        return Err(Error::NotHermitian { deviation });
    }
    let h = m.hermitian_part();
    let mut sys = match h.dim() {
        1 => Eigensystem {
            values: vec![h[(0, 0)].re],
            vectors: ComplexMatrix::identity(1),
        },
        2 => eigh_2x2(&h),
        _ => eigh_jacobi(&h),
    };
    sort_descending(&mut sys);
    Ok(sys)
}

fn eigh_2x2(h: &ComplexMatrix) -> Eigensystem {
    let a = h[(0, 0)].re;
    let b = h[(1, 1)].re;
    let z = h[(0, 1)];
    let mean = 0.5 * (a + b);
    let half_gap = (0.25 * (a - b) * (a - b) + z.norm_sqr()).sqrt();
    let hi = mean + half_gap;
    let lo = mean - half_gap;

    // Pick the well-conditioned form of the top eigenvector.
    let (p, q) = if a >= b {
        (C64::new(hi - b, 0.0), z.conj())
    } else {
        (z, C64::new(hi - a, 0.0))
    };
    let norm = (p.norm_sqr() + q.norm_sqr()).sqrt();
    let (p, q) = if norm > 0.0 {
        (p / norm, q / norm)
    } else {
        (ONE, ZERO)
    };
    let vectors = ComplexMatrix::from_rows([[p, -q.conj()], [q, p.conj()]]);
    Eigensystem {
        values: vec![hi, lo],
        vectors,
    }
}

fn eigh_jacobi(h: &ComplexMatrix) -> Eigensystem {
    const MAX_SWEEPS: usize = 64;
    let n = h.dim();
    let mut a = h.clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Eigensystem {
            values: vec![0.0; n],
            vectors: v,
        };
    }
    let threshold = scale * 1e-17;

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= threshold {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= threshold * 1e-3 {
                    continue;
                }
                let phase = apq / r;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J = diag(1, e^{-i phi}) on (p, q) followed by the real rotation
                // [[c, s], [-s, c]].
                let e = phase.conj();
                let jpp = C64::new(c, 0.0);
                let jpq = C64::new(s, 0.0);
                let jqp = -e * s;
                let jqq = e * c;
                // A <- A J (columns p, q)
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * jpp + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * jqq;
                }
                // A <- J† A (rows p, q)
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
            }
        }
    }
    Eigensystem {
        values: (0..n).map(|i| a[(i, i)].re).collect(),
        vectors: v,
    }
}

fn sort_descending(sys: &mut Eigensystem) {
    let n = sys.values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sys.values[j].total_cmp(&sys.values[i]));
    let values = order.iter().map(|&k| sys.values[k]).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (new_k, &old_k) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, new_k)] = sys.vectors[(i, old_k)];
        }
    }
    sys.values = values;
    sys.vectors = vectors;
}

/// Relative eigenvalue level treated as numerically zero in [`psd_sqrt`].
pub const RANK_NOISE_EPS: f64 = 8.0 * f64::EPSILON;

/// Principal square root of a Hermitian PSD matrix.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    psd_sqrt_with(m, &Tolerances::default())
}

pub fn psd_sqrt_with(m: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let mut sys = hermitian_eigensystem_with(m, tol)?;
    let min = sys.values.last().copied().unwrap_or(0.0);
    if min < -tol.psd_reject {
        return Err(Error::NotPositive {
            min_eigenvalue: min,
        });
    }
    // Eigenvalues at the level of the solver's rounding error are zero; the
    // square root would otherwise blow 1e-17 up to 3e-9.
    let top = sys.values.first().copied().unwrap_or(0.0).max(0.0);
    let noise = RANK_NOISE_EPS * m.dim() as f64 * top;
    for v in &mut sys.values {
        if *v <= noise {
            *v = 0.0;
        }
    }
    Ok(sys.reassemble_with(|x| x.max(0.0).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    pub(crate) fn random_hermitian(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = c(rng.random_range(-1.0..1.0), 0.0);
            for j in i + 1..dim {
                let z = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    #[test]
    fn diagonal_input_is_already_solved() {
        let sys = hermitian_eigensystem(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0])).unwrap();
        assert_eq!(sys.values, vec![1.0, 0.0]);
        assert!(sys.vectors.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn diagonal_projector_eigenvalues() {
        let h = c(0.5, 0.0);
        let m = ComplexMatrix::from_rows([[h, h], [h, h]]);
        let sys = hermitian_eigensystem(&m).unwrap();
        assert!((sys.values[0] - 1.0).abs() < 1e-14);
        assert!(sys.values[1].abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_rows([[ONE, ONE], [ZERO, ONE]]);
        assert!(matches!(
            hermitian_eigensystem(&m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn reconstruction_identity_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dim in [2, 4] {
            for _ in 0..100 {
                let h = random_hermitian(dim, &mut rng);
                let sys = hermitian_eigensystem(&h).unwrap();
                assert!(sys.reassemble().max_abs_diff(&h) < 1e-10);
                let vvd = &sys.vectors * &sys.vectors.adjoint();
                assert!(vvd.max_abs_diff(&ComplexMatrix::identity(dim)) < 1e-10);
                assert!(sys.values.windows(2).all(|w| w[0] >= w[1]));
            }
        }
    }

    #[test]
    fn sqrt_of_diagonal() {
        let r = psd_sqrt(&ComplexMatrix::from_real_diagonal(&[4.0, 1.0])).unwrap();
        assert!(r.max_abs_diff(&ComplexMatrix::from_real_diagonal(&[2.0, 1.0])) < 1e-14);
        let id = psd_sqrt(&ComplexMatrix::identity(4)).unwrap();
        assert!(id.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-14);
    }

    #[test]
    fn sqrt_of_bell_projector_squares_back() {
        let s = 1.0 / 2f64.sqrt();
        let v = [c(s, 0.0), ZERO, ZERO, c(s, 0.0)];
        let rho = ComplexMatrix::projector(&v);
        let r = psd_sqrt(&rho).unwrap();
        assert!((&r * &r).max_abs_diff(&rho) < 1e-8);
        assert!(r.hermitian_deviation() < 1e-12);
    }

    #[test]
    fn sqrt_rejects_negative() {
        let m = ComplexMatrix::from_real_diagonal(&[1.0, -0.1]);
        assert!(matches!(psd_sqrt(&m), Err(Error::NotPositive { .. })));
        // tiny negative values are clamped
        let m = ComplexMatrix::from_real_diagonal(&[1.0, -1e-12]);
        assert!(psd_sqrt(&m).is_ok());
    }

    #[test]
    fn kron_basics() {
        let i4 = tensor_product(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2));
        assert_eq!(i4, ComplexMatrix::identity(4));
        let h = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        assert_eq!(
            tensor_product(&h, &h),
            ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0, 0.0])
        );
    }

    #[test]
    fn kron_trace_factorizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a = random_hermitian(2, &mut rng);
            let b = random_hermitian(2, &mut rng);
            let lhs = tensor_product(&a, &b).trace();
            let rhs = a.trace() * b.trace();
            assert!((lhs - rhs).norm() < 1e-14);
        }
    }

    #[test]
    fn from_row_major_rejects_bad_input() {
        assert!(ComplexMatrix::from_row_major(2, &[ONE; 3]).is_err());
        assert!(matches!(
            ComplexMatrix::from_row_major(1, &[c(f64::NAN, 0.0)]),
            Err(Error::NonFinite)
        ));
    }
}
