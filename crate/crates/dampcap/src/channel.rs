//! Multilevel damping channels: amplitude matrices, Kraus operators, and
//! the transition matrices for direct- and Fourier-basis coding.
//!
//! A damping channel is fixed by real nonnegative amplitudes `c[m][n]`
//! (nonzero only for `m <= n`) with unit-norm columns. Its Kraus operators
//! are `A_k = sum_{r>=k} c[r-k][r] |r-k><r|`, so `|c[m][n]|^2` is the
//! probability of decaying from level `n` to level `m`. The Fourier basis
//! is `|n~> = (1/sqrt d) sum_j w^{nj} |j>` with `w = exp(2 pi i / d)`.

use crate::numerics::{HermitianMatrix, NumericsError, ProbVector};
use num_complex::Complex64;
use thiserror::Error;

const COLUMN_SUM_TOL: f64 = 1e-9;
const SUPPORT_TOL: f64 = 1e-12;
const IMAG_RESIDUE_TOL: f64 = 1e-10;
const COMPLETENESS_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("dimension must lie in 2..={}, got {0}", crate::MAX_DIM)]
    BadDimension(usize),

    #[error("matrix data has {got} entries, expected {expected}")]
    BadShape { got: usize, expected: usize },

    #[error("transition entry Q({m}|{n}) = {value} outside [0, 1]")]
    BadTransitionEntry { m: usize, n: usize, value: f64 },

    #[error("column {n} sums to {sum}, expected 1 within 1e-9")]
    ColumnNotStochastic { n: usize, sum: f64 },

    #[error("amplitude c({m},{n}) = {value} must be nonnegative")]
    NegativeAmplitude { m: usize, n: usize, value: f64 },

    #[error("amplitude support above the diagonal: c({m},{n}) = {value} with m > n")]
    UpwardAmplitude { m: usize, n: usize, value: f64 },

    #[error("upward transition Q({m}|{n}) = {value} with m > n: not a damping channel")]
    UpwardTransition { m: usize, n: usize, value: f64 },

    #[error("Kraus completeness violated at ({i},{j}): residue {residue:.3e}")]
    NotTracePreserving { i: usize, j: usize, residue: f64 },

    #[error(
        "imaginary residue {residue:.3e} in Fourier transition entry {k}: implementation fault"
    )]
    ImaginaryResidue { k: usize, residue: f64 },

    #[error("level index {index} out of range for dimension {dim}")]
    LevelOutOfRange { index: usize, dim: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub(crate) fn check_dim(dim: usize) -> Result<(), ChannelError> {
    if !(2..=crate::MAX_DIM).contains(&dim) {
        return Err(ChannelError::BadDimension(dim));
    }
    Ok(())
}

/// The real nonnegative coefficients `c[m][n]` defining a damping channel.
///
/// Upper-triangular support (`c[m][n] = 0` for `m > n`) and unit-norm
/// columns (`sum_m c[m][n]^2 = 1`, the trace-preserving condition) are
/// enforced at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeMatrix {
    dim: usize,
    c: Vec<f64>, // row-major
}

impl AmplitudeMatrix {
    pub fn new(dim: usize, c: Vec<f64>) -> Result<Self, ChannelError> {
        check_dim(dim)?;
        if c.len() != dim * dim {
            return Err(ChannelError::BadShape {
                got: c.len(),
                expected: dim * dim,
            });
        }
        for m in 0..dim {
            for n in 0..dim {
                let v = c[m * dim + n];
                if m > n && v != 0.0 {
                    return Err(ChannelError::UpwardAmplitude { m, n, value: v });
                }
                if v < 0.0 || v.is_nan() {
                    return Err(ChannelError::NegativeAmplitude { m, n, value: v });
                }
            }
        }
        for n in 0..dim {
            let norm: f64 = (0..=n).map(|m| c[m * dim + n] * c[m * dim + n]).sum();
            if (norm - 1.0).abs() > COLUMN_SUM_TOL {
                return Err(ChannelError::ColumnNotStochastic { n, sum: norm });
            }
        }
        Ok(Self { dim, c })
    }

    /// The lossless channel, `c[m][n] = delta_{m,n}`.
    pub fn identity(dim: usize) -> Result<Self, ChannelError> {
        check_dim(dim)?;
        let mut c = vec![0.0; dim * dim];
        for n in 0..dim {
            c[n * dim + n] = 1.0;
        }
        Ok(Self { dim, c })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, m: usize, n: usize) -> f64 {
        self.c[m * self.dim + n]
    }
}

/// A column-stochastic conditional-probability matrix `q(m|n)`.
///
/// Stored column-major; entries are clamped into `[0, 1]` within `1e-12`
/// slack and columns renormalized when their sum drifts from 1 by at most
/// `1e-9`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    dim: usize,
    q: Vec<f64>, // column-major: q[n * dim + m]
}

impl TransitionMatrix {
    /// Builds from row-major entries `rows[m * dim + n] = q(m|n)`.
    pub fn from_rows(dim: usize, rows: Vec<f64>) -> Result<Self, ChannelError> {
        check_dim(dim)?;
        if rows.len() != dim * dim {
            return Err(ChannelError::BadShape {
                got: rows.len(),
                expected: dim * dim,
            });
        }
        let mut q = vec![0.0; dim * dim];
        for m in 0..dim {
            for n in 0..dim {
                q[n * dim + m] = rows[m * dim + n];
            }
        }
        Self::from_columns(dim, q)
    }

    /// Builds from concatenated columns.
    pub fn from_columns(dim: usize, mut q: Vec<f64>) -> Result<Self, ChannelError> {
        check_dim(dim)?;
        if q.len() != dim * dim {
            return Err(ChannelError::BadShape {
                got: q.len(),
                expected: dim * dim,
            });
        }
        for n in 0..dim {
            for m in 0..dim {
                let v = q[n * dim + m];
                if !(-SUPPORT_TOL..=1.0 + SUPPORT_TOL).contains(&v) || v.is_nan() {
                    return Err(ChannelError::BadTransitionEntry { m, n, value: v });
                }
                q[n * dim + m] = v.clamp(0.0, 1.0);
            }
        }
        for n in 0..dim {
            let col = &mut q[n * dim..(n + 1) * dim];
            let sum: f64 = col.iter().sum();
            if (sum - 1.0).abs() > COLUMN_SUM_TOL {
                return Err(ChannelError::ColumnNotStochastic { n, sum });
            }
            for v in col.iter_mut() {
                *v /= sum;
            }
        }
        Ok(Self { dim, q })
    }

    pub fn identity(dim: usize) -> Result<Self, ChannelError> {
        check_dim(dim)?;
        let mut q = vec![0.0; dim * dim];
        for n in 0..dim {
            q[n * dim + n] = 1.0;
        }
        Ok(Self { dim, q })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `q(m|n)`: probability of output `m` given input `n`.
    pub fn entry(&self, m: usize, n: usize) -> f64 {
        self.q[n * self.dim + m]
    }

    /// The conditional distribution of the output given input `n`.
    pub fn column(&self, n: usize) -> &[f64] {
        &self.q[n * self.dim..(n + 1) * self.dim]
    }

    /// Whether `q(m|n)` depends only on `(m - n) mod d`, within `tol`.
    pub fn is_circulant(&self, tol: f64) -> bool {
        let d = self.dim;
        (0..d).all(|n| {
            (0..d).all(|m| (self.entry(m, n) - self.entry((m + d - n) % d, 0)).abs() <= tol)
        })
    }
}

/// The Kraus operators `A_0, ..., A_{d-1}` of a damping channel.
///
/// Completeness `sum_k A_k^dag A_k = I` is verified entrywise at
/// construction (within `1e-10`).
#[derive(Debug, Clone)]
pub struct KrausSet {
    dim: usize,
    ops: Vec<Vec<Complex64>>, // each row-major d x d
}

impl KrausSet {
    fn new(dim: usize, ops: Vec<Vec<Complex64>>) -> Result<Self, ChannelError> {
        check_dim(dim)?;
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = Complex64::ZERO;
                for op in &ops {
                    for r in 0..dim {
                        acc += op[r * dim + i].conj() * op[r * dim + j];
                    }
                }
                let expected = if i == j { 1.0 } else { 0.0 };
                let residue = (acc - expected).norm();
                if residue > COMPLETENESS_TOL {
                    return Err(ChannelError::NotTracePreserving { i, j, residue });
                }
            }
        }
        Ok(Self { dim, ops })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Entry `(r, s)` of the `k`-th Kraus operator.
    pub fn op_entry(&self, k: usize, r: usize, s: usize) -> Complex64 {
        self.ops[k][r * self.dim + s]
    }
}

/// Recovers the amplitude matrix from a direct-basis transition matrix:
/// `c(m|n) = +sqrt(Q(m|n))` under the real-coefficient convention.
///
/// Rejects matrices with support above the diagonal (upward transitions).
pub fn amplitudes_from_transition(q: &TransitionMatrix) -> Result<AmplitudeMatrix, ChannelError> {
    let d = q.dim();
    let mut c = vec![0.0; d * d];
    for n in 0..d {
        for m in 0..d {
            let v = q.entry(m, n);
            if m > n {
                if v > SUPPORT_TOL {
                    return Err(ChannelError::UpwardTransition { m, n, value: v });
                }
                continue;
            }
            c[m * d + n] = v.sqrt();
        }
    }
    AmplitudeMatrix::new(d, c)
}

/// The Kraus operators `A_k = sum_{r=k}^{d-1} c[r-k][r] |r-k><r|`.
pub fn kraus_operators(c: &AmplitudeMatrix) -> Result<KrausSet, ChannelError> {
    let d = c.dim();
    let mut ops = Vec::with_capacity(d);
    for k in 0..d {
        let mut op = vec![Complex64::ZERO; d * d];
        for r in k..d {
            op[(r - k) * d + r] = Complex64::new(c.entry(r - k, r), 0.0);
        }
        ops.push(op);
    }
    KrausSet::new(d, ops)
}

/// Applies the channel `E(rho) = sum_k A_k rho A_k^dag`.
pub fn apply_channel(
    kraus: &KrausSet,
    rho: &HermitianMatrix,
) -> Result<HermitianMatrix, ChannelError> {
    let d = kraus.dim();
    if rho.dim() != d {
        return Err(ChannelError::DimensionMismatch(d, rho.dim()));
    }
    let mut out = vec![Complex64::ZERO; d * d];
    let mut tmp = vec![Complex64::ZERO; d * d];
    for op in &kraus.ops {
        // tmp = A_k rho
        for i in 0..d {
            for j in 0..d {
                let mut acc = Complex64::ZERO;
                for l in 0..d {
                    acc += op[i * d + l] * rho.entry(l, j);
                }
                tmp[i * d + j] = acc;
            }
        }
        // out += tmp A_k^dag
        for i in 0..d {
            for j in 0..d {
                let mut acc = Complex64::ZERO;
                for l in 0..d {
                    acc += tmp[i * d + l] * op[j * d + l].conj();
                }
                out[i * d + j] += acc;
            }
        }
    }
    Ok(HermitianMatrix::new(d, out)?)
}

/// The direct-basis transition matrix `Q(m|n) = c(m|n)^2`.
pub fn direct_transition(c: &AmplitudeMatrix) -> Result<TransitionMatrix, ChannelError> {
    let d = c.dim();
    let mut cols = vec![0.0; d * d];
    for n in 0..d {
        for m in 0..=n {
            cols[n * d + m] = c.entry(m, n) * c.entry(m, n);
        }
    }
    TransitionMatrix::from_columns(d, cols)
}

/// The `d` powers of `w = exp(2 pi i / d)`: `roots[k] = w^k`.
fn omega_table(d: usize) -> Vec<Complex64> {
    (0..d)
        .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / d as f64))
        .collect()
}

/// The Fourier-basis transition matrix, evaluated from the closed-form
/// triple sum
/// `Q~(m|n) = (1/d^2) sum_l sum_{s<=l} sum_t c[s][l] c[t][l-s+t] w^{(t-s)(m-n)}`.
///
/// The result depends on `(m - n) mod d` only, so the `d` distinct values
/// are computed once and tiled circulantly. Imaginary residues below
/// `1e-10` are discarded; anything larger signals an implementation fault
/// and is reported as an error.
pub fn fourier_transition(c: &AmplitudeMatrix) -> Result<TransitionMatrix, ChannelError> {
    let d = c.dim();
    let w = omega_table(d);
    let mut wheel = vec![0.0; d];
    for (k, slot) in wheel.iter_mut().enumerate() {
        let mut acc = Complex64::ZERO;
        for l in 0..d {
            for s in 0..=l {
                // second column index l - s + t must stay below d
                for t in 0..(d - l + s) {
                    let prod = c.entry(s, l) * c.entry(t, l - s + t);
                    if prod == 0.0 {
                        continue;
                    }
                    let power = ((t as i64 - s as i64) * k as i64).rem_euclid(d as i64);
                    acc += prod * w[power as usize];
                }
            }
        }
        acc /= (d * d) as f64;
        if acc.im.abs() > IMAG_RESIDUE_TOL {
            return Err(ChannelError::ImaginaryResidue {
                k,
                residue: acc.im.abs(),
            });
        }
        *slot = acc.re;
    }
    let mut cols = vec![0.0; d * d];
    for n in 0..d {
        for m in 0..d {
            cols[n * d + m] = wheel[(m + d - n) % d];
        }
    }
    TransitionMatrix::from_columns(d, cols)
}

/// Brute-force Fourier transition matrix: builds each Fourier projector
/// `|n~><n~|`, pushes it through the channel, and projects onto `|m~>`.
///
/// This is the simulation-based ground truth that `fourier_transition`
/// is checked against.
pub fn fourier_transition_oracle(kraus: &KrausSet) -> Result<TransitionMatrix, ChannelError> {
    let d = kraus.dim();
    let w = omega_table(d);
    let scale = 1.0 / d as f64;
    let mut cols = vec![0.0; d * d];
    for n in 0..d {
        let rho = HermitianMatrix::new(d, fourier_projector(&w, d, n))?;
        let out = apply_channel(kraus, &rho)?;
        for m in 0..d {
            let mut acc = Complex64::ZERO;
            for i in 0..d {
                for j in 0..d {
                    acc += scale * w[(m * i) % d].conj() * out.entry(i, j) * w[(m * j) % d];
                }
            }
            cols[n * d + m] = acc.re;
        }
    }
    TransitionMatrix::from_columns(d, cols)
}

/// Row-major entries of `|n~><n~|`.
fn fourier_projector(w: &[Complex64], d: usize, n: usize) -> Vec<Complex64> {
    let scale = 1.0 / d as f64;
    let mut proj = vec![Complex64::ZERO; d * d];
    for i in 0..d {
        for j in 0..d {
            proj[i * d + j] = scale * w[(n * i) % d] * w[(n * j) % d].conj();
        }
    }
    proj
}

/// The channel output on the Fourier projector, `rho~_n = E(|n~><n~|)`,
/// from its closed form
/// `(1/d) sum_{m,s} |m><s| (sum_t c[m][t] c[s][s+t-m]) w^{n(m-s)}`.
pub fn fourier_output_state(
    c: &AmplitudeMatrix,
    n: usize,
) -> Result<HermitianMatrix, ChannelError> {
    let d = c.dim();
    if n >= d {
        return Err(ChannelError::LevelOutOfRange { index: n, dim: d });
    }
    let w = omega_table(d);
    let scale = 1.0 / d as f64;
    let mut data = vec![Complex64::ZERO; d * d];
    for m in 0..d {
        for s in 0..d {
            let mut overlap = 0.0;
            // t runs over m..=d-1 with the second column index s+t-m < d
            let upper = if s > m { d - 1 - (s - m) } else { d - 1 };
            for t in m..=upper {
                overlap += c.entry(m, t) * c.entry(s, s + t - m);
            }
            let power = (n as i64 * (m as i64 - s as i64)).rem_euclid(d as i64);
            data[m * d + s] = scale * overlap * w[power as usize];
        }
    }
    Ok(HermitianMatrix::new(d, data)?)
}

/// Average output-level populations under uniform Fourier-basis inputs:
/// `w_m = (1/d) sum_{t>=m} c[m][t]^2`.
pub fn level_populations(c: &AmplitudeMatrix) -> ProbVector {
    let d = c.dim();
    let w: Vec<f64> = (0..d)
        .map(|m| (m..d).map(|t| c.entry(m, t) * c.entry(m, t)).sum::<f64>() / d as f64)
        .collect();
    ProbVector::new(w).expect("column normalization makes the populations sum to 1")
}
