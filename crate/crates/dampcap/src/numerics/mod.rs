//! Numerical primitives: safe entropies, log-space combinatorics, and a
//! complex-Hermitian eigensolver for von Neumann entropies.
//!
//! All entropies are in bits (base-2 logarithms); natural logs are used
//! internally for the log-gamma identities and converted at the boundary.

mod eigen;

pub use eigen::{hermitian_eigenvalues, von_neumann_entropy, HermitianMatrix};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance for clamping individual probability entries.
pub(crate) const ENTRY_TOL: f64 = 1e-12;
/// Tolerance on probability normalization at construction.
pub(crate) const SUM_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("xlogx argument {0} outside [0, 1]")]
    XLogXDomain(f64),

    #[error("log_beta requires positive arguments, got ({0}, {1})")]
    BetaDomain(f64, f64),

    #[error("probability entry {value} at index {index} outside [0, 1]")]
    ProbEntry { index: usize, value: f64 },

    #[error("probabilities sum to {0}, expected 1 within 1e-9")]
    ProbSum(f64),

    #[error("dimension must lie in 1..={}, got {0}", crate::MAX_DIM)]
    BadDimension(usize),

    #[error("matrix data has {got} entries, expected {expected}")]
    BadShape { got: usize, expected: usize },

    #[error("matrix not Hermitian: |entry({0},{1}) - conj(entry({1},{0}))| = {2:.3e}")]
    NotHermitian(usize, usize, f64),

    #[error("trace is {0}, expected 1 within 1e-9")]
    TraceNotOne(f64),

    #[error("eigenvalue {0:.3e} below the clipping tolerance -1e-10")]
    NegativeEigenvalue(f64),
}

/// `x * log2(x)` with the convention `0 log 0 = 0`.
///
/// Values below `1e-15` are treated as exactly zero; arguments outside
/// `[0, 1]` (beyond small round-off slack) are a domain error.
pub fn xlogx(x: f64) -> Result<f64, NumericsError> {
    if !(-1e-12..=1.0 + 1e-9).contains(&x) {
        return Err(NumericsError::XLogXDomain(x));
    }
    Ok(xlogx_clamped(x))
}

/// `xlogx` for values already known to lie in `[0, 1]` up to round-off.
#[inline]
pub(crate) fn xlogx_clamped(x: f64) -> f64 {
    if x < 1e-15 {
        0.0
    } else {
        x * x.log2()
    }
}

/// A probability distribution over `d` symbols.
///
/// Entries are clamped into `[0, 1]` within `1e-12` slack and the vector is
/// renormalized when the sum deviates from 1 by at most `1e-9`; anything
/// worse is rejected rather than silently fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbVector {
    entries: Vec<f64>,
}

impl ProbVector {
    pub fn new(entries: Vec<f64>) -> Result<Self, NumericsError> {
        let mut entries = entries;
        if entries.is_empty() {
            return Err(NumericsError::BadDimension(0));
        }
        for (i, e) in entries.iter_mut().enumerate() {
            if !(-ENTRY_TOL..=1.0 + ENTRY_TOL).contains(e) || e.is_nan() {
                return Err(NumericsError::ProbEntry {
                    index: i,
                    value: *e,
                });
            }
            *e = e.clamp(0.0, 1.0);
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(NumericsError::ProbSum(sum));
        }
        for e in entries.iter_mut() {
            *e /= sum;
        }
        Ok(Self { entries })
    }

    /// The uniform distribution over `d` symbols.
    pub fn uniform(d: usize) -> Self {
        Self {
            entries: vec![1.0 / d as f64; d],
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> f64 {
        self.entries[i]
    }

    /// Indices carrying more than the reporting threshold of 0.01.
    pub fn support(&self) -> Vec<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.01)
            .map(|(i, _)| i)
            .collect()
    }
}

impl TryFrom<Vec<f64>> for ProbVector {
    type Error = NumericsError;
    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<ProbVector> for Vec<f64> {
    fn from(p: ProbVector) -> Self {
        p.entries
    }
}

/// Shannon entropy `H(p) = -sum_j p_j log2 p_j` in bits.
pub fn shannon_entropy(p: &ProbVector) -> f64 {
    -p.entries.iter().map(|&x| xlogx_clamped(x)).sum::<f64>()
}

/// `ln C(n, k)` via log-gamma; `-inf` for `k` outside `[0, n]`.
pub fn log_binomial(n: u64, k: i64) -> f64 {
    if k < 0 || k as u64 > n {
        return f64::NEG_INFINITY;
    }
    let (nf, kf) = (n as f64, k as f64);
    libm::lgamma(nf + 1.0) - libm::lgamma(kf + 1.0) - libm::lgamma(nf - kf + 1.0)
}

/// `ln B(a, b) = ln Gamma(a) + ln Gamma(b) - ln Gamma(a+b)` for `a, b > 0`.
pub fn log_beta(a: f64, b: f64) -> Result<f64, NumericsError> {
    if !(a > 0.0 && b > 0.0) {
        return Err(NumericsError::BetaDomain(a, b));
    }
    Ok(libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b))
}
