//! The nine parametric damping families and their moment diagnostics.
//!
//! Each constructor builds the direct-basis transition matrix column by
//! column; the hypergeometric-type and beta-binomial probability masses are
//! evaluated in log space to stay finite well beyond d = 20. Families
//! written with a per-level damping rate accept either a scalar (broadcast
//! to every level) or a full length-d vector.

use crate::channel::{check_dim, ChannelError, TransitionMatrix};
use crate::numerics::{log_beta, log_binomial, NumericsError};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Branch point for the removable singularities at gamma = 1.
const UNIT_GAMMA_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("unknown family \"{0}\"")]
    UnknownFamily(String),

    #[error("{family}: parameter {name} out of range: {detail}")]
    ParamOutOfRange {
        family: Family,
        name: &'static str,
        detail: String,
    },

    #[error("{family}: missing parameter \"{name}\"")]
    MissingParam { family: Family, name: &'static str },

    #[error("{family}: unknown parameter \"{name}\"")]
    UnknownParam { family: Family, name: String },

    #[error("{family}: parameter \"{name}\" must be {expected}, got {got}")]
    ParamType {
        family: Family,
        name: String,
        expected: &'static str,
        got: String,
    },

    #[error("gamma vector has {got} entries, expected 1 or {dim}")]
    GammaLength { got: usize, dim: usize },

    #[error("constant_ratio: diagonal entry {diagonal} at level {level} is negative; gamma inadmissible")]
    ConstantRatioInadmissible { level: usize, diagonal: f64 },

    #[error("moments are only defined for the bosonic, hypergeometric, negative_hypergeometric and beta_binomial families, not {0}")]
    UnsupportedMoments(Family),

    #[error("level {level} out of range for dimension {dim}")]
    LevelOutOfRange { level: usize, dim: usize },

    #[error(transparent)]
    Channel(#[from] ChannelError),

    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// The nine damping structures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Bosonic,
    Hypergeometric,
    NegativeHypergeometric,
    BetaBinomial,
    Geometric,
    ConstantRatio,
    TwoJump,
    Lambda,
    V,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::Bosonic,
        Family::Hypergeometric,
        Family::NegativeHypergeometric,
        Family::BetaBinomial,
        Family::Geometric,
        Family::ConstantRatio,
        Family::TwoJump,
        Family::Lambda,
        Family::V,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::Bosonic => "bosonic",
            Family::Hypergeometric => "hypergeometric",
            Family::NegativeHypergeometric => "negative_hypergeometric",
            Family::BetaBinomial => "beta_binomial",
            Family::Geometric => "geometric",
            Family::ConstantRatio => "constant_ratio",
            Family::TwoJump => "two_jump",
            Family::Lambda => "lambda",
            Family::V => "v",
        }
    }

    /// The parameter keys this family accepts in configs and on the CLI.
    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            Family::Bosonic | Family::Geometric | Family::ConstantRatio | Family::V => &["gamma"],
            Family::Hypergeometric | Family::NegativeHypergeometric => &["M", "L"],
            Family::BetaBinomial => &["alpha", "beta"],
            Family::TwoJump => &["gamma1", "gamma2"],
            Family::Lambda => &["gamma"],
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = FamilyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .iter()
            .find(|f| f.name() == s)
            .copied()
            .ok_or_else(|| FamilyError::UnknownFamily(s.to_string()))
    }
}

fn broadcast_gammas(d: usize, gammas: &[f64]) -> Result<Vec<f64>, FamilyError> {
    check_dim(d)?;
    match gammas.len() {
        1 => Ok(vec![gammas[0]; d]),
        n if n == d => Ok(gammas.to_vec()),
        got => Err(FamilyError::GammaLength { got, dim: d }),
    }
}

fn check_unit_interval(family: Family, gammas: &[f64]) -> Result<(), FamilyError> {
    for (n, &g) in gammas.iter().enumerate() {
        if !(0.0..=1.0).contains(&g) {
            return Err(FamilyError::ParamOutOfRange {
                family,
                name: "gamma",
                detail: format!("gamma_{n} = {g} outside [0, 1]"),
            });
        }
    }
    Ok(())
}

fn check_nonnegative(family: Family, gammas: &[f64]) -> Result<(), FamilyError> {
    for (n, &g) in gammas.iter().enumerate() {
        if g.is_nan() || g < 0.0 {
            return Err(FamilyError::ParamOutOfRange {
                family,
                name: "gamma",
                detail: format!("gamma_{n} = {g} must be nonnegative"),
            });
        }
    }
    Ok(())
}

/// Bosonic dissipation: binomial decay columns
/// `Q(m|n) = C(n,m) gamma_n^{n-m} (1-gamma_n)^m`.
pub fn bosonic(d: usize, gammas: &[f64]) -> Result<TransitionMatrix, FamilyError> {
    let gammas = broadcast_gammas(d, gammas)?;
    check_unit_interval(Family::Bosonic, &gammas)?;
    let mut cols = vec![0.0; d * d];
    for n in 0..d {
        let g = gammas[n];
        for m in 0..=n {
            cols[n * d + m] = log_binomial(n as u64, m as i64).exp()
                * g.powi((n - m) as i32)
                * (1.0 - g).powi(m as i32);
        }
    }
    Ok(TransitionMatrix::from_columns(d, cols)?)
}

/// Hypergeometric decay: `Q(m|n) = C(M,m) C(L-M,n-m) / C(L,n)` for
/// integers `0 <= M <= L` with `d-1 <= L`.
pub fn hypergeometric(
    d: usize,
    m_param: u64,
    l_param: u64,
) -> Result<TransitionMatrix, FamilyError> {
    check_dim(d)?;
    let fam = Family::Hypergeometric;
    if m_param > l_param {
        return Err(FamilyError::ParamOutOfRange {
            family: fam,
            name: "M",
            detail: format!("M = {m_param} exceeds L = {l_param}"),
        });
    }
    if d as u64 - 1 > l_param {
        return Err(FamilyError::ParamOutOfRange {
            family: fam,
            name: "L",
            detail: format!("L = {l_param} smaller than d-1 = {}", d - 1),
        });
    }
    let mut cols = vec![0.0; d * d];
    for n in 0..d {
        let log_denom = log_binomial(l_param, n as i64);
        for m in 0..=n {
            let log_p = log_binomial(m_param, m as i64)
                + log_binomial(l_param - m_param, (n - m) as i64)
                - log_denom;
            cols[n * d + m] = log_p.exp();
        }
    }
    Ok(TransitionMatrix::from_columns(d, cols)?)
}

/// Negative-hypergeometric decay:
/// `Q(m|n) = C(m+M-1,m) C(L-M-m,n-m) / C(L,n)` for positive integers
/// `M, L` with `d-1 <= L-M`.
pub fn negative_hypergeometric(
    d: usize,
    m_param: u64,
    l_param: u64,
) -> Result<TransitionMatrix, FamilyError> {
    check_dim(d)?;
    let fam = Family::NegativeHypergeometric;
    if m_param == 0 || l_param == 0 {
        return Err(FamilyError::ParamOutOfRange {
            family: fam,
            name: "M",
            detail: "M and L must be positive integers".to_string(),
        });
    }
    if l_param < m_param || d as u64 - 1 > l_param - m_param {
        return Err(FamilyError::ParamOutOfRange {
            family: fam,
            name: "L",
            detail: format!(
                "need d-1 <= L-M, got L-M = {}",
                l_param as i64 - m_param as i64
            ),
        });
    }
    let mut cols = vec![0.0; d * d];
    for n in 0..d {
        let log_denom = log_binomial(l_param, n as i64);
        for m in 0..=n {
            let log_p = log_binomial(m as u64 + m_param - 1, m as i64)
                + log_binomial(l_param - m_param - m as u64, (n - m) as i64)
                - log_denom;
            cols[n * d + m] = log_p.exp();
        }
    }
    Ok(TransitionMatrix::from_columns(d, cols)?)
}

/// Beta-binomial decay: `Q(m|n) = C(n,m) B(m+alpha, n-m+beta) / B(alpha, beta)`
/// with positive shapes.
pub fn beta_binomial(d: usize, alpha: f64, beta: f64) -> Result<TransitionMatrix, FamilyError> {
    check_dim(d)?;
    if alpha.is_nan() || beta.is_nan() || alpha <= 0.0 || beta <= 0.0 {
        return Err(FamilyError::ParamOutOfRange {
            family: Family::BetaBinomial,
            name: "alpha",
            detail: format!("shapes must be positive, got alpha = {alpha}, beta = {beta}"),
        });
    }
    let log_norm = log_beta(alpha, beta)?;
    let mut cols = vec![0.0; d * d];
    for n in 0..d {
        for m in 0..=n {
            let log_p = log_binomial(n as u64, m as i64)
                + log_beta(m as f64 + alpha, (n - m) as f64 + beta)?
                - log_norm;
            cols[n * d + m] = log_p.exp();
        }
    }
    Ok(TransitionMatrix::from_columns(d, cols)?)
}

/// Geometric damping:
/// `Q(m|n) = (1-gamma_n)/(1-gamma_n^{n+1}) gamma_n^{n-m}`, with the
/// removable singularity at gamma = 1 evaluated as the uniform column.
pub fn geometric(d: usize, gammas: &[f64]) -> Result<TransitionMatrix, FamilyError> {
    let gammas = broadcast_gammas(d, gammas)?;
    check_nonnegative(Family::Geometric, &gammas)?;
    let mut cols = vec![0.0; d * d];
    for n in 0..d {
        let g = gammas[n];
        if (1.0 - g).abs() < UNIT_GAMMA_TOL {
            for m in 0..=n {
                cols[n * d + m] = 1.0 / (n + 1) as f64;
            }
        } else {
            let norm = (1.0 - g) / (1.0 - g.powi(n as i32 + 1));
            for m in 0..=n {
                cols[n * d + m] = norm * g.powi((n - m) as i32);
            }
        }
    }
    Ok(TransitionMatrix::from_columns(d, cols)?)
}

/// Constant ratio between adjacent decay probabilities:
/// `Q(m|n) = gamma_n^{n-m}` off the diagonal and
/// `(1 - 2 gamma_n + gamma_n^{n+1})/(1 - gamma_n)` on it.
///
/// Rejects parameters that drive any diagonal entry negative, reporting
/// the first violating level.
pub fn constant_ratio(d: usize, gammas: &[f64]) -> Result<TransitionMatrix, FamilyError> {
    let gammas = broadcast_gammas(d, gammas)?;
    check_nonnegative(Family::ConstantRatio, &gammas)?;
    let mut cols = vec![0.0; d * d];
    for n in 0..d {
        let g = gammas[n];
        let diagonal = if (1.0 - g).abs() < UNIT_GAMMA_TOL {
            // limit of (1 - 2g + g^{n+1})/(1 - g) at g -> 1
            1.0 - n as f64
        } else {
            (1.0 - 2.0 * g + g.powi(n as i32 + 1)) / (1.0 - g)
        };
        if diagonal < 0.0 {
            return Err(FamilyError::ConstantRatioInadmissible { level: n, diagonal });
        }
        for m in 0..n {
            cols[n * d + m] = g.powi((n - m) as i32);
        }
        cols[n * d + n] = diagonal;
    }
    Ok(TransitionMatrix::from_columns(d, cols)?)
}

/// Two-jump limited damping: level `n` keeps its population with weight 1
/// and decays by one or two levels with weights `gamma1`, `gamma2`.
///
/// With `d = 2` the channel degenerates to the single-jump column form;
/// `gamma2` is ignored with a warning.
pub fn two_jump(d: usize, gamma1: f64, gamma2: f64) -> Result<TransitionMatrix, FamilyError> {
    check_dim(d)?;
    let fam = Family::TwoJump;
    if gamma1.is_nan() || gamma2.is_nan() || gamma1 < 0.0 || gamma2 < 0.0 {
        return Err(FamilyError::ParamOutOfRange {
            family: fam,
            name: "gamma1",
            detail: format!("rates must be nonnegative, got ({gamma1}, {gamma2})"),
        });
    }
    if d == 2 && gamma2 != 0.0 {
        eprintln!("warning: two_jump with d=2 has no two-level jump; gamma2 = {gamma2} ignored");
    }
    let mut cols = vec![0.0; d * d];
    cols[0] = 1.0;
    cols[d + 1] = 1.0 / (1.0 + gamma1);
    cols[d] = gamma1 / (1.0 + gamma1);
    for n in 2..d {
        let norm = 1.0 / (1.0 + gamma1 + gamma2);
        cols[n * d + n] = norm;
        cols[n * d + n - 1] = gamma1 * norm;
        cols[n * d + n - 2] = gamma2 * norm;
    }
    Ok(TransitionMatrix::from_columns(d, cols)?)
}

/// Lambda channel: only the uppermost level decays, geometrically, to
/// every lower level; all other levels are noise-free.
pub fn lambda_channel(d: usize, gamma: f64) -> Result<TransitionMatrix, FamilyError> {
    check_dim(d)?;
    if gamma.is_nan() || gamma < 0.0 {
        return Err(FamilyError::ParamOutOfRange {
            family: Family::Lambda,
            name: "gamma",
            detail: format!("gamma = {gamma} must be nonnegative"),
        });
    }
    let mut cols = vec![0.0; d * d];
    for n in 0..d - 1 {
        cols[n * d + n] = 1.0;
    }
    let top = d - 1;
    if (1.0 - gamma).abs() < UNIT_GAMMA_TOL {
        for m in 0..d {
            cols[top * d + m] = 1.0 / d as f64;
        }
    } else {
        let norm = (1.0 - gamma) / (1.0 - gamma.powi(d as i32));
        for m in 0..d {
            cols[top * d + m] = norm * gamma.powi((top - m) as i32);
        }
    }
    Ok(TransitionMatrix::from_columns(d, cols)?)
}

/// V channel: every level decays only to the ground level,
/// `Q(m|n) = (1-gamma_n) delta_{m,n} + gamma_n delta_{m,0}`.
pub fn v_channel(d: usize, gammas: &[f64]) -> Result<TransitionMatrix, FamilyError> {
    let gammas = broadcast_gammas(d, gammas)?;
    check_unit_interval(Family::V, &gammas)?;
    let mut cols = vec![0.0; d * d];
    for n in 0..d {
        cols[n * d + n] += 1.0 - gammas[n];
        cols[n * d] += gammas[n];
    }
    Ok(TransitionMatrix::from_columns(d, cols)?)
}

/// A value of a named channel parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Integer(i64),
    Real(f64),
    RealList(Vec<f64>),
}

impl ParamValue {
    pub fn as_real(&self) -> Option<f64> {
        match self {
            ParamValue::Integer(i) => Some(*i as f64),
            ParamValue::Real(x) => Some(*x),
            ParamValue::RealList(_) => None,
        }
    }

    fn as_integer(&self) -> Option<i64> {
        match self {
            ParamValue::Integer(i) => Some(*i),
            ParamValue::Real(x) if x.fract().abs() < 1e-9 && x.abs() < 2f64.powi(53) => {
                Some(*x as i64)
            }
            _ => None,
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Integer(i) => write!(f, "{i}"),
            ParamValue::Real(x) => write!(f, "{x}"),
            ParamValue::RealList(xs) => {
                let joined: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
                write!(f, "{}", joined.join(";"))
            }
        }
    }
}

/// Named parameters, ordered for deterministic output.
pub type Params = BTreeMap<String, ParamValue>;

/// A fully specified channel: family, dimension, and parameter values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub family: Family,
    pub dim: usize,
    pub params: Params,
}

impl ChannelSpec {
    pub fn new(family: Family, dim: usize, params: Params) -> Self {
        Self {
            family,
            dim,
            params,
        }
    }

    fn real_param(&self, name: &'static str) -> Result<f64, FamilyError> {
        let v = self.params.get(name).ok_or(FamilyError::MissingParam {
            family: self.family,
            name,
        })?;
        v.as_real().ok_or_else(|| FamilyError::ParamType {
            family: self.family,
            name: name.to_string(),
            expected: "a real number",
            got: v.to_string(),
        })
    }

    fn integer_param(&self, name: &'static str) -> Result<u64, FamilyError> {
        let v = self.params.get(name).ok_or(FamilyError::MissingParam {
            family: self.family,
            name,
        })?;
        v.as_integer()
            .filter(|i| *i >= 0)
            .map(|i| i as u64)
            .ok_or_else(|| FamilyError::ParamType {
                family: self.family,
                name: name.to_string(),
                expected: "a nonnegative integer",
                got: v.to_string(),
            })
    }

    fn gamma_param(&self, name: &'static str) -> Result<Vec<f64>, FamilyError> {
        let v = self.params.get(name).ok_or(FamilyError::MissingParam {
            family: self.family,
            name,
        })?;
        match v {
            ParamValue::Integer(i) => Ok(vec![*i as f64]),
            ParamValue::Real(x) => Ok(vec![*x]),
            ParamValue::RealList(xs) => Ok(xs.clone()),
        }
    }

    fn check_param_names(&self) -> Result<(), FamilyError> {
        let allowed = self.family.param_names();
        for key in self.params.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(FamilyError::UnknownParam {
                    family: self.family,
                    name: key.clone(),
                });
            }
        }
        Ok(())
    }

    /// Builds the direct-basis transition matrix for this spec.
    pub fn transition(&self) -> Result<TransitionMatrix, FamilyError> {
        self.check_param_names()?;
        let d = self.dim;
        match self.family {
            Family::Bosonic => bosonic(d, &self.gamma_param("gamma")?),
            Family::Hypergeometric => {
                hypergeometric(d, self.integer_param("M")?, self.integer_param("L")?)
            }
            Family::NegativeHypergeometric => {
                negative_hypergeometric(d, self.integer_param("M")?, self.integer_param("L")?)
            }
            Family::BetaBinomial => {
                beta_binomial(d, self.real_param("alpha")?, self.real_param("beta")?)
            }
            Family::Geometric => geometric(d, &self.gamma_param("gamma")?),
            Family::ConstantRatio => constant_ratio(d, &self.gamma_param("gamma")?),
            Family::TwoJump => two_jump(d, self.real_param("gamma1")?, self.real_param("gamma2")?),
            Family::Lambda => lambda_channel(d, self.real_param("gamma")?),
            Family::V => v_channel(d, &self.gamma_param("gamma")?),
        }
    }

    /// Closed-form `(mean, variance)` of the decay distribution of level
    /// `n`, for the four families with textbook moments.
    pub fn moments(&self, n: usize) -> Result<(f64, f64), FamilyError> {
        if n >= self.dim {
            return Err(FamilyError::LevelOutOfRange {
                level: n,
                dim: self.dim,
            });
        }
        let nf = n as f64;
        match self.family {
            Family::Bosonic => {
                let gammas = broadcast_gammas(self.dim, &self.gamma_param("gamma")?)?;
                let g = gammas[n];
                Ok((nf * (1.0 - g), nf * g * (1.0 - g)))
            }
            Family::Hypergeometric => {
                let (m_param, l_param) = (
                    self.integer_param("M")? as f64,
                    self.integer_param("L")? as f64,
                );
                let ratio = m_param / l_param;
                let mean = nf * ratio;
                let var = if l_param <= 1.0 || n == 0 {
                    0.0
                } else {
                    nf * ratio * (1.0 - ratio) * (l_param - nf) / (l_param - 1.0)
                };
                Ok((mean, var))
            }
            Family::NegativeHypergeometric => {
                let (m_param, l_param) = (
                    self.integer_param("M")? as f64,
                    self.integer_param("L")? as f64,
                );
                let mean = nf * m_param / (l_param - nf + 1.0);
                let var = if n == 0 {
                    0.0
                } else {
                    mean * (1.0 - mean / nf) * (l_param + 1.0) / (l_param - nf + 2.0)
                };
                Ok((mean, var))
            }
            Family::BetaBinomial => {
                let (alpha, beta) = (self.real_param("alpha")?, self.real_param("beta")?);
                let xi = alpha / (alpha + beta);
                let mean = nf * xi;
                let var = nf * xi * (1.0 - xi) * (alpha + beta + nf) / (alpha + beta + 1.0);
                Ok((mean, var))
            }
            other => Err(FamilyError::UnsupportedMoments(other)),
        }
    }
}
