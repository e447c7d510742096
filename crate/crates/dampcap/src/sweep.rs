//! Sweep configuration, grid execution, and the figure presets.
//!
//! A sweep is a channel family, one or more dimensions, fixed parameters,
//! and up to two swept scalar axes. Grid points are evaluated independently
//! (in parallel) and reported in a deterministic lexicographic order:
//! dimension first, then the axes sorted by parameter name. Points whose
//! parameters fall outside the family's validity region become skipped
//! rows carrying the reason instead of disappearing.

use crate::capacity::{detected_capacity, CapacityReport};
use crate::families::{ChannelSpec, Family, ParamValue, Params};
use rayon::prelude::*;
use serde_json::Value;
use std::str::FromStr;
use thiserror::Error;

/// Caps on grid size so that a config cannot request an absurd
/// allocation before any point is evaluated.
const MAX_AXIS_POINTS: usize = 100_000;
const MAX_GRID_POINTS: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("configuration must be a JSON object")]
    NotObject,

    #[error("unknown key \"{0}\" in configuration")]
    UnknownKey(String),

    #[error("missing required key \"{0}\"")]
    MissingKey(&'static str),

    #[error("key \"{key}\" must be {expected}")]
    BadValue { key: String, expected: &'static str },

    #[error("give either \"d\" or \"d_list\", not both")]
    ConflictingDims,

    #[error("unknown family \"{0}\"")]
    UnknownFamily(String),

    #[error("family {family} does not take a parameter named \"{name}\"")]
    UnknownParam { family: Family, name: String },

    #[error("sweep axis \"{0}\" would overwrite a fixed parameter of the same name")]
    AxisCollision(String),

    #[error("at most two sweep axes are supported, got {0}")]
    TooManyAxes(usize),

    #[error("sweep axis \"{name}\": {detail}")]
    BadAxis { name: String, detail: String },

    #[error("grid has {0} points, more than the {MAX_GRID_POINTS} supported")]
    GridTooLarge(usize),

    #[error("unknown figure preset \"{0}\"")]
    UnknownPreset(String),

    #[error("empty parameter assignment; expected KEY=VALUE")]
    EmptyAssignment,

    #[error("parameter assignment \"{0}\" is not of the form KEY=VALUE")]
    BadAssignment(String),
}

/// One swept parameter and its grid values, in evaluation order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub name: String,
    pub values: Vec<ParamValue>,
}

/// A validated sweep: family, dimensions, fixed parameters, swept axes.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub family: Family,
    pub dims: Vec<usize>,
    pub fixed: Params,
    pub axes: Vec<SweepAxis>,
}

impl SweepSpec {
    /// A single-point sweep.
    pub fn point(spec: ChannelSpec) -> Self {
        Self {
            family: spec.family,
            dims: vec![spec.dim],
            fixed: spec.params,
            axes: Vec::new(),
        }
    }

    /// Total number of grid points (saturating, for pathological configs).
    pub fn cardinality(&self) -> usize {
        self.axes
            .iter()
            .map(|a| a.values.len())
            .fold(self.dims.len(), usize::saturating_mul)
    }

    /// All grid points in deterministic row order: dimensions outermost,
    /// then each axis (sorted by name at construction) row-major.
    pub fn grid(&self) -> Vec<ChannelSpec> {
        let mut points = Vec::with_capacity(self.cardinality());
        for &d in &self.dims {
            let base = ChannelSpec::new(self.family, d, self.fixed.clone());
            expand_axes(&base, &self.axes, &mut points);
        }
        points
    }
}

fn expand_axes(base: &ChannelSpec, axes: &[SweepAxis], out: &mut Vec<ChannelSpec>) {
    match axes.split_first() {
        None => out.push(base.clone()),
        Some((axis, rest)) => {
            for value in &axis.values {
                let mut point = base.clone();
                point.params.insert(axis.name.clone(), value.clone());
                expand_axes(&point, rest, out);
            }
        }
    }
}

/// One evaluated grid point: either a full report or the reason the point
/// was skipped.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub spec: ChannelSpec,
    pub outcome: Result<CapacityReport, String>,
}

impl SweepRow {
    pub fn is_skipped(&self) -> bool {
        self.outcome.is_err()
    }
}

/// Evaluates every grid point of `spec` and returns the rows in grid
/// order. Points are independent pure computations and run in parallel;
/// the collected order (and therefore any emitted file) does not depend
/// on the degree of parallelism.
pub fn run_sweep(spec: &SweepSpec, tol: f64, max_iter: u64) -> Vec<SweepRow> {
    spec.grid()
        .into_par_iter()
        .map(|point| {
            let outcome = detected_capacity(&point, tol, max_iter).map_err(|e| e.to_string());
            SweepRow {
                spec: point,
                outcome,
            }
        })
        .collect()
}

fn json_to_param(key: &str, v: &Value) -> Result<ParamValue, SweepError> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(ParamValue::Integer(i))
            } else {
                Ok(ParamValue::Real(n.as_f64().ok_or(
                    SweepError::BadValue {
                        key: key.to_string(),
                        expected: "a finite number",
                    },
                )?))
            }
        }
        Value::Array(items) => {
            let mut xs = Vec::with_capacity(items.len());
            for item in items {
                let x = item.as_f64().ok_or(SweepError::BadValue {
                    key: key.to_string(),
                    expected: "an array of numbers",
                })?;
                xs.push(x);
            }
            Ok(ParamValue::RealList(xs))
        }
        _ => Err(SweepError::BadValue {
            key: key.to_string(),
            expected: "a number or an array of numbers",
        }),
    }
}

fn axis_values(name: &str, v: &Value) -> Result<Vec<ParamValue>, SweepError> {
    let bad = |detail: &str| SweepError::BadAxis {
        name: name.to_string(),
        detail: detail.to_string(),
    };
    let obj = v
        .as_object()
        .ok_or_else(|| bad("must be an object with \"from\"/\"to\"/\"step\" or \"values\""))?;

    if let Some(values) = obj.get("values") {
        for key in obj.keys() {
            if key != "values" {
                return Err(bad(&format!("unknown key \"{key}\" alongside \"values\"")));
            }
        }
        let items = values
            .as_array()
            .ok_or_else(|| bad("\"values\" must be an array of numbers"))?;
        if items.is_empty() {
            return Err(bad("\"values\" must not be empty"));
        }
        return items.iter().map(|item| json_to_param(name, item)).collect();
    }

    let mut from = None;
    let mut to = None;
    let mut step = None;
    for (key, value) in obj {
        let slot = match key.as_str() {
            "from" => &mut from,
            "to" => &mut to,
            "step" => &mut step,
            other => return Err(bad(&format!("unknown key \"{other}\""))),
        };
        *slot = Some(
            value
                .as_f64()
                .ok_or_else(|| bad(&format!("\"{key}\" must be a number")))?,
        );
    }
    let from = from.ok_or_else(|| bad("missing \"from\""))?;
    let to = to.ok_or_else(|| bad("missing \"to\""))?;
    let step = step.ok_or_else(|| bad("missing \"step\""))?;
    if step.is_nan() || step <= 0.0 {
        return Err(bad("\"step\" must be positive"));
    }
    if to < from {
        return Err(bad("\"to\" must not be below \"from\""));
    }
    let integral = from.fract() == 0.0 && to.fract() == 0.0 && step.fract() == 0.0;
    let raw_count = ((to - from) / step + 1e-9).floor() + 1.0;
    if raw_count.is_nan() || raw_count > MAX_AXIS_POINTS as f64 {
        return Err(bad(&format!(
            "range spans {raw_count:.0} points, more than the {MAX_AXIS_POINTS} supported"
        )));
    }
    let count = raw_count as usize;
    let values = (0..count)
        .map(|i| {
            let x = from + i as f64 * step;
            if integral {
                ParamValue::Integer(x.round() as i64)
            } else {
                ParamValue::Real(x)
            }
        })
        .collect();
    Ok(values)
}

/// Parses a JSON sweep configuration with keys
/// `{family, d | d_list, params, sweep}`. Unknown keys anywhere are
/// rejected with a message naming the offending key.
pub fn parse_config(text: &str) -> Result<SweepSpec, SweepError> {
    let root: Value = serde_json::from_str(text)?;
    let obj = root.as_object().ok_or(SweepError::NotObject)?;

    for key in obj.keys() {
        if !matches!(key.as_str(), "family" | "d" | "d_list" | "params" | "sweep") {
            return Err(SweepError::UnknownKey(key.clone()));
        }
    }

    let family_name = obj
        .get("family")
        .ok_or(SweepError::MissingKey("family"))?
        .as_str()
        .ok_or(SweepError::BadValue {
            key: "family".to_string(),
            expected: "a string",
        })?;
    let family =
        Family::from_str(family_name).map_err(|_| SweepError::UnknownFamily(family_name.into()))?;

    let dims = match (obj.get("d"), obj.get("d_list")) {
        (Some(_), Some(_)) => return Err(SweepError::ConflictingDims),
        (None, None) => return Err(SweepError::MissingKey("d")),
        (Some(v), None) => vec![parse_dim("d", v)?],
        (None, Some(v)) => {
            let items = v.as_array().ok_or(SweepError::BadValue {
                key: "d_list".to_string(),
                expected: "an array of positive integers",
            })?;
            if items.is_empty() {
                return Err(SweepError::BadValue {
                    key: "d_list".to_string(),
                    expected: "a nonempty array of positive integers",
                });
            }
            items
                .iter()
                .map(|item| parse_dim("d_list", item))
                .collect::<Result<_, _>>()?
        }
    };

    let mut fixed = Params::new();
    if let Some(params) = obj.get("params") {
        let map = params.as_object().ok_or(SweepError::BadValue {
            key: "params".to_string(),
            expected: "an object",
        })?;
        for (key, value) in map {
            check_param_name(family, key)?;
            fixed.insert(key.clone(), json_to_param(key, value)?);
        }
    }

    let mut axes = Vec::new();
    if let Some(sweep) = obj.get("sweep") {
        let map = sweep.as_object().ok_or(SweepError::BadValue {
            key: "sweep".to_string(),
            expected: "an object",
        })?;
        for (name, value) in map {
            check_param_name(family, name)?;
            if fixed.contains_key(name) {
                return Err(SweepError::AxisCollision(name.clone()));
            }
            axes.push(SweepAxis {
                name: name.clone(),
                values: axis_values(name, value)?,
            });
        }
        if axes.len() > 2 {
            return Err(SweepError::TooManyAxes(axes.len()));
        }
        axes.sort_by(|a, b| a.name.cmp(&b.name));
    }

    let spec = SweepSpec {
        family,
        dims,
        fixed,
        axes,
    };
    if spec.cardinality() > MAX_GRID_POINTS {
        return Err(SweepError::GridTooLarge(spec.cardinality()));
    }
    Ok(spec)
}

fn check_param_name(family: Family, name: &str) -> Result<(), SweepError> {
    if family.param_names().contains(&name) {
        Ok(())
    } else {
        Err(SweepError::UnknownParam {
            family,
            name: name.to_string(),
        })
    }
}

fn parse_dim(key: &str, v: &Value) -> Result<usize, SweepError> {
    v.as_u64()
        .filter(|&d| d >= 1)
        .map(|d| d as usize)
        .ok_or(SweepError::BadValue {
            key: key.to_string(),
            expected: "a positive integer",
        })
}

/// Parses a CLI `KEY=VALUE` parameter assignment. Values may be an
/// integer, a real, or a comma-separated list of reals (per-level rates).
pub fn parse_param_assignment(text: &str) -> Result<(String, ParamValue), SweepError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(SweepError::EmptyAssignment);
    }
    let (key, raw) = text
        .split_once('=')
        .ok_or_else(|| SweepError::BadAssignment(text.to_string()))?;
    let key = key.trim();
    let raw = raw.trim();
    if key.is_empty() || raw.is_empty() {
        return Err(SweepError::BadAssignment(text.to_string()));
    }
    let value = if raw.contains(',') {
        let xs = raw
            .split(',')
            .map(|part| part.trim().parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|_| SweepError::BadAssignment(text.to_string()))?;
        if xs.iter().any(|x| !x.is_finite()) {
            return Err(SweepError::BadAssignment(text.to_string()));
        }
        ParamValue::RealList(xs)
    } else if let Ok(i) = raw.parse::<i64>() {
        ParamValue::Integer(i)
    } else {
        let x = raw
            .parse::<f64>()
            .map_err(|_| SweepError::BadAssignment(text.to_string()))?;
        if !x.is_finite() {
            return Err(SweepError::BadAssignment(text.to_string()));
        }
        ParamValue::Real(x)
    };
    Ok((key.to_string(), value))
}

fn gamma_axis(from: f64, to: f64, step: f64) -> SweepAxis {
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    SweepAxis {
        name: "gamma".to_string(),
        values: (0..count)
            .map(|i| ParamValue::Real(from + i as f64 * step))
            .collect(),
    }
}

fn integer_axis(name: &str, from: i64, to: i64) -> SweepAxis {
    SweepAxis {
        name: name.to_string(),
        values: (from..=to).map(ParamValue::Integer).collect(),
    }
}

fn real_axis(name: &str, from: f64, to: f64, step: f64) -> SweepAxis {
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    SweepAxis {
        name: name.to_string(),
        values: (0..count)
            .map(|i| ParamValue::Real(from + i as f64 * step))
            .collect(),
    }
}

/// The built-in sweeps reproducing the datasets behind the survey figures.
///
/// Where a figure states no grid density, damping rates step by 0.01,
/// integer parameters by 1, and surface plots sweep d over 2..=8. The
/// constant-ratio sweep covers gamma in [0, 1]; points past the
/// admissibility boundary of a given dimension come back as skipped rows.
pub fn figure_preset(id: &str) -> Result<SweepSpec, SweepError> {
    let bosonic_surface = || SweepSpec {
        family: Family::Bosonic,
        dims: (2..=8).collect(),
        fixed: Params::new(),
        axes: vec![gamma_axis(0.0, 1.0, 0.01)],
    };
    let beta_binomial_surface = || SweepSpec {
        family: Family::BetaBinomial,
        dims: vec![8],
        fixed: Params::new(),
        axes: vec![
            real_axis("alpha", 0.1, 5.0, 0.1),
            real_axis("beta", 0.1, 5.0, 0.1),
        ],
    };
    let geometric_surface = || SweepSpec {
        family: Family::Geometric,
        dims: (2..=8).collect(),
        fixed: Params::new(),
        axes: vec![gamma_axis(0.0, 1.0, 0.01)],
    };

    let spec = match id {
        "fig1" => bosonic_surface(),
        "fig2" => SweepSpec {
            family: Family::Bosonic,
            dims: vec![8],
            fixed: Params::new(),
            axes: vec![gamma_axis(0.0, 1.0, 0.01)],
        },
        "fig3" => bosonic_surface(),
        "fig4" => SweepSpec {
            family: Family::Hypergeometric,
            dims: vec![8],
            fixed: [("L".to_string(), ParamValue::Integer(12))].into(),
            axes: vec![integer_axis("M", 1, 12)],
        },
        "fig6" => SweepSpec {
            family: Family::NegativeHypergeometric,
            dims: vec![8],
            fixed: [("L".to_string(), ParamValue::Integer(32))].into(),
            // d-1 <= L-M caps M at 25
            axes: vec![integer_axis("M", 1, 25)],
        },
        "fig7" => beta_binomial_surface(),
        "fig8" => SweepSpec {
            family: Family::BetaBinomial,
            dims: vec![8],
            fixed: Params::new(),
            axes: vec![
                real_axis("alpha", 0.02, 1.0, 0.02),
                real_axis("beta", 0.02, 1.0, 0.02),
            ],
        },
        "fig9" => beta_binomial_surface(),
        "fig10" => geometric_surface(),
        "fig11" => geometric_surface(),
        "fig12" => SweepSpec {
            family: Family::ConstantRatio,
            dims: vec![2, 3, 4, 5],
            fixed: Params::new(),
            axes: vec![gamma_axis(0.0, 1.0, 0.01)],
        },
        "fig13" => SweepSpec {
            family: Family::TwoJump,
            dims: vec![8],
            fixed: Params::new(),
            axes: vec![
                real_axis("gamma1", 0.0, 2.0, 0.05),
                real_axis("gamma2", 0.0, 2.0, 0.05),
            ],
        },
        "fig14" => SweepSpec {
            family: Family::Lambda,
            dims: vec![4],
            fixed: Params::new(),
            axes: vec![gamma_axis(0.0, 2.0, 0.01)],
        },
        "fig15" => SweepSpec {
            family: Family::V,
            dims: vec![2, 3, 4, 8],
            fixed: Params::new(),
            axes: vec![gamma_axis(0.0, 1.0, 0.01)],
        },
        other => return Err(SweepError::UnknownPreset(other.to_string())),
    };
    Ok(spec)
}

/// All known preset identifiers.
pub const PRESET_IDS: [&str; 14] = [
    "fig1", "fig2", "fig3", "fig4", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11", "fig12",
    "fig13", "fig14", "fig15",
];
