//! Mutual-information optimization and the detected-capacity report.
//!
//! The direct-basis transition matrix is optimized with the Blahut-Arimoto
//! recursion; the Fourier-basis matrix is circulant, so its optimal prior
//! is uniform and the capacity reduces to `log2 d` minus a column entropy.
//! Both Holevo quantities are evaluated alongside: the direct one equals
//! the direct mutual information (commuting output states saturate the
//! Holevo bound), the Fourier one upper-bounds the Fourier mutual
//! information and is computed as `H({w_m}) - S(rho~_0)` since all Fourier
//! output states share one spectrum.

use crate::channel::{
    amplitudes_from_transition, fourier_output_state, fourier_transition, level_populations,
    AmplitudeMatrix, ChannelError, TransitionMatrix,
};
use crate::families::{ChannelSpec, FamilyError};
use crate::numerics::{shannon_entropy, von_neumann_entropy, NumericsError, ProbVector};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Informations closer than this are reported as a tie (won by fourier).
const TIE_TOL: f64 = 1e-12;
/// Priors below this are clamped to zero and stay excluded; the recursion
/// preserves zeros anyway, this only stops denormal churn.
const PRIOR_UNDERFLOW: f64 = 1e-300;
const CIRCULANT_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CapacityError {
    #[error("dimension mismatch: transition matrix is {0}-dimensional, prior has {1} entries")]
    DimensionMismatch(usize, usize),

    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),

    #[error("max_iter must be positive")]
    BadIterationBudget,

    #[error("transition matrix is not circulant: entry ({m},{n}) deviates by {deviation:.3e}")]
    NotCirculant { m: usize, n: usize, deviation: f64 },

    #[error(transparent)]
    Family(#[from] FamilyError),

    #[error(transparent)]
    Channel(#[from] ChannelError),

    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Which coding basis won the detected capacity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Direct,
    Fourier,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::Direct => f.write_str("direct"),
            Basis::Fourier => f.write_str("fourier"),
        }
    }
}

/// Result of a Blahut-Arimoto run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BAResult {
    /// The optimized prior distribution.
    pub prior: ProbVector,
    /// Mutual information of `prior` in bits.
    pub information: f64,
    /// Iterations performed.
    pub iterations: u64,
    /// Final value of the capacity bracket `max_n D_n - sum_n p_n D_n`.
    pub gap: f64,
    /// Whether the bracket reached the requested tolerance. When false the
    /// iteration budget ran out and `information` is the best certified
    /// lower value so far.
    pub certified: bool,
}

/// The full record for one channel: both basis informations, the detected
/// capacity, both Holevo quantities, and the optimized direct prior.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CapacityReport {
    pub spec: ChannelSpec,
    pub i_direct: f64,
    pub i_fourier: f64,
    pub c_det: f64,
    pub winner: Basis,
    pub chi_direct: f64,
    pub chi_fourier: f64,
    pub delta: f64,
    pub prior_direct: ProbVector,
    pub prior_entropy: f64,
    pub ba_iterations: u64,
}

impl CapacityReport {
    /// Input letters carrying prior weight above the 0.01 reporting
    /// threshold.
    pub fn prior_support(&self) -> Vec<usize> {
        self.prior_direct.support()
    }
}

/// Mutual information `I(X;Y)` in bits of a transition matrix under the
/// prior `p`, with `0 log 0 = 0` and zero-marginal outputs contributing
/// nothing.
pub fn mutual_information(q: &TransitionMatrix, p: &ProbVector) -> Result<f64, CapacityError> {
    let d = q.dim();
    if p.len() != d {
        return Err(CapacityError::DimensionMismatch(d, p.len()));
    }
    let marginal = output_marginal(q, p);
    let mut info = 0.0;
    for n in 0..d {
        let pn = p.get(n);
        if pn == 0.0 {
            continue;
        }
        info += pn * divergence_to_marginal(q.column(n), &marginal);
    }
    Ok(info.max(0.0))
}

fn output_marginal(q: &TransitionMatrix, p: &ProbVector) -> Vec<f64> {
    let d = q.dim();
    let mut s = vec![0.0; d];
    for n in 0..d {
        let pn = p.get(n);
        if pn == 0.0 {
            continue;
        }
        for (m, &qmn) in q.column(n).iter().enumerate() {
            s[m] += pn * qmn;
        }
    }
    s
}

/// `D(Q(.|n) || s) = sum_m Q(m|n) log2(Q(m|n)/s_m)` in bits.
fn divergence_to_marginal(column: &[f64], marginal: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&q, &s) in column.iter().zip(marginal) {
        if q > 0.0 {
            acc += q * (q / s).log2();
        }
    }
    acc
}

/// Maximizes mutual information over priors with the Blahut-Arimoto
/// recursion, starting from the uniform prior (the recursion preserves
/// zeros, so nothing may start at zero).
///
/// Convergence is certified by the capacity bracket
/// `max_n D_n - sum_n p_n D_n <= tol` where `D_n` is the divergence of
/// column `n` from the current output marginal: the true capacity lies
/// between the returned information and information + gap.
pub fn blahut_arimoto(
    q: &TransitionMatrix,
    tol: f64,
    max_iter: u64,
) -> Result<BAResult, CapacityError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(CapacityError::BadTolerance(tol));
    }
    if max_iter == 0 {
        return Err(CapacityError::BadIterationBudget);
    }
    let d = q.dim();
    let mut prior = vec![1.0 / d as f64; d];
    let mut divergences = vec![0.0; d];
    let mut information = 0.0;
    let mut gap = f64::INFINITY;
    let mut iterations = 0;

    for r in 1..=max_iter {
        iterations = r;
        let marginal = {
            let p = ProbVector::new(prior.clone()).expect("prior stays normalized");
            output_marginal(q, &p)
        };
        let mut max_div = f64::NEG_INFINITY;
        information = 0.0;
        for n in 0..d {
            let dn = divergence_to_marginal(q.column(n), &marginal);
            divergences[n] = dn;
            max_div = max_div.max(dn);
            information += prior[n] * dn;
        }
        gap = max_div - information;
        if gap <= tol {
            return Ok(BAResult {
                prior: ProbVector::new(prior).expect("prior stays normalized"),
                information: information.max(0.0),
                iterations,
                gap,
                certified: true,
            });
        }
        // p_n <- p_n 2^{D_n} / sum_l p_l 2^{D_l}
        let mut total = 0.0;
        for n in 0..d {
            prior[n] *= (divergences[n] - information).exp2();
            if prior[n] < PRIOR_UNDERFLOW {
                prior[n] = 0.0;
            }
            total += prior[n];
        }
        for pn in prior.iter_mut() {
            *pn /= total;
        }
    }

    Ok(BAResult {
        prior: ProbVector::new(prior).expect("prior stays normalized"),
        information: information.max(0.0),
        iterations,
        gap,
        certified: false,
    })
}

/// Capacity of a circulant (symmetric) transition matrix:
/// `log2 d - H(column)`, achieved by the uniform prior.
///
/// Rejects non-circulant input; use [`blahut_arimoto`] for those.
pub fn symmetric_capacity(qt: &TransitionMatrix) -> Result<f64, CapacityError> {
    let d = qt.dim();
    for n in 0..d {
        for m in 0..d {
            let deviation = (qt.entry(m, n) - qt.entry((m + d - n) % d, 0)).abs();
            if deviation > CIRCULANT_TOL {
                return Err(CapacityError::NotCirculant { m, n, deviation });
            }
        }
    }
    let column = ProbVector::new(qt.column(0).to_vec())?;
    Ok(((d as f64).log2() - shannon_entropy(&column)).max(0.0))
}

/// The direct-basis Holevo quantity
/// `chi_B = H[sum_n p_n Q(.|n)] - sum_n p_n H[Q(.|n)]`.
///
/// For damping channels the direct output states commute, so this equals
/// the mutual information of `prior` exactly.
pub fn holevo_direct(q: &TransitionMatrix, prior: &ProbVector) -> Result<f64, CapacityError> {
    let d = q.dim();
    if prior.len() != d {
        return Err(CapacityError::DimensionMismatch(d, prior.len()));
    }
    let marginal = ProbVector::new(output_marginal(q, prior))?;
    let mut avg_entropy = 0.0;
    for n in 0..d {
        let pn = prior.get(n);
        if pn == 0.0 {
            continue;
        }
        let column = ProbVector::new(q.column(n).to_vec())?;
        avg_entropy += pn * shannon_entropy(&column);
    }
    Ok(shannon_entropy(&marginal) - avg_entropy)
}

/// The Fourier-basis Holevo quantity
/// `chi_B~ = S[(1/d) sum_n rho~_n] - (1/d) sum_n S(rho~_n)`.
///
/// The average state is diagonal with the level populations `w_m` on the
/// diagonal, and all `rho~_n` are related by diagonal unitaries, so the
/// computation reduces to `H({w_m}) - S(rho~_0)`.
pub fn holevo_fourier(c: &AmplitudeMatrix) -> Result<f64, CapacityError> {
    let populations = level_populations(c);
    let representative = fourier_output_state(c, 0)?;
    Ok(shannon_entropy(&populations) - von_neumann_entropy(&representative)?)
}

/// Builds the channel for `spec`, optimizes both bases, and assembles the
/// full [`CapacityReport`].
///
/// Ties within `1e-12` bits are awarded to the Fourier basis so that
/// sweeps stay deterministic through the lossless point.
pub fn detected_capacity(
    spec: &ChannelSpec,
    tol: f64,
    max_iter: u64,
) -> Result<CapacityReport, CapacityError> {
    let q = spec.transition()?;
    let c = amplitudes_from_transition(&q)?;
    let qt = fourier_transition(&c)?;

    let ba = blahut_arimoto(&q, tol, max_iter)?;
    let i_direct = ba.information;
    let i_fourier = symmetric_capacity(&qt)?;
    let chi_direct = holevo_direct(&q, &ba.prior)?;
    let chi_fourier = holevo_fourier(&c)?;

    let winner = if i_direct - i_fourier >= TIE_TOL {
        Basis::Direct
    } else {
        Basis::Fourier
    };
    let c_det = i_direct.max(i_fourier);
    let delta = (chi_fourier - c_det) / (spec.dim as f64).log2();

    Ok(CapacityReport {
        spec: spec.clone(),
        i_direct,
        i_fourier,
        c_det,
        winner,
        chi_direct,
        chi_fourier,
        delta,
        prior_entropy: shannon_entropy(&ba.prior),
        prior_direct: ba.prior,
        ba_iterations: ba.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{Family, ParamValue, Params};

    const BA_TOL: f64 = 1e-9;
    const BA_ITERS: u64 = 100_000;

    fn bsc(flip: f64) -> TransitionMatrix {
        TransitionMatrix::from_rows(2, vec![1.0 - flip, flip, flip, 1.0 - flip]).unwrap()
    }

    fn z_channel(p: f64) -> TransitionMatrix {
        TransitionMatrix::from_rows(2, vec![1.0, p, 0.0, 1.0 - p]).unwrap()
    }

    fn spec_of(family: Family, dim: usize, params: &[(&str, ParamValue)]) -> ChannelSpec {
        ChannelSpec::new(
            family,
            dim,
            params
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
        )
    }

    #[test]
    fn mutual_information_examples() {
        let q = TransitionMatrix::identity(4).unwrap();
        let i = mutual_information(&q, &ProbVector::uniform(4)).unwrap();
        assert!((i - 2.0).abs() < 1e-12);

        let deterministic = ProbVector::new(vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        let i = mutual_information(&q, &deterministic).unwrap();
        assert!(i.abs() < 1e-12);

        // BSC with flip 0.11: 1 - H2(0.11)
        let i = mutual_information(&bsc(0.11), &ProbVector::uniform(2)).unwrap();
        assert!((i - 0.500084041835472).abs() < 1e-12);

        let short = ProbVector::uniform(3);
        assert!(mutual_information(&q, &short).is_err());
    }

    #[test]
    fn ba_identity_channel() {
        let result =
            blahut_arimoto(&TransitionMatrix::identity(8).unwrap(), BA_TOL, BA_ITERS).unwrap();
        assert!(result.certified);
        assert!((result.information - 3.0).abs() < 1e-9);
        for n in 0..8 {
            assert!((result.prior.get(n) - 0.125).abs() < 1e-9);
        }
    }

    #[test]
    fn ba_matches_z_channel_closed_form() {
        // C = log2(1 + (1-p) p^{p/(1-p)})
        for (p, expected) in [
            (0.25, 0.5582386267373455),
            (0.5, 0.32192809488736235),
            (0.75, 0.14465824283188233),
        ] {
            let result = blahut_arimoto(&z_channel(p), BA_TOL, BA_ITERS).unwrap();
            assert!(result.certified, "p={p} uncertified");
            assert!(
                (result.information - expected).abs() < 1e-6,
                "p={p}: {} vs {expected}",
                result.information
            );
        }
        // the optimal prior of the p=0.5 Z-channel is non-uniform
        let result = blahut_arimoto(&z_channel(0.5), BA_TOL, BA_ITERS).unwrap();
        assert!((result.prior.get(0) - result.prior.get(1)).abs() > 0.05);
    }

    #[test]
    fn ba_matches_bsc_closed_form() {
        for (flip, expected) in [
            (0.05, 0.7136030428840437),
            (0.11, 0.500084041835472),
            (0.25, 0.18872187554086717),
        ] {
            let result = blahut_arimoto(&bsc(flip), BA_TOL, BA_ITERS).unwrap();
            assert!(result.certified);
            assert!(
                (result.information - expected).abs() < 1e-6,
                "flip={flip}: {} vs {expected}",
                result.information
            );
            assert!((result.prior.get(0) - 0.5).abs() < 1e-6);
        }
    }

    #[test]
    fn ba_objective_is_nondecreasing() {
        // track the information of successive iterates by re-running with
        // growing iteration budgets
        let q = crate::families::hypergeometric(8, 5, 12).unwrap();
        let mut last = 0.0;
        for iters in 1..60 {
            let r = blahut_arimoto(&q, 1e-15, iters).unwrap();
            assert!(
                r.information >= last - 1e-12,
                "iteration {iters}: {} dropped below {last}",
                r.information
            );
            last = r.information;
        }
    }

    #[test]
    fn ba_uncertified_when_budget_too_small() {
        let r = blahut_arimoto(&z_channel(0.5), 1e-12, 3).unwrap();
        assert!(!r.certified);
        assert_eq!(r.iterations, 3);
        assert!(r.gap > 1e-12);
    }

    #[test]
    fn ba_rejects_bad_arguments() {
        let q = TransitionMatrix::identity(2).unwrap();
        assert!(blahut_arimoto(&q, 0.0, 10).is_err());
        assert!(blahut_arimoto(&q, 1e-9, 0).is_err());
    }

    #[test]
    fn symmetric_capacity_examples() {
        let id = TransitionMatrix::identity(4).unwrap();
        assert!((symmetric_capacity(&id).unwrap() - 2.0).abs() < 1e-12);

        let uniform = TransitionMatrix::from_rows(2, vec![0.5; 4]).unwrap();
        assert!(symmetric_capacity(&uniform).unwrap().abs() < 1e-12);

        // non-circulant input is rejected
        let z = z_channel(0.5);
        assert!(matches!(
            symmetric_capacity(&z),
            Err(CapacityError::NotCirculant { .. })
        ));
    }

    #[test]
    fn symmetric_capacity_agrees_with_ba() {
        let c = amplitudes_from_transition(&crate::families::bosonic(6, &[0.35]).unwrap()).unwrap();
        let qt = fourier_transition(&c).unwrap();
        let shortcut = symmetric_capacity(&qt).unwrap();
        let ba = blahut_arimoto(&qt, BA_TOL, BA_ITERS).unwrap();
        assert!((shortcut - ba.information).abs() <= 2.0 * BA_TOL);
    }

    #[test]
    fn holevo_direct_equals_mutual_information() {
        let q = crate::families::hypergeometric(8, 5, 12).unwrap();
        let ba = blahut_arimoto(&q, BA_TOL, BA_ITERS).unwrap();
        let chi = holevo_direct(&q, &ba.prior).unwrap();
        let i = mutual_information(&q, &ba.prior).unwrap();
        assert!((chi - i).abs() < 1e-9);

        // full damping: constant output, zero information
        let full = crate::families::bosonic(4, &[1.0]).unwrap();
        let chi = holevo_direct(&full, &ProbVector::uniform(4)).unwrap();
        assert!(chi.abs() < 1e-12);
    }

    #[test]
    fn holevo_fourier_examples() {
        let id = AmplitudeMatrix::identity(8).unwrap();
        assert!((holevo_fourier(&id).unwrap() - 3.0).abs() < 1e-9);

        let full =
            amplitudes_from_transition(&crate::families::bosonic(2, &[1.0]).unwrap()).unwrap();
        assert!(holevo_fourier(&full).unwrap().abs() < 1e-9);
    }

    #[test]
    fn holevo_fourier_bounds_fourier_information() {
        for gamma in [0.2, 0.5, 0.8] {
            let q = crate::families::bosonic(5, &[gamma]).unwrap();
            let c = amplitudes_from_transition(&q).unwrap();
            let chi = holevo_fourier(&c).unwrap();
            let i = symmetric_capacity(&fourier_transition(&c).unwrap()).unwrap();
            assert!(chi >= i - 1e-9, "gamma={gamma}: chi {chi} < I {i}");
        }
    }

    #[test]
    fn detected_capacity_noiseless_bosonic() {
        let spec = spec_of(Family::Bosonic, 8, &[("gamma", ParamValue::Real(0.0))]);
        let report = detected_capacity(&spec, BA_TOL, BA_ITERS).unwrap();
        assert!((report.i_direct - 3.0).abs() < 1e-9);
        assert!((report.i_fourier - 3.0).abs() < 1e-9);
        assert!((report.c_det - 3.0).abs() < 1e-9);
        assert_eq!(report.winner, Basis::Fourier); // tie-break
        assert!(report.delta.abs() < 1e-9);
    }

    #[test]
    fn detected_capacity_hypergeometric_anchor() {
        let spec = spec_of(
            Family::Hypergeometric,
            8,
            &[
                ("M", ParamValue::Integer(5)),
                ("L", ParamValue::Integer(12)),
            ],
        );
        let report = detected_capacity(&spec, BA_TOL, BA_ITERS).unwrap();
        assert!(
            (report.c_det - 1.074).abs() < 0.005,
            "c_det = {}",
            report.c_det
        );
        assert_eq!(report.winner, Basis::Direct);
        assert_eq!(report.prior_support(), vec![0, 2, 3, 7]);
    }

    #[test]
    fn detected_capacity_v_channel_qubit() {
        for gamma in [0.1, 0.4, 0.7, 0.9] {
            let spec = spec_of(Family::V, 2, &[("gamma", ParamValue::Real(gamma))]);
            let report = detected_capacity(&spec, BA_TOL, BA_ITERS).unwrap();
            assert_eq!(report.winner, Basis::Fourier, "gamma = {gamma}");
        }
    }

    #[test]
    fn report_internal_consistency() {
        let spec = spec_of(Family::Geometric, 5, &[("gamma", ParamValue::Real(0.6))]);
        let report = detected_capacity(&spec, BA_TOL, BA_ITERS).unwrap();
        assert_eq!(report.c_det, report.i_direct.max(report.i_fourier));
        let expected = if report.i_direct - report.i_fourier >= 1e-12 {
            Basis::Direct
        } else {
            Basis::Fourier
        };
        assert_eq!(report.winner, expected);
        assert!((report.i_direct - report.chi_direct).abs() < 1e-9);
        assert!(report.i_fourier <= report.chi_fourier + 1e-9);
        let log_d = (report.spec.dim as f64).log2();
        assert!(report.prior_entropy >= 0.0 && report.prior_entropy <= log_d);
        assert!((report.delta - (report.chi_fourier - report.c_det) / log_d).abs() < 1e-15);
    }

    #[test]
    fn detected_capacity_propagates_family_errors() {
        let spec = spec_of(Family::Bosonic, 4, &[("gamma", ParamValue::Real(1.5))]);
        assert!(matches!(
            detected_capacity(&spec, BA_TOL, BA_ITERS),
            Err(CapacityError::Family(_))
        ));
        let spec = ChannelSpec::new(Family::BetaBinomial, 4, Params::new());
        assert!(detected_capacity(&spec, BA_TOL, BA_ITERS).is_err());
    }
}
