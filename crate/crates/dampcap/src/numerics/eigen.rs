//! Complex-Hermitian eigenvalues by cyclic Jacobi rotations.
//!
//! Dense, dependency-free, and robust for the d <= 64 matrices this crate
//! works with. Each rotation annihilates one off-diagonal pair; sweeps stop
//! once the off-diagonal Frobenius norm falls below 1e-12.

use super::{xlogx_clamped, NumericsError};
use num_complex::Complex64;

const OFF_DIAG_THRESHOLD: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;
const HERMITICITY_TOL: f64 = 1e-12;
const EIGENVALUE_CLIP: f64 = -1e-10;

/// A `d x d` complex Hermitian matrix, validated at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    data: Vec<Complex64>, // row-major
}

impl HermitianMatrix {
    /// Builds from row-major entries, rejecting non-Hermitian data
    /// (`|a_ij - conj(a_ji)| > 1e-12`).
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self, NumericsError> {
        if dim == 0 || dim > crate::MAX_DIM {
            return Err(NumericsError::BadDimension(dim));
        }
        if data.len() != dim * dim {
            return Err(NumericsError::BadShape {
                got: data.len(),
                expected: dim * dim,
            });
        }
        for i in 0..dim {
            for j in i..dim {
                let diff = (data[i * dim + j] - data[j * dim + i].conj()).norm();
                if diff > HERMITICITY_TOL {
                    return Err(NumericsError::NotHermitian(i, j, diff));
                }
            }
        }
        Ok(Self { dim, data })
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self, NumericsError> {
        let d = diag.len();
        let mut data = vec![Complex64::ZERO; d * d];
        for (i, &x) in diag.iter().enumerate() {
            data[i * d + i] = Complex64::new(x, 0.0);
        }
        Self::new(d, data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    /// Trace; real by Hermiticity.
    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.entry(i, i).re).sum()
    }
}

/// All `d` eigenvalues of a Hermitian matrix, in nonincreasing order.
///
/// Their sum equals the trace to within round-off (the rotations preserve
/// it exactly up to floating-point error).
pub fn hermitian_eigenvalues(m: &HermitianMatrix) -> Vec<f64> {
    let d = m.dim;
    let mut a = m.data.clone();
    let idx = |i: usize, j: usize| i * d + j;

    for _sweep in 0..MAX_SWEEPS {
        let off: f64 = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j)
            .map(|(i, j)| a[idx(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= OFF_DIAG_THRESHOLD {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[idx(p, q)];
                let abs = apq.norm();
                if abs < 1e-280 {
                    continue;
                }
                let phase = apq / abs; // e^{i arg(a_pq)}
                let app = a[idx(p, p)].re;
                let aqq = a[idx(q, q)].re;
                let tau = (aqq - app) / (2.0 * abs);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // A <- U^dag A U with U mixing columns p, q:
                //   U[p][p] = c, U[q][q] = c,
                //   U[p][q] = s e^{i phi}, U[q][p] = -s e^{-i phi}
                for j in 0..d {
                    if j == p || j == q {
                        continue;
                    }
                    let ajp = a[idx(j, p)];
                    let ajq = a[idx(j, q)];
                    let new_jp = c * ajp - s * phase.conj() * ajq;
                    let new_jq = s * phase * ajp + c * ajq;
                    a[idx(j, p)] = new_jp;
                    a[idx(j, q)] = new_jq;
                    a[idx(p, j)] = new_jp.conj();
                    a[idx(q, j)] = new_jq.conj();
                }
                let new_pp = c * c * app - 2.0 * c * s * abs + s * s * aqq;
                let new_qq = s * s * app + 2.0 * c * s * abs + c * c * aqq;
                a[idx(p, p)] = Complex64::new(new_pp, 0.0);
                a[idx(q, q)] = Complex64::new(new_qq, 0.0);
                a[idx(p, q)] = Complex64::ZERO;
                a[idx(q, p)] = Complex64::ZERO;
            }
        }
    }

    let mut eig: Vec<f64> = (0..d).map(|i| a[idx(i, i)].re).collect();
    eig.sort_by(|x, y| y.partial_cmp(x).unwrap());
    eig
}

/// Von Neumann entropy `S(rho) = -Tr[rho log2 rho]` in bits.
///
/// `rho` must have unit trace within `1e-9`. Eigenvalues in `[-1e-10, 0)`
/// are clipped to zero (Jacobi round-off on rank-deficient states); more
/// negative spectra are rejected.
pub fn von_neumann_entropy(rho: &HermitianMatrix) -> Result<f64, NumericsError> {
    let tr = rho.trace();
    if (tr - 1.0).abs() > 1e-9 {
        return Err(NumericsError::TraceNotOne(tr));
    }
    let mut h = 0.0;
    for lambda in hermitian_eigenvalues(rho) {
        if lambda < EIGENVALUE_CLIP {
            return Err(NumericsError::NegativeEigenvalue(lambda));
        }
        h -= xlogx_clamped(lambda.max(0.0));
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{shannon_entropy, ProbVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, d: usize) -> HermitianMatrix {
        let mut data = vec![Complex64::ZERO; d * d];
        for i in 0..d {
            data[i * d + i] = c(rng.gen_range(-1.0..1.0), 0.0);
            for j in (i + 1)..d {
                let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                data[i * d + j] = z;
                data[j * d + i] = z.conj();
            }
        }
        HermitianMatrix::new(d, data).unwrap()
    }

    #[test]
    fn identity_spectrum() {
        let m = HermitianMatrix::from_diagonal(&[1.0, 1.0, 1.0]).unwrap();
        let eig = hermitian_eigenvalues(&m);
        for e in eig {
            assert!((e - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pauli_like_two_by_two() {
        // [[1, i], [-i, 1]] has spectrum {2, 0}
        let m = HermitianMatrix::new(2, vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(1.0, 0.0)])
            .unwrap();
        let eig = hermitian_eigenvalues(&m);
        assert!((eig[0] - 2.0).abs() < 1e-12);
        assert!(eig[1].abs() < 1e-12);
    }

    #[test]
    fn diagonal_matrix_spectrum() {
        let m = HermitianMatrix::from_diagonal(&[0.3, 0.7]).unwrap();
        let eig = hermitian_eigenvalues(&m);
        assert!((eig[0] - 0.7).abs() < 1e-14);
        assert!((eig[1] - 0.3).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let bad = HermitianMatrix::new(2, vec![c(1.0, 0.0), c(0.5, 0.0), c(0.2, 0.0), c(0.0, 0.0)]);
        assert!(bad.is_err());
    }

    #[test]
    fn eigenvalue_sum_matches_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in [2usize, 3, 5, 8, 13] {
            let m = random_hermitian(&mut rng, d);
            let eig = hermitian_eigenvalues(&m);
            let sum: f64 = eig.iter().sum();
            assert!(
                (sum - m.trace()).abs() < 1e-10,
                "d={d}: sum {sum} vs trace {}",
                m.trace()
            );
        }
    }

    #[test]
    fn spectrum_invariant_under_diagonal_unitary() {
        // conjugating by diag(e^{i theta_j}) leaves the spectrum untouched
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for d in [2usize, 4, 7] {
            let m = random_hermitian(&mut rng, d);
            let phases: Vec<Complex64> = (0..d)
                .map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)))
                .collect();
            let mut rotated = vec![Complex64::ZERO; d * d];
            for i in 0..d {
                for j in 0..d {
                    rotated[i * d + j] = phases[i].conj() * m.entry(i, j) * phases[j];
                }
            }
            let rotated = HermitianMatrix::new(d, rotated).unwrap();
            let e1 = hermitian_eigenvalues(&m);
            let e2 = hermitian_eigenvalues(&rotated);
            for (a, b) in e1.iter().zip(&e2) {
                assert!((a - b).abs() < 1e-9, "d={d}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn von_neumann_examples() {
        let pure = HermitianMatrix::from_diagonal(&[1.0, 0.0, 0.0]).unwrap();
        assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-12);

        let mixed = HermitianMatrix::from_diagonal(&[0.25; 4]).unwrap();
        assert!((von_neumann_entropy(&mixed).unwrap() - 2.0).abs() < 1e-12);

        let diag = HermitianMatrix::from_diagonal(&[0.11, 0.89]).unwrap();
        let s = von_neumann_entropy(&diag).unwrap();
        assert!((s - 0.499915958164528).abs() < 1e-4);
    }

    #[test]
    fn von_neumann_matches_shannon_on_diagonals() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for d in [2usize, 4, 8] {
            let raw: Vec<f64> = (0..d).map(|_| rng.gen_range(0.01..1.0)).collect();
            let sum: f64 = raw.iter().sum();
            let p: Vec<f64> = raw.iter().map(|x| x / sum).collect();
            let m = HermitianMatrix::from_diagonal(&p).unwrap();
            let s = von_neumann_entropy(&m).unwrap();
            let h = shannon_entropy(&ProbVector::new(p).unwrap());
            assert!((s - h).abs() < 1e-10);
        }
    }

    #[test]
    fn von_neumann_rejects_bad_states() {
        let not_unit = HermitianMatrix::from_diagonal(&[0.5, 0.4]).unwrap();
        assert!(von_neumann_entropy(&not_unit).is_err());

        let negative = HermitianMatrix::from_diagonal(&[1.001, -0.001]).unwrap();
        assert!(von_neumann_entropy(&negative).is_err());
    }
}
