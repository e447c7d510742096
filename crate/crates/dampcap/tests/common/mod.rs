//! Shared test fixtures: the seeded random damping-channel corpus.

use dampcap::AmplitudeMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random valid amplitude matrix: each column is an independent random
/// direction with strictly positive entries, normalized in square sum.
pub fn random_amplitudes(rng: &mut ChaCha8Rng, d: usize) -> AmplitudeMatrix {
    let mut c = vec![0.0; d * d];
    for n in 0..d {
        let col: Vec<f64> = (0..=n).map(|_| rng.gen_range(0.0..1.0) + 1e-3).collect();
        let norm = col.iter().map(|x| x * x).sum::<f64>().sqrt();
        for (m, v) in col.iter().enumerate() {
            c[m * d + n] = v / norm;
        }
    }
    AmplitudeMatrix::new(d, c).expect("normalized columns form a valid amplitude matrix")
}

/// The full random-channel corpus: `per_dim` channels for every dimension
/// in 2..=8, reproducible across runs.
pub fn corpus(per_dim: usize) -> Vec<AmplitudeMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0dacca9);
    let mut channels = Vec::with_capacity(per_dim * 7);
    for d in 2..=8 {
        for _ in 0..per_dim {
            channels.push(random_amplitudes(&mut rng, d));
        }
    }
    channels
}
