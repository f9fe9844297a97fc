//! Seeded sampling of initial states and switching words.
//!
//! Every draw comes from ChaCha20 keyed by `(seed, domain)` with the sample
//! index as the stream id, so sample `i` depends only on `(seed, i)`: results
//! are independent of thread count and the first `N` samples of a larger set
//! coincide with a set of size `N`.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::model::SwitchingWord;

const DOMAIN_INITIAL_STATE: u64 = 0x7830_5f73_7068_6572; // "x0_spher"
const DOMAIN_SWITCHING: u64 = 0x7369_676d_615f_7773; // "sigma_ws"

/// Draws shorter than this are discarded and redrawn before normalizing.
const MIN_DRAW_NORM: f64 = 1e-12;

/// ChaCha20 stream for sample `index` in `domain`.
pub fn stream_rng(seed: u64, domain: u64, index: u64) -> ChaCha20Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&domain.to_le_bytes());
    let mut rng = ChaCha20Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

pub(crate) fn sphere_point(n: usize, seed: u64, index: u64) -> DVector<f64> {
    let mut rng = stream_rng(seed, DOMAIN_INITIAL_STATE, index);
    loop {
        let g = DVector::<f64>::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
        let norm = g.norm();
        if norm >= MIN_DRAW_NORM {
            return g / norm;
        }
    }
}

pub(crate) fn switching_word(modes: usize, horizon: usize, seed: u64, index: u64) -> SwitchingWord {
    let mut rng = stream_rng(seed, DOMAIN_SWITCHING, index);
    SwitchingWord((0..horizon).map(|_| rng.random_range(0..modes)).collect())
}

/// `count` i.i.d. points uniform on the unit sphere in `R^n`: standard
/// Gaussian draws projected onto the sphere.
pub fn sample_uniform_sphere(n: usize, count: usize, seed: u64) -> Vec<DVector<f64>> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| sphere_point(n, seed, i))
        .collect()
}

/// `count` words of length `horizon` with i.i.d. uniform symbols in `0..modes`.
pub fn sample_switching(modes: usize, horizon: usize, count: usize, seed: u64) -> Vec<SwitchingWord> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| switching_word(modes, horizon, seed, i))
        .collect()
}
