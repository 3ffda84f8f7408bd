//! Deterministic random streams.
//!
//! Every Gaussian coefficient is addressed by `(seed, stream, index)`: the
//! ChaCha8 keystream for `(seed, stream)` is consumed in fixed 4-word slots,
//! one slot per index, and each slot is turned into a normal deviate by the
//! Box–Muller transform. Drawing index `i` on its own or as part of a
//! sequential block gives the same value, so results never depend on thread
//! count or iteration order.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WORDS_PER_DEVIATE: u128 = 4;
const TWO_POW_M53: f64 = 1.0 / (1u64 << 53) as f64;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// FNV-1a over the bytes of `s`; stable across platforms and toolchains.
pub fn stable_str_hash(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Seed of trial `index` of experiment `experiment_id` under `root`.
pub fn substream_seed(root: u64, experiment_id: &str, index: u64) -> u64 {
    let a = mix64(root);
    let b = mix64(a ^ stable_str_hash(experiment_id));
    mix64(b ^ mix64(index.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

/// Derives a child seed from a parent seed and a tag.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    mix64(mix64(seed) ^ mix64(tag.wrapping_mul(0x2545_f491_4f6c_dd1d)))
}

#[inline]
fn box_muller(a: u64, b: u64) -> f64 {
    // u1 in (0, 1], u2 in [0, 1)
    let u1 = ((a >> 11) + 1) as f64 * TWO_POW_M53;
    let u2 = (b >> 11) as f64 * TWO_POW_M53;
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn keystream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// The standard normal deviate keyed by `(seed, stream, index)`.
pub fn standard_normal_at(seed: u64, stream: u64, index: u64) -> f64 {
    let mut rng = keystream(seed, stream);
    rng.set_word_pos(index as u128 * WORDS_PER_DEVIATE);
    let a = rng.next_u64();
    let b = rng.next_u64();
    box_muller(a, b)
}

/// Fills `out[i]` with the deviate keyed by `(seed, stream, i)`.
pub fn fill_standard_normals(seed: u64, stream: u64, out: &mut [f64]) {
    let mut rng = keystream(seed, stream);
    for v in out.iter_mut() {
        let a = rng.next_u64();
        let b = rng.next_u64();
        *v = box_muller(a, b);
    }
}

/// Sequential generator for Monte Carlo work that is not coefficient-keyed.
#[derive(Clone, Debug)]
pub struct SimRng {
    rng: ChaCha8Rng,
}

impl SimRng {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn normal(&mut self) -> f64 {
        let a = self.rng.next_u64();
        let b = self.rng.next_u64();
        box_muller(a, b)
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * TWO_POW_M53
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform unit vector in R^n.
    pub fn unit_vector(&mut self, n: usize) -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..n).map(|_| self.normal()).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-8 {
                return v.into_iter().map(|x| x / norm).collect();
            }
        }
    }

    /// Haar-distributed orthogonal matrix (row-major n×n) via Gram–Schmidt on
    /// Gaussian rows.
    pub fn orthogonal_matrix(&mut self, n: usize) -> Vec<Vec<f64>> {
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
        while rows.len() < n {
            let mut v: Vec<f64> = (0..n).map(|_| self.normal()).collect();
            for r in &rows {
                let dot: f64 = v.iter().zip(r).map(|(a, b)| a * b).sum();
                for (vi, ri) in v.iter_mut().zip(r) {
                    *vi -= dot * ri;
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-6 {
                rows.push(v.into_iter().map(|x| x / norm).collect());
            }
        }
        rows
    }
}
