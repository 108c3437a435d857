//! Seedable random streams.
//!
//! Every stochastic step draws from an [`RngStream`] identified by a
//! `(seed, stream_id)` pair. Streams are backed by ChaCha8, whose 64-bit
//! stream selector gives independent sequences for the same seed, so tree
//! `i` of a forest can own its stream regardless of build order or
//! threading.

use rand::seq::index;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Stream labels used when a tree stream is split by purpose.
pub mod purpose {
    pub const SUBSAMPLE: u64 = 1;
    pub const SPLITS: u64 = 2;
    pub const ROTATION: u64 = 3;
    pub const DATA: u64 = 4;
    pub const FOREST: u64 = 5;
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from a master seed and an index, e.g. one seed per
/// experiment repetition.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(master ^ mix64(index.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl PartialEq for RngStream {
    fn eq(&self, other: &Self) -> bool {
        self.seed == other.seed && self.stream_id == other.stream_id && self.inner == other.inner
    }
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// A fresh stream labelled by `label` under this one. Depends only on
    /// `(seed, stream_id, label)`, never on how much of `self` was consumed.
    pub fn derive(&self, label: u64) -> RngStream {
        RngStream::new(self.seed, mix64(self.stream_id ^ mix64(label)))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform draw on the half-open range `[lo, hi)`; returns `lo` when the
    /// range is empty.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        debug_assert!(lo <= hi, "uniform: lo {lo} > hi {hi}");
        if lo < hi {
            self.inner.random_range(lo..hi)
        } else {
            lo
        }
    }

    /// Uniform integer in `[0, n)`.
    pub fn index(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Uniform direction on the unit sphere in `d` dimensions, obtained by
    /// normalizing a vector of independent standard normals.
    pub fn unit_sphere_vector(&mut self, d: usize) -> Vec<f64> {
        assert!(d >= 1, "unit_sphere_vector needs d >= 1");
        loop {
            let mut v: Vec<f64> = (0..d).map(|_| self.standard_normal()).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-150 && norm.is_finite() {
                v.iter_mut().for_each(|x| *x /= norm);
                return v;
            }
        }
    }

    /// `k` distinct indices drawn uniformly from `[0, n)`.
    pub fn sample_without_replacement(&mut self, n: usize, k: usize) -> Result<Vec<usize>> {
        if k > n {
            return Err(Error::SampleTooLarge {
                requested: k,
                population: n,
            });
        }
        Ok(index::sample(&mut self.inner, n, k).into_vec())
    }
}
