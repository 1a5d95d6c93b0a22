//! Counter-based dichotomous noise.
//!
//! Each value is a pure function of `(seed, step, pathway)`, so trajectories
//! are reproducible regardless of how simulations are scheduled.

use serde::{Deserialize, Serialize};

use crate::model::NoisePair;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hashes a seed and two counters into 64 well-mixed bits.
#[inline]
pub fn hash3(seed: u64, a: u64, b: u64) -> u64 {
    let h = mix64(seed.wrapping_add(GOLDEN));
    let h = mix64(h ^ a.wrapping_add(GOLDEN.wrapping_mul(2)));
    mix64(h ^ b.wrapping_add(GOLDEN.wrapping_mul(3)))
}

/// Maps the top 53 bits onto `[0, 1)`.
#[inline]
pub fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Inhibitory pathway receiving the noise term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pathway {
    /// From population 2 onto population 1 (`y21`).
    P21,
    /// From population 1 onto population 2 (`y12`).
    P12,
}

impl Pathway {
    fn index(self) -> u64 {
        match self {
            Pathway::P21 => 21,
            Pathway::P12 => 12,
        }
    }

    fn other(self) -> Pathway {
        match self {
            Pathway::P21 => Pathway::P12,
            Pathway::P12 => Pathway::P21,
        }
    }
}

/// Dichotomous `±m` noise source: `+m` when the pathway's uniform draw is below `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseStream {
    pub seed: u64,
    pub p: f64,
    pub m: f64,
    /// Swaps the pathway draws; used to build the mirror image of a noisy run.
    #[serde(default)]
    pub mirrored: bool,
}

impl NoiseStream {
    pub fn new(seed: u64, p: f64, m: f64) -> Self {
        Self {
            seed,
            p,
            m,
            mirrored: false,
        }
    }

    pub fn mirrored(self) -> Self {
        Self {
            mirrored: !self.mirrored,
            ..self
        }
    }

    /// Uniform draw in `[0, 1)` for a pathway at a step.
    #[inline]
    pub fn uniform(&self, step: u64, pathway: Pathway) -> f64 {
        let pw = if self.mirrored { pathway.other() } else { pathway };
        unit_f64(hash3(self.seed, step, pw.index()))
    }

    #[inline]
    pub fn draw(&self, step: u64, pathway: Pathway) -> f64 {
        if self.m == 0.0 {
            return 0.0;
        }
        if self.uniform(step, pathway) < self.p {
            self.m
        } else {
            -self.m
        }
    }

    #[inline]
    pub fn pair(&self, step: u64) -> NoisePair {
        NoisePair {
            b21: self.draw(step, Pathway::P21),
            b12: self.draw(step, Pathway::P12),
        }
    }
}
