//! Deterministic low-discrepancy sampling of chart domains.

use serde::{Deserialize, Serialize};

/// Fraction of each side of the domain box excluded at both ends.
pub const DEFAULT_MARGIN: f64 = 0.05;

pub const DEFAULT_POINTS: usize = 200;

const BASES: [u64; 3] = [2, 3, 5];

/// Radical inverse of `index` in the given base, a value in `[0, 1)`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    assert!(base > 1);
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut out = 0.0;
    while index > 0 {
        out += (index % base) as f64 * scale;
        index /= base;
        scale *= inv;
    }
    out
}

/// Axis-aligned box `[lo, hi]` in chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl Domain {
    pub fn new(lo: [f64; 3], hi: [f64; 3]) -> Self {
        Domain { lo, hi }
    }

    pub fn cube(half_width: f64) -> Self {
        Domain::new([-half_width; 3], [half_width; 3])
    }

    pub fn is_valid(&self) -> bool {
        (0..3).all(|k| self.lo[k].is_finite() && self.hi[k].is_finite() && self.lo[k] < self.hi[k])
    }

    pub fn contains(&self, p: [f64; 3]) -> bool {
        (0..3).all(|k| self.lo[k] <= p[k] && p[k] <= self.hi[k])
    }

    pub fn center(&self) -> [f64; 3] {
        std::array::from_fn(|k| 0.5 * (self.lo[k] + self.hi[k]))
    }

    pub fn corners(&self) -> [[f64; 3]; 8] {
        std::array::from_fn(|m| std::array::from_fn(|k| if m >> k & 1 == 0 { self.lo[k] } else { self.hi[k] }))
    }

    /// Maps a point of the unit cube into the box, keeping `margin` away from the faces.
    pub fn map_unit(&self, unit: [f64; 3], margin: f64) -> [f64; 3] {
        std::array::from_fn(|k| {
            let t = margin + (1.0 - 2.0 * margin) * unit[k];
            self.lo[k] + (self.hi[k] - self.lo[k]) * t
        })
    }
}

/// The `k`-th point (zero based) of the Halton sequence started after `seed`.
pub fn halton_point(seed: u64, k: usize) -> [f64; 3] {
    let index = seed + k as u64 + 1;
    std::array::from_fn(|axis| radical_inverse(index, BASES[axis]))
}

/// `count` Halton points (bases 2, 3, 5) inside `domain` with the given margin.
pub fn sample_domain(domain: &Domain, count: usize, seed: u64, margin: f64) -> Vec<[f64; 3]> {
    (0..count)
        .map(|k| domain.map_unit(halton_point(seed, k), margin))
        .collect()
}

/// A reproducible point sample together with the seed that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub seed: u64,
    pub points: Vec<[f64; 3]>,
}

impl SampleSet {
    pub fn halton(domain: &Domain, count: usize, seed: u64) -> Self {
        SampleSet {
            seed,
            points: sample_domain(domain, count, seed, DEFAULT_MARGIN),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
