//! Deterministic sampling of annuli in `ℝ^{2d}`.

use alloc::vec::Vec;

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Geometric shells `⟨z⟩ = r_k` between `r_min` and `r_max`, each sampled
/// along random directions plus the signed coordinate axes.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub shells: usize,
    pub directions: usize,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct Sample {
    pub shell: usize,
    /// `⟨z⟩`.
    pub bracket: f64,
    pub point: Vec<f64>,
}

impl RegionSpec {
    pub fn new(r_min: f64, r_max: f64, shells: usize, directions: usize, seed: u64) -> Result<Self> {
        if !(r_min >= 1.0 && r_max >= r_min && shells >= 1) {
            return Err(Error::pre("region", "need 1 ≤ r_min ≤ r_max and at least one shell"));
        }
        Ok(RegionSpec { r_min, r_max, shells, directions, seed })
    }

    /// Shell brackets, geometrically spaced.
    pub fn radii(&self) -> Vec<f64> {
        if self.shells == 1 {
            return alloc::vec![self.r_min];
        }
        let ratio = Float::ln(self.r_max / self.r_min);
        (0..self.shells).map(|k| self.r_min * Float::exp(ratio * k as f64 / (self.shells - 1) as f64)).collect()
    }

    /// Unit directions in `ℝ^n`: the `2n` signed axes followed by
    /// `directions` random ones.
    pub fn unit_directions(&self, n: usize) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        for i in 0..n {
            for s in [1.0, -1.0] {
                let mut v = alloc::vec![0.0; n];
                v[i] = s;
                out.push(v);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for _ in 0..self.directions {
            out.push(random_unit(&mut rng, n));
        }
        out
    }

    /// All sample points in `ℝ^n`, shell by shell.
    pub fn samples(&self, n: usize) -> Vec<Sample> {
        let dirs = self.unit_directions(n);
        let mut out = Vec::with_capacity(dirs.len() * self.shells);
        for (shell, r) in self.radii().into_iter().enumerate() {
            let norm = Float::sqrt((r * r - 1.0).max(0.0));
            for d in &dirs {
                out.push(Sample { shell, bracket: r, point: d.iter().map(|v| v * norm).collect() });
            }
        }
        out
    }
}

pub(crate) fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n)
            .map(|_| {
                // Box–Muller
                let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
                let u2: f64 = rng.random();
                Float::sqrt(-2.0 * Float::ln(u1)) * Float::cos(core::f64::consts::TAU * u2)
            })
            .collect();
        let norm = crate::symbol::euclidean_norm(&v);
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::japanese_bracket;

    #[test]
    fn shells_have_requested_brackets() {
        let r = RegionSpec::new(2.0, 100.0, 5, 10, 7).unwrap();
        let radii = r.radii();
        assert_eq!(radii.len(), 5);
        assert!((radii[4] - 100.0).abs() < 1e-12);
        for s in r.samples(4) {
            assert!((japanese_bracket(&s.point) - s.bracket).abs() < 1e-9 * s.bracket);
        }
        assert_eq!(r.samples(4).len(), 5 * (8 + 10));
    }

    #[test]
    fn sampling_is_reproducible() {
        let r = RegionSpec::new(1.0, 10.0, 3, 4, 42).unwrap();
        let a: Vec<Vec<f64>> = r.samples(2).into_iter().map(|s| s.point).collect();
        let b: Vec<Vec<f64>> = r.samples(2).into_iter().map(|s| s.point).collect();
        assert_eq!(a, b);
        assert!(RegionSpec::new(0.5, 10.0, 3, 4, 1).is_err());
    }
}
