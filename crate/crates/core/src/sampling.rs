//! Deterministic uniform sampling of the unit ball in C².

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matalg::{c64, norm_sqr, Point};

/// Uniform points of the open unit ball, by rejection from the bounding
/// polydisk (each coordinate uniform in the unit disk).
pub struct BallSampler {
    rng: ChaCha8Rng,
}

impl BallSampler {
    pub fn new(seed: u64) -> Self {
        BallSampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn disk(&mut self) -> num_complex::Complex64 {
        loop {
            let (x, y): (f64, f64) = (self.rng.gen_range(-1.0..1.0), self.rng.gen_range(-1.0..1.0));
            if x * x + y * y < 1.0 {
                return c64(x, y);
            }
        }
    }

    pub fn next_point(&mut self) -> Point {
        loop {
            let p = [self.disk(), self.disk()];
            if norm_sqr(&p) < 1.0 {
                return p;
            }
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

impl Iterator for BallSampler {
    type Item = Point;
    fn next(&mut self) -> Option<Point> {
        Some(self.next_point())
    }
}

/// `n` ball samples from `seed`.
pub fn sample_ball(n: usize, seed: u64) -> Vec<Point> {
    BallSampler::new(seed).take(n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_inside_and_reproducible() {
        let a = sample_ball(500, 7);
        assert!(a.iter().all(|p| norm_sqr(p) < 1.0));
        assert_eq!(a, sample_ball(500, 7));
        assert_ne!(a, sample_ball(500, 8));
    }

    #[test]
    fn mean_squared_radius_matches_uniform_ball() {
        // For the uniform measure on the unit ball of R⁴, E‖z‖² = 4/6.
        let pts = sample_ball(20_000, 1);
        let mean = pts.iter().map(norm_sqr).sum::<f64>() / pts.len() as f64;
        assert!((mean - 2.0 / 3.0).abs() < 0.01, "{mean}");
    }
}
