//! Generators shared by the integration tests.
#![allow(dead_code)]

use lfm_semigroup::lfm::LinearFractionalMap;
use lfm_semigroup::matalg::{c64, re, Mat3};
use num_complex::Complex64;
use rand::Rng;

pub fn complex_in_disk<R: Rng>(rng: &mut R, radius: f64) -> Complex64 {
    loop {
        let z = c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if z.norm() < 1.0 {
            return z * radius;
        }
    }
}

/// A Haar-ish random unitary 2×2 matrix.
pub fn random_unitary<R: Rng>(rng: &mut R) -> [[Complex64; 2]; 2] {
    let theta = rng.gen_range(0.0..std::f64::consts::TAU);
    let a = complex_in_disk(rng, 1.0);
    let b_mod = (1.0 - a.norm_sqr()).sqrt();
    let b = Complex64::from_polar(b_mod, rng.gen_range(0.0..std::f64::consts::TAU));
    let ph = Complex64::from_polar(1.0, theta);
    [[a * ph, -b.conj() * ph], [b, a.conj()]]
}

fn embed(u: [[Complex64; 2]; 2]) -> Mat3 {
    let mut m = Mat3::identity();
    for i in 0..2 {
        for j in 0..2 {
            m[(i, j)] = u[i][j];
        }
    }
    m
}

/// `Ψ(z) = ((1+z₁)/(1−z₁), z₂/(1−z₁))`
pub fn cayley_matrix() -> Mat3 {
    Mat3::from_real([[1.0, 0.0, 1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 1.0]])
}

/// `Ψ⁻¹(w) = ((w₁−1)/(w₁+1), 2w₂/(w₁+1))`
pub fn cayley_inv_matrix() -> Mat3 {
    Mat3::from_real([[1.0, 0.0, -1.0], [0.0, 2.0, 0.0], [1.0, 0.0, 1.0]])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Hyperbolic,
    Parabolic,
    Heisenberg,
    Interior,
}

pub const FAMILIES: [Family; 4] =
    [Family::Hyperbolic, Family::Parabolic, Family::Heisenberg, Family::Interior];

/// A self-map of the Siegel half space, as a matrix, from the family.
pub fn siegel_model<R: Rng>(rng: &mut R, family: Family) -> Mat3 {
    match family {
        Family::Hyperbolic | Family::Parabolic | Family::Interior => {
            let r: f64 = match family {
                Family::Hyperbolic => rng.gen_range(1.2..4.0),
                Family::Parabolic => 1.0,
                _ => rng.gen_range(0.2..0.8),
            };
            // |s|² ≤ r keeps Re(r w₁ + c) > |s w₂|².
            let s_max = r.min(1.0).sqrt() * 0.95;
            let s =
                Complex64::from_polar(rng.gen_range(0.1..s_max), rng.gen_range(0.0..std::f64::consts::TAU));
            let c = match family {
                Family::Hyperbolic => c64(0.0, rng.gen_range(-1.0..1.0)),
                _ => c64(rng.gen_range(0.2..1.5), rng.gen_range(-1.0..1.0)),
            };
            let mut m = Mat3::diag([re(r), s, re(1.0)]);
            m[(0, 2)] = c;
            m
        }
        Family::Heisenberg => {
            let b2 = complex_in_disk(rng, 1.0);
            let b1 = c64(b2.norm_sqr() + rng.gen_range(0.1..1.0), rng.gen_range(-1.0..1.0));
            Mat3([[re(1.0), b2.conj() * 2.0, b1], [re(0.0), re(1.0), b2], [re(0.0), re(0.0), re(1.0)]])
        }
    }
}

/// `U ∘ Ψ⁻¹ ∘ Φ ∘ Ψ ∘ U⁻¹` for a random unitary `U`: a self-map of the ball.
pub fn random_ball_self_map<R: Rng>(rng: &mut R, family: Family) -> LinearFractionalMap {
    let u = embed(random_unitary(rng));
    let m = u * cayley_inv_matrix() * siegel_model(rng, family) * cayley_matrix() * u.adjoint();
    LinearFractionalMap::from_mat3(&m).expect("invertible by construction")
}

/// A random matrix with entries uniform in the unit disk.
pub fn random_matrix<R: Rng>(rng: &mut R) -> Mat3 {
    let mut m = Mat3::zero();
    for i in 0..3 {
        for j in 0..3 {
            m[(i, j)] = complex_in_disk(rng, 1.0);
        }
    }
    m
}

/// `‖m‖_F ‖m⁻¹‖_F`, infinite when singular.
pub fn condition(m: &Mat3) -> f64 {
    m.inverse().map_or(f64::INFINITY, |inv| m.frobenius_norm() * inv.frobenius_norm())
}
