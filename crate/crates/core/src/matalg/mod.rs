//! Fixed-size complex linear algebra for the 3×3 associated matrices.
//!
//! Everything here is exact-shape: points of C² are `[Complex64; 2]`,
//! homogeneous vectors are `[Complex64; 3]` and matrices are [`Mat3`].

mod cubic;
mod jordan;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use cubic::{char_poly, cubic_roots, eigenvalues3};
pub use jordan::{jordan_form, null_space, JordanBlock, JordanDecomposition};

pub type ComplexScalar = Complex64;
/// A point of C².
pub type Point = [Complex64; 2];
/// A homogeneous vector in C³.
pub type Vec3 = [Complex64; 3];

/// `|det m| <= TOL_SINGULAR * ‖m‖_F³` is treated as singular.
pub const TOL_SINGULAR: f64 = 1e-14;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Euclidean norm of a point of C².
pub fn norm(p: &Point) -> f64 {
    (p[0].norm_sqr() + p[1].norm_sqr()).sqrt()
}

pub fn norm_sqr(p: &Point) -> f64 {
    p[0].norm_sqr() + p[1].norm_sqr()
}

pub fn dist(p: &Point, q: &Point) -> f64 {
    norm(&[p[0] - q[0], p[1] - q[1]])
}

pub fn vnorm(v: &Vec3) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian product `Σ conj(u_i) v_i`.
pub fn vdot(u: &Vec3, v: &Vec3) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn vscale(v: &Vec3, s: Complex64) -> Vec3 {
    [v[0] * s, v[1] * s, v[2] * s]
}

pub fn vsub(u: &Vec3, v: &Vec3) -> Vec3 {
    [u[0] - v[0], u[1] - v[1], u[2] - v[2]]
}

pub fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// A 3×3 complex matrix, row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct Mat3(pub [[Complex64; 3]; 3]);

impl Mat3 {
    pub fn zero() -> Self {
        Mat3([[Complex64::new(0.0, 0.0); 3]; 3])
    }

    pub fn identity() -> Self {
        Self::diag([re(1.0), re(1.0), re(1.0)])
    }

    pub fn diag(d: [Complex64; 3]) -> Self {
        let mut m = Self::zero();
        for (i, x) in d.into_iter().enumerate() {
            m.0[i][i] = x;
        }
        m
    }

    pub fn from_real(rows: [[f64; 3]; 3]) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = re(rows[i][j]);
            }
        }
        m
    }

    pub fn from_cols(cols: [Vec3; 3]) -> Self {
        let mut m = Self::zero();
        for (j, col) in cols.iter().enumerate() {
            for i in 0..3 {
                m.0[i][j] = col[i];
            }
        }
        m
    }

    pub fn col(&self, j: usize) -> Vec3 {
        [self.0[0][j], self.0[1][j], self.0[2][j]]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|&z| is_finite(z))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn det(&self) -> Complex64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] = self.0[j][i].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = *self;
        out.0.iter_mut().flatten().for_each(|z| *z *= s);
        out
    }

    pub fn mul_vec(&self, v: &Vec3) -> Vec3 {
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.0[i][0] * v[0] + self.0[i][1] * v[1] + self.0[i][2] * v[2];
        }
        out
    }

    /// `self - s·I`
    pub fn shift(&self, s: Complex64) -> Self {
        let mut out = *self;
        for i in 0..3 {
            out.0[i][i] -= s;
        }
        out
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, mut n: u32) -> Self {
        let mut base = *self;
        let mut acc = Self::identity();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            n >>= 1;
        }
        acc
    }

    /// Frobenius norm of `self - other`.
    pub fn dist(&self, other: &Mat3) -> f64 {
        (*self - *other).frobenius_norm()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Mat3) -> f64 {
        self.0.iter().flatten().zip(other.0.iter().flatten()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn inverse(&self) -> Result<Mat3> {
        mat_inverse(self)
    }
}

impl Index<(usize, usize)> for Mat3 {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat3 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.0[i][j]
    }
}

impl Mul for Mat3 {
    type Output = Mat3;
    fn mul(self, rhs: Mat3) -> Mat3 {
        mat_mul(&self, &rhs)
    }
}

impl Add for Mat3 {
    type Output = Mat3;
    fn add(mut self, rhs: Mat3) -> Mat3 {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j] += rhs.0[i][j];
            }
        }
        self
    }
}

impl Sub for Mat3 {
    type Output = Mat3;
    fn sub(mut self, rhs: Mat3) -> Mat3 {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j] -= rhs.0[i][j];
            }
        }
        self
    }
}

impl Neg for Mat3 {
    type Output = Mat3;
    fn neg(self) -> Mat3 {
        self.scale(re(-1.0))
    }
}

impl fmt::Debug for Mat3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl fmt::Display for Mat3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.0 {
            let cells: Vec<String> = row.iter().map(|z| fmt_complex(*z)).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Compact `a+bi` rendering with trailing noise trimmed to 12 digits.
pub fn fmt_complex(z: Complex64) -> String {
    let clean = |x: f64| if x.abs() < 1e-13 { 0.0 } else { x };
    let (r, i) = (clean(z.re), clean(z.im));
    if i == 0.0 {
        format!("{}", round12(r))
    } else if r == 0.0 {
        format!("{}i", round12(i))
    } else if i < 0.0 {
        format!("{}-{}i", round12(r), round12(-i))
    } else {
        format!("{}+{}i", round12(r), round12(i))
    }
}

fn round12(x: f64) -> f64 {
    let s = format!("{:.12e}", x);
    s.parse().unwrap_or(x)
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = Mat3::zero();
    for i in 0..3 {
        for j in 0..3 {
            out.0[i][j] = a.0[i][0] * b.0[0][j] + a.0[i][1] * b.0[1][j] + a.0[i][2] * b.0[2][j];
        }
    }
    out
}

/// Inverse by Gauss-Jordan elimination with partial pivoting, followed by a
/// single Newton-Schulz correction `X ← X + X(I − mX)`.
pub fn mat_inverse(m: &Mat3) -> Result<Mat3> {
    let scale = m.frobenius_norm();
    if !m.is_finite() || scale == 0.0 || m.det().norm() <= TOL_SINGULAR * scale.powi(3) {
        return Err(Error::SingularMatrix);
    }
    let mut a = m.0;
    let mut inv = Mat3::identity().0;
    for col in 0..3 {
        let pivot = (col..3).max_by(|&r, &s| a[r][col].norm().total_cmp(&a[s][col].norm())).unwrap_or(col);
        if a[pivot][col].norm() == 0.0 {
            return Err(Error::SingularMatrix);
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].inv();
        for j in 0..3 {
            a[col][j] *= p;
            inv[col][j] *= p;
        }
        for r in 0..3 {
            if r != col {
                let f = a[r][col];
                if f.norm() != 0.0 {
                    for j in 0..3 {
                        let (ac, ic) = (a[col][j], inv[col][j]);
                        a[r][j] -= f * ac;
                        inv[r][j] -= f * ic;
                    }
                }
            }
        }
    }
    let x = Mat3(inv);
    let residual = Mat3::identity() - *m * x;
    Ok(x + x * residual)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example1() -> Mat3 {
        Mat3::from_real([[1.0, 2.0, 1.0], [-2.0, 2.0, 2.0], [-1.0, 2.0, 3.0]])
    }

    #[test]
    fn identity_is_neutral() {
        let m = example1();
        assert_eq!(Mat3::identity() * m, m);
        assert_eq!(m * Mat3::identity(), m);
    }

    #[test]
    fn example1_factors_multiply_back() {
        let s = Mat3::from_real([[1.0, 0.0, -0.25], [0.0, 0.5, -0.125], [1.0, 0.0, 0.0]]);
        let l = Mat3::from_real([[2.0, 1.0, 0.0], [0.0, 2.0, 1.0], [0.0, 0.0, 2.0]]);
        let s_inv = Mat3::from_real([[0.0, 0.0, 1.0], [-1.0, 2.0, 1.0], [-4.0, 0.0, 4.0]]);
        assert_eq!(mat_mul(&mat_mul(&s, &l), &s_inv), example1());
    }

    #[test]
    fn example1_s_inverse() {
        let s = Mat3::from_real([[1.0, 0.0, -0.25], [0.0, 0.5, -0.125], [1.0, 0.0, 0.0]]);
        let expected = Mat3::from_real([[0.0, 0.0, 1.0], [-1.0, 2.0, 1.0], [-4.0, 0.0, 4.0]]);
        assert!(mat_inverse(&s).unwrap().max_abs_diff(&expected) < 1e-15);
        assert_eq!(mat_inverse(&Mat3::identity()).unwrap(), Mat3::identity());
    }

    #[test]
    fn singular_is_rejected() {
        let m = Mat3::from_real([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 1.0, 1.0]]);
        assert_eq!(mat_inverse(&m), Err(Error::SingularMatrix));
        assert_eq!(mat_inverse(&Mat3::zero()), Err(Error::SingularMatrix));
    }

    #[test]
    fn powi_matches_repeated_product() {
        let m = example1().scale(re(0.5));
        let mut acc = Mat3::identity();
        for n in 0..12 {
            assert!(m.powi(n).max_abs_diff(&acc) < 1e-9 * acc.frobenius_norm().max(1.0));
            acc = acc * m;
        }
    }
}
