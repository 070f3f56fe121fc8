//! Linear fractional maps `φ(z) = (Az + B) / (⟨z, C⟩ + D)` on C².
//!
//! `⟨z, C⟩ = z₁·conj(c₁) + z₂·conj(c₂)`, so the associated matrix carries
//! `C*` as its last row:
//!
//! ```text
//! m_φ = [ A   B ]
//!       [ C*  D ]
//! ```
//!
//! Composition is matrix multiplication and inversion is matrix inversion,
//! both up to a nonzero scalar.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matalg::{
    self, is_finite, jordan_form, mat_inverse, norm, re, JordanDecomposition, Mat3, Point, Vec3, TOL_SINGULAR,
};
use crate::sampling::BallSampler;

/// Width of the band around the unit sphere classified as boundary.
pub const TOL_BOUNDARY: f64 = 1e-7;
/// Relative size of `D` below which normalization falls back to unit norm.
const TOL_NORMALIZE: f64 = 1e-10;
/// A homogeneous vector with `|v₃| <= TOL_INFINITY·‖v‖` is a point at infinity.
const TOL_INFINITY: f64 = 1e-9;

/// An associated matrix in canonical projective normalization: `D = 1` when
/// `|D|` is not negligible, otherwise unit Frobenius norm with the first
/// nonzero entry (row-major) positive real.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AssociatedMatrix {
    m: Mat3,
}

impl AssociatedMatrix {
    pub fn new(m: Mat3) -> Result<Self> {
        let scale = m.frobenius_norm();
        if !m.is_finite() || scale == 0.0 {
            return Err(Error::InvalidInput("associated matrix must be finite and nonzero".into()));
        }
        let d = m[(2, 2)];
        if d.norm() > TOL_NORMALIZE * scale {
            return Ok(AssociatedMatrix { m: m.scale(d.inv()) });
        }
        let unit = m.scale(re(1.0 / scale));
        let lead = unit.0.iter().flatten().copied().find(|z| z.norm() > TOL_NORMALIZE).unwrap_or(re(1.0));
        Ok(AssociatedMatrix { m: unit.scale(lead.conj() / lead.norm()) })
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.m
    }

    /// Largest entrywise difference between canonical forms.
    pub fn distance(&self, other: &AssociatedMatrix) -> f64 {
        self.m.max_abs_diff(&other.m)
    }

    pub fn projectively_eq(&self, other: &AssociatedMatrix, tol: f64) -> bool {
        self.distance(other) <= tol
    }
}

/// Canonical normalization of a raw matrix.
pub fn canonical(m: &Mat3) -> Result<Mat3> {
    AssociatedMatrix::new(*m).map(|a| a.m)
}

/// Where a fixed point sits relative to the unit ball.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PointClass {
    Interior,
    Boundary,
    Exterior,
    Infinity,
}

impl PointClass {
    pub fn of(p: &Point) -> Self {
        let r = norm(p);
        if (r - 1.0).abs() <= TOL_BOUNDARY {
            PointClass::Boundary
        } else if r < 1.0 {
            PointClass::Interior
        } else {
            PointClass::Exterior
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedPoint {
    /// `None` for a point at infinity.
    pub location: Option<Point>,
    /// Eigenvector; last coordinate 1 when finite.
    pub homogeneous: Vec3,
    pub eigenvalue: Complex64,
    pub classification: PointClass,
    /// Index of the Jordan block whose chain this point heads.
    pub block: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelfMapReport {
    pub samples: usize,
    pub violations: usize,
    /// Largest `‖φ(z)‖` seen; infinite if a sample hit a pole.
    pub worst_margin: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFractionalMap {
    a: [[Complex64; 2]; 2],
    b: Point,
    c: Point,
    d: Complex64,
}

impl LinearFractionalMap {
    /// Accepts any finite, not identically zero data. Singular (constant or
    /// rank-deficient) maps are allowed here; operations that need an
    /// invertible associated matrix reject them.
    pub fn new(a: [[Complex64; 2]; 2], b: Point, c: Point, d: Complex64) -> Result<Self> {
        let map = LinearFractionalMap { a, b, c, d };
        let m = map.raw_matrix();
        if !m.is_finite() {
            return Err(Error::InvalidInput("map coefficients must be finite".into()));
        }
        if m.frobenius_norm() == 0.0 {
            return Err(Error::InvalidInput("map coefficients are all zero".into()));
        }
        Ok(map)
    }

    pub fn identity() -> Self {
        LinearFractionalMap {
            a: [[re(1.0), re(0.0)], [re(0.0), re(1.0)]],
            b: [re(0.0); 2],
            c: [re(0.0); 2],
            d: re(1.0),
        }
    }

    /// The affine map `z ↦ Az + B`.
    pub fn affine(a: [[Complex64; 2]; 2], b: Point) -> Result<Self> {
        Self::new(a, b, [re(0.0); 2], re(1.0))
    }

    pub fn a(&self) -> [[Complex64; 2]; 2] {
        self.a
    }
    pub fn b(&self) -> Point {
        self.b
    }
    pub fn c(&self) -> Point {
        self.c
    }
    pub fn d(&self) -> Complex64 {
        self.d
    }

    /// Associated matrix without normalization.
    pub fn raw_matrix(&self) -> Mat3 {
        Mat3([
            [self.a[0][0], self.a[0][1], self.b[0]],
            [self.a[1][0], self.a[1][1], self.b[1]],
            [self.c[0].conj(), self.c[1].conj(), self.d],
        ])
    }

    pub fn to_matrix(&self) -> AssociatedMatrix {
        AssociatedMatrix::new(self.raw_matrix()).expect("map data validated at construction")
    }

    pub fn from_matrix(m: &AssociatedMatrix) -> Result<Self> {
        let mm = m.matrix();
        let scale = mm.frobenius_norm();
        if mm.det().norm() <= TOL_SINGULAR * scale.powi(3) {
            return Err(Error::SingularMatrix);
        }
        Ok(Self::from_raw(mm))
    }

    /// Normalizes `m` and builds the map; `m` must be invertible.
    pub fn from_mat3(m: &Mat3) -> Result<Self> {
        Self::from_matrix(&AssociatedMatrix::new(*m)?)
    }

    fn from_raw(m: &Mat3) -> Self {
        LinearFractionalMap {
            a: [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]],
            b: [m[(0, 2)], m[(1, 2)]],
            c: [m[(2, 0)].conj(), m[(2, 1)].conj()],
            d: m[(2, 2)],
        }
    }

    pub fn is_invertible(&self) -> bool {
        let m = self.raw_matrix();
        m.det().norm() > TOL_SINGULAR * m.frobenius_norm().powi(3)
    }

    /// `φ(z)`; fails with `PoleAtPoint` where the denominator vanishes.
    pub fn eval(&self, z: &Point) -> Result<Point> {
        let denom = z[0] * self.c[0].conj() + z[1] * self.c[1].conj() + self.d;
        let size = norm(&self.c) * norm(z) + self.d.norm() + 1.0;
        if denom.norm().is_nan() || denom.norm() <= 1e-12 * size {
            return Err(Error::PoleAtPoint);
        }
        let num = [
            self.a[0][0] * z[0] + self.a[0][1] * z[1] + self.b[0],
            self.a[1][0] * z[0] + self.a[1][1] * z[1] + self.b[1],
        ];
        Ok([num[0] / denom, num[1] / denom])
    }

    /// `self ∘ g`
    pub fn compose(&self, g: &LinearFractionalMap) -> Result<LinearFractionalMap> {
        let product = self.raw_matrix() * g.raw_matrix();
        let scale = product.frobenius_norm();
        if !product.is_finite() || scale == 0.0 || product.det().norm() <= TOL_SINGULAR * scale.powi(3) {
            return Err(Error::DegenerateComposition);
        }
        Self::from_mat3(&product)
    }

    pub fn inverse(&self) -> Result<LinearFractionalMap> {
        Self::from_mat3(&mat_inverse(&self.raw_matrix())?)
    }

    /// The `n`-fold iterate, by composition.
    pub fn iterate(&self, n: u32) -> Result<LinearFractionalMap> {
        (0..n).try_fold(Self::identity(), |acc, _| self.compose(&acc))
    }

    /// Fixed points from the chain heads of the Jordan form of `m_φ`, one
    /// per Jordan block.
    pub fn fixed_points(&self) -> Result<Vec<FixedPoint>> {
        fixed_points_of(&jordan_form(&self.raw_matrix())?)
    }

    /// Samples `n_samples` uniform points of the ball and counts images with
    /// `‖φ(z)‖ >= 1` (a pole counts as a violation).
    pub fn self_map_check(&self, n_samples: usize, seed: u64) -> SelfMapReport {
        let mut report = SelfMapReport { samples: n_samples, violations: 0, worst_margin: 0.0 };
        for z in BallSampler::new(seed).take(n_samples) {
            let r = self.eval(&z).map(|w| norm(&w)).unwrap_or(f64::INFINITY);
            if r >= 1.0 {
                report.violations += 1;
            }
            report.worst_margin = report.worst_margin.max(r);
        }
        report
    }

    /// True when `m_φ* J m_φ = cJ` with `c > 0` and `J = diag(1, 1, −1)`,
    /// i.e. `φ` is an automorphism of the ball.
    pub fn is_ball_automorphism(&self) -> bool {
        let m = *self.to_matrix().matrix();
        let j = Mat3::diag([re(1.0), re(1.0), re(-1.0)]);
        let k = m.adjoint() * j * m;
        let c = (k[(0, 0)] + k[(1, 1)] - k[(2, 2)]).re / 3.0;
        c > 0.0 && k.dist(&j.scale(re(c))) <= 1e-9 * k.frobenius_norm()
    }
}

/// Fixed points read off the chain heads of a Jordan decomposition.
pub fn fixed_points_of(jd: &JordanDecomposition) -> Result<Vec<FixedPoint>> {
    let first = jd.blocks[0].eigenvalue;
    if jd.blocks.len() == 3 && jd.blocks.iter().all(|b| (b.eigenvalue - first).norm() <= 1e-12 * first.norm())
    {
        return Err(Error::DegenerateAllFixed);
    }
    Ok(jd
        .chain_heads()
        .into_iter()
        .map(|(block, v)| fixed_point_from(v, jd.blocks[block].eigenvalue, block))
        .collect())
}

fn fixed_point_from(v: Vec3, eigenvalue: Complex64, block: usize) -> FixedPoint {
    if v[2].norm() > TOL_INFINITY * matalg::vnorm(&v) {
        let homogeneous = [v[0] / v[2], v[1] / v[2], re(1.0)];
        let p = [homogeneous[0], homogeneous[1]];
        FixedPoint { location: Some(p), homogeneous, eigenvalue, classification: PointClass::of(&p), block }
    } else {
        let n = matalg::vnorm(&v);
        FixedPoint {
            location: None,
            homogeneous: [v[0] / n, v[1] / n, v[2] / n],
            eigenvalue,
            classification: PointClass::Infinity,
            block,
        }
    }
}

/// JSON form of a map: complex numbers are `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapJson {
    #[serde(rename = "A")]
    pub a: [[[f64; 2]; 2]; 2],
    #[serde(rename = "B")]
    pub b: [[f64; 2]; 2],
    #[serde(rename = "C")]
    pub c: [[f64; 2]; 2],
    #[serde(rename = "D")]
    pub d: [f64; 2],
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn unpair(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl From<&LinearFractionalMap> for MapJson {
    fn from(m: &LinearFractionalMap) -> Self {
        MapJson {
            a: [[pair(m.a[0][0]), pair(m.a[0][1])], [pair(m.a[1][0]), pair(m.a[1][1])]],
            b: [pair(m.b[0]), pair(m.b[1])],
            c: [pair(m.c[0]), pair(m.c[1])],
            d: pair(m.d),
        }
    }
}

impl TryFrom<&MapJson> for LinearFractionalMap {
    type Error = Error;
    fn try_from(j: &MapJson) -> Result<Self> {
        let a = [[unpair(j.a[0][0]), unpair(j.a[0][1])], [unpair(j.a[1][0]), unpair(j.a[1][1])]];
        let z = |p: [[f64; 2]; 2]| [unpair(p[0]), unpair(p[1])];
        if [j.d].iter().chain(j.b.iter()).chain(j.c.iter()).any(|p| !is_finite(unpair(*p))) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        LinearFractionalMap::new(a, z(j.b), z(j.c), unpair(j.d))
    }
}

impl LinearFractionalMap {
    pub fn from_json(s: &str) -> Result<Self> {
        let j: MapJson =
            serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("map JSON: {e}")))?;
        LinearFractionalMap::try_from(&j)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&MapJson::from(self)).expect("plain data serializes")
    }
}

/// Example maps used throughout the tests and the CLI.
pub mod examples {
    use super::*;

    /// `φ(z) = ((z₁+2z₂+1)/(−z₁+2z₂+3), (−2z₁+2z₂+2)/(−z₁+2z₂+3))`, whose
    /// associated matrix has the single eigenvalue 2 in one Jordan block.
    pub fn parabolic_example() -> LinearFractionalMap {
        LinearFractionalMap::new(
            [[re(1.0), re(2.0)], [re(-2.0), re(2.0)]],
            [re(1.0), re(2.0)],
            [re(-1.0), re(2.0)],
            re(3.0),
        )
        .unwrap()
    }

    /// `z ↦ (z₁/2, z₂/3)`
    pub fn diagonal_contraction() -> LinearFractionalMap {
        LinearFractionalMap::affine([[re(0.5), re(0.0)], [re(0.0), re(1.0 / 3.0)]], [re(0.0); 2]).unwrap()
    }

    /// `z ↦ (2z₁, 0)`; singular, and not a self-map.
    pub fn dilation() -> LinearFractionalMap {
        LinearFractionalMap::affine([[re(2.0), re(0.0)], [re(0.0), re(0.0)]], [re(0.0); 2]).unwrap()
    }

    /// The Cayley map of the ball onto the Siegel half space, as a linear
    /// fractional map: `((1+z₁)/(1−z₁), z₂/(1−z₁))`.
    pub fn cayley_map() -> LinearFractionalMap {
        LinearFractionalMap::new(
            [[re(1.0), re(0.0)], [re(0.0), re(1.0)]],
            [re(1.0), re(0.0)],
            [re(-1.0), re(0.0)],
            re(1.0),
        )
        .unwrap()
    }

    /// The unitary rotation `z ↦ Uz`.
    pub fn unitary(u: [[Complex64; 2]; 2]) -> LinearFractionalMap {
        LinearFractionalMap::affine(u, [re(0.0); 2]).unwrap()
    }

    /// `z ↦ (z₂, z₁)`
    pub fn swap() -> LinearFractionalMap {
        unitary([[re(0.0), re(1.0)], [re(1.0), re(0.0)]])
    }
}
