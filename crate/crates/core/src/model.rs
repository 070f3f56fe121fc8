//! Linear fractional models `σ ∘ φ = Φ ∘ σ`.
//!
//! For a linear fractional `φ` the model comes straight from the Jordan form
//! `m_φ = S Λ S⁻¹`: `σ` is the map of `S⁻¹` and `Φ` the map of `Λ`. What
//! remains is locating the Denjoy-Wolff point and reporting which model
//! domain the dynamics live on.
//!
//! The second half is the analytic pathway `φ = σ⁻¹ ∘ Φ ∘ σ` with a fixed
//! nonlinear `σ` into the Siegel half space and a Heisenberg translation `Φ`.

use num_complex::Complex64;
use serde::Serialize;

use crate::domains::{self, principal_sqrt, DomainKind};
use crate::error::{Error, Result};
use crate::lfm::{fixed_points_of, FixedPoint, LinearFractionalMap, PointClass};
use crate::matalg::{
    c64, dist, jordan_form, norm, re, vdot, vnorm, vscale, vsub, JordanDecomposition, Mat3, Point, Vec3,
};
use crate::sampling::sample_ball;
use crate::semigroup::normalized_lambda_power;

/// Doublings of `n` in `φ_n(0)` before giving up on the orbit of the origin.
pub const MAX_DOUBLINGS: usize = 64;
/// Orbit step below which the limit is taken as reached.
pub const TOL_ORBIT: f64 = 1e-10;
/// Orbit limits farther than this from every fixed point are rejected.
pub const TOL_DW_MATCH: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DwLocation {
    Interior,
    Boundary,
}

/// The shape of `Φ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ModelKind {
    /// Interior DW point; `Φ` is linear on `ℂ²` after moving the point.
    Linear,
    /// Boundary DW point of multiplicity one.
    Dilation,
    /// Multiplicity two.
    HalfSpaceType,
    /// A single 3-block.
    HeisenbergType,
}

impl ModelKind {
    pub fn label(self) -> &'static str {
        match self {
            ModelKind::Linear => "linear model",
            ModelKind::Dilation => "dilation model",
            ModelKind::HalfSpaceType => "half-space-type model",
            ModelKind::HeisenbergType => "Heisenberg-type model",
        }
    }
}

/// Classification of a linear fractional self-map by its Denjoy-Wolff data.
#[derive(Clone, Debug)]
pub struct ModelClass {
    pub dw_point: FixedPoint,
    pub location: DwLocation,
    pub multiplicity: usize,
    pub domain: DomainKind,
    pub kind: ModelKind,
    pub sigma: LinearFractionalMap,
    pub phi_model: LinearFractionalMap,
    pub decomposition: JordanDecomposition,
    pub fixed_points: Vec<FixedPoint>,
    pub is_automorphism: bool,
    /// `1/α` for a single 3-block with eigenvalue `α`: the superdiagonal of
    /// `Λ` once the diagonal is scaled to 1.
    pub standardized_lambda: Option<Complex64>,
    /// Doublings used to locate a boundary DW point.
    pub doublings: usize,
}

impl ModelClass {
    /// `Λ` with unit diagonal entry at the DW block.
    pub fn standardized_model(&self) -> Mat3 {
        let lambda = self.decomposition.lambda();
        let alpha = self.dw_point.eigenvalue;
        lambda.scale(alpha.inv())
    }

    /// See [`intertwining_residual`].
    pub fn intertwining_residual(&self, phi: &LinearFractionalMap, samples: usize, seed: u64) -> f64 {
        intertwining_residual(&self.sigma, phi, &self.phi_model, samples, seed)
    }

    pub fn summary(&self) -> String {
        let loc = match self.location {
            DwLocation::Interior => "interior",
            DwLocation::Boundary => "boundary",
        };
        let p = self.dw_point.location.unwrap_or([re(f64::NAN); 2]);
        let mut s = format!(
            "{loc} DW ({}, {}), multiplicity {}, {}, domain {}",
            crate::matalg::fmt_complex(p[0]),
            crate::matalg::fmt_complex(p[1]),
            self.multiplicity,
            self.kind.label(),
            self.domain.label(),
        );
        if let Some(l) = self.standardized_lambda {
            s.push_str(&format!(", λ = {} after standardizing", crate::matalg::fmt_complex(l)));
        }
        if self.is_automorphism {
            s.push_str(", automorphism of the ball");
        }
        s
    }
}

/// Largest distance between `σ(φ(z))` and `Φ(σ(z))` over ball samples,
/// measured as points of `ℙ²`: both sides are evaluated on homogeneous
/// vectors `(z, 1)`, normalized, and phase-aligned. `σ` sends the DW point
/// to infinity, where an affine distance would only measure conditioning.
pub fn intertwining_residual(
    sigma: &LinearFractionalMap,
    phi: &LinearFractionalMap,
    model: &LinearFractionalMap,
    samples: usize,
    seed: u64,
) -> f64 {
    let lhs_m = sigma.raw_matrix() * phi.raw_matrix();
    let rhs_m = model.raw_matrix() * sigma.raw_matrix();
    let mut worst: f64 = 0.0;
    for z in sample_ball(samples, seed) {
        let h = [z[0], z[1], re(1.0)];
        worst = worst.max(projective_distance(&lhs_m.mul_vec(&h), &rhs_m.mul_vec(&h)));
    }
    worst
}

/// `min_|c|=1 ‖v/‖v‖ − c·u/‖u‖‖`
pub fn projective_distance(u: &Vec3, v: &Vec3) -> f64 {
    let (nu, nv) = (vnorm(u), vnorm(v));
    if nu == 0.0 || nv == 0.0 {
        return f64::INFINITY;
    }
    let u = vscale(u, re(1.0 / nu));
    let v = vscale(v, re(1.0 / nv));
    let ip = vdot(&u, &v);
    let c = if ip.norm() == 0.0 { re(1.0) } else { ip / ip.norm() };
    vnorm(&vsub(&v, &vscale(&u, c)))
}

/// Limit of `φ_n(0)` along `n = 2^k`, from closed-form powers of the
/// Jordan form. Returns the limit and the number of doublings used.
pub fn orbit_limit(jd: &JordanDecomposition) -> Result<(Point, usize)> {
    let at = |k: usize| -> Result<Point> {
        let p = normalized_lambda_power(&jd.blocks, 2f64.powi(k as i32))?;
        let v = (jd.s * p * jd.s_inv).col(2);
        if v[2].norm() <= 1e-300 || !v.iter().all(|x| x.is_finite()) {
            return Err(Error::NoConvergence { iterations: k });
        }
        Ok([v[0] / v[2], v[1] / v[2]])
    };
    let mut prev = at(0)?;
    for k in 1..=MAX_DOUBLINGS {
        let z = at(k)?;
        if dist(&z, &prev) < TOL_ORBIT {
            return Ok((z, k));
        }
        prev = z;
    }
    Err(Error::NoConvergence { iterations: MAX_DOUBLINGS })
}

/// Finds the DW point, its multiplicity and the model `(σ, Φ)`.
pub fn classify(phi: &LinearFractionalMap) -> Result<ModelClass> {
    if !phi.is_invertible() {
        return Err(Error::SingularMatrix);
    }
    // The representative as entered: standardized quantities such as `1/α`
    // are not projective invariants.
    let jd = jordan_form(&phi.raw_matrix())?;
    let fixed = fixed_points_of(&jd)?;

    let interior = fixed
        .iter()
        .filter(|f| f.classification == PointClass::Interior)
        .min_by(|a, b| norm(&a.location.unwrap()).total_cmp(&norm(&b.location.unwrap())));

    let (dw, location, doublings) = match interior {
        Some(f) => (*f, DwLocation::Interior, 0),
        None => {
            let (limit, k) = orbit_limit(&jd)?;
            let mut near: Vec<(&FixedPoint, f64)> = fixed
                .iter()
                .filter_map(|f| f.location.map(|p| (f, dist(&p, &limit))))
                .filter(|&(_, d)| d <= TOL_DW_MATCH)
                .collect();
            near.sort_by(|a, b| a.1.total_cmp(&b.1));
            match near.as_slice() {
                [] => return Err(Error::NoConvergence { iterations: k }),
                [(f, _)] => (**f, DwLocation::Boundary, k),
                [(f, _), (g, _), ..] => {
                    if dist(&f.location.unwrap(), &g.location.unwrap()) > 1e-9 {
                        return Err(Error::AmbiguousDW);
                    }
                    (**f, DwLocation::Boundary, k)
                }
            }
        }
    };

    let multiplicity = jd.blocks[dw.block].size;
    let (kind, domain) = match (location, multiplicity) {
        (DwLocation::Interior, _) => (ModelKind::Linear, DomainKind::WholeSpace),
        (DwLocation::Boundary, 1) => (ModelKind::Dilation, DomainKind::SiegelHalfSpace),
        (DwLocation::Boundary, 2) => (ModelKind::HalfSpaceType, DomainKind::HalfSpace),
        (DwLocation::Boundary, _) => (ModelKind::HeisenbergType, DomainKind::SiegelHalfSpace),
    };
    let standardized_lambda = (multiplicity == 3).then(|| dw.eigenvalue.inv());

    Ok(ModelClass {
        location,
        multiplicity,
        domain,
        kind,
        sigma: LinearFractionalMap::from_mat3(&jd.s_inv)?,
        phi_model: LinearFractionalMap::from_mat3(&jd.lambda())?,
        is_automorphism: phi.is_ball_automorphism(),
        standardized_lambda,
        doublings,
        dw_point: dw,
        fixed_points: fixed,
        decomposition: jd,
    })
}

/// A Heisenberg translation `h_b(z) = Az + b`, `A = [[1, 2·conj(b₂)], [0, 1]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeisenbergTranslation {
    pub b: Point,
}

impl HeisenbergTranslation {
    pub fn map(&self) -> LinearFractionalMap {
        let a = [[re(1.0), self.b[1].conj() * 2.0], [re(0.0), re(1.0)]];
        LinearFractionalMap::affine(a, self.b).expect("finite translation")
    }

    /// Whether `h_b` maps `ℍ²` into itself: `Re b₁ ≥ |b₂|²`.
    pub fn preserves_siegel(&self) -> bool {
        self.b[0].re >= self.b[1].norm_sqr()
    }
}

pub fn heisenberg(b: Point) -> LinearFractionalMap {
    HeisenbergTranslation { b }.map()
}

/// The translation vector of the example model `Φ = h_b`.
pub const EXAMPLE_TRANSLATION: Point = [Complex64::new(0.5, 0.0), Complex64::new(0.25, 0.0)];

/// `Φ_t(z) = (z₁ + (t/2)z₂ + t(t+7)/16, z₂ + t/4)`, the Heisenberg flow with
/// `Φ₁ = h_{(1/2, 1/4)}`.
pub fn heisenberg_flow(t: f64) -> LinearFractionalMap {
    heisenberg([re(t * (t + 7.0) / 16.0), re(t / 4.0)])
}

/// A holomorphic change of variables `σ` with an inverse on its image.
pub trait Intertwiner {
    fn forward(&self, z: &Point) -> Result<Point>;
    fn backward(&self, w: &Point) -> Result<Point>;
}

/// `σ(z) = (√(2(z₁+1)/(1−z₁)), √(z₂/(1−z₁)))` from the ball into `ℍ²`.
#[derive(Clone, Copy, Debug, Default)]
pub struct SquareRootCayley;

impl Intertwiner for SquareRootCayley {
    fn forward(&self, z: &Point) -> Result<Point> {
        domains::sigma(z)
    }
    fn backward(&self, w: &Point) -> Result<Point> {
        domains::sigma_inv(w)
    }
}

/// Any pair of closures works as an intertwiner.
pub struct FnIntertwiner<F, G> {
    pub forward: F,
    pub backward: G,
}

impl<F, G> Intertwiner for FnIntertwiner<F, G>
where
    F: Fn(&Point) -> Result<Point>,
    G: Fn(&Point) -> Result<Point>,
{
    fn forward(&self, z: &Point) -> Result<Point> {
        (self.forward)(z)
    }
    fn backward(&self, w: &Point) -> Result<Point> {
        (self.backward)(w)
    }
}

/// `φ = σ⁻¹ ∘ Φ ∘ σ`.
pub struct AnalyticModelMap<I> {
    pub sigma: I,
    pub model: LinearFractionalMap,
}

impl<I: Intertwiner> AnalyticModelMap<I> {
    pub fn new(sigma: I, model: LinearFractionalMap) -> Self {
        AnalyticModelMap { sigma, model }
    }

    pub fn eval(&self, z: &Point) -> Result<Point> {
        let w = self.sigma.forward(z)?;
        self.sigma.backward(&self.model.eval(&w)?)
    }
}

fn check_in_ball(z: &Point) -> Result<()> {
    if norm(z) >= 1.0 {
        return Err(Error::Precondition("point must lie in the open unit ball".into()));
    }
    Ok(())
}

/// The example analytic self-map `σ⁻¹ ∘ h_{(1/2, 1/4)} ∘ σ`.
pub fn analytic_phi(z: &Point) -> Result<Point> {
    check_in_ball(z)?;
    AnalyticModelMap::new(SquareRootCayley, heisenberg(EXAMPLE_TRANSLATION)).eval(z)
}

/// `σ⁻¹ ∘ Φ_t ∘ σ`.
pub fn analytic_phi_t(t: f64, z: &Point) -> Result<Point> {
    if t < 0.0 {
        return Err(Error::Precondition(format!("t = {t} must be nonnegative")));
    }
    check_in_ball(z)?;
    AnalyticModelMap::new(SquareRootCayley, heisenberg_flow(t)).eval(z)
}

/// The three radicals of the closed forms:
/// `r₁ = √(2(1−z₁²))`, `r₂ = √(z₂(1−z₁))`, `r₃ = √(2z₂(z₁+1))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Radicals {
    pub r1: Complex64,
    pub r2: Complex64,
    pub r3: Complex64,
}

/// Radicals on the branches that `σ` induces. `r₁` is principal. `r₂` is
/// chosen with `r₂/(1−z₁) = √(z₂/(1−z₁))` principal, and `r₃ = r₁r₂/(1−z₁)`.
/// Principal roots of `z₂(1−z₁)` and `2z₂(z₁+1)` disagree with this on a
/// set of positive measure.
pub fn radicals(z: &Point) -> Result<Radicals> {
    let q = 1.0 - z[0];
    if q.norm() <= 1e-14 {
        return Err(Error::PoleAtPoint);
    }
    let r1 = principal_sqrt((1.0 - z[0] * z[0]) * 2.0)?;
    let mut r2 = (z[1] * q).sqrt();
    let s = r2 / q;
    if s.re == 0.0 && s.im != 0.0 {
        return Err(Error::BranchCut);
    }
    if s.re < 0.0 {
        r2 = -r2;
    }
    Ok(Radicals { r1, r2, r3: r1 * r2 / q })
}

/// All three radicals on the principal branch.
pub fn principal_radicals(z: &Point) -> Result<Radicals> {
    Ok(Radicals {
        r1: principal_sqrt((1.0 - z[0] * z[0]) * 2.0)?,
        r2: principal_sqrt(z[1] * (1.0 - z[0]))?,
        r3: principal_sqrt(z[1] * (z[0] + 1.0) * 2.0)?,
    })
}

/// `(A/B, C/D)` with
///
/// ```text
/// A = 1024z₁ + 64t²z₂ + t²(t+7)²(1−z₁) + 256t·r₃ + 32t(t+7)·r₁ + 16t²(t+7)·r₂
/// B = A with 1024z₁ replaced by 1024
/// C = 64t²(1−z₁) + 1024z₂ + 512t·r₂
/// D = B
/// ```
pub fn closed_form_with(t: f64, z: &Point, r: &Radicals) -> Result<Point> {
    let t2 = t * t;
    let t7 = t + 7.0;
    let rest = z[1] * (64.0 * t2)
        + (1.0 - z[0]) * (t2 * t7 * t7)
        + r.r3 * (256.0 * t)
        + r.r1 * (32.0 * t * t7)
        + r.r2 * (16.0 * t2 * t7);
    let a = z[0] * 1024.0 + rest;
    let b = rest + 1024.0;
    let c = (1.0 - z[0]) * (64.0 * t2) + z[1] * 1024.0 + r.r2 * (512.0 * t);
    if b.norm() <= 1e-12 * (1024.0 + rest.norm()) {
        return Err(Error::PoleAtPoint);
    }
    Ok([a / b, c / b])
}

/// The closed form of `φ_t` on the branches of [`radicals`].
pub fn closed_form_phi_t(t: f64, z: &Point) -> Result<Point> {
    closed_form_with(t, z, &radicals(z)?)
}

/// The closed form at `t = 1`:
///
/// ```text
/// φ₁ = (15z₁ + z₂ + 1 + 4r₃ + 4r₁ + 2r₂) / (−z₁ + z₂ + 17 + 4r₃ + 4r₁ + 2r₂)
/// φ₂ = (16z₂ − z₁ + 1 + 8r₂)             / (−z₁ + z₂ + 17 + 4r₃ + 4r₁ + 2r₂)
/// ```
pub fn closed_form_phi(z: &Point) -> Result<Point> {
    let r = radicals(z)?;
    let tail = r.r3 * 4.0 + r.r1 * 4.0 + r.r2 * 2.0;
    let den = -z[0] + z[1] + 17.0 + tail;
    if den.norm() <= 1e-12 {
        return Err(Error::PoleAtPoint);
    }
    let n1 = z[0] * 15.0 + z[1] + 1.0 + tail;
    let n2 = z[1] * 16.0 - z[0] + 1.0 + r.r2 * 8.0;
    Ok([n1 / den, n2 / den])
}

/// A ball point whose image under the example `φ_t` leaves the ball for
/// `t = 1.5` and `t = 3`.
pub fn example_exit_point() -> Point {
    [c64(0.87263462, -0.19881599), c64(0.03751475, -0.44337605)]
}
