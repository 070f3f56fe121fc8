//! Continuous iteration `φ_t` through fractional powers of the Jordan form:
//! `m_{φ_t} = S Λ^t S⁻¹`.
//!
//! Scalar powers use the principal branch `w^t = exp(t·Log w)`. For a single
//! 3-block with eigenvalue `α`, `Λ^t = α^t·U^t` where `U` is unipotent with
//! superdiagonal `λ = 1/α`; the `α^t` factor is projectively irrelevant but
//! kept so integer `t` reproduces `Λⁿ` exactly.

use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lfm::{canonical, AssociatedMatrix, LinearFractionalMap};
use crate::matalg::{dist, jordan_form, norm, re, JordanBlock, JordanDecomposition, Mat3, Point};
use crate::sampling::sample_ball;

/// Images may exceed the closed unit ball by at most this much.
pub const BALL_MARGIN: f64 = 1e-9;

/// Which closed form `Λ^t` follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockPowerRule {
    Diagonal,
    Jordan2,
    Jordan3,
}

impl BlockPowerRule {
    pub fn for_blocks(blocks: &[JordanBlock]) -> Self {
        match blocks.iter().map(|b| b.size).max() {
            Some(3) => BlockPowerRule::Jordan3,
            Some(2) => BlockPowerRule::Jordan2,
            _ => BlockPowerRule::Diagonal,
        }
    }
}

/// `w^t` on the principal branch.
pub fn scalar_power(w: Complex64, t: f64) -> Result<Complex64> {
    if w.norm() == 0.0 {
        return Err(Error::ZeroEigenvalue);
    }
    if t == 0.0 {
        return Ok(re(1.0));
    }
    Ok((w.ln() * t).exp())
}

fn on_negative_axis(w: Complex64) -> bool {
    w.re < 0.0 && w.im.abs() <= 1e-12 * w.norm()
}

/// `[[1, tλ, λ²t(t−1)/2], [0, 1, tλ], [0, 0, 1]]`, the `t`-th power of the
/// unipotent block with superdiagonal `λ`.
pub fn unipotent_power(lambda: Complex64, t: f64) -> Mat3 {
    let mut u = Mat3::identity();
    u[(0, 1)] = lambda * t;
    u[(1, 2)] = lambda * t;
    u[(0, 2)] = lambda * lambda * (t * (t - 1.0) / 2.0);
    u
}

/// `[[λ^t, tλ^{t−1}], [0, λ^t]]`
pub fn jordan2_power(lambda: Complex64, t: f64) -> Result<[[Complex64; 2]; 2]> {
    let p = scalar_power(lambda, t)?;
    Ok([[p, p / lambda * t], [re(0.0), p]])
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaPower {
    pub matrix: Mat3,
    /// Some eigenvalue lies on the negative real axis, where the principal
    /// branch is a choice rather than the unique continuous one.
    pub branch_ambiguity: bool,
}

/// `Λ^t` for Jordan blocks laid out in order along the diagonal.
pub fn lambda_power_t(blocks: &[JordanBlock], t: f64) -> Result<LambdaPower> {
    let mut out = Mat3::zero();
    let mut offset = 0;
    let mut branch_ambiguity = false;
    for b in blocks {
        let alpha = b.eigenvalue;
        if alpha.norm() == 0.0 {
            return Err(Error::ZeroEigenvalue);
        }
        branch_ambiguity |= on_negative_axis(alpha);
        let o = offset;
        match b.size {
            1 => out[(o, o)] = scalar_power(alpha, t)?,
            2 => {
                let p = jordan2_power(alpha, t)?;
                for i in 0..2 {
                    for j in 0..2 {
                        out[(o + i, o + j)] = p[i][j];
                    }
                }
            }
            3 => out = unipotent_power(alpha.inv(), t).scale(scalar_power(alpha, t)?),
            n => return Err(Error::InvalidInput(format!("Jordan block of size {n}"))),
        }
        offset += b.size;
    }
    if offset != 3 {
        return Err(Error::InvalidInput("block sizes must sum to 3".into()));
    }
    Ok(LambdaPower { matrix: out, branch_ambiguity })
}

/// `Λ^t / ρ^t` with `ρ` the spectral radius, so large `t` neither overflows
/// nor underflows the dominant block.
pub fn normalized_lambda_power(blocks: &[JordanBlock], t: f64) -> Result<Mat3> {
    let rho = blocks.iter().map(|b| b.eigenvalue.norm()).fold(0.0, f64::max);
    if rho == 0.0 {
        return Err(Error::ZeroEigenvalue);
    }
    let mut out = Mat3::zero();
    let mut offset = 0;
    for b in blocks {
        let alpha = b.eigenvalue;
        let scale = scalar_power(alpha / rho, t)?;
        let u = unipotent_power(alpha.inv(), t);
        let o = offset;
        for i in 0..b.size {
            for j in i..b.size {
                out[(o + i, o + j)] = u[(i, j)] * scale;
            }
        }
        offset += b.size;
    }
    Ok(out)
}

/// One member `φ_t` of the semigroup.
#[derive(Clone, Debug)]
pub struct SemigroupElement {
    pub t: f64,
    pub map: LinearFractionalMap,
    pub matrix: AssociatedMatrix,
    /// `t < 0`: the formulas extend but the semigroup lives on `[0, ∞)`.
    pub extrapolated: bool,
    pub branch_ambiguity: bool,
    pub parent: Arc<JordanDecomposition>,
}

fn check_separation(decomp: &JordanDecomposition) -> Result<()> {
    let blocks = &decomp.blocks;
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            let (a, b) = (blocks[i].eigenvalue, blocks[j].eigenvalue);
            let close = (a - b).norm() <= 1e-6 * a.norm().max(b.norm());
            if a != b && close && decomp.condition() > 1e8 {
                return Err(Error::IllConditioned { residual: decomp.condition() });
            }
        }
    }
    Ok(())
}

/// `S Λ^t S⁻¹` without normalization.
pub fn matrix_t(decomp: &JordanDecomposition, t: f64) -> Result<Mat3> {
    check_separation(decomp)?;
    let power = lambda_power_t(&decomp.blocks, t)?;
    Ok(decomp.s * power.matrix * decomp.s_inv)
}

fn element(parent: Arc<JordanDecomposition>, t: f64) -> Result<SemigroupElement> {
    check_separation(&parent)?;
    let power = lambda_power_t(&parent.blocks, t)?;
    let m = parent.s * power.matrix * parent.s_inv;
    let matrix = AssociatedMatrix::new(m)?;
    Ok(SemigroupElement {
        t,
        map: LinearFractionalMap::from_matrix(&matrix)?,
        matrix,
        extrapolated: t < 0.0,
        branch_ambiguity: power.branch_ambiguity,
        parent,
    })
}

/// `φ_t` with `m_{φ_t} = S Λ^t S⁻¹`.
pub fn phi_t(decomp: &JordanDecomposition, t: f64) -> Result<SemigroupElement> {
    element(Arc::new(decomp.clone()), t)
}

/// A semigroup `{φ_t}` generated by one map.
#[derive(Clone, Debug)]
pub struct Semigroup {
    decomposition: Arc<JordanDecomposition>,
}

impl Semigroup {
    pub fn new(phi: &LinearFractionalMap) -> Result<Self> {
        Ok(Semigroup { decomposition: Arc::new(jordan_form(&phi.raw_matrix())?) })
    }

    pub fn from_decomposition(decomp: JordanDecomposition) -> Self {
        Semigroup { decomposition: Arc::new(decomp) }
    }

    pub fn decomposition(&self) -> &JordanDecomposition {
        &self.decomposition
    }

    pub fn rule(&self) -> BlockPowerRule {
        BlockPowerRule::for_blocks(&self.decomposition.blocks)
    }

    pub fn at(&self, t: f64) -> Result<SemigroupElement> {
        element(Arc::clone(&self.decomposition), t)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SemigroupReport {
    /// max over the grids of `‖canon(m_t m_s) − canon(m_{t+s})‖_max`
    pub matrix_law: f64,
    /// max over grids and samples of `‖φ_t(φ_s(z)) − φ_{t+s}(z)‖`
    pub pointwise_law: f64,
    /// samples with `‖φ_t(z)‖ > 1 + BALL_MARGIN` for `t` in the t-grid
    pub ball_exits: usize,
    /// largest `‖φ_t(z)‖` seen over the t-grid
    pub worst_norm: f64,
    /// `‖canon(m_0) − I‖_max`
    pub identity_anchor: f64,
}

/// Checks the semigroup law at matrix level and pointwise, and counts ball
/// exits. Deterministic in `(grids, z_samples, seed)`.
pub fn verify_semigroup(
    decomp: &JordanDecomposition,
    t_grid: &[f64],
    s_grid: &[f64],
    z_samples: usize,
    seed: u64,
) -> Result<SemigroupReport> {
    let group = Semigroup::from_decomposition(decomp.clone());
    let samples = sample_ball(z_samples, seed);
    let mut report = SemigroupReport {
        identity_anchor: group.at(0.0)?.matrix.matrix().max_abs_diff(&Mat3::identity()),
        ..Default::default()
    };

    for &t in t_grid {
        let phi_t = group.at(t)?;
        for z in &samples {
            let r = phi_t.map.eval(z).map(|w| norm(&w)).unwrap_or(f64::INFINITY);
            report.worst_norm = report.worst_norm.max(r);
            if r > 1.0 + BALL_MARGIN {
                report.ball_exits += 1;
            }
        }
        for &s in s_grid {
            let phi_s = group.at(s)?;
            let phi_ts = group.at(t + s)?;
            let product = canonical(&(*phi_t.matrix.matrix() * *phi_s.matrix.matrix()))?;
            report.matrix_law = report.matrix_law.max(product.max_abs_diff(phi_ts.matrix.matrix()));
            for z in &samples {
                let lhs = phi_s.map.eval(z).and_then(|w| phi_t.map.eval(&w));
                let rhs = phi_ts.map.eval(z);
                let r = match (lhs, rhs) {
                    (Ok(a), Ok(b)) => dist(&a, &b),
                    _ => f64::INFINITY,
                };
                report.pointwise_law = report.pointwise_law.max(r);
            }
        }
    }
    Ok(report)
}

/// `[(t, φ_t(z0))]` over the grid.
pub fn orbit(decomp: &JordanDecomposition, z0: &Point, t_grid: &[f64]) -> Result<Vec<(f64, Point)>> {
    if norm(z0) >= 1.0 {
        return Err(Error::Precondition("orbit start must lie in the open unit ball".into()));
    }
    let group = Semigroup::from_decomposition(decomp.clone());
    t_grid.iter().map(|&t| Ok((t, group.at(t)?.map.eval(z0)?))).collect()
}

/// CSV with header `t,re1,im1,re2,im2`, 17 significant digits.
pub fn write_orbit_csv<W: Write>(rows: &[(f64, Point)], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "re1", "im1", "re2", "im2"])?;
    for (t, z) in rows {
        let cells = [*t, z[0].re, z[0].im, z[1].re, z[1].im];
        w.write_record(cells.iter().map(|x| format!("{x:.16e}")))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lfm::examples::parabolic_example;
    use crate::matalg::c64;

    fn example_closed_form(t: f64) -> Mat3 {
        let t2 = t * t;
        Mat3::from_real([[(2.0 - t2) / 2.0, t, t2 / 2.0], [-t, 1.0, t], [-t2 / 2.0, t, (t2 + 2.0) / 2.0]])
    }

    #[test]
    fn unipotent_power_for_lambda_half() {
        for t in [0.0, 0.3, 1.0, 2.5] {
            let u = unipotent_power(re(0.5), t);
            let want =
                Mat3::from_real([[1.0, t / 2.0, t * (t - 1.0) / 8.0], [0.0, 1.0, t / 2.0], [0.0, 0.0, 1.0]]);
            assert!(u.max_abs_diff(&want) < 1e-15);
        }
    }

    #[test]
    fn zero_power_is_identity() {
        let blocks = [
            JordanBlock { eigenvalue: c64(0.3, 0.4), size: 2 },
            JordanBlock { eigenvalue: re(-2.0), size: 1 },
        ];
        let p = lambda_power_t(&blocks, 0.0).unwrap();
        assert_eq!(p.matrix, Mat3::identity());
        assert!(p.branch_ambiguity);
        let single = [JordanBlock { eigenvalue: re(2.0), size: 3 }];
        assert!(lambda_power_t(&single, 0.0).unwrap().matrix.max_abs_diff(&Mat3::identity()) < 1e-15);
    }

    #[test]
    fn jordan3_integer_powers_match_products() {
        let blocks = [JordanBlock { eigenvalue: re(2.0), size: 3 }];
        let lambda = Mat3::from_real([[2.0, 1.0, 0.0], [0.0, 2.0, 1.0], [0.0, 0.0, 2.0]]);
        let mut brute = Mat3::identity();
        for n in 0..=20 {
            let p = lambda_power_t(&blocks, n as f64).unwrap().matrix;
            assert!(p.dist(&brute) <= 1e-9 * brute.frobenius_norm(), "n = {n}");
            brute = brute * lambda;
        }
    }

    #[test]
    fn normalized_power_matches_scaled_power() {
        let blocks = [
            JordanBlock { eigenvalue: c64(0.0, 3.0), size: 2 },
            JordanBlock { eigenvalue: re(-1.5), size: 1 },
        ];
        for t in [0.0, 1.0, 2.5, 7.0] {
            let want = lambda_power_t(&blocks, t).unwrap().matrix.scale(re(3f64.powf(-t)));
            assert!(normalized_lambda_power(&blocks, t).unwrap().max_abs_diff(&want) < 1e-12);
        }
        let big =
            normalized_lambda_power(&[JordanBlock { eigenvalue: re(2.0), size: 3 }], 2f64.powi(60)).unwrap();
        assert!(big.is_finite());
    }

    #[test]
    fn zero_eigenvalue_rejected() {
        let blocks =
            [JordanBlock { eigenvalue: re(0.0), size: 1 }, JordanBlock { eigenvalue: re(1.0), size: 2 }];
        assert_eq!(lambda_power_t(&blocks, 0.5), Err(Error::ZeroEigenvalue));
    }

    #[test]
    fn example_phi_t_matches_closed_form() {
        let group = Semigroup::new(&parabolic_example()).unwrap();
        assert_eq!(group.rule(), BlockPowerRule::Jordan3);
        for t in [0.0, 0.5, 1.0, 2.0, 3.7] {
            let got = group.at(t).unwrap();
            let want = canonical(&example_closed_form(t)).unwrap();
            assert!(got.matrix.matrix().max_abs_diff(&want) < 1e-10, "t = {t}");
            assert!(!got.extrapolated);
        }
        // t = 1 is m_φ itself, and also the closed form equals m_φ / 2.
        let one = group.at(1.0).unwrap();
        assert!(one.matrix.projectively_eq(&parabolic_example().to_matrix(), 1e-12));
        assert_eq!(example_closed_form(1.0).scale(re(2.0)), parabolic_example().raw_matrix());
    }

    #[test]
    fn negative_t_is_flagged() {
        let group = Semigroup::new(&parabolic_example()).unwrap();
        let back = group.at(-1.0).unwrap();
        assert!(back.extrapolated);
        let inv = parabolic_example().inverse().unwrap();
        assert!(back.matrix.projectively_eq(&inv.to_matrix(), 1e-12));
    }

    #[test]
    fn example_semigroup_report() {
        let jd = jordan_form(parabolic_example().to_matrix().matrix()).unwrap();
        let grid = [0.0, 0.25, 0.5, 1.0, 2.0];
        let r = verify_semigroup(&jd, &grid, &grid, 200, 42).unwrap();
        assert!(r.matrix_law < 1e-9, "{r:?}");
        assert!(r.pointwise_law < 1e-9, "{r:?}");
        assert_eq!(r.ball_exits, 0);
        assert!(r.identity_anchor < 1e-12);
    }

    #[test]
    fn identity_semigroup_is_trivial() {
        let jd = jordan_form(&Mat3::identity()).unwrap();
        let grid = [0.0, 0.5, 1.0];
        let r = verify_semigroup(&jd, &grid, &grid, 50, 1).unwrap();
        assert_eq!(r.matrix_law, 0.0);
        assert_eq!(r.pointwise_law, 0.0);
        assert_eq!(r.ball_exits, 0);
    }

    #[test]
    fn orbit_of_origin() {
        let jd = jordan_form(parabolic_example().to_matrix().matrix()).unwrap();
        let rows = orbit(&jd, &[re(0.0); 2], &[0.0, 1.0, 50.0]).unwrap();
        assert_eq!(rows[0].1, [re(0.0); 2]);
        assert!(dist(&rows[1].1, &[re(1.0 / 3.0), re(2.0 / 3.0)]) < 1e-12);
        assert!(dist(&rows[2].1, &[re(1.0), re(0.0)]) < 0.05);
        assert!(orbit(&jd, &[re(1.0), re(0.0)], &[0.0]).is_err());
    }

    #[test]
    fn orbit_csv_format() {
        let rows = vec![(0.5, [c64(1.0, -0.0), c64(1.0 / 3.0, 2.0)])];
        let mut buf = Vec::new();
        write_orbit_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,re1,im1,re2,im2"));
        let row: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(row, vec![0.5, 1.0, -0.0, 1.0 / 3.0, 2.0]);
        assert!(text.contains("3.3333333333333331e-1"));
    }
}
