//! Closed-form eigenvalues of 3×3 complex matrices.

use num_complex::Complex64;

use super::jordan::nullity;
use super::{re, Mat3};

/// Roots closer than `TOL_CLUSTER · ‖m‖_F` are one eigenvalue.
pub const TOL_CLUSTER: f64 = 1e-7;
/// Roots closer than this (relative) may still be one defective eigenvalue;
/// the merge is accepted only if the kernel dimensions of `(m − μI)^j` agree.
pub const TOL_CLUSTER_DEFECTIVE: f64 = 1e-3;
/// Rank tolerance for `(m − μI)^j`, scaled by `‖m‖_F^j`.
pub const TOL_RANK: f64 = 1e-8;

const NEWTON_STEPS: usize = 3;

/// Coefficients `(a, b, c)` of the monic characteristic polynomial
/// `det(xI − m) = x³ + a x² + b x + c`.
pub fn char_poly(m: &Mat3) -> (Complex64, Complex64, Complex64) {
    let a = &m.0;
    let minors = a[0][0] * a[1][1] - a[0][1] * a[1][0] + a[0][0] * a[2][2] - a[0][2] * a[2][0]
        + a[1][1] * a[2][2]
        - a[1][2] * a[2][1];
    (-m.trace(), minors, -m.det())
}

fn eval_poly(a: Complex64, b: Complex64, c: Complex64, x: Complex64) -> (Complex64, Complex64) {
    let f = ((x + a) * x + b) * x + c;
    let df = (x * 3.0 + a * 2.0) * x + b;
    (f, df)
}

/// The three roots of `x³ + a x² + b x + c` by Cardano's formula, each
/// polished by at most three guarded Newton steps.
pub fn cubic_roots(a: Complex64, b: Complex64, c: Complex64) -> [Complex64; 3] {
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = a * a * a * (2.0 / 27.0) - a * b / 3.0 + c;
    let disc = q * q / 4.0 + p * p * p / 27.0;
    let sq = disc.sqrt();
    // Pick the sign that avoids cancellation in u³.
    let (u3a, u3b) = (-q / 2.0 + sq, -q / 2.0 - sq);
    let u3 = if u3a.norm() >= u3b.norm() { u3a } else { u3b };

    let mut roots = [-shift; 3];
    if u3.norm() > 0.0 {
        let u = u3.cbrt();
        let omega = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        let mut uk = u;
        for r in roots.iter_mut() {
            *r = uk - p / (uk * 3.0) - shift;
            uk *= omega;
        }
    }

    for i in 0..3 {
        let others = (0..3).filter(|&j| j != i).map(|j| (roots[i] - roots[j]).norm());
        let gap = others.fold(f64::INFINITY, f64::min);
        if gap == 0.0 {
            continue;
        }
        for _ in 0..NEWTON_STEPS {
            let (f, df) = eval_poly(a, b, c, roots[i]);
            if f.norm() == 0.0 || df.norm() == 0.0 {
                break;
            }
            let step = f / df;
            let candidate = roots[i] - step;
            if step.norm() > 0.25 * gap || eval_poly(a, b, c, candidate).0.norm() >= f.norm() {
                break;
            }
            roots[i] = candidate;
        }
    }
    roots
}

fn structure_consistent(m: &Mat3, mu: Complex64, k: usize, scale: f64) -> bool {
    let a = m.shift(mu);
    let mut power = Mat3::identity();
    let mut first = 0;
    for j in 1..=k {
        power = power * a;
        let n = nullity(&power, TOL_RANK * scale.powi(j as i32));
        if j == 1 {
            first = n;
        }
        if j == k {
            return first >= 1 && n == k;
        }
    }
    false
}

/// Eigenvalues with algebraic multiplicity.
///
/// Roots of the characteristic cubic are merged when they lie within
/// `TOL_CLUSTER·‖m‖`, or within `TOL_CLUSTER_DEFECTIVE·‖m‖` and the kernel
/// dimensions of `(m − μI)^j` confirm a multiple eigenvalue. Cluster centers
/// are taken from the trace, which is insensitive to the splitting of a
/// defective eigenvalue.
pub fn eigenvalues3(m: &Mat3) -> Vec<(Complex64, usize)> {
    let (a, b, c) = char_poly(m);
    let roots = cubic_roots(a, b, c);
    let scale = m.frobenius_norm();
    if scale == 0.0 {
        return vec![(re(0.0), 3)];
    }
    let trace = m.trace();
    let d = |i: usize, j: usize| (roots[i] - roots[j]).norm();

    let spread = d(0, 1).max(d(0, 2)).max(d(1, 2));
    if spread <= TOL_CLUSTER_DEFECTIVE * scale {
        let mu = trace / 3.0;
        if spread <= TOL_CLUSTER * scale || structure_consistent(m, mu, 3, scale) {
            return vec![(mu, 3)];
        }
    }

    let mut pairs = [(0, 1, 2), (0, 2, 1), (1, 2, 0)];
    pairs.sort_by(|x, y| d(x.0, x.1).total_cmp(&d(y.0, y.1)));
    for (i, j, k) in pairs {
        let gap = d(i, j);
        if gap > TOL_CLUSTER_DEFECTIVE * scale {
            break;
        }
        let mu = (trace - roots[k]) / 2.0;
        if gap <= TOL_CLUSTER * scale || structure_consistent(m, mu, 2, scale) {
            return vec![(mu, 2), (roots[k], 1)];
        }
    }
    roots.iter().map(|&r| (r, 1)).collect()
}
