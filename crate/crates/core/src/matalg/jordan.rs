//! Jordan canonical form of 3×3 complex matrices.

use std::cmp::Ordering;

use num_complex::Complex64;

use super::cubic::{eigenvalues3, TOL_RANK};
use super::{mat_inverse, re, vdot, vnorm, vscale, vsub, Mat3, Vec3, TOL_SINGULAR};
use crate::error::{Error, Result};

/// Reconstruction tolerance, relative to `‖M‖_F`.
pub const TOL_RECON: f64 = 1e-6;

/// Minimum residual norm for a vector to count as new after projecting out
/// an orthonormal basis.
const TOL_INDEPENDENT: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JordanBlock {
    pub eigenvalue: Complex64,
    pub size: usize,
}

/// `M = S Λ S⁻¹` with `Λ` upper-triangular Jordan (ones on the superdiagonal).
///
/// Columns of `S` are Jordan chains, head (eigenvector) first, laid out in
/// block order.
#[derive(Clone, Debug, PartialEq)]
pub struct JordanDecomposition {
    pub s: Mat3,
    pub blocks: Vec<JordanBlock>,
    pub s_inv: Mat3,
}

impl JordanDecomposition {
    /// The Jordan matrix `Λ`.
    pub fn lambda(&self) -> Mat3 {
        let mut l = Mat3::zero();
        let mut offset = 0;
        for b in &self.blocks {
            for i in 0..b.size {
                l.0[offset + i][offset + i] = b.eigenvalue;
                if i + 1 < b.size {
                    l.0[offset + i][offset + i + 1] = re(1.0);
                }
            }
            offset += b.size;
        }
        l
    }

    pub fn reconstruct(&self) -> Mat3 {
        self.s * self.lambda() * self.s_inv
    }

    /// `‖SΛS⁻¹ − m‖_F / ‖m‖_F`
    pub fn relative_residual(&self, m: &Mat3) -> f64 {
        self.reconstruct().dist(m) / m.frobenius_norm()
    }

    /// First column index of each block in `S`.
    pub fn offsets(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .scan(0, |acc, b| {
                let start = *acc;
                *acc += b.size;
                Some(start)
            })
            .collect()
    }

    /// The eigenvector heading each block's chain, with the block index.
    pub fn chain_heads(&self) -> Vec<(usize, Vec3)> {
        self.offsets().into_iter().enumerate().map(|(i, col)| (i, self.s.col(col))).collect()
    }

    /// `(size, eigenvalue)` pairs in canonical order.
    pub fn signature(&self) -> Vec<(usize, Complex64)> {
        self.blocks.iter().map(|b| (b.size, b.eigenvalue)).collect()
    }

    /// Condition number `‖S‖_F ‖S⁻¹‖_F`.
    pub fn condition(&self) -> f64 {
        self.s.frobenius_norm() * self.s_inv.frobenius_norm()
    }
}

/// Canonical block order: size descending, then |λ| descending, then
/// arg λ descending.
fn block_order(a: &JordanBlock, b: &JordanBlock) -> Ordering {
    b.size.cmp(&a.size).then_with(|| {
        let (ma, mb) = (a.eigenvalue.norm(), b.eigenvalue.norm());
        if (ma - mb).abs() > 1e-9 * ma.max(mb) {
            mb.total_cmp(&ma)
        } else {
            b.eigenvalue.arg().total_cmp(&a.eigenvalue.arg())
        }
    })
}

/// Orthonormal basis of the kernel of `a`, from Gaussian elimination with
/// complete pivoting. Pivots of modulus `<= tol` end the elimination.
pub fn null_space(a: &Mat3, tol: f64) -> Vec<Vec3> {
    let mut r = a.0;
    let mut cols = [0usize, 1, 2];
    let mut rank = 0;
    for k in 0..3 {
        let mut best = (k, k, -1.0);
        for i in k..3 {
            for j in k..3 {
                let v = r[i][j].norm();
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        if best.2 <= tol {
            break;
        }
        r.swap(k, best.0);
        for row in r.iter_mut() {
            row.swap(k, best.1);
        }
        cols.swap(k, best.1);
        let inv = r[k][k].inv();
        for j in 0..3 {
            r[k][j] *= inv;
        }
        for i in 0..3 {
            if i != k {
                let f = r[i][k];
                for j in 0..3 {
                    let pivot_row = r[k][j];
                    r[i][j] -= f * pivot_row;
                }
            }
        }
        rank += 1;
    }

    let mut basis = Vec::new();
    for free in rank..3 {
        let mut x = [re(0.0); 3];
        x[cols[free]] = re(1.0);
        for (p, row) in r.iter().enumerate().take(rank) {
            x[cols[p]] = -row[free];
        }
        basis.push(x);
    }
    orthonormalize(&basis)
}

pub(crate) fn nullity(a: &Mat3, tol: f64) -> usize {
    null_space(a, tol).len()
}

/// Modified Gram-Schmidt with one reorthogonalization pass; near-dependent
/// vectors are dropped.
fn orthonormalize(vs: &[Vec3]) -> Vec<Vec3> {
    let mut out: Vec<Vec3> = Vec::new();
    for v in vs {
        let n0 = vnorm(v);
        if n0 == 0.0 {
            continue;
        }
        let mut w = vscale(v, re(1.0 / n0));
        for _ in 0..2 {
            w = project_out(&w, &out);
        }
        let n = vnorm(&w);
        if n > TOL_INDEPENDENT {
            out.push(vscale(&w, re(1.0 / n)));
        }
    }
    out
}

fn project_out(v: &Vec3, basis: &[Vec3]) -> Vec3 {
    basis.iter().fold(*v, |acc, q| vsub(&acc, &vscale(q, vdot(q, &acc))))
}

/// Jordan chains for one eigenvalue `mu` of algebraic multiplicity `k`,
/// each returned head first.
fn jordan_chains(m: &Mat3, mu: Complex64, k: usize, scale: f64) -> Result<Vec<Vec<Vec3>>> {
    let ill = || Error::IllConditioned { residual: f64::NAN };
    let a = m.shift(mu);

    let mut kernels: Vec<Vec<Vec3>> = vec![Vec::new()];
    let mut power = Mat3::identity();
    for j in 1..=k {
        power = power * a;
        kernels.push(null_space(&power, TOL_RANK * scale.powi(j as i32)));
    }
    let dims: Vec<usize> = kernels.iter().map(Vec::len).collect();
    if dims[k] != k || dims[1] == 0 || dims.windows(2).any(|w| w[1] < w[0]) {
        return Err(ill());
    }
    let index = (1..=k).find(|&j| dims[j] == k).unwrap_or(k);
    // blocks_at_least[j] = number of blocks of size >= j
    let blocks_at_least = |j: usize| if j > index { 0 } else { dims[j] - dims[j - 1] };

    let mut tops: Vec<(usize, Vec3)> = Vec::new();
    for level in (1..=index).rev() {
        let wanted = blocks_at_least(level) - blocks_at_least(level + 1);
        if wanted == 0 {
            continue;
        }
        let mut span: Vec<Vec3> = kernels[level - 1].clone();
        for (len, top) in &tops {
            let mut v = *top;
            for _ in 0..(len - level) {
                v = a.mul_vec(&v);
            }
            span.push(v);
        }
        let mut basis = orthonormalize(&span);
        for _ in 0..wanted {
            let best = kernels[level]
                .iter()
                .map(|v| project_out(&project_out(v, &basis), &basis))
                .max_by(|x, y| vnorm(x).total_cmp(&vnorm(y)))
                .ok_or_else(ill)?;
            let n = vnorm(&best);
            if n <= TOL_INDEPENDENT {
                return Err(ill());
            }
            let unit = vscale(&best, re(1.0 / n));
            basis.push(unit);
            tops.push((level, unit));
        }
    }

    Ok(tops
        .into_iter()
        .map(|(len, top)| {
            let mut chain = vec![top];
            for _ in 1..len {
                let next = a.mul_vec(chain.last().unwrap());
                chain.push(next);
            }
            chain.reverse();
            chain
        })
        .collect())
}

/// Jordan canonical form `m = S Λ S⁻¹`.
///
/// Block structure comes from the kernel dimensions of `(m − λI)^j` at
/// tolerance `TOL_RANK·‖m‖^j`; chains are built top-down. Fails with
/// `SingularMatrix` for a zero eigenvalue and `IllConditioned` when the
/// reconstruction misses by more than `TOL_RECON` relative.
pub fn jordan_form(m: &Mat3) -> Result<JordanDecomposition> {
    let scale = m.frobenius_norm();
    if !m.is_finite() || scale == 0.0 || m.det().norm() <= TOL_SINGULAR * scale.powi(3) {
        return Err(Error::SingularMatrix);
    }

    let mut parts: Vec<(JordanBlock, Vec<Vec3>)> = Vec::new();
    for (mu, k) in eigenvalues3(m) {
        for chain in jordan_chains(m, mu, k, scale)? {
            parts.push((JordanBlock { eigenvalue: mu, size: chain.len() }, chain));
        }
    }
    if parts.iter().map(|(b, _)| b.size).sum::<usize>() != 3 {
        return Err(Error::IllConditioned { residual: f64::NAN });
    }

    // Insertion sort: the comparator is tolerance-based, three items at most.
    for i in 1..parts.len() {
        let mut j = i;
        while j > 0 && block_order(&parts[j].0, &parts[j - 1].0) == Ordering::Less {
            parts.swap(j, j - 1);
            j -= 1;
        }
    }

    let cols: Vec<Vec3> = parts.iter().flat_map(|(_, c)| c.iter().copied()).collect();
    let s = Mat3::from_cols([cols[0], cols[1], cols[2]]);
    let s_inv = mat_inverse(&s).map_err(|_| Error::IllConditioned { residual: f64::INFINITY })?;
    let decomposition = JordanDecomposition { s, blocks: parts.into_iter().map(|(b, _)| b).collect(), s_inv };

    let residual = decomposition.relative_residual(m);
    let identity_residual = (s * s_inv).dist(&Mat3::identity());
    if !(residual <= TOL_RECON && identity_residual <= TOL_RECON) {
        return Err(Error::IllConditioned { residual: residual.max(identity_residual) });
    }
    Ok(decomposition)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example1() -> Mat3 {
        Mat3::from_real([[1.0, 2.0, 1.0], [-2.0, 2.0, 2.0], [-1.0, 2.0, 3.0]])
    }

    #[test]
    fn example1_single_block() {
        let m = example1();
        let jd = jordan_form(&m).unwrap();
        assert_eq!(jd.blocks.len(), 1);
        assert_eq!(jd.blocks[0].size, 3);
        assert!((jd.blocks[0].eigenvalue - re(2.0)).norm() < 1e-12);
        assert!(jd.relative_residual(&m) < 1e-12);
        let expected_lambda = Mat3::from_real([[2.0, 1.0, 0.0], [0.0, 2.0, 1.0], [0.0, 0.0, 2.0]]);
        assert!(jd.lambda().max_abs_diff(&expected_lambda) < 1e-12);
        // The eigenvector is the homogeneous point (1, 0, 1).
        let head = jd.chain_heads()[0].1;
        assert!((head[0] / head[2] - re(1.0)).norm() < 1e-12);
        assert!((head[1] / head[2]).norm() < 1e-12);
    }

    #[test]
    fn diagonal_with_repeat() {
        let m = Mat3::diag([re(5.0), re(5.0), re(7.0)]);
        let jd = jordan_form(&m).unwrap();
        let sig = jd.signature();
        assert_eq!(sig.iter().map(|s| s.0).collect::<Vec<_>>(), vec![1, 1, 1]);
        for (got, want) in sig.iter().zip([7.0, 5.0, 5.0]) {
            assert!((got.1 - want).norm() < 1e-12, "{sig:?}");
        }
        assert!(jd.relative_residual(&m) < 1e-14);
    }

    #[test]
    fn two_block_plus_same_eigenvalue() {
        let m = Mat3::from_real([[1.0, 0.0, 0.3], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        let jd = jordan_form(&m).unwrap();
        let sizes: Vec<usize> = jd.blocks.iter().map(|b| b.size).collect();
        assert_eq!(sizes, vec![2, 1]);
        assert!(jd.relative_residual(&m) < 1e-14);
    }

    #[test]
    fn identity_is_three_trivial_blocks() {
        let jd = jordan_form(&Mat3::identity()).unwrap();
        assert_eq!(jd.blocks.len(), 3);
        assert_eq!(jd.lambda(), Mat3::identity());
    }

    #[test]
    fn zero_eigenvalue_is_singular() {
        let m = Mat3::diag([re(1.0), re(0.0), re(2.0)]);
        assert_eq!(jordan_form(&m), Err(Error::SingularMatrix));
    }

    #[test]
    fn null_space_of_rank_one() {
        let m = Mat3::from_real([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [-1.0, -2.0, -3.0]]);
        let ns = null_space(&m, 1e-12);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(vnorm(&m.mul_vec(v)) < 1e-13);
        }
        assert!(vdot(&ns[0], &ns[1]).norm() < 1e-14);
    }

    #[test]
    fn block_order_is_canonical() {
        let b = |re_: f64, im: f64, size| JordanBlock { eigenvalue: Complex64::new(re_, im), size };
        assert_eq!(block_order(&b(1.0, 0.0, 2), &b(5.0, 0.0, 1)), Ordering::Less);
        assert_eq!(block_order(&b(5.0, 0.0, 1), &b(1.0, 0.0, 1)), Ordering::Less);
        assert_eq!(block_order(&b(0.0, 1.0, 1), &b(0.0, -1.0, 1)), Ordering::Less);
    }
}
