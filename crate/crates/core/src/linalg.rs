//! Small dense real linear algebra on `Vec<f64>` columns.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Remove the components of `v` along an orthonormal `basis`, two passes.
pub fn orthogonalize_against(v: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut w = v.to_vec();
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, &w);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= c * bi;
            }
        }
    }
    w
}

/// Append the vectors in `candidates` to the orthonormal set `basis`,
/// skipping any whose residual norm falls below `tol` relative to its
/// original norm. Returns how many were added.
pub fn extend_orthonormal(basis: &mut Vec<Vec<f64>>, candidates: &[Vec<f64>], tol: f64) -> usize {
    let mut added = 0;
    for c in candidates {
        let scale = norm(c);
        if scale == 0.0 {
            continue;
        }
        let w = orthogonalize_against(c, basis);
        let n = norm(&w);
        if n > tol * scale {
            basis.push(w.into_iter().map(|x| x / n).collect());
            added += 1;
        }
    }
    added
}

/// Two-pass Gram-Schmidt; fails if the vectors are numerically dependent.
pub fn orthonormalize(vectors: &[Vec<f64>], tol: f64) -> Result<Vec<Vec<f64>>> {
    let mut basis = Vec::with_capacity(vectors.len());
    for (i, v) in vectors.iter().enumerate() {
        if extend_orthonormal(&mut basis, std::slice::from_ref(v), tol) == 0 {
            return Err(Error::Degenerate(format!("vector {i} is dependent on its predecessors")));
        }
    }
    Ok(basis)
}

/// Matrix whose columns are `cols`.
pub fn columns_to_matrix(cols: &[Vec<f64>]) -> DMatrix<f64> {
    let rows = cols.first().map_or(0, Vec::len);
    DMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i])
}

/// Singular values, largest first.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn rank(m: &DMatrix<f64>, tol: f64) -> usize {
    let s = singular_values(m);
    let top = s.first().copied().unwrap_or(0.0);
    s.iter().filter(|&&x| x > tol * top.max(1.0)).count()
}

/// Principal angles between the spans of two orthonormal sets, ascending.
///
/// Each angle is `atan2(sin, cos)` with the sines taken from the residual of
/// `b` after projecting onto `a`, which keeps small angles accurate. The
/// result has `min(dim a, dim b)` entries.
pub fn principal_angles(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<f64> {
    let (a, b) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let k = b.len();
    if k == 0 {
        return Vec::new();
    }
    let am = columns_to_matrix(a);
    let bm = columns_to_matrix(b);
    let c = am.transpose() * &bm;
    let resid = &bm - &am * &c;
    let cos = singular_values(&c); // descending -> ascending angles
    let mut sin = singular_values(&resid);
    sin.reverse(); // ascending
    (0..k)
        .map(|i| {
            let ci = cos.get(i).copied().unwrap_or(0.0).min(1.0);
            let si = sin.get(i).copied().unwrap_or(0.0).min(1.0);
            si.atan2(ci)
        })
        .collect()
}

pub fn largest_principal_angle(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    principal_angles(a, b).last().copied().unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_unit, rng_for};
    use std::f64::consts::FRAC_PI_2;

    fn e(n: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v
    }

    #[test]
    fn gram_schmidt_detects_dependence() {
        let v = vec![vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0]];
        assert!(orthonormalize(&v, 1e-9).is_err());
        let q = orthonormalize(&[vec![1.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]], 1e-9).unwrap();
        assert!(dot(&q[0], &q[1]).abs() < 1e-15);
    }

    #[test]
    fn reorthogonalization_handles_near_parallel_inputs() {
        // Lauchli-style: columns nearly parallel
        let eps = 1e-8;
        let cols: Vec<Vec<f64>> = (0..4)
            .map(|j| {
                let mut v = vec![1.0; 5];
                v[j + 1] += eps;
                v
            })
            .collect();
        let q = orthonormalize(&cols, 1e-12).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot(&q[i], &q[j]) - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn angles_between_coordinate_planes() {
        let a = vec![e(4, 0), e(4, 1)];
        let b = vec![e(4, 2), e(4, 3)];
        assert!((largest_principal_angle(&a, &b) - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(largest_principal_angle(&a, &a), 0.0);
        let c = vec![e(4, 0), e(4, 2)];
        let angles = principal_angles(&a, &c);
        assert!(angles[0].abs() < 1e-15 && (angles[1] - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn small_angles_are_resolved() {
        let t = 1e-10f64;
        let a = vec![e(3, 0)];
        let b = vec![vec![t.cos(), t.sin(), 0.0]];
        assert!((largest_principal_angle(&a, &b) - t).abs() < 1e-20);
    }

    #[test]
    fn rank_of_random_matrix() {
        let mut rng = rng_for(0, &[]);
        let cols: Vec<_> = (0..3).map(|_| random_unit(6, &mut rng)).collect();
        let m = columns_to_matrix(&cols);
        assert_eq!(rank(&m, 1e-10), 3);
    }
}
