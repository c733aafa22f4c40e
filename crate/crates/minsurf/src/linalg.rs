//! Fixed-size dense kernels for matrices up to 4×4.

#[allow(unused_imports)]
use num_traits::Float;

pub const MAX_DIM: usize = 4;

pub type SmallMat = [[f64; MAX_DIM]; MAX_DIM];

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len().min(b.len()) {
        s += a[i] * b[i];
    }
    s
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Invert the leading k×k block of `a` by Gauss-Jordan elimination with
/// partial pivoting; returns `(inverse, determinant)`.
///
/// Callers only pass symmetric positive definite matrices (induced metrics),
/// so the pivot never vanishes; a zero pivot is a caller bug and panics.
pub fn invert(a: &SmallMat, k: usize) -> (SmallMat, f64) {
    debug_assert!((1..=MAX_DIM).contains(&k));
    let mut w = [[0.0f64; 2 * MAX_DIM]; MAX_DIM];
    for i in 0..k {
        for j in 0..k {
            w[i][j] = a[i][j];
        }
        w[i][k + i] = 1.0;
    }
    let mut det = 1.0;
    for col in 0..k {
        let mut piv = col;
        for r in col + 1..k {
            if w[r][col].abs() > w[piv][col].abs() {
                piv = r;
            }
        }
        if piv != col {
            w.swap(piv, col);
            det = -det;
        }
        let d = w[col][col];
        assert!(d != 0.0, "singular matrix passed to invert");
        det *= d;
        let inv_d = 1.0 / d;
        for j in 0..2 * k {
            w[col][j] *= inv_d;
        }
        for r in 0..k {
            if r == col {
                continue;
            }
            let factor = w[r][col];
            if factor != 0.0 {
                for j in 0..2 * k {
                    w[r][j] -= factor * w[col][j];
                }
            }
        }
    }
    let mut inv = [[0.0f64; MAX_DIM]; MAX_DIM];
    for i in 0..k {
        for j in 0..k {
            inv[i][j] = w[i][k + j];
        }
    }
    (inv, det)
}

/// Determinant of the leading k×k block (elimination with partial pivoting).
pub fn det(a: &SmallMat, k: usize) -> f64 {
    let mut w = *a;
    let mut d = 1.0;
    for col in 0..k {
        let mut piv = col;
        for r in col + 1..k {
            if w[r][col].abs() > w[piv][col].abs() {
                piv = r;
            }
        }
        if w[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            w.swap(piv, col);
            d = -d;
        }
        d *= w[col][col];
        for r in col + 1..k {
            let factor = w[r][col] / w[col][col];
            for j in col..k {
                w[r][j] -= factor * w[col][j];
            }
        }
    }
    d
}

/// Extend `fixed[..count]` (orthonormal vectors of length `dim`) to an
/// orthonormal basis of R^dim, filling slots `count..dim`. Candidates are the
/// coordinate vectors scanned in index order, so the completion is
/// deterministic. Two projection passes keep the result orthogonal to
/// working precision.
pub fn complete_orthonormal(fixed: &mut [[f64; MAX_DIM]; MAX_DIM], count: usize, dim: usize) {
    let mut have = count;
    let mut cand = 0;
    while have < dim {
        debug_assert!(cand < dim, "orthonormal completion ran out of candidates");
        let mut v = [0.0f64; MAX_DIM];
        v[cand] = 1.0;
        cand += 1;
        for _pass in 0..2 {
            for f in fixed.iter().take(have) {
                let proj = dot(&v[..dim], &f[..dim]);
                for j in 0..dim {
                    v[j] -= proj * f[j];
                }
            }
        }
        let len = norm(&v[..dim]);
        // Any candidate nearly inside the current span is skipped; a
        // coordinate vector with projection >= 1/sqrt(dim) always exists.
        if len < 0.45 {
            continue;
        }
        for x in v.iter_mut().take(dim) {
            *x /= len;
        }
        fixed[have] = v;
        have += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invert_recovers_identity() {
        let a = [
            [4.0, 1.0, 0.5, 0.0],
            [1.0, 3.0, 0.2, 0.1],
            [0.5, 0.2, 5.0, 0.3],
            [0.0, 0.1, 0.3, 2.0],
        ];
        for k in 1..=4 {
            let (inv, d) = invert(&a, k);
            assert!(d > 0.0);
            for i in 0..k {
                for j in 0..k {
                    let mut s = 0.0;
                    for l in 0..k {
                        s += a[i][l] * inv[l][j];
                    }
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((s - expect).abs() < 1e-12, "k={k} ({i},{j}): {s}");
                }
            }
            assert!((det(&a, k) - d).abs() < 1e-10 * d.abs().max(1.0));
        }
    }

    #[test]
    fn completion_is_orthonormal() {
        let mut basis = [[0.0; MAX_DIM]; MAX_DIM];
        let s = (0.5f64).sqrt();
        basis[0] = [s, s, 0.0, 0.0];
        complete_orthonormal(&mut basis, 1, 4);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot(&basis[i][..4], &basis[j][..4]) - expect).abs() < 1e-14);
            }
        }
    }
}
