//! Symmetric eigenvalue oracles: cyclic two-sided Jacobi on the matrix
//! itself, and closed-form characteristic-polynomial roots for 2×2 / 3×3.

/// Eigenvalues of a symmetric k×k matrix (row-major, k ≤ 8), descending.
///
/// Classical two-sided Jacobi: rotate away off-diagonal entries until they
/// are negligible relative to the diagonal scale.
pub fn sym_eigenvalues(a: &[f64], k: usize) -> Vec<f64> {
    assert_eq!(a.len(), k * k);
    let mut w = a.to_vec();
    let idx = |i: usize, j: usize| i * k + j;
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        let mut scale = 0.0f64;
        for i in 0..k {
            scale = scale.max(w[idx(i, i)].abs());
            for j in i + 1..k {
                off = off.max(w[idx(i, j)].abs());
            }
        }
        if off <= 1e-15 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..k - 1 {
            for q in p + 1..k {
                let apq = w[idx(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = w[idx(p, p)];
                let aqq = w[idx(q, q)];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (tau - (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..k {
                    let (aip, aiq) = (w[idx(i, p)], w[idx(i, q)]);
                    w[idx(i, p)] = c * aip - s * aiq;
                    w[idx(i, q)] = s * aip + c * aiq;
                }
                for j in 0..k {
                    let (apj, aqj) = (w[idx(p, j)], w[idx(q, j)]);
                    w[idx(p, j)] = c * apj - s * aqj;
                    w[idx(q, j)] = s * apj + c * aqj;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..k).map(|i| w[idx(i, i)]).collect();
    eig.sort_by(|x, y| y.partial_cmp(x).unwrap());
    eig
}

/// Roots of the characteristic polynomial of a symmetric 2×2, descending.
pub fn char_poly_eigenvalues_2x2(a: &[f64]) -> [f64; 2] {
    assert_eq!(a.len(), 4);
    let (p, q, r) = (a[0], a[1], a[3]);
    let mean = 0.5 * (p + r);
    let disc = (0.25 * (p - r) * (p - r) + q * q).sqrt();
    [mean + disc, mean - disc]
}

/// Roots of the characteristic polynomial of a symmetric 3×3, descending
/// (trigonometric solution of the depressed cubic).
pub fn char_poly_eigenvalues_3x3(a: &[f64]) -> [f64; 3] {
    assert_eq!(a.len(), 9);
    let p1 = a[1] * a[1] + a[2] * a[2] + a[5] * a[5];
    if p1 == 0.0 {
        let mut d = [a[0], a[4], a[8]];
        d.sort_by(|x, y| y.partial_cmp(x).unwrap());
        return d;
    }
    let q = (a[0] + a[4] + a[8]) / 3.0;
    let p2 = (a[0] - q).powi(2) + (a[4] - q).powi(2) + (a[8] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let b: Vec<f64> = (0..9)
        .map(|i| {
            let shift = if i % 4 == 0 { q } else { 0.0 };
            (a[i] - shift) / p
        })
        .collect();
    let detb = b[0] * (b[4] * b[8] - b[5] * b[7]) - b[1] * (b[3] * b[8] - b[5] * b[6])
        + b[2] * (b[3] * b[7] - b[4] * b[6]);
    let r = (detb / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let e1 = q + 2.0 * p * phi.cos();
    let e3 = q + 2.0 * p * (phi + 2.0 * core::f64::consts::PI / 3.0).cos();
    let e2 = 3.0 * q - e1 - e3;
    [e1, e2, e3]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    #[test]
    fn jacobi_matches_closed_forms() {
        let mut rng = SplitMix64::new(11);
        for _ in 0..500 {
            let (x, y, z) = (
                rng.range(-3.0, 3.0),
                rng.range(-3.0, 3.0),
                rng.range(-3.0, 3.0),
            );
            let a2 = [x, y, y, z];
            let j = sym_eigenvalues(&a2, 2);
            let c = char_poly_eigenvalues_2x2(&a2);
            assert!((j[0] - c[0]).abs() < 1e-12 && (j[1] - c[1]).abs() < 1e-12);

            let mut a3 = [0.0; 9];
            for i in 0..3 {
                for k in i..3 {
                    let v = rng.range(-3.0, 3.0);
                    a3[i * 3 + k] = v;
                    a3[k * 3 + i] = v;
                }
            }
            let j = sym_eigenvalues(&a3, 3);
            let c = char_poly_eigenvalues_3x3(&a3);
            for i in 0..3 {
                assert!((j[i] - c[i]).abs() < 1e-10, "{:?} vs {:?}", j, c);
            }
        }
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let a = [3.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 2.0];
        assert_eq!(sym_eigenvalues(&a, 3), vec![3.0, 2.0, -1.0]);
    }
}
