//! Direct evaluation of the two Grassmannian height forms on the tangent
//! plane of a graph in R⁴ = R²_x ⊕ R²_y, by explicit wedge arithmetic on an
//! orthonormalized coordinate tangent frame.

/// Heights (ω₁, ω₂) of the tangent plane of the graph of a 2×2 Jacobian
/// (row-major `rows[a * 2 + i]`), returned sorted ascending.
///
/// The coordinate tangent vectors are T_i = (e_i, J e_i); Gram-Schmidt gives
/// an orthonormal frame (E₁, E₂) of the same oriented plane, on which
///
/// ω± = (dx¹∧dx² ∓ dy¹∧dy²)(E₁, E₂) / √2.
pub fn grassmann_heights_by_wedge(rows: &[f64]) -> (f64, f64) {
    assert_eq!(rows.len(), 4);
    // Ambient order (x1, x2, y1, y2).
    let t1 = [1.0, 0.0, rows[0], rows[2]];
    let t2 = [0.0, 1.0, rows[1], rows[3]];
    let n1 = t1.iter().map(|x| x * x).sum::<f64>().sqrt();
    let e1: Vec<f64> = t1.iter().map(|x| x / n1).collect();
    let proj: f64 = e1.iter().zip(&t2).map(|(a, b)| a * b).sum();
    let mut e2: Vec<f64> = t2.iter().zip(&e1).map(|(t, e)| t - proj * e).collect();
    let n2 = e2.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in e2.iter_mut() {
        *x /= n2;
    }
    let wedge = |p: usize, q: usize| e1[p] * e2[q] - e1[q] * e2[p];
    let dxdx = wedge(0, 1);
    let dydy = wedge(2, 3);
    let s = core::f64::consts::SQRT_2;
    let a = (dxdx - dydy) / s;
    let b = (dxdx + dydy) / s;
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_map_heights() {
        let (w1, w2) = grassmann_heights_by_wedge(&[0.0; 4]);
        let h = 1.0 / core::f64::consts::SQRT_2;
        assert!((w1 - h).abs() < 1e-15);
        assert!((w2 - h).abs() < 1e-15);
    }

    #[test]
    fn unit_diagonal_kills_one_height() {
        let (w1, w2) = grassmann_heights_by_wedge(&[1.0, 0.0, 0.0, 1.0]);
        assert!(w1.abs() < 1e-15);
        assert!((w2 - 1.0 / core::f64::consts::SQRT_2).abs() < 1e-15);
    }
}
