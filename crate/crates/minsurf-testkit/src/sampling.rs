//! Brute-force norm oracles: maximize |Jv| over unit vectors and the
//! restricted Jacobian over orthonormal 2-frames, by random sampling plus a
//! derivative-free hill-climb polish. Knows nothing about singular values.

use crate::rng::SplitMix64;

fn apply(rows: &[f64], n: usize, m: usize, v: &[f64], out: &mut [f64]) {
    for a in 0..m {
        let mut s = 0.0;
        for i in 0..n {
            s += rows[a * n + i] * v[i];
        }
        out[a] = s;
    }
}

fn normalize(v: &mut [f64]) -> bool {
    let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if len < 1e-300 {
        return false;
    }
    for x in v.iter_mut() {
        *x /= len;
    }
    true
}

fn image_norm(rows: &[f64], n: usize, m: usize, v: &[f64]) -> f64 {
    let mut img = [0.0; 8];
    apply(rows, n, m, v, &mut img[..m]);
    img[..m].iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Area scale factor of J restricted to the plane of the orthonormal pair
/// (a, b): |Ja ∧ Jb|.
fn plane_jacobian(rows: &[f64], n: usize, m: usize, a: &[f64], b: &[f64]) -> f64 {
    let mut ja = [0.0; 8];
    let mut jb = [0.0; 8];
    apply(rows, n, m, a, &mut ja[..m]);
    apply(rows, n, m, b, &mut jb[..m]);
    let aa: f64 = ja[..m].iter().map(|x| x * x).sum();
    let bb: f64 = jb[..m].iter().map(|x| x * x).sum();
    let ab: f64 = ja[..m].iter().zip(&jb[..m]).map(|(x, y)| x * y).sum();
    (aa * bb - ab * ab).max(0.0).sqrt()
}

fn orthonormal_pair(rng: &mut SplitMix64, n: usize, a: &mut [f64], b: &mut [f64]) {
    loop {
        for x in a.iter_mut().take(n) {
            *x = rng.normal();
        }
        if !normalize(&mut a[..n]) {
            continue;
        }
        for x in b.iter_mut().take(n) {
            *x = rng.normal();
        }
        let proj: f64 = a[..n].iter().zip(&b[..n]).map(|(x, y)| x * y).sum();
        for i in 0..n {
            b[i] -= proj * a[i];
        }
        if normalize(&mut b[..n]) {
            return;
        }
    }
}

/// sup_{|v|=1} |Jv| by sampling `samples` random unit vectors, then
/// polishing the best candidates with shrinking random perturbations.
pub fn sample_op_norm(rows: &[f64], n: usize, m: usize, samples: usize, seed: u64) -> f64 {
    let mut rng = SplitMix64::new(seed);
    let mut best = [0.0f64; 8];
    let mut best_score = -1.0;
    let mut v = [0.0f64; 8];
    for _ in 0..samples {
        for x in v.iter_mut().take(n) {
            *x = rng.normal();
        }
        if !normalize(&mut v[..n]) {
            continue;
        }
        let s = image_norm(rows, n, m, &v[..n]);
        if s > best_score {
            best_score = s;
            best = v;
        }
    }
    // Hill climb from the champion and from a few fresh starts.
    for start in 0..4 {
        let mut cur = best;
        if start > 0 {
            for x in cur.iter_mut().take(n) {
                *x = rng.normal();
            }
            if !normalize(&mut cur[..n]) {
                continue;
            }
        }
        let mut cur_score = image_norm(rows, n, m, &cur[..n]);
        let mut step = 0.3;
        while step > 1e-8 {
            let mut improved = false;
            for _ in 0..12 {
                let mut cand = cur;
                for x in cand.iter_mut().take(n) {
                    *x += step * rng.normal();
                }
                if !normalize(&mut cand[..n]) {
                    continue;
                }
                let s = image_norm(rows, n, m, &cand[..n]);
                if s > cur_score {
                    cur_score = s;
                    cur = cand;
                    improved = true;
                }
            }
            if !improved {
                step *= 0.6;
            }
        }
        if cur_score > best_score {
            best_score = cur_score;
        }
    }
    best_score.max(0.0)
}

/// sup over orthonormal 2-frames of |Ja ∧ Jb|, the maximal Jacobian of J
/// restricted to a 2-plane. Same sample-then-polish strategy, climbing both
/// frame vectors.
pub fn sample_wedge2_norm(rows: &[f64], n: usize, m: usize, samples: usize, seed: u64) -> f64 {
    assert!(n >= 2);
    let mut rng = SplitMix64::new(seed);
    let mut best = ([0.0f64; 8], [0.0f64; 8]);
    let mut best_score = -1.0;
    let (mut a, mut b) = ([0.0f64; 8], [0.0f64; 8]);
    for _ in 0..samples {
        orthonormal_pair(&mut rng, n, &mut a, &mut b);
        let s = plane_jacobian(rows, n, m, &a[..n], &b[..n]);
        if s > best_score {
            best_score = s;
            best = (a, b);
        }
    }
    for start in 0..4 {
        let (mut ca, mut cb) = best;
        if start > 0 {
            orthonormal_pair(&mut rng, n, &mut ca, &mut cb);
        }
        let mut cur_score = plane_jacobian(rows, n, m, &ca[..n], &cb[..n]);
        let mut step = 0.3;
        while step > 1e-8 {
            let mut improved = false;
            for _ in 0..16 {
                let (mut na, mut nb) = (ca, cb);
                for x in na.iter_mut().take(n) {
                    *x += step * rng.normal();
                }
                for x in nb.iter_mut().take(n) {
                    *x += step * rng.normal();
                }
                if !normalize(&mut na[..n]) {
                    continue;
                }
                let proj: f64 = na[..n].iter().zip(&nb[..n]).map(|(x, y)| x * y).sum();
                for i in 0..n {
                    nb[i] -= proj * na[i];
                }
                if !normalize(&mut nb[..n]) {
                    continue;
                }
                let s = plane_jacobian(rows, n, m, &na[..n], &nb[..n]);
                if s > cur_score {
                    cur_score = s;
                    ca = na;
                    cb = nb;
                    improved = true;
                }
            }
            if !improved {
                step *= 0.6;
            }
        }
        if cur_score > best_score {
            best_score = cur_score;
        }
    }
    best_score.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix_norms() {
        // J = diag(2, 3) padded to 3x3 with 0.5.
        let rows = [2.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, 0.5];
        let op = sample_op_norm(&rows, 3, 3, 2000, 1);
        assert!((op - 3.0).abs() < 1e-5, "op = {op}");
        let w2 = sample_wedge2_norm(&rows, 3, 3, 2000, 2);
        assert!((w2 - 6.0).abs() < 1e-4, "w2 = {w2}");
    }
}
