//! Pointwise geometry of a linear map `L : R^n → R^m` and of the graph it
//! spans in `R^{n+m}`.
//!
//! Everything here is exact linear algebra on one Jacobian matrix: singular
//! value decomposition, the operator norm `|L| = sup λ_i` and the two-vector
//! norm `|∧²L| = sup_{i<j} λ_i λ_j`, the induced metric `g = I + LᵀL` with
//! its volume element `√det g`, the reciprocal volume element `*Ω`,
//! orthonormal frames adapted to the decomposition, the two height
//! functions on the Grassmannian of 2-planes in R⁴, and the curvature
//! contraction that equals `Δ ln *Ω` on minimal graphs.

use crate::error::GeomError;
use crate::linalg::{self, complete_orthonormal, dot, norm, SmallMat};

#[allow(unused_imports)]
use num_traits::Float;

/// Maximum domain/target dimension of the pointwise kernels.
pub const MAX_DIM: usize = linalg::MAX_DIM;
/// Maximum ambient dimension n + m.
pub const MAX_AMB: usize = 2 * MAX_DIM;

const SQRT_2: f64 = core::f64::consts::SQRT_2;

/// Off-diagonal Gram entries below this (relative) threshold stop the Jacobi
/// sweep.
const JACOBI_TOL: f64 = 1e-14;

/// Singular values below `RANK_TOL * λ_max` are treated as a rank drop.
const RANK_TOL: f64 = 1e-13;

/// The differential of a map `f : R^n → R^m` at a point: an m×n matrix with
/// entry `(α, i) = ∂f^α/∂x^i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jacobian {
    n: usize,
    m: usize,
    e: SmallMat, // e[alpha][i]
}

impl Jacobian {
    /// Build from row-major entries (`rows[alpha * n + i]`).
    pub fn from_rows(n: usize, m: usize, rows: &[f64]) -> Result<Self, GeomError> {
        if !(2..=MAX_DIM).contains(&n) || !(1..=MAX_DIM).contains(&m) {
            return Err(GeomError::DimensionOutOfRange { n, m });
        }
        if rows.len() != n * m {
            return Err(GeomError::DimensionMismatch {
                expected: (n, m),
                got: (rows.len(), 1),
            });
        }
        let mut e = [[0.0; MAX_DIM]; MAX_DIM];
        for a in 0..m {
            for i in 0..n {
                let v = rows[a * n + i];
                if !v.is_finite() {
                    return Err(GeomError::NonFinite);
                }
                e[a][i] = v;
            }
        }
        Ok(Jacobian { n, m, e })
    }

    pub fn from_fn(
        n: usize,
        m: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self, GeomError> {
        let mut rows = [0.0; MAX_DIM * MAX_DIM];
        for a in 0..m {
            for i in 0..n {
                rows[a * n + i] = f(a, i);
            }
        }
        Self::from_rows(n, m, &rows[..n * m])
    }

    pub fn zero(n: usize, m: usize) -> Result<Self, GeomError> {
        Self::from_fn(n, m, |_, _| 0.0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Entry `∂f^alpha/∂x^i`.
    pub fn entry(&self, alpha: usize, i: usize) -> f64 {
        self.e[alpha][i]
    }

    /// `J v` for `v ∈ R^n`.
    pub fn apply(&self, v: &[f64]) -> [f64; MAX_DIM] {
        let mut out = [0.0; MAX_DIM];
        for a in 0..self.m {
            out[a] = dot(&self.e[a][..self.n], &v[..self.n]);
        }
        out
    }

    /// `Jᵀ u` for `u ∈ R^m`.
    pub fn apply_transpose(&self, u: &[f64]) -> [f64; MAX_DIM] {
        let mut out = [0.0; MAX_DIM];
        for i in 0..self.n {
            let mut s = 0.0;
            for a in 0..self.m {
                s += self.e[a][i] * u[a];
            }
            out[i] = s;
        }
        out
    }

    pub fn det2(&self) -> f64 {
        debug_assert!(self.n == 2 && self.m == 2);
        self.e[0][0] * self.e[1][1] - self.e[0][1] * self.e[1][0]
    }

    /// Singular value decomposition with orthonormal bases `{v_i}` of R^n and
    /// `{u_α}` of R^m such that `J v_i = λ_i u_i` for `i` up to the rank.
    ///
    /// 2×2 inputs use the closed-form rotation; larger sizes run a one-sided
    /// Jacobi sweep on the columns. Output is deterministic: values are
    /// sorted descending (index order on ties) and each right vector has its
    /// first nonzero component positive, with left vectors following suit.
    pub fn svd(&self) -> SingularDecomposition {
        let (w, v) = if self.n == 2 && self.m == 2 {
            self.rotate_columns_2x2()
        } else {
            self.jacobi_one_sided()
        };
        self.finish_svd(w, v)
    }

    pub fn op_norm(&self) -> f64 {
        self.svd().op_norm()
    }

    pub fn wedge2_norm(&self) -> f64 {
        self.svd().wedge2_norm()
    }

    pub fn metric(&self) -> MetricData {
        let mut g = [[0.0; MAX_DIM]; MAX_DIM];
        for i in 0..self.n {
            for j in i..self.n {
                let mut s = if i == j { 1.0 } else { 0.0 };
                for a in 0..self.m {
                    s += self.e[a][i] * self.e[a][j];
                }
                g[i][j] = s;
                g[j][i] = s;
            }
        }
        let (g_inv, det) = linalg::invert(&g, self.n);
        let sqrt_g = det.sqrt();
        MetricData {
            n: self.n,
            g,
            g_inv,
            sqrt_g,
            star_omega: 1.0 / sqrt_g,
        }
    }

    /// Heights of the graph's tangent 2-plane on the two sphere factors of
    /// the Grassmannian of 2-planes in R⁴, ordered `(min, max)`:
    ///
    /// `ω₁ = (1 − λ₁λ₂) / (√2 √((1+λ₁²)(1+λ₂²)))`,
    /// `ω₂ = (1 + λ₁λ₂) / (√2 √((1+λ₁²)(1+λ₂²)))`.
    ///
    /// With singular values (λ_i ≥ 0) this evaluates the forms on the plane
    /// with its orientation chosen so the smaller height comes first; the map
    /// is area-decreasing at the point iff ω₁ > 0.
    pub fn grassmann_forms(&self) -> Result<GrassmannPoint, GeomError> {
        if self.n != 2 || self.m != 2 {
            return Err(GeomError::DimensionMismatch {
                expected: (2, 2),
                got: (self.n, self.m),
            });
        }
        let d = self.svd();
        let (l1, l2) = (d.lambda[0], d.lambda[1]);
        let den = SQRT_2 * ((1.0 + l1 * l1) * (1.0 + l2 * l2)).sqrt();
        let p = l1 * l2;
        Ok(GrassmannPoint {
            omega1: (1.0 - p) / den,
            omega2: (1.0 + p) / den,
        })
    }

    pub fn adapted_frames(&self) -> AdaptedFrames {
        self.svd().frames(self)
    }

    fn rotate_columns_2x2(&self) -> (SmallMat, SmallMat) {
        let c0 = [self.e[0][0], self.e[1][0]];
        let c1 = [self.e[0][1], self.e[1][1]];
        let a = dot(&c0, &c0);
        let b = dot(&c0, &c1);
        let c = dot(&c1, &c1);
        let theta = 0.5 * (2.0 * b).atan2(a - c);
        let (sin, cos) = theta.sin_cos();
        let mut v = [[0.0; MAX_DIM]; MAX_DIM];
        v[0] = [cos, sin, 0.0, 0.0];
        v[1] = [-sin, cos, 0.0, 0.0];
        let mut w = [[0.0; MAX_DIM]; MAX_DIM];
        for (col, vi) in v.iter().enumerate().take(2) {
            let img = self.apply(vi);
            w[col][..2].copy_from_slice(&img[..2]);
        }
        (w, v)
    }

    /// One-sided Jacobi: rotate column pairs of `J` (tracking the rotations
    /// in `V`) until all columns are mutually orthogonal.
    fn jacobi_one_sided(&self) -> (SmallMat, SmallMat) {
        let (n, m) = (self.n, self.m);
        let mut w = [[0.0; MAX_DIM]; MAX_DIM];
        let mut v = [[0.0; MAX_DIM]; MAX_DIM];
        for i in 0..n {
            v[i][i] = 1.0;
            for a in 0..m {
                w[i][a] = self.e[a][i];
            }
        }
        for _sweep in 0..60 {
            let mut rotated = false;
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let app = dot(&w[p][..m], &w[p][..m]);
                    let aqq = dot(&w[q][..m], &w[q][..m]);
                    let apq = dot(&w[p][..m], &w[q][..m]);
                    if apq.abs() <= JACOBI_TOL * (app * aqq).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let tau = (aqq - app) / (2.0 * apq);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        1.0 / (tau - (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    for a in 0..m {
                        let (wp, wq) = (w[p][a], w[q][a]);
                        w[p][a] = c * wp - s * wq;
                        w[q][a] = s * wp + c * wq;
                    }
                    for i in 0..n {
                        let (vp, vq) = (v[p][i], v[q][i]);
                        v[p][i] = c * vp - s * vq;
                        v[q][i] = s * vp + c * vq;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        (w, v)
    }

    /// Sort by column norm, fix signs, extract the left basis and complete it.
    fn finish_svd(&self, w: SmallMat, v: SmallMat) -> SingularDecomposition {
        let (n, m) = (self.n, self.m);
        let k = n.min(m);
        let mut norms = [0.0f64; MAX_DIM];
        for i in 0..n {
            norms[i] = norm(&w[i][..m]);
        }
        // Selection sort, descending by norm, index order on ties.
        let mut order = [0usize; MAX_DIM];
        for (i, o) in order.iter_mut().enumerate().take(n) {
            *o = i;
        }
        for i in 0..n {
            let mut best = i;
            for j in i + 1..n {
                if norms[order[j]] > norms[order[best]] {
                    best = j;
                }
            }
            order.swap(i, best);
        }

        let mut lambda = [0.0f64; MAX_DIM];
        let mut right = [[0.0; MAX_DIM]; MAX_DIM];
        let mut images = [[0.0; MAX_DIM]; MAX_DIM];
        for i in 0..n {
            lambda[i] = norms[order[i]];
            right[i] = v[order[i]];
            images[i] = w[order[i]];
            // Sign convention: first nonzero component of each right vector
            // is positive; the image flips with it so J v_i = λ_i u_i holds.
            let mut flip = false;
            for &x in &right[i][..n] {
                if x != 0.0 {
                    flip = x < 0.0;
                    break;
                }
            }
            if flip {
                for y in right[i].iter_mut() {
                    *y = -*y;
                }
                for y in images[i].iter_mut() {
                    *y = -*y;
                }
            }
        }

        let lmax = lambda[0];
        let mut left = [[0.0; MAX_DIM]; MAX_DIM];
        let mut fixed = 0;
        for i in 0..k {
            if lambda[i] > RANK_TOL * lmax && lambda[i] > 0.0 {
                for a in 0..m {
                    left[i][a] = images[i][a] / lambda[i];
                }
                fixed += 1;
            } else {
                break; // values are sorted, the rest are rank-deficient
            }
        }
        complete_orthonormal(&mut left, fixed, m);
        for u in left.iter_mut().take(m).skip(fixed) {
            let mut flip = false;
            for &x in &u[..m] {
                if x != 0.0 {
                    flip = x < 0.0;
                    break;
                }
            }
            if flip {
                for y in u.iter_mut() {
                    *y = -*y;
                }
            }
        }

        SingularDecomposition {
            n,
            m,
            k,
            lambda,
            right,
            left,
        }
    }
}

/// Singular values with the adapted orthonormal bases of domain and target.
#[derive(Clone, Copy, Debug)]
pub struct SingularDecomposition {
    n: usize,
    m: usize,
    k: usize,
    lambda: [f64; MAX_DIM],
    right: [[f64; MAX_DIM]; MAX_DIM],
    left: [[f64; MAX_DIM]; MAX_DIM],
}

impl SingularDecomposition {
    /// Singular values, descending; `min(n, m)` entries.
    pub fn lambdas(&self) -> &[f64] {
        &self.lambda[..self.k]
    }

    /// `λ_i`, or 0 beyond `min(n, m)`.
    pub fn lambda(&self, i: usize) -> f64 {
        if i < self.k {
            self.lambda[i]
        } else {
            0.0
        }
    }

    /// Right singular vectors `v_i ∈ R^n`, `i < n`.
    pub fn right_basis(&self) -> &[[f64; MAX_DIM]] {
        &self.right[..self.n]
    }

    /// Left singular vectors `u_α ∈ R^m`, `α < m`.
    pub fn left_basis(&self) -> &[[f64; MAX_DIM]] {
        &self.left[..self.m]
    }

    pub fn op_norm(&self) -> f64 {
        self.lambda[0]
    }

    /// `sup_{i<j} λ_i λ_j`; exactly 0 when `min(n, m) = 1` or the rank is
    /// at most one.
    pub fn wedge2_norm(&self) -> f64 {
        if self.k < 2 {
            return 0.0;
        }
        let (l1, l2) = (self.lambda[0], self.lambda[1]);
        if l2 <= RANK_TOL * l1 {
            return 0.0;
        }
        l1 * l2
    }

    /// `*Ω = Π_i (1 + λ_i²)^{-1/2}`, the reciprocal volume element computed
    /// from the singular values.
    pub fn star_omega(&self) -> f64 {
        let mut prod = 1.0;
        for i in 0..self.k {
            prod *= 1.0 + self.lambda[i] * self.lambda[i];
        }
        1.0 / prod.sqrt()
    }

    /// Orthonormal frames of the graph's tangent and normal spaces in
    /// `R^{n+m}`:
    ///
    /// `E_i = (v_i, λ_i u_i)/√(1+λ_i²)` (tangent, λ_i = 0 past the rank),
    /// `N_α = (−λ_α v_α, u_α)/√(1+λ_α²)` (normal, v_α absent for α ≥ n).
    pub fn frames(&self, j: &Jacobian) -> AdaptedFrames {
        debug_assert!(self.n == j.n && self.m == j.m);
        let (n, m) = (self.n, self.m);
        let mut tangent = [[0.0; MAX_AMB]; MAX_DIM];
        let mut normal = [[0.0; MAX_AMB]; MAX_DIM];
        for i in 0..n {
            let lam = self.lambda(i);
            let scale = 1.0 / (1.0 + lam * lam).sqrt();
            for x in 0..n {
                tangent[i][x] = self.right[i][x] * scale;
            }
            if i < self.k {
                for a in 0..m {
                    tangent[i][n + a] = lam * self.left[i][a] * scale;
                }
            }
        }
        for a in 0..m {
            let lam = self.lambda(a);
            let scale = 1.0 / (1.0 + lam * lam).sqrt();
            if a < self.k {
                for x in 0..n {
                    normal[a][x] = -lam * self.right[a][x] * scale;
                }
            }
            for b in 0..m {
                normal[a][n + b] = self.left[a][b] * scale;
            }
        }
        AdaptedFrames {
            n,
            m,
            tangent,
            normal,
        }
    }
}

/// Induced metric data of the graph at a point: `g = I + JᵀJ`, its inverse,
/// `√det g`, and the reciprocal volume element `*Ω = 1/√det g ∈ (0, 1]`.
#[derive(Clone, Copy, Debug)]
pub struct MetricData {
    n: usize,
    pub g: SmallMat,
    pub g_inv: SmallMat,
    pub sqrt_g: f64,
    pub star_omega: f64,
}

impl MetricData {
    pub fn n(&self) -> usize {
        self.n
    }
}

/// Heights on the two radius-1/√2 sphere factors of the Grassmannian of
/// 2-planes in R⁴, ordered `omega1 <= omega2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrassmannPoint {
    pub omega1: f64,
    pub omega2: f64,
}

/// Jointly orthonormal tangent and normal frames of the graph in `R^{n+m}`.
#[derive(Clone, Copy, Debug)]
pub struct AdaptedFrames {
    n: usize,
    m: usize,
    tangent: [[f64; MAX_AMB]; MAX_DIM],
    normal: [[f64; MAX_AMB]; MAX_DIM],
}

impl AdaptedFrames {
    pub fn ambient_dim(&self) -> usize {
        self.n + self.m
    }

    /// Tangent frame vectors `E_1 .. E_n` in `R^{n+m}`.
    pub fn tangent(&self) -> &[[f64; MAX_AMB]] {
        &self.tangent[..self.n]
    }

    /// Normal frame vectors `N_1 .. N_m` in `R^{n+m}`.
    pub fn normal(&self) -> &[[f64; MAX_AMB]] {
        &self.normal[..self.m]
    }
}

/// Second-fundamental-form coefficients `h_{α i j}` in frames adapted to the
/// singular value decomposition; symmetric in `(i, j)` by construction.
#[derive(Clone, Copy, Debug)]
pub struct ShapeTensor {
    n: usize,
    m: usize,
    h: [[[f64; MAX_DIM]; MAX_DIM]; MAX_DIM], // h[alpha][i][j]
}

impl ShapeTensor {
    pub fn zero(n: usize, m: usize) -> Self {
        ShapeTensor {
            n,
            m,
            h: [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, alpha: usize, i: usize, j: usize) -> f64 {
        self.h[alpha][i][j]
    }

    /// Set `h_{α i j}` and `h_{α j i}` to the same value.
    pub fn set_sym(&mut self, alpha: usize, i: usize, j: usize, value: f64) {
        self.h[alpha][i][j] = value;
        self.h[alpha][j][i] = value;
    }

    /// `|A|² = Σ h²_{α i j}`.
    pub fn norm_sq(&self) -> f64 {
        let mut s = 0.0;
        for a in 0..self.m {
            for i in 0..self.n {
                for j in 0..self.n {
                    s += self.h[a][i][j] * self.h[a][i][j];
                }
            }
        }
        s
    }

    /// Mean-curvature component `Σ_i h_{α i i}`; vanishes on minimal graphs.
    pub fn trace(&self, alpha: usize) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            s += self.h[alpha][i][i];
        }
        s
    }
}

/// The curvature contraction that equals `Δ ln *Ω` on a minimal graph:
///
/// `−Σ_{α,l,k} h²_{αlk} − Σ_{i,j,k} λ_i λ_j h_{i,j,k} h_{j,i,k}`
///
/// where the second sum pairs the normal index with the tangent index of the
/// same singular direction and runs over `i, j < min(n, m)` (λ = 0 past the
/// rank kills the rest). Grouping the cross terms with matching squares
/// shows the whole expression is non-positive whenever `λ_i λ_j ≤ 1` for
/// `i ≠ j`.
pub fn log_star_omega_laplacian_rhs(lambdas: &[f64], h: &ShapeTensor) -> f64 {
    let n = h.n();
    let kmax = h.m().min(n).min(lambdas.len());
    let mut full = 0.0;
    for a in 0..h.m() {
        for l in 0..n {
            for k in 0..n {
                let v = h.get(a, l, k);
                full += v * v;
            }
        }
    }
    let mut cross = 0.0;
    for i in 0..kmax {
        for j in 0..kmax {
            let ll = lambdas[i] * lambdas[j];
            if ll == 0.0 {
                continue;
            }
            for k in 0..n {
                cross += ll * h.get(i, j, k) * h.get(j, i, k);
            }
        }
    }
    -(full + cross)
}
