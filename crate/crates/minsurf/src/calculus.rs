//! Assembled geometry of the graph of a grid field: metric and volume-element
//! fields, residuals of the minimal surface system, the Laplace–Beltrami
//! operator of the induced metric, the second fundamental form, and the
//! discrete volume functional.
//!
//! Discretization. Each grid cell is split into its n! axis-ordered
//! simplices and the volume functional is integrated with the centroid rule
//! on the piecewise-linear interpolant, so it needs nodal values only —
//! never one-sided derivatives at the boundary. The divergence-form
//! residual is the exact gradient of that functional (scaled by −1/cell
//! volume), which makes it a conservative flux scheme with second-order
//! consistency at every interior node (the simplex patch around a node is
//! point-symmetric) and ties it to the volume functional to machine
//! precision: the system being solved is exactly the stationarity condition
//! of the discrete volume. On a flat graph the assembled operator reduces
//! to the classical compact Laplacian. The mean-curvature-flow velocity is
//! recovered from the divergence residual through the pointwise identity
//!
//!   residual = √g (I_m − J g⁻¹ Jᵀ) · velocity,   (I_m − J g⁻¹ Jᵀ)⁻¹ = I_m + J Jᵀ,
//!
//! so both residual flavors vanish at exactly the same fields.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::GridError;
use crate::grid::{GridDomain, VectorField, MAX_GRID_DIM};
use crate::linalg;
use crate::pointwise::{Jacobian, MetricData, ShapeTensor, SingularDecomposition};

#[allow(unused_imports)]
use num_traits::Float;

/// Axis orderings generating the simplex split of the unit cell: the
/// simplex of ordering π is the chain 0 → e_{π(1)} → e_{π(1)}+e_{π(2)} → …
const PERMS_2: [[usize; 3]; 2] = [[0, 1, 0], [1, 0, 0]];
const PERMS_3: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Per-domain assembly tables: corner strides of a cell and the (constant)
/// gradients of the linear corner basis on every simplex of the cell split.
pub(crate) struct CellKernel {
    n: usize,
    m: usize,
    corners: usize,
    corner_off: [usize; 8],
    simplices: usize,
    /// grad[simplex][corner][axis]; nonzero only on the simplex chain.
    grad: Vec<[[f64; MAX_GRID_DIM]; 8]>,
    weight: f64,
}

impl CellKernel {
    pub(crate) fn new(domain: &GridDomain, m: usize) -> Self {
        let n = domain.dim();
        let corners = 1usize << n;
        let mut corner_off = [0usize; 8];
        for (c, off) in corner_off.iter_mut().enumerate().take(corners) {
            let mut o = 0;
            for k in 0..n {
                if c >> k & 1 == 1 {
                    o += domain.stride(k);
                }
            }
            *off = o;
        }
        let perms: &[[usize; 3]] = if n == 2 { &PERMS_2 } else { &PERMS_3 };
        let mut grad = Vec::with_capacity(perms.len());
        for perm in perms {
            let mut table = [[0.0f64; MAX_GRID_DIM]; 8];
            // Along the chain, the interpolant's derivative in direction
            // π(k) is the single edge difference between steps k-1 and k.
            let mut corner = 0usize;
            for k in 0..n {
                let axis = perm[k];
                let next = corner | (1usize << axis);
                let inv_h = 1.0 / domain.spacing(axis);
                table[corner][axis] -= inv_h;
                table[next][axis] += inv_h;
                corner = next;
            }
            grad.push(table);
        }
        let simplices = grad.len();
        CellKernel {
            n,
            m,
            corners,
            corner_off,
            simplices,
            grad,
            weight: domain.cell_volume() / simplices as f64,
        }
    }

    pub(crate) fn weight(&self) -> f64 {
        self.weight
    }

    pub(crate) fn corner_offset(&self, c: usize) -> usize {
        self.corner_off[c]
    }

    pub(crate) fn simplices(&self) -> usize {
        self.simplices
    }

    pub(crate) fn grad_at(&self, simplex: usize, c: usize, i: usize) -> f64 {
        self.grad[simplex][c][i]
    }

    /// `cell_grad` through a dyn closure reference (used by the stencil-local
    /// Newton assembly).
    pub(crate) fn cell_grad_at(
        &self,
        values: &[f64],
        base: usize,
        add: &mut dyn FnMut(usize, usize, f64),
    ) -> f64 {
        self.cell_grad(values, base, add)
    }

    /// Constant gradient of the linear interpolant of `values` on simplex
    /// `s` of the cell with lower-corner flat index `base`.
    fn jacobian_at(&self, values: &[f64], base: usize, s: usize) -> [[f64; MAX_GRID_DIM]; 4] {
        let mut j = [[0.0f64; MAX_GRID_DIM]; 4];
        for c in 0..self.corners {
            let node = base + self.corner_off[c];
            let d = &self.grad[s][c];
            for a in 0..self.m {
                let f = values[node * self.m + a];
                for (i, ji) in j[a].iter_mut().enumerate().take(self.n) {
                    *ji += f * d[i];
                }
            }
        }
        j
    }

    /// Add the cell's contribution to ∂V/∂f into `add(node, α, value)` and
    /// return its contribution to the volume integral.
    fn cell_grad(
        &self,
        values: &[f64],
        base: usize,
        mut add: impl FnMut(usize, usize, f64),
    ) -> f64 {
        let (n, m) = (self.n, self.m);
        let mut vol = 0.0;
        for q in 0..self.simplices {
            let j = self.jacobian_at(values, base, q);
            let (g_inv, det) = metric_inverse(&j, n, m);
            let sqrt_g = det.sqrt();
            vol += self.weight * sqrt_g;
            // flux[α][j] = √g Σ_i J_{αi} g^{ij} = ∂√g/∂J_{αj}
            let mut flux = [[0.0f64; MAX_GRID_DIM]; 4];
            for a in 0..m {
                for jj in 0..n {
                    let mut s = 0.0;
                    for i in 0..n {
                        s += j[a][i] * g_inv[i][jj];
                    }
                    flux[a][jj] = sqrt_g * s;
                }
            }
            for c in 0..self.corners {
                let node = base + self.corner_off[c];
                let d = &self.grad[q][c];
                for a in 0..m {
                    let mut s = 0.0;
                    for jj in 0..n {
                        s += flux[a][jj] * d[jj];
                    }
                    add(node, a, self.weight * s);
                }
            }
        }
        vol
    }

    /// Add the cell's contribution to the gradient of the Dirichlet energy
    /// `E(u) = ∫ ½ √g g^{ij} ∂_i u ∂_j u` into `acc` (one scalar per node),
    /// with the metric coefficients taken from `fvalues`.
    fn cell_energy_grad(&self, fvalues: &[f64], u: &[f64], base: usize, acc: &mut [f64]) {
        let n = self.n;
        for q in 0..self.simplices {
            let j = self.jacobian_at(fvalues, base, q);
            let (g_inv, det) = metric_inverse(&j, n, self.m);
            let sqrt_g = det.sqrt();
            let mut du = [0.0f64; MAX_GRID_DIM];
            for c in 0..self.corners {
                let val = u[base + self.corner_off[c]];
                let d = &self.grad[q][c];
                for (i, dui) in du.iter_mut().enumerate().take(n) {
                    *dui += val * d[i];
                }
            }
            // flux_i = √g g^{ij} ∂_j u
            let mut flux = [0.0f64; MAX_GRID_DIM];
            for (i, fi) in flux.iter_mut().enumerate().take(n) {
                let mut s = 0.0;
                for jj in 0..n {
                    s += g_inv[i][jj] * du[jj];
                }
                *fi = sqrt_g * s;
            }
            for c in 0..self.corners {
                let node = base + self.corner_off[c];
                let d = &self.grad[q][c];
                let mut s = 0.0;
                for i in 0..n {
                    s += flux[i] * d[i];
                }
                acc[node] += self.weight * s;
            }
        }
    }
}

/// Inverse and determinant of `g = I + JᵀJ` for a Jacobian given as row
/// arrays (used in the quadrature hot loop).
fn metric_inverse(j: &[[f64; MAX_GRID_DIM]; 4], n: usize, m: usize) -> (linalg::SmallMat, f64) {
    let mut g = [[0.0f64; 4]; 4];
    for a in 0..n {
        for b in a..n {
            let mut s = if a == b { 1.0 } else { 0.0 };
            for al in 0..m {
                s += j[al][a] * j[al][b];
            }
            g[a][b] = s;
            g[b][a] = s;
        }
    }
    linalg::invert(&g, n)
}

/// Pointwise geometry of the graph at every interior node.
pub struct GeometryField {
    domain: GridDomain,
    metric: Vec<MetricData>,
    svd: Vec<SingularDecomposition>,
    star_omega: Vec<f64>,
    log_star_omega: Vec<f64>,
}

impl GeometryField {
    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    /// Metric data at an interior node (by multi-index).
    pub fn metric_at(&self, mi: &[usize; MAX_GRID_DIM]) -> &MetricData {
        &self.metric[self.domain.interior_ordinal(mi)]
    }

    pub fn svd_at(&self, mi: &[usize; MAX_GRID_DIM]) -> &SingularDecomposition {
        &self.svd[self.domain.interior_ordinal(mi)]
    }

    pub fn star_omega_at(&self, mi: &[usize; MAX_GRID_DIM]) -> f64 {
        self.star_omega[self.domain.interior_ordinal(mi)]
    }

    pub fn log_star_omega_at(&self, mi: &[usize; MAX_GRID_DIM]) -> f64 {
        self.log_star_omega[self.domain.interior_ordinal(mi)]
    }

    /// ln *Ω as a full-grid scalar (zero at boundary nodes, which no
    /// consumer reads).
    pub fn log_star_omega_grid(&self) -> Vec<f64> {
        let mut u = vec![0.0; self.domain.node_count()];
        for (flat, mi) in self.domain.interior_nodes() {
            u[flat] = self.log_star_omega[self.domain.interior_ordinal(&mi)];
        }
        u
    }

    pub fn star_omega_grid(&self) -> Vec<f64> {
        let mut u = vec![0.0; self.domain.node_count()];
        for (flat, mi) in self.domain.interior_nodes() {
            u[flat] = self.star_omega[self.domain.interior_ordinal(&mi)];
        }
        u
    }

    pub fn min_star_omega(&self) -> f64 {
        let mut v = f64::INFINITY;
        for &s in &self.star_omega {
            v = v.min(s);
        }
        v
    }

    pub fn sup_wedge2(&self) -> f64 {
        let mut v = 0.0f64;
        for d in &self.svd {
            v = v.max(d.wedge2_norm());
        }
        v
    }
}

/// Compute metric, singular decomposition and *Ω at every interior node.
pub fn geometry_field(field: &VectorField) -> Result<GeometryField, GridError> {
    let domain = field.domain().clone();
    let count = domain.interior_count();
    let mut metric = Vec::with_capacity(count);
    let mut svd = Vec::with_capacity(count);
    let mut star_omega = Vec::with_capacity(count);
    let mut log_star_omega = Vec::with_capacity(count);
    for (flat, _) in domain.interior_nodes() {
        let jet = field.jet(flat)?;
        let md = jet.first.metric();
        let so = md.star_omega;
        metric.push(md);
        svd.push(jet.first.svd());
        star_omega.push(so);
        log_star_omega.push(so.ln());
    }
    Ok(GeometryField {
        domain,
        metric,
        svd,
        star_omega,
        log_star_omega,
    })
}

/// Residuals of the minimal surface system at interior nodes: the
/// divergence-form residual `R_div` (exact discrete volume gradient) and the
/// normal projection `R_perp` of the flow velocity, with sup and L² norms.
/// Both vanish at exactly the same fields.
pub struct ResidualField {
    domain: GridDomain,
    m: usize,
    r_div: Vec<f64>,
    r_perp: Vec<f64>,
    pub sup_div: f64,
    pub l2_div: f64,
    pub sup_perp: f64,
    pub l2_perp: f64,
}

impl ResidualField {
    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `R_div` at a node (zero at boundary nodes, where the system does not
    /// apply).
    pub fn div(&self, flat: usize, alpha: usize) -> f64 {
        self.r_div[flat * self.m + alpha]
    }

    pub fn perp(&self, flat: usize, alpha: usize) -> f64 {
        self.r_perp[flat * self.m + alpha]
    }

    pub fn div_values(&self) -> &[f64] {
        &self.r_div
    }
}

/// Gradient accumulation of the discrete volume functional: returns
/// `(∂V/∂f, V)` with the gradient over all nodes in node-major order.
pub(crate) fn assemble_volume_gradient(field: &VectorField) -> (Vec<f64>, f64) {
    let domain = field.domain();
    let m = field.m();
    let kernel = CellKernel::new(domain, m);
    let mut acc = vec![0.0f64; domain.node_count() * m];
    let mut vol = 0.0;
    for cell in domain.cells() {
        let base = domain.flat_index(&cell);
        vol += kernel.cell_grad(field.values(), base, |node, a, v| {
            acc[node * m + a] += v;
        });
    }
    (acc, vol)
}

/// Divergence-form residual of the minimal surface system together with the
/// normal-projected flow residual.
pub fn divergence_residual(field: &VectorField) -> Result<ResidualField, GridError> {
    let domain = field.domain().clone();
    let m = field.m();
    let (acc, _) = assemble_volume_gradient(field);
    let inv_vol = 1.0 / domain.cell_volume();
    let mut r_div = vec![0.0f64; domain.node_count() * m];
    for (flat, _) in domain.interior_nodes() {
        for a in 0..m {
            r_div[flat * m + a] = -acc[flat * m + a] * inv_vol;
        }
    }
    let velocity = velocity_from_residual(field, &r_div)?;
    let n = domain.dim();
    let mut r_perp = vec![0.0f64; domain.node_count() * m];
    for (flat, _) in domain.interior_nodes() {
        let jet = field.jet(flat)?;
        let frames = jet.first.adapted_frames();
        for (a, nrm) in frames.normal().iter().enumerate() {
            let mut s = 0.0;
            for b in 0..m {
                s += velocity[flat * m + b] * nrm[n + b];
            }
            r_perp[flat * m + a] = s;
        }
    }
    let (sup_div, l2_div) = norms(&r_div, &domain, m);
    let (sup_perp, l2_perp) = norms(&r_perp, &domain, m);
    Ok(ResidualField {
        domain,
        m,
        r_div,
        r_perp,
        sup_div,
        l2_div,
        sup_perp,
        l2_perp,
    })
}

fn norms(values: &[f64], domain: &GridDomain, m: usize) -> (f64, f64) {
    let mut sup = 0.0f64;
    let mut sq = 0.0f64;
    for (flat, _) in domain.interior_nodes() {
        for a in 0..m {
            let v = values[flat * m + a];
            sup = sup.max(v.abs());
            sq += v * v;
        }
    }
    (sup, (sq * domain.cell_volume()).sqrt())
}

/// `v = (I + JJᵀ) R_div / √g` per interior node.
pub(crate) fn velocity_from_residual(
    field: &VectorField,
    r_div: &[f64],
) -> Result<Vec<f64>, GridError> {
    let domain = field.domain();
    let m = field.m();
    let n = domain.dim();
    let mut v = vec![0.0f64; domain.node_count() * m];
    for (flat, _) in domain.interior_nodes() {
        let jet = field.jet(flat)?;
        let j = &jet.first;
        let mut g = [[0.0f64; 4]; 4];
        for a in 0..n {
            for b in a..n {
                let mut s = if a == b { 1.0 } else { 0.0 };
                for al in 0..m {
                    s += j.entry(al, a) * j.entry(al, b);
                }
                g[a][b] = s;
                g[b][a] = s;
            }
        }
        let inv_sqrt_g = 1.0 / linalg::det(&g, n).sqrt();
        for a in 0..m {
            let mut s = r_div[flat * m + a];
            for b in 0..m {
                let mut jj = 0.0;
                for i in 0..n {
                    jj += j.entry(a, i) * j.entry(b, i);
                }
                s += jj * r_div[flat * m + b];
            }
            v[flat * m + a] = s * inv_sqrt_g;
        }
    }
    Ok(v)
}

/// Nonparametric mean-curvature-flow velocity `g^{ij} ∂²f/∂x^i∂x^j` at
/// interior nodes (node-major), recovered algebraically from the divergence
/// residual so that both vanish at exactly the same fields.
pub fn mcf_velocity(field: &VectorField) -> Result<Vec<f64>, GridError> {
    let res = divergence_residual(field)?;
    velocity_from_residual(field, &res.r_div)
}

/// Flux-form Laplace–Beltrami operator of the induced metric applied to a
/// grid scalar `u`: `(1/√g) ∂_i(√g g^{ij} ∂_j u)`.
///
/// `u` must hold values at every interior node (boundary entries are never
/// read). The result is populated at nodes of depth ≥ 2 — the deepest set
/// whose cell neighborhoods stay inside the interior — and zero elsewhere.
pub fn laplace_beltrami(u: &[f64], field: &VectorField) -> Result<Vec<f64>, GridError> {
    let domain = field.domain();
    let n = domain.dim();
    if u.len() != domain.node_count() {
        return Err(GridError::ShapeMismatch {
            expected: domain.node_count(),
            got: u.len(),
        });
    }
    for k in 0..n {
        if domain.resolution(k) < 5 {
            return Err(GridError::TooFewInteriorLayers { need: 2 });
        }
    }
    let kernel = CellKernel::new(domain, field.m());
    let mut acc = vec![0.0f64; domain.node_count()];
    for cell in domain.cells() {
        // Only cells with all corners interior; they cover every depth-2 row.
        let mut inner = true;
        for k in 0..n {
            if cell[k] == 0 || cell[k] + 1 >= domain.resolution(k) - 1 {
                inner = false;
                break;
            }
        }
        if !inner {
            continue;
        }
        let base = domain.flat_index(&cell);
        kernel.cell_energy_grad(field.values(), u, base, &mut acc);
    }
    let inv_vol = 1.0 / domain.cell_volume();
    let mut out = vec![0.0f64; domain.node_count()];
    for (flat, _) in domain.nodes_of_depth(2) {
        let jet = field.jet(flat)?;
        let sqrt_g = jet.first.metric().sqrt_g;
        out[flat] = -acc[flat] * inv_vol / sqrt_g;
    }
    Ok(out)
}

/// Second fundamental form at an interior node, in frames adapted to the
/// singular value decomposition of the jet:
///
/// `h_{αlk} = Σ_{i,j} (v_l)_i (v_k)_j ⟨u_α, ∂_ij f⟩
///            / (√(1+λ_α²) √(1+λ_l²) √(1+λ_k²))`.
///
/// Built from the finite-difference Hessian, not from differentiating the
/// frames; symmetric in (l, k) exactly.
pub fn second_fundamental_form(field: &VectorField, flat: usize) -> Result<ShapeTensor, GridError> {
    let jet = field.jet(flat)?;
    shape_tensor_from_jet(&jet.first, &jet)
}

pub(crate) fn shape_tensor_from_jet(
    j: &Jacobian,
    jet: &crate::grid::JetSample,
) -> Result<ShapeTensor, GridError> {
    let n = j.n();
    let m = j.m();
    let d = j.svd();
    // Hessian rotated into the left singular basis.
    let mut rotated = [[[0.0f64; MAX_GRID_DIM]; MAX_GRID_DIM]; 4];
    for (a, ua) in d.left_basis().iter().enumerate() {
        for i in 0..n {
            for jj in i..n {
                let mut s = 0.0;
                for b in 0..m {
                    s += ua[b] * jet.second(b, i, jj);
                }
                rotated[a][i][jj] = s;
                rotated[a][jj][i] = s;
            }
        }
    }
    let mut scale = [0.0f64; 4];
    for (i, s) in scale.iter_mut().enumerate().take(n.max(m)) {
        let lam = d.lambda(i);
        *s = 1.0 / (1.0 + lam * lam).sqrt();
    }
    let mut h = ShapeTensor::zero(n, m);
    for a in 0..m {
        let sa = scale[a];
        for l in 0..n {
            for k in l..n {
                let mut s = 0.0;
                for i in 0..n {
                    let vli = d.right_basis()[l][i];
                    if vli == 0.0 {
                        continue;
                    }
                    for jj in 0..n {
                        s += vli * d.right_basis()[k][jj] * rotated[a][i][jj];
                    }
                }
                h.set_sym(a, l, k, s * sa * scale[l] * scale[k]);
            }
        }
    }
    Ok(h)
}

/// Discrete volume of the graph: cell-averaged `√det g` times cell volume,
/// summed over cells in lexicographic order.
pub fn volume(field: &VectorField) -> f64 {
    let (_, vol) = assemble_volume_gradient(field);
    vol
}

/// Directional derivative of the discrete volume along a perturbation `b`
/// (node-major, boundary entries ignored), evaluated from the assembled
/// gradient: `dV/ds = −cellvol · Σ_p Σ_α R_div(p, α) b(p, α)`.
pub fn volume_gradient_pairing(residual: &ResidualField, b: &[f64]) -> f64 {
    let domain = &residual.domain;
    let m = residual.m;
    let mut s = 0.0;
    for (flat, _) in domain.interior_nodes() {
        for a in 0..m {
            s += residual.div(flat, a) * b[flat * m + a];
        }
    }
    -s * domain.cell_volume()
}
