//! Dirichlet-problem solvers for the minimal surface system on a box.
//!
//! Two routes to the same discrete root set: explicit mean-curvature-flow
//! relaxation (`f ← f + dt · v(f)` with the nonparametric flow velocity) and
//! a damped Newton iteration on the divergence-form residual with optional
//! boundary-data continuation. The flow stops on the velocity sup norm but
//! the divergence residual is the reported certificate; since one residual
//! is an invertible pointwise transform of the other, both solvers agree up
//! to their tolerances.
//!
//! Everything is deterministic: fixed sweep order, fixed linear-solver
//! iteration order, no parallel reductions.

use alloc::vec;
use alloc::vec::Vec;

use crate::calculus::{assemble_volume_gradient, CellKernel};
use crate::error::SolveError;
use crate::grid::{BoundaryData, VectorField, MAX_GRID_DIM};
use crate::linalg;

#[allow(unused_imports)]
use num_traits::Float;

/// Relative tolerance of the inner linear solves in the Newton iteration.
const LINEAR_RTOL: f64 = 1e-10;
/// Iteration cap for the inner linear solver.
const LINEAR_MAX_ITER: usize = 50_000;
/// Maximum halvings in the Newton line search.
const MAX_BACKTRACKS: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMethod {
    Mcf,
    Newton,
}

/// Solver configuration. `dt_factor` is the mean-curvature-flow time step in
/// units of min(h)²; `None` selects the stable default 1/(4n).
#[derive(Clone, Debug)]
pub struct SolveConfig {
    pub method: SolveMethod,
    pub tol: f64,
    pub max_iter: usize,
    pub dt_factor: Option<f64>,
    pub continuation_steps: usize,
    pub damping: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            method: SolveMethod::Newton,
            tol: 1e-8,
            max_iter: 200_000,
            dt_factor: None,
            continuation_steps: 4,
            damping: 0.5,
        }
    }
}

impl SolveConfig {
    fn validate(&self) -> Result<(), SolveError> {
        if !(self.tol > 0.0) {
            return Err(SolveError::BadConfig("tol must be positive"));
        }
        if self.max_iter == 0 {
            return Err(SolveError::BadConfig("max_iter must be at least 1"));
        }
        if let Some(v) = self.dt_factor {
            if !(v > 0.0 && v <= 0.25) {
                return Err(SolveError::BadConfig("dt_factor must lie in (0, 0.25]"));
            }
        }
        if self.continuation_steps == 0 {
            return Err(SolveError::BadConfig(
                "continuation_steps must be at least 1",
            ));
        }
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(SolveError::BadConfig("damping must lie in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Termination {
    Converged,
    MaxIter,
    Diverged { node: usize },
    ContinuationIncomplete,
}

/// One history row per iteration.
#[derive(Clone, Copy, Debug)]
pub struct HistoryEntry {
    pub residual_sup: f64,
    pub sup_wedge2: f64,
    pub min_star_omega: f64,
    pub volume: f64,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub converged: bool,
    pub termination: Termination,
    pub iterations: usize,
    pub residual_sup: f64,
    pub residual_l2: f64,
    pub history: Vec<HistoryEntry>,
    pub wall_time_secs: f64,
}

/// Dispatch on `cfg.method`.
pub fn solve(
    initial: &VectorField,
    boundary: &BoundaryData,
    cfg: &SolveConfig,
) -> Result<(VectorField, SolveReport), SolveError> {
    match cfg.method {
        SolveMethod::Mcf => mcf_solve(initial, boundary, cfg),
        SolveMethod::Newton => newton_solve(initial, boundary, cfg),
    }
}

/// Per-field quantities the solvers track each iteration, fused into one
/// assembly + one nodal sweep.
struct IterationState {
    r_div: Vec<f64>,
    velocity: Vec<f64>,
    sup_div: f64,
    l2_div: f64,
    sup_velocity: f64,
    sup_wedge2: f64,
    min_star_omega: f64,
    volume: f64,
}

fn iteration_state(field: &VectorField) -> Result<IterationState, SolveError> {
    let domain = field.domain();
    let n = domain.dim();
    let m = field.m();
    let (acc, volume) = assemble_volume_gradient(field);
    let inv_vol = 1.0 / domain.cell_volume();
    let mut r_div = vec![0.0f64; domain.node_count() * m];
    let mut velocity = vec![0.0f64; domain.node_count() * m];
    let mut sup_div = 0.0f64;
    let mut sq_div = 0.0f64;
    let mut sup_velocity = 0.0f64;
    let mut sup_wedge2 = 0.0f64;
    let mut min_star_omega = f64::INFINITY;
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
        let det_g = linalg::det(&g, n);
        let inv_sqrt_g = 1.0 / det_g.sqrt();
        min_star_omega = min_star_omega.min(inv_sqrt_g);
        let w2 = if m == 1 {
            0.0
        } else if n == 2 && m == 2 {
            j.det2().abs()
        } else {
            j.svd().wedge2_norm()
        };
        sup_wedge2 = sup_wedge2.max(w2);
        for a in 0..m {
            let r = -acc[flat * m + a] * inv_vol;
            r_div[flat * m + a] = r;
            sup_div = sup_div.max(r.abs());
            sq_div += r * r;
        }
        for a in 0..m {
            let mut s = r_div[flat * m + a];
            for b in 0..m {
                let mut jj = 0.0;
                for i in 0..n {
                    jj += j.entry(a, i) * j.entry(b, i);
                }
                s += jj * r_div[flat * m + b];
            }
            let v = s * inv_sqrt_g;
            velocity[flat * m + a] = v;
            sup_velocity = sup_velocity.max(v.abs());
        }
    }
    Ok(IterationState {
        r_div,
        velocity,
        sup_div,
        l2_div: (sq_div * domain.cell_volume()).sqrt(),
        sup_velocity,
        sup_wedge2,
        min_star_omega,
        volume,
    })
}

impl IterationState {
    fn history_entry(&self) -> HistoryEntry {
        HistoryEntry {
            residual_sup: self.sup_div,
            sup_wedge2: self.sup_wedge2,
            min_star_omega: self.min_star_omega,
            volume: self.volume,
        }
    }
}

/// One explicit flow step `f + dt · v(f)` from a snapshot; boundary values
/// untouched. Fails with the offending node if the step goes non-finite.
pub fn mcf_step(field: &VectorField, dt: f64) -> Result<VectorField, SolveError> {
    let v = crate::calculus::mcf_velocity(field)?;
    step_with_velocity(field, &v, dt)
}

fn step_with_velocity(
    field: &VectorField,
    velocity: &[f64],
    dt: f64,
) -> Result<VectorField, SolveError> {
    let domain = field.domain().clone();
    let m = field.m();
    let mut out = field.clone();
    for (flat, _) in domain.interior_nodes() {
        for a in 0..m {
            let v = out.value(flat, a) + dt * velocity[flat * m + a];
            if !v.is_finite() {
                return Err(SolveError::Diverged { node: flat });
            }
            out.set_value(flat, a, v);
        }
    }
    Ok(out)
}

/// Relax to a solution by explicit graphical mean curvature flow with fixed
/// Dirichlet boundary. Stops when the velocity sup norm drops below
/// `cfg.tol`; the report carries the divergence residual as certificate.
pub fn mcf_solve(
    initial: &VectorField,
    boundary: &BoundaryData,
    cfg: &SolveConfig,
) -> Result<(VectorField, SolveReport), SolveError> {
    cfg.validate()?;
    if let Some(node) = initial.boundary_mismatch(boundary) {
        return Err(SolveError::BoundaryMismatch { node });
    }
    let clock = Stopwatch::start();
    let n = initial.domain().dim();
    let h = initial.domain().min_spacing();
    let dt = cfg.dt_factor.unwrap_or(1.0 / (4.0 * n as f64)) * h * h;

    let mut field = initial.clone();
    let mut history = Vec::new();
    let mut state = iteration_state(&field)?;
    let mut termination = Termination::MaxIter;
    while history.len() < cfg.max_iter {
        if state.sup_velocity < cfg.tol {
            termination = Termination::Converged;
            break;
        }
        history.push(state.history_entry());
        match step_with_velocity(&field, &state.velocity, dt) {
            Ok(next) => field = next,
            Err(SolveError::Diverged { node }) => {
                termination = Termination::Diverged { node };
                let report = SolveReport {
                    converged: false,
                    termination,
                    iterations: history.len(),
                    residual_sup: state.sup_div,
                    residual_l2: state.l2_div,
                    history,
                    wall_time_secs: clock.elapsed(),
                };
                return Ok((field, report));
            }
            Err(e) => return Err(e),
        }
        state = iteration_state(&field)?;
    }
    if termination == Termination::MaxIter && state.sup_velocity < cfg.tol {
        termination = Termination::Converged;
    }
    let report = SolveReport {
        converged: termination == Termination::Converged,
        termination,
        iterations: history.len(),
        residual_sup: state.sup_div,
        residual_l2: state.l2_div,
        history,
        wall_time_secs: clock.elapsed(),
    };
    Ok((field, report))
}

/// Damped Newton iteration on the divergence-form residual, with boundary
/// continuation: the Dirichlet data is ramped through
/// `s = 1/K, 2/K, …, 1`, each stage warm-started from the last.
///
/// The linearization is assembled by central differencing of the residual
/// with respect to nodal values (stencil-local), and each step is solved by
/// stabilized bi-conjugate gradients to relative tolerance 1e-10. Steps are
/// scaled back by the damping factor until the residual sup norm strictly
/// decreases.
pub fn newton_solve(
    initial: &VectorField,
    boundary: &BoundaryData,
    cfg: &SolveConfig,
) -> Result<(VectorField, SolveReport), SolveError> {
    cfg.validate()?;
    if let Some(node) = initial.boundary_mismatch(boundary) {
        return Err(SolveError::BoundaryMismatch { node });
    }
    let clock = Stopwatch::start();
    let stages = cfg.continuation_steps;
    let mut history = Vec::new();
    let mut field = if stages == 1 {
        initial.clone()
    } else {
        let s1 = 1.0 / stages as f64;
        initial.scaled(s1).with_boundary(&boundary.scaled(s1))?
    };
    let mut termination = Termination::ContinuationIncomplete;
    let mut state = iteration_state(&field)?;

    'stages: for stage in 1..=stages {
        let s = stage as f64 / stages as f64;
        if stage > 1 {
            let ratio = s / ((stage - 1) as f64 / stages as f64);
            field = field.scaled(ratio).with_boundary(&boundary.scaled(s))?;
            state = iteration_state(&field)?;
        }
        loop {
            if state.sup_div < cfg.tol {
                if stage == stages {
                    termination = Termination::Converged;
                }
                continue 'stages;
            }
            if history.len() >= cfg.max_iter {
                termination = Termination::MaxIter;
                break 'stages;
            }
            let delta = newton_step(&field, &state.r_div, history.len())?;
            // Backtracking: halve until the sup norm strictly decreases.
            let mut t = 1.0;
            let mut accepted = None;
            for _ in 0..MAX_BACKTRACKS {
                let trial = apply_update(&field, &delta, t);
                if let Ok(trial) = trial {
                    let trial_state = iteration_state(&trial)?;
                    if trial_state.sup_div < state.sup_div {
                        accepted = Some((trial, trial_state));
                        break;
                    }
                }
                t *= cfg.damping;
            }
            match accepted {
                Some((next, next_state)) => {
                    field = next;
                    state = next_state;
                    history.push(state.history_entry());
                }
                None => {
                    return Err(SolveError::LineSearchStagnation {
                        iteration: history.len(),
                    })
                }
            }
        }
    }

    let report = SolveReport {
        converged: termination == Termination::Converged,
        termination,
        iterations: history.len(),
        residual_sup: state.sup_div,
        residual_l2: state.l2_div,
        history,
        wall_time_secs: clock.elapsed(),
    };
    Ok((field, report))
}

fn apply_update(field: &VectorField, delta: &[f64], t: f64) -> Result<VectorField, SolveError> {
    let domain = field.domain().clone();
    let m = field.m();
    let mut out = field.clone();
    for (flat, mi) in domain.interior_nodes() {
        let ord = domain.interior_ordinal(&mi);
        for a in 0..m {
            let v = out.value(flat, a) + t * delta[ord * m + a];
            if !v.is_finite() {
                return Err(SolveError::Diverged { node: flat });
            }
            out.set_value(flat, a, v);
        }
    }
    Ok(out)
}

/// Assemble the sparse linearization by stencil-local central differencing
/// and solve for the Newton update (interior unknowns, flattened ord*m+α).
fn newton_step(
    field: &VectorField,
    r_div: &[f64],
    iteration: usize,
) -> Result<Vec<f64>, SolveError> {
    let domain = field.domain().clone();
    let m = field.m();
    let n = domain.dim();
    let ndof = domain.interior_count() * m;
    let kernel = CellKernel::new(&domain, m);
    let inv_vol = 1.0 / domain.cell_volume();

    let mut work = field.values().to_vec();
    let mut triplets: Vec<(u32, u32, f64)> = Vec::with_capacity(ndof * 3usize.pow(n as u32) * m);
    let mut plus: Vec<(usize, [f64; 4])> = Vec::new();
    let mut minus: Vec<(usize, [f64; 4])> = Vec::new();

    for (q_flat, q_mi) in domain.interior_nodes() {
        // Cells containing node q.
        let mut cell_bases = [0usize; 8];
        let mut cell_count = 0;
        let corners = 1usize << n;
        'cells: for c in 0..corners {
            let mut cell = [0usize; MAX_GRID_DIM];
            for k in 0..n {
                let lo = q_mi[k] as isize - ((c >> k & 1) as isize);
                if lo < 0 || lo as usize >= domain.resolution(k) - 1 {
                    continue 'cells;
                }
                cell[k] = lo as usize;
            }
            cell_bases[cell_count] = domain.flat_index(&cell);
            cell_count += 1;
        }

        let col_base = domain.interior_ordinal(&q_mi) * m;
        for beta in 0..m {
            let idx = q_flat * m + beta;
            let f0 = work[idx];
            let eps = 1e-6 * (1.0 + f0.abs());

            plus.clear();
            minus.clear();
            work[idx] = f0 + eps;
            accumulate_local(&kernel, &work, &cell_bases[..cell_count], &mut plus);
            work[idx] = f0 - eps;
            accumulate_local(&kernel, &work, &cell_bases[..cell_count], &mut minus);
            work[idx] = f0;

            // plus and minus visit the same nodes in the same order.
            let col = (col_base + beta) as u32;
            let scale = -inv_vol / (2.0 * eps);
            for ((node, pvals), (_, mvals)) in plus.iter().zip(minus.iter()) {
                let mi = domain.multi_index(*node);
                if !domain.is_interior(&mi) {
                    continue;
                }
                let row_base = domain.interior_ordinal(&mi) * m;
                for a in 0..m {
                    let dv = (pvals[a] - mvals[a]) * scale;
                    if dv != 0.0 {
                        triplets.push(((row_base + a) as u32, col, dv));
                    }
                }
            }
        }
    }

    let a = Csr::from_triplets(ndof, triplets);
    let mut b = vec![0.0f64; ndof];
    for (flat, mi) in domain.interior_nodes() {
        let ord = domain.interior_ordinal(&mi);
        for alpha in 0..m {
            b[ord * m + alpha] = -r_div[flat * m + alpha];
        }
    }
    bicgstab(&a, &b, LINEAR_RTOL, LINEAR_MAX_ITER)
        .map_err(|_| SolveError::LinearSolveFailed { iteration })
}

/// Volume-gradient contributions of the given cells, merged per node into a
/// small sorted-by-insertion list (at most 3^n nodes).
fn accumulate_local(
    kernel: &CellKernel,
    values: &[f64],
    cell_bases: &[usize],
    out: &mut Vec<(usize, [f64; 4])>,
) {
    for &base in cell_bases {
        kernel.cell_grad_at(values, base, &mut |node, a, v| {
            if let Some(entry) = out.iter_mut().find(|(nd, _)| *nd == node) {
                entry.1[a] += v;
            } else {
                let mut vals = [0.0f64; 4];
                vals[a] = v;
                out.push((node, vals));
            }
        });
    }
    out.sort_by_key(|(node, _)| *node);
}

/// Componentwise discrete harmonic extension of the boundary data: the
/// default initial guess. Solves the flat-metric stationarity system with
/// the same cell quadrature as the volume functional.
pub fn harmonic_extension(boundary: &BoundaryData) -> Result<VectorField, SolveError> {
    let domain = boundary.domain().clone();
    let m = boundary.m();
    let n = domain.dim();
    let field = VectorField::zero(domain.clone(), m)?.with_boundary(boundary)?;
    let kernel = CellKernel::new(&domain, m);
    let corners = 1usize << n;

    // Local flat-metric stiffness: k[c1][c2] = Σ_s w ∇φ_c1 · ∇φ_c2.
    let mut local = [[0.0f64; 8]; 8];
    for s in 0..kernel.simplices() {
        for c1 in 0..corners {
            for c2 in 0..corners {
                let mut v = 0.0;
                for i in 0..n {
                    v += kernel.grad_at(s, c1, i) * kernel.grad_at(s, c2, i);
                }
                local[c1][c2] += kernel.weight() * v;
            }
        }
    }

    let ndof = domain.interior_count();
    let mut triplets: Vec<(u32, u32, f64)> = Vec::new();
    let mut rhs = vec![vec![0.0f64; ndof]; m];
    for cell in domain.cells() {
        let base = domain.flat_index(&cell);
        for c1 in 0..corners {
            let p = base + kernel.corner_offset(c1);
            let p_mi = domain.multi_index(p);
            if !domain.is_interior(&p_mi) {
                continue;
            }
            let row = domain.interior_ordinal(&p_mi) as u32;
            for c2 in 0..corners {
                let q = base + kernel.corner_offset(c2);
                let q_mi = domain.multi_index(q);
                let k = local[c1][c2];
                if domain.is_interior(&q_mi) {
                    triplets.push((row, domain.interior_ordinal(&q_mi) as u32, k));
                } else {
                    for (alpha, r) in rhs.iter_mut().enumerate() {
                        r[row as usize] -= k * field.value(q, alpha);
                    }
                }
            }
        }
    }
    let a = Csr::from_triplets(ndof, triplets);
    let mut out = field;
    for (alpha, r) in rhs.iter().enumerate() {
        let x = bicgstab(&a, r, 1e-12, LINEAR_MAX_ITER)
            .map_err(|_| SolveError::LinearSolveFailed { iteration: 0 })?;
        for (flat, mi) in domain.interior_nodes() {
            out.set_value(flat, alpha, x[domain.interior_ordinal(&mi)]);
        }
    }
    Ok(out)
}

// ── sparse kernel ────────────────────────────────────────────────────────

struct Csr {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl Csr {
    /// Build from triplets, summing duplicates. Deterministic: stable sort
    /// by (row, col).
    fn from_triplets(n: usize, mut trips: Vec<(u32, u32, f64)>) -> Csr {
        trips.sort_by_key(|&(r, c, _)| ((r as u64) << 32) | c as u64);
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(trips.len());
        let mut vals = Vec::with_capacity(trips.len());
        for (r, c, v) in trips {
            if let (Some(&last_c), true) = (cols.last(), row_ptr[r as usize + 1] > 0) {
                let filled: usize = cols.len();
                if last_c == c && row_ptr[r as usize + 1] == filled {
                    *vals.last_mut().unwrap() += v;
                    continue;
                }
            }
            cols.push(c);
            vals.push(v);
            row_ptr[r as usize + 1] = cols.len();
        }
        // row_ptr entries for empty rows.
        for i in 1..=n {
            if row_ptr[i] < row_ptr[i - 1] {
                row_ptr[i] = row_ptr[i - 1];
            }
        }
        Csr {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for r in 0..self.n {
            let mut s = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                s += self.vals[k] * x[self.cols[k] as usize];
            }
            y[r] = s;
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0f64; self.n];
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.cols[k] as usize == r {
                    d[r] = self.vals[k];
                }
            }
        }
        d
    }

    /// Scale row r by 1/d[r] (Jacobi row equilibration).
    fn scale_rows(&mut self, d: &[f64]) {
        for r in 0..self.n {
            let s = 1.0 / d[r];
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                self.vals[k] *= s;
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        s += a[i] * b[i];
    }
    s
}

/// BiCGStab with Jacobi row scaling; `Err(iterations)` on breakdown or when
/// the iteration cap is hit before the relative tolerance.
fn bicgstab(a: &Csr, b: &[f64], rtol: f64, max_iter: usize) -> Result<Vec<f64>, usize> {
    let n = a.n;
    let mut diag = a.diagonal();
    for d in diag.iter_mut() {
        if d.abs() < 1e-300 {
            *d = 1.0;
        }
    }
    let mut a = Csr {
        n,
        row_ptr: a.row_ptr.clone(),
        cols: a.cols.clone(),
        vals: a.vals.clone(),
    };
    a.scale_rows(&diag);
    let mut bs = b.to_vec();
    for (v, d) in bs.iter_mut().zip(&diag) {
        *v /= d;
    }

    let bnorm = dot(&bs, &bs).sqrt();
    if bnorm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let target = rtol * bnorm;

    let mut x = vec![0.0f64; n];
    let mut r = bs.clone();
    let r_hat = r.clone();
    let mut rho = 1.0f64;
    let mut alpha = 1.0f64;
    let mut omega = 1.0f64;
    let mut v = vec![0.0f64; n];
    let mut p = vec![0.0f64; n];
    let mut s = vec![0.0f64; n];
    let mut t = vec![0.0f64; n];

    for it in 0..max_iter {
        let rho_new = dot(&r_hat, &r);
        if rho_new.abs() < 1e-300 {
            return Err(it);
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        a.matvec(&p, &mut v);
        let denom = dot(&r_hat, &v);
        if denom.abs() < 1e-300 {
            return Err(it);
        }
        alpha = rho / denom;
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        if dot(&s, &s).sqrt() <= target {
            for i in 0..n {
                x[i] += alpha * p[i];
            }
            return Ok(x);
        }
        a.matvec(&s, &mut t);
        let tt = dot(&t, &t);
        if tt == 0.0 {
            return Err(it);
        }
        omega = dot(&t, &s) / tt;
        if omega == 0.0 {
            return Err(it);
        }
        for i in 0..n {
            x[i] += alpha * p[i] + omega * s[i];
            r[i] = s[i] - omega * t[i];
        }
        if dot(&r, &r).sqrt() <= target {
            return Ok(x);
        }
    }
    Err(max_iter)
}

// ── timing ───────────────────────────────────────────────────────────────

struct Stopwatch {
    #[cfg(feature = "std")]
    start: std::time::Instant,
}

impl Stopwatch {
    fn start() -> Self {
        Stopwatch {
            #[cfg(feature = "std")]
            start: std::time::Instant::now(),
        }
    }

    #[cfg(feature = "std")]
    fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    #[cfg(not(feature = "std"))]
    fn elapsed(&self) -> f64 {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::divergence_residual;
    use crate::grid::GridDomain;
    use crate::preset::Preset;

    fn linear_preset(n: usize, m: usize) -> Preset {
        let mut matrix = vec![0.0; n * m];
        for (k, v) in matrix.iter_mut().enumerate() {
            *v = 0.15 * (k as f64 + 1.0);
        }
        let offset = vec![0.05; m];
        Preset::Linear {
            n,
            m,
            matrix,
            offset,
        }
    }

    #[test]
    fn csr_merges_duplicates() {
        let a = Csr::from_triplets(2, vec![(0, 0, 1.0), (0, 0, 2.0), (1, 1, 4.0), (0, 1, -1.0)]);
        let mut y = [0.0; 2];
        a.matvec(&[1.0, 1.0], &mut y);
        assert_eq!(y, [2.0, 4.0]);
    }

    #[test]
    fn bicgstab_solves_small_system() {
        // [4 1; 1 3] x = [1, 2]  →  x = (1/11, 7/11).
        let a = Csr::from_triplets(2, vec![(0, 0, 4.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 3.0)]);
        let x = bicgstab(&a, &[1.0, 2.0], 1e-14, 100).unwrap();
        assert!((x[0] - 1.0 / 11.0).abs() < 1e-12);
        assert!((x[1] - 7.0 / 11.0).abs() < 1e-12);
    }

    #[test]
    fn mcf_step_keeps_linear_fixed() {
        let d = GridDomain::cube(2, -1.0, 1.0, 9).unwrap();
        let f = linear_preset(2, 2).sample(&d).unwrap();
        let g = mcf_step(&f, 1e-3).unwrap();
        assert!(f.sup_distance(&g) < 1e-14);
    }

    #[test]
    fn harmonic_extension_reproduces_linear() {
        let d = GridDomain::cube(2, -1.0, 1.0, 11).unwrap();
        let f = linear_preset(2, 2).sample(&d).unwrap();
        let ext = harmonic_extension(&f.boundary_trace()).unwrap();
        assert!(f.sup_distance(&ext) < 1e-10, "{}", f.sup_distance(&ext));
    }

    #[test]
    fn newton_converges_from_scherk_samples() {
        let d = GridDomain::cube(2, -1.0, 1.0, 17).unwrap();
        let f = Preset::Scherk.sample(&d).unwrap();
        let cfg = SolveConfig {
            continuation_steps: 1,
            ..Default::default()
        };
        let (sol, report) = newton_solve(&f, &f.boundary_trace(), &cfg).unwrap();
        assert!(report.converged);
        assert!(report.iterations <= 4, "iterations {}", report.iterations);
        assert!(report.residual_sup < 1e-8);
        // Boundary bitwise untouched.
        assert_eq!(sol.boundary_mismatch(&f.boundary_trace()), None);
    }

    #[test]
    fn newton_boundary_mismatch_rejected() {
        let d = GridDomain::cube(2, -1.0, 1.0, 9).unwrap();
        let f = Preset::Scherk.sample(&d).unwrap();
        let wrong = f.boundary_trace().scaled(2.0);
        assert!(matches!(
            newton_solve(&f, &wrong, &SolveConfig::default()),
            Err(SolveError::BoundaryMismatch { .. })
        ));
    }

    #[test]
    fn newton_quadratic_tail() {
        // Perturbed start on a linear-boundary problem: the accepted-step
        // residuals should decay with log slope ≥ 1.8 somewhere in the tail.
        let d = GridDomain::cube(2, -1.0, 1.0, 17).unwrap();
        let lin = linear_preset(2, 2).sample(&d).unwrap();
        let mut init = lin.clone();
        for (flat, mi) in d.interior_nodes() {
            let x = d.coords(&mi);
            let bump = 0.4 * (1.0 - x[0] * x[0]) * (1.0 - x[1] * x[1]);
            for a in 0..2 {
                init.set_value(flat, a, init.value(flat, a) + bump);
            }
        }
        let cfg = SolveConfig {
            continuation_steps: 1,
            tol: 1e-12,
            ..Default::default()
        };
        let (_, report) = newton_solve(&init, &lin.boundary_trace(), &cfg).unwrap();
        assert!(report.converged);
        let sups: Vec<f64> = report.history.iter().map(|h| h.residual_sup).collect();
        let mut best_slope = 0.0f64;
        for w in sups.windows(2) {
            if w[0] < 1e-2 && w[1] > 1e-14 {
                best_slope = best_slope.max(w[1].ln() / w[0].ln());
            }
        }
        assert!(best_slope >= 1.8, "slope {best_slope}, history {sups:?}");
        // Strict decrease of accepted steps.
        for w in sups.windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn mcf_relaxes_bump_to_zero() {
        let d = GridDomain::cube(2, -1.0, 1.0, 9).unwrap();
        let zero_bd = BoundaryData::zero(d.clone(), 1).unwrap();
        let bump = Preset::Bump { m: 1, amp: 0.3 }
            .sample(&d)
            .unwrap()
            .with_boundary(&zero_bd)
            .unwrap();
        let cfg = SolveConfig {
            tol: 1e-9,
            ..Default::default()
        };
        let (sol, report) = mcf_solve(&bump, &zero_bd, &cfg).unwrap();
        assert!(report.converged, "termination {:?}", report.termination);
        let mut worst = 0.0f64;
        for v in sol.values() {
            worst = worst.max(v.abs());
        }
        assert!(worst < 1e-8, "max |f| = {worst}");
        let r = divergence_residual(&sol).unwrap();
        assert!(r.sup_div < 1e-8);
    }

    #[test]
    fn mcf_converges_to_linear_solution() {
        // Linear boundary + interior perturbation decays back to the linear
        // map, the unique solution with that trace.
        let d = GridDomain::cube(2, -1.0, 1.0, 9).unwrap();
        let lin = linear_preset(2, 2).sample(&d).unwrap();
        let mut init = lin.clone();
        for (flat, mi) in d.interior_nodes() {
            let x = d.coords(&mi);
            let bump = 0.2 * (1.0 - x[0] * x[0]) * (1.0 - x[1] * x[1]);
            init.set_value(flat, 0, init.value(flat, 0) + bump);
        }
        let cfg = SolveConfig {
            tol: 1e-10,
            ..Default::default()
        };
        let (sol, report) = mcf_solve(&init, &lin.boundary_trace(), &cfg).unwrap();
        assert!(report.converged);
        assert!(sol.sup_distance(&lin) < 1e-8, "{}", sol.sup_distance(&lin));
    }

    #[test]
    fn solver_output_deterministic() {
        let d = GridDomain::cube(2, -1.0, 1.0, 9).unwrap();
        let f = Preset::HolomorphicQuadratic { c: 0.2 }.sample(&d).unwrap();
        let bd = f.boundary_trace();
        let init = harmonic_extension(&bd).unwrap();
        let cfg = SolveConfig {
            continuation_steps: 2,
            ..Default::default()
        };
        let (a, ra) = newton_solve(&init, &bd, &cfg).unwrap();
        let (b, rb) = newton_solve(&init, &bd, &cfg).unwrap();
        assert_eq!(a.values(), b.values());
        assert_eq!(ra.iterations, rb.iterations);
    }

    #[test]
    fn config_validation() {
        let d = GridDomain::cube(2, -1.0, 1.0, 9).unwrap();
        let f = Preset::Scherk.sample(&d).unwrap();
        let bd = f.boundary_trace();
        let bad = SolveConfig {
            dt_factor: Some(0.3),
            ..Default::default()
        };
        assert!(matches!(
            mcf_solve(&f, &bd, &bad),
            Err(SolveError::BadConfig(_))
        ));
        let bad = SolveConfig {
            tol: 0.0,
            ..Default::default()
        };
        assert!(matches!(
            newton_solve(&f, &bd, &bad),
            Err(SolveError::BadConfig(_))
        ));
    }
}
