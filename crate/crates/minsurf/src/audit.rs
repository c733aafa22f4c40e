//! Certification of the geometric identities and inequalities that hold on
//! area-decreasing minimal graphs: the area-decreasing audit itself, the
//! Laplacian identity for ln *Ω against its curvature contraction,
//! superharmonicity and the sharper gradient inequality, the minimum
//! principle for *Ω, the Gauss-map hemisphere characterization, and an
//! exploratory interior gradient-bound fit.
//!
//! Continuum statements are checked with a discretization budget
//! τ(h) = c_check · h on nodes at least two layers from the boundary.
//! On fields whose residual exceeds the solved gate, pass/fail checks are
//! downgraded to informational: the identities only hold on minimal
//! graphs.

use alloc::vec;
use alloc::vec::Vec;

use crate::calculus::{
    divergence_residual, geometry_field, laplace_beltrami, second_fundamental_form, GeometryField,
};
use crate::error::{AuditError, GridError};
use crate::grid::VectorField;
use crate::pointwise::log_star_omega_laplacian_rhs;

#[allow(unused_imports)]
use num_traits::Float;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Computed but not gradeable (for example on non-solutions).
    Info,
}

#[derive(Clone, Debug)]
pub struct AuditEntry {
    pub name: &'static str,
    pub status: CheckStatus,
    pub worst_node: Option<usize>,
    pub worst_value: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug)]
pub struct AuditReport {
    pub entries: Vec<AuditEntry>,
    /// Divergence residual sup norm of the audited field.
    pub residual_sup: f64,
    /// Whether the field counted as a solution for gating purposes.
    pub solved: bool,
}

impl AuditReport {
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.status != CheckStatus::Fail)
    }

    pub fn entry(&self, name: &str) -> Option<&AuditEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

#[derive(Clone, Debug)]
pub struct AuditConfig {
    /// Discretization budget coefficient: τ(h) = c_check · max spacing.
    pub c_check: f64,
    /// Residual sup norm below which the field is treated as a solution.
    pub solved_tol: f64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            c_check: 10.0,
            solved_tol: 1e-6,
        }
    }
}

impl AuditConfig {
    pub fn tau(&self, field: &VectorField) -> f64 {
        self.c_check * field.domain().max_spacing()
    }
}

/// Result of the pointwise `|∧²df| < 1` scan.
#[derive(Clone, Debug)]
pub struct AreaDecreasingAudit {
    pub sup_wedge2: f64,
    /// Interior nodes where |∧²df| ≥ 1.
    pub violations: Vec<usize>,
    pub entry: AuditEntry,
}

pub fn area_decreasing_audit(field: &VectorField) -> Result<AreaDecreasingAudit, GridError> {
    let geo = geometry_field(field)?;
    Ok(area_decreasing_from_geometry(field, &geo))
}

fn area_decreasing_from_geometry(field: &VectorField, geo: &GeometryField) -> AreaDecreasingAudit {
    let domain = field.domain();
    let mut sup = 0.0f64;
    let mut worst = None;
    let mut violations = Vec::new();
    for (flat, mi) in domain.interior_nodes() {
        let w2 = geo.svd_at(&mi).wedge2_norm();
        if w2 > sup {
            sup = w2;
            worst = Some(flat);
        }
        if w2 >= 1.0 {
            violations.push(flat);
        }
    }
    let status = if violations.is_empty() {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    AreaDecreasingAudit {
        sup_wedge2: sup,
        violations,
        entry: AuditEntry {
            name: "area_decreasing",
            status,
            worst_node: worst,
            worst_value: sup,
            tolerance: 1.0,
        },
    }
}

/// Laplacian identity data: per audited node, the operator side
/// `Δ ln *Ω` and the curvature side from the second fundamental form.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    /// (flat node, lhs, rhs) over the audited set (depth ≥ 2).
    pub rows: Vec<(usize, f64, f64)>,
    pub sup_gap: f64,
    pub mean_gap: f64,
    pub entry: AuditEntry,
}

pub fn identity_check(field: &VectorField, cfg: &AuditConfig) -> Result<IdentityCheck, GridError> {
    let geo = geometry_field(field)?;
    let solved = divergence_residual(field)?.sup_div < cfg.solved_tol;
    identity_from_geometry(field, &geo, cfg, solved)
}

fn identity_from_geometry(
    field: &VectorField,
    geo: &GeometryField,
    cfg: &AuditConfig,
    solved: bool,
) -> Result<IdentityCheck, GridError> {
    let domain = field.domain().clone();
    let u = geo.log_star_omega_grid();
    let lap = laplace_beltrami(&u, field)?;
    let mut rows = Vec::new();
    let mut sup = 0.0f64;
    let mut worst = None;
    let mut total = 0.0f64;
    for (flat, mi) in domain.nodes_of_depth(2) {
        let h = second_fundamental_form(field, flat)?;
        let rhs = log_star_omega_laplacian_rhs(geo.svd_at(&mi).lambdas(), &h);
        let lhs = lap[flat];
        let gap = (lhs - rhs).abs();
        if gap > sup {
            sup = gap;
            worst = Some(flat);
        }
        total += gap;
        rows.push((flat, lhs, rhs));
    }
    let mean = if rows.is_empty() {
        0.0
    } else {
        total / rows.len() as f64
    };
    let tau = cfg.tau(field);
    let status = if !solved {
        CheckStatus::Info
    } else if sup <= tau {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    Ok(IdentityCheck {
        rows,
        sup_gap: sup,
        mean_gap: mean,
        entry: AuditEntry {
            name: "log_star_omega_identity",
            status,
            worst_node: worst,
            worst_value: sup,
            tolerance: tau,
        },
    })
}

/// Superharmonicity of ln *Ω and the sharper differential inequality
/// `Δ ln *Ω + (1/n)|∇ ln *Ω|²_g ≤ 0`, both with budget τ(h). Returns the
/// plain-superharmonicity entry and the gradient-inequality entry, plus the
/// codimension-one identity entry `Δ *Ω + *Ω |A|² = 0` when m = 1.
pub fn superharmonicity_check(
    field: &VectorField,
    cfg: &AuditConfig,
) -> Result<Vec<AuditEntry>, GridError> {
    let geo = geometry_field(field)?;
    let residual = divergence_residual(field)?;
    let solved = residual.sup_div < cfg.solved_tol;
    let area = area_decreasing_from_geometry(field, &geo);
    superharmonicity_from_geometry(field, &geo, cfg, solved && area.sup_wedge2 < 1.0)
}

fn superharmonicity_from_geometry(
    field: &VectorField,
    geo: &GeometryField,
    cfg: &AuditConfig,
    gradeable: bool,
) -> Result<Vec<AuditEntry>, GridError> {
    let domain = field.domain().clone();
    let n = domain.dim();
    let u = geo.log_star_omega_grid();
    let lap = laplace_beltrami(&u, field)?;
    let mut worst_plain = f64::NEG_INFINITY;
    let mut node_plain = None;
    let mut worst_sharp = f64::NEG_INFINITY;
    let mut node_sharp = None;
    for (flat, mi) in domain.nodes_of_depth(2) {
        // |∇ ln *Ω|²_g with central first differences of the grid scalar.
        let md = geo.metric_at(&mi);
        let mut du = [0.0f64; 3];
        for (i, dui) in du.iter_mut().enumerate().take(n) {
            let s = domain.stride(i);
            *dui = (u[flat + s] - u[flat - s]) / (2.0 * domain.spacing(i));
        }
        let mut grad_sq = 0.0;
        for i in 0..n {
            for j in 0..n {
                grad_sq += md.g_inv[i][j] * du[i] * du[j];
            }
        }
        let plain = lap[flat];
        let sharp = lap[flat] + grad_sq / n as f64;
        if plain > worst_plain {
            worst_plain = plain;
            node_plain = Some(flat);
        }
        if sharp > worst_sharp {
            worst_sharp = sharp;
            node_sharp = Some(flat);
        }
    }
    let tau = cfg.tau(field);
    let grade = |worst: f64| {
        if !gradeable {
            CheckStatus::Info
        } else if worst <= tau {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        }
    };
    let mut entries = vec![
        AuditEntry {
            name: "superharmonic",
            status: grade(worst_plain),
            worst_node: node_plain,
            worst_value: worst_plain,
            tolerance: tau,
        },
        AuditEntry {
            name: "log_star_omega_gradient_inequality",
            status: grade(worst_sharp),
            worst_node: node_sharp,
            worst_value: worst_sharp,
            tolerance: tau,
        },
    ];
    if field.m() == 1 {
        entries.push(codim1_identity(field, geo, cfg, gradeable)?);
    }
    Ok(entries)
}

/// Codimension-one identity `Δ(1/√(1+|∇f|²)) + (1/√(1+|∇f|²)) |A|² = 0`,
/// with |A|² from the shape tensor.
fn codim1_identity(
    field: &VectorField,
    geo: &GeometryField,
    cfg: &AuditConfig,
    gradeable: bool,
) -> Result<AuditEntry, GridError> {
    let domain = field.domain().clone();
    let w = geo.star_omega_grid();
    let lap = laplace_beltrami(&w, field)?;
    let mut worst = 0.0f64;
    let mut node = None;
    for (flat, mi) in domain.nodes_of_depth(2) {
        let h = second_fundamental_form(field, flat)?;
        let gap = (lap[flat] + geo.star_omega_at(&mi) * h.norm_sq()).abs();
        if gap > worst {
            worst = gap;
            node = Some(flat);
        }
    }
    let tau = cfg.tau(field);
    let status = if !gradeable {
        CheckStatus::Info
    } else if worst <= tau {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    Ok(AuditEntry {
        name: "codim1_identity",
        status,
        worst_node: node,
        worst_value: worst,
        tolerance: tau,
    })
}

/// Gauss-map hemisphere audit for n = m = 2: pointwise equivalence of
/// `|∧²df| < 1` and ω₁ > 0, and the minimum of ω₁ over interior nodes.
pub fn gauss_map_audit(field: &VectorField) -> Result<AuditEntry, AuditError> {
    let domain = field.domain().clone();
    if domain.dim() != 2 || field.m() != 2 {
        return Err(AuditError::DimensionMismatch {
            need: (2, 2),
            got: (domain.dim(), field.m()),
        });
    }
    let mut min_omega1 = f64::INFINITY;
    let mut worst = None;
    let mut equivalent = true;
    for (flat, _) in domain.interior_nodes() {
        let jet = field.jet(flat).map_err(AuditError::Grid)?;
        let d = jet.first.svd();
        let g = jet.first.grassmann_forms().expect("n = m = 2 checked");
        if (d.wedge2_norm() < 1.0) != (g.omega1 > 0.0) {
            equivalent = false;
        }
        if g.omega1 < min_omega1 {
            min_omega1 = g.omega1;
            worst = Some(flat);
        }
    }
    Ok(AuditEntry {
        name: "gauss_map_hemisphere",
        status: if equivalent {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        worst_node: worst,
        worst_value: min_omega1,
        tolerance: 0.0,
    })
}

/// Minimum principle: the interior minimum of *Ω may not undercut the
/// minimum on the boundary-adjacent layer by more than τ(h).
pub fn min_principle_check(
    field: &VectorField,
    cfg: &AuditConfig,
) -> Result<AuditEntry, GridError> {
    let geo = geometry_field(field)?;
    let residual = divergence_residual(field)?;
    let area = area_decreasing_from_geometry(field, &geo);
    let gradeable = residual.sup_div < cfg.solved_tol && area.sup_wedge2 < 1.0;
    Ok(min_principle_from_geometry(field, &geo, cfg, gradeable))
}

fn min_principle_from_geometry(
    field: &VectorField,
    geo: &GeometryField,
    cfg: &AuditConfig,
    gradeable: bool,
) -> AuditEntry {
    let domain = field.domain();
    let mut interior_min = f64::INFINITY;
    let mut node = None;
    let mut collar_min = f64::INFINITY;
    for (flat, mi) in domain.interior_nodes() {
        let so = geo.star_omega_at(&mi);
        if so < interior_min {
            interior_min = so;
            node = Some(flat);
        }
        if domain.depth(&mi) == 1 && so < collar_min {
            collar_min = so;
        }
    }
    let tau = cfg.tau(field);
    let slack = collar_min - interior_min; // ≤ τ(h) required
    let status = if !gradeable {
        CheckStatus::Info
    } else if slack <= tau {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    AuditEntry {
        name: "star_omega_min_principle",
        status,
        worst_node: node,
        worst_value: slack,
        tolerance: tau,
    }
}

/// One row per interior node of the gradient-bound table.
#[derive(Clone, Copy, Debug)]
pub struct GradientBoundRow {
    pub node: usize,
    /// |df| (operator norm).
    pub df_norm: f64,
    /// |f| (Euclidean norm of the values).
    pub f_norm: f64,
    /// Distance to the boundary of the box.
    pub dist: f64,
}

/// Instance-wise fit of constants (C₁, C₂) with
/// `|df(x)| ≤ C₁ exp(C₂ |f(x)|/d(x))` over all interior nodes.
///
/// Exploratory: C₂ is the nonnegative least-squares slope of ln|df| against
/// |f|/d, and C₁ the smallest prefactor making the bound hold. No claim is
/// made about constants depending only on n.
#[derive(Clone, Debug)]
pub struct GradientBoundFit {
    pub c1: f64,
    pub c2: f64,
    pub rows: Vec<GradientBoundRow>,
    pub entry: AuditEntry,
}

pub fn gradient_bound_report(field: &VectorField) -> Result<GradientBoundFit, AuditError> {
    let domain = field.domain().clone();
    let m = field.m();
    for (flat, _) in domain.nodes() {
        for a in 0..m {
            if field.value(flat, a) < 0.0 {
                return Err(AuditError::NegativeComponent {
                    node: flat,
                    component: a,
                });
            }
        }
    }
    let mut rows = Vec::new();
    for (flat, mi) in domain.interior_nodes() {
        let jet = field.jet(flat).map_err(AuditError::Grid)?;
        let mut f_sq = 0.0;
        for a in 0..m {
            f_sq += field.value(flat, a) * field.value(flat, a);
        }
        rows.push(GradientBoundRow {
            node: flat,
            df_norm: jet.first.op_norm(),
            f_norm: f_sq.sqrt(),
            dist: domain.distance_to_boundary(&domain.coords(&mi)[..domain.dim()]),
        });
    }
    // Least-squares slope of ln|df| against t = |f|/d, clamped nonnegative.
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.df_norm > 0.0 && r.dist > 0.0)
        .map(|r| (r.f_norm / r.dist, r.df_norm.ln()))
        .collect();
    let (c1, c2) = if pts.is_empty() {
        (0.0, 0.0)
    } else {
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let denom = n * sxx - sx * sx;
        let slope = if denom.abs() < 1e-30 {
            0.0
        } else {
            (n * sxy - sx * sy) / denom
        };
        let c2 = slope.max(0.0);
        let mut log_c1 = f64::NEG_INFINITY;
        for (t, y) in &pts {
            log_c1 = log_c1.max(y - c2 * t);
        }
        (log_c1.exp(), c2)
    };
    let mut worst = 0.0f64;
    let mut node = None;
    for r in &rows {
        if r.df_norm > worst {
            worst = r.df_norm;
            node = Some(r.node);
        }
    }
    Ok(GradientBoundFit {
        c1,
        c2,
        rows,
        entry: AuditEntry {
            name: "gradient_bound_fit",
            status: CheckStatus::Info,
            worst_node: node,
            worst_value: worst,
            tolerance: f64::INFINITY,
        },
    })
}

/// Run every applicable audit once and collect the report.
pub fn run_all(field: &VectorField, cfg: &AuditConfig) -> Result<AuditReport, GridError> {
    let geo = geometry_field(field)?;
    let residual = divergence_residual(field)?;
    let solved = residual.sup_div < cfg.solved_tol;
    let area = area_decreasing_from_geometry(field, &geo);
    let gradeable = solved && area.sup_wedge2 < 1.0;

    let mut entries = Vec::new();
    entries.push(area.entry.clone());
    entries.extend(superharmonicity_from_geometry(field, &geo, cfg, gradeable)?);
    entries.push(identity_from_geometry(field, &geo, cfg, solved)?.entry);
    entries.push(min_principle_from_geometry(field, &geo, cfg, gradeable));
    if field.domain().dim() == 2 && field.m() == 2 {
        let gauss = gauss_map_audit(field).expect("dimensions checked");
        entries.push(gauss);
    }
    Ok(AuditReport {
        entries,
        residual_sup: residual.sup_div,
        solved,
    })
}

/// Per-node diagnostic columns for field dumps. Entries are NaN where the
/// quantity is undefined (boundary nodes, outside the audited depth, or
/// wrong dimensions for the Grassmannian heights).
pub struct DiagnosticsTable {
    pub wedge2: Vec<f64>,
    pub star_omega: Vec<f64>,
    pub identity_lhs: Vec<f64>,
    pub identity_rhs: Vec<f64>,
    pub omega1: Vec<f64>,
    pub omega2: Vec<f64>,
}

pub fn diagnostics_table(
    field: &VectorField,
    cfg: &AuditConfig,
) -> Result<DiagnosticsTable, GridError> {
    let domain = field.domain().clone();
    let geo = geometry_field(field)?;
    let count = domain.node_count();
    let mut t = DiagnosticsTable {
        wedge2: vec![f64::NAN; count],
        star_omega: vec![f64::NAN; count],
        identity_lhs: vec![f64::NAN; count],
        identity_rhs: vec![f64::NAN; count],
        omega1: vec![f64::NAN; count],
        omega2: vec![f64::NAN; count],
    };
    for (flat, mi) in domain.interior_nodes() {
        t.wedge2[flat] = geo.svd_at(&mi).wedge2_norm();
        t.star_omega[flat] = geo.star_omega_at(&mi);
        if domain.dim() == 2 && field.m() == 2 {
            let jet = field.jet(flat)?;
            let g = jet.first.grassmann_forms().expect("n = m = 2");
            t.omega1[flat] = g.omega1;
            t.omega2[flat] = g.omega2;
        }
    }
    let solved = divergence_residual(field)?.sup_div < cfg.solved_tol;
    let identity = identity_from_geometry(field, &geo, cfg, solved)?;
    for (flat, lhs, rhs) in identity.rows {
        t.identity_lhs[flat] = lhs;
        t.identity_rhs[flat] = rhs;
    }
    Ok(t)
}
