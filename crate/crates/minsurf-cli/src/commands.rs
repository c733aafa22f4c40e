//! The subcommands: solve, check, convergence, svd-report.
//!
//! Exit codes: 0 success, 1 configuration or input error, 2 solver
//! non-convergence, 3 audit failure.

use std::path::{Path, PathBuf};

use minsurf::audit::{
    area_decreasing_audit, diagnostics_table, gradient_bound_report, identity_check, run_all,
};
use minsurf::calculus::divergence_residual;
use minsurf::solve::{harmonic_extension, solve};
use minsurf::{BoundaryData, VectorField};
use serde_json::json;

use crate::config::{ConfigError, RunConfig};
use crate::fields_csv::{parse_fields, render_fields, write_atomic};
use crate::report::{audit_report_json, solve_report_json, to_pretty};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_AUDIT_FAILED: i32 = 3;

/// Paths of the files a command emitted.
#[derive(Debug, Default)]
pub struct RunArtifacts {
    pub fields_csv: Option<PathBuf>,
    pub report_json: Option<PathBuf>,
    pub audit_json: Option<PathBuf>,
    pub convergence_csv: Option<PathBuf>,
}

fn build_problem(
    cfg: &RunConfig,
    resolution: usize,
) -> Result<(VectorField, BoundaryData), ConfigError> {
    let domain = cfg.domain_at(resolution)?;
    let preset = cfg.build_preset()?;
    let sample = preset
        .sample(&domain)
        .map_err(|e| ConfigError(format!("{e}")))?;
    let scaled = if cfg.boundary_scale == 1.0 {
        sample
    } else {
        sample.scaled(cfg.boundary_scale)
    };
    let boundary = scaled.boundary_trace();
    let initial = match cfg.initial.as_str() {
        "preset" => scaled,
        _ => harmonic_extension(&boundary).map_err(|e| ConfigError(format!("{e}")))?,
    };
    Ok((initial, boundary))
}

fn solve_once(
    cfg: &RunConfig,
    resolution: usize,
) -> Result<(VectorField, minsurf::SolveReport), ConfigError> {
    let (initial, boundary) = build_problem(cfg, resolution)?;
    solve(&initial, &boundary, &cfg.solver_config()).map_err(|e| ConfigError(format!("{e}")))
}

pub fn cmd_solve(cfg: &RunConfig, outdir: &str) -> Result<(RunArtifacts, i32), ConfigError> {
    let (field, report) = solve_once(cfg, cfg.resolution)?;
    let dir = Path::new(outdir);
    let fields_path = dir.join("fields.csv");
    let report_path = dir.join("report.json");
    write_atomic(&fields_path, &render_fields(&field, None))
        .map_err(|e| ConfigError(format!("cannot write {}: {e}", fields_path.display())))?;
    write_atomic(
        &report_path,
        &to_pretty(&solve_report_json(&cfg.method, &report)),
    )
    .map_err(|e| ConfigError(format!("cannot write {}: {e}", report_path.display())))?;
    eprintln!(
        "solve: {} iterations, residual sup {:.3e}, converged = {}",
        report.iterations, report.residual_sup, report.converged
    );
    let code = if report.converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    };
    Ok((
        RunArtifacts {
            fields_csv: Some(fields_path),
            report_json: Some(report_path),
            ..Default::default()
        },
        code,
    ))
}

pub fn cmd_check(cfg: &RunConfig, outdir: &str) -> Result<(RunArtifacts, i32), ConfigError> {
    let mut artifacts = RunArtifacts::default();
    let dir = Path::new(outdir);

    // A field to audit: loaded from CSV, or freshly solved.
    let field = match &cfg.fields {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("cannot read {path}: {e}")))?;
            parse_fields(&text)?
        }
        None => {
            let (field, report) = solve_once(cfg, cfg.resolution)?;
            if !report.converged {
                eprintln!("check: solver did not converge; audits will be informational");
            }
            let report_path = dir.join("report.json");
            write_atomic(
                &report_path,
                &to_pretty(&solve_report_json(&cfg.method, &report)),
            )
            .map_err(|e| ConfigError(format!("cannot write {}: {e}", report_path.display())))?;
            artifacts.report_json = Some(report_path);
            field
        }
    };

    let audit_cfg = cfg.audit_config();
    let report = run_all(&field, &audit_cfg).map_err(|e| ConfigError(format!("{e}")))?;
    let area = area_decreasing_audit(&field).map_err(|e| ConfigError(format!("{e}")))?;
    let identity = identity_check(&field, &audit_cfg).map_err(|e| ConfigError(format!("{e}")))?;
    let bound = if cfg.audit_gradient_bound {
        Some(gradient_bound_report(&field).map_err(|e| ConfigError(format!("{e}")))?)
    } else {
        None
    };

    let audit_path = dir.join("audit.json");
    write_atomic(
        &audit_path,
        &to_pretty(&audit_report_json(
            &report,
            area.sup_wedge2,
            &area.violations,
            Some((identity.sup_gap, identity.mean_gap)),
            bound.as_ref(),
        )),
    )
    .map_err(|e| ConfigError(format!("cannot write {}: {e}", audit_path.display())))?;
    artifacts.audit_json = Some(audit_path);

    // Field dump with the diagnostic columns appended.
    let table = diagnostics_table(&field, &audit_cfg).map_err(|e| ConfigError(format!("{e}")))?;
    let fields_path = dir.join("fields.csv");
    write_atomic(&fields_path, &render_fields(&field, Some(&table)))
        .map_err(|e| ConfigError(format!("cannot write {}: {e}", fields_path.display())))?;
    artifacts.fields_csv = Some(fields_path);

    for e in &report.entries {
        eprintln!(
            "check: {:32} {:4} worst {:+.6e} (tolerance {:.3e})",
            e.name,
            crate::report::status_str(e.status),
            e.worst_value,
            e.tolerance
        );
    }
    let code = if report.all_passed() {
        EXIT_OK
    } else {
        EXIT_AUDIT_FAILED
    };
    Ok((artifacts, code))
}

pub fn cmd_convergence(cfg: &RunConfig, outdir: &str) -> Result<(RunArtifacts, i32), ConfigError> {
    if cfg.levels.len() < 3 {
        return Err(ConfigError(format!(
            "convergence needs at least 3 levels, got {:?}",
            cfg.levels
        )));
    }
    let audit_cfg = cfg.audit_config();
    let mut rows = Vec::new();
    let mut all_converged = true;
    for &res in &cfg.levels {
        // Discretization residual of the preset samples at this level; on
        // analytic solutions this is the column whose order is fitted.
        let domain = cfg.domain_at(res)?;
        let preset = cfg.build_preset()?;
        let sample = preset
            .sample(&domain)
            .map_err(|e| ConfigError(format!("{e}")))?
            .scaled(cfg.boundary_scale);
        let sample_residual = divergence_residual(&sample)
            .map_err(|e| ConfigError(format!("{e}")))?
            .sup_div;

        let (field, report) = solve_once(cfg, res)?;
        if !report.converged {
            eprintln!("convergence: level {res} did not converge; stopping with partial data");
            all_converged = false;
            break;
        }
        let identity =
            identity_check(&field, &audit_cfg).map_err(|e| ConfigError(format!("{e}")))?;
        let entries = minsurf::audit::superharmonicity_check(&field, &audit_cfg)
            .map_err(|e| ConfigError(format!("{e}")))?;
        // Violation amount of the sharper inequality (zero when it holds).
        let slack = entries
            .iter()
            .find(|e| e.name == "log_star_omega_gradient_inequality")
            .map(|e| e.worst_value.max(0.0))
            .unwrap_or(f64::NAN);
        let h = field.domain().max_spacing();
        eprintln!(
            "convergence: res {res}: h {h:.4e}, residual {sample_residual:.4e}, gap {:.4e}, slack {slack:+.4e}",
            identity.sup_gap
        );
        rows.push((h, sample_residual, identity.sup_gap, slack));
    }

    let mut csv = String::from("h,residual_sup,identity_gap_sup,superharmonicity_slack\n");
    for (h, r, g, s) in &rows {
        csv.push_str(&format!("{h:.16e},{r:.16e},{g:.16e},{s:.16e}\n"));
    }
    let path = Path::new(outdir).join("convergence.csv");
    write_atomic(&path, &csv)
        .map_err(|e| ConfigError(format!("cannot write {}: {e}", path.display())))?;

    if all_converged {
        // Least-squares slopes on log-log, printed as the study summary.
        for (label, pick) in [
            ("residual_sup", 1usize),
            ("identity_gap_sup", 2),
            ("superharmonicity_slack", 3),
        ] {
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .map(|r| (r.0, [r.0, r.1, r.2, r.3][pick]))
                .filter(|(_, v)| *v > 1e-14)
                .collect();
            if pts.len() < 2 {
                println!("order {label} = n/a (values at rounding level)");
                continue;
            }
            let slope = log_log_slope(&pts);
            println!("order {label} = {slope:.3}");
        }
    }
    let code = if all_converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    };
    Ok((
        RunArtifacts {
            convergence_csv: Some(path),
            ..Default::default()
        },
        code,
    ))
}

pub fn log_log_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0.ln()).sum();
    let sy: f64 = pts.iter().map(|p| p.1.ln()).sum();
    let sxx: f64 = pts.iter().map(|p| p.0.ln().powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| p.0.ln() * p.1.ln()).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Pointwise geometry of a single matrix given on the command line as
/// rows separated by ';' with ','-separated entries.
pub fn cmd_svd_report(matrix: &str) -> Result<i32, ConfigError> {
    let rows: Vec<&str> = matrix.split(';').collect();
    let m = rows.len();
    let mut entries = Vec::new();
    let mut n = 0;
    for (i, row) in rows.iter().enumerate() {
        let cols: Vec<&str> = row.split(',').collect();
        if i == 0 {
            n = cols.len();
        } else if cols.len() != n {
            return Err(ConfigError("matrix rows have unequal lengths".into()));
        }
        for c in cols {
            entries.push(
                c.trim()
                    .parse::<f64>()
                    .map_err(|_| ConfigError(format!("bad matrix entry {c:?}")))?,
            );
        }
    }
    let j =
        minsurf::Jacobian::from_rows(n, m, &entries).map_err(|e| ConfigError(format!("{e}")))?;
    let d = j.svd();
    let md = j.metric();
    let frames = j.adapted_frames();
    let lambdas: Vec<f64> = d.lambdas().to_vec();
    let mut root = json!({
        "schema": "1",
        "n": n,
        "m": m,
        "singular_values": lambdas,
        "op_norm": d.op_norm(),
        "wedge2_norm": d.wedge2_norm(),
        "area_decreasing": d.wedge2_norm() < 1.0,
        "sqrt_g": md.sqrt_g,
        "star_omega": md.star_omega,
        "right_basis": basis_json(d.right_basis(), n),
        "left_basis": basis_json(d.left_basis(), m),
        "tangent_frame": basis_json(frames.tangent(), n + m),
        "normal_frame": basis_json(frames.normal(), n + m),
    });
    if let Ok(g) = j.grassmann_forms() {
        root["omega1"] = json!(g.omega1);
        root["omega2"] = json!(g.omega2);
    }
    println!("{}", to_pretty(&root).trim_end());
    Ok(EXIT_OK)
}

fn basis_json<const W: usize>(vectors: &[[f64; W]], dim: usize) -> serde_json::Value {
    let rows: Vec<Vec<f64>> = vectors.iter().map(|v| v[..dim].to_vec()).collect();
    json!(rows)
}
