//! Field dump/restore as CSV: one row per node in lexicographic order,
//! columns x1..xn then f1..fm, values with 17 significant digits so doubles
//! round-trip losslessly. The check command appends per-node diagnostic
//! columns; undefined entries are left empty.

use minsurf::audit::DiagnosticsTable;
use minsurf::{GridDomain, VectorField};

use crate::config::ConfigError;

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        fmt(v)
    }
}

pub fn render_fields(field: &VectorField, diag: Option<&DiagnosticsTable>) -> String {
    let d = field.domain();
    let n = d.dim();
    let m = field.m();
    let mut out = String::new();
    for k in 0..n {
        out.push_str(&format!("x{},", k + 1));
    }
    for a in 0..m {
        out.push_str(&format!("f{}", a + 1));
        if a + 1 < m {
            out.push(',');
        }
    }
    if diag.is_some() {
        out.push_str(",wedge2,star_omega,lhs31,rhs31,omega1,omega2");
    }
    out.push('\n');
    for (flat, mi) in d.nodes() {
        let x = d.coords(&mi);
        for xk in x.iter().take(n) {
            out.push_str(&fmt(*xk));
            out.push(',');
        }
        for a in 0..m {
            out.push_str(&fmt(field.value(flat, a)));
            if a + 1 < m {
                out.push(',');
            }
        }
        if let Some(t) = diag {
            for col in [
                &t.wedge2,
                &t.star_omega,
                &t.identity_lhs,
                &t.identity_rhs,
                &t.omega1,
                &t.omega2,
            ] {
                out.push(',');
                out.push_str(&fmt_opt(col[flat]));
            }
        }
        out.push('\n');
    }
    out
}

/// Reconstruct a field from a CSV dump: the grid is inferred from the
/// coordinate columns, which must enumerate a full uniform node lattice in
/// the dump order. Diagnostic columns are ignored.
pub fn parse_fields(text: &str) -> Result<VectorField, ConfigError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| ConfigError("empty fields CSV".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    let n = cols.iter().take_while(|c| c.starts_with('x')).count();
    let m = cols[n..].iter().take_while(|c| c.starts_with('f')).count();
    if !(2..=3).contains(&n) || !(1..=4).contains(&m) {
        return Err(ConfigError(format!(
            "fields CSV header must be x1..xn,f1..fm; got n = {n}, m = {m}"
        )));
    }
    for (k, c) in cols.iter().enumerate().take(n) {
        if *c != format!("x{}", k + 1) {
            return Err(ConfigError(format!("unexpected coordinate column {c}")));
        }
    }

    let mut coords: Vec<Vec<f64>> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < n + m {
            return Err(ConfigError(format!(
                "row {} has too few columns",
                lineno + 2
            )));
        }
        let mut x = Vec::with_capacity(n);
        for f in fields.iter().take(n) {
            x.push(parse_num(f, lineno)?);
        }
        coords.push(x);
        for f in fields.iter().skip(n).take(m) {
            let v = parse_num(f, lineno)?;
            if !v.is_finite() {
                return Err(ConfigError(format!(
                    "non-finite field value in row {}",
                    lineno + 2
                )));
            }
            values.push(v);
        }
    }

    // Unique sorted coordinates per axis define the lattice.
    let mut axes: Vec<Vec<f64>> = Vec::new();
    for k in 0..n {
        let mut xs: Vec<f64> = coords.iter().map(|c| c[k]).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        xs.dedup();
        if xs.len() < 5 {
            return Err(ConfigError(format!(
                "axis {k} has fewer than 5 distinct coordinates"
            )));
        }
        let h = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
        for (i, pair) in xs.windows(2).enumerate() {
            let step = pair[1] - pair[0];
            if (step - h).abs() > 1e-9 * h.abs().max(1e-30) {
                return Err(ConfigError(format!(
                    "axis {k} is not uniformly spaced near index {i}"
                )));
            }
        }
        axes.push(xs);
    }
    let res: Vec<usize> = axes.iter().map(|a| a.len()).collect();
    let lower: Vec<f64> = axes.iter().map(|a| a[0]).collect();
    let upper: Vec<f64> = axes.iter().map(|a| *a.last().unwrap()).collect();
    let domain =
        GridDomain::new(n, &lower, &upper, &res).map_err(|e| ConfigError(format!("{e}")))?;
    if coords.len() != domain.node_count() {
        return Err(ConfigError(format!(
            "expected {} rows for the inferred grid, found {}",
            domain.node_count(),
            coords.len()
        )));
    }
    // Rows must follow the canonical dump order.
    for (row, (_, mi)) in coords.iter().zip(domain.nodes()) {
        for k in 0..n {
            let expect = axes[k][mi[k]];
            if (row[k] - expect).abs() > 1e-12 * expect.abs().max(1.0) {
                return Err(ConfigError("rows are not in canonical node order".into()));
            }
        }
    }
    VectorField::from_values(domain, m, values).map_err(|e| ConfigError(format!("{e}")))
}

fn parse_num(s: &str, lineno: usize) -> Result<f64, ConfigError> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| ConfigError(format!("malformed number {s:?} in row {}", lineno + 2)))
}

/// Render a residual field: divergence-form and normal-projected components
/// per node (zero on boundary rows, where the system does not apply).
pub fn render_residual(residual: &minsurf::calculus::ResidualField) -> String {
    let d = residual.domain();
    let n = d.dim();
    let m = residual.m();
    let mut out = String::new();
    for k in 0..n {
        out.push_str(&format!("x{},", k + 1));
    }
    for a in 0..m {
        out.push_str(&format!("rdiv{},", a + 1));
    }
    for a in 0..m {
        out.push_str(&format!("rperp{}", a + 1));
        if a + 1 < m {
            out.push(',');
        }
    }
    out.push('\n');
    for (flat, mi) in d.nodes() {
        let x = d.coords(&mi);
        for xk in x.iter().take(n) {
            out.push_str(&fmt(*xk));
            out.push(',');
        }
        for a in 0..m {
            out.push_str(&fmt(residual.div(flat, a)));
            out.push(',');
        }
        for a in 0..m {
            out.push_str(&fmt(residual.perp(flat, a)));
            if a + 1 < m {
                out.push(',');
            }
        }
        out.push('\n');
    }
    out
}

/// Write atomically: temp file in the same directory, then rename.
pub fn write_atomic(path: &std::path::Path, contents: &str) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)
}
