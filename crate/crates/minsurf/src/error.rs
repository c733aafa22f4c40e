//! Error types shared across the crate.

use core::fmt;

/// Errors from pointwise linear-algebra operations.
#[derive(Clone, Debug, PartialEq)]
pub enum GeomError {
    /// Matrix dimensions outside the supported range (2 ≤ n ≤ 4, 1 ≤ m ≤ 4).
    DimensionOutOfRange { n: usize, m: usize },
    /// An operation requires specific dimensions (e.g. Grassmann forms need n = m = 2).
    DimensionMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    /// A matrix entry was NaN or infinite.
    NonFinite,
}

impl fmt::Display for GeomError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeomError::DimensionOutOfRange { n, m } => {
                write!(f, "jacobian dimensions out of range: n = {n}, m = {m} (need 2 <= n <= 4, 1 <= m <= 4)")
            }
            GeomError::DimensionMismatch { expected, got } => {
                write!(
                    f,
                    "dimension mismatch: need (n, m) = ({}, {}), got ({}, {})",
                    expected.0, expected.1, got.0, got.1
                )
            }
            GeomError::NonFinite => write!(f, "matrix entries must be finite"),
        }
    }
}

impl core::error::Error for GeomError {}

/// Errors from grid construction, sampling and finite differencing.
#[derive(Clone, Debug, PartialEq)]
pub enum GridError {
    /// Grid resolution below the required minimum of 5 nodes per axis.
    ResolutionTooCoarse { axis: usize, got: usize },
    /// Box corners are not strictly ordered.
    EmptyBox { axis: usize },
    /// Grid dimension outside {2, 3}.
    UnsupportedDimension { n: usize },
    /// Codimension outside 1..=4.
    UnsupportedCodimension { m: usize },
    /// Jets are defined at interior nodes only.
    BoundaryNode { node: usize },
    /// The grid has no nodes of the depth required by an operation.
    TooFewInteriorLayers { need: usize },
    /// Preset name not recognized.
    UnknownPreset,
    /// A preset was requested on dimensions it does not support.
    PresetDimensions { n: usize, m: usize },
    /// A field value was NaN or infinite.
    NonFinite { node: usize },
    /// Value buffer inconsistent with domain and codimension.
    ShapeMismatch { expected: usize, got: usize },
}

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridError::ResolutionTooCoarse { axis, got } => {
                write!(
                    f,
                    "resolution too coarse on axis {axis}: {got} nodes (need >= 5)"
                )
            }
            GridError::EmptyBox { axis } => {
                write!(f, "box has empty extent on axis {axis}")
            }
            GridError::UnsupportedDimension { n } => {
                write!(f, "grid dimension {n} unsupported (need 2 or 3)")
            }
            GridError::UnsupportedCodimension { m } => {
                write!(f, "codimension {m} unsupported (need 1..=4)")
            }
            GridError::BoundaryNode { node } => {
                write!(
                    f,
                    "node {node} is on the boundary; jets exist at interior nodes only"
                )
            }
            GridError::TooFewInteriorLayers { need } => {
                write!(f, "grid too coarse: operation needs {need} interior layers")
            }
            GridError::UnknownPreset => write!(f, "unknown preset name"),
            GridError::PresetDimensions { n, m } => {
                write!(f, "preset does not support n = {n}, m = {m}")
            }
            GridError::NonFinite { node } => {
                write!(f, "non-finite field value at node {node}")
            }
            GridError::ShapeMismatch { expected, got } => {
                write!(
                    f,
                    "value buffer has {got} entries, domain expects {expected}"
                )
            }
        }
    }
}

impl core::error::Error for GridError {}

/// Errors from the Dirichlet-problem solvers.
#[derive(Clone, Debug, PartialEq)]
pub enum SolveError {
    /// Initial field does not match the prescribed boundary data.
    BoundaryMismatch { node: usize },
    /// A configuration value is out of its admissible range.
    BadConfig(&'static str),
    /// The flow or an accepted step produced a non-finite value.
    Diverged { node: usize },
    /// Backtracking failed to decrease the residual after the allowed halvings.
    LineSearchStagnation { iteration: usize },
    /// The inner linear solver did not reach its tolerance; the linearization
    /// may be near-singular. Boundary-data continuation usually helps.
    LinearSolveFailed { iteration: usize },
    /// Wrapped grid error (bad domain, shape mismatch, ...).
    Grid(GridError),
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::BoundaryMismatch { node } => {
                write!(
                    f,
                    "initial field disagrees with boundary data at node {node}"
                )
            }
            SolveError::BadConfig(what) => write!(f, "invalid solver configuration: {what}"),
            SolveError::Diverged { node } => {
                write!(f, "solver diverged: non-finite value at node {node}")
            }
            SolveError::LineSearchStagnation { iteration } => {
                write!(f, "line search stagnated at iteration {iteration}")
            }
            SolveError::LinearSolveFailed { iteration } => {
                write!(
                    f,
                    "linear solve failed at iteration {iteration} (near-singular linearization; try boundary continuation)"
                )
            }
            SolveError::Grid(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SolveError {}

impl From<GridError> for SolveError {
    fn from(e: GridError) -> Self {
        SolveError::Grid(e)
    }
}

/// Errors from the diagnostic audits.
#[derive(Clone, Debug, PartialEq)]
pub enum AuditError {
    /// The audit is defined only for specific dimensions.
    DimensionMismatch {
        need: (usize, usize),
        got: (usize, usize),
    },
    /// Gradient-bound audit requires every component nonnegative.
    NegativeComponent { node: usize, component: usize },
    /// Wrapped grid error.
    Grid(GridError),
}

impl fmt::Display for AuditError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AuditError::DimensionMismatch { need, got } => {
                write!(
                    f,
                    "audit needs (n, m) = ({}, {}), got ({}, {})",
                    need.0, need.1, got.0, got.1
                )
            }
            AuditError::NegativeComponent { node, component } => {
                write!(
                    f,
                    "gradient-bound audit requires f >= 0 componentwise; f^{component} < 0 at node {node}"
                )
            }
            AuditError::Grid(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for AuditError {}

impl From<GridError> for AuditError {
    fn from(e: GridError) -> Self {
        AuditError::Grid(e)
    }
}
