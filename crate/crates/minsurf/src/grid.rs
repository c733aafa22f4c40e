//! Rectangular-grid fields and finite-difference jets.
//!
//! Domains are axis-aligned boxes sampled on uniform node grids. Nodes are
//! ordered lexicographically with the first axis fastest; every reduction in
//! the crate runs in this fixed order so results are reproducible bit for
//! bit. Boundary nodes carry Dirichlet data only — jets (first and second
//! derivatives) exist at interior nodes, from second-order central stencils.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::GridError;
use crate::pointwise::Jacobian;

#[allow(unused_imports)]
use num_traits::Float;

/// Maximum grid dimension.
pub const MAX_GRID_DIM: usize = 3;

/// An axis-aligned box in R^n (n = 2 or 3) with a uniform node grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridDomain {
    n: usize,
    lower: [f64; MAX_GRID_DIM],
    upper: [f64; MAX_GRID_DIM],
    res: [usize; MAX_GRID_DIM],
    spacing: [f64; MAX_GRID_DIM],
}

impl GridDomain {
    pub fn new(n: usize, lower: &[f64], upper: &[f64], res: &[usize]) -> Result<Self, GridError> {
        if !(2..=MAX_GRID_DIM).contains(&n) {
            return Err(GridError::UnsupportedDimension { n });
        }
        let mut d = GridDomain {
            n,
            lower: [0.0; MAX_GRID_DIM],
            upper: [0.0; MAX_GRID_DIM],
            res: [1; MAX_GRID_DIM],
            spacing: [1.0; MAX_GRID_DIM],
        };
        for k in 0..n {
            if res[k] < 5 {
                return Err(GridError::ResolutionTooCoarse {
                    axis: k,
                    got: res[k],
                });
            }
            if !(upper[k] > lower[k]) || !lower[k].is_finite() || !upper[k].is_finite() {
                return Err(GridError::EmptyBox { axis: k });
            }
            d.lower[k] = lower[k];
            d.upper[k] = upper[k];
            d.res[k] = res[k];
            d.spacing[k] = (upper[k] - lower[k]) / (res[k] - 1) as f64;
        }
        Ok(d)
    }

    /// Cube [lo, hi]^n with the same resolution on every axis.
    pub fn cube(n: usize, lo: f64, hi: f64, res: usize) -> Result<Self, GridError> {
        if !(2..=MAX_GRID_DIM).contains(&n) {
            return Err(GridError::UnsupportedDimension { n });
        }
        GridDomain::new(
            n,
            &[lo; MAX_GRID_DIM][..n],
            &[hi; MAX_GRID_DIM][..n],
            &[res; MAX_GRID_DIM][..n],
        )
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn resolution(&self, axis: usize) -> usize {
        self.res[axis]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.spacing[axis]
    }

    pub fn lower(&self, axis: usize) -> f64 {
        self.lower[axis]
    }

    pub fn upper(&self, axis: usize) -> f64 {
        self.upper[axis]
    }

    pub fn max_spacing(&self) -> f64 {
        let mut h = 0.0f64;
        for k in 0..self.n {
            h = h.max(self.spacing[k]);
        }
        h
    }

    pub fn min_spacing(&self) -> f64 {
        let mut h = f64::INFINITY;
        for k in 0..self.n {
            h = h.min(self.spacing[k]);
        }
        h
    }

    /// Volume of one grid cell, the product of the axis spacings.
    pub fn cell_volume(&self) -> f64 {
        let mut v = 1.0;
        for k in 0..self.n {
            v *= self.spacing[k];
        }
        v
    }

    pub fn node_count(&self) -> usize {
        let mut c = 1;
        for k in 0..self.n {
            c *= self.res[k];
        }
        c
    }

    pub fn interior_count(&self) -> usize {
        let mut c = 1;
        for k in 0..self.n {
            c *= self.res[k] - 2;
        }
        c
    }

    /// Stride of one step along `axis` in flat node order.
    pub fn stride(&self, axis: usize) -> usize {
        let mut s = 1;
        for k in 0..axis {
            s *= self.res[k];
        }
        s
    }

    pub fn multi_index(&self, flat: usize) -> [usize; MAX_GRID_DIM] {
        let mut mi = [0usize; MAX_GRID_DIM];
        let mut rest = flat;
        for k in 0..self.n {
            mi[k] = rest % self.res[k];
            rest /= self.res[k];
        }
        mi
    }

    pub fn flat_index(&self, mi: &[usize; MAX_GRID_DIM]) -> usize {
        let mut flat = 0;
        for k in (0..self.n).rev() {
            flat = flat * self.res[k] + mi[k];
        }
        flat
    }

    pub fn coords(&self, mi: &[usize; MAX_GRID_DIM]) -> [f64; MAX_GRID_DIM] {
        let mut x = [0.0; MAX_GRID_DIM];
        for k in 0..self.n {
            x[k] = self.lower[k] + mi[k] as f64 * self.spacing[k];
        }
        x
    }

    /// Number of node layers between `mi` and the nearest boundary face;
    /// boundary nodes have depth 0.
    pub fn depth(&self, mi: &[usize; MAX_GRID_DIM]) -> usize {
        let mut d = usize::MAX;
        for k in 0..self.n {
            d = d.min(mi[k]).min(self.res[k] - 1 - mi[k]);
        }
        d
    }

    pub fn is_interior(&self, mi: &[usize; MAX_GRID_DIM]) -> bool {
        self.depth(mi) >= 1
    }

    /// Flat indices paired with multi-indices, lexicographic (axis 0 fastest).
    pub fn nodes(&self) -> impl Iterator<Item = (usize, [usize; MAX_GRID_DIM])> + '_ {
        (0..self.node_count()).map(move |f| (f, self.multi_index(f)))
    }

    pub fn interior_nodes(&self) -> impl Iterator<Item = (usize, [usize; MAX_GRID_DIM])> + '_ {
        self.nodes().filter(move |(_, mi)| self.is_interior(mi))
    }

    pub fn boundary_nodes(&self) -> impl Iterator<Item = (usize, [usize; MAX_GRID_DIM])> + '_ {
        self.nodes().filter(move |(_, mi)| !self.is_interior(mi))
    }

    /// Nodes of depth at least `depth`.
    pub fn nodes_of_depth(
        &self,
        depth: usize,
    ) -> impl Iterator<Item = (usize, [usize; MAX_GRID_DIM])> + '_ {
        self.nodes().filter(move |(_, mi)| self.depth(mi) >= depth)
    }

    /// Position of an interior node in the lexicographic interior enumeration.
    pub fn interior_ordinal(&self, mi: &[usize; MAX_GRID_DIM]) -> usize {
        debug_assert!(self.is_interior(mi));
        let mut ord = 0;
        for k in (0..self.n).rev() {
            ord = ord * (self.res[k] - 2) + (mi[k] - 1);
        }
        ord
    }

    pub fn boundary_count(&self) -> usize {
        self.node_count() - self.interior_count()
    }

    /// Cells (lower-corner multi-indices), lexicographic.
    pub fn cells(&self) -> impl Iterator<Item = [usize; MAX_GRID_DIM]> + '_ {
        let mut count = 1;
        for k in 0..self.n {
            count *= self.res[k] - 1;
        }
        (0..count).map(move |f| {
            let mut mi = [0usize; MAX_GRID_DIM];
            let mut rest = f;
            for k in 0..self.n {
                mi[k] = rest % (self.res[k] - 1);
                rest /= self.res[k] - 1;
            }
            mi
        })
    }

    /// Distance from a point to the boundary of the box.
    pub fn distance_to_boundary(&self, x: &[f64]) -> f64 {
        let mut d = f64::INFINITY;
        for k in 0..self.n {
            d = d.min(x[k] - self.lower[k]).min(self.upper[k] - x[k]);
        }
        d.max(0.0)
    }
}

/// First and second derivatives of a field at one node.
#[derive(Clone, Copy, Debug)]
pub struct JetSample {
    pub value: [f64; 4],
    pub first: Jacobian,
    second: [[[f64; MAX_GRID_DIM]; MAX_GRID_DIM]; 4],
}

impl JetSample {
    /// `∂²f^alpha/∂x^i∂x^j`; symmetric in (i, j) by stencil construction.
    pub fn second(&self, alpha: usize, i: usize, j: usize) -> f64 {
        self.second[alpha][i][j]
    }
}

/// A grid-sampled map `f : D → R^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    domain: GridDomain,
    m: usize,
    values: Vec<f64>, // values[node * m + alpha]
}

impl VectorField {
    pub fn zero(domain: GridDomain, m: usize) -> Result<Self, GridError> {
        if !(1..=4).contains(&m) {
            return Err(GridError::UnsupportedCodimension { m });
        }
        let len = domain.node_count() * m;
        Ok(VectorField {
            domain,
            m,
            values: vec![0.0; len],
        })
    }

    /// Sample a closed-form map; `f(x, out)` writes the m components.
    pub fn from_fn(
        domain: GridDomain,
        m: usize,
        mut f: impl FnMut(&[f64], &mut [f64]),
    ) -> Result<Self, GridError> {
        let mut field = VectorField::zero(domain, m)?;
        let mut out = [0.0f64; 4];
        for (flat, mi) in field.domain.nodes() {
            let x = field.domain.coords(&mi);
            f(&x[..field.domain.dim()], &mut out[..m]);
            for a in 0..m {
                field.values[flat * m + a] = out[a];
            }
        }
        field.check_finite()?;
        Ok(field)
    }

    pub fn from_values(domain: GridDomain, m: usize, values: Vec<f64>) -> Result<Self, GridError> {
        if !(1..=4).contains(&m) {
            return Err(GridError::UnsupportedCodimension { m });
        }
        let expected = domain.node_count() * m;
        if values.len() != expected {
            return Err(GridError::ShapeMismatch {
                expected,
                got: values.len(),
            });
        }
        let field = VectorField { domain, m, values };
        field.check_finite()?;
        Ok(field)
    }

    pub fn check_finite(&self) -> Result<(), GridError> {
        for (node, chunk) in self.values.chunks(self.m).enumerate() {
            if chunk.iter().any(|v| !v.is_finite()) {
                return Err(GridError::NonFinite { node });
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, flat: usize, alpha: usize) -> f64 {
        self.values[flat * self.m + alpha]
    }

    pub fn set_value(&mut self, flat: usize, alpha: usize, v: f64) {
        self.values[flat * self.m + alpha] = v;
    }

    pub fn sup_distance(&self, other: &VectorField) -> f64 {
        let mut d = 0.0f64;
        for (a, b) in self.values.iter().zip(&other.values) {
            d = d.max((a - b).abs());
        }
        d
    }

    /// Scale all values by `s` (boundary included).
    pub fn scaled(&self, s: f64) -> VectorField {
        let mut out = self.clone();
        for v in out.values.iter_mut() {
            *v *= s;
        }
        out
    }

    /// Central-difference jet at an interior node.
    ///
    /// First derivatives use the symmetric two-point stencil, pure second
    /// derivatives the three-point stencil, mixed ones the four-point cross;
    /// all are exact on polynomials of degree two up to rounding.
    pub fn jet(&self, flat: usize) -> Result<JetSample, GridError> {
        let d = &self.domain;
        let mi = d.multi_index(flat);
        if !d.is_interior(&mi) {
            return Err(GridError::BoundaryNode { node: flat });
        }
        let n = d.dim();
        let m = self.m;
        let mut value = [0.0f64; 4];
        for (a, v) in value.iter_mut().enumerate().take(m) {
            *v = self.value(flat, a);
        }
        let mut first = [0.0f64; 16];
        let mut second = [[[0.0f64; MAX_GRID_DIM]; MAX_GRID_DIM]; 4];
        for i in 0..n {
            let s = d.stride(i);
            let h = d.spacing(i);
            for a in 0..m {
                let plus = self.value(flat + s, a);
                let minus = self.value(flat - s, a);
                let center = self.value(flat, a);
                first[a * n + i] = (plus - minus) / (2.0 * h);
                second[a][i][i] = (plus - 2.0 * center + minus) / (h * h);
            }
            for j in i + 1..n {
                let t = d.stride(j);
                let hj = d.spacing(j);
                for a in 0..m {
                    let pp = self.value(flat + s + t, a);
                    let pm = self.value(flat + s - t, a);
                    let mp = self.value(flat - s + t, a);
                    let mm = self.value(flat - s - t, a);
                    let v = (pp - pm - mp + mm) / (4.0 * h * hj);
                    second[a][i][j] = v;
                    second[a][j][i] = v;
                }
            }
        }
        let first = Jacobian::from_rows(n, m, &first[..n * m]).expect("finite field jet");
        Ok(JetSample {
            value,
            first,
            second,
        })
    }

    pub fn boundary_trace(&self) -> BoundaryData {
        let mut values = Vec::with_capacity(self.domain.boundary_count() * self.m);
        for (flat, _) in self.domain.boundary_nodes() {
            for a in 0..self.m {
                values.push(self.value(flat, a));
            }
        }
        BoundaryData {
            domain: self.domain.clone(),
            m: self.m,
            values,
        }
    }

    /// Copy of the field with its boundary nodes replaced by `bd`.
    pub fn with_boundary(&self, bd: &BoundaryData) -> Result<VectorField, GridError> {
        if bd.domain != self.domain || bd.m != self.m {
            return Err(GridError::ShapeMismatch {
                expected: self.domain.boundary_count() * self.m,
                got: bd.values.len(),
            });
        }
        let mut out = self.clone();
        for (ord, (flat, _)) in self.domain.boundary_nodes().enumerate() {
            for a in 0..self.m {
                out.values[flat * self.m + a] = bd.values[ord * self.m + a];
            }
        }
        Ok(out)
    }

    /// Flat index of the first boundary node whose values differ from `bd`,
    /// if any (exact comparison).
    pub fn boundary_mismatch(&self, bd: &BoundaryData) -> Option<usize> {
        if bd.domain != self.domain || bd.m != self.m {
            return Some(0);
        }
        for (ord, (flat, _)) in self.domain.boundary_nodes().enumerate() {
            for a in 0..self.m {
                if self.value(flat, a) != bd.values[ord * self.m + a] {
                    return Some(flat);
                }
            }
        }
        None
    }
}

/// Dirichlet data: the map's values on every boundary node.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryData {
    domain: GridDomain,
    m: usize,
    values: Vec<f64>, // values[ordinal * m + alpha], boundary nodes in flat order
}

impl BoundaryData {
    pub fn zero(domain: GridDomain, m: usize) -> Result<Self, GridError> {
        if !(1..=4).contains(&m) {
            return Err(GridError::UnsupportedCodimension { m });
        }
        let len = domain.boundary_count() * m;
        Ok(BoundaryData {
            domain,
            m,
            values: vec![0.0; len],
        })
    }

    pub fn from_fn(
        domain: GridDomain,
        m: usize,
        mut f: impl FnMut(&[f64], &mut [f64]),
    ) -> Result<Self, GridError> {
        let mut bd = BoundaryData::zero(domain, m)?;
        let mut out = [0.0f64; 4];
        let nodes: Vec<[usize; MAX_GRID_DIM]> =
            bd.domain.boundary_nodes().map(|(_, mi)| mi).collect();
        for (ord, mi) in nodes.iter().enumerate() {
            let x = bd.domain.coords(mi);
            f(&x[..bd.domain.dim()], &mut out[..m]);
            for a in 0..m {
                let v = out[a];
                if !v.is_finite() {
                    return Err(GridError::NonFinite {
                        node: bd.domain.flat_index(mi),
                    });
                }
                bd.values[ord * m + a] = v;
            }
        }
        Ok(bd)
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn scaled(&self, s: f64) -> BoundaryData {
        let mut out = self.clone();
        for v in out.values.iter_mut() {
            *v *= s;
        }
        out
    }

    pub fn value(&self, ordinal: usize, alpha: usize) -> f64 {
        self.values[ordinal * self.m + alpha]
    }
}
