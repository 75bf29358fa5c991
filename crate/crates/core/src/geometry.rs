//! Rectilinear 2D domains with rectangular holes and their staggered-grid
//! cell complex.
//!
//! Index conventions (all row-major, `j` is the slow index):
//!
//! * vertex `(i, j)`, `0 <= i <= nx`, `0 <= j <= ny`: `j * (nx + 1) + i`
//! * x-edge `(i, j)` from vertex `(i, j)` to `(i + 1, j)`: `j * nx + i`
//! * y-edge `(i, j)` from vertex `(i, j)` to `(i, j + 1)`: `nx * (ny + 1) + j * (nx + 1) + i`
//! * face `(i, j)` with lower-left vertex `(i, j)`: `j * nx + i`
//!
//! A perfect conductor bounds the domain: edges lying on the interface
//! between an inside cell and an outside cell (or the bounding box) carry a
//! zero tangential field and vertices touching such an interface carry a zero
//! potential. Both are removed from the degree-of-freedom tables.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ALIGN_TOL: f64 = 1e-9;

/// Axis-aligned rectangular hole, in physical length units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Hole {
    pub x0: f64,
    pub y0: f64,
    pub width: f64,
    pub height: f64,
}

impl From<[f64; 4]> for Hole {
    fn from(a: [f64; 4]) -> Self {
        Hole {
            x0: a[0],
            y0: a[1],
            width: a[2],
            height: a[3],
        }
    }
}

impl From<Hole> for [f64; 4] {
    fn from(h: Hole) -> Self {
        [h.x0, h.y0, h.width, h.height]
    }
}

/// Domain description as read from JSON:
/// `{"width": w, "height": h, "spacing": s, "holes": [[x0, y0, w, h], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub width: f64,
    pub height: f64,
    pub spacing: f64,
    #[serde(default)]
    pub holes: Vec<Hole>,
}

/// Hole rectangle in cell units, half-open `[i0, i1) x [j0, j1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct CellRect {
    i0: usize,
    j0: usize,
    i1: usize,
    j1: usize,
}

fn cells(len: f64, h: f64) -> Option<usize> {
    let r = len / h;
    let n = r.round();
    if !r.is_finite() || (r - n).abs() > ALIGN_TOL * n.abs().max(1.0) || n < 0.0 {
        None
    } else {
        Some(n as usize)
    }
}

impl DomainSpec {
    pub fn new(width: f64, height: f64, spacing: f64, holes: Vec<Hole>) -> Self {
        DomainSpec {
            width,
            height,
            spacing,
            holes,
        }
    }

    /// Square `[0, side]^2` without holes.
    pub fn square(side: f64, spacing: f64) -> Self {
        Self::new(side, side, spacing, Vec::new())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Same domain with the spacing halved.
    pub fn refined(&self) -> Self {
        DomainSpec {
            spacing: self.spacing / 2.0,
            ..self.clone()
        }
    }

    fn validate(&self) -> Result<(usize, usize, Vec<CellRect>)> {
        let h = self.spacing;
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidDomain(format!("spacing must be positive, got {h}")));
        }
        if !(self.width > 0.0) || !(self.height > 0.0) {
            return Err(Error::InvalidDomain("width and height must be positive".into()));
        }
        let nx = cells(self.width, h)
            .filter(|&n| n >= 1)
            .ok_or_else(|| Error::InvalidDomain("width is not an integer multiple of spacing".into()))?;
        let ny = cells(self.height, h)
            .filter(|&n| n >= 1)
            .ok_or_else(|| Error::InvalidDomain("height is not an integer multiple of spacing".into()))?;

        let mut rects = Vec::with_capacity(self.holes.len());
        for (index, hole) in self.holes.iter().enumerate() {
            let aligned = |v: f64| if v < 0.0 { None } else { cells(v, h) };
            let (Some(i0), Some(j0), Some(w), Some(hh)) = (
                aligned(hole.x0),
                aligned(hole.y0),
                aligned(hole.width),
                aligned(hole.height),
            ) else {
                return Err(Error::NonAlignedHole { index });
            };
            if w == 0 || hh == 0 {
                return Err(Error::NonAlignedHole { index });
            }
            let r = CellRect {
                i0,
                j0,
                i1: i0 + w,
                j1: j0 + hh,
            };
            if r.i0 < 1 || r.j0 < 1 || r.i1 + 1 > nx || r.j1 + 1 > ny {
                return Err(Error::HoleTouchesBoundary { index });
            }
            rects.push(r);
        }
        for a in 0..rects.len() {
            for b in a + 1..rects.len() {
                let (p, q) = (rects[a], rects[b]);
                let apart_x = p.i1 < q.i0 || q.i1 < p.i0;
                let apart_y = p.j1 < q.j0 || q.j1 < p.j0;
                if !(apart_x || apart_y) {
                    return Err(Error::HolesTooClose { first: a, second: b });
                }
            }
        }
        Ok((nx, ny, rects))
    }
}

/// Opaque identity of a grid, used to reject mixing fields from different grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridId(u64);

/// Staggered-grid cell complex of a [`DomainSpec`] with DOF tables.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    spec: DomainSpec,
    nx: usize,
    ny: usize,
    h: f64,
    holes: Vec<CellRect>,
    inside: Vec<bool>,
    dof_vertices: Vec<usize>,
    dof_edges: Vec<usize>,
    inside_faces: Vec<usize>,
    vertex_dof: Vec<Option<usize>>,
    edge_dof: Vec<Option<usize>>,
    face_dof: Vec<Option<usize>>,
    dof_x_edges: usize,
    id: GridId,
}

/// Which family an edge belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    X,
    Y,
}

pub fn build_grid(spec: &DomainSpec) -> Result<Grid> {
    Grid::new(spec)
}

impl Grid {
    pub fn new(spec: &DomainSpec) -> Result<Self> {
        let (nx, ny, holes) = spec.validate()?;
        let h = spec.width / nx as f64;

        let mut inside = vec![true; nx * ny];
        for r in &holes {
            for j in r.j0..r.j1 {
                for i in r.i0..r.i1 {
                    inside[j * nx + i] = false;
                }
            }
        }
        let face_in = |i: isize, j: isize| -> bool {
            i >= 0 && j >= 0 && (i as usize) < nx && (j as usize) < ny && inside[j as usize * nx + i as usize]
        };

        let nv = (nx + 1) * (ny + 1);
        let mut vertex_dof = vec![None; nv];
        let mut dof_vertices = Vec::new();
        for j in 0..=ny {
            for i in 0..=nx {
                let (ii, jj) = (i as isize, j as isize);
                if face_in(ii - 1, jj - 1) && face_in(ii, jj - 1) && face_in(ii - 1, jj) && face_in(ii, jj) {
                    let v = j * (nx + 1) + i;
                    vertex_dof[v] = Some(dof_vertices.len());
                    dof_vertices.push(v);
                }
            }
        }

        let ne = nx * (ny + 1) + (nx + 1) * ny;
        let mut edge_dof = vec![None; ne];
        let mut dof_edges = Vec::new();
        for j in 0..=ny {
            for i in 0..nx {
                let (ii, jj) = (i as isize, j as isize);
                if face_in(ii, jj - 1) && face_in(ii, jj) {
                    let e = j * nx + i;
                    edge_dof[e] = Some(dof_edges.len());
                    dof_edges.push(e);
                }
            }
        }
        let dof_x_edges = dof_edges.len();
        for j in 0..ny {
            for i in 0..=nx {
                let (ii, jj) = (i as isize, j as isize);
                if face_in(ii - 1, jj) && face_in(ii, jj) {
                    let e = nx * (ny + 1) + j * (nx + 1) + i;
                    edge_dof[e] = Some(dof_edges.len());
                    dof_edges.push(e);
                }
            }
        }

        let mut face_dof = vec![None; nx * ny];
        let mut inside_faces = Vec::new();
        for (f, &is_in) in inside.iter().enumerate() {
            if is_in {
                face_dof[f] = Some(inside_faces.len());
                inside_faces.push(f);
            }
        }

        let mut hasher = DefaultHasher::new();
        nx.hash(&mut hasher);
        ny.hash(&mut hasher);
        h.to_bits().hash(&mut hasher);
        inside.hash(&mut hasher);
        let id = GridId(hasher.finish());

        Ok(Grid {
            spec: spec.clone(),
            nx,
            ny,
            h,
            holes,
            inside,
            dof_vertices,
            dof_edges,
            inside_faces,
            vertex_dof,
            edge_dof,
            face_dof,
            dof_x_edges,
            id,
        })
    }

    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }
    pub fn id(&self) -> GridId {
        self.id
    }
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    /// Grid spacing.
    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn hole_count(&self) -> usize {
        self.holes.len()
    }

    /// Total vertex count of the bounding grid.
    pub fn n_vertices(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }
    pub fn n_x_edges(&self) -> usize {
        self.nx * (self.ny + 1)
    }
    pub fn n_edges(&self) -> usize {
        self.n_x_edges() + (self.nx + 1) * self.ny
    }
    pub fn n_faces(&self) -> usize {
        self.nx * self.ny
    }

    /// Inside/outside mask over faces (cells), row-major.
    pub fn cells(&self) -> &[bool] {
        &self.inside
    }
    pub fn is_inside_face(&self, i: usize, j: usize) -> bool {
        i < self.nx && j < self.ny && self.inside[j * self.nx + i]
    }

    pub fn dof_vertices(&self) -> &[usize] {
        &self.dof_vertices
    }
    pub fn dof_edges(&self) -> &[usize] {
        &self.dof_edges
    }
    pub fn inside_faces(&self) -> &[usize] {
        &self.inside_faces
    }
    /// Number of x-edge DOFs; they precede all y-edge DOFs.
    pub fn dof_x_edge_count(&self) -> usize {
        self.dof_x_edges
    }

    pub fn vertex_dof(&self, v: usize) -> Option<usize> {
        self.vertex_dof[v]
    }
    pub fn edge_dof(&self, e: usize) -> Option<usize> {
        self.edge_dof[e]
    }
    pub fn face_dof(&self, f: usize) -> Option<usize> {
        self.face_dof[f]
    }

    pub fn vertex_index(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }
    pub fn x_edge_index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }
    pub fn y_edge_index(&self, i: usize, j: usize) -> usize {
        self.n_x_edges() + j * (self.nx + 1) + i
    }
    pub fn face_index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// `(kind, i, j)` of a global edge index.
    pub fn edge_coords(&self, e: usize) -> (EdgeKind, usize, usize) {
        let nxe = self.n_x_edges();
        if e < nxe {
            (EdgeKind::X, e % self.nx, e / self.nx)
        } else {
            let r = e - nxe;
            (EdgeKind::Y, r % (self.nx + 1), r / (self.nx + 1))
        }
    }

    /// Global vertex indices `(tail, head)` of an edge; x-edges point +x,
    /// y-edges point +y.
    pub fn edge_vertices(&self, e: usize) -> (usize, usize) {
        match self.edge_coords(e) {
            (EdgeKind::X, i, j) => (self.vertex_index(i, j), self.vertex_index(i + 1, j)),
            (EdgeKind::Y, i, j) => (self.vertex_index(i, j), self.vertex_index(i, j + 1)),
        }
    }

    /// Midpoint of a global edge.
    pub fn edge_midpoint(&self, e: usize) -> [f64; 2] {
        let h = self.h;
        match self.edge_coords(e) {
            (EdgeKind::X, i, j) => [(i as f64 + 0.5) * h, j as f64 * h],
            (EdgeKind::Y, i, j) => [i as f64 * h, (j as f64 + 0.5) * h],
        }
    }

    pub fn vertex_position(&self, v: usize) -> [f64; 2] {
        let i = v % (self.nx + 1);
        let j = v / (self.nx + 1);
        [i as f64 * self.h, j as f64 * self.h]
    }

    /// Edges `[bottom, right, top, left]` of a face; the circulation signs
    /// for counter-clockwise traversal are `[+, +, -, -]`.
    pub fn face_edges(&self, f: usize) -> [usize; 4] {
        let i = f % self.nx;
        let j = f / self.nx;
        [
            self.x_edge_index(i, j),
            self.y_edge_index(i + 1, j),
            self.x_edge_index(i, j + 1),
            self.y_edge_index(i, j),
        ]
    }

    fn vertex_in_complex(&self, i: usize, j: usize) -> bool {
        let (i, j) = (i as isize, j as isize);
        [(i - 1, j - 1), (i, j - 1), (i - 1, j), (i, j)]
            .iter()
            .any(|&(a, b)| a >= 0 && b >= 0 && self.is_inside_face(a as usize, b as usize))
    }

    fn edge_in_complex(&self, e: usize) -> bool {
        match self.edge_coords(e) {
            (EdgeKind::X, i, j) => self.is_inside_face(i, j) || (j > 0 && self.is_inside_face(i, j - 1)),
            (EdgeKind::Y, i, j) => self.is_inside_face(i, j) || (i > 0 && self.is_inside_face(i - 1, j)),
        }
    }

    /// `V - E + F` of the closed complex formed by the inside cells.
    pub fn euler_characteristic(&self) -> i64 {
        let mut v = 0i64;
        for j in 0..=self.ny {
            for i in 0..=self.nx {
                if self.vertex_in_complex(i, j) {
                    v += 1;
                }
            }
        }
        let e = (0..self.n_edges()).filter(|&e| self.edge_in_complex(e)).count() as i64;
        let f = self.inside_faces.len() as i64;
        v - e + f
    }

    /// Number of connected components of the conducting boundary.
    pub fn boundary_components(&self) -> usize {
        let nv = self.n_vertices();
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in 0..self.n_edges() {
            if self.edge_in_complex(e) && self.edge_dof[e].is_none() {
                let (a, b) = self.edge_vertices(e);
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
        let mut roots = Vec::new();
        for j in 0..=self.ny {
            for i in 0..=self.nx {
                let v = self.vertex_index(i, j);
                if self.vertex_in_complex(i, j) && self.vertex_dof[v].is_none() {
                    let r = find(&mut parent, v);
                    if !roots.contains(&r) {
                        roots.push(r);
                    }
                }
            }
        }
        roots.len()
    }

    /// Whether `p` lies in the open domain (inside the box and outside every hole).
    pub fn contains(&self, p: [f64; 2]) -> bool {
        let h = self.h;
        let in_box = p[0] > 0.0 && p[1] > 0.0 && p[0] < self.nx as f64 * h && p[1] < self.ny as f64 * h;
        in_box
            && self.holes.iter().all(|r| {
                !(p[0] >= r.i0 as f64 * h
                    && p[0] <= r.i1 as f64 * h
                    && p[1] >= r.j0 as f64 * h
                    && p[1] <= r.j1 as f64 * h)
            })
    }

    /// Euclidean distance from an interior point to the nearest conductor.
    pub fn distance_to_boundary(&self, p: [f64; 2]) -> f64 {
        let h = self.h;
        let (w, ht) = (self.nx as f64 * h, self.ny as f64 * h);
        let mut d = p[0].min(w - p[0]).min(p[1]).min(ht - p[1]);
        for r in &self.holes {
            let dx = (r.i0 as f64 * h - p[0]).max(0.0).max(p[0] - r.i1 as f64 * h);
            let dy = (r.j0 as f64 * h - p[1]).max(0.0).max(p[1] - r.j1 as f64 * h);
            d = d.min(dx.hypot(dy));
        }
        d
    }

    /// Nearest interior x-edge and y-edge to `p`, as DOF indices. Ties go to
    /// the lower index.
    pub fn locate(&self, p: [f64; 2]) -> Result<EdgePair> {
        let placement = |reason: &str| Error::Placement {
            x: p[0],
            y: p[1],
            reason: reason.to_string(),
        };
        if !p[0].is_finite() || !p[1].is_finite() || !self.contains(p) {
            return Err(placement("point lies outside the domain"));
        }
        let dist = self.distance_to_boundary(p);
        if dist <= 2.0 * self.h {
            return Err(placement(&format!(
                "point is {:.3} grid spacings from the boundary, need more than 2",
                dist / self.h
            )));
        }
        let (u, w) = (p[0] / self.h, p[1] / self.h);
        // x-edge midpoints sit at (i + 1/2, j); y-edge midpoints at (i, j + 1/2).
        let xi = (u.ceil() as usize).saturating_sub(1).min(self.nx - 1);
        let xj = ((w - 0.5).ceil().max(0.0) as usize).min(self.ny);
        let yi = ((u - 0.5).ceil().max(0.0) as usize).min(self.nx);
        let yj = (w.ceil() as usize).saturating_sub(1).min(self.ny - 1);
        let xe = self.x_edge_index(xi, xj);
        let ye = self.y_edge_index(yi, yj);
        match (self.edge_dof[xe], self.edge_dof[ye]) {
            (Some(x_dof), Some(y_dof)) => Ok(EdgePair {
                x_edge: xe,
                y_edge: ye,
                x_dof,
                y_dof,
            }),
            _ => Err(placement("nearest edges are not interior")),
        }
    }
}

/// Result of [`Grid::locate`]: global edge indices plus their DOF slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgePair {
    pub x_edge: usize,
    pub y_edge: usize,
    pub x_dof: usize,
    pub y_dof: usize,
}
