use std::collections::HashMap;

use super::{simplex_superlevel_fraction, BoundaryFace, FeSpace, QuadPoint};
use crate::error::{Error, Result};
use crate::quadrature::SimplexRule;
use crate::scalar::{dot, norm, Real, Vec3};

/// Triangles (`N = 2`) or tetrahedra (`N = 3`) with P1 elements.
///
/// Cells touching the origin are reordered so that the origin is local vertex 0,
/// where the collapsed quadrature concentrates its points; no quadrature point
/// ever sits on the origin.
#[derive(Debug, Clone)]
pub struct SimplexMesh<T> {
    dim: usize,
    points: Vec<Vec3<T>>,
    cells: Vec<usize>,
    dirichlet: Vec<bool>,
    grads: Vec<[Vec3<T>; 4]>,
    volumes: Vec<T>,
    rule_of_cell: Vec<u8>,
    rules: [SimplexRule<T>; 3],
    size: T,
}

impl<T: Real> SimplexMesh<T> {
    /// Builds a mesh from points (first `dim` coordinates used), flat cell
    /// connectivity (`dim + 1` nodes per cell) and Dirichlet markers.
    pub fn new(dim: usize, points: Vec<Vec3<T>>, mut cells: Vec<usize>, dirichlet: Vec<bool>) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidMesh(format!("dimension {dim} is not 2 or 3")));
        }
        let per = dim + 1;
        if cells.is_empty() || cells.len() % per != 0 {
            return Err(Error::InvalidMesh("cell connectivity length is not a multiple of N + 1".into()));
        }
        if dirichlet.len() != points.len() {
            return Err(Error::InvalidMesh("one boundary marker per node required".into()));
        }
        if let Some(&bad) = cells.iter().find(|&&i| i >= points.len()) {
            return Err(Error::InvalidMesh(format!("cell references missing node {bad}")));
        }
        let ncells = cells.len() / per;
        let mut size = T::zero();
        for c in 0..ncells {
            let cell = &mut cells[c * per..(c + 1) * per];
            if let Some(pos) = cell.iter().position(|&i| norm(&points[i]) == T::zero()) {
                cell.swap(0, pos);
            }
            for a in 0..per {
                for b in a + 1..per {
                    let (p, q) = (points[cell[a]], points[cell[b]]);
                    size = size.max(norm(&[p[0] - q[0], p[1] - q[1], p[2] - q[2]]));
                }
            }
        }
        let mut grads = Vec::with_capacity(ncells);
        let mut volumes = Vec::with_capacity(ncells);
        for c in 0..ncells {
            let (g, v) = simplex_geometry(dim, &cells[c * per..(c + 1) * per], &points)?;
            grads.push(g);
            volumes.push(v);
        }
        let rule_of_cell = (0..ncells)
            .map(|c| {
                let cell = &cells[c * per..(c + 1) * per];
                let closest = cell.iter().map(|&i| norm(&points[i])).fold(T::infinity(), T::min);
                if closest == T::zero() {
                    0
                } else if closest < size * T::of(2.0) {
                    1
                } else {
                    2
                }
            })
            .collect();
        let mesh = Self {
            dim,
            points,
            cells,
            dirichlet,
            grads,
            volumes,
            rule_of_cell,
            rules: [
                SimplexRule::collapsed(dim, 4),
                SimplexRule::collapsed(dim, 3),
                SimplexRule::collapsed(dim, 2),
            ],
            size,
        };
        for face in mesh.boundary_faces() {
            if face.nodes.iter().any(|&i| !mesh.dirichlet[i]) {
                return Err(Error::InvalidMesh("a boundary facet has a node without Dirichlet marker".into()));
            }
        }
        Ok(mesh)
    }

    /// Overrides the characteristic size reported by [`FeSpace::mesh_size`].
    pub fn with_mesh_size(mut self, h: T) -> Self {
        self.size = h;
        self
    }

    pub fn points(&self) -> &[Vec3<T>] {
        &self.points
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn dirichlet(&self) -> &[bool] {
        &self.dirichlet
    }
}

fn simplex_geometry<T: Real>(dim: usize, cell: &[usize], points: &[Vec3<T>]) -> Result<([Vec3<T>; 4], T)> {
    let p0 = points[cell[0]];
    let e = |a: usize| -> Vec3<T> {
        let p = points[cell[a]];
        [p[0] - p0[0], p[1] - p0[1], p[2] - p0[2]]
    };
    let z = T::zero();
    let mut g = [[z; 3]; 4];
    let vol;
    if dim == 2 {
        let (a, b) = (e(1), e(2));
        let det = a[0] * b[1] - a[1] * b[0];
        if det.abs() <= T::tiny() * (dot(&a, &a) + dot(&b, &b)) {
            return Err(Error::InvalidMesh(format!("degenerate triangle {cell:?}")));
        }
        // rows of the inverse Jacobian
        g[1] = [b[1] / det, -b[0] / det, z];
        g[2] = [-a[1] / det, a[0] / det, z];
        vol = det.abs() * T::of(0.5);
    } else {
        let (a, b, c) = (e(1), e(2), e(3));
        let cross = |u: Vec3<T>, v: Vec3<T>| [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
        let bc = cross(b, c);
        let det = dot(&a, &bc);
        let scale = norm(&a) * norm(&b) * norm(&c);
        if det.abs() <= T::tiny() * scale {
            return Err(Error::InvalidMesh(format!("degenerate tetrahedron {cell:?}")));
        }
        let ca = cross(c, a);
        let ab = cross(a, b);
        g[1] = [bc[0] / det, bc[1] / det, bc[2] / det];
        g[2] = [ca[0] / det, ca[1] / det, ca[2] / det];
        g[3] = [ab[0] / det, ab[1] / det, ab[2] / det];
        vol = det.abs() / T::of(6.0);
    }
    for d in 0..3 {
        g[0][d] = -(g[1][d] + g[2][d] + g[3][d]);
    }
    Ok((g, vol))
}

impl<T: Real> FeSpace<T> for SimplexMesh<T> {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn components(&self) -> usize {
        self.dim
    }

    fn num_nodes(&self) -> usize {
        self.points.len()
    }

    fn num_cells(&self) -> usize {
        self.volumes.len()
    }

    fn cell_nodes(&self, c: usize) -> &[usize] {
        let per = self.dim + 1;
        &self.cells[c * per..(c + 1) * per]
    }

    fn basis_gradients(&self, c: usize) -> [Vec3<T>; 4] {
        self.grads[c]
    }

    fn cell_measure(&self, c: usize) -> T {
        self.volumes[c]
    }

    fn visit_quadrature(&self, c: usize, f: &mut dyn FnMut(&QuadPoint<T>)) {
        let rule = &self.rules[self.rule_of_cell[c] as usize];
        let nodes = self.cell_nodes(c);
        let vol = self.volumes[c];
        for (b, &w) in rule.bary.iter().zip(&rule.weights) {
            let mut x = [T::zero(); 3];
            for (a, &i) in nodes.iter().enumerate() {
                for d in 0..3 {
                    x[d] += b[a] * self.points[i][d];
                }
            }
            let mut phi = *b;
            if self.dim == 2 {
                phi[3] = T::zero();
            }
            f(&QuadPoint { weight: w * vol, x, phi });
        }
    }

    fn is_dirichlet(&self, node: usize) -> bool {
        self.dirichlet[node]
    }

    fn node_position(&self, node: usize) -> Vec3<T> {
        self.points[node]
    }

    fn boundary_faces(&self) -> Vec<BoundaryFace<T>> {
        let per = self.dim + 1;
        let mut seen: HashMap<[usize; 3], (usize, usize, usize)> = HashMap::with_capacity(self.num_cells() * 2);
        for c in 0..self.num_cells() {
            let cell = self.cell_nodes(c);
            for skip in 0..per {
                let mut face = [usize::MAX; 3];
                let mut m = 0;
                for (a, &i) in cell.iter().enumerate() {
                    if a != skip {
                        face[m] = i;
                        m += 1;
                    }
                }
                face[..m].sort_unstable();
                let e = seen.entry(face).or_insert((0, c, cell[skip]));
                e.0 += 1;
            }
        }
        let mut faces: Vec<BoundaryFace<T>> = seen
            .into_iter()
            .filter(|(_, (count, _, _))| *count == 1)
            .map(|(key, (_, cell, opposite))| {
                let nodes: Vec<usize> = key.iter().copied().filter(|&i| i != usize::MAX).collect();
                let p: Vec<Vec3<T>> = nodes.iter().map(|&i| self.points[i]).collect();
                let (mut normal, measure) = if self.dim == 2 {
                    let t = [p[1][0] - p[0][0], p[1][1] - p[0][1], T::zero()];
                    let len = norm(&t);
                    ([t[1] / len, -t[0] / len, T::zero()], len)
                } else {
                    let a = [p[1][0] - p[0][0], p[1][1] - p[0][1], p[1][2] - p[0][2]];
                    let b = [p[2][0] - p[0][0], p[2][1] - p[0][1], p[2][2] - p[0][2]];
                    let n = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
                    let len = norm(&n);
                    ([n[0] / len, n[1] / len, n[2] / len], len * T::of(0.5))
                };
                let k = T::of_usize(p.len());
                let mut centroid = [T::zero(); 3];
                for q in &p {
                    for d in 0..3 {
                        centroid[d] += q[d] / k;
                    }
                }
                let o = self.points[opposite];
                let away = [centroid[0] - o[0], centroid[1] - o[1], centroid[2] - o[2]];
                if dot(&normal, &away) < T::zero() {
                    normal = [-normal[0], -normal[1], -normal[2]];
                }
                BoundaryFace {
                    cell,
                    nodes,
                    normal,
                    measure,
                    centroid,
                }
            })
            .collect();
        faces.sort_by(|a, b| a.nodes.cmp(&b.nodes));
        faces
    }

    fn mesh_size(&self) -> T {
        self.size
    }

    fn cell_superlevel_measure(&self, c: usize, vals: &[T], k: T) -> T {
        self.volumes[c] * simplex_superlevel_fraction(vals, k)
    }
}
