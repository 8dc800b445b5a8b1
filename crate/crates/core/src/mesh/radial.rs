use super::{BoundaryFace, FeSpace, QuadPoint};
use crate::error::Result;
use crate::function_spaces::ball_volume;
use crate::grid::RadialGrid;
use crate::quadrature::GaussLegendre;
use crate::scalar::{Real, Vec3};

/// P1 elements in the radial variable of a ball `B_R ⊂ R^N`.
///
/// Integrals carry the weight `N C_N r^{N-1}`, so the space represents radial
/// functions on the ball exactly; the node at `r = 0` is free and `r = R` is Dirichlet.
#[derive(Debug, Clone)]
pub struct RadialMesh<T> {
    dimension: usize,
    nodes: Vec<T>,
    cells: Vec<usize>,
    sphere: T,
    ball: T,
    rule: GaussLegendre<T>,
}

impl<T: Real> RadialMesh<T> {
    pub fn new(dimension: usize, grid: &RadialGrid<T>) -> Result<Self> {
        let ball = ball_volume::<T>(dimension as i64)?;
        let nodes = grid.nodes().to_vec();
        let cells = (0..nodes.len() - 1).flat_map(|j| [j, j + 1]).collect();
        Ok(Self {
            dimension,
            nodes,
            cells,
            sphere: T::of_usize(dimension) * ball,
            ball,
            rule: GaussLegendre::new(6),
        })
    }

    pub fn radii(&self) -> &[T] {
        &self.nodes
    }

    pub fn radius(&self) -> T {
        *self.nodes.last().expect("nonempty grid")
    }
}

impl<T: Real> FeSpace<T> for RadialMesh<T> {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn components(&self) -> usize {
        1
    }

    fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    fn num_cells(&self) -> usize {
        self.nodes.len() - 1
    }

    fn cell_nodes(&self, c: usize) -> &[usize] {
        &self.cells[2 * c..2 * c + 2]
    }

    fn basis_gradients(&self, c: usize) -> [Vec3<T>; 4] {
        let h = self.nodes[c + 1] - self.nodes[c];
        let z = T::zero();
        [[-h.recip(), z, z], [h.recip(), z, z], [z; 3], [z; 3]]
    }

    fn cell_measure(&self, c: usize) -> T {
        let n = self.dimension as i32;
        self.ball * (self.nodes[c + 1].powi(n) - self.nodes[c].powi(n))
    }

    fn visit_quadrature(&self, c: usize, f: &mut dyn FnMut(&QuadPoint<T>)) {
        let (a, b) = (self.nodes[c], self.nodes[c + 1]);
        let h = b - a;
        let n = self.dimension as i32;
        for (&t, &w) in self.rule.nodes.iter().zip(&self.rule.weights) {
            let r = a + h * t;
            f(&QuadPoint {
                weight: w * h * self.sphere * r.powi(n - 1),
                x: [r, T::zero(), T::zero()],
                phi: [T::one() - t, t, T::zero(), T::zero()],
            });
        }
    }

    fn is_dirichlet(&self, node: usize) -> bool {
        node + 1 == self.nodes.len()
    }

    fn node_position(&self, node: usize) -> Vec3<T> {
        [self.nodes[node], T::zero(), T::zero()]
    }

    fn boundary_faces(&self) -> Vec<BoundaryFace<T>> {
        let last = self.nodes.len() - 1;
        let r = self.radius();
        vec![BoundaryFace {
            cell: last - 1,
            nodes: vec![last],
            normal: [T::one(), T::zero(), T::zero()],
            measure: self.sphere * r.powi(self.dimension as i32 - 1),
            centroid: [r, T::zero(), T::zero()],
        }]
    }

    fn mesh_size(&self) -> T {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(T::zero(), T::max)
    }

    fn cell_superlevel_measure(&self, c: usize, vals: &[T], k: T) -> T {
        let (a, b) = (self.nodes[c], self.nodes[c + 1]);
        let (ua, ub) = (vals[0], vals[1]);
        let (lo, hi) = if ua >= k && ub >= k {
            (a, b)
        } else if ua < k && ub < k {
            return T::zero();
        } else {
            let cross = a + (b - a) * (k - ua) / (ub - ua);
            if ua >= k {
                (a, cross)
            } else {
                (cross, b)
            }
        };
        let n = self.dimension as i32;
        self.ball * (hi.powi(n) - lo.powi(n))
    }
}
