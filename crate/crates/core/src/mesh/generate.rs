use serde::{Deserialize, Serialize};

use super::SimplexMesh;
use crate::error::{Error, Result};
use crate::scalar::{Real, Vec3};

/// Radial node distribution of the mapped disk and ball meshes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Grading {
    Uniform,
    /// Spacing reduced by `factor` inside `|x| < core R`, with a linear transition
    /// of width `ramp` in the layer parameter.
    Origin { factor: f64, core: f64, ramp: f64 },
}

impl Default for Grading {
    fn default() -> Self {
        Grading::Origin {
            factor: 4.0,
            core: 0.1,
            ramp: 0.1,
        }
    }
}

impl Grading {
    /// Largest radial spacing relative to `R / L`.
    pub fn outer_slope(&self) -> f64 {
        match *self {
            Grading::Uniform => 1.0,
            Grading::Origin { factor, core, ramp } => (1.0 + core * (factor - 1.0)) / (1.0 - ramp * (1.0 - 1.0 / factor) / 2.0),
        }
    }

    fn validate(&self) -> Result<()> {
        if let Grading::Origin { factor, core, ramp } = *self {
            let m = self.outer_slope();
            let ok = factor >= 1.0 && core > 0.0 && core < 1.0 && ramp >= 0.0 && core * factor / m + ramp <= 1.0;
            if !ok {
                return Err(Error::InvalidParameter {
                    name: "grading",
                    value: factor,
                    reason: "need factor >= 1, 0 < core < 1 and the transition inside the ball",
                });
            }
        }
        Ok(())
    }

    /// Maps the layer parameter `s in [0, 1]` to the radius fraction.
    pub fn map(&self, s: f64) -> f64 {
        match *self {
            Grading::Uniform => s,
            Grading::Origin { factor, core, ramp } => {
                let m = self.outer_slope();
                let lo = m / factor;
                let s1 = core * factor / m;
                if s <= s1 {
                    lo * s
                } else if s <= s1 + ramp {
                    let t = s - s1;
                    core + lo * t + (m - lo) * t * t / (2.0 * ramp)
                } else {
                    core + ramp * (lo + m) / 2.0 + m * (s - s1 - ramp)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshKind {
    Disk,
    Ball,
    Square,
}

/// Parameters of a generated mesh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSpec {
    pub kind: MeshKind,
    pub radius: f64,
    /// Target largest radial spacing.
    pub h: f64,
    #[serde(default)]
    pub grading: Grading,
}

impl MeshSpec {
    pub fn build<T: Real>(&self) -> Result<SimplexMesh<T>> {
        match self.kind {
            MeshKind::Disk => disk(self.radius, self.h, self.grading),
            MeshKind::Ball => ball(self.radius, self.h, self.grading),
            MeshKind::Square => square(self.radius, self.h),
        }
    }
}

/// Disk of radius `R` with radial spacing at most `h`.
pub fn disk<T: Real>(radius: f64, h: f64, grading: Grading) -> Result<SimplexMesh<T>> {
    mapped(2, radius, h, Some(grading))
}

/// Ball of radius `R` in `R^3` with radial spacing at most `h`.
pub fn ball<T: Real>(radius: f64, h: f64, grading: Grading) -> Result<SimplexMesh<T>> {
    mapped(3, radius, h, Some(grading))
}

/// Square `[-R, R]^2` with spacing at most `h`.
pub fn square<T: Real>(half_width: f64, h: f64) -> Result<SimplexMesh<T>> {
    mapped(2, half_width, h, None)
}

/// Structured mesh of `[-L, L]^d` (union-jack triangles or reflected Kuhn tetrahedra,
/// always split from the cube corner nearest the origin), optionally mapped onto
/// the ball by sending each cube shell `|y|_inf = s` to the sphere of radius `R rho(s)`.
fn mapped<T: Real>(dim: usize, radius: f64, h: f64, grading: Option<Grading>) -> Result<SimplexMesh<T>> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidParameter {
            name: "radius",
            value: radius,
            reason: "must be positive",
        });
    }
    if !(h > 0.0) || h > radius {
        return Err(Error::InvalidParameter {
            name: "h",
            value: h,
            reason: "need 0 < h <= R",
        });
    }
    if let Some(g) = grading {
        g.validate()?;
    }
    let slope = grading.map_or(1.0, |g| g.outer_slope());
    let layers = (slope * radius / h - 1e-9).ceil().max(1.0) as i64;
    let side = (2 * layers + 1) as usize;
    let index = |c: &[i64]| -> usize {
        let mut k = 0usize;
        for d in (0..dim).rev() {
            k = k * side + (c[d] + layers) as usize;
        }
        k
    };
    let total = side.pow(dim as u32);
    let mut points = Vec::with_capacity(total);
    let mut dirichlet = Vec::with_capacity(total);
    for k in 0..total {
        let mut c = [0i64; 3];
        let mut rem = k;
        for cd in c.iter_mut().take(dim) {
            *cd = (rem % side) as i64 - layers;
            rem /= side;
        }
        let y: Vec<f64> = (0..dim).map(|d| c[d] as f64 / layers as f64).collect();
        let inf = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let two = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut x: Vec3<T> = [T::zero(); 3];
        for d in 0..dim {
            let v = match grading {
                Some(g) if two > 0.0 => y[d] / two * g.map(inf) * radius,
                Some(_) => 0.0,
                None => y[d] * radius,
            };
            x[d] = T::of(v);
        }
        points.push(x);
        dirichlet.push(c.iter().take(dim).any(|v| v.abs() == layers));
    }

    let mut cells = Vec::new();
    let perms3: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut lower = [0i64; 3];
    let cubes = (2 * layers) as usize;
    for k in 0..cubes.pow(dim as u32) {
        let mut rem = k;
        for l in lower.iter_mut().take(dim) {
            *l = (rem % cubes) as i64 - layers;
            rem /= cubes;
        }
        // base = corner nearest the origin, step = direction away from it
        let mut base = [0i64; 3];
        let mut step = [0i64; 3];
        for d in 0..dim {
            if lower[d] >= 0 {
                base[d] = lower[d];
                step[d] = 1;
            } else {
                base[d] = lower[d] + 1;
                step[d] = -1;
            }
        }
        let corner = |bits: [i64; 3]| -> usize {
            let c: Vec<i64> = (0..dim).map(|d| base[d] + step[d] * bits[d]).collect();
            index(&c)
        };
        if dim == 2 {
            let (v0, v1, v2, v3) = (corner([0, 0, 0]), corner([1, 0, 0]), corner([0, 1, 0]), corner([1, 1, 0]));
            cells.extend_from_slice(&[v0, v1, v3, v0, v2, v3]);
        } else {
            for perm in &perms3 {
                let mut bits = [0i64; 3];
                cells.push(corner(bits));
                for &axis in perm {
                    bits[axis] = 1;
                    cells.push(corner(bits));
                }
            }
        }
    }
    let mesh = SimplexMesh::new(dim, points, cells, dirichlet)?;
    Ok(mesh.with_mesh_size(T::of(slope * radius / layers as f64)))
}
