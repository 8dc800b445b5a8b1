use serde::{Deserialize, Serialize};

use super::field::ZField;
use crate::error::{Error, Result};
use crate::mesh::{cell_gradient, FeSpace};
use crate::scalar::{dot, norm, Real, Vec3};
use crate::function_spaces::AnalyticDatum;
use crate::solver::{Drift, Source};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound = "T: Real")]
pub struct CertificateOptions<T> {
    pub tol_pde: T,
    pub tol_pairing: T,
    pub tol_boundary: T,
    /// Slack in `||z||_inf <= 1`.
    pub tol_z: T,
    /// Number of bump test functions besides `phi = 1`.
    pub bumps: usize,
    /// Bump radius as a fraction of the bounding-box diagonal.
    pub bump_radius: T,
    /// Truncation levels as multiples of `||u||_inf`.
    pub levels: Vec<T>,
    /// Boundary faces count only where `|u| > activation ||u||_inf`.
    pub activation: T,
}

impl<T: Real> Default for CertificateOptions<T> {
    fn default() -> Self {
        Self {
            tol_pde: T::of(1e-8),
            tol_pairing: T::of(1e-8),
            tol_boundary: T::of(1e-8),
            tol_z: T::of(1e-8),
            bumps: 24,
            bump_radius: T::of(0.25),
            levels: [0.25, 0.5, 1.0, 2.0].iter().map(|&c| T::of(c)).collect(),
            activation: T::of(1e-6),
        }
    }
}

/// Residuals of a candidate limit pair `(u, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitCertificate<T> {
    pub z_sup: T,
    /// `||r|| / ||s||` with `r_i = int z.grad phi_i - (z.F + f) phi_i` over free nodes
    /// and `s_i` the same integral of absolute values.
    pub residual_pde: T,
    /// Largest `max(0, int phi (|grad T_k u| - z.grad T_k u)) / int phi |grad T_k u|`.
    pub residual_pairing: T,
    /// Largest `|z.nu + sign(u)|` over active boundary faces.
    pub residual_boundary: T,
    pub norm_ok: bool,
    pub pde_ok: bool,
    pub pairing_ok: bool,
    pub boundary_ok: bool,
    pub accepted: bool,
    pub pairing_tests: usize,
    pub active_faces: usize,
}

impl<T> LimitCertificate<T> {
    /// Names of the failed checks among `norm`, `pde`, `pairing`, `boundary`.
    pub fn failed_checks(&self) -> Vec<&'static str> {
        [
            (self.norm_ok, "norm"),
            (self.pde_ok, "pde"),
            (self.pairing_ok, "pairing"),
            (self.boundary_ok, "boundary"),
        ]
        .into_iter()
        .filter(|(ok, _)| !ok)
        .map(|(_, name)| name)
        .collect()
    }
}

/// Deliberate defects of the cone pair, each aimed at one check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Corruption {
    #[default]
    None,
    /// `z` and `f` both scaled by 1.1 with `u = R - |x|`: the equation still holds, `|z| = 1.1`.
    ZScale,
    /// `f` scaled by 1.1.
    DatumScale,
    /// `u = R - |x| - R/10`, negative on the boundary while `z.nu = -1`.
    BoundarySign,
}

impl Corruption {
    pub const ALL: [Corruption; 4] = [Corruption::None, Corruption::ZScale, Corruption::DatumScale, Corruption::BoundarySign];

    /// The single check this corruption should fail.
    pub fn target(self) -> Option<&'static str> {
        match self {
            Corruption::None => None,
            Corruption::ZScale => Some("norm"),
            Corruption::DatumScale => Some("pde"),
            Corruption::BoundarySign => Some("boundary"),
        }
    }
}

/// Candidate pair with the datum it should certify.
pub struct CertificateCase<T> {
    pub u: Vec<T>,
    pub z: ZField<T>,
    pub source: Source<T>,
}

/// The pair `u = R - |x| + R/10`, `z = -x/|x|` of `-div z = lambda z.x/|x|^2 + 1/|x|`
/// with `lambda = -(N - 2)`, optionally corrupted.
pub fn cone_pair<T: Real>(space: &dyn FeSpace<T>, radius: T, corruption: Corruption) -> CertificateCase<T> {
    let shift = match corruption {
        Corruption::BoundarySign => -radius / T::of(10.0),
        // |z.nu| = 1.1 would also fail an active boundary
        Corruption::ZScale => T::zero(),
        _ => radius / T::of(10.0),
    };
    let u = (0..space.num_nodes())
        .map(|i| radius - norm(&space.node_position(i)) + shift)
        .collect();
    let z = ZField::function(|x: Vec3<T>| {
        let r = norm(&x);
        if r > T::zero() {
            [-x[0] / r, -x[1] / r, -x[2] / r]
        } else {
            [T::zero(); 3]
        }
    });
    let (z, alpha) = match corruption {
        Corruption::ZScale => (z.scaled(T::of(1.1)), T::of(1.1)),
        Corruption::DatumScale => (z, T::of(1.1)),
        _ => (z, T::one()),
    };
    CertificateCase {
        u,
        z,
        source: Source::Analytic(AnalyticDatum::inverse_radius(alpha, radius)),
    }
}

/// Radical inverse of `i + 1` in `base`.
fn halton(i: usize, base: usize) -> f64 {
    let mut i = i + 1;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut out = 0.0;
    while i > 0 {
        out += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    out
}

/// Evaluates the three limit conditions and the bound on `z` for nodal `u`
/// (boundary values included) and a candidate field `z`.
pub fn verify_certificate<T: Real>(
    space: &dyn FeSpace<T>,
    u: &[T],
    z: &ZField<T>,
    drift: &Drift<T>,
    source: &Source<T>,
    options: &CertificateOptions<T>,
) -> Result<LimitCertificate<T>> {
    if u.len() != space.num_nodes() {
        return Err(Error::MismatchedMeshes(format!("u has {} values, mesh has {} nodes", u.len(), space.num_nodes())));
    }
    if let ZField::PerCell(v) = z {
        if v.len() != space.num_cells() {
            return Err(Error::MismatchedMeshes(format!("z has {} cells, mesh has {}", v.len(), space.num_cells())));
        }
    }
    let faces = space.boundary_faces();

    // bound on z
    let mut z_sup = T::zero();
    for c in 0..space.num_cells() {
        space.visit_quadrature(c, &mut |q| z_sup = z_sup.max(norm(&z.at(c, &q.x))));
    }
    for f in &faces {
        z_sup = z_sup.max(norm(&z.at(f.cell, &f.centroid)));
    }

    // equation, tested against every free nodal basis function
    let n = space.num_nodes();
    let mut r = vec![T::zero(); n];
    let mut s = vec![T::zero(); n];
    for c in 0..space.num_cells() {
        let nodes = space.cell_nodes(c);
        let grads = space.basis_gradients(c);
        space.visit_quadrature(c, &mut |q| {
            let zq = z.at(c, &q.x);
            let rhs = dot(&zq, &drift.at(&q.x));
            let f = source.at(&q.x);
            for (a, &i) in nodes.iter().enumerate() {
                let div = q.weight * dot(&zq, &grads[a]);
                let lower = q.weight * rhs * q.phi[a];
                let data = q.weight * f * q.phi[a];
                r[i] += div - lower - data;
                s[i] += div.abs() + lower.abs() + data.abs();
            }
        });
    }
    let (mut rn, mut sn) = (T::zero(), T::zero());
    for i in (0..n).filter(|&i| !space.is_dirichlet(i)) {
        rn += r[i] * r[i];
        sn += s[i] * s[i];
    }
    let residual_pde = if sn > T::zero() { (rn / sn).sqrt() } else { rn.sqrt() };

    // pairing on truncations, against phi = 1 and bumps
    let umax = u.iter().fold(T::zero(), |m, &v| m.max(v.abs()));
    let free: Vec<usize> = (0..n).filter(|&i| !space.is_dirichlet(i)).collect();
    let (mut lo, mut hi) = ([T::infinity(); 3], [T::neg_infinity(); 3]);
    for i in 0..n {
        let x = space.node_position(i);
        for d in 0..3 {
            lo[d] = lo[d].min(x[d]);
            hi[d] = hi[d].max(x[d]);
        }
    }
    let diag = norm(&[hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]]);
    let rho = options.bump_radius * diag;
    let mut centers: Vec<Option<Vec3<T>>> = vec![None];
    if !free.is_empty() && rho > T::zero() {
        // Halton points in the bounding box, snapped to the nearest free node
        for j in 0..options.bumps {
            let mut target = [T::zero(); 3];
            for (d, base) in [2, 3, 5].into_iter().enumerate() {
                target[d] = lo[d] + T::of(halton(j, base)) * (hi[d] - lo[d]);
            }
            let nearest = free
                .iter()
                .map(|&i| space.node_position(i))
                .min_by(|a, b| {
                    let da = [a[0] - target[0], a[1] - target[1], a[2] - target[2]];
                    let db = [b[0] - target[0], b[1] - target[1], b[2] - target[2]];
                    dot(&da, &da).partial_cmp(&dot(&db, &db)).expect("finite positions")
                })
                .expect("free nodes exist");
            centers.push(Some(nearest));
        }
    }
    let phi = |c: &Option<Vec3<T>>, x: &Vec3<T>| -> T {
        match c {
            None => T::one(),
            Some(c) => {
                let d = [x[0] - c[0], x[1] - c[1], x[2] - c[2]];
                let t = T::one() - dot(&d, &d) / (rho * rho);
                if t > T::zero() {
                    t * t
                } else {
                    T::zero()
                }
            }
        }
    };
    let mut residual_pairing = T::zero();
    let mut pairing_tests = 0;
    if umax > T::zero() {
        for &level in &options.levels {
            let k = level * umax;
            let tk: Vec<T> = u.iter().map(|&v| v.max(-k).min(k)).collect();
            let grads: Vec<Vec3<T>> = (0..space.num_cells()).map(|c| cell_gradient(space, c, &tk)).collect();
            for center in &centers {
                let (mut num, mut den) = (T::zero(), T::zero());
                for (c, g) in grads.iter().enumerate() {
                    let gn = norm(g);
                    if gn == T::zero() {
                        continue;
                    }
                    space.visit_quadrature(c, &mut |q| {
                        let w = q.weight * phi(center, &q.x);
                        num += w * (gn - dot(&z.at(c, &q.x), g));
                        den += w * gn;
                    });
                }
                if den > T::zero() {
                    pairing_tests += 1;
                    residual_pairing = residual_pairing.max(num.max(T::zero()) / den);
                }
            }
        }
    }

    // boundary sign condition where |u| is active
    let delta = options.activation * umax;
    let mut residual_boundary = T::zero();
    let mut active_faces = 0;
    for f in &faces {
        let ub = f.nodes.iter().map(|&i| u[i]).sum::<T>() / T::of_usize(f.nodes.len());
        if ub.abs() > delta && umax > T::zero() {
            active_faces += 1;
            let zn = dot(&z.at(f.cell, &f.centroid), &f.normal);
            residual_boundary = residual_boundary.max((zn + ub.signum()).abs());
        }
    }

    let norm_ok = z_sup <= T::one() + options.tol_z;
    let pde_ok = residual_pde <= options.tol_pde;
    let pairing_ok = residual_pairing <= options.tol_pairing;
    let boundary_ok = residual_boundary <= options.tol_boundary;
    Ok(LimitCertificate {
        z_sup,
        residual_pde,
        residual_pairing,
        residual_boundary,
        norm_ok,
        pde_ok,
        pairing_ok,
        boundary_ok,
        accepted: norm_ok && pde_ok && pairing_ok && boundary_ok,
        pairing_tests,
        active_faces,
    })
}
