use approx::assert_relative_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use super::*;
use crate::grid::RadialGrid;
use crate::scalar::norm;

#[test]
fn disk_and_ball_measures() {
    let d: SimplexMesh<f64> = disk(1.0, 1.0 / 16.0, Grading::Uniform).unwrap();
    assert_relative_eq!(d.measure(), PI, max_relative = 1e-2);
    let b: SimplexMesh<f64> = ball(1.0, 1.0 / 6.0, Grading::default()).unwrap();
    assert_relative_eq!(b.measure(), 4.0 * PI / 3.0, max_relative = 5e-2);
    let s: SimplexMesh<f64> = square(1.0, 0.25).unwrap();
    assert_relative_eq!(s.measure(), 4.0, epsilon = 1e-12);
    assert_relative_eq!(s.lumped_measures().iter().sum::<f64>(), 4.0, epsilon = 1e-12);
}

#[test]
fn grading_is_continuous_and_onto() {
    let g = Grading::default();
    assert_relative_eq!(g.map(1.0), 1.0, epsilon = 1e-12);
    assert_eq!(g.map(0.0), 0.0);
    let mut last = 0.0;
    for i in 1..=1000 {
        let r = g.map(i as f64 / 1000.0);
        assert!(r > last);
        last = r;
    }
    // inner spacing is a quarter of the outer spacing
    let m = g.outer_slope();
    assert_relative_eq!(g.map(0.01) / 0.01, m / 4.0, max_relative = 1e-12);
}

#[test]
fn origin_is_collapse_vertex() {
    for mesh in [disk::<f64>(1.0, 0.2, Grading::default()).unwrap(), ball::<f64>(1.0, 0.34, Grading::default()).unwrap()] {
        let origin = (0..mesh.num_nodes()).find(|&i| norm(&mesh.node_position(i)) == 0.0).unwrap();
        for c in 0..mesh.num_cells() {
            let nodes = mesh.cell_nodes(c);
            if nodes.contains(&origin) {
                assert_eq!(nodes[0], origin);
            }
            mesh.visit_quadrature(c, &mut |q| assert!(norm(&q.x) > 0.0));
        }
    }
}

#[test]
fn boundary_faces_point_outward() {
    let mesh: SimplexMesh<f64> = ball(1.0, 0.34, Grading::Uniform).unwrap();
    let faces = mesh.boundary_faces();
    let area: f64 = faces.iter().map(|f| f.measure).sum();
    assert_relative_eq!(area, 4.0 * PI, max_relative = 0.1);
    for f in &faces {
        assert!(f.nodes.iter().all(|&i| mesh.is_dirichlet(i)));
        assert!(crate::scalar::dot(&f.normal, &f.centroid) > 0.0);
    }
    let d: SimplexMesh<f64> = disk(1.0, 0.1, Grading::Uniform).unwrap();
    let len: f64 = d.boundary_faces().iter().map(|f| f.measure).sum();
    assert_relative_eq!(len, 2.0 * PI, max_relative = 1e-2);
}

#[test]
fn singular_integrand_on_disk() {
    // int_{B_1} 1/|x| dx = 2 pi in two dimensions
    let mesh: SimplexMesh<f64> = disk(1.0, 1.0 / 32.0, Grading::default()).unwrap();
    let got = integrate(&mesh, &vec![0.0; mesh.num_nodes()], |x, _| 1.0 / norm(&x));
    assert_relative_eq!(got, 2.0 * PI, max_relative = 2e-3);
}

#[test]
fn superlevel_fraction_closed_forms() {
    assert_relative_eq!(simplex_superlevel_fraction(&[0.0, 1.0], 0.25), 0.75);
    assert_relative_eq!(simplex_superlevel_fraction(&[0.0, 0.0, 1.0], 0.5), 0.25);
    assert_relative_eq!(simplex_superlevel_fraction(&[0.0, 1.0, 1.0], 0.5), 0.75);
    assert_relative_eq!(simplex_superlevel_fraction(&[0.0, 0.0, 0.0, 1.0], 0.5), 0.125);
    assert_relative_eq!(simplex_superlevel_fraction(&[0.0, 0.0, 1.0, 1.0], 0.5), 0.5);
    assert_relative_eq!(simplex_superlevel_fraction(&[0.0, 1.0, 1.0, 1.0], 0.5), 0.875);
    assert_eq!(simplex_superlevel_fraction(&[2.0, 2.0, 2.0], 2.0), 1.0);
    assert_eq!(simplex_superlevel_fraction(&[0.0, 1.0, 2.0], 3.0), 0.0);
}

#[test]
fn superlevel_fraction_matches_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let vals: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let k = rng.gen_range(-0.8..0.8);
        // uniform points in the reference tetrahedron via sorted uniforms
        let m = 200_000;
        let mut hits = 0usize;
        for _ in 0..m {
            let mut e = [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()];
            e.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let l = [e[0], e[1] - e[0], e[2] - e[1], 1.0 - e[2]];
            let u: f64 = l.iter().zip(&vals).map(|(a, b)| a * b).sum();
            hits += usize::from(u >= k);
        }
        let mc = hits as f64 / m as f64;
        assert!((simplex_superlevel_fraction(&vals, k) - mc).abs() < 5e-3, "{vals:?} {k}");
    }
}

#[test]
fn radial_superlevel_is_exact() {
    let mesh = RadialMesh::new(3, &RadialGrid::uniform(1.0, 10).unwrap()).unwrap();
    let u: Vec<f64> = mesh.radii().iter().map(|r| 1.0 - r).collect();
    for k in [0.05, 0.33, 0.9] {
        assert_relative_eq!(superlevel_measure(&mesh, &u, k), 4.0 * PI / 3.0 * (1.0 - k).powi(3), max_relative = 1e-12);
    }
    assert_relative_eq!(mesh.lumped_measures().iter().sum::<f64>(), 4.0 * PI / 3.0, max_relative = 1e-13);
    assert_eq!(mesh.boundary_faces().len(), 1);
}

#[test]
fn mesh_text_round_trip() {
    let mesh: SimplexMesh<f64> = disk(1.0, 0.25, Grading::default()).unwrap();
    let text = write_mesh(&mesh);
    let back: SimplexMesh<f64> = read_mesh(&text).unwrap();
    assert_eq!(back.num_nodes(), mesh.num_nodes());
    assert_eq!(back.cells(), mesh.cells());
    assert_eq!(back.dirichlet(), mesh.dirichlet());
    assert_relative_eq!(back.measure(), mesh.measure(), max_relative = 1e-14);
}

#[test]
fn mesh_text_errors() {
    assert!(read_mesh::<f64>("dimension 4\n").is_err());
    assert!(read_mesh::<f64>("dimension 2\nnodes 1\n0 0\n").is_err());
    let tri = "dimension 2\nnodes 3\n0 0 1\n1 0 1\n0 1 1\ncells 1\n0 1 2\n";
    assert_eq!(read_mesh::<f64>(tri).unwrap().num_cells(), 1);
    // interior marker on a boundary node
    let bad = "dimension 2\nnodes 3\n0 0 0\n1 0 1\n0 1 1\ncells 1\n0 1 2\n";
    assert!(read_mesh::<f64>(bad).is_err());
    let degenerate = "dimension 2\nnodes 3\n0 0 1\n1 0 1\n2 0 1\ncells 1\n0 1 2\n";
    assert!(read_mesh::<f64>(degenerate).is_err());
}
