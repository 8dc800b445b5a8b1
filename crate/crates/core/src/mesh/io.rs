//! Plain-text mesh format.
//!
//! ```text
//! # comment lines start with '#'
//! dimension 2
//! nodes 4
//! x y marker          (marker 1 = Dirichlet boundary node, 0 = interior)
//! ...
//! cells 2
//! i j k               (0-based node indices, N + 1 per line)
//! ...
//! ```
//! In three dimensions node lines carry `x y z marker` and cell lines four indices.

use std::fmt::Write as _;

use super::SimplexMesh;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub fn write_mesh<T: Real>(mesh: &SimplexMesh<T>) -> String {
    use super::FeSpace;
    let dim = mesh.dimension();
    let mut out = String::new();
    let _ = writeln!(out, "# plap mesh");
    let _ = writeln!(out, "dimension {dim}");
    let _ = writeln!(out, "nodes {}", mesh.num_nodes());
    for (p, &b) in mesh.points().iter().zip(mesh.dirichlet()) {
        for x in p.iter().take(dim) {
            let _ = write!(out, "{:.16e} ", x.to_f64_lossy());
        }
        let _ = writeln!(out, "{}", u8::from(b));
    }
    let _ = writeln!(out, "cells {}", mesh.num_cells());
    for c in mesh.cells().chunks(dim + 1) {
        let line: Vec<String> = c.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}

pub fn read_mesh<T: Real>(text: &str) -> Result<SimplexMesh<T>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let mut header = |key: &str| -> Result<usize> {
        let (no, line) = lines.next().ok_or_else(|| Error::Parse(format!("missing '{key}' line")))?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(key) {
            return Err(Error::Parse(format!("line {no}: expected '{key} <count>'")));
        }
        parts
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Parse(format!("line {no}: bad {key} count")))
    };
    let dim = header("dimension")?;
    if dim != 2 && dim != 3 {
        return Err(Error::Parse(format!("dimension {dim} is not 2 or 3")));
    }
    let n_nodes = header("nodes")?;
    let mut points = Vec::with_capacity(n_nodes);
    let mut dirichlet = Vec::with_capacity(n_nodes);
    // `header` borrows `lines` mutably; read the node block through a fresh borrow
    drop(header);
    for _ in 0..n_nodes {
        let (no, line) = lines.next().ok_or_else(|| Error::Parse("truncated node block".into()))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != dim + 1 {
            return Err(Error::Parse(format!("line {no}: expected {} fields", dim + 1)));
        }
        let mut p = [T::zero(); 3];
        for d in 0..dim {
            let v: f64 = fields[d].parse().map_err(|_| Error::Parse(format!("line {no}: bad coordinate")))?;
            p[d] = T::of(v);
        }
        let marker = match fields[dim] {
            "0" => false,
            "1" => true,
            _ => return Err(Error::Parse(format!("line {no}: marker must be 0 or 1"))),
        };
        points.push(p);
        dirichlet.push(marker);
    }
    let (no, line) = lines.next().ok_or_else(|| Error::Parse("missing 'cells' line".into()))?;
    let mut parts = line.split_whitespace();
    if parts.next() != Some("cells") {
        return Err(Error::Parse(format!("line {no}: expected 'cells <count>'")));
    }
    let n_cells: usize = parts
        .next()
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Parse(format!("line {no}: bad cells count")))?;
    let mut cells = Vec::with_capacity(n_cells * (dim + 1));
    for _ in 0..n_cells {
        let (no, line) = lines.next().ok_or_else(|| Error::Parse("truncated cell block".into()))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != dim + 1 {
            return Err(Error::Parse(format!("line {no}: expected {} node indices", dim + 1)));
        }
        for f in fields {
            cells.push(f.parse().map_err(|_| Error::Parse(format!("line {no}: bad node index")))?);
        }
    }
    if let Some((no, _)) = lines.next() {
        return Err(Error::Parse(format!("line {no}: trailing content")));
    }
    SimplexMesh::new(dim, points, cells, dirichlet)
}
