//! Text formats shared by the command-line tools: numbers at 17 significant
//! digits with `+inf` for blow-up, CSV tables, and atomic file writes.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::continuation::{extract_z, ScheduleRun};
use crate::error::{Error, Result};
use crate::function_spaces::ScalarField;
use crate::mesh::{cell_gradient, FeSpace};
use crate::radial::RadialSolution;
use crate::scalar::Real;

/// `x` at 17 significant digits; `+inf`, `-inf` and `nan` for non-finite values.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "+inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:.16e}")
    }
}

fn row<T: Real>(out: &mut String, values: &[T]) {
    let cells: Vec<String> = values.iter().map(|v| format_number(v.to_f64_lossy())).collect();
    out.push_str(&cells.join(","));
    out.push('\n');
}

/// Columns `r,v,du,u` of a radial solution.
pub fn radial_csv<T: Real>(sol: &RadialSolution<T>) -> String {
    let mut out = String::from("r,v,du,u\n");
    for j in 0..sol.nodes.len() {
        row(&mut out, &[sol.nodes[j], sol.flux[j], sol.slope[j], sol.values[j]]);
    }
    out
}

/// Nodal table: coordinates, `u`, and the measure-weighted averages of the cell
/// values of `grad u` and `z = (|grad u|^2 + eps^2)^{(p-2)/2} grad u`.
pub fn field_csv<T: Real>(space: &dyn FeSpace<T>, u: &[T], p: T, eps: T) -> String {
    let d = space.components();
    let names = ["x", "y", "z"];
    let mut header: Vec<String> = names[..d].iter().map(|s| s.to_string()).collect();
    header.push("u".into());
    header.extend(names[..d].iter().map(|s| format!("du_d{s}")));
    header.extend((0..d).map(|k| format!("z{k}")));
    let n = space.num_nodes();
    let z = extract_z(space, u, p, eps);
    let mut grad = vec![[T::zero(); 3]; n];
    let mut zz = vec![[T::zero(); 3]; n];
    let mut mass = vec![T::zero(); n];
    for c in 0..space.num_cells() {
        let g = cell_gradient(space, c, u);
        let m = space.cell_measure(c);
        for &i in space.cell_nodes(c) {
            for k in 0..3 {
                grad[i][k] += m * g[k];
                zz[i][k] += m * z.cells[c][k];
            }
            mass[i] += m;
        }
    }
    let mut out = header.join(",");
    out.push('\n');
    for i in 0..n {
        let x = space.node_position(i);
        let mut vals: Vec<T> = x[..d].to_vec();
        vals.push(u[i]);
        let w = if mass[i] > T::zero() { mass[i] } else { T::one() };
        vals.extend((0..d).map(|k| grad[i][k] / w));
        vals.extend((0..d).map(|k| zz[i][k] / w));
        row(&mut out, &vals);
    }
    out
}

/// Tidy plot data `series,p,quantity,value` with one row per step and quantity
/// (`linf`, `l1`, `energy`, `z_linf`), in schedule order. Steps skipped after
/// the blow-up guard fired are `+inf`, steps lost to a failure `nan`.
pub fn plot_csv<T: Real>(runs: &[(String, &ScheduleRun<T>)]) -> Result<String> {
    if runs.is_empty() || runs.iter().all(|(_, r)| r.exponents.is_empty()) {
        return Err(Error::InvalidParameter {
            name: "reports",
            value: 0.0,
            reason: "plot data needs at least one report",
        });
    }
    let mut out = String::from("series,p,quantity,value\n");
    for (label, run) in runs {
        for (k, &p) in run.exponents.iter().enumerate() {
            let vals: [f64; 4] = match run.reports.get(k) {
                Some(r) => [
                    r.linf.to_f64_lossy(),
                    r.l1.to_f64_lossy(),
                    r.energy.to_f64_lossy(),
                    run.z_norms[k].linf.to_f64_lossy(),
                ],
                _ if run.blow_up => [f64::INFINITY; 4],
                _ => [f64::NAN; 4],
            };
            for (q, v) in ["linf", "l1", "energy", "z_linf"].iter().zip(vals) {
                let _ = writeln!(out, "{label},{},{q},{}", format_number(p.to_f64_lossy()), format_number(v));
            }
        }
    }
    Ok(out)
}

/// Reads a sampled field: header line, then rows of coordinates, value, weight.
pub fn read_field_csv<T: Real>(text: &str) -> Result<ScalarField<T>> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Parse("empty field file".into()))?;
    let cols = header.split(',').count();
    if cols < 2 {
        return Err(Error::Parse("field needs value and weight columns".into()));
    }
    let dim = cols - 2;
    let (mut coords, mut values, mut weights) = (Vec::new(), Vec::new(), Vec::new());
    for (k, line) in lines.enumerate() {
        let nums: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("row {}: {e}", k + 1))))
            .collect::<Result<_>>()?;
        if nums.len() != cols {
            return Err(Error::Parse(format!("row {}: expected {cols} columns, got {}", k + 1, nums.len())));
        }
        coords.extend(nums[..dim].iter().map(|&x| T::of(x)));
        values.push(T::of(nums[dim]));
        weights.push(T::of(nums[dim + 1]));
    }
    ScalarField::with_points(values, weights, coords, dim)
}

/// Writes `contents` to a temporary file next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().ok_or_else(|| Error::Io(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = fs::File::create(&tmp).map_err(|e| Error::Io(format!("{}: {e}", tmp.display())))?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuation::{run_schedule, ContinuationOptions, Schedule};
    use crate::function_spaces::AnalyticDatum;
    use crate::grid::RadialGrid;
    use crate::mesh::RadialMesh;
    use crate::solver::{Drift, Source};

    #[test]
    fn numbers_round_trip_at_full_precision() {
        for x in [1.0 / 3.0, 1e-300, -2.5e17, std::f64::consts::PI] {
            assert_eq!(format_number(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_number(f64::INFINITY), "+inf");
        assert_eq!(format_number(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn plot_rows_and_sentinel() {
        let m = RadialMesh::new(3, &RadialGrid::geometric(1.0, 1.05, 1e-6).unwrap()).unwrap();
        let mut s = Schedule::geometric(1.2, 4);
        s.solver.truncation = 1e12;
        let run = run_schedule(
            &m,
            &Drift::Hardy { lambda: -1.0 },
            &Source::Analytic(AnalyticDatum::inverse_radius(1.5, 1.0)),
            &s,
            &ContinuationOptions { guard: 1e3, ..Default::default() },
        )
        .unwrap();
        assert!(run.blow_up);
        let csv = plot_csv(&[("a".to_string(), &run)]).unwrap();
        assert_eq!(csv.lines().count(), 1 + 4 * 4);
        assert!(csv.lines().any(|l| l.ends_with(",+inf")));
        assert_eq!(csv, plot_csv(&[("a".to_string(), &run)]).unwrap());
        assert!(plot_csv::<f64>(&[]).is_err());
    }

    #[test]
    fn field_csv_reads_back() {
        let text = "x,value,weight\n0.5,2,0.25\n# comment\n1.5,1,0.75\n";
        let f = read_field_csv::<f64>(text).unwrap();
        assert_eq!(f.values(), &[2.0, 1.0]);
        assert_eq!(f.point_dim(), 1);
        assert!(read_field_csv::<f64>("x,value,weight\n1,2\n").is_err());
        assert!(read_field_csv::<f64>("").is_err());
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub").join("a.txt");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "two");
        assert_eq!(fs::read_dir(path.parent().unwrap()).unwrap().count(), 1);
    }
}
