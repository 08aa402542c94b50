//! Legacy ASCII VTK unstructured-grid output.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::fem::ElementType;
use crate::mesh::Mesh;
use crate::solver::MixedSolution;
use crate::{Error, Result};

const QUAD9_TO_VTK: [usize; 9] = [0, 2, 8, 6, 1, 5, 7, 3, 4];

fn cell_type(elem: ElementType) -> u8 {
    match elem {
        ElementType::Tri3 => 5,
        ElementType::Quad4 => 9,
        ElementType::Quad9 => 28,
        ElementType::Hex8 => 12,
    }
}

fn vtk_order(elem: ElementType, conn: &[usize]) -> Vec<usize> {
    match elem {
        ElementType::Quad9 => QUAD9_TO_VTK.iter().map(|&i| conn[i]).collect(),
        _ => conn.to_vec(),
    }
}

fn check_name(name: &str) -> Result<()> {
    if name.is_empty() || name.chars().any(char::is_whitespace) {
        return Err(Error::invalid(format!("VTK array name {name:?} must be non-empty without whitespace")));
    }
    Ok(())
}

/// Renders the mesh geometry and optional fields as a legacy VTK document.
pub fn render(mesh: &Mesh, solution: Option<&MixedSolution>, cell_data: &[(&str, &[f64])], title: &str) -> Result<String> {
    let mut out = String::new();
    let title = title.lines().next().unwrap_or("").chars().take(255).collect::<String>();
    out.push_str("# vtk DataFile Version 3.0\n");
    out.push_str(if title.is_empty() { "darcyflow" } else { &title });
    out.push_str("\nASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(out, "POINTS {} double", mesh.num_nodes());
    for x in mesh.nodes() {
        let _ = writeln!(out, "{:e} {:e} {:e}", x.x, x.y, x.z);
    }
    let et = mesh.elem_type();
    let npe = et.nodes_per_element();
    let ne = mesh.num_elements();
    let _ = writeln!(out, "CELLS {} {}", ne, ne * (npe + 1));
    for conn in mesh.elements() {
        out.push_str(&npe.to_string());
        for n in vtk_order(et, conn) {
            let _ = write!(out, " {n}");
        }
        out.push('\n');
    }
    let _ = writeln!(out, "CELL_TYPES {ne}");
    for _ in 0..ne {
        let _ = writeln!(out, "{}", cell_type(et));
    }
    if let Some(sol) = solution {
        if sol.pressure.len() != mesh.num_nodes() {
            return Err(Error::invalid("solution does not match the mesh"));
        }
        let _ = writeln!(out, "POINT_DATA {}", mesh.num_nodes());
        out.push_str("VECTORS velocity double\n");
        for n in 0..mesh.num_nodes() {
            let v = sol.node_velocity(n);
            let _ = writeln!(out, "{:e} {:e} {:e}", v.x, v.y, v.z);
        }
        out.push_str("SCALARS pressure double 1\nLOOKUP_TABLE default\n");
        for p in &sol.pressure {
            let _ = writeln!(out, "{p:e}");
        }
    }
    if !cell_data.is_empty() {
        let _ = writeln!(out, "CELL_DATA {ne}");
        for (name, values) in cell_data {
            check_name(name)?;
            if values.len() != ne {
                return Err(Error::invalid(format!(
                    "cell array {name} has {} values for {ne} cells",
                    values.len()
                )));
            }
            let _ = writeln!(out, "SCALARS {name} double 1\nLOOKUP_TABLE default");
            for v in *values {
                let _ = writeln!(out, "{v:e}");
            }
        }
    }
    Ok(out)
}

/// Writes `contents` through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::invalid(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Writes the mesh and fields to `path`.
pub fn write(path: &Path, mesh: &Mesh, solution: Option<&MixedSolution>, cell_data: &[(&str, &[f64])]) -> Result<()> {
    let doc = render(mesh, solution, cell_data, "darcyflow")?;
    write_atomic(path, doc.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_quad, generate_tri, AxisBox};
    use crate::Vec3;
    use std::sync::Arc;

    #[test]
    fn section_order_and_counts() {
        let mesh = Arc::new(generate_quad(2, 1, AxisBox::unit_square(), 1).unwrap());
        let sol = MixedSolution::interpolate(mesh.clone(), |x| Vec3::new(x.x, 1.0, 0.0), |x| x.y);
        let doc = render(&mesh, Some(&sol), &[("permeability", &[1.0, 2.0])], "t").unwrap();
        let lines: Vec<&str> = doc.lines().collect();
        assert_eq!(lines[0], "# vtk DataFile Version 3.0");
        assert_eq!(lines[2], "ASCII");
        assert_eq!(lines[3], "DATASET UNSTRUCTURED_GRID");
        assert_eq!(lines[4], "POINTS 6 double");
        assert_eq!(lines[11], "CELLS 2 10");
        assert_eq!(lines[14], "CELL_TYPES 2");
        assert_eq!(lines[15], "9");
        let pos = |s: &str| doc.find(s).unwrap();
        assert!(pos("POINT_DATA 6") < pos("VECTORS velocity"));
        assert!(pos("VECTORS velocity") < pos("SCALARS pressure"));
        assert!(pos("SCALARS pressure") < pos("CELL_DATA 2"));
        assert!(pos("CELL_DATA 2") < pos("SCALARS permeability"));
    }

    #[test]
    fn quad9_reordered() {
        let mesh = generate_quad(1, 1, AxisBox::unit_square(), 2).unwrap();
        let doc = render(&mesh, None, &[], "").unwrap();
        let cell = doc.lines().skip_while(|l| !l.starts_with("CELLS")).nth(1).unwrap();
        let ids: Vec<usize> = cell.split_whitespace().skip(1).map(|s| s.parse().unwrap()).collect();
        let conn = mesh.element(0);
        assert_eq!(ids, QUAD9_TO_VTK.iter().map(|&i| conn[i]).collect::<Vec<_>>());
        let xs: Vec<Vec3> = ids.iter().map(|&i| mesh.nodes()[i]).collect();
        assert_eq!((xs[0].x, xs[0].y), (0.0, 0.0));
        assert_eq!((xs[2].x, xs[2].y), (1.0, 1.0));
        assert_eq!((xs[4].x, xs[4].y), (0.5, 0.0));
        assert_eq!((xs[8].x, xs[8].y), (0.5, 0.5));
        assert!(doc.contains("CELL_TYPES 1\n28\n"));
    }

    #[test]
    fn rejects_bad_cell_arrays() {
        let mesh = generate_tri(1, 1, AxisBox::unit_square()).unwrap();
        assert!(render(&mesh, None, &[("k", &[1.0])], "").is_err());
        assert!(render(&mesh, None, &[("bad name", &[1.0, 1.0])], "").is_err());
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.vtk");
        std::fs::write(&path, "old").unwrap();
        let mesh = generate_tri(1, 1, AxisBox::unit_square()).unwrap();
        write(&path, &mesh, None, &[]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# vtk"));
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
