//! Structured meshes over axis-aligned boxes.
//!
//! Boundary facets carry exactly one string tag. Generated meshes tag the
//! box sides `left`/`right` (x), `bottom`/`top` (y) and, in 3D,
//! `back`/`front` (z). Facets exposed by [`carve_holes`] are tagged
//! [`IMPERVIOUS`]. Named node sets hold wells and pressure pins.

use std::collections::{BTreeMap, HashMap};

use crate::fem::{self, ElementType};
use crate::{Error, Result, Vec3};

pub const IMPERVIOUS: &str = "impervious";

/// Axis-aligned box. In 2D the z extents are ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisBox {
    pub min: Vec3,
    pub max: Vec3,
}

impl AxisBox {
    pub fn new_2d(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        AxisBox {
            min: Vec3::new(x0, y0, 0.0),
            max: Vec3::new(x1, y1, 0.0),
        }
    }

    pub fn new_3d(min: [f64; 3], max: [f64; 3]) -> Self {
        AxisBox {
            min: Vec3::from(min),
            max: Vec3::from(max),
        }
    }

    pub fn unit_square() -> Self {
        Self::new_2d(0.0, 1.0, 0.0, 1.0)
    }

    pub fn unit_cube() -> Self {
        Self::new_3d([0.0; 3], [1.0; 3])
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.max[axis] - self.min[axis]
    }

    pub fn measure(&self, dim: usize) -> f64 {
        (0..dim).map(|a| self.extent(a)).product()
    }

    pub fn contains(&self, x: &Vec3, dim: usize, tol: f64) -> bool {
        (0..dim).all(|a| x[a] >= self.min[a] - tol && x[a] <= self.max[a] + tol)
    }

    fn check(&self, dim: usize) -> Result<()> {
        for a in 0..dim {
            let e = self.extent(a);
            if !(e > 0.0) || !e.is_finite() {
                return Err(Error::invalid(format!("box has non-positive extent along axis {a}")));
            }
        }
        Ok(())
    }

    fn overlap(&self, other: &AxisBox, dim: usize) -> f64 {
        (0..dim)
            .map(|a| (self.max[a].min(other.max[a]) - self.min[a].max(other.min[a])).max(0.0))
            .product()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryFacet {
    pub elem: usize,
    pub local: usize,
    pub tag: String,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    elem_type: ElementType,
    nodes: Vec<Vec3>,
    elements: Vec<Vec<usize>>,
    facets: Vec<BoundaryFacet>,
    node_sets: BTreeMap<String, Vec<usize>>,
    h: f64,
}

impl Mesh {
    /// Build a mesh from raw data and check its invariants.
    pub fn new(
        elem_type: ElementType,
        nodes: Vec<Vec3>,
        elements: Vec<Vec<usize>>,
        facets: Vec<BoundaryFacet>,
        h: f64,
    ) -> Result<Self> {
        let mesh = Mesh {
            elem_type,
            nodes,
            elements,
            facets,
            node_sets: BTreeMap::new(),
            h,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn dim(&self) -> usize {
        self.elem_type.dim()
    }

    pub fn elem_type(&self) -> ElementType {
        self.elem_type
    }

    pub fn nodes(&self) -> &[Vec3] {
        &self.nodes
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn elements(&self) -> &[Vec<usize>] {
        &self.elements
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, e: usize) -> &[usize] {
        &self.elements[e]
    }

    pub fn element_coords(&self, e: usize) -> Vec<Vec3> {
        self.elements[e].iter().map(|&n| self.nodes[n]).collect()
    }

    pub fn facets(&self) -> &[BoundaryFacet] {
        &self.facets
    }

    pub fn facets_tagged<'a>(&'a self, tag: &'a str) -> impl Iterator<Item = &'a BoundaryFacet> + 'a {
        self.facets.iter().filter(move |f| f.tag == tag)
    }

    pub fn tags(&self) -> Vec<String> {
        let mut tags: Vec<String> = self.facets.iter().map(|f| f.tag.clone()).collect();
        tags.sort();
        tags.dedup();
        tags
    }

    /// Characteristic mesh size: cell edge for quadrilaterals and bricks,
    /// short edge for triangles.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn node_set(&self, name: &str) -> Option<&[usize]> {
        self.node_sets.get(name).map(Vec::as_slice)
    }

    pub fn node_sets(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.node_sets
    }

    /// Global node ids on a boundary facet.
    pub fn facet_nodes(&self, facet: &BoundaryFacet) -> Vec<usize> {
        self.elem_type
            .facet_nodes(facet.local)
            .iter()
            .map(|&a| self.elements[facet.elem][a])
            .collect()
    }

    pub fn facet_centroid(&self, facet: &BoundaryFacet) -> Vec3 {
        let verts = self.elem_type.facet_vertices(facet.local);
        verts
            .iter()
            .map(|&a| self.nodes[self.elements[facet.elem][a]])
            .sum::<Vec3>()
            / verts.len() as f64
    }

    pub fn element_centroid(&self, e: usize) -> Vec3 {
        let verts = self.elem_type.vertices();
        verts.iter().map(|&a| self.nodes[self.elements[e][a]]).sum::<Vec3>() / verts.len() as f64
    }

    pub fn element_eval(&self, e: usize, xi: &Vec3) -> Result<fem::ElementEval> {
        fem::eval_element_at(self.elem_type, &self.element_coords(e), xi).map_err(|err| match err {
            Error::DegenerateElement { det_j, .. } => Error::DegenerateElement { elem: e, det_j },
            other => other,
        })
    }

    pub fn element_volume(&self, e: usize) -> Result<f64> {
        let coords = self.element_coords(e);
        let mut vol = 0.0;
        for q in fem::quadrature(self.elem_type) {
            vol += q.weight * fem::eval_element_at(self.elem_type, &coords, &q.xi)?.det_j;
        }
        Ok(vol)
    }

    pub fn total_volume(&self) -> Result<f64> {
        (0..self.num_elements()).map(|e| self.element_volume(e)).sum()
    }

    /// Nodes within `1e-9 * h` of a point.
    pub fn nodes_at(&self, point: &Vec3) -> Vec<usize> {
        let tol = 1e-9 * self.h;
        self.nodes_where(|x| (x - point).norm() <= tol)
    }

    pub fn nodes_where(&self, pred: impl Fn(&Vec3) -> bool) -> Vec<usize> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, x)| pred(x))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn with_node_set(mut self, name: impl Into<String>, nodes: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = nodes.iter().find(|&&n| n >= self.nodes.len()) {
            return Err(Error::invalid(format!("node set refers to missing node {bad}")));
        }
        self.node_sets.insert(name.into(), nodes);
        Ok(self)
    }

    /// Re-tag every boundary facet whose centroid satisfies `pred`.
    pub fn retag_facets(mut self, new_tag: &str, pred: impl Fn(&BoundaryFacet, &Vec3) -> bool) -> Self {
        let centroids: Vec<Vec3> = self.facets.iter().map(|f| self.facet_centroid(f)).collect();
        for (f, c) in self.facets.iter_mut().zip(&centroids) {
            if pred(f, c) {
                f.tag = new_tag.to_string();
            }
        }
        self
    }

    /// Check connectivity, boundary facets and Jacobians.
    pub fn validate(&self) -> Result<()> {
        let npe = self.elem_type.nodes_per_element();
        let mut used = vec![false; self.nodes.len()];
        for (e, conn) in self.elements.iter().enumerate() {
            if conn.len() != npe {
                return Err(Error::invalid(format!("element {e} has {} nodes, expected {npe}", conn.len())));
            }
            for &n in conn {
                if n >= self.nodes.len() {
                    return Err(Error::invalid(format!("element {e} refers to missing node {n}")));
                }
                used[n] = true;
            }
        }
        if let Some(orphan) = used.iter().position(|u| !u) {
            return Err(Error::invalid(format!("node {orphan} belongs to no element")));
        }
        for e in 0..self.elements.len() {
            for q in fem::quadrature(self.elem_type) {
                self.element_eval(e, &q.xi)?;
            }
        }
        let exposed = exposed_facets(self.elem_type, &self.elements);
        let mut tagged: HashMap<(usize, usize), usize> = HashMap::new();
        for f in &self.facets {
            *tagged.entry((f.elem, f.local)).or_default() += 1;
        }
        for (key, count) in &tagged {
            if *count != 1 {
                return Err(Error::invalid(format!("facet {key:?} carries {count} tags")));
            }
            if !exposed.contains(key) {
                return Err(Error::invalid(format!("facet {key:?} is not on the boundary")));
            }
        }
        if let Some(missing) = exposed.iter().find(|k| !tagged.contains_key(k)) {
            return Err(Error::invalid(format!("boundary facet {missing:?} is untagged")));
        }
        Ok(())
    }
}

/// Facets `(elem, local)` not shared with another element, sorted.
fn exposed_facets(elem_type: ElementType, elements: &[Vec<usize>]) -> Vec<(usize, usize)> {
    let mut seen: HashMap<Vec<usize>, Vec<(usize, usize)>> = HashMap::new();
    for (e, conn) in elements.iter().enumerate() {
        for f in 0..elem_type.num_facets() {
            let mut key: Vec<usize> = elem_type.facet_vertices(f).iter().map(|&a| conn[a]).collect();
            key.sort_unstable();
            seen.entry(key).or_default().push((e, f));
        }
    }
    let mut out: Vec<(usize, usize)> = seen
        .into_values()
        .filter(|v| v.len() == 1)
        .map(|v| v[0])
        .collect();
    out.sort_unstable();
    out
}

fn side_tag(axis: usize, upper: bool) -> &'static str {
    match (axis, upper) {
        (0, false) => "left",
        (0, true) => "right",
        (1, false) => "bottom",
        (1, true) => "top",
        (_, false) => "back",
        (_, true) => "front",
    }
}

/// Tag every exposed facet by the box side its centroid lies on.
fn tag_box_sides(elem_type: ElementType, nodes: &[Vec3], elements: &[Vec<usize>], bx: &AxisBox) -> Result<Vec<BoundaryFacet>> {
    let dim = elem_type.dim();
    let tol = 1e-9 * (0..dim).map(|a| bx.extent(a)).fold(f64::INFINITY, f64::min);
    exposed_facets(elem_type, elements)
        .into_iter()
        .map(|(elem, local)| {
            let verts = elem_type.facet_vertices(local);
            let c = verts.iter().map(|&a| nodes[elements[elem][a]]).sum::<Vec3>() / verts.len() as f64;
            for axis in 0..dim {
                for upper in [false, true] {
                    let plane = if upper { bx.max[axis] } else { bx.min[axis] };
                    if (c[axis] - plane).abs() <= tol {
                        return Ok(BoundaryFacet {
                            elem,
                            local,
                            tag: side_tag(axis, upper).to_string(),
                        });
                    }
                }
            }
            Err(Error::invalid(format!("exposed facet {local} of element {elem} is off the box boundary")))
        })
        .collect()
}

fn check_counts(counts: &[usize]) -> Result<()> {
    if counts.contains(&0) {
        return Err(Error::invalid("number of subdivisions must be at least one"));
    }
    Ok(())
}

fn grid_nodes_2d(nx: usize, ny: usize, bx: &AxisBox) -> Vec<Vec3> {
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            nodes.push(Vec3::new(
                bx.min.x + bx.extent(0) * i as f64 / nx as f64,
                bx.min.y + bx.extent(1) * j as f64 / ny as f64,
                0.0,
            ));
        }
    }
    nodes
}

/// Structured Q4 (`order == 1`) or Q9 (`order == 2`) mesh. Nodes are numbered
/// row by row with x running fastest.
pub fn generate_quad(nx: usize, ny: usize, bx: AxisBox, order: usize) -> Result<Mesh> {
    check_counts(&[nx, ny])?;
    bx.check(2)?;
    let elem_type = match order {
        1 => ElementType::Quad4,
        2 => ElementType::Quad9,
        _ => return Err(Error::invalid(format!("quadrilateral order must be 1 or 2, got {order}"))),
    };
    let (px, py) = (order * nx, order * ny);
    let nodes = grid_nodes_2d(px, py, &bx);
    let id = |i: usize, j: usize| i + j * (px + 1);
    let mut elements = Vec::with_capacity(nx * ny);
    for ey in 0..ny {
        for ex in 0..nx {
            let (i, j) = (order * ex, order * ey);
            let conn = if order == 1 {
                vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]
            } else {
                (0..9).map(|a| id(i + a % 3, j + a / 3)).collect()
            };
            elements.push(conn);
        }
    }
    let facets = tag_box_sides(elem_type, &nodes, &elements, &bx)?;
    let h = (bx.extent(0) / nx as f64).max(bx.extent(1) / ny as f64);
    Mesh::new(elem_type, nodes, elements, facets, h)
}

/// Structured T3 mesh: every cell is split along its `(i+1,j)`–`(i,j+1)`
/// diagonal.
pub fn generate_tri(nx: usize, ny: usize, bx: AxisBox) -> Result<Mesh> {
    check_counts(&[nx, ny])?;
    bx.check(2)?;
    let nodes = grid_nodes_2d(nx, ny, &bx);
    let id = |i: usize, j: usize| i + j * (nx + 1);
    let mut elements = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            elements.push(vec![id(i, j), id(i + 1, j), id(i, j + 1)]);
            elements.push(vec![id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    let facets = tag_box_sides(ElementType::Tri3, &nodes, &elements, &bx)?;
    let h = (bx.extent(0) / nx as f64).min(bx.extent(1) / ny as f64);
    Mesh::new(ElementType::Tri3, nodes, elements, facets, h)
}

/// Structured eight-node brick mesh.
pub fn generate_hex(nx: usize, ny: usize, nz: usize, bx: AxisBox) -> Result<Mesh> {
    check_counts(&[nx, ny, nz])?;
    bx.check(3)?;
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1) * (nz + 1));
    for k in 0..=nz {
        for j in 0..=ny {
            for i in 0..=nx {
                nodes.push(Vec3::new(
                    bx.min.x + bx.extent(0) * i as f64 / nx as f64,
                    bx.min.y + bx.extent(1) * j as f64 / ny as f64,
                    bx.min.z + bx.extent(2) * k as f64 / nz as f64,
                ));
            }
        }
    }
    let id = |i: usize, j: usize, k: usize| i + (nx + 1) * (j + (ny + 1) * k);
    let mut elements = Vec::with_capacity(nx * ny * nz);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                elements.push(vec![
                    id(i, j, k),
                    id(i + 1, j, k),
                    id(i + 1, j + 1, k),
                    id(i, j + 1, k),
                    id(i, j, k + 1),
                    id(i + 1, j, k + 1),
                    id(i + 1, j + 1, k + 1),
                    id(i, j + 1, k + 1),
                ]);
            }
        }
    }
    let facets = tag_box_sides(ElementType::Hex8, &nodes, &elements, &bx)?;
    let h = (0..3)
        .map(|a| bx.extent(a) / [nx, ny, nz][a] as f64)
        .fold(0.0, f64::max);
    Mesh::new(ElementType::Hex8, nodes, elements, facets, h)
}

/// Remove the elements inside each hole box. Facets exposed by the removal
/// are tagged [`IMPERVIOUS`]; every hole must align with element boundaries.
pub fn carve_holes(mesh: &Mesh, holes: &[AxisBox]) -> Result<Mesh> {
    if holes.is_empty() {
        return Ok(mesh.clone());
    }
    let dim = mesh.dim();
    let tol = 1e-9 * mesh.h;
    let mut removed = vec![false; mesh.num_elements()];
    for hole in holes {
        hole.check(dim)?;
        let mut hit = false;
        for (e, conn) in mesh.elements.iter().enumerate() {
            let verts = mesh.elem_type.vertices();
            let inside = verts
                .iter()
                .filter(|&&a| hole.contains(&mesh.nodes[conn[a]], dim, tol))
                .count();
            let c = mesh.element_centroid(e);
            let strictly = (0..dim).all(|a| c[a] > hole.min[a] + tol && c[a] < hole.max[a] - tol);
            if strictly && inside != verts.len() {
                return Err(Error::invalid(format!(
                    "hole {:?}-{:?} is not aligned with the element grid",
                    hole.min, hole.max
                )));
            }
            if strictly {
                removed[e] = true;
                hit = true;
            }
        }
        if !hit {
            return Err(Error::invalid(format!(
                "hole {:?}-{:?} contains no whole element",
                hole.min, hole.max
            )));
        }
    }
    // Alignment: the removed elements must tile the hole volume exactly.
    let removed_volume: f64 = (0..mesh.num_elements())
        .filter(|&e| removed[e])
        .map(|e| mesh.element_volume(e))
        .sum::<Result<f64>>()?;
    let mut hole_volume = 0.0;
    for (i, a) in holes.iter().enumerate() {
        hole_volume += a.measure(dim);
        for b in &holes[i + 1..] {
            hole_volume -= a.overlap(b, dim);
        }
    }
    if (removed_volume - hole_volume).abs() > 1e-9 * hole_volume.max(1.0) {
        return Err(Error::invalid("hole boxes are not aligned with the element grid"));
    }
    if removed.iter().all(|&r| r) {
        return Err(Error::invalid("holes remove every element"));
    }

    let mut new_node = vec![usize::MAX; mesh.nodes.len()];
    let mut nodes = Vec::new();
    let mut elements = Vec::new();
    let mut new_elem = vec![usize::MAX; mesh.num_elements()];
    for (e, conn) in mesh.elements.iter().enumerate() {
        if removed[e] {
            continue;
        }
        new_elem[e] = elements.len();
        elements.push(
            conn.iter()
                .map(|&n| {
                    if new_node[n] == usize::MAX {
                        new_node[n] = nodes.len();
                        nodes.push(mesh.nodes[n]);
                    }
                    new_node[n]
                })
                .collect::<Vec<_>>(),
        );
    }
    let old_tags: HashMap<(usize, usize), &str> = mesh
        .facets
        .iter()
        .filter(|f| !removed[f.elem])
        .map(|f| ((new_elem[f.elem], f.local), f.tag.as_str()))
        .collect();
    let facets = exposed_facets(mesh.elem_type, &elements)
        .into_iter()
        .map(|key| BoundaryFacet {
            elem: key.0,
            local: key.1,
            tag: old_tags.get(&key).copied().unwrap_or(IMPERVIOUS).to_string(),
        })
        .collect();
    let mut out = Mesh::new(mesh.elem_type, nodes, elements, facets, mesh.h)?;
    for (name, set) in &mesh.node_sets {
        let kept: Vec<usize> = set.iter().filter(|&&n| new_node[n] != usize::MAX).map(|&n| new_node[n]).collect();
        out.node_sets.insert(name.clone(), kept);
    }
    Ok(out)
}

/// Piecewise-constant permeability over axis-aligned regions.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionField {
    regions: Vec<(AxisBox, f64)>,
    dim: usize,
}

impl RegionField {
    /// One value everywhere.
    pub fn uniform(k: f64) -> Result<Self> {
        Self::check_value(k)?;
        let inf = f64::INFINITY;
        Ok(RegionField {
            regions: vec![(AxisBox::new_3d([-inf; 3], [inf; 3]), k)],
            dim: 3,
        })
    }

    /// Regions that must tile `domain` without overlap.
    pub fn from_regions(domain: AxisBox, dim: usize, regions: Vec<(AxisBox, f64)>) -> Result<Self> {
        if regions.is_empty() {
            return Err(Error::invalid("permeability field needs at least one region"));
        }
        domain.check(dim)?;
        let mut covered = 0.0;
        for (i, (bx, k)) in regions.iter().enumerate() {
            bx.check(dim)?;
            Self::check_value(*k)?;
            let inside = (0..dim).all(|a| bx.min[a] >= domain.min[a] - 1e-12 && bx.max[a] <= domain.max[a] + 1e-12);
            if !inside {
                return Err(Error::invalid(format!("permeability region {i} leaves the domain")));
            }
            for (other, _) in &regions[i + 1..] {
                if bx.overlap(other, dim) > 1e-12 * domain.measure(dim) {
                    return Err(Error::invalid(format!("permeability region {i} overlaps another region")));
                }
            }
            covered += bx.measure(dim);
        }
        if (covered - domain.measure(dim)).abs() > 1e-9 * domain.measure(dim) {
            return Err(Error::invalid("permeability regions do not cover the domain"));
        }
        Ok(RegionField { regions, dim })
    }

    /// Horizontal layers stacked along y, listed bottom to top as
    /// `(thickness, permeability)`.
    pub fn layers(domain: AxisBox, layers: &[(f64, f64)]) -> Result<Self> {
        let mut y = domain.min.y;
        let mut regions = Vec::with_capacity(layers.len());
        for &(t, k) in layers {
            regions.push((AxisBox::new_2d(domain.min.x, domain.max.x, y, y + t), k));
            y += t;
        }
        Self::from_regions(domain, 2, regions)
    }

    fn check_value(k: f64) -> Result<()> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::invalid(format!("permeability must be positive, got {k}")));
        }
        Ok(())
    }

    pub fn regions(&self) -> &[(AxisBox, f64)] {
        &self.regions
    }

    pub fn value(&self, x: &Vec3) -> Result<f64> {
        let dim = self.dim;
        self.regions
            .iter()
            .find(|(bx, _)| bx.contains(x, dim, 1e-12))
            .map(|(_, k)| *k)
            .ok_or(Error::RegionLookup {
                x: x.x,
                y: x.y,
                z: x.z,
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn quad_counts() {
        let m = generate_quad(4, 4, AxisBox::unit_square(), 1).unwrap();
        assert_eq!((m.num_nodes(), m.num_elements()), (25, 16));
        let m = generate_quad(20, 20, AxisBox::unit_square(), 1).unwrap();
        assert_eq!(m.num_elements(), 400);
        let m = generate_quad(2, 2, AxisBox::unit_square(), 2).unwrap();
        assert_eq!((m.num_nodes(), m.num_elements()), (25, 4));
        assert_eq!(m.elem_type(), ElementType::Quad9);
        assert_eq!(m.facets().len(), 8);
    }

    #[test]
    fn tri_counts() {
        let m = generate_tri(4, 4, AxisBox::unit_square()).unwrap();
        assert_eq!((m.num_nodes(), m.num_elements()), (25, 32));
        let m = generate_tri(1, 1, AxisBox::unit_square()).unwrap();
        assert_eq!(m.num_elements(), 2);
        let shared: Vec<usize> = m.element(0).iter().filter(|n| m.element(1).contains(n)).copied().collect();
        assert_eq!(shared, vec![1, 2]);
        let m = generate_tri(64, 64, AxisBox::unit_square()).unwrap();
        assert_eq!(m.h(), 1.0 / 64.0);
    }

    #[test]
    fn hex_counts_and_jacobian() {
        let m = generate_hex(6, 6, 6, AxisBox::unit_cube()).unwrap();
        assert_eq!(m.num_elements(), 216);
        let m = generate_hex(1, 1, 1, AxisBox::unit_cube()).unwrap();
        assert_eq!((m.num_nodes(), m.num_elements()), (8, 1));
        assert_eq!(m.facets().len(), 6);
        let m = generate_hex(2, 1, 1, AxisBox::new_3d([0.0; 3], [2.0, 1.0, 1.0])).unwrap();
        for e in 0..2 {
            let ev = m.element_eval(e, &Vec3::new(0.3, -0.2, 0.5)).unwrap();
            assert!((ev.det_j - 0.125).abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_inputs() {
        assert!(generate_quad(0, 3, AxisBox::unit_square(), 1).is_err());
        assert!(generate_quad(3, 3, AxisBox::new_2d(0.0, 0.0, 0.0, 1.0), 1).is_err());
        assert!(generate_quad(3, 3, AxisBox::unit_square(), 3).is_err());
        assert!(generate_tri(2, 0, AxisBox::unit_square()).is_err());
        assert!(generate_hex(1, 1, 1, AxisBox::new_3d([0.0; 3], [1.0, -1.0, 1.0])).is_err());
    }

    #[test]
    fn tags_partition_boundary() {
        let m = generate_quad(3, 2, AxisBox::new_2d(0.0, 3.0, 0.0, 1.0), 2).unwrap();
        let count = |t: &str| m.facets_tagged(t).count();
        assert_eq!((count("left"), count("right"), count("bottom"), count("top")), (2, 2, 3, 3));
        let m = generate_hex(2, 3, 4, AxisBox::unit_cube()).unwrap();
        assert_eq!(m.facets().len(), 2 * (6 + 8 + 12));
        assert_eq!(m.facets_tagged("front").count(), 6);
    }

    #[test]
    fn carve_identity_and_single_hole() {
        let m = generate_quad(4, 4, AxisBox::unit_square(), 1).unwrap();
        let same = carve_holes(&m, &[]).unwrap();
        assert_eq!(same.num_elements(), 16);
        let holed = carve_holes(&m, &[AxisBox::new_2d(0.25, 0.5, 0.25, 0.5)]).unwrap();
        assert_eq!(holed.num_elements(), 15);
        assert_eq!(holed.facets_tagged(IMPERVIOUS).count(), 4);
        assert_eq!(holed.facets().len(), 20);
        assert!(rel(holed.total_volume().unwrap(), 1.0 - 1.0 / 16.0) < 1e-12);
    }

    #[test]
    fn carve_rejects_misaligned_hole() {
        let m = generate_quad(4, 4, AxisBox::unit_square(), 1).unwrap();
        let err = carve_holes(&m, &[AxisBox::new_2d(0.2, 0.5, 0.25, 0.5)]).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn carve_boundary_touching_hole_drops_orphans() {
        let m = generate_quad(4, 4, AxisBox::unit_square(), 2).unwrap();
        let holed = carve_holes(&m, &[AxisBox::new_2d(0.0, 0.25, 0.0, 0.5)]).unwrap();
        assert_eq!(holed.num_elements(), 14);
        holed.validate().unwrap();
        assert_eq!(holed.facets_tagged(IMPERVIOUS).count(), 3);
        // two node columns below the hole top are no longer referenced
        assert_eq!(holed.num_nodes(), 81 - 8);
    }

    #[test]
    fn region_lookup() {
        let dom = AxisBox::new_2d(0.0, 2.0, 0.0, 1.0);
        let f = RegionField::layers(dom, &[(0.5, 1.0), (0.5, 3.0)]).unwrap();
        assert_eq!(f.value(&Vec3::new(1.0, 0.2, 0.0)).unwrap(), 1.0);
        assert_eq!(f.value(&Vec3::new(1.0, 0.7, 0.0)).unwrap(), 3.0);
        assert!(matches!(
            f.value(&Vec3::new(3.0, 0.7, 0.0)),
            Err(Error::RegionLookup { .. })
        ));
        assert!(RegionField::layers(dom, &[(0.5, 1.0), (0.4, 3.0)]).is_err());
        assert!(RegionField::layers(dom, &[(0.5, 1.0), (0.5, -3.0)]).is_err());
        assert!(RegionField::from_regions(
            dom,
            2,
            vec![
                (AxisBox::new_2d(0.0, 2.0, 0.0, 0.6), 1.0),
                (AxisBox::new_2d(0.0, 2.0, 0.4, 1.0), 1.0)
            ]
        )
        .is_err());
    }
}
