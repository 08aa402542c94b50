//! Reference elements, quadrature rules and isoparametric evaluation.
//!
//! Conventions: quadrilaterals and bricks live on `[-1, 1]^d`; the triangle
//! is the unit triangle with vertices `(0,0)`, `(1,0)`, `(0,1)`, so an
//! affine triangle has `det J` equal to twice its area.
//!
//! Node orderings:
//!
//! * T3: counter-clockwise vertices.
//! * Q4: `(-1,-1)`, `(1,-1)`, `(1,1)`, `(-1,1)`.
//! * Q9: tensor-product ordering, node `i + 3 j` sits at `(xi_i, eta_j)`
//!   with `xi, eta` taken from `{-1, 0, 1}`.
//! * B8: the Q4 ordering at `zeta = -1`, then again at `zeta = +1`.

use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix3;

use crate::{Error, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementType {
    Tri3,
    Quad4,
    Quad9,
    Hex8,
}

impl ElementType {
    pub fn dim(self) -> usize {
        match self {
            ElementType::Tri3 | ElementType::Quad4 | ElementType::Quad9 => 2,
            ElementType::Hex8 => 3,
        }
    }

    pub fn nodes_per_element(self) -> usize {
        match self {
            ElementType::Tri3 => 3,
            ElementType::Quad4 => 4,
            ElementType::Quad9 => 9,
            ElementType::Hex8 => 8,
        }
    }

    pub fn num_facets(self) -> usize {
        match self {
            ElementType::Tri3 => 3,
            ElementType::Quad4 | ElementType::Quad9 => 4,
            ElementType::Hex8 => 6,
        }
    }

    /// Local node ids on a facet (all nodes, including mid-side nodes).
    pub fn facet_nodes(self, facet: usize) -> &'static [usize] {
        const T3: [&[usize]; 3] = [&[0, 1], &[1, 2], &[2, 0]];
        const Q4: [&[usize]; 4] = [&[0, 1], &[1, 2], &[2, 3], &[3, 0]];
        const Q9: [&[usize]; 4] = [&[0, 1, 2], &[2, 5, 8], &[8, 7, 6], &[6, 3, 0]];
        const B8: [&[usize]; 6] = [
            &[0, 3, 7, 4],
            &[1, 2, 6, 5],
            &[0, 1, 5, 4],
            &[3, 2, 6, 7],
            &[0, 1, 2, 3],
            &[4, 5, 6, 7],
        ];
        match self {
            ElementType::Tri3 => T3[facet],
            ElementType::Quad4 => Q4[facet],
            ElementType::Quad9 => Q9[facet],
            ElementType::Hex8 => B8[facet],
        }
    }

    /// Vertex nodes of a facet; these identify a facet shared by two elements.
    pub fn facet_vertices(self, facet: usize) -> &'static [usize] {
        const Q9: [&[usize]; 4] = [&[0, 2], &[2, 8], &[8, 6], &[6, 0]];
        match self {
            ElementType::Quad9 => Q9[facet],
            other => other.facet_nodes(facet),
        }
    }

    /// Vertex nodes of the element.
    pub fn vertices(self) -> &'static [usize] {
        match self {
            ElementType::Tri3 => &[0, 1, 2],
            ElementType::Quad4 => &[0, 1, 2, 3],
            ElementType::Quad9 => &[0, 2, 8, 6],
            ElementType::Hex8 => &[0, 1, 2, 3, 4, 5, 6, 7],
        }
    }

    /// Measure of the reference element.
    pub fn reference_measure(self) -> f64 {
        match self {
            ElementType::Tri3 => 0.5,
            ElementType::Quad4 | ElementType::Quad9 => 4.0,
            ElementType::Hex8 => 8.0,
        }
    }

    /// Reference coordinates of the element nodes.
    pub fn reference_nodes(self) -> Vec<Vec3> {
        match self {
            ElementType::Tri3 => vec![
                Vec3::new(0.0, 0.0, 0.0),
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
            ],
            ElementType::Quad4 => QUAD4_SIGNS
                .iter()
                .map(|&(a, b)| Vec3::new(a, b, 0.0))
                .collect(),
            ElementType::Quad9 => (0..9)
                .map(|a| Vec3::new(QUAD9_COORD[a % 3], QUAD9_COORD[a / 3], 0.0))
                .collect(),
            ElementType::Hex8 => HEX8_SIGNS
                .iter()
                .map(|&(a, b, c)| Vec3::new(a, b, c))
                .collect(),
        }
    }
}

impl fmt::Display for ElementType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ElementType::Tri3 => "T3",
            ElementType::Quad4 => "Q4",
            ElementType::Quad9 => "Q9",
            ElementType::Hex8 => "B8",
        };
        f.write_str(s)
    }
}

impl FromStr for ElementType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "T3" | "TRI3" => Ok(ElementType::Tri3),
            "Q4" | "QUAD4" => Ok(ElementType::Quad4),
            "Q9" | "QUAD9" => Ok(ElementType::Quad9),
            "B8" | "H8" | "HEX8" => Ok(ElementType::Hex8),
            _ => Err(Error::UnsupportedElement(s.to_string())),
        }
    }
}

const QUAD4_SIGNS: [(f64, f64); 4] = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)];
const QUAD9_COORD: [f64; 3] = [-1.0, 0.0, 1.0];
const HEX8_SIGNS: [(f64, f64, f64); 8] = [
    (-1.0, -1.0, -1.0),
    (1.0, -1.0, -1.0),
    (1.0, 1.0, -1.0),
    (-1.0, 1.0, -1.0),
    (-1.0, -1.0, 1.0),
    (1.0, -1.0, 1.0),
    (1.0, 1.0, 1.0),
    (-1.0, 1.0, 1.0),
];

/// Shape function values and reference gradients at a point.
#[derive(Debug, Clone)]
pub struct ShapeValues {
    pub values: Vec<f64>,
    pub ref_grads: Vec<Vec3>,
}

fn quadratic_1d(t: f64) -> ([f64; 3], [f64; 3]) {
    (
        [0.5 * t * (t - 1.0), 1.0 - t * t, 0.5 * t * (t + 1.0)],
        [t - 0.5, -2.0 * t, t + 0.5],
    )
}

/// Lagrange shape functions and their reference gradients.
pub fn shape(elem: ElementType, xi: &Vec3) -> ShapeValues {
    let (r, s, t) = (xi.x, xi.y, xi.z);
    match elem {
        ElementType::Tri3 => ShapeValues {
            values: vec![1.0 - r - s, r, s],
            ref_grads: vec![
                Vec3::new(-1.0, -1.0, 0.0),
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
            ],
        },
        ElementType::Quad4 => {
            let mut values = Vec::with_capacity(4);
            let mut ref_grads = Vec::with_capacity(4);
            for &(a, b) in &QUAD4_SIGNS {
                values.push(0.25 * (1.0 + a * r) * (1.0 + b * s));
                ref_grads.push(Vec3::new(
                    0.25 * a * (1.0 + b * s),
                    0.25 * b * (1.0 + a * r),
                    0.0,
                ));
            }
            ShapeValues { values, ref_grads }
        }
        ElementType::Quad9 => {
            let (lr, dr) = quadratic_1d(r);
            let (ls, ds) = quadratic_1d(s);
            let mut values = Vec::with_capacity(9);
            let mut ref_grads = Vec::with_capacity(9);
            for j in 0..3 {
                for i in 0..3 {
                    values.push(lr[i] * ls[j]);
                    ref_grads.push(Vec3::new(dr[i] * ls[j], lr[i] * ds[j], 0.0));
                }
            }
            ShapeValues { values, ref_grads }
        }
        ElementType::Hex8 => {
            let mut values = Vec::with_capacity(8);
            let mut ref_grads = Vec::with_capacity(8);
            for &(a, b, c) in &HEX8_SIGNS {
                let (fa, fb, fc) = (1.0 + a * r, 1.0 + b * s, 1.0 + c * t);
                values.push(0.125 * fa * fb * fc);
                ref_grads.push(Vec3::new(
                    0.125 * a * fb * fc,
                    0.125 * b * fa * fc,
                    0.125 * c * fa * fb,
                ));
            }
            ShapeValues { values, ref_grads }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraturePoint {
    pub xi: Vec3,
    pub weight: f64,
}

/// Gauss–Legendre points and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1, "Gauss rule needs at least one point");
    let mut rule = vec![(0.0, 0.0); n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pnm1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule[i] = (-x, w);
        rule[n - 1 - i] = (x, w);
    }
    if n % 2 == 1 {
        rule[n / 2].0 = 0.0;
    }
    rule
}

/// Element quadrature used for the element matrices: 3-point rule on T3,
/// 2x2 Gauss on Q4, 3x3 on Q9, 2x2x2 on B8.
pub fn quadrature(elem: ElementType) -> Vec<QuadraturePoint> {
    match elem {
        ElementType::Tri3 => [(1.0 / 6.0, 1.0 / 6.0), (2.0 / 3.0, 1.0 / 6.0), (1.0 / 6.0, 2.0 / 3.0)]
            .iter()
            .map(|&(r, s)| QuadraturePoint {
                xi: Vec3::new(r, s, 0.0),
                weight: 1.0 / 6.0,
            })
            .collect(),
        ElementType::Quad4 | ElementType::Hex8 => quadrature_with_points(elem, 2),
        ElementType::Quad9 => quadrature_with_points(elem, 3),
    }
}

/// Higher-order quadrature with `n` Gauss points per direction, used for
/// error norms and other post-processing integrals. Triangles use a
/// collapsed (Duffy) product rule.
pub fn quadrature_with_points(elem: ElementType, n: usize) -> Vec<QuadraturePoint> {
    let g = gauss_legendre(n);
    let mut out = Vec::new();
    match elem {
        ElementType::Tri3 => {
            for &(a, wa) in &g {
                for &(b, wb) in &g {
                    let u = 0.5 * (a + 1.0);
                    let v = 0.5 * (b + 1.0);
                    out.push(QuadraturePoint {
                        xi: Vec3::new(u, v * (1.0 - u), 0.0),
                        weight: 0.25 * wa * wb * (1.0 - u),
                    });
                }
            }
        }
        ElementType::Quad4 | ElementType::Quad9 => {
            for &(b, wb) in &g {
                for &(a, wa) in &g {
                    out.push(QuadraturePoint {
                        xi: Vec3::new(a, b, 0.0),
                        weight: wa * wb,
                    });
                }
            }
        }
        ElementType::Hex8 => {
            for &(c, wc) in &g {
                for &(b, wb) in &g {
                    for &(a, wa) in &g {
                        out.push(QuadraturePoint {
                            xi: Vec3::new(a, b, c),
                            weight: wa * wb * wc,
                        });
                    }
                }
            }
        }
    }
    out
}

/// A quadrature point on a reference facet. `weight` is measured in the
/// reference facet and `ref_normal` is the unit outward reference normal.
#[derive(Debug, Clone, Copy)]
pub struct FacetPoint {
    pub xi: Vec3,
    pub weight: f64,
    pub ref_normal: Vec3,
}

pub fn facet_quadrature(elem: ElementType, facet: usize, n: usize) -> Vec<FacetPoint> {
    let g = gauss_legendre(n);
    match elem {
        ElementType::Tri3 => {
            let (start, end, normal, length) = match facet {
                0 => ([0.0, 0.0], [1.0, 0.0], Vec3::new(0.0, -1.0, 0.0), 1.0),
                1 => (
                    [1.0, 0.0],
                    [0.0, 1.0],
                    Vec3::new(1.0, 1.0, 0.0) / 2f64.sqrt(),
                    2f64.sqrt(),
                ),
                _ => ([0.0, 1.0], [0.0, 0.0], Vec3::new(-1.0, 0.0, 0.0), 1.0),
            };
            g.iter()
                .map(|&(a, w)| {
                    let t = 0.5 * (a + 1.0);
                    FacetPoint {
                        xi: Vec3::new(
                            start[0] + t * (end[0] - start[0]),
                            start[1] + t * (end[1] - start[1]),
                            0.0,
                        ),
                        weight: 0.5 * w * length,
                        ref_normal: normal,
                    }
                })
                .collect()
        }
        ElementType::Quad4 | ElementType::Quad9 => {
            // bottom, right, top, left
            let (axis, side) = [(1, -1.0), (0, 1.0), (1, 1.0), (0, -1.0)][facet];
            g.iter()
                .map(|&(a, w)| {
                    let mut xi = Vec3::zeros();
                    xi[axis] = side;
                    xi[1 - axis] = a;
                    let mut n = Vec3::zeros();
                    n[axis] = side;
                    FacetPoint {
                        xi,
                        weight: w,
                        ref_normal: n,
                    }
                })
                .collect()
        }
        ElementType::Hex8 => {
            let (axis, side) = [(0, -1.0), (0, 1.0), (1, -1.0), (1, 1.0), (2, -1.0), (2, 1.0)][facet];
            let (u, v) = match axis {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let mut out = Vec::with_capacity(n * n);
            for &(b, wb) in &g {
                for &(a, wa) in &g {
                    let mut xi = Vec3::zeros();
                    xi[axis] = side;
                    xi[u] = a;
                    xi[v] = b;
                    let mut nrm = Vec3::zeros();
                    nrm[axis] = side;
                    out.push(FacetPoint {
                        xi,
                        weight: wa * wb,
                        ref_normal: nrm,
                    });
                }
            }
            out
        }
    }
}

/// Shape data mapped to a physical point of one element.
#[derive(Debug, Clone)]
pub struct ElementEval {
    pub values: Vec<f64>,
    /// Physical gradients of the shape functions.
    pub grads: Vec<Vec3>,
    pub det_j: f64,
    pub x: Vec3,
    pub(crate) inv_jt: Matrix3<f64>,
}

impl ElementEval {
    /// Map a reference facet normal to the physical unit outward normal and
    /// the surface-measure scaling `dGamma / dGamma_ref` (Nanson's formula).
    pub fn facet_normal(&self, ref_normal: &Vec3) -> (Vec3, f64) {
        let m = self.inv_jt * ref_normal;
        let norm = m.norm();
        (m / norm, self.det_j * norm)
    }
}

/// Isoparametric evaluation at reference coordinates `xi` for an element
/// whose node coordinates are `coords`.
pub fn eval_element_at(elem: ElementType, coords: &[Vec3], xi: &Vec3) -> Result<ElementEval> {
    let n = elem.nodes_per_element();
    if coords.len() != n {
        return Err(Error::invalid(format!(
            "{elem} element needs {n} nodes, got {}",
            coords.len()
        )));
    }
    let ShapeValues { values, ref_grads } = shape(elem, xi);
    let dim = elem.dim();
    let mut jac = Matrix3::<f64>::identity();
    let mut x = Vec3::zeros();
    for a in 0..n {
        x += coords[a] * values[a];
        for i in 0..dim {
            for j in 0..dim {
                // J_ij = d x_i / d xi_j
                jac[(i, j)] += coords[a][i] * ref_grads[a][j];
            }
        }
    }
    for i in 0..dim {
        jac[(i, i)] -= 1.0;
    }
    let det_j = jac.determinant();
    let scale = coords
        .iter()
        .map(|c| (c - coords[0]).norm())
        .fold(0.0, f64::max)
        .powi(dim as i32);
    if !(det_j > 1e-14 * scale) {
        return Err(Error::DegenerateElement { elem: 0, det_j });
    }
    let inv_j = jac.try_inverse().ok_or(Error::DegenerateElement { elem: 0, det_j })?;
    let inv_jt = inv_j.transpose();
    let grads = ref_grads.iter().map(|g| inv_jt * g).collect();
    Ok(ElementEval {
        values,
        grads,
        det_j,
        x,
        inv_jt,
    })
}

/// Value and gradient of a scalar nodal field at an evaluated point.
pub fn interpolate(nodal: &[f64], eval: &ElementEval) -> Result<(f64, Vec3)> {
    if nodal.len() != eval.values.len() {
        return Err(Error::invalid(format!(
            "field has {} nodal values, element has {} nodes",
            nodal.len(),
            eval.values.len()
        )));
    }
    let mut value = 0.0;
    let mut grad = Vec3::zeros();
    for ((u, n), g) in nodal.iter().zip(&eval.values).zip(&eval.grads) {
        value += u * n;
        grad += g * *u;
    }
    Ok((value, grad))
}

/// Value and gradient (row `i` holds the gradient of component `i`) of a
/// vector nodal field stored node-major with `nd` components.
pub fn interpolate_vector(nodal: &[f64], nd: usize, eval: &ElementEval) -> Result<(Vec3, Matrix3<f64>)> {
    let n = eval.values.len();
    if nodal.len() != n * nd {
        return Err(Error::invalid(format!(
            "vector field has {} values, expected {}",
            nodal.len(),
            n * nd
        )));
    }
    let mut value = Vec3::zeros();
    let mut grad = Matrix3::zeros();
    for a in 0..n {
        for c in 0..nd {
            let u = nodal[a * nd + c];
            value[c] += u * eval.values[a];
            for j in 0..3 {
                grad[(c, j)] += u * eval.grads[a][j];
            }
        }
    }
    Ok((value, grad))
}
