//! Linearized element systems.
//!
//! Element unknowns are ordered velocity first, node-major
//! (`v0x, v0y, v1x, v1y, ...`), followed by one pressure per node. The
//! nonlinear drag term `alpha(v, p) v` is linearized about a frozen iterate
//! `(v_i, p_i)`:
//!
//! `alpha(v, p) v ~ alpha_i v + theta * [dalpha/dp_i (p - p_i) v_i + (dalpha/dv_i . (v - v_i)) v_i]`
//!
//! so the unknown-side part is `c_p v_i p + C_v v` and the known part
//! `c_p v_i p_i + C_v v_i` moves to the load.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, Matrix3};

use crate::drag::DragModel;
use crate::fem;
use crate::mesh::Mesh;
use crate::{Error, Result, Vec3};

/// Load density `rho * b` as a function of position.
pub type VectorFn = dyn Fn(&Vec3) -> Vec3 + Send + Sync;
/// Scalar datum as a function of position.
pub type ScalarFn = dyn Fn(&Vec3) -> f64 + Send + Sync;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Formulation {
    LeastSquares,
    Vms,
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Formulation::LeastSquares => "LS",
            Formulation::Vms => "VMS",
        })
    }
}

impl FromStr for Formulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ls" | "least_squares" | "least-squares" => Ok(Formulation::LeastSquares),
            "vms" => Ok(Formulation::Vms),
            other => Err(Error::invalid(format!("unknown formulation '{other}'"))),
        }
    }
}

/// Weighting of the momentum residual in the least-squares functional:
/// `Unit` uses `A = I`, `Drag` uses `A = alpha I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LsWeight {
    Unit,
    Drag,
}

impl LsWeight {
    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            1 => Ok(LsWeight::Unit),
            2 => Ok(LsWeight::Drag),
            _ => Err(Error::invalid(format!("least-squares weight must be 1 or 2, got {id}"))),
        }
    }

    pub fn id(self) -> u8 {
        match self {
            LsWeight::Unit => 1,
            LsWeight::Drag => 2,
        }
    }
}

/// Scalar weight `a` with `A = a I`.
pub fn ls_weight(weight: LsWeight, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Constitutive(format!("drag coefficient must be positive, got {alpha}")));
    }
    Ok(match weight {
        LsWeight::Unit => 1.0,
        LsWeight::Drag => alpha,
    })
}

/// Previous iterate restricted to one element.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateSnapshot {
    /// Node-major velocity components.
    pub velocity: Vec<f64>,
    pub pressure: Vec<f64>,
    pub theta: f64,
}

impl IterateSnapshot {
    pub fn new(velocity: Vec<f64>, pressure: Vec<f64>, theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::invalid(format!("theta must lie in [0, 1], got {theta}")));
        }
        if pressure.is_empty() || !velocity.len().is_multiple_of(pressure.len()) {
            return Err(Error::invalid("snapshot velocity and pressure sizes disagree"));
        }
        Ok(IterateSnapshot {
            velocity,
            pressure,
            theta,
        })
    }

    /// The same velocity and pressure at every node.
    pub fn uniform(nodes: usize, nd: usize, v: f64, p: f64, theta: f64) -> Result<Self> {
        Self::new(vec![v; nodes * nd], vec![p; nodes], theta)
    }

    fn check(&self, mesh: &Mesh) -> Result<()> {
        let npe = mesh.elem_type().nodes_per_element();
        if self.pressure.len() != npe || self.velocity.len() != npe * mesh.dim() {
            return Err(Error::invalid(format!(
                "snapshot has {} pressures and {} velocities for a {}-node element",
                self.pressure.len(),
                self.velocity.len(),
                npe
            )));
        }
        Ok(())
    }
}

/// Linearization data at one point: `c_p`, the rank-one `C_v` and the
/// known-side vector `c_p v_i p_i + C_v v_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearizationTerms {
    pub c_p: f64,
    pub c_v: Matrix3<f64>,
    pub known: Vec3,
}

pub fn linearization_terms(model: &DragModel, v: &Vec3, p: f64, x: &Vec3, theta: f64) -> Result<LinearizationTerms> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::invalid(format!("theta must lie in [0, 1], got {theta}")));
    }
    if theta == 0.0 {
        return Ok(LinearizationTerms {
            c_p: 0.0,
            c_v: Matrix3::zeros(),
            known: Vec3::zeros(),
        });
    }
    let c_p = theta * model.dalpha_dp(v, p, x)?;
    let c_v = v * model.dalpha_dv(v, p, x)?.transpose() * theta;
    Ok(LinearizationTerms {
        c_p,
        c_v,
        known: v * (c_p * p) + c_v * v,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementSystem {
    pub ke: DMatrix<f64>,
    pub fe: DVector<f64>,
    pub dof_map: Vec<usize>,
}

/// Global dof numbers of an element: velocity `node * nd + c`, pressure
/// `nd * num_nodes + node`.
pub fn element_dofs(mesh: &Mesh, elem: usize) -> Vec<usize> {
    let nd = mesh.dim();
    let conn = mesh.element(elem);
    let mut dofs = Vec::with_capacity((nd + 1) * conn.len());
    for &n in conn {
        for c in 0..nd {
            dofs.push(n * nd + c);
        }
    }
    let offset = nd * mesh.num_nodes();
    dofs.extend(conn.iter().map(|&n| offset + n));
    dofs
}

/// Per-point operator rows.
struct PointOps {
    weight: f64,
    alpha: f64,
    /// `alpha W + C_v W + c_p v_i N_p + grad N_p`
    op: DMatrix<f64>,
    /// velocity basis in velocity columns
    w: DMatrix<f64>,
    /// pressure-gradient columns
    grad: DMatrix<f64>,
    /// divergence row
    div: DMatrix<f64>,
    /// pressure basis row
    pval: DMatrix<f64>,
    /// `rho b + known`
    load: DVector<f64>,
}

fn point_ops(
    mesh: &Mesh,
    elem: usize,
    model: &DragModel,
    snap: &IterateSnapshot,
    load: &VectorFn,
    xi: &Vec3,
    weight: f64,
) -> Result<PointOps> {
    let nd = mesh.dim();
    let npe = mesh.elem_type().nodes_per_element();
    let ndofs = (nd + 1) * npe;
    let eval = mesh.element_eval(elem, xi)?;
    let (v_i, _) = fem::interpolate_vector(&snap.velocity, nd, &eval)?;
    let (p_i, _) = fem::interpolate(&snap.pressure, &eval)?;
    let alpha = model.alpha(&v_i, p_i, &eval.x)?;
    let terms = linearization_terms(model, &v_i, p_i, &eval.x, snap.theta)?;
    let mut w = DMatrix::zeros(nd, ndofs);
    let mut grad = DMatrix::zeros(nd, ndofs);
    let mut div = DMatrix::zeros(1, ndofs);
    let mut pval = DMatrix::zeros(1, ndofs);
    let mut op = DMatrix::zeros(nd, ndofs);
    for a in 0..npe {
        let n = eval.values[a];
        let g = eval.grads[a];
        let pc = nd * npe + a;
        pval[(0, pc)] = n;
        for c in 0..nd {
            let vc = a * nd + c;
            w[(c, vc)] = n;
            div[(0, vc)] = g[c];
            grad[(c, pc)] = g[c];
            op[(c, pc)] = terms.c_p * v_i[c] * n + g[c];
            for r in 0..nd {
                op[(r, vc)] = terms.c_v[(r, c)] * n;
            }
            op[(c, vc)] += alpha * n;
        }
    }
    let f = load(&eval.x) + terms.known;
    Ok(PointOps {
        weight: weight * eval.det_j,
        alpha,
        op,
        w,
        grad,
        div,
        pval,
        load: DVector::from_iterator(nd, (0..nd).map(|c| f[c])),
    })
}

/// Least-squares element matrix and load for the linearized problem.
pub fn ls_element_system(
    mesh: &Mesh,
    elem: usize,
    model: &DragModel,
    snap: &IterateSnapshot,
    weight: LsWeight,
    load: &VectorFn,
) -> Result<ElementSystem> {
    snap.check(mesh)?;
    let nd = mesh.dim();
    let ndofs = (nd + 1) * mesh.elem_type().nodes_per_element();
    let mut ke = DMatrix::zeros(ndofs, ndofs);
    let mut fe = DVector::zeros(ndofs);
    for q in fem::quadrature(mesh.elem_type()) {
        let pt = point_ops(mesh, elem, model, snap, load, &q.xi, q.weight).map_err(|e| e.in_element(elem))?;
        let s = pt.weight / ls_weight(weight, pt.alpha)?;
        ke += pt.op.tr_mul(&pt.op) * s + pt.div.tr_mul(&pt.div) * pt.weight;
        fe += pt.op.tr_mul(&pt.load) * s;
    }
    Ok(ElementSystem {
        ke,
        fe,
        dof_map: element_dofs(mesh, elem),
    })
}

/// Discrete least-squares functional of element trial values `u` with the
/// iterate frozen. Its Hessian with respect to `u` is the element matrix.
pub fn ls_functional(
    mesh: &Mesh,
    elem: usize,
    model: &DragModel,
    snap: &IterateSnapshot,
    weight: LsWeight,
    load: &VectorFn,
    u: &[f64],
) -> Result<f64> {
    snap.check(mesh)?;
    let u = DVector::from_column_slice(u);
    let mut total = 0.0;
    for q in fem::quadrature(mesh.elem_type()) {
        let pt = point_ops(mesh, elem, model, snap, load, &q.xi, q.weight)?;
        if u.len() != pt.op.ncols() {
            return Err(Error::invalid("trial vector does not match the element dofs"));
        }
        let r = &pt.op * &u - &pt.load;
        let d = (&pt.div * &u)[0];
        total += 0.5 * pt.weight * (r.norm_squared() / ls_weight(weight, pt.alpha)? + d * d);
    }
    Ok(total)
}

/// Pressure datum on one local facet of an element, applied weakly.
pub struct FacetPressure<'a> {
    pub local: usize,
    pub value: &'a ScalarFn,
}

/// Variational multi-scale element matrix and load for the linearized
/// problem. The stabilization coefficient `1/alpha` is taken from the
/// iterate.
pub fn vms_element_system(
    mesh: &Mesh,
    elem: usize,
    model: &DragModel,
    snap: &IterateSnapshot,
    load: &VectorFn,
    pressure_facets: &[FacetPressure<'_>],
) -> Result<ElementSystem> {
    snap.check(mesh)?;
    let et = mesh.elem_type();
    let nd = mesh.dim();
    let npe = et.nodes_per_element();
    let ndofs = (nd + 1) * npe;
    let mut ke = DMatrix::zeros(ndofs, ndofs);
    let mut fe = DVector::zeros(ndofs);
    for q in fem::quadrature(et) {
        let pt = point_ops(mesh, elem, model, snap, load, &q.xi, q.weight).map_err(|e| e.in_element(elem))?;
        let galerkin_op = &pt.op - &pt.grad;
        let stab_test = &pt.w * pt.alpha + &pt.grad;
        let half_inv = 0.5 / pt.alpha;
        ke += (pt.w.tr_mul(&galerkin_op) - pt.div.tr_mul(&pt.pval) - pt.pval.tr_mul(&pt.div)
            - stab_test.tr_mul(&pt.op) * half_inv)
            * pt.weight;
        fe += (pt.w.tr_mul(&pt.load) - stab_test.tr_mul(&pt.load) * half_inv) * pt.weight;
    }
    let coords = mesh.element_coords(elem);
    let nq = if et == fem::ElementType::Quad9 { 3 } else { 2 };
    for fp in pressure_facets {
        if fp.local >= et.num_facets() {
            return Err(Error::invalid(format!("element {elem} has no facet {}", fp.local)));
        }
        for q in fem::facet_quadrature(et, fp.local, nq) {
            let eval = fem::eval_element_at(et, &coords, &q.xi).map_err(|e| e.in_element(elem))?;
            let (normal, scale) = eval.facet_normal(&q.ref_normal);
            let p0 = (fp.value)(&eval.x);
            let dg = q.weight * scale;
            for a in 0..npe {
                for c in 0..nd {
                    fe[a * nd + c] -= eval.values[a] * normal[c] * p0 * dg;
                }
            }
        }
    }
    Ok(ElementSystem {
        ke,
        fe,
        dof_map: element_dofs(mesh, elem),
    })
}
