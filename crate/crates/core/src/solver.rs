//! Global assembly, constraints, the sparse linear solve and the nonlinear
//! fixed-point driver.
//!
//! Global dofs: velocity component `c` of node `n` is `n * nd + c`, the
//! pressure of node `n` is `nd * num_nodes + n`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use nalgebra::Matrix3;
use rayon::prelude::*;

use crate::drag::DragModel;
use crate::fem;
use crate::formulation::{
    ls_element_system, vms_element_system, ElementSystem, FacetPressure, Formulation, IterateSnapshot, LsWeight,
    ScalarFn, VectorFn,
};
use crate::mesh::{BoundaryFacet, Mesh};
use crate::{Error, Result, Vec3};

/// Compressed sparse row matrix with sorted, duplicate-free columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Build from `(row, col, value)` entries; duplicates are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, mut entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        if let Some(&(r, c, _)) = entries.iter().find(|(r, c, _)| *r >= nrows || *c >= ncols) {
            return Err(Error::invalid(format!("entry ({r}, {c}) outside a {nrows}x{ncols} matrix")));
        }
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0; nrows + 1];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last = None;
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                *values.last_mut().expect("entry exists") += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(CsrMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of one row.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map(|k| vals[k]).unwrap_or(0.0)
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols, "vector length must match the column count");
        (0..self.nrows)
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter().zip(vals).map(|(&j, v)| v * x[j]).sum()
            })
            .collect()
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.triplets() {
            m[(i, j)] = v;
        }
        m
    }

    /// Largest absolute column sum.
    pub fn norm_one(&self) -> f64 {
        let mut sums = vec![0.0; self.ncols];
        for (_, j, v) in self.triplets() {
            sums[j] += v.abs();
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    /// `max |A - A^T| / max |A|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for (i, j, v) in self.triplets() {
            worst = worst.max((v - self.get(j, i)).abs());
            scale = scale.max(v.abs());
        }
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }
}

/// Assembled matrix and right-hand side over all dofs.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
}

/// Scatter-add element systems into a global system of size `ndofs`.
pub fn scatter(ndofs: usize, systems: &[ElementSystem]) -> Result<GlobalSystem> {
    let mut entries = Vec::with_capacity(systems.iter().map(|s| s.dof_map.len().pow(2)).sum());
    let mut rhs = vec![0.0; ndofs];
    for sys in systems {
        for (a, &ga) in sys.dof_map.iter().enumerate() {
            if ga >= ndofs {
                return Err(Error::invalid(format!("dof {ga} outside a system of {ndofs} dofs")));
            }
            rhs[ga] += sys.fe[a];
            for (b, &gb) in sys.dof_map.iter().enumerate() {
                entries.push((ga, gb, sys.ke[(a, b)]));
            }
        }
    }
    Ok(GlobalSystem {
        matrix: CsrMatrix::from_triplets(ndofs, ndofs, entries)?,
        rhs,
    })
}

/// Nodal velocity prescription, used for wells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodalVelocity {
    pub node: usize,
    pub component: usize,
    pub value: f64,
}

/// Boundary data. Normal velocities are prescribed on tagged facets and
/// applied strongly to the Cartesian component aligned with the facet
/// normal. Pressures on tagged facets are strong for the least-squares
/// formulation and weak for the variational multi-scale one. Nodal
/// velocities override facet-derived values on the same dof.
#[derive(Clone, Default)]
pub struct BoundaryConditions {
    pub normal_velocity: Vec<(String, Arc<ScalarFn>)>,
    pub nodal_velocity: Vec<NodalVelocity>,
    pub pressure: Vec<(String, Arc<ScalarFn>)>,
    pub pressure_nodes: Vec<(usize, f64)>,
}

impl fmt::Debug for BoundaryConditions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tags = |v: &Vec<(String, Arc<ScalarFn>)>| v.iter().map(|(t, _)| t.clone()).collect::<Vec<_>>();
        f.debug_struct("BoundaryConditions")
            .field("normal_velocity", &tags(&self.normal_velocity))
            .field("nodal_velocity", &self.nodal_velocity)
            .field("pressure", &tags(&self.pressure))
            .field("pressure_nodes", &self.pressure_nodes)
            .finish()
    }
}

impl BoundaryConditions {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn normal_velocity(self, tag: &str, value: f64) -> Self {
        self.normal_velocity_fn(tag, Arc::new(move |_: &Vec3| value))
    }

    pub fn normal_velocity_fn(mut self, tag: &str, f: Arc<ScalarFn>) -> Self {
        self.normal_velocity.push((tag.to_string(), f));
        self
    }

    pub fn velocity_at(mut self, node: usize, component: usize, value: f64) -> Self {
        self.nodal_velocity.push(NodalVelocity { node, component, value });
        self
    }

    pub fn pressure(self, tag: &str, value: f64) -> Self {
        self.pressure_fn(tag, Arc::new(move |_: &Vec3| value))
    }

    pub fn pressure_fn(mut self, tag: &str, f: Arc<ScalarFn>) -> Self {
        self.pressure.push((tag.to_string(), f));
        self
    }

    pub fn pin_pressure(mut self, node: usize, value: f64) -> Self {
        self.pressure_nodes.push((node, value));
        self
    }

    fn pressure_fn_for(&self, tag: &str) -> Option<&Arc<ScalarFn>> {
        self.pressure.iter().find(|(t, _)| t == tag).map(|(_, f)| f)
    }

    /// Strongly constrained dofs and their values.
    pub fn constraints(&self, mesh: &Mesh, formulation: Formulation) -> Result<Constraints> {
        let nd = mesh.dim();
        let nn = mesh.num_nodes();
        let velocity_tags: HashSet<&str> = self.normal_velocity.iter().map(|(t, _)| t.as_str()).collect();
        let pressure_tags: HashSet<&str> = self.pressure.iter().map(|(t, _)| t.as_str()).collect();
        if let Some(t) = velocity_tags.intersection(&pressure_tags).next() {
            return Err(Error::invalid(format!("tag '{t}' carries both velocity and pressure data")));
        }
        let known = mesh.tags();
        for t in velocity_tags.iter().chain(&pressure_tags) {
            if !known.iter().any(|k| k == t) {
                return Err(Error::invalid(format!("no boundary facet is tagged '{t}'")));
            }
        }
        if self.pressure.is_empty() && self.pressure_nodes.is_empty() {
            return Err(Error::MissingDatum);
        }

        let mut c = Constraints::default();
        for (tag, f) in &self.normal_velocity {
            for facet in mesh.facets_tagged(tag) {
                let (axis, sign) = facet_axis(mesh, facet)?;
                for n in mesh.facet_nodes(facet) {
                    c.insert(n * nd + axis, sign * f(&mesh.nodes()[n]))?;
                }
            }
        }
        let mut nodal: HashMap<usize, f64> = HashMap::new();
        for nv in &self.nodal_velocity {
            if nv.node >= nn || nv.component >= nd {
                return Err(Error::invalid(format!(
                    "velocity prescription on node {} component {} is out of range",
                    nv.node, nv.component
                )));
            }
            let dof = nv.node * nd + nv.component;
            if let Some(&old) = nodal.get(&dof) {
                if !same(old, nv.value) {
                    return Err(Error::ConstraintConflict {
                        dof,
                        first: old,
                        second: nv.value,
                    });
                }
            }
            nodal.insert(dof, nv.value);
            c.values.insert(dof, nv.value);
        }
        if formulation == Formulation::LeastSquares {
            for (tag, f) in &self.pressure {
                for facet in mesh.facets_tagged(tag) {
                    for n in mesh.facet_nodes(facet) {
                        c.insert(nd * nn + n, f(&mesh.nodes()[n]))?;
                    }
                }
            }
        }
        for &(n, value) in &self.pressure_nodes {
            if n >= nn {
                return Err(Error::invalid(format!("pressure pin on missing node {n}")));
            }
            c.insert(nd * nn + n, value)?;
        }

        let closed = mesh.facets().iter().all(|f| velocity_tags.contains(f.tag.as_str()));
        if closed {
            check_compatibility(mesh, &c)?;
        }
        Ok(c)
    }

    /// Weak pressure data per element for the variational multi-scale form.
    fn weak_pressure(&self, mesh: &Mesh) -> HashMap<usize, Vec<(usize, Arc<ScalarFn>)>> {
        let mut out: HashMap<usize, Vec<(usize, Arc<ScalarFn>)>> = HashMap::new();
        for facet in mesh.facets() {
            if let Some(f) = self.pressure_fn_for(&facet.tag) {
                out.entry(facet.elem).or_default().push((facet.local, f.clone()));
            }
        }
        out
    }
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Outward normal of an axis-aligned facet as `(axis, sign)`.
fn facet_axis(mesh: &Mesh, facet: &BoundaryFacet) -> Result<(usize, f64)> {
    let et = mesh.elem_type();
    let q = fem::facet_quadrature(et, facet.local, 1)[0];
    let eval = mesh.element_eval(facet.elem, &q.xi)?;
    let (n, _) = eval.facet_normal(&q.ref_normal);
    let axis = n.iamax();
    if n[axis].abs() < 1.0 - 1e-9 {
        return Err(Error::invalid(format!(
            "facet {} of element {} is not axis-aligned",
            facet.local, facet.elem
        )));
    }
    Ok((axis, n[axis].signum()))
}

/// Net outward flux of the constrained normal trace over a closed boundary.
fn check_compatibility(mesh: &Mesh, c: &Constraints) -> Result<()> {
    let nd = mesh.dim();
    let et = mesh.elem_type();
    let nq = if et == fem::ElementType::Quad9 { 3 } else { 2 };
    let mut net = 0.0;
    let mut scale = 0.0;
    for facet in mesh.facets() {
        let coords = mesh.element_coords(facet.elem);
        let conn = mesh.element(facet.elem);
        for q in fem::facet_quadrature(et, facet.local, nq) {
            let eval = fem::eval_element_at(et, &coords, &q.xi).map_err(|e| e.in_element(facet.elem))?;
            let (n, ds) = eval.facet_normal(&q.ref_normal);
            let mut v = Vec3::zeros();
            for &a in et.facet_nodes(facet.local) {
                for comp in 0..nd {
                    if let Some(val) = c.values.get(&(conn[a] * nd + comp)) {
                        v[comp] += eval.values[a] * val;
                    }
                }
            }
            let flux = v.dot(&n) * ds * q.weight;
            net += flux;
            scale += flux.abs();
        }
    }
    if net.abs() > 1e-10 * scale.max(1.0) {
        return Err(Error::IncompatibleFlux { net });
    }
    Ok(())
}

/// Constrained dofs with their prescribed values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Constraints {
    pub values: BTreeMap<usize, f64>,
}

impl Constraints {
    pub fn insert(&mut self, dof: usize, value: f64) -> Result<()> {
        if let Some(&old) = self.values.get(&dof) {
            if !same(old, value) {
                return Err(Error::ConstraintConflict {
                    dof,
                    first: old,
                    second: value,
                });
            }
            return Ok(());
        }
        self.values.insert(dof, value);
        Ok(())
    }
}

/// System restricted to the free dofs: `A_FF x_F = b_F - A_FC g`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub free: Vec<usize>,
    pub fixed: BTreeMap<usize, f64>,
    pub ndofs: usize,
}

impl ReducedSystem {
    /// Full dof vector from the free values.
    pub fn expand(&self, x_free: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.ndofs];
        for (&dof, &v) in &self.fixed {
            x[dof] = v;
        }
        for (k, &dof) in self.free.iter().enumerate() {
            x[dof] = x_free[k];
        }
        x
    }
}

/// Eliminate constrained rows and columns, moving their contribution to
/// the right-hand side.
pub fn apply_constraints(system: &GlobalSystem, constraints: &Constraints) -> Result<ReducedSystem> {
    let n = system.matrix.nrows();
    let mut index = vec![usize::MAX; n];
    let mut free = Vec::with_capacity(n);
    for (dof, slot) in index.iter_mut().enumerate() {
        if !constraints.values.contains_key(&dof) {
            *slot = free.len();
            free.push(dof);
        }
    }
    if let Some((&dof, _)) = constraints.values.iter().find(|(&d, _)| d >= n) {
        return Err(Error::invalid(format!("constraint on dof {dof} outside a system of {n} dofs")));
    }
    let mut entries = Vec::with_capacity(system.matrix.nnz());
    let mut rhs = Vec::with_capacity(free.len());
    for (k, &i) in free.iter().enumerate() {
        let (cols, vals) = system.matrix.row(i);
        let mut b = system.rhs[i];
        for (&j, &v) in cols.iter().zip(vals) {
            match constraints.values.get(&j) {
                Some(g) => b -= v * g,
                None => entries.push((k, index[j], v)),
            }
        }
        rhs.push(b);
    }
    Ok(ReducedSystem {
        matrix: CsrMatrix::from_triplets(free.len(), free.len(), entries)?,
        rhs,
        free,
        fixed: constraints.values.clone(),
        ndofs: n,
    })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Sparse LU solve (faer) with up to two steps of iterative refinement.
/// Fails when the relative residual exceeds `1e-10`.
pub fn solve_linear(a: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::invalid("linear system must be square and match the right-hand side"));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let triplets: Vec<Triplet<usize, usize, f64>> = a.triplets().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
    let failure = |residual: f64| Error::LinearSolver {
        residual,
        condition: f64::INFINITY,
    };
    let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets).map_err(|_| failure(f64::INFINITY))?;
    let lu = mat.sp_lu().map_err(|_| failure(f64::INFINITY))?;
    let solve = |rhs: &[f64]| -> Vec<f64> {
        let mut m = Mat::<f64>::from_fn(n, 1, |i, _| rhs[i]);
        lu.solve_in_place(m.as_mut());
        (0..n).map(|i| m[(i, 0)]).collect()
    };
    let mut x = solve(b);
    let residual = |x: &[f64]| -> Vec<f64> { a.mul_vec(x).iter().zip(b).map(|(ax, bi)| bi - ax).collect() };
    let mut r = residual(&x);
    for _ in 0..2 {
        if norm(&r) <= 1e-15 * b_norm {
            break;
        }
        let dx = solve(&r);
        for (xi, d) in x.iter_mut().zip(dx) {
            *xi += d;
        }
        r = residual(&x);
    }
    let rel = norm(&r) / b_norm;
    if !(rel <= 1e-10) {
        let condition = condition_estimate(a, |v| {
            let mut m = Mat::<f64>::from_fn(n, 1, |i, _| v[i]);
            lu.solve_in_place(m.as_mut());
            (0..n).map(|i| m[(i, 0)]).collect()
        }, |v| {
            let mut m = Mat::<f64>::from_fn(n, 1, |i, _| v[i]);
            lu.solve_transpose_in_place(m.as_mut());
            (0..n).map(|i| m[(i, 0)]).collect()
        });
        return Err(Error::LinearSolver {
            residual: rel,
            condition,
        });
    }
    Ok(x)
}

/// Hager's estimate of the 1-norm condition number.
fn condition_estimate(a: &CsrMatrix, solve: impl Fn(&[f64]) -> Vec<f64>, solve_t: impl Fn(&[f64]) -> Vec<f64>) -> f64 {
    let n = a.nrows();
    let mut x = vec![1.0 / n as f64; n];
    let mut est = 0.0;
    for _ in 0..5 {
        let y = solve(&x);
        let y_norm: f64 = y.iter().map(|v| v.abs()).sum();
        if !y_norm.is_finite() {
            return f64::INFINITY;
        }
        est = y_norm;
        let s: Vec<f64> = y.iter().map(|v| if *v >= 0.0 { 1.0 } else { -1.0 }).collect();
        let z = solve_t(&s);
        let (j, zmax) = z
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |(bj, bz), (i, v)| if v.abs() > bz { (i, v.abs()) } else { (bj, bz) });
        let zx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
        if zmax <= zx {
            break;
        }
        x = vec![0.0; n];
        x[j] = 1.0;
    }
    est * a.norm_one()
}

/// Nodal velocity (node-major, `nd` components) and pressure on a mesh.
#[derive(Debug, Clone)]
pub struct MixedSolution {
    pub mesh: Arc<Mesh>,
    pub velocity: Vec<f64>,
    pub pressure: Vec<f64>,
}

/// Velocity, pressure and their gradients at one point.
#[derive(Debug, Clone, Copy)]
pub struct PointValues {
    pub x: Vec3,
    pub velocity: Vec3,
    /// Row `c` is the gradient of velocity component `c`.
    pub velocity_grad: Matrix3<f64>,
    pub pressure: f64,
    pub pressure_grad: Vec3,
    pub det_j: f64,
}

impl MixedSolution {
    pub fn new(mesh: Arc<Mesh>, velocity: Vec<f64>, pressure: Vec<f64>) -> Result<Self> {
        if velocity.len() != mesh.num_nodes() * mesh.dim() || pressure.len() != mesh.num_nodes() {
            return Err(Error::invalid("solution arrays do not match the mesh"));
        }
        Ok(MixedSolution {
            mesh,
            velocity,
            pressure,
        })
    }

    pub fn uniform(mesh: Arc<Mesh>, v: f64, p: f64) -> Self {
        let n = mesh.num_nodes();
        let nd = mesh.dim();
        MixedSolution {
            mesh,
            velocity: vec![v; n * nd],
            pressure: vec![p; n],
        }
    }

    /// Nodal interpolant of given fields.
    pub fn interpolate(mesh: Arc<Mesh>, v: impl Fn(&Vec3) -> Vec3, p: impl Fn(&Vec3) -> f64) -> Self {
        let nd = mesh.dim();
        let mut velocity = Vec::with_capacity(mesh.num_nodes() * nd);
        let mut pressure = Vec::with_capacity(mesh.num_nodes());
        for x in mesh.nodes() {
            let vx = v(x);
            velocity.extend((0..nd).map(|c| vx[c]));
            pressure.push(p(x));
        }
        MixedSolution {
            mesh,
            velocity,
            pressure,
        }
    }

    pub fn from_dofs(mesh: Arc<Mesh>, dofs: &[f64]) -> Result<Self> {
        let nv = mesh.num_nodes() * mesh.dim();
        if dofs.len() != nv + mesh.num_nodes() {
            return Err(Error::invalid("dof vector does not match the mesh"));
        }
        Ok(MixedSolution {
            velocity: dofs[..nv].to_vec(),
            pressure: dofs[nv..].to_vec(),
            mesh,
        })
    }

    pub fn to_dofs(&self) -> Vec<f64> {
        let mut out = self.velocity.clone();
        out.extend_from_slice(&self.pressure);
        out
    }

    pub fn ndofs(&self) -> usize {
        self.velocity.len() + self.pressure.len()
    }

    pub fn node_velocity(&self, node: usize) -> Vec3 {
        let nd = self.mesh.dim();
        let mut v = Vec3::zeros();
        for c in 0..nd {
            v[c] = self.velocity[node * nd + c];
        }
        v
    }

    pub fn is_finite(&self) -> bool {
        self.velocity.iter().chain(&self.pressure).all(|v| v.is_finite())
    }

    pub fn element_snapshot(&self, elem: usize, theta: f64) -> Result<IterateSnapshot> {
        let nd = self.mesh.dim();
        let conn = self.mesh.element(elem);
        let mut v = Vec::with_capacity(conn.len() * nd);
        for &n in conn {
            v.extend_from_slice(&self.velocity[n * nd..(n + 1) * nd]);
        }
        let p = conn.iter().map(|&n| self.pressure[n]).collect();
        IterateSnapshot::new(v, p, theta)
    }

    /// Values at reference coordinates `xi` of element `elem`.
    pub fn eval(&self, elem: usize, xi: &Vec3) -> Result<PointValues> {
        let ev = self.mesh.element_eval(elem, xi)?;
        self.eval_with(elem, &ev)
    }

    pub fn eval_with(&self, elem: usize, ev: &fem::ElementEval) -> Result<PointValues> {
        let snap = self.element_snapshot(elem, 0.0)?;
        let (velocity, velocity_grad) = fem::interpolate_vector(&snap.velocity, self.mesh.dim(), ev)?;
        let (pressure, pressure_grad) = fem::interpolate(&snap.pressure, ev)?;
        Ok(PointValues {
            x: ev.x,
            velocity,
            velocity_grad,
            pressure,
            pressure_grad,
            det_j: ev.det_j,
        })
    }
}

/// A complete linearized boundary-value problem.
#[derive(Clone)]
pub struct Problem {
    pub mesh: Arc<Mesh>,
    pub model: DragModel,
    pub formulation: Formulation,
    pub ls_weight: LsWeight,
    pub theta: f64,
    /// Load density `rho * b`.
    pub load: Arc<VectorFn>,
    pub bcs: BoundaryConditions,
    pub tol: f64,
    pub max_iterations: usize,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("elements", &self.mesh.num_elements())
            .field("elem_type", &self.mesh.elem_type())
            .field("model", &self.model)
            .field("formulation", &self.formulation)
            .field("ls_weight", &self.ls_weight)
            .field("theta", &self.theta)
            .field("bcs", &self.bcs)
            .field("tol", &self.tol)
            .field("max_iterations", &self.max_iterations)
            .finish()
    }
}

impl Problem {
    /// Defaults: weight 2, `theta = 1`, no load, tolerance `1e-10`,
    /// at most 50 iterations.
    pub fn new(mesh: Arc<Mesh>, model: DragModel, formulation: Formulation, bcs: BoundaryConditions) -> Self {
        Problem {
            mesh,
            model,
            formulation,
            ls_weight: LsWeight::Drag,
            theta: 1.0,
            load: Arc::new(|_: &Vec3| Vec3::zeros()),
            bcs,
            tol: 1e-10,
            max_iterations: 50,
        }
    }

    pub fn ndofs(&self) -> usize {
        (self.mesh.dim() + 1) * self.mesh.num_nodes()
    }

    /// Element systems linearized about `current`, in element order.
    pub fn element_systems(&self, current: &MixedSolution) -> Result<Vec<ElementSystem>> {
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(Error::invalid(format!("theta must lie in [0, 1], got {}", self.theta)));
        }
        let weak = match self.formulation {
            Formulation::Vms => self.bcs.weak_pressure(&self.mesh),
            Formulation::LeastSquares => HashMap::new(),
        };
        (0..self.mesh.num_elements())
            .into_par_iter()
            .map(|e| {
                let snap = current.element_snapshot(e, self.theta)?;
                let sys = match self.formulation {
                    Formulation::LeastSquares => {
                        ls_element_system(&self.mesh, e, &self.model, &snap, self.ls_weight, self.load.as_ref())
                    }
                    Formulation::Vms => {
                        let facets: Vec<FacetPressure<'_>> = weak
                            .get(&e)
                            .map(|list| {
                                list.iter()
                                    .map(|(local, f)| FacetPressure {
                                        local: *local,
                                        value: f.as_ref(),
                                    })
                                    .collect()
                            })
                            .unwrap_or_default();
                        vms_element_system(&self.mesh, e, &self.model, &snap, self.load.as_ref(), &facets)
                    }
                };
                sys.map_err(|err| match err {
                    Error::Element { .. } => err,
                    other => other.in_element(e),
                })
            })
            .collect()
    }
}

/// Global system linearized about `current`, before constraints.
pub fn assemble(problem: &Problem, current: &MixedSolution) -> Result<GlobalSystem> {
    scatter(problem.ndofs(), &problem.element_systems(current)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub res_v: f64,
    pub res_p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearReport {
    pub history: Vec<IterationRecord>,
    pub converged: bool,
    pub iterations: usize,
}

/// Fixed-point iteration: start from unit velocity and pressure, solve the
/// linearized problem, and stop once both nodal increment norms fall below
/// the tolerance. Non-convergence is reported, not raised.
pub fn nonlinear_solve(problem: &Problem) -> Result<(MixedSolution, NonlinearReport)> {
    if !(problem.tol > 0.0) || problem.max_iterations == 0 {
        return Err(Error::invalid("tolerance must be positive and at least one iteration allowed"));
    }
    problem.model.check()?;
    let constraints = problem.bcs.constraints(&problem.mesh, problem.formulation)?;
    let mut current = MixedSolution::uniform(problem.mesh.clone(), 1.0, 1.0);
    let mut history = Vec::new();
    let mut converged = false;
    for iteration in 1..=problem.max_iterations {
        let system = assemble(problem, &current)?;
        let reduced = apply_constraints(&system, &constraints)?;
        let x = solve_linear(&reduced.matrix, &reduced.rhs)?;
        let next = MixedSolution::from_dofs(problem.mesh.clone(), &reduced.expand(&x))?;
        let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
        let record = IterationRecord {
            iteration,
            res_v: diff(&next.velocity, &current.velocity),
            res_p: diff(&next.pressure, &current.pressure),
        };
        history.push(record);
        current = next;
        if record.res_v < problem.tol && record.res_p < problem.tol {
            converged = true;
            break;
        }
        if !current.is_finite() {
            break;
        }
    }
    let iterations = history.len();
    Ok((
        current,
        NonlinearReport {
            history,
            converged,
            iterations,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drag::DragVariant;
    use crate::mesh::{generate_quad, AxisBox, RegionField};

    #[test]
    fn csr_sums_duplicates() {
        let m = CsrMatrix::from_triplets(2, 3, vec![(1, 2, 1.0), (0, 0, 2.0), (1, 2, 0.5), (0, 1, -1.0)]).unwrap();
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.get(1, 2), 1.5);
        assert_eq!(m.get(1, 0), 0.0);
        assert_eq!(m.mul_vec(&[1.0, 2.0, 3.0]), vec![0.0, 4.5]);
        assert!(CsrMatrix::from_triplets(2, 2, vec![(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn identity_solve() {
        let b = vec![1.0, -2.0, 3.5];
        assert_eq!(solve_linear(&CsrMatrix::identity(3), &b).unwrap(), b);
    }

    #[test]
    fn singular_solve_fails() {
        let a = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)]).unwrap();
        assert!(matches!(solve_linear(&a, &[1.0, 0.0]), Err(Error::LinearSolver { .. })));
    }

    #[test]
    fn duplicate_triplets_reach_faer_summed() {
        // A matrix assembled from repeated entries must solve like the summed one.
        let a = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (0, 0, 1.0), (1, 1, 4.0), (0, 1, 1.0)]).unwrap();
        let x = solve_linear(&a, &[3.0, 4.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
    }

    fn darcy() -> DragModel {
        DragModel::new(DragVariant::Darcy, 1.0, 0.0, 0.0, RegionField::uniform(1.0).unwrap()).unwrap()
    }

    #[test]
    fn pin_with_zero_value() {
        let mesh = Arc::new(generate_quad(1, 1, AxisBox::unit_square(), 1).unwrap());
        let bcs = BoundaryConditions::new().pin_pressure(0, 0.0);
        let p = Problem::new(mesh.clone(), darcy(), Formulation::LeastSquares, bcs.clone());
        let sys = assemble(&p, &MixedSolution::uniform(mesh.clone(), 1.0, 1.0)).unwrap();
        let c = bcs.constraints(&mesh, Formulation::LeastSquares).unwrap();
        let red = apply_constraints(&sys, &c).unwrap();
        assert_eq!(red.free.len(), 11);
        assert!(!red.free.contains(&8));
        let expect: Vec<f64> = (0..12).filter(|&d| d != 8).map(|d| sys.rhs[d]).collect();
        assert_eq!(red.rhs, expect);
    }

    #[test]
    fn missing_datum_and_conflicts() {
        let mesh = generate_quad(2, 2, AxisBox::unit_square(), 1).unwrap();
        let closed = BoundaryConditions::new()
            .normal_velocity("left", 0.0)
            .normal_velocity("right", 0.0)
            .normal_velocity("top", 0.0)
            .normal_velocity("bottom", 0.0);
        assert!(matches!(
            closed.constraints(&mesh, Formulation::LeastSquares),
            Err(Error::MissingDatum)
        ));
        let leaky = BoundaryConditions::new()
            .normal_velocity("left", -1.0)
            .normal_velocity("right", 2.0)
            .normal_velocity("top", 0.0)
            .normal_velocity("bottom", 0.0)
            .pin_pressure(0, 0.0);
        assert!(matches!(
            leaky.constraints(&mesh, Formulation::Vms),
            Err(Error::IncompatibleFlux { .. })
        ));
        let balanced = BoundaryConditions::new()
            .normal_velocity("left", -1.0)
            .normal_velocity("right", 1.0)
            .normal_velocity("top", 0.0)
            .normal_velocity("bottom", 0.0)
            .pin_pressure(0, 0.0);
        let c = balanced.constraints(&mesh, Formulation::Vms).unwrap();
        // left face: outward normal -x, so v_x = +1
        assert_eq!(c.values[&0], 1.0);
        let conflict = BoundaryConditions::new().pin_pressure(0, 0.0).pin_pressure(0, 1.0);
        assert!(matches!(
            conflict.constraints(&mesh, Formulation::LeastSquares),
            Err(Error::ConstraintConflict { .. })
        ));
        let overlap = BoundaryConditions::new().normal_velocity("left", 0.0).pressure("left", 1.0);
        assert!(overlap.constraints(&mesh, Formulation::LeastSquares).is_err());
        let unknown = BoundaryConditions::new().pressure("nowhere", 1.0);
        assert!(unknown.constraints(&mesh, Formulation::LeastSquares).is_err());
    }

    #[test]
    fn nodal_velocity_overrides_facets() {
        let mesh = generate_quad(2, 2, AxisBox::unit_square(), 1).unwrap();
        let bcs = BoundaryConditions::new()
            .normal_velocity("left", 0.0)
            .normal_velocity("bottom", 0.0)
            .normal_velocity("right", 0.0)
            .normal_velocity("top", 0.0)
            .velocity_at(0, 0, 1.0)
            .velocity_at(0, 1, 1.0)
            .velocity_at(8, 0, 1.0)
            .velocity_at(8, 1, 1.0)
            .pin_pressure(8, 1.0);
        let c = bcs.constraints(&mesh, Formulation::LeastSquares).unwrap();
        assert_eq!((c.values[&0], c.values[&1], c.values[&16], c.values[&17]), (1.0, 1.0, 1.0, 1.0));
        assert_eq!(c.values[&(18 + 8)], 1.0);
    }

    #[test]
    fn darcy_converges_in_two_iterations() {
        let mesh = Arc::new(generate_quad(3, 3, AxisBox::unit_square(), 1).unwrap());
        let bcs = BoundaryConditions::new()
            .normal_velocity("top", 0.0)
            .normal_velocity("bottom", 0.0)
            .pressure("left", 2.0)
            .pressure("right", 1.0);
        for f in [Formulation::LeastSquares, Formulation::Vms] {
            let p = Problem::new(mesh.clone(), darcy(), f, bcs.clone());
            let (sol, rep) = nonlinear_solve(&p).unwrap();
            assert!(rep.converged && rep.iterations <= 2, "{f}: {rep:?}");
            for n in 0..mesh.num_nodes() {
                let x = mesh.nodes()[n];
                assert!((sol.node_velocity(n) - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-9);
                assert!((sol.pressure[n] - (2.0 - x.x)).abs() < 1e-9);
            }
        }
    }
}
