//! Error norms, convergence slopes, fluxes, local mass balance and
//! dissipation checks.

use nalgebra::Matrix3;
use rayon::prelude::*;

use crate::drag::DragModel;
use crate::fem;
use crate::formulation::VectorFn;
use crate::mesh::BoundaryFacet;
use crate::solver::{MixedSolution, PointValues};
use crate::{Error, Result, Vec3};

/// Gauss points per direction for post-processing integrals.
const POST_POINTS: usize = 5;

/// An analytic velocity-pressure pair with gradients.
pub trait ExactSolution: Sync {
    fn velocity(&self, x: &Vec3) -> Vec3;
    /// Row `c` is the gradient of component `c`.
    fn velocity_grad(&self, x: &Vec3) -> Matrix3<f64>;
    fn pressure(&self, x: &Vec3) -> f64;
    fn pressure_grad(&self, x: &Vec3) -> Vec3;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub velocity_l2: f64,
    pub velocity_h1: f64,
    pub pressure_l2: f64,
    pub pressure_h1: f64,
    pub h: f64,
    pub velocity_dofs: usize,
    pub pressure_dofs: usize,
}

/// Sum of per-element contributions, reduced in element order.
fn element_sum<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

fn post_rule(sol: &MixedSolution) -> Vec<fem::QuadraturePoint> {
    fem::quadrature_with_points(sol.mesh.elem_type(), POST_POINTS)
}

/// L2 errors and H1 seminorm errors of velocity and pressure.
pub fn error_norms(sol: &MixedSolution, exact: &dyn ExactSolution) -> Result<ErrorReport> {
    let rule = post_rule(sol);
    let nd = sol.mesh.dim();
    let parts = element_sum(sol.mesh.num_elements(), |e| {
        let mut acc = [0.0; 4];
        for q in &rule {
            let pv = sol.eval(e, &q.xi)?;
            let w = q.weight * pv.det_j;
            let dv = pv.velocity - exact.velocity(&pv.x);
            let dg = pv.velocity_grad - exact.velocity_grad(&pv.x);
            let dgv = dg.view((0, 0), (nd, nd)).norm_squared();
            acc[0] += w * dv.norm_squared();
            acc[1] += w * dgv;
            acc[2] += w * (pv.pressure - exact.pressure(&pv.x)).powi(2);
            acc[3] += w * (pv.pressure_grad - exact.pressure_grad(&pv.x)).norm_squared();
        }
        Ok(acc)
    })?;
    let mut tot = [0.0; 4];
    for a in parts {
        for i in 0..4 {
            tot[i] += a[i];
        }
    }
    Ok(ErrorReport {
        velocity_l2: tot[0].sqrt(),
        velocity_h1: tot[1].sqrt(),
        pressure_l2: tot[2].sqrt(),
        pressure_h1: tot[3].sqrt(),
        h: sol.mesh.h(),
        velocity_dofs: sol.velocity.len(),
        pressure_dofs: sol.pressure.len(),
    })
}

/// Least-squares slope of `ln(error)` against `ln(h)`.
pub fn loglog_slope(series: &[(f64, f64)]) -> Result<f64> {
    if series.len() < 2 {
        return Err(Error::invalid("a slope needs at least two points"));
    }
    if series.iter().any(|&(h, e)| !(h > 0.0) || !(e > 0.0) || !h.is_finite() || !e.is_finite()) {
        return Err(Error::invalid("slope data must be positive and finite"));
    }
    let n = series.len() as f64;
    let xs: Vec<f64> = series.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = series.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 1e-300 {
        return Err(Error::invalid("slope data needs at least two distinct mesh sizes"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// Convergence slope in the reporting convention: negative for errors that
/// decrease under refinement (`error ~ h^2` gives `-2`).
pub fn convergence_slope(series: &[(f64, f64)]) -> Result<f64> {
    Ok(-loglog_slope(series)?)
}

fn facet_points(sol: &MixedSolution) -> usize {
    match sol.mesh.elem_type() {
        fem::ElementType::Quad9 => 4,
        _ => 3,
    }
}

/// Outward flux of the discrete velocity through one local facet.
pub fn facet_flux(sol: &MixedSolution, elem: usize, local: usize) -> Result<f64> {
    let et = sol.mesh.elem_type();
    let mut flux = 0.0;
    for q in fem::facet_quadrature(et, local, facet_points(sol)) {
        let ev = sol.mesh.element_eval(elem, &q.xi)?;
        let (n, ds) = ev.facet_normal(&q.ref_normal);
        let pv = sol.eval_with(elem, &ev)?;
        flux += pv.velocity.dot(&n) * ds * q.weight;
    }
    Ok(flux)
}

/// Net outward flux `int_{dK} v.n` of one element, by facet quadrature.
pub fn element_net_flux(sol: &MixedSolution, elem: usize) -> Result<f64> {
    (0..sol.mesh.elem_type().num_facets()).map(|f| facet_flux(sol, elem, f)).sum()
}

/// `int_K div v` of one element, by volume quadrature.
pub fn element_divergence(sol: &MixedSolution, elem: usize) -> Result<f64> {
    let mut total = 0.0;
    for q in post_rule(sol) {
        let pv = sol.eval(elem, &q.xi)?;
        total += pv.velocity_grad.trace() * pv.det_j * q.weight;
    }
    Ok(total)
}

/// Outward flux through every boundary facet carrying one of `tags`.
pub fn boundary_flux(sol: &MixedSolution, tags: &[&str]) -> Result<f64> {
    let facets: Vec<&BoundaryFacet> = sol
        .mesh
        .facets()
        .iter()
        .filter(|f| tags.contains(&f.tag.as_str()))
        .collect();
    if facets.is_empty() {
        return Err(Error::invalid(format!("no boundary facet carries any of the tags {tags:?}")));
    }
    facets.iter().map(|f| facet_flux(sol, f.elem, f.local)).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MassBalanceReport {
    /// `|int_{dK} v.n|` per element.
    pub errors: Vec<f64>,
    /// Outward flux through the production boundary.
    pub total_flux: f64,
    /// `errors / |total_flux|`, absent when the total flux vanishes.
    pub ratios: Option<Vec<f64>>,
    pub max_ratio: Option<f64>,
    pub mean_ratio: Option<f64>,
}

/// Per-element mass-balance errors relative to the flux through the
/// boundary facets tagged `production`.
pub fn local_mass_balance(sol: &MixedSolution, production: &[&str]) -> Result<MassBalanceReport> {
    let errors: Vec<f64> = element_sum(sol.mesh.num_elements(), |e| Ok(element_net_flux(sol, e)?.abs()))?;
    let total_flux = boundary_flux(sol, production)?;
    let scale = total_flux.abs();
    let (ratios, max_ratio, mean_ratio) = if scale > 1e-14 {
        let r: Vec<f64> = errors.iter().map(|e| e / scale).collect();
        let max = r.iter().copied().fold(0.0, f64::max);
        let mean = r.iter().sum::<f64>() / r.len() as f64;
        (Some(r), Some(max), Some(mean))
    } else {
        (None, None, None)
    };
    Ok(MassBalanceReport {
        errors,
        total_flux,
        ratios,
        max_ratio,
        mean_ratio,
    })
}

/// `int alpha(v_h, p_h, x) v_h.v_h`.
pub fn total_dissipation(sol: &MixedSolution, model: &DragModel) -> Result<f64> {
    let rule = post_rule(sol);
    let parts = element_sum(sol.mesh.num_elements(), |e| {
        let mut acc = 0.0;
        for q in &rule {
            let pv = sol.eval(e, &q.xi)?;
            acc += q.weight * pv.det_j * model.dissipation_density(&pv.velocity, pv.pressure, &pv.x)?;
        }
        Ok(acc)
    })?;
    Ok(parts.into_iter().sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reciprocity {
    /// `int rho b1 . v2 - int_{dOmega} p1 (v2.n)`
    pub lhs: f64,
    /// `int rho b2 . v1 - int_{dOmega} p2 (v1.n)`
    pub rhs: f64,
    pub residual: f64,
    /// Residual over the largest magnitude among the four terms.
    pub relative: f64,
}

/// Reciprocal identity between two solutions on the same mesh with loads
/// `load1`, `load2`. Normal velocities are taken from the discrete traces.
pub fn reciprocity_residual(sol1: &MixedSolution, load1: &VectorFn, sol2: &MixedSolution, load2: &VectorFn) -> Result<Reciprocity> {
    if !std::sync::Arc::ptr_eq(&sol1.mesh, &sol2.mesh) && sol1.mesh.num_nodes() != sol2.mesh.num_nodes() {
        return Err(Error::invalid("reciprocity needs both solutions on one mesh"));
    }
    let mesh = &sol1.mesh;
    let rule = post_rule(sol1);
    let mut vol = [0.0; 2];
    for e in 0..mesh.num_elements() {
        for q in &rule {
            let a = sol1.eval(e, &q.xi)?;
            let b = sol2.eval(e, &q.xi)?;
            let w = q.weight * a.det_j;
            vol[0] += w * load1(&a.x).dot(&b.velocity);
            vol[1] += w * load2(&a.x).dot(&a.velocity);
        }
    }
    let mut surf = [0.0; 2];
    let et = mesh.elem_type();
    for f in mesh.facets() {
        for q in fem::facet_quadrature(et, f.local, facet_points(sol1)) {
            let ev = mesh.element_eval(f.elem, &q.xi)?;
            let (n, ds) = ev.facet_normal(&q.ref_normal);
            let a = sol1.eval_with(f.elem, &ev)?;
            let b = sol2.eval_with(f.elem, &ev)?;
            let w = q.weight * ds;
            surf[0] += w * a.pressure * b.velocity.dot(&n);
            surf[1] += w * b.pressure * a.velocity.dot(&n);
        }
    }
    let lhs = vol[0] - surf[0];
    let rhs = vol[1] - surf[1];
    let residual = (lhs - rhs).abs();
    let scale = vol.iter().chain(&surf).map(|v| v.abs()).fold(0.0, f64::max);
    Ok(Reciprocity {
        lhs,
        rhs,
        residual,
        relative: if scale > 0.0 { residual / scale } else { 0.0 },
    })
}

/// A velocity field compared against a solution. It is evaluated at the
/// solution's quadrature points and may use the solution's values there.
pub trait Candidate: Sync {
    fn velocity(&self, elem: usize, at: &PointValues) -> Vec3;
}

impl<F> Candidate for F
where
    F: Fn(usize, &PointValues) -> Vec3 + Sync,
{
    fn velocity(&self, elem: usize, at: &PointValues) -> Vec3 {
        self(elem, at)
    }
}

/// Dissipation of the solution and of an admissible candidate, both with
/// the drag coefficient frozen at the solution.
///
/// The candidate must differ from the solution by a field with zero normal
/// trace on the whole boundary and zero net flux out of every element.
pub fn dissipation_comparison(candidate: &dyn Candidate, sol: &MixedSolution, model: &DragModel) -> Result<(f64, f64)> {
    let mesh = &sol.mesh;
    let et = mesh.elem_type();
    let nf = facet_points(sol) + 2;
    let mut scale = 0.0f64;
    let mut worst_boundary = 0.0f64;
    let boundary: std::collections::HashSet<(usize, usize)> = mesh.facets().iter().map(|f| (f.elem, f.local)).collect();
    for e in 0..mesh.num_elements() {
        let mut net = 0.0;
        for local in 0..et.num_facets() {
            let mut facet_abs = 0.0;
            for q in fem::facet_quadrature(et, local, nf) {
                let ev = mesh.element_eval(e, &q.xi)?;
                let (n, ds) = ev.facet_normal(&q.ref_normal);
                let pv = sol.eval_with(e, &ev)?;
                let d = (candidate.velocity(e, &pv) - pv.velocity).dot(&n) * ds * q.weight;
                net += d;
                facet_abs += d.abs();
                scale = scale.max(pv.velocity.norm() * ds * q.weight);
            }
            if boundary.contains(&(e, local)) {
                worst_boundary = worst_boundary.max(facet_abs);
            }
        }
        if net.abs() > 1e-9 * scale.max(1e-300) {
            return Err(Error::invalid(format!(
                "candidate is not admissible: net perturbation flux {net:e} out of element {e}"
            )));
        }
    }
    if worst_boundary > 1e-9 * scale.max(1e-300) {
        return Err(Error::invalid(format!(
            "candidate is not admissible: normal perturbation {worst_boundary:e} on the boundary"
        )));
    }
    let rule = post_rule(sol);
    let parts = element_sum(mesh.num_elements(), |e| {
        let mut acc = [0.0; 2];
        for q in &rule {
            let pv = sol.eval(e, &q.xi)?;
            let alpha = model.alpha(&pv.velocity, pv.pressure, &pv.x)?;
            let w = q.weight * pv.det_j * alpha;
            let c = candidate.velocity(e, &pv);
            acc[0] += w * pv.velocity.norm_squared();
            acc[1] += w * c.norm_squared();
        }
        Ok(acc)
    })?;
    Ok(parts.iter().fold((0.0, 0.0), |(a, b), p| (a + p[0], b + p[1])))
}
