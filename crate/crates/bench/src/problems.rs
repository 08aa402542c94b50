//! Benchmark problem library.

use std::f64::consts::PI;
use std::sync::Arc;

use darcyflow::drag::{DragModel, DragVariant};
use darcyflow::fem::ElementType;
use darcyflow::mesh::{carve_holes, generate_hex, generate_quad, generate_tri, AxisBox, Mesh, RegionField};
use darcyflow::postproc::ExactSolution;
use darcyflow::solver::{BoundaryConditions, Problem};
use darcyflow::Vec3;
use nalgebra::Matrix3;

use crate::config::{ProblemKind, ProblemSpec, Span};
use crate::error::{BenchError, BenchResult};

pub const INJECTION: &str = "injection";
pub const PRODUCTION: &str = "production";

/// A ready-to-solve problem and what post-processing needs to know.
pub struct BuiltProblem {
    pub problem: Problem,
    pub exact: Option<Arc<dyn ExactSolution + Send>>,
    /// Node whose pressure is reported as the injection pressure.
    pub injection_node: Option<usize>,
    /// Boundary tags whose outward flux is the production rate.
    pub production_tags: Vec<String>,
}

/// Manufactured velocity `(2y(x+y), 4x - y^2)` and pressure
/// `10 - xy - sin(pi x) sin(pi y)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ManufacturedFlow;

impl ExactSolution for ManufacturedFlow {
    fn velocity(&self, x: &Vec3) -> Vec3 {
        Vec3::new(2.0 * x.y * (x.x + x.y), 4.0 * x.x - x.y * x.y, 0.0)
    }

    fn velocity_grad(&self, x: &Vec3) -> Matrix3<f64> {
        Matrix3::new(2.0 * x.y, 2.0 * x.x + 4.0 * x.y, 0.0, 4.0, -2.0 * x.y, 0.0, 0.0, 0.0, 0.0)
    }

    fn pressure(&self, x: &Vec3) -> f64 {
        10.0 - x.x * x.y - (PI * x.x).sin() * (PI * x.y).sin()
    }

    fn pressure_grad(&self, x: &Vec3) -> Vec3 {
        Vec3::new(
            -x.y - PI * (PI * x.x).cos() * (PI * x.y).sin(),
            -x.x - PI * (PI * x.x).sin() * (PI * x.y).cos(),
            0.0,
        )
    }
}

/// Body force `b` for which the manufactured pair solves the momentum
/// balance `alpha(v, p) v + grad p = rho b`.
pub fn manufactured_body_force(model: &DragModel, rho: f64, x: &Vec3) -> darcyflow::Result<Vec3> {
    let ex = ManufacturedFlow;
    let v = ex.velocity(x);
    let alpha = model.alpha(&v, ex.pressure(x), x)?;
    Ok((v * alpha + ex.pressure_grad(x)) / rho)
}

/// Pressure of the one-dimensional pressure-dependent flow
/// `dp/dx = -exp(beta p)` with `p(0) = 0`.
pub fn barus_channel_pressure(beta_b: f64, x: f64) -> f64 {
    if beta_b == 0.0 {
        -x
    } else {
        -(1.0 + beta_b * x).ln() / beta_b
    }
}

fn model_from(spec: &ProblemSpec, permeability: RegionField) -> BenchResult<DragModel> {
    let m = &spec.model;
    let (beta_b, beta_f) = match m.variant {
        DragVariant::Darcy => (0.0, 0.0),
        DragVariant::Barus => (m.beta_b, 0.0),
        DragVariant::Forchheimer => (0.0, m.beta_f),
        DragVariant::BarusForchheimer => (m.beta_b, m.beta_f),
    };
    Ok(DragModel::new(m.variant, m.mu0, beta_b, beta_f, permeability)?)
}

fn quad_order(elem: ElementType) -> usize {
    if elem == ElementType::Quad9 {
        2
    } else {
        1
    }
}

fn planar_mesh(spec: &ProblemSpec, bx: AxisBox) -> BenchResult<Mesh> {
    let m = &spec.mesh;
    Ok(match m.element {
        ElementType::Tri3 => generate_tri(m.nx, m.ny, bx)?,
        ElementType::Quad4 | ElementType::Quad9 => generate_quad(m.nx, m.ny, bx, quad_order(m.element))?,
        ElementType::Hex8 => return Err(BenchError::config("planar problems need T3, Q4 or Q9 elements")),
    })
}

fn corner(mesh: &Mesh, x: f64, y: f64, z: f64) -> BenchResult<usize> {
    mesh.nodes_at(&Vec3::new(x, y, z))
        .first()
        .copied()
        .ok_or_else(|| BenchError::config(format!("no mesh node at ({x}, {y}, {z})")))
}

fn finish(spec: &ProblemSpec, mesh: Arc<Mesh>, model: DragModel, bcs: BoundaryConditions) -> Problem {
    let mut problem = Problem::new(mesh, model, spec.solver.formulation, bcs);
    problem.ls_weight = spec.ls_weight();
    problem.theta = spec.solver.theta;
    problem.tol = spec.solver.tol;
    problem.max_iterations = spec.solver.max_iterations;
    let load = Vec3::from(spec.physics.body_force) * spec.physics.rho;
    problem.load = Arc::new(move |_: &Vec3| load);
    problem
}

pub fn build(spec: &ProblemSpec) -> BenchResult<BuiltProblem> {
    spec.validate()?;
    match spec.kind() {
        ProblemKind::Mms => mms_problem(spec),
        ProblemKind::FiveSpot => five_spot_problem(spec),
        ProblemKind::Patch3d => patch3d_problem(spec),
        ProblemKind::Reservoir | ProblemKind::Layered | ProblemKind::Staggered => reservoir_problem(spec),
    }
}

/// Manufactured-solution problem on the unit square: exact normal velocity
/// on the whole boundary and the exact pressure pinned at the origin.
pub fn mms_problem(spec: &ProblemSpec) -> BenchResult<BuiltProblem> {
    let mesh = Arc::new(planar_mesh(spec, AxisBox::unit_square())?);
    let model = model_from(spec, RegionField::uniform(spec.model.permeability)?)?;
    let ex = ManufacturedFlow;
    let origin = corner(&mesh, 0.0, 0.0, 0.0)?;
    let mut bcs = BoundaryConditions::new().pin_pressure(origin, ex.pressure(&Vec3::zeros()));
    for (tag, n) in [
        ("left", Vec3::new(-1.0, 0.0, 0.0)),
        ("right", Vec3::new(1.0, 0.0, 0.0)),
        ("bottom", Vec3::new(0.0, -1.0, 0.0)),
        ("top", Vec3::new(0.0, 1.0, 0.0)),
    ] {
        bcs = bcs.normal_velocity_fn(tag, Arc::new(move |x: &Vec3| ManufacturedFlow.velocity(x).dot(&n)));
    }
    let mut problem = finish(spec, mesh, model.clone(), bcs);
    let rho = spec.physics.rho;
    problem.load = Arc::new(move |x: &Vec3| {
        manufactured_body_force(&model, rho, x).map_or(Vec3::repeat(f64::NAN), |b| b * rho)
    });
    Ok(BuiltProblem {
        problem,
        exact: Some(Arc::new(ex)),
        injection_node: None,
        production_tags: Vec::new(),
    })
}

/// Quarter five-spot on the unit square: impervious walls, both velocity
/// components prescribed at the injection corner `(0,0)` and the production
/// corner `(1,1)`, and the production pressure pinned at `(1,1)`.
pub fn five_spot_problem(spec: &ProblemSpec) -> BenchResult<BuiltProblem> {
    let mesh = Arc::new(planar_mesh(spec, AxisBox::unit_square())?);
    let model = model_from(spec, RegionField::uniform(spec.model.permeability)?)?;
    let inj = corner(&mesh, 0.0, 0.0, 0.0)?;
    let prod = corner(&mesh, 1.0, 1.0, 0.0)?;
    let w = spec.boundary.well_velocity;
    let mut bcs = BoundaryConditions::new();
    for tag in ["left", "right", "bottom", "top"] {
        bcs = bcs.normal_velocity(tag, 0.0);
    }
    bcs = bcs
        .velocity_at(inj, 0, w)
        .velocity_at(inj, 1, w)
        .velocity_at(prod, 0, w)
        .velocity_at(prod, 1, w)
        .pin_pressure(prod, spec.boundary.p_production);
    Ok(BuiltProblem {
        problem: finish(spec, mesh, model, bcs),
        exact: None,
        injection_node: Some(inj),
        production_tags: Vec::new(),
    })
}

/// Unit cube with uniform inflow through `x = 0`, outflow through `x = 1`,
/// impervious remaining faces and the pressure pinned at the origin.
pub fn patch3d_problem(spec: &ProblemSpec) -> BenchResult<BuiltProblem> {
    let m = &spec.mesh;
    if m.element != ElementType::Hex8 {
        return Err(BenchError::config("the 3D patch problem needs B8 elements"));
    }
    let mesh = Arc::new(generate_hex(m.nx, m.ny, m.nz, AxisBox::unit_cube())?);
    let model = model_from(spec, RegionField::uniform(spec.model.permeability)?)?;
    let origin = corner(&mesh, 0.0, 0.0, 0.0)?;
    let v = spec.boundary.v_n;
    let mut bcs = BoundaryConditions::new()
        .normal_velocity("left", -v)
        .normal_velocity("right", v)
        .pin_pressure(origin, spec.boundary.p_pin);
    for tag in ["bottom", "top", "front", "back"] {
        bcs = bcs.normal_velocity(tag, 0.0);
    }
    Ok(BuiltProblem {
        problem: finish(spec, mesh, model, bcs),
        exact: None,
        injection_node: Some(origin),
        production_tags: vec!["right".into()],
    })
}

fn on_span(s: &Span, length: f64, height: f64, c: &Vec3) -> bool {
    let tol = 1e-9 * length.max(height);
    let on_side = match s.side {
        crate::config::Side::Left => c.x.abs() < tol,
        crate::config::Side::Right => (c.x - length).abs() < tol,
        crate::config::Side::Bottom => c.y.abs() < tol,
        crate::config::Side::Top => (c.y - height).abs() < tol,
    };
    let t = c[s.side.along()];
    on_side && t > s.from && t < s.to
}

/// Rectangular reservoir: pressure `p_enh` on the injection spans,
/// `p_production` on the production spans, impervious elsewhere. Layers set
/// a piecewise permeability and holes are carved out as impervious blocks.
pub fn reservoir_problem(spec: &ProblemSpec) -> BenchResult<BuiltProblem> {
    let g = spec
        .geometry
        .as_ref()
        .ok_or_else(|| BenchError::config("reservoir problems need a [geometry] section"))?;
    let domain = AxisBox::new_2d(0.0, g.length, 0.0, g.height);
    let mut mesh = planar_mesh(spec, domain)?;
    if !g.holes.is_empty() {
        let holes: Vec<AxisBox> = g.holes.iter().map(|h| AxisBox::new_2d(h.x0, h.x1, h.y0, h.y1)).collect();
        mesh = carve_holes(&mesh, &holes)?;
    }
    let (length, height) = (g.length, g.height);
    mesh = mesh
        .retag_facets(INJECTION, |_, c| g.injection.iter().any(|s| on_span(s, length, height, c)))
        .retag_facets(PRODUCTION, |_, c| g.production.iter().any(|s| on_span(s, length, height, c)));
    let tags = mesh.tags();
    for needed in [INJECTION, PRODUCTION] {
        if !tags.iter().any(|t| t == needed) {
            return Err(BenchError::config(format!("no boundary facet falls inside the {needed} spans")));
        }
    }
    let permeability = if g.layers.is_empty() {
        RegionField::uniform(spec.model.permeability)?
    } else {
        let layers: Vec<(f64, f64)> = g.layers.iter().map(|l| (l.thickness, l.permeability)).collect();
        RegionField::layers(domain, &layers)?
    };
    let model = model_from(spec, permeability)?;
    let mut bcs = BoundaryConditions::new()
        .pressure(INJECTION, spec.boundary.p_enh)
        .pressure(PRODUCTION, spec.boundary.p_production);
    for tag in &tags {
        if tag != INJECTION && tag != PRODUCTION {
            bcs = bcs.normal_velocity(tag, 0.0);
        }
    }
    Ok(BuiltProblem {
        problem: finish(spec, Arc::new(mesh), model, bcs),
        exact: None,
        injection_node: None,
        production_tags: vec![PRODUCTION.into()],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ProblemKind;

    #[test]
    fn manufactured_fields() {
        let ex = ManufacturedFlow;
        assert_eq!(ex.velocity(&Vec3::new(1.0, 1.0, 0.0)), Vec3::new(4.0, 3.0, 0.0));
        for &(x, y) in &[(0.1, 0.7), (0.5, 0.5), (0.9, 0.2)] {
            assert!(ex.velocity_grad(&Vec3::new(x, y, 0.0)).trace().abs() < 1e-15);
        }
        let m = DragModel::constant(1.0).unwrap();
        let b = manufactured_body_force(&m, 1.0, &Vec3::new(0.5, 0.5, 0.0)).unwrap();
        assert!((b - Vec3::new(0.5, 1.25, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn manufactured_gradients_match_differences() {
        let ex = ManufacturedFlow;
        let x = Vec3::new(0.3, 0.6, 0.0);
        let h = 1e-6;
        for a in 0..2 {
            let mut e = Vec3::zeros();
            e[a] = h;
            let dp = (ex.pressure(&(x + e)) - ex.pressure(&(x - e))) / (2.0 * h);
            assert!((dp - ex.pressure_grad(&x)[a]).abs() < 1e-8);
            let dv = (ex.velocity(&(x + e)) - ex.velocity(&(x - e))) / (2.0 * h);
            for c in 0..2 {
                assert!((dv[c] - ex.velocity_grad(&x)[(c, a)]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn barus_channel() {
        assert_eq!(barus_channel_pressure(0.0, 0.4), -0.4);
        let b = 0.5;
        let p = |x: f64| barus_channel_pressure(b, x);
        let x = 0.37;
        let dp = (p(x + 1e-6) - p(x - 1e-6)) / 2e-6;
        assert!((dp + (b * p(x)).exp()).abs() < 1e-8);
    }

    #[test]
    fn every_preset_builds() {
        for kind in ProblemKind::ALL {
            let built = build(&ProblemSpec::preset(kind)).unwrap();
            built.problem.bcs.constraints(&built.problem.mesh, built.problem.formulation).unwrap();
        }
        let st = build(&ProblemSpec::preset(ProblemKind::Staggered)).unwrap();
        assert_eq!(st.problem.mesh.num_elements(), 1696);
    }

    #[test]
    fn misplaced_wells_rejected() {
        let mut spec = ProblemSpec::preset(ProblemKind::Reservoir);
        spec.geometry.as_mut().unwrap().production[0].from = 1.81;
        spec.geometry.as_mut().unwrap().production[0].to = 1.82;
        assert!(build(&spec).is_err());
    }
}
