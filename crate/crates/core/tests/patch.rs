use std::sync::Arc;

use darcyflow::drag::{DragModel, DragVariant};
use darcyflow::formulation::Formulation;
use darcyflow::mesh::{generate_hex, generate_quad, generate_tri, AxisBox, Mesh, RegionField};
use darcyflow::postproc::{local_mass_balance, reciprocity_residual};
use darcyflow::solver::{nonlinear_solve, BoundaryConditions, MixedSolution, Problem};
use darcyflow::Vec3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Moves interior nodes by up to `amount * h` in each direction.
fn distort(mesh: &Mesh, amount: f64, seed: u64) -> Mesh {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = mesh.h();
    let nodes = mesh
        .nodes()
        .iter()
        .map(|x| {
            let interior = (0..mesh.dim()).all(|c| x[c] > 1e-9 && x[c] < 1.0 - 1e-9);
            if !interior {
                return *x;
            }
            let mut y = *x;
            for c in 0..mesh.dim() {
                y[c] += rng.gen_range(-amount..amount) * h;
            }
            y
        })
        .collect();
    Mesh::new(mesh.elem_type(), nodes, mesh.elements().to_vec(), mesh.facets().to_vec(), h).unwrap()
}

fn uniform_flow_bcs(flow: Vec3, mesh: &Mesh) -> BoundaryConditions {
    let origin = mesh.nodes_at(&Vec3::zeros())[0];
    BoundaryConditions::new()
        .normal_velocity("left", -flow.x)
        .normal_velocity("right", flow.x)
        .normal_velocity("bottom", -flow.y)
        .normal_velocity("top", flow.y)
        .pin_pressure(origin, 0.0)
}

fn check_uniform_flow(mesh: Mesh, formulation: Formulation, alpha: f64) {
    let flow = Vec3::new(1.0, 0.5, 0.0);
    let bcs = uniform_flow_bcs(flow, &mesh);
    let problem = Problem::new(Arc::new(mesh), DragModel::constant(alpha).unwrap(), formulation, bcs);
    let (sol, report) = nonlinear_solve(&problem).unwrap();
    assert!(report.converged);
    for (n, x) in sol.mesh.nodes().iter().enumerate() {
        let v = sol.node_velocity(n);
        assert!((v - flow).norm() <= 1e-10, "{formulation} node {n}: v = {v}");
        let p = -alpha * flow.dot(x);
        assert!((sol.pressure[n] - p).abs() <= 1e-10 * alpha, "{formulation} node {n}: p = {}", sol.pressure[n]);
    }
}

#[test]
fn uniform_flow_on_regular_meshes() {
    for formulation in [Formulation::LeastSquares, Formulation::Vms] {
        check_uniform_flow(generate_quad(4, 3, AxisBox::unit_square(), 1).unwrap(), formulation, 1.0);
        check_uniform_flow(generate_quad(3, 3, AxisBox::unit_square(), 2).unwrap(), formulation, 20.0);
        check_uniform_flow(generate_tri(4, 4, AxisBox::unit_square()).unwrap(), formulation, 3.0);
    }
}

#[test]
fn uniform_flow_on_distorted_meshes() {
    for formulation in [Formulation::LeastSquares, Formulation::Vms] {
        check_uniform_flow(distort(&generate_quad(5, 5, AxisBox::unit_square(), 1).unwrap(), 0.2, 1), formulation, 2.0);
        check_uniform_flow(distort(&generate_quad(3, 3, AxisBox::unit_square(), 2).unwrap(), 0.1, 2), formulation, 2.0);
        check_uniform_flow(distort(&generate_tri(5, 5, AxisBox::unit_square()).unwrap(), 0.2, 3), formulation, 2.0);
    }
}

#[test]
fn uniform_flow_in_hexahedra() {
    for formulation in [Formulation::LeastSquares, Formulation::Vms] {
        let mesh = Arc::new(generate_hex(3, 3, 3, AxisBox::unit_cube()).unwrap());
        let origin = mesh.nodes_at(&Vec3::zeros())[0];
        let bcs = BoundaryConditions::new()
            .normal_velocity("left", -1.0)
            .normal_velocity("right", 1.0)
            .normal_velocity("bottom", 0.0)
            .normal_velocity("top", 0.0)
            .normal_velocity("front", 0.0)
            .normal_velocity("back", 0.0)
            .pin_pressure(origin, 0.0);
        let model = DragModel::new(DragVariant::Forchheimer, 1.0, 0.0, 1.0, RegionField::uniform(1.0).unwrap()).unwrap();
        let problem = Problem::new(mesh, model, formulation, bcs);
        let (sol, report) = nonlinear_solve(&problem).unwrap();
        assert!(report.converged);
        for (n, x) in sol.mesh.nodes().iter().enumerate() {
            assert!((sol.node_velocity(n) - Vec3::new(1.0, 0.0, 0.0)).norm() <= 1e-10);
            assert!((sol.pressure[n] + 2.0 * x.x).abs() <= 1e-10);
        }
    }
}

#[test]
fn vms_solution_independent_of_linearization() {
    let mesh = Arc::new(generate_quad(6, 6, AxisBox::unit_square(), 1).unwrap());
    let corner = mesh.nodes_at(&Vec3::new(1.0, 1.0, 0.0))[0];
    for variant in [DragVariant::Barus, DragVariant::Forchheimer, DragVariant::BarusForchheimer] {
        let model = DragModel::new(variant, 1.0, 0.4, 0.6, RegionField::uniform(1.0).unwrap()).unwrap();
        let bcs = BoundaryConditions::new()
            .normal_velocity("left", -1.0)
            .normal_velocity("bottom", 0.0)
            .normal_velocity("top", 0.0)
            .pressure("right", 1.0);
        let mut problem = Problem::new(mesh.clone(), model, Formulation::Vms, bcs);
        problem.load = Arc::new(|x: &Vec3| Vec3::new(0.0, -1.0 - x.x, 0.0));
        problem.theta = 0.0;
        let (picard, r0) = nonlinear_solve(&problem).unwrap();
        problem.theta = 1.0;
        let (newton, r1) = nonlinear_solve(&problem).unwrap();
        assert!(r0.converged && r1.converged);
        assert!(r1.iterations <= r0.iterations, "{variant}: {} vs {}", r1.iterations, r0.iterations);
        let dp = picard.pressure.iter().zip(&newton.pressure).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(dp <= 1e-8, "{variant}: {dp:e}");
        assert!(picard.pressure[corner] > 0.0);
    }
}

#[test]
fn mass_balance_exact_for_uniform_flow() {
    let mesh = distort(&generate_quad(4, 4, AxisBox::unit_square(), 1).unwrap(), 0.2, 9);
    let bcs = uniform_flow_bcs(Vec3::new(1.0, 0.0, 0.0), &mesh);
    let problem = Problem::new(Arc::new(mesh), DragModel::constant(1.0).unwrap(), Formulation::LeastSquares, bcs);
    let (sol, _) = nonlinear_solve(&problem).unwrap();
    let report = local_mass_balance(&sol, &["right"]).unwrap();
    assert!((report.total_flux - 1.0).abs() <= 1e-10);
    assert!(report.max_ratio.unwrap() <= 1e-10);
}

fn solve_loaded(mesh: &Arc<Mesh>, alpha: f64, load: fn(&Vec3) -> Vec3) -> MixedSolution {
    let origin = mesh.nodes_at(&Vec3::zeros())[0];
    let bcs = BoundaryConditions::new()
        .normal_velocity("left", 0.0)
        .normal_velocity("right", 0.0)
        .normal_velocity("bottom", 0.0)
        .normal_velocity("top", 0.0)
        .pin_pressure(origin, 0.0);
    let mut problem = Problem::new(mesh.clone(), DragModel::constant(alpha).unwrap(), Formulation::Vms, bcs);
    problem.load = Arc::new(load);
    nonlinear_solve(&problem).unwrap().0
}

#[test]
fn reciprocity_for_constant_drag() {
    let mesh = Arc::new(generate_quad(8, 8, AxisBox::unit_square(), 2).unwrap());
    let l1 = |x: &Vec3| Vec3::new(x.y * x.y, 1.0, 0.0);
    let l2 = |x: &Vec3| Vec3::new(0.0, x.x, 0.0);
    let s1 = solve_loaded(&mesh, 2.0, l1);
    let s2 = solve_loaded(&mesh, 2.0, l2);
    let r = reciprocity_residual(&s1, &l1, &s2, &l2).unwrap();
    assert!(r.lhs.abs() > 1e-4, "{r:?}");
    assert!(r.relative <= 1e-10, "{r:?}");
}
