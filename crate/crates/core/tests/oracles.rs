use std::sync::Arc;

use darcyflow::drag::{DragModel, DragVariant};
use darcyflow::formulation::{ls_element_system, ls_functional, IterateSnapshot, LsWeight, VectorFn};
use darcyflow::mesh::{generate_quad, generate_tri, AxisBox, Mesh, RegionField};
use darcyflow::solver::{
    apply_constraints, scatter, solve_linear, BoundaryConditions, Constraints, CsrMatrix, MixedSolution, Problem,
};
use darcyflow::formulation::Formulation;
use darcyflow::Vec3;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn mbf() -> DragModel {
    DragModel::new(DragVariant::BarusForchheimer, 1.3, 0.4, 0.7, RegionField::uniform(0.8).unwrap()).unwrap()
}

fn random_iterate(mesh: &Mesh, rng: &mut ChaCha8Rng) -> MixedSolution {
    let n = mesh.num_nodes();
    let v = (0..n * mesh.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let p = (0..n).map(|_| rng.gen_range(-0.5..1.5)).collect();
    MixedSolution::new(Arc::new(mesh.clone()), v, p).unwrap()
}

fn load() -> Box<VectorFn> {
    Box::new(|x: &Vec3| Vec3::new(1.0 + x.y, -0.5 * x.x, 0.0))
}

/// Central-difference Hessian of the element functional.
fn fd_hessian(mesh: &Mesh, elem: usize, model: &DragModel, snap: &IterateSnapshot, weight: LsWeight, u0: &[f64]) -> DMatrix<f64> {
    let n = u0.len();
    let f = load();
    let j = |u: &[f64]| ls_functional(mesh, elem, model, snap, weight, &*f, u).unwrap();
    let step = 1e-3;
    let mut h = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let mut u = u0.to_vec();
            let mut eval = |da: f64, db: f64| {
                u.copy_from_slice(u0);
                u[a] += da;
                u[b] += db;
                j(&u)
            };
            h[(a, b)] = (eval(step, step) - eval(step, -step) - eval(-step, step) + eval(-step, -step)) / (4.0 * step * step);
        }
    }
    h
}

fn check_hessian(mesh: &Mesh, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let model = mbf();
    let f = load();
    for weight in [LsWeight::Unit, LsWeight::Drag] {
        for theta in [0.0, 1.0] {
            let iterate = random_iterate(mesh, &mut rng);
            for e in 0..mesh.num_elements() {
                let snap = iterate.element_snapshot(e, theta).unwrap();
                let sys = ls_element_system(mesh, e, &model, &snap, weight, &*f).unwrap();
                let u0: Vec<f64> = (0..sys.fe.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let h = fd_hessian(mesh, e, &model, &snap, weight, &u0);
                let rel = (&h - &sys.ke).norm() / sys.ke.norm();
                assert!(rel <= 1e-6, "{weight:?} theta {theta} elem {e}: relative Hessian mismatch {rel:e}");
                // gradient at zero is -fe
                let zero = vec![0.0; u0.len()];
                let step = 1e-4;
                for a in 0..u0.len() {
                    let mut up = zero.clone();
                    let mut dn = zero.clone();
                    up[a] = step;
                    dn[a] = -step;
                    let g = (ls_functional(mesh, e, &model, &snap, weight, &*f, &up).unwrap()
                        - ls_functional(mesh, e, &model, &snap, weight, &*f, &dn).unwrap())
                        / (2.0 * step);
                    assert!((g + sys.fe[a]).abs() <= 1e-6 * (1.0 + sys.fe.amax()), "gradient {a}: {g} vs {}", -sys.fe[a]);
                }
            }
        }
    }
}

#[test]
fn ls_matrix_is_functional_hessian_single_q4() {
    let mesh = generate_quad(1, 1, AxisBox::new_2d(0.0, 0.7, 0.2, 1.0), 1).unwrap();
    check_hessian(&mesh, 1);
}

#[test]
fn ls_matrix_is_functional_hessian_two_q9() {
    let mesh = generate_quad(2, 1, AxisBox::unit_square(), 2).unwrap();
    check_hessian(&mesh, 2);
}

#[test]
fn ls_matrix_is_functional_hessian_two_t3() {
    let mesh = generate_tri(1, 1, AxisBox::new_2d(0.0, 2.0, 0.0, 1.0)).unwrap();
    check_hessian(&mesh, 3);
}

fn small_problem(formulation: Formulation) -> Problem {
    let mesh = Arc::new(generate_quad(2, 1, AxisBox::unit_square(), 2).unwrap());
    let bcs = BoundaryConditions::new().normal_velocity("left", -1.0).normal_velocity("right", 1.0).pressure("right", 0.0);
    let mut p = Problem::new(mesh, mbf(), formulation, bcs);
    p.load = Arc::new(|x: &Vec3| Vec3::new(x.x, 1.0, 0.0));
    p
}

#[test]
fn global_assembly_matches_dense_scatter() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for formulation in [Formulation::LeastSquares, Formulation::Vms] {
        let problem = small_problem(formulation);
        let n = problem.mesh.num_nodes();
        let current = MixedSolution::new(
            problem.mesh.clone(),
            (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            (0..n).map(|_| rng.gen_range(0.0..1.0)).collect(),
        )
        .unwrap();
        let systems = problem.element_systems(&current).unwrap();
        let global = scatter(problem.ndofs(), &systems).unwrap();
        let mut dense = DMatrix::zeros(problem.ndofs(), problem.ndofs());
        let mut rhs = DVector::zeros(problem.ndofs());
        for s in &systems {
            for (a, &i) in s.dof_map.iter().enumerate() {
                rhs[i] += s.fe[a];
                for (b, &j) in s.dof_map.iter().enumerate() {
                    dense[(i, j)] += s.ke[(a, b)];
                }
            }
        }
        let scale = dense.amax();
        assert!((global.matrix.to_dense() - &dense).amax() <= 1e-12 * scale);
        assert!((DVector::from_vec(global.rhs.clone()) - rhs).amax() <= 1e-12 * scale);
        if formulation == Formulation::LeastSquares {
            assert!(global.matrix.asymmetry() <= 1e-12 * scale);
        }
    }
}

#[test]
fn elimination_matches_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 12;
    let a = DMatrix::from_fn(n, n, |i, j| if i == j { 10.0 } else { rng.gen_range(-1.0..1.0) });
    let b = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    let triplets = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| (i, j, a[(i, j)])).collect();
    let system = darcyflow::solver::GlobalSystem {
        matrix: CsrMatrix::from_triplets(n, n, triplets).unwrap(),
        rhs: b.as_slice().to_vec(),
    };
    let mut c = Constraints::default();
    c.insert(2, 0.5).unwrap();
    c.insert(7, -1.5).unwrap();
    c.insert(11, 0.0).unwrap();
    let reduced = apply_constraints(&system, &c).unwrap();
    let x = reduced.expand(&solve_linear(&reduced.matrix, &reduced.rhs).unwrap());
    // dense oracle: replace constrained rows by identity rows
    let mut ad = a.clone();
    let mut bd = b.clone();
    for (&dof, &v) in &c.values {
        ad.row_mut(dof).fill(0.0);
        ad[(dof, dof)] = 1.0;
        bd[dof] = v;
    }
    let xd = ad.lu().solve(&bd).unwrap();
    for i in 0..n {
        assert!((x[i] - xd[i]).abs() <= 1e-12 * (1.0 + xd.amax()), "dof {i}: {} vs {}", x[i], xd[i]);
    }
}

#[test]
fn sparse_solve_matches_dense_on_spd_system() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 100;
    let mut entries = Vec::new();
    let mut dense = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for _ in 0..4 {
            let j = rng.gen_range(0..n);
            let v: f64 = rng.gen_range(-1.0..1.0);
            dense[(i, j)] += v;
            dense[(j, i)] += v;
        }
    }
    for i in 0..n {
        let row: f64 = dense.row(i).iter().map(|v| v.abs()).sum();
        dense[(i, i)] += row + 1.0;
    }
    for i in 0..n {
        for j in 0..n {
            if dense[(i, j)] != 0.0 {
                entries.push((i, j, dense[(i, j)]));
            }
        }
    }
    let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let a = CsrMatrix::from_triplets(n, n, entries).unwrap();
    let x = solve_linear(&a, &b).unwrap();
    let xd = dense.cholesky().unwrap().solve(&DVector::from_vec(b));
    let err = (DVector::from_vec(x) - &xd).amax();
    assert!(err <= 1e-10 * xd.amax(), "{err:e}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ls_element_matrix_symmetric_psd(seed in 0u64..1000, theta in 0.0f64..=1.0, unit in any::<bool>()) {
        let mesh = generate_quad(1, 1, AxisBox::unit_square(), 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let snap = random_iterate(&mesh, &mut rng).element_snapshot(0, theta).unwrap();
        let weight = if unit { LsWeight::Unit } else { LsWeight::Drag };
        let f = load();
        let sys = ls_element_system(&mesh, 0, &mbf(), &snap, weight, &*f).unwrap();
        let scale = sys.ke.amax();
        prop_assert!((&sys.ke - sys.ke.transpose()).amax() <= 1e-12 * scale);
        let eig = sys.ke.clone().symmetric_eigen();
        prop_assert!(eig.eigenvalues.min() >= -1e-10 * scale);
    }

    #[test]
    fn scatter_is_additive(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let problem = small_problem(Formulation::Vms);
        let n = problem.mesh.num_nodes();
        let cur = MixedSolution::new(
            problem.mesh.clone(),
            (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            (0..n).map(|_| rng.gen_range(0.0..1.0)).collect(),
        ).unwrap();
        let systems = problem.element_systems(&cur).unwrap();
        let whole = scatter(problem.ndofs(), &systems).unwrap().matrix.to_dense();
        let parts: DMatrix<f64> = systems
            .iter()
            .map(|s| scatter(problem.ndofs(), std::slice::from_ref(s)).unwrap().matrix.to_dense())
            .fold(DMatrix::zeros(problem.ndofs(), problem.ndofs()), |a, b| a + b);
        prop_assert!((whole - parts).amax() <= 1e-12);
    }
}
