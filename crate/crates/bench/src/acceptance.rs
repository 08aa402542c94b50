//! Acceptance criteria for the benchmark suite. Each criterion runs its own
//! problems and reports a verdict with one detail line per check.

use std::sync::Arc;

use darcyflow::drag::{DragModel, DragVariant};
use darcyflow::fem::ElementType;
use darcyflow::formulation::{ls_element_system, ls_functional, Formulation, LsWeight, VectorFn};
use darcyflow::mesh::{generate_quad, generate_tri, AxisBox, Mesh, RegionField};
use darcyflow::postproc::reciprocity_residual;
use darcyflow::solver::{nonlinear_solve, scatter, BoundaryConditions, MixedSolution, NonlinearReport, Problem};
use darcyflow::Vec3;
use nalgebra::{DMatrix, DVector};

use crate::config::{ProblemKind, ProblemSpec};
use crate::error::BenchResult;
use crate::problems::barus_channel_pressure;
use crate::run::{slope_rows, solve, RunOutcome};

#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub details: Vec<String>,
}

impl CriterionOutcome {
    fn new(id: u8, title: &'static str) -> Self {
        CriterionOutcome {
            id,
            title,
            passed: true,
            details: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.passed &= ok;
        self.details.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }

    fn note(&mut self, line: String) {
        self.details.push(format!("info {line}"));
    }
}

pub const TITLES: [&str; 9] = [
    "manufactured-solution convergence slopes",
    "five-spot injection pressure vs drag",
    "five-spot injection pressure vs drag model",
    "Picard vs consistent linearization",
    "3D constant-flow patch test",
    "minimum dissipation under refinement",
    "reciprocity",
    "reservoir ceiling flux and mass balance",
    "oracle equivalence of element and global matrices",
];

/// Runs criterion `id` (1 to 9). Errors raised while solving count as a
/// failure and are reported in the details.
pub fn run(id: u8) -> CriterionOutcome {
    let title = TITLES[usize::from(id - 1)];
    let mut out = CriterionOutcome::new(id, title);
    let result = match id {
        1 => mms_slopes(&mut out),
        2 => five_spot_drag(&mut out),
        3 => five_spot_models(&mut out),
        4 => linearization(&mut out),
        5 => patch_3d(&mut out),
        6 => dissipation(&mut out),
        7 => reciprocity(&mut out),
        8 => ceiling_flux(&mut out),
        9 => oracles(&mut out),
        _ => unreachable!("criteria are numbered 1 to 9"),
    };
    if let Err(e) = result {
        out.check(false, format!("error: {e}"));
    }
    out
}

pub fn run_all() -> Vec<CriterionOutcome> {
    (1..=9).map(run).collect()
}

fn within(value: f64, lo: f64, hi: f64) -> bool {
    value >= lo && value <= hi
}

fn rel_err(value: f64, target: f64) -> f64 {
    (value - target).abs() / target.abs()
}

fn variant_spec(kind: ProblemKind, element: ElementType, formulation: Formulation, variant: DragVariant) -> ProblemSpec {
    let mut s = ProblemSpec::preset(kind);
    s.mesh.element = element;
    s.solver.formulation = formulation;
    s.model.variant = variant;
    s
}

fn five_spot(element: ElementType, n: usize, formulation: Formulation, weight: u8) -> ProblemSpec {
    let mut s = variant_spec(ProblemKind::FiveSpot, element, formulation, DragVariant::Darcy);
    s.mesh.nx = n;
    s.mesh.ny = n;
    s.solver.ls_weight = weight;
    s
}

fn injection_pressure(o: &RunOutcome) -> f64 {
    o.scalars.p_injection.unwrap_or(f64::NAN)
}

fn mms_slopes(out: &mut CriterionOutcome) -> BenchResult<()> {
    type Band = (&'static str, &'static str, f64, f64);
    let q4 = |f: Formulation| -> Vec<Band> {
        let h1_lo = if f == Formulation::Vms { -1.29 } else { -1.15 };
        vec![
            ("velocity", "L2", -2.10, -1.90),
            ("velocity", "H1", h1_lo, -0.85),
            ("pressure", "L2", -2.13, -1.85),
            ("pressure", "H1", -1.05, -0.95),
        ]
    };
    let t3: Vec<Band> = vec![
        ("velocity", "L2", -2.07, -1.71),
        ("pressure", "L2", -1.82, -1.52),
        ("pressure", "H1", -1.00, -0.90),
    ];
    for element in [ElementType::Quad4, ElementType::Tri3] {
        for formulation in [Formulation::LeastSquares, Formulation::Vms] {
            for variant in DragVariant::ALL {
                let base = variant_spec(ProblemKind::Mms, element, formulation, variant);
                let runs = [4, 8, 16, 32, 64]
                    .iter()
                    .map(|&n| {
                        let mut s = base.clone();
                        s.mesh.nx = n;
                        s.mesh.ny = n;
                        solve(&s)
                    })
                    .collect::<BenchResult<Vec<_>>>()?;
                let refs: Vec<&RunOutcome> = runs.iter().collect();
                let rows = slope_rows(&refs)?;
                let bands = if element == ElementType::Tri3 { t3.clone() } else { q4(formulation) };
                let label = format!("{element} {formulation} {}", variant.label());
                for row in &rows {
                    let tag = format!("{label} {}-{} slope {:.3}", row.field, row.norm, row.slope);
                    match bands.iter().find(|b| b.0 == row.field && b.1 == row.norm) {
                        Some(&(_, _, lo, hi)) => out.check(within(row.slope, lo, hi), format!("{tag} in [{lo}, {hi}]")),
                        None => out.note(tag),
                    }
                }
            }
        }
    }
    Ok(())
}

fn five_spot_drag(out: &mut CriterionOutcome) -> BenchResult<()> {
    let alphas = [1.0, 20.0, 50.0, 100.0, 250.0, 500.0, 1000.0];
    let vms_ref = [1.27, 6.37, 14.42, 27.84, 68.09, 135.18, 269.37];
    let ls_ref = [1.27, 6.38, 14.46, 27.92, 68.31, 135.60, 269.37];
    let sweep = |base: ProblemSpec| -> BenchResult<Vec<f64>> {
        alphas
            .iter()
            .map(|&a| {
                let mut s = base.clone();
                s.model.mu0 = a;
                Ok(injection_pressure(&solve(&s)?))
            })
            .collect()
    };
    let rows = [
        ("VMS Q4", five_spot(ElementType::Quad4, 20, Formulation::Vms, 2), vms_ref),
        ("LS w2 Q9", five_spot(ElementType::Quad9, 20, Formulation::LeastSquares, 2), ls_ref),
    ];
    let mut vms = Vec::new();
    for (label, base, reference) in rows {
        let p = sweep(base)?;
        for ((a, v), r) in alphas.iter().zip(&p).zip(reference) {
            out.check(
                rel_err(*v, r) <= 0.02,
                format!("{label} alpha {a}: p = {v:.4} vs {r} ({:.2}%)", 100.0 * rel_err(*v, r)),
            );
        }
        if vms.is_empty() {
            vms = p;
        }
    }
    let w1 = sweep(five_spot(ElementType::Quad4, 20, Formulation::LeastSquares, 1))?;
    let (low, high) = (w1[6], vms[6]);
    out.check(
        low <= 0.7 * high,
        format!("LS w1 Q4 alpha 1000: p = {low:.2}, {:.1}% below VMS {high:.2}", 100.0 * (1.0 - low / high)),
    );
    out.note(format!("LS w1 Q4 pressures {:?}", w1.iter().map(|p| format!("{p:.2}")).collect::<Vec<_>>()));
    Ok(())
}

fn five_spot_models(out: &mut CriterionOutcome) -> BenchResult<()> {
    let reference = [(20, [1.2692, 1.5017, 1.3382, 1.5806]), (30, [1.1967, 1.3538, 1.2430, 1.4045])];
    for (n, targets) in reference {
        let pressures = |element, formulation| -> BenchResult<Vec<f64>> {
            DragVariant::ALL
                .iter()
                .map(|&variant| {
                    let mut s = five_spot(element, n, formulation, 2);
                    s.model.variant = variant;
                    s.model.beta_b = 0.5;
                    s.model.beta_f = 0.5;
                    Ok(injection_pressure(&solve(&s)?))
                })
                .collect()
        };
        let ls = pressures(ElementType::Quad9, Formulation::LeastSquares)?;
        let nele = n * n;
        for ((variant, p), t) in DragVariant::ALL.iter().zip(&ls).zip(targets) {
            out.check(
                rel_err(*p, t) <= 0.01,
                format!("LS Q9 Nele {nele} {}: p = {p:.4} vs {t} ({:.2}%)", variant.label(), 100.0 * rel_err(*p, t)),
            );
        }
        let [d, mb, f, mbf] = [ls[0], ls[1], ls[2], ls[3]];
        out.check(d < f && f < mb && mb < mbf, format!("LS Q9 Nele {nele} ordering D < F < MB < MBF"));
        let vms = pressures(ElementType::Quad4, Formulation::Vms)?;
        out.note(format!(
            "VMS Q4 Nele {nele}: {}",
            vms.iter().map(|p| format!("{p:.4}")).collect::<Vec<_>>().join(" / ")
        ));
    }
    Ok(())
}

/// Convergence order fitted to the tail of the increment history, ignoring
/// increments already at round-off level.
fn terminal_order(report: &NonlinearReport) -> Option<f64> {
    let r: Vec<f64> = report
        .history
        .iter()
        .map(|h| h.res_v.max(h.res_p))
        .filter(|&r| r > 1e-13)
        .collect();
    if r.len() < 3 {
        return None;
    }
    let n = r.len();
    Some((r[n - 1] / r[n - 2]).ln() / (r[n - 2] / r[n - 3]).ln())
}

fn linearization(out: &mut CriterionOutcome) -> BenchResult<()> {
    for formulation in [Formulation::LeastSquares, Formulation::Vms] {
        for (theta, lo, hi) in [(0.0, 8, 10), (1.0, 5, 7)] {
            let mut s = five_spot(ElementType::Quad9, 20, formulation, 2);
            s.model.variant = DragVariant::Barus;
            s.model.beta_b = 0.6;
            s.solver.theta = theta;
            let o = solve(&s)?;
            let k = o.report.iterations;
            let label = format!("{formulation} theta {theta}");
            out.check(within(k as f64, lo as f64, hi as f64), format!("{label}: {k} iterations in [{lo}, {hi}]"));
            let order = terminal_order(&o.report).unwrap_or(f64::NAN);
            if theta == 0.0 {
                out.check(order > 0.5 && order < 1.5, format!("{label}: terminal order {order:.2} (linear)"));
            } else {
                out.check(order >= 1.7, format!("{label}: terminal order {order:.2} >= 1.7"));
            }
            let tail: Vec<String> = o.report.history.iter().map(|h| format!("{:.2e}", h.res_v.max(h.res_p))).collect();
            out.note(format!("{label} increments {}", tail.join(" ")));
        }
    }
    Ok(())
}

fn patch_3d(out: &mut CriterionOutcome) -> BenchResult<()> {
    for formulation in [Formulation::LeastSquares, Formulation::Vms] {
        let s = variant_spec(ProblemKind::Patch3d, ElementType::Hex8, formulation, DragVariant::Darcy);
        let o = solve(&s)?;
        let sol = &o.solution;
        let mut dv: f64 = 0.0;
        let mut dp: f64 = 0.0;
        for (n, x) in sol.mesh.nodes().iter().enumerate() {
            dv = dv.max((sol.node_velocity(n) - Vec3::new(1.0, 0.0, 0.0)).norm());
            dp = dp.max((sol.pressure[n] - (s.boundary.p_pin - x.x)).abs());
        }
        out.check(dv <= 1e-10, format!("{formulation} Darcy: max velocity error {dv:.1e}"));
        out.check(dp <= 1e-10, format!("{formulation} Darcy: max pressure error {dp:.1e}"));

        for theta in [0.0, 1.0] {
            let mut s = variant_spec(ProblemKind::Patch3d, ElementType::Hex8, formulation, DragVariant::Barus);
            s.solver.theta = theta;
            let o = solve(&s)?;
            let sol = &o.solution;
            let mid = sol
                .mesh
                .nodes()
                .iter()
                .enumerate()
                .filter(|(_, x)| (x.x - 0.5).abs() < 1e-9)
                .map(|(n, _)| (sol.pressure[n] - barus_channel_pressure(s.model.beta_b, 0.5)).abs())
                .fold(0.0, f64::max);
            let line = format!("{formulation} Barus theta {theta}: mid-plane pressure error {mid:.2e}");
            // the LS consistent fixed point is not the least-squares minimizer
            if formulation == Formulation::LeastSquares && theta == 1.0 {
                out.note(line);
            } else {
                out.check(mid <= 1e-3, line);
            }
        }
    }
    Ok(())
}

fn dissipation(out: &mut CriterionOutcome) -> BenchResult<()> {
    let sizes = [4, 6, 8, 10, 12];
    for element in [ElementType::Quad4, ElementType::Quad9] {
        for variant in DragVariant::ALL {
            let mut by_formulation = Vec::new();
            for formulation in [Formulation::LeastSquares, Formulation::Vms] {
                let phi = sizes
                    .iter()
                    .map(|&n| {
                        let mut s = five_spot(element, n, formulation, 2);
                        s.model.variant = variant;
                        s.model.beta_b = 0.1;
                        s.model.beta_f = 0.5;
                        Ok(solve(&s)?.scalars.dissipation)
                    })
                    .collect::<BenchResult<Vec<f64>>>()?;
                let monotone = phi.windows(2).all(|w| w[1] <= w[0]);
                out.check(
                    monotone,
                    format!(
                        "{element} {formulation} {}: dissipation {} non-increasing",
                        variant.label(),
                        phi.iter().map(|p| format!("{p:.5}")).collect::<Vec<_>>().join(" ")
                    ),
                );
                by_formulation.push(phi);
            }
            let ok = by_formulation[0].iter().zip(&by_formulation[1]).all(|(ls, vms)| *ls >= vms - 1e-8);
            out.check(ok, format!("{element} {}: LS dissipation >= VMS at every h", variant.label()));
        }
    }
    Ok(())
}

fn closed_box_solution(mesh: &Arc<Mesh>, model: DragModel, load: Arc<VectorFn>) -> BenchResult<MixedSolution> {
    let origin = mesh.nodes_at(&Vec3::zeros())[0];
    let mut bcs = BoundaryConditions::new().pin_pressure(origin, 0.0);
    for tag in ["left", "right", "bottom", "top"] {
        bcs = bcs.normal_velocity(tag, 0.0);
    }
    let mut problem = Problem::new(mesh.clone(), model, Formulation::Vms, bcs);
    problem.load = load;
    let (sol, report) = nonlinear_solve(&problem)?;
    if !report.converged {
        return Err(crate::error::BenchError::NotConverged {
            iterations: report.iterations,
            res_v: f64::NAN,
            res_p: f64::NAN,
        });
    }
    Ok(sol)
}

fn reciprocity(out: &mut CriterionOutcome) -> BenchResult<()> {
    let mesh = Arc::new(generate_quad(8, 8, AxisBox::unit_square(), 2)?);
    let first: Arc<VectorFn> = Arc::new(|x: &Vec3| Vec3::new(x.y * x.y, 1.0, 0.0) * 4.0);
    let second: Arc<VectorFn> = Arc::new(|x: &Vec3| Vec3::new(0.0, x.x, 0.0));
    let models = [
        ("Darcy alpha 2", DragModel::constant(2.0)?, 1e-8, true),
        (
            "MBF beta_B 0.5 beta_F 1",
            DragModel::new(DragVariant::BarusForchheimer, 1.0, 0.5, 1.0, RegionField::uniform(1.0)?)?,
            1e-3,
            false,
        ),
    ];
    for (label, model, bound, holds) in models {
        let s1 = closed_box_solution(&mesh, model.clone(), first.clone())?;
        let s2 = closed_box_solution(&mesh, model, second.clone())?;
        let r = reciprocity_residual(&s1, first.as_ref(), &s2, second.as_ref())?;
        let line = format!("{label}: lhs {:.6e} rhs {:.6e} relative residual {:.2e}", r.lhs, r.rhs, r.relative);
        if holds {
            out.check(r.relative <= bound, format!("{line} <= {bound:e}"));
        } else {
            out.check(r.relative >= bound, format!("{line} >= {bound:e}"));
        }
    }
    Ok(())
}

fn ceiling_flux(out: &mut CriterionOutcome) -> BenchResult<()> {
    let pressures = [125.0, 250.0, 500.0, 1000.0];
    let mut flux = std::collections::BTreeMap::new();
    let mut ratio = std::collections::BTreeMap::new();
    for formulation in [Formulation::LeastSquares, Formulation::Vms] {
        for variant in DragVariant::ALL {
            let base = variant_spec(ProblemKind::Reservoir, ElementType::Quad9, formulation, variant);
            let mut q = Vec::new();
            let mut m = Vec::new();
            for &p in &pressures {
                let mut s = base.clone();
                s.boundary.p_enh = p;
                let o = solve(&s)?;
                q.push(o.scalars.flux.unwrap_or(f64::NAN));
                m.push(o.scalars.max_mass_ratio.unwrap_or(f64::NAN));
            }
            out.note(format!(
                "{formulation} {}: flux {} max ratio {}",
                variant.label(),
                q.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>().join(" "),
                m.iter().map(|v| format!("{v:.5}")).collect::<Vec<_>>().join(" ")
            ));
            flux.insert((formulation.to_string(), variant.label()), q);
            ratio.insert((formulation.to_string(), variant.label()), m);
        }
    }
    for formulation in [Formulation::LeastSquares, Formulation::Vms] {
        let f = formulation.to_string();
        let q = |v: DragVariant| &flux[&(f.clone(), v.label())];
        let d = q(DragVariant::Darcy);
        let fit = linear_fit_residual(&pressures, d);
        let peak = d.iter().cloned().fold(0.0, f64::max);
        out.check(fit <= 0.01 * peak, format!("{f} Darcy flux linear: max fit residual {fit:.2e} vs peak {peak:.3}"));
        for v in [DragVariant::Barus, DragVariant::Forchheimer, DragVariant::BarusForchheimer] {
            let c = q(v);
            let slopes: Vec<f64> = (1..c.len()).map(|i| (c[i] - c[i - 1]) / (pressures[i] - pressures[i - 1])).collect();
            let concave = slopes.windows(2).all(|w| w[1] < w[0]);
            out.check(concave, format!("{f} {} flux strictly concave (secant slopes {slopes:.4?})", v.label()));
        }
        let (mb, fo, mbf) = (q(DragVariant::Barus), q(DragVariant::Forchheimer), q(DragVariant::BarusForchheimer));
        let below = (0..pressures.len()).all(|i| mbf[i] <= mb[i].min(fo[i]));
        out.check(below, format!("{f} MBF flux <= min(MB, F) at every injection pressure"));
        let r = &ratio[&(f.clone(), DragVariant::BarusForchheimer.label())];
        out.check(
            r.windows(2).all(|w| w[1] > w[0]),
            format!("{f} MBF max mass-balance ratio increases with injection pressure"),
        );
    }
    let mut matched = true;
    for variant in DragVariant::ALL {
        let ls = &ratio[&(Formulation::LeastSquares.to_string(), variant.label())];
        let vms = &ratio[&(Formulation::Vms.to_string(), variant.label())];
        matched &= ls.iter().zip(vms).all(|(a, b)| b >= a);
    }
    out.check(matched, "VMS max mass-balance ratio >= LS on every matched run".into());
    Ok(())
}

/// Largest deviation of `y` from its least-squares line in `x`.
fn linear_fit_residual(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    x.iter()
        .zip(y)
        .map(|(a, b)| (b - (my + slope * (a - mx))).abs())
        .fold(0.0, f64::max)
}

/// Deterministic values in (-1, 1) for trial vectors and iterates.
fn spread(i: usize, seed: f64) -> f64 {
    (1.7 * i as f64 + seed).sin() * 0.9
}

fn sample_iterate(mesh: &Arc<Mesh>, seed: f64) -> BenchResult<MixedSolution> {
    let n = mesh.num_nodes();
    let v = (0..n * mesh.dim()).map(|i| spread(i, seed)).collect();
    let p = (0..n).map(|i| 0.5 + spread(i, seed + 0.3)).collect();
    Ok(MixedSolution::new(mesh.clone(), v, p)?)
}

fn oracles(out: &mut CriterionOutcome) -> BenchResult<()> {
    let model = DragModel::new(DragVariant::BarusForchheimer, 1.3, 0.4, 0.7, RegionField::uniform(0.8)?)?;
    let load: Arc<VectorFn> = Arc::new(|x: &Vec3| Vec3::new(1.0 + x.y, -0.5 * x.x, 0.0));
    let meshes = [
        ("one Q4", Arc::new(generate_quad(1, 1, AxisBox::new_2d(0.0, 0.7, 0.2, 1.0), 1)?)),
        ("two Q9", Arc::new(generate_quad(2, 1, AxisBox::unit_square(), 2)?)),
        ("two T3", Arc::new(generate_tri(1, 1, AxisBox::new_2d(0.0, 2.0, 0.0, 1.0))?)),
    ];
    for (label, mesh) in &meshes {
        let mut worst: f64 = 0.0;
        for (weight, theta, seed) in [(LsWeight::Unit, 0.0, 0.1), (LsWeight::Unit, 1.0, 0.7), (LsWeight::Drag, 0.0, 1.3), (LsWeight::Drag, 1.0, 2.1)] {
            let iterate = sample_iterate(mesh, seed)?;
            for e in 0..mesh.num_elements() {
                let snap = iterate.element_snapshot(e, theta)?;
                let sys = ls_element_system(mesh, e, &model, &snap, weight, load.as_ref())?;
                let u0: Vec<f64> = (0..sys.fe.len()).map(|i| spread(i, seed + 5.0)).collect();
                let j = |u: &[f64]| ls_functional(mesh, e, &model, &snap, weight, load.as_ref(), u);
                let h = fd_hessian(&j, &u0)?;
                worst = worst.max((&h - &sys.ke).norm() / sys.ke.norm());
            }
        }
        out.check(worst <= 1e-6, format!("{label}: LS matrix vs finite-difference Hessian, relative {worst:.1e}"));
    }
    for formulation in [Formulation::LeastSquares, Formulation::Vms] {
        for (label, mesh) in &meshes[1..] {
            let bcs = BoundaryConditions::new().pressure("right", 0.0);
            let mut problem = Problem::new(mesh.clone(), model.clone(), formulation, bcs);
            problem.load = load.clone();
            let systems = problem.element_systems(&sample_iterate(mesh, 3.3)?)?;
            let global = scatter(problem.ndofs(), &systems)?;
            let n = problem.ndofs();
            let mut dense = DMatrix::zeros(n, n);
            let mut rhs = DVector::zeros(n);
            for s in &systems {
                for (a, &i) in s.dof_map.iter().enumerate() {
                    rhs[i] += s.fe[a];
                    for (b, &j) in s.dof_map.iter().enumerate() {
                        dense[(i, j)] += s.ke[(a, b)];
                    }
                }
            }
            let scale = dense.amax();
            let dm = (global.matrix.to_dense() - &dense).amax() / scale;
            let dr = (DVector::from_vec(global.rhs.clone()) - rhs).amax() / scale;
            out.check(
                dm <= 1e-12 && dr <= 1e-12,
                format!("{formulation} {label}: global assembly vs dense scatter, matrix {dm:.1e} load {dr:.1e}"),
            );
        }
    }
    Ok(())
}

fn fd_hessian(j: &dyn Fn(&[f64]) -> darcyflow::Result<f64>, u0: &[f64]) -> BenchResult<DMatrix<f64>> {
    let n = u0.len();
    let step = 1e-3;
    let mut h = DMatrix::zeros(n, n);
    let mut u = u0.to_vec();
    for a in 0..n {
        for b in 0..n {
            let mut eval = |da: f64, db: f64| {
                u.copy_from_slice(u0);
                u[a] += da;
                u[b] += db;
                j(&u)
            };
            h[(a, b)] = (eval(step, step)? - eval(step, -step)? - eval(-step, step)? + eval(-step, -step)?) / (4.0 * step * step);
        }
    }
    Ok(h)
}
