//! Solving configured problems, sweeps, and CSV/VTK artifacts.

use std::path::{Path, PathBuf};

use darcyflow::postproc::{self, ErrorReport};
use darcyflow::solver::{nonlinear_solve, MixedSolution, NonlinearReport};
use darcyflow::vtk;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ProblemKind, ProblemSpec};
use crate::error::{BenchError, BenchResult};
use crate::problems::build;

/// Scalar results of one run. Fields that do not apply are `None`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Scalars {
    pub p_injection: Option<f64>,
    pub flux: Option<f64>,
    pub max_mass_ratio: Option<f64>,
    pub mean_mass_ratio: Option<f64>,
    pub dissipation: f64,
    pub errors: Option<ErrorReport>,
}

pub struct RunOutcome {
    pub spec: ProblemSpec,
    pub solution: MixedSolution,
    pub report: NonlinearReport,
    pub scalars: Scalars,
    /// Per-element mass-balance ratios, when a production flux exists.
    pub mass_ratios: Option<Vec<f64>>,
}

/// Builds, solves and post-processes one problem. Non-convergence is an
/// error carrying the last increments.
pub fn solve(spec: &ProblemSpec) -> BenchResult<RunOutcome> {
    let outcome = solve_unchecked(spec)?;
    if !outcome.report.converged {
        let last = outcome.report.history.last().copied();
        return Err(BenchError::NotConverged {
            iterations: outcome.report.iterations,
            res_v: last.map_or(f64::NAN, |r| r.res_v),
            res_p: last.map_or(f64::NAN, |r| r.res_p),
        });
    }
    Ok(outcome)
}

/// As [`solve`], but returns non-converged results as they are.
pub fn solve_unchecked(spec: &ProblemSpec) -> BenchResult<RunOutcome> {
    let built = build(spec)?;
    let (solution, report) = nonlinear_solve(&built.problem)?;
    let mut scalars = Scalars {
        dissipation: f64::NAN,
        ..Scalars::default()
    };
    let mut mass_ratios = None;
    if report.converged {
        scalars.dissipation = postproc::total_dissipation(&solution, &built.problem.model)?;
        scalars.p_injection = built.injection_node.map(|n| solution.pressure[n]);
        if let Some(exact) = &built.exact {
            scalars.errors = Some(postproc::error_norms(&solution, exact.as_ref())?);
        }
        if !built.production_tags.is_empty() {
            let tags: Vec<&str> = built.production_tags.iter().map(String::as_str).collect();
            let balance = postproc::local_mass_balance(&solution, &tags)?;
            scalars.flux = Some(balance.total_flux);
            scalars.max_mass_ratio = balance.max_ratio;
            scalars.mean_mass_ratio = balance.mean_ratio;
            mass_ratios = balance.ratios;
        }
    }
    Ok(RunOutcome {
        spec: spec.clone(),
        solution,
        report,
        scalars,
        mass_ratios,
    })
}

/// Runs `spec` once per value of `param`, in parallel, keeping input order.
pub fn sweep(spec: &ProblemSpec, param: &str, values: &[String]) -> BenchResult<Vec<BenchResult<RunOutcome>>> {
    let specs = values
        .iter()
        .map(|v| {
            let mut s = spec.clone();
            s.set(param, v)?;
            Ok(s)
        })
        .collect::<BenchResult<Vec<_>>>()?;
    Ok(specs.par_iter().map(solve).collect())
}

/// Parameter fingerprint carried by every CSV row.
#[derive(Debug, Clone)]
pub struct Fingerprint {
    pub problem: String,
    pub model: String,
    pub formalism: String,
    pub weight: u8,
    pub theta: f64,
    pub element: String,
    pub h: f64,
    pub nele: usize,
}

impl Fingerprint {
    pub fn of(spec: &ProblemSpec) -> Self {
        let m = &spec.mesh;
        let h = match &spec.geometry {
            Some(g) => (g.length / m.nx as f64).max(g.height / m.ny as f64),
            None => {
                let n = [m.nx, m.ny, m.nz][..m.element.dim()].iter().copied().min().unwrap_or(1);
                1.0 / n as f64
            }
        };
        Fingerprint {
            problem: spec.kind().to_string(),
            model: spec.model.variant.label().to_string(),
            formalism: spec.solver.formulation.to_string(),
            weight: spec.solver.ls_weight,
            theta: spec.solver.theta,
            element: spec.mesh.element.to_string(),
            h,
            nele: spec.num_elements(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FiveSpotRow {
    pub alpha: f64,
    pub formalism: String,
    pub weight: u8,
    pub element: String,
    pub p_injection: f64,
    pub model: String,
    pub theta: f64,
    pub h: f64,
    pub nele: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct FluxRow {
    pub problem: String,
    pub model: String,
    pub formalism: String,
    pub p_enh: f64,
    pub flux: f64,
    pub max_mass_ratio: f64,
    pub weight: u8,
    pub theta: f64,
    pub element: String,
    pub h: f64,
    pub nele: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SlopeRow {
    pub element: String,
    pub formalism: String,
    pub model: String,
    pub field: String,
    pub norm: String,
    pub slope: f64,
    pub weight: u8,
    pub theta: f64,
    pub h: String,
    pub nele: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorRow {
    pub problem: String,
    pub model: String,
    pub formalism: String,
    pub weight: u8,
    pub theta: f64,
    pub element: String,
    pub h: f64,
    pub nele: usize,
    pub velocity_l2: f64,
    pub velocity_h1: f64,
    pub pressure_l2: f64,
    pub pressure_h1: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IterationRow {
    pub i: usize,
    pub res_v: f64,
    pub res_p: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalarRow {
    pub problem: String,
    pub model: String,
    pub formalism: String,
    pub weight: u8,
    pub theta: f64,
    pub element: String,
    pub h: f64,
    pub nele: usize,
    pub converged: bool,
    pub iterations: usize,
    pub dissipation: f64,
    pub p_injection: Option<f64>,
    pub flux: Option<f64>,
    pub max_mass_ratio: Option<f64>,
    pub velocity_l2: Option<f64>,
    pub pressure_l2: Option<f64>,
}

pub fn csv_text<R: Serialize>(rows: &[R]) -> BenchResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| BenchError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn write_csv<R: Serialize>(dir: &Path, name: &str, rows: &[R]) -> BenchResult<PathBuf> {
    let path = dir.join(name);
    vtk::write_atomic(&path, csv_text(rows)?.as_bytes())?;
    Ok(path)
}

pub fn five_spot_row(o: &RunOutcome) -> Option<FiveSpotRow> {
    let f = Fingerprint::of(&o.spec);
    Some(FiveSpotRow {
        alpha: o.spec.model.mu0 / o.spec.model.permeability,
        formalism: f.formalism,
        weight: f.weight,
        element: f.element,
        p_injection: o.scalars.p_injection?,
        model: f.model,
        theta: f.theta,
        h: f.h,
        nele: f.nele,
    })
}

pub fn flux_row(o: &RunOutcome) -> Option<FluxRow> {
    let f = Fingerprint::of(&o.spec);
    Some(FluxRow {
        problem: f.problem,
        model: f.model,
        formalism: f.formalism,
        p_enh: o.spec.boundary.p_enh,
        flux: o.scalars.flux?,
        max_mass_ratio: o.scalars.max_mass_ratio.unwrap_or(f64::NAN),
        weight: f.weight,
        theta: f.theta,
        element: f.element,
        h: f.h,
        nele: f.nele,
    })
}

/// Convergence slopes of the four error norms over a refinement series.
pub fn slope_rows(outcomes: &[&RunOutcome]) -> BenchResult<Vec<SlopeRow>> {
    let first = outcomes.first().ok_or_else(|| BenchError::config("a slope needs runs"))?;
    let f = Fingerprint::of(&first.spec);
    let errors: Vec<(f64, ErrorReport)> = outcomes
        .iter()
        .map(|o| {
            o.scalars
                .errors
                .map(|e| (e.h, e))
                .ok_or_else(|| BenchError::config("slopes need runs with an exact solution"))
        })
        .collect::<BenchResult<_>>()?;
    let hs = errors.iter().map(|(h, _)| format!("{h}")).collect::<Vec<_>>().join(";");
    let nele = outcomes.iter().map(|o| o.spec.num_elements().to_string()).collect::<Vec<_>>().join(";");
    type Norm = (&'static str, &'static str, fn(&ErrorReport) -> f64);
    let pick: [Norm; 4] = [
        ("velocity", "L2", |e| e.velocity_l2),
        ("velocity", "H1", |e| e.velocity_h1),
        ("pressure", "L2", |e| e.pressure_l2),
        ("pressure", "H1", |e| e.pressure_h1),
    ];
    pick.iter()
        .map(|(field, norm, get)| {
            let series: Vec<(f64, f64)> = errors.iter().map(|(h, e)| (*h, get(e))).collect();
            Ok(SlopeRow {
                element: f.element.clone(),
                formalism: f.formalism.clone(),
                model: f.model.clone(),
                field: field.to_string(),
                norm: norm.to_string(),
                slope: postproc::convergence_slope(&series)?,
                weight: f.weight,
                theta: f.theta,
                h: hs.clone(),
                nele: nele.clone(),
            })
        })
        .collect()
}

fn scalar_row(o: &RunOutcome) -> ScalarRow {
    let f = Fingerprint::of(&o.spec);
    ScalarRow {
        problem: f.problem,
        model: f.model,
        formalism: f.formalism,
        weight: f.weight,
        theta: f.theta,
        element: f.element,
        h: f.h,
        nele: f.nele,
        converged: o.report.converged,
        iterations: o.report.iterations,
        dissipation: o.scalars.dissipation,
        p_injection: o.scalars.p_injection,
        flux: o.scalars.flux,
        max_mass_ratio: o.scalars.max_mass_ratio,
        velocity_l2: o.scalars.errors.map(|e| e.velocity_l2),
        pressure_l2: o.scalars.errors.map(|e| e.pressure_l2),
    }
}

fn iteration_rows(report: &NonlinearReport) -> Vec<IterationRow> {
    report
        .history
        .iter()
        .map(|r| IterationRow {
            i: r.iteration,
            res_v: r.res_v,
            res_p: r.res_p,
        })
        .collect()
}

/// Writes the field file, scalar row and iteration history of one run.
pub fn write_run(o: &RunOutcome, dir: &Path) -> BenchResult<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = vec![
        write_csv(dir, "scalars.csv", &[scalar_row(o)])?,
        write_csv(dir, "iterations.csv", &iteration_rows(&o.report))?,
    ];
    match o.spec.kind() {
        ProblemKind::FiveSpot => written.push(write_csv(dir, "five_spot.csv", &five_spot_row(o).into_iter().collect::<Vec<_>>())?),
        k if k.is_reservoir() => written.push(write_csv(dir, "flux.csv", &flux_row(o).into_iter().collect::<Vec<_>>())?),
        _ => {}
    }
    if o.spec.output.vtk {
        let mesh = &o.solution.mesh;
        let permeability: Vec<f64> = (0..mesh.num_elements())
            .map(|e| o.spec_permeability(&mesh.element_centroid(e)))
            .collect();
        let mut cells: Vec<(&str, &[f64])> = vec![("permeability", &permeability)];
        if let Some(r) = &o.mass_ratios {
            cells.push(("mass_balance_ratio", r));
        }
        let path = dir.join("solution.vtk");
        vtk::write(&path, mesh, Some(&o.solution), &cells)?;
        written.push(path);
    }
    Ok(written)
}

impl RunOutcome {
    fn spec_permeability(&self, x: &darcyflow::Vec3) -> f64 {
        let uniform = self.spec.model.permeability;
        let Some(g) = &self.spec.geometry else {
            return uniform;
        };
        let mut top = 0.0;
        for l in &g.layers {
            top += l.thickness;
            if x.y <= top + 1e-12 {
                return l.permeability;
            }
        }
        uniform
    }
}

/// Writes the tables of a sweep: one per-run directory plus the summary
/// CSV matching the problem type.
pub fn write_sweep(spec: &ProblemSpec, outcomes: &[BenchResult<RunOutcome>], dir: &Path) -> BenchResult<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let ok: Vec<&RunOutcome> = outcomes.iter().filter_map(|o| o.as_ref().ok()).collect();
    let mut written = Vec::new();
    for (i, o) in ok.iter().enumerate() {
        written.extend(write_run(o, &dir.join(format!("run_{i:03}")))?);
    }
    written.push(write_csv(dir, "scalars.csv", &ok.iter().map(|o| scalar_row(o)).collect::<Vec<_>>())?);
    match spec.kind() {
        ProblemKind::FiveSpot => {
            let rows: Vec<FiveSpotRow> = ok.iter().filter_map(|o| five_spot_row(o)).collect();
            written.push(write_csv(dir, "five_spot.csv", &rows)?);
        }
        ProblemKind::Mms if ok.len() >= 2 => {
            written.push(write_csv(dir, "mms_slopes.csv", &slope_rows(&ok)?)?);
            let rows: Vec<ErrorRow> = ok
                .iter()
                .filter_map(|o| {
                    let f = Fingerprint::of(&o.spec);
                    o.scalars.errors.map(|e| ErrorRow {
                        problem: f.problem,
                        model: f.model,
                        formalism: f.formalism,
                        weight: f.weight,
                        theta: f.theta,
                        element: f.element,
                        h: f.h,
                        nele: f.nele,
                        velocity_l2: e.velocity_l2,
                        velocity_h1: e.velocity_h1,
                        pressure_l2: e.pressure_l2,
                        pressure_h1: e.pressure_h1,
                    })
                })
                .collect();
            written.push(write_csv(dir, "mms_errors.csv", &rows)?);
        }
        k if k.is_reservoir() => {
            let rows: Vec<FluxRow> = ok.iter().filter_map(|o| flux_row(o)).collect();
            written.push(write_csv(dir, "flux.csv", &rows)?);
        }
        _ => {}
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_spot_darcy_unit_drag() {
        let o = solve(&ProblemSpec::preset(ProblemKind::FiveSpot)).unwrap();
        let p = o.scalars.p_injection.unwrap();
        assert!((p - 1.27).abs() / 1.27 < 0.02, "{p}");
        assert!(o.scalars.dissipation > 0.0);
    }

    #[test]
    fn sweep_keeps_order_and_is_deterministic() {
        let mut spec = ProblemSpec::preset(ProblemKind::FiveSpot);
        spec.set("nele", "64").unwrap();
        let values: Vec<String> = ["1", "20", "100"].iter().map(|s| s.to_string()).collect();
        let a = sweep(&spec, "alpha", &values).unwrap();
        let b = sweep(&spec, "alpha", &values).unwrap();
        let rows = |v: &[BenchResult<RunOutcome>]| {
            csv_text(&v.iter().map(|o| five_spot_row(o.as_ref().unwrap()).unwrap()).collect::<Vec<_>>()).unwrap()
        };
        let ta = rows(&a);
        assert_eq!(ta, rows(&b));
        let p: Vec<f64> = a.iter().map(|o| o.as_ref().unwrap().scalars.p_injection.unwrap()).collect();
        assert!(p[0] < p[1] && p[1] < p[2]);
        assert!(ta.starts_with("alpha,formalism,weight,element,p_injection,model,theta,h,nele\n"));
    }

    #[test]
    fn non_convergence_is_reported() {
        let mut spec = ProblemSpec::preset(ProblemKind::FiveSpot);
        spec.set("nele", "16").unwrap();
        spec.set("model", "mb").unwrap();
        spec.set("beta_b", "0.6").unwrap();
        spec.set("max_iterations", "2").unwrap();
        let err = solve(&spec).err().unwrap();
        assert_eq!(err.exit_code(), 2);
        let raw = solve_unchecked(&spec).unwrap();
        assert_eq!(raw.report.iterations, 2);
        assert!(!raw.report.converged);
    }

    #[test]
    fn artifacts_written() {
        let dir = tempfile::tempdir().unwrap();
        let mut spec = ProblemSpec::preset(ProblemKind::Reservoir);
        spec.set("nele", "100").unwrap();
        let o = solve(&spec).unwrap();
        let files = write_run(&o, dir.path()).unwrap();
        let names: Vec<String> = files.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect();
        assert!(names.contains(&"solution.vtk".to_string()));
        assert!(names.contains(&"flux.csv".to_string()));
        let vtk = std::fs::read_to_string(dir.path().join("solution.vtk")).unwrap();
        assert!(vtk.contains("SCALARS mass_balance_ratio double 1"));
        assert!(vtk.contains("SCALARS permeability double 1"));
        let flux = std::fs::read_to_string(dir.path().join("flux.csv")).unwrap();
        assert!(flux.starts_with("problem,model,formalism,p_enh,flux,"));
    }
}
