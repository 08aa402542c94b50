//! Problem configuration: TOML files with one section per concern.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use darcyflow::drag::DragVariant;
use darcyflow::fem::ElementType;
use darcyflow::formulation::{Formulation, LsWeight};
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, BenchResult};

/// Serde adapter for types with `Display` and `FromStr`.
mod text {
    use std::fmt::Display;
    use std::str::FromStr;

    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<T, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        let s = String::deserialize(d)?;
        s.parse().map_err(de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Mms,
    FiveSpot,
    Patch3d,
    Reservoir,
    Layered,
    Staggered,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 6] = [
        ProblemKind::Mms,
        ProblemKind::FiveSpot,
        ProblemKind::Patch3d,
        ProblemKind::Reservoir,
        ProblemKind::Layered,
        ProblemKind::Staggered,
    ];

    pub fn is_reservoir(self) -> bool {
        matches!(self, ProblemKind::Reservoir | ProblemKind::Layered | ProblemKind::Staggered)
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::Mms => "mms",
            ProblemKind::FiveSpot => "five_spot",
            ProblemKind::Patch3d => "patch3d",
            ProblemKind::Reservoir => "reservoir",
            ProblemKind::Layered => "layered",
            ProblemKind::Staggered => "staggered",
        })
    }
}

impl FromStr for ProblemKind {
    type Err = BenchError;

    fn from_str(s: &str) -> BenchResult<Self> {
        ProblemKind::ALL
            .into_iter()
            .find(|k| k.to_string() == s)
            .ok_or_else(|| BenchError::config(format!("unknown problem '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub id: ProblemKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSpec {
    #[serde(with = "text")]
    pub element: ElementType,
    pub nx: usize,
    pub ny: usize,
    #[serde(default = "one")]
    pub nz: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(with = "text")]
    pub variant: DragVariant,
    pub mu0: f64,
    #[serde(default)]
    pub beta_b: f64,
    #[serde(default)]
    pub beta_f: f64,
    #[serde(default = "one_f")]
    pub permeability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(with = "text")]
    pub formulation: Formulation,
    #[serde(default = "two")]
    pub ls_weight: u8,
    #[serde(default = "one_f")]
    pub theta: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsSpec {
    #[serde(default = "one_f")]
    pub rho: f64,
    #[serde(default)]
    pub body_force: [f64; 3],
}

impl Default for PhysicsSpec {
    fn default() -> Self {
        PhysicsSpec {
            rho: 1.0,
            body_force: [0.0; 3],
        }
    }
}

/// Boundary data. Which fields are read depends on the problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySpec {
    /// Normal velocity on inflow and outflow faces (3D patch test).
    #[serde(default = "one_f")]
    pub v_n: f64,
    /// Velocity components prescribed at the five-spot well corners.
    #[serde(default = "one_f")]
    pub well_velocity: f64,
    /// Pressure at the production boundary or production corner.
    #[serde(default = "one_f")]
    pub p_production: f64,
    /// Pressure at the injection boundaries of the reservoir problems.
    #[serde(default = "default_p_enh")]
    pub p_enh: f64,
    /// Pressure pinned at the origin (manufactured and patch problems).
    #[serde(default)]
    pub p_pin: f64,
}

impl Default for BoundarySpec {
    fn default() -> Self {
        BoundarySpec {
            v_n: 1.0,
            well_velocity: 1.0,
            p_production: 1.0,
            p_enh: default_p_enh(),
            p_pin: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    pub fn tag(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Bottom => "bottom",
            Side::Top => "top",
        }
    }

    /// Coordinate axis running along the side.
    pub fn along(self) -> usize {
        match self {
            Side::Left | Side::Right => 1,
            Side::Bottom | Side::Top => 0,
        }
    }
}

/// A stretch `[from, to]` of one side of the domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Span {
    pub side: Side,
    pub from: f64,
    pub to: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layer {
    pub thickness: f64,
    pub permeability: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hole {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

/// Reservoir geometry: a `length x height` rectangle with well spans,
/// optional horizontal layers (bottom to top) and rectangular holes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub length: f64,
    pub height: f64,
    #[serde(default)]
    pub injection: Vec<Span>,
    #[serde(default)]
    pub production: Vec<Span>,
    #[serde(default)]
    pub layers: Vec<Layer>,
    #[serde(default)]
    pub holes: Vec<Hole>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub dir: Option<String>,
    #[serde(default = "yes")]
    pub vtk: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub problem: ProblemSection,
    pub mesh: MeshSpec,
    pub model: ModelSpec,
    pub solver: SolverSpec,
    #[serde(default)]
    pub physics: PhysicsSpec,
    #[serde(default)]
    pub boundary: BoundarySpec,
    #[serde(default)]
    pub geometry: Option<GeometrySpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

fn one() -> usize {
    1
}

fn one_f() -> f64 {
    1.0
}

fn two() -> u8 {
    2
}

fn yes() -> bool {
    true
}

fn default_tol() -> f64 {
    1e-10
}

fn default_max_iterations() -> usize {
    50
}

fn default_p_enh() -> f64 {
    1000.0
}

fn positive(name: &str, v: f64) -> BenchResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(BenchError::config(format!("{name} must be positive and finite, got {v}")))
    }
}

fn non_negative(name: &str, v: f64) -> BenchResult<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(BenchError::config(format!("{name} must be non-negative and finite, got {v}")))
    }
}

impl ProblemSpec {
    pub fn kind(&self) -> ProblemKind {
        self.problem.id
    }

    /// Defaults for each benchmark. Reservoir geometries are representative
    /// layouts, not reproductions of a particular field case.
    pub fn preset(kind: ProblemKind) -> Self {
        let quad = |n: usize| MeshSpec {
            element: ElementType::Quad4,
            nx: n,
            ny: n,
            nz: 1,
        };
        let model = |variant| ModelSpec {
            variant,
            mu0: 1.0,
            beta_b: 0.0,
            beta_f: 0.0,
            permeability: 1.0,
        };
        let solver = |formulation| SolverSpec {
            formulation,
            ls_weight: 2,
            theta: 1.0,
            tol: default_tol(),
            max_iterations: default_max_iterations(),
        };
        let mut spec = ProblemSpec {
            problem: ProblemSection { id: kind },
            mesh: quad(20),
            model: model(DragVariant::Darcy),
            solver: solver(Formulation::Vms),
            physics: PhysicsSpec::default(),
            boundary: BoundarySpec::default(),
            geometry: None,
            output: OutputSpec {
                dir: None,
                vtk: true,
            },
        };
        match kind {
            ProblemKind::Mms => {
                spec.mesh = quad(16);
                spec.model = ModelSpec {
                    beta_b: 0.1,
                    beta_f: 0.5,
                    ..model(DragVariant::BarusForchheimer)
                };
                spec.boundary.p_pin = 10.0;
            }
            ProblemKind::FiveSpot => {}
            ProblemKind::Patch3d => {
                spec.mesh = MeshSpec {
                    element: ElementType::Hex8,
                    nx: 6,
                    ny: 6,
                    nz: 6,
                };
                spec.model.beta_b = 0.5;
                spec.model.beta_f = 1.0;
            }
            ProblemKind::Reservoir | ProblemKind::Layered | ProblemKind::Staggered => {
                spec.model = ModelSpec {
                    beta_b: 0.005,
                    beta_f: 0.01,
                    ..model(DragVariant::BarusForchheimer)
                };
                spec.physics.body_force = [0.0, -1.0, 0.0];
                spec.solver.tol = 1e-7;
                let wells = GeometrySpec {
                    length: 4.0,
                    height: 1.0,
                    injection: vec![
                        Span {
                            side: Side::Top,
                            from: 0.0,
                            to: 0.4,
                        },
                        Span {
                            side: Side::Top,
                            from: 3.6,
                            to: 4.0,
                        },
                    ],
                    production: vec![Span {
                        side: Side::Top,
                        from: 1.8,
                        to: 2.2,
                    }],
                    layers: Vec::new(),
                    holes: Vec::new(),
                };
                spec.mesh.nx = 80;
                spec.mesh.ny = 20;
                spec.geometry = Some(match kind {
                    ProblemKind::Layered => {
                        spec.mesh.ny = 40;
                        GeometrySpec {
                            layers: [(0.25, 1.0), (0.25, 0.2), (0.25, 1.0), (0.25, 0.5)]
                                .iter()
                                .map(|&(thickness, permeability)| Layer { thickness, permeability })
                                .collect(),
                            ..wells
                        }
                    }
                    ProblemKind::Staggered => {
                        spec.mesh.ny = 24;
                        let h = 1.0 / 24.0;
                        GeometrySpec {
                            holes: [(0.6, 4.0), (1.4, 13.0), (2.2, 4.0), (3.0, 13.0)]
                                .iter()
                                .map(|&(x0, row)| Hole {
                                    x0,
                                    x1: x0 + 0.4,
                                    y0: row * h,
                                    y1: (row + 7.0) * h,
                                })
                                .collect(),
                            ..wells
                        }
                    }
                    _ => wells,
                });
            }
        }
        spec
    }

    pub fn from_toml(text: &str) -> BenchResult<Self> {
        let spec: ProblemSpec = toml::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> BenchResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration always serializes")
    }

    pub fn ls_weight(&self) -> LsWeight {
        LsWeight::from_id(self.solver.ls_weight).expect("validated weight")
    }

    pub fn num_elements(&self) -> usize {
        let base = self.mesh.nx * self.mesh.ny * if self.mesh.element.dim() == 3 { self.mesh.nz } else { 1 };
        match self.mesh.element {
            ElementType::Tri3 => 2 * base,
            _ => base,
        }
    }

    pub fn validate(&self) -> BenchResult<()> {
        let kind = self.kind();
        let m = &self.mesh;
        if m.nx == 0 || m.ny == 0 || m.nz == 0 {
            return Err(BenchError::config("mesh divisions must be positive"));
        }
        let three_d = m.element.dim() == 3;
        if (kind == ProblemKind::Patch3d) != three_d {
            return Err(BenchError::config(format!("element {} does not fit problem {kind}", m.element)));
        }
        if kind.is_reservoir() && m.element == ElementType::Tri3 && self.geometry.as_ref().is_some_and(|g| !g.holes.is_empty()) {
            return Err(BenchError::config("holes need quadrilateral elements"));
        }
        positive("model.mu0", self.model.mu0)?;
        positive("model.permeability", self.model.permeability)?;
        non_negative("model.beta_b", self.model.beta_b)?;
        non_negative("model.beta_f", self.model.beta_f)?;
        LsWeight::from_id(self.solver.ls_weight).map_err(|e| BenchError::config(e.to_string()))?;
        if !(0.0..=1.0).contains(&self.solver.theta) {
            return Err(BenchError::config(format!("solver.theta must lie in [0, 1], got {}", self.solver.theta)));
        }
        positive("solver.tol", self.solver.tol)?;
        if self.solver.max_iterations == 0 {
            return Err(BenchError::config("solver.max_iterations must be at least 1"));
        }
        positive("physics.rho", self.physics.rho)?;
        if self.physics.body_force.iter().any(|b| !b.is_finite()) {
            return Err(BenchError::config("physics.body_force must be finite"));
        }
        if kind.is_reservoir() {
            let g = self
                .geometry
                .as_ref()
                .ok_or_else(|| BenchError::config(format!("problem {kind} needs a [geometry] section")))?;
            g.validate(kind)?;
        } else if self.geometry.is_some() {
            return Err(BenchError::config(format!("problem {kind} takes no [geometry] section")));
        }
        Ok(())
    }

    /// Applies one named override, as used by command-line flags and sweeps.
    pub fn set(&mut self, name: &str, value: &str) -> BenchResult<()> {
        let num = || {
            value
                .trim()
                .parse::<f64>()
                .map_err(|_| BenchError::config(format!("{name} expects a number, got '{value}'")))
        };
        let int = || {
            value
                .trim()
                .parse::<usize>()
                .map_err(|_| BenchError::config(format!("{name} expects a whole number, got '{value}'")))
        };
        match name {
            "formulation" => self.solver.formulation = value.parse().map_err(|e: darcyflow::Error| BenchError::config(e.to_string()))?,
            "model" => self.model.variant = value.parse().map_err(|e: darcyflow::Error| BenchError::config(e.to_string()))?,
            "element" => self.mesh.element = value.parse().map_err(|e: darcyflow::Error| BenchError::config(e.to_string()))?,
            "theta" => self.solver.theta = num()?,
            "weight" => {
                self.solver.ls_weight = u8::try_from(int()?).map_err(|_| BenchError::config("weight must be 1 or 2"))?
            }
            "tol" => self.solver.tol = num()?,
            "max_iterations" => self.solver.max_iterations = int()?,
            "alpha" | "mu0" => self.model.mu0 = num()?,
            "beta_b" => self.model.beta_b = num()?,
            "beta_f" => self.model.beta_f = num()?,
            "permeability" => self.model.permeability = num()?,
            "rho" => self.physics.rho = num()?,
            "p_enh" => self.boundary.p_enh = num()?,
            "nele" => self.set_num_elements(int()?)?,
            "n" => {
                let n = int()?;
                self.mesh.nx = n;
                self.mesh.ny = n;
                if self.mesh.element.dim() == 3 {
                    self.mesh.nz = n;
                }
            }
            "h" => {
                let h = num()?;
                positive("h", h)?;
                let n = (1.0 / h).round();
                if n < 1.0 || ((1.0 / h) - n).abs() > 1e-6 * n {
                    return Err(BenchError::config(format!("h = {h} does not divide the unit interval")));
                }
                return self.set("n", &(n as usize).to_string());
            }
            "order" => {
                self.mesh.element = match (self.mesh.element, int()?) {
                    (ElementType::Quad4 | ElementType::Quad9, 1) => ElementType::Quad4,
                    (ElementType::Quad4 | ElementType::Quad9, 2) => ElementType::Quad9,
                    (e, o) => return Err(BenchError::config(format!("order {o} is not available for {e}"))),
                }
            }
            "out_dir" => self.output.dir = Some(value.to_string()),
            _ => return Err(BenchError::config(format!("unknown parameter '{name}'"))),
        }
        self.validate()
    }

    /// Rescales the divisions uniformly so the mesh has `n` elements.
    fn set_num_elements(&mut self, n: usize) -> BenchResult<()> {
        let current = self.num_elements() as f64;
        let dim = self.mesh.element.dim() as f64;
        let factor = (n as f64 / current).powf(1.0 / dim);
        let scale = |d: usize| ((d as f64) * factor).round() as usize;
        let mut trial = self.mesh.clone();
        trial.nx = scale(trial.nx);
        trial.ny = scale(trial.ny);
        if dim == 3.0 {
            trial.nz = scale(trial.nz);
        }
        let old = std::mem::replace(&mut self.mesh, trial);
        if self.num_elements() != n {
            let got = self.num_elements();
            self.mesh = old;
            return Err(BenchError::config(format!(
                "{n} elements cannot be reached by uniform refinement (nearest {got})"
            )));
        }
        Ok(())
    }
}

impl GeometrySpec {
    fn validate(&self, kind: ProblemKind) -> BenchResult<()> {
        positive("geometry.length", self.length)?;
        positive("geometry.height", self.height)?;
        if self.injection.is_empty() || self.production.is_empty() {
            return Err(BenchError::config("geometry needs at least one injection and one production span"));
        }
        let spans: Vec<&Span> = self.injection.iter().chain(&self.production).collect();
        for s in &spans {
            let extent = if s.side.along() == 0 { self.length } else { self.height };
            if !(s.from >= 0.0 && s.to <= extent && s.from < s.to) {
                return Err(BenchError::config(format!(
                    "span {:?} [{}, {}] lies outside the side",
                    s.side, s.from, s.to
                )));
            }
        }
        for (i, a) in spans.iter().enumerate() {
            for b in &spans[i + 1..] {
                if a.side == b.side && a.from < b.to && b.from < a.to {
                    return Err(BenchError::config(format!("well spans overlap on the {:?} side", a.side)));
                }
            }
        }
        if kind == ProblemKind::Layered && self.layers.is_empty() {
            return Err(BenchError::config("layered problem needs at least one layer"));
        }
        if !self.layers.is_empty() {
            let total: f64 = self.layers.iter().map(|l| l.thickness).sum();
            if (total - self.height).abs() > 1e-9 * self.height {
                return Err(BenchError::config(format!(
                    "layer thicknesses sum to {total}, not the height {}",
                    self.height
                )));
            }
            for l in &self.layers {
                positive("layer thickness", l.thickness)?;
                positive("layer permeability", l.permeability)?;
            }
        }
        if kind == ProblemKind::Staggered && self.holes.is_empty() {
            return Err(BenchError::config("staggered problem needs at least one hole"));
        }
        for h in &self.holes {
            if !(h.x0 < h.x1 && h.y0 < h.y1 && h.x0 >= 0.0 && h.y0 >= 0.0 && h.x1 <= self.length && h.y1 <= self.height) {
                return Err(BenchError::config(format!("hole {h:?} is empty or outside the domain")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn presets_validate_and_round_trip() {
        for kind in ProblemKind::ALL {
            let spec = ProblemSpec::preset(kind);
            spec.validate().unwrap();
            let back = ProblemSpec::from_toml(&spec.to_toml()).unwrap();
            assert_eq!(back, spec, "{kind}");
        }
        assert_eq!(ProblemSpec::preset(ProblemKind::Staggered).num_elements(), 1920);
        assert_eq!(ProblemSpec::preset(ProblemKind::Layered).num_elements(), 3200);
        assert_eq!(ProblemSpec::preset(ProblemKind::Reservoir).num_elements(), 1600);
        assert_eq!(ProblemSpec::preset(ProblemKind::Patch3d).num_elements(), 216);
    }

    #[test]
    fn minimal_file() {
        let text = r#"
[problem]
id = "five_spot"

[mesh]
element = "Q9"
nx = 20
ny = 20

[model]
variant = "barus"
mu0 = 1.0
beta_b = 0.6

[solver]
formulation = "LS"
theta = 0.0
"#;
        let spec = ProblemSpec::from_toml(text).unwrap();
        assert_eq!(spec.mesh.element, ElementType::Quad9);
        assert_eq!(spec.model.variant, DragVariant::Barus);
        assert_eq!(spec.solver.ls_weight, 2);
        assert_eq!(spec.solver.tol, 1e-10);
        assert_eq!(spec.boundary.p_production, 1.0);
    }

    #[test]
    fn rejects_bad_files() {
        let base = ProblemSpec::preset(ProblemKind::FiveSpot).to_toml();
        let bad = [
            base.replace("mu0 = 1.0", "mu0 = -1.0"),
            base.replace("ls_weight = 2", "ls_weight = 3"),
            base.replace("theta = 1.0", "theta = 1.5"),
            base.replace("[mesh]", "[mesh]\ncolor = 1"),
            base.replace("id = \"five_spot\"", "id = \"six_spot\""),
            base.replace("element = \"Q4\"", "element = \"B8\""),
        ];
        for text in bad {
            let err = ProblemSpec::from_toml(&text).unwrap_err();
            assert_eq!(err.exit_code(), 3, "{err}");
        }
        let mut spec = ProblemSpec::preset(ProblemKind::Reservoir);
        spec.geometry.as_mut().unwrap().production[0].to = 9.0;
        assert!(spec.validate().is_err());
        let mut spec = ProblemSpec::preset(ProblemKind::Layered);
        spec.geometry.as_mut().unwrap().layers[0].thickness = 0.5;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn overrides() {
        let mut spec = ProblemSpec::preset(ProblemKind::FiveSpot);
        spec.set("nele", "900").unwrap();
        assert_eq!((spec.mesh.nx, spec.mesh.ny), (30, 30));
        assert!(spec.set("nele", "901").is_err());
        assert_eq!(spec.num_elements(), 900);
        spec.set("order", "2").unwrap();
        assert_eq!(spec.mesh.element, ElementType::Quad9);
        spec.set("formulation", "ls").unwrap();
        assert_eq!(spec.solver.formulation, Formulation::LeastSquares);
        spec.set("model", "mbf").unwrap();
        assert_eq!(spec.model.variant, DragVariant::BarusForchheimer);
        spec.set("h", "0.125").unwrap();
        assert_eq!(spec.mesh.nx, 8);
        assert!(spec.set("h", "0.3").is_err());
        assert!(spec.set("weight", "0").is_err());
        assert!(spec.set("colour", "red").is_err());
        let mut res = ProblemSpec::preset(ProblemKind::Reservoir);
        res.set("nele", "400").unwrap();
        assert_eq!((res.mesh.nx, res.mesh.ny), (40, 10));
    }

    fn arb_spec() -> impl Strategy<Value = ProblemSpec> {
        (
            prop::sample::select(ProblemKind::ALL.to_vec()),
            prop::sample::select(DragVariant::ALL.to_vec()),
            any::<bool>(),
            1u8..=2,
            0.0f64..=1.0,
            (1e-3f64..1e3, 0.0f64..2.0, 0.0f64..2.0),
            1usize..40,
            (1e-3f64..2e3, prop::option::of("[a-z]{1,8}")),
        )
            .prop_map(|(kind, variant, ls, weight, theta, (mu0, bb, bf), n, (p_enh, dir))| {
                let mut s = ProblemSpec::preset(kind);
                s.model.variant = variant;
                s.model.mu0 = mu0;
                s.model.beta_b = bb;
                s.model.beta_f = bf;
                s.solver.formulation = if ls { Formulation::LeastSquares } else { Formulation::Vms };
                s.solver.ls_weight = weight;
                s.solver.theta = theta;
                s.mesh.nx = n;
                s.boundary.p_enh = p_enh;
                s.output.dir = dir;
                s
            })
    }

    proptest! {
        #[test]
        fn config_round_trip(spec in arb_spec()) {
            let text = spec.to_toml();
            let back = ProblemSpec::from_toml(&text).unwrap();
            prop_assert_eq!(back, spec);
        }
    }
}
