//! Drag coefficient models.
//!
//! The general form is `alpha = (mu0 / k(x)) * exp(beta_b * p) + beta_f * |v|`.
//! The Darcy, Barus and Forchheimer variants switch the pressure and/or speed
//! terms off. The derivative with respect to velocity uses a regularized
//! norm `sqrt(v.v + eps^2)` so that consistent tangents stay bounded at rest.

use std::fmt;
use std::str::FromStr;

use crate::mesh::RegionField;
use crate::{Error, Result, Vec3};

pub const DEFAULT_V_REG: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DragVariant {
    Darcy,
    Barus,
    Forchheimer,
    BarusForchheimer,
}

impl DragVariant {
    pub const ALL: [DragVariant; 4] = [
        DragVariant::Darcy,
        DragVariant::Barus,
        DragVariant::Forchheimer,
        DragVariant::BarusForchheimer,
    ];

    pub fn has_pressure_term(self) -> bool {
        matches!(self, DragVariant::Barus | DragVariant::BarusForchheimer)
    }

    pub fn has_speed_term(self) -> bool {
        matches!(self, DragVariant::Forchheimer | DragVariant::BarusForchheimer)
    }

    /// Short label used in reports: D, MB, F, MBF.
    pub fn label(self) -> &'static str {
        match self {
            DragVariant::Darcy => "D",
            DragVariant::Barus => "MB",
            DragVariant::Forchheimer => "F",
            DragVariant::BarusForchheimer => "MBF",
        }
    }
}

impl fmt::Display for DragVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            DragVariant::Darcy => "darcy",
            DragVariant::Barus => "barus",
            DragVariant::Forchheimer => "forchheimer",
            DragVariant::BarusForchheimer => "barus_forchheimer",
        };
        f.write_str(name)
    }
}

impl FromStr for DragVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "darcy" | "d" => Ok(DragVariant::Darcy),
            "barus" | "mb" => Ok(DragVariant::Barus),
            "forchheimer" | "f" => Ok(DragVariant::Forchheimer),
            "barus_forchheimer" | "mbf" => Ok(DragVariant::BarusForchheimer),
            other => Err(Error::invalid(format!("unknown drag model '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DragModel {
    pub variant: DragVariant,
    pub mu0: f64,
    pub beta_b: f64,
    pub beta_f: f64,
    pub permeability: RegionField,
    pub v_reg: f64,
}

impl DragModel {
    pub fn new(variant: DragVariant, mu0: f64, beta_b: f64, beta_f: f64, permeability: RegionField) -> Result<Self> {
        let model = DragModel {
            variant,
            mu0,
            beta_b,
            beta_f,
            permeability,
            v_reg: DEFAULT_V_REG,
        };
        model.check()?;
        Ok(model)
    }

    /// Constant drag `alpha` (Darcy with `mu0 = alpha`, `k = 1`).
    pub fn constant(alpha: f64) -> Result<Self> {
        Self::new(DragVariant::Darcy, alpha, 0.0, 0.0, RegionField::uniform(1.0)?)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.mu0 > 0.0) || !self.mu0.is_finite() {
            return Err(Error::Constitutive(format!("mu0 must be positive, got {}", self.mu0)));
        }
        if !(self.beta_f >= 0.0) || !self.beta_f.is_finite() {
            return Err(Error::Constitutive(format!("beta_f must be non-negative, got {}", self.beta_f)));
        }
        if !self.beta_b.is_finite() {
            return Err(Error::Constitutive("beta_b must be finite".into()));
        }
        if !(self.v_reg > 0.0) {
            return Err(Error::Constitutive("velocity regularization must be positive".into()));
        }
        Ok(())
    }

    /// True when the coefficient depends on neither pressure nor velocity.
    pub fn is_linear(&self) -> bool {
        !(self.variant.has_pressure_term() && self.beta_b != 0.0) && !(self.variant.has_speed_term() && self.beta_f != 0.0)
    }

    fn pressure_part(&self, p: f64, x: &Vec3) -> Result<f64> {
        let base = self.mu0 / self.permeability.value(x)?;
        Ok(if self.variant.has_pressure_term() {
            base * (self.beta_b * p).exp()
        } else {
            base
        })
    }

    pub fn alpha(&self, v: &Vec3, p: f64, x: &Vec3) -> Result<f64> {
        let mut a = self.pressure_part(p, x)?;
        if self.variant.has_speed_term() {
            a += self.beta_f * v.norm();
        }
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::Constitutive(format!("drag coefficient {a} at p = {p} is not positive and finite")));
        }
        Ok(a)
    }

    pub fn dalpha_dp(&self, _v: &Vec3, p: f64, x: &Vec3) -> Result<f64> {
        if !self.variant.has_pressure_term() {
            return Ok(0.0);
        }
        Ok(self.beta_b * self.pressure_part(p, x)?)
    }

    pub fn dalpha_dv(&self, v: &Vec3, _p: f64, x: &Vec3) -> Result<Vec3> {
        self.permeability.value(x)?;
        if !self.variant.has_speed_term() || *v == Vec3::zeros() {
            return Ok(Vec3::zeros());
        }
        let norm = (v.norm_squared() + self.v_reg * self.v_reg).sqrt();
        Ok(v * (self.beta_f / norm))
    }

    pub fn dissipation_density(&self, v: &Vec3, p: f64, x: &Vec3) -> Result<f64> {
        Ok(self.alpha(v, p, x)? * v.norm_squared())
    }
}

/// Physical parameters in SI units together with the reference scales.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalScales {
    pub length: f64,
    pub gravity: f64,
    pub p_atm: f64,
    pub rho: f64,
    pub mu0: f64,
    pub k: f64,
    pub beta_b: f64,
    pub beta_f: f64,
}

/// Dimensionless counterparts of [`PhysicalScales`]. The reference scales
/// are carried along so the map can be inverted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dimensionless {
    pub length: f64,
    pub gravity: f64,
    pub p_atm: f64,
    pub rho: f64,
    pub mu0: f64,
    pub k: f64,
    pub beta_b: f64,
    pub beta_f: f64,
}

impl Dimensionless {
    pub fn position(&self, x: f64) -> f64 {
        x / self.length
    }

    pub fn velocity(&self, v: f64) -> f64 {
        v / (self.gravity * self.length).sqrt()
    }

    pub fn pressure(&self, p: f64) -> f64 {
        p / self.p_atm
    }

    pub fn body_force(&self, b: f64) -> f64 {
        b / self.gravity
    }

    pub fn drag(&self, alpha: f64) -> f64 {
        alpha * (self.gravity * self.length.powi(3)).sqrt() / self.p_atm
    }
}

pub fn nondimensionalize(s: &PhysicalScales) -> Result<Dimensionless> {
    let values = [s.length, s.gravity, s.p_atm, s.rho, s.mu0, s.k];
    if values.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::invalid("physical scales must be positive and finite"));
    }
    if !(s.beta_b >= 0.0) || !(s.beta_f >= 0.0) {
        return Err(Error::invalid("Barus and Forchheimer coefficients must be non-negative"));
    }
    let (l, g, pa) = (s.length, s.gravity, s.p_atm);
    Ok(Dimensionless {
        length: l,
        gravity: g,
        p_atm: pa,
        rho: s.rho * g * l / pa,
        mu0: s.mu0 * (g / l).sqrt() / pa,
        k: s.k / (l * l),
        beta_b: s.beta_b * pa,
        beta_f: s.beta_f * g * l * l / pa,
    })
}

pub fn dimensionalize(d: &Dimensionless) -> PhysicalScales {
    let (l, g, pa) = (d.length, d.gravity, d.p_atm);
    PhysicalScales {
        length: l,
        gravity: g,
        p_atm: pa,
        rho: d.rho * pa / (g * l),
        mu0: d.mu0 * pa / (g / l).sqrt(),
        k: d.k * l * l,
        beta_b: d.beta_b / pa,
        beta_f: d.beta_f * pa / (g * l * l),
    }
}
