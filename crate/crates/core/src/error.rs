use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported element type: {0}")]
    UnsupportedElement(String),

    #[error("degenerate element {elem}: det J = {det_j:e}")]
    DegenerateElement { elem: usize, det_j: f64 },

    #[error("point ({x}, {y}, {z}) lies outside every permeability region")]
    RegionLookup { x: f64, y: f64, z: f64 },

    #[error("constitutive violation: {0}")]
    Constitutive(String),

    #[error("conflicting constraints on dof {dof}: {first} vs {second}")]
    ConstraintConflict { dof: usize, first: f64, second: f64 },

    #[error("pressure datum missing: no pressure boundary and no pressure pin")]
    MissingDatum,

    #[error("prescribed normal velocity is incompatible: net boundary flux {net:e}")]
    IncompatibleFlux { net: f64 },

    #[error("element {elem}: {source}")]
    Element {
        elem: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("linear solver failure: relative residual {residual:e} (condition estimate {condition:e})")]
    LinearSolver { residual: f64, condition: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn in_element(self, elem: usize) -> Self {
        match self {
            e @ Error::Element { .. } => e,
            e => Error::Element {
                elem,
                source: Box::new(e),
            },
        }
    }
}
