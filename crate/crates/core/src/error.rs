use thiserror::Error;

/// Everything that can go wrong in the library. Hypothesis violations of a
/// model are not errors; they are reported by `validate_model`.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("kappa^2 = {kappa2} lies outside the existence range kappa^2 < kappa_E^2 = {bound}")]
    Existence { kappa2: f64, bound: f64 },

    #[error("flux matrix f is singular")]
    SingularFlux,

    #[error("genericity failure: {0}")]
    Genericity(String),

    #[error("first-order instability: spectrum of the effective flux is not real ({0})")]
    FirstOrderInstability(String),

    #[error("degenerate spectrum: {0}")]
    Degenerate(String),

    #[error("QR iteration did not converge after {iterations} iterations ({found} of {n} eigenvalues found)")]
    Convergence { iterations: usize, n: usize, found: usize, partial: Vec<(f64, f64)> },

    #[error("eigensolve failed at sigma = {sigma}: {source}")]
    AtFrequency {
        sigma: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("region {region}: {source}")]
    InRegion {
        region: String,
        #[source]
        source: Box<Error>,
    },

    #[error("fit window error: {0}")]
    Window(String),

    #[error("no bifurcation found in the scanned range [{lo}, {hi}]")]
    NoBifurcation { lo: f64, hi: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn at_sigma(self, sigma: f64) -> Error {
        Error::AtFrequency { sigma, source: Box::new(self) }
    }
}
