use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// |det g| fell below the configured floor (chart boundary, coordinate
    /// pole or genuinely degenerate metric).
    #[error("singular metric at {point:?}: |det g| = {det:.3e} below floor {floor:.3e}")]
    SingularMetric {
        point: [f64; 4],
        det: f64,
        floor: f64,
    },

    /// A finite-difference stencil stepped outside the chart.
    #[error("derivative stencil leaves chart '{chart}' near {point:?} (step {h:.3e})")]
    DerivativeOverflow {
        chart: String,
        point: [f64; 4],
        h: f64,
    },

    /// Perturbation support cell lies outside the chart.
    #[error("perturbation cell centered at {point:?} lies outside chart '{chart}'")]
    UnsupportedPerturbation { chart: String, point: [f64; 4] },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// A point or integration box leaves the chart domain.
    #[error("domain error on chart '{chart}': {detail}")]
    DomainError { chart: String, detail: String },

    /// Per-unit-time integrals need a time-independent metric.
    #[error("field '{0}' declares explicit time dependence")]
    NonStationaryField(String),

    /// The Ricci-background estimate is only valid for rho > mu_delta^(-1/4).
    #[error("regime violation: rho = {rho:.3e} must exceed mu_delta^(-1/4) = {bound:.3e}")]
    RegimeViolation { rho: f64, bound: f64 },

    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),

    /// Worldline segment with |dx| >= dt (superluminal input).
    #[error("spacelike segment: |dx| = {dx} >= dt = {dt}")]
    SpacelikeSegment { dx: f64, dt: f64 },

    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),

    /// ODE integration produced a non-finite state.
    #[error("integration step failure near r = {0}")]
    StepFailure(f64),

    #[error("scenario parse error at line {line}: {msg}")]
    ScenarioParse { line: usize, msg: String },
}
