use thiserror::Error;

use crate::jointopt::TraceEntry;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A profile for which a closed-form maximizer collapses to a boundary limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Degeneracy {
    /// ν = 0: EE grows without bound as P/B → 0.
    ZeroProcessingEnergy,
    /// μ + (D0 + νB)M = 0: EE is maximized as P → 0.
    ZeroCircuitPower,
    /// D0 + νB = 0: every extra antenna helps.
    ZeroTransceiverPower,
}

impl std::fmt::Display for Degeneracy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Degeneracy::ZeroProcessingEnergy => {
                "nu = 0, the power spectral density optimum is the limit P/B -> 0"
            }
            Degeneracy::ZeroCircuitPower => {
                "mu + (d0 + nu*B)*M = 0, the power optimum is the limit P -> 0"
            }
            Degeneracy::ZeroTransceiverPower => "d0 + nu*B = 0, EE increases without bound in M",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {name} = {value:e}: must be {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("lambert W0 domain error: x = {0:e} is below -1/e")]
    LambertDomain(f64),

    #[error("lambert W0 did not converge for x = {x:e} after {iterations} iterations (residual {residual:e})")]
    LambertNoConvergence {
        x: f64,
        iterations: usize,
        residual: f64,
    },

    #[error("degenerate profile: {0}")]
    Degenerate(Degeneracy),

    #[error("bandwidth bracket search failed after {expansions} expansions, last bracket [{lo:e}, {hi:e}] Hz")]
    BracketFailure { expansions: usize, lo: f64, hi: f64 },

    #[error("joint optimization did not converge after {iterations} iterations")]
    NoConvergence {
        iterations: usize,
        trace: Vec<TraceEntry>,
    },

    #[error(
        "energy efficiency decreased at iteration {iteration}: {previous:e} -> {current:e} bit/J"
    )]
    AscentViolation {
        iteration: usize,
        previous: f64,
        current: f64,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

/// Checks `value` against a predicate and reports the parameter by name.
pub(crate) fn ensure(
    ok: bool,
    name: &'static str,
    value: f64,
    constraint: &'static str,
) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            constraint,
        })
    }
}
