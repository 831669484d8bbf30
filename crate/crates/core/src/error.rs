use std::fmt;

use thiserror::Error;

use crate::trajectory::TrajectoryBranch;

/// Which side of the origin a trajectory explores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn sign(self) -> i32 {
        match self {
            Side::Plus => 1,
            Side::Minus => -1,
        }
    }

    pub fn of_sign(sign: i32) -> Option<Side> {
        match sign.signum() {
            1 => Some(Side::Plus),
            -1 => Some(Side::Minus),
            _ => None,
        }
    }

    pub fn both() -> [Side; 2] {
        [Side::Plus, Side::Minus]
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Plus => "+",
            Side::Minus => "-",
        })
    }
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "plus" | "positive" => Ok(Side::Plus),
            "-" | "minus" | "negative" => Ok(Side::Minus),
            other => Err(Error::Usage(format!("invalid side {other:?}, expected + or -"))),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("no turning point on the {0} side")]
    NoTurningPoint(Side),

    #[error("endpoint |Q| = {q} lies beyond the turning point {turn}")]
    BeyondTurningPoint { q: String, turn: String },

    #[error("no trajectory on branch {branch} reaches xi0 = {xi0}")]
    NoTrajectory { xi0: String, branch: TrajectoryBranch },

    #[error("branch {branch} unavailable: {detail}")]
    BranchUnavailable {
        branch: TrajectoryBranch,
        detail: String,
    },

    #[error("no real shared saddle for the density matrix at xi1 = {xi1}, xi2 = {xi2}")]
    NoDensitySaddle { xi1: String, xi2: String },

    #[error("no feasible saddle for the scaled observable")]
    EmptyFeasibleSet,

    #[error("quadrature did not reach relative tolerance {tol:e} (last change {change:e})")]
    Quadrature { tol: f64, change: f64 },

    #[error("precision ceiling of {ceiling} bits exceeded; at least {required} bits are required")]
    PrecisionCeiling { required: u32, ceiling: u32 },

    #[error("order {0} is not present in the series table")]
    OrderAbsent(usize),

    #[error("the potential has no cubic term")]
    NoCubicTerm,

    #[error("rate estimate needs at least 4 nonzero entries, got {0}")]
    TooFewEntries(usize),

    #[error("k grid is not uniform: {0}")]
    NonUniformGrid(String),

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by bad input rather than by a failed computation.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidPotential(_)
                | Error::NoTurningPoint(_)
                | Error::BeyondTurningPoint { .. }
                | Error::NoTrajectory { .. }
                | Error::BranchUnavailable { .. }
                | Error::NoDensitySaddle { .. }
                | Error::EmptyFeasibleSet
                | Error::NoCubicTerm
                | Error::Usage(_)
                | Error::Io(_)
                | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
