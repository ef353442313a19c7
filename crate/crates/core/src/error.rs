use crate::C64;

/// Errors reported by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point is not interior: {0}")]
    NotInterior(String),

    #[error("point is not on the stratum {stratum}: {detail}")]
    WrongStratum { stratum: &'static str, detail: String },

    #[error("factor `{factor}` takes value {value} on the branch cut of a non-integer power")]
    BranchCut { factor: String, value: C64 },

    #[error("factor `{factor}` vanishes at the requested pair")]
    FactorVanishes { factor: String },

    #[error("|t| = {t_abs} is outside the convergence region |t| < 1")]
    OutsideConvergence { t_abs: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("map does not fix the base point (residual {residual:e})")]
    NotFixed { residual: f64 },

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            what,
            expected,
            found,
        });
    }
    Ok(())
}
