use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A sampling grid or numeric range failed validation.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("unknown sequence name `{0}`")]
    UnknownSequence(String),

    /// An operation that requires an anagram (palindromic) sequence was
    /// handed something else.
    #[error("sequence `{0}` is not anagram-symmetric with odd length")]
    NotAnagram(String),

    #[error("phase solver stalled after {iterations} iterations, residual norm {residual:.3e}")]
    SolverStalled { iterations: usize, residual: f64 },

    /// Population reached the top of the phonon ladder; the simulation must
    /// be re-run with a larger cutoff.
    #[error("phonon cutoff {cutoff} too small: top-level population {population:.3e}")]
    Truncation { cutoff: usize, population: f64 },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid chain spec: {0}")]
    InvalidChainSpec(String),

    #[error("unsupported sideband order {0}: only s = 1 and s = 2 are driven")]
    UnsupportedSideband(u8),

    #[error("scan failed at eta = {eta:.6}, area_scale = {area_scale:.6}: {source}")]
    ScanCell {
        eta: f64,
        area_scale: f64,
        #[source]
        source: Box<Error>,
    },
}
