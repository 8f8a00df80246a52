//! Phase-space distributions and information-theoretic measures for
//! one-dimensional oscillator states.
//!
//! The library computes Wigner and Husimi distributions of harmonic and
//! quartic-perturbed anharmonic oscillator states (first-order perturbation
//! theory, ℏ = m = ω = 1) on uniform grids, and evaluates a catalog of
//! measures over them:
//!
//! * Shannon, Wehrl, Rényi, and Fisher information measures ([`entropy`]),
//! * survival functions and cumulative residual entropies ([`survival`]),
//! * KL, Jeffreys, Rényi, and Cauchy–Schwarz divergences plus mutual
//!   information ([`divergence`]),
//! * entropic uncertainty bound checks ([`entropy::check_shannon_bound`],
//!   [`entropy::check_renyi_bound`]),
//! * per-state reports and (n, λ) sweep tables ([`report`]).
//!
//! All integrals use composite Simpson quadrature on odd-count uniform grids
//! ([`quadrature`]). The default working window is [−8, 8]² with 513 points
//! per axis, wide enough that Gaussian-envelope truncation error (∼e^{−64})
//! is far below every tolerance used here.

#![forbid(unsafe_code)]

pub mod cli;
pub mod divergence;
pub mod entropy;
pub mod phasespace;
pub mod quadrature;
pub mod report;
pub mod states;
pub mod survival;

/// Version string stamped into sweep metadata and CSV headers.
pub const VERSION: &str = concat!("psinfo ", env!("CARGO_PKG_VERSION"));

/// Errors produced by grid construction, state construction, and measure
/// evaluation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("grid needs at least 3 points, got {0}")]
    GridTooSmall(usize),
    #[error("Simpson quadrature needs an odd number of points, got {0}")]
    GridEvenPoints(usize),
    #[error("grid bounds must satisfy min < max and be finite, got [{0}, {1}]")]
    GridBadBounds(f64, f64),
    #[error("sample count {got} does not match grid point count {want}")]
    SampleCountMismatch { got: usize, want: usize },
    #[error("non-finite sample at index {0}")]
    NonFiniteSample(usize),
    #[error("operands are sampled on different grids")]
    GridMismatch,
    #[error("oscillator spec invalid: lambda must be finite and >= 0, got {0}")]
    InvalidCoupling(f64),
    #[error("closed-form perturbed state is available only for n in {{0, 1}}, got n = {0}; use perturbed_state_general")]
    UnsupportedLevel(usize),
    #[error("density is negative beyond tolerance (min value {0:.3e})")]
    NegativeDensity(f64),
    #[error("density integrates to {0:.8} instead of 1")]
    NotNormalized(f64),
    #[error("expected a {expected} field, got {got}")]
    WrongFieldKind {
        expected: &'static str,
        got: &'static str,
    },
    #[error("Wigner transform imaginary residue {0:.3e} exceeds 1e-8; grid cannot represent this state")]
    ImaginaryResidue(f64),
    #[error("Renyi order must be > 0 and != 1, got {0}; order 1 is the Shannon limit (use shannon_1d)")]
    InvalidRenyiOrder(f64),
    #[error("phase-space Renyi order must be an even integer >= 2 for a Wigner field (odd powers of a signed field are complex), got {0}")]
    OddWignerOrder(u32),
    #[error("Renyi bound indices must satisfy 1/alpha + 1/beta = 2, or alpha = beta = 2; got alpha = {alpha}, beta = {beta}")]
    RenyiIndexConstraint { alpha: f64, beta: f64 },
    #[error("KL divergence undefined: q vanishes everywhere on the support of p")]
    UndefinedDivergence,
    #[error("Cauchy-Schwarz divergence undefined: a field is identically zero")]
    ZeroField,
    #[error("smoothing width must be finite and > 0, got {0}")]
    InvalidSmoothing(f64),
    #[error("mutual information cross-check failed for the {field} field: direct ({d_re:.6e}, {d_im:.6e}) vs entropic ({e_re:.6e}, {e_im:.6e})")]
    MutualInformationMismatch {
        field: &'static str,
        d_re: f64,
        d_im: f64,
        e_re: f64,
        e_im: f64,
    },
    #[error("duplicate sweep key (n = {n}, lambda = {lambda})")]
    DuplicateSweepKey { n: usize, lambda: f64 },
    #[error("measure registry mismatch: {0}")]
    RegistryMismatch(String),
    #[error("{0}")]
    Usage(String),
    #[error("malformed CSV at line {line}: {message}")]
    MalformedCsv { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors that signal a violated numerical invariant (as opposed
    /// to bad configuration or I/O); the CLI maps these to a dedicated exit
    /// code.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NegativeDensity(_)
                | Error::NotNormalized(_)
                | Error::ImaginaryResidue(_)
                | Error::MutualInformationMismatch { .. }
                | Error::RegistryMismatch(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
