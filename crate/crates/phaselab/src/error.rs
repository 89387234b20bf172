use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("grid sizes must be powers of two >= 8, got nx={nx}, nk={nk}")]
    BadGridSize { nx: usize, nk: usize },
    #[error("domain half-widths must be positive, got lx={lx}, lk={lk}")]
    BadExtent { lx: f64, lk: f64 },
    #[error("dimension must be at least 1, got {0}")]
    BadDimension(usize),
    #[error("sobolev order {0} unsupported (only m = 0..=3 is needed)")]
    SobolevOrder(usize),
    #[error("potential width must be positive, got sigma={0}")]
    BadSigma(f64),
    #[error("fourier moment order {0} outside 0..=4")]
    MomentOrder(usize),
    #[error("operands live on different grids")]
    GridMismatch,
    #[error("operation requires epsilon > 0 (classical field given)")]
    ClassicalEpsilon,
    #[error("NaN detected in field at t={0}")]
    NanDetected(f64),
    #[error("degenerate seed: cutoff integral {0} is not positive")]
    DegenerateSeed(f64),
    #[error("profile (m0={m0}, sigma_x={sigma_x}) does not fit inside the grid box")]
    ProfileEscapesGrid { m0: f64, sigma_x: f64 },
    #[error("epsilon={eps} under-resolved: need hk <= eps*lk/4 = {bound}, grid has hk={hk}")]
    UnresolvedEpsilon { eps: f64, hk: f64, bound: f64 },
    #[error("ensemble/field mismatch: {0}")]
    EnsembleMismatch(String),
    #[error("particle count {0} too small (need >= 1000)")]
    TooFewParticles(usize),
    #[error("bad field file: {0}")]
    Format(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
