use thiserror::Error;

/// Crate-wide error type. Variants are grouped by the layer that raises
/// them; the CLI maps [`Error::is_domain`] to its exit-code policy.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the documented domain of an operation.
    #[error("domain: {0}")]
    Domain(String),

    /// Driver and force point closer than the gap tolerance.
    #[error("singular gap: |gap| = {gap:.3e} below tolerance")]
    SingularGap { gap: f64 },

    /// Forward flow reached the driving singularity; the point belongs to
    /// the hull and has no image.
    #[error("point swallowed at t = {t:.6}")]
    PointSwallowed { t: f64 },

    /// Backward flow left the closed disc by more than the geometry
    /// tolerance, which indicates a corrupted chain or step data.
    #[error("numerical blowup: |z| = {abs:.6} at t = {t:.6}")]
    NumericalBlowup { abs: f64, t: f64 },

    /// The discrete gap left (0, 2pi) and sub-step halving hit its limit.
    #[error("gap collapse at t = {t:.6} after {halvings} halvings")]
    GapCollapse { t: f64, halvings: u32 },

    /// Absorption did not happen before the configured time cap.
    #[error("max time exceeded: t_cap = {t_cap}")]
    MaxTimeExceeded { t_cap: f64 },

    /// Adaptive step size underflowed while integrating the second-order
    /// equation for the weight profile.
    #[error("stiffness failure at u = {u:.6e}, step {h:.3e}")]
    StiffnessFailure { u: f64, h: f64 },

    /// Evaluation point outside the solved grid.
    #[error("out of grid: u = {u:.6e} not in [{u_min:.3e}, {u_max:.3e}]")]
    OutOfGrid { u: f64, u_min: f64, u_max: f64 },

    /// Hypergeometric lower parameter within tolerance of a non-positive
    /// integer, or a connection coefficient degenerates; no limit is taken.
    #[error("degenerate hypergeometric parameter: {0}")]
    ParameterDegenerate(String),

    /// Requested moment is infinite for these parameters.
    #[error("divergent moment: alpha = {alpha} >= 1 - kappa/8 = {bound}")]
    Divergent { alpha: f64, bound: f64 },

    /// Gauss series failed to reach the target accuracy.
    #[error("series did not converge: {0}")]
    SeriesNonConvergent(String),

    /// Finite-difference stencil would leave the admissible angle domain.
    #[error("stencil out of domain at ({th1:.4}, {th2:.4}), step {h:.3e}")]
    StencilOutOfDomain { th1: f64, th2: f64, h: f64 },

    /// A sampled path had to be abandoned (collapse retries exhausted).
    #[error("path aborted: {0}")]
    PathAbort(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by invalid input rather than numerical
    /// failure along the run.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::SingularGap { .. }
                | Error::OutOfGrid { .. }
                | Error::ParameterDegenerate(_)
                | Error::Divergent { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
