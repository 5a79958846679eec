use thiserror::Error;

/// Errors surfaced by constructors and solvers in this crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Coupling must be a positive finite number.
    #[error("coupling constant must be positive and finite, got {0}")]
    InvalidCoupling(f64),

    /// A model constant was NaN or infinite.
    #[error("{name} must be finite, got {value}")]
    NonFiniteParam { name: &'static str, value: f64 },

    /// An odd-parity cat with |alpha|^2 this small has essentially zero
    /// norm; its photon distribution is numerically meaningless.
    #[error(
        "cat state norm^2 = {norm_sqr:.3e} is below the floor {floor:.1e}; \
         the superposition is destructively degenerate"
    )]
    DegenerateCat { norm_sqr: f64, floor: f64 },

    /// A field configuration string did not parse.
    #[error("cannot parse field spec {input:?}: {reason}")]
    BadFieldSpec { input: String, reason: String },

    /// The general time-averaged inversion is only defined for states whose
    /// sector amplitudes are real up to the sector-wise phase convention.
    #[error(
        "sector {sector} has amplitude with nonzero imaginary part {imag:.3e}; \
         the time-averaged inversion closed form requires real amplitudes"
    )]
    ComplexAmplitudes { sector: usize, imag: f64 },

    /// A sweep grid was empty or not strictly increasing.
    #[error("invalid {name} grid: {reason}")]
    InvalidGrid { name: &'static str, reason: String },

    /// The adaptive integrator could not meet its error target.
    #[error(
        "adaptive step control failed at t = {t:.6e} (step size {step:.3e}): {reason}"
    )]
    StepFailure { t: f64, step: f64, reason: String },
}
