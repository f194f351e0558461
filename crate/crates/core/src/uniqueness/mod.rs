//! Hermite-basis probes of Fourier uniqueness and decay transfer.
//!
//! Trial functions are finite expansions in the Hermite functions `h_n`,
//! which satisfy `ĥ_n = (−i)^n h_n`, so frequency-side samples are exact.
//! A pair `(Λ, M)` acts on them through the sampling operator whose
//! smallest singular value measures how close the pair comes to admitting
//! a nonzero function vanishing on `Λ` with transform vanishing on `M`.

mod experiments;
mod hermite;
mod operator;

use thiserror::Error;

use crate::pairs::{BeurlingReport, PairError};

pub use experiments::{
    decay_transfer_experiment, growth_exponent, hardy_growth_test, lattice_in_radius, scan_radius,
    uniqueness_scan, HardyReport, ScanResult, TransferReport, TransferWeights, GROWTH_TOL,
    K_TILDE_MAX,
};
pub use hermite::{hermite_eval, HermiteBasis, HermiteCheck, FT_TOL, NORM_TOL};
pub use operator::{
    build_sampling_operator, smallest_singular_value, RowWeights, SamplingOperator,
};

#[derive(Debug, Error)]
pub enum UniquenessError {
    #[error("basis index {n} out of range for size {size}")]
    IndexOutOfRange { n: usize, size: usize },
    #[error("invalid {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("quadrature check failed for h_{n}: norm error {norm_error:e}, transform error {ft_error:e}")]
    QuadratureCheck {
        n: usize,
        norm_error: f64,
        ft_error: f64,
    },
    #[error("expected {expected} row weights, got {got}")]
    WeightLength { expected: usize, got: usize },
    #[error("non-finite operator entry or weight")]
    NonFinite,
    #[error("singular value decomposition failed on a {rows}x{cols} matrix")]
    SvdFailed { rows: usize, cols: usize },
    #[error("growth fit needs at least 5 usable points, got {points}")]
    DegenerateFit { points: usize },
    #[error("density condition fails: {0:?}")]
    ConditionFailed(BeurlingReport),
    #[error(transparent)]
    Pair(#[from] PairError),
}
