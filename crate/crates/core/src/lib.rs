//! Desk-scale numerical laboratory for discrete Fourier uniqueness and
//! decay transfer.
//!
//! The crate is split along the objects the experiments manipulate:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`pairs`] | power-law sampling sequences, density functionals, criticality and closed-form identity checks |
//! | [`products`] | symmetric canonical products, indicator estimation, Jensen-type decay checks |
//! | [`interpolation`] | uniform subsequence selection and the weighted cardinal-series interpolant |
//! | [`uniqueness`] | Hermite-basis sampling operators, singular-value scans, Hardy/decay-transfer probes |
//!
//! Every computation is pure: values are immutable after construction and
//! may be shared freely across threads.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod interpolation;
pub mod numeric;
pub mod pairs;
pub mod products;
pub mod quadrature;
pub mod uniqueness;

pub use num_complex::Complex64;

pub use interpolation::{
    derivative_lower_bound_fit, interpolant_eval, select_uniform_subsequence,
    shifted_beurling_product, verify_growth_bounds, verify_interpolation, InterpolantModel,
    InterpolationError, UniformSelection,
};
pub use pairs::{
    beurling_condition_check, classify_pair, criticality_algebra_check, density_functional,
    eta_substitution_check, make_power_lattice, morgan_threshold, trig_inequality_check,
    CriticalityKind, CriticalityVerdict, DensityEstimate, PairError, PairSpec, SampleSequence,
    Side,
};
pub use products::{
    asymptotic_slope_fit, indicator_estimate, jensen_decay_check, kappa_estimate_bound_check,
    product_eval, product_log_asymptote, zero_count_in_disk, BuiltinFunction, EntireFunction,
    IndicatorReport, ProductError, ProductModel, TailMode, ZeroSet,
};
pub use uniqueness::{
    build_sampling_operator, decay_transfer_experiment, hardy_growth_test, hermite_eval,
    smallest_singular_value, uniqueness_scan, HermiteBasis, SamplingOperator, ScanResult,
    TransferReport, UniquenessError,
};
