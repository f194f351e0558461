//! Constructive interpolation on uniformly distributed node sets.
//!
//! A subsequence `T′` with exactly `m` points per block of length `L` is
//! selected from an increasing set `T`. The interpolant is the weighted
//! cardinal series built from the symmetric product over `±T′`:
//!
//! ```text
//! g(z) = Σ_k ((1+z)/(1+t_k))^K · Π(z) / (Π′(t_k)(z − t_k)) · η_k
//! ```
//!
//! Each cardinal function equals the shifted product `B_{t_k}(z − t_k)`
//! under matched truncation, so `g(t_k) = η_k` holds exactly for every
//! node in the series.

mod model;
mod selection;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::linear_fit;
use crate::products::{ProductError, ZeroSet};

pub use model::{
    lower_envelope_fit, upper_envelope_fit, DerivativeFit, InterpolantModel, InterpolantRecord,
    InterpolantValue, MIN_SHIFTED_TERMS, NODE_SNAP,
};
pub use selection::{select_uniform_subsequence, UniformSelection};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InterpolationError {
    #[error("window height h = {h} must satisfy 0 < h < ell = {ell}")]
    InfeasibleParameters { h: f64, ell: f64 },
    #[error("no point of T in window (n = {n}, s = {s}) and no complete block after it")]
    WindowEmpty { n: usize, s: usize },
    #[error("nodes must be finite, positive and strictly increasing (violation at index {index})")]
    InvalidNodes { index: usize },
    #[error("parameter {name} is invalid (got {value})")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("n_terms = {n_terms} must lie in 2..={available}")]
    TooFewTerms { n_terms: usize, available: usize },
    #[error("expected at least {expected} data values, got {got}")]
    DataLength { expected: usize, got: usize },
    #[error("node index {index} out of range (have {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error(
        "truncation {n_trunc} below the minimum {min} (or beyond the {available} available nodes)"
    )]
    TruncationTooSmall {
        n_trunc: usize,
        min: usize,
        available: usize,
    },
    #[error("degenerate envelope fit")]
    DegenerateFit,
    #[error("K = {k} does not exceed max(K0, N0) + 2 = {required}")]
    KTooSmall { k: u32, required: f64 },
    #[error("grid point {z} lies within {distance} of a zero (minimum {min})")]
    GridTouchesZero {
        z: Complex64,
        distance: f64,
        min: f64,
    },
    #[error("nu = {nu} must exceed m/L = {critical}")]
    InvalidNu { nu: f64, critical: f64 },
    #[error(transparent)]
    Product(#[from] ProductError),
}

/// `B_{t′}(z)` over `±t′_1, …, ±t′_{n_trunc}` with `t′ = t′_{idx}` removed.
///
/// The omitted nodes enter through `exp(−(z² + 2zt′)σ₂)`, with `σ₂` the
/// extrapolated tail of `Σ t_n^{-2}`; this matches the product used by
/// [`InterpolantModel`] built on the same nodes.
pub fn shifted_beurling_product(
    selection: &UniformSelection,
    t_prime_idx: usize,
    z: Complex64,
    n_trunc: usize,
) -> Result<Complex64, InterpolationError> {
    let sigma2 = check_shifted_args(selection, t_prime_idx, n_trunc)?;
    Ok(model::shifted_product_log(&selection.t_prime[..n_trunc], t_prime_idx, z, sigma2).exp())
}

fn check_shifted_args(
    selection: &UniformSelection,
    idx: usize,
    n_trunc: usize,
) -> Result<f64, InterpolationError> {
    if n_trunc < MIN_SHIFTED_TERMS || n_trunc > selection.len() {
        return Err(InterpolationError::TruncationTooSmall {
            n_trunc,
            min: MIN_SHIFTED_TERMS,
            available: selection.len(),
        });
    }
    if idx >= n_trunc {
        return Err(InterpolationError::IndexOutOfRange {
            index: idx,
            len: n_trunc,
        });
    }
    let zeros = ZeroSet::new(selection.t_prime[..n_trunc].to_vec(), None)?;
    Ok(zeros.tail_moments(n_trunc).inv_sq)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeurlingGrowth {
    pub nu: f64,
    /// The polynomial exponent `5m`.
    pub exponent: u32,
    /// `max |B|·(1+|z|)^{−5m}·e^{−πν|Im z|}` over the grid.
    pub max_ratio: f64,
}

/// Grid maximum of `|B_{t′}(z)|(1+|z|)^{−5m}e^{−πν|Im z|}`.
///
/// `nu = None` uses `1.2·m/L`.
pub fn beurling_growth_diagnostic(
    selection: &UniformSelection,
    t_prime_idx: usize,
    nu: Option<f64>,
    grid: &[Complex64],
    n_trunc: usize,
) -> Result<BeurlingGrowth, InterpolationError> {
    let sigma2 = check_shifted_args(selection, t_prime_idx, n_trunc)?;
    let critical = selection.m_per_interval as f64 / selection.l;
    let nu = nu.unwrap_or(1.2 * critical);
    if !(nu > critical) {
        return Err(InterpolationError::InvalidNu { nu, critical });
    }
    let exponent = 5 * selection.m_per_interval as u32;
    let nodes = &selection.t_prime[..n_trunc];
    let max_log = grid
        .iter()
        .map(|&z| {
            model::shifted_product_log(nodes, t_prime_idx, z, sigma2).re
                - exponent as f64 * z.norm().ln_1p()
                - std::f64::consts::PI * nu * z.im.abs()
        })
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(BeurlingGrowth {
        nu,
        exponent,
        max_ratio: max_log.exp(),
    })
}

pub fn interpolant_eval(model: &InterpolantModel, z: Complex64) -> InterpolantValue {
    model.eval(z)
}

pub fn derivative_lower_bound_fit(model: &InterpolantModel) -> DerivativeFit {
    model.derivative_fit()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpolationRow {
    pub node: f64,
    pub eta: Complex64,
    pub g_value: Complex64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpolationReport {
    pub rows: Vec<InterpolationRow>,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

/// `max |g(t_k) − η_k|` over the first `n_check` nodes.
pub fn verify_interpolation(
    model: &InterpolantModel,
    n_check: usize,
    tol: f64,
) -> InterpolationReport {
    let rows: Vec<InterpolationRow> = model
        .nodes()
        .iter()
        .zip(model.eta())
        .take(n_check)
        .map(|(&t, &eta)| {
            let g_value = model.eval(Complex64::new(t, 0.0)).value;
            InterpolationRow {
                node: t,
                eta,
                g_value,
                residual: (g_value - eta).norm(),
            }
        })
        .collect();
    let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    InterpolationReport {
        rows,
        max_residual,
        tol,
        pass: max_residual <= tol,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    /// Empirical constant `C` of the sector bound.
    pub sector_ratio_max: f64,
    /// `(r, max over θ of the ratio)`
    pub per_radius: Vec<(f64, f64)>,
    /// Slope of `log(max ratio)` against `log(1+r)`.
    pub sector_trend: f64,
    /// Slope of `log|g(x)|` against `log(1+|x|)`; `None` if `g` vanishes
    /// on the grid.
    pub real_exponent_fit: Option<f64>,
    /// Exponent `n = max(N₀ + 1, K + N₀)`.
    pub n_exponent: f64,
    pub delta_min: f64,
}

/// Sector ratio `|g|δ/((1+r)^K|Π|)` and real-line growth exponent.
pub fn verify_growth_bounds(
    model: &InterpolantModel,
    r_grid: &[f64],
    theta_grid: &[f64],
    real_grid: &[f64],
) -> Result<GrowthReport, InterpolationError> {
    let sel = model.selection();
    let delta_min = 0.05 * (sel.ell - sel.h);
    for &theta in theta_grid {
        if !(theta.abs() < std::f64::consts::FRAC_PI_2) {
            return Err(InterpolationError::InvalidParameter {
                name: "theta",
                value: theta,
            });
        }
    }
    let check = |z: Complex64| {
        let distance = model.distance_to_zeros(z);
        if distance < delta_min {
            Err(InterpolationError::GridTouchesZero {
                z,
                distance,
                min: delta_min,
            })
        } else {
            Ok(())
        }
    };

    let mut per_radius = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let mut best: f64 = 0.0;
        for &theta in theta_grid {
            let z = Complex64::from_polar(r, theta);
            check(z)?;
            best = best.max(model.sector_ratio(z));
        }
        per_radius.push((r, best));
    }
    let sector_ratio_max = per_radius.iter().map(|p| p.1).fold(0.0, f64::max);
    let (tx, ty): (Vec<f64>, Vec<f64>) = per_radius
        .iter()
        .filter(|p| p.1 > 0.0)
        .map(|p| (p.0.ln_1p(), p.1.ln()))
        .unzip();
    let sector_trend = linear_fit(&tx, &ty).map_or(0.0, |f| f.0);

    let mut rx = Vec::new();
    let mut ry = Vec::new();
    for &x in real_grid {
        let z = Complex64::new(x, 0.0);
        check(z)?;
        let v = model.eval(z).value.norm();
        if v > 0.0 {
            rx.push(x.abs().ln_1p());
            ry.push(v.ln());
        }
    }
    let real_exponent_fit = linear_fit(&rx, &ry).map(|f| f.0);
    Ok(GrowthReport {
        sector_ratio_max,
        per_radius,
        sector_trend,
        real_exponent_fit,
        n_exponent: model.real_exponent(),
        delta_min,
    })
}
