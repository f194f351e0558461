//! Symmetric canonical products `Π(z) = ∏(1 − z²/γ_n²)`, indicator
//! estimation on rays, and the Jensen-type decay check.
//!
//! Products are accumulated in the log domain. The omitted tail is
//! controlled through `|log(1 − w)| ≤ 2|w|` and `|log(1 − w) + w| ≤ |w|²`
//! for `|w| ≤ 1/2`, which fixes the validity radius `γ_N/√2`.

mod functions;
mod indicator;
mod jensen;
mod zeros;

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{linear_fit, ln_1p, lstsq, NeumaierSum};

pub use functions::{BuiltinFunction, EntireFunction, FunctionMeta};
pub use indicator::{
    indicator_estimate, kappa_estimate_bound_check, IndicatorReport, KappaMargin, RayDiagnostic,
};
pub use jensen::{jensen_decay_check, JensenReport, JensenSetup};
pub use zeros::{TailMoments, ZeroLaw, ZeroSet};

/// Minimum angular distance from the real axis for slope fits.
pub const THETA_MIN: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProductError {
    #[error("zero set is empty")]
    EmptyZeroSet,
    #[error("zeros must be finite, positive and strictly increasing (violation at index {index})")]
    InvalidZeros { index: usize },
    #[error("density must be positive (got {0})")]
    InvalidDensity(f64),
    #[error("declared density {declared} disagrees with observed n/γ_n = {observed}")]
    DensityMismatch { declared: f64, observed: f64 },
    #[error("truncation index {n_trunc} outside 1..={available}")]
    InvalidTruncation { n_trunc: usize, available: usize },
    #[error("|z| = {modulus} exceeds the validity radius {r_max}")]
    RadiusExceeded { modulus: f64, r_max: f64 },
    #[error("{t} is not a zero of the truncated product")]
    NotAZero { t: f64 },
    #[error("theta = {theta} lies within {THETA_MIN} rad of the real axis")]
    ThetaTooClose { theta: f64 },
    #[error("grid needs at least {need} points (got {have})")]
    GridTooSmall { need: usize, have: usize },
    #[error("degenerate least-squares fit")]
    DegenerateFit,
    #[error("order rho must be positive (got {0})")]
    InvalidOrder(f64),
    #[error("parameter {name} is invalid (got {value})")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("unknown function {0:?}")]
    UnknownFunction(String),
}

/// How the omitted factors `n > N` are handled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailMode {
    /// Drop them; error bound `2|z|² Σ_{n>N} γ_n^{-2}`.
    Truncated,
    /// Multiply by `exp(−z² Σ_{n>N} γ_n^{-2})`; error bound `|z|⁴ Σ_{n>N} γ_n^{-4}`.
    Compensated,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductValue {
    pub value: Complex64,
    /// Principal-branch-free `log Π` (sum of factor logs).
    pub log_value: Complex64,
    /// Bound on `|log Π − log value|` from the omitted tail.
    pub log_abs_err_bound: f64,
    /// False when the tail moments were extrapolated.
    pub certified: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodeDerivative {
    pub value: f64,
    pub log_abs: f64,
    /// `+1.0` or `-1.0`.
    pub sign: f64,
    /// Infinite when the node lies beyond the validity radius.
    pub log_abs_err_bound: f64,
}

/// A truncated symmetric canonical product.
#[derive(Clone, Debug)]
pub struct ProductModel {
    zeros: ZeroSet,
    n_trunc: usize,
    mode: TailMode,
    tail: TailMoments,
    r_max: f64,
}

impl ProductModel {
    pub fn new(zeros: ZeroSet, n_trunc: usize, mode: TailMode) -> Result<Self, ProductError> {
        if n_trunc == 0 || n_trunc > zeros.len() {
            return Err(ProductError::InvalidTruncation {
                n_trunc,
                available: zeros.len(),
            });
        }
        let tail = zeros.tail_moments(n_trunc);
        let r_max = zeros.gammas()[n_trunc - 1] / SQRT_2;
        Ok(Self {
            zeros,
            n_trunc,
            mode,
            tail,
            r_max,
        })
    }

    pub fn zeros(&self) -> &ZeroSet {
        &self.zeros
    }

    pub fn n_trunc(&self) -> usize {
        self.n_trunc
    }

    pub fn mode(&self) -> TailMode {
        self.mode
    }

    pub fn tail(&self) -> TailMoments {
        self.tail
    }

    /// Radius `γ_N/√2` inside which the tail bound holds.
    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn active(&self) -> &[f64] {
        &self.zeros.gammas()[..self.n_trunc]
    }

    /// Tail error bound at modulus `r` for the configured mode.
    pub fn error_bound(&self, r: f64) -> f64 {
        match self.mode {
            TailMode::Truncated => 2.0 * r * r * self.tail.inv_sq,
            TailMode::Compensated => r.powi(4) * self.tail.inv_quartic,
        }
    }

    /// `log Π(z)` with no radius check. Returns `−∞` real part at a zero.
    pub fn log_eval_unchecked(&self, z: Complex64) -> Complex64 {
        let mut re = NeumaierSum::default();
        let mut im = NeumaierSum::default();
        for &g in self.active() {
            let w = z / g;
            for u in [-w, w] {
                let l = log_one_plus(u);
                re.add(l.re);
                im.add(l.im);
            }
        }
        let mut out = Complex64::new(re.value(), im.value());
        if self.mode == TailMode::Compensated {
            out -= z * z * self.tail.inv_sq;
        }
        out
    }

    pub fn eval(&self, z: Complex64) -> Result<ProductValue, ProductError> {
        let modulus = z.norm();
        if modulus > self.r_max {
            return Err(ProductError::RadiusExceeded {
                modulus,
                r_max: self.r_max,
            });
        }
        if z == Complex64::new(0.0, 0.0) {
            return Ok(ProductValue {
                value: Complex64::new(1.0, 0.0),
                log_value: Complex64::new(0.0, 0.0),
                log_abs_err_bound: 0.0,
                certified: true,
            });
        }
        let log_value = self.log_eval_unchecked(z);
        let value = if log_value.re == f64::NEG_INFINITY {
            Complex64::new(0.0, 0.0)
        } else {
            log_value.exp()
        };
        Ok(ProductValue {
            value,
            log_value,
            log_abs_err_bound: self.error_bound(modulus),
            certified: self.tail.certified,
        })
    }

    /// `Φ(w) = ∏(1 − w/γ_n²)`, so that `Π(z) = Φ(z²)`.
    pub fn eval_intermediate(&self, w: Complex64) -> Complex64 {
        let mut re = NeumaierSum::default();
        let mut im = NeumaierSum::default();
        for &g in self.active() {
            let l = log_one_plus(-w / (g * g));
            re.add(l.re);
            im.add(l.im);
        }
        let mut out = Complex64::new(re.value(), im.value());
        if self.mode == TailMode::Compensated {
            out -= w * self.tail.inv_sq;
        }
        out.exp()
    }

    /// `Π′(t) = (−2/t) ∏_{n≠k}(1 − t²/γ_n²)` at a zero `t = ±γ_k`.
    pub fn derivative_at_node(&self, t: f64) -> Result<NodeDerivative, ProductError> {
        let at = t.abs();
        let k = self
            .active()
            .iter()
            .position(|g| (g - at).abs() <= 1e-12 * g)
            .ok_or(ProductError::NotAZero { t })?;
        let gk = self.active()[k];
        let mut log_abs = NeumaierSum::default();
        let mut negatives = 0usize;
        for (n, &g) in self.active().iter().enumerate() {
            if n == k {
                continue;
            }
            // (1 − t/γ)(1 + t/γ), formed from differences to keep precision
            let f = (g - gk) * (g + gk) / (g * g);
            if f < 0.0 {
                negatives += 1;
            }
            log_abs.add(f.abs().ln());
        }
        log_abs.add((2.0 / gk).ln());
        if self.mode == TailMode::Compensated {
            log_abs.add(-gk * gk * self.tail.inv_sq);
        }
        let mut sign = if negatives.is_multiple_of(2) {
            -1.0
        } else {
            1.0
        };
        if t < 0.0 {
            sign = -sign;
        }
        let log_abs = log_abs.value();
        let log_abs_err_bound = if at <= self.r_max {
            self.error_bound(at)
        } else {
            f64::INFINITY
        };
        Ok(NodeDerivative {
            value: sign * log_abs.exp(),
            log_abs,
            sign,
            log_abs_err_bound,
        })
    }
}

/// `log(1 + u)` accurate both for small `|u|` and near `u = −1`.
fn log_one_plus(u: Complex64) -> Complex64 {
    if u.norm_sqr() < 0.25 {
        ln_1p(u)
    } else {
        (Complex64::new(1.0, 0.0) + u).ln()
    }
}

pub fn product_eval(model: &ProductModel, z: Complex64) -> Result<ProductValue, ProductError> {
    model.eval(z)
}

/// Main term `Δπr|sin θ|` of `log|Π(re^{iθ})|`.
pub fn product_log_asymptote(delta: f64, r: f64, theta: f64) -> f64 {
    delta * PI * r * theta.sin().abs()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub theta: f64,
    pub delta: f64,
    /// Coefficient of `r` in `log|Π| ≈ s·r + c + d·ln r`.
    pub slope: f64,
    /// Coefficient of `ln r`.
    pub log_coefficient: f64,
    /// Plain two-parameter least-squares slope, for reference.
    pub plain_slope: f64,
    pub target: f64,
    pub rel_dev: f64,
}

/// Growth rate of `log|Π(re^{iθ})|` along a ray.
///
/// The fit carries a `ln r` regressor to absorb the algebraic prefactor
/// (`−ln(2πΔr)` for arithmetic zeros), which otherwise biases the slope at
/// moderate `r`.
pub fn asymptotic_slope_fit(
    model: &ProductModel,
    theta: f64,
    r_grid: &[f64],
) -> Result<SlopeFit, ProductError> {
    let reduced = theta.rem_euclid(PI);
    if reduced.min(PI - reduced) < THETA_MIN {
        return Err(ProductError::ThetaTooClose { theta });
    }
    if r_grid.len() < 4 {
        return Err(ProductError::GridTooSmall {
            need: 4,
            have: r_grid.len(),
        });
    }
    let dir = Complex64::from_polar(1.0, theta);
    let mut y = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        y.push(model.eval(dir * r)?.log_value.re);
    }
    let ones = vec![1.0; r_grid.len()];
    let logs: Vec<f64> = r_grid.iter().map(|r| r.ln()).collect();
    let c = lstsq(&[r_grid.to_vec(), ones, logs], &y).ok_or(ProductError::DegenerateFit)?;
    let (plain_slope, _) = linear_fit(r_grid, &y).ok_or(ProductError::DegenerateFit)?;
    let delta = model.zeros().density();
    let target = delta * PI * theta.sin().abs();
    Ok(SlopeFit {
        theta,
        delta,
        slope: c[0],
        log_coefficient: c[2],
        plain_slope,
        target,
        rel_dev: (c[0] - target).abs() / target,
    })
}

/// Number of zeros in `[x − t, x + t]`.
pub fn zero_count_in_disk(gamma: &ZeroSet, x: f64, t: f64) -> usize {
    gamma.count_in(x - t, x + t)
}
