use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{EntireFunction, ProductError};
use crate::numeric::median;
use crate::pairs::check_conjugate;

/// Rays whose samples were partly or wholly non-finite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RayDiagnostic {
    pub theta: f64,
    pub nonfinite: usize,
    pub sampled: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndicatorReport {
    pub rho: f64,
    pub theta_grid: Vec<f64>,
    pub h_estimates: Vec<f64>,
    pub fit_residuals: Vec<f64>,
    pub h_zero: f64,
    pub h_pi: f64,
    /// `(2π)^{-1} min{−h(0), −h(π)}`
    pub kappa: f64,
    pub diagnostics: Vec<RayDiagnostic>,
}

struct RayEstimate {
    h: f64,
    residual: f64,
    nonfinite: usize,
    sampled: usize,
}

fn estimate_ray<F: EntireFunction + ?Sized>(
    f: &F,
    rho: f64,
    theta: f64,
    top: &[f64],
) -> RayEstimate {
    let dir = Complex64::from_polar(1.0, theta);
    let vals: Vec<f64> = top
        .iter()
        .map(|&r| f.log_abs(dir * r) / r.powf(rho))
        .collect();
    let finite: Vec<f64> = vals.iter().copied().filter(|v| v.is_finite()).collect();
    let nonfinite = vals.len() - finite.len();
    match median(&finite) {
        Some(h) => RayEstimate {
            h,
            residual: finite.iter().map(|v| (v - h).abs()).fold(0.0, f64::max),
            nonfinite,
            sampled: vals.len(),
        },
        None => RayEstimate {
            h: f64::NAN,
            residual: f64::NAN,
            nonfinite,
            sampled: vals.len(),
        },
    }
}

/// Indicator `h_f(θ)` estimated by the median of `log|f(re^{iθ})|/r^ρ`
/// over the top quartile of the radius grid.
///
/// `h(0)` and `h(π)` are always evaluated for `κ`, whether or not the
/// supplied grid contains them.
pub fn indicator_estimate<F: EntireFunction + ?Sized>(
    f: &F,
    rho: f64,
    theta_grid: &[f64],
    r_grid: &[f64],
) -> Result<IndicatorReport, ProductError> {
    if !(rho > 0.0) {
        return Err(ProductError::InvalidOrder(rho));
    }
    if theta_grid.is_empty() {
        return Err(ProductError::GridTooSmall { need: 1, have: 0 });
    }
    let mut radii: Vec<f64> = r_grid.iter().copied().filter(|r| *r > 0.0).collect();
    if radii.is_empty() {
        return Err(ProductError::GridTooSmall { need: 1, have: 0 });
    }
    radii.sort_by(f64::total_cmp);
    let keep = radii.len().div_ceil(4);
    let top = &radii[radii.len() - keep..];

    let mut h_estimates = Vec::with_capacity(theta_grid.len());
    let mut fit_residuals = Vec::with_capacity(theta_grid.len());
    let mut diagnostics = Vec::new();
    for &theta in theta_grid {
        let e = estimate_ray(f, rho, theta, top);
        if e.nonfinite > 0 {
            diagnostics.push(RayDiagnostic {
                theta,
                nonfinite: e.nonfinite,
                sampled: e.sampled,
            });
        }
        h_estimates.push(e.h);
        fit_residuals.push(e.residual);
    }
    let h_zero = estimate_ray(f, rho, 0.0, top).h;
    let h_pi = estimate_ray(f, rho, PI, top).h;
    let kappa = (-h_zero).min(-h_pi) / (2.0 * PI);
    Ok(IndicatorReport {
        rho,
        theta_grid: theta_grid.to_vec(),
        h_estimates,
        fit_residuals,
        h_zero,
        h_pi,
        kappa,
        diagnostics,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KappaMargin {
    pub theta: f64,
    /// `2π|sin θ|^p / (p(qκ̂)^{p/q})`
    pub bound: f64,
    pub h: f64,
    pub margin: f64,
}

pub fn kappa_estimate_bound_check(
    report: &IndicatorReport,
    p: f64,
    q: f64,
    kappa_hat: f64,
) -> Result<Vec<KappaMargin>, ProductError> {
    check_conjugate(p, q).map_err(|_| ProductError::InvalidParameter {
        name: "q",
        value: q,
    })?;
    if !(kappa_hat > 0.0) {
        return Err(ProductError::InvalidParameter {
            name: "kappa_hat",
            value: kappa_hat,
        });
    }
    let denom = p * (q * kappa_hat).powf(p / q);
    Ok(report
        .theta_grid
        .iter()
        .zip(&report.h_estimates)
        .map(|(&theta, &h)| {
            let bound = 2.0 * PI * theta.sin().abs().powf(p) / denom;
            KappaMargin {
                theta,
                bound,
                h,
                margin: bound - h,
            }
        })
        .collect())
}
