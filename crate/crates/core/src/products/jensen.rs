use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{EntireFunction, ProductError, ZeroSet};
use crate::numeric::{linear_fit, linspace};

/// Hypothesis parameters for the decay check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JensenSetup {
    /// Exponential type bound `|F(z)| ≤ C_F e^{aπ|Im z|}` on the sector.
    pub a: f64,
    /// Excess zero density: `|Γ ∩ [u, v]| ≥ a(1+δ)(v−u) − C_Γ`.
    pub delta: f64,
    /// Half-opening of the sector `|arg z| < φ`.
    pub phi: f64,
    pub c_gamma: f64,
    pub c_f: f64,
    /// Slack allowed between the fitted rate and the bound.
    pub fit_tol: f64,
}

impl JensenSetup {
    pub fn new(a: f64, delta: f64, phi: f64) -> Self {
        Self {
            a,
            delta,
            phi,
            c_gamma: 2.0,
            c_f: 2.0,
            fit_tol: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JensenReport {
    pub empirical_rate: f64,
    /// `−2aδ sin φ`
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
    /// Smallest `count − (a(1+δ)(v−u) − C_Γ)` over sampled windows.
    pub counting_slack: f64,
    /// Largest `log|F(z)| − aπ|Im z|` over the sector grid.
    pub growth_excess: f64,
    pub points_used: usize,
}

/// Fits the real-axis decay rate of `log|F(x)|` and compares it to
/// `−2aδ sin φ`, after spot-checking both hypotheses.
pub fn jensen_decay_check<F: EntireFunction + ?Sized>(
    f: &F,
    gamma: &ZeroSet,
    setup: JensenSetup,
    x_grid: &[f64],
) -> Result<JensenReport, ProductError> {
    let JensenSetup {
        a,
        delta,
        phi,
        c_gamma,
        c_f,
        fit_tol,
    } = setup;
    for (name, value, ok) in [
        ("a", a, a > 0.0),
        ("delta", delta, delta >= 0.0),
        ("phi", phi, phi > 0.0 && phi < PI / 2.0),
        ("c_gamma", c_gamma, c_gamma >= 0.0),
        ("c_f", c_f, c_f > 0.0),
        ("fit_tol", fit_tol, fit_tol >= 0.0),
    ] {
        if !ok {
            return Err(ProductError::InvalidParameter { name, value });
        }
    }
    let mut xs: Vec<f64> = x_grid.iter().copied().filter(|x| *x > 0.0).collect();
    xs.sort_by(f64::total_cmp);
    if xs.len() < 8 {
        return Err(ProductError::GridTooSmall {
            need: 8,
            have: xs.len(),
        });
    }
    let x_lo = xs[0];
    let x_hi = xs[xs.len() - 1];

    // counting hypothesis on windows inside the sampled range
    let g = gamma.gammas();
    let lo = x_lo.max(g[0]);
    let hi = x_hi.min(g[g.len() - 1]);
    if !(hi > lo) {
        return Err(ProductError::HypothesisViolated(format!(
            "zero set does not cover [{x_lo}, {x_hi}]"
        )));
    }
    let mut counting_slack = f64::INFINITY;
    let span = hi - lo;
    for frac in [0.01, 0.05, 0.1, 0.25, 0.5, 1.0] {
        let len = frac * span;
        let starts = linspace(lo, hi - len, 17);
        for u in starts {
            let v = u + len;
            let count = gamma.count_in(u, v) as f64;
            let slack = count - (a * (1.0 + delta) * (v - u) - c_gamma);
            counting_slack = counting_slack.min(slack);
        }
    }
    if counting_slack < 0.0 {
        return Err(ProductError::HypothesisViolated(format!(
            "zero counting falls short by {}",
            -counting_slack
        )));
    }

    // growth hypothesis on a sector grid
    let ln_cf = c_f.ln();
    let mut growth_excess = f64::NEG_INFINITY;
    for r in linspace(x_lo, x_hi, 41) {
        for t in linspace(-phi, phi, 21) {
            let z = Complex64::from_polar(r, t * 0.999);
            let excess = f.log_abs(z) - a * PI * z.im.abs();
            if excess.is_finite() {
                growth_excess = growth_excess.max(excess);
            }
        }
    }
    if growth_excess > ln_cf {
        return Err(ProductError::HypothesisViolated(format!(
            "log|F| exceeds ln C_F + aπ|Im z| by {}",
            growth_excess - ln_cf
        )));
    }

    // real-axis rate on the upper half of the grid, away from zeros
    let cut = 0.5 * (x_lo + x_hi);
    let guard = 0.05 * gamma.mean_gap();
    let (fx, fy): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .filter(|x| **x >= cut && gamma.distance_to_nearest(**x) > guard)
        .map(|&x| (x, f.log_abs(Complex64::new(x, 0.0))))
        .filter(|(_, y)| y.is_finite())
        .unzip();
    let (empirical_rate, _) = linear_fit(&fx, &fy).ok_or(ProductError::DegenerateFit)?;
    let bound = -2.0 * a * delta * phi.sin();
    Ok(JensenReport {
        empirical_rate,
        bound,
        margin: bound - empirical_rate,
        pass: empirical_rate <= bound + fit_tol,
        counting_slack,
        growth_excess,
        points_used: fx.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::products::BuiltinFunction;

    fn grid() -> Vec<f64> {
        linspace(1.0, 60.0, 4001)
    }

    #[test]
    fn sine_decay_family() {
        let cases = [
            (1.0, 1.0, 1.0, PI / 4.0),
            (1.0, 2.0, 1.0, PI / 4.0),
            (2.0, 1.0, 2.0, 0.5f64.atan()),
        ];
        for (b, d, a, phi) in cases {
            let f = BuiltinFunction::SineDecay { b, d };
            let gamma = ZeroSet::arithmetic(0.5 / b, (200.0 * b) as usize).unwrap();
            let rep =
                jensen_decay_check(&f, &gamma, JensenSetup::new(a, 1.0, phi), &grid()).unwrap();
            assert!(rep.pass, "b={b} d={d}");
            assert!((rep.empirical_rate + PI * d).abs() < 0.05 * PI * d);
            assert!(rep.margin >= 0.5);
        }
    }

    #[test]
    fn delta_zero_gives_zero_bound() {
        let f = BuiltinFunction::SineDecay { b: 1.0, d: 0.0 };
        let gamma = ZeroSet::arithmetic(0.5, 200).unwrap();
        let rep =
            jensen_decay_check(&f, &gamma, JensenSetup::new(2.0, 0.0, PI / 4.0), &grid()).unwrap();
        assert_eq!(rep.bound, 0.0);
        assert!(rep.pass);
    }

    #[test]
    fn violated_hypotheses_are_reported() {
        // growth: type 2π b exceeds aπ on the sector when d is small
        let f = BuiltinFunction::SineDecay { b: 2.0, d: 0.1 };
        let gamma = ZeroSet::arithmetic(0.25, 400).unwrap();
        let e = jensen_decay_check(&f, &gamma, JensenSetup::new(1.0, 1.0, PI / 4.0), &grid());
        assert!(matches!(e, Err(ProductError::HypothesisViolated(_))));
        // counting: zeros too sparse for a(1+δ) = 4
        let f = BuiltinFunction::SineDecay { b: 1.0, d: 1.0 };
        let gamma = ZeroSet::arithmetic(0.5, 200).unwrap();
        let e = jensen_decay_check(&f, &gamma, JensenSetup::new(2.0, 1.0, 0.2), &grid());
        assert!(matches!(e, Err(ProductError::HypothesisViolated(_))));
    }
}
