use std::f64::consts::{PI, SQRT_2};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::UniquenessError;
use crate::quadrature::Trapezoid;

/// Largest tolerated `|‖h_n‖₂ − 1|`.
pub const NORM_TOL: f64 = 1e-8;
/// Largest tolerated `‖ĥ_n − (−i)^n h_n‖₂`.
pub const FT_TOL: f64 = 1e-6;

/// Quadrature record for one basis function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HermiteCheck {
    pub n: usize,
    /// `|‖h_n‖₂ − 1|`
    pub norm_error: f64,
    /// `‖ĥ_n − (−i)^n h_n‖₂` with `ĥ` computed by quadrature.
    pub ft_error: f64,
}

/// Hermite functions `h_0, …, h_{size−1}` normalized so that
/// `ĥ_n = (−i)^n h_n` for `f̂(ξ) = ∫ f(x)e^{−2πixξ} dx`.
///
/// `h_n(x) = (2π)^{1/4} ψ_n(√(2π)x)` with `ψ_n` the standard orthonormal
/// Hermite functions; in particular `h_0(x) = 2^{1/4} e^{−πx²}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HermiteBasis {
    size: usize,
    normalization_log: Vec<HermiteCheck>,
}

impl HermiteBasis {
    /// Builds the basis and runs the quadrature checks on `[−8, 8]`.
    pub fn new(size: usize) -> Result<Self, UniquenessError> {
        if size == 0 {
            return Err(UniquenessError::InvalidParameter {
                name: "size",
                value: 0.0,
            });
        }
        let normalization_log = quadrature_checks(size, &Trapezoid::standard());
        if let Some(c) = normalization_log
            .iter()
            .find(|c| !(c.norm_error <= NORM_TOL && c.ft_error <= FT_TOL))
        {
            return Err(UniquenessError::QuadratureCheck {
                n: c.n,
                norm_error: c.norm_error,
                ft_error: c.ft_error,
            });
        }
        Ok(Self {
            size,
            normalization_log,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Highest index `N = size − 1`.
    pub fn degree(&self) -> usize {
        self.size - 1
    }

    pub fn normalization_log(&self) -> &[HermiteCheck] {
        &self.normalization_log
    }

    pub fn eval(&self, n: usize, x: f64) -> Result<f64, UniquenessError> {
        self.check_index(n)?;
        Ok(scaled_values(n, x)[n] * (-PI * x * x).exp())
    }

    /// `h_0(x), …, h_{size−1}(x)`.
    pub fn eval_all(&self, x: f64) -> Vec<f64> {
        let g = (-PI * x * x).exp();
        let mut v = scaled_values(self.size - 1, x);
        v.iter_mut().for_each(|s| *s *= g);
        v
    }

    /// `h_n(x)e^{πx²}` for `n < size`; a polynomial of degree `n`.
    pub fn eval_scaled_all(&self, x: f64) -> Vec<f64> {
        scaled_values(self.size - 1, x)
    }

    /// Coefficients `⟨f, h_n⟩` by quadrature on `[−8, 8]`.
    pub fn project(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let q = Trapezoid::standard();
        let mut c = vec![0.0; self.size];
        for (x, w) in q.nodes.iter().zip(&q.weights) {
            let fx = f(*x) * w;
            for (ci, h) in c.iter_mut().zip(self.eval_all(*x)) {
                *ci += fx * h;
            }
        }
        c
    }

    pub(crate) fn check_index(&self, n: usize) -> Result<(), UniquenessError> {
        if n >= self.size {
            return Err(UniquenessError::IndexOutOfRange { n, size: self.size });
        }
        Ok(())
    }
}

/// `h_n(x)` from a basis.
pub fn hermite_eval(basis: &HermiteBasis, n: usize, x: f64) -> Result<f64, UniquenessError> {
    basis.eval(n, x)
}

/// `s_k(x) = h_k(x)e^{πx²}` for `k ≤ n_max` via the three-term recurrence
/// in `u = √(2π)x`.
pub(crate) fn scaled_values(n_max: usize, x: f64) -> Vec<f64> {
    let u = (2.0 * PI).sqrt() * x;
    let mut s = Vec::with_capacity(n_max + 1);
    s.push(SQRT_2.sqrt());
    if n_max >= 1 {
        s.push(SQRT_2 * u * s[0]);
    }
    for n in 1..n_max {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * u * s[n] - (nf / (nf + 1.0)).sqrt() * s[n - 1];
        s.push(next);
    }
    s
}

/// Norm and eigenrelation errors for `n < size`, using parity to reduce
/// the transform to a cosine or sine integral over `x ≥ 0`.
fn quadrature_checks(size: usize, q: &Trapezoid) -> Vec<HermiteCheck> {
    let n_max = size - 1;
    // nonnegative half of a symmetric rule; the x = 0 weight is halved
    let half: Vec<(f64, f64)> = q
        .nodes
        .iter()
        .zip(&q.weights)
        .filter(|(x, _)| **x >= 0.0)
        .map(|(x, w)| (*x, if *x == 0.0 { 0.5 * w } else { *w }))
        .collect();
    let values: Vec<Vec<f64>> = half
        .iter()
        .map(|(x, _)| {
            let g = (-PI * x * x).exp();
            scaled_values(n_max, *x)
                .into_iter()
                .map(|s| s * g)
                .collect()
        })
        .collect();

    let mut norm_sq = vec![0.0; size];
    for ((_, w), v) in half.iter().zip(&values) {
        for (acc, h) in norm_sq.iter_mut().zip(v) {
            *acc += 2.0 * w * h * h;
        }
    }

    // per ξ ≥ 0: squared eigenrelation residual for every n
    let per_xi: Vec<Vec<f64>> = half
        .par_iter()
        .zip(&values)
        .map(|((xi, wxi), h_xi)| {
            let mut re = vec![0.0; size];
            for ((x, w), v) in half.iter().zip(&values) {
                let (s, c) = (2.0 * PI * x * xi).sin_cos();
                for n in 0..size {
                    re[n] += 2.0 * w * v[n] * if n % 2 == 0 { c } else { s };
                }
            }
            (0..size)
                .map(|n| {
                    // ĥ_n = (−1)^{n/2} h_n (even), −i(−1)^{(n−1)/2} h_n (odd)
                    let sign = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
                    let d = re[n] - sign * h_xi[n];
                    2.0 * wxi * d * d
                })
                .collect()
        })
        .collect();
    // summed in index order so the log does not depend on thread count
    let mut residual_sq = vec![0.0; size];
    for row in &per_xi {
        residual_sq.iter_mut().zip(row).for_each(|(x, y)| *x += y);
    }

    (0..size)
        .map(|n| HermiteCheck {
            n,
            norm_error: (norm_sq[n].sqrt() - 1.0).abs(),
            ft_error: residual_sq[n].sqrt(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Physicists' Hermite polynomials by their own recurrence.
    fn physicists(n: usize, y: f64) -> f64 {
        let (mut a, mut b) = (1.0, 2.0 * y);
        if n == 0 {
            return a;
        }
        for k in 1..n {
            let c = 2.0 * y * b - 2.0 * k as f64 * a;
            a = b;
            b = c;
        }
        b
    }

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    #[test]
    fn closed_form_values() {
        let basis = HermiteBasis::new(21).unwrap();
        assert!((basis.eval(0, 0.0).unwrap() - 2f64.powf(0.25)).abs() < 1e-15);
        assert_eq!(basis.eval(1, 0.0).unwrap(), 0.0);
        for n in [0usize, 1, 2, 5, 12, 20] {
            for x in [-1.3, -0.2, 0.0, 0.4, 0.9, 2.1] {
                let y = (2.0 * PI).sqrt() * x;
                let psi = physicists(n, y) * (-y * y / 2.0).exp()
                    / (2f64.powi(n as i32) * factorial(n) * PI.sqrt()).sqrt();
                let expect = (2.0 * PI).powf(0.25) * psi;
                let got = basis.eval(n, x).unwrap();
                assert!(
                    (got - expect).abs() < 1e-11 * (1.0 + expect.abs()),
                    "n={n} x={x}"
                );
            }
        }
    }

    #[test]
    fn quadrature_log_within_tolerance() {
        let basis = HermiteBasis::new(41).unwrap();
        assert_eq!(basis.normalization_log().len(), 41);
        for c in basis.normalization_log() {
            assert!(c.norm_error < NORM_TOL && c.ft_error < FT_TOL, "{c:?}");
        }
    }

    #[test]
    fn index_out_of_range() {
        let basis = HermiteBasis::new(3).unwrap();
        assert!(matches!(
            hermite_eval(&basis, 3, 0.0),
            Err(UniquenessError::IndexOutOfRange { n: 3, size: 3 })
        ));
    }

    #[test]
    fn projection_recovers_coefficients() {
        let basis = HermiteBasis::new(8).unwrap();
        let c = basis.project(|x| basis.eval(2, x).unwrap() - 0.5 * basis.eval(5, x).unwrap());
        for (n, v) in c.iter().enumerate() {
            let expect = match n {
                2 => 1.0,
                5 => -0.5,
                _ => 0.0,
            };
            assert!((v - expect).abs() < 1e-12, "n={n}");
        }
    }
}
