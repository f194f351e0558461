use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hermite::{scaled_values, HermiteBasis};
use super::operator::{build_sampling_operator, minus_i_pow, smallest_singular_value};
use super::UniquenessError;
use crate::numeric::lstsq;
use crate::pairs::{
    beurling_condition_check, conjugate, density_functional, make_power_lattice, BeurlingReport,
    PairSpec, SampleSequence,
};

/// Fitted exponents at or below this count as bounded.
pub const GROWTH_TOL: f64 = 0.5;
/// Largest `K̃` tried by the transfer experiment.
pub const K_TILDE_MAX: u32 = 50;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub grid: Vec<f64>,
    pub sigma_min: Vec<f64>,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "R")]
    pub r: f64,
    pub rows_lambda: Vec<usize>,
    pub rows_mu: Vec<usize>,
    pub insufficient_rows: Vec<bool>,
}

/// Symmetric power lattice with exponent `p`, density `alpha`, cut to `[−R, R]`.
pub fn lattice_in_radius(p: f64, alpha: f64, r: f64) -> Result<SampleSequence, UniquenessError> {
    let j_max = ((r.powf(p) / (p * alpha)).ceil() as usize + 1).max(2);
    Ok(make_power_lattice(p, alpha, j_max, 0.0)?.truncated(r))
}

/// Smallest `R ≥ √(N/π) + 2` at which the lattices of exponents `p` and
/// `q` with density `alpha_max` each put at least `3N` points in `[−R, R]`.
pub fn scan_radius(p: f64, alpha_max: f64, n: usize) -> Result<f64, UniquenessError> {
    let q = conjugate(p)?;
    let per_side = (3 * n).div_ceil(2).max(1) as f64;
    let r = [p, q]
        .iter()
        .map(|e| (e * alpha_max * per_side).powf(1.0 / e) * (1.0 + 1e-12))
        .fold((n as f64 / PI).sqrt() + 2.0, f64::max);
    Ok(r)
}

/// `σ_min` of the Hermite sampling operator for `Λ = M` power lattices of
/// density `α` (exponents `p` and `q = p/(p−1)`) on `[−R, R]`.
pub fn uniqueness_scan(
    p: f64,
    alpha_grid: &[f64],
    n: usize,
    r: f64,
) -> Result<ScanResult, UniquenessError> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(UniquenessError::InvalidParameter {
            name: "R",
            value: r,
        });
    }
    let q = conjugate(p)?;
    let basis = HermiteBasis::new(n + 1)?;
    let rows: Vec<(f64, usize, usize, bool)> = alpha_grid
        .par_iter()
        .map(|&alpha| {
            let lambda = lattice_in_radius(p, alpha, r)?;
            let mu = lattice_in_radius(q, alpha, r)?;
            let pair = PairSpec::with_exponents(lambda, mu, p, q, 1.0, 1.0, 0.0)?;
            let op = build_sampling_operator(&pair, &basis, r, None)?;
            let s = smallest_singular_value(&op)?;
            Ok((s, op.rows_lambda, op.rows_mu, op.insufficient_rows))
        })
        .collect::<Result<_, UniquenessError>>()?;
    Ok(ScanResult {
        grid: alpha_grid.to_vec(),
        sigma_min: rows.iter().map(|r| r.0).collect(),
        n,
        r,
        rows_lambda: rows.iter().map(|r| r.1).collect(),
        rows_mu: rows.iter().map(|r| r.2).collect(),
        insufficient_rows: rows.iter().map(|r| r.3).collect(),
    })
}

/// Polynomial growth exponent of `exp(log_values)` in `|x|`.
///
/// Regresses on `ln(1+|x|)`, `1`, `1/(1+|x|)`, `x^{−2}` over the outer half
/// `|x| ≥ max|x|/2`; the extra columns absorb the lower-order terms of a
/// polynomial so that degree-`d` growth fits to `d` on short ranges.
pub fn growth_exponent(xs: &[f64], log_values: &[f64]) -> Result<f64, UniquenessError> {
    let x_max = xs
        .iter()
        .zip(log_values)
        .filter(|(_, l)| l.is_finite())
        .map(|(x, _)| x.abs())
        .fold(0.0, f64::max);
    let (ax, ly): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(log_values)
        .filter(|(x, l)| l.is_finite() && x.abs() >= 0.5 * x_max && **x != 0.0)
        .map(|(x, l)| (x.abs(), *l))
        .unzip();
    if ax.len() < 5 {
        return Err(UniquenessError::DegenerateFit { points: ax.len() });
    }
    let cols = vec![
        ax.iter().map(|x| x.ln_1p()).collect(),
        vec![1.0; ax.len()],
        ax.iter().map(|x| 1.0 / (1.0 + x)).collect(),
        ax.iter().map(|x| x.powi(-2)).collect(),
    ];
    lstsq(&cols, &ly)
        .map(|c| c[0])
        .ok_or(UniquenessError::DegenerateFit { points: ax.len() })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardyReport {
    pub fit_exponent: f64,
    pub bounded: bool,
    pub points_used: usize,
}

/// Growth of `|h_m(λ)|(1+|λ|)^{−N}e^{πλ²}` over the lattice.
pub fn hardy_growth_test(
    basis: &HermiteBasis,
    m: usize,
    n: usize,
    lattice: &SampleSequence,
) -> Result<HardyReport, UniquenessError> {
    basis.check_index(m)?;
    let xs = lattice.points();
    let logs: Vec<f64> = xs
        .iter()
        .map(|&x| scaled_values(m, x)[m].abs().ln() - n as f64 * x.abs().ln_1p())
        .collect();
    let fit_exponent = growth_exponent(xs, &logs)?;
    let x_max = xs.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    Ok(HardyReport {
        fit_exponent,
        bounded: fit_exponent <= GROWTH_TOL,
        points_used: xs.iter().filter(|x| x.abs() >= 0.5 * x_max).count(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferWeights {
    pub a: f64,
    pub b: f64,
    pub p: f64,
    pub q: f64,
    #[serde(rename = "K")]
    pub k: f64,
    /// Smallest `K̃ ≤ 50` making both conclusion sups bounded, if any.
    #[serde(rename = "K_tilde")]
    pub k_tilde: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    /// `sup_Λ |f(λ)|(1+|λ|)^{−K}e^{aπ|λ|^p}`
    pub sup_lambda: f64,
    /// `sup_M |f̂(μ)|(1+|μ|)^{−K}e^{bπ|μ|^q}`
    pub sup_mu: f64,
    /// `sup |f(x)|(1+|x|)^{−K̃}e^{aπ|x|^p}` over the real grid.
    pub sup_real: f64,
    /// `sup |f̂(ξ)|(1+|ξ|)^{−K̃}e^{bπ|ξ|^q}` over the frequency grid.
    pub sup_freq: f64,
    pub weights: TransferWeights,
    /// Growth exponents of the conclusion weights at `K̃ = 0`.
    pub exponent_real: f64,
    pub exponent_freq: f64,
    pub condition: BeurlingReport,
}

/// Checks the density condition for `pair`, then measures the weighted
/// sups of `f = Σ c_n h_n` on `Λ`, `M` and on the two conclusion grids.
pub fn decay_transfer_experiment(
    coeffs: &[f64],
    pair: &PairSpec,
    real_grid: &[f64],
    freq_grid: &[f64],
) -> Result<TransferReport, UniquenessError> {
    if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
        return Err(UniquenessError::InvalidParameter {
            name: "coefficients",
            value: coeffs.len() as f64,
        });
    }
    let tail = |s: &SampleSequence| s.points().iter().filter(|x| **x >= 0.0).count() / 2;
    let est_l = density_functional(&pair.lambda, pair.p, tail(&pair.lambda))?;
    let est_m = density_functional(&pair.mu, pair.q, tail(&pair.mu))?;
    let condition = beurling_condition_check(pair, &est_l, &est_m)?;
    if !condition.pass {
        return Err(UniquenessError::ConditionFailed(condition));
    }

    let n_max = coeffs.len() - 1;
    // log|f| and log|f̂| with the Gaussian factor kept in log form
    let log_f = |x: f64| -> f64 {
        let s: f64 = scaled_values(n_max, x)
            .iter()
            .zip(coeffs)
            .map(|(s, c)| s * c)
            .sum();
        s.abs().ln() - PI * x * x
    };
    let log_fhat = |x: f64| -> f64 {
        let s: Complex64 = scaled_values(n_max, x)
            .iter()
            .zip(coeffs)
            .enumerate()
            .map(|(n, (s, c))| minus_i_pow(n) * (s * c))
            .sum();
        s.norm().ln() - PI * x * x
    };
    let weighted =
        |l: f64, x: f64, k: f64, a: f64, p: f64| l - k * x.abs().ln_1p() + a * PI * x.abs().powf(p);
    let sup = |xs: &[f64], f: &dyn Fn(f64) -> f64, k: f64, a: f64, p: f64| {
        xs.iter()
            .map(|&x| weighted(f(x), x, k, a, p))
            .fold(f64::NEG_INFINITY, f64::max)
            .exp()
    };

    let sup_lambda = sup(pair.lambda.points(), &log_f, pair.k, pair.a, pair.p);
    let sup_mu = sup(pair.mu.points(), &log_fhat, pair.k, pair.b, pair.q);

    let base_real: Vec<f64> = real_grid
        .iter()
        .map(|&x| weighted(log_f(x), x, 0.0, pair.a, pair.p))
        .collect();
    let base_freq: Vec<f64> = freq_grid
        .iter()
        .map(|&x| weighted(log_fhat(x), x, 0.0, pair.b, pair.q))
        .collect();
    let exponent_real = growth_exponent(real_grid, &base_real)?;
    let exponent_freq = growth_exponent(freq_grid, &base_freq)?;

    let mut k_tilde = None;
    for kt in 0..=K_TILDE_MAX {
        let shift = |xs: &[f64], base: &[f64]| -> Vec<f64> {
            xs.iter()
                .zip(base)
                .map(|(x, b)| b - kt as f64 * x.abs().ln_1p())
                .collect()
        };
        let er = growth_exponent(real_grid, &shift(real_grid, &base_real))?;
        let ef = growth_exponent(freq_grid, &shift(freq_grid, &base_freq))?;
        if er <= GROWTH_TOL && ef <= GROWTH_TOL {
            k_tilde = Some(kt);
            break;
        }
    }
    let kt = k_tilde.unwrap_or(K_TILDE_MAX) as f64;
    Ok(TransferReport {
        sup_lambda,
        sup_mu,
        sup_real: sup(real_grid, &log_f, kt, pair.a, pair.p),
        sup_freq: sup(freq_grid, &log_fhat, kt, pair.b, pair.q),
        weights: TransferWeights {
            a: pair.a,
            b: pair.b,
            p: pair.p,
            q: pair.q,
            k: pair.k,
            k_tilde,
        },
        exponent_real,
        exponent_freq,
        condition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{linspace, spearman};

    fn supercritical_pair(k: f64) -> PairSpec {
        let l = lattice_in_radius(2.0, 0.4, 8.0).unwrap();
        PairSpec::new(l.clone(), l, 2.0, 1.0, 1.0, k).unwrap()
    }

    fn unit(n: usize) -> Vec<f64> {
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        c
    }

    #[test]
    fn radius_meets_row_count() {
        let r = scan_radius(2.0, 0.7, 40).unwrap();
        let l = lattice_in_radius(2.0, 0.7, r).unwrap();
        assert!(l.len() >= 120);
        assert!(lattice_in_radius(2.0, 0.7, r * 0.99).unwrap().len() < 120);
    }

    #[test]
    fn gaussian_only_column() {
        let res = uniqueness_scan(2.0, &[0.3, 0.5], 0, 3.0).unwrap();
        for (i, s) in res.sigma_min.iter().enumerate() {
            let l = lattice_in_radius(2.0, res.grid[i], 3.0).unwrap();
            let norm: f64 = l
                .points()
                .iter()
                .map(|x| 2.0 * 2f64.sqrt() * (-2.0 * PI * x * x).exp())
                .sum::<f64>()
                .sqrt();
            assert!((s - norm).abs() < 1e-12 * norm);
        }
    }

    #[test]
    fn scan_collapses_past_critical_density() {
        let r = scan_radius(2.0, 0.7, 40).unwrap();
        let grid = linspace(0.3, 0.7, 10);
        let res = uniqueness_scan(2.0, &grid, 40, r).unwrap();
        assert!(res.sigma_min.iter().all(|s| *s >= 0.0));
        assert!(spearman(&grid, &res.sigma_min).unwrap() <= -0.9);
        let pair = uniqueness_scan(2.0, &[0.35, 0.65], 40, r).unwrap();
        assert!(pair.sigma_min[0] / pair.sigma_min[1] >= 1e3);
    }

    #[test]
    fn hardy_verdicts() {
        let basis = HermiteBasis::new(11).unwrap();
        let l = lattice_in_radius(2.0, 0.4, 8.0).unwrap();
        let g = hardy_growth_test(&basis, 0, 0, &l).unwrap();
        assert!(g.bounded && g.fit_exponent.abs() < 1e-8);
        let g = hardy_growth_test(&basis, 3, 0, &l).unwrap();
        assert!(!g.bounded && (g.fit_exponent - 3.0).abs() < 0.1);
        for m in 0..=10 {
            for n in 0..=10 {
                let g = hardy_growth_test(&basis, m, n, &l).unwrap();
                assert_eq!(g.bounded, m <= n, "m={m} N={n} e={}", g.fit_exponent);
            }
        }
    }

    #[test]
    fn transfer_on_hermite_functions() {
        let grid = linspace(-8.0, 8.0, 801);
        let rep =
            decay_transfer_experiment(&unit(0), &supercritical_pair(0.0), &grid, &grid).unwrap();
        assert_eq!(rep.weights.k_tilde, Some(0));
        for s in [rep.sup_lambda, rep.sup_mu, rep.sup_real, rep.sup_freq] {
            assert!((s - 2f64.powf(0.25)).abs() < 1e-12);
        }
        for n in 1..=6 {
            let rep =
                decay_transfer_experiment(&unit(n), &supercritical_pair(n as f64), &grid, &grid)
                    .unwrap();
            assert_eq!(rep.weights.k_tilde, Some(n as u32), "n={n}");
            assert!(rep.sup_lambda.is_finite() && rep.sup_mu.is_finite());
        }
    }

    #[test]
    fn transfer_condition_enforced() {
        let l = lattice_in_radius(2.0, 0.6, 8.0).unwrap();
        let pair = PairSpec::new(l.clone(), l, 2.0, 1.0, 1.0, 0.0).unwrap();
        let grid = linspace(-8.0, 8.0, 101);
        assert!(matches!(
            decay_transfer_experiment(&unit(0), &pair, &grid, &grid),
            Err(UniquenessError::ConditionFailed(_))
        ));
    }

    #[test]
    fn narrower_gaussian_fails_conclusion() {
        // e^{−2πx²} has transform 2^{−1/2}e^{−πξ²/2}, which fails the
        // frequency weight e^{πξ²} for every K̃; the degree-40 expansion is
        // P(x)e^{−πx²}, so its time side also grows once truncation error
        // dominates
        let basis = HermiteBasis::new(41).unwrap();
        let c = basis.project(|x| (-2.0 * PI * x * x).exp());
        let grid = linspace(-4.0, 4.0, 401);
        let rep = decay_transfer_experiment(&c, &supercritical_pair(1.0), &grid, &grid).unwrap();
        assert!(rep.sup_lambda.is_finite() && rep.sup_mu.is_finite());
        assert!(rep.exponent_freq > GROWTH_TOL);
        assert_eq!(rep.weights.k_tilde, None);
        assert!((rep.sup_real - 1.0).abs() < 1e-8);
        assert!((rep.sup_freq - 0.5f64.sqrt()).abs() < 1e-8);
    }
}
