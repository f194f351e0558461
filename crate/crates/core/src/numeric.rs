//! Small numerical helpers shared by the experiment modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// `n` evenly spaced points on `[a, b]`, endpoints included.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let step = (b - a) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { b } else { a + step * i as f64 })
                .collect()
        }
    }
}

/// Least-squares coefficients for `y ≈ Σ_j c_j · columns[j]`.
///
/// Returns `None` when the system is empty or numerically rank deficient.
pub fn lstsq(columns: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let rows = y.len();
    let cols = columns.len();
    if rows == 0 || cols == 0 || rows < cols || columns.iter().any(|c| c.len() != rows) {
        return None;
    }
    let a = DMatrix::from_fn(rows, cols, |i, j| columns[j][i]);
    let b = DVector::from_column_slice(y);
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smax > 0.0) || smin <= smax * 1e-13 {
        return None;
    }
    let x = svd.solve(&b, 0.0).ok()?;
    Some(x.iter().copied().collect())
}

/// Ordinary least-squares line `y ≈ slope·x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let ones = vec![1.0; x.len()];
    let c = lstsq(&[x.to_vec(), ones], y)?;
    Some((c[0], c[1]))
}

/// Spearman rank correlation (average ranks for ties).
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let rx = ranks(x);
    let ry = ranks(y);
    pearson(&rx, &ry)
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            out[idx[k]] = avg;
        }
        i = j + 1;
    }
    out
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Median of the finite entries; `None` if there are none.
pub fn median(values: &[f64]) -> Option<f64> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

/// Compensated (Neumaier) summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        if !x.is_finite() || !self.sum.is_finite() {
            self.sum += x;
            return;
        }
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Principal `ln(1 + u)` for complex `u`, accurate when `|u|` is small.
pub fn ln_1p(u: Complex64) -> Complex64 {
    let re = 0.5 * (2.0 * u.re + u.norm_sqr()).ln_1p();
    let im = u.im.atan2(1.0 + u.re);
    Complex64::new(re, im)
}

// Bernoulli numbers B_2, B_4, ..., B_12.
const BERNOULLI_EVEN: [f64; 6] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
];

/// `Σ_{k > n} k^{-s}` for integer `s ≥ 2`, via direct summation up to a
/// cutoff followed by an Euler–Maclaurin tail.
pub fn zeta_tail(s: u32, n: usize) -> f64 {
    assert!(s >= 2, "zeta_tail needs s >= 2");
    const CUTOFF: usize = 32;
    let sf = s as f64;
    let mut acc = NeumaierSum::default();
    let mut start = n;
    while start < CUTOFF {
        start += 1;
        acc.add((start as f64).powf(-sf));
    }
    // Σ_{k>N} f(k) = ∫_N^∞ f − f(N)/2 − Σ_j B_{2j}/(2j)! f^{(2j−1)}(N)
    let big_n = start as f64;
    acc.add(big_n.powf(1.0 - sf) / (sf - 1.0));
    acc.add(-0.5 * big_n.powf(-sf));
    let mut factorial = 1.0;
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let order = 2 * j + 1; // derivative order 2j−1 with j starting at 1
        factorial *= ((2 * j + 1) * (2 * j + 2)) as f64;
        // f^{(k)}(x) = (−1)^k s(s+1)…(s+k−1) x^{−s−k}
        let mut rising = 1.0;
        for i in 0..order {
            rising *= sf + i as f64;
        }
        let deriv = -rising * big_n.powf(-sf - order as f64);
        acc.add(-b / factorial * deriv);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn linspace_endpoints() {
        let v = linspace(-1.0, 1.0, 5);
        assert_eq!(v, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }

    #[test]
    fn zeta_tail_matches_closed_forms() {
        assert!((zeta_tail(2, 0) - PI * PI / 6.0).abs() < 1e-15);
        assert!((zeta_tail(4, 0) - PI.powi(4) / 90.0).abs() < 1e-15);
        // brute-force partial sums
        let n = 40;
        let brute: f64 = (n + 1..2_000_000).map(|k| (k as f64).powi(-4)).sum();
        assert!((zeta_tail(4, n) - brute).abs() / brute < 1e-9);
        let big = 10_000usize;
        let approx = 1.0 / big as f64 - 0.5 / (big * big) as f64;
        assert!((zeta_tail(2, big) - approx).abs() < 1e-12);
    }

    #[test]
    fn linear_fit_exact_line() {
        let x = linspace(0.0, 10.0, 11);
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 2.0).collect();
        let (s, c) = linear_fit(&x, &y).unwrap();
        assert!((s - 3.0).abs() < 1e-12 && (c + 2.0).abs() < 1e-12);
        assert!(linear_fit(&[1.0, 1.0], &[0.0, 1.0]).is_none());
    }

    #[test]
    fn spearman_monotone_and_ties() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert!((spearman(&x, &[10.0, 5.0, 1.0, 0.5]).unwrap() + 1.0).abs() < 1e-15);
        assert!((spearman(&x, &[1.0, 1.0, 2.0, 3.0]).unwrap() - 0.9486832980505138).abs() < 1e-12);
    }

    #[test]
    fn ln_1p_small_argument() {
        let u = Complex64::new(1e-12, -3e-13);
        let l = ln_1p(u);
        assert!((l.re - 1e-12).abs() < 1e-24);
        assert!((l.im + 3e-13).abs() < 1e-24);
        let w = Complex64::new(0.3, 0.7);
        assert!((ln_1p(w) - (Complex64::new(1.0, 0.0) + w).ln()).norm() < 1e-15);
    }
}
