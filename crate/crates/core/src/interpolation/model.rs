use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{InterpolationError, UniformSelection};
use crate::numeric::{linear_fit, NeumaierSum};
use crate::products::{ProductModel, TailMode, ZeroSet};

/// Distance below which a term switches to the shifted-product form.
pub const NODE_SNAP: f64 = 1e-8;

/// Minimum truncation per side for standalone shifted products.
/// Tail-bound level defining the fit radius.
pub const FIT_TAIL_TOL: f64 = 0.05;

pub const MIN_SHIFTED_TERMS: usize = 1000;

/// Weighted cardinal series
/// `g(z) = Σ_k ((1+z)/(1+t_k))^K · Π(z)/(Π′(t_k)(z − t_k)) · η_k`
/// over the first `n_terms` selected nodes, with `Π` the product over all
/// selected nodes `±T′`.
///
/// `Π` carries the tail compensation `exp(−z²σ₂)`, `σ₂ = Σ_{n>N} t_n^{-2}`
/// extrapolated at the observed density, and the shifted products carry
/// the matching factor, so the cardinal identity stays exact.
#[derive(Clone, Debug)]
pub struct InterpolantModel {
    selection: UniformSelection,
    eta: Vec<Complex64>,
    k: u32,
    n_terms: usize,
    product: ProductModel,
    /// `(log|Π′(t_k)|, sign Π′(t_k))`
    d_pi: Vec<(f64, f64)>,
    k0_fit: f64,
    c_fit: f64,
    n0_fit: f64,
    sigma2: f64,
    fit_radius: f64,
}

/// Serializable summary of an interpolant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpolantRecord {
    pub selection: UniformSelection,
    #[serde(rename = "K")]
    pub k: u32,
    pub n_terms: usize,
    pub nodes: Vec<f64>,
    pub eta: Vec<Complex64>,
    pub k0_fit: f64,
    pub n0_fit: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeFit {
    #[serde(rename = "K0_fit")]
    pub k0_fit: f64,
    #[serde(rename = "C_fit")]
    pub c_fit: f64,
    pub violations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterpolantValue {
    pub value: Complex64,
    /// Magnitude of the last block of `m_per_interval` terms.
    pub tail_diagnostic: f64,
}

/// Lower hull of points sorted by `x`.
fn lower_hull(pts: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for &p in pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// Line `y ≥ s·x + c` below every point: least squares on the lower hull,
/// then the intercept lowered until no point lies beneath.
pub fn lower_envelope_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| a.is_finite() && b.is_finite())
        .map(|(a, b)| (*a, *b))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup_by(|b, a| a.0 == b.0);
    if pts.len() < 2 {
        return None;
    }
    let hull = lower_hull(&pts);
    let (hx, hy): (Vec<f64>, Vec<f64>) = hull.into_iter().unzip();
    let (s, _) = linear_fit(&hx, &hy)?;
    let c = x
        .iter()
        .zip(y)
        .filter(|(a, b)| a.is_finite() && b.is_finite())
        .map(|(a, b)| b - s * a)
        .fold(f64::INFINITY, f64::min);
    Some((s, c))
}

/// Mirror of [`lower_envelope_fit`] from above.
pub fn upper_envelope_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let neg: Vec<f64> = y.iter().map(|v| -v).collect();
    lower_envelope_fit(x, &neg).map(|(s, c)| (-s, -c))
}

impl InterpolantModel {
    /// Builds the interpolant. `k = None` selects
    /// `ceil(max(K₀, N₀)) + 3` from the fitted exponents.
    pub fn build(
        selection: UniformSelection,
        eta: Vec<Complex64>,
        k: Option<u32>,
        n_terms: usize,
    ) -> Result<Self, InterpolationError> {
        let nodes = &selection.t_prime;
        if n_terms < 2 || n_terms > nodes.len() {
            return Err(InterpolationError::TooFewTerms {
                n_terms,
                available: nodes.len(),
            });
        }
        if eta.len() < n_terms {
            return Err(InterpolationError::DataLength {
                expected: n_terms,
                got: eta.len(),
            });
        }
        if eta.iter().any(|e| !e.re.is_finite() || !e.im.is_finite()) {
            return Err(InterpolationError::InvalidParameter {
                name: "eta",
                value: f64::NAN,
            });
        }
        let zeros = ZeroSet::new(nodes.clone(), None)?;
        let product = ProductModel::new(zeros, nodes.len(), TailMode::Compensated)?;
        let sigma2 = product.tail().inv_sq;
        let d_pi: Vec<(f64, f64)> = nodes[..n_terms]
            .par_iter()
            .map(|&t| product.derivative_at_node(t).map(|d| (d.log_abs, d.sign)))
            .collect::<Result<_, _>>()?;
        if d_pi.iter().any(|(l, _)| !l.is_finite()) {
            return Err(InterpolationError::DegenerateFit);
        }

        let fit_radius = (FIT_TAIL_TOL / product.tail().inv_quartic)
            .powf(0.25)
            .min(nodes[n_terms - 1]);
        let n_fit = nodes[..n_terms].partition_point(|t| *t <= fit_radius);
        if n_fit < 2 {
            return Err(InterpolationError::DegenerateFit);
        }
        let xs: Vec<f64> = nodes[..n_fit].iter().map(|t| t.ln_1p()).collect();
        let ys: Vec<f64> = d_pi[..n_fit].iter().map(|d| d.0).collect();
        let (s, c) = lower_envelope_fit(&xs, &ys).ok_or(InterpolationError::DegenerateFit)?;
        let k0_fit = -s;
        let c_fit = c.exp();
        let n0_fit = fit_shift_growth(nodes, n_fit, fit_radius, sigma2);

        let required = k0_fit.max(n0_fit) + 2.0;
        let k = match k {
            Some(k) if (k as f64) > required => k,
            Some(k) => return Err(InterpolationError::KTooSmall { k, required }),
            None => (k0_fit.max(n0_fit).ceil().max(0.0) as u32) + 3,
        };
        Ok(Self {
            selection,
            eta,
            k,
            n_terms,
            product,
            d_pi,
            k0_fit,
            c_fit,
            n0_fit,
            sigma2,
            fit_radius,
        })
    }

    /// Same nodes, product and exponents with new data.
    pub fn with_data(&self, eta: Vec<Complex64>) -> Result<Self, InterpolationError> {
        if eta.len() < self.n_terms {
            return Err(InterpolationError::DataLength {
                expected: self.n_terms,
                got: eta.len(),
            });
        }
        if eta.iter().any(|e| !e.re.is_finite() || !e.im.is_finite()) {
            return Err(InterpolationError::InvalidParameter {
                name: "eta",
                value: f64::NAN,
            });
        }
        Ok(Self {
            eta,
            ..self.clone()
        })
    }

    /// Radius inside which `K₀` and `N₀` are fitted: the tail bound
    /// `|z|⁴σ₄` stays below 0.05 there.
    pub fn fit_radius(&self) -> f64 {
        self.fit_radius
    }

    /// Extrapolated `Σ_{n>N} t_n^{-2}` used for tail compensation.
    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn selection(&self) -> &UniformSelection {
        &self.selection
    }

    pub fn nodes(&self) -> &[f64] {
        &self.selection.t_prime[..self.n_terms]
    }

    pub fn eta(&self) -> &[Complex64] {
        &self.eta[..self.n_terms]
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    pub fn product(&self) -> &ProductModel {
        &self.product
    }

    pub fn k0_fit(&self) -> f64 {
        self.k0_fit
    }

    pub fn n0_fit(&self) -> f64 {
        self.n0_fit
    }

    /// `Π′(t_k)` for the `k`-th series node.
    pub fn d_pi(&self, k: usize) -> f64 {
        let (l, s) = self.d_pi[k];
        s * l.exp()
    }

    pub fn derivative_fit(&self) -> DerivativeFit {
        let violations = self
            .nodes()
            .iter()
            .zip(&self.d_pi)
            .filter(|(t, d)| d.0 < self.c_fit.ln() - self.k0_fit * t.ln_1p() - 1e-12)
            .count();
        DerivativeFit {
            k0_fit: self.k0_fit,
            c_fit: self.c_fit,
            violations,
        }
    }

    /// Exponent `n = max(N₀ + 1, K + N₀)` of the real-line bound.
    pub fn real_exponent(&self) -> f64 {
        (self.n0_fit + 1.0).max(self.k as f64 + self.n0_fit)
    }

    /// Relative size of the last block in `Σ_k (1+t_k)^{K₀−K}`.
    pub fn series_tail_ratio(&self) -> f64 {
        let e = self.k0_fit - self.k as f64;
        let terms: Vec<f64> = self.nodes().iter().map(|t| (1.0 + t).powf(e)).collect();
        let total: f64 = terms.iter().sum();
        let m = self.selection.m_per_interval.min(terms.len());
        terms[terms.len() - m..].iter().sum::<f64>() / total
    }

    pub fn to_record(&self) -> InterpolantRecord {
        InterpolantRecord {
            selection: self.selection.clone(),
            k: self.k,
            n_terms: self.n_terms,
            nodes: self.nodes().to_vec(),
            eta: self.eta().to_vec(),
            k0_fit: self.k0_fit,
            n0_fit: self.n0_fit,
        }
    }

    /// Weight `((1+z)/(1+t_k))^K / Π′(t_k)` in log form plus sign.
    fn log_weight(&self, k: usize, log_one_plus_z: Complex64) -> (Complex64, f64) {
        let t = self.selection.t_prime[k];
        let (lp, sign) = self.d_pi[k];
        let kf = self.k as f64;
        (kf * (log_one_plus_z - t.ln_1p()) - lp, sign)
    }

    /// `S(z) = Σ_k ((1+z)/(1+t_k))^K η_k / (Π′(t_k)(z − t_k))`, so that
    /// `g = Π·S` away from the nodes. Also returns the last-block size.
    fn cardinal_sum(&self, z: Complex64, skip: Option<usize>) -> (Complex64, f64) {
        let lz = (Complex64::new(1.0, 0.0) + z).ln();
        let mut re = NeumaierSum::default();
        let mut im = NeumaierSum::default();
        let m = self.selection.m_per_interval;
        let block_start = self.n_terms - m.min(self.n_terms);
        let mut last_block = Complex64::new(0.0, 0.0);
        for k in 0..self.n_terms {
            if Some(k) == skip || self.eta[k] == Complex64::new(0.0, 0.0) {
                continue;
            }
            let (lw, sign) = self.log_weight(k, lz);
            let term = sign * lw.exp() * self.eta[k] / (z - self.selection.t_prime[k]);
            re.add(term.re);
            im.add(term.im);
            if k >= block_start {
                last_block += term;
            }
        }
        (Complex64::new(re.value(), im.value()), last_block.norm())
    }

    pub fn eval(&self, z: Complex64) -> InterpolantValue {
        let nodes = self.nodes();
        let i = nodes.partition_point(|t| *t < z.re);
        let near = [i.wrapping_sub(1), i]
            .into_iter()
            .filter(|&j| j < nodes.len())
            .find(|&j| (z - nodes[j]).norm() <= NODE_SNAP);
        let log_pi = self.product.log_eval_unchecked(z);
        let (sum, tail) = self.cardinal_sum(z, near);
        let pi = if log_pi.re == f64::NEG_INFINITY {
            Complex64::new(0.0, 0.0)
        } else {
            log_pi.exp()
        };
        let mut value = pi * sum;
        let mut tail_diagnostic = (pi.norm() * tail).min(f64::MAX);
        if let Some(k) = near {
            let lz = (Complex64::new(1.0, 0.0) + z).ln();
            let t = nodes[k];
            let kf = self.k as f64;
            let w = (kf * (lz - t.ln_1p())).exp();
            let b = shifted_product_log(&self.selection.t_prime, k, z - t, self.sigma2).exp();
            let term = w * b * self.eta[k];
            value += term;
            if k + self.selection.m_per_interval >= self.n_terms {
                tail_diagnostic += term.norm();
            }
        }
        if !tail_diagnostic.is_finite() {
            tail_diagnostic = f64::MAX;
        }
        InterpolantValue {
            value,
            tail_diagnostic,
        }
    }

    /// `|g(z)| δ / ((1+|z|)^K |Π(z)|)` with `δ` the distance to `±T′`.
    pub fn sector_ratio(&self, z: Complex64) -> f64 {
        let (sum, _) = self.cardinal_sum(z, None);
        let delta = self.distance_to_zeros(z);
        sum.norm() * delta / (1.0 + z.norm()).powi(self.k as i32)
    }

    pub fn distance_to_zeros(&self, z: Complex64) -> f64 {
        let g = &self.selection.t_prime;
        let x = z.re.abs();
        let i = g.partition_point(|t| *t < x);
        [i.wrapping_sub(1), i]
            .into_iter()
            .filter(|&j| j < g.len())
            .map(|j| Complex64::new(x - g[j], z.im).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// `log B_{t_k}(w)` with `B_{t′}(w) = ∏_{γ ∈ ±T′, γ ≠ t′}(1 − w/(γ − t′))`,
/// times the tail factor `exp(−(w² + 2wt′)σ₂)`.
pub(crate) fn shifted_product_log(nodes: &[f64], k: usize, w: Complex64, sigma2: f64) -> Complex64 {
    let t = nodes[k];
    let mut re = NeumaierSum::default();
    let mut im = NeumaierSum::default();
    let mut add = |d: f64| {
        let l = (Complex64::new(1.0, 0.0) - w / d).ln();
        re.add(l.re);
        im.add(l.im);
    };
    for (j, &g) in nodes.iter().enumerate() {
        if j != k {
            add(g - t);
        }
        add(-g - t);
    }
    Complex64::new(re.value(), im.value()) - (w * w + 2.0 * w * t) * sigma2
}

/// Real-axis growth exponent `N₀` of the shifted products, from the upper
/// envelope of `log|B_{t′}|` at midpoints between consecutive zeros.
fn fit_shift_growth(nodes: &[f64], n_fit: usize, radius: f64, sigma2: f64) -> f64 {
    let reach = 0.5 * nodes[n_fit - 1];
    let picks: Vec<usize> = (0..5).map(|i| i * (n_fit - 1) / 4).collect();
    let mut zeros: Vec<f64> = nodes.iter().flat_map(|g| [*g, -*g]).collect();
    zeros.sort_by(f64::total_cmp);
    picks
        .par_iter()
        .map(|&k| {
            let t = nodes[k];
            let (xs, ys): (Vec<f64>, Vec<f64>) = zeros
                .windows(2)
                .map(|w| 0.5 * (w[0] + w[1]) - t)
                .filter(|w| w.abs() <= reach && (w + t).abs() <= radius)
                .map(|w| {
                    let b = shifted_product_log(nodes, k, Complex64::new(w, 0.0), sigma2).re;
                    (w.abs().ln_1p(), b)
                })
                .unzip();
            upper_envelope_fit(&xs, &ys).map_or(0.0, |(s, _)| s.max(0.0))
        })
        .reduce(|| 0.0, f64::max)
}
