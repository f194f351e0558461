//! Sampling sequences with power-law density and the closed-form algebra
//! used to classify pairs of them.
//!
//! A sequence `(λ_j)` is described by its gap functional
//! `|λ_j|^{p−1}(λ_{j+1} − λ_j)`. A pair `(Λ, M)` with Hölder-conjugate
//! exponents `(p, q)` is supercritical when the tail suprema `ᾱ`, `β̄` of
//! the two functionals satisfy `ᾱ^{1/p} β̄^{1/q} < 1/2`, and subcritical
//! when the tail infima satisfy `α̲^{1/p} β̲^{1/q} > 1/2`.
//!
//! Infinite tails are replaced by a finite surrogate: the extremum over
//! indices `≥ tail_start` of the available data.

use std::f64::consts::PI;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance on `|1/p + 1/q − 1|`.
pub const CONJUGACY_TOL: f64 = 1e-12;

/// Default half-width of the indeterminate band around 1/2.
pub const DEFAULT_VERDICT_MARGIN: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PairError {
    #[error("exponent p must exceed 1 (got {0})")]
    ExponentTooSmall(f64),
    #[error("density parameter must be positive (got {0})")]
    NonPositiveDensity(f64),
    #[error("j_max must be at least 2 (got {0})")]
    TooFewIndices(usize),
    #[error("shift {shift} collapses the lattice: (p·alpha)^(1/p) + shift must stay positive")]
    InvalidShift { shift: f64 },
    #[error("points must be finite and strictly increasing (violation at index {index})")]
    NotIncreasing { index: usize },
    #[error("positive-side sequence contains a negative point at index {index}")]
    NegativePoint { index: usize },
    #[error("{side} side has {have} points, need at least {need} for tail_start = {tail_start}")]
    TooFewPoints {
        side: &'static str,
        have: usize,
        need: usize,
        tail_start: usize,
    },
    #[error("exponents ({p}, {q}) are not Hölder conjugate")]
    NotConjugate { p: f64, q: f64 },
    #[error("parameter {name} must be positive (got {value})")]
    NonPositive { name: &'static str, value: f64 },
    #[error("density estimate computed with p = {estimate} but pair expects {expected}")]
    ExponentMismatch { expected: f64, estimate: f64 },
    #[error("theta = {theta} lies outside (0, π/(2p)) = (0, {upper})")]
    ThetaOutOfRange { theta: f64, upper: f64 },
    #[error("sequence I/O: {0}")]
    Io(String),
}

/// Which half-lines the sequence covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    TwoSided,
    Positive,
}

/// Provenance record for generated sequences.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    PowerLattice {
        p: f64,
        alpha: f64,
        j_max: usize,
        shift: f64,
    },
}

/// An ordered real sampling set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSequence {
    points: Vec<f64>,
    side: Side,
    generator: Option<Generator>,
}

impl SampleSequence {
    pub fn new(points: Vec<f64>, side: Side) -> Result<Self, PairError> {
        for (i, x) in points.iter().enumerate() {
            if !x.is_finite() || (i > 0 && *x <= points[i - 1]) {
                return Err(PairError::NotIncreasing { index: i });
            }
            if side == Side::Positive && *x < 0.0 {
                return Err(PairError::NegativePoint { index: i });
            }
        }
        Ok(Self {
            points,
            side,
            generator: None,
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn generator(&self) -> Option<&Generator> {
        self.generator.as_ref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points with `|x| ≤ radius`; generator metadata is kept.
    pub fn truncated(&self, radius: f64) -> Self {
        Self {
            points: self
                .points
                .iter()
                .copied()
                .filter(|x| x.abs() <= radius)
                .collect(),
            side: self.side,
            generator: self.generator,
        }
    }

    /// Index labels used in CSV output.
    ///
    /// Generated lattices carry `j = ±1, …, ±j_max`; plain sequences count
    /// non-negative points from 0 and negative points from −1 outward.
    pub fn indices(&self) -> Vec<i64> {
        let negatives = self.points.iter().take_while(|x| **x < 0.0).count();
        let first_positive = match self.generator {
            Some(Generator::PowerLattice { .. }) => 1,
            None => 0,
        };
        (0..self.points.len())
            .map(|i| {
                if i < negatives {
                    i as i64 - negatives as i64
                } else {
                    (i - negatives) as i64 + first_positive
                }
            })
            .collect()
    }

    /// Writes `j,lambda_j` rows with a header.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), PairError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let io = |e: csv::Error| PairError::Io(e.to_string());
        w.write_record(["j", "lambda_j"]).map_err(io)?;
        for (j, x) in self.indices().into_iter().zip(&self.points) {
            w.write_record([j.to_string(), format!("{x:?}")])
                .map_err(io)?;
        }
        w.flush().map_err(|e| PairError::Io(e.to_string()))
    }

    /// Reads `j,lambda_j` rows; the side is inferred from the signs.
    pub fn read_csv<R: Read>(input: R) -> Result<Self, PairError> {
        let mut r = csv::Reader::from_reader(input);
        let mut points = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| PairError::Io(e.to_string()))?;
            let x: f64 = rec
                .get(1)
                .ok_or_else(|| PairError::Io("missing lambda_j column".into()))?
                .trim()
                .parse()
                .map_err(|e: std::num::ParseFloatError| PairError::Io(e.to_string()))?;
            points.push(x);
        }
        let side = if points.iter().any(|x| *x < 0.0) {
            Side::TwoSided
        } else {
            Side::Positive
        };
        Self::new(points, side)
    }

    /// Regenerates a sequence from its JSON generator record.
    pub fn from_generator(g: &Generator) -> Result<Self, PairError> {
        match *g {
            Generator::PowerLattice {
                p,
                alpha,
                j_max,
                shift,
            } => make_power_lattice(p, alpha, j_max, shift),
        }
    }
}

/// Hölder conjugate `p/(p−1)`.
pub fn conjugate(p: f64) -> Result<f64, PairError> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(PairError::ExponentTooSmall(p));
    }
    Ok(p / (p - 1.0))
}

pub fn check_conjugate(p: f64, q: f64) -> Result<(), PairError> {
    if !(p > 1.0) || !(q > 1.0) || (1.0 / p + 1.0 / q - 1.0).abs() > CONJUGACY_TOL {
        return Err(PairError::NotConjugate { p, q });
    }
    Ok(())
}

/// A `(Λ, M, p, q)` configuration together with the weight parameters
/// `a`, `b` and polynomial exponent `K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSpec {
    pub lambda: SampleSequence,
    pub mu: SampleSequence,
    pub p: f64,
    pub q: f64,
    pub a: f64,
    pub b: f64,
    pub k: f64,
}

impl PairSpec {
    /// Builds a pair from `p` alone; `q` is recomputed as `p/(p−1)`.
    pub fn new(
        lambda: SampleSequence,
        mu: SampleSequence,
        p: f64,
        a: f64,
        b: f64,
        k: f64,
    ) -> Result<Self, PairError> {
        let q = conjugate(p)?;
        Self::with_exponents(lambda, mu, p, q, a, b, k)
    }

    pub fn with_exponents(
        lambda: SampleSequence,
        mu: SampleSequence,
        p: f64,
        q: f64,
        a: f64,
        b: f64,
        k: f64,
    ) -> Result<Self, PairError> {
        check_conjugate(p, q)?;
        for (name, value) in [("a", a), ("b", b)] {
            if !(value > 0.0) {
                return Err(PairError::NonPositive { name, value });
            }
        }
        if !(k >= 0.0) {
            return Err(PairError::NonPositive {
                name: "K",
                value: k,
            });
        }
        Ok(Self {
            lambda,
            mu,
            p,
            q,
            a,
            b,
            k,
        })
    }
}

/// `λ_j = sign(j)·((p·alpha·|j|)^{1/p} + shift)` for `1 ≤ |j| ≤ j_max`.
///
/// The choice `c = p·alpha` makes `|λ_j|^{p−1}(λ_{j+1} − λ_j) → alpha`.
pub fn make_power_lattice(
    p: f64,
    alpha: f64,
    j_max: usize,
    shift: f64,
) -> Result<SampleSequence, PairError> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(PairError::ExponentTooSmall(p));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(PairError::NonPositiveDensity(alpha));
    }
    if j_max < 2 {
        return Err(PairError::TooFewIndices(j_max));
    }
    let c = p * alpha;
    if !((c).powf(1.0 / p) + shift > 0.0) {
        return Err(PairError::InvalidShift { shift });
    }
    let positive: Vec<f64> = (1..=j_max)
        .map(|j| (c * j as f64).powf(1.0 / p) + shift)
        .collect();
    let mut points: Vec<f64> = positive.iter().rev().map(|x| -x).collect();
    points.extend_from_slice(&positive);
    let mut seq = SampleSequence::new(points, Side::TwoSided)?;
    seq.generator = Some(Generator::PowerLattice {
        p,
        alpha,
        j_max,
        shift,
    });
    Ok(seq)
}

/// Finite-data surrogate for the limsup/liminf of the gap functional.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    /// Exponent the functional was evaluated with.
    pub p: f64,
    /// Tail supremum towards +∞.
    pub alpha_plus: f64,
    /// Tail supremum towards −∞ (absent for positive-side sequences).
    pub alpha_minus: Option<f64>,
    pub liminf_plus: f64,
    pub liminf_minus: Option<f64>,
    pub tail_start: usize,
    /// Number of gaps examined on the shorter side.
    pub window: usize,
}

impl DensityEstimate {
    /// A synthetic estimate with every one-sided value equal to the given
    /// upper and lower values.
    pub fn uniform(p: f64, upper: f64, lower: f64) -> Self {
        Self {
            p,
            alpha_plus: upper,
            alpha_minus: Some(upper),
            liminf_plus: lower,
            liminf_minus: Some(lower),
            tail_start: 0,
            window: 0,
        }
    }

    /// Two-sided limsup surrogate.
    pub fn upper(&self) -> f64 {
        self.alpha_minus
            .map_or(self.alpha_plus, |m| m.max(self.alpha_plus))
    }

    /// Two-sided liminf surrogate.
    pub fn lower(&self) -> f64 {
        self.liminf_minus
            .map_or(self.liminf_plus, |m| m.min(self.liminf_plus))
    }
}

fn side_extrema(terms: &[f64]) -> (f64, f64) {
    terms
        .iter()
        .fold((f64::NEG_INFINITY, f64::INFINITY), |(hi, lo), &t| {
            (hi.max(t), lo.min(t))
        })
}

/// Tail extrema of `|λ_j|^{p−1}(λ_{j+1} − λ_j)` over indices `≥ tail_start`,
/// counted outward from the origin on each side.
pub fn density_functional(
    seq: &SampleSequence,
    p: f64,
    tail_start: usize,
) -> Result<DensityEstimate, PairError> {
    if !(p > 1.0) {
        return Err(PairError::ExponentTooSmall(p));
    }
    let need = tail_start + 2;
    let pos: Vec<f64> = seq.points.iter().copied().filter(|x| *x >= 0.0).collect();
    // |λ| ascending for the negative half-line
    let neg: Vec<f64> = seq
        .points
        .iter()
        .rev()
        .copied()
        .filter(|x| *x < 0.0)
        .map(|x| -x)
        .collect();
    if pos.len() < need {
        return Err(PairError::TooFewPoints {
            side: "positive",
            have: pos.len(),
            need,
            tail_start,
        });
    }
    let plus: Vec<f64> = (tail_start..pos.len() - 1)
        .map(|k| pos[k].powf(p - 1.0) * (pos[k + 1] - pos[k]))
        .collect();
    let (alpha_plus, liminf_plus) = side_extrema(&plus);

    let (alpha_minus, liminf_minus, window) = match seq.side {
        Side::Positive => (None, None, plus.len()),
        Side::TwoSided => {
            if neg.len() < need {
                return Err(PairError::TooFewPoints {
                    side: "negative",
                    have: neg.len(),
                    need,
                    tail_start,
                });
            }
            // λ_j = −neg[k+1], λ_{j+1} = −neg[k]
            let minus: Vec<f64> = (tail_start..neg.len() - 1)
                .map(|k| neg[k + 1].powf(p - 1.0) * (neg[k + 1] - neg[k]))
                .collect();
            let (hi, lo) = side_extrema(&minus);
            (Some(hi), Some(lo), plus.len().min(minus.len()))
        }
    };
    Ok(DensityEstimate {
        p,
        alpha_plus,
        alpha_minus,
        liminf_plus,
        liminf_minus,
        tail_start,
        window,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalityKind {
    Supercritical,
    Subcritical,
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalityVerdict {
    pub kind: CriticalityKind,
    /// `ᾱ^{1/p} β̄^{1/q}`, or `α̲^{1/p} β̲^{1/q}` when subcritical.
    pub product_value: f64,
    /// Half-width of the indeterminate band used for the decision.
    pub margin: f64,
}

/// Classification from the four one-number summaries.
pub fn classify_values(
    p: f64,
    q: f64,
    alpha_upper: f64,
    beta_upper: f64,
    alpha_lower: f64,
    beta_lower: f64,
    margin: f64,
) -> CriticalityVerdict {
    let upper = alpha_upper.powf(1.0 / p) * beta_upper.powf(1.0 / q);
    let lower = alpha_lower.powf(1.0 / p) * beta_lower.powf(1.0 / q);
    let (kind, product_value) = if upper < 0.5 - margin {
        (CriticalityKind::Supercritical, upper)
    } else if lower > 0.5 + margin {
        (CriticalityKind::Subcritical, lower)
    } else {
        (CriticalityKind::Indeterminate, upper)
    };
    CriticalityVerdict {
        kind,
        product_value,
        margin,
    }
}

pub fn classify_pair(
    spec: &PairSpec,
    est_lambda: &DensityEstimate,
    est_mu: &DensityEstimate,
) -> Result<CriticalityVerdict, PairError> {
    classify_pair_with_margin(spec, est_lambda, est_mu, DEFAULT_VERDICT_MARGIN)
}

pub fn classify_pair_with_margin(
    spec: &PairSpec,
    est_lambda: &DensityEstimate,
    est_mu: &DensityEstimate,
    margin: f64,
) -> Result<CriticalityVerdict, PairError> {
    check_estimate_exponent(spec.p, est_lambda)?;
    check_estimate_exponent(spec.q, est_mu)?;
    Ok(classify_values(
        spec.p,
        spec.q,
        est_lambda.upper(),
        est_mu.upper(),
        est_lambda.lower(),
        est_mu.lower(),
        margin,
    ))
}

fn check_estimate_exponent(expected: f64, est: &DensityEstimate) -> Result<(), PairError> {
    if (expected - est.p).abs() > 1e-9 * expected {
        return Err(PairError::ExponentMismatch {
            expected,
            estimate: est.p,
        });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeurlingReport {
    pub lhs_lambda: f64,
    pub bound_lambda: f64,
    pub lhs_mu: f64,
    pub bound_mu: f64,
    pub pass: bool,
}

/// `(½(b/a)^{1/q}, ½(a/b)^{1/p})`.
pub fn beurling_bounds(a: f64, b: f64, p: f64, q: f64) -> (f64, f64) {
    (0.5 * (b / a).powf(1.0 / q), 0.5 * (a / b).powf(1.0 / p))
}

pub fn beurling_condition_check(
    spec: &PairSpec,
    est_lambda: &DensityEstimate,
    est_mu: &DensityEstimate,
) -> Result<BeurlingReport, PairError> {
    check_estimate_exponent(spec.p, est_lambda)?;
    check_estimate_exponent(spec.q, est_mu)?;
    let (bound_lambda, bound_mu) = beurling_bounds(spec.a, spec.b, spec.p, spec.q);
    let lhs_lambda = est_lambda.upper();
    let lhs_mu = est_mu.upper();
    Ok(BeurlingReport {
        lhs_lambda,
        bound_lambda,
        lhs_mu,
        bound_mu,
        pass: lhs_lambda < bound_lambda && lhs_mu < bound_mu,
    })
}

/// `|cos(rπ/2)|^{1/r}` with `r = min(p, q)`.
pub fn morgan_threshold(p: f64, q: f64) -> Result<f64, PairError> {
    check_conjugate(p, q)?;
    let r = p.min(q);
    Ok((r * PI / 2.0).cos().abs().powf(1.0 / r))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigRow {
    pub theta: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

/// Evaluates `(1/p) tan(pθ)` against `sin θ / (cos pθ)^{1/p}` on `(0, π/(2p))`.
pub fn trig_inequality_check(p: f64, theta_grid: &[f64]) -> Result<Vec<TrigRow>, PairError> {
    if !(p > 1.0) {
        return Err(PairError::ExponentTooSmall(p));
    }
    let upper = PI / (2.0 * p);
    theta_grid
        .iter()
        .map(|&theta| {
            if !(theta > 0.0 && theta < upper) {
                return Err(PairError::ThetaOutOfRange { theta, upper });
            }
            let lhs = (p * theta).tan() / p;
            let rhs = theta.sin() / (p * theta).cos().powf(1.0 / p);
            Ok(TrigRow {
                theta,
                lhs,
                rhs,
                margin: lhs - rhs,
            })
        })
        .collect()
}

/// Relative residual of the substitution `η = q·κ̂·(2α)^{1−q}` in
/// `(2α)^{−1}η − η^p/(p(qκ̂)^{p/q}) = (2α)^{−q}κ̂`.
pub fn eta_substitution_check(
    alpha: f64,
    kappa_hat: f64,
    p: f64,
    q: f64,
) -> Result<f64, PairError> {
    check_conjugate(p, q)?;
    for (name, value) in [("alpha", alpha), ("kappa_hat", kappa_hat)] {
        if !(value > 0.0) {
            return Err(PairError::NonPositive { name, value });
        }
    }
    let two_alpha = 2.0 * alpha;
    let eta = q * kappa_hat * two_alpha.powf(1.0 - q);
    let lhs = eta / two_alpha - eta.powf(p) / (p * (q * kappa_hat).powf(p / q));
    let rhs = two_alpha.powf(-q) * kappa_hat;
    Ok((lhs - rhs).abs() / rhs.abs())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalityAlgebra {
    /// `(2α)^q (2β)^p > 1`
    pub lhs_holds: bool,
    /// `2 α^{1/p} β^{1/q} > 1`
    pub rhs_holds: bool,
    pub equivalent: bool,
}

pub fn criticality_algebra_check(
    alpha: f64,
    beta: f64,
    p: f64,
    q: f64,
) -> Result<CriticalityAlgebra, PairError> {
    check_conjugate(p, q)?;
    for (name, value) in [("alpha", alpha), ("beta", beta)] {
        if !(value > 0.0) {
            return Err(PairError::NonPositive { name, value });
        }
    }
    let lhs_holds = (2.0 * alpha).powf(q) * (2.0 * beta).powf(p) > 1.0;
    let rhs_holds = 2.0 * alpha.powf(1.0 / p) * beta.powf(1.0 / q) > 1.0;
    Ok(CriticalityAlgebra {
        lhs_holds,
        rhs_holds,
        equivalent: lhs_holds == rhs_holds,
    })
}
