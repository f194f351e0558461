use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hermite::{scaled_values, HermiteBasis};
use super::UniquenessError;
use crate::pairs::PairSpec;

/// Per-row weights for weighted experiments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RowWeights {
    /// `(1+|λ|)^{−K}e^{aπ|λ|^p}` on time rows and
    /// `(1+|μ|)^{−K}e^{bπ|μ|^q}` on frequency rows.
    Decay,
    /// One weight per row, time rows first.
    Explicit { weights: Vec<f64> },
}

/// Rows `h_n(λ)` for `λ ∈ Λ ∩ [−R, R]` followed by `(−i)^n h_n(μ)` for
/// `μ ∈ M ∩ [−R, R]`; one column per basis index.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplingOperator {
    pub matrix: DMatrix<Complex64>,
    pub r: f64,
    pub row_weights: Option<Vec<f64>>,
    pub rows_lambda: usize,
    pub rows_mu: usize,
    /// Fewer rows than columns: `σ_min = 0` structurally.
    pub insufficient_rows: bool,
}

impl SamplingOperator {
    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }
}

/// `(−i)^n`
pub(crate) fn minus_i_pow(n: usize) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

pub fn build_sampling_operator(
    pair: &PairSpec,
    basis: &HermiteBasis,
    r: f64,
    weights: Option<RowWeights>,
) -> Result<SamplingOperator, UniquenessError> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(UniquenessError::InvalidParameter {
            name: "R",
            value: r,
        });
    }
    let inside = |x: &&f64| x.abs() <= r;
    let lambda: Vec<f64> = pair
        .lambda
        .points()
        .iter()
        .filter(inside)
        .copied()
        .collect();
    let mu: Vec<f64> = pair.mu.points().iter().filter(inside).copied().collect();
    let rows = lambda.len() + mu.len();
    let cols = basis.size();

    // log-weights let e^{aπ|λ|^p} cancel against e^{−πλ²} before exponentiation
    let log_w: Option<Vec<f64>> = match &weights {
        None => None,
        Some(RowWeights::Decay) => Some(
            lambda
                .iter()
                .map(|x| decay_log_weight(*x, pair.k, pair.a, pair.p))
                .chain(
                    mu.iter()
                        .map(|x| decay_log_weight(*x, pair.k, pair.b, pair.q)),
                )
                .collect(),
        ),
        Some(RowWeights::Explicit { weights }) => {
            if weights.len() != rows {
                return Err(UniquenessError::WeightLength {
                    expected: rows,
                    got: weights.len(),
                });
            }
            if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
                return Err(UniquenessError::NonFinite);
            }
            Some(weights.iter().map(|w| w.ln()).collect())
        }
    };

    let mut matrix = DMatrix::<Complex64>::zeros(rows, cols);
    for (i, &x) in lambda.iter().chain(&mu).enumerate() {
        let freq = i >= lambda.len();
        let shift = log_w.as_ref().map_or(0.0, |w| w[i]) - PI * x * x;
        for (n, s) in scaled_values(cols - 1, x).into_iter().enumerate() {
            let v = s * shift.exp();
            matrix[(i, n)] = if freq {
                minus_i_pow(n) * v
            } else {
                Complex64::new(v, 0.0)
            };
        }
    }
    if matrix
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(UniquenessError::NonFinite);
    }
    Ok(SamplingOperator {
        matrix,
        r,
        row_weights: log_w.map(|w| w.into_iter().map(f64::exp).collect()),
        rows_lambda: lambda.len(),
        rows_mu: mu.len(),
        insufficient_rows: rows < cols,
    })
}

fn decay_log_weight(x: f64, k: f64, a: f64, p: f64) -> f64 {
    -k * x.abs().ln_1p() + a * PI * x.abs().powf(p)
}

/// Smallest singular value by dense SVD. Zero for an empty or
/// underdetermined matrix.
pub fn smallest_singular_value(op: &SamplingOperator) -> Result<f64, UniquenessError> {
    let (rows, cols) = op.matrix.shape();
    if rows == 0 || cols == 0 || rows < cols {
        return Ok(0.0);
    }
    let svd = op
        .matrix
        .clone()
        .try_svd(false, false, f64::EPSILON, 10_000)
        .ok_or(UniquenessError::SvdFailed { rows, cols })?;
    let s = svd.singular_values.min();
    if !s.is_finite() {
        return Err(UniquenessError::SvdFailed { rows, cols });
    }
    Ok(s.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairs::{SampleSequence, Side};
    use proptest::prelude::*;

    fn seq(points: Vec<f64>) -> SampleSequence {
        SampleSequence::new(points, Side::TwoSided).unwrap()
    }

    fn pair(l: Vec<f64>, m: Vec<f64>) -> PairSpec {
        PairSpec::new(seq(l), seq(m), 2.0, 1.0, 1.0, 0.0).unwrap()
    }

    fn op_from(matrix: DMatrix<Complex64>) -> SamplingOperator {
        SamplingOperator {
            rows_lambda: matrix.nrows(),
            matrix,
            r: 1.0,
            row_weights: None,
            rows_mu: 0,
            insufficient_rows: false,
        }
    }

    #[test]
    fn empty_constraints() {
        let basis = HermiteBasis::new(3).unwrap();
        let op = build_sampling_operator(&pair(vec![], vec![]), &basis, 5.0, None).unwrap();
        assert_eq!(op.rows(), 0);
        assert!(op.insufficient_rows);
        assert_eq!(smallest_singular_value(&op).unwrap(), 0.0);
    }

    #[test]
    fn single_entry() {
        let basis = HermiteBasis::new(1).unwrap();
        let op = build_sampling_operator(&pair(vec![0.0], vec![]), &basis, 1.0, None).unwrap();
        assert_eq!(op.matrix.shape(), (1, 1));
        let s = smallest_singular_value(&op).unwrap();
        assert!((s - 2f64.powf(0.25)).abs() < 1e-15);
    }

    #[test]
    fn frequency_rows_carry_eigenvalue() {
        let basis = HermiteBasis::new(4).unwrap();
        let mu = 0.37;
        let op = build_sampling_operator(&pair(vec![], vec![mu]), &basis, 1.0, None).unwrap();
        let h2 = basis.eval(2, mu).unwrap();
        assert!((op.matrix[(0, 2)] - Complex64::new(-h2, 0.0)).norm() < 1e-15);
        let h1 = basis.eval(1, mu).unwrap();
        assert!((op.matrix[(0, 1)] - Complex64::new(0.0, -h1)).norm() < 1e-15);
    }

    #[test]
    fn rows_outside_radius_dropped() {
        let basis = HermiteBasis::new(2).unwrap();
        let op = build_sampling_operator(&pair(vec![-3.0, 0.5, 2.0], vec![1.5]), &basis, 1.6, None)
            .unwrap();
        assert_eq!((op.rows_lambda, op.rows_mu), (1, 1));
    }

    #[test]
    fn decay_weights_cancel_gaussian() {
        let basis = HermiteBasis::new(1).unwrap();
        let points = vec![-6.0, -2.5, 0.0, 3.0, 7.5];
        let op =
            build_sampling_operator(&pair(points, vec![]), &basis, 10.0, Some(RowWeights::Decay))
                .unwrap();
        for i in 0..op.rows() {
            assert!((op.matrix[(i, 0)].re - 2f64.powf(0.25)).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_and_repeated_rows() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
        ]));
        assert!((smallest_singular_value(&op_from(d)).unwrap() - 1.0).abs() < 1e-15);
        let rep = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 2.0),
                Complex64::new(3.0, -1.0),
                Complex64::new(1.0, 2.0),
                Complex64::new(3.0, -1.0),
            ],
        );
        assert!(smallest_singular_value(&op_from(rep)).unwrap() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn homogeneous_in_scale(entries in proptest::collection::vec(-3.0f64..3.0, 24), c in -5.0f64..5.0) {
            let m = DMatrix::from_fn(6, 2, |i, j| Complex64::new(entries[2 * (2 * i + j)], entries[2 * (2 * i + j) + 1]));
            let s = smallest_singular_value(&op_from(m.clone())).unwrap();
            let sc = smallest_singular_value(&op_from(m * Complex64::new(c, 0.0))).unwrap();
            prop_assert!((sc - c.abs() * s).abs() <= 1e-10 * (1.0 + sc));
        }

        #[test]
        fn appending_rows_never_decreases(entries in proptest::collection::vec(-3.0f64..3.0, 8 * 3 * 2), extra in 1usize..4) {
            let full = DMatrix::from_fn(8, 3, |i, j| Complex64::new(entries[2 * (3 * i + j)], entries[2 * (3 * i + j) + 1]));
            let base = full.rows(0, 8 - extra).into_owned();
            let s0 = smallest_singular_value(&op_from(base)).unwrap();
            let s1 = smallest_singular_value(&op_from(full)).unwrap();
            prop_assert!(s1 >= s0 - 1e-12);
        }
    }
}
