use serde::{Deserialize, Serialize};

use super::ProductError;
use crate::numeric::{zeta_tail, NeumaierSum};

/// Relative tolerance for the declared density `n/γ_n → Δ` on the prefix.
const DENSITY_TOL: f64 = 0.05;

/// How the zero set continues past the stored prefix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ZeroLaw {
    /// `γ_n = spacing · n` for all `n ≥ 1`.
    Arithmetic { spacing: f64 },
    /// Only the stored points are known.
    Explicit,
}

/// Positive zeros `γ_1 < γ_2 < …` of a symmetric canonical product.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    gammas: Vec<f64>,
    known_density: Option<f64>,
    law: ZeroLaw,
}

/// Tail sums `Σ_{n>N} γ_n^{-2}` and `Σ_{n>N} γ_n^{-4}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailMoments {
    pub inv_sq: f64,
    pub inv_quartic: f64,
    /// True when the sums are exact for the full infinite zero set.
    pub certified: bool,
}

impl ZeroSet {
    pub fn new(gammas: Vec<f64>, known_density: Option<f64>) -> Result<Self, ProductError> {
        if gammas.is_empty() {
            return Err(ProductError::EmptyZeroSet);
        }
        for (i, g) in gammas.iter().enumerate() {
            if !g.is_finite() || *g <= 0.0 || (i > 0 && *g <= gammas[i - 1]) {
                return Err(ProductError::InvalidZeros { index: i });
            }
        }
        if let Some(d) = known_density {
            if !(d > 0.0) {
                return Err(ProductError::InvalidDensity(d));
            }
            let n = gammas.len();
            let observed = n as f64 / gammas[n - 1];
            if (observed - d).abs() > DENSITY_TOL * d {
                return Err(ProductError::DensityMismatch {
                    declared: d,
                    observed,
                });
            }
        }
        Ok(Self {
            gammas,
            known_density,
            law: ZeroLaw::Explicit,
        })
    }

    /// `γ_n = spacing · n`, `n = 1..=count`, continuing arithmetically.
    pub fn arithmetic(spacing: f64, count: usize) -> Result<Self, ProductError> {
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(ProductError::InvalidDensity(spacing));
        }
        if count == 0 {
            return Err(ProductError::EmptyZeroSet);
        }
        Ok(Self {
            gammas: (1..=count).map(|n| spacing * n as f64).collect(),
            known_density: Some(1.0 / spacing),
            law: ZeroLaw::Arithmetic { spacing },
        })
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    pub fn law(&self) -> ZeroLaw {
        self.law
    }

    pub fn known_density(&self) -> Option<f64> {
        self.known_density
    }

    /// Declared density if any, else `N/γ_N` on the stored prefix.
    pub fn density(&self) -> f64 {
        self.known_density
            .unwrap_or_else(|| self.gammas.len() as f64 / self.gammas[self.gammas.len() - 1])
    }

    /// Mean spacing of the stored prefix.
    pub fn mean_gap(&self) -> f64 {
        let n = self.gammas.len();
        if n < 2 {
            self.gammas[0]
        } else {
            (self.gammas[n - 1] - self.gammas[0]) / (n - 1) as f64
        }
    }

    /// Number of stored zeros in `[x − t, x + t]`.
    pub fn count_in(&self, lo: f64, hi: f64) -> usize {
        let a = self.gammas.partition_point(|g| *g < lo);
        let b = self.gammas.partition_point(|g| *g <= hi);
        b.saturating_sub(a)
    }

    /// Distance from `x` to the nearest stored zero of `±γ`.
    pub fn distance_to_nearest(&self, x: f64) -> f64 {
        let ax = x.abs();
        let i = self.gammas.partition_point(|g| *g < ax);
        let mut d = f64::INFINITY;
        if i < self.gammas.len() {
            d = d.min(self.gammas[i] - ax);
        }
        if i > 0 {
            d = d.min(ax - self.gammas[i - 1]);
        }
        d
    }

    /// Moments of the zeros beyond index `n_trunc`.
    ///
    /// Arithmetic sets use exact zeta tails. Explicit sets add the stored
    /// points beyond `n_trunc` and extrapolate past the prefix at the
    /// observed density, which is not a certified bound.
    pub fn tail_moments(&self, n_trunc: usize) -> TailMoments {
        match self.law {
            ZeroLaw::Arithmetic { spacing } => TailMoments {
                inv_sq: zeta_tail(2, n_trunc) / (spacing * spacing),
                inv_quartic: zeta_tail(4, n_trunc) / spacing.powi(4),
                certified: true,
            },
            ZeroLaw::Explicit => {
                let mut s2 = NeumaierSum::default();
                let mut s4 = NeumaierSum::default();
                for g in self.gammas.iter().skip(n_trunc) {
                    let g2 = 1.0 / (g * g);
                    s2.add(g2);
                    s4.add(g2 * g2);
                }
                let last = self.gammas[self.gammas.len() - 1];
                let d = self.density();
                s2.add(d / last);
                s4.add(d / (3.0 * last.powi(3)));
                TailMoments {
                    inv_sq: s2.value(),
                    inv_quartic: s4.value(),
                    certified: false,
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_tail_matches_brute_force() {
        let z = ZeroSet::arithmetic(0.5, 100).unwrap();
        let t = z.tail_moments(100);
        let brute: f64 = (101..2_000_000u64)
            .map(|n| 4.0 / (n as f64).powi(2))
            .sum::<f64>()
            + 4.0 / 1_999_999.5;
        assert!((t.inv_sq - brute).abs() / brute < 1e-5);
        assert!(t.certified);
        assert_eq!(z.density(), 2.0);
    }

    #[test]
    fn rejects_bad_sets() {
        assert!(matches!(
            ZeroSet::new(vec![0.0, 1.0], None),
            Err(ProductError::InvalidZeros { index: 0 })
        ));
        assert!(matches!(
            ZeroSet::new(vec![1.0, 3.0, 2.0], None),
            Err(ProductError::InvalidZeros { index: 2 })
        ));
        assert!(matches!(
            ZeroSet::new(vec![1.0, 2.0, 3.0], Some(2.0)),
            Err(ProductError::DensityMismatch { .. })
        ));
        assert!(ZeroSet::new(vec![1.0, 2.0, 3.0], Some(1.0)).is_ok());
    }

    #[test]
    fn explicit_tail_extrapolates() {
        let g: Vec<f64> = (1..=1000).map(f64::from).collect();
        let z = ZeroSet::new(g, None).unwrap();
        let t = z.tail_moments(500);
        let exact = zeta_tail(2, 500);
        assert!((t.inv_sq - exact).abs() / exact < 1e-3);
        assert!(!t.certified);
    }

    #[test]
    fn nearest_distance_is_symmetric() {
        let z = ZeroSet::arithmetic(1.0, 10).unwrap();
        assert!((z.distance_to_nearest(3.25) - 0.25).abs() < 1e-15);
        assert!((z.distance_to_nearest(-3.25) - 0.25).abs() < 1e-15);
        assert!((z.distance_to_nearest(0.2) - 0.8).abs() < 1e-15);
    }
}
