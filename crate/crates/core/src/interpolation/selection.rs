use serde::{Deserialize, Serialize};

use super::InterpolationError;

/// Nodes `T′ ⊂ T` with exactly `m_per_interval` points in every block
/// `[nL, (n+1)L)`, `n ≥ start_n`, one per window `[nL + sℓ, nL + sℓ + h]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformSelection {
    pub t_prime: Vec<f64>,
    #[serde(rename = "L")]
    pub l: f64,
    pub m_per_interval: usize,
    pub h: f64,
    pub ell: f64,
    pub start_n: usize,
}

impl UniformSelection {
    pub fn len(&self) -> usize {
        self.t_prime.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_prime.is_empty()
    }

    pub fn blocks(&self) -> usize {
        self.t_prime.len() / self.m_per_interval
    }

    /// Smallest gap between consecutive selected nodes.
    pub fn min_separation(&self) -> f64 {
        self.t_prime
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }
}

/// Picks the first point of `t` in each window `[nL + sℓ, nL + sℓ + h]`.
///
/// Blocks are scanned from `start_n` while the last window of the block
/// still lies inside the data. If some window is empty the effective
/// start moves past the last such block; the error is raised only when
/// no complete block remains.
pub fn select_uniform_subsequence(
    t: &[f64],
    l: f64,
    m_per_interval: usize,
    h: f64,
    start_n: usize,
) -> Result<UniformSelection, InterpolationError> {
    if m_per_interval == 0 || !(l > 0.0) || !l.is_finite() {
        return Err(InterpolationError::InvalidParameter {
            name: "L/m_per_interval",
            value: l,
        });
    }
    let ell = l / m_per_interval as f64;
    if !(h > 0.0) || h >= ell {
        return Err(InterpolationError::InfeasibleParameters { h, ell });
    }
    for (i, x) in t.iter().enumerate() {
        if !x.is_finite() || *x <= 0.0 || (i > 0 && *x <= t[i - 1]) {
            return Err(InterpolationError::InvalidNodes { index: i });
        }
    }
    let Some(&t_max) = t.last() else {
        return Err(InterpolationError::InvalidNodes { index: 0 });
    };

    let mut blocks: Vec<Vec<f64>> = Vec::new();
    let mut first_empty: Option<(usize, usize)> = None;
    let mut effective_start = start_n;
    let mut n = start_n;
    loop {
        let base = n as f64 * l;
        if base + (m_per_interval - 1) as f64 * ell + h > t_max {
            break;
        }
        let mut block = Vec::with_capacity(m_per_interval);
        let mut empty = None;
        for s in 0..m_per_interval {
            let lo = base + s as f64 * ell;
            let i = t.partition_point(|x| *x < lo);
            match t.get(i) {
                Some(&x) if x <= lo + h => block.push(x),
                _ => {
                    empty = Some(s);
                    break;
                }
            }
        }
        match empty {
            Some(s) => {
                first_empty.get_or_insert((n, s));
                blocks.clear();
                effective_start = n + 1;
            }
            None => blocks.push(block),
        }
        n += 1;
    }
    if blocks.is_empty() {
        let (n, s) = first_empty.unwrap_or((start_n, 0));
        return Err(InterpolationError::WindowEmpty { n, s });
    }
    Ok(UniformSelection {
        t_prime: blocks.into_iter().flatten().collect(),
        l,
        m_per_interval,
        h,
        ell,
        start_n: effective_start,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn half_integer_set() {
        let t: Vec<f64> = (1..=200).map(|j| 0.5 * j as f64).collect();
        let sel = select_uniform_subsequence(&t, 3.0, 3, 0.6, 1).unwrap();
        assert_eq!(sel.start_n, 1);
        assert_eq!(&sel.t_prime[..4], &[3.0, 4.0, 5.0, 6.0]);
        assert!(sel.min_separation() >= 0.4);
        assert_eq!(sel.len() % 3, 0);
    }

    #[test]
    fn integers_every_other() {
        let t: Vec<f64> = (1..=50).map(f64::from).collect();
        let sel = select_uniform_subsequence(&t, 2.0, 1, 1.5, 1).unwrap();
        let expect: Vec<f64> = (1..=24).map(|n| 2.0 * n as f64).collect();
        assert_eq!(sel.t_prime, expect);
    }

    #[test]
    fn infeasible_window() {
        let t = [1.0, 2.0, 3.0];
        assert!(matches!(
            select_uniform_subsequence(&t, 2.0, 2, 1.0, 0),
            Err(InterpolationError::InfeasibleParameters { .. })
        ));
    }

    #[test]
    fn start_moves_past_gaps() {
        // a hole around 10 forces the effective start beyond block 5
        let t: Vec<f64> = (1..=100)
            .map(|j| 0.5 * j as f64)
            .filter(|x| !(9.9..=11.1).contains(x))
            .collect();
        let sel = select_uniform_subsequence(&t, 2.0, 2, 0.6, 1).unwrap();
        assert_eq!(sel.start_n, 6);
        assert_eq!(sel.t_prime[0], 12.0);
        let sparse = [1.0, 7.0, 30.0];
        assert!(matches!(
            select_uniform_subsequence(&sparse, 2.0, 1, 1.0, 0),
            Err(InterpolationError::WindowEmpty { n: 1, s: 0 })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn selection_invariants(gap in 0.05f64..0.4, m in 1usize..5, l in 1.0f64..4.0, hfrac in 0.5f64..0.95,
                                jitter in proptest::collection::vec(0.0f64..0.3, 400)) {
            let ell = l / m as f64;
            let h = (hfrac * ell).max(gap * 1.01);
            prop_assume!(h < ell);
            let mut x = 0.0;
            let t: Vec<f64> = jitter.iter().map(|j| { x += gap * (0.7 + j); x }).collect();
            let sel = select_uniform_subsequence(&t, l, m, h, 0).unwrap();
            for (b, block) in sel.t_prime.chunks(m).enumerate() {
                let n = sel.start_n + b;
                prop_assert_eq!(block.len(), m);
                for (s, &y) in block.iter().enumerate() {
                    let lo = n as f64 * l + s as f64 * ell;
                    prop_assert!(y >= lo && y <= lo + h);
                    prop_assert!(y >= n as f64 * l && y < (n + 1) as f64 * l);
                }
            }
            prop_assert!(sel.min_separation() >= ell - h - 1e-12);
        }
    }
}
