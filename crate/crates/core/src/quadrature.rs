//! Composite trapezoid rule, the oracle for norm and Fourier checks.

/// Half-width of the default integration window.
pub const FT_HALF_WIDTH: f64 = 8.0;
/// Default node count on `[−8, 8]` (4096 panels).
pub const FT_NODES: usize = 4097;

/// Nodes and weights of the composite trapezoid rule on `[a, b]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trapezoid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Trapezoid {
    /// `n ≥ 2` equispaced nodes including both endpoints.
    pub fn new(a: f64, b: f64, n: usize) -> Self {
        let nodes = crate::numeric::linspace(a, b, n.max(2));
        let h = (b - a) / (nodes.len() - 1) as f64;
        let last = nodes.len() - 1;
        let weights = (0..nodes.len())
            .map(|i| if i == 0 || i == last { 0.5 * h } else { h })
            .collect();
        Self { nodes, weights }
    }

    /// The default rule on `[−8, 8]`.
    pub fn standard() -> Self {
        Self::new(-FT_HALF_WIDTH, FT_HALF_WIDTH, FT_NODES)
    }

    /// `Σ w_i v_i` for values sampled at the nodes.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    pub fn integrate_fn(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(*x))
            .sum()
    }
}
