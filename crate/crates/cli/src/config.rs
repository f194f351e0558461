use std::f64::consts::PI;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Classify,
    Product,
    Slope,
    Indicator,
    Jensen,
    Interpolate,
    Scan,
    Hardy,
    Transfer,
    Morgan,
    Identities,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Classify => "classify",
            Self::Product => "product",
            Self::Slope => "slope",
            Self::Indicator => "indicator",
            Self::Jensen => "jensen",
            Self::Interpolate => "interpolate",
            Self::Scan => "scan",
            Self::Hardy => "hardy",
            Self::Transfer => "transfer",
            Self::Morgan => "morgan",
            Self::Identities => "identities",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// On-disk experiment description. `params` is checked against the
/// command's schema by [`ExperimentConfig::resolve`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default = "empty_object")]
    pub params: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    #[serde(default)]
    pub seed: u64,
}

fn empty_object() -> Value {
    Value::Object(Default::default())
}

impl ExperimentConfig {
    pub fn new(command: Command, params: Value, seed: u64) -> Self {
        Self {
            command,
            params,
            output_path: None,
            seed,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Validation {
            command: "config".into(),
            message: e.to_string(),
        })
    }

    /// Parses and validates `params`, filling defaults.
    pub fn resolve(&self) -> Result<Params, CliError> {
        let p = self.params.clone();
        let params = match self.command {
            Command::Classify => Params::Classify(parse(self.command, p)?),
            Command::Product => Params::Product(parse(self.command, p)?),
            Command::Slope => Params::Slope(parse(self.command, p)?),
            Command::Indicator => Params::Indicator(parse(self.command, p)?),
            Command::Jensen => Params::Jensen(parse(self.command, p)?),
            Command::Interpolate => Params::Interpolate(parse(self.command, p)?),
            Command::Scan => Params::Scan(parse(self.command, p)?),
            Command::Hardy => Params::Hardy(parse(self.command, p)?),
            Command::Transfer => Params::Transfer(parse(self.command, p)?),
            Command::Morgan => Params::Morgan(parse(self.command, p)?),
            Command::Identities => Params::Identities(parse(self.command, p)?),
        };
        params.validate().map_err(|message| CliError::Validation {
            command: self.command.name().into(),
            message,
        })?;
        Ok(params)
    }
}

fn parse<T: for<'de> Deserialize<'de>>(command: Command, v: Value) -> Result<T, CliError> {
    serde_json::from_value(v).map_err(|e| CliError::Validation {
        command: command.name().into(),
        message: e.to_string(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Params {
    Classify(ClassifyParams),
    Product(ProductParams),
    Slope(SlopeParams),
    Indicator(IndicatorParams),
    Jensen(JensenParams),
    Interpolate(InterpolateParams),
    Scan(ScanParams),
    Hardy(HardyParams),
    Transfer(TransferParams),
    Morgan(MorganParams),
    Identities(IdentitiesParams),
}

impl Params {
    pub fn validate(&self) -> Result<(), String> {
        match self {
            Self::Classify(p) => p.validate(),
            Self::Product(p) => p.validate(),
            Self::Slope(p) => p.validate(),
            Self::Indicator(p) => p.validate(),
            Self::Jensen(p) => p.validate(),
            Self::Interpolate(p) => p.validate(),
            Self::Scan(p) => p.validate(),
            Self::Hardy(p) => p.validate(),
            Self::Transfer(p) => p.validate(),
            Self::Morgan(p) => p.validate(),
            Self::Identities(p) => p.validate(),
        }
    }
}

fn require(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn positive(name: &str, v: f64) -> Result<(), String> {
    require(v > 0.0 && v.is_finite(), || {
        format!("{name} must be positive and finite, got {v}")
    })
}

fn exponent(name: &str, v: f64) -> Result<(), String> {
    require(v > 1.0 && v.is_finite(), || {
        format!("{name} must exceed 1, got {v}")
    })
}

fn grid(name: &str, lo: f64, hi: f64, n: usize, min_n: usize) -> Result<(), String> {
    require(lo.is_finite() && hi.is_finite() && lo < hi, || {
        format!("{name}: need min < max, got [{lo}, {hi}]")
    })?;
    require(n >= min_n, || {
        format!("{name}: need at least {min_n} points, got {n}")
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyParams {
    pub p: f64,
    pub alpha: f64,
    pub beta: f64,
    pub j_max: usize,
    /// Defaults to `j_max / 4`.
    pub tail_start: Option<usize>,
    pub margin: f64,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        Self {
            p: 2.0,
            alpha: 0.4,
            beta: 0.4,
            j_max: 10_000,
            tail_start: None,
            margin: 1e-6,
        }
    }
}

impl ClassifyParams {
    pub fn tail_start(&self) -> usize {
        self.tail_start.unwrap_or(self.j_max / 4)
    }

    fn validate(&self) -> Result<(), String> {
        exponent("p", self.p)?;
        positive("alpha", self.alpha)?;
        positive("beta", self.beta)?;
        require(self.j_max >= 2, || {
            format!("j_max must be at least 2, got {}", self.j_max)
        })?;
        require(self.tail_start() + 2 <= self.j_max, || {
            format!("tail_start {} leaves fewer than 2 gaps", self.tail_start())
        })?;
        require(self.margin >= 0.0 && self.margin < 0.5, || {
            format!("margin must lie in [0, 0.5), got {}", self.margin)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ZerosParam {
    /// `γ_n = spacing·n`, `n = 1..=count`.
    Arithmetic {
        spacing: f64,
        count: usize,
    },
    Explicit {
        gammas: Vec<f64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailModeParam {
    Truncated,
    Compensated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProductParams {
    pub zeros: ZerosParam,
    /// Defaults to all zeros.
    pub n_trunc: Option<usize>,
    pub mode: TailModeParam,
    /// Evaluation points `[re, im]`; when absent, `n_random` seeded points
    /// uniform in the disk of radius `radius`.
    pub points: Option<Vec<[f64; 2]>>,
    pub n_random: usize,
    pub radius: f64,
}

impl Default for ProductParams {
    fn default() -> Self {
        Self {
            zeros: ZerosParam::Arithmetic {
                spacing: 1.0,
                count: 10_000,
            },
            n_trunc: None,
            mode: TailModeParam::Compensated,
            points: None,
            n_random: 200,
            radius: 10.0,
        }
    }
}

impl ProductParams {
    pub fn zero_count(&self) -> usize {
        match &self.zeros {
            ZerosParam::Arithmetic { count, .. } => *count,
            ZerosParam::Explicit { gammas } => gammas.len(),
        }
    }

    fn validate(&self) -> Result<(), String> {
        match &self.zeros {
            ZerosParam::Arithmetic { spacing, count } => {
                positive("zeros.spacing", *spacing)?;
                require(*count >= 1, || "zeros.count must be at least 1".into())?;
            }
            ZerosParam::Explicit { gammas } => {
                require(!gammas.is_empty(), || "zeros.gammas is empty".into())?;
            }
        }
        let n = self.n_trunc.unwrap_or(self.zero_count());
        require(n >= 1 && n <= self.zero_count(), || {
            format!("n_trunc must lie in [1, {}], got {n}", self.zero_count())
        })?;
        match &self.points {
            Some(pts) => require(pts.iter().flatten().all(|v| v.is_finite()), || {
                "points must be finite".into()
            }),
            None => {
                positive("radius", self.radius)?;
                require(self.n_random >= 1, || "n_random must be at least 1".into())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SlopeParams {
    pub deltas: Vec<f64>,
    /// Ray angles in radians.
    pub thetas: Vec<f64>,
    pub r_min: f64,
    pub r_max: f64,
    pub n_r: usize,
    /// The zero set `{n/Δ}` is cut at this modulus.
    pub zero_extent: f64,
}

impl Default for SlopeParams {
    fn default() -> Self {
        Self {
            deltas: vec![0.25, 0.5, 1.0, 2.0],
            thetas: vec![PI / 6.0, PI / 4.0, PI / 2.0],
            r_min: 50.0,
            r_max: 200.0,
            n_r: 31,
            zero_extent: 4000.0,
        }
    }
}

impl SlopeParams {
    fn validate(&self) -> Result<(), String> {
        require(!self.deltas.is_empty() && !self.thetas.is_empty(), || {
            "deltas and thetas must be nonempty".into()
        })?;
        for d in &self.deltas {
            positive("delta", *d)?;
        }
        require(self.thetas.iter().all(|t| t.is_finite()), || {
            "thetas must be finite".into()
        })?;
        grid("r grid", self.r_min, self.r_max, self.n_r, 4)?;
        positive("r_min", self.r_min)?;
        require(
            self.zero_extent > self.r_max * std::f64::consts::SQRT_2,
            || {
                format!(
                    "zero_extent must exceed √2·r_max = {}",
                    self.r_max * std::f64::consts::SQRT_2
                )
            },
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IndicatorParams {
    /// `gaussian`, `sinc`, `sine`, `sine_decay(b,d)` or `constant(c)`.
    pub function: String,
    pub rho: f64,
    pub n_theta: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub n_r: usize,
    /// Exponent for the κ̂ bound; `q = p/(p−1)`.
    pub p: f64,
    pub kappa_hat: f64,
}

impl Default for IndicatorParams {
    fn default() -> Self {
        Self {
            function: "gaussian".into(),
            rho: 2.0,
            n_theta: 32,
            r_min: 1.0,
            r_max: 50.0,
            n_r: 100,
            p: 2.0,
            kappa_hat: 0.5,
        }
    }
}

impl IndicatorParams {
    fn validate(&self) -> Result<(), String> {
        self.function
            .parse::<uniqlab_core::BuiltinFunction>()
            .map_err(|e| e.to_string())?;
        positive("rho", self.rho)?;
        require(self.n_theta >= 1, || "n_theta must be at least 1".into())?;
        grid("r grid", self.r_min, self.r_max, self.n_r, 4)?;
        positive("r_min", self.r_min)?;
        exponent("p", self.p)?;
        positive("kappa_hat", self.kappa_hat)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JensenCase {
    /// `F(z) = sin(2πbz)e^{−πdz}` with zeros `{k/(2b)}`.
    pub b: f64,
    pub d: f64,
    pub a: f64,
    pub delta: f64,
    pub phi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JensenParams {
    pub cases: Vec<JensenCase>,
    pub x_min: f64,
    pub x_max: f64,
    pub n_x: usize,
}

impl Default for JensenParams {
    fn default() -> Self {
        let case = |b, d, a, phi| JensenCase {
            b,
            d,
            a,
            delta: 1.0,
            phi,
        };
        Self {
            cases: vec![
                case(1.0, 1.0, 1.0, PI / 4.0),
                case(1.0, 2.0, 1.0, PI / 4.0),
                case(2.0, 1.0, 2.0, 0.5f64.atan()),
            ],
            x_min: 1.0,
            x_max: 60.0,
            n_x: 4001,
        }
    }
}

impl JensenParams {
    fn validate(&self) -> Result<(), String> {
        require(!self.cases.is_empty(), || "cases is empty".into())?;
        for c in &self.cases {
            positive("b", c.b)?;
            positive("a", c.a)?;
            require(c.d.is_finite(), || "d must be finite".into())?;
            require(c.delta >= 0.0, || {
                format!("delta must be nonnegative, got {}", c.delta)
            })?;
            require(c.phi > 0.0 && c.phi < PI / 2.0, || {
                format!("phi must lie in (0, π/2), got {}", c.phi)
            })?;
        }
        grid("x grid", self.x_min, self.x_max, self.n_x, 8)?;
        positive("x_min", self.x_min)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataKind {
    /// Real data uniform in `[−1, 1]`, drawn from the seed.
    Random,
    Ones,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InterpolateParams {
    /// `T = {spacing·j : 1 ≤ j ≤ node_count}`.
    pub node_spacing: f64,
    pub node_count: usize,
    #[serde(rename = "L")]
    pub l: f64,
    pub m: usize,
    pub h: f64,
    pub start_n: usize,
    pub n_terms: usize,
    #[serde(rename = "K")]
    pub k: Option<u32>,
    pub data: DataKind,
    pub n_vectors: usize,
    pub n_check: usize,
    pub tol: f64,
}

impl Default for InterpolateParams {
    fn default() -> Self {
        Self {
            node_spacing: 1.0,
            node_count: 4000,
            l: 2.0,
            m: 1,
            h: 1.5,
            start_n: 1,
            n_terms: 500,
            k: None,
            data: DataKind::Random,
            n_vectors: 25,
            n_check: 20,
            tol: 1e-6,
        }
    }
}

impl InterpolateParams {
    fn validate(&self) -> Result<(), String> {
        positive("node_spacing", self.node_spacing)?;
        positive("L", self.l)?;
        require(self.m >= 1, || "m must be at least 1".into())?;
        let ell = self.l / self.m as f64;
        require(self.h > 0.0 && self.h < ell, || {
            format!("need 0 < h < ell = L/m = {ell}, got h = {}", self.h)
        })?;
        require(self.n_terms >= 2, || "n_terms must be at least 2".into())?;
        require(self.n_check >= 1 && self.n_check <= self.n_terms, || {
            format!("n_check must lie in [1, n_terms], got {}", self.n_check)
        })?;
        require(self.n_vectors >= 1, || {
            "n_vectors must be at least 1".into()
        })?;
        positive("tol", self.tol)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanParams {
    pub p: f64,
    /// Explicit density grid; otherwise `n_alpha` points on `[alpha_min, alpha_max]`.
    pub alphas: Option<Vec<f64>>,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub n_alpha: usize,
    #[serde(rename = "N")]
    pub n: usize,
    /// Defaults to the smallest radius giving `3N` points per set.
    #[serde(rename = "R")]
    pub r: Option<f64>,
}

impl Default for ScanParams {
    fn default() -> Self {
        Self {
            p: 2.0,
            alphas: None,
            alpha_min: 0.3,
            alpha_max: 0.7,
            n_alpha: 10,
            n: 40,
            r: None,
        }
    }
}

impl ScanParams {
    pub fn grid(&self) -> Vec<f64> {
        self.alphas.clone().unwrap_or_else(|| {
            uniqlab_core::numeric::linspace(self.alpha_min, self.alpha_max, self.n_alpha)
        })
    }

    fn validate(&self) -> Result<(), String> {
        exponent("p", self.p)?;
        if self.alphas.is_none() {
            grid("alpha", self.alpha_min, self.alpha_max, self.n_alpha, 2)?;
        }
        let g = self.grid();
        require(!g.is_empty(), || "density grid is empty".into())?;
        for a in &g {
            positive("alpha", *a)?;
        }
        if let Some(r) = self.r {
            positive("R", r)?;
        }
        require(self.n <= 200, || {
            format!("N must be at most 200, got {}", self.n)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HardyParams {
    pub alpha: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub m_max: usize,
    pub n_max: usize,
}

impl Default for HardyParams {
    fn default() -> Self {
        Self {
            alpha: 0.4,
            r: 8.0,
            m_max: 10,
            n_max: 10,
        }
    }
}

impl HardyParams {
    fn validate(&self) -> Result<(), String> {
        positive("alpha", self.alpha)?;
        positive("R", self.r)?;
        require(self.m_max <= 60, || {
            format!("m_max must be at most 60, got {}", self.m_max)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransferParams {
    /// Hermite coefficients of `f`; when absent each `h_n` in
    /// `hermite_indices` is run with `K = n`.
    pub coeffs: Option<Vec<f64>>,
    pub hermite_indices: Vec<usize>,
    /// Overrides the hypothesis exponent `K`.
    #[serde(rename = "K")]
    pub k: Option<f64>,
    pub p: f64,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub grid_half_width: f64,
    pub n_grid: usize,
}

impl Default for TransferParams {
    fn default() -> Self {
        Self {
            coeffs: None,
            hermite_indices: (0..=6).collect(),
            k: None,
            p: 2.0,
            a: 1.0,
            b: 1.0,
            alpha: 0.4,
            beta: 0.4,
            r: 8.0,
            grid_half_width: 8.0,
            n_grid: 801,
        }
    }
}

impl TransferParams {
    fn validate(&self) -> Result<(), String> {
        match &self.coeffs {
            Some(c) => require(!c.is_empty() && c.iter().all(|v| v.is_finite()), || {
                "coeffs must be a nonempty list of finite numbers".into()
            })?,
            None => require(!self.hermite_indices.is_empty(), || {
                "hermite_indices is empty".into()
            })?,
        }
        if let Some(k) = self.k {
            require(k >= 0.0 && k.is_finite(), || {
                format!("K must be nonnegative, got {k}")
            })?;
        }
        exponent("p", self.p)?;
        for (name, v) in [
            ("a", self.a),
            ("b", self.b),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("R", self.r),
            ("grid_half_width", self.grid_half_width),
        ] {
            positive(name, v)?;
        }
        require(self.n_grid >= 11, || "n_grid must be at least 11".into())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MorganParams {
    pub p: f64,
    /// Defaults to `p/(p−1)`.
    pub q: Option<f64>,
}

impl Default for MorganParams {
    fn default() -> Self {
        Self { p: 2.0, q: None }
    }
}

impl MorganParams {
    fn validate(&self) -> Result<(), String> {
        exponent("p", self.p)?;
        if let Some(q) = self.q {
            uniqlab_core::pairs::check_conjugate(self.p, q).map_err(|e| e.to_string())?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdentitiesParams {
    pub trig_ps: Vec<f64>,
    pub n_theta: usize,
    pub n_eta: usize,
    pub n_algebra: usize,
    pub n_beurling: usize,
}

impl Default for IdentitiesParams {
    fn default() -> Self {
        Self {
            trig_ps: vec![1.5, 2.0, 3.0, 4.0],
            n_theta: 64,
            n_eta: 1000,
            n_algebra: 1000,
            n_beurling: 100,
        }
    }
}

impl IdentitiesParams {
    fn validate(&self) -> Result<(), String> {
        for p in &self.trig_ps {
            exponent("trig p", *p)?;
        }
        require(self.n_theta >= 1, || "n_theta must be at least 1".into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::config_hash;
    use serde_json::json;

    fn hash(command: Command, params: Value, seed: u64) -> String {
        let c = ExperimentConfig::new(command, params, seed);
        config_hash(&c, &c.resolve().unwrap()).unwrap()
    }

    #[test]
    fn defaults_hash_like_explicit_values() {
        let implicit = hash(Command::Hardy, json!({}), 0);
        let explicit = hash(
            Command::Hardy,
            json!({"n_max": 10, "alpha": 0.4, "R": 8.0, "m_max": 10}),
            0,
        );
        assert_eq!(implicit, explicit);
        assert_ne!(implicit, hash(Command::Hardy, json!({}), 1));
        assert_ne!(implicit, hash(Command::Hardy, json!({"m_max": 9}), 0));
    }

    #[test]
    fn from_json_rejects_unknown_fields() {
        assert!(
            ExperimentConfig::from_json(r#"{"command": "morgan", "seed": 0, "extra": 1}"#).is_err()
        );
        let c = ExperimentConfig::from_json(r#"{"command": "morgan", "seed": 3}"#).unwrap();
        assert_eq!((c.command, c.seed), (Command::Morgan, 3));
        let bad = ExperimentConfig::new(Command::Morgan, json!({"p": 2, "qq": 2}), 0);
        assert!(matches!(bad.resolve(), Err(CliError::Validation { .. })));
    }

    #[test]
    fn validation_catches_bad_values() {
        for (command, params) in [
            (Command::Classify, json!({"p": 1.0})),
            (Command::Scan, json!({"alpha_min": 0.8, "alpha_max": 0.7})),
            (Command::Interpolate, json!({"h": 3.0, "L": 2.0})),
            (Command::Slope, json!({"n_r": 1})),
            (Command::Indicator, json!({"function": "cosine"})),
        ] {
            let c = ExperimentConfig::new(command, params.clone(), 0);
            assert!(c.resolve().is_err(), "{} {params}", command.name());
        }
    }

    #[test]
    fn scan_grid_spans_range() {
        let Params::Scan(p) = ExperimentConfig::new(Command::Scan, json!({}), 0)
            .resolve()
            .unwrap()
        else {
            panic!("scan params")
        };
        let g = p.grid();
        assert_eq!(g.len(), 10);
        assert_eq!((g[0], g[9]), (0.3, 0.7));
    }
}
