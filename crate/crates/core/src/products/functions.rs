use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ProductError;

/// Descriptive data attached to an evaluator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionMeta {
    /// Registry name, e.g. `"gaussian"` or `"sine_decay(1,2)"`.
    pub name: String,
    pub order: f64,
    /// Spacing of the zero set `{k·spacing : k ∈ ℤ}` when known.
    pub zero_spacing: Option<f64>,
}

/// An entire function given by a deterministic evaluator.
pub trait EntireFunction: Sync {
    fn eval(&self, z: Complex64) -> Complex64;

    /// `log|f(z)|`; implementations may override with an overflow-free form.
    fn log_abs(&self, z: Complex64) -> f64 {
        self.eval(z).norm().ln()
    }

    fn meta(&self) -> FunctionMeta;
}

/// Test functions with closed-form moduli.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BuiltinFunction {
    /// `e^{−πz²}`
    Gaussian,
    /// `sin(πz)/(πz)`
    Sinc,
    /// `sin(2πbz)·e^{−πdz}`
    SineDecay { b: f64, d: f64 },
    /// `c`
    Constant { c: f64 },
    /// `sin(πz)`
    Sine,
}

/// `log|sin(x + iy)|` without forming `sinh y`.
pub fn log_abs_sin(w: Complex64) -> f64 {
    let y = w.im.abs();
    let e = (-2.0 * y).exp();
    let s = w.re.sin();
    y - LN_2 + 0.5 * ((1.0 - e) * (1.0 - e) + 4.0 * s * s * e).ln()
}

impl EntireFunction for BuiltinFunction {
    fn eval(&self, z: Complex64) -> Complex64 {
        match *self {
            Self::Gaussian => (-PI * z * z).exp(),
            Self::Sinc => {
                if z.norm() < 1e-8 {
                    Complex64::new(1.0, 0.0) - PI * PI * z * z / 6.0
                } else {
                    (PI * z).sin() / (PI * z)
                }
            }
            Self::SineDecay { b, d } => (2.0 * PI * b * z).sin() * (-PI * d * z).exp(),
            Self::Constant { c } => Complex64::new(c, 0.0),
            Self::Sine => (PI * z).sin(),
        }
    }

    fn log_abs(&self, z: Complex64) -> f64 {
        match *self {
            Self::Gaussian => -PI * (z * z).re,
            Self::Sinc => {
                if z.norm() < 1e-8 {
                    self.eval(z).norm().ln()
                } else {
                    log_abs_sin(PI * z) - (PI * z.norm()).ln()
                }
            }
            Self::SineDecay { b, d } => log_abs_sin(2.0 * PI * b * z) - PI * d * z.re,
            Self::Constant { c } => c.abs().ln(),
            Self::Sine => log_abs_sin(PI * z),
        }
    }

    fn meta(&self) -> FunctionMeta {
        let (order, zero_spacing) = match *self {
            Self::Gaussian => (2.0, None),
            Self::Sinc | Self::Sine => (1.0, Some(1.0)),
            Self::SineDecay { b, .. } => (1.0, Some(0.5 / b)),
            Self::Constant { .. } => (0.0, None),
        };
        FunctionMeta {
            name: self.to_string(),
            order,
            zero_spacing,
        }
    }
}

impl fmt::Display for BuiltinFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Gaussian => write!(f, "gaussian"),
            Self::Sinc => write!(f, "sinc"),
            Self::Sine => write!(f, "sine"),
            Self::SineDecay { b, d } => write!(f, "sine_decay({b},{d})"),
            Self::Constant { c } => write!(f, "constant({c})"),
        }
    }
}

fn parse_args(s: &str, prefix: &str) -> Option<Vec<f64>> {
    let inner = s
        .strip_prefix(prefix)?
        .strip_prefix('(')?
        .strip_suffix(')')?;
    inner.split(',').map(|t| t.trim().parse().ok()).collect()
}

impl FromStr for BuiltinFunction {
    type Err = ProductError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let unknown = || ProductError::UnknownFunction(s.to_string());
        match s {
            "gaussian" => return Ok(Self::Gaussian),
            "sinc" => return Ok(Self::Sinc),
            "sine" => return Ok(Self::Sine),
            _ => {}
        }
        if let Some(a) = parse_args(s, "sine_decay") {
            return match a[..] {
                [b, d] if b > 0.0 && d.is_finite() => Ok(Self::SineDecay { b, d }),
                _ => Err(unknown()),
            };
        }
        if let Some(a) = parse_args(s, "constant") {
            return match a[..] {
                [c] if c.is_finite() => Ok(Self::Constant { c }),
                _ => Err(unknown()),
            };
        }
        Err(unknown())
    }
}
