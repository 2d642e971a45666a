//! Problem parameters and the estimator coefficient algebra.

use libm::erfc;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Horizon multiplier: the default step cap is this many times the mean
/// crossing time `l / s`.
pub const DEFAULT_HORIZON_MULTIPLIER: f64 = 50.0;

/// Step cap used when the drift is zero and no horizon was supplied.
pub const DRIFTLESS_DEFAULT_T_MAX: u64 = 1_000_000;

const MIN_DEFAULT_T_MAX: u64 = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeMode {
    /// Gaussian random walk, unit time step.
    Discrete,
    /// Brownian motion with drift, sampled on a uniform grid of step `dt`.
    Brownian,
}

impl std::fmt::Display for TimeMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TimeMode::Discrete => f.write_str("discrete"),
            TimeMode::Brownian => f.write_str("brownian"),
        }
    }
}

impl std::str::FromStr for TimeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "discrete" => Ok(TimeMode::Discrete),
            "brownian" => Ok(TimeMode::Brownian),
            other => Err(Error::Config(format!(
                "unknown mode `{other}` (expected `discrete` or `brownian`)"
            ))),
        }
    }
}

/// One problem instance: drift `s`, observation noise scale `eps`, level `l`.
///
/// `s = 0`, `l = 0` and `eps = 0` are accepted; the bound evaluators reject
/// them individually where their hypotheses require strict positivity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkParams {
    pub s: f64,
    pub eps: f64,
    pub l: f64,
    pub mode: TimeMode,
    /// Grid step in Brownian mode. Always 1 in discrete mode.
    pub dt: f64,
    /// Horizon cap, in steps.
    pub t_max: u64,
    /// Brownian mode only: sample a bridge crossing inside each grid step.
    pub bridge_correction: bool,
}

impl WalkParams {
    pub fn discrete(s: f64, eps: f64, l: f64) -> Result<Self> {
        Self::build(s, eps, l, TimeMode::Discrete, 1.0)
    }

    pub fn brownian(s: f64, eps: f64, l: f64, dt: f64) -> Result<Self> {
        Self::build(s, eps, l, TimeMode::Brownian, dt)
    }

    pub fn new(s: f64, eps: f64, l: f64, mode: TimeMode, dt: f64) -> Result<Self> {
        match mode {
            TimeMode::Discrete => Self::discrete(s, eps, l),
            TimeMode::Brownian => Self::brownian(s, eps, l, dt),
        }
    }

    fn build(s: f64, eps: f64, l: f64, mode: TimeMode, dt: f64) -> Result<Self> {
        let mut params = WalkParams {
            s,
            eps,
            l,
            mode,
            dt,
            t_max: 1,
            bridge_correction: mode == TimeMode::Brownian,
        };
        check_dt(mode, dt)?;
        params.t_max = default_t_max(s, l, params.step());
        params.validate()?;
        Ok(params)
    }

    pub fn with_t_max(mut self, t_max: u64) -> Result<Self> {
        self.t_max = t_max;
        self.validate()?;
        Ok(self)
    }

    pub fn with_bridge_correction(mut self, on: bool) -> Self {
        self.bridge_correction = on;
        self
    }

    /// Time elapsed per simulated step.
    pub fn step(&self) -> f64 {
        match self.mode {
            TimeMode::Discrete => 1.0,
            TimeMode::Brownian => self.dt,
        }
    }

    pub fn validate(&self) -> Result<()> {
        non_negative("s", self.s)?;
        non_negative("eps", self.eps)?;
        non_negative("l", self.l)?;
        check_dt(self.mode, self.dt)?;
        if self.mode == TimeMode::Discrete && self.dt != 1.0 {
            return Err(Error::domain("dt", self.dt, "must be exactly 1 in discrete mode"));
        }
        if self.t_max < 1 {
            return Err(Error::domain("t_max", 0.0, "must be at least one step"));
        }
        Ok(())
    }
}

fn check_dt(mode: TimeMode, dt: f64) -> Result<()> {
    if mode == TimeMode::Brownian && !(dt.is_finite() && dt > 0.0) {
        return Err(Error::domain("dt", dt, "must be finite and positive"));
    }
    Ok(())
}

fn non_negative(name: &'static str, v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::domain(name, v, "must be finite and non-negative"));
    }
    Ok(())
}

/// Default step cap: `50 l / s` in time units, converted to steps.
pub fn default_t_max(s: f64, l: f64, step: f64) -> u64 {
    if s > 0.0 {
        let steps = (DEFAULT_HORIZON_MULTIPLIER * l / (s * step)).ceil();
        (steps as u64).max(MIN_DEFAULT_T_MAX)
    } else {
        DRIFTLESS_DEFAULT_T_MAX
    }
}

/// The tracking coefficient `c` of the rule `Xhat_t = s t + c (Y_t - s t)`,
/// together with the variance-minimizing coefficient for the noise level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub c: f64,
    pub c_bar: f64,
}

impl EstimatorConfig {
    pub fn new(c: f64, eps: f64) -> Result<Self> {
        non_negative("c", c)?;
        Ok(EstimatorConfig {
            c,
            c_bar: optimal_c(eps)?,
        })
    }

    /// The rule with `c = 1 / (1 + eps^2)`.
    pub fn optimal(eps: f64) -> Result<Self> {
        let c_bar = optimal_c(eps)?;
        Ok(EstimatorConfig { c: c_bar, c_bar })
    }

    pub fn is_optimal(&self) -> bool {
        self.c == self.c_bar
    }
}

/// How the tracking coefficient is chosen: `"auto"` (the optimal `c`) or a
/// fixed number.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Coefficient {
    #[default]
    Auto,
    Value(f64),
}

impl Coefficient {
    pub fn resolve(self, eps: f64) -> Result<EstimatorConfig> {
        match self {
            Coefficient::Auto => EstimatorConfig::optimal(eps),
            Coefficient::Value(c) => EstimatorConfig::new(c, eps),
        }
    }
}

impl std::str::FromStr for Coefficient {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(Coefficient::Auto);
        }
        s.parse::<f64>()
            .map(Coefficient::Value)
            .map_err(|_| Error::Config(format!("coefficient must be `auto` or a number, got `{s}`")))
    }
}

impl Serialize for Coefficient {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Coefficient::Auto => ser.serialize_str("auto"),
            Coefficient::Value(c) => ser.serialize_f64(*c),
        }
    }
}

impl<'de> Deserialize<'de> for Coefficient {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(de)? {
            Raw::Num(c) => Ok(Coefficient::Value(c)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Standard Gaussian upper tail `Q(x) = P(N(0,1) > x)`.
pub fn gaussian_tail(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain("x", x, "Gaussian tail argument must be finite"));
    }
    Ok(0.5 * erfc(x / std::f64::consts::SQRT_2))
}

/// `1 / (1 + eps^2)`: minimizes the per-step variance of `X - Xhat`.
pub fn optimal_c(eps: f64) -> Result<f64> {
    non_negative("eps", eps)?;
    Ok(1.0 / (1.0 + eps * eps))
}

/// Per-step variance of `X - Xhat^(c)`, `(1 - c)^2 + c^2 eps^2`.
pub fn variance_factor(c: f64, eps: f64) -> Result<f64> {
    non_negative("c", c)?;
    non_negative("eps", eps)?;
    Ok((1.0 - c).powi(2) + c * c * eps * eps)
}
