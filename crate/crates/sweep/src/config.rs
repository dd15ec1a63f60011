//! Sweep configuration, its key-value file format and validation.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::error::SweepError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    /// Logarithm of the propagated one-cycle map.
    Exact,
    /// Magnus expansion of the lab-frame generator.
    MagnusDirect,
    /// Magnus expansion in the rotating frame.
    MagnusRot,
    /// Van Vleck Floquet generator in the rotating frame.
    VanvleckRot,
    /// Van Vleck effective generator in the rotating frame.
    KeffRot,
}

impl Pipeline {
    pub fn orders(self) -> std::ops::RangeInclusive<usize> {
        match self {
            Pipeline::Exact => 1..=1,
            Pipeline::MagnusRot => 1..=2,
            Pipeline::MagnusDirect | Pipeline::VanvleckRot | Pipeline::KeffRot => 1..=3,
        }
    }
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pipeline::Exact => "exact",
            Pipeline::MagnusDirect => "magnus-direct",
            Pipeline::MagnusRot => "magnus-rot",
            Pipeline::VanvleckRot => "vanvleck-rot",
            Pipeline::KeffRot => "keff-rot",
        };
        f.write_str(s)
    }
}

impl FromStr for Pipeline {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as clap::ValueEnum>::from_str(s, true).map_err(|_| SweepError::Usage(format!("unknown pipeline `{s}`")))
    }
}

/// Inclusive linear grid `min, …, max` with `count` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Range {
    pub fn new(min: f64, max: f64, count: usize) -> Self {
        Self { min, max, count }
    }

    pub fn values(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count).map(|i| if i + 1 == self.count { self.max } else { self.min + step * i as f64 }).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub gamma: f64,
    pub phi: f64,
    pub e_range: Range,
    pub omega_range: Range,
    pub pipeline: Pipeline,
    pub order: usize,
    pub x_range: i32,
    pub steps_per_period: usize,
    pub omega_floor: f64,
    pub output_path: PathBuf,
    pub workers: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            gamma: 0.01,
            phi: 0.0,
            e_range: Range::new(0.0, 2.0, 20),
            omega_range: Range::new(0.3, 3.0, 20),
            pipeline: Pipeline::Exact,
            order: 1,
            x_range: floquet_core::markovianity::DEFAULT_X_RANGE,
            steps_per_period: floquet_core::propagator::DEFAULT_STEPS_PER_PERIOD,
            omega_floor: 0.3,
            output_path: PathBuf::from("sweep.csv"),
            workers: 1,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), SweepError> {
        let usage = |m: String| Err(SweepError::Usage(m));
        for (name, r) in [("e", &self.e_range), ("omega", &self.omega_range)] {
            if r.count < 2 {
                return usage(format!("{name} count must be at least 2, got {}", r.count));
            }
            if !(r.min.is_finite() && r.max.is_finite()) || r.max < r.min {
                return usage(format!("{name} range [{}, {}] is invalid", r.min, r.max));
            }
        }
        if self.e_range.min < 0.0 {
            return usage(format!("e range must be nonnegative, got min {}", self.e_range.min));
        }
        if self.omega_range.min <= 0.0 {
            return usage(format!("omega range must be positive, got min {}", self.omega_range.min));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return usage(format!("gamma must be nonnegative, got {}", self.gamma));
        }
        if !self.phi.is_finite() {
            return usage("phi must be finite".into());
        }
        if !self.pipeline.orders().contains(&self.order) {
            let r = self.pipeline.orders();
            return usage(format!("pipeline {} supports orders {}..={}, got {}", self.pipeline, r.start(), r.end(), self.order));
        }
        if self.x_range < 0 {
            return usage(format!("x-range must be nonnegative, got {}", self.x_range));
        }
        if self.steps_per_period < 100 {
            return usage(format!("steps-per-period must be at least 100, got {}", self.steps_per_period));
        }
        if self.workers == 0 {
            return usage("workers must be at least 1".into());
        }
        if self.omega_floor.is_nan() {
            return usage("omega-floor must be a number".into());
        }
        Ok(())
    }

    /// Applies `key = value` entries; keys use the long flag names with `-` or `_`.
    pub fn apply_entries(&mut self, entries: &BTreeMap<String, String>) -> Result<(), SweepError> {
        for (key, value) in entries {
            let bad = || SweepError::Usage(format!("invalid value `{value}` for `{key}`"));
            let f = || value.parse::<f64>().map_err(|_| bad());
            let u = || value.parse::<usize>().map_err(|_| bad());
            match key.replace('_', "-").as_str() {
                "gamma" => self.gamma = f()?,
                "phi" => self.phi = f()?,
                "e-min" => self.e_range.min = f()?,
                "e-max" => self.e_range.max = f()?,
                "e-count" => self.e_range.count = u()?,
                "omega-min" => self.omega_range.min = f()?,
                "omega-max" => self.omega_range.max = f()?,
                "omega-count" => self.omega_range.count = u()?,
                "pipeline" => self.pipeline = value.parse()?,
                "order" => self.order = u()?,
                "x-range" => self.x_range = value.parse().map_err(|_| bad())?,
                "steps-per-period" => self.steps_per_period = u()?,
                "omega-floor" => self.omega_floor = f()?,
                "out" | "output-path" => self.output_path = PathBuf::from(value),
                "workers" => self.workers = u()?,
                _ => return Err(SweepError::Usage(format!("unknown config key `{key}`"))),
            }
        }
        Ok(())
    }
}

/// Parses `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>, SweepError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| SweepError::Usage(format!("config line {}: expected `key = value`", i + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}
