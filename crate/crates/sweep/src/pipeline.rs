//! Per-point evaluation of every pipeline.

use std::time::Instant;

use floquet_core::bessel::bessel_j;
use floquet_core::markovianity::TOL_MU;
use floquet_core::propagator::{model_series, model_static};
use floquet_core::{
    floquet_verdict, frobenius_distance, magnus_order, one_cycle_map, rotfr_components_analytic, rotfr_components_bessel_matrix,
    vanvleck_floquet_generator, vanvleck_keff, FourierSeries64, MarkovianityVerdict, ModelParams64, Superoperator64,
};

use crate::config::{Pipeline, SweepConfig};
use crate::error::SweepError;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub e: f64,
    pub omega: f64,
    /// Zero when a Lindblad-form generator exists; `inf` without a
    /// Hermiticity-preserving logarithm; NaN when skipped or degenerate.
    pub mu_min: f64,
    pub has_lindbladian: bool,
    /// Distance to the exact generator; zero for the exact pipeline itself.
    pub frobenius_to_exact: f64,
    /// Branch index of the exact logarithm (0 when it has no complex pair).
    pub best_branch: i32,
    pub degenerate_flag: bool,
    pub wall_time_ms: u64,
}

impl SweepRecord {
    fn skipped(e: f64, omega: f64) -> Self {
        Self {
            e,
            omega,
            mu_min: f64::NAN,
            has_lindbladian: false,
            frobenius_to_exact: f64::NAN,
            best_branch: 0,
            degenerate_flag: false,
            wall_time_ms: 0,
        }
    }
}

/// Harmonic cutoff for rotating-frame series: Bessel tails below `1e-14`.
pub fn rotating_n_max(z: f64) -> usize {
    let mut n = z.ceil() as usize + 20;
    while bessel_j(n as i64, z).abs() > 1e-14 || bessel_j(n as i64 + 1, z).abs() > 1e-14 {
        n += 5;
    }
    n
}

/// Fourier components of the rotating-frame generator (closed forms at `φ = 0`).
pub fn rotating_series(params: &ModelParams64) -> Result<FourierSeries64, SweepError> {
    let n_max = rotating_n_max(params.z());
    let s = if params.phi == 0.0 {
        rotfr_components_analytic(params, n_max)?
    } else {
        rotfr_components_bessel_matrix(params, n_max)?
    };
    Ok(s.components)
}

/// Approximate Floquet generator at stroboscopic times `t₀ = 0`.
pub fn approximate_generator(pipeline: Pipeline, order: usize, params: &ModelParams64) -> Result<Superoperator64, SweepError> {
    let w = params.omega;
    let gen = match pipeline {
        Pipeline::Exact => return Err(SweepError::Usage("the exact pipeline has no approximate generator".into())),
        Pipeline::MagnusDirect => magnus_order(&model_series(params), w, order)?.generator,
        Pipeline::MagnusRot => magnus_order(&rotating_series(params)?, w, order)?.generator,
        Pipeline::VanvleckRot => vanvleck_floquet_generator(&rotating_series(params)?, w, order, 0.0)?.generator,
        Pipeline::KeffRot => vanvleck_keff(&rotating_series(params)?, w, order)?.generator,
    };
    Ok(gen)
}

/// Verdict of the exact one-cycle map, with `𝓛₀` as the branch reference.
pub fn exact_verdict(params: &ModelParams64, config: &SweepConfig) -> Result<MarkovianityVerdict<f64>, SweepError> {
    let map = one_cycle_map(params, 0.0, config.steps_per_period)?;
    Ok(floquet_verdict(&map, params.period(), config.x_range, Some(&model_static(params.gamma)))?)
}

fn exact_branch(v: &MarkovianityVerdict<f64>) -> i32 {
    v.best_branch.first().copied().unwrap_or(0)
}

/// Evaluates one grid point.
pub fn evaluate_point(config: &SweepConfig, e: f64, omega: f64) -> Result<SweepRecord, SweepError> {
    if omega < config.omega_floor {
        return Ok(SweepRecord::skipped(e, omega));
    }
    let start = Instant::now();
    let params = ModelParams64::new(config.gamma, e, omega, config.phi)?;
    let exact = exact_verdict(&params, config)?;
    let mut rec = SweepRecord {
        e,
        omega,
        mu_min: f64::NAN,
        has_lindbladian: false,
        frobenius_to_exact: f64::NAN,
        best_branch: exact_branch(&exact),
        degenerate_flag: exact.degenerate_spectrum_flag,
        wall_time_ms: 0,
    };
    match config.pipeline {
        Pipeline::Exact => {
            rec.mu_min = exact.mu_min;
            rec.has_lindbladian = exact.has_floquet_lindbladian;
            if exact.generator.is_some() {
                rec.frobenius_to_exact = 0.0;
            }
        }
        pipeline => {
            let approx = approximate_generator(pipeline, config.order, &params)?;
            let v = MarkovianityVerdict::for_generator(&approx);
            rec.mu_min = v.mu_min;
            rec.has_lindbladian = v.has_floquet_lindbladian;
            if let Some(k) = &exact.generator {
                rec.frobenius_to_exact = frobenius_distance(&approx, k)?;
            }
        }
    }
    debug_assert!(rec.mu_min.is_nan() || rec.has_lindbladian == (rec.mu_min < TOL_MU));
    rec.wall_time_ms = start.elapsed().as_millis() as u64;
    Ok(rec)
}
