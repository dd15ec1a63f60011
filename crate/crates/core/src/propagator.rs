//! Time-periodic generators, their Fourier series, and the propagator `𝓟(t₁, t₀)`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Complex, ComplexField};

use crate::error::{FloquetError, Result};
use crate::scalar::{cx, re, CMatrix, Real};
use crate::superop::{lindblad_to_superop, pauli, LindbladForm, Superoperator};

pub const DEFAULT_STEPS_PER_PERIOD: usize = 2000;
pub const DEFAULT_N_MAX: usize = 16;

/// Parameters of the driven dissipative qubit, in units of the level splitting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T: Real> {
    pub gamma: T,
    pub drive_e: T,
    pub omega: T,
    pub phi: T,
}

impl<T: Real> ModelParams<T> {
    pub fn new(gamma: T, drive_e: T, omega: T, phi: T) -> Result<Self> {
        let p = Self { gamma, drive_e, omega, phi };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > T::zero()) || !self.omega.is_finite() {
            return Err(FloquetError::InvalidParameter(format!("omega must be positive, got {:?}", self.omega)));
        }
        if !(self.gamma >= T::zero()) || !self.gamma.is_finite() {
            return Err(FloquetError::InvalidParameter(format!("gamma must be nonnegative, got {:?}", self.gamma)));
        }
        if !self.drive_e.is_finite() || !self.phi.is_finite() {
            return Err(FloquetError::InvalidParameter("drive amplitude and phase must be finite".into()));
        }
        Ok(())
    }

    pub fn period(&self) -> T {
        T::two_pi() / self.omega
    }

    /// `ε = E/ω`.
    pub fn epsilon(&self) -> T {
        self.drive_e / self.omega
    }

    /// `z = 2E/ω`.
    pub fn z(&self) -> T {
        T::lit(2.0) * self.drive_e / self.omega
    }
}

/// Fourier components `𝓛_n` for `n ∈ [−n_max, n_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries<T: Real> {
    n_max: usize,
    components: Vec<Superoperator<T>>,
}

impl<T: Real> FourierSeries<T> {
    /// `components[k]` holds harmonic `k − n_max`.
    pub fn new(components: Vec<Superoperator<T>>) -> Result<Self> {
        if components.len() % 2 == 0 {
            return Err(FloquetError::InvalidParameter("a Fourier series needs an odd number of components".into()));
        }
        let dim = components[0].dim();
        if let Some(bad) = components.iter().find(|c| c.dim() != dim) {
            return Err(FloquetError::DimensionMismatch { expected: dim, found: bad.dim() });
        }
        Ok(Self { n_max: components.len() / 2, components })
    }

    /// A single static component.
    pub fn constant(l0: Superoperator<T>) -> Self {
        Self { n_max: 0, components: vec![l0] }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }

    /// `𝓛_n`, or `None` outside the stored range.
    pub fn get(&self, n: i64) -> Option<&Superoperator<T>> {
        if n.unsigned_abs() as usize > self.n_max {
            return None;
        }
        self.components.get((n + self.n_max as i64) as usize)
    }

    /// `𝓛_n`, zero outside the stored range.
    pub fn component(&self, n: i64) -> Superoperator<T> {
        self.get(n).cloned().unwrap_or_else(|| Superoperator::zeros(self.dim()))
    }

    pub fn harmonics(&self) -> impl Iterator<Item = (i64, &Superoperator<T>)> {
        let n_max = self.n_max as i64;
        self.components.iter().enumerate().map(move |(k, c)| (k as i64 - n_max, c))
    }

    /// `Σ_n e^{inωt} 𝓛_n`.
    pub fn evaluate(&self, t: T, omega: T) -> Superoperator<T> {
        let mut m = CMatrix::zeros(self.dim() * self.dim(), self.dim() * self.dim());
        for (n, c) in self.harmonics() {
            let phase = omega * t * T::from_i64(n).unwrap();
            m += c.matrix() * Complex::new(phase.cos(), phase.sin());
        }
        Superoperator::new(m).expect("square")
    }

    /// Largest Frobenius norm among harmonics with `|n| > n`.
    pub fn tail_norm(&self, n: usize) -> T {
        self.harmonics().filter(|(k, _)| k.unsigned_abs() as usize > n).fold(T::zero(), |acc, (_, c)| acc.max(c.norm()))
    }

    pub fn map<F: Fn(i64, &Superoperator<T>) -> Superoperator<T>>(&self, f: F) -> Self {
        Self { n_max: self.n_max, components: self.harmonics().map(|(n, c)| f(n, c)).collect() }
    }
}

type EvalFn<T> = dyn Fn(T) -> Superoperator<T> + Send + Sync;

/// A `T`-periodic superoperator-valued function `t ↦ 𝓛(t)`.
#[derive(Clone)]
pub struct PeriodicGenerator<T: Real> {
    period: T,
    dim: usize,
    eval: Arc<EvalFn<T>>,
    fourier: Option<FourierSeries<T>>,
}

impl<T: Real> fmt::Debug for PeriodicGenerator<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicGenerator")
            .field("period", &self.period)
            .field("dim", &self.dim)
            .field("fourier_n_max", &self.fourier.as_ref().map(|s| s.n_max()))
            .finish()
    }
}

impl<T: Real> PeriodicGenerator<T> {
    pub fn new<F>(period: T, dim: usize, eval: F) -> Self
    where
        F: Fn(T) -> Superoperator<T> + Send + Sync + 'static,
    {
        Self { period, dim, eval: Arc::new(eval), fourier: None }
    }

    /// Generator defined by a finite Fourier series.
    pub fn from_series(period: T, series: FourierSeries<T>) -> Self {
        let omega = T::two_pi() / period;
        let s = series.clone();
        let mut g = Self::new(period, series.dim(), move |t| s.evaluate(t, omega));
        g.fourier = Some(series);
        g
    }

    pub fn with_fourier(mut self, series: FourierSeries<T>) -> Self {
        self.fourier = Some(series);
        self
    }

    pub fn eval(&self, t: T) -> Superoperator<T> {
        (self.eval)(t)
    }

    pub fn period(&self) -> T {
        self.period
    }

    pub fn omega(&self) -> T {
        T::two_pi() / self.period
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn fourier(&self) -> Option<&FourierSeries<T>> {
        self.fourier.as_ref()
    }
}

/// Static part `𝓛_0` of the qubit model: `−i[σ_z/2, ·]` plus the
/// dissipator with jump operator `σ_− = σ_x − iσ_y` at rate `γ`.
pub fn model_static<T: Real>(gamma: T) -> Superoperator<T> {
    let g = re(gamma);
    let z = cx::<T>(0.0, 0.0);
    let i = cx::<T>(0.0, 1.0);
    let d = CMatrix::from_row_slice(3, 3, &[g, i * g, z, -i * g, g, z, z, z, z]);
    let h = pauli::<T>(2) * re(T::lit(0.5));
    lindblad_to_superop(&LindbladForm::from_parts_unchecked(h, d))
}

/// `𝓛_1 = −i(E/2)e^{−iφ}[σ_x, ·]`; `𝓛_{−1}` is obtained with `φ → −φ`.
pub fn model_drive<T: Real>(drive_e: T, phi: T) -> Superoperator<T> {
    let h = pauli::<T>(0) * re(drive_e * T::lit(0.5));
    Superoperator::hamiltonian(&h).scale(Complex::new(phi.cos(), -phi.sin()))
}

/// Exact Fourier series (harmonics −1, 0, 1) of the driven qubit.
pub fn model_series<T: Real>(params: &ModelParams<T>) -> FourierSeries<T> {
    let l0 = model_static(params.gamma);
    let lp = model_drive(params.drive_e, params.phi);
    let lm = model_drive(params.drive_e, -params.phi);
    FourierSeries::new(vec![lm, l0, lp]).expect("three components")
}

/// `H(t) = σ_z/2 + E cos(ωt − φ)σ_x` with decay `γ`.
pub fn driven_qubit<T: Real>(params: &ModelParams<T>) -> Result<PeriodicGenerator<T>> {
    params.validate()?;
    Ok(PeriodicGenerator::from_series(params.period(), model_series(params)))
}

fn ensure_finite<T: Real>(l: &Superoperator<T>, t: T) -> Result<()> {
    if l.matrix().iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(FloquetError::Integration { t: t.to_f64_lossy() })
    }
}

/// `𝓟(t₁, t₀)` by fixed-step classical Runge–Kutta on `d𝓟/dt = 𝓛(t)𝓟`.
pub fn propagate<T: Real>(gen: &PeriodicGenerator<T>, t0: T, t1: T, steps_per_period: usize) -> Result<Superoperator<T>> {
    if steps_per_period < 100 {
        return Err(FloquetError::InvalidParameter(format!("steps_per_period must be at least 100, got {steps_per_period}")));
    }
    if t1 < t0 {
        return Err(FloquetError::InvalidParameter("t1 must not precede t0".into()));
    }
    let span = t1 - t0;
    let steps = ((span / gen.period() * T::from_usize(steps_per_period).unwrap()).ceil().to_f64_lossy() as usize).max(1);
    let h = span / T::from_usize(steps).unwrap();
    let half = T::lit(0.5);
    let (two, sixth) = (re(T::lit(2.0)), re(T::one() / T::lit(6.0)));
    let hc = re(h);
    let mut p = CMatrix::<T>::identity(gen.dim() * gen.dim(), gen.dim() * gen.dim());
    let mut l_start = gen.eval(t0);
    ensure_finite(&l_start, t0)?;
    for k in 0..steps {
        let t = t0 + h * T::from_usize(k).unwrap();
        let l_mid = gen.eval(t + h * half);
        ensure_finite(&l_mid, t + h * half)?;
        let t_end = t + h;
        let l_end = gen.eval(t_end);
        ensure_finite(&l_end, t_end)?;
        let k1 = l_start.matrix() * &p;
        let k2 = l_mid.matrix() * (&p + &k1 * (hc * re(half)));
        let k3 = l_mid.matrix() * (&p + &k2 * (hc * re(half)));
        let k4 = l_end.matrix() * (&p + &k3 * hc);
        p += (k1 + (k2 + k3) * two + k4) * (hc * sixth);
        l_start = l_end;
    }
    Superoperator::new(p)
}

/// One-cycle map `𝓟(t₀ + T, t₀)` of the driven qubit.
pub fn one_cycle_map<T: Real>(params: &ModelParams<T>, t0: T, steps_per_period: usize) -> Result<Superoperator<T>> {
    let gen = driven_qubit(params)?;
    propagate(&gen, t0, t0 + params.period(), steps_per_period)
}

/// Fourier components of `gen` by an equispaced DFT over one period.
pub fn fourier_components<T: Real>(gen: &PeriodicGenerator<T>, n_max: usize, samples: usize) -> Result<FourierSeries<T>> {
    let required = 4 * n_max + 1;
    if samples < required {
        return Err(FloquetError::Aliasing { samples, n_max, required });
    }
    let sf = T::from_usize(samples).unwrap();
    let values: Vec<Superoperator<T>> = (0..samples).map(|s| gen.eval(gen.period() * T::from_usize(s).unwrap() / sf)).collect();
    let d2 = gen.dim() * gen.dim();
    let mut comps = Vec::with_capacity(2 * n_max + 1);
    for n in -(n_max as i64)..=n_max as i64 {
        let mut m = CMatrix::<T>::zeros(d2, d2);
        for (s, v) in values.iter().enumerate() {
            let arg = -T::two_pi() * T::from_i64(n * s as i64).unwrap() / sf;
            m += v.matrix() * Complex::new(ComplexField::cos(arg), ComplexField::sin(arg));
        }
        comps.push(Superoperator::new(m / re(sf))?);
    }
    FourierSeries::new(comps)
}
