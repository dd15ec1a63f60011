//! Rotating-frame transformation for self-commuting single-harmonic drives.
//!
//! For a drive `𝓛_d(t) = 2cos(ωt − φ) 𝓛_d'` with `A = i𝓛_d'` Hermitian the frame
//! `Λ(t) = exp(∫₀ᵗ𝓛_d)` has Fourier components given by matrix Bessel
//! functions of `A`, and the rotating-frame generator is `𝓛̃ = Λ⁻¹𝓛₀Λ`.

use nalgebra::Complex;

use crate::bessel::{bessel_i_scaled, bessel_j, bessel_j_symmetric};
use crate::error::{FloquetError, Result};
use crate::expansions::{ExpansionResult, Frame};
use crate::linalg::{max_abs, HermitianEigen};
use crate::propagator::{model_drive, model_static, FourierSeries, ModelParams, PeriodicGenerator};
use crate::scalar::{cx, re, CMatrix, Real};
use crate::superop::{generic_superop, lindblad_to_superop, pauli, LindbladForm, Superoperator};

const TOL_BESSEL_TAIL: f64 = 1e-14;
const TOL_INVERSE: f64 = 1e-10;
const INVERSE_SAMPLES: usize = 32;
const DIFF_STEP_FRACTION: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstructionRoute {
    AnalyticQubit,
    BesselMatrix,
}

/// Fourier components `𝓛̃_n` of the rotating-frame generator.
#[derive(Debug, Clone)]
pub struct RotatingFrameSeries<T: Real> {
    pub base: ModelParams<T>,
    pub z: T,
    pub components: FourierSeries<T>,
    pub construction_route: ConstructionRoute,
}

impl<T: Real> RotatingFrameSeries<T> {
    pub fn generator(&self) -> PeriodicGenerator<T> {
        PeriodicGenerator::from_series(self.base.period(), self.components.clone())
    }
}

fn even(n: i64) -> bool {
    n % 2 == 0
}

fn require_phi_zero<T: Real>(params: &ModelParams<T>) -> Result<()> {
    params.validate()?;
    if params.phi != T::zero() {
        return Err(FloquetError::UnsupportedDrive(format!(
            "closed forms need phi = 0, got {:?}; use the Bessel-matrix route",
            params.phi
        )));
    }
    Ok(())
}

/// `χ(t) = (E/ω)(sin(ωt − φ) + sin φ)`.
pub fn frame_angle<T: Real>(params: &ModelParams<T>, t: T) -> T {
    params.epsilon() * ((params.omega * t - params.phi).sin() + params.phi.sin())
}

fn conjugation<T: Real>(chi: T) -> Superoperator<T> {
    let u = CMatrix::<T>::identity(2, 2) * re(chi.cos()) - pauli::<T>(0) * cx::<T>(0.0, 1.0) * re(chi.sin());
    Superoperator::sandwich(&u, &u.adjoint())
}

/// `Λ(t)`: conjugation by `U(t) = exp(−iχ(t)σ_x)`.
pub fn rotating_frame<T: Real>(params: &ModelParams<T>, t: T) -> Superoperator<T> {
    conjugation(frame_angle(params, t))
}

pub fn rotating_frame_inverse<T: Real>(params: &ModelParams<T>, t: T) -> Superoperator<T> {
    conjugation(-frame_angle(params, t))
}

/// `t ↦ Λ⁻¹(t) 𝓛₀ Λ(t)` evaluated directly in the time domain.
pub fn rotating_generator<T: Real>(params: &ModelParams<T>) -> Result<PeriodicGenerator<T>> {
    params.validate()?;
    let p = *params;
    let l0 = model_static(p.gamma);
    Ok(PeriodicGenerator::new(p.period(), 2, move |t| {
        &(&rotating_frame_inverse(&p, t) * &l0) * &rotating_frame(&p, t)
    }))
}

/// Hermitian `A = i𝓛_d'`, or an unsupported-drive error.
fn drive_generator<T: Real>(drive: &Superoperator<T>) -> Result<HermitianEigen<T>> {
    let a = drive.matrix() * cx::<T>(0.0, 1.0);
    let dev = max_abs(&(&a - a.adjoint()));
    if dev > T::tol(1e-12) * (T::one() + max_abs(&a)) {
        return Err(FloquetError::UnsupportedDrive(format!(
            "i times the drive must be Hermitian for a real Bessel argument (deviation {:e})",
            dev.to_f64_lossy()
        )));
    }
    Ok(HermitianEigen::new(&a))
}

fn bessel_cutoff<T: Real>(n_max: usize, x_max: T) -> usize {
    let mut k = n_max + x_max.to_f64_lossy().ceil() as usize + 20;
    while bessel_j(k as i64, x_max).abs() > T::tol(TOL_BESSEL_TAIL) || bessel_j(k as i64 + 1, x_max).abs() > T::tol(TOL_BESSEL_TAIL) {
        k += 10;
    }
    k
}

/// Components `Λ_n` and `Λ⁻¹_n` for `|n| ≤ n_max` of the frame generated by
/// `𝓛_d(t) = 2cos(ωt − φ)·drive`.
///
/// `Λ_n = e^{−inφ} S J_n(−2A/ω)` and `Λ⁻¹_n = e^{−inφ} S⁻¹ J_n(2A/ω)` with
/// `S = exp((2 sin φ/ω) 𝓛_d')`.
pub fn frame_components<T: Real>(drive: &Superoperator<T>, omega: T, phi: T, n_max: usize) -> Result<(FourierSeries<T>, FourierSeries<T>)> {
    let eig = drive_generator(drive)?;
    let two = T::lit(2.0);
    let x_max = eig.values.iter().fold(T::zero(), |m, &a| m.max(two * a.abs() / omega));
    let k = bessel_cutoff(n_max, x_max);
    let tables: Vec<Vec<T>> = eig.values.iter().map(|&a| bessel_j_symmetric(k, -two * a / omega)).collect();
    let shift = drive.scale(re(two * phi.sin() / omega));
    let (s, s_inv) = (shift.exp(), (-shift).exp());
    let matrix_bessel = |n: i64, sign: T| -> Superoperator<T> {
        // J_n(−x) = (−1)ⁿ J_n(x)
        let flip = if sign > T::zero() || even(n) { T::one() } else { -T::one() };
        let values: Vec<T> = tables.iter().map(|tab| tab[(n + k as i64) as usize] * flip).collect();
        let mut m = eig.vectors.clone();
        for (c, v) in values.iter().enumerate() {
            m.column_mut(c).scale_mut(*v);
        }
        Superoperator::new(m * eig.vectors.adjoint()).expect("square superoperator")
    };
    let phase = |n: i64| Complex::new((-nf::<T>(n) * phi).cos(), (-nf::<T>(n) * phi).sin());
    let mut lam = Vec::with_capacity(2 * n_max + 1);
    let mut lam_inv = Vec::with_capacity(2 * n_max + 1);
    for n in -(n_max as i64)..=n_max as i64 {
        lam.push((&s * &matrix_bessel(n, T::one())).scale(phase(n)));
        lam_inv.push((&s_inv * &matrix_bessel(n, -T::one())).scale(phase(n)));
    }
    Ok((FourierSeries::new(lam)?, FourierSeries::new(lam_inv)?))
}

fn nf<T: Real>(n: i64) -> T {
    T::from_i64(n).unwrap()
}

/// `𝓛̃_n = Σ_k Λ⁻¹_{n−k} 𝓛₀ Λ_k` for a self-commuting single-harmonic drive.
pub fn bessel_matrix_components<T: Real>(l0: &Superoperator<T>, drive: &Superoperator<T>, omega: T, phi: T, n_max: usize) -> Result<FourierSeries<T>> {
    let eig = drive_generator(drive)?;
    let x_max = eig.values.iter().fold(T::zero(), |m, &a| m.max(T::lit(2.0) * a.abs() / omega));
    let k = bessel_cutoff(n_max, x_max);
    let (lam, lam_inv) = frame_components(drive, omega, phi, n_max + k)?;
    let right: Vec<Superoperator<T>> = (-(k as i64)..=k as i64).map(|j| l0 * &lam.component(j)).collect();
    let mut out = Vec::with_capacity(2 * n_max + 1);
    for n in -(n_max as i64)..=n_max as i64 {
        let mut acc = Superoperator::zeros(l0.dim());
        for (i, j) in (-(k as i64)..=k as i64).enumerate() {
            acc = acc + &lam_inv.component(n - j) * &right[i];
        }
        out.push(acc);
    }
    FourierSeries::new(out)
}

/// Rotating-frame components of the driven qubit via matrix Bessel functions (any `φ`).
pub fn rotfr_components_bessel_matrix<T: Real>(params: &ModelParams<T>, n_max: usize) -> Result<RotatingFrameSeries<T>> {
    params.validate()?;
    let components = bessel_matrix_components(&model_static(params.gamma), &model_drive(params.drive_e, T::zero()), params.omega, params.phi, n_max)?;
    Ok(RotatingFrameSeries { base: *params, z: params.z(), components, construction_route: ConstructionRoute::BesselMatrix })
}

/// `(H_n, d_n)` of the qubit rotating-frame components at `φ = 0`.
pub fn rotfr_component_form<T: Real>(gamma: T, z: T, n: i64) -> (CMatrix<T>, CMatrix<T>) {
    let (jn, jn2) = (bessel_j(n, z), bessel_j(n, z + z));
    let (e, o) = if even(n) { (T::one(), T::zero()) } else { (T::zero(), T::one()) };
    let delta = if n == 0 { T::one() } else { T::zero() };
    let half = T::lit(0.5);
    let h = pauli::<T>(2) * re(half * jn * e) - pauli::<T>(1) * cx::<T>(0.0, 1.0) * re(half * jn * o);
    let g = re(gamma);
    let c = |a: T, b: T| Complex::new(a, b);
    #[rustfmt::skip]
    let d = CMatrix::from_row_slice(3, 3, &[
        c(delta, T::zero()), c(T::zero(), e * jn), c(-o * jn, T::zero()),
        c(T::zero(), -e * jn), c(half * (delta + e * jn2), T::zero()), c(T::zero(), half * o * jn2),
        c(o * jn, T::zero()), c(T::zero(), half * o * jn2), c(half * (delta - e * jn2), T::zero()),
    ]) * g;
    (h, d)
}

/// Rotating-frame components of the driven qubit from Bessel closed forms (`φ = 0`).
pub fn rotfr_components_analytic<T: Real>(params: &ModelParams<T>, n_max: usize) -> Result<RotatingFrameSeries<T>> {
    require_phi_zero(params)?;
    let z = params.z();
    let components = (-(n_max as i64)..=n_max as i64)
        .map(|n| {
            let (h, d) = rotfr_component_form(params.gamma, z, n);
            generic_superop(&LindbladForm::from_parts_unchecked(h, d))
        })
        .collect();
    Ok(RotatingFrameSeries { base: *params, z, components: FourierSeries::new(components)?, construction_route: ConstructionRoute::AnalyticQubit })
}

/// Fourier components of `Λ(t)` from the product over harmonics of `J` and `e^{−x}I` factors.
///
/// `harmonics` lists `(m, φ_m)` of a real-coefficient scalar drive
/// `φ(t) = Σ_{m≠0} φ_m e^{imωt}`, so `𝓛_d(t) = φ(t)·drive`.
pub fn frame_components_product<T: Real>(harmonics: &[(i64, T)], drive: &Superoperator<T>, omega: T, n_max: usize) -> Result<FourierSeries<T>> {
    if harmonics.iter().any(|&(m, _)| m == 0) {
        return Err(FloquetError::InvalidParameter("drive harmonics must exclude m = 0".into()));
    }
    let eig = drive_generator(drive)?;
    // λ = −ia, x_m = φ_m λ / (imω) = −φ_m a / (mω)
    let xs = |a: T| -> Vec<(i64, T)> { harmonics.iter().map(|&(m, p)| (m, -p * a / (nf::<T>(m) * omega))).collect() };
    let width = harmonics.iter().fold(n_max, |w, &(m, p)| {
        let x = eig.values.iter().fold(T::zero(), |acc, &a| acc.max((p * a / (nf::<T>(m) * omega)).abs()));
        w + m.unsigned_abs() as usize * (2 * x.to_f64_lossy().ceil() as usize + 25)
    });
    let w = width as i64;
    let scalar_sequence = |a: T| -> Vec<T> {
        let len = 2 * width + 1;
        let mut seq = vec![T::zero(); len];
        seq[width] = T::one();
        for (m, x) in xs(a) {
            for factor in 0..2 {
                let mut f = vec![T::zero(); len];
                let mut k = 0i64;
                while (k * m).abs() <= w {
                    for kk in if k == 0 { vec![0] } else { vec![k, -k] } {
                        let v = if factor == 0 { bessel_j(kk, x) } else { bessel_i_scaled(kk, x) * (x.abs() - x).exp() };
                        f[(kk * m + w) as usize] = v;
                    }
                    k += 1;
                }
                let mut next = vec![T::zero(); len];
                for (i, &s) in seq.iter().enumerate() {
                    if s == T::zero() {
                        continue;
                    }
                    for (j, &fv) in f.iter().enumerate() {
                        let n = i as i64 + j as i64 - 2 * w;
                        if n.abs() <= w {
                            next[(n + w) as usize] += s * fv;
                        }
                    }
                }
                seq = next;
            }
        }
        seq
    };
    let seqs: Vec<Vec<T>> = eig.values.iter().map(|&a| scalar_sequence(a)).collect();
    let mut comps = Vec::with_capacity(2 * n_max + 1);
    for n in -(n_max as i64)..=n_max as i64 {
        let mut m = eig.vectors.clone();
        for (c, seq) in seqs.iter().enumerate() {
            m.column_mut(c).scale_mut(seq[(n + w) as usize]);
        }
        comps.push(Superoperator::new(m * eig.vectors.adjoint())?);
    }
    FourierSeries::new(comps)
}

/// `𝓚̃_Mag,1 = 𝓛̃₀` from its closed form.
pub fn rotfr_magnus1<T: Real>(params: &ModelParams<T>) -> Result<ExpansionResult<T>> {
    require_phi_zero(params)?;
    let (h, d) = rotfr_component_form(params.gamma, params.z(), 0);
    let form = LindbladForm::new(h, d)?;
    Ok(ExpansionResult { order: 1, generator: lindblad_to_superop(&form), micromotion_exponent: None, frame: Frame::Rotating })
}

/// Closed-form Kossakowski eigenvalues of `𝓚̃_Mag,1`, ascending.
pub fn rotfr_magnus1_eigenvalues<T: Real>(gamma: T, z: T) -> [T; 3] {
    let j0 = bessel_j(0, z);
    let j02 = bessel_j(0, z + z);
    let mu = (T::lit(3.0) + j02) / T::lit(4.0);
    let root = (mu * mu + j0 * j0 - T::lit(0.5) * (T::one() + j02)).max(T::zero()).sqrt();
    let mut out = [gamma * (mu - root), gamma * (mu + root), gamma * T::lit(0.5) * (T::one() - j02)];
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

fn odd_series_cutoff<T: Real>(z: T) -> usize {
    let mut n = z.to_f64_lossy().ceil() as usize + 20;
    while bessel_j(n as i64, z).abs() > T::tol(TOL_BESSEL_TAIL) || bessel_j(n as i64 + 1, z).abs() > T::tol(TOL_BESSEL_TAIL) {
        n += 10;
    }
    n
}

/// `ν(z) = Σ_{n>0, odd} J_n(z)/n`.
pub fn nu<T: Real>(z: T) -> T {
    let n_max = odd_series_cutoff(z);
    let j = crate::bessel::bessel_j_seq(n_max, z);
    (1..=n_max).step_by(2).fold(T::zero(), |acc, n| acc + j[n] / T::from_usize(n).unwrap())
}

/// `𝓚̃_Mag,2 = 𝓛̃₀ + Σ_{n>0} 2o_n[𝓛̃₀, i𝓛̃_n]/(nω)`, exact in `γ`.
pub fn rotfr_magnus2<T: Real>(params: &ModelParams<T>) -> Result<ExpansionResult<T>> {
    require_phi_zero(params)?;
    let n_max = odd_series_cutoff(params.z());
    let series = rotfr_components_analytic(params, n_max)?.components;
    let l0 = series.component(0);
    let mut gen = l0.clone();
    for n in (1..=n_max as i64).step_by(2) {
        let c = l0.commutator(&series.component(n).scale(cx(0.0, 1.0)));
        gen = gen + c.scale(re(T::lit(2.0) / (nf::<T>(n) * params.omega)));
    }
    Ok(ExpansionResult { order: 2, generator: gen, micromotion_exponent: None, frame: Frame::Rotating })
}

/// Closed form of `𝓚̃_Mag,2` to first order in `γ`.
pub fn rotfr_magnus2_form<T: Real>(params: &ModelParams<T>) -> Result<LindbladForm<T>> {
    require_phi_zero(params)?;
    let z = params.z();
    let (j0, j02) = (bessel_j(0, z), bessel_j(0, z + z));
    let (nu1, nu2) = (nu(z), nu(z + z));
    let w = params.omega;
    let half = T::lit(0.5);
    let h = (pauli::<T>(2) * re(half) - pauli::<T>(0) * re(nu1 / w)) * re(j0);
    let d13 = (nu1 * (T::one() + j02) + j0 * nu2) / w;
    let d23 = T::lit(4.0) * j0 * nu1 / w;
    let c = |a: T, b: T| Complex::new(a, b);
    let zero = T::zero();
    #[rustfmt::skip]
    let d = CMatrix::from_row_slice(3, 3, &[
        c(T::one(), zero), c(zero, j0), c(d13, zero),
        c(zero, -j0), c(half * (T::one() + j02), zero), c(zero, -d23),
        c(d13, zero), c(zero, d23), c(half * (T::one() - j02), zero),
    ]) * re(params.gamma);
    LindbladForm::new(h, d)
}

/// `𝓛′(t) = (∂_t𝓓⁻¹)𝓓 + 𝓓⁻¹𝓛𝓓` with a central-difference derivative.
pub fn gauge_transform<T, D, DI>(gen: &PeriodicGenerator<T>, d_of_t: D, d_inv_of_t: DI) -> Result<PeriodicGenerator<T>>
where
    T: Real,
    D: Fn(T) -> Superoperator<T> + Send + Sync + 'static,
    DI: Fn(T) -> Superoperator<T> + Send + Sync + 'static,
{
    let period = gen.period();
    let id = Superoperator::<T>::identity(gen.dim());
    for s in 0..INVERSE_SAMPLES {
        let t = period * T::from_usize(s).unwrap() / T::from_usize(INVERSE_SAMPLES).unwrap();
        let d = d_of_t(t);
        let dev = (&(&d * &d_inv_of_t(t)) - &id).norm();
        if !(dev <= T::tol(TOL_INVERSE) * (T::one() + d.norm())) {
            return Err(FloquetError::InverseCheck { t: t.to_f64_lossy(), deviation: dev.to_f64_lossy() });
        }
    }
    let h = period * T::lit(DIFF_STEP_FRACTION);
    let g = gen.clone();
    Ok(PeriodicGenerator::new(period, gen.dim(), move |t| {
        let d = d_of_t(t);
        let dinv = d_inv_of_t(t);
        let deriv = (&d_inv_of_t(t + h) - &d_inv_of_t(t - h)).scale(re(T::one() / (h + h)));
        &(&deriv * &d) + &(&(&dinv * &g.eval(t)) * &d)
    }))
}
