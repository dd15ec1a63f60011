//! Magnus and van Vleck high-frequency expansions of the Floquet generator.

use nalgebra::Complex;

use crate::error::{FloquetError, Result};
use crate::linalg::spectral_norm;
use crate::propagator::{FourierSeries, PeriodicGenerator};
use crate::scalar::{cx, im, re, Real};
use crate::superop::Superoperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    Direct,
    Rotating,
}

/// Truncated expansion of the Floquet generator.
#[derive(Debug, Clone)]
pub struct ExpansionResult<T: Real> {
    pub order: usize,
    pub generator: Superoperator<T>,
    /// Fourier components of the micromotion exponent `𝓖(t)`, when used.
    pub micromotion_exponent: Option<FourierSeries<T>>,
    pub frame: Frame,
}

impl<T: Real> ExpansionResult<T> {
    pub fn in_frame(mut self, frame: Frame) -> Self {
        self.frame = frame;
        self
    }
}

fn check_order(order: usize, min: usize, max: usize) -> Result<()> {
    if order < min || order > max {
        return Err(FloquetError::OrderOutOfRange { order, min, max });
    }
    Ok(())
}

fn nf<T: Real>(n: i64) -> T {
    T::from_i64(n).unwrap()
}

/// Exact time-ordered integrals of products of Fourier exponentials.
mod exp_integral {
    use super::*;

    /// `coeff · u^power · e^{i·freq·u}`.
    #[derive(Clone, Copy)]
    struct Term<T: Real> {
        coeff: Complex<T>,
        power: u32,
        freq: i64,
    }

    /// `∫₀^v w^p e^{ikw} dw` as a sum of terms in `v`.
    fn antiderivative<T: Real>(p: u32, k: i64, out: &mut Vec<Term<T>>, scale: Complex<T>) {
        if k == 0 {
            out.push(Term { coeff: scale / re(T::from_u32(p + 1).unwrap()), power: p + 1, freq: 0 });
            return;
        }
        let ik = im(nf::<T>(k));
        out.push(Term { coeff: scale / ik, power: p, freq: k });
        if p == 0 {
            out.push(Term { coeff: -scale / ik, power: 0, freq: 0 });
        } else {
            antiderivative(p - 1, k, out, -scale * re(T::from_u32(p).unwrap()) / ik);
        }
    }

    fn integrate<T: Real>(terms: &[Term<T>]) -> Vec<Term<T>> {
        let mut out = Vec::new();
        for t in terms {
            antiderivative(t.power, t.freq, &mut out, t.coeff);
        }
        out
    }

    /// `∫₀^{2π}du ∫₀^u dv ∫₀^v dw e^{i(a·u + b·v + c·w)}`.
    pub fn ordered_triple<T: Real>(a: i64, b: i64, c: i64) -> Complex<T> {
        let inner = integrate(&[Term { coeff: cx(1.0, 0.0), power: 0, freq: c }]);
        let shifted: Vec<Term<T>> = inner.iter().map(|t| Term { freq: t.freq + b, ..*t }).collect();
        let middle = integrate(&shifted);
        let shifted: Vec<Term<T>> = middle.iter().map(|t| Term { freq: t.freq + a, ..*t }).collect();
        let outer = integrate(&shifted);
        let two_pi = T::two_pi();
        outer.iter().fold(Complex::new(T::zero(), T::zero()), |acc, t| acc + t.coeff * re(two_pi.powi(t.power as i32)))
    }

    #[cfg(test)]
    mod tests {
        use super::*;

        #[test]
        fn static_volume() {
            let v: Complex<f64> = ordered_triple(0, 0, 0);
            let want = (2.0 * std::f64::consts::PI).powi(3) / 6.0;
            assert!((v - Complex::new(want, 0.0)).norm() < 1e-12);
        }

        #[test]
        fn orderings_tile_the_cube() {
            for &(a, b, c) in &[(1, -1, 0), (2, 0, -1), (1, 1, -2), (0, 0, 3), (1, 0, 0)] {
                let perms = [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)];
                let sum = perms.iter().fold(Complex::new(0.0, 0.0), |s, &(x, y, z)| s + ordered_triple::<f64>(x, y, z));
                let want = if a == 0 && b == 0 && c == 0 { (2.0 * std::f64::consts::PI).powi(3) } else { 0.0 };
                assert!((sum - Complex::new(want, 0.0)).norm() < 1e-10, "{a} {b} {c}: {sum}");
            }
        }

        #[test]
        fn matches_nested_quadrature() {
            let (a, b, c) = (1i64, -2i64, 1i64);
            let n = 4000;
            let h = 2.0 * std::f64::consts::PI / n as f64;
            let e = |k: i64, x: f64| Complex::new(0.0, k as f64 * x).exp();
            let cumulative = |f: &dyn Fn(usize) -> Complex<f64>| {
                let mut out = vec![Complex::new(0.0, 0.0); n + 1];
                for j in 0..n {
                    out[j + 1] = out[j] + f(j) * h;
                }
                out
            };
            let inner = cumulative(&|j| e(c, (j as f64 + 0.5) * h));
            let middle = cumulative(&|j| e(b, (j as f64 + 0.5) * h) * (inner[j] + inner[j + 1]) * 0.5);
            let outer = cumulative(&|j| e(a, (j as f64 + 0.5) * h) * (middle[j] + middle[j + 1]) * 0.5);
            let exact: Complex<f64> = ordered_triple(a, b, c);
            assert!((outer[n] - exact).norm() < 1e-5, "{} vs {exact}", outer[n]);
        }
    }
}

pub use exp_integral::ordered_triple;

/// Second-order Magnus term `i Σ_{n≥1} ([𝓛_n,𝓛_{−n}] + [𝓛_0, 𝓛_n − 𝓛_{−n}])/(nω)`.
fn magnus_second<T: Real>(series: &FourierSeries<T>, omega: T) -> Superoperator<T> {
    let l0 = series.component(0);
    let mut acc = Superoperator::zeros(series.dim());
    for n in 1..=series.n_max() as i64 {
        let (lp, lm) = (series.component(n), series.component(-n));
        let term = lp.commutator(&lm) + l0.commutator(&(&lp - &lm));
        acc = acc + term.scale(re(T::one() / (nf::<T>(n) * omega)));
    }
    acc.scale(cx(0.0, 1.0))
}

fn double_commutator_pair<T: Real>(a: &Superoperator<T>, b: &Superoperator<T>, c: &Superoperator<T>) -> Superoperator<T> {
    a.commutator(&b.commutator(c)) + c.commutator(&b.commutator(a))
}

/// Third-order Magnus term from the exact ordered triple integrals of the harmonics.
fn magnus_third<T: Real>(series: &FourierSeries<T>, omega: T) -> Superoperator<T> {
    let live: Vec<(i64, &Superoperator<T>)> = series.harmonics().filter(|(_, c)| c.norm() > T::zero()).collect();
    let mut acc = Superoperator::zeros(series.dim());
    for &(a, la) in &live {
        for &(b, lb) in &live {
            for &(c, lc) in &live {
                let weight = ordered_triple::<T>(a, b, c);
                if weight.re == T::zero() && weight.im == T::zero() {
                    continue;
                }
                acc = acc + double_commutator_pair(la, lb, lc).scale(weight);
            }
        }
    }
    // ∫ dt → ∫ du/ω three times, prefactor 1/(6T) = ω/(12π).
    acc.scale(re(T::one() / (omega * omega * T::lit(6.0) * T::two_pi())))
}

/// Single Magnus coefficient `𝓚^{(k)}` from Fourier components.
pub fn magnus_term<T: Real>(series: &FourierSeries<T>, omega: T, k: usize) -> Result<Superoperator<T>> {
    check_order(k, 1, 3)?;
    Ok(match k {
        1 => series.component(0),
        2 => magnus_second(series, omega),
        _ => magnus_third(series, omega),
    })
}

/// Magnus approximation `𝓚_Mag,k = Σ_{j≤k} 𝓚^{(j)}` from Fourier components.
///
/// The third-order term is integrated exactly harmonic by harmonic, so it
/// holds for any finite series, not only single-harmonic drives.
pub fn magnus_order<T: Real>(series: &FourierSeries<T>, omega: T, k: usize) -> Result<ExpansionResult<T>> {
    check_order(k, 1, 3)?;
    let mut gen = series.component(0);
    for j in 2..=k {
        gen = gen + magnus_term(series, omega, j)?;
    }
    Ok(ExpansionResult { order: k, generator: gen, micromotion_exponent: None, frame: Frame::Direct })
}

/// Single Magnus coefficient `𝓚^{(k)}` by integrating the nested time integrals as an ODE.
///
/// With `M = ∫₀ᵗ𝓛`, `Q = ∫₀ᵗ[𝓛, M]`, `S = ∫₀ᵗ[𝓛, Q]` and, in a second sweep,
/// `W = ∫₀ᵗ[M, [𝓛, M(T) − M]]`, one has `𝓚^{(1)} = M(T)/T`,
/// `𝓚^{(2)} = Q(T)/(2T)` and `𝓚^{(3)} = (S(T) + W(T))/(6T)`.
pub fn magnus_integral_oracle<T: Real>(gen: &PeriodicGenerator<T>, k: usize, quad_steps: usize) -> Result<Superoperator<T>> {
    check_order(k, 1, 3)?;
    if quad_steps < 200 {
        return Err(FloquetError::InvalidParameter(format!("quad_steps must be at least 200, got {quad_steps}")));
    }
    let period = gen.period();
    let h = period / T::from_usize(quad_steps).unwrap();
    let half = T::lit(0.5);
    let d = gen.dim();
    type State<T> = Vec<Superoperator<T>>;
    let axpy = |y: &State<T>, dy: &State<T>, s: T| -> State<T> { y.iter().zip(dy).map(|(a, b)| a + &b.scale(re(s))).collect() };
    let rk4 = |y0: State<T>, rhs: &dyn Fn(&Superoperator<T>, &State<T>) -> State<T>| -> State<T> {
        let mut y = y0;
        let mut l_start = gen.eval(T::zero());
        for step in 0..quad_steps {
            let t = h * T::from_usize(step).unwrap();
            let l_mid = gen.eval(t + h * half);
            let l_end = gen.eval(t + h);
            let k1 = rhs(&l_start, &y);
            let k2 = rhs(&l_mid, &axpy(&y, &k1, h * half));
            let k3 = rhs(&l_mid, &axpy(&y, &k2, h * half));
            let k4 = rhs(&l_end, &axpy(&y, &k3, h));
            let sixth = h / T::lit(6.0);
            y = y
                .iter()
                .enumerate()
                .map(|(i, yi)| yi + &(&(&k1[i] + &k4[i]) + &(&k2[i] + &k3[i]).scale(re(T::lit(2.0)))).scale(re(sixth)))
                .collect();
            l_start = l_end;
        }
        y
    };
    let zero = Superoperator::zeros(d);
    let first = rk4(vec![zero.clone(), zero.clone(), zero.clone()], &|l, y| {
        let (m, q) = (&y[0], &y[1]);
        vec![l.clone(), l.commutator(m), l.commutator(q)]
    });
    let inv_t = re(T::one() / period);
    match k {
        1 => Ok(first[0].scale(inv_t)),
        2 => Ok(first[1].scale(inv_t * re(half))),
        _ => {
            let m_t = first[0].clone();
            let second = rk4(vec![zero.clone(), zero], &|l, y| {
                let m = &y[0];
                vec![l.clone(), m.commutator(&l.commutator(&(&m_t - m)))]
            });
            Ok((&first[2] + &second[1]).scale(inv_t / re(T::lit(6.0))))
        }
    }
}

/// Van Vleck effective generator `𝓚_eff` up to `order`.
pub fn vanvleck_keff<T: Real>(series: &FourierSeries<T>, omega: T, order: usize) -> Result<ExpansionResult<T>> {
    check_order(order, 1, 3)?;
    let n_max = series.n_max() as i64;
    let l0 = series.component(0);
    let mut gen = l0.clone();
    if order >= 2 {
        let mut acc = Superoperator::zeros(series.dim());
        for n in 1..=n_max {
            acc = acc + series.component(n).commutator(&series.component(-n)).scale(re(T::one() / (nf::<T>(n) * omega)));
        }
        gen = gen + acc.scale(cx(0.0, 1.0));
    }
    if order >= 3 {
        let w2 = omega * omega;
        let mut acc = Superoperator::zeros(series.dim());
        for n in (-n_max..=n_max).filter(|&n| n != 0) {
            let ln = series.component(n);
            let lmn = series.component(-n);
            let nn = nf::<T>(n);
            acc = acc + ln.commutator(&l0.commutator(&lmn)).scale(re(T::one() / (T::lit(2.0) * nn * nn * w2)));
            for m in (-n_max..=n_max).filter(|&m| m != 0 && m != n) {
                let Some(lnm) = series.get(n - m) else { continue };
                let lm = series.component(m);
                acc = acc + lm.commutator(&lnm.commutator(&lmn)).scale(re(T::one() / (T::lit(3.0) * nn * nf::<T>(m) * w2)));
            }
        }
        gen = gen - acc;
    }
    Ok(ExpansionResult { order, generator: gen, micromotion_exponent: None, frame: Frame::Direct })
}

/// Fourier components of `Σ_{k≤order} 𝓖^{(k)}(t)` (harmonics up to `2·n_max` at order 2).
pub fn micromotion_exponent<T: Real>(series: &FourierSeries<T>, omega: T, order: usize) -> Result<FourierSeries<T>> {
    check_order(order, 1, 2)?;
    let n_max = series.n_max() as i64;
    let g_max = if order >= 2 { 2 * n_max } else { n_max };
    let l0 = series.component(0);
    let w2 = omega * omega;
    let mut comps = Vec::with_capacity(2 * g_max as usize + 1);
    for n in -g_max..=g_max {
        if n == 0 {
            comps.push(Superoperator::zeros(series.dim()));
            continue;
        }
        let nn = nf::<T>(n);
        let mut g = series.component(n).scale(cx::<T>(0.0, -1.0) / re(nn * omega));
        if order >= 2 {
            let mut g2 = l0.commutator(&series.component(n)).scale(re(T::one() / (nn * nn * w2)));
            for m in (-n_max..=n_max).filter(|&m| m != 0 && m != n) {
                let Some(lnm) = series.get(n - m) else { continue };
                g2 = g2 + lnm.commutator(&series.component(m)).scale(re(T::one() / (T::lit(2.0) * nf::<T>(m) * nn * w2)));
            }
            g = g - g2;
        }
        comps.push(g);
    }
    FourierSeries::new(comps)
}

/// `𝓓_order(t) = exp(𝓖(t))` with the exponent truncated at `order`.
pub fn vanvleck_micromotion<T: Real>(series: &FourierSeries<T>, omega: T, order: usize, t: T) -> Result<Superoperator<T>> {
    Ok(micromotion_exponent(series, omega, order)?.evaluate(t, omega).exp())
}

/// `𝓚_vV,n = 𝓓_{n−1}(t₀) 𝓚_eff,n 𝓓_{n−1}(t₀)⁻¹`.
pub fn vanvleck_floquet_generator<T: Real>(series: &FourierSeries<T>, omega: T, n: usize, t0: T) -> Result<ExpansionResult<T>> {
    check_order(n, 1, 3)?;
    let keff = vanvleck_keff(series, omega, n)?;
    if n == 1 {
        return Ok(keff);
    }
    let exponent = micromotion_exponent(series, omega, n - 1)?;
    let g = exponent.evaluate(t0, omega);
    let d = g.exp();
    let d_inv = (-g).exp();
    Ok(ExpansionResult { order: n, generator: &(&d * &keff.generator) * &d_inv, micromotion_exponent: Some(exponent), frame: Frame::Direct })
}

/// `∫₀ᵀ ‖𝓛(t)‖₂ dt`; the Magnus series is guaranteed to converge below `π`.
pub fn magnus_convergence_bound<T: Real>(gen: &PeriodicGenerator<T>, quad_steps: usize) -> Result<T> {
    if quad_steps < 100 {
        return Err(FloquetError::InvalidParameter(format!("quad_steps must be at least 100, got {quad_steps}")));
    }
    let h = gen.period() / T::from_usize(quad_steps).unwrap();
    let sum = (0..quad_steps).fold(T::zero(), |acc, k| acc + spectral_norm(gen.eval(h * T::from_usize(k).unwrap()).matrix()));
    Ok(sum * h)
}
