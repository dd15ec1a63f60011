//! Spectral decomposition of one-cycle maps, branch logarithms, the Lindblad
//! test and the noise-based distance `μ_min` to Markovianity.

use nalgebra::{Complex, ComplexField};

use crate::error::{FloquetError, Result};
use crate::linalg::{condition_number, eigenvalues, hermitian_part, max_abs, min_hermitian_eigenvalue, null_spaces, spectral_norm};
use crate::scalar::{im, re, CMatrix, Real};
use crate::superop::{superop_to_quasi_lindblad, LindbladForm, Superoperator, TOL_PSD};

pub const TOL_PAIR: f64 = 1e-8;
pub const COND_MAX: f64 = 1e8;
pub const TOL_MU: f64 = 1e-6;
pub const DEFAULT_X_RANGE: i32 = 5;
const MU_HI_MAX: f64 = 1024.0;
const TOL_NULL: f64 = 1e-6;
const TOL_REF_PAIR: f64 = 1e-6;

/// Real eigenvalue with its spectral projector.
#[derive(Debug, Clone)]
pub struct RealEigen<T: Real> {
    pub lambda: T,
    pub multiplicity: usize,
    pub projector: Superoperator<T>,
}

/// Conjugate pair `(λ_c, λ_c*)` with projectors `P_c`, `P_c*`.
///
/// `log` is the logarithm used on `P_c` in the principal branch (its conjugate
/// is used on `P_c*`). Pairs obtained by splitting a degenerate real eigenvalue
/// carry a real `lambda`.
#[derive(Debug, Clone)]
pub struct ConjugatePair<T: Real> {
    pub lambda: Complex<T>,
    pub log: Complex<T>,
    pub multiplicity: usize,
    pub projector: Superoperator<T>,
    pub conj_projector: Superoperator<T>,
}

#[derive(Debug, Clone)]
pub struct SpectralDecomposition<T: Real> {
    pub real_eigs: Vec<RealEigen<T>>,
    pub complex_pairs: Vec<ConjugatePair<T>>,
    dim: usize,
}

impl<T: Real> SpectralDecomposition<T> {
    pub fn n_r(&self) -> usize {
        self.real_eigs.len()
    }

    pub fn n_c(&self) -> usize {
        self.complex_pairs.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Σ λ P` over all spectral components.
    pub fn reconstruct(&self) -> Superoperator<T> {
        let mut acc = Superoperator::zeros(self.dim);
        for r in &self.real_eigs {
            acc = acc + r.projector.scale(re(r.lambda));
        }
        for c in &self.complex_pairs {
            acc = acc + c.projector.scale(c.lambda) + c.conj_projector.scale(c.lambda.conj());
        }
        acc
    }

    /// All projectors, pairs contributing both members.
    pub fn projectors(&self) -> Vec<&Superoperator<T>> {
        let mut v: Vec<&Superoperator<T>> = self.real_eigs.iter().map(|r| &r.projector).collect();
        for c in &self.complex_pairs {
            v.push(&c.projector);
            v.push(&c.conj_projector);
        }
        v
    }
}

struct Cluster<T: Real> {
    value: Complex<T>,
    members: Vec<Complex<T>>,
    right: CMatrix<T>,
    /// `(L†R)⁻¹ L†`, so that the projector is `right * co_left`.
    co_left: CMatrix<T>,
}

impl<T: Real> Cluster<T> {
    fn mult(&self) -> usize {
        self.members.len()
    }

    fn projector(&self) -> CMatrix<T> {
        &self.right * &self.co_left
    }
}

fn to_c64<T: Real>(z: Complex<T>) -> Complex<f64> {
    Complex::new(z.re.to_f64_lossy(), z.im.to_f64_lossy())
}

fn degenerate<T: Real>(a: Complex<T>, b: Complex<T>) -> FloquetError {
    FloquetError::DegenerateSpectrum { a: to_c64(a), b: to_c64(b) }
}

fn scale_of<T: Real>(z: Complex<T>) -> T {
    z.modulus().max(T::one())
}

/// Groups eigenvalues of `m` within `tol` (relative) and builds biorthogonal bases.
fn clusters<T: Real>(m: &CMatrix<T>, tol: f64) -> Result<Vec<Cluster<T>>> {
    let n = m.nrows();
    let ev = eigenvalues(m);
    let mut label: Vec<usize> = (0..n).collect();
    fn root(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (ev[i] - ev[j]).modulus() <= T::tol(tol) * scale_of(ev[i]) {
                let (ri, rj) = (root(&mut label, i), root(&mut label, j));
                label[rj] = ri;
            }
        }
    }
    let mut groups: Vec<(usize, Vec<Complex<T>>)> = Vec::new();
    for i in 0..n {
        let r = root(&mut label, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => g.1.push(ev[i]),
            None => groups.push((r, vec![ev[i]])),
        }
    }
    let norm = spectral_norm(m).max(T::one());
    let mut out = Vec::with_capacity(groups.len());
    for (_, members) in groups {
        let k = members.len();
        let value = members.iter().fold(Complex::new(T::zero(), T::zero()), |a, b| a + b) / re(T::from_usize(k).unwrap());
        let mut shifted = m.clone();
        for i in 0..n {
            shifted[(i, i)] -= value;
        }
        let ns = null_spaces(&shifted, k);
        if ns.residual > T::lit(TOL_NULL) * norm {
            let other = members.get(1).copied().unwrap_or(value);
            return Err(degenerate(members[0], other));
        }
        let gram = ns.left.adjoint() * &ns.right;
        let gram_inv = gram.try_inverse().ok_or_else(|| degenerate(members[0], *members.last().unwrap()))?;
        let co_left = gram_inv * ns.left.adjoint();
        out.push(Cluster { value, members, right: ns.right, co_left });
    }
    if out.len() > 1 {
        let cols: usize = out.iter().map(|c| c.mult()).sum();
        let mut stacked = CMatrix::<T>::zeros(n, cols);
        let mut col = 0;
        for c in &out {
            for j in 0..c.mult() {
                let v = c.right.column(j);
                let nv = v.norm();
                stacked.set_column(col, &(v / re(nv)));
                col += 1;
            }
        }
        if condition_number(&stacked) > T::lit(COND_MAX) {
            let mut best = (T::max_value().unwrap(), out[0].value, out[1].value);
            for (i, a) in out.iter().enumerate() {
                for b in &out[i + 1..] {
                    let d = (a.value - b.value).modulus();
                    if d < best.0 {
                        best = (d, a.value, b.value);
                    }
                }
            }
            return Err(degenerate(best.1, best.2));
        }
    }
    Ok(out)
}

fn is_real<T: Real>(z: Complex<T>) -> bool {
    z.im.abs() <= T::tol(TOL_PAIR) * scale_of(z)
}

fn principal_log<T: Real>(z: Complex<T>) -> Complex<T> {
    Complex::new(z.modulus().ln(), z.im.atan2(z.re))
}

/// Splits a degenerate real cluster along the eigenspaces of `reference`
/// compressed onto it. Returns the real remainder and conjugate sub-pairs.
fn split_real_cluster<T: Real>(cluster: &Cluster<T>, reference: &CMatrix<T>) -> Result<(Option<CMatrix<T>>, Vec<(CMatrix<T>, CMatrix<T>, usize)>)> {
    let b = &cluster.co_left * reference * &cluster.right;
    let subs = clusters(&b, TOL_PAIR)?;
    let mut real_part: Option<CMatrix<T>> = None;
    let mut upper: Vec<&Cluster<T>> = Vec::new();
    let mut lower: Vec<&Cluster<T>> = Vec::new();
    for s in &subs {
        if s.value.im.abs() <= T::lit(TOL_REF_PAIR) * scale_of(s.value) {
            let q = s.projector();
            real_part = Some(match real_part {
                Some(acc) => acc + q,
                None => q,
            });
        } else if s.value.im > T::zero() {
            upper.push(s);
        } else {
            lower.push(s);
        }
    }
    let lift = |q: &CMatrix<T>| &cluster.right * q * &cluster.co_left;
    let mut pairs = Vec::new();
    for u in upper {
        let idx = lower
            .iter()
            .position(|l| l.mult() == u.mult() && (l.value - u.value.conj()).modulus() <= T::lit(TOL_REF_PAIR) * scale_of(u.value))
            .ok_or_else(|| FloquetError::UnpairedEigenvalue(to_c64(cluster.value)))?;
        let l = lower.remove(idx);
        pairs.push((lift(&u.projector()), lift(&l.projector()), u.mult()));
    }
    if !lower.is_empty() {
        return Err(FloquetError::UnpairedEigenvalue(to_c64(cluster.value)));
    }
    Ok((real_part.map(|q| lift(&q)), pairs))
}

/// Spectral decomposition of a Hermiticity-preserving map.
pub fn spectral_decompose<T: Real>(p: &Superoperator<T>) -> Result<SpectralDecomposition<T>> {
    spectral_decompose_with_reference(p, None)
}

/// As [`spectral_decompose`], resolving degenerate real eigenvalues with `reference`.
///
/// A real eigenvalue of multiplicity ≥ 2 leaves the split into conjugate
/// pairs undetermined. When a reference generator is given (for instance the
/// time average of `𝓛(t)`), the degenerate eigenspace is split along the
/// eigenvectors of the reference compressed onto it; reference eigenvalues in
/// conjugate pairs then become branch-carrying pairs.
pub fn spectral_decompose_with_reference<T: Real>(p: &Superoperator<T>, reference: Option<&Superoperator<T>>) -> Result<SpectralDecomposition<T>> {
    let n = p.dim();
    let cl = clusters(p.matrix(), TOL_PAIR)?;
    let mut real_eigs = Vec::new();
    let mut complex_pairs = Vec::new();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for c in cl {
        if is_real(c.value) {
            let lambda = c.value.re;
            let proj = |m: CMatrix<T>| Superoperator::new(m).expect("square");
            match reference {
                Some(r) if c.mult() >= 2 => {
                    let (rest, pairs) = split_real_cluster(&c, r.matrix())?;
                    let base = principal_log(re(lambda.abs()));
                    let log = if lambda < T::zero() { base + im(T::pi()) } else { base };
                    for (pc, pcc, m) in pairs {
                        complex_pairs.push(ConjugatePair { lambda: re(lambda), log, multiplicity: m, projector: proj(pc), conj_projector: proj(pcc) });
                    }
                    if let Some(q) = rest {
                        let m = (crate::linalg::trace(&q).re.round()).to_f64_lossy() as usize;
                        real_eigs.push(RealEigen { lambda, multiplicity: m, projector: proj(q) });
                    }
                }
                _ => real_eigs.push(RealEigen { lambda, multiplicity: c.mult(), projector: proj(c.projector()) }),
            }
        } else if c.value.im > T::zero() {
            upper.push(c);
        } else {
            lower.push(c);
        }
    }
    for u in upper {
        let tol = T::tol(TOL_PAIR) * scale_of(u.value);
        let idx = lower
            .iter()
            .position(|l| l.mult() == u.mult() && (l.value - u.value.conj()).modulus() <= tol)
            .ok_or_else(|| FloquetError::UnpairedEigenvalue(to_c64(u.value)))?;
        let l = lower.remove(idx);
        complex_pairs.push(ConjugatePair {
            lambda: u.value,
            log: principal_log(u.value),
            multiplicity: u.mult(),
            projector: Superoperator::new(u.projector())?,
            conj_projector: Superoperator::new(l.projector())?,
        });
    }
    if let Some(l) = lower.first() {
        return Err(FloquetError::UnpairedEigenvalue(to_c64(l.value)));
    }
    Ok(SpectralDecomposition { real_eigs, complex_pairs, dim: n })
}

/// `𝓚_x = 𝓚_0 + iω Σ_c x_c (P_c − P_c*)` with `𝓚_0 = (1/T) Σ Log(λ) P`.
pub fn branch_log<T: Real>(dec: &SpectralDecomposition<T>, x: &[i32], period: T) -> Result<Superoperator<T>> {
    if x.len() != dec.n_c() {
        return Err(FloquetError::InvalidParameter(format!("branch vector has {} entries, map has {} complex pairs", x.len(), dec.n_c())));
    }
    let tiny = T::lit(T::EPS);
    let mut acc = CMatrix::<T>::zeros(dec.dim * dec.dim, dec.dim * dec.dim);
    for r in &dec.real_eigs {
        if r.lambda.abs() <= tiny {
            return Err(FloquetError::SingularMap(r.lambda.to_f64_lossy()));
        }
        if r.lambda < T::zero() {
            if r.multiplicity % 2 == 1 {
                return Err(FloquetError::NoHermitianLog(r.lambda.to_f64_lossy()));
            }
            return Err(degenerate(re(r.lambda), re(r.lambda)));
        }
        acc += r.projector.matrix() * re(r.lambda.ln());
    }
    let omega = T::two_pi() / period;
    for (c, &xc) in dec.complex_pairs.iter().zip(x) {
        if c.lambda.modulus() <= tiny {
            return Err(FloquetError::SingularMap(c.lambda.modulus().to_f64_lossy()));
        }
        let shift = im(omega * period * T::from_i32(xc).unwrap());
        acc += c.projector.matrix() * (c.log + shift) + c.conj_projector.matrix() * (c.log.conj() - shift);
    }
    Superoperator::new(acc / re(period))
}

/// `𝓚σ† = (𝓚σ)†` for all σ, entrywise to `1e−9`.
pub fn is_hermiticity_preserving<T: Real>(k: &Superoperator<T>) -> bool {
    k.is_hermiticity_preserving()
}

/// Choi matrix `N(𝓚 ⊗ 1)[|Φ⟩⟨Φ|]`, entry `[(a,i),(b,j)] = 𝓚[aN+b, iN+j]`.
pub fn choi_matrix<T: Real>(k: &Superoperator<T>) -> CMatrix<T> {
    let n = k.dim();
    CMatrix::from_fn(n * n, n * n, |r, c| {
        let (a, i) = (r / n, r % n);
        let (b, j) = (c / n, c % n);
        k.matrix()[(a * n + b, i * n + j)]
    })
}

fn perp_projector<T: Real>(n: usize) -> CMatrix<T> {
    let mut p = CMatrix::<T>::identity(n * n, n * n);
    let w = re(T::one() / T::from_usize(n).unwrap());
    for i in 0..n {
        for j in 0..n {
            p[(i * n + i, j * n + j)] -= w;
        }
    }
    p
}

/// `Φ_⊥ 𝓚^Γ Φ_⊥`; positive semidefinite iff `𝓚` is conditionally completely positive.
pub fn conditional_cp_matrix<T: Real>(k: &Superoperator<T>) -> Result<CMatrix<T>> {
    if let Some((row, col, dev)) = k.hermiticity_defect() {
        return Err(FloquetError::NotHermiticityPreserving { row, col, deviation: dev.to_f64_lossy() });
    }
    let p = perp_projector::<T>(k.dim());
    Ok(hermitian_part(&(&p * choi_matrix(k) * &p)))
}

/// Generator `𝓝 = Π − 1` of the depolarizing semigroup, `Π(ρ) = Tr(ρ)·1/N`.
pub fn depolarizing_generator<T: Real>(n: usize) -> Superoperator<T> {
    let mut m = -CMatrix::<T>::identity(n * n, n * n);
    let w = re(T::one() / T::from_usize(n).unwrap());
    for a in 0..n {
        for i in 0..n {
            m[(a * n + a, i * n + i)] += w;
        }
    }
    Superoperator::new(m).expect("square")
}

/// Minimal noise `μ` making `𝓚 + μ𝓝` conditionally completely positive.
///
/// Returns zero when `𝓚` already is, `∞` when `μ = 2¹⁰` does not suffice, and
/// otherwise a feasible value at most `tol_mu` above the true minimum and never
/// below `tol_mu`.
fn bisect_mu<T: Real>(v0: &CMatrix<T>, vn: &CMatrix<T>) -> T {
    let feasible = |mu: T| min_hermitian_eigenvalue(&(v0 + vn * re(mu))) >= T::lit(TOL_PSD);
    if feasible(T::zero()) {
        return T::zero();
    }
    let mut hi = T::one();
    while !feasible(hi) {
        hi *= T::lit(2.0);
        if hi > T::lit(MU_HI_MAX) {
            return T::lit(f64::INFINITY);
        }
    }
    let mut lo = if hi > T::one() { hi * T::lit(0.5) } else { T::zero() };
    let tol = T::lit(TOL_MU);
    while hi - lo > tol {
        let mid = (lo + hi) * T::lit(0.5);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi.max(tol)
}

/// Whether `𝓚 + μ𝓝` is conditionally completely positive.
pub fn is_conditionally_cp<T: Real>(k: &Superoperator<T>, mu: T) -> bool {
    match conditional_cp_matrix(&(k + &depolarizing_generator::<T>(k.dim()).scale(re(mu)))) {
        Ok(v) => min_hermitian_eigenvalue(&v) >= T::lit(TOL_PSD),
        Err(_) => false,
    }
}

/// Noise strength needed by a single candidate generator (`∞` if it breaks Hermiticity).
pub fn candidate_mu<T: Real>(k: &Superoperator<T>) -> T {
    match conditional_cp_matrix(k) {
        Ok(v0) => {
            let vn = conditional_cp_matrix(&depolarizing_generator::<T>(k.dim())).expect("depolarizer preserves Hermiticity");
            bisect_mu(&v0, &vn)
        }
        Err(_) => T::lit(f64::INFINITY),
    }
}

/// `μ` for one branch of the logarithm.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchCandidate<T: Real> {
    pub branch: Vec<i32>,
    pub mu: T,
}

#[derive(Debug, Clone)]
pub struct MarkovianityVerdict<T: Real> {
    pub has_floquet_lindbladian: bool,
    pub best_branch: Vec<i32>,
    /// Zero iff a Lindblad-form generator exists; infinite if no
    /// Hermiticity-preserving branch exists; NaN for degenerate spectra.
    pub mu_min: T,
    pub generator: Option<Superoperator<T>>,
    pub quasi_form: Option<LindbladForm<T>>,
    pub degenerate_spectrum_flag: bool,
    pub candidates: Vec<BranchCandidate<T>>,
}

impl<T: Real> MarkovianityVerdict<T> {
    fn without_generator(mu: T, degenerate: bool) -> Self {
        Self {
            has_floquet_lindbladian: false,
            best_branch: Vec::new(),
            mu_min: mu,
            generator: None,
            quasi_form: None,
            degenerate_spectrum_flag: degenerate,
            candidates: Vec::new(),
        }
    }

    pub fn no_hermitian_log() -> Self {
        Self::without_generator(T::lit(f64::INFINITY), false)
    }

    pub fn degenerate() -> Self {
        Self::without_generator(T::lit(f64::NAN), true)
    }

    /// `μ_min` is the infinite sentinel.
    pub fn is_unbounded(&self) -> bool {
        self.mu_min == T::lit(f64::INFINITY)
    }

    /// Verdict for one candidate generator (no branch freedom).
    pub fn for_generator(k: &Superoperator<T>) -> Self {
        let mu = candidate_mu(k);
        let has = mu == T::zero();
        Self {
            has_floquet_lindbladian: has,
            best_branch: Vec::new(),
            mu_min: mu,
            generator: Some(k.clone()),
            quasi_form: superop_to_quasi_lindblad(k).ok(),
            degenerate_spectrum_flag: false,
            candidates: vec![BranchCandidate { branch: Vec::new(), mu }],
        }
    }
}

fn branches(n_c: usize, x_range: i32) -> Vec<Vec<i32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n_c {
        let mut next = Vec::with_capacity(out.len() * (2 * x_range as usize + 1));
        for prefix in &out {
            for x in -x_range..=x_range {
                let mut v = prefix.clone();
                v.push(x);
                next.push(v);
            }
        }
        out = next;
    }
    out.sort_by_key(|v| (v.iter().map(|x| x.abs()).sum::<i32>(), v.clone()));
    out
}

/// Minimizes `μ` over branches `x ∈ [−x_range, x_range]^{n_c}`.
pub fn mu_min<T: Real>(dec: &SpectralDecomposition<T>, period: T, x_range: i32) -> Result<MarkovianityVerdict<T>> {
    mu_min_with_reference(dec, period, x_range, None)
}

/// As [`mu_min`]; among branches with equal `μ` (within `tol_mu/2`) the one
/// closest to `reference` wins, otherwise the one with smallest `Σ|x_c|`.
pub fn mu_min_with_reference<T: Real>(
    dec: &SpectralDecomposition<T>,
    period: T,
    x_range: i32,
    reference: Option<&Superoperator<T>>,
) -> Result<MarkovianityVerdict<T>> {
    if x_range < 0 {
        return Err(FloquetError::InvalidParameter("x_range must be nonnegative".into()));
    }
    let zero_branch = vec![0; dec.n_c()];
    match branch_log(dec, &zero_branch, period) {
        Err(FloquetError::NoHermitianLog(_)) => return Ok(MarkovianityVerdict::no_hermitian_log()),
        Err(FloquetError::DegenerateSpectrum { .. }) => return Ok(MarkovianityVerdict::degenerate()),
        Err(e) => return Err(e),
        Ok(_) => {}
    }
    let vn = conditional_cp_matrix(&depolarizing_generator::<T>(dec.dim())).expect("depolarizer preserves Hermiticity");
    let mut candidates = Vec::new();
    let mut best: Option<(T, T, Vec<i32>, Superoperator<T>)> = None;
    let half_tol = T::lit(TOL_MU * 0.5);
    for x in branches(dec.n_c(), x_range) {
        let k = branch_log(dec, &x, period)?;
        let mu = match conditional_cp_matrix(&k) {
            Ok(v0) => bisect_mu(&v0, &vn),
            Err(_) => T::lit(f64::INFINITY),
        };
        candidates.push(BranchCandidate { branch: x.clone(), mu });
        let dist = reference.map(|r| (k.matrix() - r.matrix()).norm()).unwrap_or_else(T::zero);
        let better = match &best {
            None => true,
            Some((bmu, bdist, _, _)) => mu + half_tol < *bmu || ((mu - *bmu).abs() <= half_tol && dist < *bdist),
        };
        if better {
            best = Some((mu, dist, x, k));
        }
    }
    let (mu, _, x, k) = best.expect("at least the principal branch");
    let has = mu == T::zero();
    Ok(MarkovianityVerdict {
        has_floquet_lindbladian: has,
        best_branch: x,
        mu_min: mu,
        quasi_form: superop_to_quasi_lindblad(&k).ok(),
        generator: Some(k),
        degenerate_spectrum_flag: false,
        candidates,
    })
}

/// Full test of a one-cycle map: decomposition, branch scan and `μ_min`.
///
/// Degenerate spectra yield a flagged verdict instead of an error.
pub fn floquet_verdict<T: Real>(p: &Superoperator<T>, period: T, x_range: i32, reference: Option<&Superoperator<T>>) -> Result<MarkovianityVerdict<T>> {
    match spectral_decompose_with_reference(p, reference) {
        Ok(dec) => mu_min_with_reference(&dec, period, x_range, reference),
        Err(FloquetError::DegenerateSpectrum { .. }) | Err(FloquetError::UnpairedEigenvalue(_)) => Ok(MarkovianityVerdict::degenerate()),
        Err(e) => Err(e),
    }
}

/// Largest deviation of `exp(T𝓚)` from `p`.
pub fn exp_residual<T: Real>(k: &Superoperator<T>, p: &Superoperator<T>, period: T) -> T {
    max_abs(&(k.scale(re(period)).exp().into_matrix() - p.matrix()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::expm;
    use crate::propagator::{model_static, one_cycle_map, ModelParams};
    use crate::scalar::cx;
    use crate::superop::testing::{random_form, rng};
    use crate::superop::{lindblad_to_superop, pauli};

    fn cycle(g: f64, e: f64, w: f64) -> (Superoperator<f64>, f64) {
        let p = ModelParams::new(g, e, w, 0.0).unwrap();
        (one_cycle_map(&p, 0.0, 2000).unwrap(), p.period())
    }

    fn check_projectors(dec: &SpectralDecomposition<f64>, p: &Superoperator<f64>) {
        let ps = dec.projectors();
        let sum = ps.iter().fold(CMatrix::<f64>::zeros(4, 4), |a, q| a + q.matrix());
        assert!((sum - CMatrix::identity(4, 4)).norm() < 1e-8);
        for (i, a) in ps.iter().enumerate() {
            assert!((a.matrix() * a.matrix() - a.matrix()).norm() < 1e-8);
            for b in &ps[i + 1..] {
                assert!((a.matrix() * b.matrix()).norm() < 1e-8);
            }
        }
        assert!((dec.reconstruct().matrix() - p.matrix()).norm() < 1e-8);
    }

    #[test]
    fn identity_map() {
        let dec = spectral_decompose(&Superoperator::<f64>::identity(2)).unwrap();
        assert_eq!(dec.n_c(), 0);
        assert_eq!(dec.n_r(), 1);
        assert_eq!(dec.real_eigs[0].multiplicity, 4);
        assert!((dec.real_eigs[0].lambda - 1.0).abs() < 1e-14);
    }

    #[test]
    fn driven_map_has_at_most_one_pair() {
        for &(e, w) in &[(0.5, 1.0), (1.0, 2.5), (1.7, 0.8), (0.2, 5.0)] {
            let (p, _) = cycle(0.01, e, w);
            let dec = spectral_decompose(&p).unwrap();
            assert!(dec.n_c() <= 1);
            check_projectors(&dec, &p);
        }
    }

    #[test]
    fn static_map_eigenvalues() {
        let (g, t) = (0.05, 1.3);
        let p = Superoperator::new(expm(&(model_static(g).into_matrix() * cx(t, 0.0)))).unwrap();
        let dec = spectral_decompose(&p).unwrap();
        let mut reals: Vec<f64> = dec.real_eigs.iter().map(|r| r.lambda).collect();
        reals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((reals[0] - (-4.0 * g * t).exp()).abs() < 1e-13);
        assert!((reals[1] - 1.0).abs() < 1e-13);
        let want = Complex::new(-2.0 * g * t, t).exp();
        assert!((dec.complex_pairs[0].lambda - want).norm() < 1e-13);
    }

    #[test]
    fn principal_log_of_static_map() {
        let (g, t) = (0.05, 1.3);
        let l0 = model_static(g);
        let p = l0.scale(cx(t, 0.0)).exp();
        let k = branch_log(&spectral_decompose(&p).unwrap(), &[0], t).unwrap();
        assert!((k.matrix() - l0.matrix()).norm() < 1e-8);
    }

    #[test]
    fn every_branch_exponentiates_back() {
        let (p, t) = cycle(0.01, 1.2, 1.5);
        let dec = spectral_decompose(&p).unwrap();
        let k0 = branch_log(&dec, &[0], t).unwrap();
        for x in -3..=3 {
            let k = branch_log(&dec, &[x], t).unwrap();
            assert!((k.scale(cx(t, 0.0)).exp().matrix() - p.matrix()).norm() < 1e-7);
            let c = &dec.complex_pairs[0];
            let shift = (c.projector.matrix() - c.conj_projector.matrix()) * cx(0.0, 2.0 * std::f64::consts::PI / t * x as f64);
            assert!((k.matrix() - k0.matrix() - shift).norm() < 1e-12);
        }
    }

    #[test]
    fn branch_log_errors() {
        let mut m = CMatrix::<f64>::identity(4, 4);
        m[(1, 1)] = cx(-0.5, 0.0);
        let dec = spectral_decompose(&Superoperator::new(m.clone()).unwrap()).unwrap();
        assert!(matches!(branch_log(&dec, &[], 1.0), Err(FloquetError::NoHermitianLog(_))));
        m[(1, 1)] = cx(0.0, 0.0);
        let dec = spectral_decompose(&Superoperator::new(m).unwrap()).unwrap();
        assert!(matches!(branch_log(&dec, &[], 1.0), Err(FloquetError::SingularMap(_))));
    }

    #[test]
    fn jordan_block_is_degenerate() {
        let mut m = CMatrix::<f64>::identity(4, 4) * cx(0.5, 0.0);
        m[(1, 2)] = cx(1.0, 0.0);
        let err = spectral_decompose(&Superoperator::new(m).unwrap()).unwrap_err();
        assert!(matches!(err, FloquetError::DegenerateSpectrum { .. }));
    }

    #[test]
    fn hermiticity_preservation() {
        let s = lindblad_to_superop(&random_form(&mut rng(29), 2));
        assert!(is_hermiticity_preserving(&s));
        assert!(!is_hermiticity_preserving(&s.scale(cx(0.0, 1.0))));
        let (p, t) = cycle(0.01, 0.9, 2.2);
        let k = branch_log(&spectral_decompose(&p).unwrap(), &[0], t).unwrap();
        assert!(is_hermiticity_preserving(&k));
    }

    #[test]
    fn pure_hamiltonian_has_zero_projected_choi() {
        let h = pauli::<f64>(0) * cx(0.3, 0.0) + pauli::<f64>(2) * cx(-1.1, 0.0);
        let v = conditional_cp_matrix(&Superoperator::hamiltonian(&h)).unwrap();
        assert!(v.norm() < 1e-14);
    }

    #[test]
    fn lindblad_generators_are_conditionally_cp() {
        let mut r = rng(31);
        for _ in 0..20 {
            let s = lindblad_to_superop(&random_form(&mut r, 2));
            assert!(min_hermitian_eigenvalue(&conditional_cp_matrix(&s).unwrap()) > -1e-12);
        }
        assert!(conditional_cp_matrix(&Superoperator::<f64>::identity(2).scale(cx(0.0, 1.0))).is_err());
    }

    #[test]
    fn depolarizer_projected_choi_is_scaled_projector() {
        let v = conditional_cp_matrix(&depolarizing_generator::<f64>(2)).unwrap();
        assert!((v - perp_projector::<f64>(2) * cx(0.5, 0.0)).norm() < 1e-14);
        let exp = depolarizing_generator::<f64>(2).scale(cx(0.7, 0.0)).exp();
        let rho = crate::superop::testing::random_state(&mut rng(2), 2);
        let want = rho.matrix() * cx((-0.7f64).exp(), 0.0) + CMatrix::identity(2, 2) * cx((1.0 - (-0.7f64).exp()) / 2.0, 0.0);
        assert!((exp.apply(&rho).matrix() - want).norm() < 1e-13);
    }

    #[test]
    fn noise_repairs_indefinite_generator() {
        let mut d = CMatrix::<f64>::zeros(3, 3);
        d[(0, 0)] = cx(-0.1, 0.0);
        d[(1, 1)] = cx(0.5, 0.0);
        let k = lindblad_to_superop(&LindbladForm::new(CMatrix::zeros(2, 2), d).unwrap());
        let mu = candidate_mu(&k);
        let want = 2.0 * 2.0 * 0.1;
        assert!(mu >= want - 1e-9 && mu <= want + 2e-6, "mu = {mu}");
    }

    #[test]
    fn static_model_is_lindbladian() {
        for &w in &[0.7, 1.3, 10.0] {
            let (p, t) = cycle(0.05, 0.0, w);
            let v = floquet_verdict(&p, t, DEFAULT_X_RANGE, Some(&model_static(0.05))).unwrap();
            assert!(v.has_floquet_lindbladian);
            assert_eq!(v.mu_min, 0.0);
            assert!((v.generator.unwrap().matrix() - model_static(0.05).matrix()).norm() < 1e-7);
        }
    }

    #[test]
    fn resonant_static_model_resolves_degenerate_pair() {
        for &w in &[0.5, 2.0] {
            let (p, t) = cycle(0.01, 0.0, w);
            let l0 = model_static(0.01);
            let v = floquet_verdict(&p, t, DEFAULT_X_RANGE, Some(&l0)).unwrap();
            assert!(v.has_floquet_lindbladian);
            assert!((v.generator.unwrap().matrix() - l0.matrix()).norm() < 1e-7);
        }
    }

    #[test]
    fn high_frequency_has_lindbladian() {
        let (p, t) = cycle(0.01, 1.0, 10.0);
        let v = floquet_verdict(&p, t, DEFAULT_X_RANGE, None).unwrap();
        assert!(v.has_floquet_lindbladian);
        assert!(v.quasi_form.unwrap().is_valid_lindblad());
    }

    #[test]
    fn feasibility_is_monotone() {
        let (p, t) = cycle(0.01, 1.0, 1.5);
        let dec = spectral_decompose(&p).unwrap();
        let k = branch_log(&dec, &[0], t).unwrap();
        let v0 = conditional_cp_matrix(&k).unwrap();
        let vn = conditional_cp_matrix(&depolarizing_generator::<f64>(2)).unwrap();
        let mu = bisect_mu(&v0, &vn);
        for s in [1.0, 1.5, 3.0, 10.0] {
            assert!(min_hermitian_eigenvalue(&(&v0 + &vn * cx(mu * s, 0.0))) >= TOL_PSD);
        }
    }

    #[test]
    fn branch_enumeration_order() {
        let b = branches(1, 2);
        assert_eq!(b, vec![vec![0], vec![-1], vec![1], vec![-2], vec![2]]);
        assert_eq!(branches(0, 5), vec![Vec::<i32>::new()]);
        assert_eq!(branches(2, 1).len(), 9);
    }
}
