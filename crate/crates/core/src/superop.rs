//! Operators, superoperators and the Lindblad form.
//!
//! Operators are vectorized row-major: entry `(i, j)` of an `N×N` operator
//! sits at index `i·N + j`, so `ρ ↦ AρB` has the matrix `A ⊗ Bᵀ`.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Complex, ComplexField};

use crate::error::{FloquetError, Result};
use crate::linalg::{commutator, frobenius_norm, hermitian_eigenvalues, kron, max_abs, trace};
use crate::scalar::{cx, im, re, CMatrix, Real};

pub const TOL_HERM: f64 = 1e-10;
pub const TOL_TP: f64 = 1e-10;
pub const TOL_PSD: f64 = -1e-9;
pub const TOL_HP: f64 = 1e-9;

fn scaled_tol<T: Real>(tol: f64, m: &CMatrix<T>) -> T {
    T::tol(tol) * max_abs(m).max(T::one())
}

/// Dense `N×N` Hilbert-space operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator<T: Real> {
    matrix: CMatrix<T>,
}

impl<T: Real> Operator<T> {
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(FloquetError::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        Ok(Self { matrix })
    }

    /// Builds an operator and checks Hermiticity to `TOL_HERM`.
    pub fn hermitian(matrix: CMatrix<T>) -> Result<Self> {
        let op = Self::new(matrix)?;
        let dev = op.hermiticity_deviation();
        if dev > scaled_tol(TOL_HERM, &op.matrix) {
            return Err(FloquetError::NotHermitian { deviation: dev.to_f64_lossy() });
        }
        Ok(op)
    }

    pub fn zeros(dim: usize) -> Self {
        Self { matrix: CMatrix::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: CMatrix::identity(dim, dim) }
    }

    pub fn sigma_x() -> Self {
        Self { matrix: pauli(0) }
    }

    pub fn sigma_y() -> Self {
        Self { matrix: pauli(1) }
    }

    pub fn sigma_z() -> Self {
        Self { matrix: pauli(2) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn hermiticity_deviation(&self) -> T {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    pub fn trace(&self) -> Complex<T> {
        trace(&self.matrix)
    }

    /// Row-major vectorization.
    pub fn vectorize(&self) -> nalgebra::DVector<Complex<T>> {
        let n = self.dim();
        nalgebra::DVector::from_fn(n * n, |k, _| self.matrix[(k / n, k % n)])
    }

    pub fn from_vector(v: &nalgebra::DVector<Complex<T>>) -> Result<Self> {
        let n = (v.len() as f64).sqrt().round() as usize;
        if n * n != v.len() {
            return Err(FloquetError::DimensionMismatch { expected: n * n, found: v.len() });
        }
        Ok(Self { matrix: CMatrix::from_fn(n, n, |i, j| v[i * n + j]) })
    }
}

/// Pauli matrix `σ_{k+1}` in the order (x, y, z).
pub fn pauli<T: Real>(k: usize) -> CMatrix<T> {
    let (o, z) = (cx(1.0, 0.0), cx(0.0, 0.0));
    match k {
        0 => CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        1 => CMatrix::from_row_slice(2, 2, &[z, cx(0.0, -1.0), cx(0.0, 1.0), z]),
        2 => CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => panic!("Pauli index {k} out of range"),
    }
}

/// Traceless Hermitian basis with `Tr(F_a F_b) = 2δ_ab` (generalized Gell-Mann).
///
/// Off-diagonal pairs `(j, k)` come first in lexicographic order, symmetric
/// before antisymmetric, then the diagonal generators. For `N = 2` this is
/// (σ_x, σ_y, σ_z).
pub fn traceless_basis<T: Real>(n: usize) -> Vec<CMatrix<T>> {
    let mut basis = Vec::with_capacity(n * n - 1);
    for j in 0..n {
        for k in j + 1..n {
            let mut s = CMatrix::zeros(n, n);
            s[(j, k)] = cx(1.0, 0.0);
            s[(k, j)] = cx(1.0, 0.0);
            basis.push(s);
            let mut a = CMatrix::zeros(n, n);
            a[(j, k)] = cx(0.0, -1.0);
            a[(k, j)] = cx(0.0, 1.0);
            basis.push(a);
        }
    }
    for l in 1..n {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut d = CMatrix::zeros(n, n);
        for j in 0..l {
            d[(j, j)] = cx(norm, 0.0);
        }
        d[(l, l)] = cx(-norm * l as f64, 0.0);
        basis.push(d);
    }
    basis
}

/// Dense `N²×N²` matrix acting on row-major vectorized operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator<T: Real> {
    dim: usize,
    matrix: CMatrix<T>,
}

impl<T: Real> Superoperator<T> {
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        let n2 = matrix.nrows();
        let n = (n2 as f64).sqrt().round() as usize;
        if matrix.ncols() != n2 || n * n != n2 || n == 0 {
            return Err(FloquetError::DimensionMismatch { expected: n * n, found: matrix.ncols() });
        }
        Ok(Self { dim: n, matrix })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, matrix: CMatrix::zeros(dim * dim, dim * dim) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim, matrix: CMatrix::identity(dim * dim, dim * dim) }
    }

    /// The map `ρ ↦ AρB`.
    pub fn sandwich(a: &CMatrix<T>, b: &CMatrix<T>) -> Self {
        Self { dim: a.nrows(), matrix: kron(a, &b.transpose()) }
    }

    /// The map `ρ ↦ −i[H, ρ]`.
    pub fn hamiltonian(h: &CMatrix<T>) -> Self {
        let id = CMatrix::identity(h.nrows(), h.nrows());
        let m = (kron(h, &id) - kron(&id, &h.transpose())) * cx(0.0, -1.0);
        Self { dim: h.nrows(), matrix: m }
    }

    /// Hilbert-space dimension `N`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn apply(&self, rho: &Operator<T>) -> Operator<T> {
        Operator::from_vector(&(&self.matrix * rho.vectorize())).expect("square image")
    }

    pub fn norm(&self) -> T {
        frobenius_norm(&self.matrix)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self { dim: self.dim, matrix: commutator(&self.matrix, &other.matrix) }
    }

    pub fn scale(&self, z: Complex<T>) -> Self {
        Self { dim: self.dim, matrix: &self.matrix * z }
    }

    pub fn adjoint(&self) -> Self {
        Self { dim: self.dim, matrix: self.matrix.adjoint() }
    }

    pub fn exp(&self) -> Self {
        Self { dim: self.dim, matrix: crate::linalg::expm(&self.matrix) }
    }

    pub fn try_inverse(&self) -> Option<Self> {
        self.matrix.clone().try_inverse().map(|m| Self { dim: self.dim, matrix: m })
    }

    /// Largest `|Tr(𝓛 E_ij)|` over matrix units, i.e. the trace-functional defect.
    pub fn trace_defect(&self) -> T {
        let n = self.dim;
        let mut worst = T::zero();
        for col in 0..n * n {
            let mut s = Complex::new(T::zero(), T::zero());
            for i in 0..n {
                s += self.matrix[(i * n + i, col)];
            }
            worst = worst.max(s.modulus());
        }
        worst
    }

    /// First element violating `S[(i,j),(k,l)] = conj S[(j,i),(l,k)]`, with its deviation.
    pub fn hermiticity_defect(&self) -> Option<(usize, usize, T)> {
        let n = self.dim;
        let tol = scaled_tol(TOL_HP, &self.matrix);
        let mut worst: Option<(usize, usize, T)> = None;
        for r in 0..n * n {
            let (i, j) = (r / n, r % n);
            for c in 0..n * n {
                let (k, l) = (c / n, c % n);
                let dev = (self.matrix[(r, c)] - self.matrix[(j * n + i, l * n + k)].conj()).modulus();
                if dev > tol && worst.map_or(true, |w| dev > w.2) {
                    worst = Some((r, c, dev));
                }
            }
        }
        worst
    }

    pub fn is_hermiticity_preserving(&self) -> bool {
        self.hermiticity_defect().is_none()
    }

    pub fn cast<U: Real>(&self) -> Superoperator<U> {
        Superoperator {
            dim: self.dim,
            matrix: self.matrix.map(|z| Complex::new(U::lit(z.re.to_f64_lossy()), U::lit(z.im.to_f64_lossy()))),
        }
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $op:tt) => {
        impl<'a, T: Real> $tr<&'a Superoperator<T>> for &'a Superoperator<T> {
            type Output = Superoperator<T>;
            fn $f(self, rhs: &'a Superoperator<T>) -> Superoperator<T> {
                assert_eq!(self.dim, rhs.dim, "superoperator dimensions differ");
                Superoperator { dim: self.dim, matrix: &self.matrix $op &rhs.matrix }
            }
        }
        impl<T: Real> $tr<Superoperator<T>> for Superoperator<T> {
            type Output = Superoperator<T>;
            fn $f(self, rhs: Superoperator<T>) -> Superoperator<T> {
                (&self).$f(&rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl<T: Real> Mul<Complex<T>> for &Superoperator<T> {
    type Output = Superoperator<T>;
    fn mul(self, z: Complex<T>) -> Superoperator<T> {
        self.scale(z)
    }
}

impl<T: Real> Mul<Complex<T>> for Superoperator<T> {
    type Output = Superoperator<T>;
    fn mul(self, z: Complex<T>) -> Superoperator<T> {
        self.scale(z)
    }
}

impl<T: Real> Neg for Superoperator<T> {
    type Output = Superoperator<T>;
    fn neg(self) -> Superoperator<T> {
        Superoperator { dim: self.dim, matrix: -self.matrix }
    }
}

/// Lindblad pair `(H, d)`: traceless Hermitian Hamiltonian plus Kossakowski
/// matrix in the basis returned by [`traceless_basis`].
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladForm<T: Real> {
    hamiltonian: Operator<T>,
    kossakowski: CMatrix<T>,
}

impl<T: Real> LindbladForm<T> {
    pub fn new(hamiltonian: CMatrix<T>, kossakowski: CMatrix<T>) -> Result<Self> {
        let h = Operator::hermitian(hamiltonian)?;
        let n = h.dim();
        let k = n * n - 1;
        if kossakowski.nrows() != k || kossakowski.ncols() != k {
            return Err(FloquetError::DimensionMismatch { expected: k, found: kossakowski.nrows() });
        }
        let tr = h.trace().modulus();
        if tr > scaled_tol(TOL_HERM, h.matrix()) {
            return Err(FloquetError::NotTraceless { trace: tr.to_f64_lossy() });
        }
        let dev = max_abs(&(&kossakowski - kossakowski.adjoint()));
        if dev > scaled_tol(TOL_HERM, &kossakowski) {
            return Err(FloquetError::NotHermitian { deviation: dev.to_f64_lossy() });
        }
        Ok(Self { hamiltonian: h, kossakowski })
    }

    /// Skips validation; used for results of exact algebra on valid inputs.
    pub fn from_parts_unchecked(hamiltonian: CMatrix<T>, kossakowski: CMatrix<T>) -> Self {
        Self { hamiltonian: Operator { matrix: hamiltonian }, kossakowski }
    }

    pub fn zero(dim: usize) -> Self {
        let k = dim * dim - 1;
        Self::from_parts_unchecked(CMatrix::zeros(dim, dim), CMatrix::zeros(k, k))
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn hamiltonian(&self) -> &CMatrix<T> {
        self.hamiltonian.matrix()
    }

    pub fn kossakowski(&self) -> &CMatrix<T> {
        &self.kossakowski
    }

    /// Ascending eigenvalues of the Hermitian part of the Kossakowski matrix.
    pub fn kossakowski_eigenvalues(&self) -> Vec<T> {
        hermitian_eigenvalues(&self.kossakowski)
    }

    pub fn min_kossakowski_eigenvalue(&self) -> T {
        self.kossakowski_eigenvalues()[0]
    }

    /// Positive semidefinite Kossakowski matrix (to `TOL_PSD`).
    pub fn is_valid_lindblad(&self) -> bool {
        self.min_kossakowski_eigenvalue() >= T::lit(TOL_PSD)
    }

    /// Hamiltonian coefficients `h_k = Tr(H F_k)/2` in the traceless basis.
    pub fn hamiltonian_coefficients(&self) -> Vec<T> {
        traceless_basis::<T>(self.dim())
            .iter()
            .map(|f| (trace(&(self.hamiltonian.matrix() * f)) * re(T::lit(0.5))).re)
            .collect()
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_parts_unchecked(self.hamiltonian.matrix() * re(s), &self.kossakowski * re(s))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_parts_unchecked(self.hamiltonian.matrix() + other.hamiltonian.matrix(), &self.kossakowski + &other.kossakowski)
    }
}

/// Superoperator matrix of `ρ ↦ −i[H,ρ] + Σ d_nm (F_n ρ F_m − ½{F_m F_n, ρ})`.
pub fn lindblad_to_superop<T: Real>(form: &LindbladForm<T>) -> Superoperator<T> {
    if form.dim() == 2 {
        qubit_superop(form)
    } else {
        generic_superop(form)
    }
}

/// Closed-form 4×4 matrix of the general qubit Lindbladian.
fn qubit_superop<T: Real>(form: &LindbladForm<T>) -> Superoperator<T> {
    let h = form.hamiltonian_coefficients();
    let d = form.kossakowski();
    let (h1, h2, h3) = (re(h[0]), re(h[1]), re(h[2]));
    let (a, b, c) = (re(d[(0, 0)].re), re(d[(1, 1)].re), re(d[(2, 2)].re));
    let (dd, e) = (re(d[(0, 1)].re), re(d[(0, 1)].im));
    let (f, g) = (re(d[(0, 2)].re), re(d[(0, 2)].im));
    let (s, t) = (re(d[(1, 2)].re), re(d[(1, 2)].im));
    let i = cx::<T>(0.0, 1.0);
    let two = re(T::lit(2.0));
    #[rustfmt::skip]
    let entries = [
        -a - b - two * e, i * h1 - h2 + f + i * s, -i * h1 - h2 + f - i * s, a + b - two * e,
        i * h1 + h2 + f - i * s - two * i * g - two * t, -two * i * h3 - a - b - two * c, a - b - two * i * dd, -i * h1 - h2 - f + i * s - two * i * g - two * t,
        -i * h1 + h2 + f + i * s + two * i * g - two * t, a - b + two * i * dd, two * i * h3 - a - b - two * c, i * h1 - h2 - f - i * s + two * i * g - two * t,
        a + b + two * e, -i * h1 + h2 - f - i * s, i * h1 + h2 - f + i * s, -a - b + two * e,
    ];
    Superoperator { dim: 2, matrix: CMatrix::from_row_slice(4, 4, &entries) }
}

/// Direct double-sum construction, valid for any `N`.
pub(crate) fn generic_superop<T: Real>(form: &LindbladForm<T>) -> Superoperator<T> {
    let n = form.dim();
    let basis = traceless_basis::<T>(n);
    let id = CMatrix::<T>::identity(n, n);
    let half = re(T::lit(0.5));
    let mut m = Superoperator::hamiltonian(form.hamiltonian()).into_matrix();
    for (a, fa) in basis.iter().enumerate() {
        for (b, fb) in basis.iter().enumerate() {
            let dab = form.kossakowski()[(a, b)];
            if dab == Complex::new(T::zero(), T::zero()) {
                continue;
            }
            let prod = fb * fa;
            let term = kron(fa, &fb.transpose()) - (kron(&prod, &id) + kron(&id, &prod.transpose())) * half;
            m += term * dab;
        }
    }
    Superoperator { dim: n, matrix: m }
}

/// Recovers `(H, d)` from a Hermiticity- and trace-preserving superoperator.
///
/// The Kossakowski matrix is returned as is, so it may be indefinite.
pub fn superop_to_quasi_lindblad<T: Real>(s: &Superoperator<T>) -> Result<LindbladForm<T>> {
    if let Some((row, col, dev)) = s.hermiticity_defect() {
        return Err(FloquetError::NotHermiticityPreserving { row, col, deviation: dev.to_f64_lossy() });
    }
    let n = s.dim();
    let nf = T::from_usize(n).unwrap();
    let sqrt_n = nf.sqrt();
    let inv_sqrt2 = re(T::one() / T::lit(2.0).sqrt());
    let mut basis: Vec<CMatrix<T>> = vec![CMatrix::identity(n, n) * re(T::one() / sqrt_n)];
    basis.extend(traceless_basis::<T>(n).into_iter().map(|f| f * inv_sqrt2));
    let k = basis.len();
    let conj: Vec<CMatrix<T>> = basis.iter().map(|f| f.map(|z| z.conj())).collect();
    let mut c = CMatrix::<T>::zeros(k, k);
    for a in 0..k {
        for b in 0..k {
            let elem = kron(&basis[a], &conj[b]);
            c[(a, b)] = elem.iter().zip(s.matrix().iter()).fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y);
        }
    }
    let mut f = CMatrix::<T>::identity(n, n) * (c[(0, 0)] / re(T::lit(2.0) * nf));
    for i in 1..k {
        f += &basis[i] * (c[(i, 0)] / re(sqrt_n));
    }
    let g = hermitian_part_of(&f);
    let mut residue = g.clone();
    for i in 1..k {
        for j in 1..k {
            residue += (basis[j].adjoint() * &basis[i]) * (c[(i, j)] * re(T::lit(0.5)));
        }
    }
    let res = max_abs(&residue);
    if res > scaled_tol(TOL_TP, s.matrix()) {
        return Err(FloquetError::NotTracePreserving { residue: res.to_f64_lossy() });
    }
    let mut h = (f.adjoint() - &f) * cx(0.0, -0.5);
    let shift = trace(&h) / re(nf);
    for i in 0..n {
        h[(i, i)] -= shift;
    }
    let h = hermitian_part_of(&h);
    let d = CMatrix::from_fn(k - 1, k - 1, |i, j| c[(i + 1, j + 1)] * re(T::lit(0.5)));
    let d = hermitian_part_of(&d);
    Ok(LindbladForm::from_parts_unchecked(h, d))
}

fn hermitian_part_of<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    crate::linalg::hermitian_part(m)
}

fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Structured commutator `[𝓛_a, 𝓛_b]` of two qubit Lindbladians.
///
/// Coherent, mixed coherent-dissipative and purely dissipative pieces are
/// assembled in closed form in the Pauli basis.
pub fn lindblad_commutator<T: Real>(a: &LindbladForm<T>, b: &LindbladForm<T>) -> Result<LindbladForm<T>> {
    if a.dim() != b.dim() {
        return Err(FloquetError::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    if a.dim() != 2 {
        return Err(FloquetError::UnsupportedDimension(a.dim()));
    }
    let (h1, h2) = (a.hamiltonian_coefficients(), b.hamiltonian_coefficients());
    let (d1, d2) = (a.kossakowski(), b.kossakowski());
    let two = T::lit(2.0);
    let mut hv = [T::zero(); 3];
    for (l, hl) in hv.iter_mut().enumerate() {
        for k in 0..3 {
            for q in 0..3 {
                let eps = T::lit(levi_civita(k, q, l));
                *hl += two * eps * h1[k] * h2[q];
            }
        }
        for n in 0..3 {
            for m in 0..3 {
                let eps = T::lit(levi_civita(n, m, l));
                if eps == T::zero() {
                    continue;
                }
                for k in 0..3 {
                    *hl -= two * eps * d1[(n, k)].re * d2[(m, k)].re;
                }
            }
        }
    }
    let mut d = CMatrix::<T>::zeros(3, 3);
    for n in 0..3 {
        for m in 0..3 {
            let mut acc = Complex::new(T::zero(), T::zero());
            for k in 0..3 {
                acc += im(two * (d1[(n, k)] * d2[(m, k)] - d1[(m, k)] * d2[(n, k)]).im);
                for l in 0..3 {
                    let e1 = T::lit(levi_civita(k, n, l));
                    let e2 = T::lit(levi_civita(k, m, l));
                    acc += (d1[(l, m)] * re(h2[k]) - d2[(l, m)] * re(h1[k])) * re(two * e1);
                    acc += (d1[(n, l)] * re(h2[k]) - d2[(n, l)] * re(h1[k])) * re(two * e2);
                }
            }
            d[(n, m)] = acc;
        }
    }
    let mut h = CMatrix::<T>::zeros(2, 2);
    for (k, hk) in hv.iter().enumerate() {
        h += pauli::<T>(k) * re(*hk);
    }
    Ok(LindbladForm::from_parts_unchecked(h, d))
}

/// Commutator for any `N` via the matrix commutator and quasi-Lindblad extraction.
pub fn lindblad_commutator_any<T: Real>(a: &LindbladForm<T>, b: &LindbladForm<T>) -> Result<LindbladForm<T>> {
    if a.dim() == 2 && b.dim() == 2 {
        return lindblad_commutator(a, b);
    }
    let (sa, sb) = (lindblad_to_superop(a), lindblad_to_superop(b));
    if sa.dim() != sb.dim() {
        return Err(FloquetError::DimensionMismatch { expected: sa.dim(), found: sb.dim() });
    }
    superop_to_quasi_lindblad(&sa.commutator(&sb))
}

/// Frobenius norm of `a − b`.
pub fn frobenius_distance<T: Real>(a: &Superoperator<T>, b: &Superoperator<T>) -> Result<T> {
    if a.dim() != b.dim() {
        return Err(FloquetError::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(frobenius_norm(&(a.matrix() - b.matrix())))
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix<f64> {
        CMatrix::from_fn(n, n, |_, _| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix<f64> {
        crate::linalg::hermitian_part(&random_matrix(rng, n))
    }

    pub fn random_form(rng: &mut ChaCha8Rng, n: usize) -> LindbladForm<f64> {
        let mut h = random_hermitian(rng, n);
        let tr = trace(&h) / re(n as f64);
        for i in 0..n {
            h[(i, i)] -= tr;
        }
        let a = random_matrix(rng, n * n - 1);
        let d = &a * a.adjoint();
        LindbladForm::new(h, d).unwrap()
    }

    pub fn random_state(rng: &mut ChaCha8Rng, n: usize) -> Operator<f64> {
        let a = random_matrix(rng, n);
        let rho = &a * a.adjoint();
        let tr = trace(&rho);
        Operator::new(rho / tr).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::testing::*;
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn model_l0(gamma: f64) -> CMatrix<f64> {
        let d = CMatrix::from_row_slice(3, 3, &[c(gamma, 0.0), c(0.0, gamma), c(0.0, 0.0), c(0.0, -gamma), c(gamma, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let h = pauli::<f64>(2) * c(0.5, 0.0);
        lindblad_to_superop(&LindbladForm::new(h, d).unwrap()).into_matrix()
    }

    #[test]
    fn vectorization_is_row_major() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]);
        let v = Operator::new(m).unwrap().vectorize();
        assert_eq!(v.as_slice(), &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]);
    }

    #[test]
    fn sandwich_matches_direct_product() {
        let mut r = rng(1);
        let (a, b, x) = (random_matrix(&mut r, 3), random_matrix(&mut r, 3), random_matrix(&mut r, 3));
        let s = Superoperator::sandwich(&a, &b);
        let got = s.apply(&Operator::new(x.clone()).unwrap());
        assert!((got.matrix() - &a * &x * &b).norm() < 1e-13);
    }

    #[test]
    fn basis_is_orthonormal() {
        for n in 2..=4 {
            let b = traceless_basis::<f64>(n);
            assert_eq!(b.len(), n * n - 1);
            for (i, x) in b.iter().enumerate() {
                assert!(trace(x).norm() < 1e-14);
                assert!((x - x.adjoint()).norm() < 1e-14);
                for (j, y) in b.iter().enumerate() {
                    let want = if i == j { 2.0 } else { 0.0 };
                    assert!((trace(&(x * y)) - c(want, 0.0)).norm() < 1e-13);
                }
            }
        }
        let b = traceless_basis::<f64>(2);
        for k in 0..3 {
            assert_eq!(b[k], pauli(k));
        }
    }

    #[test]
    fn static_qubit_hamiltonian_is_diagonal() {
        let form = LindbladForm::new(pauli::<f64>(2) * c(0.5, 0.0), CMatrix::zeros(3, 3)).unwrap();
        let s = lindblad_to_superop(&form);
        let want = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]));
        assert!((s.matrix() - want).norm() < 1e-15);
    }

    #[test]
    fn null_form_gives_zero_matrix() {
        assert_eq!(lindblad_to_superop(&LindbladForm::<f64>::zero(2)).into_matrix(), CMatrix::zeros(4, 4));
    }

    #[test]
    fn drive_term_matrix() {
        let e = 0.8;
        let form = LindbladForm::new(pauli::<f64>(0) * c(e / 2.0, 0.0), CMatrix::zeros(3, 3)).unwrap();
        let a = lindblad_to_superop(&form).into_matrix() * c(0.0, 1.0);
        #[rustfmt::skip]
        let want = CMatrix::from_row_slice(4, 4, &[
            0.0, -1.0, 1.0, 0.0,
            -1.0, 0.0, 0.0, 1.0,
            1.0, 0.0, 0.0, -1.0,
            0.0, 1.0, -1.0, 0.0,
        ].map(|x| c(x * e / 2.0, 0.0)));
        assert!((a - want).norm() < 1e-15);
    }

    #[test]
    fn static_dissipator_matrix() {
        let g = 0.03;
        #[rustfmt::skip]
        let want = CMatrix::from_row_slice(4, 4, &[
            c(-4.0 * g, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
            c(0.0, 0.0), c(-2.0 * g, -1.0), c(0.0, 0.0), c(0.0, 0.0),
            c(0.0, 0.0), c(0.0, 0.0), c(-2.0 * g, 1.0), c(0.0, 0.0),
            c(4.0 * g, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
        ]);
        assert!((model_l0(g) - want).norm() < 1e-15);
    }

    #[test]
    fn closed_form_matches_double_sum() {
        let mut r = rng(7);
        for _ in 0..50 {
            let form = random_form(&mut r, 2);
            let diff = qubit_superop(&form).into_matrix() - generic_superop(&form).into_matrix();
            assert!(diff.norm() < 1e-13, "{diff}");
        }
    }

    #[test]
    fn generated_maps_preserve_trace_and_hermiticity() {
        let mut r = rng(3);
        for n in 2..=3 {
            for _ in 0..10 {
                let s = lindblad_to_superop(&random_form(&mut r, n));
                assert!(s.trace_defect() < 1e-13);
                assert!(s.is_hermiticity_preserving());
                let rho = random_state(&mut r, n);
                assert!(s.apply(&rho).trace().norm() < 1e-12);
            }
        }
    }

    #[test]
    fn quasi_lindblad_round_trip() {
        let mut r = rng(11);
        for n in [2, 2, 3] {
            for _ in 0..100 {
                let form = random_form(&mut r, n);
                let back = superop_to_quasi_lindblad(&lindblad_to_superop(&form)).unwrap();
                assert!((back.hamiltonian() - form.hamiltonian()).norm() < 1e-10);
                assert!((back.kossakowski() - form.kossakowski()).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn quasi_lindblad_of_static_and_zero() {
        let s = Superoperator::new(CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]))).unwrap();
        let f = superop_to_quasi_lindblad(&s).unwrap();
        assert!((f.hamiltonian() - pauli::<f64>(2) * c(0.5, 0.0)).norm() < 1e-14);
        assert!(f.kossakowski().norm() < 1e-14);
        let z = superop_to_quasi_lindblad(&Superoperator::<f64>::zeros(2)).unwrap();
        assert_eq!(z.hamiltonian().norm(), 0.0);
        assert_eq!(z.kossakowski().norm(), 0.0);
    }

    #[test]
    fn quasi_lindblad_rejects_bad_inputs() {
        let s = lindblad_to_superop(&random_form(&mut rng(5), 2)).scale(c(0.0, 1.0));
        assert!(matches!(superop_to_quasi_lindblad(&s), Err(FloquetError::NotHermiticityPreserving { .. })));
        let id = Superoperator::<f64>::identity(2);
        assert!(matches!(superop_to_quasi_lindblad(&id), Err(FloquetError::NotTracePreserving { .. })));
    }

    #[test]
    fn commutator_of_model_terms() {
        let (g, e) = (0.02, 0.7);
        let l0 = superop_to_quasi_lindblad(&Superoperator::new(model_l0(g)).unwrap()).unwrap();
        let l1 = LindbladForm::new(pauli::<f64>(0) * c(e / 2.0, 0.0), CMatrix::zeros(3, 3)).unwrap();
        let com = lindblad_commutator(&l0, &l1).unwrap();
        assert!((com.hamiltonian() - pauli::<f64>(1) * c(e / 2.0, 0.0)).norm() < 1e-14);
        #[rustfmt::skip]
        let want = CMatrix::from_row_slice(3, 3, &[
            c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0),
            c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0),
            c(0.0, 1.0), c(-1.0, 0.0), c(0.0, 0.0),
        ]) * c(g * e, 0.0);
        assert!((com.kossakowski() - want).norm() < 1e-14);
    }

    #[test]
    fn structured_commutator_matches_matrix_commutator() {
        let mut r = rng(13);
        for _ in 0..50 {
            let (a, b) = (random_form(&mut r, 2), random_form(&mut r, 2));
            let got = lindblad_to_superop(&lindblad_commutator(&a, &b).unwrap());
            let want = lindblad_to_superop(&a).commutator(&lindblad_to_superop(&b));
            assert!(frobenius_distance(&got, &want).unwrap() < 1e-10);
        }
    }

    #[test]
    fn self_commutator_vanishes() {
        let a = random_form(&mut rng(17), 2);
        let z = lindblad_commutator(&a, &a).unwrap();
        assert!(z.hamiltonian().norm() < 1e-14 && z.kossakowski().norm() < 1e-14);
    }

    #[test]
    fn commutator_requires_qubits() {
        let mut r = rng(19);
        let (a, b) = (random_form(&mut r, 3), random_form(&mut r, 3));
        assert_eq!(lindblad_commutator(&a, &b), Err(FloquetError::UnsupportedDimension(3)));
        let got = lindblad_to_superop(&lindblad_commutator_any(&a, &b).unwrap());
        let want = lindblad_to_superop(&a).commutator(&lindblad_to_superop(&b));
        assert!(frobenius_distance(&got, &want).unwrap() < 1e-10);
    }

    #[test]
    fn frobenius_distance_examples() {
        let id = Superoperator::<f64>::identity(2);
        assert_eq!(frobenius_distance(&id, &id).unwrap(), 0.0);
        assert!((frobenius_distance(&Superoperator::zeros(2), &id).unwrap() - 2.0).abs() < 1e-15);
        assert!(frobenius_distance(&id, &Superoperator::identity(3)).is_err());
    }

    #[test]
    fn form_validation() {
        let bad_h = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(-1.0, 0.0)]);
        assert!(matches!(LindbladForm::new(bad_h, CMatrix::zeros(3, 3)), Err(FloquetError::NotHermitian { .. })));
        assert!(matches!(LindbladForm::<f64>::new(CMatrix::identity(2, 2), CMatrix::zeros(3, 3)), Err(FloquetError::NotTraceless { .. })));
        assert!(matches!(LindbladForm::<f64>::new(CMatrix::zeros(2, 2), CMatrix::zeros(2, 2)), Err(FloquetError::DimensionMismatch { .. })));
        let mut d = CMatrix::zeros(3, 3);
        d[(0, 0)] = c(-1.0, 0.0);
        assert!(!LindbladForm::new(CMatrix::zeros(2, 2), d).unwrap().is_valid_lindblad());
    }

    #[test]
    fn single_precision_superop() {
        let form = LindbladForm::<f32>::new(pauli::<f32>(2) * Complex::new(0.5, 0.0), CMatrix::zeros(3, 3)).unwrap();
        let s = lindblad_to_superop(&form);
        assert!((s.matrix()[(1, 1)] - Complex::new(0.0, -1.0)).norm() < 1e-6);
    }
}
