//! Dense complex linear algebra helpers on top of nalgebra.

use nalgebra::{Complex, ComplexField, Schur, SymmetricEigen, SVD};

use crate::scalar::{re, CMatrix, Real};

pub fn commutator<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    a * b - b * a
}

pub fn anticommutator<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    a * b + b * a
}

pub fn kron<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    a.kronecker(b)
}

pub fn frobenius_norm<T: Real>(a: &CMatrix<T>) -> T {
    a.norm()
}

pub fn max_abs<T: Real>(a: &CMatrix<T>) -> T {
    a.iter().fold(T::zero(), |acc, z| acc.max(z.modulus()))
}

pub fn hermitian_part<T: Real>(a: &CMatrix<T>) -> CMatrix<T> {
    (a + a.adjoint()) * re(T::lit(0.5))
}

pub fn trace<T: Real>(a: &CMatrix<T>) -> Complex<T> {
    a.diagonal().iter().fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + *z)
}

/// Eigen-decomposition of the Hermitian part of `a`, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T: Real> {
    pub values: Vec<T>,
    pub vectors: CMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    pub fn new(a: &CMatrix<T>) -> Self {
        let eig = SymmetricEigen::new(hermitian_part(a));
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
        let n = a.nrows();
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Self { values, vectors }
    }

    /// Evaluates `f(a) = U diag(f(λ)) U†`.
    pub fn apply<F: Fn(T) -> Complex<T>>(&self, f: F) -> CMatrix<T> {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (c, &v) in self.values.iter().enumerate() {
            let fv = f(v);
            for r in 0..n {
                scaled[(r, c)] *= fv;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

pub fn hermitian_eigenvalues<T: Real>(a: &CMatrix<T>) -> Vec<T> {
    let mut v: Vec<T> = SymmetricEigen::new(hermitian_part(a)).eigenvalues.iter().copied().collect();
    v.sort_by(|x, y| x.partial_cmp(y).unwrap());
    v
}

pub fn min_hermitian_eigenvalue<T: Real>(a: &CMatrix<T>) -> T {
    hermitian_eigenvalues(a).first().copied().unwrap_or_else(T::zero)
}

/// Eigenvalues of a general complex matrix from its Schur form.
pub fn eigenvalues<T: Real>(a: &CMatrix<T>) -> Vec<Complex<T>> {
    let n = a.nrows();
    if n == 0 {
        return Vec::new();
    }
    let (_, t) = Schur::new(a.clone()).unpack();
    let scale = max_abs(&t).max(T::one());
    let small = scale * T::lit(T::EPS);
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)].modulus() > small {
            let (a11, a12, a21, a22) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
            let half = re(T::lit(0.5));
            let mean = (a11 + a22) * half;
            let disc = ComplexField::sqrt((a11 - a22) * half * ((a11 - a22) * half) + a12 * a21);
            out.push(mean + disc);
            out.push(mean - disc);
            i += 2;
        } else {
            out.push(t[(i, i)]);
            i += 1;
        }
    }
    out
}

pub fn expm<T: Real>(a: &CMatrix<T>) -> CMatrix<T> {
    a.clone().exp()
}

/// Singular values in descending order.
pub fn singular_values<T: Real>(a: &CMatrix<T>) -> Vec<T> {
    let mut s: Vec<T> = a.clone().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    s
}

/// Induced 2-norm (largest singular value).
pub fn spectral_norm<T: Real>(a: &CMatrix<T>) -> T {
    singular_values(a).first().copied().unwrap_or_else(T::zero)
}

pub fn condition_number<T: Real>(a: &CMatrix<T>) -> T {
    let s = singular_values(a);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > T::zero() => hi / lo,
        (Some(_), Some(_)) => T::max_value().unwrap(),
        _ => T::one(),
    }
}

/// Approximate right and left null spaces of a square matrix.
#[derive(Debug, Clone)]
pub struct NullSpaces<T: Real> {
    /// Columns span vectors `v` with `a v ≈ 0`.
    pub right: CMatrix<T>,
    /// Columns span vectors `w` with `w† a ≈ 0`.
    pub left: CMatrix<T>,
    /// Largest singular value among the retained directions.
    pub residual: T,
    /// Smallest singular value among the discarded directions.
    pub gap: T,
}

fn smallest_right_singular<T: Real>(a: &CMatrix<T>, m: usize) -> (CMatrix<T>, T, T) {
    let n = a.nrows();
    let svd = SVD::new(a.clone(), false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].partial_cmp(&svd.singular_values[j]).unwrap());
    let chosen = &order[..m];
    let vecs = CMatrix::from_fn(n, m, |r, c| v_t[(chosen[c], r)].conj());
    let residual = chosen.iter().map(|&i| svd.singular_values[i]).fold(T::zero(), |a, b| a.max(b));
    let gap = order.get(m).map(|&i| svd.singular_values[i]).unwrap_or_else(|| T::max_value().unwrap());
    (vecs, residual, gap)
}

/// The `m` singular directions of `a` with the smallest singular values.
///
/// Both spaces come from right singular vectors (of `a` and `a†`): left
/// singular vectors paired with near-zero singular values are not reliable.
pub fn null_spaces<T: Real>(a: &CMatrix<T>, m: usize) -> NullSpaces<T> {
    let (right, r1, g1) = smallest_right_singular(a, m);
    let (left, r2, g2) = smallest_right_singular(&a.adjoint(), m);
    NullSpaces { right, left, residual: r1.max(r2), gap: g1.min(g2) }
}
