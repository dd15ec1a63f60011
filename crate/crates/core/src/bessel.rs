//! Bessel functions of integer order and real argument.
//!
//! Both families use Miller's backward recurrence normalized by a
//! generating-function sum, which is stable for every order and argument.

use crate::scalar::Real;

const RESCALE: f64 = 1e10;

fn start_index(n_max: usize, ax: f64) -> usize {
    let top = (n_max as f64).max(ax);
    let m = top + 20.0 + (160.0 * top).sqrt();
    2 * (m as usize / 2 + 1)
}

/// `J_0(x), …, J_{n_max}(x)`.
pub fn bessel_j_seq<T: Real>(n_max: usize, x: T) -> Vec<T> {
    let mut out = vec![T::zero(); n_max + 1];
    if x == T::zero() {
        out[0] = T::one();
        return out;
    }
    let ax = x.abs();
    let m = start_index(n_max, ax.to_f64_lossy());
    let two = T::lit(2.0);
    let big = T::lit(RESCALE);
    let (mut above, mut here) = (T::zero(), T::one());
    let mut norm = T::zero();
    for k in (1..=m).rev() {
        let below = two * T::from_usize(k).unwrap() / ax * here - above;
        above = here;
        here = below;
        let idx = k - 1;
        if idx <= n_max {
            out[idx] = here;
        }
        if idx > 0 && idx % 2 == 0 {
            norm += two * here;
        }
        if here.abs() > big {
            let scale = T::one() / here.abs();
            here *= scale;
            above *= scale;
            norm *= scale;
            for v in out.iter_mut() {
                *v *= scale;
            }
        }
    }
    norm += here;
    for (k, v) in out.iter_mut().enumerate() {
        *v /= norm;
        if x < T::zero() && k % 2 == 1 {
            *v = -*v;
        }
    }
    out
}

/// `J_n(x)` for any integer order.
pub fn bessel_j<T: Real>(n: i64, x: T) -> T {
    let v = bessel_j_seq(n.unsigned_abs() as usize, x)[n.unsigned_abs() as usize];
    if n < 0 && n % 2 != 0 {
        -v
    } else {
        v
    }
}

/// `J_n(x)` for `n ∈ [-n_max, n_max]`, indexed by `n + n_max`.
pub fn bessel_j_symmetric<T: Real>(n_max: usize, x: T) -> Vec<T> {
    let pos = bessel_j_seq(n_max, x);
    (0..=2 * n_max)
        .map(|i| {
            let n = i as i64 - n_max as i64;
            let v = pos[n.unsigned_abs() as usize];
            if n < 0 && n % 2 != 0 {
                -v
            } else {
                v
            }
        })
        .collect()
}

/// Exponentially scaled modified Bessel functions `e^{-|x|} I_k(x)` for `k = 0..=n_max`.
pub fn bessel_i_scaled_seq<T: Real>(n_max: usize, x: T) -> Vec<T> {
    let mut out = vec![T::zero(); n_max + 1];
    if x == T::zero() {
        out[0] = T::one();
        return out;
    }
    let ax = x.abs();
    let m = start_index(n_max, ax.to_f64_lossy());
    let two = T::lit(2.0);
    let big = T::lit(RESCALE);
    let (mut above, mut here) = (T::zero(), T::one());
    let mut norm = T::zero();
    for k in (1..=m).rev() {
        let below = two * T::from_usize(k).unwrap() / ax * here + above;
        above = here;
        here = below;
        let idx = k - 1;
        if idx <= n_max {
            out[idx] = here;
        }
        if idx > 0 {
            norm += two * here;
        }
        if here > big {
            let scale = T::one() / here.abs();
            here *= scale;
            above *= scale;
            norm *= scale;
            for v in out.iter_mut() {
                *v *= scale;
            }
        }
    }
    norm += here;
    for (k, v) in out.iter_mut().enumerate() {
        *v /= norm;
        if x < T::zero() && k % 2 == 1 {
            *v = -*v;
        }
    }
    out
}

/// `e^{-|x|} I_n(x)` for any integer order.
pub fn bessel_i_scaled<T: Real>(n: i64, x: T) -> T {
    bessel_i_scaled_seq(n.unsigned_abs() as usize, x)[n.unsigned_abs() as usize]
}
