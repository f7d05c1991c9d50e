//! Dense `D x D` GFDM matrices and double-precision reference algebra.
//!
//! Everything here is `O(D²)` memory and at least `O(D²)` time. It exists to
//! check the fast paths, not to run them.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::charmat::PrototypeFilter;
use crate::error::{GfdmError, Result};
use crate::params::GfdmParams;
use crate::scalar::{expj, to_c64, Real};

pub type C64 = Complex<f64>;

/// Default refusal limit on `D` for dense construction.
pub const DEFAULT_DENSE_LIMIT: usize = 4096;

/// The GFDM matrix `A` with columns `g_{k,m}[n] = g[<n - mK>_D]·e^{j2πkn/K}`
/// at position `k + mK`.
#[derive(Debug, Clone)]
pub struct DenseGfdmMatrix<T: Real> {
    params: GfdmParams,
    // column-major D x D
    entries: Vec<Complex<T>>,
}

impl<T: Real> DenseGfdmMatrix<T> {
    pub fn build(g: &PrototypeFilter<T>) -> Result<Self> {
        Self::build_with_limit(g, DEFAULT_DENSE_LIMIT)
    }

    pub fn build_with_limit(g: &PrototypeFilter<T>, limit: usize) -> Result<Self> {
        let p = g.params();
        let d = p.d();
        if d > limit {
            return Err(GfdmError::TooLarge { d, limit });
        }
        let taps = g.taps();
        let mut entries = Vec::with_capacity(d * d);
        for m in 0..p.m() {
            for k in 0..p.k() {
                for n in 0..d {
                    let shifted = taps[(n + d - (m * p.k()) % d) % d];
                    let phase = 2.0 * std::f64::consts::PI * ((k * n) % p.k()) as f64 / p.k() as f64;
                    entries.push(shifted * expj::<T>(phase));
                }
            }
        }
        Ok(Self { params: p, entries })
    }

    pub fn params(&self) -> GfdmParams {
        self.params
    }

    pub fn column(&self, col: usize) -> &[Complex<T>] {
        let d = self.params.d();
        &self.entries[col * d..(col + 1) * d]
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.entries[row + col * self.params.d()]
    }

    /// `x = A d`, the direct `O(D²)` modulator.
    pub fn apply(&self, d: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        self.params.check_len(d.len())?;
        let n = self.params.d();
        let mut out = vec![Complex::new(T::zero(), T::zero()); n];
        for (col, &dv) in d.iter().enumerate() {
            if dv.re == T::zero() && dv.im == T::zero() {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.column(col)) {
                *o = *o + a * dv;
            }
        }
        Ok(out)
    }

    /// Double-precision nalgebra copy.
    pub fn to_nalgebra(&self) -> DMatrix<C64> {
        let d = self.params.d();
        DMatrix::from_iterator(d, d, self.entries.iter().map(|&z| to_c64(z)))
    }
}

/// Normalized DFT matrix `W_p`.
pub fn dft_matrix(p: usize) -> DMatrix<C64> {
    let s = 1.0 / (p as f64).sqrt();
    DMatrix::from_fn(p, p, |r, c| {
        let th = -2.0 * std::f64::consts::PI * ((r * c) % p) as f64 / p as f64;
        C64::new(th.cos(), th.sin()) * s
    })
}

pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

pub fn diag(v: &[C64]) -> DMatrix<C64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(v))
}

/// Circulant matrix `Ψ(c)` whose first column is `c` zero-padded to `d`.
pub fn circulant(c: &[C64], d: usize) -> DMatrix<C64> {
    let mut col = vec![C64::new(0.0, 0.0); d];
    col[..c.len()].copy_from_slice(c);
    DMatrix::from_fn(d, d, |r, k| col[(r + d - k) % d])
}

/// Permutation matrix `Π` with `[Π]_{kM+m, nK+l} = δ_{kl} δ_{mn}`.
pub fn pi_matrix(params: GfdmParams) -> DMatrix<C64> {
    let (k, m) = (params.k(), params.m());
    let d = params.d();
    let mut p = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
    for kk in 0..k {
        for mm in 0..m {
            p[(kk * m + mm, mm * k + kk)] = C64::new(1.0, 0.0);
        }
    }
    p
}

pub fn vec_to_na<T: Real>(v: &[Complex<T>]) -> nalgebra::DVector<C64> {
    nalgebra::DVector::from_iterator(v.len(), v.iter().map(|&z| to_c64(z)))
}

/// 2-norm condition number from the singular values; infinite for exact singularity.
pub fn condition_number(a: &DMatrix<C64>) -> f64 {
    let sv = a.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Dense inverse via LU; `None` when numerically singular.
pub fn inverse(a: &DMatrix<C64>) -> Option<DMatrix<C64>> {
    a.clone().try_inverse()
}

/// Relative Frobenius distance between two dense matrices.
pub fn rel_frob(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}
