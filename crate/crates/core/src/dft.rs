//! Unitary DFT helpers.
//!
//! `W_p` denotes the normalized DFT matrix, `[W_p]_{m,n} = e^{-j2πmn/p}/√p`.
//! [`FftDirection::Forward`] applies `W_p`, [`FftDirection::Inverse`] applies
//! `W_p^H`. Blocks of `K*M` samples are stored column-major: entry `(k, m)`
//! lives at `k + m*K`.

use num_complex::Complex;
pub use rustfft::FftDirection;

use crate::scalar::Real;

/// In-place unitary DFT (or inverse) of the whole slice.
pub fn fft_unitary<T: Real>(buf: &mut [Complex<T>], direction: FftDirection) {
    let n = buf.len();
    if n <= 1 {
        return;
    }
    T::fft_cache().plan(n, direction).process(buf);
    let scale = T::one() / T::from_usize(n).unwrap().sqrt();
    buf.iter_mut().for_each(|z| *z = *z * scale);
}

/// Unnormalized forward DFT, `X[l] = Σ x[n] e^{-j2πnl/N}`.
pub fn fft_raw<T: Real>(buf: &mut [Complex<T>]) {
    if buf.len() > 1 {
        T::fft_cache()
            .plan(buf.len(), FftDirection::Forward)
            .process(buf);
    }
}

/// Applies `W_K` (or `W_K^H`) to every column of a column-major `K x M` block.
pub fn transform_columns<T: Real>(
    buf: &mut [Complex<T>],
    k: usize,
    m: usize,
    direction: FftDirection,
) {
    debug_assert_eq!(buf.len(), k * m);
    if k <= 1 {
        return;
    }
    let plan = T::fft_cache().plan(k, direction);
    // rustfft processes consecutive chunks of the plan length in one call
    plan.process(buf);
    let scale = T::one() / T::from_usize(k).unwrap().sqrt();
    buf.iter_mut().for_each(|z| *z = *z * scale);
}

/// Right-multiplies each row of a column-major `K x M` block by `W_M`
/// (forward) or `W_M^H` (inverse).
pub fn transform_rows<T: Real>(
    buf: &mut [Complex<T>],
    k: usize,
    m: usize,
    direction: FftDirection,
) {
    debug_assert_eq!(buf.len(), k * m);
    if m <= 1 {
        return;
    }
    let mut rows = transpose(buf, k, m);
    transform_columns(&mut rows, m, k, direction);
    let back = transpose(&rows, m, k);
    buf.copy_from_slice(&back);
}

/// Transposes a column-major `rows x cols` block into a column-major
/// `cols x rows` block.
pub fn transpose<T: Copy>(buf: &[T], rows: usize, cols: usize) -> Vec<T> {
    debug_assert_eq!(buf.len(), rows * cols);
    let mut out = Vec::with_capacity(buf.len());
    for r in 0..rows {
        for c in 0..cols {
            out.push(buf[r + c * rows]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    fn naive_dft(x: &[Complex<f64>], sign: f64) -> Vec<Complex<f64>> {
        let n = x.len();
        (0..n)
            .map(|l| {
                let acc: Complex<f64> = (0..n)
                    .map(|i| {
                        let th = sign * 2.0 * std::f64::consts::PI * (i * l) as f64 / n as f64;
                        x[i] * Complex::new(th.cos(), th.sin())
                    })
                    .sum();
                acc / (n as f64).sqrt()
            })
            .collect()
    }

    #[test]
    fn unitary_forward_matches_definition() {
        let x: Vec<Complex<f64>> = (0..6).map(|i| cplx(i as f64, 1.0 - i as f64)).collect();
        let mut y = x.clone();
        fft_unitary(&mut y, FftDirection::Forward);
        let r = naive_dft(&x, -1.0);
        for (a, b) in y.iter().zip(&r) {
            assert!((a - b).norm() < 1e-12);
        }
        fft_unitary(&mut y, FftDirection::Inverse);
        for (a, b) in y.iter().zip(&x) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn row_transform_is_right_multiplication() {
        let (k, m) = (3, 4);
        let x: Vec<Complex<f64>> = (0..k * m).map(|i| cplx((i * i) as f64, i as f64)).collect();
        let mut y = x.clone();
        transform_rows(&mut y, k, m, FftDirection::Forward);
        for r in 0..k {
            let row: Vec<_> = (0..m).map(|c| x[r + c * k]).collect();
            let want = naive_dft(&row, -1.0);
            for c in 0..m {
                assert!((y[r + c * k] - want[c]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn transpose_twice_is_identity() {
        let x: Vec<usize> = (0..12).collect();
        assert_eq!(transpose(&transpose(&x, 3, 4), 4, 3), x);
    }
}
