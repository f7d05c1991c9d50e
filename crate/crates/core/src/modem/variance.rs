//! Per-symbol error variances `σ²_{k,m} = [R_e]_{k+mK}` of the ZF and MMSE
//! receivers. Both are constant in `m`.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::charmat::{CharacteristicMatrix, PhaseShifted};
use crate::dft::{fft_unitary, FftDirection};
use crate::error::{GfdmError, Result};
use crate::modem::mmse::{dense_channel_gfdm, mmse_lowcomp_exists, MmseCondition, DEFAULT_SPREAD_TOL};
use crate::modem::rx::{check_channel, circulant_column};
use crate::params::Tolerance;
use crate::scalar::{to_c64, Real};
use crate::dense::{dft_matrix, C64};

/// Circular convolution `(a ⊛ b)[k] = Σ_j a[(k - j) mod K] b[j]` of real sequences.
pub(crate) fn circular_convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut fa: Vec<C64> = a.iter().map(|v| C64::new(*v, 0.0)).collect();
    let mut fb: Vec<C64> = b.iter().map(|v| C64::new(*v, 0.0)).collect();
    fft_unitary(&mut fa, FftDirection::Forward);
    fft_unitary(&mut fb, FftDirection::Forward);
    let s = (n as f64).sqrt();
    let mut prod: Vec<C64> = fa.iter().zip(&fb).map(|(x, y)| x * y * s).collect();
    fft_unitary(&mut prod, FftDirection::Inverse);
    prod.iter().map(|z| z.re).collect()
}

fn spread_over_m(k: usize, m: usize, per_k: &[f64]) -> Vec<f64> {
    (0..k * m).map(|i| per_k[i % k]).collect()
}

/// ZF error variances `N₀ · diag(A^{-1} C^{-1} C^{-H} A^{-H})` in `O(KM log K)`.
pub fn error_variances_zf<T: Real>(gbar: &PhaseShifted<T>, c_freq: &[Complex<T>], n0: f64) -> Result<Vec<f64>> {
    let p = gbar.params();
    let tol = Tolerance::default();
    if let Some((k, m)) = gbar.unshift().first_zero(&tol) {
        return Err(GfdmError::SingularMatrix { k, m });
    }
    check_channel(p, c_freq, &tol)?;
    let (k, m) = (p.k(), p.m());
    let mut acc = vec![0.0; k];
    for col in 0..m {
        let h: Vec<C64> = gbar.column(col).iter().map(|z| to_c64(*z).inv()).collect();
        let phi: Vec<f64> = circulant_column(&h).iter().map(|z| z.norm_sqr()).collect();
        let r: Vec<f64> = (0..k)
            .map(|kk| 1.0 / to_c64(c_freq[kk * m + col]).norm_sqr())
            .collect();
        for (a, v) in acc.iter_mut().zip(circular_convolve(&phi, &r)) {
            *a += v;
        }
    }
    let per_k: Vec<f64> = acc.iter().map(|v| n0 * v / m as f64).collect();
    Ok(spread_over_m(k, m, &per_k))
}

/// MMSE error variances `E_S · diag((I + γ (CA)^H CA)^{-1})`.
///
/// Columns satisfying either structured-MMSE condition cost `O(K log K)`;
/// any other column falls back to one `K x K` inversion.
pub fn error_variances_mmse<T: Real>(
    gbar: &PhaseShifted<T>,
    c_freq: &[Complex<T>],
    gamma: f64,
    es: f64,
) -> Result<Vec<f64>> {
    let p = gbar.params();
    p.check_len(c_freq.len())?;
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(GfdmError::InvalidInput(format!("SNR must be finite and nonnegative (got {gamma})")));
    }
    let (k, m) = (p.k(), p.m());
    let check = mmse_lowcomp_exists(gbar, c_freq, DEFAULT_SPREAD_TOL)?;
    let mut acc = vec![0.0; k];
    for col in 0..m {
        let v: Vec<C64> = gbar.column(col).iter().map(|z| to_c64(*z)).collect();
        let u2: Vec<f64> = (0..k).map(|kk| to_c64(c_freq[kk * m + col]).norm_sqr()).collect();
        let diag: Vec<f64> = match check.columns[col] {
            Some(MmseCondition::FilterColumn) => {
                let c = v[0].norm_sqr();
                let phase: Vec<C64> = v.iter().map(|z| z.conj() / z.norm()).collect();
                let psi: Vec<f64> = circulant_column(&phase).iter().map(|z| z.norm_sqr()).collect();
                let rho: Vec<f64> = u2.iter().map(|u| 1.0 / (1.0 + gamma * c * u)).collect();
                circular_convolve(&psi, &rho)
            }
            Some(MmseCondition::ChannelComb) => {
                let c = u2[0];
                let mean = v.iter().map(|z| 1.0 / (1.0 + gamma * c * z.norm_sqr())).sum::<f64>() / k as f64;
                vec![mean; k]
            }
            None => dense_block_diag(&v, &u2, gamma),
        };
        for (a, d) in acc.iter_mut().zip(diag) {
            *a += d;
        }
    }
    let per_k: Vec<f64> = acc.iter().map(|v| es * v / m as f64).collect();
    Ok(spread_over_m(k, m, &per_k))
}

/// `diag(W_K (I + γ diag(v^*) W_K^H diag(|u|²) W_K diag(v))^{-1} W_K^H)`.
fn dense_block_diag(v: &[C64], u2: &[f64], gamma: f64) -> Vec<f64> {
    let k = v.len();
    let w = dft_matrix(k);
    let dv = DMatrix::from_fn(k, k, |r, c| if r == c { v[r] } else { C64::new(0.0, 0.0) });
    let du = DMatrix::from_fn(k, k, |r, c| if r == c { C64::new(u2[r], 0.0) } else { C64::new(0.0, 0.0) });
    let b = dv.adjoint() * w.adjoint() * du * &w * &dv;
    let m = DMatrix::<C64>::identity(k, k) + b * C64::new(gamma, 0.0);
    let x = m.try_inverse().expect("positive definite");
    let y = &w * x * w.adjoint();
    (0..k).map(|i| y[(i, i)].re).collect()
}

/// Dense oracle for [`error_variances_zf`].
pub fn error_variances_zf_dense<T: Real>(
    g: &CharacteristicMatrix<T>,
    c_freq: &[Complex<T>],
    n0: f64,
) -> Result<Vec<f64>> {
    let ca = dense_channel_gfdm(g, c_freq)?;
    let inv = ca
        .try_inverse()
        .ok_or(GfdmError::InvalidInput("C A is singular".into()))?;
    let re = &inv * inv.adjoint();
    Ok((0..re.nrows()).map(|i| n0 * re[(i, i)].re).collect())
}

/// Dense oracle for [`error_variances_mmse`].
pub fn error_variances_mmse_dense<T: Real>(
    g: &CharacteristicMatrix<T>,
    c_freq: &[Complex<T>],
    gamma: f64,
    es: f64,
) -> Result<Vec<f64>> {
    let ca = dense_channel_gfdm(g, c_freq)?;
    let d = ca.nrows();
    let m = DMatrix::<C64>::identity(d, d) + ca.adjoint() * ca * C64::new(gamma, 0.0);
    let inv = m.try_inverse().expect("positive definite");
    Ok((0..d).map(|i| es * inv[(i, i)].re).collect())
}
