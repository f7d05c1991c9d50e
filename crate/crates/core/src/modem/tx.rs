//! Transmitters. All four compute `x = A d`; they differ only in cost.

use num_complex::Complex;
use num_traits::Zero;

use crate::charmat::{apply_pi, pi_permutation, CharacteristicMatrix, PhaseShifted};
use crate::dense::DenseGfdmMatrix;
use crate::dft::{fft_unitary, transform_columns, transform_rows, FftDirection};
use crate::error::{GfdmError, Result};
use crate::modem::frame::GfdmFrame;
use crate::params::GfdmParams;
use crate::scalar::Real;

fn check_params(a: GfdmParams, b: GfdmParams) -> Result<()> {
    if a != b {
        return Err(GfdmError::InvalidInput(format!(
            "frame is {}x{} but filter is {}x{}",
            a.k(),
            a.m(),
            b.k(),
            b.m()
        )));
    }
    Ok(())
}

/// Dense `O(D²)` modulation through the explicit GFDM matrix.
pub fn tx_direct<T: Real>(frame: &GfdmFrame<T>, g: &CharacteristicMatrix<T>) -> Result<Vec<Complex<T>>> {
    check_params(frame.params(), g.params())?;
    DenseGfdmMatrix::build(&g.to_time())?.apply(frame.data())
}

/// `(W_M ⊗ W_K^H) d`: inverse `K`-point FFT per column, forward `M`-point FFT per row.
fn spread<T: Real>(p: GfdmParams, d: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut buf = d.to_vec();
    transform_columns(&mut buf, p.k(), p.m(), FftDirection::Inverse);
    transform_rows(&mut buf, p.k(), p.m(), FftDirection::Forward);
    buf
}

/// `x = (W_M^H ⊗ I_K) diag(vect G) (W_M ⊗ W_K^H) d`.
pub fn tx_form1<T: Real>(frame: &GfdmFrame<T>, g: &CharacteristicMatrix<T>) -> Result<Vec<Complex<T>>> {
    let p = frame.params();
    check_params(p, g.params())?;
    let mut buf = spread(p, frame.data());
    buf.iter_mut().zip(g.entries()).for_each(|(b, c)| *b = *b * *c);
    transform_rows(&mut buf, p.k(), p.m(), FftDirection::Inverse);
    Ok(buf)
}

/// `x = W_D^H Π (I_M ⊗ W_K) diag(vect Ḡ) (W_M ⊗ W_K^H) d`.
pub fn tx_form2<T: Real>(frame: &GfdmFrame<T>, gbar: &PhaseShifted<T>) -> Result<Vec<Complex<T>>> {
    let p = frame.params();
    check_params(p, gbar.params())?;
    let mut buf = spread(p, frame.data());
    buf.iter_mut().zip(gbar.entries()).for_each(|(b, c)| *b = *b * *c);
    transform_columns(&mut buf, p.k(), p.m(), FftDirection::Forward);
    let mut x = apply_pi(&pi_permutation(p), &buf);
    fft_unitary(&mut x, FftDirection::Inverse);
    Ok(x)
}

/// Frequency-domain modulator
/// `x = K^{-1/2} W_D^H Σ_{k∈𝒦} P^{(k)} diag(g_f) R W_M d_k`.
///
/// Only the nonzero bins of `g_f` are visited. With `max_taps = Some(L_T)`
/// the filter may occupy at most `L_T·M` bins.
pub fn tx_freq_domain<T: Real>(
    frame: &GfdmFrame<T>,
    gf: &[Complex<T>],
    max_taps: Option<usize>,
) -> Result<Vec<Complex<T>>> {
    let p = frame.params();
    p.check_len(gf.len())?;
    let (k, m, d) = (p.k(), p.m(), p.d());
    let support: Vec<usize> = (0..d).filter(|&l| !gf[l].is_zero()).collect();
    if let Some(lt) = max_taps {
        let limit = lt.saturating_mul(m);
        if support.len() > limit {
            return Err(GfdmError::SparsityViolation {
                nonzeros: support.len(),
                limit,
            });
        }
    }
    let data = frame.data();
    let plan_m = T::fft_cache().plan(m, FftDirection::Forward);
    let scale_m = T::one() / T::from_usize(m).unwrap().sqrt();
    let mut spectrum = vec![Complex::zero(); d];
    let mut dk = vec![Complex::zero(); m];
    for &kk in frame.subcarriers() {
        for (mm, v) in dk.iter_mut().enumerate() {
            *v = data[p.index(kk, mm)];
        }
        if m > 1 {
            plan_m.process(&mut dk);
            dk.iter_mut().for_each(|z| *z = *z * scale_m);
        }
        for &l in &support {
            spectrum[(l + kk * m) % d] = spectrum[(l + kk * m) % d] + gf[l] * dk[l % m];
        }
    }
    fft_unitary(&mut spectrum, FftDirection::Inverse);
    let s = T::one() / T::from_usize(k).unwrap().sqrt();
    spectrum.iter_mut().for_each(|z| *z = *z * s);
    Ok(spectrum)
}
