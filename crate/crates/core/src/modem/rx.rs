//! Zero-forcing receivers and the shared two-stage receive structure
//!
//! ```text
//! d̂ = (W_M^H ⊗ W_K) diag(vect H) (I_M ⊗ W_K^H) Π^T diag(F) W_D y
//! ```
//!
//! The ZF receiver uses `F_l = 1/C_l` and `H = Ḡ^{∘-1}`; the MMSE and
//! approximated-MMSE receivers use the same structure with other gains.

use num_complex::Complex;
use num_traits::Zero;

use crate::charmat::{apply_pi, apply_pi_transpose, pi_permutation, CharacteristicMatrix};
use crate::dft::{fft_unitary, transform_columns, transform_rows, FftDirection};
use crate::error::{GfdmError, Result};
use crate::params::{GfdmParams, Tolerance};
use crate::scalar::Real;

/// Receiver output.
#[derive(Debug, Clone, PartialEq)]
pub struct RxReport<T: Real> {
    /// `d̂`, entry `(k, m)` at `k + mK`.
    pub estimates: Vec<Complex<T>>,
    /// `σ²_{k,m}` (same layout) when the receiver computes them. MMSE paths
    /// report them in units of `E_S`.
    pub error_variances: Option<Vec<f64>>,
    /// Per-symbol gain `[B C A]_{i,i}` for biased receivers.
    pub bias: Option<Vec<Complex<T>>>,
    /// Set when a singular GFDM matrix forced the pseudo-inverse.
    pub pseudo_inverse: bool,
}

impl<T: Real> RxReport<T> {
    fn plain(estimates: Vec<Complex<T>>) -> Self {
        Self {
            estimates,
            error_variances: None,
            bias: None,
            pseudo_inverse: false,
        }
    }

    /// Estimates divided by their bias factors (a copy of the estimates when unbiased).
    pub fn unbiased(&self) -> Vec<Complex<T>> {
        match &self.bias {
            None => self.estimates.clone(),
            Some(b) => self
                .estimates
                .iter()
                .zip(b)
                .map(|(e, b)| if b.is_zero() { *e } else { *e / *b })
                .collect(),
        }
    }
}

/// Per-bin equalizer gains `F_l`, `l = 0..D`.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualizerTaps<T: Real> {
    taps: Vec<Complex<T>>,
}

impl<T: Real> EqualizerTaps<T> {
    pub fn new(taps: Vec<Complex<T>>) -> Result<Self> {
        if taps.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(GfdmError::InvalidInput("equalizer taps must be finite".into()));
        }
        Ok(Self { taps })
    }

    /// Unit gains (no equalization).
    pub fn identity(d: usize) -> Self {
        Self {
            taps: vec![Complex::new(T::one(), T::zero()); d],
        }
    }

    pub fn taps(&self) -> &[Complex<T>] {
        &self.taps
    }
}

/// The two-stage receive structure with explicit gains.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredReceiver<T: Real> {
    params: GfdmParams,
    bin_gains: EqualizerTaps<T>,
    char_gains: Vec<Complex<T>>,
    pi: Vec<usize>,
}

impl<T: Real> StructuredReceiver<T> {
    pub fn new(params: GfdmParams, bin_gains: EqualizerTaps<T>, char_gains: Vec<Complex<T>>) -> Result<Self> {
        params.check_len(bin_gains.taps.len())?;
        params.check_len(char_gains.len())?;
        if char_gains.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(GfdmError::InvalidInput("receiver gains must be finite".into()));
        }
        Ok(Self {
            params,
            bin_gains,
            char_gains,
            pi: pi_permutation(params),
        })
    }

    /// Receiver realizing `(W_M^H ⊗ W_K) D₂^{-1} (I_M ⊗ W_K^H) D₃^{-1} Π^T W_D`
    /// with `D₃ = diag(vect w)` and `D₂ = diag(vect z)` in `k + mK` order.
    pub fn from_factors(params: GfdmParams, w: &[Complex<T>], z: &[Complex<T>]) -> Result<Self> {
        params.check_len(w.len())?;
        params.check_len(z.len())?;
        let pi = pi_permutation(params);
        let f: Vec<Complex<T>> = apply_pi(&pi, w).iter().map(|v| v.inv()).collect();
        let h: Vec<Complex<T>> = z.iter().map(|v| v.inv()).collect();
        Self::new(params, EqualizerTaps::new(f)?, h)
    }

    pub fn params(&self) -> GfdmParams {
        self.params
    }

    pub fn bin_gains(&self) -> &EqualizerTaps<T> {
        &self.bin_gains
    }

    /// `H`, entry `(k, m)` at `k + mK`.
    pub fn char_gains(&self) -> &[Complex<T>] {
        &self.char_gains
    }

    pub fn apply(&self, y: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let p = self.params;
        p.check_len(y.len())?;
        let mut buf = y.to_vec();
        fft_unitary(&mut buf, FftDirection::Forward);
        buf.iter_mut()
            .zip(&self.bin_gains.taps)
            .for_each(|(b, f)| *b = *b * *f);
        let mut buf = apply_pi_transpose(&self.pi, &buf);
        transform_columns(&mut buf, p.k(), p.m(), FftDirection::Inverse);
        buf.iter_mut()
            .zip(&self.char_gains)
            .for_each(|(b, h)| *b = *b * *h);
        transform_columns(&mut buf, p.k(), p.m(), FftDirection::Forward);
        transform_rows(&mut buf, p.k(), p.m(), FftDirection::Inverse);
        Ok(buf)
    }

    /// Diagonal of `B C A` for the channel `c_freq` and transmitter `Ḡ`
    /// (constant in `m`), in `k + mK` layout.
    pub fn bias(&self, gbar: &[Complex<T>], c_freq: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let p = self.params;
        p.check_len(gbar.len())?;
        p.check_len(c_freq.len())?;
        let (k, m) = (p.k(), p.m());
        let fc: Vec<Complex<T>> = self
            .bin_gains
            .taps
            .iter()
            .zip(c_freq)
            .map(|(f, c)| *f * *c)
            .collect();
        let fc = apply_pi_transpose(&self.pi, &fc);
        let mut acc = vec![Complex::<T>::zero(); k];
        for col in 0..m {
            let r = col * k..(col + 1) * k;
            let alpha = circulant_column(&self.char_gains[r.clone()]);
            let gamma = circulant_column(&gbar[r.clone()]);
            let b = &fc[r];
            for (kk, out) in acc.iter_mut().enumerate() {
                let mut s = Complex::zero();
                for (j, bj) in b.iter().enumerate() {
                    s = s + alpha[(kk + k - j) % k] * *bj * gamma[(j + k - kk) % k];
                }
                *out = *out + s;
            }
        }
        let inv_m = T::one() / T::from_usize(m).unwrap();
        let per_k: Vec<Complex<T>> = acc.into_iter().map(|z| z * inv_m).collect();
        Ok((0..p.d()).map(|i| per_k[i % k]).collect())
    }
}

/// First column of the circulant `W_K diag(a) W_K^H`:
/// `φ[n] = K^{-1} Σ_p a_p e^{-j2πpn/K}`.
pub(crate) fn circulant_column<T: Real>(a: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut buf = a.to_vec();
    fft_unitary(&mut buf, FftDirection::Forward);
    let s = T::one() / T::from_usize(a.len()).unwrap().sqrt();
    buf.iter_mut().for_each(|z| *z = *z * s);
    buf
}

/// Rejects channels with a frequency bin at or below the zero threshold.
pub fn check_channel<T: Real>(params: GfdmParams, c_freq: &[Complex<T>], tol: &Tolerance) -> Result<()> {
    params.check_len(c_freq.len())?;
    let max = c_freq.iter().map(|z| z.norm().to_f64_lossy()).fold(0.0, f64::max);
    let thr = tol.zero_threshold(max);
    match c_freq.iter().position(|z| z.norm().to_f64_lossy() <= thr) {
        Some(bin) => Err(GfdmError::ChannelNull { bin }),
        None => Ok(()),
    }
}

fn inv_channel<T: Real>(c_freq: &[Complex<T>]) -> Vec<Complex<T>> {
    c_freq.iter().map(|c| c.inv()).collect()
}

fn zf_structure<T: Real>(
    g: &CharacteristicMatrix<T>,
    c_freq: &[Complex<T>],
    tol: &Tolerance,
) -> Result<StructuredReceiver<T>> {
    let p = g.params();
    if let Some((k, m)) = g.first_zero(tol) {
        return Err(GfdmError::SingularMatrix { k, m });
    }
    check_channel(p, c_freq, tol)?;
    let h = g.phase_shift().entries().iter().map(|z| z.inv()).collect();
    StructuredReceiver::new(p, EqualizerTaps::new(inv_channel(c_freq))?, h)
}

/// ZF receiver `d̂ = A^{-1} C^{-1} y` with a single `D`-point FFT.
pub fn rx_zf_form2<T: Real>(
    y: &[Complex<T>],
    g: &CharacteristicMatrix<T>,
    c_freq: &[Complex<T>],
    tol: &Tolerance,
) -> Result<RxReport<T>> {
    Ok(RxReport::plain(zf_structure(g, c_freq, tol)?.apply(y)?))
}

/// Prepared Form-2 ZF receiver, reusable across blocks sharing `(G, C)`.
pub fn zf_receiver<T: Real>(
    g: &CharacteristicMatrix<T>,
    c_freq: &[Complex<T>],
    tol: &Tolerance,
) -> Result<StructuredReceiver<T>> {
    zf_structure(g, c_freq, tol)
}

/// Pseudo-inverse receiver `A^+ C^{-1}`: entries of `Ḡ` under the zero
/// threshold get gain zero. Equal to [`rx_zf_form2`] for invertible `G`.
pub fn pinv_receiver<T: Real>(
    g: &CharacteristicMatrix<T>,
    c_freq: &[Complex<T>],
    tol: &Tolerance,
) -> Result<StructuredReceiver<T>> {
    let p = g.params();
    check_channel(p, c_freq, tol)?;
    let thr = tol.zero_threshold(g.max_abs().to_f64_lossy());
    let h = g
        .phase_shift()
        .entries()
        .iter()
        .map(|z| {
            if z.norm().to_f64_lossy() > thr {
                z.inv()
            } else {
                Complex::zero()
            }
        })
        .collect();
    StructuredReceiver::new(p, EqualizerTaps::new(inv_channel(c_freq))?, h)
}

/// ZF when `G` is invertible, pseudo-inverse otherwise (flagged in the report).
pub fn rx_zf_or_pinv<T: Real>(
    y: &[Complex<T>],
    g: &CharacteristicMatrix<T>,
    c_freq: &[Complex<T>],
    tol: &Tolerance,
) -> Result<RxReport<T>> {
    let singular = !g.is_invertible(tol);
    let mut report = RxReport::plain(pinv_receiver(g, c_freq, tol)?.apply(y)?);
    report.pseudo_inverse = singular;
    Ok(report)
}

/// ZF receiver through the unshifted factorization; two `D`-point FFTs
/// (skipped for a flat channel).
pub fn rx_zf_form1<T: Real>(
    y: &[Complex<T>],
    g: &CharacteristicMatrix<T>,
    c_freq: &[Complex<T>],
    tol: &Tolerance,
) -> Result<RxReport<T>> {
    let p = g.params();
    p.check_len(y.len())?;
    if let Some((k, m)) = g.first_zero(tol) {
        return Err(GfdmError::SingularMatrix { k, m });
    }
    check_channel(p, c_freq, tol)?;
    let mut buf = y.to_vec();
    let one = Complex::new(T::one(), T::zero());
    if c_freq.iter().any(|c| *c != one) {
        fft_unitary(&mut buf, FftDirection::Forward);
        buf.iter_mut().zip(c_freq).for_each(|(b, c)| *b = *b / *c);
        fft_unitary(&mut buf, FftDirection::Inverse);
    }
    transform_rows(&mut buf, p.k(), p.m(), FftDirection::Forward);
    buf.iter_mut().zip(g.entries()).for_each(|(b, c)| *b = *b / *c);
    transform_columns(&mut buf, p.k(), p.m(), FftDirection::Forward);
    transform_rows(&mut buf, p.k(), p.m(), FftDirection::Inverse);
    Ok(RxReport::plain(buf))
}

/// Frequency-domain ZF demodulation of the subcarriers in `subcarriers`:
/// `d̂_k = K^{-1/2} W_M^H R^T diag(h_f)^* (P^{(k)})^T D_C^{-1} W_D y`,
/// where `h_f` is the frequency-domain prototype of `A^{-H}`.
///
/// Returns one length-`M` vector per requested subcarrier.
pub fn rx_zf_freq<T: Real>(
    params: GfdmParams,
    y: &[Complex<T>],
    h_f: &[Complex<T>],
    c_freq: &[Complex<T>],
    subcarriers: &[usize],
    tol: &Tolerance,
) -> Result<Vec<Vec<Complex<T>>>> {
    params.check_len(y.len())?;
    params.check_len(h_f.len())?;
    check_channel(params, c_freq, tol)?;
    let (k, m, d) = (params.k(), params.m(), params.d());
    if let Some(&bad) = subcarriers.iter().find(|&&s| s >= k) {
        return Err(GfdmError::InvalidInput(format!("subcarrier {bad} out of range")));
    }
    let mut spec = y.to_vec();
    fft_unitary(&mut spec, FftDirection::Forward);
    spec.iter_mut().zip(c_freq).for_each(|(s, c)| *s = *s / *c);
    let support: Vec<usize> = (0..d).filter(|&l| !h_f[l].is_zero()).collect();
    let plan = T::fft_cache().plan(m, FftDirection::Inverse);
    let s = T::one() / T::from_usize(k * m).unwrap().sqrt();
    Ok(subcarriers
        .iter()
        .map(|&kk| {
            let mut acc = vec![Complex::zero(); m];
            for &l in &support {
                acc[l % m] = acc[l % m] + h_f[l].conj() * spec[(l + kk * m) % d];
            }
            if m > 1 {
                plan.process(&mut acc);
            }
            acc.iter_mut().for_each(|z| *z = *z * s);
            acc
        })
        .collect())
}

/// Reassembles per-subcarrier estimates into a `k + mK` vector (zeros elsewhere).
pub fn assemble_subcarriers<T: Real>(
    params: GfdmParams,
    subcarriers: &[usize],
    per_k: &[Vec<Complex<T>>],
) -> Vec<Complex<T>> {
    let mut out = vec![Complex::zero(); params.d()];
    for (&kk, v) in subcarriers.iter().zip(per_k) {
        for (mm, z) in v.iter().enumerate() {
            out[params.index(kk, mm)] = *z;
        }
    }
    out
}
