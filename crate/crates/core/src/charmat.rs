//! Characteristic-matrix representation of GFDM transmitter matrices.
//!
//! A GFDM matrix `A` with prototype filter `g` is fully described by the
//! `K x M` characteristic matrix
//!
//! ```text
//! G = √D · reshape(g, K, M) · W_M
//! ```
//!
//! which diagonalizes `A` between two unitary Kronecker factors:
//! `A = (W_M^H ⊗ I_K) · diag(vect(G)) · (W_M ⊗ W_K^H)`. Unitarity,
//! invertibility, the inverse-transpose and the receiver energy all reduce to
//! entrywise statements about `G`. The phase-shifted matrix
//! `Ḡ[k,m] = G[k,m]·e^{-j2πkm/D}` absorbs the twiddle factors of a
//! `D`-point FFT and drives the Form-2 transceivers.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::dft::{fft_unitary, transform_columns, transform_rows, transpose, FftDirection};
use crate::error::{GfdmError, Result};
use crate::params::{GfdmParams, Tolerance};
use crate::scalar::{expj, Real};

/// Time-domain prototype transmit filter `g` (length `D`).
#[derive(Debug, Clone, PartialEq)]
pub struct PrototypeFilter<T: Real> {
    params: GfdmParams,
    taps: Vec<Complex<T>>,
}

impl<T: Real> PrototypeFilter<T> {
    pub fn new(params: GfdmParams, taps: Vec<Complex<T>>) -> Result<Self> {
        params.check_len(taps.len())?;
        Ok(Self { params, taps })
    }

    pub fn params(&self) -> GfdmParams {
        self.params
    }

    pub fn taps(&self) -> &[Complex<T>] {
        &self.taps
    }

    pub fn into_taps(self) -> Vec<Complex<T>> {
        self.taps
    }

    /// Squared L2 norm, equal to the energy of the GFDM matrix.
    pub fn energy(&self) -> T {
        self.taps.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b)
    }

    /// Frequency-domain twin `g_f = √D · W_D · g`.
    pub fn frequency_response(&self) -> Vec<Complex<T>> {
        let mut gf = self.taps.clone();
        fft_unitary(&mut gf, FftDirection::Forward);
        let s = T::from_usize(self.params.d()).unwrap().sqrt();
        gf.iter_mut().for_each(|z| *z = *z * s);
        gf
    }
}

/// `K x M` characteristic matrix, stored column-major (`(k, m)` at `k + m*K`).
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicMatrix<T: Real> {
    params: GfdmParams,
    entries: Vec<Complex<T>>,
}

impl<T: Real> CharacteristicMatrix<T> {
    pub fn new(params: GfdmParams, entries: Vec<Complex<T>>) -> Result<Self> {
        params.check_len(entries.len())?;
        if entries.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(GfdmError::InvalidInput(
                "characteristic matrix has non-finite entries".into(),
            ));
        }
        Ok(Self { params, entries })
    }

    /// Builds `G` from a row-major closure `f(k, m)`.
    pub fn from_fn(params: GfdmParams, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Result<Self> {
        let (k, m) = (params.k(), params.m());
        let mut entries = Vec::with_capacity(k * m);
        for mm in 0..m {
            for kk in 0..k {
                entries.push(f(kk, mm));
            }
        }
        Self::new(params, entries)
    }

    /// Matrix with every entry equal to `value`.
    pub fn constant(params: GfdmParams, value: Complex<T>) -> Self {
        Self {
            params,
            entries: vec![value; params.d()],
        }
    }

    pub fn params(&self) -> GfdmParams {
        self.params
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, k: usize, m: usize) -> Complex<T> {
        self.entries[self.params.index(k, m)]
    }

    pub fn scaled(&self, c: Complex<T>) -> Self {
        Self {
            params: self.params,
            entries: self.entries.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn max_abs(&self) -> T {
        self.entries.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    pub fn min_abs(&self) -> T {
        self.entries
            .iter()
            .map(|z| z.norm())
            .fold(T::infinity(), T::min)
    }

    /// `Ḡ[k,m] = G[k,m]·e^{-j2πkm/D}`.
    pub fn phase_shift(&self) -> PhaseShifted<T> {
        PhaseShifted {
            params: self.params,
            entries: twiddle(self.params, &self.entries, -1.0),
        }
    }

    /// Energy `ξ_G = ‖G‖_F² / D`.
    pub fn energy(&self) -> T {
        frob_sq(&self.entries) / T::from_usize(self.params.d()).unwrap()
    }

    /// True iff every entry has unit magnitude, i.e. `A` is unitary.
    pub fn is_unitary(&self, tol: &Tolerance) -> bool {
        self.entries
            .iter()
            .all(|z| (z.norm().to_f64_lossy() - 1.0).abs() <= tol.rel_eps)
    }

    /// True iff all entries share one magnitude (a scaled unitary matrix).
    pub fn is_constant_magnitude(&self, tol: &Tolerance) -> bool {
        let max = self.max_abs().to_f64_lossy();
        let min = self.min_abs().to_f64_lossy();
        max > 0.0 && max - min <= tol.rel_eps * max
    }

    /// First entry whose magnitude falls under the zero threshold.
    pub fn first_zero(&self, tol: &Tolerance) -> Option<(usize, usize)> {
        let thr = tol.zero_threshold(self.max_abs().to_f64_lossy());
        let k = self.params.k();
        self.entries
            .iter()
            .position(|z| z.norm().to_f64_lossy() <= thr)
            .map(|i| (i % k, i / k))
    }

    /// True iff `G` has no zero entries, i.e. `A` is invertible.
    pub fn is_invertible(&self, tol: &Tolerance) -> bool {
        self.first_zero(tol).is_none()
    }

    /// Characteristic matrix `H = (G*)^{∘-1}` of `A^{-H}`.
    pub fn inverse_char(&self, tol: &Tolerance) -> Result<Self> {
        if let Some((k, m)) = self.first_zero(tol) {
            return Err(GfdmError::SingularMatrix { k, m });
        }
        Ok(Self {
            params: self.params,
            entries: self.entries.iter().map(|z| z.conj().inv()).collect(),
        })
    }

    /// Hadamard pseudo-inverse: `1/G*` where `|G|` exceeds the zero threshold, `0` elsewhere.
    ///
    /// Through the unitary factorization this is the characteristic matrix of
    /// `(A^+)^H`, the Moore–Penrose pseudo-inverse of `A`.
    pub fn pseudo_inverse_char(&self, tol: &Tolerance) -> Self {
        let thr = tol.zero_threshold(self.max_abs().to_f64_lossy());
        Self {
            params: self.params,
            entries: self
                .entries
                .iter()
                .map(|z| {
                    if z.norm().to_f64_lossy() > thr {
                        z.conj().inv()
                    } else {
                        Complex::zero()
                    }
                })
                .collect(),
        }
    }

    /// Energy of `A^{-H}`, `ξ_H = Σ 1/(D·|G[k,m]|²)`; also the squared norm
    /// of every row of `A^{-1}`.
    pub fn receiver_energy(&self, tol: &Tolerance) -> Result<T> {
        if let Some((k, m)) = self.first_zero(tol) {
            return Err(GfdmError::SingularMatrix { k, m });
        }
        let d = T::from_usize(self.params.d()).unwrap();
        Ok(self
            .entries
            .iter()
            .map(|z| T::one() / (d * z.norm_sqr()))
            .fold(T::zero(), |a, b| a + b))
    }

    /// `G = √D · reshape(g, K, M) · W_M`.
    pub fn from_time(g: &PrototypeFilter<T>) -> Self {
        let p = g.params;
        let mut buf = g.taps.clone();
        transform_rows(&mut buf, p.k(), p.m(), FftDirection::Forward);
        let s = T::from_usize(p.d()).unwrap().sqrt();
        buf.iter_mut().for_each(|z| *z = *z * s);
        Self {
            params: p,
            entries: buf,
        }
    }

    /// `g = vect(G · W_M^H) / √D`.
    pub fn to_time(&self) -> PrototypeFilter<T> {
        let p = self.params;
        let mut buf = self.entries.clone();
        transform_rows(&mut buf, p.k(), p.m(), FftDirection::Inverse);
        let s = T::one() / T::from_usize(p.d()).unwrap().sqrt();
        buf.iter_mut().for_each(|z| *z = *z * s);
        PrototypeFilter {
            params: p,
            taps: buf,
        }
    }

    /// Frequency-domain prototype filter `g_f = vect(Ḡ^T · W_K)`.
    pub fn to_freq(&self) -> Vec<Complex<T>> {
        self.phase_shift().to_freq()
    }

    /// Inverse of [`Self::to_freq`].
    pub fn from_freq(params: GfdmParams, gf: &[Complex<T>]) -> Result<Self> {
        Ok(PhaseShifted::from_freq(params, gf)?.unshift())
    }
}

/// Phase-shifted characteristic matrix `Ḡ`, stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseShifted<T: Real> {
    params: GfdmParams,
    entries: Vec<Complex<T>>,
}

impl<T: Real> PhaseShifted<T> {
    pub fn new(params: GfdmParams, entries: Vec<Complex<T>>) -> Result<Self> {
        params.check_len(entries.len())?;
        Ok(Self { params, entries })
    }

    pub fn params(&self) -> GfdmParams {
        self.params
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, k: usize, m: usize) -> Complex<T> {
        self.entries[self.params.index(k, m)]
    }

    /// Column `m` (fixed subsymbol frequency) as a contiguous slice.
    pub fn column(&self, m: usize) -> &[Complex<T>] {
        let k = self.params.k();
        &self.entries[m * k..(m + 1) * k]
    }

    /// Recovers `G` from `Ḡ`.
    pub fn unshift(&self) -> CharacteristicMatrix<T> {
        CharacteristicMatrix {
            params: self.params,
            entries: twiddle(self.params, &self.entries, 1.0),
        }
    }

    /// `g_f[k'M + m] = (W_K Ḡ[:, m])[k']`.
    pub fn to_freq(&self) -> Vec<Complex<T>> {
        let p = self.params;
        let mut buf = self.entries.clone();
        transform_columns(&mut buf, p.k(), p.m(), FftDirection::Forward);
        transpose(&buf, p.k(), p.m())
    }

    pub fn from_freq(params: GfdmParams, gf: &[Complex<T>]) -> Result<Self> {
        params.check_len(gf.len())?;
        let mut buf = transpose(gf, params.m(), params.k());
        transform_columns(&mut buf, params.k(), params.m(), FftDirection::Inverse);
        Ok(Self {
            params,
            entries: buf,
        })
    }
}

/// Index map realizing the permutation `Π` with `Π·vect(X) = vect(X^T)` for
/// any `K x M` matrix `X`: `(Π s)[n] = s[map[n]]`.
pub fn pi_permutation(params: GfdmParams) -> Vec<usize> {
    let (k, m) = (params.k(), params.m());
    let mut map = vec![0; k * m];
    for kk in 0..k {
        for mm in 0..m {
            map[kk * m + mm] = kk + mm * k;
        }
    }
    map
}

/// Applies `Π` using a precomputed map.
pub fn apply_pi<X: Copy>(map: &[usize], s: &[X]) -> Vec<X> {
    map.iter().map(|&i| s[i]).collect()
}

/// Applies `Π^T` using a precomputed map.
pub fn apply_pi_transpose<X: Copy + Default>(map: &[usize], t: &[X]) -> Vec<X> {
    let mut out = vec![X::default(); t.len()];
    for (n, &i) in map.iter().enumerate() {
        out[i] = t[n];
    }
    out
}

fn twiddle<T: Real>(p: GfdmParams, entries: &[Complex<T>], sign: f64) -> Vec<Complex<T>> {
    let d = p.d();
    let step = sign * 2.0 * std::f64::consts::PI / d as f64;
    let mut out = entries.to_vec();
    for m in 0..p.m() {
        for k in 0..p.k() {
            let km = (k * m) % d;
            if km != 0 {
                out[k + m * p.k()] = out[k + m * p.k()] * expj::<T>(step * km as f64);
            }
        }
    }
    out
}

fn frob_sq<T: Real>(x: &[Complex<T>]) -> T {
    x.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b)
}

/// Relative Frobenius distance `‖a - b‖ / max(‖b‖, tiny)`.
pub fn rel_err<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> f64 {
    assert_eq!(a.len(), b.len());
    let num: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (*x - *y).norm_sqr().to_f64_lossy())
        .sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr().to_f64_lossy()).sum();
    (num / den.max(f64::MIN_POSITIVE)).sqrt()
}

/// Unit impulse of length `n` at position `at`.
pub fn unit_vector<T: Real>(n: usize, at: usize) -> Vec<Complex<T>> {
    let mut v = vec![Complex::zero(); n];
    v[at] = Complex::one();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    fn p(k: usize, m: usize) -> GfdmParams {
        GfdmParams::new(k, m).unwrap()
    }

    // Per-entry summation of the definition, independent of the FFT path.
    fn char_by_summation(g: &[Complex<f64>], k: usize, m: usize) -> Vec<Complex<f64>> {
        let d = (k * m) as f64;
        let mut out = vec![Complex::zero(); k * m];
        for kk in 0..k {
            for mm in 0..m {
                let mut acc = Complex::zero();
                for mp in 0..m {
                    let th = -2.0 * std::f64::consts::PI * (mp * mm) as f64 / m as f64;
                    acc += g[kk + mp * k] * Complex::new(th.cos(), th.sin()) / (m as f64).sqrt();
                }
                out[kk + mm * k] = acc * d.sqrt();
            }
        }
        out
    }

    #[test]
    fn impulse_filter_k2_m2() {
        let params = p(2, 2);
        let g = PrototypeFilter::new(params, unit_vector::<f64>(4, 0)).unwrap();
        let gm = CharacteristicMatrix::from_time(&g);
        let s2 = 2f64.sqrt();
        // rows: [√2, √2], [0, 0]
        let want = [cplx(s2, 0.0), cplx(0.0, 0.0), cplx(s2, 0.0), cplx(0.0, 0.0)];
        assert!(rel_err(gm.entries(), &want) < 1e-15);
        assert!(rel_err(&char_by_summation(g.taps(), 2, 2), &want) < 1e-15);
        assert!(rel_err(gm.to_time().taps(), g.taps()) < 1e-15);
        assert!(!gm.is_unitary(&Tolerance::default()));
        assert_eq!(gm.first_zero(&Tolerance::default()), Some((1, 0)));
    }

    #[test]
    fn ofdm_window_has_all_ones_characteristic_matrix() {
        let params = p(4, 1);
        let taps = vec![cplx::<f64>(0.5, 0.0); 4];
        let g = PrototypeFilter::new(params, taps.clone()).unwrap();
        let gm = CharacteristicMatrix::from_time(&g);
        assert!(rel_err(gm.entries(), &vec![cplx(1.0, 0.0); 4]) < 1e-15);
        let gf = gm.to_freq();
        assert!(rel_err(&gf, &[cplx(2.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0)]) < 1e-15);
        let back = CharacteristicMatrix::from_freq(params, &gf).unwrap();
        assert!(rel_err(back.entries(), gm.entries()) < 1e-15);
        assert!(rel_err(gm.to_time().taps(), &taps) < 1e-15);
    }

    #[test]
    fn dirichlet_k2_m2_frequency_response() {
        let params = p(2, 2);
        let gbar = PhaseShifted::new(
            params,
            vec![cplx(1.0, 0.0), cplx(1.0, 0.0), cplx(1.0, 0.0), cplx(-1.0, 0.0)],
        )
        .unwrap();
        let s2 = 2f64.sqrt();
        let want = [cplx(s2, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(s2, 0.0)];
        assert!(rel_err(&gbar.to_freq(), &want) < 1e-15);
        let g = CharacteristicMatrix::<f64>::from_freq(params, &want).unwrap();
        assert!(g.is_unitary(&Tolerance::default()));
    }

    #[test]
    fn phase_shift_k2_m2() {
        let params = p(2, 2);
        let g = CharacteristicMatrix::constant(params, cplx::<f64>(1.0, 0.0));
        let gb = g.phase_shift();
        assert!((gb.get(1, 1) - cplx(0.0, -1.0)).norm() < 1e-15);
        assert_eq!(gb.get(0, 1), g.get(0, 1));
        assert_eq!(gb.get(1, 0), g.get(1, 0));
        assert!(rel_err(gb.unshift().entries(), g.entries()) < 1e-15);
    }

    #[test]
    fn energy_examples() {
        let params = p(3, 4);
        let g = CharacteristicMatrix::constant(params, cplx::<f64>(1.0, 0.0));
        assert!((g.energy() - 1.0).abs() < 1e-15);
        let g2 = g.scaled(cplx(0.0, 3.0));
        assert!((g2.energy() - 9.0).abs() < 1e-13);
        let imp = PrototypeFilter::new(params, unit_vector::<f64>(12, 0)).unwrap();
        assert!((CharacteristicMatrix::from_time(&imp).energy() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn inverse_and_receiver_energy() {
        let params = p(3, 2);
        let tol = Tolerance::default();
        let g = CharacteristicMatrix::constant(params, cplx::<f64>(2.0, 0.0));
        let h = g.inverse_char(&tol).unwrap();
        assert!(h.entries().iter().all(|z| (z - cplx(0.5, 0.0)).norm() < 1e-15));
        assert!((g.receiver_energy(&tol).unwrap() - 0.25).abs() < 1e-15);

        let u = CharacteristicMatrix::from_fn(params, |k, m| expj::<f64>((k * 3 + m) as f64 * 0.7)).unwrap();
        let hu = u.inverse_char(&tol).unwrap();
        assert!(rel_err(hu.entries(), u.entries()) < 1e-14);
        assert!((u.receiver_energy(&tol).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn singular_inverse_names_zero_entry() {
        let params = p(2, 3);
        let g = CharacteristicMatrix::from_fn(params, |k, m| {
            if (k, m) == (1, 2) {
                Complex::zero()
            } else {
                cplx::<f64>(1.0, 0.0)
            }
        })
        .unwrap();
        let err = g.inverse_char(&Tolerance::default()).unwrap_err();
        assert_eq!(err, GfdmError::SingularMatrix { k: 1, m: 2 });
        assert!(g.receiver_energy(&Tolerance::default()).is_err());
        let pinv = g.pseudo_inverse_char(&Tolerance::default());
        assert_eq!(pinv.get(1, 2), Complex::zero());
        assert_eq!(pinv.get(0, 0), cplx(1.0, 0.0));
    }

    #[test]
    fn pi_permutation_examples() {
        assert_eq!(pi_permutation(p(1, 1)), vec![0]);
        assert_eq!(pi_permutation(p(2, 2)), vec![0, 2, 1, 3]);
        let params = p(3, 4);
        let x: Vec<usize> = (0..12).collect();
        let map = pi_permutation(params);
        assert_eq!(apply_pi(&map, &x), transpose(&x, 3, 4));
        let back = apply_pi(&pi_permutation(p(4, 3)), &apply_pi(&map, &x));
        assert_eq!(back, x);
        assert_eq!(apply_pi_transpose(&map, &apply_pi(&map, &x)), x);
    }

    #[test]
    fn rejects_wrong_lengths() {
        assert!(PrototypeFilter::<f64>::new(p(2, 2), vec![Complex::zero(); 3]).is_err());
        assert!(CharacteristicMatrix::<f64>::from_freq(p(2, 2), &[Complex::zero(); 5]).is_err());
        assert!(CharacteristicMatrix::<f64>::new(p(1, 1), vec![cplx(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn f32_round_trip() {
        let params = p(4, 3);
        let g = CharacteristicMatrix::<f32>::from_fn(params, |k, m| cplx(1.0 + k as f64, m as f64 - 1.0)).unwrap();
        let back = CharacteristicMatrix::from_time(&g.to_time());
        assert!(rel_err(back.entries(), g.entries()) < 1e-6);
    }
}
