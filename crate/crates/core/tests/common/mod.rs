#![allow(dead_code)]

use gfdm_core::channel::{sample_rayleigh, PowerDelayProfile};
use gfdm_core::dense::{dft_matrix, diag, kron, pi_matrix, C64};
use gfdm_core::{CharacteristicMatrix, ChannelRealization, GfdmParams};
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cn(rng: &mut impl Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_vec(rng: &mut impl Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| cn(rng)).collect()
}

/// Random G with entry magnitudes bounded away from zero.
pub fn random_char(rng: &mut impl Rng, p: GfdmParams) -> CharacteristicMatrix<f64> {
    CharacteristicMatrix::from_fn(p, |_, _| {
        let mag = rng.random_range(0.3..2.0);
        let ph: f64 = rng.random_range(-3.14..3.14);
        C64::from_polar(mag, ph)
    })
    .unwrap()
}

pub fn random_unitary_char(rng: &mut impl Rng, p: GfdmParams) -> CharacteristicMatrix<f64> {
    CharacteristicMatrix::from_fn(p, |_, _| C64::from_polar(1.0, rng.random_range(-3.14..3.14))).unwrap()
}

/// Random multipath channel with `taps` taps; draws repeat until no bin is tiny.
pub fn random_channel(rng: &mut ChaCha8Rng, d: usize, taps: usize) -> ChannelRealization<f64> {
    let pdp = PowerDelayProfile::new(vec![1.0; taps.min(d)], true).unwrap();
    loop {
        let ch = sample_rayleigh::<f64, _>(&pdp, d, rng).unwrap();
        if ch.min_abs_response() > 0.05 {
            return ch;
        }
    }
}

/// `(W_M^H ⊗ I_K) diag(vect G) (W_M ⊗ W_K^H)`.
pub fn form1_product(g: &CharacteristicMatrix<f64>) -> DMatrix<C64> {
    let p = g.params();
    let (wk, wm) = (dft_matrix(p.k()), dft_matrix(p.m()));
    let ik = DMatrix::<C64>::identity(p.k(), p.k());
    kron(&wm.adjoint(), &ik) * diag(g.entries()) * kron(&wm, &wk.adjoint())
}

/// `W_D^H Π (I_M ⊗ W_K) diag(vect Ḡ) (W_M ⊗ W_K^H)`.
pub fn form2_product(g: &CharacteristicMatrix<f64>) -> DMatrix<C64> {
    let p = g.params();
    let (wk, wm, wd) = (dft_matrix(p.k()), dft_matrix(p.m()), dft_matrix(p.d()));
    let im = DMatrix::<C64>::identity(p.m(), p.m());
    wd.adjoint() * pi_matrix(p) * kron(&im, &wk) * diag(g.phase_shift().entries()) * kron(&wm, &wk.adjoint())
}

pub fn to_vec(v: &nalgebra::DVector<C64>) -> Vec<C64> {
    v.iter().cloned().collect()
}

pub const KS: [usize; 4] = [2, 3, 4, 8];
pub const MS: [usize; 5] = [1, 2, 3, 4, 5];
