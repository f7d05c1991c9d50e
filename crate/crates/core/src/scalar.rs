//! Scalar abstraction shared by every transform in the crate.
//!
//! All transceiver math is written against [`Real`], implemented for `f32`
//! and `f64`. Dense oracles always run in `f64` through nalgebra, so an
//! `f32` transceiver can still be checked against a double-precision
//! reference.

use std::collections::HashMap;
use std::fmt::{Debug, Display, LowerExp};
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};
use rustfft::{Fft, FftDirection, FftNum, FftPlanner};

/// Floating-point type usable by the GFDM transforms.
pub trait Real:
    Float + FloatConst + FromPrimitive + FftNum + Default + Display + LowerExp + Debug + Send + Sync + 'static
{
    /// Process-wide FFT plan cache for this precision.
    fn fft_cache() -> &'static FftCache<Self>;

    /// Converts an `f64` literal; exact for `f64`, rounded for `f32`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            fn fft_cache() -> &'static FftCache<Self> {
                static CACHE: OnceLock<FftCache<$t>> = OnceLock::new();
                CACHE.get_or_init(FftCache::default)
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

/// Read-mostly map from (length, direction) to a planned FFT.
pub struct FftCache<T: FftNum> {
    plans: RwLock<HashMap<(usize, bool), Arc<dyn Fft<T>>>>,
}

impl<T: FftNum> Default for FftCache<T> {
    fn default() -> Self {
        Self {
            plans: RwLock::new(HashMap::new()),
        }
    }
}

impl<T: FftNum> FftCache<T> {
    pub fn plan(&self, len: usize, direction: FftDirection) -> Arc<dyn Fft<T>> {
        let key = (len, direction == FftDirection::Forward);
        if let Some(plan) = self.plans.read().expect("fft cache poisoned").get(&key) {
            return Arc::clone(plan);
        }
        let mut plans = self.plans.write().expect("fft cache poisoned");
        Arc::clone(plans.entry(key).or_insert_with(|| {
            let mut planner = FftPlanner::new();
            planner.plan_fft(len, direction)
        }))
    }
}

/// Complex number converted from an `f64` pair.
#[inline]
pub fn cplx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

/// `e^{j theta}` evaluated in `f64` and rounded to `T`.
///
/// Twiddles are computed in double precision so that `f32` transforms do not
/// accumulate phase error for large block sizes.
#[inline]
pub fn expj<T: Real>(theta: f64) -> Complex<T> {
    cplx(theta.cos(), theta.sin())
}

pub fn to_c64<T: Real>(z: Complex<T>) -> Complex<f64> {
    Complex::new(z.re.to_f64_lossy(), z.im.to_f64_lossy())
}

pub fn from_c64<T: Real>(z: Complex<f64>) -> Complex<T> {
    cplx(z.re, z.im)
}
