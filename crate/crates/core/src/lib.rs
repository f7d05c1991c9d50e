//! Characteristic-matrix toolkit for GFDM.
//!
//! A GFDM transmitter with `K` subcarriers, `M` subsymbols and prototype
//! filter `g` is a `D x D` matrix `A` (`D = KM`). Everything in this crate
//! works on its `K x M` characteristic matrix instead, which turns
//! unitarity, invertibility, inversion and the MMSE receiver into entrywise
//! operations framed by `O(D log D)` FFTs.
//!
//! The transforms are generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases fix the common double-precision case.

pub mod channel;
pub mod charmat;
pub mod dense;
pub mod dft;
pub mod error;
pub mod filters;
pub mod modem;
pub mod params;
pub mod scalar;

pub use channel::{ChannelRealization, PowerDelayProfile};
pub use charmat::{CharacteristicMatrix, PhaseShifted, PrototypeFilter};
pub use dense::DenseGfdmMatrix;
pub use error::{GfdmError, Result};
pub use filters::{FilterKind, FilterSpec, PhaseMatrix};
pub use modem::{GfdmFrame, RxReport};
pub use params::{GfdmParams, Tolerance};
pub use scalar::Real;

pub use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type CharacteristicMatrix64 = CharacteristicMatrix<f64>;
pub type PhaseShifted64 = PhaseShifted<f64>;
pub type PrototypeFilter64 = PrototypeFilter<f64>;
pub type ChannelRealization64 = ChannelRealization<f64>;
pub type GfdmFrame64 = GfdmFrame<f64>;
pub type RxReport64 = RxReport<f64>;
