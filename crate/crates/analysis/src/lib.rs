//! Closed-form MSE predictions, spectra, out-of-band leakage, PAPR and
//! complex-multiplication counts for GFDM transceivers.

pub mod complexity;
pub mod mse;
pub mod oob;
pub mod papr;
pub mod psd;

pub use complexity::{complexity_cm, complexity_table, Implementation, Role};
pub use oob::{OobSetup, OobWaveform};
pub use mse::{hypothesis1_reference, minimum_mse, theoretical_mse, MonteCarloEstimate, MseModel};
pub use papr::{papr, papr_ccdf};
pub use psd::{oob_leakage, psd, BandSpec, InterpolationFilter, PsdConfig, SpectrumGrid};
