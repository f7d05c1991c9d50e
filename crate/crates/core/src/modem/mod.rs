//! Transmitters, receivers and receiver statistics.

pub mod cp;
pub mod frame;
pub mod mmse;
pub mod rx;
pub mod tx;
pub mod variance;

pub use cp::{add_cp, remove_cp};
pub use frame::{allocation_mask, GfdmFrame};
pub use mmse::{
    ammse_factors, ammse_receiver, dense_channel_gfdm, f_matrix, mmse_factors, mmse_lowcomp_exists, mmse_receiver,
    rank_one_approx, rx_ammse, rx_mmse_dense, rx_mmse_dense_inverse_form, rx_mmse_lowcomp, rx_zf_dense,
    LowComplexityCheck, MmseCondition, RankOneColumn, DEFAULT_SPREAD_TOL,
};
pub use rx::{
    assemble_subcarriers, check_channel, pinv_receiver, rx_zf_form1, rx_zf_form2, rx_zf_freq, rx_zf_or_pinv,
    zf_receiver, EqualizerTaps, RxReport, StructuredReceiver,
};
pub use tx::{tx_direct, tx_form1, tx_form2, tx_freq_domain};
pub use variance::{
    error_variances_mmse, error_variances_mmse_dense, error_variances_zf, error_variances_zf_dense,
};
