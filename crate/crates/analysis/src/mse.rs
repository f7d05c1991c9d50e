//! Closed-form MSE of the ZF and MMSE receivers and the filter-optimal bounds.

use gfdm_core::channel::{sample_rayleigh, PowerDelayProfile};
use gfdm_core::filters::channel_alpha;
use gfdm_core::{CharacteristicMatrix, GfdmError, GfdmParams, Result, Tolerance, C64};
use rand::Rng;

#[derive(Clone, Copy, Debug)]
pub enum MseModel<'a> {
    /// ZF receiver, AWGN channel.
    ZfAwgn { n0: f64 },
    /// ZF receiver, random channel with `E{1/|C_l|²} = beta` for every bin.
    ZfStatistical { beta: f64, n0: f64 },
    /// ZF receiver, fixed channel with frequency response `c_freq`.
    ZfStatic { c_freq: &'a [C64], n0: f64 },
    /// MMSE receiver, AWGN channel, `gamma = E_S / N0`.
    MmseAwgn { gamma: f64, es: f64 },
}

/// Per-symbol MSE `σ²` of the receiver under `model` for the filter `g`.
pub fn theoretical_mse(g: &CharacteristicMatrix<f64>, model: MseModel<'_>) -> Result<f64> {
    let p = g.params();
    let d = p.d() as f64;
    let tol = Tolerance::default();
    match model {
        MseModel::ZfAwgn { n0 } => Ok(g.receiver_energy(&tol)? * n0),
        MseModel::ZfStatistical { beta, n0 } => Ok(beta * g.receiver_energy(&tol)? * n0),
        MseModel::ZfStatic { c_freq, n0 } => {
            if let Some((k, m)) = g.first_zero(&tol) {
                return Err(GfdmError::SingularMatrix { k, m });
            }
            let alpha = channel_alpha(p, c_freq)?;
            let mut s = 0.0;
            for m in 0..p.m() {
                for k in 0..p.k() {
                    s += alpha[m] / g.get(k, m).norm_sqr();
                }
            }
            Ok(n0 * s / (p.k() as f64 * d))
        }
        MseModel::MmseAwgn { gamma, es } => {
            check_gamma(gamma)?;
            if gamma == 0.0 {
                return Ok(es);
            }
            let n0 = es / gamma;
            Ok(g.entries().iter().map(|z| (n0 / d) / (z.norm_sqr() + 1.0 / gamma)).sum())
        }
    }
}

/// Smallest MSE reachable by any filter of energy `xi_g` under `model`.
pub fn minimum_mse(params: GfdmParams, xi_g: f64, model: MseModel<'_>) -> Result<f64> {
    if !(xi_g > 0.0) {
        return Err(GfdmError::InvalidInput(format!("filter energy must be positive (got {xi_g})")));
    }
    match model {
        MseModel::ZfAwgn { n0 } => Ok(n0 / xi_g),
        MseModel::ZfStatistical { beta, n0 } => Ok(beta * n0 / xi_g),
        MseModel::ZfStatic { c_freq, n0 } => {
            let alpha = channel_alpha(params, c_freq)?;
            let s: f64 = alpha.iter().map(|a| a.sqrt()).sum();
            let (k, m) = (params.k() as f64, params.m() as f64);
            Ok(s * s * n0 / (k * m * m * xi_g))
        }
        MseModel::MmseAwgn { gamma, es } => {
            check_gamma(gamma)?;
            Ok(es / (gamma * xi_g + 1.0))
        }
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma >= 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(GfdmError::InvalidInput(format!("SNR must be finite and nonnegative (got {gamma})")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
}

impl MonteCarloEstimate {
    pub fn from_samples(samples: impl IntoIterator<Item = f64>) -> Self {
        let (mut n, mut mean, mut m2) = (0usize, 0.0, 0.0);
        for x in samples {
            n += 1;
            let delta = x - mean;
            mean += delta / n as f64;
            m2 += delta * (x - mean);
        }
        let std_error = if n > 1 { (m2 / (n - 1) as f64 / n as f64).sqrt() } else { 0.0 };
        MonteCarloEstimate { mean, std_error, trials: n }
    }

    pub fn relative_error(&self) -> f64 {
        self.std_error / self.mean.abs()
    }
}

/// `E{E_S / (γ ξ_G |C_0|² + 1)}` for a Rayleigh channel with profile `pdp`.
pub fn hypothesis1_reference<R: Rng + ?Sized>(
    pdp: &PowerDelayProfile,
    gamma: f64,
    xi_g: f64,
    es: f64,
    trials: usize,
    rng: &mut R,
) -> Result<MonteCarloEstimate> {
    check_gamma(gamma)?;
    if trials == 0 {
        return Err(GfdmError::InvalidInput("at least one trial is required".into()));
    }
    let d = pdp.len().max(1);
    let mut gains = Vec::with_capacity(trials);
    for _ in 0..trials {
        let ch = sample_rayleigh::<f64, _>(pdp, d, rng)?;
        gains.push(ch.freq_response()[0].norm_sqr());
    }
    Ok(hypothesis1_from_gains(gains, gamma, xi_g, es))
}

/// Same expectation over given samples of `|C_0|²`.
pub fn hypothesis1_from_gains(
    gains: impl IntoIterator<Item = f64>,
    gamma: f64,
    xi_g: f64,
    es: f64,
) -> MonteCarloEstimate {
    MonteCarloEstimate::from_samples(gains.into_iter().map(|c2| es / (gamma * xi_g * c2 + 1.0)))
}

/// Monte-Carlo `E{1/|C_l|²}` averaged over bins, for the deep-fade-excluded ensemble.
pub fn inverse_gain_mean<R: Rng + ?Sized>(
    pdp: &PowerDelayProfile,
    d: usize,
    threshold_db: f64,
    trials: usize,
    rng: &mut R,
) -> Result<MonteCarloEstimate> {
    let mut samples = Vec::with_capacity(trials);
    for _ in 0..trials {
        let (ch, _) = gfdm_core::channel::sample_dfe_rayleigh::<f64, _>(pdp, d, threshold_db, rng)?;
        samples.push(ch.freq_response().iter().map(|c| 1.0 / c.norm_sqr()).sum::<f64>() / d as f64);
    }
    Ok(MonteCarloEstimate::from_samples(samples))
}
