//! Monte-Carlo runner.
//!
//! Block `b` draws its data and channel from ChaCha stream `b` and its noise
//! from a stream tied to `(snr index, b)`, so every SNR point sees the same
//! channels and symbols. Blocks are processed in fixed-size chunks whose
//! partial sums are merged in chunk order.

use std::io::Write;

use gfdm_analysis::{theoretical_mse, MseModel};
use gfdm_core::channel::{propagate_with_cp, reference_static_channel, sample_dfe_rayleigh, sample_rayleigh};
use gfdm_core::filters::make_filter;
use gfdm_core::modem::{
    allocation_mask, error_variances_mmse, mmse_lowcomp_exists, mmse_receiver, pinv_receiver, rx_ammse,
    rx_mmse_dense, rx_mmse_lowcomp, tx_form1, GfdmFrame, StructuredReceiver, DEFAULT_SPREAD_TOL,
};
use gfdm_core::{
    CharacteristicMatrix, ChannelRealization, GfdmParams, PhaseShifted, PowerDelayProfile, Tolerance, C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Scenario, ScenarioConfig};
use crate::error::{Result, SimError};

const CHUNK: usize = 256;

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub snr_db: f64,
    /// Mean over active symbols of `|d̂ - d|²`.
    pub mse: f64,
    /// Standard error of `mse` from the spread of per-block MSE values.
    pub mse_std_error: f64,
    pub ser: f64,
    /// Closed-form (or same-ensemble) prediction where one exists.
    pub reference_mse: Option<f64>,
    /// `σ²_{k,m}` at index `k + mK`; zero at unallocated positions.
    pub per_symbol: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultTable {
    pub config: ScenarioConfig,
    pub rows: Vec<ResultRow>,
    /// Set when a singular GFDM matrix forced the ZF pseudo-inverse.
    pub pseudo_inverse: bool,
    /// Empirical `E{1/|C_l|²}` over the channel ensemble (deep-fade-excluded runs).
    pub beta: Option<f64>,
    /// Deep-fade rejections summed over all draws.
    pub rejected: u64,
    pub mask: Vec<bool>,
}

#[derive(Clone, Default)]
struct Partial {
    err: Vec<f64>,
    block_sq: f64,
    sym_errors: u64,
    inv_gain: f64,
    reference: f64,
    rejected: u64,
}

impl Partial {
    fn new(d: usize) -> Self {
        Partial { err: vec![0.0; d], ..Default::default() }
    }

    fn merge(&mut self, o: &Partial) {
        self.err.iter_mut().zip(&o.err).for_each(|(a, b)| *a += b);
        self.block_sq += o.block_sq;
        self.sym_errors += o.sym_errors;
        self.inv_gain += o.inv_gain;
        self.reference += o.reference;
        self.rejected += o.rejected;
    }
}

/// Receiver fixed for the whole SNR point (channel known in advance).
enum Fixed {
    None,
    Zf(StructuredReceiver<f64>),
    Mmse(StructuredReceiver<f64>, Vec<f64>),
}

struct Setup {
    cfg: ScenarioConfig,
    params: GfdmParams,
    g: CharacteristicMatrix<f64>,
    gbar: PhaseShifted<f64>,
    xi_g: f64,
    mask: Vec<bool>,
    pdp: Option<PowerDelayProfile>,
    fixed_channel: Option<ChannelRealization<f64>>,
    tol: Tolerance,
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

impl Setup {
    fn new(cfg: &ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        let params = cfg.params()?;
        let d = params.d();
        let fixed_channel = match cfg.scenario {
            Scenario::ZfAwgn | Scenario::MmseAwgn => Some(ChannelRealization::awgn(d)),
            Scenario::ZfMp => Some(reference_static_channel(d)?),
            _ => None,
        };
        let spec = cfg.filter_config().spec(params)?;
        let g = make_filter(&spec, params, fixed_channel.as_ref())?;
        let pdp = if cfg.scenario.is_rayleigh() { Some(cfg.pdp.build(d)?) } else { None };
        Ok(Setup {
            cfg: cfg.clone(),
            params,
            gbar: g.phase_shift(),
            xi_g: g.energy(),
            g,
            mask: allocation_mask(params, &cfg.subcarriers(), &cfg.subsymbols()),
            pdp,
            fixed_channel,
            tol: Tolerance::default(),
        })
    }

    fn fixed_receiver(&self, gamma: f64) -> Result<Fixed> {
        let Some(ch) = &self.fixed_channel else { return Ok(Fixed::None) };
        let c = ch.freq_response();
        Ok(match self.cfg.scenario {
            Scenario::MmseAwgn => {
                let var = error_variances_mmse(&self.gbar, c, gamma, 1.0)?;
                Fixed::Mmse(mmse_receiver(&self.gbar, c, gamma)?, var.iter().map(|s| 1.0 - s).collect())
            }
            _ => Fixed::Zf(pinv_receiver(&self.g, c, &self.tol)?),
        })
    }

    fn block(&self, b: usize, snr_index: usize, gamma: f64, fixed: &Fixed, acc: &mut Partial) -> Result<()> {
        let p = self.params;
        let d = p.d();
        let cons = self.cfg.constellation;
        let mut rng = stream_rng(self.cfg.seed, b as u64);
        let sent: Vec<usize> = (0..d).map(|_| rng.random_range(0..cons.size())).collect();
        let data: Vec<C64> = sent
            .iter()
            .zip(&self.mask)
            .map(|(&s, &on)| if on { cons.point(s) } else { C64::new(0.0, 0.0) })
            .collect();
        let drawn;
        let ch = match (&self.fixed_channel, &self.pdp) {
            (Some(c), _) => c,
            (None, Some(pdp)) => {
                drawn = if self.cfg.scenario == Scenario::ZfDferf {
                    let (c, rej) = sample_dfe_rayleigh(pdp, d, self.cfg.threshold_db, &mut rng)?;
                    acc.rejected += rej;
                    c
                } else {
                    sample_rayleigh(pdp, d, &mut rng)?
                };
                &drawn
            }
            (None, None) => unreachable!("every scenario has a channel"),
        };
        let c = ch.freq_response();
        let frame = GfdmFrame::new(p, data.clone(), self.cfg.subcarriers(), self.cfg.subsymbols(), self.cfg.cp_len())?;
        let x = tx_form1(&frame, &self.g)?;
        let mut noise = stream_rng(self.cfg.seed, ((snr_index as u64 + 1) << 40) | b as u64);
        let y = propagate_with_cp(&x, ch, self.cfg.cp_len(), 1.0 / gamma, &mut noise)?;

        let (est, bias): (Vec<C64>, Option<Vec<C64>>) = match (self.cfg.scenario, fixed) {
            (_, Fixed::Zf(rx)) => (rx.apply(&y)?, None),
            (_, Fixed::Mmse(rx, b)) => (rx.apply(&y)?, Some(b.iter().map(|v| C64::new(*v, 0.0)).collect())),
            (Scenario::ZfDferf, _) => (pinv_receiver(&self.g, c, &self.tol)?.apply(&y)?, None),
            (Scenario::MmseRf, _) => {
                let r = if mmse_lowcomp_exists(&self.gbar, c, DEFAULT_SPREAD_TOL)?.exists() {
                    rx_mmse_lowcomp(&y, &self.gbar, c, gamma)?
                } else {
                    rx_mmse_dense(&y, &self.g, c, gamma)?
                };
                (r.estimates, r.bias)
            }
            (Scenario::AmmseRf, _) => {
                let r = rx_ammse(&y, &self.gbar, c, gamma)?;
                (r.estimates, r.bias)
            }
            (s, _) => unreachable!("{s} has a fixed channel"),
        };

        let mut block = 0.0;
        for i in (0..d).filter(|&i| self.mask[i]) {
            let e = (est[i] - data[i]).norm_sqr();
            acc.err[i] += e;
            block += e;
            let z = match &bias {
                Some(b) if b[i].norm() > 0.0 => est[i] / b[i],
                _ => est[i],
            };
            if cons.slice(z) != sent[i] {
                acc.sym_errors += 1;
            }
        }
        let active = self.mask.iter().filter(|&&m| m).count() as f64;
        acc.block_sq += (block / active).powi(2);
        if self.cfg.scenario.is_rayleigh() {
            acc.inv_gain += c.iter().map(|z| 1.0 / z.norm_sqr()).sum::<f64>() / d as f64;
            acc.reference +=
                c.iter().map(|z| 1.0 / (gamma * self.xi_g * z.norm_sqr() + 1.0)).sum::<f64>() / d as f64;
        }
        Ok(())
    }

    fn reference(&self, gamma: f64, beta: f64, ensemble: f64) -> Option<f64> {
        let n0 = 1.0 / gamma;
        let c = self.fixed_channel.as_ref().map(|ch| ch.freq_response());
        let model = match self.cfg.scenario {
            Scenario::ZfAwgn => MseModel::ZfAwgn { n0 },
            Scenario::ZfDferf => MseModel::ZfStatistical { beta, n0 },
            Scenario::ZfMp => MseModel::ZfStatic { c_freq: c?, n0 },
            Scenario::MmseAwgn => MseModel::MmseAwgn { gamma, es: 1.0 },
            Scenario::MmseRf => return Some(ensemble),
            Scenario::AmmseRf => return None,
        };
        theoretical_mse(&self.g, model).ok()
    }
}

/// Runs every SNR point of `cfg`.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ResultTable> {
    let s = Setup::new(cfg)?;
    let d = s.params.d();
    let active = s.mask.iter().filter(|&&m| m).count();
    let chunks: Vec<(usize, usize)> = (0..cfg.blocks)
        .step_by(CHUNK)
        .map(|a| (a, (a + CHUNK).min(cfg.blocks)))
        .collect();
    let mut rows = Vec::with_capacity(cfg.snr_db.len());
    let (mut beta, mut rejected) = (None, 0);
    for (si, &snr) in cfg.snr_db.iter().enumerate() {
        let gamma = 10f64.powf(snr / 10.0);
        let fixed = s.fixed_receiver(gamma)?;
        let parts: Vec<Partial> = chunks
            .par_iter()
            .map(|&(a, b)| {
                let mut acc = Partial::new(d);
                for blk in a..b {
                    s.block(blk, si, gamma, &fixed, &mut acc)?;
                }
                Ok(acc)
            })
            .collect::<Result<_>>()?;
        let mut total = Partial::new(d);
        parts.iter().for_each(|p| total.merge(p));
        let n = cfg.blocks as f64;
        let per_symbol: Vec<f64> = total.err.iter().map(|e| e / n).collect();
        let mse = per_symbol.iter().sum::<f64>() / active as f64;
        let b = total.inv_gain / n;
        if cfg.scenario == Scenario::ZfDferf {
            beta = Some(b);
        }
        rejected += total.rejected;
        let var = (total.block_sq / n - mse * mse).max(0.0) * n / (n - 1.0).max(1.0);
        rows.push(ResultRow {
            snr_db: snr,
            mse,
            mse_std_error: (var / n).sqrt(),
            ser: total.sym_errors as f64 / (n * active as f64),
            reference_mse: s.reference(gamma, b, total.reference / n),
            per_symbol,
        });
    }
    Ok(ResultTable {
        config: cfg.clone(),
        rows,
        pseudo_inverse: cfg.scenario.is_zf() && !s.g.is_invertible(&s.tol),
        beta,
        rejected,
        mask: s.mask,
    })
}

/// Largest relative deviation `max |σ²_{k,m} / σ̄² - 1|` over active symbols, per row.
pub fn uniformity_report(table: &ResultTable) -> Vec<f64> {
    table
        .rows
        .iter()
        .map(|r| {
            let v: Vec<f64> = r.per_symbol.iter().zip(&table.mask).filter(|(_, &m)| m).map(|(x, _)| *x).collect();
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            v.iter().map(|x| (x / mean - 1.0).abs()).fold(0.0, f64::max)
        })
        .collect()
}

impl ResultTable {
    fn header<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "# gfdm-sim {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(out, "# seed = {}", self.config.seed)?;
        for line in self.config.to_toml().lines() {
            writeln!(out, "# config: {line}")?;
        }
        if self.pseudo_inverse {
            writeln!(out, "# singular GFDM matrix: ZF replaced by the pseudo-inverse")?;
        }
        if let Some(b) = self.beta {
            writeln!(out, "# beta = {b:.10e} (rejected draws: {})", self.rejected)?;
        }
        Ok(())
    }

    /// `snr_db,mse,mse_std_error,ser,reference_mse,uniformity` rows after `#` metadata lines.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        self.header(&mut out)?;
        let spread = uniformity_report(self);
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["snr_db", "mse", "mse_std_error", "ser", "reference_mse", "uniformity"])?;
        for (r, u) in self.rows.iter().zip(spread) {
            w.write_record([
                format!("{}", r.snr_db),
                format!("{:.10e}", r.mse),
                format!("{:.4e}", r.mse_std_error),
                format!("{:.10e}", r.ser),
                r.reference_mse.map(|v| format!("{v:.10e}")).unwrap_or_default(),
                format!("{u:.6}"),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// `snr_db,k,m,mse` rows for every active symbol.
    pub fn write_per_symbol_csv<W: Write>(&self, mut out: W) -> Result<()> {
        self.header(&mut out)?;
        let k = self.config.k;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["snr_db", "k", "m", "mse"])?;
        for r in &self.rows {
            for (i, v) in r.per_symbol.iter().enumerate().filter(|(i, _)| self.mask[*i]) {
                w.write_record([format!("{}", r.snr_db), (i % k).to_string(), (i / k).to_string(), format!("{v:.10e}")])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

impl From<rayon::ThreadPoolBuildError> for SimError {
    fn from(e: rayon::ThreadPoolBuildError) -> Self {
        SimError::Config(e.to_string())
    }
}
