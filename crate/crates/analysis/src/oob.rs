//! Out-of-band leakage of a GFDM block with a guard subsymbol and a gap of
//! switched-off subcarriers, compared with an OFDM block of equal size and
//! equal number of used resource elements.

use gfdm_core::filters::{make_filter, FilterKind, FilterSpec};
use gfdm_core::{CharacteristicMatrix, GfdmParams, Result};

use crate::psd::{oob_leakage, psd, BandSpec, InterpolationFilter, PsdConfig, SpectrumGrid};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OobWaveform {
    Ofdm,
    Dirichlet,
    ModifiedDirichlet,
    RaisedCosine { rolloff: f64 },
}

impl OobWaveform {
    pub fn label(&self) -> String {
        match self {
            OobWaveform::Ofdm => "OFDM".into(),
            OobWaveform::Dirichlet => "GFDM Dirichlet".into(),
            OobWaveform::ModifiedDirichlet => "GFDM modified Dirichlet".into(),
            OobWaveform::RaisedCosine { rolloff } => format!("GFDM RC({rolloff})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct OobSetup {
    pub k: usize,
    pub m: usize,
    pub cp_len: usize,
    /// Inclusive range of switched-off subcarriers.
    pub gap: (usize, usize),
    /// Whether subsymbol 0 is left empty.
    pub guard_subsymbol: bool,
    pub interp_rolloff: f64,
    pub sample_rate: f64,
    /// Grid points per GFDM subcarrier spacing.
    pub points_per_subcarrier: usize,
}

impl Default for OobSetup {
    fn default() -> Self {
        OobSetup {
            k: 128,
            m: 15,
            cp_len: 16,
            gap: (50, 78),
            guard_subsymbol: true,
            interp_rolloff: 0.1,
            sample_rate: 1.92e6,
            points_per_subcarrier: 120,
        }
    }
}

impl OobSetup {
    fn gfdm_subcarriers(&self) -> Vec<usize> {
        (0..self.k).filter(|k| *k < self.gap.0 || *k > self.gap.1).collect()
    }

    fn gfdm_subsymbols(&self) -> Vec<usize> {
        (usize::from(self.guard_subsymbol)..self.m).collect()
    }

    /// Half-width of the used band in subcarrier spacings.
    fn in_band_edge(&self) -> f64 {
        let below = self.gap.0 as f64;
        let above = (self.k - 1 - self.gap.1) as f64;
        below.min(above + 1.0) - 0.5
    }

    /// In-band `(-edge, edge)` and out-of-band up to the interpolation-filter edge, in Hz.
    pub fn bands(&self, n_gc: f64) -> Result<BandSpec> {
        let spacing = self.sample_rate / self.k as f64;
        let outer = self.k as f64 / 2.0 * (1.0 + self.interp_rolloff);
        BandSpec::symmetric(self.in_band_edge() * spacing, n_gc * spacing, outer * spacing)
    }

    fn config(&self, k: usize, subcarriers: Vec<usize>, subsymbols: Vec<usize>) -> PsdConfig {
        let per_unit = self.points_per_subcarrier * self.k;
        PsdConfig {
            subcarriers,
            subsymbols,
            cp_len: self.cp_len,
            sample_rate: self.sample_rate,
            es: 1.0,
            interp: InterpolationFilter::RaisedCosine { rolloff: self.interp_rolloff },
            resolution: per_unit.div_ceil(k) * k,
            span: (1.0 + self.interp_rolloff) / 2.0 + 0.01,
        }
    }

    /// Characteristic matrix and PSD configuration for `w`.
    pub fn waveform(&self, w: OobWaveform) -> Result<(CharacteristicMatrix<f64>, PsdConfig)> {
        let d = self.k * self.m;
        match w {
            OobWaveform::Ofdm => {
                let p = GfdmParams::new(d, 1)?;
                let used = self.gfdm_subcarriers().len() * self.gfdm_subsymbols().len();
                let half = used / 2;
                let subcarriers = (0..used).map(|i| (i + d - half) % d).collect();
                let g = make_filter(&FilterSpec::new(FilterKind::Rectangular), p, None)?;
                Ok((g, self.config(d, subcarriers, vec![0])))
            }
            other => {
                let p = GfdmParams::new(self.k, self.m)?;
                let kind = match other {
                    OobWaveform::Dirichlet => FilterKind::Dirichlet,
                    OobWaveform::ModifiedDirichlet => FilterKind::ModifiedDirichlet,
                    OobWaveform::RaisedCosine { rolloff } => FilterKind::RaisedCosine { rolloff },
                    OobWaveform::Ofdm => unreachable!(),
                };
                let g = make_filter(&FilterSpec::new(kind), p, None)?;
                Ok((g, self.config(self.k, self.gfdm_subcarriers(), self.gfdm_subsymbols())))
            }
        }
    }

    /// PSD of `w`, scaled so that the mean in-band value is 1.
    pub fn spectrum(&self, w: OobWaveform) -> Result<SpectrumGrid> {
        let (g, cfg) = self.waveform(w)?;
        let mut s = psd(&g, &cfg)?;
        let (a, b) = self.bands(1.0)?.in_band[0];
        let mean = s.mean_over(a, b);
        s.scale(1.0 / mean);
        Ok(s)
    }

    pub fn leakage_db(&self, w: OobWaveform, n_gc: f64) -> Result<f64> {
        oob_leakage(&self.spectrum(w)?, &self.bands(n_gc)?)
    }
}
