//! Power spectral density of the D/A-converted GFDM signal and OOB leakage.
//!
//! Frequencies are handled as normalized `f T_s` internally; [`SpectrumGrid`]
//! reports Hz.

use std::f64::consts::PI;
use std::io::Write;

use gfdm_core::dft::fft_raw;
use gfdm_core::{CharacteristicMatrix, GfdmError, GfdmParams, Result, C64};
use rayon::prelude::*;

/// Periodic sinc `sin(Dx/2) / (D sin(x/2))`, with its limit `(-1)^{k(D-1)}` at `x = 2πk`.
pub fn sinc_d(x: f64, d: usize) -> f64 {
    let k = (x / (2.0 * PI)).round();
    let r = x - 2.0 * PI * k;
    if r.abs() < 1e-12 {
        let odd = (k as i64).rem_euclid(2) == 1 && (d - 1) % 2 == 1;
        return if odd { -1.0 } else { 1.0 };
    }
    (d as f64 * x / 2.0).sin() / (d as f64 * (x / 2.0).sin())
}

/// `G_m(e^{jω})` from the frequency-domain filter, valid without cyclic prefix.
pub fn gm_closed_form(gf: &[C64], m_count: usize, m: usize, omega: f64) -> C64 {
    let d = gf.len();
    gf.iter()
        .enumerate()
        .filter(|(_, g)| g.norm_sqr() > 0.0)
        .map(|(l, g)| {
            let wl = omega - 2.0 * PI * l as f64 / d as f64;
            let tw = C64::from_polar(1.0, -2.0 * PI * ((l * m) % m_count) as f64 / m_count as f64);
            g * tw * sinc_d(wl, d) * C64::from_polar(1.0, -wl * (d as f64 - 1.0) / 2.0)
        })
        .sum()
}

/// `g_m[n] = g[<n - mK - L>_D]` for `n = 0..D+L`.
pub fn subsymbol_pulse(g: &[C64], params: GfdmParams, m: usize, cp_len: usize) -> Vec<C64> {
    let d = params.d();
    (0..d + cp_len)
        .map(|n| g[(n + 2 * d - (m * params.k()) % d - cp_len % d) % d])
        .collect()
}

/// Direct DTFT of [`subsymbol_pulse`] at `omega`.
pub fn gm_dtft(g: &[C64], params: GfdmParams, m: usize, cp_len: usize, omega: f64) -> C64 {
    subsymbol_pulse(g, params, m, cp_len)
        .iter()
        .enumerate()
        .map(|(n, x)| x * C64::from_polar(1.0, -omega * n as f64))
        .sum()
}

/// Frequency response of the D/A interpolation filter, normalized so `|P(0)| = T_s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InterpolationFilter {
    /// Sample-level sinc: flat over `|f T_s| < 1/2`.
    Ideal,
    /// Sample-level raised cosine with the given roll-off.
    RaisedCosine { rolloff: f64 },
}

impl InterpolationFilter {
    /// `|P(f)| / T_s` at normalized frequency `f T_s`.
    pub fn gain(&self, fts: f64) -> f64 {
        let a = fts.abs();
        match *self {
            InterpolationFilter::Ideal => {
                if a < 0.5 {
                    1.0
                } else if a == 0.5 {
                    0.5
                } else {
                    0.0
                }
            }
            InterpolationFilter::RaisedCosine { rolloff } => {
                let lo = (1.0 - rolloff) / 2.0;
                let hi = (1.0 + rolloff) / 2.0;
                if a <= lo {
                    1.0
                } else if a >= hi {
                    0.0
                } else {
                    0.5 * (1.0 + (PI / rolloff * (a - lo)).cos())
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumGrid {
    /// Strictly increasing frequencies in Hz.
    pub frequencies: Vec<f64>,
    pub psd_values: Vec<f64>,
    pub sample_rate: f64,
}

impl SpectrumGrid {
    pub fn new(frequencies: Vec<f64>, psd_values: Vec<f64>, sample_rate: f64) -> Result<Self> {
        if frequencies.len() != psd_values.len() {
            return Err(GfdmError::DimensionMismatch { expected: frequencies.len(), found: psd_values.len() });
        }
        if frequencies.windows(2).any(|w| w[1] <= w[0]) {
            return Err(GfdmError::InvalidInput("frequencies must be strictly increasing".into()));
        }
        if psd_values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(GfdmError::InvalidInput("PSD values must be finite and nonnegative".into()));
        }
        Ok(SpectrumGrid { frequencies, psd_values, sample_rate })
    }

    /// Trapezoidal integral over `[a, b]`, interpolating linearly at the ends.
    pub fn integrate(&self, a: f64, b: f64) -> f64 {
        let f = &self.frequencies;
        let s = &self.psd_values;
        let interp = |x: f64| -> f64 {
            let i = f.partition_point(|&v| v < x).clamp(1, f.len() - 1);
            let t = (x - f[i - 1]) / (f[i] - f[i - 1]);
            s[i - 1] + t * (s[i] - s[i - 1])
        };
        let mut pts = vec![(a, interp(a))];
        pts.extend(f.iter().zip(s).filter(|(x, _)| **x > a && **x < b).map(|(x, y)| (*x, *y)));
        pts.push((b, interp(b)));
        pts.windows(2).map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0)).sum()
    }

    /// Mean PSD over `[a, b]`.
    pub fn mean_over(&self, a: f64, b: f64) -> f64 {
        self.integrate(a, b) / (b - a)
    }

    pub fn scale(&mut self, c: f64) {
        self.psd_values.iter_mut().for_each(|v| *v *= c);
    }

    /// `frequency_hz,psd,psd_db` rows after `#` comments.
    pub fn write_csv<W: Write>(&self, mut out: W, comments: &[String]) -> Result<()> {
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["frequency_hz", "psd", "psd_db"])?;
        for (f, s) in self.frequencies.iter().zip(&self.psd_values) {
            w.write_record([format!("{f:.3}"), format!("{s:.6e}"), format!("{:.2}", 10.0 * s.log10())])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct PsdConfig {
    pub subcarriers: Vec<usize>,
    pub subsymbols: Vec<usize>,
    pub cp_len: usize,
    /// `1/T_s` in Hz.
    pub sample_rate: f64,
    pub es: f64,
    pub interp: InterpolationFilter,
    /// Grid points per unit of normalized frequency; a multiple of `K`.
    pub resolution: usize,
    /// The grid spans `|f T_s| <= span`.
    pub span: f64,
}

impl PsdConfig {
    /// Full allocation, no CP, ideal interpolation, 16 points per subcarrier spacing over `|f T_s| <= 1/2`.
    pub fn full(params: GfdmParams) -> Self {
        PsdConfig {
            subcarriers: (0..params.k()).collect(),
            subsymbols: (0..params.m()).collect(),
            cp_len: 0,
            sample_rate: 1.0,
            es: 1.0,
            interp: InterpolationFilter::Ideal,
            resolution: 16 * params.k(),
            span: 0.5,
        }
    }
}

/// `S_a(f) = E_S |P(f)|² / (D' T_s) Σ_{k∈K} Σ_{m∈M} |G_m(e^{j2π(f T_s - k/K)})|²`.
///
/// Each `G_m` is evaluated on the whole grid with one FFT of the
/// subsymbol pulse folded to the grid length; the subcarrier shifts are
/// then exact index offsets.
pub fn psd(g: &CharacteristicMatrix<f64>, cfg: &PsdConfig) -> Result<SpectrumGrid> {
    let p = g.params();
    let (k, d) = (p.k(), p.d());
    if cfg.subcarriers.is_empty() || cfg.subsymbols.is_empty() {
        return Err(GfdmError::PartialAllocation);
    }
    if cfg.subcarriers.iter().any(|&x| x >= k) || cfg.subsymbols.iter().any(|&x| x >= p.m()) {
        return Err(GfdmError::InvalidInput("allocation index out of range".into()));
    }
    let n = cfg.resolution;
    if n == 0 || n % k != 0 {
        return Err(GfdmError::InvalidInput(format!("grid resolution {n} must be a positive multiple of K = {k}")));
    }
    if !(cfg.span > 0.0 && cfg.sample_rate > 0.0) {
        return Err(GfdmError::InvalidInput("span and sample rate must be positive".into()));
    }
    let taps = g.to_time().into_taps();
    let powers: Vec<Vec<f64>> = cfg
        .subsymbols
        .par_iter()
        .map(|&m| {
            let mut buf = vec![C64::new(0.0, 0.0); n];
            for (i, x) in subsymbol_pulse(&taps, p, m, cfg.cp_len).into_iter().enumerate() {
                buf[i % n] += x;
            }
            fft_raw(&mut buf);
            buf.iter().map(|z| z.norm_sqr()).collect()
        })
        .collect();
    let mut q = vec![0.0; n];
    for pw in &powers {
        for (a, b) in q.iter_mut().zip(pw) {
            *a += b;
        }
    }
    let step = n / k;
    let imax = (cfg.span * n as f64).floor() as i64;
    let ts = 1.0 / cfg.sample_rate;
    let scale = cfg.es * ts / (d + cfg.cp_len) as f64;
    let (freqs, vals): (Vec<f64>, Vec<f64>) = (-imax..=imax)
        .into_par_iter()
        .map(|i| {
            let fts = i as f64 / n as f64;
            let pg = cfg.interp.gain(fts);
            let sum: f64 = cfg
                .subcarriers
                .iter()
                .map(|&kk| q[(i - (kk * step) as i64).rem_euclid(n as i64) as usize])
                .sum();
            (fts * cfg.sample_rate, scale * pg * pg * sum)
        })
        .unzip();
    SpectrumGrid::new(freqs, vals, cfg.sample_rate)
}

/// In-band and out-of-band frequency sets as unions of intervals in Hz.
#[derive(Clone, Debug, PartialEq)]
pub struct BandSpec {
    pub in_band: Vec<(f64, f64)>,
    pub out_band: Vec<(f64, f64)>,
}

impl BandSpec {
    pub fn new(in_band: Vec<(f64, f64)>, out_band: Vec<(f64, f64)>) -> Result<Self> {
        let measure = |v: &[(f64, f64)]| v.iter().map(|(a, b)| b - a).sum::<f64>();
        let all = in_band.iter().chain(&out_band);
        if all.clone().any(|(a, b)| !(b > a)) {
            return Err(GfdmError::InvalidInput("band intervals must have positive length".into()));
        }
        if measure(&in_band) <= 0.0 || measure(&out_band) <= 0.0 {
            return Err(GfdmError::InvalidInput("both bands need nonzero measure".into()));
        }
        for (a, b) in &in_band {
            if out_band.iter().any(|(c, e)| a < e && c < b) {
                return Err(GfdmError::InvalidInput("in-band and out-of-band sets overlap".into()));
            }
        }
        Ok(BandSpec { in_band, out_band })
    }

    /// Symmetric bands: in-band `(-edge, edge)`, out-of-band `edge + guard < |f| < outer`, all in Hz.
    pub fn symmetric(edge: f64, guard: f64, outer: f64) -> Result<Self> {
        let o = edge + guard;
        BandSpec::new(vec![(-edge, edge)], vec![(-outer, -o), (o, outer)])
    }
}

/// OOB leakage `10 log₁₀( |B_I|/|B_O| · ∫_{B_O} S / ∫_{B_I} S )` in dB.
pub fn oob_leakage(spectrum: &SpectrumGrid, bands: &BandSpec) -> Result<f64> {
    let lo = spectrum.frequencies.first().copied().unwrap_or(0.0);
    let hi = spectrum.frequencies.last().copied().unwrap_or(0.0);
    let covered = bands.in_band.iter().chain(&bands.out_band).all(|(a, b)| *a >= lo && *b <= hi);
    if spectrum.frequencies.len() < 2 || !covered {
        return Err(GfdmError::InvalidInput("spectrum grid does not cover the bands".into()));
    }
    let (mut ei, mut wi, mut eo, mut wo) = (0.0, 0.0, 0.0, 0.0);
    for (a, b) in &bands.in_band {
        ei += spectrum.integrate(*a, *b);
        wi += b - a;
    }
    for (a, b) in &bands.out_band {
        eo += spectrum.integrate(*a, *b);
        wo += b - a;
    }
    if ei <= 0.0 {
        return Err(GfdmError::InvalidInput("zero in-band energy".into()));
    }
    Ok(10.0 * (wi / wo * eo / ei).log10())
}
