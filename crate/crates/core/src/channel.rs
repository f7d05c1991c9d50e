//! Channel models: AWGN, static multipath, Rayleigh fading and
//! deep-fade-excluded Rayleigh fading.
//!
//! Two DFT conventions meet here. Transceivers use the unitary `W_D`; the
//! channel frequency response uses the unnormalized DFT
//! `C_l = Σ_n c[n] e^{-j2πnl/D}`, so that the circulant channel matrix is
//! `C = W_D^H diag(C_l) W_D`.

use std::io::{Read, Write};

use num_complex::Complex;
use num_traits::Zero;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::dft::{fft_raw, fft_unitary, FftDirection};
use crate::error::{GfdmError, Result};
use crate::modem::cp::{add_cp, remove_cp};
use crate::scalar::{cplx, to_c64, Real};

/// Consecutive rejections after which deep-fade sampling gives up.
pub const MAX_CONSECUTIVE_REJECTIONS: u64 = 1_000_000;

/// Channel impulse response with its cached `D`-point frequency response.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization<T: Real> {
    taps: Vec<Complex<T>>,
    freq: Vec<Complex<T>>,
}

impl<T: Real> ChannelRealization<T> {
    pub fn from_taps(taps: Vec<Complex<T>>, d: usize) -> Result<Self> {
        if taps.is_empty() {
            return Err(GfdmError::InvalidInput("channel needs at least one tap".into()));
        }
        if taps.len() > d {
            return Err(GfdmError::InvalidInput(format!(
                "{} channel taps exceed block size {d}",
                taps.len()
            )));
        }
        let mut freq = vec![Complex::zero(); d];
        freq[..taps.len()].copy_from_slice(&taps);
        fft_raw(&mut freq);
        Ok(Self { taps, freq })
    }

    /// The identity channel `c = [1]`.
    pub fn awgn(d: usize) -> Self {
        Self {
            taps: vec![cplx(1.0, 0.0)],
            freq: vec![cplx(1.0, 0.0); d],
        }
    }

    pub fn taps(&self) -> &[Complex<T>] {
        &self.taps
    }

    /// `C_l`, `l = 0..D`.
    pub fn freq_response(&self) -> &[Complex<T>] {
        &self.freq
    }

    pub fn block_len(&self) -> usize {
        self.freq.len()
    }

    /// Channel order `L_c` (index of the last tap).
    pub fn order(&self) -> usize {
        self.taps.len() - 1
    }

    pub fn min_abs_response(&self) -> f64 {
        self.freq
            .iter()
            .map(|z| z.norm().to_f64_lossy())
            .fold(f64::INFINITY, f64::min)
    }

    /// First bin whose magnitude is at or below `threshold`.
    pub fn first_null(&self, threshold: f64) -> Option<usize> {
        self.freq
            .iter()
            .position(|z| z.norm().to_f64_lossy() <= threshold)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_complex_csv(out, &self.taps, &[format!("channel taps, D={}", self.block_len())])
    }

    pub fn read_csv<R: Read>(input: R, d: usize) -> Result<Self> {
        Self::from_taps(read_complex_csv(input)?, d)
    }
}

/// Noiseless circular convolution `IDFT(C_l · DFT(x))`.
pub fn apply_channel_noiseless<T: Real>(
    x: &[Complex<T>],
    ch: &ChannelRealization<T>,
) -> Result<Vec<Complex<T>>> {
    if x.len() != ch.block_len() {
        return Err(GfdmError::DimensionMismatch {
            expected: ch.block_len(),
            found: x.len(),
        });
    }
    let mut buf = x.to_vec();
    fft_unitary(&mut buf, FftDirection::Forward);
    buf.iter_mut().zip(ch.freq_response()).for_each(|(b, c)| *b = *b * *c);
    fft_unitary(&mut buf, FftDirection::Inverse);
    Ok(buf)
}

/// `y = C x + q` with `q` circularly-symmetric complex Gaussian of per-sample variance `n0`.
pub fn apply_channel<T: Real, R: Rng + ?Sized>(
    x: &[Complex<T>],
    ch: &ChannelRealization<T>,
    n0: f64,
    rng: &mut R,
) -> Result<Vec<Complex<T>>> {
    let mut y = apply_channel_noiseless(x, ch)?;
    add_noise(&mut y, n0, rng);
    Ok(y)
}

/// Sends one block through the channel the way a real link does: prepend a
/// cyclic prefix, linearly convolve, add noise to every received sample, and
/// strip the prefix. Equals [`apply_channel`] in law whenever the channel
/// order does not exceed `cp_len`.
pub fn propagate_with_cp<T: Real, R: Rng + ?Sized>(
    x: &[Complex<T>],
    ch: &ChannelRealization<T>,
    cp_len: usize,
    n0: f64,
    rng: &mut R,
) -> Result<Vec<Complex<T>>> {
    if ch.order() > cp_len {
        return Err(GfdmError::InvalidInput(format!(
            "channel order {} exceeds cyclic prefix length {cp_len}",
            ch.order()
        )));
    }
    let tx = add_cp(x, cp_len)?;
    let mut rx = vec![Complex::zero(); tx.len()];
    for (n, out) in rx.iter_mut().enumerate() {
        let mut acc = Complex::zero();
        for (i, &c) in ch.taps().iter().enumerate().take(n + 1) {
            acc = acc + c * tx[n - i];
        }
        *out = acc;
    }
    add_noise(&mut rx, n0, rng);
    remove_cp(&rx, cp_len)
}

/// Adds `CN(0, n0)` noise in place.
pub fn add_noise<T: Real, R: Rng + ?Sized>(buf: &mut [Complex<T>], n0: f64, rng: &mut R) {
    if n0 <= 0.0 {
        return;
    }
    let s = (n0 / 2.0).sqrt();
    for z in buf.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *z = *z + cplx(s * re, s * im);
    }
}

/// Per-tap variances `N_n^{(c)}` of a Rayleigh channel.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerDelayProfile {
    variances: Vec<f64>,
}

impl PowerDelayProfile {
    pub fn new(variances: Vec<f64>, normalize: bool) -> Result<Self> {
        if variances.is_empty() || variances.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(GfdmError::InvalidInput(
                "power delay profile needs nonnegative finite variances".into(),
            ));
        }
        let total: f64 = variances.iter().sum();
        if total <= 0.0 {
            return Err(GfdmError::InvalidInput("power delay profile has zero energy".into()));
        }
        let variances = if normalize {
            variances.iter().map(|v| v / total).collect()
        } else {
            variances
        };
        Ok(Self { variances })
    }

    /// `N_n = 0.64^n` for `0 <= n < D/4`, unit total energy.
    pub fn exponential(d: usize) -> Result<Self> {
        let taps = (d / 4).max(1);
        Self::new((0..taps).map(|n| 0.64f64.powi(n as i32)).collect(), true)
    }

    /// Seven-path profile at delays 0, 3, 7, 9, 11, 19, 41 samples with gains
    /// 0, -1, -2, -3, -8, -17.2, -20.8 dB, unit total energy.
    pub fn extended_pedestrian_a() -> Self {
        const PATHS: [(usize, f64); 7] = [
            (0, 0.0),
            (3, -1.0),
            (7, -2.0),
            (9, -3.0),
            (11, -8.0),
            (19, -17.2),
            (41, -20.8),
        ];
        let mut v = vec![0.0; 42];
        for (n, db) in PATHS {
            v[n] = 10f64.powf(db / 10.0);
        }
        Self::new(v, true).expect("static profile is valid")
    }

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    pub fn len(&self) -> usize {
        self.variances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variances.is_empty()
    }

    pub fn total_energy(&self) -> f64 {
        self.variances.iter().sum()
    }
}

/// Independent `CN(0, N_n)` taps.
pub fn sample_rayleigh<T: Real, R: Rng + ?Sized>(
    pdp: &PowerDelayProfile,
    d: usize,
    rng: &mut R,
) -> Result<ChannelRealization<T>> {
    if pdp.len() > d {
        return Err(GfdmError::InvalidInput(format!(
            "power delay profile of length {} exceeds block size {d}",
            pdp.len()
        )));
    }
    let taps = pdp
        .variances()
        .iter()
        .map(|&v| {
            let s = (v / 2.0).sqrt();
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            cplx(s * re, s * im)
        })
        .collect();
    ChannelRealization::from_taps(taps, d)
}

/// Rayleigh draw conditioned on `min_l |C_l| >= 10^{threshold_db/20}`.
///
/// Returns the accepted realization and the number of rejected draws.
pub fn sample_dfe_rayleigh<T: Real, R: Rng + ?Sized>(
    pdp: &PowerDelayProfile,
    d: usize,
    threshold_db: f64,
    rng: &mut R,
) -> Result<(ChannelRealization<T>, u64)> {
    if threshold_db.is_nan() {
        return Err(GfdmError::InvalidInput("deep-fade threshold is NaN".into()));
    }
    let floor = 10f64.powf(threshold_db / 20.0);
    let mut rejected = 0u64;
    loop {
        let ch = sample_rayleigh(pdp, d, rng)?;
        if ch.min_abs_response() >= floor {
            return Ok((ch, rejected));
        }
        rejected += 1;
        if rejected >= MAX_CONSECUTIVE_REJECTIONS {
            return Err(GfdmError::RejectionLimit { attempts: rejected });
        }
    }
}

/// Fixed four-tap multipath channel used for static-channel filter design.
pub fn reference_static_channel<T: Real>(d: usize) -> Result<ChannelRealization<T>> {
    let taps = vec![
        cplx(-0.1518, 0.6475),
        cplx(0.2701, 0.3063),
        cplx(0.5703, 0.0767),
        cplx(-0.0900, 0.2274),
    ];
    ChannelRealization::from_taps(taps, d)
}

/// Writes complex samples as `index,re,im` rows after `#` comment lines.
pub fn write_complex_csv<T: Real, W: Write>(
    mut out: W,
    values: &[Complex<T>],
    comments: &[String],
) -> Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "re", "im"])?;
    for (i, z) in values.iter().enumerate() {
        let z = to_c64(*z);
        w.write_record([i.to_string(), format!("{:e}", z.re), format!("{:e}", z.im)])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `index,re,im` rows; `#` lines are ignored and rows may come in any order.
pub fn read_complex_csv<T: Real, R: Read>(input: R) -> Result<Vec<Complex<T>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut rows: Vec<(usize, f64, f64)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let parse = |i: usize| -> Result<f64> {
            rec.get(i)
                .ok_or_else(|| GfdmError::Io(format!("missing column {i}")))?
                .parse::<f64>()
                .map_err(|e| GfdmError::Io(e.to_string()))
        };
        let idx = parse(0)? as usize;
        rows.push((idx, parse(1)?, parse(2)?));
    }
    rows.sort_by_key(|r| r.0);
    for (pos, r) in rows.iter().enumerate() {
        if r.0 != pos {
            return Err(GfdmError::Io(format!("missing or duplicate index near {pos}")));
        }
    }
    Ok(rows.into_iter().map(|(_, re, im)| cplx(re, im)).collect())
}
