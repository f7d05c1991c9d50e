//! Complex-multiplication counts of GFDM and OFDM transceivers under
//! multipath channels. A `p`-point DFT costs `(p/2) log₂ p` and a `p x p`
//! inversion `p³/3`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use gfdm_core::{GfdmError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Implementation {
    Ofdm,
    Direct,
    FrequencyDomain,
    FrequencyConvolution,
    BlockCircularity,
    BlockCircularityPow2,
    ZakDomain,
    LuDecomposition,
    Form1,
    Form2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Transmitter,
    ZfReceiver,
    MmseReceiver,
}

impl Implementation {
    pub const ALL: [Implementation; 10] = [
        Implementation::Ofdm,
        Implementation::Direct,
        Implementation::FrequencyDomain,
        Implementation::FrequencyConvolution,
        Implementation::BlockCircularity,
        Implementation::BlockCircularityPow2,
        Implementation::ZakDomain,
        Implementation::LuDecomposition,
        Implementation::Form1,
        Implementation::Form2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Implementation::Ofdm => "ofdm",
            Implementation::Direct => "direct",
            Implementation::FrequencyDomain => "frequency-domain",
            Implementation::FrequencyConvolution => "frequency-convolution",
            Implementation::BlockCircularity => "block-circularity",
            Implementation::BlockCircularityPow2 => "block-circularity-pow2",
            Implementation::ZakDomain => "zak-domain",
            Implementation::LuDecomposition => "lu-decomposition",
            Implementation::Form1 => "form1",
            Implementation::Form2 => "form2",
        }
    }
}

impl fmt::Display for Implementation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Implementation {
    type Err = GfdmError;
    fn from_str(s: &str) -> Result<Self> {
        Implementation::ALL
            .into_iter()
            .find(|i| i.name() == s)
            .ok_or_else(|| GfdmError::UnknownName(s.to_string()))
    }
}

impl Role {
    pub const ALL: [Role; 3] = [Role::Transmitter, Role::ZfReceiver, Role::MmseReceiver];

    pub fn name(self) -> &'static str {
        match self {
            Role::Transmitter => "tx",
            Role::ZfReceiver => "zf-rx",
            Role::MmseReceiver => "mmse-rx",
        }
    }
}

impl FromStr for Role {
    type Err = GfdmError;
    fn from_str(s: &str) -> Result<Self> {
        Role::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| GfdmError::UnknownName(s.to_string()))
    }
}

/// Complex multiplications to transmit or receive one block of `KM` symbols.
///
/// `Ok(None)` marks a combination the implementation does not support.
/// `l_t` and `l_r` are the subcarrier spans of the frequency-domain
/// transmit and receive filters.
pub fn complexity_cm(imp: Implementation, role: Role, k: usize, m: usize, l_t: usize, l_r: usize) -> Result<Option<f64>> {
    if k == 0 || m == 0 || l_t == 0 || l_r == 0 {
        return Err(GfdmError::InvalidInput("complexity parameters must be positive".into()));
    }
    let (kf, mf) = (k as f64, m as f64);
    let d = kf * mf;
    let lg = |x: f64| x.log2();
    let eq = d * (lg(d) + 1.0);
    use Implementation::*;
    use Role::*;
    let v = match (imp, role) {
        (Ofdm, Transmitter) => 0.5 * d * lg(d),
        (Ofdm, ZfReceiver) => 0.5 * d * lg(d) + d,
        (Ofdm, MmseReceiver) => d * (0.5 * lg(d) + 1.0),
        (Direct, Transmitter) => d * d,
        (Direct, ZfReceiver) => d * d + eq,
        (Direct, MmseReceiver) => 7.0 / 3.0 * d * d * d + 2.0 * d * d,
        (FrequencyDomain, Transmitter) => d * (0.5 * lg(kf * mf * mf) + l_t as f64),
        (FrequencyDomain, ZfReceiver) => d * (0.5 * lg(kf * mf * mf) + l_r as f64) + d,
        (FrequencyConvolution | BlockCircularity, Transmitter) => d * (0.5 * lg(kf) + mf),
        (FrequencyConvolution | BlockCircularity, ZfReceiver) => d * (0.5 * lg(kf) + mf) + eq,
        (BlockCircularityPow2, Transmitter) => d * (0.5 * lg(kf * mf * mf) + 1.0),
        (BlockCircularityPow2, ZfReceiver) => d * (0.5 * lg(kf * mf * mf) + 1.0) + eq,
        (ZakDomain, MmseReceiver) => d * (lg(mf) + 6.0 * kf + 12.0 * mf + 4.0),
        (LuDecomposition, MmseReceiver) => d * (0.5 * lg(d) + 20.0 * mf * mf + 22.0 * mf),
        (Form1, Transmitter) => d * (0.5 * lg(kf * mf * mf) + 1.0),
        (Form1, ZfReceiver) => d * (0.5 * lg(kf * mf * mf) + 1.0) + eq,
        (Form1, MmseReceiver) => d * (0.5 * lg(kf.powi(3) * mf.powi(4)) + 4.0),
        (Form2, Transmitter) => d * (0.5 * lg(kf.powi(3) * mf * mf) + 1.0),
        (Form2, ZfReceiver) => d * (0.5 * lg(kf.powi(3) * mf * mf) + 1.0) + d,
        (Form2, MmseReceiver) => d * (0.5 * lg(kf.powi(3) * mf * mf) + 4.0),
        _ => return Ok(None),
    };
    Ok(Some(v))
}

/// Writes `implementation,role,K,M,cm` rows for every supported pair and each `M`.
pub fn complexity_table<W: Write>(out: W, k: usize, ms: &[usize], l_t: usize, l_r: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| GfdmError::Io(e.to_string());
    w.write_record(["implementation", "role", "K", "M", "cm"]).map_err(io)?;
    for &m in ms {
        for imp in Implementation::ALL {
            for role in Role::ALL {
                if let Some(v) = complexity_cm(imp, role, k, m, l_t, l_r)? {
                    w.write_record([imp.name(), role.name(), &k.to_string(), &m.to_string(), &format!("{v:.1}")])
                        .map_err(io)?;
                }
            }
        }
    }
    w.flush().map_err(|e| GfdmError::Io(e.to_string()))
}
