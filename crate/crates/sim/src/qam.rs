//! Gray-mapped square QAM with unit average energy.

use std::str::FromStr;

use gfdm_core::C64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Constellation {
    #[serde(rename = "4qam")]
    Qam4,
    #[serde(rename = "16qam")]
    Qam16,
}

impl FromStr for Constellation {
    type Err = SimError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "4qam" | "qpsk" => Ok(Constellation::Qam4),
            "16qam" => Ok(Constellation::Qam16),
            other => Err(SimError::Config(format!("unknown constellation `{other}`"))),
        }
    }
}

impl Constellation {
    pub fn bits_per_symbol(self) -> usize {
        match self {
            Constellation::Qam4 => 2,
            Constellation::Qam16 => 4,
        }
    }

    pub fn size(self) -> usize {
        1 << self.bits_per_symbol()
    }

    fn side(self) -> usize {
        match self {
            Constellation::Qam4 => 2,
            Constellation::Qam16 => 4,
        }
    }

    fn scale(self) -> f64 {
        match self {
            Constellation::Qam4 => 1.0 / 2f64.sqrt(),
            Constellation::Qam16 => 1.0 / 10f64.sqrt(),
        }
    }

    /// Amplitude level (`-(S-1), .., S-1`) of a Gray-coded axis label.
    fn level(self, gray: usize) -> f64 {
        let mut b = gray;
        let mut shift = gray >> 1;
        while shift > 0 {
            b ^= shift;
            shift >>= 1;
        }
        (2 * b) as f64 - (self.side() - 1) as f64
    }

    /// Point for symbol index `s`: high half of the bits on I, low half on Q.
    pub fn point(self, s: usize) -> C64 {
        let half = self.bits_per_symbol() / 2;
        let i = s >> half;
        let q = s & ((1 << half) - 1);
        C64::new(self.level(i), self.level(q)) * self.scale()
    }

    pub fn points(self) -> Vec<C64> {
        (0..self.size()).map(|s| self.point(s)).collect()
    }

    /// Nearest symbol index.
    pub fn slice(self, z: C64) -> usize {
        let axis = |v: f64| -> usize {
            let s = self.side() as f64;
            let b = ((v / self.scale() + s - 1.0) / 2.0).round().clamp(0.0, s - 1.0) as usize;
            b ^ (b >> 1)
        };
        (axis(z.re) << (self.bits_per_symbol() / 2)) | axis(z.im)
    }

    /// Maps bits (MSB first per symbol) to points.
    pub fn map(self, bits: &[bool]) -> Result<Vec<C64>> {
        let b = self.bits_per_symbol();
        if bits.len() % b != 0 {
            return Err(SimError::Config(format!("{} bits do not fill {b}-bit symbols", bits.len())));
        }
        Ok(bits
            .chunks(b)
            .map(|c| self.point(c.iter().fold(0, |acc, &x| (acc << 1) | usize::from(x))))
            .collect())
    }

    pub fn demap(self, symbols: &[C64]) -> Vec<bool> {
        let b = self.bits_per_symbol();
        symbols
            .iter()
            .flat_map(|z| {
                let s = self.slice(*z);
                (0..b).rev().map(move |i| (s >> i) & 1 == 1)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_energy_and_distance() {
        for c in [Constellation::Qam4, Constellation::Qam16] {
            let pts = c.points();
            let e = pts.iter().map(|p| p.norm_sqr()).sum::<f64>() / pts.len() as f64;
            assert!((e - 1.0).abs() < 1e-12);
        }
        let pts = Constellation::Qam16.points();
        let mut dmin = f64::MAX;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                dmin = dmin.min((a - b).norm_sqr());
            }
        }
        assert!((dmin - 0.4).abs() < 1e-12);
    }

    #[test]
    fn gray_neighbours_differ_in_one_bit() {
        let c = Constellation::Qam16;
        for s in 0..16 {
            for t in 0..16 {
                if ((c.point(s) - c.point(t)).norm_sqr() - 0.4).abs() < 1e-9 {
                    assert_eq!((s ^ t).count_ones(), 1);
                }
            }
        }
    }

    #[test]
    fn round_trip() {
        let bits: Vec<bool> = (0..64).map(|i| (i * 7 + i / 3) % 3 == 0).collect();
        for c in [Constellation::Qam4, Constellation::Qam16] {
            assert_eq!(c.demap(&c.map(&bits).unwrap()), bits);
            for s in 0..c.size() {
                assert_eq!(c.slice(c.point(s)), s);
            }
        }
        assert!(Constellation::Qam16.map(&bits[..6]).is_err());
    }
}
