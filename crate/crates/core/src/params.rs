use crate::error::{GfdmError, Result};

/// Block dimensions: `K` subcarriers by `M` subsymbols, `D = K * M` samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GfdmParams {
    k: usize,
    m: usize,
}

impl GfdmParams {
    pub fn new(k: usize, m: usize) -> Result<Self> {
        if k == 0 || m == 0 {
            return Err(GfdmError::InvalidInput(format!(
                "K and M must be positive (got K={k}, M={m})"
            )));
        }
        k.checked_mul(m)
            .ok_or_else(|| GfdmError::InvalidInput("K*M overflows".into()))?;
        Ok(Self { k, m })
    }

    /// Number of subcarriers.
    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of subsymbols.
    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    /// Block size `K * M`.
    #[inline]
    pub fn d(&self) -> usize {
        self.k * self.m
    }

    /// Position of `(k, m)` in the vectorized data block.
    #[inline]
    pub fn index(&self, k: usize, m: usize) -> usize {
        k + m * self.k
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.d() {
            return Err(GfdmError::DimensionMismatch {
                expected: self.d(),
                found: len,
            });
        }
        Ok(())
    }
}

/// Numerical thresholds for the matrix predicates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Relative slack for unit-magnitude and round-trip checks.
    pub rel_eps: f64,
    /// Entry magnitudes at or below `zero_rel * max|G|` count as zero.
    pub zero_rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel_eps: 1e-10,
            zero_rel: 1e-12,
        }
    }
}

impl Tolerance {
    pub fn new(rel_eps: f64, zero_rel: f64) -> Result<Self> {
        if !(rel_eps >= 0.0 && zero_rel >= 0.0) {
            return Err(GfdmError::InvalidInput(
                "tolerances must be nonnegative".into(),
            ));
        }
        Ok(Self { rel_eps, zero_rel })
    }

    /// Absolute zero threshold for a matrix whose largest entry magnitude is `max_abs`.
    #[inline]
    pub fn zero_threshold(&self, max_abs: f64) -> f64 {
        self.zero_rel * max_abs
    }
}
