use num_complex::Complex;
use num_traits::Zero;

use crate::error::{GfdmError, Result};
use crate::params::GfdmParams;
use crate::scalar::Real;

/// Data block `d` (entry `(k, m)` at `k + mK`) with its resource allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct GfdmFrame<T: Real> {
    params: GfdmParams,
    data: Vec<Complex<T>>,
    subcarriers: Vec<usize>,
    subsymbols: Vec<usize>,
    cp_len: usize,
}

impl<T: Real> GfdmFrame<T> {
    /// Fully allocated frame.
    pub fn full(params: GfdmParams, data: Vec<Complex<T>>, cp_len: usize) -> Result<Self> {
        Self::new(
            params,
            data,
            (0..params.k()).collect(),
            (0..params.m()).collect(),
            cp_len,
        )
    }

    /// Frame on `subcarriers x subsymbols`; data outside the allocation must be zero.
    pub fn new(
        params: GfdmParams,
        data: Vec<Complex<T>>,
        subcarriers: Vec<usize>,
        subsymbols: Vec<usize>,
        cp_len: usize,
    ) -> Result<Self> {
        params.check_len(data.len())?;
        let subcarriers = normalize_set(subcarriers, params.k(), "subcarrier")?;
        let subsymbols = normalize_set(subsymbols, params.m(), "subsymbol")?;
        if cp_len > params.d() {
            return Err(GfdmError::InvalidInput(format!(
                "cyclic prefix {cp_len} exceeds block size {}",
                params.d()
            )));
        }
        let frame = Self {
            params,
            data,
            subcarriers,
            subsymbols,
            cp_len,
        };
        let mask = frame.mask();
        if let Some(i) = (0..params.d()).find(|&i| !mask[i] && !frame.data[i].is_zero()) {
            return Err(GfdmError::InvalidInput(format!(
                "nonzero data at unallocated position (k={}, m={})",
                i % params.k(),
                i / params.k()
            )));
        }
        Ok(frame)
    }

    /// Like [`Self::new`] but zeroes data outside the allocation instead of rejecting it.
    pub fn masked(
        params: GfdmParams,
        mut data: Vec<Complex<T>>,
        subcarriers: Vec<usize>,
        subsymbols: Vec<usize>,
        cp_len: usize,
    ) -> Result<Self> {
        params.check_len(data.len())?;
        let sc = normalize_set(subcarriers, params.k(), "subcarrier")?;
        let ss = normalize_set(subsymbols, params.m(), "subsymbol")?;
        let mask = allocation_mask(params, &sc, &ss);
        data.iter_mut()
            .zip(&mask)
            .filter(|(_, on)| !**on)
            .for_each(|(z, _)| *z = Complex::zero());
        Self::new(params, data, sc, ss, cp_len)
    }

    pub fn params(&self) -> GfdmParams {
        self.params
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn subcarriers(&self) -> &[usize] {
        &self.subcarriers
    }

    pub fn subsymbols(&self) -> &[usize] {
        &self.subsymbols
    }

    pub fn cp_len(&self) -> usize {
        self.cp_len
    }

    /// Transmitted block length `D' = D + L`.
    pub fn tx_len(&self) -> usize {
        self.params.d() + self.cp_len
    }

    pub fn is_full(&self) -> bool {
        self.subcarriers.len() == self.params.k() && self.subsymbols.len() == self.params.m()
    }

    /// `true` at positions `k + mK` inside the allocation.
    pub fn mask(&self) -> Vec<bool> {
        allocation_mask(self.params, &self.subcarriers, &self.subsymbols)
    }
}

pub fn allocation_mask(params: GfdmParams, subcarriers: &[usize], subsymbols: &[usize]) -> Vec<bool> {
    let mut mask = vec![false; params.d()];
    for &m in subsymbols {
        for &k in subcarriers {
            mask[params.index(k, m)] = true;
        }
    }
    mask
}

fn normalize_set(mut v: Vec<usize>, bound: usize, what: &str) -> Result<Vec<usize>> {
    v.sort_unstable();
    v.dedup();
    if v.is_empty() {
        return Err(GfdmError::InvalidInput(format!("empty {what} set")));
    }
    if let Some(&bad) = v.iter().find(|&&i| i >= bound) {
        return Err(GfdmError::InvalidInput(format!(
            "{what} index {bad} out of range 0..{bound}"
        )));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    #[test]
    fn allocation_is_enforced() {
        let p = GfdmParams::new(3, 2).unwrap();
        let mut d = vec![cplx::<f64>(0.0, 0.0); 6];
        d[p.index(1, 1)] = cplx(1.0, 0.0);
        assert!(GfdmFrame::new(p, d.clone(), vec![1], vec![1], 0).is_ok());
        assert!(GfdmFrame::new(p, d.clone(), vec![0], vec![0, 1], 0).is_err());
        let f = GfdmFrame::<f64>::masked(p, vec![cplx(1.0, 0.0); 6], vec![2, 0, 2], vec![1], 1).unwrap();
        assert_eq!(f.subcarriers(), &[0, 2]);
        assert_eq!(f.data().iter().filter(|z| !z.is_zero()).count(), 2);
        assert!(!f.is_full());
        assert_eq!(f.tx_len(), 7);
        assert!(GfdmFrame::full(p, d.clone(), 7).is_err());
        assert!(GfdmFrame::new(p, d, vec![3], vec![0], 0).is_err());
    }
}
