use num_complex::Complex;

use crate::error::{GfdmError, Result};
use crate::scalar::Real;

/// Prepends the last `l` samples of `x`.
pub fn add_cp<T: Real>(x: &[Complex<T>], l: usize) -> Result<Vec<Complex<T>>> {
    if l > x.len() {
        return Err(GfdmError::InvalidInput(format!(
            "cyclic prefix {l} longer than block {}",
            x.len()
        )));
    }
    let mut out = Vec::with_capacity(x.len() + l);
    out.extend_from_slice(&x[x.len() - l..]);
    out.extend_from_slice(x);
    Ok(out)
}

/// Drops the first `l` samples.
pub fn remove_cp<T: Real>(y: &[Complex<T>], l: usize) -> Result<Vec<Complex<T>>> {
    if l > y.len() / 2 {
        return Err(GfdmError::InvalidInput(format!(
            "cyclic prefix {l} longer than block {}",
            y.len() - l.min(y.len())
        )));
    }
    Ok(y[l..].to_vec())
}
