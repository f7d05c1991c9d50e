//! Peak-to-average power ratio.

use gfdm_core::C64;

/// `max |x[n]|² / mean |x[n]|²` of one block (linear scale).
pub fn papr(x: &[C64]) -> f64 {
    let peak = x.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    let mean = x.iter().map(|z| z.norm_sqr()).sum::<f64>() / x.len() as f64;
    if mean == 0.0 {
        return f64::NAN;
    }
    peak / mean
}

/// Fraction of blocks whose PAPR exceeds each threshold (in dB).
pub fn papr_ccdf(paprs: &[f64], thresholds_db: &[f64]) -> Vec<f64> {
    thresholds_db
        .iter()
        .map(|t| {
            let lin = 10f64.powf(t / 10.0);
            paprs.iter().filter(|&&p| p > lin).count() as f64 / paprs.len() as f64
        })
        .collect()
}

pub fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_blocks() {
        let cm: Vec<C64> = (0..16).map(|n| C64::from_polar(1.0, n as f64)).collect();
        assert!((papr(&cm) - 1.0).abs() < 1e-12);
        let mut imp = vec![C64::new(0.0, 0.0); 32];
        imp[5] = C64::new(0.0, 3.0);
        assert!((papr(&imp) - 32.0).abs() < 1e-12);
        assert_eq!(papr_ccdf(&[1.0, 2.0, 4.0], &[0.0, 4.0]), vec![2.0 / 3.0, 1.0 / 3.0]);
    }
}
