//! Prototype filter constructors.
//!
//! Filters fall into two classes: constant-magnitude characteristic matrix
//! (CMCM) filters, whose GFDM matrices are scaled unitary matrices, and the
//! rest. RC and RRC belong to the second class and are singular whenever both
//! `K` and `M` are even.

use std::io::Write;

use num_complex::Complex;
use num_traits::Zero;

use crate::channel::{write_complex_csv, ChannelRealization};
use crate::charmat::{CharacteristicMatrix, PrototypeFilter};
use crate::error::{GfdmError, Result};
use crate::params::{GfdmParams, Tolerance};
use crate::scalar::{cplx, expj, Real};

/// `K x M` matrix of phases in radians, stored row-major (`k` selects the row).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl PhaseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(GfdmError::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|p| !p.is_finite()) {
            return Err(GfdmError::InvalidInput("phases must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(GfdmError::InvalidInput("ragged phase matrix".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// All-zero phases.
    pub fn zeros(params: GfdmParams) -> Self {
        Self {
            rows: params.k(),
            cols: params.m(),
            data: vec![0.0; params.d()],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, k: usize, m: usize) -> f64 {
        self.data[k * self.cols + m]
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.data[k * self.cols..(k + 1) * self.cols]
    }

    fn check(&self, params: GfdmParams) -> Result<()> {
        if self.rows != params.k() || self.cols != params.m() {
            return Err(GfdmError::InvalidInput(format!(
                "phase matrix is {}x{}, expected {}x{}",
                self.rows,
                self.cols,
                params.k(),
                params.m()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FilterKind {
    RaisedCosine { rolloff: f64 },
    RootRaisedCosine { rolloff: f64 },
    Dirichlet,
    ModifiedDirichlet,
    Cmcm { phases: PhaseMatrix },
    /// OFDM rectangular window; requires `M = 1`.
    Rectangular,
    /// MSE-optimal filter for a known static channel under ZF reception.
    StaticOptimal { phases: PhaseMatrix },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterSpec {
    pub kind: FilterKind,
    /// Energy `ξ_G` of the resulting GFDM matrix.
    pub target_energy: f64,
}

impl FilterSpec {
    pub fn new(kind: FilterKind) -> Self {
        Self {
            kind,
            target_energy: 1.0,
        }
    }

    pub fn with_energy(mut self, target_energy: f64) -> Self {
        self.target_energy = target_energy;
        self
    }

    pub fn needs_channel(&self) -> bool {
        matches!(self.kind, FilterKind::StaticOptimal { .. })
    }
}

/// Builds the characteristic matrix described by `spec`.
///
/// `channel` is required for [`FilterKind::StaticOptimal`] and ignored otherwise.
pub fn make_filter<T: Real>(
    spec: &FilterSpec,
    params: GfdmParams,
    channel: Option<&ChannelRealization<T>>,
) -> Result<CharacteristicMatrix<T>> {
    let xi = spec.target_energy;
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(GfdmError::InvalidInput(format!(
            "target energy must be positive (got {xi})"
        )));
    }
    let unit = match &spec.kind {
        FilterKind::RaisedCosine { rolloff } => {
            CharacteristicMatrix::from_time(&rc_time_taps(params, *rolloff, RcShape::Rc)?)
        }
        FilterKind::RootRaisedCosine { rolloff } => {
            CharacteristicMatrix::from_time(&rc_time_taps(params, *rolloff, RcShape::Rrc)?)
        }
        FilterKind::Dirichlet => CharacteristicMatrix::from_freq(params, &dirichlet_freq(params, false))?,
        FilterKind::ModifiedDirichlet => {
            CharacteristicMatrix::from_freq(params, &dirichlet_freq(params, true))?
        }
        FilterKind::Cmcm { phases } => {
            phases.check(params)?;
            CharacteristicMatrix::from_fn(params, |k, m| expj(phases.get(k, m)))?
        }
        FilterKind::Rectangular => {
            if params.m() != 1 {
                return Err(GfdmError::InvalidInput(format!(
                    "rectangular window needs M = 1 (got M = {})",
                    params.m()
                )));
            }
            let v = 1.0 / (params.k() as f64).sqrt();
            let g = PrototypeFilter::new(params, vec![cplx(v, 0.0); params.d()])?;
            CharacteristicMatrix::from_time(&g)
        }
        FilterKind::StaticOptimal { phases } => {
            phases.check(params)?;
            let ch = channel.ok_or_else(|| {
                GfdmError::InvalidInput("static-optimal filter needs a channel".into())
            })?;
            static_optimal(params, ch, phases)?
        }
    };
    let scale = (xi / unit.energy().to_f64_lossy()).sqrt();
    Ok(unit.scaled(cplx(scale, 0.0)))
}

/// `α_l = Σ_r 1/|C_{l+rM}|²` for `l = 0..M`.
pub fn channel_alpha<T: Real>(params: GfdmParams, c_freq: &[Complex<T>]) -> Result<Vec<f64>> {
    params.check_len(c_freq.len())?;
    let (k, m) = (params.k(), params.m());
    let max = c_freq.iter().map(|z| z.norm().to_f64_lossy()).fold(0.0, f64::max);
    let thr = Tolerance::default().zero_threshold(max);
    let mut alpha = vec![0.0; m];
    for (l, a) in alpha.iter_mut().enumerate() {
        for r in 0..k {
            let bin = l + r * m;
            let mag2 = c_freq[bin].norm_sqr().to_f64_lossy();
            if mag2.sqrt() <= thr {
                return Err(GfdmError::ChannelNull { bin });
            }
            *a += 1.0 / mag2;
        }
    }
    Ok(alpha)
}

fn static_optimal<T: Real>(
    params: GfdmParams,
    ch: &ChannelRealization<T>,
    phases: &PhaseMatrix,
) -> Result<CharacteristicMatrix<T>> {
    let alpha = channel_alpha(params, ch.freq_response())?;
    CharacteristicMatrix::from_fn(params, |k, l| {
        let mag = alpha[l].sqrt().sqrt();
        expj::<T>(phases.get(k, l)) * T::lit(mag)
    })
}

/// Bins `X₁ ∪ X₂` of the width-`M` rectangular passband centred on DC.
pub fn dirichlet_support(params: GfdmParams) -> (Vec<usize>, Vec<usize>) {
    let (d, m) = (params.d(), params.m());
    let lo = (m - 1) / 2;
    let hi = m / 2; // ⌈(M-1)/2⌉
    ((0..=lo).collect(), (d - hi..d).collect())
}

fn dirichlet_freq<T: Real>(params: GfdmParams, modified: bool) -> Vec<Complex<T>> {
    let d = params.d();
    let amp = (params.k() as f64).sqrt();
    let mut gf = vec![Complex::zero(); d];
    let (x1, x2) = dirichlet_support(params);
    let pi = std::f64::consts::PI;
    for l in x1 {
        let ph = if modified { pi * l as f64 / d as f64 } else { 0.0 };
        gf[l] = expj::<T>(ph) * T::lit(amp);
    }
    for l in x2 {
        let ph = if modified { pi * (l as f64 - d as f64) / d as f64 } else { 0.0 };
        gf[l] = expj::<T>(ph) * T::lit(amp);
    }
    gf
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcShape {
    Rc,
    Rrc,
}

/// Sampled, circularly wrapped and unit-energy RC or RRC pulse with symbol
/// period `K` samples. Tap `n` sits at signed offset
/// `((n + ⌈D/2⌉) mod D) - ⌈D/2⌉`, so the taps are even-symmetric.
pub fn rc_time_taps<T: Real>(
    params: GfdmParams,
    rolloff: f64,
    shape: RcShape,
) -> Result<PrototypeFilter<T>> {
    if !(0.0..=1.0).contains(&rolloff) {
        return Err(GfdmError::InvalidInput(format!(
            "roll-off must lie in [0, 1] (got {rolloff})"
        )));
    }
    let d = params.d();
    let half = d.div_ceil(2);
    let period = params.k() as f64;
    let raw: Vec<f64> = (0..d)
        .map(|n| {
            let signed = ((n + half) % d) as f64 - half as f64;
            let t = signed / period;
            match shape {
                RcShape::Rc => rc_pulse(t, rolloff),
                RcShape::Rrc => rrc_pulse(t, rolloff),
            }
        })
        .collect();
    let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    PrototypeFilter::new(params, raw.iter().map(|v| cplx(v / norm, 0.0)).collect())
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

/// Raised-cosine impulse response at `t` symbol periods.
pub fn rc_pulse(t: f64, a: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let den = 1.0 - (2.0 * a * t).powi(2);
    if den.abs() < 1e-12 {
        return pi / 4.0 * sinc(1.0 / (2.0 * a));
    }
    sinc(t) * (pi * a * t).cos() / den
}

/// Root-raised-cosine impulse response at `t` symbol periods.
pub fn rrc_pulse(t: f64, a: f64) -> f64 {
    let pi = std::f64::consts::PI;
    if t == 0.0 {
        return 1.0 - a + 4.0 * a / pi;
    }
    if a > 0.0 && ((4.0 * a * t).abs() - 1.0).abs() < 1e-12 {
        let x = pi / (4.0 * a);
        return a / 2f64.sqrt() * ((1.0 + 2.0 / pi) * x.sin() + (1.0 - 2.0 / pi) * x.cos());
    }
    let num = (pi * t * (1.0 - a)).sin() + 4.0 * a * t * (pi * t * (1.0 + a)).cos();
    num / (pi * t * (1.0 - (4.0 * a * t).powi(2)))
}

const CMCM1_K8M4: [[f64; 4]; 8] = [
    [0.75, 2.50, -1.09, -1.98],
    [-2.95, 0.16, 1.29, 1.59],
    [-2.10, 0.59, 3.12, -0.31],
    [0.53, 3.04, 0.28, -1.11],
    [1.58, 1.37, -3.02, -1.80],
    [-3.11, 1.05, 0.47, -0.73],
    [0.78, -1.88, 0.85, -2.24],
    [1.57, -2.83, -0.56, 2.81],
];

const CMCM2_K8M4: [[f64; 4]; 8] = [
    [-0.31, -3.11, 0.82, -1.04],
    [-1.70, 2.53, -0.29, 0.71],
    [-2.49, 2.19, -2.69, -1.55],
    [-1.44, -0.77, -2.06, 0.19],
    [0.23, -1.00, 0.31, 0.48],
    [0.95, -1.50, 2.26, 0.09],
    [0.21, -1.03, 0.76, 0.57],
    [2.17, 1.79, -2.15, 1.88],
];

const CMCM1_K8M5: [[f64; 5]; 8] = [
    [0.62, -0.40, -1.36, -2.16, -1.94],
    [-1.30, -2.65, 2.78, -2.95, 2.17],
    [1.01, 0.07, 2.86, 2.92, -0.60],
    [1.75, 2.09, 1.59, 0.48, -1.89],
    [1.55, -1.83, -0.11, -3.01, -0.57],
    [0.27, -1.21, -2.81, 0.37, -2.27],
    [-1.48, 0.46, 2.58, 2.72, 0.44],
    [1.23, -0.31, 1.19, 0.06, -0.35],
];

const CMCM2_K8M5: [[f64; 5]; 8] = [
    [-2.89, -1.87, -2.40, -3.02, -1.22],
    [0.73, 2.22, -2.79, 3.08, 3.04],
    [0.90, -2.14, -1.51, -2.13, -1.69],
    [-2.42, -2.99, -1.16, -0.08, -0.63],
    [-1.94, -2.57, 2.22, 1.17, 2.89],
    [1.33, 1.10, -2.51, -1.44, 1.36],
    [-3.06, -3.05, -2.54, -3.09, 0.36],
    [0.53, 0.22, 2.88, -2.08, 0.54],
];

/// Names accepted by [`phase_set`].
pub const PHASE_SET_NAMES: [&str; 4] = ["cmcm1_k8m4", "cmcm2_k8m4", "cmcm1_k8m5", "cmcm2_k8m5"];

/// Fixed, arbitrarily chosen phase matrices for the `K=8` reproduction runs.
pub fn phase_set(name: &str) -> Result<PhaseMatrix> {
    fn rows<const N: usize>(t: &[[f64; N]; 8]) -> Result<PhaseMatrix> {
        PhaseMatrix::new(8, N, t.iter().flatten().copied().collect())
    }
    match name {
        "cmcm1_k8m4" => rows(&CMCM1_K8M4),
        "cmcm2_k8m4" => rows(&CMCM2_K8M4),
        "cmcm1_k8m5" => rows(&CMCM1_K8M5),
        "cmcm2_k8m5" => rows(&CMCM2_K8M5),
        other => Err(GfdmError::UnknownName(other.to_string())),
    }
}

/// Writes the time-domain taps as `index,re,im` CSV.
pub fn write_filter_csv<T: Real, W: Write>(out: W, g: &PrototypeFilter<T>, label: &str) -> Result<()> {
    let p = g.params();
    write_complex_csv(
        out,
        g.taps(),
        &[format!("{label}, K={}, M={}", p.k(), p.m())],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::reference_static_channel;
    use crate::charmat::rel_err;

    fn p(k: usize, m: usize) -> GfdmParams {
        GfdmParams::new(k, m).unwrap()
    }

    #[test]
    fn dirichlet_is_unitary() {
        let tol = Tolerance::default();
        for (k, m) in [(2, 2), (8, 4), (8, 5), (3, 1), (32, 16), (5, 7)] {
            let g = make_filter::<f64>(&FilterSpec::new(FilterKind::Dirichlet), p(k, m), None).unwrap();
            assert!(g.is_unitary(&tol), "K={k} M={m}");
            let g = make_filter::<f64>(&FilterSpec::new(FilterKind::ModifiedDirichlet), p(k, m), None).unwrap();
            assert!(g.is_unitary(&tol), "modified K={k} M={m}");
        }
    }

    #[test]
    fn dirichlet_small_case_spectrum() {
        let g = make_filter::<f64>(&FilterSpec::new(FilterKind::Dirichlet), p(2, 2), None).unwrap();
        let s = 2f64.sqrt();
        let want = [cplx(s, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(s, 0.0)];
        assert!(rel_err(&g.to_freq(), &want) < 1e-14);
    }

    #[test]
    fn modified_dirichlet_small_case() {
        let g = make_filter::<f64>(&FilterSpec::new(FilterKind::ModifiedDirichlet), p(2, 2), None).unwrap();
        let gb = g.phase_shift();
        let pi = std::f64::consts::PI;
        let want = [expj(0.0), expj(0.0), expj(-pi / 4.0), expj(-5.0 * pi / 4.0)];
        assert!(rel_err(gb.entries(), &want) < 1e-14);
    }

    #[test]
    fn modified_dirichlet_matches_closed_form_shifted_matrix() {
        let params = p(8, 5);
        let g = make_filter::<f64>(&FilterSpec::new(FilterKind::ModifiedDirichlet), params, None).unwrap();
        let (d, m) = (params.d() as f64, params.m());
        let pi = std::f64::consts::PI;
        for k in 0..8 {
            for l in 0..m {
                let ph = if l < m.div_ceil(2) {
                    pi * l as f64 / d
                } else {
                    pi * (-2.0 * (k * m) as f64 + (l as f64 - m as f64)) / d
                };
                assert!((g.phase_shift().get(k, l) - expj::<f64>(ph)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn dirichlet_pair_share_magnitude_response() {
        let params = p(8, 4);
        let a = make_filter::<f64>(&FilterSpec::new(FilterKind::Dirichlet), params, None).unwrap().to_freq();
        let b = make_filter::<f64>(&FilterSpec::new(FilterKind::ModifiedDirichlet), params, None)
            .unwrap()
            .to_freq();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.norm() - y.norm()).abs() < 1e-12);
        }
        assert_eq!(a.iter().filter(|z| z.norm() > 1e-9).count(), 4);
    }

    #[test]
    fn rc_singular_entry_for_even_dimensions() {
        let g = make_filter::<f64>(
            &FilterSpec::new(FilterKind::RaisedCosine { rolloff: 0.7 }),
            p(8, 4),
            None,
        )
        .unwrap();
        assert!(g.get(4, 2).norm() < 1e-12);
        assert!(!g.is_invertible(&Tolerance::default()));
        let g = make_filter::<f64>(
            &FilterSpec::new(FilterKind::RaisedCosine { rolloff: 0.7 }),
            p(8, 5),
            None,
        )
        .unwrap();
        assert!(g.is_invertible(&Tolerance::default()));
    }

    #[test]
    fn rc_taps_are_even_symmetric_and_unit_energy() {
        for shape in [RcShape::Rc, RcShape::Rrc] {
            for a in [0.0, 0.25, 0.5, 0.7, 1.0] {
                let g = rc_time_taps::<f64>(p(8, 5), a, shape).unwrap();
                let t = g.taps();
                for n in 1..40 {
                    assert_eq!(t[n], t[40 - n]);
                }
                assert!((g.energy() - 1.0).abs() < 1e-12);
                assert!(t.iter().all(|z| z.re.is_finite()));
            }
        }
        assert!(rc_time_taps::<f64>(p(8, 5), 1.5, RcShape::Rc).is_err());
    }

    #[test]
    fn rc_removable_singularities_are_continuous() {
        for a in [0.25, 0.5, 0.7, 1.0] {
            let t0 = 1.0 / (2.0 * a);
            assert!((rc_pulse(t0, a) - rc_pulse(t0 + 1e-7, a)).abs() < 1e-5);
            let t1 = 1.0 / (4.0 * a);
            assert!((rrc_pulse(t1, a) - rrc_pulse(t1 + 1e-7, a)).abs() < 1e-5);
        }
        assert!((rrc_pulse(1e-9, 0.3) - rrc_pulse(0.0, 0.3)).abs() < 1e-6);
    }

    #[test]
    fn target_energy_is_honored() {
        let params = p(8, 4);
        let specs = [
            FilterKind::RaisedCosine { rolloff: 0.3 },
            FilterKind::RootRaisedCosine { rolloff: 1.0 },
            FilterKind::Dirichlet,
            FilterKind::ModifiedDirichlet,
            FilterKind::Cmcm { phases: phase_set("cmcm1_k8m4").unwrap() },
        ];
        for kind in specs {
            let g = make_filter::<f64>(&FilterSpec::new(kind.clone()).with_energy(2.5), params, None).unwrap();
            assert!((g.to_time().energy() - 2.5).abs() < 1e-12, "{kind:?}");
        }
    }

    #[test]
    fn cmcm_from_phase_sets() {
        let ph = phase_set("cmcm1_k8m4").unwrap();
        assert_eq!(ph.row(0), &[0.75, 2.50, -1.09, -1.98]);
        assert_eq!(phase_set("cmcm2_k8m4").unwrap().row(0), &[-0.31, -3.11, 0.82, -1.04]);
        assert_eq!(phase_set("cmcm1_k8m5").unwrap().row(0), &[0.62, -0.40, -1.36, -2.16, -1.94]);
        assert_eq!(phase_set("cmcm2_k8m5").unwrap().get(7, 4), 0.54);
        assert!(matches!(phase_set("nope"), Err(GfdmError::UnknownName(_))));
        let g = make_filter::<f64>(&FilterSpec::new(FilterKind::Cmcm { phases: ph.clone() }), p(8, 4), None).unwrap();
        assert!(g.is_unitary(&Tolerance::default()));
        assert!((g.get(0, 1).arg() - 2.50).abs() < 1e-12);
        assert!(make_filter::<f64>(&FilterSpec::new(FilterKind::Cmcm { phases: ph }), p(8, 5), None).is_err());
    }

    #[test]
    fn rectangular_is_ofdm() {
        let g = make_filter::<f64>(&FilterSpec::new(FilterKind::Rectangular), p(4, 1), None).unwrap();
        assert!(rel_err(g.entries(), &[cplx(1.0, 0.0); 4]) < 1e-15);
        assert!(make_filter::<f64>(&FilterSpec::new(FilterKind::Rectangular), p(4, 2), None).is_err());
    }

    #[test]
    fn static_optimal_ratio_is_flat() {
        let params = p(8, 4);
        let ch = reference_static_channel::<f64>(params.d()).unwrap();
        let spec = FilterSpec::new(FilterKind::StaticOptimal { phases: phase_set("cmcm2_k8m4").unwrap() });
        assert!(make_filter::<f64>(&spec, params, None).is_err());
        let g = make_filter(&spec, params, Some(&ch)).unwrap();
        let alpha = channel_alpha(params, ch.freq_response()).unwrap();
        let ratios: Vec<f64> = (0..8)
            .flat_map(|k| (0..4).map(move |l| (k, l)))
            .map(|(k, l)| g.get(k, l).norm_sqr() / alpha[l].sqrt())
            .collect();
        let max = ratios.iter().cloned().fold(0.0, f64::max);
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((max - min) / max < 1e-12);
        assert!((g.energy() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn static_optimal_on_flat_channel_is_cmcm() {
        let params = p(4, 3);
        let ch = ChannelRealization::<f64>::awgn(12);
        let spec = FilterSpec::new(FilterKind::StaticOptimal { phases: PhaseMatrix::zeros(params) });
        let g = make_filter(&spec, params, Some(&ch)).unwrap();
        assert!(g.is_unitary(&Tolerance::default()));
    }

    #[test]
    fn static_optimal_rejects_channel_nulls() {
        let params = p(2, 2);
        // c = [1, 1] has a null at bin D/2
        let ch = ChannelRealization::from_taps(vec![cplx::<f64>(1.0, 0.0), cplx(1.0, 0.0)], 4).unwrap();
        let spec = FilterSpec::new(FilterKind::StaticOptimal { phases: PhaseMatrix::zeros(params) });
        assert_eq!(make_filter(&spec, params, Some(&ch)).unwrap_err(), GfdmError::ChannelNull { bin: 2 });
    }

    #[test]
    fn csv_export_has_one_row_per_tap() {
        let g = make_filter::<f64>(&FilterSpec::new(FilterKind::Dirichlet), p(4, 3), None).unwrap().to_time();
        let mut out = Vec::new();
        write_filter_csv(&mut out, &g, "dirichlet").unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 1 + 1 + 12);
        assert!(text.starts_with("# dirichlet, K=4, M=3"));
    }
}
