//! Linear MMSE receivers.
//!
//! With `E = D_C' Q D̄_G + γ^{-1} D_C'^{-H} Q D̄_G^{-H}` (`Q = I_M ⊗ W_K`),
//! the MMSE receiver is `(W_M^H ⊗ W_K) E^{-1} Π^T W_D`. It fits the
//! two-stage structure of [`StructuredReceiver`] exactly when every
//! `K x K` block `F_m = [u_m γ^{-1}ũ_m][v_m ṽ_m]^T` has rank one, which
//! happens iff column `m` of `|Ḡ|` or the channel magnitudes
//! `|C_{kM+m}|` are constant in `k`. Otherwise the best rank-one
//! approximation of each `F_m` gives the approximated MMSE receiver.

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex;

use crate::charmat::{CharacteristicMatrix, PhaseShifted};
use crate::dense::{dft_matrix, DenseGfdmMatrix, C64};
use crate::error::{GfdmError, Result};
use crate::modem::rx::{check_channel, RxReport, StructuredReceiver};
use crate::modem::variance::error_variances_mmse;
use crate::params::Tolerance;
use crate::scalar::{from_c64, to_c64, Real};

/// Default slack for the constant-magnitude tests: `max/min ≤ 1 + 1e-9`.
pub const DEFAULT_SPREAD_TOL: f64 = 1e-9;

/// Which constancy condition admits an exact structured MMSE for a column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmseCondition {
    /// `|Ḡ[k, m]|` constant in `k`.
    FilterColumn,
    /// `|C_{kM+m}|` constant in `k`.
    ChannelComb,
}

/// Per-column outcome of the structured-MMSE existence test.
#[derive(Debug, Clone, PartialEq)]
pub struct LowComplexityCheck {
    pub columns: Vec<Option<MmseCondition>>,
}

impl LowComplexityCheck {
    pub fn exists(&self) -> bool {
        self.columns.iter().all(Option::is_some)
    }

    pub fn first_failure(&self) -> Option<usize> {
        self.columns.iter().position(Option::is_none)
    }
}

fn ratio_within(mags: impl Iterator<Item = f64>, spread_tol: f64) -> bool {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for v in mags {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    lo > 0.0 && hi / lo <= 1.0 + spread_tol
}

/// Checks, for every `m`, whether column `m` of `|Ḡ|` or the comb `|C_{kM+m}|`
/// is constant in `k`. Condition (a) wins ties.
pub fn mmse_lowcomp_exists<T: Real>(
    gbar: &PhaseShifted<T>,
    c_freq: &[Complex<T>],
    spread_tol: f64,
) -> Result<LowComplexityCheck> {
    let p = gbar.params();
    p.check_len(c_freq.len())?;
    let (k, m) = (p.k(), p.m());
    let columns = (0..m)
        .map(|col| {
            if ratio_within(gbar.column(col).iter().map(|z| z.norm().to_f64_lossy()), spread_tol) {
                Some(MmseCondition::FilterColumn)
            } else if ratio_within((0..k).map(|r| c_freq[r * m + col].norm().to_f64_lossy()), spread_tol) {
                Some(MmseCondition::ChannelComb)
            } else {
                None
            }
        })
        .collect();
    Ok(LowComplexityCheck { columns })
}

/// The four `K`-vectors spanning `F_m`: `u_m`, `ũ_m = (u_m^*)^{∘-1}`,
/// `v_m = Ḡ[:, m]`, `ṽ_m = (v_m^*)^{∘-1}`.
struct ColumnVectors {
    u: Vec<C64>,
    ut: Vec<C64>,
    v: Vec<C64>,
    vt: Vec<C64>,
}

fn column_vectors<T: Real>(gbar: &PhaseShifted<T>, c_freq: &[Complex<T>], col: usize) -> ColumnVectors {
    let p = gbar.params();
    let (k, m) = (p.k(), p.m());
    let u: Vec<C64> = (0..k).map(|r| to_c64(c_freq[r * m + col])).collect();
    let v: Vec<C64> = gbar.column(col).iter().map(|z| to_c64(*z)).collect();
    ColumnVectors {
        ut: u.iter().map(|z| z.conj().inv()).collect(),
        vt: v.iter().map(|z| z.conj().inv()).collect(),
        u,
        v,
    }
}

fn check_inputs<T: Real>(gbar: &PhaseShifted<T>, c_freq: &[Complex<T>], gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(GfdmError::InvalidInput(format!("SNR must be positive and finite (got {gamma})")));
    }
    let tol = Tolerance::default();
    if let Some((k, m)) = gbar.unshift().first_zero(&tol) {
        return Err(GfdmError::SingularMatrix { k, m });
    }
    check_channel(gbar.params(), c_freq, &tol)
}

/// Dense `K x K` matrix `F_m` (oracle use).
pub fn f_matrix<T: Real>(gbar: &PhaseShifted<T>, c_freq: &[Complex<T>], gamma: f64, m: usize) -> DMatrix<C64> {
    let cv = column_vectors(gbar, c_freq, m);
    let k = cv.u.len();
    DMatrix::from_fn(k, k, |r, c| cv.u[r] * cv.v[c] + cv.ut[r] * cv.vt[c] / gamma)
}

/// Exact factors `(w, z)` with `F_m = w_m z_m^T` for every column, in `k + mK` layout.
pub fn mmse_factors<T: Real>(
    gbar: &PhaseShifted<T>,
    c_freq: &[Complex<T>],
    gamma: f64,
    spread_tol: f64,
) -> Result<(Vec<Complex<T>>, Vec<Complex<T>>)> {
    check_inputs(gbar, c_freq, gamma)?;
    let check = mmse_lowcomp_exists(gbar, c_freq, spread_tol)?;
    if let Some(m) = check.first_failure() {
        return Err(GfdmError::LowComplexityUnavailable { m });
    }
    let p = gbar.params();
    let mut w = Vec::with_capacity(p.d());
    let mut z = Vec::with_capacity(p.d());
    for (col, cond) in check.columns.iter().enumerate() {
        let cv = column_vectors(gbar, c_freq, col);
        match cond.expect("checked above") {
            MmseCondition::FilterColumn => {
                let g2 = cv.v[0].norm_sqr();
                w.extend(cv.u.iter().zip(&cv.ut).map(|(u, ut)| from_c64::<T>(u + ut / (gamma * g2))));
                z.extend(cv.v.iter().map(|v| from_c64::<T>(*v)));
            }
            MmseCondition::ChannelComb => {
                let c2 = cv.u[0].norm_sqr();
                w.extend(cv.u.iter().map(|u| from_c64::<T>(*u)));
                z.extend(cv.v.iter().zip(&cv.vt).map(|(v, vt)| from_c64::<T>(v + vt / (gamma * c2))));
            }
        }
    }
    Ok((w, z))
}

/// Exact MMSE through the two-stage structure; refuses with
/// [`GfdmError::LowComplexityUnavailable`] when some column admits no exact
/// factorization (use [`rx_ammse`] there).
pub fn rx_mmse_lowcomp<T: Real>(
    y: &[Complex<T>],
    gbar: &PhaseShifted<T>,
    c_freq: &[Complex<T>],
    gamma: f64,
) -> Result<RxReport<T>> {
    let rx = mmse_receiver(gbar, c_freq, gamma)?;
    let var = error_variances_mmse(gbar, c_freq, gamma, 1.0)?;
    Ok(RxReport {
        estimates: rx.apply(y)?,
        bias: Some(var.iter().map(|s| Complex::new(T::lit(1.0 - s), T::zero())).collect()),
        error_variances: Some(var),
        pseudo_inverse: false,
    })
}

/// Prepared exact structured MMSE receiver.
pub fn mmse_receiver<T: Real>(
    gbar: &PhaseShifted<T>,
    c_freq: &[Complex<T>],
    gamma: f64,
) -> Result<StructuredReceiver<T>> {
    let (w, z) = mmse_factors(gbar, c_freq, gamma, DEFAULT_SPREAD_TOL)?;
    StructuredReceiver::from_factors(gbar.params(), &w, &z)
}

/// Best rank-one approximation `w z^T` of one `F_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneColumn {
    pub w: Vec<C64>,
    pub z: Vec<C64>,
    /// Singular values of `F_m` (`s1 ≥ s2`; all others are zero).
    pub s1: f64,
    pub s2: f64,
}

/// Thin QR of a `K x 2` matrix given by columns, by twice-iterated Gram–Schmidt.
/// A numerically dependent second column yields a zero `q2` and `r22 = 0`.
fn thin_qr(a: &[C64], b: &[C64]) -> (Vec<C64>, Vec<C64>, Matrix2<C64>) {
    let dot = |x: &[C64], y: &[C64]| -> C64 { x.iter().zip(y).map(|(p, q)| p.conj() * q).sum() };
    let norm = |x: &[C64]| -> f64 { x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() };
    let r11 = norm(a);
    let q1: Vec<C64> = a.iter().map(|z| z / r11).collect();
    let mut res = b.to_vec();
    let mut r12 = C64::new(0.0, 0.0);
    for _ in 0..2 {
        let c = dot(&q1, &res);
        r12 += c;
        res.iter_mut().zip(&q1).for_each(|(r, q)| *r -= c * q);
    }
    let r22 = norm(&res);
    let (q2, r22) = if r22 > 1e-13 * norm(b) {
        (res.iter().map(|z| z / r22).collect(), r22)
    } else {
        (vec![C64::new(0.0, 0.0); a.len()], 0.0)
    };
    let zero = C64::new(0.0, 0.0);
    (q1, q2, Matrix2::new(C64::new(r11, 0.0), r12, zero, C64::new(r22, 0.0)))
}

/// Rank-one approximation of `F = [a1 a2][b1 b2]^T` in `O(K)`.
pub fn rank_one_approx(a1: &[C64], a2: &[C64], b1: &[C64], b2: &[C64]) -> RankOneColumn {
    // F = U2 P^H with P = conj([b1 b2])
    let p1: Vec<C64> = b1.iter().map(|z| z.conj()).collect();
    let p2: Vec<C64> = b2.iter().map(|z| z.conj()).collect();
    let (qa1, qa2, ra) = thin_qr(a1, a2);
    let (qb1, qb2, rb) = thin_qr(&p1, &p2);
    let s = ra * rb.adjoint();
    let svd = s.svd(true, true);
    let us = svd.u.expect("requested");
    let vs = svd.v_t.expect("requested").adjoint();
    let (mut i1, mut i2) = (0, 1);
    if svd.singular_values[1] > svd.singular_values[0] {
        std::mem::swap(&mut i1, &mut i2);
    }
    let s1 = svd.singular_values[i1];
    let s2 = svd.singular_values[i2];
    let (ua, ub) = (us[(0, i1)], us[(1, i1)]);
    let (va, vb) = (vs[(0, i1)], vs[(1, i1)]);
    let w = qa1.iter().zip(&qa2).map(|(x, y)| (x * ua + y * ub) * s1).collect();
    let z = qb1.iter().zip(&qb2).map(|(x, y)| (x * va + y * vb).conj()).collect();
    RankOneColumn { w, z, s1, s2 }
}

/// Per-column rank-one approximations of `F_m`.
pub fn ammse_factors<T: Real>(
    gbar: &PhaseShifted<T>,
    c_freq: &[Complex<T>],
    gamma: f64,
) -> Result<Vec<RankOneColumn>> {
    check_inputs(gbar, c_freq, gamma)?;
    let p = gbar.params();
    Ok((0..p.m())
        .map(|col| {
            let cv = column_vectors(gbar, c_freq, col);
            let ut: Vec<C64> = cv.ut.iter().map(|z| z / gamma).collect();
            rank_one_approx(&cv.u, &ut, &cv.v, &cv.vt)
        })
        .collect())
}

/// Prepared approximated MMSE receiver.
pub fn ammse_receiver<T: Real>(
    gbar: &PhaseShifted<T>,
    c_freq: &[Complex<T>],
    gamma: f64,
) -> Result<StructuredReceiver<T>> {
    let p = gbar.params();
    let cols = ammse_factors(gbar, c_freq, gamma)?;
    let mut w = Vec::with_capacity(p.d());
    let mut z = Vec::with_capacity(p.d());
    for (m, c) in cols.iter().enumerate() {
        if let Some(k) = c.w.iter().chain(&c.z).position(|v| v.norm() == 0.0 || !v.norm().is_finite()) {
            return Err(GfdmError::InvalidInput(format!(
                "rank-one approximation vanishes at (k={}, m={m})",
                k % p.k()
            )));
        }
        w.extend(c.w.iter().map(|v| from_c64::<T>(*v)));
        z.extend(c.z.iter().map(|v| from_c64::<T>(*v)));
    }
    StructuredReceiver::from_factors(p, &w, &z)
}

/// Approximated MMSE receiver; equals the exact MMSE receiver whenever the
/// structured factorization exists.
pub fn rx_ammse<T: Real>(
    y: &[Complex<T>],
    gbar: &PhaseShifted<T>,
    c_freq: &[Complex<T>],
    gamma: f64,
) -> Result<RxReport<T>> {
    let rx = ammse_receiver(gbar, c_freq, gamma)?;
    Ok(RxReport {
        estimates: rx.apply(y)?,
        bias: Some(rx.bias(gbar.entries(), c_freq)?),
        error_variances: None,
        pseudo_inverse: false,
    })
}

/// Dense `C A` in double precision.
pub fn dense_channel_gfdm<T: Real>(g: &CharacteristicMatrix<T>, c_freq: &[Complex<T>]) -> Result<DMatrix<C64>> {
    let p = g.params();
    p.check_len(c_freq.len())?;
    let a = DenseGfdmMatrix::build(&g.to_time())?.to_nalgebra();
    let w = dft_matrix(p.d());
    let dc = DMatrix::from_diagonal(&DVector::from_iterator(p.d(), c_freq.iter().map(|z| to_c64(*z))));
    Ok(w.adjoint() * dc * w * a)
}

/// Dense MMSE oracle `B = A^H C^H [C A A^H C^H + γ^{-1} I]^{-1}`; valid for
/// singular `A` or `C`. Reports error variances and bias in units of `E_S`.
pub fn rx_mmse_dense<T: Real>(
    y: &[Complex<T>],
    g: &CharacteristicMatrix<T>,
    c_freq: &[Complex<T>],
    gamma: f64,
) -> Result<RxReport<T>> {
    let p = g.params();
    p.check_len(y.len())?;
    if !(gamma > 0.0) {
        return Err(GfdmError::InvalidInput(format!("SNR must be positive (got {gamma})")));
    }
    let ca = dense_channel_gfdm(g, c_freq)?;
    let d = p.d();
    let gram = &ca * ca.adjoint() + DMatrix::<C64>::identity(d, d) / C64::new(gamma, 0.0);
    let lu = gram.lu();
    let yv = DVector::from_iterator(d, y.iter().map(|z| to_c64(*z)));
    let t = lu.solve(&yv).ok_or(GfdmError::InvalidInput("MMSE system is singular".into()))?;
    let est = ca.adjoint() * t;
    let (var, bias) = mmse_dense_stats(&ca, gamma);
    Ok(RxReport {
        estimates: est.iter().map(|z| from_c64(*z)).collect(),
        error_variances: Some(var),
        bias: Some(bias.iter().map(|b| from_c64(*b)).collect()),
        pseudo_inverse: false,
    })
}

/// `diag(I + γ (CA)^H CA)^{-1}` and `diag(B C A)` from a dense `C A`.
fn mmse_dense_stats(ca: &DMatrix<C64>, gamma: f64) -> (Vec<f64>, Vec<C64>) {
    let d = ca.nrows();
    let m = DMatrix::<C64>::identity(d, d) + ca.adjoint() * ca * C64::new(gamma, 0.0);
    let inv = m.try_inverse().expect("positive definite");
    let var: Vec<f64> = (0..d).map(|i| inv[(i, i)].re).collect();
    let bias = var.iter().map(|v| C64::new(1.0 - v, 0.0)).collect();
    (var, bias)
}

/// Dense MMSE through `[C A + γ^{-1} (C A)^{-H}]^{-1}`; needs invertible `A` and `C`.
pub fn rx_mmse_dense_inverse_form<T: Real>(
    y: &[Complex<T>],
    g: &CharacteristicMatrix<T>,
    c_freq: &[Complex<T>],
    gamma: f64,
) -> Result<Vec<Complex<T>>> {
    let ca = dense_channel_gfdm(g, c_freq)?;
    let inv_h = ca
        .clone()
        .try_inverse()
        .ok_or(GfdmError::InvalidInput("C A is singular".into()))?
        .adjoint();
    let m = ca + inv_h / C64::new(gamma, 0.0);
    let yv = DVector::from_iterator(y.len(), y.iter().map(|z| to_c64(*z)));
    let est = m
        .lu()
        .solve(&yv)
        .ok_or(GfdmError::InvalidInput("MMSE system is singular".into()))?;
    Ok(est.iter().map(|z| from_c64(*z)).collect())
}

/// Dense ZF oracle `(C A)^{-1} y`.
pub fn rx_zf_dense<T: Real>(
    y: &[Complex<T>],
    g: &CharacteristicMatrix<T>,
    c_freq: &[Complex<T>],
) -> Result<Vec<Complex<T>>> {
    let ca = dense_channel_gfdm(g, c_freq)?;
    let yv = DVector::from_iterator(y.len(), y.iter().map(|z| to_c64(*z)));
    let est = ca
        .lu()
        .solve(&yv)
        .ok_or(GfdmError::InvalidInput("C A is singular".into()))?;
    Ok(est.iter().map(|z| from_c64(*z)).collect())
}
