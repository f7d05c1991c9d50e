mod common;

use common::*;
use gfdm_core::charmat::rel_err;
use gfdm_core::dense::{condition_number, inverse, rel_frob, C64};
use gfdm_core::filters::{make_filter, rc_time_taps, FilterKind, FilterSpec, RcShape};
use gfdm_core::{CharacteristicMatrix, DenseGfdmMatrix, GfdmParams, PrototypeFilter, Tolerance};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

fn dense(g: &CharacteristicMatrix<f64>) -> DMatrix<C64> {
    DenseGfdmMatrix::build(&g.to_time()).unwrap().to_nalgebra()
}

fn unitarity_residual(a: &DMatrix<C64>) -> f64 {
    let d = a.nrows();
    (a.adjoint() * a - DMatrix::<C64>::identity(d, d)).norm() / (d as f64).sqrt()
}

#[test]
fn structural_predicates_agree_with_dense_oracles() {
    let tol = Tolerance::default();
    let mut r = rng(30);
    let mut disagreements = 0;
    let mut cases = Vec::new();
    for i in 0..200 {
        let p = GfdmParams::new(KS[i % 4], MS[i % 5]).unwrap();
        cases.push(if i % 2 == 0 { random_char(&mut r, p) } else { random_unitary_char(&mut r, p) });
    }
    for i in 0..20 {
        let p = GfdmParams::new(KS[i % 4], 2 + i % 4).unwrap();
        let mut e = random_unitary_char(&mut r, p).entries().to_vec();
        let at = r.random_range(0..e.len());
        if i % 2 == 0 {
            e[at] = C64::new(0.0, 0.0);
        } else {
            e[at] *= 1.0 + 1e-3;
        }
        cases.push(CharacteristicMatrix::new(p, e).unwrap());
    }
    for g in &cases {
        let a = dense(g);
        if g.is_unitary(&tol) != (unitarity_residual(&a) < 1e-8) {
            disagreements += 1;
        }
        if g.is_invertible(&tol) != (condition_number(&a) < 1e12) {
            disagreements += 1;
        }
    }
    assert_eq!(disagreements, 0);
}

#[test]
fn inverse_char_realizes_inverse_hermitian() {
    let tol = Tolerance::default();
    let mut r = rng(31);
    let p = GfdmParams::new(4, 3).unwrap();
    for _ in 0..20 {
        let g = random_char(&mut r, p);
        let h = g.inverse_char(&tol).unwrap();
        let want = inverse(&dense(&g)).unwrap().adjoint();
        assert!(rel_frob(&dense(&h), &want) < 1e-10);
    }
}

#[test]
fn rows_of_inverse_share_receiver_energy() {
    let tol = Tolerance::default();
    let mut r = rng(32);
    for i in 0..100 {
        let p = GfdmParams::new(KS[i % 4], MS[i % 5]).unwrap();
        let g = random_char(&mut r, p);
        let xi_h = g.receiver_energy(&tol).unwrap();
        let inv = inverse(&dense(&g)).unwrap();
        for row in 0..p.d() {
            let n: f64 = inv.row(row).iter().map(|z| z.norm_sqr()).sum();
            assert!((n - xi_h).abs() < 1e-10 * xi_h);
        }
        let prod = g.energy() * xi_h;
        assert!(prod >= 1.0 - 1e-12);
    }
    let u = random_unitary_char(&mut r, GfdmParams::new(8, 5).unwrap()).scaled(C64::new(1.7, 0.0));
    assert!((u.energy() * u.receiver_energy(&tol).unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn even_symmetric_filters_are_singular_for_even_dimensions() {
    let mut r = rng(33);
    for (k, m) in [(2, 2), (4, 2), (8, 4), (6, 8)] {
        let p = GfdmParams::new(k, m).unwrap();
        for _ in 0..10 {
            let d = p.d();
            let mut g = vec![C64::new(0.0, 0.0); d];
            for n in 0..=d / 2 {
                let v = r.random_range(-1.0..1.0);
                g[n] = C64::new(v, 0.0);
                g[(d - n) % d] = C64::new(v, 0.0);
            }
            let gm = CharacteristicMatrix::from_time(&PrototypeFilter::new(p, g).unwrap());
            assert!(gm.get(k / 2, m / 2).norm() < 1e-12);
        }
    }
    let p = GfdmParams::new(8, 4).unwrap();
    let rc = CharacteristicMatrix::from_time(&rc_time_taps::<f64>(p, 0.7, RcShape::Rc).unwrap());
    assert!(rc.get(4, 2).norm() < 1e-12);
    assert!(!rc.is_invertible(&Tolerance::default()));
}

#[test]
fn cmcm_receiver_energy_is_phase_invariant() {
    let tol = Tolerance::default();
    let p = GfdmParams::new(8, 4).unwrap();
    let a = make_filter::<f64>(&FilterSpec::new(FilterKind::Dirichlet), p, None).unwrap();
    let b = make_filter::<f64>(&FilterSpec::new(FilterKind::ModifiedDirichlet), p, None).unwrap();
    let ea = a.receiver_energy(&tol).unwrap();
    let eb = b.receiver_energy(&tol).unwrap();
    assert!((ea - 1.0).abs() < 1e-12 && (eb - 1.0).abs() < 1e-12);
    let ma: Vec<f64> = a.to_freq().iter().map(|z| z.norm()).collect();
    let mb: Vec<f64> = b.to_freq().iter().map(|z| z.norm()).collect();
    for (x, y) in ma.iter().zip(&mb) {
        assert!((x - y).abs() < 1e-12);
    }
}

fn params_strategy() -> impl Strategy<Value = GfdmParams> {
    (1usize..=8, 1usize..=5).prop_map(|(k, m)| GfdmParams::new(k, m).unwrap())
}

fn char_strategy() -> impl Strategy<Value = CharacteristicMatrix<f64>> {
    params_strategy().prop_flat_map(|p| {
        prop::collection::vec((0.2f64..2.0, -3.14f64..3.14), p.d())
            .prop_map(move |v| CharacteristicMatrix::from_fn(p, |k, m| {
                let (a, b) = v[k + m * p.k()];
                C64::from_polar(a, b)
            })
            .unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn representations_round_trip(g in char_strategy()) {
        let p = g.params();
        let back = CharacteristicMatrix::from_time(&g.to_time());
        prop_assert!(rel_err(back.entries(), g.entries()) < 1e-10);
        let f = CharacteristicMatrix::from_freq(p, &g.to_freq()).unwrap();
        prop_assert!(rel_err(f.entries(), g.entries()) < 1e-10);
        prop_assert!(rel_err(g.phase_shift().unshift().entries(), g.entries()) < 1e-12);
    }

    #[test]
    fn energy_matches_filter_norm(g in char_strategy(), c in 0.1f64..3.0) {
        let e = g.energy();
        prop_assert!((g.to_time().energy() - e).abs() < 1e-10 * e);
        prop_assert!((g.scaled(C64::new(0.0, c)).energy() - c * c * e).abs() < 1e-10 * c * c * e);
    }

    #[test]
    fn form_products_match_dense(g in char_strategy()) {
        let a = dense(&g);
        prop_assert!(rel_frob(&form1_product(&g), &a) < 1e-10);
        prop_assert!(rel_frob(&form2_product(&g), &a) < 1e-10);
    }

    #[test]
    fn cauchy_schwarz_bound(g in char_strategy()) {
        let tol = Tolerance::default();
        let prod = g.energy() * g.receiver_energy(&tol).unwrap();
        prop_assert!(prod >= 1.0 - 1e-12);
        if !g.is_constant_magnitude(&tol) {
            prop_assert!(prod > 1.0 + 1e-10);
        }
    }

    #[test]
    fn pi_map_transposes(p in params_strategy()) {
        let map = gfdm_core::charmat::pi_permutation(p);
        let x: Vec<usize> = (0..p.d()).collect();
        let t = gfdm_core::charmat::apply_pi(&map, &x);
        for k in 0..p.k() {
            for m in 0..p.m() {
                prop_assert_eq!(t[m + k * p.m()], k + m * p.k());
            }
        }
        let swapped = gfdm_core::charmat::pi_permutation(GfdmParams::new(p.m(), p.k()).unwrap());
        prop_assert_eq!(gfdm_core::charmat::apply_pi(&swapped, &t), x);
    }
}
