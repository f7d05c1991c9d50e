mod common;

use common::*;
use gfdm_core::channel::*;
use gfdm_core::dense::{circulant, vec_to_na, C64};
use gfdm_core::filters::{make_filter, FilterKind, FilterSpec};
use gfdm_core::modem::{add_cp, remove_cp, rx_zf_form2, tx_form2, GfdmFrame};
use gfdm_core::{GfdmParams, Tolerance};

#[test]
fn frequency_domain_channel_is_circular_convolution() {
    let mut r = rng(50);
    for _ in 0..20 {
        let ch = random_channel(&mut r, 24, 4);
        let x = random_vec(&mut r, 24);
        let y = apply_channel_noiseless(&x, &ch).unwrap();
        let want = circulant(ch.taps(), 24) * vec_to_na(&x);
        assert!(gfdm_core::charmat::rel_err(&y, &to_vec(&want)) < 1e-10);
    }
}

#[test]
fn cp_turns_linear_into_circular_convolution() {
    let mut r = rng(51);
    let p = GfdmParams::new(8, 4).unwrap();
    let g = make_filter::<f64>(&FilterSpec::new(FilterKind::Dirichlet), p, None).unwrap();
    let ch = random_channel(&mut r, 32, 6);
    let d = random_vec(&mut r, 32);
    let x = tx_form2(&GfdmFrame::full(p, d.clone(), 8).unwrap(), &g.phase_shift()).unwrap();
    let y = propagate_with_cp(&x, &ch, 8, 0.0, &mut r).unwrap();
    assert!(gfdm_core::charmat::rel_err(&y, &apply_channel_noiseless(&x, &ch).unwrap()) < 1e-12);
    let est = rx_zf_form2(&y, &g, ch.freq_response(), &Tolerance::default()).unwrap().estimates;
    assert!(gfdm_core::charmat::rel_err(&est, &d) < 1e-8);
    assert_eq!(remove_cp(&add_cp(&x, 8).unwrap(), 8).unwrap(), x);
}

#[test]
fn normalized_rayleigh_has_unit_bin_power() {
    let mut r = rng(52);
    let pdp = PowerDelayProfile::exponential(32).unwrap();
    let n = 100_000;
    let mut acc = vec![0.0; 32];
    for _ in 0..n {
        let ch = sample_rayleigh::<f64, _>(&pdp, 32, &mut r).unwrap();
        for (a, c) in acc.iter_mut().zip(ch.freq_response()) {
            *a += c.norm_sqr();
        }
    }
    for a in acc {
        assert!((a / n as f64 - 1.0).abs() < 0.02);
    }
}

#[test]
fn deep_fade_exclusion_gives_flat_inverse_power() {
    let mut r = rng(53);
    let pdp = PowerDelayProfile::exponential(32).unwrap();
    let thr = 10f64.powf(-30.0 / 20.0);
    let n = 100_000;
    let mut acc = vec![0.0; 32];
    for _ in 0..n {
        let (ch, _) = sample_dfe_rayleigh::<f64, _>(&pdp, 32, -30.0, &mut r).unwrap();
        assert!(ch.min_abs_response() >= thr);
        for (a, c) in acc.iter_mut().zip(ch.freq_response()) {
            *a += 1.0 / c.norm_sqr();
        }
    }
    let mean = acc.iter().sum::<f64>() / 32.0;
    for a in acc {
        assert!((a - mean).abs() < 0.05 * mean, "{} vs {}", a / n as f64, mean / n as f64);
    }
}

#[test]
fn reference_channel_has_no_nulls_and_serializes() {
    let ch = reference_static_channel::<f64>(32).unwrap();
    assert_eq!(ch.taps()[0], C64::new(-0.1518, 0.6475));
    assert_eq!(ch.taps()[2], C64::new(0.5703, 0.0767));
    assert!(ch.min_abs_response() > 0.0);
    let mut buf = Vec::new();
    ch.write_csv(&mut buf).unwrap();
    let back = ChannelRealization::<f64>::read_csv(buf.as_slice(), 32).unwrap();
    assert_eq!(back.taps(), ch.taps());
}

#[test]
fn seeded_sampling_is_reproducible() {
    let pdp = PowerDelayProfile::extended_pedestrian_a();
    let a = sample_rayleigh::<f64, _>(&pdp, 64, &mut rng(9)).unwrap();
    let b = sample_rayleigh::<f64, _>(&pdp, 64, &mut rng(9)).unwrap();
    assert_eq!(a.taps(), b.taps());
}
