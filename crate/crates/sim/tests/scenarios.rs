use std::process::Command;

use gfdm_sim::{run_scenario, Constellation, FilterConfig, Scenario, ScenarioConfig, SimError};
use proptest::prelude::*;

fn small(scenario: Scenario, m: usize, filter: FilterConfig) -> ScenarioConfig {
    let mut c = ScenarioConfig::new(scenario, 8, m, filter, vec![0.0, 10.0, 20.0]);
    c.blocks = 600;
    c.seed = 11;
    c
}

fn rc() -> FilterConfig {
    FilterConfig { rolloff: Some(0.5), ..FilterConfig::named("rc") }
}

fn csv_with_threads(cfg: &ScenarioConfig, threads: usize) -> Vec<u8> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    let table = pool.install(|| run_scenario(cfg)).unwrap();
    let mut out = Vec::new();
    table.write_csv(&mut out).unwrap();
    out
}

#[test]
fn output_is_identical_across_thread_counts() {
    for s in [Scenario::ZfDferf, Scenario::MmseRf, Scenario::ZfAwgn] {
        let mut cfg = small(s, 5, rc());
        cfg.blocks = 700;
        assert_eq!(csv_with_threads(&cfg, 1), csv_with_threads(&cfg, 4), "{s}");
    }
}

#[test]
fn seed_changes_results() {
    let a = small(Scenario::ZfAwgn, 4, FilterConfig::named("dirichlet"));
    let mut b = a.clone();
    b.seed += 1;
    assert_ne!(run_scenario(&a).unwrap().rows[0].mse, run_scenario(&b).unwrap().rows[0].mse);
}

#[test]
fn ammse_lies_between_mmse_and_zf() {
    let ser = |s| {
        let mut c = small(s, 5, rc());
        c.blocks = 3000;
        c.snr_db = vec![20.0];
        run_scenario(&c).unwrap().rows[0].ser
    };
    let (mmse, ammse, zf) = (ser(Scenario::MmseRf), ser(Scenario::AmmseRf), ser(Scenario::ZfDferf));
    assert!(mmse <= ammse * 1.05, "{mmse} {ammse}");
    assert!(ammse <= zf * 1.05, "{ammse} {zf}");
}

#[test]
fn bad_configs_are_rejected() {
    for text in [
        "scenario = \"zf-awgn\"\nk = 8\nm = 4\nfilter = \"rc\"\nsnr_db = [0]\n",
        "scenario = \"zf-awgn\"\nk = 8\nm = 4\nfilter = \"cmcm\"\nphases = \"nope\"\nsnr_db = [0]\n",
        "scenario = \"warp\"\nk = 8\nm = 4\nfilter = \"dirichlet\"\nsnr_db = [0]\n",
        "scenario = \"zf-awgn\"\nk = 8\nm = 4\nfilter = \"dirichlet\"\nsnr_db = [0]\nextra = 1\n",
        "scenario = \"zf-awgn\"\nk = 0\nm = 4\nfilter = \"dirichlet\"\nsnr_db = [0]\n",
    ] {
        let r = ScenarioConfig::from_toml(text).and_then(|c| run_scenario(&c));
        assert!(matches!(r, Err(SimError::Config(_))), "{text}");
    }
}

#[test]
fn config_round_trips_through_toml() {
    let mut c = small(Scenario::MmseRf, 4, FilterConfig { phases: Some("cmcm1_k8m4".into()), ..FilterConfig::named("cmcm") });
    c.constellation = Constellation::Qam4;
    assert_eq!(ScenarioConfig::from_toml(&c.to_toml()).unwrap(), c);
}

fn gfdm(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_gfdm")).args(args).output().unwrap()
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.toml");
    std::fs::write(&good, "scenario = \"zf-awgn\"\nk = 4\nm = 3\nfilter = \"dirichlet\"\nsnr_db = [10]\nblocks = 50\n").unwrap();
    let out = dir.path().join("out.csv");
    let r = gfdm(&["simulate", "--config", good.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0));
    assert!(std::fs::read_to_string(&out).unwrap().contains("snr_db,mse"));

    assert_eq!(gfdm(&["simulate", "--config", "/nonexistent.toml"]).status.code(), Some(2));

    let singular = dir.path().join("singular.toml");
    std::fs::write(&singular, "scenario = \"ammse-rf\"\nk = 8\nm = 4\nfilter = \"rc\"\nrolloff = 0.5\nsnr_db = [10]\nblocks = 50\n").unwrap();
    assert_eq!(gfdm(&["simulate", "--config", singular.to_str().unwrap()]).status.code(), Some(3));

    let r = gfdm(&["complexity", "--k", "64", "--m", "16"]);
    assert_eq!(r.status.code(), Some(0));
}

proptest! {
    #[test]
    fn qam_map_demap_round_trip(bits in proptest::collection::vec(any::<bool>(), 0..16).prop_map(|mut v| { v.truncate(v.len() / 4 * 4); v })) {
        for c in [Constellation::Qam4, Constellation::Qam16] {
            let syms = c.map(&bits).unwrap();
            prop_assert_eq!(c.demap(&syms), bits.clone());
            prop_assert!(syms.iter().all(|z| c.point(c.slice(*z)) == *z));
        }
    }
}
