use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gfdm_analysis::{complexity_table, papr, papr_ccdf, OobSetup, OobWaveform};
use gfdm_core::filters::{make_filter, write_filter_csv};
use gfdm_core::modem::tx_form1;
use gfdm_core::{GfdmFrame, GfdmParams, C64};
use gfdm_sim::{run_scenario, Constellation, FilterConfig, ScenarioConfig, SimError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Result<T> = std::result::Result<T, SimError>;

#[derive(Parser)]
#[command(name = "gfdm", version, about = "GFDM characteristic-matrix toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Monte-Carlo MSE/SER sweep from a TOML scenario file.
    Simulate(SimulateArgs),
    /// Power spectral density of one waveform.
    Psd(PsdArgs),
    /// Out-of-band leakage table.
    Oob(OobArgs),
    /// PAPR complementary CDF.
    Papr(PaprArgs),
    /// Complex-multiplication counts per implementation.
    Complexity(ComplexityArgs),
    /// Prototype-filter utilities.
    Filter {
        #[command(subcommand)]
        cmd: FilterCmd,
    },
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    blocks: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated SNR grid in dB.
    #[arg(long, value_delimiter = ',')]
    snr: Option<Vec<f64>>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the per-(k,m) MSE here.
    #[arg(long)]
    per_symbol: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Args, Clone)]
struct FilterArgs {
    #[arg(long, default_value_t = 8)]
    k: usize,
    #[arg(long, default_value_t = 4)]
    m: usize,
    /// rc, rrc, dirichlet, modified-dirichlet, cmcm, rectangular.
    #[arg(long, default_value = "dirichlet")]
    filter: String,
    #[arg(long)]
    rolloff: Option<f64>,
    #[arg(long)]
    phases: Option<String>,
}

impl FilterArgs {
    fn config(&self) -> FilterConfig {
        FilterConfig { rolloff: self.rolloff, phases: self.phases.clone(), ..FilterConfig::named(&self.filter) }
    }
}

#[derive(Args)]
struct OobFlags {
    #[arg(long, default_value_t = 128)]
    k: usize,
    #[arg(long, default_value_t = 15)]
    m: usize,
    #[arg(long, default_value_t = 16)]
    cp: usize,
    /// First and last switched-off subcarrier.
    #[arg(long, num_args = 2, default_values_t = [50, 78])]
    gap: Vec<usize>,
    /// Transmit on subsymbol 0 as well.
    #[arg(long)]
    no_guard_subsymbol: bool,
    /// Roll-off of the interpolation filter.
    #[arg(long, default_value_t = 0.1)]
    interp_rolloff: f64,
    /// Roll-off of the GFDM RC prototype.
    #[arg(long, default_value_t = 0.5)]
    rolloff: f64,
    #[arg(long, default_value_t = 1.92e6)]
    sample_rate: f64,
    #[arg(long, default_value_t = 120)]
    points_per_subcarrier: usize,
}

impl OobFlags {
    fn setup(&self) -> Result<OobSetup> {
        if self.gap[0] > self.gap[1] || self.gap[1] >= self.k {
            return Err(SimError::Config(format!("gap {:?} invalid for K={}", self.gap, self.k)));
        }
        if !(0.0..=1.0).contains(&self.rolloff) || !(0.0..=1.0).contains(&self.interp_rolloff) {
            return Err(SimError::Config("roll-off outside [0, 1]".into()));
        }
        Ok(OobSetup {
            k: self.k,
            m: self.m,
            cp_len: self.cp,
            gap: (self.gap[0], self.gap[1]),
            guard_subsymbol: !self.no_guard_subsymbol,
            interp_rolloff: self.interp_rolloff,
            sample_rate: self.sample_rate,
            points_per_subcarrier: self.points_per_subcarrier,
        })
    }

    fn waveforms(&self) -> [OobWaveform; 4] {
        [
            OobWaveform::Ofdm,
            OobWaveform::Dirichlet,
            OobWaveform::ModifiedDirichlet,
            OobWaveform::RaisedCosine { rolloff: self.rolloff },
        ]
    }
}

#[derive(Args)]
struct PsdArgs {
    /// ofdm, dirichlet, modified-dirichlet or rc.
    #[arg(long, default_value = "rc")]
    waveform: String,
    #[command(flatten)]
    flags: OobFlags,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OobArgs {
    /// Guard-carrier counts.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 6.0])]
    ngc: Vec<f64>,
    #[command(flatten)]
    flags: OobFlags,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PaprArgs {
    #[command(flatten)]
    filter: FilterArgs,
    #[arg(long, default_value_t = 10000)]
    blocks: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "16qam")]
    constellation: Constellation,
    /// Threshold grid: start,stop,step in dB.
    #[arg(long, num_args = 3, default_values_t = [0.0, 14.0, 0.25])]
    thresholds: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ComplexityArgs {
    #[arg(long, default_value_t = 64)]
    k: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [4, 8, 16, 32, 64])]
    m: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    lt: usize,
    #[arg(long, default_value_t = 16)]
    lr: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum FilterCmd {
    /// Time-domain prototype taps as CSV.
    Export {
        #[command(flatten)]
        filter: FilterArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn params(k: usize, m: usize) -> Result<GfdmParams> {
    GfdmParams::new(k, m).map_err(|e| SimError::Config(e.to_string()))
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let mut cfg = ScenarioConfig::load(&a.config)?;
    if let Some(b) = a.blocks {
        cfg.blocks = b;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(snr) = a.snr {
        cfg.snr_db = snr;
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(a.threads).build()?;
    let table = pool.install(|| run_scenario(&cfg))?;
    table.write_csv(output(&a.out)?)?;
    if let Some(p) = &a.per_symbol {
        table.write_per_symbol_csv(BufWriter::new(File::create(p)?))?;
    }
    Ok(())
}

fn waveform(name: &str, rolloff: f64) -> Result<OobWaveform> {
    Ok(match name {
        "ofdm" => OobWaveform::Ofdm,
        "dirichlet" => OobWaveform::Dirichlet,
        "modified-dirichlet" => OobWaveform::ModifiedDirichlet,
        "rc" => OobWaveform::RaisedCosine { rolloff },
        other => return Err(SimError::Config(format!("unknown waveform `{other}`"))),
    })
}

fn psd(a: PsdArgs) -> Result<()> {
    let setup = a.flags.setup()?;
    let w = waveform(&a.waveform, a.flags.rolloff)?;
    let s = setup.spectrum(w)?;
    let comments = vec![
        format!("gfdm {}", env!("CARGO_PKG_VERSION")),
        format!("waveform = {}", w.label()),
        format!("K = {}, M = {}, L = {}", setup.k, setup.m, setup.cp_len),
        "psd normalized to in-band mean 1".into(),
    ];
    s.write_csv(output(&a.out)?, &comments)?;
    Ok(())
}

fn oob(a: OobArgs) -> Result<()> {
    let setup = a.flags.setup()?;
    let mut out = output(&a.out)?;
    writeln!(out, "# gfdm {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(
        out,
        "# K = {}, M = {}, L = {}, gap = {:?}, interp roll-off = {}",
        setup.k, setup.m, setup.cp_len, setup.gap, setup.interp_rolloff
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["waveform", "n_gc", "oob_db"])?;
    for wf in a.flags.waveforms() {
        let spectrum = setup.spectrum(wf)?;
        for &n in &a.ngc {
            let bands = setup.bands(n).map_err(|e| SimError::Config(e.to_string()))?;
            let db = gfdm_analysis::oob_leakage(&spectrum, &bands)?;
            w.write_record([wf.label(), format!("{n}"), format!("{db:.1}")])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn papr_cmd(a: PaprArgs) -> Result<()> {
    let p = params(a.filter.k, a.filter.m)?;
    let spec = a.filter.config().spec(p)?;
    let g = make_filter::<f64>(&spec, p, None)?;
    let [start, stop, step] = a.thresholds[..] else { unreachable!() };
    if !(step > 0.0 && stop >= start) || a.blocks == 0 {
        return Err(SimError::Config("invalid threshold grid or block count".into()));
    }
    let cons = a.constellation;
    let values: Vec<f64> = (0..a.blocks)
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            rng.set_stream(b as u64);
            let data: Vec<C64> = (0..p.d()).map(|_| cons.point(rng.random_range(0..cons.size()))).collect();
            let x = tx_form1(&GfdmFrame::full(p, data, 0)?, &g)?;
            Ok(papr(&x))
        })
        .collect::<Result<_>>()?;
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    let thresholds: Vec<f64> = (0..n).map(|i| start + i as f64 * step).collect();
    let ccdf = papr_ccdf(&values, &thresholds);
    let mut out = output(&a.out)?;
    writeln!(out, "# gfdm {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(out, "# filter = {}, K = {}, M = {}, blocks = {}, seed = {}", a.filter.config().label(), p.k(), p.m(), a.blocks, a.seed)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["papr_db", "ccdf"])?;
    for (t, c) in thresholds.iter().zip(ccdf) {
        w.write_record([format!("{t:.2}"), format!("{c:.6e}")])?;
    }
    w.flush()?;
    Ok(())
}

fn complexity(a: ComplexityArgs) -> Result<()> {
    let mut out = output(&a.out)?;
    writeln!(out, "# gfdm {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(out, "# complex multiplications per block, L_T = {}, L_R = {}", a.lt, a.lr)?;
    complexity_table(&mut out, a.k, &a.m, a.lt, a.lr).map_err(|e| SimError::Config(e.to_string()))?;
    out.flush()?;
    Ok(())
}

fn filter_export(f: FilterArgs, out: &Option<PathBuf>) -> Result<()> {
    let p = params(f.k, f.m)?;
    let cfg = f.config();
    let g = make_filter::<f64>(&cfg.spec(p)?, p, None)?;
    let mut w = output(out)?;
    write_filter_csv(&mut w, &g.to_time(), &cfg.label())?;
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Simulate(a) => simulate(a),
        Cmd::Psd(a) => psd(a),
        Cmd::Oob(a) => oob(a),
        Cmd::Papr(a) => papr_cmd(a),
        Cmd::Complexity(a) => complexity(a),
        Cmd::Filter { cmd: FilterCmd::Export { filter, out } } => filter_export(filter, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

