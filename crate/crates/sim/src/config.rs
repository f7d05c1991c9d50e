//! Scenario configuration, read from a flat TOML file.
//!
//! ```toml
//! scenario = "zf-awgn"
//! k = 8
//! m = 4
//! filter = "cmcm"
//! phases = "cmcm1_k8m4"
//! snr_db = [0, 5, 10, 15, 20]
//! blocks = 10000
//! seed = 7
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use gfdm_core::channel::PowerDelayProfile;
use gfdm_core::filters::{phase_set, FilterKind, FilterSpec, PhaseMatrix};
use gfdm_core::GfdmParams;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::qam::Constellation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// ZF receiver, Rayleigh fading with deep fades excluded.
    ZfDferf,
    /// Exact MMSE receiver, Rayleigh fading.
    MmseRf,
    /// Approximated MMSE receiver, Rayleigh fading.
    AmmseRf,
    ZfAwgn,
    MmseAwgn,
    /// ZF receiver over the fixed four-tap multipath channel.
    ZfMp,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::ZfDferf,
        Scenario::MmseRf,
        Scenario::AmmseRf,
        Scenario::ZfAwgn,
        Scenario::MmseAwgn,
        Scenario::ZfMp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::ZfDferf => "zf-dferf",
            Scenario::MmseRf => "mmse-rf",
            Scenario::AmmseRf => "ammse-rf",
            Scenario::ZfAwgn => "zf-awgn",
            Scenario::MmseAwgn => "mmse-awgn",
            Scenario::ZfMp => "zf-mp",
        }
    }

    pub fn is_zf(self) -> bool {
        matches!(self, Scenario::ZfDferf | Scenario::ZfAwgn | Scenario::ZfMp)
    }

    pub fn is_rayleigh(self) -> bool {
        matches!(self, Scenario::ZfDferf | Scenario::MmseRf | Scenario::AmmseRf)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = SimError;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase().replace('_', "-");
        Scenario::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| SimError::Config(format!("unknown scenario `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelProfile {
    /// `0.64^n` for `n < D/4`.
    Exponential,
    /// Seven-tap pedestrian profile over 42 samples.
    Epa,
}

impl ChannelProfile {
    pub fn build(self, d: usize) -> Result<PowerDelayProfile> {
        Ok(match self {
            ChannelProfile::Exponential => PowerDelayProfile::exponential(d)?,
            ChannelProfile::Epa => PowerDelayProfile::extended_pedestrian_a(),
        })
    }
}

/// Filter selection shared by the config file and the command line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    /// rc, rrc, dirichlet, modified-dirichlet, cmcm, rectangular, static-optimal.
    pub filter: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rolloff: Option<f64>,
    /// Named phase set; all-zero phases when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phases: Option<String>,
    #[serde(default = "one")]
    pub energy: f64,
}

fn one() -> f64 {
    1.0
}

impl FilterConfig {
    pub fn named(filter: &str) -> Self {
        FilterConfig { filter: filter.into(), rolloff: None, phases: None, energy: 1.0 }
    }

    pub fn spec(&self, params: GfdmParams) -> Result<FilterSpec> {
        let phases = || -> Result<PhaseMatrix> {
            match &self.phases {
                None => Ok(PhaseMatrix::zeros(params)),
                Some(name) => Ok(phase_set(name).map_err(|_| SimError::Config(format!("unknown phase set `{name}`")))?),
            }
        };
        let rolloff = || -> Result<f64> {
            let a = self
                .rolloff
                .ok_or_else(|| SimError::Config(format!("filter `{}` needs a rolloff", self.filter)))?;
            if !(0.0..=1.0).contains(&a) {
                return Err(SimError::Config(format!("rolloff {a} outside [0, 1]")));
            }
            Ok(a)
        };
        let uses_rolloff = matches!(self.filter.as_str(), "rc" | "rrc");
        if !uses_rolloff && self.rolloff.is_some() {
            return Err(SimError::Config(format!("filter `{}` takes no rolloff", self.filter)));
        }
        let uses_phases = matches!(self.filter.as_str(), "cmcm" | "static-optimal");
        if !uses_phases && self.phases.is_some() {
            return Err(SimError::Config(format!("filter `{}` takes no phases", self.filter)));
        }
        let kind = match self.filter.as_str() {
            "rc" => FilterKind::RaisedCosine { rolloff: rolloff()? },
            "rrc" => FilterKind::RootRaisedCosine { rolloff: rolloff()? },
            "dirichlet" => FilterKind::Dirichlet,
            "modified-dirichlet" => FilterKind::ModifiedDirichlet,
            "cmcm" => FilterKind::Cmcm { phases: phases()? },
            "rectangular" => FilterKind::Rectangular,
            "static-optimal" => FilterKind::StaticOptimal { phases: phases()? },
            other => return Err(SimError::Config(format!("unknown filter `{other}`"))),
        };
        if let FilterKind::Cmcm { phases } | FilterKind::StaticOptimal { phases } = &kind {
            if phases.rows() != params.k() || phases.cols() != params.m() {
                return Err(SimError::Config(format!(
                    "phase set is {}x{}, expected {}x{}",
                    phases.rows(),
                    phases.cols(),
                    params.k(),
                    params.m()
                )));
            }
        }
        if !(self.energy > 0.0 && self.energy.is_finite()) {
            return Err(SimError::Config(format!("filter energy must be positive (got {})", self.energy)));
        }
        Ok(FilterSpec::new(kind).with_energy(self.energy))
    }

    pub fn label(&self) -> String {
        let mut s = self.filter.clone();
        if let Some(a) = self.rolloff {
            s += &format!("({a})");
        }
        if let Some(p) = &self.phases {
            s += &format!("[{p}]");
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub k: usize,
    pub m: usize,
    pub filter: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rolloff: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phases: Option<String>,
    #[serde(default = "one")]
    pub energy: f64,
    #[serde(default = "default_constellation")]
    pub constellation: Constellation,
    pub snr_db: Vec<f64>,
    #[serde(default = "default_blocks")]
    pub blocks: usize,
    /// Defaults to `D/4`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cp_len: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_pdp")]
    pub pdp: ChannelProfile,
    #[serde(default = "default_threshold")]
    pub threshold_db: f64,
    /// Active subcarriers (ZF scenarios only); all when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subcarriers: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subsymbols: Option<Vec<usize>>,
}

fn default_constellation() -> Constellation {
    Constellation::Qam16
}
fn default_blocks() -> usize {
    10_000
}
fn default_pdp() -> ChannelProfile {
    ChannelProfile::Exponential
}
fn default_threshold() -> f64 {
    -30.0
}

impl ScenarioConfig {
    /// Defaults for everything but the scenario, size, filter and SNR grid.
    pub fn new(scenario: Scenario, k: usize, m: usize, filter: FilterConfig, snr_db: Vec<f64>) -> Self {
        ScenarioConfig {
            scenario,
            k,
            m,
            filter: filter.filter,
            rolloff: filter.rolloff,
            phases: filter.phases,
            energy: filter.energy,
            constellation: default_constellation(),
            snr_db,
            blocks: default_blocks(),
            cp_len: None,
            seed: 0,
            pdp: default_pdp(),
            threshold_db: default_threshold(),
            subcarriers: None,
            subsymbols: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| SimError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SimError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn filter_config(&self) -> FilterConfig {
        FilterConfig {
            filter: self.filter.clone(),
            rolloff: self.rolloff,
            phases: self.phases.clone(),
            energy: self.energy,
        }
    }

    pub fn params(&self) -> Result<GfdmParams> {
        GfdmParams::new(self.k, self.m).map_err(|e| SimError::Config(e.to_string()))
    }

    pub fn cp_len(&self) -> usize {
        self.cp_len.unwrap_or(self.k * self.m / 4)
    }

    pub fn subcarriers(&self) -> Vec<usize> {
        self.subcarriers.clone().unwrap_or_else(|| (0..self.k).collect())
    }

    pub fn subsymbols(&self) -> Vec<usize> {
        self.subsymbols.clone().unwrap_or_else(|| (0..self.m).collect())
    }

    pub fn is_full_allocation(&self) -> bool {
        self.subcarriers().len() == self.k && self.subsymbols().len() == self.m
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.params()?;
        let d = p.d();
        self.filter_config().spec(p)?;
        if self.snr_db.is_empty() || self.snr_db.iter().any(|s| !s.is_finite()) {
            return Err(SimError::Config("snr_db must be a nonempty list of finite values".into()));
        }
        if self.blocks == 0 {
            return Err(SimError::Config("blocks must be positive".into()));
        }
        if self.cp_len() > d {
            return Err(SimError::Config(format!("cp_len {} exceeds D = {d}", self.cp_len())));
        }
        if self.scenario.is_rayleigh() {
            let pdp = self.pdp.build(d)?;
            if pdp.len() > self.cp_len() + 1 {
                return Err(SimError::Config(format!(
                    "channel spans {} taps but the CP holds only {}",
                    pdp.len(),
                    self.cp_len()
                )));
            }
        }
        if self.scenario == Scenario::ZfMp && self.cp_len() < 3 {
            return Err(SimError::Config("the four-tap channel needs cp_len >= 3".into()));
        }
        if self.scenario == Scenario::ZfDferf && self.threshold_db.is_nan() {
            return Err(SimError::Config("deep-fade threshold is required".into()));
        }
        if self.filter == "static-optimal" && self.scenario != Scenario::ZfMp {
            return Err(SimError::Config("static-optimal filters need the fixed channel of zf-mp".into()));
        }
        for (name, set, n) in [("subcarriers", &self.subcarriers, self.k), ("subsymbols", &self.subsymbols, self.m)] {
            if let Some(v) = set {
                let mut s = v.clone();
                s.sort_unstable();
                s.dedup();
                if s.is_empty() || s.len() != v.len() || s.iter().any(|&x| x >= n) {
                    return Err(SimError::Config(format!("{name} must be distinct indices below {n}")));
                }
            }
        }
        if !self.scenario.is_zf() && !self.is_full_allocation() {
            return Err(SimError::Config("MMSE scenarios require full allocation".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
scenario = "zf-dferf"
k = 8
m = 5
filter = "rc"
rolloff = 0.5
snr_db = [0, 10, 20]
seed = 3
"#;

    #[test]
    fn parses_with_defaults() {
        let c = ScenarioConfig::from_toml(SAMPLE).unwrap();
        assert_eq!(c.scenario, Scenario::ZfDferf);
        assert_eq!(c.blocks, 10_000);
        assert_eq!(c.cp_len(), 10);
        assert_eq!(c.constellation, Constellation::Qam16);
        assert_eq!(c.threshold_db, -30.0);
        let again = ScenarioConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn rejects_inconsistent_configs() {
        let bad = [
            SAMPLE.replace("rolloff = 0.5\n", ""),
            SAMPLE.replace("\"rc\"", "\"cmcm\""),
            SAMPLE.replace("zf-dferf", "mmse-awgn") + "subcarriers = [0, 1]\n",
            SAMPLE.replace("seed = 3", "bogus = 1"),
            SAMPLE.replace("snr_db = [0, 10, 20]", "snr_db = []"),
            SAMPLE.replace("\"rc\"", "\"static-optimal\"").replace("rolloff = 0.5\n", ""),
            SAMPLE.replace("\"rc\"", "\"cmcm\"").replace("rolloff = 0.5", "phases = \"cmcm1_k8m4\""),
        ];
        for b in bad {
            assert!(matches!(ScenarioConfig::from_toml(&b), Err(SimError::Config(_))), "{b}");
        }
    }
}
