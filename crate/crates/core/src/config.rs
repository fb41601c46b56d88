//! Full simulation configuration: structured-text (TOML) loading, paper
//! defaults for every omitted field, cross-section validation that reports
//! every violated invariant, and a provenance-annotated echo.

use serde::{Deserialize, Serialize};

use crate::decision::{default_routes, DecisionConfig, HndlConfig, RouteSpec};
use crate::engine::{RunConfig, SimContext};
use crate::error::{Error, Result};
use crate::latency_db::{builtin_profiles, AlgorithmProfile};
use crate::network::NetworkModel;
use crate::traffic::{
    default_scenarios, validate_scenarios, ScenarioSpec, TimeOfDayProfile, TrafficConfig,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub run: RunConfig,
    pub network: NetworkModel,
    pub scenarios: Vec<ScenarioSpec>,
    pub mixture: TimeOfDayProfile,
    pub traffic: TrafficConfig,
    pub algorithms: Vec<AlgorithmProfile>,
    pub decision: DecisionConfig,
    pub hndl: HndlConfig,
    pub routes: Vec<RouteSpec>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            run: RunConfig::default(),
            network: NetworkModel::default(),
            scenarios: default_scenarios(),
            mixture: TimeOfDayProfile::default(),
            traffic: TrafficConfig::default(),
            algorithms: builtin_profiles(),
            decision: DecisionConfig::default(),
            hndl: HndlConfig::default(),
            routes: default_routes(),
        }
    }
}

impl SimConfig {
    pub fn default_config() -> Self {
        Self::default()
    }

    /// Parse a TOML document; every omitted field takes its default.
    /// An empty document yields the full default configuration.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SimConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serialises")
    }

    /// Validate every section, collecting all violations into one error.
    pub fn validate(&self) -> Result<()> {
        let mut violations: Vec<String> = Vec::new();
        let mut collect = |r: Result<()>| match r {
            Err(Error::Config(v)) => violations.extend(v),
            Err(other) => violations.push(other.to_string()),
            Ok(()) => {}
        };
        collect(self.run.validate());
        collect(self.network.validate());
        collect(validate_scenarios(&self.scenarios));
        collect(self.mixture.validate());
        for p in &self.algorithms {
            collect(p.validate());
        }
        if self.algorithms.is_empty() {
            violations.push("no algorithms configured".into());
        }
        for p in &self.algorithms {
            if let Some(link) = &p.classical_link {
                if !self.algorithms.iter().any(|q| &q.name == link) {
                    violations.push(format!(
                        "{}: classical_link '{link}' not in the configured algorithm set",
                        p.name
                    ));
                }
            }
        }
        if !(self.traffic.payid_rate >= 0.0 && self.traffic.payid_rate <= 1.0) {
            violations.push("traffic.payid_rate must be in [0,1]".into());
        }
        if !(self.traffic.tls_reconnect_rate >= 0.0 && self.traffic.tls_reconnect_rate <= 1.0) {
            violations.push("traffic.tls_reconnect_rate must be in [0,1]".into());
        }
        for r in &self.routes {
            if !(r.sla_ms > 0.0) {
                violations.push(format!("route {}: sla_ms must be > 0", r.name));
            }
            if !(r.network_ms >= 0.0 && r.processing_ms >= 0.0) {
                violations.push(format!("route {}: overheads must be >= 0", r.name));
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::config(violations))
        }
    }

    /// Borrowed view for the engine.
    pub fn context(&self) -> SimContext<'_> {
        SimContext {
            run: &self.run,
            profiles: &self.algorithms,
            network: &self.network,
            scenarios: &self.scenarios,
            tod: &self.mixture,
            traffic: &self.traffic,
        }
    }

    /// Restrict the algorithm set, preserving classical links (the baseline
    /// is always retained so deltas stay defined).
    pub fn filter_algorithms(&mut self, names: &[String]) -> Result<()> {
        for name in names {
            if !self.algorithms.iter().any(|p| &p.name == name) {
                return Err(Error::UnknownAlgorithm(name.clone()));
            }
        }
        let mut keep: Vec<String> = names.to_vec();
        if let Some(baseline) = self
            .algorithms
            .iter()
            .find(|p| p.delta_p99_ref_ms == Some(0.0))
        {
            if !keep.contains(&baseline.name) {
                keep.insert(0, baseline.name.clone());
            }
        }
        for name in names {
            if let Some(p) = self.algorithms.iter().find(|p| &p.name == name) {
                if let Some(link) = &p.classical_link {
                    if !keep.contains(link) {
                        keep.push(link.clone());
                    }
                }
            }
        }
        self.algorithms.retain(|p| keep.contains(&p.name));
        Ok(())
    }

    /// Effective-configuration echo with a provenance note per defaulted
    /// value (published volumes, market shares, measured latencies, format
    /// limits), so a run is reproducible from its artifacts alone.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        line("# effective configuration".into());
        line(format!(
            "master_seed = {}  # fixed stream seed",
            self.run.master_seed
        ));
        line(format!(
            "n_days = {}  # seasonally mixed simulation days",
            self.run.n_days
        ));
        line(format!(
            "n_sample = {}  # transactions per day",
            self.run.n_sample
        ));
        line(format!(
            "c_servers = {}  # HSM signing cores per institution (dual-channel appliance)",
            self.run.c_servers
        ));
        line(format!(
            "sla_ms = {{ npp = {}, rits = {}, swift = {} }}  # route SLAs; RITS/SWIFT are operating assumptions",
            self.run.sla_npp_ms, self.run.sla_rits_ms, self.run.sla_swift_ms
        ));
        line(format!(
            "npp_big4_tps = {}  # Big-4 average daily NPP load (RBA C6 volumes, APRA shares)",
            self.run.npp_big4_tps
        ));
        line(format!(
            "hsm_overhead_per_hop_ms = {}  # deployment tier: 0 software, 0.5 PCIe, 2.0 network",
            self.run.hsm_overhead_per_hop_ms
        ));
        line("".into());
        line("# scenarios (RBA C.4/C6 calibrated volumes and seasonal weights)".into());
        for s in &self.scenarios {
            line(format!(
                "scenario {} weight={} npp/day={} rtgs/day={} network_scale={}",
                s.name, s.weight, s.npp_per_day, s.rtgs_per_day, s.network_scale
            ));
        }
        line("".into());
        line("# institutions (APRA ADI market shares; residual split across regionals)".into());
        for i in &self.network.institutions {
            line(format!(
                "institution {} share={} city={:?}",
                i.name, i.share, i.city
            ));
        }
        line("".into());
        line("# hop tiers (calibrated interbank estimates) and city legs".into());
        for h in &self.network.hops {
            line(format!(
                "hop {:?} mean_ms={} cv={}",
                h.label, h.mean_ms, h.cv
            ));
        }
        for c in &self.network.cities {
            line(format!("city {:?} one_way_ms={}", c.city, c.one_way_ms));
        }
        line(format!(
            "hub_processing_mean_ms = {}  # hub residual; tier mean subsumes city transit",
            self.network.hub_processing_mean_ms
        ));
        line(format!(
            "jitter alpha={} sigma_ar={} sigma_eps={}  # AR(1) network jitter",
            self.network.jitter_alpha, self.network.jitter_sigma_ar, self.network.jitter_sigma_eps
        ));
        line("".into());
        line("# algorithms (service means from the published utilisation table;".into());
        line("# signing means calibrated to the published NPP delta-p99 column;".into());
        line("# key/signature sizes from the NIST parameter sets)".into());
        for a in &self.algorithms {
            line(format!(
                "algorithm {} mode={:?} sign_mean_us={:.2} service_mean_us={:.2} pk={} sig={} delta_ref={:?}",
                a.name, a.mode, a.sign_mean_us, a.service_mean_us, a.pk_bytes, a.sig_bytes,
                a.delta_p99_ref_ms
            ));
        }
        out
    }
}
