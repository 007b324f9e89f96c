//! JSON run configuration. Every field is optional; defaults reproduce the
//! reference sweep (delta/kappa = 0.1, alpha = 2, beta = 1/2, 400 samples).

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ctdrive::cdrive::DriveProtocol;
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Fig1,
    Fig2a,
    Fig2b,
    Fuzz,
    NvPulse,
    Custom,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fig1 => "fig1",
            Scenario::Fig2a => "fig2a",
            Scenario::Fig2b => "fig2b",
            Scenario::Fuzz => "relations-fuzz",
            Scenario::NvPulse => "nv-pulse",
            Scenario::Custom => "custom",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        match name {
            "fig1" => Some(Scenario::Fig1),
            "fig2a" => Some(Scenario::Fig2a),
            "fig2b" => Some(Scenario::Fig2b),
            "relations-fuzz" | "fuzz" => Some(Scenario::Fuzz),
            "nv-pulse" => Some(Scenario::NvPulse),
            "custom" => Some(Scenario::Custom),
            _ => None,
        }
    }
}

/// Raw JSON document; unknown fields are rejected so typos fail loudly.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Option<String>,
    pub delta_over_kappa: Option<f64>,
    pub kappa: Option<f64>,
    pub tau: Option<f64>,
    pub alpha: Option<f64>,
    pub beta_scaled: Option<f64>,
    pub omega0_over_kappa: Option<f64>,
    pub samples: Option<usize>,
    pub rk4_steps: Option<usize>,
    pub seed: Option<u64>,
    pub propagate: Option<bool>,
    /// "collective", "individual:+1" / "individual:0" / "individual:-1",
    /// or "bare" (no auxiliary field).
    pub protocol: Option<String>,
    /// Disable to synthesize the pulse without its counterdiabatic component.
    pub nv_v_term: Option<bool>,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    /// Significant digits in CSV output (default 17, full double precision).
    pub precision: Option<usize>,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("cannot parse config {}", path.display()))
    }
}

/// Propagation protocol selector; `None` means the bare Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProtocolChoice(pub Option<DriveProtocol>);

impl ProtocolChoice {
    fn parse(text: &str) -> Result<Self> {
        Ok(ProtocolChoice(match text {
            "collective" => Some(DriveProtocol::Collective),
            "bare" | "none" => None,
            "individual:+1" => Some(DriveProtocol::Individual(2)),
            "individual:0" => Some(DriveProtocol::Individual(1)),
            "individual:-1" => Some(DriveProtocol::Individual(0)),
            other => bail!(
                "unknown protocol {other:?}; expected collective, bare, \
                 individual:+1, individual:0, or individual:-1"
            ),
        }))
    }
}

/// Fully resolved run parameters.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub scenario: Scenario,
    pub delta_over_kappa: f64,
    pub kappa: f64,
    pub tau: f64,
    pub alpha: f64,
    pub beta_scaled: f64,
    pub omega0_over_kappa: f64,
    pub samples: usize,
    pub rk4_steps: usize,
    pub seed: u64,
    pub propagate: bool,
    pub protocol: ProtocolChoice,
    pub nv_v_term: bool,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub precision: usize,
}

impl Resolved {
    pub fn lz3_params(&self) -> Result<ctdrive::model::Lz3Params> {
        Ok(ctdrive::model::Lz3Params::new(
            self.delta_over_kappa * self.kappa,
            self.kappa,
            self.tau,
            self.alpha,
        )?)
    }

    /// CSV path, defaulting to `<scenario>.csv` in the working directory.
    pub fn csv_path(&self) -> PathBuf {
        self.csv
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("{}.csv", self.scenario.name())))
    }
}

/// Merge config-file values with CLI flag overrides and per-scenario defaults.
pub fn resolve(
    scenario: Scenario,
    cfg: ScenarioConfig,
    out_flag: Option<PathBuf>,
    svg_flag: Option<PathBuf>,
    seed_flag: Option<u64>,
) -> Result<Resolved> {
    if let Some(name) = &cfg.scenario {
        match Scenario::from_name(name) {
            Some(s) if s == scenario => {}
            Some(s) => bail!(
                "config declares scenario {:?} but the {} subcommand was invoked",
                s.name(),
                scenario.name()
            ),
            None => bail!("unknown scenario {name:?} in config"),
        }
    }

    let default_samples = match scenario {
        Scenario::Fuzz => 200,
        Scenario::NvPulse => 2001,
        _ => 400,
    };
    let default_tau = match scenario {
        // The splitting-variation grid holds the duration at 0.1 s.
        Scenario::Fig2b => 0.1,
        _ => 1.0,
    };

    let samples = cfg.samples.unwrap_or(default_samples);
    if samples < 2 {
        bail!("samples must be >= 2 (got {samples})");
    }
    let precision = cfg.precision.unwrap_or(17);
    if !(1..=17).contains(&precision) {
        bail!("precision must be in 1..=17 (got {precision})");
    }

    Ok(Resolved {
        scenario,
        delta_over_kappa: cfg.delta_over_kappa.unwrap_or(0.1),
        kappa: cfg.kappa.unwrap_or(1.0),
        tau: cfg.tau.unwrap_or(default_tau),
        alpha: cfg.alpha.unwrap_or(2.0),
        beta_scaled: cfg.beta_scaled.unwrap_or(0.5),
        omega0_over_kappa: cfg.omega0_over_kappa.unwrap_or(200.0),
        samples,
        rk4_steps: cfg.rk4_steps.unwrap_or(20_000),
        seed: seed_flag.or(cfg.seed).unwrap_or(42),
        propagate: cfg.propagate.unwrap_or(false),
        protocol: ProtocolChoice::parse(cfg.protocol.as_deref().unwrap_or("collective"))?,
        nv_v_term: cfg.nv_v_term.unwrap_or(true),
        csv: out_flag.or(cfg.csv),
        svg: svg_flag.or(cfg.svg),
        precision,
    })
}
