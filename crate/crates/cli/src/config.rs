use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Campaign {
    Table2,
    Table3,
    BoundsCurve,
    SweepP,
    Analyze,
    PhaseSim,
    BoundEntangledScan,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

pub const DEFAULT_SAMPLES: u64 = 10_000;
pub const FULL_SAMPLES: u64 = 1_000_000;

#[derive(Clone, Debug, Default, Args)]
pub struct Flags {
    /// Number of qubits.
    #[arg(long)]
    pub n: Option<usize>,
    /// Restrict k-indexed output to this producibility level.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Sampler mode for table3: dme, dme_family, dme_satisfying, bound_entangled.
    #[arg(long)]
    pub mode: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Zoo name (ghz:4, dicke:4:2, duer:5, smolin:2, ...) or a state JSON file.
    #[arg(long)]
    pub state: Option<String>,
    /// JSON file with the same keys as the flags; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Use 10^6 samples unless --samples is given.
    #[arg(long)]
    pub full: bool,
    /// Angle sampler for table2: reversed or haar.
    #[arg(long)]
    pub sampler: Option<String>,
    /// Also maximize F_Q over local directions (table2).
    #[arg(long)]
    pub local: bool,
    /// Also evaluate the witness optimized over local unitaries.
    #[arg(long)]
    pub witness_optimized: bool,
    /// Random restarts of the witness optimization.
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Bisection resolution for sweep-p.
    #[arg(long)]
    pub resolution: Option<f64>,
    /// Repetitions per phase estimate.
    #[arg(long)]
    pub m: Option<u64>,
    /// Number of phase estimates.
    #[arg(long)]
    pub trials: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub campaign: Option<Campaign>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub mode: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub state: Option<String>,
    pub full: Option<bool>,
    pub sampler: Option<String>,
    pub local: Option<bool>,
    pub witness_optimized: Option<bool>,
    pub restarts: Option<usize>,
    pub resolution: Option<f64>,
    pub m: Option<u64>,
    pub trials: Option<usize>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
    }
}

/// Fully resolved run configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub campaign: Campaign,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub mode: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub state: Option<String>,
    pub sampler: Option<String>,
    pub local: bool,
    pub witness_optimized: bool,
    pub restarts: Option<usize>,
    pub resolution: f64,
    pub m: u64,
    pub trials: usize,
}

impl Settings {
    pub fn resolve(campaign: Option<Campaign>, flags: Flags, file: ConfigFile) -> Result<Self, String> {
        let campaign = campaign.or(file.campaign).ok_or("no campaign given")?;
        let full = flags.full || file.full.unwrap_or(false);
        let samples = flags
            .samples
            .or(file.samples)
            .unwrap_or(if full { FULL_SAMPLES } else { DEFAULT_SAMPLES });
        if samples == 0 {
            return Err("samples must be at least 1".into());
        }
        Ok(Self {
            campaign,
            n: flags.n.or(file.n),
            k: flags.k.or(file.k),
            samples,
            seed: flags.seed.or(file.seed).unwrap_or(0),
            workers: flags.workers.or(file.workers).unwrap_or(0),
            mode: flags.mode.or(file.mode),
            out: flags.out.or(file.out),
            format: flags.format.or(file.format),
            state: flags.state.or(file.state),
            sampler: flags.sampler.or(file.sampler),
            local: flags.local || file.local.unwrap_or(false),
            witness_optimized: flags.witness_optimized || file.witness_optimized.unwrap_or(false),
            restarts: flags.restarts.or(file.restarts),
            resolution: flags.resolution.or(file.resolution).unwrap_or(1e-6),
            m: flags.m.or(file.m).unwrap_or(100),
            trials: flags.trials.or(file.trials).unwrap_or(1000),
        })
    }

    /// Explicit format, else inferred from the output extension.
    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or_else(|| match self.out.as_ref().and_then(|p| p.extension()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => default,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config() {
        let file: ConfigFile =
            serde_json::from_str(r#"{"campaign":"table3","samples":50,"seed":7,"mode":"dme_family"}"#).unwrap();
        let flags = Flags { seed: Some(9), ..Flags::default() };
        let s = Settings::resolve(None, flags, file).unwrap();
        assert_eq!(s.campaign, Campaign::Table3);
        assert_eq!(s.samples, 50);
        assert_eq!(s.seed, 9);
        assert_eq!(s.mode.as_deref(), Some("dme_family"));
    }

    #[test]
    fn full_switches_default_samples() {
        let flags = Flags { full: true, ..Flags::default() };
        let s = Settings::resolve(Some(Campaign::Table2), flags, ConfigFile::default()).unwrap();
        assert_eq!(s.samples, FULL_SAMPLES);
        let flags = Flags { full: true, samples: Some(10), ..Flags::default() };
        let s = Settings::resolve(Some(Campaign::Table2), flags, ConfigFile::default()).unwrap();
        assert_eq!(s.samples, 10);
    }

    #[test]
    fn rejects_zero_samples_and_unknown_keys() {
        let flags = Flags { samples: Some(0), ..Flags::default() };
        assert!(Settings::resolve(Some(Campaign::Table2), flags, ConfigFile::default()).is_err());
        assert!(serde_json::from_str::<ConfigFile>(r#"{"sample":3}"#).is_err());
        assert!(Settings::resolve(None, Flags::default(), ConfigFile::default()).is_err());
    }

    #[test]
    fn format_from_extension() {
        let mut s = Settings::resolve(Some(Campaign::Table2), Flags::default(), ConfigFile::default()).unwrap();
        assert_eq!(s.format_or(Format::Csv), Format::Csv);
        s.out = Some("a.JSON".into());
        assert_eq!(s.format_or(Format::Csv), Format::Json);
        s.format = Some(Format::Csv);
        assert_eq!(s.format_or(Format::Json), Format::Csv);
    }
}
