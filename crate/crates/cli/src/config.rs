//! The experiment file read by `mwrc simulate`.
//!
//! ```toml
//! seed = 7
//! scheme = "fdf"
//! rates = ["0.3", "0.3"]
//! n_list = [64, 128, 256]
//! trials = 2000
//! output = "trend.csv"
//!
//! [channel]
//! field = { char = 2, deg = 1 }
//! noise = [{ rho = 0.1 }, { rho = 0.1 }, { rho = 0.1 }]
//!
//! [decoder]
//! policy = "auto"
//! ```
//!
//! `noise` lists the relay first, then every user; each entry is either a
//! binary crossover `rho` or a full `pmf`. Gains default to one.
//! Unknown keys are rejected.

use serde::{Deserialize, Serialize};

use mwrc::code::InformationSetDecoder;
use mwrc::field::{Element, Field};
use mwrc::prob::NoisePmf;
use mwrc::selfcheck::FieldSpec;
use mwrc::sim::{DecoderConfig, DecoderPolicy, MwrcConfig, RateAllocation, Scheme};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_scheme")]
    pub scheme: String,
    pub rates: Vec<String>,
    pub n_list: Vec<u64>,
    pub trials: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    pub channel: ChannelConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decoder: Option<DecoderSection>,
}

fn default_scheme() -> String {
    "fdf".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSection {
    pub char: u32,
    #[serde(default = "one")]
    pub deg: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
}

fn one() -> u32 {
    1
}

impl Default for FieldSection {
    fn default() -> Self {
        FieldSection { char: 2, deg: 1, modulus: None }
    }
}

impl FieldSection {
    pub fn spec(&self) -> FieldSpec {
        FieldSpec { characteristic: self.char, degree: self.deg, modulus: self.modulus.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeNoise {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pmf: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    #[serde(default)]
    pub field: FieldSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uplink_gains: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub downlink_gains: Option<Vec<u32>>,
    pub noise: Vec<NodeNoise>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecoderSection {
    /// `auto`, `exact` or `information-set`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<String>,
    /// Largest candidate count decoded by exhaustive search.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    /// Fixed number of information-set iterations, disabling the early stops.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub isd_iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub isd_max_iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub isd_max_flips: Option<usize>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks everything that can be checked without running a trial.
    pub fn validate(&self) -> Result<(), CliError> {
        self.scheme()?;
        let channel = self.channel.build()?;
        let rates = self.rates()?;
        if rates.num_users() != channel.num_users() {
            return Err(CliError::Config(format!(
                "{} rates for a channel with {} users",
                rates.num_users(),
                channel.num_users()
            )));
        }
        if self.n_list.is_empty() || self.n_list.contains(&0) {
            return Err(CliError::Config("n_list must hold positive blocklengths".to_string()));
        }
        self.decoder()?;
        Ok(())
    }

    pub fn scheme(&self) -> Result<Scheme, CliError> {
        self.scheme.parse::<Scheme>().map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn rates(&self) -> Result<RateAllocation, CliError> {
        let refs: Vec<&str> = self.rates.iter().map(String::as_str).collect();
        RateAllocation::parse(&refs).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn decoder(&self) -> Result<DecoderConfig, CliError> {
        let mut d = DecoderConfig::default();
        let Some(s) = &self.decoder else { return Ok(d) };
        if let Some(p) = &s.policy {
            d.policy = match p.as_str() {
                "auto" => DecoderPolicy::Auto,
                "exact" => DecoderPolicy::Exact,
                "information-set" => DecoderPolicy::InformationSet,
                other => return Err(CliError::Config(format!("unknown decoder policy {other:?}"))),
            };
        }
        if let Some(b) = s.budget {
            d.budget = b;
        }
        let defaults = InformationSetDecoder::default();
        d.isd = InformationSetDecoder {
            iterations: s.isd_iterations.or(defaults.iterations),
            max_iterations: s.isd_max_iterations.unwrap_or(defaults.max_iterations),
            max_flips: s.isd_max_flips.unwrap_or(defaults.max_flips),
            ..defaults
        };
        Ok(d)
    }
}

impl ChannelConfig {
    pub fn build(&self) -> Result<MwrcConfig, CliError> {
        let field = self.field.spec().build().map_err(|e| CliError::Config(e.to_string()))?;
        let users = self.noise.len().saturating_sub(1);
        let gains = |g: &Option<Vec<u32>>| -> Result<Vec<Element>, CliError> {
            match g {
                None => Ok(vec![Element::ONE; users]),
                Some(v) => v.iter().map(|&r| field.element(r).map_err(|e| CliError::Config(e.to_string()))).collect(),
            }
        };
        let noise =
            self.noise.iter().enumerate().map(|(node, n)| n.build(&field, node)).collect::<Result<Vec<_>, _>>()?;
        MwrcConfig::new(&field, gains(&self.uplink_gains)?, gains(&self.downlink_gains)?, noise)
            .map_err(|e| CliError::Config(e.to_string()))
    }

    /// `(ρ₀, ρ₁, ρ₂)` of a binary two-user channel given by crossovers.
    pub fn binary_two_user(&self) -> Result<(f64, f64, f64), CliError> {
        let rho: Option<Vec<f64>> = self.noise.iter().map(|n| n.rho).collect();
        match rho.as_deref() {
            Some(&[r0, r1, r2]) if self.field.char == 2 && self.field.deg == 1 => Ok((r0, r1, r2)),
            _ => Err(CliError::Config("expected a binary channel with three `rho` entries".to_string())),
        }
    }
}

impl NodeNoise {
    fn build(&self, field: &Field, node: usize) -> Result<NoisePmf, CliError> {
        let bad = |msg: String| CliError::Config(format!("noise of node {node}: {msg}"));
        match (self.rho, &self.pmf) {
            (Some(r), None) if field.is_binary() => NoisePmf::crossover(r).map_err(|e| bad(e.to_string())),
            (Some(_), None) => Err(bad(format!("`rho` needs GF(2), the channel is over {field}"))),
            (None, Some(p)) => NoisePmf::new(field, p.clone()).map_err(|e| bad(e.to_string())),
            _ => Err(bad("give exactly one of `rho` and `pmf`".to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
seed = 7
scheme = "fdf"
rates = ["0.3", "3/10"]
n_list = [20, 40]
trials = 10

[channel]
field = { char = 2, deg = 1 }
noise = [{ rho = 0.1 }, { rho = 0.05 }, { rho = 0.2 }]

[decoder]
policy = "information-set"
isd_max_iterations = 500
"#;

    #[test]
    fn round_trip() {
        let cfg = ExperimentConfig::parse(SAMPLE).unwrap();
        let again = ExperimentConfig::parse(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.channel.binary_two_user().unwrap(), (0.1, 0.05, 0.2));
        assert_eq!(cfg.decoder().unwrap().isd.max_iterations, 500);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = SAMPLE.replace("trials = 10", "trials = 10\ntrails = 3");
        assert!(matches!(ExperimentConfig::parse(&bad), Err(CliError::Config(_))));
    }

    #[test]
    fn inconsistent_configs() {
        let three_rates = SAMPLE.replace(r#"rates = ["0.3", "3/10"]"#, r#"rates = ["0.3", "0.3", "0.3"]"#);
        assert!(ExperimentConfig::parse(&three_rates).is_err());
        let both = SAMPLE.replace("{ rho = 0.05 }", "{ rho = 0.05, pmf = [0.95, 0.05] }");
        assert!(ExperimentConfig::parse(&both).is_err());
        let reducible = SAMPLE.replace("{ char = 2, deg = 1 }", "{ char = 2, deg = 2, modulus = [1, 0, 1] }");
        assert!(ExperimentConfig::parse(&reducible).is_err());
        let policy = SAMPLE.replace("information-set", "fastest");
        assert!(ExperimentConfig::parse(&policy).is_err());
    }

    #[test]
    fn general_noise() {
        let text = r#"
rates = ["1/2", "1/2", "1/4"]
n_list = [8]
trials = 1

[channel]
field = { char = 3 }
uplink_gains = [1, 2, 1]
noise = [{ pmf = [0.8, 0.1, 0.1] }, { pmf = [1, 0, 0] }, { pmf = [1, 0, 0] }, { pmf = [1, 0, 0] }]
"#;
        let cfg = ExperimentConfig::parse(text).unwrap();
        let ch = cfg.channel.build().unwrap();
        assert_eq!(ch.num_users(), 3);
        assert_eq!(ch.field().to_string(), "GF(3)");
        assert_eq!(cfg.scheme().unwrap(), Scheme::Fdf);
        assert_eq!(ExperimentConfig::parse(&cfg.to_toml()).unwrap(), cfg);
    }
}
