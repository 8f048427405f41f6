use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::Command;
use crate::error::{Error, Result};
use crate::group::{GroupPair, GroupSpec, PairSpec, PeripheralSpec};
use crate::limits::Limits;

/// Everything a run depends on. Unknown fields are rejected and every
/// field has a default, so `{}` is a valid config.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Group and peripherals; each subcommand has its own default pair.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair: Option<PairSpec>,
    pub truncation: Truncation,
    pub rips: RipsConfig,
    pub horoball: HoroballConfig,
    pub corona: CoronaConfig,
    pub radii: Vec<usize>,
    /// Non-peripheral ball vertices sampled per radius by `delta-scan`.
    pub sample: usize,
    pub seed: u64,
    /// Ball radius for `h, k` in `action-check`.
    pub action_radius: usize,
    /// Where the primary artifact goes; stdout when absent. Not hashed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Truncation {
    /// Cayley-ball radius `r_c`.
    pub cayley_radius: usize,
    /// Horoball depth `L`.
    pub depth: u32,
    /// Coset-order cutoff radius.
    pub cutoff: usize,
    /// Boundary stage `d`.
    pub stage: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RipsConfig {
    /// Rips scale `D`.
    pub scale: u32,
    pub dim_cap: usize,
    /// Depth window `[r, R]`; the Cayley ball is used when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<Window>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub lower: u32,
    pub upper: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HoroballConfig {
    /// Normal-form and Gromov suites run on `𝓗({0..base_len})`.
    pub base_len: u32,
    pub depth: u32,
    /// Depth-shift suite runs on `𝓗({0..shift_base_len})`.
    pub shift_base_len: u32,
    pub shift_depth: u32,
    pub max_shift: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CoronaConfig {
    pub n: usize,
    pub m: usize,
    pub stage: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            pair: None,
            truncation: Truncation::default(),
            rips: RipsConfig::default(),
            horoball: HoroballConfig::default(),
            corona: CoronaConfig::default(),
            radii: vec![3, 4, 5, 6],
            sample: 48,
            seed: 0,
            action_radius: 3,
            output: None,
        }
    }
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation {
            cayley_radius: 3,
            depth: 4,
            cutoff: 4,
            stage: 5,
        }
    }
}

impl Default for RipsConfig {
    fn default() -> Self {
        RipsConfig {
            scale: 1,
            dim_cap: crate::rips::DEFAULT_DIM_CAP,
            window: None,
        }
    }
}

impl Default for HoroballConfig {
    fn default() -> Self {
        HoroballConfig {
            base_len: 32,
            depth: 6,
            shift_base_len: 8,
            shift_depth: 10,
            max_shift: 3,
        }
    }
}

impl Default for CoronaConfig {
    fn default() -> Self {
        CoronaConfig { n: 2, m: 3, stage: 3 }
    }
}

impl ExperimentConfig {
    /// Errors carry the JSON path of the offending field.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let path = if path == "." { String::from("(root)") } else { path };
            Error::config(path, e.inner().to_string())
        })
    }

    pub fn validate(&self, cmd: Command) -> Result<()> {
        self.pair_for(cmd)?;
        match cmd {
            Command::HoroballCheck => {
                let h = &self.horoball;
                if h.base_len == 0 {
                    return Err(Error::config("horoball.base_len", "must be positive"));
                }
                if h.shift_base_len == 0 {
                    return Err(Error::config("horoball.shift_base_len", "must be positive"));
                }
                if h.depth == 0 {
                    return Err(Error::config("horoball.depth", "must be positive"));
                }
            }
            Command::DeltaScan => {
                if self.radii.is_empty() {
                    return Err(Error::config("radii", "must not be empty"));
                }
                if self.radii.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::config("radii", "must be strictly increasing"));
                }
            }
            Command::Betti => {
                if let Some(w) = self.rips.window {
                    if w.lower + self.rips.scale >= w.upper {
                        return Err(Error::config(
                            "rips.window",
                            format!("needs r + D < R, got r={}, D={}, R={}", w.lower, self.rips.scale, w.upper),
                        ));
                    }
                }
            }
            Command::Roundtrip => {
                if self.truncation.stage == 0 {
                    return Err(Error::config("truncation.stage", "must be at least 1"));
                }
            }
            Command::ActionCheck => {
                if self.truncation.cutoff >= self.truncation.stage {
                    return Err(Error::config("truncation.cutoff", "must be below truncation.stage"));
                }
            }
            Command::CoronaBetti => {
                if !(2..=3).contains(&self.corona.n) {
                    return Err(Error::config("corona.n", "must be 2 or 3"));
                }
                if self.corona.stage == 0 {
                    return Err(Error::config("corona.stage", "must be at least 1"));
                }
            }
        }
        Ok(())
    }

    /// The configured pair, or the subcommand's default: `(ℤ²∗ℤ², {ℤ², ℤ²})`
    /// for `delta-scan`, `(F₂, {⟨a⟩})` otherwise.
    pub fn pair_spec(&self, cmd: Command) -> PairSpec {
        self.pair.clone().unwrap_or_else(|| match cmd {
            Command::DeltaScan | Command::CoronaBetti => PairSpec {
                group: GroupSpec::free_product(vec![GroupSpec::free_abelian(2), GroupSpec::free_abelian(2)]),
                peripherals: vec![factor(0), factor(1)],
            },
            _ => PairSpec {
                group: GroupSpec::free_group(2),
                peripherals: vec![PeripheralSpec {
                    factor: None,
                    generators: Some(vec![0]),
                }],
            },
        })
    }

    /// The pair for `cmd`, rejecting peripherals whose coset count does not
    /// grow between radii 1 and 2.
    pub fn pair_for(&self, cmd: Command) -> Result<GroupPair> {
        let prefixed = |e| match e {
            Error::InvalidConfig { path, message } => Error::config(format!("pair.{path}"), message),
            other => other,
        };
        let pair = self.pair_spec(cmd).build().map_err(prefixed)?;
        pair.check_infinite_index(1, &Limits::default()).map_err(prefixed)?;
        Ok(pair)
    }

    /// Hex SHA-256 of the canonical JSON of everything except `output`.
    pub fn hash(&self) -> String {
        let mut hashed = self.clone();
        hashed.output = None;
        let bytes = serde_json::to_vec(&hashed).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

fn factor(i: usize) -> PeripheralSpec {
    PeripheralSpec {
        factor: Some(i),
        generators: None,
    }
}
