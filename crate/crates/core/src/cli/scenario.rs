//! Scenario documents for the quantum and detector commands.
//!
//! ```json
//! {
//!   "sources": [{"name": "near", "activity": 3.7e6, "distance": 100}],
//!   "detector": {"aperture_diameter": 2, "efficiency": 0.008, "saturation": 100},
//!   "observer": {"env_dim": 2, "povms": [
//!     {"name": "Z", "labels": ["0", "1"], "effects": [{"dim": 2, "re": [1,0,0,0]}, ...]},
//!     {"name": "P", "file": "povm.json"}
//!   ]},
//!   "state": {"dim": 2, "re": [...], "im": [...]},
//!   "environments": [{"dim": 2, "re": [...]}],
//!   "chsh": {"angles": [0, 1.5707963, 0.7853981, 2.3561944]},
//!   "noclone": {"pairs": [[{"dim": 2, "re": [1, 0]}, {"dim": 2, "re": [0.6, 0.8]}]]}
//! }
//! ```
//!
//! Every block is optional; commands fall back to built-in defaults. POVM
//! files hold `{"labels": [...], "effects": [...]}` and are resolved relative
//! to the scenario file.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Deserialize;

use super::{CliError, Result};
use crate::observation::{DetectorConfig, ObserverModel, SourceConfig};
use crate::quantum::format::{OperatorDoc, StateDoc};
use crate::quantum::{DensityOperator, Povm};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub sources: Option<Vec<NamedSource>>,
    #[serde(default)]
    pub detector: Option<DetectorConfig>,
    #[serde(default)]
    pub observer: Option<ObserverDoc>,
    #[serde(default)]
    pub state: Option<OperatorDoc>,
    #[serde(default)]
    pub environments: Option<Vec<OperatorDoc>>,
    #[serde(default)]
    pub chsh: Option<ChshDoc>,
    #[serde(default)]
    pub noclone: Option<NoCloneDoc>,
    #[serde(skip)]
    base_dir: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
pub struct NamedSource {
    pub name: String,
    #[serde(flatten)]
    pub source: SourceConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObserverDoc {
    pub env_dim: usize,
    pub povms: Vec<PovmEntry>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PovmEntry {
    File { name: String, file: PathBuf },
    Inline {
        name: String,
        labels: Vec<String>,
        effects: Vec<OperatorDoc>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmDoc {
    pub labels: Vec<String>,
    pub effects: Vec<OperatorDoc>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChshDoc {
    pub angles: [f64; 4],
    #[serde(default)]
    pub state: Option<OperatorDoc>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoCloneDoc {
    pub pairs: Vec<[StateDoc; 2]>,
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

pub(crate) fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_owned(),
        message: e.to_string(),
    })
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let mut s: Scenario = read_json(path)?;
        s.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(s)
    }

    pub fn load_optional(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Scenario::default()), Scenario::load)
    }

    pub fn detector(&self) -> Result<DetectorConfig> {
        let d = self.detector.unwrap_or(DetectorConfig::HANDHELD);
        d.validate().map_err(|e| CliError::Config(format!("detector: {e}")))?;
        Ok(d)
    }

    pub fn sources(&self) -> Result<Vec<NamedSource>> {
        let sources = self.sources.clone().unwrap_or_else(default_sources);
        if sources.is_empty() {
            return Err(CliError::Config("sources: at least one source is required".into()));
        }
        for s in &sources {
            s.source
                .validate()
                .map_err(|e| CliError::Config(format!("sources[{}]: {e}", s.name)))?;
        }
        Ok(sources)
    }

    pub fn observer(&self) -> Result<Option<ObserverModel>> {
        let Some(doc) = &self.observer else {
            return Ok(None);
        };
        let mut povms = Vec::with_capacity(doc.povms.len());
        for entry in &doc.povms {
            let (name, labels, effects) = match entry {
                PovmEntry::Inline {
                    name,
                    labels,
                    effects,
                } => (name.clone(), labels.clone(), effects.clone()),
                PovmEntry::File { name, file } => {
                    let p: PovmDoc = read_json(&self.base_dir.join(file))?;
                    (name.clone(), p.labels, p.effects)
                }
            };
            let matrices = effects
                .iter()
                .map(OperatorDoc::to_matrix)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::Config(format!("observer.povms[{name}]: {e}")))?;
            let povm = Povm::new(matrices, labels)
                .map_err(|e| CliError::Config(format!("observer.povms[{name}]: {e}")))?;
            povms.push((name, povm));
        }
        ObserverModel::new(doc.env_dim, povms)
            .map(Some)
            .map_err(|e| CliError::Config(format!("observer: {e}")))
    }

    pub fn state(&self) -> Result<Option<DensityOperator>> {
        self.state.as_ref().map(|d| density("state", d)).transpose()
    }

    pub fn environments(&self) -> Result<Option<Vec<DensityOperator>>> {
        self.environments
            .as_ref()
            .map(|docs| {
                docs.iter()
                    .enumerate()
                    .map(|(i, d)| density(&format!("environments[{i}]"), d))
                    .collect()
            })
            .transpose()
    }
}

pub(crate) fn density(field: &str, doc: &OperatorDoc) -> Result<DensityOperator> {
    doc.to_matrix()
        .and_then(DensityOperator::new)
        .map_err(|e| CliError::Config(format!("{field}: {e}")))
}

/// 100 µCi at 1 m and 400 µCi at 2 m, equal photon yield.
pub fn default_sources() -> Vec<NamedSource> {
    use crate::observation::DECAYS_PER_MICROCURIE;
    vec![
        NamedSource {
            name: "100uCi_at_1m".into(),
            source: SourceConfig {
                activity: 100.0 * DECAYS_PER_MICROCURIE,
                distance: 100.0,
                photon_yield: 1.0,
            },
        },
        NamedSource {
            name: "400uCi_at_2m".into(),
            source: SourceConfig {
                activity: 400.0 * DECAYS_PER_MICROCURIE,
                distance: 200.0,
                photon_yield: 1.0,
            },
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_fields_are_rejected() {
        let r: std::result::Result<Scenario, _> = serde_json::from_str(r#"{"detectr": {}}"#);
        assert!(r.is_err());
    }

    #[test]
    fn invalid_detector_names_the_field() {
        let s: Scenario = serde_json::from_str(
            r#"{"detector": {"aperture_diameter": 2, "efficiency": 2, "saturation": 100}}"#,
        )
        .unwrap();
        let msg = s.detector().unwrap_err().to_string();
        assert!(msg.contains("efficiency"), "{msg}");
    }

    #[test]
    fn inline_observer() {
        let s: Scenario = serde_json::from_str(
            r#"{"observer": {"env_dim": 2, "povms": [{"name": "Z", "labels": ["0", "1"],
                "effects": [{"dim": 2, "re": [1, 0, 0, 0]}, {"dim": 2, "re": [0, 0, 0, 1]}]}]}}"#,
        )
        .unwrap();
        let o = s.observer().unwrap().unwrap();
        assert_eq!(o.env_dim(), 2);
        assert_eq!(o.povms()[0].0, "Z");
    }

    #[test]
    fn incomplete_povm_is_a_config_error() {
        let s: Scenario = serde_json::from_str(
            r#"{"observer": {"env_dim": 2, "povms": [{"name": "Z", "labels": ["0", "1"],
                "effects": [{"dim": 2, "re": [1, 0, 0, 0]}, {"dim": 2, "re": [1, 0, 0, 0]}]}]}}"#,
        )
        .unwrap();
        let msg = s.observer().unwrap_err().to_string();
        assert!(msg.contains("completeness"), "{msg}");
    }

    #[test]
    fn default_sources_are_the_handheld_scenario() {
        let s = Scenario::default();
        let sources = s.sources().unwrap();
        assert_eq!(sources[0].source.activity, 3.7e6);
        assert_eq!(sources[1].source.activity, 1.48e7);
    }
}
