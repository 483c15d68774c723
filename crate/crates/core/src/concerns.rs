//! Concern classification: which classes carry functional (business)
//! behavior and which carry non-functional (supporting) behavior.
//!
//! The classification is user-supplied configuration, not inference. It is
//! the input the crosscutting detection rule depends on: only calls from a
//! functional class into a non-functional class are counted.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// Classification of a class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConcernType {
    #[serde(rename = "functional")]
    Functional,
    #[serde(rename = "non-functional")]
    NonFunctional,
}

impl fmt::Display for ConcernType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConcernType::Functional => write!(f, "functional"),
            ConcernType::NonFunctional => write!(f, "non-functional"),
        }
    }
}

/// Kind of advice generated for intercepted operations. A single global
/// choice; the model source carries nothing to choose per-advice kinds from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdviceKind {
    Before,
    After,
    Around,
}

impl Default for AdviceKind {
    fn default() -> Self {
        AdviceKind::Before
    }
}

impl fmt::Display for AdviceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdviceKind::Before => write!(f, "before"),
            AdviceKind::After => write!(f, "after"),
            AdviceKind::Around => write!(f, "around"),
        }
    }
}

/// Canonical form used whenever class names are compared: trimmed and
/// case-folded. Original casing is kept for display by the callers.
pub fn fold_name(name: &str) -> String {
    name.trim().to_lowercase()
}

/// User-supplied classification of classes, plus the actor flag.
///
/// Lookups are keyed by the folded name; unmapped classes take `default`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConcernMap {
    entries: BTreeMap<String, ConcernType>,
    actors: BTreeSet<String>,
    default: ConcernType,
}

impl Default for ConcernMap {
    fn default() -> Self {
        ConcernMap {
            entries: BTreeMap::new(),
            actors: BTreeSet::new(),
            // Aspectization must be opt-in; unknown classes stay functional.
            default: ConcernType::Functional,
        }
    }
}

impl ConcernMap {
    /// Build a map from (class, concern) pairs and actor names.
    /// Duplicate class names (after folding) are rejected.
    pub fn from_entries<I, A>(entries: I, actors: A) -> Result<Self, ConfigError>
    where
        I: IntoIterator<Item = (String, ConcernType)>,
        A: IntoIterator<Item = String>,
    {
        let mut map = ConcernMap::default();
        for (name, concern) in entries {
            let key = fold_name(&name);
            if map.entries.insert(key, concern).is_some() {
                return Err(ConfigError::DuplicateClass(name));
            }
        }
        map.actors = actors.into_iter().map(|a| fold_name(&a)).collect();
        Ok(map)
    }

    /// The concern type of `class_name`: mapped value if present, else the
    /// default. Total and pure.
    pub fn classify(&self, class_name: &str) -> ConcernType {
        self.entries
            .get(&fold_name(class_name))
            .copied()
            .unwrap_or(self.default)
    }

    /// Whether `class_name` is flagged as an actor (a human participant;
    /// classified normally but skipped by code generation).
    pub fn is_actor(&self, class_name: &str) -> bool {
        self.actors.contains(&fold_name(class_name))
    }

    pub fn default_concern(&self) -> ConcernType {
        self.default
    }

    /// Folded names of all explicitly mapped classes.
    pub fn mapped_classes(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

/// Free-function form of [`ConcernMap::classify`].
pub fn classify(class_name: &str, map: &ConcernMap) -> ConcernType {
    map.classify(class_name)
}

/// The whole tool configuration document.
///
/// Schema (TOML):
///
/// ```toml
/// threshold = 4              # optional, default 3, must be >= 1
/// advice_kind = "before"     # optional: "before" | "after" | "around"
/// actors = ["customer"]      # optional
///
/// [concerns]                 # optional; class -> "functional" | "non-functional"
/// "login page" = "non-functional"
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToolConfig {
    pub concerns: ConcernMap,
    pub threshold: u32,
    pub advice_kind: AdviceKind,
}

impl Default for ToolConfig {
    fn default() -> Self {
        ToolConfig {
            concerns: ConcernMap::default(),
            threshold: DEFAULT_THRESHOLD,
            advice_kind: AdviceKind::default(),
        }
    }
}

/// Threshold applied when the config omits one.
pub const DEFAULT_THRESHOLD: u32 = 3;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config is not valid TOML: {0}")]
    Parse(String),
    #[error("duplicate concern entry for class {0:?} (class names compare case-insensitively)")]
    DuplicateClass(String),
    #[error("invalid concern value {value:?} for class {class:?}: expected \"functional\" or \"non-functional\"")]
    InvalidConcernValue { class: String, value: String },
    #[error("invalid advice_kind {0:?}: expected \"before\", \"after\" or \"around\"")]
    InvalidAdviceKind(String),
    #[error("invalid threshold {0}: must be an integer >= 1")]
    InvalidThreshold(i64),
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("config key {key:?} has wrong type: expected {expected}")]
    WrongType { key: String, expected: &'static str },
}

impl ToolConfig {
    /// Parse and validate a TOML config document.
    pub fn from_toml_str(doc: &str) -> Result<Self, ConfigError> {
        let value: toml::Table = doc
            .parse()
            .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;

        let mut config = ToolConfig::default();
        let mut entries: Vec<(String, ConcernType)> = Vec::new();
        let mut actors: Vec<String> = Vec::new();

        for (key, item) in value {
            match key.as_str() {
                "concerns" => {
                    let table = item.as_table().ok_or(ConfigError::WrongType {
                        key,
                        expected: "table of class -> concern",
                    })?;
                    for (class, concern) in table {
                        let text =
                            concern
                                .as_str()
                                .ok_or_else(|| ConfigError::InvalidConcernValue {
                                    class: class.clone(),
                                    value: concern.to_string(),
                                })?;
                        let parsed = match text {
                            "functional" => ConcernType::Functional,
                            "non-functional" => ConcernType::NonFunctional,
                            other => {
                                return Err(ConfigError::InvalidConcernValue {
                                    class: class.clone(),
                                    value: other.to_string(),
                                })
                            }
                        };
                        entries.push((class.clone(), parsed));
                    }
                }
                "actors" => {
                    let list = item.as_array().ok_or(ConfigError::WrongType {
                        key,
                        expected: "array of class names",
                    })?;
                    for entry in list {
                        let name = entry.as_str().ok_or(ConfigError::WrongType {
                            key: "actors".into(),
                            expected: "array of class names",
                        })?;
                        actors.push(name.to_string());
                    }
                }
                "threshold" => {
                    let raw = item.as_integer().ok_or(ConfigError::WrongType {
                        key,
                        expected: "integer",
                    })?;
                    if raw < 1 || raw > u32::MAX as i64 {
                        return Err(ConfigError::InvalidThreshold(raw));
                    }
                    config.threshold = raw as u32;
                }
                "advice_kind" => {
                    let text = item.as_str().ok_or(ConfigError::WrongType {
                        key,
                        expected: "string",
                    })?;
                    config.advice_kind = match text {
                        "before" => AdviceKind::Before,
                        "after" => AdviceKind::After,
                        "around" => AdviceKind::Around,
                        other => return Err(ConfigError::InvalidAdviceKind(other.to_string())),
                    };
                }
                other => return Err(ConfigError::UnknownKey(other.to_string())),
            }
        }

        config.concerns = ConcernMap::from_entries(entries, actors)?;
        Ok(config)
    }
}

/// Load just the concern map out of a config document.
pub fn load_concern_map(doc: &str) -> Result<ConcernMap, ConfigError> {
    ToolConfig::from_toml_str(doc).map(|c| c.concerns)
}
