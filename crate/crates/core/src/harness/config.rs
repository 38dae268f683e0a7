use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{HarnessError, Mode, Subtrack};

pub const MAX_CONFIGS_PER_SUBTRACK: usize = 3;

/// One solver configuration.
///
/// The command is split on whitespace; `{input}`, `{output}`, `{witness}`
/// and `{mode}` are substituted inside each word. No shell is involved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolConfig {
    pub name: String,
    /// Tool the configuration belongs to; defaults to `name`.
    #[serde(default)]
    pub tool: Option<String>,
    pub command: String,
    pub subtrack: Subtrack,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub env: BTreeMap<String, String>,
    /// Scored and listed, but not ranked.
    #[serde(default)]
    pub hors_concours: bool,
}

impl ToolConfig {
    pub fn new(name: &str, command: &str, subtrack: Subtrack) -> Self {
        ToolConfig {
            name: name.to_string(),
            tool: None,
            command: command.to_string(),
            subtrack,
            mode: Mode::Sequential,
            env: BTreeMap::new(),
            hors_concours: false,
        }
    }

    pub fn tool_name(&self) -> &str {
        self.tool.as_deref().unwrap_or(&self.name)
    }

    /// The argument vector with placeholders filled in.
    pub fn argv(&self, input: &Path, output: &Path, witness: &Path, mode: Mode) -> Vec<String> {
        let mode = match mode {
            Mode::Sequential => "seq",
            Mode::Parallel => "par",
        };
        self.command
            .split_whitespace()
            .map(|word| {
                word.replace("{input}", &input.to_string_lossy())
                    .replace("{output}", &output.to_string_lossy())
                    .replace("{witness}", &witness.to_string_lossy())
                    .replace("{mode}", mode)
            })
            .collect()
    }
}

/// Registered configurations, enforcing the per-subtrack limit.
#[derive(Debug, Default)]
pub struct ToolRegistry {
    configs: Vec<ToolConfig>,
    per_tool: HashMap<(String, Subtrack), usize>,
}

impl ToolRegistry {
    pub fn register(&mut self, config: ToolConfig) -> Result<(), HarnessError> {
        if config.command.split_whitespace().next().is_none() {
            return Err(HarnessError::Config(format!("`{}` has an empty command", config.name)));
        }
        if self.configs.iter().any(|c| c.name == config.name && c.subtrack == config.subtrack) {
            return Err(HarnessError::Config(format!("duplicate configuration `{}`", config.name)));
        }
        let key = (config.tool_name().to_string(), config.subtrack);
        let count = self.per_tool.entry(key).or_default();
        if *count >= MAX_CONFIGS_PER_SUBTRACK {
            return Err(HarnessError::TooManyConfigs {
                tool: config.tool_name().to_string(),
                subtrack: config.subtrack,
            });
        }
        *count += 1;
        self.configs.push(config);
        Ok(())
    }

    pub fn configs(&self) -> &[ToolConfig] {
        &self.configs
    }

    pub fn into_configs(self) -> Vec<ToolConfig> {
        self.configs
    }
}

#[derive(Deserialize)]
struct TomlTools {
    #[serde(default)]
    tool: Vec<ToolConfig>,
}

/// Parses a TOML (`[[tool]]` tables) or JSON (array) tool list.
pub fn parse_tools(text: &str, json: bool) -> Result<Vec<ToolConfig>, HarnessError> {
    let list: Vec<ToolConfig> = if json {
        serde_json::from_str(text)?
    } else {
        toml::from_str::<TomlTools>(text)
            .map_err(|e| HarnessError::Config(e.to_string()))?
            .tool
    };
    let mut registry = ToolRegistry::default();
    for config in list {
        registry.register(config)?;
    }
    Ok(registry.into_configs())
}

/// Loads a tool list; files ending in `.json` are JSON, anything else TOML.
pub fn load_tools(path: &Path) -> Result<Vec<ToolConfig>, HarnessError> {
    let text = std::fs::read_to_string(path)?;
    let json = path.extension().is_some_and(|e| e == "json");
    parse_tools(&text, json)
}
