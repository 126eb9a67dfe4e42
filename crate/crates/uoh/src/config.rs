//! JSON run configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};
use uoh_core::league::{LevelRule, LevelTable, Levels};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    /// K/I used when no rule matches.
    pub default_levels: Levels,
    pub levels: Vec<LevelRule>,
    /// Seasons per G window.
    pub g_window: usize,
    pub trend_degree: usize,
    /// Restrict every command to these countries.
    pub countries: Option<Vec<String>>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            default_levels: Levels::default(),
            levels: Vec::new(),
            g_window: 5,
            trend_degree: 2,
            countries: None,
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|message| Error::Config { path: path.into(), message })
    }

    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let config: Config = serde_json::from_str(text).map_err(|e| e.to_string())?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if self.g_window < 2 {
            return Err(format!("g_window must be at least 2, got {}", self.g_window));
        }
        for r in &self.levels {
            if r.from > r.to {
                return Err(format!("levels rule for {} has from {} after to {}", r.country, r.from, r.to));
            }
            if r.top < 1 || r.relegation < 1 {
                return Err(format!("levels rule for {} needs K >= 1 and I >= 1", r.country));
            }
        }
        if let Some(c) = &self.countries {
            if c.is_empty() {
                return Err("countries list is empty".into());
            }
        }
        Ok(())
    }

    pub fn level_table(&self) -> LevelTable {
        LevelTable {
            default: self.default_levels,
            rules: self.levels.clone(),
        }
    }

    pub fn includes(&self, country: &str) -> bool {
        self.countries.as_ref().is_none_or(|c| c.iter().any(|x| x == country))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_levels_and_defaults() {
        let c = Config::parse(r#"{"levels":[{"country":"GRE","from":1959,"to":1990,"K":2,"I":4}],"g_window":4}"#).unwrap();
        assert_eq!(c.g_window, 4);
        assert_eq!(c.trend_degree, 2);
        let t = c.level_table();
        assert_eq!(t.levels_for("GRE", 1980), Levels { top: 2, relegation: 4 });
        assert_eq!(t.levels_for("GRE", 1991), Levels { top: 3, relegation: 3 });
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(Config::parse(r#"{"g_window":1}"#).is_err());
        assert!(Config::parse(r#"{"unknown":1}"#).is_err());
        assert!(Config::parse(r#"{"levels":[{"country":"X","from":2000,"to":1999,"K":1,"I":1}]}"#).is_err());
        assert!(Config::parse("not json").is_err());
    }
}
