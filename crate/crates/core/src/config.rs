//! Configuration files (TOML, or JSON by extension) with `key=value`
//! overrides applied on top.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::regions::DEFAULT_GRID_STEP;
use crate::{Error, Result};

fn parse_file(path: &Path) -> Result<toml::Table> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        let v: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        match toml::Value::try_from(v) {
            Ok(toml::Value::Table(t)) => Ok(t),
            Ok(_) => Err(Error::Config(format!(
                "{}: top level must be an object",
                path.display()
            ))),
            Err(e) => Err(Error::Config(format!("{}: {e}", path.display()))),
        }
    } else {
        text.parse::<toml::Table>()
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

/// Parses the right-hand side as a TOML value, falling back to a bare string.
fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

/// Sets a dotted `key=value` in `table`, creating intermediate tables.
pub fn apply_override(table: &mut toml::Table, kv: &str) -> Result<()> {
    let (key, raw) = kv
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override '{kv}' is not key=value")))?;
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("override '{kv}' has an empty key")));
    }
    let mut cur = table;
    for p in &parts[..parts.len() - 1] {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override '{kv}': '{p}' is not a table")))?;
    }
    cur.insert(parts[parts.len() - 1].to_string(), parse_value(raw.trim()));
    Ok(())
}

/// File values (if any), then overrides, deserialised into `T`; missing fields
/// take `T`'s defaults when `T` uses `#[serde(default)]`.
pub fn load<T: DeserializeOwned>(path: Option<&Path>, overrides: &[String]) -> Result<T> {
    let table = match path {
        Some(p) => parse_file(p)?,
        None => toml::Table::new(),
    };
    with_overrides(table, overrides)
}

/// Like [`load`] for in-memory TOML text.
pub fn load_str<T: DeserializeOwned>(text: &str, overrides: &[String]) -> Result<T> {
    let table = text.parse::<toml::Table>().map_err(|e| Error::Config(e.to_string()))?;
    with_overrides(table, overrides)
}

fn with_overrides<T: DeserializeOwned>(mut table: toml::Table, overrides: &[String]) -> Result<T> {
    for kv in overrides {
        apply_override(&mut table, kv)?;
    }
    T::deserialize(toml::Value::Table(table)).map_err(|e| Error::Config(e.to_string()))
}

/// Inputs of the `region` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegionConfig {
    pub snr1_db: f64,
    pub snr2_db: f64,
    pub inr1_db: f64,
    pub inr2_db: f64,
    /// Any of `ian`, `sd`, `snd`, `hk`, `orthogonal`, `noma_bc`.
    pub strategies: Vec<String>,
    pub grid_step: f64,
}

impl Default for RegionConfig {
    fn default() -> Self {
        Self {
            snr1_db: 10.0,
            snr2_db: 10.0,
            inr1_db: 10.0,
            inr2_db: 10.0,
            strategies: ["ian", "sd", "snd", "hk", "orthogonal"].map(String::from).to_vec(),
            grid_step: DEFAULT_GRID_STEP,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syssim::{Scheme, SimConfig};
    use std::io::Write;

    #[test]
    fn overrides_win_over_file() {
        let mut f = tempfile::Builder::new().suffix(".toml").tempfile().unwrap();
        writeln!(f, "k = 7\nn = 7\ndrops = 5\nschemes = [\"four_color\"]").unwrap();
        let cfg: SimConfig = load(Some(f.path()), &["drops=9".into(), "seed = 3".into()]).unwrap();
        assert_eq!((cfg.k, cfg.n, cfg.drops, cfg.seed), (7, 7, 9, 3));
        assert_eq!(cfg.schemes, vec![Scheme::FourColor]);
        assert_eq!(cfg.users_per_beam, SimConfig::default().users_per_beam);
    }

    #[test]
    fn json_accepted() {
        let mut f = tempfile::Builder::new().suffix(".json").tempfile().unwrap();
        write!(f, r#"{{"snr1_db": 5.0, "strategies": ["snd"]}}"#).unwrap();
        let cfg: RegionConfig = load(Some(f.path()), &[]).unwrap();
        assert_eq!(cfg.snr1_db, 5.0);
        assert_eq!(cfg.strategies, vec!["snd".to_string()]);
    }

    #[test]
    fn bare_strings_and_nested_keys() {
        let mut t = toml::Table::new();
        apply_override(&mut t, "decoder=sud").unwrap();
        apply_override(&mut t, "a.b=2").unwrap();
        assert_eq!(t["decoder"].as_str(), Some("sud"));
        assert_eq!(t["a"]["b"].as_integer(), Some(2));
        assert!(apply_override(&mut t, "novalue").is_err());
        assert!(apply_override(&mut t, "decoder.x=1").is_err());
    }

    #[test]
    fn bad_inputs_are_config_errors() {
        assert!(matches!(
            load::<SimConfig>(None, &["bogus=1".into()]),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            load::<SimConfig>(Some(Path::new("/nonexistent/x.toml")), &[]),
            Err(Error::Io { .. })
        ));
    }
}
