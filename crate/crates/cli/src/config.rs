//! Optional `key = value` config file mirroring the command-line flags.
//! Explicit flags win on conflict.

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Default, Clone)]
pub struct ConfigMap {
    entries: HashMap<String, String>,
}

impl ConfigMap {
    pub fn load(path: &Path) -> Result<ConfigMap, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let mut entries = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected key = value", lineno + 1))?;
            entries.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(ConfigMap { entries })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }
}

/// Flag value if given, otherwise the config entry, otherwise `None`.
pub fn pick<T: FromStr + Clone>(
    flag: &Option<T>,
    config: &ConfigMap,
    key: &str,
) -> Result<Option<T>, String> {
    if let Some(v) = flag {
        return Ok(Some(v.clone()));
    }
    match config.raw(key) {
        Some(text) => text
            .parse::<T>()
            .map(Some)
            .map_err(|_| format!("config `{key}`: cannot parse `{text}`")),
        None => Ok(None),
    }
}

pub fn required<T>(value: Option<T>, key: &str) -> Result<T, String> {
    value.ok_or_else(|| format!("missing required parameter `{key}` (flag or config)"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_precedence() {
        let mut file = std::env::temp_dir();
        file.push(format!("iongate-config-test-{}.cfg", std::process::id()));
        std::fs::write(&file, "sequence = N9o  # comment\n\n v0 = 4\n").unwrap();
        let cfg = ConfigMap::load(&file).unwrap();
        assert_eq!(cfg.raw("sequence"), Some("N9o"));
        let flag: Option<String> = Some("N5".into());
        assert_eq!(pick(&flag, &cfg, "sequence").unwrap().unwrap(), "N5");
        let absent: Option<String> = None;
        assert_eq!(pick(&absent, &cfg, "sequence").unwrap().unwrap(), "N9o");
        let v0: Option<usize> = None;
        assert_eq!(pick(&v0, &cfg, "v0").unwrap(), Some(4));
        std::fs::remove_file(&file).ok();
    }
}
