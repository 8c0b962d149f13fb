//! Flat `key = value` configuration files.

use std::collections::BTreeMap;
use std::str::FromStr;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FlatConfig {
    entries: BTreeMap<String, String>,
}

impl FlatConfig {
    /// Blank lines and everything after `#` are ignored; repeated keys are an
    /// error.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut entries = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key = value`", no + 1))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(format!("line {}: empty key", no + 1));
            }
            if entries.insert(k.to_string(), v.trim().to_string()).is_some() {
                return Err(format!("line {}: duplicate key `{k}`", no + 1));
            }
        }
        Ok(FlatConfig { entries })
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T, String> {
        let v = self.entries.get(key).ok_or_else(|| format!("missing key `{key}`"))?;
        v.parse().map_err(|_| format!("bad value for `{key}`: {v}"))
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, String> {
        if self.entries.contains_key(key) {
            self.get(key)
        } else {
            Ok(default)
        }
    }

    /// Comma-separated list; an empty value is an empty list.
    pub fn get_list<T: FromStr>(&self, key: &str) -> Result<Vec<T>, String> {
        let v = self.entries.get(key).ok_or_else(|| format!("missing key `{key}`"))?;
        parse_list(v).map_err(|e| format!("`{key}`: {e}"))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| format!("cannot parse `{t}`")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_lists() {
        let c = FlatConfig::parse("# header\nk = 3\nratios = 1.5, 2,0.25  # trailing\n\n").unwrap();
        assert_eq!(c.get::<i64>("k").unwrap(), 3);
        assert_eq!(c.get_list::<f64>("ratios").unwrap(), vec![1.5, 2.0, 0.25]);
        assert_eq!(c.get_or("missing", 7i64).unwrap(), 7);
        assert!(c.get::<i64>("missing").is_err());
    }

    #[test]
    fn rejects_garbage() {
        assert!(FlatConfig::parse("k 3").is_err());
        assert!(FlatConfig::parse("k = 1\nk = 2").is_err());
        assert!(FlatConfig::parse(" = 2").is_err());
    }
}
