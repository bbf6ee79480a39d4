//! Flat `key = value` files with `[section]` headers.
//!
//! Keys before the first header live in the root section `""`. `#` starts a
//! comment line. Every key must be consumed by the reader, so a typo is an
//! error rather than a silently ignored setting.

use std::collections::BTreeMap;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    sections: BTreeMap<String, BTreeMap<String, (usize, String)>>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: BTreeMap<String, BTreeMap<String, (usize, String)>> = BTreeMap::new();
        sections.insert(String::new(), BTreeMap::new());
        let mut current = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| anyhow!("line {line_no}: unterminated section header"))?
                    .trim();
                if name.is_empty() {
                    bail!("line {line_no}: empty section name");
                }
                if sections.contains_key(name) {
                    bail!("line {line_no}: section [{name}] appears twice");
                }
                sections.insert(name.to_string(), BTreeMap::new());
                current = name.to_string();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {line_no}: expected `key = value`"))?;
            let key = key.trim();
            if key.is_empty() {
                bail!("line {line_no}: empty key");
            }
            let section = sections.get_mut(&current).expect("current section exists");
            if section.contains_key(key) {
                bail!("line {line_no}: duplicate key `{key}`");
            }
            section.insert(key.to_string(), (line_no, value.trim().to_string()));
        }
        Ok(Self { sections })
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    /// Removes and returns a raw value.
    pub fn take(&mut self, section: &str, key: &str) -> Option<String> {
        self.sections.get_mut(section)?.remove(key).map(|(_, v)| v)
    }

    pub fn take_parsed<T>(&mut self, section: &str, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        match self.take(section, key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| anyhow!("{}: invalid value `{v}`: {e}", label(section, key))),
        }
    }

    pub fn require<T>(&mut self, section: &str, key: &str) -> Result<T>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        self.take_parsed(section, key)?
            .ok_or_else(|| anyhow!("missing required key {}", label(section, key)))
    }

    pub fn take_list<T>(&mut self, section: &str, key: &str) -> Result<Option<Vec<T>>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        let Some(v) = self.take(section, key) else {
            return Ok(None);
        };
        v.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<T>().map_err(|e| anyhow!("{}: invalid item `{s}`: {e}", label(section, key))))
            .collect::<Result<Vec<T>>>()
            .map(Some)
    }

    /// Errors on any key that no reader consumed.
    pub fn finish(self) -> Result<()> {
        let leftover: Vec<String> = self
            .sections
            .iter()
            .flat_map(|(s, keys)| keys.iter().map(move |(k, (line, _))| format!("{} (line {line})", label(s, k))))
            .collect();
        if leftover.is_empty() {
            Ok(())
        } else {
            Err(anyhow!("unknown keys: {}", leftover.join(", "))).context("config")
        }
    }
}

fn label(section: &str, key: &str) -> String {
    if section.is_empty() {
        key.to_string()
    } else {
        format!("[{section}] {key}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_comments() {
        let mut c = RawConfig::parse("# c\nname = x\n\n[grid]\nn = 64\nL=8.5\n[a]\nlist = 1, 2,3\n").unwrap();
        assert_eq!(c.take("", "name").as_deref(), Some("x"));
        assert_eq!(c.require::<usize>("grid", "n").unwrap(), 64);
        assert_eq!(c.require::<f64>("grid", "L").unwrap(), 8.5);
        assert_eq!(c.take_list::<u32>("a", "list").unwrap(), Some(vec![1, 2, 3]));
        assert!(c.finish().is_ok());
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(RawConfig::parse("novalue\n").is_err());
        assert!(RawConfig::parse("[open\n").is_err());
        assert!(RawConfig::parse("a = 1\na = 2\n").is_err());
        assert!(RawConfig::parse("[s]\n[s]\n").is_err());
    }

    #[test]
    fn leftover_keys_are_reported() {
        let c = RawConfig::parse("[grid]\nnn = 3\n").unwrap();
        let err = c.finish().unwrap_err();
        assert!(format!("{err:#}").contains("[grid] nn (line 2)"));
    }

    #[test]
    fn parse_errors_name_the_key() {
        let mut c = RawConfig::parse("[grid]\nn = many\n").unwrap();
        let err = c.require::<usize>("grid", "n").unwrap_err();
        assert!(err.to_string().contains("[grid] n"));
    }
}
