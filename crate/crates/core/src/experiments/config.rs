//! Flat `key = value` configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Keys are
//! case-insensitive and `-` is read as `_`, so `noise-variance` and
//! `noise_variance` name the same entry. Later assignments win, which is how
//! command-line overrides are layered on top of a file.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigMap {
    entries: BTreeMap<String, String>,
    source: Option<PathBuf>,
}

pub fn normalize_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('-', "_")
}

impl ConfigMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_from(text, None)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::parse_from(&text, Some(path))
    }

    fn parse_from(text: &str, path: Option<&Path>) -> Result<Self> {
        let mut map = ConfigMap {
            entries: BTreeMap::new(),
            source: path.map(Path::to_path_buf),
        };
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse {
                    path: path.map(Path::to_path_buf).unwrap_or_default(),
                    message: format!("line {}: expected key = value, got {line:?}", no + 1),
                });
            };
            let key = normalize_key(key);
            if key.is_empty() {
                return Err(Error::Parse {
                    path: path.map(Path::to_path_buf).unwrap_or_default(),
                    message: format!("line {}: empty key", no + 1),
                });
            }
            map.entries.insert(key, value.trim().to_string());
        }
        Ok(map)
    }

    /// Inserts or replaces an entry.
    pub fn set(&mut self, key: &str, value: impl Display) {
        self.entries.insert(normalize_key(key), value.to_string());
    }

    /// Parses and applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::config(assignment, "override must look like key=value"))?;
        self.set(key, value.trim());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(&normalize_key(key)).map(String::as_str)
    }

    pub fn source(&self) -> Option<&Path> {
        self.source.as_deref()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Starts typed extraction. Every key must be consumed before
    /// [`Resolver::finish`], so typos are reported instead of ignored.
    pub fn resolver(&self) -> Resolver {
        Resolver {
            remaining: self.entries.clone(),
        }
    }
}

pub struct Resolver {
    remaining: BTreeMap<String, String>,
}

impl Resolver {
    pub fn take_str(&mut self, key: &str) -> Option<String> {
        self.remaining.remove(key)
    }

    pub fn take<T>(&mut self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        match self.remaining.remove(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| Error::config(key, format!("cannot parse {v:?}: {e}"))),
        }
    }

    pub fn take_or<T>(&mut self, key: &str, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.take(key)?.unwrap_or(default))
    }

    pub fn take_bool(&mut self, key: &str, default: bool) -> Result<bool> {
        match self.remaining.remove(key) {
            None => Ok(default),
            Some(v) => parse_bool(&v).ok_or_else(|| Error::config(key, format!("expected true/false, got {v:?}"))),
        }
    }

    /// Comma-separated list.
    pub fn take_list<T>(&mut self, key: &str) -> Result<Option<Vec<T>>>
    where
        T: FromStr,
        T::Err: Display,
    {
        match self.remaining.remove(key) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<T>().map_err(|e| Error::config(key, format!("cannot parse {s:?}: {e}"))))
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }

    pub fn finish(self) -> Result<()> {
        if let Some(key) = self.remaining.keys().next() {
            let all: Vec<&str> = self.remaining.keys().map(String::as_str).collect();
            return Err(Error::config(key.clone(), format!("unknown key(s): {}", all.join(", "))));
        }
        Ok(())
    }
}

fn parse_bool(v: &str) -> Option<bool> {
    match v.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Some(true),
        "false" | "no" | "off" | "0" => Some(false),
        _ => None,
    }
}
