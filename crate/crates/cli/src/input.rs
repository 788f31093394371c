//! Input documents: `key = value` lines, overridden by command-line flags.

use std::collections::BTreeMap;
use std::path::Path;

use germtools::text::{parse_form, parse_polynomial, parse_polynomial_list, Family};
use germtools::{DifferentialForm, FoliationGerm, HypersurfaceGerm, MapGerm, Polynomial, Rational};

use crate::CliError;

const KEYS: [&str; 9] = ["dim", "map", "hypersurface", "form", "poly", "coeffs", "tau", "normal", "offset"];

#[derive(Debug, Clone, Default)]
pub struct Document {
    values: BTreeMap<String, String>,
}

impl Document {
    /// Reads `key = value` lines. Blank lines and lines starting with `#`
    /// are skipped; a key may appear once.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::validation(format!("input line {}: expected `key = value`", i + 1)));
            };
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(CliError::validation(format!("input line {}: unknown key `{key}`", i + 1)));
            }
            if values.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(CliError::validation(format!("input line {}: duplicate key `{key}`", i + 1)));
            }
        }
        Ok(Document { values })
    }

    /// Sets `key` from a flag, which wins over the file.
    pub fn set(&mut self, key: &str, value: Option<&String>) {
        if let Some(v) = value {
            self.values.insert(key.to_string(), v.clone());
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn require(&self, key: &str) -> Result<&str, CliError> {
        self.raw(key).ok_or_else(|| CliError::validation(format!("missing --{key}")))
    }

    pub fn inputs(&self) -> serde_json::Value {
        serde_json::to_value(&self.values).expect("string map")
    }

    pub fn dim(&self) -> Result<usize, CliError> {
        let s = self.require("dim")?;
        let n: usize = s.parse().map_err(|_| CliError::validation(format!("dimension `{s}` is not a positive integer")))?;
        if n == 0 {
            return Err(CliError::validation("dimension must be positive"));
        }
        Ok(n)
    }

    pub fn map(&self) -> Result<MapGerm, CliError> {
        let n = self.dim()?;
        let comps = parse_polynomial_list(self.require("map")?, n, Family::Source).map_err(|e| parse_error("map", e))?;
        if comps.len() != n {
            return Err(CliError::validation(format!("map has {} components, dimension is {n}", comps.len())));
        }
        MapGerm::new(comps).map_err(|e| CliError::validation(format!("map: {e}")))
    }

    pub fn target_polynomial(&self, key: &str) -> Result<Polynomial, CliError> {
        parse_polynomial(self.require(key)?, self.dim()?, Family::Target).map_err(|e| parse_error(key, e))
    }

    pub fn source_polynomial(&self, key: &str) -> Result<Polynomial, CliError> {
        parse_polynomial(self.require(key)?, self.dim()?, Family::Source).map_err(|e| parse_error(key, e))
    }

    pub fn hypersurface(&self) -> Result<HypersurfaceGerm, CliError> {
        HypersurfaceGerm::new(self.target_polynomial("hypersurface")?)
            .map_err(|e| CliError::validation(format!("hypersurface: {e}")))
    }

    pub fn target_form(&self, key: &str) -> Result<DifferentialForm, CliError> {
        parse_form(self.require(key)?, self.dim()?, Family::Target).map_err(|e| parse_error(key, e))
    }

    pub fn source_form(&self, key: &str) -> Result<DifferentialForm, CliError> {
        parse_form(self.require(key)?, self.dim()?, Family::Source).map_err(|e| parse_error(key, e))
    }

    pub fn foliation(&self) -> Result<FoliationGerm, CliError> {
        FoliationGerm::new(self.target_form("form")?).map_err(|e| CliError::validation(format!("form: {e}")))
    }

    pub fn coeffs(&self) -> Result<Vec<Polynomial>, CliError> {
        parse_polynomial_list(self.require("coeffs")?, self.dim()?, Family::Target).map_err(|e| parse_error("coeffs", e))
    }

    pub fn rationals(&self, key: &str) -> Result<Option<Vec<Rational>>, CliError> {
        let Some(s) = self.raw(key) else {
            return Ok(None);
        };
        s.split(',')
            .map(|part| {
                part.trim().parse::<Rational>().map_err(|_| CliError::validation(format!("{key}: `{}` is not a rational", part.trim())))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }
}

fn parse_error(key: &str, e: germtools::text::ParseError) -> CliError {
    CliError::validation(format!("{key}: {}:{}: {}", e.line, e.column, e.message))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documents() {
        let mut d = Document::parse("# comment\ndim = 2\nmap = x1^2, x2\n\nhypersurface = y1*y2\n").unwrap();
        assert_eq!(d.dim().unwrap(), 2);
        assert_eq!(d.map().unwrap().dim(), 2);
        d.set("hypersurface", Some(&"y1^2 - y2^3".to_string()));
        assert_eq!(d.raw("hypersurface"), Some("y1^2 - y2^3"));
        assert!(Document::parse("dim 2").is_err());
        assert!(Document::parse("colour = red").is_err());
        assert!(Document::parse("dim = 2\ndim = 3").is_err());
    }

    #[test]
    fn component_count_is_checked() {
        let d = Document::parse("dim = 2\nmap = x1").unwrap();
        assert!(d.map().is_err());
    }
}
