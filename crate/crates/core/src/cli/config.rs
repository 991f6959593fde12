use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::audit::{l_default, AuditConfig};
use crate::error::{Error, Result};

/// Run configuration read from a `key = value` text file.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Config {
    pub audit: AuditConfig,
    pub trials: u64,
    pub confidence: f64,
    pub seed: u64,
    /// SHA-256 of the file contents, or of [`Config::default_text`].
    pub hash: String,
}

impl Config {
    pub fn default_text() -> String {
        format!(
            "# constant in the main p-range; desk choice, not pinned\n\
             C = 16\n\
             # container constant; ceiling of 8 r/(1-r), r = sqrt(1 - 2^-11)\n\
             L = {}\n\
             # middle-window constant; desk choice, not pinned\n\
             K0 = 8192\n\
             trials = 10000\n\
             confidence = 0.95\n\
             seed = 0\n",
            l_default()
        )
    }

    pub fn parse(text: &str) -> Result<Config> {
        let mut audit = AuditConfig::default();
        let mut trials = 10_000;
        let mut confidence = 0.95;
        let mut seed = 0;
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("config line {}: expected key = value", no + 1)))?;
            let value = value.trim();
            let num = |v: &str| v.parse::<f64>().map_err(|_| Error::Parse(format!("config line {}: bad number {v:?}", no + 1)));
            let int = |v: &str| v.parse::<u64>().map_err(|_| Error::Parse(format!("config line {}: bad integer {v:?}", no + 1)));
            match key.trim() {
                "C" => audit.c = num(value)?,
                "L" => audit.l = num(value)?,
                "K0" => audit.k0 = num(value)?,
                "trials" => trials = int(value)?,
                "confidence" => confidence = num(value)?,
                "seed" => seed = int(value)?,
                other => return Err(Error::Parse(format!("config line {}: unknown key {other:?}", no + 1))),
            }
        }
        if !(audit.c > 0.0 && audit.l > 0.0 && audit.k0 > 0.0) {
            return Err(Error::Parse("C, L and K0 must be positive".into()));
        }
        if !(confidence > 0.0 && confidence < 1.0) {
            return Err(Error::Parse(format!("confidence {confidence} must lie in (0, 1)")));
        }
        Ok(Config { audit, trials, confidence, seed, hash: sha256_hex(text.as_bytes()) })
    }

    pub fn load(path: Option<&Path>) -> Result<Config> {
        match path {
            None => Config::parse(&Config::default_text()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
                Config::parse(&text)
            }
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct OutputFile {
    pub file: String,
    pub sha256: String,
}

/// Written next to every set of outputs.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub seed: Option<u64>,
    pub config_hash: String,
    pub tool_version: String,
    /// Seconds since the Unix epoch; `SOURCE_DATE_EPOCH` wins when set.
    pub timestamp: u64,
    pub outputs: Vec<OutputFile>,
}

impl RunManifest {
    pub fn new(command: &str, parameters: serde_json::Value, seed: Option<u64>, cfg: &Config) -> Self {
        let timestamp = std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or_else(|| {
                std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0)
            });
        RunManifest {
            command: command.into(),
            parameters,
            seed,
            config_hash: cfg.hash.clone(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            timestamp,
            outputs: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_text_round_trips() {
        let c = Config::parse(&Config::default_text()).unwrap();
        assert_eq!(c.audit, AuditConfig::default());
        assert_eq!((c.trials, c.seed), (10_000, 0));
        assert_eq!(c.hash.len(), 64);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(Config::parse("D = 3").is_err());
        assert!(Config::parse("C = -1").is_err());
        assert!(Config::parse("trials = many").is_err());
        let c = Config::parse("C = 32 # larger\n\n").unwrap();
        assert_eq!(c.audit.c, 32.0);
    }
}
