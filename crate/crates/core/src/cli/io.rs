use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::config::{sha256_hex, OutputFile, RunManifest};
use crate::error::{Error, Result};
use crate::ratio::{self, Prob, Ratio};
use crate::sets::{decode_compact, NatSet};

/// Destination of a run: a directory (with a manifest) or stdout.
pub struct Output {
    dir: Option<PathBuf>,
    written: Vec<OutputFile>,
}

impl Output {
    pub fn new(dir: Option<PathBuf>) -> Result<Self> {
        if let Some(d) = &dir {
            std::fs::create_dir_all(d).map_err(|e| Error::Parse(format!("{}: {e}", d.display())))?;
        }
        Ok(Output { dir, written: Vec::new() })
    }

    pub fn is_stdout(&self) -> bool {
        self.dir.is_none()
    }

    /// Writes `name` into the output directory; a no-op on stdout runs.
    pub fn file(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let Some(dir) = &self.dir else { return Ok(()) };
        let path = dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        self.written.push(OutputFile { file: name.into(), sha256: sha256_hex(bytes) });
        Ok(())
    }

    /// Prints `bytes` when writing to stdout.
    pub fn stdout(&self, bytes: &[u8]) -> Result<()> {
        if self.dir.is_none() {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| Error::Parse(format!("stdout: {e}")))?;
        }
        Ok(())
    }

    pub fn finish(&mut self, mut manifest: RunManifest) -> Result<()> {
        if self.dir.is_none() {
            return Ok(());
        }
        manifest.outputs = std::mem::take(&mut self.written);
        let text = serde_json::to_vec_pretty(&manifest).map_err(|e| Error::Parse(e.to_string()))?;
        self.file("manifest.json", &text)?;
        self.written.clear();
        Ok(())
    }
}

pub fn to_json<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut text = serde_json::to_vec_pretty(v).map_err(|e| Error::Parse(e.to_string()))?;
    text.push(b'\n');
    Ok(text)
}

pub fn to_csv<T: Serialize>(rows: &[T], header: &[&str]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header).map_err(|e| Error::Parse(e.to_string()))?;
    for r in rows {
        w.serialize(r).map_err(|e| Error::Parse(e.to_string()))?;
    }
    w.into_inner().map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn parse_ratio(text: &str, what: &str) -> Result<Ratio> {
    ratio::parse(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

/// Instance JSON. Sets are `{lo, hi, members}` objects or compact strings;
/// rationals are numbers or `"a/b"` strings.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default, with = "opt_set", skip_serializing_if = "Option::is_none")]
    pub a: Option<NatSet>,
    #[serde(default, with = "opt_set", skip_serializing_if = "Option::is_none")]
    pub x: Option<NatSet>,
    #[serde(default, with = "opt_set", skip_serializing_if = "Option::is_none")]
    pub y: Option<NatSet>,
    #[serde(default, with = "opt_ratio", skip_serializing_if = "Option::is_none")]
    pub beta: Option<Ratio>,
    #[serde(default, with = "opt_ratio", skip_serializing_if = "Option::is_none")]
    pub eps: Option<Ratio>,
    #[serde(default, with = "opt_ratio", skip_serializing_if = "Option::is_none")]
    pub l: Option<Ratio>,
    #[serde(default, with = "opt_ratio", skip_serializing_if = "Option::is_none")]
    pub kappa: Option<Ratio>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Prob>,
}

impl InstanceFile {
    pub fn load(path: &Path) -> Result<Self> {
        serde_json::from_str(&read_text(path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }
}

pub fn need<T: Clone>(v: &Option<T>, name: &str) -> Result<T> {
    v.clone().ok_or_else(|| Error::Parse(format!("missing parameter {name}")))
}

/// `flag` if given, else the instance's value.
pub fn pick_ratio(flag: &Option<String>, file: &Option<Ratio>, name: &str) -> Result<Option<Ratio>> {
    match flag {
        Some(t) => parse_ratio(t, name).map(Some),
        None => Ok(file.clone()),
    }
}

mod opt_set {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<NatSet>, s: S) -> std::result::Result<S::Ok, S::Error> {
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<NatSet>, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::Null => Ok(None),
            serde_json::Value::String(s) => decode_compact(&s).map(Some).map_err(serde::de::Error::custom),
            other => NatSet::deserialize(other).map(Some).map_err(serde::de::Error::custom),
        }
    }
}

mod opt_ratio {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Ratio>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Some(r) => s.serialize_str(&ratio::display(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Ratio>, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match &v {
            serde_json::Value::Null => Ok(None),
            serde_json::Value::Number(n) => ratio::parse(&n.to_string()).map(Some),
            serde_json::Value::String(s) => ratio::parse(s).map(Some),
            _ => Err(Error::Parse(format!("expected a rational, got {v}"))),
        }
        .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::{encode_compact, Interval};

    #[test]
    fn instance_accepts_both_set_encodings() {
        let s = NatSet::from_members(Interval::first(9).unwrap(), [2, 5]).unwrap();
        let text = format!(
            r#"{{"a": "{}", "x": {{"lo": 1, "hi": 9, "members": [1,2,3,4,5,6,7,8,9]}}, "beta": "1/3", "eps": 0.25}}"#,
            encode_compact(&s)
        );
        let f: InstanceFile = serde_json::from_str(&text).unwrap();
        assert_eq!(f.a.unwrap(), s);
        assert_eq!(f.beta.unwrap(), ratio::frac(1, 3));
        assert_eq!(f.eps.unwrap(), ratio::frac(1, 4));
        assert!(serde_json::from_str::<InstanceFile>(r#"{"gamma": 1}"#).is_err());
    }
}
