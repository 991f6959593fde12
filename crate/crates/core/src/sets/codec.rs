//! JSON and compact text encodings of [`NatSet`].

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};

use super::{Interval, NatSet};
use crate::error::{Error, Result};

/// `{"lo": .., "hi": .., "members": [..]}` with strictly increasing members.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetJson {
    pub lo: u64,
    pub hi: u64,
    pub members: Vec<u64>,
}

impl SetJson {
    pub fn into_set(self) -> Result<NatSet> {
        let u = Interval::new(self.lo, self.hi)?;
        NatSet::from_sorted(u, &self.members)
    }
}

impl From<&NatSet> for SetJson {
    fn from(s: &NatSet) -> Self {
        SetJson { lo: s.universe().lo(), hi: s.universe().hi(), members: s.to_vec() }
    }
}

impl Serialize for NatSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SetJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for NatSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        SetJson::deserialize(d)?.into_set().map_err(serde::de::Error::custom)
    }
}

/// `"lo-hi:<base64 of the little-endian bit vector>"`.
pub fn encode_compact(s: &NatSet) -> String {
    let nbytes = s.universe().size().div_ceil(8) as usize;
    let bytes: Vec<u8> = s.words().iter().flat_map(|w| w.to_le_bytes()).take(nbytes).collect();
    format!("{}-{}:{}", s.universe().lo(), s.universe().hi(), STANDARD.encode(bytes))
}

pub fn decode_compact(text: &str) -> Result<NatSet> {
    let bad = |why: &str| Error::Parse(format!("compact set {text:?}: {why}"));
    let (range, payload) = text.trim().split_once(':').ok_or_else(|| bad("missing ':'"))?;
    let (lo, hi) = range.split_once('-').ok_or_else(|| bad("missing '-'"))?;
    let lo: u64 = lo.parse().map_err(|_| bad("bad lower end"))?;
    let hi: u64 = hi.parse().map_err(|_| bad("bad upper end"))?;
    let u = Interval::new(lo, hi)?;
    let bytes = STANDARD.decode(payload).map_err(|_| bad("bad base64"))?;
    if bytes.len() != u.size().div_ceil(8) as usize {
        return Err(bad("payload length does not match the universe"));
    }
    let mut words = vec![0u64; u.size().div_ceil(64) as usize];
    for (i, b) in bytes.iter().enumerate() {
        words[i / 8] |= (*b as u64) << (8 * (i % 8));
    }
    let rem = u.size() % 64;
    if rem != 0 && words.last().is_some_and(|w| w >> rem != 0) {
        return Err(bad("bits set beyond the universe"));
    }
    Ok(NatSet::from_words(u, words))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_validation() {
        let s = NatSet::from_members(Interval::new(3, 90).unwrap(), [3, 7, 64, 90]).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"lo":3,"hi":90,"members":[3,7,64,90]}"#);
        let back: NatSet = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<NatSet>(r#"{"lo":1,"hi":9,"members":[4,2]}"#).is_err());
        assert!(serde_json::from_str::<NatSet>(r#"{"lo":1,"hi":9,"members":[10]}"#).is_err());
        assert!(serde_json::from_str::<NatSet>(r#"{"lo":0,"hi":9,"members":[]}"#).is_err());
    }

    #[test]
    fn compact_round_trip() {
        let s = NatSet::from_members(Interval::new(5, 141).unwrap(), [5, 6, 77, 141]).unwrap();
        let c = encode_compact(&s);
        assert!(c.starts_with("5-141:"));
        assert_eq!(decode_compact(&c).unwrap(), s);
        assert!(decode_compact("5-141:AAAA").is_err());
        assert!(decode_compact("nonsense").is_err());
    }
}
