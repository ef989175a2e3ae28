//! Parser for the checked-in known-answer files.

#![allow(dead_code)]

use dilithium_core::SecurityLevel;

const VECTORS: &str = include_str!("../data/reference_vectors.txt");
const SHAKE: &str = include_str!("../data/shake_vectors.txt");

pub struct Case {
    pub level: SecurityLevel,
    pub zeta: [u8; 32],
    pub msg: Vec<u8>,
    pub pk: Vec<u8>,
    pub sk: Vec<u8>,
    pub sig: Vec<u8>,
    pub attempts: u32,
}

pub struct Bulk {
    pub level: SecurityLevel,
    pub zeta: [u8; 32],
    pub count: u32,
    pub attempts: u64,
    pub digest: Vec<u8>,
}

pub struct ShakeVector {
    pub variant: u32,
    pub msg: Vec<u8>,
    pub out: Vec<u8>,
}

fn blocks(text: &str) -> Vec<(String, Vec<(String, String)>)> {
    let mut out: Vec<(String, Vec<(String, String)>)> = Vec::new();
    for line in text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
    {
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            out.push((name.to_string(), Vec::new()));
        } else {
            let (k, v) = line.split_once('=').expect("key = value");
            out.last_mut()
                .expect("block header")
                .1
                .push((k.trim().to_string(), v.trim().to_string()));
        }
    }
    out
}

fn field<'a>(fields: &'a [(String, String)], key: &str) -> &'a str {
    &fields
        .iter()
        .find(|(k, _)| k == key)
        .unwrap_or_else(|| panic!("missing {key}"))
        .1
}

fn level(fields: &[(String, String)]) -> SecurityLevel {
    SecurityLevel::from_number(field(fields, "level").parse().unwrap()).unwrap()
}

fn seed(fields: &[(String, String)]) -> [u8; 32] {
    hex::decode(field(fields, "zeta"))
        .unwrap()
        .try_into()
        .unwrap()
}

pub fn cases() -> Vec<Case> {
    blocks(VECTORS)
        .into_iter()
        .filter(|(name, _)| name == "case")
        .map(|(_, f)| Case {
            level: level(&f),
            zeta: seed(&f),
            msg: hex::decode(field(&f, "msg")).unwrap(),
            pk: hex::decode(field(&f, "pk")).unwrap(),
            sk: hex::decode(field(&f, "sk")).unwrap(),
            sig: hex::decode(field(&f, "sig")).unwrap(),
            attempts: field(&f, "attempts").parse().unwrap(),
        })
        .collect()
}

pub fn bulk() -> Vec<Bulk> {
    blocks(VECTORS)
        .into_iter()
        .filter(|(name, _)| name == "bulk")
        .map(|(_, f)| Bulk {
            level: level(&f),
            zeta: seed(&f),
            count: field(&f, "count").parse().unwrap(),
            attempts: field(&f, "attempts").parse().unwrap(),
            digest: hex::decode(field(&f, "digest")).unwrap(),
        })
        .collect()
}

pub fn shake() -> Vec<ShakeVector> {
    blocks(SHAKE)
        .into_iter()
        .map(|(name, f)| {
            let msg = match field(&f, "msg") {
                "empty" => Vec::new(),
                "a3x200" => vec![0xa3; 200],
                other => hex::decode(other).unwrap(),
            };
            ShakeVector {
                variant: name.trim_start_matches("shake").parse().unwrap(),
                msg,
                out: hex::decode(field(&f, "out")).unwrap(),
            }
        })
        .collect()
}
