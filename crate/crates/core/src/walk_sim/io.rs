//! ZPath persistence.
//!
//! CSV layout:
//!
//! ```text
//! # n=<n> T_n=<steps> seed=<seed> spec=<json>
//! # engine=<walk|branching>
//! x,z
//! 0,0
//! 1,<z_1>
//! ...
//! ```
//!
//! The binary batch format is a concatenation of records, each a sequence of
//! little-endian `u64`: `n, T_n, seed, engine (0 walk, 1 branching), z_0 .. z_n`.

use std::io::{BufRead, Read, Write};

use super::{TimeSource, ZPath};
use crate::env_model::EnvSpec;
use crate::error::{Error, Result};

/// A path together with the provenance written next to it.
#[derive(Debug, Clone, PartialEq)]
pub struct ZPathRecord {
    pub path: ZPath,
    pub seed: u64,
    pub spec: Option<EnvSpec>,
}

pub fn write_csv<W: Write>(mut w: W, path: &ZPath, seed: u64, spec: &EnvSpec) -> Result<()> {
    writeln!(w, "# n={} T_n={} seed={} spec={}", path.n, path.hitting_time, seed, spec.to_json())?;
    let engine = match path.time_source {
        TimeSource::Walk => "walk",
        TimeSource::Branching => "branching",
    };
    writeln!(w, "# engine={engine}")?;
    writeln!(w, "x,z")?;
    for (x, z) in path.z.iter().enumerate() {
        writeln!(w, "{x},{z}")?;
    }
    Ok(())
}

fn parse_u64(key: &str, v: &str) -> Result<u64> {
    v.parse().map_err(|_| Error::Parse(format!("{key}: `{v}` is not an unsigned integer")))
}

pub fn read_csv<R: BufRead>(r: R) -> Result<ZPathRecord> {
    let mut n = None;
    let mut hitting_time = None;
    let mut seed = 0;
    let mut spec = None;
    let mut time_source = TimeSource::Walk;
    let mut z = Vec::new();
    let mut header_seen = false;
    for line in r.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            let meta = meta.trim();
            let (head, spec_json) = match meta.find("spec=") {
                Some(pos) => (&meta[..pos], Some(&meta[pos + 5..])),
                None => (meta, None),
            };
            if let Some(js) = spec_json {
                spec = Some(EnvSpec::from_json(js.trim())?);
            }
            for kv in head.split_whitespace() {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("bad metadata field `{kv}`")))?;
                match k {
                    "n" => n = Some(parse_u64(k, v)? as usize),
                    "T_n" => hitting_time = Some(parse_u64(k, v)?),
                    "seed" => seed = parse_u64(k, v)?,
                    "engine" => {
                        time_source = match v {
                            "walk" => TimeSource::Walk,
                            "branching" => TimeSource::Branching,
                            _ => return Err(Error::Parse(format!("unknown engine `{v}`"))),
                        }
                    }
                    _ => {}
                }
            }
            continue;
        }
        if !header_seen {
            if line != "x,z" {
                return Err(Error::Parse(format!("expected header `x,z`, found `{line}`")));
            }
            header_seen = true;
            continue;
        }
        let (x, v) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("bad row `{line}`")))?;
        let x = parse_u64("x", x.trim())? as usize;
        if x != z.len() {
            return Err(Error::Parse(format!("row x={x} out of order")));
        }
        z.push(parse_u64("z", v.trim())?);
    }
    let n = n.ok_or_else(|| Error::Parse("missing n".into()))?;
    let hitting_time = hitting_time.ok_or_else(|| Error::Parse("missing T_n".into()))?;
    if z.len() != n + 1 {
        return Err(Error::Parse(format!("expected {} rows, found {}", n + 1, z.len())));
    }
    if z[0] != 0 {
        return Err(Error::Parse("z[0] must be 0".into()));
    }
    Ok(ZPathRecord { path: ZPath { n, hitting_time, z, time_source }, seed, spec })
}

pub fn write_binary<W: Write>(mut w: W, path: &ZPath, seed: u64) -> Result<()> {
    let engine = match path.time_source {
        TimeSource::Walk => 0u64,
        TimeSource::Branching => 1,
    };
    for v in [path.n as u64, path.hitting_time, seed, engine].iter().chain(&path.z) {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

/// Reads every record of a binary batch.
pub fn read_binary<R: Read>(mut r: R) -> Result<Vec<ZPathRecord>> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() % 8 != 0 {
        return Err(Error::Parse("binary batch length is not a multiple of 8".into()));
    }
    let words: Vec<u64> = bytes
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < words.len() {
        if pos + 4 > words.len() {
            return Err(Error::Parse("truncated record header".into()));
        }
        let n = words[pos] as usize;
        let hitting_time = words[pos + 1];
        let seed = words[pos + 2];
        let time_source = match words[pos + 3] {
            0 => TimeSource::Walk,
            1 => TimeSource::Branching,
            e => return Err(Error::Parse(format!("unknown engine code {e}"))),
        };
        let start = pos + 4;
        let end = start + n + 1;
        if end > words.len() {
            return Err(Error::Parse("truncated record body".into()));
        }
        let z = words[start..end].to_vec();
        out.push(ZPathRecord { path: ZPath { n, hitting_time, z, time_source }, seed, spec: None });
        pos = end;
    }
    Ok(out)
}
