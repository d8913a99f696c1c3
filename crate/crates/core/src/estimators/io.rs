//! CSV persistence for [`CdfEstimate`].
//!
//! ```text
//! # M=<M> N=<visits> n=<n> seed=<seed>
//! l,u,value
//! 0,0,0
//! ...
//! ```

use std::io::{BufRead, Write};

use super::CdfEstimate;
use crate::error::{Error, Result};

pub fn write_csv<W: Write>(mut w: W, est: &CdfEstimate, seed: u64) -> Result<()> {
    writeln!(w, "# M={} N={} n={} seed={}", est.m, est.visits, est.n, seed)?;
    writeln!(w, "l,u,value")?;
    let m1 = (est.m + 1) as f64;
    for (l, v) in est.grid_values.iter().enumerate() {
        writeln!(w, "{},{},{}", l, l as f64 / m1, v)?;
    }
    Ok(())
}

/// Reads an estimate written by [`write_csv`], returning it with its seed.
pub fn read_csv<R: BufRead>(r: R) -> Result<(CdfEstimate, u64)> {
    let mut lines = r.lines();
    let meta = lines.next().ok_or_else(|| Error::Parse("empty file".into()))??;
    let meta = meta.strip_prefix("# ").ok_or_else(|| Error::Parse("missing metadata line".into()))?;
    let (mut m, mut visits, mut n, mut seed) = (None, None, None, None);
    for field in meta.split_whitespace() {
        let (key, value) = field.split_once('=').ok_or_else(|| Error::Parse(format!("bad field {field:?}")))?;
        let parsed = || value.parse::<u64>().map_err(|_| Error::Parse(format!("bad value for {key}")));
        match key {
            "M" => m = Some(parsed()? as usize),
            "N" => visits = Some(parsed()? as usize),
            "n" => n = Some(parsed()? as usize),
            "seed" => seed = Some(parsed()?),
            _ => return Err(Error::Parse(format!("unknown field {key:?}"))),
        }
    }
    let missing = |k: &str| Error::Parse(format!("metadata lacks {k}"));
    let m = m.ok_or_else(|| missing("M"))?;
    if m == 0 {
        return Err(Error::Parse("M must be positive".into()));
    }
    let header = lines.next().ok_or_else(|| Error::Parse("missing header".into()))??;
    if header.trim() != "l,u,value" {
        return Err(Error::Parse(format!("unexpected header {header:?}")));
    }
    let mut grid_values = Vec::with_capacity(m + 2);
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(Error::Parse(format!("expected 3 columns in {line:?}")));
        }
        let l: usize = cols[0].trim().parse().map_err(|_| Error::Parse(format!("bad index in {line:?}")))?;
        if l != grid_values.len() {
            return Err(Error::Parse(format!("row {l} out of order")));
        }
        let v: f64 = cols[2].trim().parse().map_err(|_| Error::Parse(format!("bad value in {line:?}")))?;
        grid_values.push(v);
    }
    if grid_values.len() != m + 2 {
        return Err(Error::Parse(format!("expected {} rows, found {}", m + 2, grid_values.len())));
    }
    let est = CdfEstimate {
        m,
        grid_values,
        visits: visits.ok_or_else(|| missing("N"))?,
        n: n.ok_or_else(|| missing("n"))?,
    };
    Ok((est, seed.ok_or_else(|| missing("seed"))?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_and_round_trip() {
        let est = CdfEstimate { m: 1, grid_values: vec![0.0, 0.1 + 0.2, 1.0], visits: 7, n: 10 };
        let mut buf = Vec::new();
        write_csv(&mut buf, &est, 42).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text, "# M=1 N=7 n=10 seed=42\nl,u,value\n0,0,0\n1,0.5,0.30000000000000004\n2,1,1\n");
        let (back, seed) = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, est);
        assert_eq!(seed, 42);
    }

    #[test]
    fn rejects_truncated_file() {
        let text = "# M=2 N=1 n=3 seed=0\nl,u,value\n0,0,0\n1,0.33,0.5\n";
        assert!(read_csv(text.as_bytes()).is_err());
        assert!(read_csv("l,u,value\n".as_bytes()).is_err());
    }
}
