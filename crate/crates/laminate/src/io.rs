//! JSON-lines persistence, one laminate per line.

use crate::{Laminate, LaminateError};
use std::io::{BufRead, Write};

pub fn write_jsonl<W: Write>(mut out: W, lams: &[Laminate]) -> std::io::Result<()> {
    for l in lams {
        serde_json::to_writer(&mut out, l)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<Laminate>, LaminateError> {
    let mut v = Vec::new();
    for line in input.lines() {
        let line = line.map_err(|e| LaminateError::Parse(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        v.push(serde_json::from_str(&line).map_err(|e| LaminateError::Parse(e.to_string()))?);
    }
    Ok(v)
}
