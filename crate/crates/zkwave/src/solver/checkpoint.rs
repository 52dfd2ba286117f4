//! Binary field dumps: one JSON header line, then the amplitudes in lattice
//! ball order as little-endian complex64 (f32 real, f32 imaginary).

use std::io::{BufRead, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, ModeSet, SpectralField};

pub const CHECKPOINT_SCHEMA: &str = "zkwave.checkpoint/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub schema: String,
    pub dtype: String,
    pub order: String,
    pub spec: LatticeSpec,
    pub modes: usize,
    pub member: u64,
    pub seed: u64,
    pub time: f64,
}

pub fn write_checkpoint(w: &mut impl Write, field: &SpectralField, member: u64, seed: u64) -> Result<()> {
    let header = CheckpointHeader {
        schema: CHECKPOINT_SCHEMA.into(),
        dtype: "complex64-le".into(),
        order: "lattice-ball-lexicographic".into(),
        spec: field.spec().clone(),
        modes: field.values.len(),
        member,
        seed,
        time: field.time,
    };
    let line = serde_json::to_string(&header).map_err(|e| Error::Numerical(e.to_string()))?;
    w.write_all(line.as_bytes())?;
    w.write_all(b"\n")?;
    let mut buf = Vec::with_capacity(8 * field.values.len());
    for v in &field.values {
        buf.extend_from_slice(&(v.re as f32).to_le_bytes());
        buf.extend_from_slice(&(v.im as f32).to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_checkpoint(r: &mut impl BufRead) -> Result<(CheckpointHeader, SpectralField)> {
    let mut line = String::new();
    r.read_line(&mut line)?;
    let header: CheckpointHeader =
        serde_json::from_str(line.trim_end()).map_err(|e| Error::Config(format!("checkpoint header: {e}")))?;
    if header.schema != CHECKPOINT_SCHEMA {
        return Err(Error::SchemaMismatch { expected: CHECKPOINT_SCHEMA.into(), found: header.schema });
    }
    let modes = ModeSet::shared(&header.spec);
    if modes.len() != header.modes {
        return Err(Error::Config("checkpoint mode count does not match its lattice".into()));
    }
    let mut bytes = vec![0u8; 8 * header.modes];
    r.read_exact(&mut bytes)?;
    let values = bytes
        .chunks_exact(8)
        .map(|c| {
            let re = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
            let im = f32::from_le_bytes([c[4], c[5], c[6], c[7]]);
            Complex64::new(re as f64, im as f64)
        })
        .collect();
    let time = header.time;
    Ok((header, SpectralField { modes, values, time }))
}
