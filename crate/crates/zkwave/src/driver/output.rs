//! Data-file formats. Every float is written with 17 significant digits
//! (`{:.16e}`), so files round-trip bit for bit.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, Serializer};

use crate::error::{Error, Result};
use crate::initial_data::LatticeProfile;
use crate::lattice::{IVec, LatticeSpec, ModeSet};
use crate::solver::{EnsembleStats, Welford};

pub const SPECTRUM_SCHEMA: &str = "zkwave.spectrum/1";
pub const TREES_SCHEMA: &str = "zkwave.trees/1";
pub const RESIDUAL_SCHEMA: &str = "zkwave.residual/1";
pub const BOUNDS_SCHEMA: &str = "zkwave.bounds/1";
pub const COMPARISON_SCHEMA: &str = "zkwave.comparison/1";
pub const SUMMARY_SCHEMA: &str = "zkwave.comparison-summary/1";
pub const MANIFEST_SCHEMA: &str = "zkwave.manifest/1";

pub const SPECTRUM_FILE: &str = "spectrum.jsonl";
pub const MANIFEST_FILE: &str = "manifest.json";

/// JSON formatter printing finite floats as `d.dddddddddddddddde±x`.
struct Sig17;

impl Formatter for Sig17 {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

/// One compact JSON document.
pub fn to_json_line<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, Sig17);
    value.serialize(&mut ser).map_err(|e| Error::Numerical(format!("serialization: {e}")))?;
    Ok(String::from_utf8(buf).expect("JSON is UTF-8"))
}

pub fn csv_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Header line followed by one record per line.
pub fn write_jsonl<H: Serialize, R: Serialize>(path: &Path, header: &H, rows: &[R]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{}", to_json_line(header)?)?;
    for r in rows {
        writeln!(w, "{}", to_json_line(r)?)?;
    }
    w.flush()?;
    Ok(())
}

/// `# schema` line, column header, rows.
pub fn write_csv(path: &Path, schema: &str, columns: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# {schema}")?;
    writeln!(w, "{}", columns.join(","))?;
    for r in rows {
        writeln!(w, "{}", r.join(","))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumHeader {
    pub schema: String,
    pub config_digest: String,
    pub seed: u64,
    pub members: u64,
    pub time: f64,
    pub spec: LatticeSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRecord {
    #[serde(rename = "K")]
    pub lattice: Vec<i64>,
    pub k: Vec<f64>,
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
    pub variance: f64,
    pub std_error: f64,
    pub n_in: f64,
}

pub fn write_spectrum(path: &Path, stats: &EnsembleStats, profile: &LatticeProfile) -> Result<()> {
    let spec = stats.modes.spec().clone();
    let header = SpectrumHeader {
        schema: SPECTRUM_SCHEMA.into(),
        config_digest: stats.config_digest.clone(),
        seed: stats.seed,
        members: stats.members,
        time: stats.time,
        spec: spec.clone(),
    };
    let rows: Vec<SpectrumRecord> = stats
        .modes
        .points()
        .iter()
        .zip(&stats.acc)
        .map(|(k, w)| SpectrumRecord {
            lattice: k.as_slice(spec.dim).to_vec(),
            k: spec.wave_vector(*k).0,
            count: w.count,
            mean: w.mean,
            m2: w.m2,
            variance: w.variance(),
            std_error: w.std_error(),
            n_in: profile.get(*k),
        })
        .collect();
    write_jsonl(path, &header, &rows)
}

/// Rebuild ensemble statistics from a spectrum file; rejects other schemas.
pub fn read_spectrum(path: &Path) -> Result<EnsembleStats> {
    let file = File::open(path).map_err(|_| Error::MissingInput(path.display().to_string()))?;
    let mut lines = BufReader::new(file).lines();
    let first = lines.next().ok_or_else(|| Error::MissingInput(format!("{} is empty", path.display())))??;
    let probe: serde_json::Value = serde_json::from_str(&first).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let found = probe.get("schema").and_then(|s| s.as_str()).unwrap_or("").to_string();
    if found != SPECTRUM_SCHEMA {
        return Err(Error::SchemaMismatch { expected: SPECTRUM_SCHEMA.into(), found });
    }
    let header: SpectrumHeader = serde_json::from_value(probe).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let modes = ModeSet::shared(&header.spec);
    let mut stats = EnsembleStats::new(modes.clone(), header.seed, header.time);
    stats.members = header.members;
    stats.config_digest = header.config_digest;
    let mut seen = 0;
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r: SpectrumRecord = serde_json::from_str(&line).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let i = modes
            .index_of(IVec::from_slice(&r.lattice))
            .ok_or_else(|| Error::Config(format!("{}: mode {:?} outside the lattice ball", path.display(), r.lattice)))?;
        stats.acc[i] = Welford { count: r.count, mean: r.mean, m2: r.m2 };
        seen += 1;
    }
    if seen != modes.len() {
        return Err(Error::Config(format!("{}: {} records for {} modes", path.display(), seen, modes.len())));
    }
    Ok(stats)
}
