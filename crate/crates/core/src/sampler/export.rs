//! Point-set export: little-endian `f64` coordinates plus a JSON sidecar,
//! or CSV with one point per row.
//!
//! For `points.bin` the sidecar is written to `points.bin.json`:
//!
//! ```json
//! {"domain": {...}, "N": 1000, "dim": 3,
//!  "seed": {"master_seed": 7, "stream_id": 0},
//!  "generator": "rand_chacha::ChaCha8Rng 0.9",
//!  "certified_mesh": 0.01}
//! ```
//!
//! `seed` is absent for probe nets and `certified_mesh` for sample sets.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::rng::{SeedSpec, GENERATOR_NAME, GENERATOR_VERSION};
use crate::error::{Error, Result};
use crate::point::PointSet;
use crate::spaces::DomainModel;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub domain: DomainModel,
    #[serde(rename = "N")]
    pub n: usize,
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<SeedSpec>,
    pub generator: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certified_mesh: Option<f64>,
}

impl Sidecar {
    pub fn for_points(
        domain: &DomainModel,
        points: &PointSet,
        seed: Option<SeedSpec>,
        certified_mesh: Option<f64>,
    ) -> Self {
        Sidecar {
            domain: domain.clone(),
            n: points.len(),
            dim: points.dim(),
            seed,
            generator: format!("{GENERATOR_NAME} {GENERATOR_VERSION}"),
            certified_mesh,
        }
    }
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn write_binary(path: &Path, points: &PointSet, sidecar: &Sidecar) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for c in points.flat() {
        w.write_all(&c.to_le_bytes())?;
    }
    w.flush()?;
    std::fs::write(sidecar_path(path), serde_json::to_string_pretty(sidecar)?)?;
    Ok(())
}

pub fn read_binary(path: &Path) -> Result<(PointSet, Sidecar)> {
    let sidecar: Sidecar = serde_json::from_str(&std::fs::read_to_string(sidecar_path(path))?)?;
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() != sidecar.n * sidecar.dim * 8 {
        return Err(Error::InvalidArgument(format!(
            "{} holds {} bytes, sidecar announces {} points of dimension {}",
            path.display(),
            bytes.len(),
            sidecar.n,
            sidecar.dim
        )));
    }
    let coords = bytes.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())).collect();
    Ok((PointSet::from_flat(sidecar.dim, coords), sidecar))
}

pub fn write_csv(path: &Path, points: &PointSet) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let header: Vec<String> = (0..points.dim()).map(|k| format!("x{k}")).collect();
    writeln!(w, "{}", header.join(","))?;
    for p in points.iter() {
        let row: Vec<String> = p.iter().map(|c| format!("{c:?}")).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a CSV written by [`write_csv`].
pub fn read_csv(path: &Path) -> Result<PointSet> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();
    let header = lines.next().ok_or_else(|| Error::InvalidArgument("empty csv".into()))??;
    let dim = header.split(',').count();
    let mut set = PointSet::new(dim);
    for line in lines {
        let line = line?;
        let row: std::result::Result<Vec<f64>, _> = line.split(',').map(str::parse).collect();
        let row = row.map_err(|e| Error::InvalidArgument(format!("bad csv value: {e}")))?;
        if row.len() != dim {
            return Err(Error::InvalidArgument("ragged csv row".into()));
        }
        set.push(&row);
    }
    Ok(set)
}
