//! On-disk formats: the binary snapshot container, JSONL datasets, the
//! extracted-path CSV, and run manifests.
//!
//! Snapshot container layout, all integers little-endian:
//!
//! ```text
//! magic      5 bytes   "STCM1"
//! hash      32 bytes   config hash shared by every snapshot
//! u32                  snapshot count
//! u32 u32 u32          n_rx, n_tx, n_subcarriers
//! per snapshot:
//!   f64                time_s
//!   u64                seed
//!   f32 pairs          re, im for [rx][tx][subcarrier]
//! ```
//!
//! Propagation path lists are derived data and are not persisted; loaded
//! snapshots carry an empty path vector. Manifests intentionally carry no
//! timestamps so that reruns of the same command produce identical bytes.

use crate::channel::{CfrTensor, ChannelSnapshot};
use crate::fidelity::ExtractedPath;
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use thiserror::Error;

const SNAPSHOT_MAGIC: &[u8; 5] = b"STCM1";

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("bad magic, not a snapshot container")]
    BadMagic,
    #[error("truncated file: {0}")]
    Truncated(String),
    #[error("trailing bytes after the last snapshot")]
    TrailingData,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("line {line}: {source}")]
    Jsonl {
        line: usize,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("csv line {line}: {msg}")]
    Csv { line: usize, msg: String },
}

/// Lowercase hex of a byte string.
pub fn hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// SHA-256 of a file's contents.
pub fn sha256_file(path: &Path) -> Result<[u8; 32], IoError> {
    let mut f = std::fs::File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = f.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    let digest = hasher.finalize();
    let mut out = [0u8; 32];
    out.copy_from_slice(&digest);
    Ok(out)
}

/// Writes snapshots to the binary container. All snapshots must share one
/// shape and one config hash.
pub fn save_snapshots(path: &Path, snapshots: &[ChannelSnapshot]) -> Result<(), IoError> {
    let first = snapshots
        .first()
        .ok_or_else(|| IoError::Shape("cannot save zero snapshots".into()))?;
    let (n_rx, n_tx, k) = (
        first.cfr.n_rx(),
        first.cfr.n_tx(),
        first.cfr.n_subcarriers(),
    );
    for (i, s) in snapshots.iter().enumerate() {
        if (s.cfr.n_rx(), s.cfr.n_tx(), s.cfr.n_subcarriers()) != (n_rx, n_tx, k) {
            return Err(IoError::Shape(format!(
                "snapshot {i} is {}x{}x{}, expected {n_rx}x{n_tx}x{k}",
                s.cfr.n_rx(),
                s.cfr.n_tx(),
                s.cfr.n_subcarriers()
            )));
        }
        if s.config_hash != first.config_hash {
            return Err(IoError::Shape(format!(
                "snapshot {i} carries a different config hash"
            )));
        }
    }

    let mut w = BufWriter::new(std::fs::File::create(path)?);
    w.write_all(SNAPSHOT_MAGIC)?;
    w.write_all(&first.config_hash)?;
    w.write_all(&(snapshots.len() as u32).to_le_bytes())?;
    w.write_all(&(n_rx as u32).to_le_bytes())?;
    w.write_all(&(n_tx as u32).to_le_bytes())?;
    w.write_all(&(k as u32).to_le_bytes())?;
    for s in snapshots {
        w.write_all(&s.time_s.to_le_bytes())?;
        w.write_all(&s.seed.to_le_bytes())?;
        for r in 0..n_rx {
            for t in 0..n_tx {
                for ki in 0..k {
                    let v = s.cfr.at(r, t, ki);
                    w.write_all(&(v.re as f32).to_le_bytes())?;
                    w.write_all(&(v.im as f32).to_le_bytes())?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8], IoError> {
        if self.pos + n > self.data.len() {
            return Err(IoError::Truncated(what.into()));
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<u32, IoError> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64, IoError> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64, IoError> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f32(&mut self, what: &str) -> Result<f32, IoError> {
        Ok(f32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }
}

/// Reads a snapshot container. Loaded snapshots have empty path lists;
/// the frequency responses round-trip at single precision.
pub fn load_snapshots(path: &Path) -> Result<Vec<ChannelSnapshot>, IoError> {
    let data = std::fs::read(path)?;
    let mut c = Cursor { data: &data, pos: 0 };
    if c.take(5, "magic")? != SNAPSHOT_MAGIC {
        return Err(IoError::BadMagic);
    }
    let mut config_hash = [0u8; 32];
    config_hash.copy_from_slice(c.take(32, "config hash")?);
    let n_snapshots = c.u32("snapshot count")? as usize;
    let n_rx = c.u32("n_rx")? as usize;
    let n_tx = c.u32("n_tx")? as usize;
    let k = c.u32("n_subcarriers")? as usize;
    if n_rx == 0 || n_tx == 0 || k == 0 {
        return Err(IoError::Shape(format!("degenerate shape {n_rx}x{n_tx}x{k}")));
    }

    let mut out = Vec::with_capacity(n_snapshots);
    for i in 0..n_snapshots {
        let what = format!("snapshot {i}");
        let time_s = c.f64(&what)?;
        let seed = c.u64(&what)?;
        let mut values = Vec::with_capacity(n_rx * n_tx * k);
        for _ in 0..n_rx * n_tx * k {
            let re = c.f32(&what)? as f64;
            let im = c.f32(&what)? as f64;
            values.push(Complex64::new(re, im));
        }
        let cfr = CfrTensor::from_data(n_rx, n_tx, k, values)
            .map_err(|e| IoError::Shape(e.to_string()))?;
        out.push(ChannelSnapshot {
            time_s,
            paths: Vec::new(),
            cfr,
            seed,
            config_hash,
        });
    }
    if c.pos != data.len() {
        return Err(IoError::TrailingData);
    }
    Ok(out)
}

/// Writes items as one JSON document per line.
pub fn save_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<(), IoError> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a JSONL file, reporting the 1-based line of the first bad record.
/// Blank lines are skipped.
pub fn load_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, IoError> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(&line).map_err(|source| IoError::Jsonl {
            line: i + 1,
            source,
        })?;
        out.push(item);
    }
    Ok(out)
}

const PATH_CSV_HEADER: &str = "delay_s,sin_az,amplitude,phase_rad";

/// Writes extracted paths as CSV with a fixed header. Floats use the
/// shortest round-trip representation.
pub fn save_paths_csv(path: &Path, paths: &[ExtractedPath]) -> Result<(), IoError> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "{PATH_CSV_HEADER}")?;
    for p in paths {
        writeln!(w, "{},{},{},{}", p.delay_s, p.sin_az, p.amplitude, p.phase_rad)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a path CSV written by [`save_paths_csv`].
pub fn load_paths_csv(path: &Path) -> Result<Vec<ExtractedPath>, IoError> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if i == 0 {
            if line.trim() != PATH_CSV_HEADER {
                return Err(IoError::Csv {
                    line: 1,
                    msg: format!("expected header `{PATH_CSV_HEADER}`"),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(IoError::Csv {
                line: i + 1,
                msg: format!("expected 4 fields, got {}", fields.len()),
            });
        }
        let mut nums = [0.0f64; 4];
        for (slot, field) in nums.iter_mut().zip(fields.iter()) {
            *slot = field.trim().parse().map_err(|e| IoError::Csv {
                line: i + 1,
                msg: format!("bad float `{field}`: {e}"),
            })?;
        }
        out.push(ExtractedPath {
            delay_s: nums[0],
            sin_az: nums[1],
            amplitude: nums[2],
            phase_rad: nums[3],
        });
    }
    Ok(out)
}

/// Record of one tool invocation: what ran, on which inputs, producing
/// which outputs. Maps are ordered so serialization is reproducible.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub config_hash: Option<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub parameters: BTreeMap<String, String>,
    /// Input path -> SHA-256 hex.
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub inputs: BTreeMap<String, String>,
    /// Output path -> SHA-256 hex.
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub outputs: BTreeMap<String, String>,
}

impl Manifest {
    pub fn new(command: impl Into<String>) -> Self {
        Manifest {
            command: command.into(),
            ..Manifest::default()
        }
    }

    pub fn record_input(&mut self, path: &Path) -> Result<(), IoError> {
        let digest = sha256_file(path)?;
        self.inputs.insert(path.display().to_string(), hex(&digest));
        Ok(())
    }

    pub fn record_output(&mut self, path: &Path) -> Result<(), IoError> {
        let digest = sha256_file(path)?;
        self.outputs.insert(path.display().to_string(), hex(&digest));
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<(), IoError> {
        let mut body = serde_json::to_string_pretty(self)?;
        body.push('\n');
        std::fs::write(path, body)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, IoError> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::SimConfig;

    fn snapshot(time_s: f64, seed: u64, fill: f64) -> ChannelSnapshot {
        let values: Vec<Complex64> = (0..2 * 1 * 4)
            .map(|i| Complex64::new(fill + i as f64 * 0.25, -0.5 * i as f64))
            .collect();
        ChannelSnapshot {
            time_s,
            paths: Vec::new(),
            cfr: CfrTensor::from_data(2, 1, 4, values).unwrap(),
            seed,
            config_hash: [7u8; 32],
        }
    }

    #[test]
    fn snapshot_container_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("snaps.bin");
        let snaps = vec![snapshot(0.0, 9, 1.0), snapshot(1e-3, 9, -2.0)];
        save_snapshots(&path, &snaps).unwrap();
        let back = load_snapshots(&path).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].config_hash, [7u8; 32]);
        assert_eq!(back[1].time_s, 1e-3);
        assert_eq!(back[0].seed, 9);
        for (a, b) in snaps.iter().zip(back.iter()) {
            for r in 0..2 {
                for k in 0..4 {
                    let (x, y) = (a.cfr.at(r, 0, k), b.cfr.at(r, 0, k));
                    assert_eq!(x.re as f32, y.re as f32);
                    assert_eq!(x.im as f32, y.im as f32);
                }
            }
        }
        assert!(back[0].paths.is_empty());
    }

    #[test]
    fn snapshot_save_is_idempotent_after_one_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("a.bin");
        let p2 = dir.path().join("b.bin");
        save_snapshots(&p1, &[snapshot(0.0, 1, 0.123456789123)]).unwrap();
        let loaded = load_snapshots(&p1).unwrap();
        save_snapshots(&p2, &loaded).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    }

    #[test]
    fn snapshot_container_rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.bin");
        std::fs::write(&path, b"NOPE!").unwrap();
        assert!(matches!(load_snapshots(&path), Err(IoError::BadMagic)));

        // Valid header then cut mid-snapshot.
        let good = dir.path().join("good.bin");
        save_snapshots(&good, &[snapshot(0.0, 1, 1.0)]).unwrap();
        let bytes = std::fs::read(&good).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
        assert!(matches!(load_snapshots(&path), Err(IoError::Truncated(_))));

        let mut extended = bytes.clone();
        extended.push(0);
        std::fs::write(&path, &extended).unwrap();
        assert!(matches!(load_snapshots(&path), Err(IoError::TrailingData)));
    }

    #[test]
    fn mixed_shapes_cannot_be_saved_together() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mix.bin");
        let a = snapshot(0.0, 1, 1.0);
        let mut b = snapshot(1.0, 1, 1.0);
        b.cfr = CfrTensor::zeros(3, 1, 4);
        assert!(matches!(
            save_snapshots(&path, &[a, b]),
            Err(IoError::Shape(_))
        ));
    }

    #[test]
    fn jsonl_round_trip_and_line_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("items.jsonl");
        let items = vec![SimConfig::default(), SimConfig { seed: 5, ..SimConfig::default() }];
        save_jsonl(&path, &items).unwrap();
        let back: Vec<SimConfig> = load_jsonl(&path).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[1].seed, 5);

        let mut text = std::fs::read_to_string(&path).unwrap();
        text.push_str("{oops\n");
        std::fs::write(&path, text).unwrap();
        match load_jsonl::<SimConfig>(&path) {
            Err(IoError::Jsonl { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected a line error, got {other:?}"),
        }
    }

    #[test]
    fn path_csv_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("paths.csv");
        let paths = vec![
            ExtractedPath {
                delay_s: 1.25e-8,
                sin_az: -0.375,
                amplitude: 3.0e-6,
                phase_rad: 1.5707963267948966,
            },
            ExtractedPath {
                delay_s: 0.0,
                sin_az: 0.0,
                amplitude: 0.0,
                phase_rad: 0.0,
            },
        ];
        save_paths_csv(&path, &paths).unwrap();
        let back = load_paths_csv(&path).unwrap();
        assert_eq!(paths, back);
    }

    #[test]
    fn path_csv_rejects_malformed_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("paths.csv");
        std::fs::write(&path, "delay_s,sin_az,amplitude,phase_rad\n1,2,3\n").unwrap();
        assert!(matches!(
            load_paths_csv(&path),
            Err(IoError::Csv { line: 2, .. })
        ));
        std::fs::write(&path, "wrong,header\n").unwrap();
        assert!(matches!(
            load_paths_csv(&path),
            Err(IoError::Csv { line: 1, .. })
        ));
    }

    #[test]
    fn manifest_round_trips_and_is_stable() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("input.bin");
        std::fs::write(&input, b"hello").unwrap();

        let mut m = Manifest::new("synth");
        m.seed = Some(42);
        m.parameters.insert("snapshots".into(), "100".into());
        m.record_input(&input).unwrap();

        let p1 = dir.path().join("m1.json");
        let p2 = dir.path().join("m2.json");
        m.save(&p1).unwrap();
        m.save(&p2).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
        assert_eq!(Manifest::load(&p1).unwrap(), m);

        // sha256("hello")
        assert_eq!(
            m.inputs.values().next().unwrap(),
            "2cf24dba5fb0a30e26e83b2ac5b9e29e1b161e5c1fa7425e73043362938b9824"
        );
    }

    #[test]
    fn hex_is_lowercase_and_padded() {
        assert_eq!(hex(&[0x00, 0x0f, 0xab]), "000fab");
    }
}
