use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{DataError, FeaturedJet, JetRecord, NUM_FEATURES};

/// Leading bytes of a featurized-jet cache file.
pub const CACHE_MAGIC: &[u8; 5] = b"QJET1";

/// Reads one jet per non-blank line. Errors carry the 1-based line number.
pub fn read_jsonl(path: &Path) -> Result<Vec<JetRecord>, DataError> {
    let reader = BufReader::new(File::open(path)?);
    let mut jets = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| DataError::Parse { line: k + 1, message };
        let jet: JetRecord = serde_json::from_str(&line).map_err(|e| parse_err(e.to_string()))?;
        jet.validate().map_err(|e| parse_err(e.to_string()))?;
        jets.push(jet);
    }
    Ok(jets)
}

pub fn write_jsonl(path: &Path, jets: &[JetRecord]) -> Result<(), DataError> {
    let mut w = BufWriter::new(File::create(path)?);
    for jet in jets {
        serde_json::to_writer(&mut w, jet).map_err(std::io::Error::from)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Layout: magic, `u32` nodes per jet, `u32` features per node, `u64` record
/// count, the eight `f64` column divisors, then per record a `u8` label
/// followed by `h`, `x` and `a` as row-major `f64`. All little-endian.
pub fn write_cache(path: &Path, jets: &[FeaturedJet], scale: &[f64; NUM_FEATURES]) -> Result<(), DataError> {
    let n = jets.first().map_or(0, FeaturedJet::n_nodes);
    if let Some(bad) = jets.iter().find(|j| j.n_nodes() != n) {
        return Err(DataError::Cache(format!("mixed node counts {n} and {}", bad.n_nodes())));
    }
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(CACHE_MAGIC)?;
    w.write_all(&(n as u32).to_le_bytes())?;
    w.write_all(&(NUM_FEATURES as u32).to_le_bytes())?;
    w.write_all(&(jets.len() as u64).to_le_bytes())?;
    for s in scale {
        w.write_all(&s.to_le_bytes())?;
    }
    for jet in jets {
        w.write_all(&[jet.label])?;
        for v in jet.h_flat().iter().chain(&jet.x_flat()).chain(&jet.a) {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

struct Cursor<R> {
    inner: R,
}

impl<R: Read> Cursor<R> {
    fn bytes<const N: usize>(&mut self, what: &str) -> Result<[u8; N], DataError> {
        let mut buf = [0u8; N];
        self.inner.read_exact(&mut buf).map_err(|e| match e.kind() {
            std::io::ErrorKind::UnexpectedEof => DataError::Cache(format!("truncated file while reading {what}")),
            _ => DataError::Io(e),
        })?;
        Ok(buf)
    }

    fn f64s(&mut self, count: usize, what: &str) -> Result<Vec<f64>, DataError> {
        (0..count).map(|_| self.bytes::<8>(what).map(f64::from_le_bytes)).collect()
    }
}

/// Returns the records and the column divisors they were scaled by.
pub fn read_cache(path: &Path) -> Result<(Vec<FeaturedJet>, [f64; NUM_FEATURES]), DataError> {
    let mut c = Cursor { inner: BufReader::new(File::open(path)?) };
    let magic = c.bytes::<5>("magic")?;
    if &magic != CACHE_MAGIC {
        return Err(DataError::Cache(format!("bad magic {:?}", String::from_utf8_lossy(&magic))));
    }
    let n = u32::from_le_bytes(c.bytes("node count")?) as usize;
    let k = u32::from_le_bytes(c.bytes("feature count")?) as usize;
    if k != NUM_FEATURES {
        return Err(DataError::Cache(format!("expected {NUM_FEATURES} features per node, found {k}")));
    }
    let count = u64::from_le_bytes(c.bytes("record count")?) as usize;
    let mut scale = [0.0; NUM_FEATURES];
    scale.copy_from_slice(&c.f64s(NUM_FEATURES, "scale")?);

    let mut jets = Vec::with_capacity(count.min(1 << 20));
    for r in 0..count {
        let what = format!("record {r}");
        let [label] = c.bytes::<1>(&what)?;
        if label > 1 {
            return Err(DataError::Cache(format!("record {r} has label {label}")));
        }
        let h_flat = c.f64s(n * NUM_FEATURES, &what)?;
        let x_flat = c.f64s(n * 2, &what)?;
        let a = c.f64s(n * n, &what)?;
        let h = h_flat.chunks_exact(NUM_FEATURES).map(|row| row.try_into().expect("chunk width")).collect();
        let x = x_flat.chunks_exact(2).map(|p| [p[0], p[1]]).collect();
        jets.push(FeaturedJet { h, x, a, label });
    }
    let mut trailing = [0u8; 1];
    if c.inner.read(&mut trailing)? != 0 {
        return Err(DataError::Cache("trailing bytes after last record".into()));
    }
    Ok((jets, scale))
}
