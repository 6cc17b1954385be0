//! Versioned binary checkpoints.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic "TPNCKPT\0" | version u32 | header_len u32 | header JSON (ModelSpec)
//! | param_count u64 | param_count × f64
//! ```
//!
//! Parameters appear in the flat layout of [`ModelWeights::flatten`], so a
//! save/load round trip is bit-exact.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

use super::{ModelSpec, ModelWeights};

const MAGIC: [u8; 8] = *b"TPNCKPT\0";
const VERSION: u32 = 1;

pub fn save_checkpoint(w: &ModelWeights, path: &Path) -> Result<()> {
    let header = serde_json::to_vec(&w.spec)?;
    let flat = w.flatten();
    let mut out = Vec::with_capacity(24 + header.len() + 8 * flat.len());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(header.len() as u32).to_le_bytes());
    out.extend_from_slice(&header);
    out.extend_from_slice(&(flat.len() as u64).to_le_bytes());
    for v in &flat {
        out.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, out)?;
    Ok(())
}

fn take<'a>(bytes: &'a [u8], offset: &mut usize, len: usize, what: &str) -> Result<&'a [u8]> {
    let end = offset
        .checked_add(len)
        .filter(|&e| e <= bytes.len())
        .ok_or_else(|| Error::Checkpoint(format!("truncated reading {what}")))?;
    let slice = &bytes[*offset..end];
    *offset = end;
    Ok(slice)
}

pub fn load_checkpoint(path: &Path) -> Result<ModelWeights> {
    let bytes = fs::read(path)?;
    let mut offset = 0;

    if take(&bytes, &mut offset, 8, "magic")? != MAGIC {
        return Err(Error::Checkpoint("bad magic".into()));
    }
    let version = u32::from_le_bytes(take(&bytes, &mut offset, 4, "version")?.try_into().expect("4 bytes"));
    if version != VERSION {
        return Err(Error::Checkpoint(format!(
            "unsupported version {version} (expected {VERSION})"
        )));
    }
    let header_len =
        u32::from_le_bytes(take(&bytes, &mut offset, 4, "header length")?.try_into().expect("4 bytes"))
            as usize;
    let header = take(&bytes, &mut offset, header_len, "header")?;
    let spec: ModelSpec = serde_json::from_slice(header)
        .map_err(|e| Error::Checkpoint(format!("bad header: {e}")))?;

    let count =
        u64::from_le_bytes(take(&bytes, &mut offset, 8, "parameter count")?.try_into().expect("8 bytes"))
            as usize;
    let mut weights = ModelWeights::zeros(&spec)?;
    if count != weights.param_count() {
        return Err(Error::Checkpoint(format!(
            "{count} parameters stored, spec implies {}",
            weights.param_count()
        )));
    }
    let blob = take(&bytes, &mut offset, count * 8, "parameters")?;
    if offset != bytes.len() {
        return Err(Error::Checkpoint(format!(
            "{} trailing bytes after parameters",
            bytes.len() - offset
        )));
    }
    let flat: Vec<f64> = blob
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    weights.assign_flat(&flat)?;
    Ok(weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_model, ModelSpec, TNetConfig, Variant};

    fn tiny_spec() -> ModelSpec {
        ModelSpec {
            per_point_widths: vec![8, 8, 16],
            classifier_widths: vec![8, 3],
            variant: Variant::Directional,
        }
    }

    fn baseline_spec() -> ModelSpec {
        ModelSpec {
            per_point_widths: vec![4, 4, 8],
            classifier_widths: vec![4, 3],
            variant: Variant::BaselineTNet(TNetConfig {
                input_transform: true,
                feature_transform: true,
                point_widths: vec![4, 8],
                fc_widths: vec![4],
            }),
        }
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        for (name, spec) in [("directional", tiny_spec()), ("baseline", baseline_spec())] {
            let path = dir.path().join(format!("{name}.ckpt"));
            let w = build_model(&spec, 42).unwrap();
            save_checkpoint(&w, &path).unwrap();
            let loaded = load_checkpoint(&path).unwrap();
            assert_eq!(loaded.spec, w.spec);
            let a: Vec<u64> = w.flatten().iter().map(|v| v.to_bits()).collect();
            let b: Vec<u64> = loaded.flatten().iter().map(|v| v.to_bits()).collect();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn save_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let w = build_model(&tiny_spec(), 1).unwrap();
        let pa = dir.path().join("a.ckpt");
        let pb = dir.path().join("b.ckpt");
        save_checkpoint(&w, &pa).unwrap();
        save_checkpoint(&w, &pb).unwrap();
        assert_eq!(std::fs::read(pa).unwrap(), std::fs::read(pb).unwrap());
    }

    #[test]
    fn malformed_files_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.ckpt");
        let w = build_model(&tiny_spec(), 1).unwrap();
        save_checkpoint(&w, &path).unwrap();
        let good = std::fs::read(&path).unwrap();

        let mut bad_magic = good.clone();
        bad_magic[0] ^= 0xff;
        std::fs::write(&path, &bad_magic).unwrap();
        assert!(matches!(load_checkpoint(&path), Err(Error::Checkpoint(_))));

        let mut bad_version = good.clone();
        bad_version[8] = 99;
        std::fs::write(&path, &bad_version).unwrap();
        assert!(matches!(load_checkpoint(&path), Err(Error::Checkpoint(_))));

        std::fs::write(&path, &good[..good.len() - 3]).unwrap();
        assert!(matches!(load_checkpoint(&path), Err(Error::Checkpoint(_))));

        let mut trailing = good.clone();
        trailing.push(0);
        std::fs::write(&path, &trailing).unwrap();
        assert!(matches!(load_checkpoint(&path), Err(Error::Checkpoint(_))));

        let mut bad_count = good;
        let count_at = 16 + serde_json::to_vec(&w.spec).unwrap().len();
        bad_count[count_at] = bad_count[count_at].wrapping_add(1);
        std::fs::write(&path, &bad_count).unwrap();
        assert!(matches!(load_checkpoint(&path), Err(Error::Checkpoint(_))));
    }
}
