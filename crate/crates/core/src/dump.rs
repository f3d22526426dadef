//! On-disk bounds dumps: a JSON manifest plus one binary file per
//! `(width, lower bound)` part.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seqset::BoolSeqSet;
use crate::table::BoundsTable;

pub const MANIFEST: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub n: usize,
    pub s: u32,
    pub upper_bounds: Vec<u32>,
}

/// Sets grouped by `(width, lower bound)`, each part sorted by bitmap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dump {
    pub manifest: Manifest,
    pub parts: BTreeMap<(usize, u32), Vec<BoolSeqSet>>,
}

impl Dump {
    /// Partitions the stored entries of `table`. Lower bounds 0 and 1 follow
    /// from set sizes alone and are left out.
    pub fn from_table(n: usize, s: u32, table: &BoundsTable) -> Dump {
        let mut parts: BTreeMap<(usize, u32), Vec<BoolSeqSet>> = BTreeMap::new();
        for (set, bound) in table.entries() {
            if bound.lo >= 2 {
                parts.entry((set.width(), bound.lo)).or_default().push(set);
            }
        }
        for part in parts.values_mut() {
            part.sort_unstable();
        }
        Dump {
            manifest: Manifest {
                n,
                s,
                upper_bounds: table.upper_bounds().to_vec(),
            },
            parts,
        }
    }

    pub fn set_count(&self) -> usize {
        self.parts.values().map(Vec::len).sum()
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let manifest = serde_json::to_string_pretty(&self.manifest)
            .map_err(|e| Error::Internal(e.to_string()))?;
        fs::write(dir.join(MANIFEST), manifest + "\n")?;
        for (&(w, k), sets) in &self.parts {
            let mut bytes = Vec::with_capacity(9 + sets.len() * BoolSeqSet::bitmap_len(w));
            bytes.push(w as u8);
            bytes.write_all(&(sets.len() as u64).to_le_bytes())?;
            for set in sets {
                bytes.extend_from_slice(&set.to_bytes());
            }
            fs::write(dir.join(part_name(w, k)), bytes)?;
        }
        Ok(())
    }

    pub fn read(dir: &Path) -> Result<Dump> {
        let manifest_path = dir.join(MANIFEST);
        let text = fs::read_to_string(&manifest_path)
            .map_err(|e| Error::Corrupt(format!("cannot read {}: {e}", manifest_path.display())))?;
        let manifest: Manifest = serde_json::from_str(&text)
            .map_err(|e| Error::Corrupt(format!("invalid manifest: {e}")))?;
        let mut parts = BTreeMap::new();
        let mut names: Vec<_> = fs::read_dir(dir)?
            .map(|entry| entry.map(|e| e.file_name().to_string_lossy().into_owned()))
            .collect::<std::io::Result<_>>()?;
        names.sort();
        for name in names {
            let Some((w, k)) = parse_part_name(&name) else {
                continue;
            };
            let bytes = fs::read(dir.join(&name))?;
            parts.insert((w, k), decode_part(&name, w, &bytes)?);
        }
        Ok(Dump { manifest, parts })
    }
}

fn part_name(w: usize, k: u32) -> String {
    format!("w{w}_k{k}.bnd")
}

fn parse_part_name(name: &str) -> Option<(usize, u32)> {
    let rest = name.strip_prefix('w')?.strip_suffix(".bnd")?;
    let (w, k) = rest.split_once("_k")?;
    Some((w.parse().ok()?, k.parse().ok()?))
}

fn decode_part(name: &str, w: usize, bytes: &[u8]) -> Result<Vec<BoolSeqSet>> {
    let corrupt = |msg: &str| Error::Corrupt(format!("{name}: {msg}"));
    if bytes.len() < 9 {
        return Err(corrupt("truncated header"));
    }
    if bytes[0] as usize != w {
        return Err(corrupt("width byte does not match file name"));
    }
    let count = u64::from_le_bytes(bytes[1..9].try_into().unwrap()) as usize;
    let len = BoolSeqSet::bitmap_len(w);
    if count.checked_mul(len).and_then(|b| b.checked_add(9)) != Some(bytes.len()) {
        return Err(corrupt("length does not match set count"));
    }
    bytes[9..]
        .chunks_exact(len)
        .map(|chunk| BoolSeqSet::from_bytes(w, chunk).map_err(|e| corrupt(&e.to_string())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::Search;

    #[test]
    fn round_trip() {
        let search = Search::new();
        let s = search.min_size(5).unwrap();
        let dump = Dump::from_table(5, s, search.table());
        assert!(dump.set_count() > 0);
        let dir = tempfile::tempdir().unwrap();
        dump.write(dir.path()).unwrap();
        assert_eq!(Dump::read(dir.path()).unwrap(), dump);
    }

    #[test]
    fn corrupt_dumps_are_reported() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(Dump::read(dir.path()), Err(Error::Corrupt(_))));
        fs::write(dir.path().join(MANIFEST), "{").unwrap();
        assert!(matches!(Dump::read(dir.path()), Err(Error::Corrupt(_))));
        fs::write(
            dir.path().join(MANIFEST),
            r#"{"n":3,"s":3,"upper_bounds":[0,0,1,3]}"#,
        )
        .unwrap();
        fs::write(
            dir.path().join("w3_k2.bnd"),
            [3u8, 2, 0, 0, 0, 0, 0, 0, 0, 0xff],
        )
        .unwrap();
        assert!(matches!(Dump::read(dir.path()), Err(Error::Corrupt(_))));
    }

    #[test]
    fn part_names() {
        assert_eq!(parse_part_name(&part_name(9, 17)), Some((9, 17)));
        assert_eq!(parse_part_name("manifest.json"), None);
    }
}
