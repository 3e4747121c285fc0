//! On-disk cache of enumerated ball families, enabled by the
//! `NDSTHERMO_CACHE_DIR` environment variable.
//!
//! Files are `<sha256 of the key>.fam`: an 8-byte magic, a little-endian
//! `u32` format version, then the bincode encoding of the family. Anything
//! unreadable is ignored and rebuilt, so the directory is safe to delete.

use std::fs;
use std::path::PathBuf;

use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::family::{enumerate_family, BallFamily};
use crate::space::{FiniteSpace, NdsModel, Potential};

pub const CACHE_ENV: &str = "NDSTHERMO_CACHE_DIR";
const MAGIC: &[u8; 8] = b"NDSFAMC\0";
const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct FamilyCache {
    dir: PathBuf,
}

impl FamilyCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        FamilyCache { dir: dir.into() }
    }

    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(FamilyCache::new)
    }

    fn path(&self, key: &[u8]) -> PathBuf {
        let digest = Sha256::digest(key);
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.dir.join(format!("{hex}.fam"))
    }

    pub fn load(&self, key: &[u8]) -> Option<BallFamily> {
        let bytes = fs::read(self.path(key)).ok()?;
        if bytes.len() < 12 || &bytes[..8] != MAGIC {
            log::warn!("ignoring cache file without a valid header");
            return None;
        }
        if u32::from_le_bytes(bytes[8..12].try_into().unwrap()) != FORMAT_VERSION {
            log::warn!("ignoring cache file with another format version");
            return None;
        }
        bincode::deserialize(&bytes[12..]).ok()
    }

    pub fn store(&self, key: &[u8], family: &BallFamily) {
        let mut bytes = MAGIC.to_vec();
        bytes.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        match bincode::serialize(family) {
            Ok(body) => bytes.extend_from_slice(&body),
            Err(e) => {
                log::warn!("cannot encode ball family: {e}");
                return;
            }
        }
        let path = self.path(key);
        let tmp = path.with_extension("tmp");
        let res = fs::create_dir_all(&self.dir).and_then(|_| fs::write(&tmp, &bytes)).and_then(|_| fs::rename(&tmp, &path));
        if let Err(e) = res {
            log::warn!("cannot write cache file {}: {e}", path.display());
        }
    }
}

/// Cache key from a system description plus everything the family depends on.
pub fn family_key(system_id: &str, psi: &Potential, eps: f64, n_min: usize, n_max: usize) -> Vec<u8> {
    let mut key = format!("{system_id}\n{}\n{n_min}\n{n_max}\n", eps.to_bits()).into_bytes();
    for v in psi.values() {
        key.extend_from_slice(&v.to_bits().to_le_bytes());
    }
    key
}

/// [`enumerate_family`] through the cache when one is given.
#[allow(clippy::too_many_arguments)]
pub fn cached_family(
    cache: Option<&FamilyCache>,
    system_key: &str,
    space: &FiniteSpace,
    model: &NdsModel,
    psi: &Potential,
    eps: f64,
    n_min: usize,
    n_max: usize,
) -> Result<BallFamily> {
    let Some(cache) = cache else {
        return enumerate_family(space, model, psi, eps, n_min, n_max);
    };
    let key = family_key(system_key, psi, eps, n_min, n_max);
    if let Some(f) = cache.load(&key) {
        log::debug!("ball family loaded from cache");
        return Ok(f);
    }
    let family = enumerate_family(space, model, psi, eps, n_min, n_max)?;
    cache.store(&key, &family);
    Ok(family)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::build_symbolic_shift;

    #[test]
    fn round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let cache = FamilyCache::new(dir.path());
        let sys = build_symbolic_shift(2, 6).unwrap();
        let psi = Potential::constant(64, 0.25);
        let a = cached_family(Some(&cache), "s", &sys.space, &sys.model, &psi, 0.25, 1, 3).unwrap();
        let key = family_key("s", &psi, 0.25, 1, 3);
        assert_eq!(cache.load(&key).unwrap(), a);
        fs::write(cache.path(&key), b"garbage").unwrap();
        assert!(cache.load(&key).is_none());
        let b = cached_family(Some(&cache), "s", &sys.space, &sys.model, &psi, 0.25, 1, 3).unwrap();
        assert_eq!(a, b);
        assert!(cache.load(&family_key("s", &psi, 0.25, 1, 4)).is_none());
    }
}
