use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::parse::parse_zero_bytes;
use super::{ZeroFormat, ZeroTable};
use crate::error::{Error, Result};

/// Sidecar record stored next to each cached table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheMeta {
    pub url: String,
    pub fetched_at: String,
    pub checksum: String,
}

/// `(data, meta)` paths for `url` inside `cache_dir`:
/// `<sha256-of-url>.zeros` and `<sha256-of-url>.meta`.
pub fn cache_paths(cache_dir: &Path, url: &str) -> (PathBuf, PathBuf) {
    let key = hex::encode(Sha256::digest(url.as_bytes()));
    (
        cache_dir.join(format!("{key}.zeros")),
        cache_dir.join(format!("{key}.meta")),
    )
}

/// Downloads `url` into `cache_dir` (unless already cached), verifies the
/// SHA-256 `checksum` when given, and parses the cached bytes.
///
/// A cached entry whose digest does not match `checksum` is deleted.
/// `file://` URLs are read from the local filesystem.
pub fn fetch_remote_table(
    url: &str,
    cache_dir: &Path,
    checksum: Option<&str>,
    format: ZeroFormat,
) -> Result<ZeroTable> {
    let (data_path, meta_path) = cache_paths(cache_dir, url);
    let expected = checksum.map(|c| c.trim().to_ascii_lowercase());

    let raw = if data_path.exists() {
        log::debug!("cache hit for {url}: {}", data_path.display());
        fs::read(&data_path).map_err(|e| Error::io(&data_path, e))?
    } else {
        let bytes = download(url)?;
        fs::create_dir_all(cache_dir).map_err(|e| Error::io(cache_dir, e))?;
        let tmp = data_path.with_extension("zeros.partial");
        fs::write(&tmp, &bytes).map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, &data_path).map_err(|e| Error::io(&data_path, e))?;
        let meta = CacheMeta {
            url: url.to_string(),
            fetched_at: chrono::Utc::now().to_rfc3339(),
            checksum: hex::encode(Sha256::digest(&bytes)),
        };
        let json = serde_json::to_vec_pretty(&meta).expect("meta serializes");
        fs::write(&meta_path, json).map_err(|e| Error::io(&meta_path, e))?;
        bytes
    };

    let actual = hex::encode(Sha256::digest(&raw));
    if let Some(expected) = expected {
        if expected != actual {
            let _ = fs::remove_file(&data_path);
            let _ = fs::remove_file(&meta_path);
            return Err(Error::ChecksumMismatch { expected, actual });
        }
    }
    parse_zero_bytes(&raw, format, url)
}

fn download(url: &str) -> Result<Vec<u8>> {
    if let Some(path) = url.strip_prefix("file://") {
        return fs::read(path).map_err(|e| Error::io(path, e));
    }
    let network = |message: String| Error::Network {
        url: url.to_string(),
        message,
    };
    let mut response = ureq::get(url).call().map_err(|e| network(e.to_string()))?;
    response
        .body_mut()
        .with_config()
        .limit(u64::MAX)
        .read_to_vec()
        .map_err(|e| network(e.to_string()))
}
