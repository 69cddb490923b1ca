use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Duration;

use crate::hash::sha256_hex;
use crate::lockfile::Lockfile;

pub const CACHE_DIR: &str = ".ottr_cache";

#[derive(Debug, thiserror::Error)]
pub enum BorrowError {
    #[error("cannot fetch {file} from {origin}: {reason}")]
    OriginUnreachable {
        origin: String,
        file: String,
        reason: String,
    },
    #[error("{file} from {origin} changed since it was pinned: locked sha256 {locked}, fetched sha256 {actual}")]
    HashMismatch {
        origin: String,
        file: String,
        locked: String,
        actual: String,
    },
}

pub fn is_url(origin: &str) -> bool {
    origin.starts_with("http://") || origin.starts_with("https://")
}

/// Fetches `file` from a borrow origin (a directory path, relative to
/// `course_root` when not absolute, or an HTTP(S) base URL), pins its hash in
/// `lockfile` on first use and verifies it afterwards. Fetched bytes are
/// cached under `.ottr_cache/` by hash; a pinned file whose origin has gone
/// away is served from the cache.
pub fn fetch_borrowed_chapter(
    origin: &str,
    file: &str,
    lockfile: &mut Lockfile,
    course_root: &Path,
) -> Result<(Vec<u8>, String), BorrowError> {
    let locked = lockfile.get(origin, file).map(str::to_string);
    let fetched = if is_url(origin) {
        fetch_url(&join_url(origin, file))
    } else {
        std::fs::read(course_root.join(origin).join(file)).map_err(|e| e.to_string())
    };
    let bytes = match (fetched, &locked) {
        (Ok(b), _) => b,
        (Err(reason), Some(hash)) => match std::fs::read(cache_path(course_root, hash)) {
            Ok(b) if sha256_hex(&b) == *hash => {
                log::warn!("{origin}/{file} unreachable ({reason}); using cached copy");
                b
            }
            _ => return Err(unreachable(origin, file, reason)),
        },
        (Err(reason), None) => return Err(unreachable(origin, file, reason)),
    };
    let actual = sha256_hex(&bytes);
    match locked {
        Some(locked) if locked != actual => {
            return Err(BorrowError::HashMismatch {
                origin: origin.to_string(),
                file: file.to_string(),
                locked,
                actual,
            })
        }
        Some(_) => {}
        None => lockfile.set(origin, file, &actual),
    }
    let cached = cache_path(course_root, &actual);
    if !cached.exists() {
        if let Err(e) = crate::fsutil::write_atomic(&cached, &bytes) {
            log::warn!("cannot cache {origin}/{file}: {e}");
        }
    }
    Ok((bytes, actual))
}

fn unreachable(origin: &str, file: &str, reason: String) -> BorrowError {
    BorrowError::OriginUnreachable {
        origin: origin.to_string(),
        file: file.to_string(),
        reason,
    }
}

fn cache_path(course_root: &Path, hash: &str) -> PathBuf {
    course_root.join(CACHE_DIR).join(hash)
}

pub(crate) fn join_url(base: &str, file: &str) -> String {
    format!("{}/{}", base.trim_end_matches('/'), file.trim_start_matches("./"))
}

fn fetch_url(url: &str) -> Result<Vec<u8>, String> {
    let agent = ureq::AgentBuilder::new()
        .timeout(Duration::from_secs(30))
        .build();
    let resp = agent.get(url).call().map_err(|e| e.to_string())?;
    let mut bytes = Vec::new();
    resp.into_reader()
        .read_to_end(&mut bytes)
        .map_err(|e| e.to_string())?;
    Ok(bytes)
}
