use std::path::{Path, PathBuf};
use std::process::Command;

use super::SyncError;

/// A readable copy of the upstream template.
pub struct UpstreamCheckout {
    pub path: PathBuf,
    pub label: String,
    _clone: Option<tempfile::TempDir>,
}

fn is_remote(upstream: &str) -> bool {
    upstream.contains("://") || upstream.starts_with("git@")
}

/// Local upstreams are used in place (relative to `course_root`); remote ones
/// are shallow-cloned with `git` into a temporary directory.
pub fn checkout_upstream(upstream: &str, course_root: &Path) -> Result<UpstreamCheckout, SyncError> {
    let unreachable = |reason: String| SyncError::UpstreamUnreachable {
        upstream: upstream.to_string(),
        reason,
    };
    if !is_remote(upstream) {
        let path = course_root.join(upstream);
        if !path.is_dir() {
            return Err(unreachable("not a directory".to_string()));
        }
        return Ok(UpstreamCheckout {
            path,
            label: upstream.to_string(),
            _clone: None,
        });
    }
    let tmp = tempfile::tempdir().map_err(|e| unreachable(e.to_string()))?;
    let dest = tmp.path().join("upstream");
    let out = Command::new("git")
        .args(["clone", "--quiet", "--depth", "1", upstream])
        .arg(&dest)
        .output()
        .map_err(|e| unreachable(format!("cannot run git: {e}")))?;
    if !out.status.success() {
        return Err(unreachable(String::from_utf8_lossy(&out.stderr).trim().to_string()));
    }
    Ok(UpstreamCheckout {
        path: dest,
        label: upstream.to_string(),
        _clone: Some(tmp),
    })
}
