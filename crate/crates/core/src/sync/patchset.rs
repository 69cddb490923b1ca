use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use globset::GlobSet;
use serde::{Deserialize, Serialize};

use crate::check::exclusion_set;
use crate::fsutil::write_atomic;
use crate::hash::{rel_string, sha256_hex};
use crate::lockfile::{Lockfile, LockfileError};
use crate::manifest::{load_manifest, LoadManifestError, DEFAULT_OWNED, MANIFEST_FILE};

/// Lockfile origin recorded for template-owned files.
pub const TEMPLATE_ORIGIN: &str = "@template";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatchAction {
    Add,
    Update,
    Delete,
}

impl PatchAction {
    pub fn as_str(self) -> &'static str {
        match self {
            PatchAction::Add => "add",
            PatchAction::Update => "update",
            PatchAction::Delete => "delete",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchEntry {
    pub path: String,
    pub action: PatchAction,
    /// Downstream content hash the entry was computed against; `None` when the file was absent.
    pub base_hash: Option<String>,
    /// Content hash after applying; `None` for deletions.
    pub new_hash: Option<String>,
    /// Unified diff, empty for binary files.
    pub diff: String,
    /// Hex-encoded new content for files that are not UTF-8 text.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub binary: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchSet {
    pub upstream_ref: String,
    pub created_at: i64,
    /// Sorted by path.
    pub entries: Vec<PatchEntry>,
    /// Every upstream file in the synced set with its hash, changed or not.
    pub synced: BTreeMap<String, String>,
}

impl PatchSet {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("patchset serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, SyncError> {
        serde_json::from_str(text).map_err(|e| SyncError::InvalidPatchset(e.to_string()))
    }

    /// Concatenated unified diffs.
    pub fn to_diff(&self) -> String {
        self.entries
            .iter()
            .map(|e| {
                if e.binary.is_some() {
                    format!("Binary files a/{0} and b/{0} differ\n", e.path)
                } else {
                    e.diff.clone()
                }
            })
            .collect()
    }

    /// Writes `patchset.json` and `patchset.diff` into `dir`.
    pub fn write(&self, dir: &Path) -> io::Result<()> {
        write_atomic(&dir.join("patchset.json"), self.to_json().as_bytes())?;
        write_atomic(&dir.join("patchset.diff"), self.to_diff().as_bytes())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApplyMode {
    DryRun,
    Apply,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApplyReport {
    pub mode: ApplyMode,
    pub changes: Vec<(String, PatchAction)>,
    pub upstream_ref: String,
}

#[derive(Debug, thiserror::Error)]
pub enum SyncError {
    #[error("template sync is off for this course; set `sync.opt_in: true` in {MANIFEST_FILE} to receive updates")]
    OptInDisabled,
    #[error("upstream {upstream} is unreachable: {reason}")]
    UpstreamUnreachable { upstream: String, reason: String },
    #[error("{path} changed since the patchset was computed (expected {expected}, found {actual}); recompute it")]
    StaleDownstream {
        path: String,
        expected: String,
        actual: String,
    },
    #[error("patch for {path} does not apply: {reason}")]
    BadPatch { path: String, reason: String },
    #[error("invalid patchset: {0}")]
    InvalidPatchset(String),
    #[error(transparent)]
    Manifest(#[from] LoadManifestError),
    #[error(transparent)]
    Lockfile(#[from] LockfileError),
    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> SyncError + '_ {
    move |source| SyncError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Default)]
pub struct SyncOptions {
    /// How the upstream is named in `upstream_ref`; defaults to its path.
    pub label: Option<String>,
    /// Defaults to the current time.
    pub created_at: Option<i64>,
}

/// Globs naming the template-owned files, from the upstream's own manifest.
fn owned_globs(upstream_root: &Path) -> Result<Vec<String>, SyncError> {
    if !upstream_root.join(MANIFEST_FILE).exists() {
        return Ok(DEFAULT_OWNED.iter().map(|s| s.to_string()).collect());
    }
    let parsed = load_manifest(upstream_root)?;
    Ok(match parsed.manifest.sync {
        Some(s) => s.owned,
        None => DEFAULT_OWNED.iter().map(|s| s.to_string()).collect(),
    })
}

/// Relative paths of the upstream's synced files, minus exclusions.
pub fn synced_files(upstream_root: &Path, owned: &GlobSet, exclusions: &GlobSet) -> Result<Vec<String>, SyncError> {
    let mut out = Vec::new();
    let walker = walkdir::WalkDir::new(upstream_root)
        .sort_by_file_name()
        .into_iter()
        .filter_entry(|e| e.file_name() != ".git");
    for entry in walker {
        let entry = entry.map_err(|e| SyncError::UpstreamUnreachable {
            upstream: upstream_root.display().to_string(),
            reason: e.to_string(),
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = rel_string(entry.path().strip_prefix(upstream_root).expect("walk stays under root"));
        if owned.is_match(&rel) && !exclusions.is_match(&rel) {
            out.push(rel);
        }
    }
    Ok(out)
}

fn read_opt(path: &Path) -> Result<Option<Vec<u8>>, SyncError> {
    match std::fs::read(path) {
        Ok(b) => Ok(Some(b)),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(io_err(path)(e)),
    }
}

pub fn compute_patchset(upstream_root: &Path, downstream_root: &Path, exclusions: &[String]) -> Result<PatchSet, SyncError> {
    compute_patchset_with(upstream_root, downstream_root, exclusions, &SyncOptions::default())
}

pub fn compute_patchset_with(
    upstream_root: &Path,
    downstream_root: &Path,
    exclusions: &[String],
    opts: &SyncOptions,
) -> Result<PatchSet, SyncError> {
    let downstream = load_manifest(downstream_root)?.manifest;
    if !downstream.sync.as_ref().is_some_and(|s| s.opt_in) {
        return Err(SyncError::OptInDisabled);
    }
    if !upstream_root.is_dir() {
        return Err(SyncError::UpstreamUnreachable {
            upstream: upstream_root.display().to_string(),
            reason: "not a directory".to_string(),
        });
    }
    let owned = exclusion_set(&owned_globs(upstream_root)?);
    let excluded = exclusion_set(exclusions);
    let files = synced_files(upstream_root, &owned, &excluded)?;
    let lock = Lockfile::load(downstream_root)?;

    let mut entries = Vec::new();
    let mut synced = BTreeMap::new();
    for rel in &files {
        let new = std::fs::read(upstream_root.join(rel)).map_err(io_err(&upstream_root.join(rel)))?;
        let new_hash = sha256_hex(&new);
        synced.insert(rel.clone(), new_hash.clone());
        let old = read_opt(&downstream_root.join(rel))?;
        if old.as_deref() == Some(new.as_slice()) {
            continue;
        }
        let action = if old.is_some() { PatchAction::Update } else { PatchAction::Add };
        entries.push(entry(rel, action, old.as_deref(), Some(&new)));
    }
    for rel in lock.files_from(TEMPLATE_ORIGIN) {
        if synced.contains_key(rel) || excluded.is_match(rel) {
            continue;
        }
        if let Some(old) = read_opt(&downstream_root.join(rel))? {
            entries.push(entry(rel, PatchAction::Delete, Some(&old), None));
        }
    }
    entries.sort_by(|a, b| a.path.cmp(&b.path));

    let set_hash = sha256_hex(
        synced
            .iter()
            .map(|(p, h)| format!("{h} {p}\n"))
            .collect::<String>()
            .as_bytes(),
    );
    let label = opts
        .label
        .clone()
        .unwrap_or_else(|| upstream_root.display().to_string());
    Ok(PatchSet {
        upstream_ref: format!("{label} sha256:{set_hash}"),
        created_at: opts.created_at.unwrap_or_else(now),
        entries,
        synced,
    })
}

fn now() -> i64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs() as i64)
}

fn entry(path: &str, action: PatchAction, old: Option<&[u8]>, new: Option<&[u8]>) -> PatchEntry {
    let old_text = old.map(std::str::from_utf8);
    let new_text = new.map(std::str::from_utf8);
    let (diff, binary) = match (old_text.unwrap_or(Ok("")), new_text.unwrap_or(Ok(""))) {
        (Ok(o), Ok(n)) => (unified_diff(path, old.is_some(), o, new.is_some(), n), None),
        _ => (String::new(), new.map(hex::encode)),
    };
    PatchEntry {
        path: path.to_string(),
        action,
        base_hash: old.map(sha256_hex),
        new_hash: new.map(sha256_hex),
        diff,
        binary,
    }
}

fn unified_diff(path: &str, had_old: bool, old: &str, had_new: bool, new: &str) -> String {
    let a = if had_old { format!("a/{path}") } else { "/dev/null".to_string() };
    let b = if had_new { format!("b/{path}") } else { "/dev/null".to_string() };
    similar::TextDiff::from_lines(old, new)
        .unified_diff()
        .context_radius(3)
        .header(&a, &b)
        .to_string()
}

fn apply_entry(e: &PatchEntry, current: Option<&[u8]>) -> Result<Option<Vec<u8>>, SyncError> {
    let bad = |reason: String| SyncError::BadPatch {
        path: e.path.clone(),
        reason,
    };
    if e.action == PatchAction::Delete {
        return Ok(None);
    }
    let new = match &e.binary {
        Some(h) => hex::decode(h).map_err(|err| bad(err.to_string()))?,
        None => {
            let base = std::str::from_utf8(current.unwrap_or_default()).map_err(|err| bad(err.to_string()))?;
            let patch = diffy::Patch::from_str(&e.diff).map_err(|err| bad(err.to_string()))?;
            diffy::apply(base, &patch).map_err(|err| bad(err.to_string()))?.into_bytes()
        }
    };
    let hash = sha256_hex(&new);
    if e.new_hash.as_deref() != Some(hash.as_str()) {
        return Err(bad(format!("result hash {hash} does not match the recorded hash")));
    }
    Ok(Some(new))
}

/// Verifies every entry against the downstream tree, then (in `Apply` mode)
/// writes all of them or none, and records the synced files and the upstream
/// ref in the lockfile.
pub fn apply_patchset(p: &PatchSet, downstream_root: &Path, mode: ApplyMode) -> Result<ApplyReport, SyncError> {
    let mut planned: Vec<(PathBuf, Option<Vec<u8>>, Option<Vec<u8>>)> = Vec::new();
    for e in &p.entries {
        if crate::manifest::normalize_relative(&e.path).is_none() {
            return Err(SyncError::InvalidPatchset(format!("path `{}` escapes the course", e.path)));
        }
        let path = downstream_root.join(&e.path);
        let current = read_opt(&path)?;
        let actual = current.as_deref().map(sha256_hex);
        if actual != e.base_hash {
            let show = |h: &Option<String>| h.clone().unwrap_or_else(|| "absent".to_string());
            return Err(SyncError::StaleDownstream {
                path: e.path.clone(),
                expected: show(&e.base_hash),
                actual: show(&actual),
            });
        }
        let new = apply_entry(e, current.as_deref())?;
        planned.push((path, current, new));
    }
    let report = ApplyReport {
        mode,
        changes: p.entries.iter().map(|e| (e.path.clone(), e.action)).collect(),
        upstream_ref: p.upstream_ref.clone(),
    };
    if mode == ApplyMode::DryRun {
        return Ok(report);
    }

    let mut lock = Lockfile::load(downstream_root)?;
    let lock_before = std::fs::read(downstream_root.join(crate::lockfile::LOCK_FILE)).ok();
    for (path, hash) in &p.synced {
        lock.set(TEMPLATE_ORIGIN, path, hash);
    }
    for e in p.entries.iter().filter(|e| e.action == PatchAction::Delete) {
        lock.remove(TEMPLATE_ORIGIN, &e.path);
    }
    lock.upstream = Some(p.upstream_ref.clone());

    let mut done = 0;
    let mut failure = None;
    for (path, _, new) in &planned {
        let result = match new {
            Some(bytes) => write_atomic(path, bytes),
            None => std::fs::remove_file(path),
        };
        if let Err(e) = result {
            failure = Some(io_err(path)(e));
            break;
        }
        done += 1;
    }
    if failure.is_none() {
        if let Err(e) = lock.save(downstream_root) {
            failure = Some(io_err(&downstream_root.join(crate::lockfile::LOCK_FILE))(e));
        }
    }
    if let Some(err) = failure {
        rollback(&planned[..done], downstream_root, lock_before);
        return Err(err);
    }
    Ok(report)
}

fn rollback(applied: &[(PathBuf, Option<Vec<u8>>, Option<Vec<u8>>)], root: &Path, lock_before: Option<Vec<u8>>) {
    for (path, old, _) in applied.iter().rev() {
        let restored = match old {
            Some(bytes) => write_atomic(path, bytes),
            None => std::fs::remove_file(path).or_else(|e| if e.kind() == io::ErrorKind::NotFound { Ok(()) } else { Err(e) }),
        };
        if let Err(e) = restored {
            log::error!("rollback of {} failed: {e}", path.display());
        }
    }
    let lock_path = root.join(crate::lockfile::LOCK_FILE);
    let _ = match lock_before {
        Some(bytes) => write_atomic(&lock_path, &bytes),
        None => std::fs::remove_file(&lock_path).or(Ok(())),
    };
}
