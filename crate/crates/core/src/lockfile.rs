//! `_ottr.lock`: pinned content hashes for borrowed chapters and
//! template-owned files.
//!
//! ```text
//! # comment
//! upstream <upstream-ref>
//! sha256 <hex> <origin> <file>
//! ```

use std::io;
use std::path::Path;

pub const LOCK_FILE: &str = "_ottr.lock";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LockEntry {
    pub origin: String,
    pub file: String,
    pub hash: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lockfile {
    pub upstream: Option<String>,
    entries: Vec<LockEntry>,
}

#[derive(Debug, thiserror::Error)]
pub enum LockfileError {
    #[error("{LOCK_FILE}:{line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("cannot access {LOCK_FILE}: {0}")]
    Io(#[from] io::Error),
}

impl Lockfile {
    pub fn parse(text: &str) -> Result<Self, LockfileError> {
        let mut lock = Lockfile::default();
        for (i, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let malformed = |message: &str| LockfileError::Malformed {
                line: i + 1,
                message: message.to_string(),
            };
            if let Some(rest) = t.strip_prefix("upstream ") {
                lock.upstream = Some(rest.trim().to_string());
                continue;
            }
            let mut parts = t.splitn(4, ' ');
            let (Some("sha256"), Some(hash), Some(origin), Some(file)) =
                (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(malformed("expected `sha256 <hex> <origin> <file>`"));
            };
            if hash.len() != 64 || !hash.chars().all(|c| c.is_ascii_hexdigit()) {
                return Err(malformed("hash must be 64 hex digits"));
            }
            lock.set(origin, file, hash);
        }
        Ok(lock)
    }

    pub fn load(course_root: &Path) -> Result<Self, LockfileError> {
        match std::fs::read_to_string(course_root.join(LOCK_FILE)) {
            Ok(text) => Self::parse(&text),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(Self::default()),
            Err(e) => Err(e.into()),
        }
    }

    pub fn save(&self, course_root: &Path) -> io::Result<()> {
        crate::fsutil::write_atomic(&course_root.join(LOCK_FILE), self.render().as_bytes())
    }

    pub fn render(&self) -> String {
        let mut out = String::from("# Pinned content hashes. Managed by ottr; edit with care.\n");
        if let Some(u) = &self.upstream {
            out.push_str(&format!("upstream {u}\n"));
        }
        for e in &self.entries {
            out.push_str(&format!("sha256 {} {} {}\n", e.hash, e.origin, e.file));
        }
        out
    }

    pub fn entries(&self) -> &[LockEntry] {
        &self.entries
    }

    pub fn get(&self, origin: &str, file: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|e| e.origin == origin && e.file == file)
            .map(|e| e.hash.as_str())
    }

    pub fn set(&mut self, origin: &str, file: &str, hash: &str) {
        match self
            .entries
            .binary_search_by(|e| (e.origin.as_str(), e.file.as_str()).cmp(&(origin, file)))
        {
            Ok(i) => self.entries[i].hash = hash.to_string(),
            Err(i) => self.entries.insert(
                i,
                LockEntry {
                    origin: origin.to_string(),
                    file: file.to_string(),
                    hash: hash.to_string(),
                },
            ),
        }
    }

    pub fn remove(&mut self, origin: &str, file: &str) {
        self.entries.retain(|e| !(e.origin == origin && e.file == file));
    }

    /// Files recorded as coming from `origin`.
    pub fn files_from<'a>(&'a self, origin: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.entries
            .iter()
            .filter(move |e| e.origin == origin)
            .map(|e| e.file.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const H: &str = "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad";

    #[test]
    fn parse_render_round_trip() {
        let mut lock = Lockfile::default();
        lock.set("../other", "03 shared.md", H);
        lock.set("../a", "x.md", H);
        lock.upstream = Some("../template sha256:abc".into());
        let text = lock.render();
        assert_eq!(Lockfile::parse(&text).unwrap(), lock);
        assert_eq!(lock.entries()[0].origin, "../a");
        assert_eq!(lock.get("../other", "03 shared.md"), Some(H));
    }

    #[test]
    fn malformed_lines_are_reported() {
        let err = Lockfile::parse("# ok\nsha256 nothex a b\n").unwrap_err();
        assert!(matches!(err, LockfileError::Malformed { line: 2, .. }));
    }
}
