use std::io;
use std::path::Path;

use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash over every regular file under `dir`: relative paths (with `/`
/// separators) and contents, in sorted path order. A missing directory
/// hashes like an empty one.
pub fn tree_hash(dir: &Path) -> io::Result<String> {
    let mut hasher = Sha256::new();
    if !dir.exists() {
        return Ok(hex::encode(hasher.finalize()));
    }
    let mut files = Vec::new();
    for entry in walkdir::WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.map_err(io::Error::other)?;
        if entry.file_type().is_file() {
            let rel = entry
                .path()
                .strip_prefix(dir)
                .expect("walkdir yields children of its root");
            files.push((rel_string(rel), entry.path().to_path_buf()));
        }
    }
    files.sort();
    for (rel, path) in files {
        let content = std::fs::read(&path)?;
        hasher.update((rel.len() as u64).to_le_bytes());
        hasher.update(rel.as_bytes());
        hasher.update((content.len() as u64).to_le_bytes());
        hasher.update(&content);
    }
    Ok(hex::encode(hasher.finalize()))
}

/// `/`-separated form of a relative path.
pub fn rel_string(p: &Path) -> String {
    p.components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join("/")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn tree_hash_sees_content_and_names() {
        let a = tempfile::tempdir().unwrap();
        std::fs::create_dir(a.path().join("sub")).unwrap();
        std::fs::write(a.path().join("sub/x.txt"), "1").unwrap();
        let h1 = tree_hash(a.path()).unwrap();
        std::fs::write(a.path().join("sub/x.txt"), "2").unwrap();
        let h2 = tree_hash(a.path()).unwrap();
        assert_ne!(h1, h2);
        std::fs::rename(a.path().join("sub/x.txt"), a.path().join("sub/y.txt")).unwrap();
        assert_ne!(tree_hash(a.path()).unwrap(), h2);
    }
}
