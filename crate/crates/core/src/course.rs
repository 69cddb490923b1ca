//! A course tree loaded into memory: manifest, parsed chapters (borrowed ones
//! fetched and pinned), their image assets and the quiz files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::UNIX_EPOCH;

use rayon::prelude::*;

use crate::hash::{rel_string, sha256_hex};
use crate::lockfile::{Lockfile, LockfileError};
use crate::manifest::{
    load_manifest, normalize_relative, ChapterEntry, ChapterSource, CourseManifest,
    LoadManifestError, MANIFEST_FILE,
};
use crate::markdown::{parse_chapter, resolve_slide_embeds, ChapterDoc, GoogleSlidesResolver, SlideResolver};
use crate::quiz::{parse_quiz, ParsedQuiz};
use crate::sync::{fetch_borrowed_chapter, BorrowError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Asset {
    /// Path inside a bundle, e.g. `resources/images/plot.png`.
    pub bundle_path: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone)]
pub struct CourseChapter {
    pub entry: ChapterEntry,
    pub output_name: String,
    pub title: String,
    pub doc: ChapterDoc,
    pub borrowed_from: Option<String>,
    /// Relative image targets, as written in the chapter, mapped to their bundled copies.
    pub assets: BTreeMap<String, Asset>,
}

#[derive(Debug, Clone)]
pub struct QuizFile {
    /// Relative to the course root.
    pub path: PathBuf,
    pub parsed: ParsedQuiz,
}

#[derive(Debug, Clone)]
pub struct Course {
    pub root: PathBuf,
    pub manifest: CourseManifest,
    pub chapters: Vec<CourseChapter>,
    pub quizzes: Vec<QuizFile>,
    pub lockfile: Lockfile,
    /// Latest modification time (epoch seconds) over the course's content files.
    pub content_mtime: Option<i64>,
}

#[derive(Debug, thiserror::Error)]
pub enum CourseError {
    #[error(transparent)]
    Manifest(#[from] LoadManifestError),
    #[error("cannot read {}: {source}", path.display())]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Lockfile(#[from] LockfileError),
    #[error(transparent)]
    Borrow(#[from] BorrowError),
}

pub struct LoadOptions<'a> {
    pub slide_resolver: &'a dyn SlideResolver,
    /// Write newly pinned hashes back to `_ottr.lock`.
    pub save_lockfile: bool,
}

impl Default for LoadOptions<'_> {
    fn default() -> Self {
        Self {
            slide_resolver: &GoogleSlidesResolver,
            save_lockfile: true,
        }
    }
}

pub fn load_course(root: &Path, opts: &LoadOptions<'_>) -> Result<Course, CourseError> {
    let parsed = load_manifest(root)?;
    for w in &parsed.warnings {
        log::warn!("{w}");
    }
    load_course_with(root, parsed.manifest, opts)
}

/// Loads a course whose manifest has already been parsed (and possibly adjusted).
pub fn load_course_with(
    root: &Path,
    manifest: CourseManifest,
    opts: &LoadOptions<'_>,
) -> Result<Course, CourseError> {
    let mut lockfile = Lockfile::load(root)?;
    let before = lockfile.clone();
    let mut mtimes = vec![mtime(&root.join(MANIFEST_FILE))];

    let mut raws = Vec::with_capacity(manifest.chapters.len());
    for entry in &manifest.chapters {
        let (source_path, bytes) = match &entry.source {
            ChapterSource::Local(p) => {
                let full = root.join(p);
                mtimes.push(mtime(&full));
                let bytes = std::fs::read(&full).map_err(|source| CourseError::Read {
                    path: p.clone(),
                    source,
                })?;
                (p.clone(), bytes)
            }
            ChapterSource::Borrowed { origin, file } => {
                let (bytes, _) = fetch_borrowed_chapter(origin, &rel_string(file), &mut lockfile, root)?;
                (PathBuf::from(crate::sync::join_url(origin, &rel_string(file))), bytes)
            }
        };
        raws.push((entry, source_path, String::from_utf8_lossy(&bytes).into_owned()));
    }

    let docs: Vec<ChapterDoc> = raws
        .par_iter()
        .map(|(_, path, raw)| resolve_slide_embeds(parse_chapter(raw, path), opts.slide_resolver))
        .collect();

    let mut chapters = Vec::with_capacity(docs.len());
    for ((entry, _, _), doc) in raws.into_iter().zip(docs) {
        let assets = load_assets(root, entry, &doc, &mut lockfile)?;
        chapters.push(CourseChapter {
            entry: entry.clone(),
            output_name: entry.output_name(),
            title: entry.title_override.clone().unwrap_or_else(|| doc.title.clone()),
            borrowed_from: match &entry.source {
                ChapterSource::Borrowed { origin, .. } => Some(origin.clone()),
                ChapterSource::Local(_) => None,
            },
            doc,
            assets,
        });
    }

    let quizzes = load_quizzes(root, &manifest.quiz_dir)?;
    for q in &quizzes {
        mtimes.push(mtime(&root.join(&q.path)));
    }
    mtimes.push(mtime(&root.join(&manifest.wordlist)));

    if opts.save_lockfile && lockfile != before {
        lockfile.save(root).map_err(|source| CourseError::Read {
            path: PathBuf::from(crate::lockfile::LOCK_FILE),
            source,
        })?;
    }

    Ok(Course {
        root: root.to_path_buf(),
        manifest,
        chapters,
        quizzes,
        lockfile,
        content_mtime: mtimes.into_iter().flatten().max(),
    })
}

fn mtime(path: &Path) -> Option<i64> {
    let modified = std::fs::metadata(path).ok()?.modified().ok()?;
    Some(modified.duration_since(UNIX_EPOCH).ok()?.as_secs() as i64)
}

/// True for link or image targets that name a file relative to the chapter.
pub fn is_relative_target(target: &str) -> bool {
    !(target.is_empty()
        || target.starts_with('#')
        || target.starts_with('/')
        || target.contains("://")
        || target.starts_with("mailto:")
        || target.starts_with("data:"))
}

fn load_assets(
    root: &Path,
    entry: &ChapterEntry,
    doc: &ChapterDoc,
    lockfile: &mut Lockfile,
) -> Result<BTreeMap<String, Asset>, CourseError> {
    let mut assets = BTreeMap::new();
    let chapter_dir = entry.file().parent().unwrap_or(Path::new(""));
    for image in &doc.images {
        let target = image.target.as_str();
        if !is_relative_target(target) || assets.contains_key(target) {
            continue;
        }
        let joined = rel_string(&chapter_dir.join(target));
        let fetched = match &entry.source {
            ChapterSource::Local(_) => {
                let bundle_path = match normalize_relative(&joined) {
                    Some(p) => format!("resources/{}", rel_string(&p)),
                    None => external_path(&joined),
                };
                std::fs::read(root.join(&joined))
                    .map(|bytes| Asset { bundle_path, bytes })
                    .map_err(|e| e.to_string())
            }
            ChapterSource::Borrowed { origin, .. } => {
                let inner = match normalize_relative(target) {
                    Some(p) => rel_string(&p),
                    None => external_path(target).trim_start_matches("resources/").to_string(),
                };
                let bundle_path = format!("resources/{}/{inner}", entry.output_name());
                match fetch_borrowed_chapter(origin, &joined, lockfile, root) {
                    Ok((bytes, _)) => Ok(Asset { bundle_path, bytes }),
                    Err(e @ BorrowError::HashMismatch { .. }) => return Err(e.into()),
                    Err(e) => Err(e.to_string()),
                }
            }
        };
        match fetched {
            Ok(asset) => {
                assets.insert(target.to_string(), asset);
            }
            Err(reason) => log::warn!(
                "{}:{}: image `{target}` not bundled: {reason}",
                doc.source_path.display(),
                image.line
            ),
        }
    }
    Ok(assets)
}

fn external_path(joined: &str) -> String {
    let name = Path::new(joined)
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "asset".to_string());
    format!("resources/_external/{}/{name}", &sha256_hex(joined.as_bytes())[..12])
}

fn load_quizzes(root: &Path, quiz_dir: &Path) -> Result<Vec<QuizFile>, CourseError> {
    let dir = root.join(quiz_dir);
    let read = match std::fs::read_dir(&dir) {
        Ok(r) => r,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(source) => {
            return Err(CourseError::Read {
                path: quiz_dir.to_path_buf(),
                source,
            })
        }
    };
    let mut paths: Vec<PathBuf> = read
        .filter_map(|e| e.ok())
        .filter(|e| e.file_type().map(|t| t.is_file()).unwrap_or(false))
        .map(|e| quiz_dir.join(e.file_name()))
        .filter(|p| p.extension().is_some_and(|x| x == "md"))
        .collect();
    paths.sort();
    paths
        .into_par_iter()
        .map(|path| {
            let raw = std::fs::read_to_string(root.join(&path)).map_err(|source| CourseError::Read {
                path: path.clone(),
                source,
            })?;
            let parsed = parse_quiz(&raw, &path);
            Ok(QuizFile { path, parsed })
        })
        .collect()
}
