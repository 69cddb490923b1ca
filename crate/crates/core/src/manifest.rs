//! The `_ottr.yml` course manifest.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::path::{Component, Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_yaml::{Mapping, Value};

pub const MANIFEST_FILE: &str = "_ottr.yml";

/// Directories owned by the template unless the upstream manifest says otherwise.
pub const DEFAULT_OWNED: &[&str] = &[".github/**", "scripts/**", "style.css"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Site,
    Leanpub,
    Coursera,
}

impl Target {
    pub const ALL: [Target; 3] = [Target::Site, Target::Leanpub, Target::Coursera];

    pub fn as_str(self) -> &'static str {
        match self {
            Target::Site => "site",
            Target::Leanpub => "leanpub",
            Target::Coursera => "coursera",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "site" => Ok(Target::Site),
            "leanpub" => Ok(Target::Leanpub),
            "coursera" => Ok(Target::Coursera),
            other => Err(format!("unknown target `{other}` (expected site, leanpub or coursera)")),
        }
    }
}

/// The four configurable checks, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Spelling,
    Urls,
    Quizzes,
    AltText,
}

impl CheckKind {
    pub const ALL: [CheckKind; 4] = [
        CheckKind::Spelling,
        CheckKind::Urls,
        CheckKind::Quizzes,
        CheckKind::AltText,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckKind::Spelling => "spelling",
            CheckKind::Urls => "urls",
            CheckKind::Quizzes => "quizzes",
            CheckKind::AltText => "alt_text",
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CheckKind::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown check `{s}` (expected spelling, urls, quizzes or alt_text)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckToggles {
    pub spelling: bool,
    pub urls: bool,
    pub quizzes: bool,
    pub alt_text: bool,
}

impl Default for CheckToggles {
    fn default() -> Self {
        Self::all(true)
    }
}

impl CheckToggles {
    pub fn all(on: bool) -> Self {
        Self {
            spelling: on,
            urls: on,
            quizzes: on,
            alt_text: on,
        }
    }

    pub fn is_enabled(&self, check: CheckKind) -> bool {
        match check {
            CheckKind::Spelling => self.spelling,
            CheckKind::Urls => self.urls,
            CheckKind::Quizzes => self.quizzes,
            CheckKind::AltText => self.alt_text,
        }
    }

    pub fn set(&mut self, check: CheckKind, on: bool) {
        match check {
            CheckKind::Spelling => self.spelling = on,
            CheckKind::Urls => self.urls = on,
            CheckKind::Quizzes => self.quizzes = on,
            CheckKind::AltText => self.alt_text = on,
        }
    }

    pub fn enabled(&self) -> Vec<CheckKind> {
        CheckKind::ALL
            .into_iter()
            .filter(|c| self.is_enabled(*c))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChapterSource {
    Local(PathBuf),
    /// A chapter maintained in another course, pinned through the lockfile.
    Borrowed { origin: String, file: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChapterEntry {
    pub source: ChapterSource,
    pub title_override: Option<String>,
}

impl ChapterEntry {
    pub fn file(&self) -> &Path {
        match &self.source {
            ChapterSource::Local(p) => p,
            ChapterSource::Borrowed { file, .. } => file,
        }
    }

    /// Page/file stem used for every rendered form of this chapter.
    pub fn output_name(&self) -> String {
        self.file()
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contributor {
    pub name: String,
    /// Highest involvement first.
    pub roles: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyncConfig {
    pub upstream: String,
    pub exclusions: Vec<String>,
    pub opt_in: bool,
    /// Globs naming the template-owned files this course receives updates for.
    pub owned: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CourseManifest {
    pub title: String,
    pub chapters: Vec<ChapterEntry>,
    pub targets: BTreeSet<Target>,
    pub checks: CheckToggles,
    pub quiz_dir: PathBuf,
    pub wordlist: PathBuf,
    pub url_exclusions: Vec<String>,
    pub feedback_url: Option<String>,
    pub base_url: Option<String>,
    pub credits: Vec<Contributor>,
    pub sync: Option<SyncConfig>,
}

impl CourseManifest {
    /// A manifest with every optional field at its default.
    pub fn new(title: impl Into<String>, chapters: Vec<ChapterEntry>) -> Self {
        Self {
            title: title.into(),
            chapters,
            targets: Target::ALL.into_iter().collect(),
            checks: CheckToggles::default(),
            quiz_dir: PathBuf::from("quizzes"),
            wordlist: PathBuf::from("dictionary.txt"),
            url_exclusions: Vec::new(),
            feedback_url: None,
            base_url: None,
            credits: Vec::new(),
            sync: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ManifestErrorKind {
    Syntax,
    MissingField,
    DuplicateChapter,
    DuplicateTarget,
    EmptyTargets,
    BadGlob,
    PathEscape,
    InvalidValue,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{}: {message}", location(.key, .line))]
pub struct ManifestError {
    pub kind: ManifestErrorKind,
    pub key: String,
    pub line: Option<usize>,
    pub message: String,
}

fn location(key: &str, line: &Option<usize>) -> String {
    match line {
        Some(l) => format!("{MANIFEST_FILE}:{l}: `{key}`"),
        None => format!("{MANIFEST_FILE}: `{key}`"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestWarning {
    pub key: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ManifestWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", location(&self.key, &self.line), self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedManifest {
    pub manifest: CourseManifest,
    pub warnings: Vec<ManifestWarning>,
}

pub fn parse_manifest(raw: &str) -> Result<ParsedManifest, ManifestError> {
    let mut p = ManifestParser {
        raw,
        warnings: Vec::new(),
    };
    let manifest = p.parse()?;
    Ok(ParsedManifest {
        manifest,
        warnings: p.warnings,
    })
}

/// Reads `_ottr.yml` from a course root.
pub fn load_manifest(course_root: &Path) -> Result<ParsedManifest, LoadManifestError> {
    let path = course_root.join(MANIFEST_FILE);
    let raw = std::fs::read_to_string(&path).map_err(|source| LoadManifestError::Io { path, source })?;
    Ok(parse_manifest(&raw)?)
}

#[derive(Debug, thiserror::Error)]
pub enum LoadManifestError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Invalid(#[from] ManifestError),
}

struct ManifestParser<'a> {
    raw: &'a str,
    warnings: Vec<ManifestWarning>,
}

impl ManifestParser<'_> {
    fn err(&self, kind: ManifestErrorKind, key: &str, message: impl Into<String>) -> ManifestError {
        ManifestError {
            kind,
            key: key.to_string(),
            line: key_line(self.raw, key),
            message: message.into(),
        }
    }

    fn invalid(&self, key: &str, message: impl Into<String>) -> ManifestError {
        self.err(ManifestErrorKind::InvalidValue, key, message)
    }

    fn warn_unknown(&mut self, map: &Mapping, known: &[&str], prefix: &str) {
        for k in map.keys() {
            let name = scalar_string(k).unwrap_or_else(|| format!("{k:?}"));
            if !known.contains(&name.as_str()) {
                let key = if prefix.is_empty() {
                    name.clone()
                } else {
                    format!("{prefix}.{name}")
                };
                self.warnings.push(ManifestWarning {
                    line: key_line(self.raw, &key),
                    key,
                    message: "unknown key ignored".into(),
                });
            }
        }
    }

    fn parse(&mut self) -> Result<CourseManifest, ManifestError> {
        let root: Value = serde_yaml::from_str(self.raw).map_err(|e| ManifestError {
            kind: ManifestErrorKind::Syntax,
            key: "<document>".into(),
            line: e.location().map(|l| l.line()),
            message: e.to_string(),
        })?;
        let map = match root {
            Value::Mapping(m) => m,
            Value::Null => Mapping::new(),
            _ => return Err(self.invalid("<document>", "manifest must be a mapping")),
        };
        self.warn_unknown(
            &map,
            &[
                "title",
                "targets",
                "chapters",
                "checks",
                "quiz_dir",
                "wordlist",
                "url_exclusions",
                "feedback_url",
                "base_url",
                "credits",
                "sync",
            ],
            "",
        );

        let title = match map.get("title") {
            None | Some(Value::Null) => {
                return Err(self.err(ManifestErrorKind::MissingField, "title", "course title is required"))
            }
            Some(v) => self.string(v, "title")?,
        };
        if title.trim().is_empty() {
            return Err(self.err(ManifestErrorKind::MissingField, "title", "course title is empty"));
        }

        let targets = self.targets(map.get("targets"))?;
        let chapters = self.chapters(map.get("chapters"))?;
        let checks = self.checks(map.get("checks"))?;
        let quiz_dir = self.rel_path(map.get("quiz_dir"), "quiz_dir", "quizzes")?;
        let wordlist = self.rel_path(map.get("wordlist"), "wordlist", "dictionary.txt")?;
        let url_exclusions = self.globs(map.get("url_exclusions"), "url_exclusions")?;
        let feedback_url = self.url(map.get("feedback_url"), "feedback_url")?;
        let base_url = self.url(map.get("base_url"), "base_url")?;
        let credits = self.credits(map.get("credits"))?;
        let sync = self.sync(map.get("sync"))?;

        Ok(CourseManifest {
            title,
            chapters,
            targets,
            checks,
            quiz_dir,
            wordlist,
            url_exclusions,
            feedback_url,
            base_url,
            credits,
            sync,
        })
    }

    fn string(&self, v: &Value, key: &str) -> Result<String, ManifestError> {
        scalar_string(v).ok_or_else(|| self.invalid(key, "expected a string"))
    }

    fn seq<'v>(&self, v: Option<&'v Value>, key: &str) -> Result<&'v [Value], ManifestError> {
        match v {
            None | Some(Value::Null) => Ok(&[]),
            Some(Value::Sequence(s)) => Ok(s),
            Some(_) => Err(self.invalid(key, "expected a list")),
        }
    }

    fn targets(&self, v: Option<&Value>) -> Result<BTreeSet<Target>, ManifestError> {
        if matches!(v, None | Some(Value::Null)) {
            return Ok(Target::ALL.into_iter().collect());
        }
        let items = self.seq(v, "targets")?;
        if items.is_empty() {
            return Err(self.err(
                ManifestErrorKind::EmptyTargets,
                "targets",
                "at least one of site, leanpub, coursera is required",
            ));
        }
        let mut out = BTreeSet::new();
        for item in items {
            let name = self.string(item, "targets")?;
            let t = Target::from_str(&name).map_err(|m| self.invalid("targets", m))?;
            if !out.insert(t) {
                return Err(self.err(
                    ManifestErrorKind::DuplicateTarget,
                    "targets",
                    format!("target `{t}` listed more than once"),
                ));
            }
        }
        Ok(out)
    }

    fn chapters(&mut self, v: Option<&Value>) -> Result<Vec<ChapterEntry>, ManifestError> {
        if matches!(v, None | Some(Value::Null)) {
            return Err(self.err(ManifestErrorKind::MissingField, "chapters", "at least one chapter is required"));
        }
        let items = self.seq(v, "chapters")?;
        if items.is_empty() {
            return Err(self.err(ManifestErrorKind::MissingField, "chapters", "at least one chapter is required"));
        }
        let mut out: Vec<ChapterEntry> = Vec::new();
        let mut names = HashSet::new();
        let mut sources = HashSet::new();
        for item in items {
            let entry = match item {
                Value::String(s) => ChapterEntry {
                    source: ChapterSource::Local(self.check_path(s, "chapters.source")?),
                    title_override: None,
                },
                Value::Mapping(m) => self.chapter_entry(m)?,
                _ => return Err(self.invalid("chapters", "each chapter must be a mapping with `source` or `borrow`")),
            };
            let name = entry.output_name();
            let key = match &entry.source {
                ChapterSource::Local(p) => p.display().to_string(),
                ChapterSource::Borrowed { origin, file } => format!("{origin}#{}", file.display()),
            };
            if !sources.insert(key) || !names.insert(name.clone()) {
                let file = entry.file().display().to_string();
                return Err(ManifestError {
                    kind: ManifestErrorKind::DuplicateChapter,
                    key: "chapters".into(),
                    line: nth_line_containing(self.raw, &file, 2)
                        .or_else(|| nth_line_containing(self.raw, &name, 2)),
                    message: format!("chapter `{file}` is listed more than once (output name `{name}`)"),
                });
            }
            out.push(entry);
        }
        Ok(out)
    }

    fn chapter_entry(&mut self, m: &Mapping) -> Result<ChapterEntry, ManifestError> {
        self.warn_unknown(m, &["source", "borrow", "title"], "chapters");
        let title_override = match m.get("title") {
            None | Some(Value::Null) => None,
            Some(v) => Some(self.string(v, "chapters.title")?),
        };
        let source = match (m.get("source"), m.get("borrow")) {
            (Some(s), None) => ChapterSource::Local(self.check_path(&self.string(s, "chapters.source")?, "chapters.source")?),
            (None, Some(Value::Mapping(b))) => {
                self.warn_unknown(b, &["origin", "file"], "chapters.borrow");
                let origin = match b.get("origin") {
                    Some(v) => self.string(v, "origin")?,
                    None => return Err(self.err(ManifestErrorKind::MissingField, "origin", "borrowed chapter needs `origin`")),
                };
                let file = match b.get("file") {
                    Some(v) => self.check_path(&self.string(v, "file")?, "file")?,
                    None => return Err(self.err(ManifestErrorKind::MissingField, "file", "borrowed chapter needs `file`")),
                };
                ChapterSource::Borrowed { origin, file }
            }
            (None, Some(_)) => return Err(self.invalid("borrow", "expected {origin: …, file: …}")),
            (Some(_), Some(_)) => {
                return Err(self.invalid("chapters", "a chapter has exactly one of `source` or `borrow`"))
            }
            (None, None) => {
                return Err(self.err(ManifestErrorKind::MissingField, "chapters", "chapter entry needs `source` or `borrow`"))
            }
        };
        Ok(ChapterEntry {
            source,
            title_override,
        })
    }

    fn checks(&mut self, v: Option<&Value>) -> Result<CheckToggles, ManifestError> {
        let mut toggles = CheckToggles::default();
        let m = match v {
            None | Some(Value::Null) => return Ok(toggles),
            Some(Value::Mapping(m)) => m,
            Some(_) => return Err(self.invalid("checks", "expected a mapping of check names to true/false")),
        };
        self.warn_unknown(m, &["spelling", "urls", "quizzes", "alt_text"], "checks");
        for check in CheckKind::ALL {
            match m.get(check.as_str()) {
                None | Some(Value::Null) => {}
                Some(Value::Bool(b)) => toggles.set(check, *b),
                Some(_) => {
                    return Err(self.invalid(
                        &format!("checks.{check}"),
                        "expected true or false",
                    ))
                }
            }
        }
        Ok(toggles)
    }

    fn rel_path(&self, v: Option<&Value>, key: &str, default: &str) -> Result<PathBuf, ManifestError> {
        match v {
            None | Some(Value::Null) => Ok(PathBuf::from(default)),
            Some(v) => self.check_path(&self.string(v, key)?, key),
        }
    }

    fn check_path(&self, raw: &str, key: &str) -> Result<PathBuf, ManifestError> {
        normalize_relative(raw).ok_or_else(|| {
            self.err(
                ManifestErrorKind::PathEscape,
                key,
                format!("path `{raw}` must stay inside the course root"),
            )
        })
    }

    fn globs(&self, v: Option<&Value>, key: &str) -> Result<Vec<String>, ManifestError> {
        self.seq(v, key)?
            .iter()
            .map(|item| {
                let g = self.string(item, key)?;
                globset::Glob::new(&g)
                    .map_err(|e| self.err(ManifestErrorKind::BadGlob, key, format!("bad glob `{g}`: {e}")))?;
                Ok(g)
            })
            .collect()
    }

    fn url(&self, v: Option<&Value>, key: &str) -> Result<Option<String>, ManifestError> {
        let s = match v {
            None | Some(Value::Null) => return Ok(None),
            Some(v) => self.string(v, key)?,
        };
        match url::Url::parse(&s) {
            Ok(u) if matches!(u.scheme(), "http" | "https") => Ok(Some(s)),
            _ => Err(self.invalid(key, format!("`{s}` is not an http(s) URL"))),
        }
    }

    fn credits(&mut self, v: Option<&Value>) -> Result<Vec<Contributor>, ManifestError> {
        let items = self.seq(v, "credits")?.to_vec();
        let mut out = Vec::new();
        for item in &items {
            let Value::Mapping(m) = item else {
                return Err(self.invalid("credits", "each credit is {name: …, roles: […]}"));
            };
            self.warn_unknown(m, &["name", "roles"], "credits");
            let name = match m.get("name") {
                Some(v) => self.string(v, "name")?,
                None => return Err(self.err(ManifestErrorKind::MissingField, "name", "credit needs a name")),
            };
            let roles = self
                .seq(m.get("roles"), "roles")?
                .iter()
                .map(|r| self.string(r, "roles"))
                .collect::<Result<Vec<_>, _>>()?;
            if roles.is_empty() {
                return Err(self.err(
                    ManifestErrorKind::MissingField,
                    "roles",
                    format!("contributor `{name}` needs at least one role"),
                ));
            }
            out.push(Contributor { name, roles });
        }
        Ok(out)
    }

    fn sync(&mut self, v: Option<&Value>) -> Result<Option<SyncConfig>, ManifestError> {
        let m = match v {
            None | Some(Value::Null) => return Ok(None),
            Some(Value::Mapping(m)) => m,
            Some(_) => return Err(self.invalid("sync", "expected a mapping")),
        };
        self.warn_unknown(m, &["upstream", "exclusions", "opt_in", "owned"], "sync");
        let upstream = match m.get("upstream") {
            Some(v) => self.string(v, "sync.upstream")?,
            None => return Err(self.err(ManifestErrorKind::MissingField, "sync.upstream", "sync needs an upstream")),
        };
        let opt_in = match m.get("opt_in") {
            None | Some(Value::Null) => false,
            Some(Value::Bool(b)) => *b,
            Some(_) => return Err(self.invalid("sync.opt_in", "expected true or false")),
        };
        let exclusions = self.globs(m.get("exclusions"), "sync.exclusions")?;
        let owned = if m.contains_key("owned") {
            self.globs(m.get("owned"), "sync.owned")?
        } else {
            DEFAULT_OWNED.iter().map(|s| s.to_string()).collect()
        };
        Ok(Some(SyncConfig {
            upstream,
            exclusions,
            opt_in,
            owned,
        }))
    }
}

fn scalar_string(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

/// Lexically normalizes a relative path; `None` if it is absolute or climbs
/// above its root.
pub fn normalize_relative(raw: &str) -> Option<PathBuf> {
    let path = Path::new(raw);
    let mut parts: Vec<&std::ffi::OsStr> = Vec::new();
    for c in path.components() {
        match c {
            Component::Normal(p) => parts.push(p),
            Component::CurDir => {}
            Component::ParentDir => {
                parts.pop()?;
            }
            Component::RootDir | Component::Prefix(_) => return None,
        }
    }
    if parts.is_empty() {
        return None;
    }
    Some(parts.iter().collect())
}

/// Best-effort line of a (possibly dotted) key in the raw YAML.
fn key_line(raw: &str, key: &str) -> Option<usize> {
    let mut from = 0;
    let mut found = None;
    for part in key.split('.') {
        let hit = raw
            .lines()
            .enumerate()
            .skip(from)
            .find(|(_, l)| contains_key(l, part))?;
        from = hit.0;
        found = Some(hit.0 + 1);
    }
    found
}

fn contains_key(line: &str, key: &str) -> bool {
    let mut search = line;
    while let Some(idx) = search.find(key) {
        let before = search[..idx].chars().last();
        let after = search[idx + key.len()..].trim_start();
        let boundary = before.map_or(true, |c| !c.is_alphanumeric() && c != '_');
        if boundary && after.starts_with(':') {
            return true;
        }
        search = &search[idx + key.len()..];
    }
    false
}

fn nth_line_containing(raw: &str, needle: &str, n: usize) -> Option<usize> {
    raw.lines()
        .enumerate()
        .filter(|(_, l)| l.contains(needle))
        .nth(n - 1)
        .map(|(i, _)| i + 1)
}

/// Serializes a manifest with every field explicit, in schema order.
pub fn render_manifest(m: &CourseManifest) -> String {
    fn s(v: &str) -> Value {
        Value::String(v.to_string())
    }
    fn list(items: &[String]) -> Value {
        Value::Sequence(items.iter().map(|i| s(i)).collect())
    }
    let mut root = Mapping::new();
    root.insert(s("title"), s(&m.title));
    root.insert(
        s("targets"),
        Value::Sequence(m.targets.iter().map(|t| s(t.as_str())).collect()),
    );
    let chapters = m
        .chapters
        .iter()
        .map(|c| {
            let mut e = Mapping::new();
            match &c.source {
                ChapterSource::Local(p) => {
                    e.insert(s("source"), s(&path_str(p)));
                }
                ChapterSource::Borrowed { origin, file } => {
                    let mut b = Mapping::new();
                    b.insert(s("origin"), s(origin));
                    b.insert(s("file"), s(&path_str(file)));
                    e.insert(s("borrow"), Value::Mapping(b));
                }
            }
            if let Some(t) = &c.title_override {
                e.insert(s("title"), s(t));
            }
            Value::Mapping(e)
        })
        .collect();
    root.insert(s("chapters"), Value::Sequence(chapters));
    let mut checks = Mapping::new();
    for c in CheckKind::ALL {
        checks.insert(s(c.as_str()), Value::Bool(m.checks.is_enabled(c)));
    }
    root.insert(s("checks"), Value::Mapping(checks));
    root.insert(s("quiz_dir"), s(&path_str(&m.quiz_dir)));
    root.insert(s("wordlist"), s(&path_str(&m.wordlist)));
    root.insert(s("url_exclusions"), list(&m.url_exclusions));
    if let Some(u) = &m.feedback_url {
        root.insert(s("feedback_url"), s(u));
    }
    if let Some(u) = &m.base_url {
        root.insert(s("base_url"), s(u));
    }
    let credits = m
        .credits
        .iter()
        .map(|c| {
            let mut e = Mapping::new();
            e.insert(s("name"), s(&c.name));
            e.insert(s("roles"), list(&c.roles));
            Value::Mapping(e)
        })
        .collect();
    root.insert(s("credits"), Value::Sequence(credits));
    if let Some(sync) = &m.sync {
        let mut e = Mapping::new();
        e.insert(s("upstream"), s(&sync.upstream));
        e.insert(s("exclusions"), list(&sync.exclusions));
        e.insert(s("opt_in"), Value::Bool(sync.opt_in));
        e.insert(s("owned"), list(&sync.owned));
        root.insert(s("sync"), Value::Mapping(e));
    }
    serde_yaml::to_string(&Value::Mapping(root)).expect("manifest values always serialize")
}

fn path_str(p: &Path) -> String {
    p.components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join("/")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_manifest_gets_defaults() {
        let p = parse_manifest("title: Demo\nchapters:\n  - source: 01-intro.md\n").unwrap();
        let m = p.manifest;
        assert_eq!(m.targets, Target::ALL.into_iter().collect());
        assert_eq!(m.checks, CheckToggles::all(true));
        assert_eq!(m.quiz_dir, PathBuf::from("quizzes"));
        assert_eq!(m.wordlist, PathBuf::from("dictionary.txt"));
        assert!(p.warnings.is_empty());
    }

    #[test]
    fn empty_checks_mapping_enables_everything() {
        let m = parse_manifest("title: D\nchapters: [a.md]\nchecks: {}\n").unwrap().manifest;
        assert_eq!(m.checks, CheckToggles::all(true));
    }

    #[test]
    fn duplicate_chapter_names_the_file_and_line() {
        let raw = "title: D\nchapters:\n  - source: 01-intro.md\n  - source: 01-intro.md\n";
        let e = parse_manifest(raw).unwrap_err();
        assert_eq!(e.kind, ManifestErrorKind::DuplicateChapter);
        assert!(e.message.contains("01-intro.md"));
        assert_eq!(e.line, Some(4));
    }

    #[test]
    fn unknown_keys_warn() {
        let p = parse_manifest("title: D\nchapters: [a.md]\ntheme: dark\nchecks: {spelling: false, grammar: true}\n").unwrap();
        let keys: Vec<_> = p.warnings.iter().map(|w| w.key.as_str()).collect();
        assert_eq!(keys, ["theme", "checks.grammar"]);
        assert_eq!(p.warnings[0].line, Some(3));
        assert!(!p.manifest.checks.spelling);
    }

    #[test]
    fn error_kinds() {
        let kind = |raw: &str| parse_manifest(raw).unwrap_err().kind;
        assert_eq!(kind("chapters: [a.md]\n"), ManifestErrorKind::MissingField);
        assert_eq!(kind("title: D\n"), ManifestErrorKind::MissingField);
        assert_eq!(kind("title: D\nchapters: [a.md]\ntargets: []\n"), ManifestErrorKind::EmptyTargets);
        assert_eq!(kind("title: D\nchapters: [a.md]\ntargets: [site, site]\n"), ManifestErrorKind::DuplicateTarget);
        assert_eq!(kind("title: D\nchapters: [a.md]\nurl_exclusions: ['a[']\n"), ManifestErrorKind::BadGlob);
        assert_eq!(kind("title: D\nchapters: [../x.md]\n"), ManifestErrorKind::PathEscape);
        assert_eq!(kind("title: D\nchapters: [a.md]\nquiz_dir: /etc\n"), ManifestErrorKind::PathEscape);
        assert_eq!(kind("title: D\nchapters: [a.md]\nbase_url: ftp://x\n"), ManifestErrorKind::InvalidValue);
        assert_eq!(kind("title: [\n"), ManifestErrorKind::Syntax);
        assert_eq!(
            kind("title: D\nchapters:\n  - {source: a.md, borrow: {origin: o, file: b.md}}\n"),
            ManifestErrorKind::InvalidValue
        );
    }

    #[test]
    fn borrowed_origin_may_live_outside_the_course() {
        let raw = "title: D\nchapters:\n  - borrow: {origin: ../other-course, file: 03-shared.md}\n";
        let m = parse_manifest(raw).unwrap().manifest;
        assert_eq!(
            m.chapters[0].source,
            ChapterSource::Borrowed {
                origin: "../other-course".into(),
                file: "03-shared.md".into()
            }
        );
    }

    #[test]
    fn full_schema_round_trips() {
        let raw = r#"
title: Documentation and Usability
targets: [site, coursera]
chapters:
  - source: 01-intro.md
  - source: chapters/02-methods.md
    title: Methods
  - borrow: {origin: ../other-course, file: 03-shared.md}
checks: {spelling: true, urls: false, quizzes: true, alt_text: true}
quiz_dir: quizzes
wordlist: dictionary.txt
url_exclusions: ["*example.org*"]
feedback_url: https://example.org/feedback
base_url: https://example.org/course
credits: [{name: Ada, roles: [Content author, Technical review]}]
sync: {upstream: ../template, exclusions: ["quizzes/*"], opt_in: true}
"#;
        let m = parse_manifest(raw).unwrap().manifest;
        assert_eq!(m.chapters[1].title_override.as_deref(), Some("Methods"));
        assert_eq!(m.credits[0].roles, ["Content author", "Technical review"]);
        let again = parse_manifest(&render_manifest(&m)).unwrap();
        assert_eq!(again.manifest, m);
        assert!(again.warnings.is_empty());
    }
}
