use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Component, Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

use globset::GlobSet;

use super::CheckFinding;
use crate::course::is_relative_target;
use crate::hash::rel_string;
use crate::manifest::CheckKind;
use crate::markdown::ChapterDoc;
use crate::quiz::Severity;

/// Maps a URL to an HTTP status. Implementations are called from several
/// threads at once.
pub trait UrlProber: Sync {
    fn probe(&self, url: &str) -> Result<u16, String>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UrlPolicy {
    pub parallelism: usize,
    pub retries: u32,
    pub timeout: Duration,
}

impl Default for UrlPolicy {
    fn default() -> Self {
        Self {
            parallelism: 8,
            retries: 1,
            timeout: Duration::from_secs(10),
        }
    }
}

/// Real requests: `HEAD`, falling back to `GET` when the server rejects `HEAD`.
pub struct HttpProber {
    agent: ureq::Agent,
}

impl HttpProber {
    pub fn new(timeout: Duration) -> Self {
        Self {
            agent: ureq::AgentBuilder::new()
                .timeout(timeout)
                .user_agent(concat!("ottr/", env!("CARGO_PKG_VERSION")))
                .build(),
        }
    }

    fn status(result: Result<ureq::Response, ureq::Error>) -> Result<u16, String> {
        match result {
            Ok(r) => Ok(r.status()),
            Err(ureq::Error::Status(code, _)) => Ok(code),
            Err(e) => Err(e.to_string()),
        }
    }
}

impl UrlProber for HttpProber {
    fn probe(&self, url: &str) -> Result<u16, String> {
        let head = Self::status(self.agent.head(url).call())?;
        if matches!(head, 403 | 405 | 501) {
            return Self::status(self.agent.get(url).call());
        }
        Ok(head)
    }
}

/// Canned statuses; unknown URLs fail to probe.
#[derive(Debug, Clone, Default)]
pub struct FixtureProber {
    pub statuses: HashMap<String, u16>,
}

impl FixtureProber {
    /// Lines of `<url> <status>`; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut statuses = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let (url, status) = t
                .rsplit_once(char::is_whitespace)
                .ok_or_else(|| format!("line {}: expected `<url> <status>`", i + 1))?;
            let status = status
                .parse()
                .map_err(|_| format!("line {}: bad status `{status}`", i + 1))?;
            statuses.insert(url.trim().to_string(), status);
        }
        Ok(Self { statuses })
    }
}

impl UrlProber for FixtureProber {
    fn probe(&self, url: &str) -> Result<u16, String> {
        self.statuses
            .get(url)
            .copied()
            .ok_or_else(|| "no fixture entry".to_string())
    }
}

fn is_external(target: &str) -> bool {
    target.starts_with("http://") || target.starts_with("https://")
}

/// Internal links are resolved against the chapters in `docs` (by path, or by
/// stem so links to rendered `.html` pages count) and their heading anchors,
/// then against files under `root`. External links are probed once per
/// distinct URL.
pub fn url_check(
    docs: &[&ChapterDoc],
    root: &Path,
    exclusions: &GlobSet,
    prober: &dyn UrlProber,
    policy: &UrlPolicy,
) -> Vec<CheckFinding> {
    let mut out = Vec::new();
    let by_path: HashMap<PathBuf, &ChapterDoc> =
        docs.iter().map(|d| (lexical(&d.source_path), *d)).collect();
    let by_stem: HashMap<String, &ChapterDoc> = docs
        .iter()
        .filter_map(|d| Some((d.source_path.file_stem()?.to_string_lossy().into_owned(), *d)))
        .collect();

    let mut external: BTreeMap<&str, Vec<(String, usize)>> = BTreeMap::new();
    for doc in docs {
        let path = rel_string(&doc.source_path);
        let remote = is_external(&path);
        for f in &doc.resolve_failures {
            out.push(finding(
                &path,
                f.line,
                format!("slide {}/{} could not be resolved: {}", f.deck_id, f.slide_id, f.reason),
            ));
        }
        for link in &doc.links {
            let target = link.target.as_str();
            if is_external(target) {
                if !exclusions.is_match(target) {
                    external.entry(target).or_default().push((path.clone(), link.line));
                }
                continue;
            }
            if let Some(frag) = target.strip_prefix('#') {
                if !doc.has_anchor(frag) {
                    out.push(finding(&path, link.line, format!("missing anchor `#{frag}`")));
                }
                continue;
            }
            if !is_relative_target(target) || remote || exclusions.is_match(target) {
                continue;
            }
            let (file, frag) = match target.split_once('#') {
                Some((f, a)) => (f, Some(a)),
                None => (target, None),
            };
            let file = file.split('?').next().unwrap_or(file);
            let resolved = lexical(&doc.source_path.parent().unwrap_or(Path::new("")).join(file));
            let chapter = by_path.get(&resolved).copied().or_else(|| {
                let p = Path::new(file);
                let page = p.extension().is_some_and(|e| e == "md" || e == "html");
                page.then(|| by_stem.get(p.file_stem()?.to_str()?).copied()).flatten()
            });
            match (chapter, frag) {
                (Some(c), Some(a)) if !a.is_empty() && !c.has_anchor(a) => {
                    out.push(finding(&path, link.line, format!("missing anchor `{target}`")))
                }
                (Some(_), _) => {}
                (None, _) if root.join(&resolved).exists() => {}
                (None, _) => out.push(finding(&path, link.line, format!("missing target `{target}`"))),
            }
        }
    }

    let urls: Vec<&str> = external.keys().copied().collect();
    let results = probe_all(&urls, prober, policy);
    for (url, sites) in &external {
        if let Some(detail) = &results[url] {
            for (path, line) in sites {
                let mut f = finding(path, *line, detail.clone());
                f.subject = Some(url.to_string());
                out.push(f);
            }
        }
    }
    out
}

fn finding(path: &str, line: usize, detail: String) -> CheckFinding {
    CheckFinding {
        check: CheckKind::Urls,
        severity: Severity::Error,
        path: path.to_string(),
        line,
        detail,
        subject: None,
    }
}

/// `None` for a passing URL, otherwise the failure detail.
fn probe_all<'a>(urls: &[&'a str], prober: &dyn UrlProber, policy: &UrlPolicy) -> HashMap<&'a str, Option<String>> {
    let queue = Mutex::new(urls.iter().copied());
    let results = Mutex::new(HashMap::new());
    let workers = policy.parallelism.max(1).min(urls.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let Some(url) = queue.lock().unwrap().next() else { break };
                let outcome = probe_with_retry(url, prober, policy.retries);
                results.lock().unwrap().insert(url, outcome);
            });
        }
    });
    results.into_inner().unwrap()
}

fn probe_with_retry(url: &str, prober: &dyn UrlProber, retries: u32) -> Option<String> {
    let mut last = None;
    for _ in 0..=retries {
        match prober.probe(url) {
            Ok(status) if (200..400).contains(&status) => return None,
            Ok(status) => last = Some(status.to_string()),
            Err(reason) => last = Some(format!("probe failed: {reason}")),
        }
    }
    last
}

fn lexical(p: &Path) -> PathBuf {
    let mut out: Vec<Component<'_>> = Vec::new();
    for c in p.components() {
        match c {
            Component::CurDir => {}
            Component::ParentDir if matches!(out.last(), Some(Component::Normal(_))) => {
                out.pop();
            }
            other => out.push(other),
        }
    }
    out.iter().collect()
}

/// Distinct external URLs that `url_check` would probe.
pub fn external_urls<'a>(docs: &[&'a ChapterDoc], exclusions: &GlobSet) -> BTreeSet<&'a str> {
    docs.iter()
        .flat_map(|d| d.links.iter())
        .map(|l| l.target.as_str())
        .filter(|t| is_external(t) && !exclusions.is_match(*t))
        .collect()
}
