//! The configurable check suite: spelling, links, quiz format and alt text,
//! aggregated into one deterministic report.

mod report;
mod spelling;
mod urls;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use globset::{Glob, GlobSet, GlobSetBuilder};
use serde::Serialize;

use crate::course::Course;
use crate::hash::rel_string;
use crate::manifest::{CheckKind, CheckToggles, CourseManifest};
use crate::markdown::ChapterDoc;
use crate::quiz::{validate_quiz, DiagnosticCode, QuizContext, QuizDiagnostic, Severity};

pub use report::{render_report, report_json, summary_table, write_report, REPORT_DIR};
pub use spelling::{load_wordlist, spell_check, tokens, Dictionary, Token};
pub use urls::{external_urls, url_check, FixtureProber, HttpProber, UrlPolicy, UrlProber};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct CheckFinding {
    pub check: CheckKind,
    pub severity: Severity,
    pub path: String,
    pub line: usize,
    pub detail: String,
    /// The word, URL or target the finding is about, when there is one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subject: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportStatus {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckSummary {
    pub check: CheckKind,
    pub enabled: bool,
    pub errors: usize,
    pub warnings: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub status: ReportStatus,
    pub started: i64,
    pub finished: i64,
    /// One row per check kind, in report order.
    pub summary: Vec<CheckSummary>,
    pub findings: Vec<CheckFinding>,
}

impl CheckReport {
    /// Sorts findings (check, path, line, then the rest) and derives the
    /// summaries and status from them.
    pub fn new(enabled: &CheckToggles, mut findings: Vec<CheckFinding>, started: i64, finished: i64) -> Self {
        findings.retain(|f| enabled.is_enabled(f.check));
        findings.sort();
        findings.dedup();
        let summary = CheckKind::ALL
            .into_iter()
            .map(|check| CheckSummary {
                check,
                enabled: enabled.is_enabled(check),
                errors: count(&findings, check, Severity::Error),
                warnings: count(&findings, check, Severity::Warning),
            })
            .collect();
        let status = if findings.iter().any(|f| f.severity == Severity::Error) {
            ReportStatus::Fail
        } else {
            ReportStatus::Pass
        };
        Self {
            status,
            started,
            finished,
            summary,
            findings,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == ReportStatus::Pass
    }

    pub fn errors(&self) -> usize {
        self.summary.iter().map(|s| s.errors).sum()
    }

    pub fn count(&self, check: CheckKind) -> usize {
        self.findings.iter().filter(|f| f.check == check).count()
    }
}

fn count(findings: &[CheckFinding], check: CheckKind, severity: Severity) -> usize {
    findings
        .iter()
        .filter(|f| f.check == check && f.severity == severity)
        .count()
}

#[derive(Debug, thiserror::Error)]
pub enum CheckError {
    #[error("word list {} cannot be read: {reason}", path.display())]
    MissingWordlist { path: PathBuf, reason: String },
}

/// Every image and slide embed with empty alt text.
pub fn alt_text_check(docs: &[&ChapterDoc]) -> Vec<CheckFinding> {
    let mut out = Vec::new();
    for doc in docs {
        let path = rel_string(&doc.source_path);
        let images = doc.images.iter().map(|i| (&i.alt_text, i.line, i.target.clone()));
        let slides = doc.slide_embeds.iter().map(|s| {
            let target = format!("{}{}/{}", crate::markdown::SLIDES_SCHEME, s.deck_id, s.slide_id);
            (&s.alt_text, s.line, target)
        });
        for (alt, line, target) in images.chain(slides) {
            if alt.trim().is_empty() {
                out.push(CheckFinding {
                    check: CheckKind::AltText,
                    severity: Severity::Warning,
                    path: path.clone(),
                    line,
                    detail: format!("image `{target}` has no alt text"),
                    subject: Some(target),
                });
            }
        }
    }
    out
}

/// Per-file quiz diagnostics, cross-file quiz rules and chapter references
/// to quizzes that do not exist.
pub fn quiz_check(course: &Course) -> Vec<CheckFinding> {
    let referenced: BTreeSet<String> = course
        .chapters
        .iter()
        .flat_map(|c| c.doc.quiz_refs.iter().map(|r| r.quiz_id.clone()))
        .collect();
    let ctx = QuizContext::new(course.quizzes.iter().map(|q| (&q.path, &q.parsed)), referenced);
    let mut out: Vec<CheckFinding> = Vec::new();
    for q in &course.quizzes {
        out.extend(q.parsed.diagnostics.iter().map(quiz_finding));
        if let Some(quiz) = &q.parsed.quiz {
            out.extend(validate_quiz(quiz, &ctx).iter().map(quiz_finding));
        }
    }
    let known: BTreeSet<&str> = ctx.quizzes.iter().map(|s| s.id.as_str()).collect();
    for chapter in &course.chapters {
        for r in &chapter.doc.quiz_refs {
            if !known.contains(r.quiz_id.as_str()) {
                out.push(quiz_finding(&QuizDiagnostic {
                    severity: Severity::Error,
                    code: DiagnosticCode::UnknownQuizRef,
                    message: format!("chapter references unknown quiz `{}`", r.quiz_id),
                    path: chapter.doc.source_path.clone(),
                    line: r.line,
                }));
            }
        }
    }
    out
}

fn quiz_finding(d: &QuizDiagnostic) -> CheckFinding {
    CheckFinding {
        check: CheckKind::Quizzes,
        severity: d.severity,
        path: rel_string(&d.path),
        line: d.line,
        detail: format!("{}: {}", d.code, d.message),
        subject: None,
    }
}

/// Network and clock for a check run.
pub struct CheckEnv<'a> {
    pub prober: &'a dyn UrlProber,
    pub policy: UrlPolicy,
    pub dictionary: &'a Dictionary,
    /// Fixed report timestamps; `None` reads the system clock.
    pub clock: Option<i64>,
}

impl<'a> CheckEnv<'a> {
    pub fn new(prober: &'a dyn UrlProber) -> Self {
        Self {
            prober,
            policy: UrlPolicy::default(),
            dictionary: Dictionary::bundled(),
            clock: None,
        }
    }
}

fn now(clock: Option<i64>) -> i64 {
    clock.unwrap_or_else(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs() as i64)
    })
}

pub fn exclusion_set(globs: &[String]) -> GlobSet {
    let mut b = GlobSetBuilder::new();
    for g in globs {
        match Glob::new(g) {
            Ok(g) => {
                b.add(g);
            }
            Err(e) => log::warn!("ignoring bad glob `{g}`: {e}"),
        }
    }
    b.build().unwrap_or_else(|_| GlobSet::empty())
}

/// Runs exactly the checks `manifest` enables over `course`.
pub fn run_checks(course: &Course, manifest: &CourseManifest, env: &CheckEnv<'_>) -> CheckReport {
    let started = now(env.clock);
    let toggles = &manifest.checks;
    let docs: Vec<&ChapterDoc> = course.chapters.iter().map(|c| &c.doc).collect();
    let mut findings = Vec::new();

    if toggles.spelling {
        match load_wordlist(&course.root.join(&manifest.wordlist)) {
            Ok(project) => findings.extend(spell_check(&docs, env.dictionary, &project)),
            Err(e) => findings.push(CheckFinding {
                check: CheckKind::Spelling,
                severity: Severity::Error,
                path: rel_string(&manifest.wordlist),
                line: 0,
                detail: e.to_string(),
                subject: None,
            }),
        }
    }
    if toggles.urls {
        let exclusions = exclusion_set(&manifest.url_exclusions);
        findings.extend(url_check(&docs, &course.root, &exclusions, env.prober, &env.policy));
    }
    if toggles.quizzes {
        findings.extend(quiz_check(course));
    }
    if toggles.alt_text {
        findings.extend(alt_text_check(&docs));
    }
    CheckReport::new(toggles, findings, started, now(env.clock))
}
