//! Renders one parsed course into the site, Leanpub and Coursera bundles.

mod coursera;
mod leanpub;
mod links;
mod site;

use std::collections::{BTreeMap, BTreeSet};
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::check::{run_checks, write_report, CheckEnv, CheckReport};
use crate::course::{load_course_with, Course, CourseError, LoadOptions};
use crate::manifest::{load_manifest, Target};
use crate::quiz::Quiz;

pub use coursera::{embed_page, quiz_bank, render_coursera};
pub use leanpub::render_leanpub;
pub use links::{ChapterIndex, ChapterLink};
pub use site::{render_site, review_block};

pub const OUTPUT_DIR: &str = "_output";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderPlan {
    pub targets: BTreeSet<Target>,
    /// Defaults to `<course_root>/_output`.
    pub output_root: Option<PathBuf>,
    /// Epoch seconds stamped into outputs; `None` uses the newest content file's mtime.
    pub fixed_timestamp: Option<i64>,
    /// Overrides the manifest's `base_url`.
    pub base_url: Option<String>,
    /// Render even when checks fail.
    pub force: bool,
}

impl RenderPlan {
    pub fn new(targets: impl IntoIterator<Item = Target>) -> Self {
        Self {
            targets: targets.into_iter().collect(),
            output_root: None,
            fixed_timestamp: None,
            base_url: None,
            force: false,
        }
    }

    fn timestamp(&self) -> i64 {
        self.fixed_timestamp.unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetBundle {
    pub target: Target,
    /// Relative path to bytes; paths are unique by construction.
    pub files: BTreeMap<String, Vec<u8>>,
    pub entrypoint: String,
}

impl TargetBundle {
    pub fn dir_name(&self) -> &'static str {
        self.target.as_str()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RenderError {
    #[error("`base_url` must be set in the manifest (or passed with --base-url) to render coursera embed pages")]
    MissingBaseUrl,
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum BuildError {
    #[error("load: {0}")]
    Course(#[from] CourseError),
    #[error("plan: target `{0}` is not listed in the manifest's `targets`")]
    TargetNotEnabled(Target),
    #[error("checks: {} error(s) found; fix them or rebuild with --force", .0.errors())]
    ChecksFailed(Box<CheckReport>),
    #[error("render: {0}")]
    Render(#[from] RenderError),
}

impl BuildError {
    pub fn stage(&self) -> &'static str {
        match self {
            BuildError::Course(_) => "load",
            BuildError::TargetNotEnabled(_) => "plan",
            BuildError::ChecksFailed(_) => "checks",
            BuildError::Render(RenderError::MissingBaseUrl) => "plan",
            BuildError::Render(_) => "write",
        }
    }
}

pub struct BuildOutcome {
    pub bundles: Vec<TargetBundle>,
    pub report: CheckReport,
    /// Directory each bundle was written to.
    pub written: Vec<(Target, PathBuf)>,
    pub timestamp: i64,
}

pub(crate) fn quiz_by_id<'a>(course: &'a Course, id: &str) -> Option<&'a Quiz> {
    course
        .quizzes
        .iter()
        .filter_map(|q| q.parsed.quiz.as_ref())
        .find(|q| q.id == id)
}

pub(crate) fn format_date(epoch: i64) -> String {
    chrono::DateTime::from_timestamp(epoch, 0)
        .map(|t| t.format("%Y-%m-%d %H:%M UTC").to_string())
        .unwrap_or_else(|| epoch.to_string())
}

pub fn render_target(course: &Course, plan: &RenderPlan, target: Target) -> Result<TargetBundle, RenderError> {
    match target {
        Target::Site => Ok(render_site(course, plan)),
        Target::Leanpub => Ok(render_leanpub(course, plan)),
        Target::Coursera => render_coursera(course, plan),
    }
}

/// Parse, check, render, write: one call refreshes every requested target.
/// Nothing is written under the output root unless every bundle renders and
/// the checks pass (or `plan.force` is set); each target directory is
/// replaced atomically.
pub fn build(
    course_root: &Path,
    plan: &RenderPlan,
    load: &LoadOptions<'_>,
    env: &CheckEnv<'_>,
) -> Result<BuildOutcome, BuildError> {
    let parsed = load_manifest(course_root).map_err(CourseError::from)?;
    for w in &parsed.warnings {
        log::warn!("{w}");
    }
    let manifest = parsed.manifest;
    if let Some(t) = plan.targets.iter().find(|t| !manifest.targets.contains(t)) {
        return Err(BuildError::TargetNotEnabled(*t));
    }
    if plan.targets.contains(&Target::Coursera) && plan.base_url.is_none() && manifest.base_url.is_none() {
        return Err(RenderError::MissingBaseUrl.into());
    }
    let course = load_course_with(course_root, manifest, load)?;

    let timestamp = plan.fixed_timestamp.or(course.content_mtime).unwrap_or(0);
    let plan = RenderPlan {
        fixed_timestamp: Some(timestamp),
        ..plan.clone()
    };
    let env = CheckEnv {
        prober: env.prober,
        policy: env.policy,
        dictionary: env.dictionary,
        clock: env.clock.or(plan.fixed_timestamp),
    };
    let report = run_checks(&course, &course.manifest, &env);
    write_report(course_root, &report).map_err(|source| RenderError::Io {
        path: course_root.join(crate::check::REPORT_DIR),
        source,
    })?;
    if !report.passed() && !plan.force {
        return Err(BuildError::ChecksFailed(Box::new(report)));
    }

    let bundles = plan
        .targets
        .par_iter()
        .map(|t| render_target(&course, &plan, *t))
        .collect::<Result<Vec<_>, _>>()?;

    let out_root = plan
        .output_root
        .clone()
        .unwrap_or_else(|| course_root.join(OUTPUT_DIR));
    let mut written = Vec::new();
    for b in &bundles {
        let dir = out_root.join(b.dir_name());
        write_bundle(b, &dir)?;
        written.push((b.target, dir));
    }
    Ok(BuildOutcome {
        bundles,
        report,
        written,
        timestamp,
    })
}

/// Writes a bundle into a sibling temp directory, then swaps it into place.
pub fn write_bundle(bundle: &TargetBundle, dir: &Path) -> Result<(), RenderError> {
    let err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| RenderError::Io { path, source }
    };
    let parent = dir.parent().unwrap_or(Path::new("."));
    std::fs::create_dir_all(parent).map_err(err(parent))?;
    let staging = tempfile::Builder::new()
        .prefix(&format!(".{}-", bundle.dir_name()))
        .tempdir_in(parent)
        .map_err(err(parent))?;
    for (rel, bytes) in &bundle.files {
        let path = staging.path().join(rel);
        if let Some(p) = path.parent() {
            std::fs::create_dir_all(p).map_err(err(p))?;
        }
        std::fs::write(&path, bytes).map_err(err(&path))?;
    }
    let staged = staging.keep();
    let old = if dir.exists() {
        let old = tempfile::Builder::new()
            .prefix(&format!(".{}-old-", bundle.dir_name()))
            .tempdir_in(parent)
            .map_err(err(parent))?
            .keep();
        std::fs::remove_dir(&old).map_err(err(&old))?;
        std::fs::rename(dir, &old).map_err(err(dir))?;
        Some(old)
    } else {
        None
    };
    if let Err(e) = std::fs::rename(&staged, dir) {
        if let Some(old) = &old {
            let _ = std::fs::rename(old, dir);
        }
        let _ = std::fs::remove_dir_all(&staged);
        return Err(err(dir)(e));
    }
    if let Some(old) = old {
        let _ = std::fs::remove_dir_all(old);
    }
    Ok(())
}
