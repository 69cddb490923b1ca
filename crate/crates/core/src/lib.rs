//! Course compiler: one plain-text course (markdown chapters, quiz files and
//! an `_ottr.yml` manifest) is checked and rendered to a book site, a Leanpub
//! manuscript and Coursera embed pages with a quiz bank.

pub mod check;
pub mod course;
pub mod fsutil;
pub mod hash;
pub mod lockfile;
pub mod manifest;
pub mod markdown;
pub mod publish;
pub mod quiz;
pub mod scaffold;
pub mod sync;

pub use check::{
    alt_text_check, render_report, run_checks, spell_check, url_check, CheckEnv, CheckFinding, CheckReport,
    Dictionary, FixtureProber, HttpProber, ReportStatus, UrlPolicy, UrlProber,
};
pub use course::{load_course, Course, CourseChapter, CourseError, LoadOptions, QuizFile};
pub use lockfile::Lockfile;
pub use manifest::{
    load_manifest, parse_manifest, CheckKind, CheckToggles, ChapterEntry, ChapterSource, Contributor,
    CourseManifest, ManifestError, ManifestErrorKind, Target,
};
pub use markdown::{parse_chapter, ChapterDoc};
pub use publish::{build, BuildError, BuildOutcome, RenderError, RenderPlan, TargetBundle};
pub use quiz::{
    convert_to_coursera, parse_quiz, render_leanpub_quiz, validate_quiz, ParsedQuiz, Quiz, QuizDiagnostic, Severity,
};
pub use scaffold::{scaffold_course, ScaffoldError};
pub use sync::{apply_patchset, compute_patchset, fetch_borrowed_chapter, ApplyMode, PatchSet, SyncError};
