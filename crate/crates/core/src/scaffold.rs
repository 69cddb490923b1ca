//! Starter course generator.

use std::io;
use std::path::{Path, PathBuf};

use crate::manifest::{render_manifest, ChapterEntry, ChapterSource, Contributor, CourseManifest};

#[derive(Debug, thiserror::Error)]
pub enum ScaffoldError {
    #[error("{} exists and is not empty", .0.display())]
    DestinationNotEmpty(PathBuf),
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

const INTRO: &str = r#"# Introduction

Welcome! This chapter shows the building blocks of a course. Everything you write here is published to a book website, a Leanpub manuscript and Coursera embed pages from the same source.

## How this course is organized

Each chapter is a plain text file listed under `chapters` in `_ottr.yml`. Continue with [Getting started](02-getting-started.md) when you are ready.

- Write prose in markdown.
- Keep quizzes in the `quizzes` folder.
- Add unusual words to `dictionary.txt`.

<!-- quiz: intro_quiz -->
"#;

const GETTING_STARTED: &str = r#"# Getting started

## Building the course

Run the build from the course folder:

```sh
ottr build --target all
```

The checks run first. Broken links and malformed quizzes stop the build; spelling and missing image descriptions are reported as warnings.

## Adding images

Every image needs alternative text that describes it, for example `![A chart of weekly sign-ups](resources/signups.png)`.

## Getting help

Read the [introduction](01-introduction.md#how-this-course-is-organized) again or visit the [project page](https://example.org/ottr).
"#;

const QUIZ: &str = r#"{quiz, id: intro_quiz, attempts: 2}
? Which file lists the chapters of a course?
a) style.css
B) _ottr.yml
c) dictionary.txt

? Which folder holds the quizzes?
! quizzes
{/quiz}
"#;

const DICTIONARY: &str = "# Project words, one per line. Lines starting with # are comments.\nottr\nleanpub\ncoursera\nmarkdown\n";

const STYLE: &str = r#"body { font-family: system-ui, sans-serif; margin: 0; display: flex; }
.sidebar { width: 16rem; padding: 1rem; background: #f4f4f4; min-height: 100vh; }
.sidebar .current a { font-weight: bold; }
main { max-width: 46rem; padding: 1rem 2rem; }
.pager { display: flex; justify-content: space-between; margin-top: 2rem; }
.quiz-review { border-left: 4px solid #4a7; padding-left: 1rem; }
footer { position: fixed; bottom: 0; right: 1rem; font-size: 0.8rem; }
"#;

const GITIGNORE: &str = "_output/\n.ottr_cache/\nreports/\n";

fn slug(title: &str) -> String {
    let s = crate::markdown::slugify(title);
    if s == "section" {
        "course".to_string()
    } else {
        s
    }
}

pub fn scaffold_manifest(title: &str) -> CourseManifest {
    let chapters = ["01-introduction.md", "02-getting-started.md"]
        .into_iter()
        .map(|f| ChapterEntry {
            source: ChapterSource::Local(PathBuf::from(f)),
            title_override: None,
        })
        .collect();
    let mut m = CourseManifest::new(title, chapters);
    m.url_exclusions = vec!["*example.org*".to_string()];
    m.feedback_url = Some("https://example.org/feedback".to_string());
    m.base_url = Some(format!("https://example.org/{}", slug(title)));
    m.credits = vec![Contributor {
        name: "Your Name".to_string(),
        roles: vec!["Course lead".to_string(), "Content author".to_string()],
    }];
    m
}

/// Creates a starter course in `dest` (which must be missing or empty) and
/// returns the created files.
pub fn scaffold_course(dest: &Path, title: &str) -> Result<Vec<PathBuf>, ScaffoldError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| ScaffoldError::Io { path, source }
    };
    match std::fs::read_dir(dest) {
        Ok(mut entries) => {
            if entries.next().is_some() {
                return Err(ScaffoldError::DestinationNotEmpty(dest.to_path_buf()));
            }
        }
        Err(e) if e.kind() == io::ErrorKind::NotFound => {}
        Err(e) => return Err(io_err(dest)(e)),
    }
    let manifest = render_manifest(&scaffold_manifest(title));
    let files: [(&str, &str); 7] = [
        ("_ottr.yml", &manifest),
        ("01-introduction.md", INTRO),
        ("02-getting-started.md", GETTING_STARTED),
        ("quizzes/intro_quiz.md", QUIZ),
        ("dictionary.txt", DICTIONARY),
        ("style.css", STYLE),
        (".gitignore", GITIGNORE),
    ];
    let mut created = Vec::new();
    for (rel, text) in files {
        let path = dest.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(io_err(parent))?;
        }
        std::fs::write(&path, text).map_err(io_err(&path))?;
        created.push(path);
    }
    Ok(created)
}
