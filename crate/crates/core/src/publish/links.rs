use std::collections::HashMap;
use std::path::{Component, Path, PathBuf};

use crate::course::{is_relative_target, Course, CourseChapter};

/// Resolves relative links between chapters of one course.
pub struct ChapterIndex<'a> {
    by_path: HashMap<PathBuf, &'a CourseChapter>,
    by_stem: HashMap<String, &'a CourseChapter>,
}

pub struct ChapterLink<'a> {
    pub chapter: &'a CourseChapter,
    pub fragment: Option<&'a str>,
}

impl<'a> ChapterIndex<'a> {
    pub fn new(course: &'a Course) -> Self {
        Self {
            by_path: course
                .chapters
                .iter()
                .map(|c| (lexical(&c.doc.source_path), c))
                .collect(),
            by_stem: course.chapters.iter().map(|c| (c.output_name.clone(), c)).collect(),
        }
    }

    /// The chapter a link written in `from` points at, if any.
    pub fn resolve(&self, from: &CourseChapter, target: &'a str) -> Option<ChapterLink<'a>> {
        if !is_relative_target(target) {
            return None;
        }
        let (file, fragment) = match target.split_once('#') {
            Some((f, a)) => (f, Some(a).filter(|a| !a.is_empty())),
            None => (target, None),
        };
        let dir = from.doc.source_path.parent().unwrap_or(Path::new(""));
        let chapter = self.by_path.get(&lexical(&dir.join(file))).copied().or_else(|| {
            let p = Path::new(file);
            let page = p.extension().is_some_and(|e| e == "md" || e == "html");
            page.then(|| self.by_stem.get(p.file_stem()?.to_str()?).copied()).flatten()
        })?;
        Some(ChapterLink { chapter, fragment })
    }
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
