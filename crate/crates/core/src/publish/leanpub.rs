use std::collections::BTreeMap;

use super::links::ChapterIndex;
use super::{quiz_by_id, RenderPlan, TargetBundle};
use crate::course::{Course, CourseChapter};
use crate::manifest::Target;
use crate::markdown::html::RenderHooks;
use crate::markdown::markua::render_markua;
use crate::markdown::slugify;
use crate::quiz::render_leanpub_quiz;

struct LeanpubHooks<'a> {
    course: &'a Course,
    chapter: &'a CourseChapter,
    index: &'a ChapterIndex<'a>,
}

impl RenderHooks for LeanpubHooks<'_> {
    /// Links between chapters, and within one, become in-book anchors.
    fn link_target(&self, target: &str) -> String {
        if let Some(f) = target.strip_prefix('#').filter(|f| !f.is_empty()) {
            return format!("#{}", book_id(self.chapter, f));
        }
        match self.index.resolve(self.chapter, target) {
            Some(link) => match link.fragment {
                Some(f) => format!("#{}", book_id(link.chapter, f)),
                None => link
                    .chapter
                    .doc
                    .headings
                    .first()
                    .map_or_else(|| target.to_string(), |h| format!("#{}", book_id(link.chapter, &h.anchor_id))),
            },
            None => target.to_string(),
        }
    }

    fn image_target(&self, target: &str) -> String {
        self.chapter
            .assets
            .get(target)
            .map_or_else(|| target.to_string(), |a| a.bundle_path.clone())
    }

    fn quiz(&self, id: &str) -> Option<String> {
        quiz_by_id(self.course, id).map(render_leanpub_quiz)
    }

    fn keep_html(&self) -> bool {
        false
    }

    fn heading_id(&self, anchor: &str) -> Option<String> {
        Some(book_id(self.chapter, anchor))
    }
}

/// Heading anchors are unique per chapter; the chapter name makes them unique
/// across the book.
fn book_id(chapter: &CourseChapter, anchor: &str) -> String {
    format!("{}-{anchor}", slugify(&chapter.output_name))
}

pub fn render_leanpub(course: &Course, _plan: &RenderPlan) -> TargetBundle {
    let index = ChapterIndex::new(course);
    let mut files = BTreeMap::new();
    let mut book = String::new();
    for chapter in &course.chapters {
        let hooks = LeanpubHooks {
            course,
            chapter,
            index: &index,
        };
        let name = format!("{}.md", chapter.output_name);
        files.insert(
            format!("manuscript/{name}"),
            render_markua(&chapter.doc.blocks, &hooks).into_bytes(),
        );
        book.push_str(&name);
        book.push('\n');
        for asset in chapter.assets.values() {
            files.insert(format!("manuscript/{}", asset.bundle_path), asset.bytes.clone());
        }
    }
    files.insert("manuscript/Book.txt".to_string(), book.into_bytes());
    TargetBundle {
        target: Target::Leanpub,
        files,
        entrypoint: "manuscript/Book.txt".to_string(),
    }
}
