use std::collections::BTreeMap;
use std::fmt::Write;

use super::links::ChapterIndex;
use super::{format_date, quiz_by_id, RenderPlan, TargetBundle};
use crate::course::{Course, CourseChapter};
use crate::manifest::Target;
use crate::markdown::html::{escape, render_html, RenderHooks};
use crate::quiz::{Question, QuestionKind, Quiz};

struct SiteHooks<'a> {
    course: &'a Course,
    chapter: &'a CourseChapter,
    index: &'a ChapterIndex<'a>,
}

impl RenderHooks for SiteHooks<'_> {
    fn link_target(&self, target: &str) -> String {
        match self.index.resolve(self.chapter, target) {
            Some(link) => match link.fragment {
                Some(f) => format!("{}.html#{f}", link.chapter.output_name),
                None => format!("{}.html", link.chapter.output_name),
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
        quiz_by_id(self.course, id).map(review_block)
    }
}

/// A non-graded review block: questions with answers behind a disclosure.
pub fn review_block(q: &Quiz) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "<section class=\"quiz-review\" id=\"quiz-{}\">", escape(&q.id));
    out.push_str("<h2>Check your understanding</h2>\n<ol>\n");
    for question in &q.questions {
        let _ = writeln!(out, "<li>\n<p>{}</p>", escape(&question.prompt));
        match question.kind {
            QuestionKind::MultipleChoice => {
                out.push_str("<ul class=\"choices\">\n");
                for c in &question.choices {
                    let _ = writeln!(out, "<li>{}) {}</li>", c.label, escape(&c.text));
                }
                out.push_str("</ul>\n");
            }
            QuestionKind::FillInBlank => out.push_str("<p class=\"blank\">______</p>\n"),
        }
        let _ = writeln!(
            out,
            "<details><summary>Show answer</summary><p>{}</p></details>\n</li>",
            answer_text(question)
        );
    }
    out.push_str("</ol>\n</section>\n");
    out
}

fn answer_text(q: &Question) -> String {
    match q.kind {
        QuestionKind::MultipleChoice => q
            .choices
            .iter()
            .filter(|c| c.correct)
            .map(|c| format!("{}) {}", c.label, escape(&c.text)))
            .collect::<Vec<_>>()
            .join("; "),
        QuestionKind::FillInBlank => q
            .accepted_answers
            .iter()
            .map(|a| escape(a))
            .collect::<Vec<_>>()
            .join(" or "),
    }
}

fn credits_table(course: &Course) -> String {
    let mut out = String::from("<section class=\"credits\">\n<h2 id=\"credits\">Credits</h2>\n<table>\n<thead><tr><th>Contributor</th><th>Roles</th></tr></thead>\n<tbody>\n");
    for c in &course.manifest.credits {
        let roles: Vec<String> = c.roles.iter().map(|r| escape(r)).collect();
        let _ = writeln!(out, "<tr><td>{}</td><td>{}</td></tr>", escape(&c.name), roles.join(", "));
    }
    out.push_str("</tbody>\n</table>\n</section>\n");
    out
}

struct Page<'a> {
    file: String,
    title: &'a str,
}

fn page(course: &Course, plan: &RenderPlan, has_css: bool, current: Option<usize>, title: &str, body: &str) -> String {
    let pages: Vec<Page<'_>> = std::iter::once(Page {
        file: "index.html".into(),
        title: course.manifest.title.as_str(),
    })
    .chain(course.chapters.iter().map(|c| Page {
        file: format!("{}.html", c.output_name),
        title: c.title.as_str(),
    }))
    .collect();
    let pos = current.map_or(0, |i| i + 1);

    let mut out = String::from("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<meta name=\"viewport\" content=\"width=device-width, initial-scale=1\">\n");
    if current.is_some() {
        let _ = writeln!(out, "<title>{} | {}</title>", escape(title), escape(&course.manifest.title));
    } else {
        let _ = writeln!(out, "<title>{}</title>", escape(title));
    }
    if has_css {
        out.push_str("<link rel=\"stylesheet\" href=\"style.css\">\n");
    }
    out.push_str("</head>\n<body>\n<nav class=\"sidebar\">\n");
    let _ = writeln!(
        out,
        "<p class=\"course-title\"><a href=\"index.html\">{}</a></p>\n<ol>",
        escape(&course.manifest.title)
    );
    for (i, p) in pages.iter().enumerate().skip(1) {
        let class = if i == pos { " class=\"current\"" } else { "" };
        let _ = writeln!(out, "<li{class}><a href=\"{}\">{}</a></li>", p.file, escape(p.title));
    }
    out.push_str("</ol>\n</nav>\n<main>\n");
    out.push_str(body);
    out.push_str("<nav class=\"pager\">\n");
    if pos > 0 {
        let p = &pages[pos - 1];
        let _ = writeln!(out, "<a class=\"prev\" href=\"{}\">&larr; {}</a>", p.file, escape(p.title));
    }
    if let Some(p) = pages.get(pos + 1) {
        let _ = writeln!(out, "<a class=\"next\" href=\"{}\">{} &rarr;</a>", p.file, escape(p.title));
    }
    out.push_str("</nav>\n</main>\n<footer>\n");
    if let Some(url) = &course.manifest.feedback_url {
        let _ = writeln!(
            out,
            "<p class=\"feedback\"><a href=\"{}\">Give feedback on this course</a></p>",
            escape(url)
        );
    }
    let _ = writeln!(out, "<p class=\"built\">Built {}</p>", format_date(plan.timestamp()));
    out.push_str("</footer>\n</body>\n</html>\n");
    out
}

pub fn render_site(course: &Course, plan: &RenderPlan) -> TargetBundle {
    let index = ChapterIndex::new(course);
    let mut files = BTreeMap::new();
    let css = std::fs::read(course.root.join("style.css")).ok();
    let has_css = css.is_some();
    if let Some(css) = css {
        files.insert("style.css".to_string(), css);
    }

    let last = course.chapters.len().saturating_sub(1);
    for (i, chapter) in course.chapters.iter().enumerate() {
        let hooks = SiteHooks {
            course,
            chapter,
            index: &index,
        };
        let mut body = String::from("<article>\n");
        body.push_str(&render_html(&chapter.doc.blocks, &hooks));
        body.push_str("</article>\n");
        if i == last && !course.manifest.credits.is_empty() {
            body.push_str(&credits_table(course));
        }
        let html = page(course, plan, has_css, Some(i), &chapter.title, &body);
        files.insert(format!("{}.html", chapter.output_name), html.into_bytes());
        for asset in chapter.assets.values() {
            files.insert(asset.bundle_path.clone(), asset.bytes.clone());
        }
    }

    let mut body = format!("<h1>{}</h1>\n<ol class=\"toc\">\n", escape(&course.manifest.title));
    for c in &course.chapters {
        let _ = writeln!(body, "<li><a href=\"{}.html\">{}</a></li>", c.output_name, escape(&c.title));
    }
    body.push_str("</ol>\n");
    let title = course.manifest.title.clone();
    files.insert("index.html".to_string(), page(course, plan, has_css, None, &title, &body).into_bytes());

    TargetBundle {
        target: Target::Site,
        files,
        entrypoint: "index.html".to_string(),
    }
}
