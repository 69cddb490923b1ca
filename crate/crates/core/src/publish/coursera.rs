use std::collections::BTreeMap;
use std::fmt::Write;

use super::{RenderError, RenderPlan, TargetBundle};
use crate::course::Course;
use crate::manifest::Target;
use crate::markdown::html::escape;
use crate::quiz::{convert_to_coursera, quiz_bank_json, CourseraQuizBank};

const EMBED_STYLE: &str = "html,body{margin:0;padding:0;height:100%}iframe{display:block;width:100%;height:100vh;border:0}";

pub fn embed_page(title: &str, src: &str) -> String {
    format!(
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>{t}</title>\n<style>{EMBED_STYLE}</style>\n</head>\n<body>\n<iframe src=\"{s}\" title=\"{t}\"></iframe>\n</body>\n</html>\n",
        t = escape(title),
        s = escape(src)
    )
}

/// Every valid quiz in the course, in path order.
pub fn quiz_bank(course: &Course) -> CourseraQuizBank {
    let mut quizzes = Vec::new();
    for q in &course.quizzes {
        let Some(quiz) = &q.parsed.quiz else {
            log::warn!("{}: invalid quiz left out of the quiz bank", q.path.display());
            continue;
        };
        match convert_to_coursera(quiz) {
            Ok(entry) => quizzes.push(entry),
            Err(e) => log::warn!("{}: {}", q.path.display(), e.reason),
        }
    }
    CourseraQuizBank { quizzes }
}

pub fn render_coursera(course: &Course, plan: &RenderPlan) -> Result<TargetBundle, RenderError> {
    let base = plan
        .base_url
        .as_deref()
        .or(course.manifest.base_url.as_deref())
        .ok_or(RenderError::MissingBaseUrl)?
        .trim_end_matches('/');
    let mut files = BTreeMap::new();
    let mut index = format!(
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>{0}</title>\n</head>\n<body>\n<h1>{0}</h1>\n<ol>\n",
        escape(&course.manifest.title)
    );
    for chapter in &course.chapters {
        let src = format!("{base}/{}.html", chapter.output_name);
        let file = format!("{}.html", chapter.output_name);
        files.insert(file.clone(), embed_page(&chapter.title, &src).into_bytes());
        let _ = writeln!(index, "<li><a href=\"{file}\">{}</a></li>", escape(&chapter.title));
    }
    index.push_str("</ol>\n</body>\n</html>\n");
    files.insert("index.html".to_string(), index.into_bytes());
    files.insert("quiz_bank.json".to_string(), quiz_bank_json(&quiz_bank(course)).into_bytes());
    Ok(TargetBundle {
        target: Target::Coursera,
        files,
        entrypoint: "index.html".to_string(),
    })
}
