//! Synthetic inputs shared by the benchmarks.

use std::fmt::Write;
use std::path::{Path, PathBuf};

/// A chapter of roughly `sections` × 12 lines: headings, prose, lists,
/// links, images and a fenced block.
pub fn chapter(index: usize, sections: usize) -> String {
    let mut s = format!("# Chapter {index}\n\n");
    for k in 0..sections {
        let _ = write!(
            s,
            "## Section {k}\n\nThis paragraph explains a reproducible workflow with *emphasis*, `code` and a [link](chapter-{next}.md#section-{k}).\nIt continues on a second line that mentions https://example.org/page/{k}.\n\n- first point\n- second point with ![a small figure](figure.png)\n\n```r\nx <- rnorm({k})\n```\n\n",
            next = (index + 1) % 8
        );
    }
    s
}

pub fn quiz(id: &str, questions: usize) -> String {
    let mut s = format!("{{quiz, id: {id}, attempts: 3}}\n");
    for q in 0..questions {
        if q > 0 {
            s.push('\n');
        }
        if q % 3 == 2 {
            let _ = write!(s, "? Fill in answer {q}\n! answer {q}\n! Answer {q}\n");
        } else {
            let _ = write!(s, "? Question {q} asks which option is right\na) wrong one\nB) right one\nc) wrong two\nD) also right\n");
        }
    }
    s.push_str("{/quiz}\n");
    s
}

/// Writes a course with `chapters` chapters and one quiz per chapter.
pub fn course(dir: &Path, chapters: usize, sections: usize) -> PathBuf {
    let root = dir.join("course");
    std::fs::create_dir_all(root.join("quizzes")).unwrap();
    let mut manifest = String::from("title: Bench Course\nbase_url: https://example.org/bench\nurl_exclusions: ['*example.org*']\nchapters:\n");
    for i in 0..chapters {
        let _ = writeln!(manifest, "  - source: chapter-{i}.md");
        let mut text = chapter(i, sections);
        let _ = writeln!(text, "<!-- quiz: quiz_{i} -->");
        std::fs::write(root.join(format!("chapter-{i}.md")), text).unwrap();
        std::fs::write(root.join(format!("quizzes/quiz_{i}.md")), quiz(&format!("quiz_{i}"), 6)).unwrap();
    }
    std::fs::write(root.join("_ottr.yml"), manifest).unwrap();
    std::fs::write(root.join("figure.png"), b"png").unwrap();
    std::fs::write(root.join("dictionary.txt"), "rnorm\n").unwrap();
    root
}
