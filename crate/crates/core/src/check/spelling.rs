use std::collections::HashSet;
use std::path::Path;
use std::sync::OnceLock;

use rayon::prelude::*;

use super::{CheckError, CheckFinding};
use crate::manifest::CheckKind;
use crate::markdown::{ast::visit_inlines, ChapterDoc, Inline};
use crate::quiz::Severity;

static BUNDLED: &str = include_str!("../../data/en_words.txt");

/// Lowercase word set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dictionary {
    words: HashSet<String>,
}

impl Dictionary {
    /// The base English list shipped with the crate.
    pub fn bundled() -> &'static Dictionary {
        static DICT: OnceLock<Dictionary> = OnceLock::new();
        DICT.get_or_init(|| Dictionary::from_wordlist(BUNDLED))
    }

    /// One token per line; blank lines and `#` comments are skipped.
    pub fn from_wordlist(text: &str) -> Self {
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| normalize(l))
            .collect();
        Self { words }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn insert(&mut self, word: &str) {
        self.words.insert(normalize(word));
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

fn normalize(word: &str) -> String {
    word.to_lowercase().replace('\u{2019}', "'")
}

pub fn load_wordlist(path: &Path) -> Result<Dictionary, CheckError> {
    std::fs::read_to_string(path)
        .map(|t| Dictionary::from_wordlist(&t))
        .map_err(|e| CheckError::MissingWordlist {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
}

/// A prose token and its 1-based column within its text run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token<'a> {
    pub text: &'a str,
    pub offset: usize,
}

fn is_joiner(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '-')
}

/// Maximal runs of letters with internal apostrophes or hyphens.
pub fn tokens(text: &str) -> Vec<Token<'_>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if !chars[i].1.is_alphabetic() {
            i += 1;
            continue;
        }
        let start = i;
        i += 1;
        while i < chars.len() {
            let c = chars[i].1;
            if c.is_alphabetic() {
                i += 1;
            } else if is_joiner(c) && chars.get(i + 1).is_some_and(|n| n.1.is_alphabetic()) {
                i += 2;
            } else {
                break;
            }
        }
        let end = chars.get(i).map_or(text.len(), |c| c.0);
        out.push(Token {
            text: &text[chars[start].0..end],
            offset: start,
        });
    }
    out
}

const CONTRACTION_SUFFIXES: &[&str] = &["s", "t", "d", "ll", "re", "ve", "m"];

fn known(word: &str, dict: &Dictionary, project: &Dictionary) -> bool {
    let has = |w: &str| dict.contains(w) || project.contains(w);
    if has(word) {
        return true;
    }
    if word.contains('-') && word.split('-').all(|p| has(p) || known_apostrophe(p, &has)) {
        return true;
    }
    known_apostrophe(word, &has)
}

fn known_apostrophe(word: &str, has: &dyn Fn(&str) -> bool) -> bool {
    match word.rsplit_once('\'') {
        Some((base, suffix)) => has(base) && CONTRACTION_SUFFIXES.contains(&suffix),
        None => false,
    }
}

/// Flags prose tokens missing from both word sets. Code spans, code blocks,
/// raw HTML and URLs are never tokenized; link text and image alt text are.
pub fn spell_check(docs: &[&ChapterDoc], dictionary: &Dictionary, project: &Dictionary) -> Vec<CheckFinding> {
    docs.par_iter()
        .flat_map_iter(|doc| {
            let mut out = Vec::new();
            let path = crate::hash::rel_string(&doc.source_path);
            visit_inlines(&doc.blocks, &mut |inlines| {
                check_inlines(inlines, &path, dictionary, project, &mut out)
            });
            out
        })
        .collect()
}

fn check_inlines(
    inlines: &[Inline],
    path: &str,
    dict: &Dictionary,
    project: &Dictionary,
    out: &mut Vec<CheckFinding>,
) {
    for inline in inlines {
        match inline {
            Inline::Text { text, pos } => check_text(text, pos.line, path, dict, project, out),
            Inline::Emphasis(c) | Inline::Strong(c) => check_inlines(c, path, dict, project, out),
            Inline::Link { children, .. } => check_inlines(children, path, dict, project, out),
            Inline::Image { alt, pos, .. } => check_text(alt, pos.line, path, dict, project, out),
            Inline::Code { .. }
            | Inline::Autolink { .. }
            | Inline::Html(_)
            | Inline::SoftBreak
            | Inline::HardBreak => {}
        }
    }
}

fn check_text(
    text: &str,
    line: usize,
    path: &str,
    dict: &Dictionary,
    project: &Dictionary,
    out: &mut Vec<CheckFinding>,
) {
    for token in tokens(text) {
        let word = normalize(token.text);
        if !known(&word, dict, project) {
            out.push(CheckFinding {
                check: CheckKind::Spelling,
                severity: Severity::Warning,
                path: path.to_string(),
                line,
                detail: format!("unknown word `{}`", token.text),
                subject: Some(token.text.to_string()),
            });
        }
    }
}
