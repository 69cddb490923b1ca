use std::collections::BTreeSet;
use std::path::PathBuf;

use super::model::{DiagnosticCode, ParsedQuiz, Quiz, QuizDiagnostic, Severity};

#[derive(Debug, Clone)]
pub struct QuizSummary {
    pub id: String,
    pub path: PathBuf,
    pub header_line: usize,
}

/// Everything cross-file validation needs to know about the course.
#[derive(Debug, Clone, Default)]
pub struct QuizContext {
    /// Every quiz with a readable id, in course order (sorted by path).
    pub quizzes: Vec<QuizSummary>,
    /// Quiz ids referenced from chapters.
    pub referenced: BTreeSet<String>,
}

impl QuizContext {
    pub fn new<'a>(parsed: impl IntoIterator<Item = (&'a PathBuf, &'a ParsedQuiz)>, referenced: BTreeSet<String>) -> Self {
        let mut quizzes: Vec<QuizSummary> = parsed
            .into_iter()
            .filter_map(|(path, p)| {
                p.id.as_ref().map(|id| QuizSummary {
                    id: id.clone(),
                    path: path.clone(),
                    header_line: p.header_line,
                })
            })
            .collect();
        quizzes.sort_by(|a, b| a.path.cmp(&b.path));
        Self { quizzes, referenced }
    }
}

/// Cross-file rules: ids unique across the course (the later file in path
/// order gets the error) and every quiz referenced by some chapter.
pub fn validate_quiz(q: &Quiz, ctx: &QuizContext) -> Vec<QuizDiagnostic> {
    let mut out = Vec::new();
    let header_line = ctx
        .quizzes
        .iter()
        .find(|s| s.path == q.source_path)
        .map_or(1, |s| s.header_line);
    let first_owner = ctx.quizzes.iter().find(|s| s.id == q.id);
    if let Some(owner) = first_owner {
        if owner.path != q.source_path {
            out.push(QuizDiagnostic {
                severity: Severity::Error,
                code: DiagnosticCode::DuplicateQuizId,
                message: format!("quiz id `{}` is already used by {}", q.id, owner.path.display()),
                path: q.source_path.clone(),
                line: header_line,
            });
        }
    }
    if !ctx.referenced.contains(&q.id) {
        out.push(QuizDiagnostic {
            severity: Severity::Warning,
            code: DiagnosticCode::OrphanQuiz,
            message: format!("quiz `{}` is not referenced by any chapter", q.id),
            path: q.source_path.clone(),
            line: header_line,
        });
    }
    out
}
