use std::fmt;
use std::path::PathBuf;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quiz {
    pub id: String,
    pub attempts: Option<u32>,
    pub questions: Vec<Question>,
    pub source_path: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuestionKind {
    MultipleChoice,
    FillInBlank,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Question {
    pub kind: QuestionKind,
    pub prompt: String,
    /// Empty for fill-in-the-blank questions.
    pub choices: Vec<Choice>,
    /// Empty for multiple-choice questions.
    pub accepted_answers: Vec<String>,
    pub shuffle: bool,
}

impl Question {
    pub fn correct_labels(&self) -> Vec<char> {
        self.choices
            .iter()
            .filter(|c| c.correct)
            .map(|c| c.label)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Choice {
    /// Always stored lowercase; correctness is carried by `correct`.
    pub label: char,
    pub text: String,
    pub correct: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DiagnosticCode {
    MissingQuizHeader,
    MissingFooter,
    NoQuestions,
    NoCorrectChoice,
    MixedKinds,
    DuplicateChoiceLabel,
    EmptyPrompt,
    TooFewChoices,
    NoAnswers,
    EmptyChoice,
    EmptyAnswer,
    BadAttempts,
    DuplicateQuizId,
    UnknownQuizRef,
    OrphanQuiz,
    ChoiceLabelOrder,
    StrayLine,
    UnknownHeaderKey,
    UnknownDirective,
    TrailingContent,
    ShuffleIgnored,
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuizDiagnostic {
    pub severity: Severity,
    pub code: DiagnosticCode,
    pub message: String,
    pub path: PathBuf,
    pub line: usize,
}

impl fmt::Display for QuizDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}[{}]: {}",
            self.path.display(),
            self.line,
            self.severity,
            self.code,
            self.message
        )
    }
}

/// Result of parsing one quiz file. `quiz` is present only when no error
/// diagnostics were produced.
#[derive(Debug, Clone)]
pub struct ParsedQuiz {
    pub quiz: Option<Quiz>,
    pub diagnostics: Vec<QuizDiagnostic>,
    /// The id from the header, when the header was readable.
    pub id: Option<String>,
    pub header_line: usize,
}

impl ParsedQuiz {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(|d| d.severity == Severity::Error)
    }
}
