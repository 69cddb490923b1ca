//! Quiz DSL: parsing, formatting checks, canonical re-rendering and
//! conversion to a structured quiz bank.

mod coursera;
mod model;
mod parse;
mod render;
mod validate;

pub use coursera::{
    convert_to_coursera, quiz_bank_json, CourseraOption, CourseraQuestion, CourseraQuestionType,
    CourseraQuizBank, CourseraQuizBankEntry, UnconvertibleQuiz,
};
pub use model::{
    Choice, DiagnosticCode, ParsedQuiz, Question, QuestionKind, Quiz, QuizDiagnostic, Severity,
};
pub use parse::parse_quiz;
pub use render::render_leanpub_quiz;
pub use validate::{validate_quiz, QuizContext, QuizSummary};
