//! Quiz source grammar:
//!
//! ```text
//! {quiz, id: quiz_01, attempts: 10}
//! ? What is 2+2?
//! a) 3
//! B) 4
//!
//! {shuffle: false}
//! ? Capital of France?
//! ! Paris
//! ! paris
//! {/quiz}
//! ```
//!
//! Lowercase choice letters are incorrect, uppercase correct. `!` lines are
//! accepted answers for a fill-in-the-blank question. Blank lines separate
//! questions; a prompt may continue over several lines until the first
//! choice or answer.

use std::collections::HashSet;
use std::path::Path;

use super::model::{
    Choice, DiagnosticCode as Code, ParsedQuiz, Question, QuestionKind, Quiz, QuizDiagnostic,
    Severity,
};

struct Draft {
    line: usize,
    prompt: String,
    shuffle: Option<bool>,
    choices: Vec<(Choice, usize)>,
    answers: Vec<(String, usize)>,
    last: Last,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Last {
    Prompt,
    Choice,
    Answer,
}

struct QuizParser<'a> {
    path: &'a Path,
    diagnostics: Vec<QuizDiagnostic>,
}

impl QuizParser<'_> {
    fn push(&mut self, severity: Severity, code: Code, line: usize, message: impl Into<String>) {
        self.diagnostics.push(QuizDiagnostic {
            severity,
            code,
            message: message.into(),
            path: self.path.to_path_buf(),
            line,
        });
    }

    fn error(&mut self, code: Code, line: usize, message: impl Into<String>) {
        self.push(Severity::Error, code, line, message);
    }

    fn warning(&mut self, code: Code, line: usize, message: impl Into<String>) {
        self.push(Severity::Warning, code, line, message);
    }

    fn header(&mut self, t: &str, line: usize) -> (Option<String>, Option<u32>) {
        let inner = t
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .unwrap_or(t);
        let mut parts = inner.split(',').map(str::trim);
        parts.next();
        let mut id = None;
        let mut attempts = None;
        for part in parts {
            let Some((key, value)) = part.split_once(':') else {
                self.warning(Code::UnknownHeaderKey, line, format!("ignoring header item `{part}`"));
                continue;
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "id" => {
                    if is_ident(value) {
                        id = Some(value.to_string());
                    } else {
                        self.error(
                            Code::MissingQuizHeader,
                            line,
                            format!("quiz id `{value}` must be letters, digits, `_` or `-`"),
                        );
                    }
                }
                "attempts" => match value.parse::<u32>() {
                    Ok(n) if n > 0 => attempts = Some(n),
                    _ => self.error(
                        Code::BadAttempts,
                        line,
                        format!("attempts must be a positive integer, got `{value}`"),
                    ),
                },
                other => self.warning(Code::UnknownHeaderKey, line, format!("unknown header key `{other}`")),
            }
        }
        if id.is_none() && !self.diagnostics.iter().any(|d| d.line == line && d.severity == Severity::Error) {
            self.error(Code::MissingQuizHeader, line, "quiz header has no `id`");
        }
        (id, attempts)
    }

    fn finish(&mut self, draft: Draft) -> Option<Question> {
        let errors_before = self.error_count();
        let q = draft.line;
        if draft.prompt.is_empty() {
            self.error(Code::EmptyPrompt, q, "question has no prompt text");
        }
        for (c, line) in &draft.choices {
            if c.text.is_empty() {
                self.error(Code::EmptyChoice, *line, format!("choice `{}` has no text", c.label));
            }
        }
        for (a, line) in &draft.answers {
            if a.is_empty() {
                self.error(Code::EmptyAnswer, *line, "accepted answer is empty");
            }
        }
        let kind = match (draft.choices.is_empty(), draft.answers.is_empty()) {
            (false, false) => {
                self.error(
                    Code::MixedKinds,
                    q,
                    "question mixes choice lines and `!` answer lines",
                );
                return None;
            }
            (true, true) => {
                self.error(Code::NoAnswers, q, "question has no choices and no accepted answers");
                return None;
            }
            (false, true) => QuestionKind::MultipleChoice,
            (true, false) => QuestionKind::FillInBlank,
        };
        if kind == QuestionKind::MultipleChoice {
            if draft.choices.len() < 2 {
                self.error(Code::TooFewChoices, q, "multiple-choice question needs at least two choices");
            }
            let mut seen = HashSet::new();
            let mut duplicate = false;
            for (c, line) in &draft.choices {
                if !seen.insert(c.label) {
                    duplicate = true;
                    self.error(
                        Code::DuplicateChoiceLabel,
                        *line,
                        format!("choice label `{}` is used more than once", c.label),
                    );
                }
            }
            if !draft.choices.iter().any(|(c, _)| c.correct) {
                self.error(
                    Code::NoCorrectChoice,
                    q,
                    "no correct choice; mark correct answers with an uppercase letter",
                );
            }
            let in_order = draft
                .choices
                .iter()
                .enumerate()
                .all(|(i, (c, _))| c.label as u32 == 'a' as u32 + i as u32);
            if !duplicate && !in_order {
                self.warning(
                    Code::ChoiceLabelOrder,
                    draft.choices[0].1,
                    "choice labels are not a, b, c… in order",
                );
            }
        } else if draft.shuffle.is_some() {
            self.warning(Code::ShuffleIgnored, q, "shuffle has no effect on fill-in-the-blank questions");
        }
        if self.error_count() > errors_before {
            return None;
        }
        Some(Question {
            kind,
            prompt: draft.prompt,
            shuffle: kind == QuestionKind::MultipleChoice && draft.shuffle.unwrap_or(true),
            choices: draft.choices.into_iter().map(|(c, _)| c).collect(),
            accepted_answers: draft.answers.into_iter().map(|(a, _)| a).collect(),
        })
    }

    fn error_count(&self) -> usize {
        self.diagnostics
            .iter()
            .filter(|d| d.severity == Severity::Error)
            .count()
    }
}

fn is_ident(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

fn choice_line(t: &str) -> Option<(char, bool, &str)> {
    let mut chars = t.chars();
    let label = chars.next().filter(char::is_ascii_alphabetic)?;
    if chars.next() != Some(')') {
        return None;
    }
    let rest = &t[2..];
    if !rest.is_empty() && !rest.starts_with(char::is_whitespace) {
        return None;
    }
    Some((label.to_ascii_lowercase(), label.is_ascii_uppercase(), rest.trim()))
}

fn marker_line(t: &str, marker: char) -> Option<&str> {
    let rest = t.strip_prefix(marker)?;
    (rest.is_empty() || rest.starts_with(char::is_whitespace)).then(|| rest.trim())
}

#[derive(PartialEq, Eq)]
enum State {
    BeforeHeader,
    Body,
    AfterFooter,
}

pub fn parse_quiz(raw: &str, path: impl AsRef<Path>) -> ParsedQuiz {
    let path = path.as_ref();
    let text = crate::markdown::normalize_newlines(raw);
    let mut p = QuizParser {
        path,
        diagnostics: Vec::new(),
    };
    let mut state = State::BeforeHeader;
    let mut header_line = 1;
    let mut id = None;
    let mut attempts = None;
    let mut questions = Vec::new();
    let mut question_count = 0usize;
    let mut draft: Option<Draft> = None;
    let mut pending_shuffle: Option<bool> = None;
    let mut last_line = 0;

    for (idx, line) in text.lines().enumerate() {
        let no = idx + 1;
        last_line = no;
        let t = line.trim();
        match state {
            State::BeforeHeader => {
                if t.is_empty() {
                    continue;
                }
                if t.starts_with("{quiz") && t.ends_with('}') {
                    header_line = no;
                    (id, attempts) = p.header(t, no);
                    state = State::Body;
                } else {
                    p.error(
                        Code::MissingQuizHeader,
                        no,
                        "expected a `{quiz, id: …}` header before quiz content",
                    );
                    return ParsedQuiz {
                        quiz: None,
                        diagnostics: p.diagnostics,
                        id: None,
                        header_line: no,
                    };
                }
            }
            State::AfterFooter => {
                if !t.is_empty() {
                    p.warning(Code::TrailingContent, no, "content after `{/quiz}` is ignored");
                    break;
                }
            }
            State::Body => {
                if t == "{/quiz}" {
                    if let Some(d) = draft.take() {
                        question_count += 1;
                        questions.extend(p.finish(d));
                    }
                    state = State::AfterFooter;
                    continue;
                }
                if t.is_empty() {
                    if let Some(d) = draft.take() {
                        question_count += 1;
                        questions.extend(p.finish(d));
                    }
                    continue;
                }
                if t.starts_with('{') && t.ends_with('}') {
                    if let Some(d) = draft.take() {
                        question_count += 1;
                        questions.extend(p.finish(d));
                    }
                    match t {
                        "{shuffle: true}" => pending_shuffle = Some(true),
                        "{shuffle: false}" => pending_shuffle = Some(false),
                        _ => p.warning(Code::UnknownDirective, no, format!("unknown directive `{t}`")),
                    }
                    continue;
                }
                if let Some(prompt) = marker_line(t, '?') {
                    if let Some(d) = draft.take() {
                        question_count += 1;
                        questions.extend(p.finish(d));
                    }
                    draft = Some(Draft {
                        line: no,
                        prompt: prompt.to_string(),
                        shuffle: pending_shuffle.take(),
                        choices: Vec::new(),
                        answers: Vec::new(),
                        last: Last::Prompt,
                    });
                    continue;
                }
                let Some(d) = draft.as_mut() else {
                    p.warning(Code::StrayLine, no, "line is not part of any question; start questions with `? `");
                    continue;
                };
                if let Some((label, correct, text)) = choice_line(t) {
                    d.choices.push((
                        Choice {
                            label,
                            text: text.to_string(),
                            correct,
                        },
                        no,
                    ));
                    d.last = Last::Choice;
                } else if let Some(answer) = marker_line(t, '!') {
                    d.answers.push((answer.to_string(), no));
                    d.last = Last::Answer;
                } else {
                    let target = match d.last {
                        Last::Prompt => &mut d.prompt,
                        Last::Choice => &mut d.choices.last_mut().expect("last is a choice").0.text,
                        Last::Answer => &mut d.answers.last_mut().expect("last is an answer").0,
                    };
                    if !target.is_empty() {
                        target.push(' ');
                    }
                    target.push_str(t);
                }
            }
        }
    }

    match state {
        State::BeforeHeader => {
            p.error(Code::MissingQuizHeader, 1, "file has no `{quiz, id: …}` header");
            return ParsedQuiz {
                quiz: None,
                diagnostics: p.diagnostics,
                id: None,
                header_line: 1,
            };
        }
        State::Body => {
            if let Some(d) = draft.take() {
                question_count += 1;
                questions.extend(p.finish(d));
            }
            p.error(Code::MissingFooter, last_line.max(header_line), "quiz is not closed with `{/quiz}`");
        }
        State::AfterFooter => {}
    }
    if question_count == 0 {
        p.error(Code::NoQuestions, header_line, "quiz has no questions");
    }

    let quiz = match (&id, p.error_count()) {
        (Some(id), 0) => Some(Quiz {
            id: id.clone(),
            attempts,
            questions,
            source_path: path.to_path_buf(),
        }),
        _ => None,
    };
    ParsedQuiz {
        quiz,
        diagnostics: p.diagnostics,
        id,
        header_line,
    }
}
