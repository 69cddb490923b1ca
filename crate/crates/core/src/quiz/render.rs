use super::model::{QuestionKind, Quiz};

/// Canonical quiz source: single space after each marker, one blank line
/// between questions, LF line endings.
pub fn render_leanpub_quiz(q: &Quiz) -> String {
    let mut out = format!("{{quiz, id: {}", q.id);
    if let Some(n) = q.attempts {
        out.push_str(&format!(", attempts: {n}"));
    }
    out.push_str("}\n");
    for (i, question) in q.questions.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        if question.kind == QuestionKind::MultipleChoice && !question.shuffle {
            out.push_str("{shuffle: false}\n");
        }
        out.push_str(&format!("? {}\n", question.prompt));
        for c in &question.choices {
            let label = if c.correct {
                c.label.to_ascii_uppercase()
            } else {
                c.label
            };
            out.push_str(&format!("{label}) {}\n", c.text));
        }
        for a in &question.accepted_answers {
            out.push_str(&format!("! {a}\n"));
        }
    }
    out.push_str("{/quiz}\n");
    out
}
