//! Structured quiz bank for LMS import.
//!
//! Field order below is the serialized key order; do not reorder.

use serde::{Deserialize, Serialize};

use super::model::{QuestionKind, Quiz};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CourseraQuizBank {
    pub quizzes: Vec<CourseraQuizBankEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CourseraQuizBankEntry {
    pub id: String,
    pub attempts: Option<u32>,
    pub questions: Vec<CourseraQuestion>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CourseraQuestionType {
    #[serde(rename = "multipleChoice")]
    MultipleChoice,
    #[serde(rename = "checkbox")]
    Checkbox,
    #[serde(rename = "textExactMatch")]
    TextExactMatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CourseraQuestion {
    #[serde(rename = "type")]
    pub kind: CourseraQuestionType,
    pub prompt: String,
    pub shuffle: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub options: Option<Vec<CourseraOption>>,
    #[serde(rename = "acceptedAnswers", skip_serializing_if = "Option::is_none", default)]
    pub accepted_answers: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CourseraOption {
    pub text: String,
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("quiz `{quiz_id}` cannot be converted: {reason}")]
pub struct UnconvertibleQuiz {
    pub quiz_id: String,
    pub reason: String,
}

pub fn convert_to_coursera(q: &Quiz) -> Result<CourseraQuizBankEntry, UnconvertibleQuiz> {
    let fail = |reason: String| UnconvertibleQuiz {
        quiz_id: q.id.clone(),
        reason,
    };
    if q.id.is_empty() {
        return Err(fail("quiz has no id".into()));
    }
    if q.questions.is_empty() {
        return Err(fail("quiz has no questions".into()));
    }
    let mut questions = Vec::with_capacity(q.questions.len());
    for (n, question) in q.questions.iter().enumerate() {
        let n = n + 1;
        if question.prompt.is_empty() {
            return Err(fail(format!("question {n} has an empty prompt")));
        }
        let converted = match question.kind {
            QuestionKind::MultipleChoice => {
                let correct = question.choices.iter().filter(|c| c.correct).count();
                if question.choices.len() < 2 || correct == 0 || !question.accepted_answers.is_empty() {
                    return Err(fail(format!(
                        "question {n} needs at least two choices with at least one correct"
                    )));
                }
                CourseraQuestion {
                    kind: if correct == 1 {
                        CourseraQuestionType::MultipleChoice
                    } else {
                        CourseraQuestionType::Checkbox
                    },
                    prompt: question.prompt.clone(),
                    shuffle: question.shuffle,
                    options: Some(
                        question
                            .choices
                            .iter()
                            .map(|c| CourseraOption {
                                text: c.text.clone(),
                                correct: c.correct,
                            })
                            .collect(),
                    ),
                    accepted_answers: None,
                }
            }
            QuestionKind::FillInBlank => {
                if question.accepted_answers.is_empty() || !question.choices.is_empty() {
                    return Err(fail(format!(
                        "question {n} needs at least one accepted answer and no choices"
                    )));
                }
                CourseraQuestion {
                    kind: CourseraQuestionType::TextExactMatch,
                    prompt: question.prompt.clone(),
                    shuffle: false,
                    options: None,
                    accepted_answers: Some(question.accepted_answers.clone()),
                }
            }
        };
        questions.push(converted);
    }
    Ok(CourseraQuizBankEntry {
        id: q.id.clone(),
        attempts: q.attempts,
        questions,
    })
}

/// Pretty-printed JSON with a trailing newline.
pub fn quiz_bank_json(bank: &CourseraQuizBank) -> String {
    let mut s = serde_json::to_string_pretty(bank).expect("quiz bank serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiz::parse_quiz;

    fn convert(raw: &str) -> CourseraQuizBankEntry {
        convert_to_coursera(&parse_quiz(raw, "q.md").quiz.unwrap()).unwrap()
    }

    #[test]
    fn single_correct_is_multiple_choice() {
        let e = convert("{quiz, id: q}\n? 2+2?\na) 3\nB) 4\nc) 5\n{/quiz}\n");
        let q = &e.questions[0];
        assert_eq!(q.kind, CourseraQuestionType::MultipleChoice);
        let opts = q.options.as_ref().unwrap();
        assert_eq!(opts.len(), 3);
        let marked: Vec<usize> = opts.iter().enumerate().filter(|(_, o)| o.correct).map(|(i, _)| i).collect();
        assert_eq!(marked, [1]);
    }

    #[test]
    fn several_correct_is_checkbox() {
        let e = convert("{quiz, id: q}\n? vowels\nA) a\nb) b\nC) e\nd) d\n{/quiz}\n");
        let q = &e.questions[0];
        assert_eq!(q.kind, CourseraQuestionType::Checkbox);
        assert_eq!(q.options.as_ref().unwrap().iter().filter(|o| o.correct).count(), 2);
    }

    #[test]
    fn fill_in_blank_is_text_exact_match() {
        let e = convert("{quiz, id: q}\n? Capital of France?\n! Paris\n! paris\n{/quiz}\n");
        let q = &e.questions[0];
        assert_eq!(q.kind, CourseraQuestionType::TextExactMatch);
        assert_eq!(q.accepted_answers.as_deref(), Some(&["Paris".to_string(), "paris".to_string()][..]));
        assert!(q.options.is_none());
    }

    #[test]
    fn json_golden() {
        let bank = CourseraQuizBank {
            quizzes: vec![
                convert("{quiz, id: q1, attempts: 2}\n{shuffle: false}\n? 2+2?\na) 3\nB) 4\n\n? Capital?\n! Paris\n{/quiz}\n"),
            ],
        };
        let expected = r#"{
  "quizzes": [
    {
      "id": "q1",
      "attempts": 2,
      "questions": [
        {
          "type": "multipleChoice",
          "prompt": "2+2?",
          "shuffle": false,
          "options": [
            {
              "text": "3",
              "correct": false
            },
            {
              "text": "4",
              "correct": true
            }
          ]
        },
        {
          "type": "textExactMatch",
          "prompt": "Capital?",
          "shuffle": false,
          "acceptedAnswers": [
            "Paris"
          ]
        }
      ]
    }
  ]
}
"#;
        assert_eq!(quiz_bank_json(&bank), expected);
        let back: CourseraQuizBank = serde_json::from_str(expected).unwrap();
        assert_eq!(back, bank);
    }

    #[test]
    fn rejects_invalid_structure() {
        let mut quiz = parse_quiz("{quiz, id: q}\n? x\nA) y\nb) z\n{/quiz}\n", "q.md").quiz.unwrap();
        quiz.questions[0].choices.iter_mut().for_each(|c| c.correct = false);
        assert!(convert_to_coursera(&quiz).is_err());
    }
}
