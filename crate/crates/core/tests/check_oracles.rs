use std::collections::{BTreeSet, HashSet};
use std::path::Path;
use std::sync::OnceLock;

use ottr_core::check::{
    exclusion_set, spell_check, url_check, CheckFinding, CheckReport, Dictionary, FixtureProber, UrlPolicy,
};
use ottr_core::manifest::{CheckKind, CheckToggles};
use ottr_core::markdown::parse_chapter;
use ottr_core::{ChapterDoc, Severity};
use proptest::prelude::*;
use regex::Regex;

/// Lowercase word set read straight from the bundled list, and the purely
/// alphabetic entries used to build prose.
fn word_list() -> &'static (HashSet<String>, Vec<String>) {
    static WORDS: OnceLock<(HashSet<String>, Vec<String>)> = OnceLock::new();
    WORDS.get_or_init(|| {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/en_words.txt");
        let text = std::fs::read_to_string(path).unwrap();
        let set: HashSet<String> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        let mut alpha: Vec<String> = set
            .iter()
            .filter(|w| w.len() > 2 && w.chars().all(|c| c.is_ascii_lowercase()))
            .cloned()
            .collect();
        alpha.sort();
        (set, alpha)
    })
}

/// Brute force: split every non-fenced line on non-letters, look each token up.
fn oracle_misspellings(source: &str, project: &HashSet<String>) -> BTreeSet<String> {
    let word = Regex::new(r"[A-Za-z]+").unwrap();
    let (dict, _) = word_list();
    let mut in_fence = false;
    let mut out = BTreeSet::new();
    for line in source.lines() {
        if line.trim_start().starts_with("```") {
            in_fence = !in_fence;
            continue;
        }
        if in_fence {
            continue;
        }
        for m in word.find_iter(line) {
            let w = m.as_str().to_lowercase();
            if !dict.contains(&w) && !project.contains(&w) {
                out.insert(w);
            }
        }
    }
    out
}

fn flagged(doc: &ChapterDoc, project: &Dictionary) -> BTreeSet<String> {
    spell_check(&[doc], Dictionary::bundled(), project)
        .into_iter()
        .map(|f| f.subject.expect("spelling findings name the word"))
        .collect()
}

fn known_word() -> impl Strategy<Value = String> {
    let n = word_list().1.len();
    (0..n, any::<bool>()).prop_map(|(i, cap)| {
        let w = word_list().1[i].clone();
        if cap {
            let mut c = w.chars();
            let first = c.next().unwrap().to_ascii_uppercase();
            format!("{first}{}", c.as_str())
        } else {
            w
        }
    })
}

fn unknown_word() -> impl Strategy<Value = String> {
    "[bcdfghjklmnpqrstvwxz]{2}[a-z]{3,7}".prop_filter("must be out of dictionary", |w| !word_list().0.contains(w))
}

#[derive(Debug, Clone)]
enum Chunk {
    Prose(Vec<String>),
    Seeded(String),
    Fenced(Vec<String>),
}

fn chunk() -> impl Strategy<Value = Chunk> {
    prop_oneof![
        4 => prop::collection::vec(known_word(), 1..12).prop_map(Chunk::Prose),
        1 => unknown_word().prop_map(Chunk::Seeded),
        1 => prop::collection::vec(prop_oneof![known_word(), unknown_word()], 1..6).prop_map(Chunk::Fenced),
    ]
}

fn render(chunks: &[Chunk]) -> (String, BTreeSet<String>) {
    let mut src = String::new();
    let mut seeded = BTreeSet::new();
    for c in chunks {
        match c {
            Chunk::Prose(words) => src.push_str(&format!("{}.\n\n", words.join(" "))),
            Chunk::Seeded(w) => {
                seeded.insert(w.clone());
                src.push_str(&format!("The word {w} is seeded.\n\n"));
            }
            Chunk::Fenced(words) => src.push_str(&format!("```\n{}\n```\n\n", words.join(" "))),
        }
    }
    (src, seeded)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spelling_matches_brute_force_oracle(chunks in prop::collection::vec(chunk(), 1..14)) {
        let (src, seeded) = render(&chunks);
        let doc = parse_chapter(&src, "c.md");
        let found = flagged(&doc, &Dictionary::default());
        prop_assert_eq!(&found, &oracle_misspellings(&src, &HashSet::new()));
        prop_assert_eq!(found, seeded);
    }

    #[test]
    fn project_wordlist_silences_its_words(chunks in prop::collection::vec(chunk(), 1..10)) {
        let (src, seeded) = render(&chunks);
        let doc = parse_chapter(&src, "c.md");
        let project = Dictionary::from_wordlist(&seeded.iter().cloned().collect::<Vec<_>>().join("\n"));
        prop_assert!(flagged(&doc, &project).is_empty());
    }

    #[test]
    fn status_is_fail_exactly_when_an_enabled_check_has_an_error(
        raw in prop::collection::vec((0usize..4, any::<bool>(), 1usize..50), 0..20),
        mask in 0u8..16,
    ) {
        let mut toggles = CheckToggles::all(false);
        for (k, c) in CheckKind::ALL.iter().enumerate() {
            toggles.set(*c, mask & (1 << k) != 0);
        }
        let findings: Vec<CheckFinding> = raw
            .iter()
            .map(|(k, error, line)| CheckFinding {
                check: CheckKind::ALL[*k],
                severity: if *error { Severity::Error } else { Severity::Warning },
                path: "c.md".to_string(),
                line: *line,
                detail: format!("finding {line}"),
                subject: None,
            })
            .collect();
        let report = CheckReport::new(&toggles, findings.clone(), 0, 0);
        let expect_fail = findings
            .iter()
            .any(|f| f.severity == Severity::Error && toggles.is_enabled(f.check));
        prop_assert_eq!(!report.passed(), expect_fail);
        prop_assert!(report.findings.iter().all(|f| toggles.is_enabled(f.check)));
        prop_assert_eq!(report.errors(), report.findings.iter().filter(|f| f.severity == Severity::Error).count());
    }
}

#[test]
fn quick_brown_fox() {
    let doc = parse_chapter("The quick brwn fox\n", "c.md");
    let findings = spell_check(&[&doc], Dictionary::bundled(), &Dictionary::default());
    assert_eq!(findings.len(), 1);
    assert_eq!(findings[0].subject.as_deref(), Some("brwn"));
    assert_eq!(oracle_misspellings("The quick brwn fox\n", &HashSet::new()), BTreeSet::from(["brwn".to_string()]));
}

#[test]
fn url_findings_do_not_depend_on_scheduling() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("present.png"), "x").unwrap();
    let mut docs = Vec::new();
    let mut fixture = String::new();
    for i in 0..12 {
        let mut src = format!("# Chapter {i}\n\n");
        for j in 0..6 {
            let status = [200, 404, 500, 301][(i + j) % 4];
            fixture.push_str(&format!("https://site{i}.test/{j} {status}\n"));
            src.push_str(&format!("- [ext](https://site{i}.test/{j}) and [int](c{}.md#chapter-{})\n", (i + j) % 14, j));
        }
        src.push_str("- [file](present.png) [gone](absent.png) [shared](https://shared.test/x)\n");
        docs.push(parse_chapter(&src, format!("c{i}.md")));
    }
    fixture.push_str("https://shared.test/x 404\n");
    let prober = FixtureProber::parse(&fixture).unwrap();
    let none = exclusion_set(&[]);
    let run = |order: &[&ChapterDoc], parallelism: usize| {
        let policy = UrlPolicy {
            parallelism,
            ..UrlPolicy::default()
        };
        let mut f = url_check(order, dir.path(), &none, &prober, &policy);
        f.sort();
        f
    };
    let forward: Vec<&ChapterDoc> = docs.iter().collect();
    let backward: Vec<&ChapterDoc> = docs.iter().rev().collect();
    let baseline = run(&forward, 1);
    assert!(!baseline.is_empty());
    for p in [2, 8, 32] {
        assert_eq!(run(&forward, p), baseline);
        assert_eq!(run(&backward, p), baseline);
    }
    // shared URL is probed once but reported at every use
    let shared = baseline.iter().filter(|f| f.subject.as_deref() == Some("https://shared.test/x")).count();
    assert_eq!(shared, 12);
}
