use std::path::PathBuf;

use ottr_core::manifest::{
    parse_manifest, render_manifest, ChapterEntry, ChapterSource, CheckToggles, Contributor, CourseManifest, SyncConfig,
};
use ottr_core::{scaffold_course, Target};
use proptest::prelude::*;

/// Free text that YAML must quote correctly: colons, hashes, quotes, leading
/// symbols, numbers and booleans all appear.
fn text() -> impl Strategy<Value = String> {
    prop_oneof![
        "[A-Za-z][A-Za-z0-9 ]{0,20}".prop_map(|s| s.trim_end().to_string()),
        Just("Intro: part 1".to_string()),
        Just("# not a comment".to_string()),
        Just("yes".to_string()),
        Just("123".to_string()),
        Just("it's \"quoted\"".to_string()),
        Just("- dash".to_string()),
        Just("Ünïcode title".to_string()),
    ]
    .prop_filter("non-empty", |s| !s.trim().is_empty())
}

fn chapter_files() -> impl Strategy<Value = Vec<(String, Option<String>, Option<String>)>> {
    prop::collection::btree_set("[a-z0-9][a-z0-9_-]{0,12}", 1..6).prop_flat_map(|stems| {
        let n = stems.len();
        (
            Just(stems.into_iter().collect::<Vec<_>>()),
            prop::collection::vec(prop::option::of(prop_oneof![Just("../other".to_string()), Just("https://courses.test/lib".to_string())]), n),
            prop::collection::vec(prop::option::of(text()), n),
        )
            .prop_map(|(stems, origins, titles)| {
                stems
                    .into_iter()
                    .zip(origins)
                    .zip(titles)
                    .map(|((s, o), t)| (format!("chapters/{s}.md"), o, t))
                    .collect()
            })
    })
}

fn manifest() -> impl Strategy<Value = CourseManifest> {
    (
        text(),
        chapter_files(),
        prop::collection::btree_set(prop_oneof![Just(Target::Site), Just(Target::Leanpub), Just(Target::Coursera)], 1..4),
        any::<[bool; 4]>(),
        prop::option::of("[a-z]{1,8}"),
        prop::collection::vec(prop_oneof![Just("*example.org*"), Just("https://*.test/**"), Just("*.pdf")], 0..3),
        prop::option::of(Just("https://example.org/feedback")),
        prop::option::of(Just("https://example.org/course")),
        prop::collection::vec((text(), prop::collection::vec(text(), 1..3)), 0..4),
        prop::option::of((any::<bool>(), prop::collection::vec(prop_oneof![Just("scripts/*"), Just(".github/**")], 0..3))),
    )
        .prop_map(|(title, chapters, targets, toggles, dir, url_ex, feedback, base, credits, sync)| {
            let chapters = chapters
                .into_iter()
                .map(|(file, origin, title_override)| ChapterEntry {
                    source: match origin {
                        Some(origin) => ChapterSource::Borrowed {
                            origin,
                            file: PathBuf::from(file),
                        },
                        None => ChapterSource::Local(PathBuf::from(file)),
                    },
                    title_override,
                })
                .collect();
            let mut m = CourseManifest::new(title, chapters);
            m.targets = targets;
            m.checks = CheckToggles {
                spelling: toggles[0],
                urls: toggles[1],
                quizzes: toggles[2],
                alt_text: toggles[3],
            };
            if let Some(d) = dir {
                m.quiz_dir = PathBuf::from(d);
            }
            m.url_exclusions = url_ex.into_iter().map(String::from).collect();
            m.feedback_url = feedback.map(String::from);
            m.base_url = base.map(String::from);
            m.credits = credits.into_iter().map(|(name, roles)| Contributor { name, roles }).collect();
            m.sync = sync.map(|(opt_in, exclusions)| SyncConfig {
                upstream: "../template".to_string(),
                exclusions: exclusions.into_iter().map(String::from).collect(),
                opt_in,
                owned: vec![".github/**".to_string(), "scripts/**".to_string()],
            });
            m
        })
}

proptest! {
    #[test]
    fn render_then_parse_is_identity(m in manifest()) {
        let text = render_manifest(&m);
        let parsed = parse_manifest(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert!(parsed.warnings.is_empty(), "{:?}", parsed.warnings);
        prop_assert_eq!(&parsed.manifest, &m);
        prop_assert_eq!(render_manifest(&parsed.manifest), text);
    }

    #[test]
    fn scaffold_always_parses(title in text()) {
        let dir = tempfile::tempdir().unwrap();
        scaffold_course(&dir.path().join("c"), &title).unwrap();
        let raw = std::fs::read_to_string(dir.path().join("c/_ottr.yml")).unwrap();
        let parsed = parse_manifest(&raw).unwrap();
        prop_assert_eq!(parsed.manifest.title, title);
    }
}

#[test]
fn minimal_manifest_defaults_to_every_platform() {
    let m = parse_manifest("title: T\nchapters: [a.md]\n").unwrap().manifest;
    assert_eq!(m.targets.into_iter().collect::<Vec<_>>(), [Target::Site, Target::Leanpub, Target::Coursera]);
    assert_eq!(m.checks, CheckToggles::all(true));
}
