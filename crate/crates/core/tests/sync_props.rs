use std::collections::BTreeMap;
use std::path::Path;

use globset::Glob;
use ottr_core::hash::tree_hash;
use ottr_core::sync::{apply_patchset, compute_patchset, ApplyMode, PatchAction, SyncError};
use proptest::prelude::*;

const PATHS: &[&str] = &[
    ".github/workflows/check.yml",
    ".github/workflows/render.yml",
    ".github/labels.md",
    "scripts/build.sh",
    "scripts/bump.sh",
    "scripts/lib/util.R",
    "docs/style.md",
    "docs/img/logo.txt",
];

const GLOBS: &[&str] = &[
    "scripts/*",
    "**/*.sh",
    ".github/workflows/check.yml",
    "docs/**",
    "*.md",
    "scripts/b*",
    "**/render.*",
    ".github/*",
];

fn write(root: &Path, rel: &str, text: &str) {
    let p = root.join(rel);
    std::fs::create_dir_all(p.parent().unwrap()).unwrap();
    std::fs::write(p, text).unwrap();
}

/// Per path: absent, or one of a few contents.
fn tree() -> impl Strategy<Value = BTreeMap<&'static str, u8>> {
    prop::collection::vec(prop::option::of(0u8..3), PATHS.len()).prop_map(|v| {
        PATHS
            .iter()
            .zip(v)
            .filter_map(|(p, c)| c.map(|c| (*p, c)))
            .collect()
    })
}

fn setup(dir: &Path, up: &BTreeMap<&str, u8>, down: &BTreeMap<&str, u8>, exclusions: &[String]) -> (std::path::PathBuf, std::path::PathBuf) {
    let u = dir.join("up");
    let d = dir.join("down");
    write(&u, "_ottr.yml", "title: T\nchapters: [a.md]\nsync:\n  upstream: none\n  owned: ['.github/**', 'scripts/**', 'docs/**']\n");
    let ex: Vec<String> = exclusions.iter().map(|g| format!("'{g}'")).collect();
    write(
        &d,
        "_ottr.yml",
        &format!("title: D\nchapters: [a.md]\nsync:\n  upstream: ../up\n  opt_in: true\n  exclusions: [{}]\n", ex.join(", ")),
    );
    for (root, files) in [(&u, up), (&d, down)] {
        for (p, c) in files {
            write(root, p, &format!("{p} version {c}\nshared line\n"));
        }
    }
    (u, d)
}

fn matches_any(globs: &[String], path: &str) -> bool {
    globs.iter().any(|g| Glob::new(g).unwrap().compile_matcher().is_match(path))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn entries_never_match_exclusions_and_apply_converges(
        up in tree(),
        down in tree(),
        picks in prop::collection::vec(any::<prop::sample::Index>(), 0..4),
    ) {
        let exclusions: Vec<String> = picks.iter().map(|i| GLOBS[i.index(GLOBS.len())].to_string()).collect();
        let dir = tempfile::tempdir().unwrap();
        let (u, d) = setup(dir.path(), &up, &down, &exclusions);
        let p = compute_patchset(&u, &d, &exclusions).unwrap();
        for e in &p.entries {
            prop_assert!(!matches_any(&exclusions, &e.path), "{} matches {:?}", e.path, exclusions);
            prop_assert!(e.action != PatchAction::Delete, "nothing is locked yet, so nothing is deleted");
        }
        let excluded_before: BTreeMap<String, Vec<u8>> = PATHS
            .iter()
            .filter(|p| matches_any(&exclusions, p))
            .filter_map(|p| std::fs::read(d.join(p)).ok().map(|b| (p.to_string(), b)))
            .collect();
        apply_patchset(&p, &d, ApplyMode::Apply).unwrap();
        for path in PATHS.iter().filter(|p| !matches_any(&exclusions, p)) {
            if let Ok(want) = std::fs::read(u.join(path)) {
                prop_assert_eq!(std::fs::read(d.join(path)).ok(), Some(want), "{} not synced", path);
            }
        }
        for (path, bytes) in &excluded_before {
            prop_assert_eq!(&std::fs::read(d.join(path)).unwrap(), bytes);
        }
        prop_assert!(compute_patchset(&u, &d, &exclusions).unwrap().is_empty());
    }

    #[test]
    fn failed_apply_leaves_tree_untouched(up in tree(), down in tree(), victim in any::<prop::sample::Index>()) {
        let dir = tempfile::tempdir().unwrap();
        let (u, d) = setup(dir.path(), &up, &down, &[]);
        let mut p = compute_patchset(&u, &d, &[]).unwrap();
        prop_assume!(!p.entries.is_empty());
        let k = victim.index(p.entries.len());
        p.entries[k].diff = "@@ -1,1 +1,1 @@\n-no such line\n+replacement\n".to_string();
        p.entries[k].binary = None;
        let before = tree_hash(&d).unwrap();
        let dry = apply_patchset(&p, &d, ApplyMode::DryRun);
        let real = apply_patchset(&p, &d, ApplyMode::Apply);
        // the hunk removes a line no file contains, so both modes must refuse
        let err = real.expect_err("corrupted patch applied");
        prop_assert!(matches!(err, SyncError::BadPatch { .. }), "{err}");
        prop_assert!(dry.is_err());
        prop_assert_eq!(tree_hash(&d).unwrap(), before);
    }
}

#[test]
fn dry_run_never_writes() {
    let dir = tempfile::tempdir().unwrap();
    let up: BTreeMap<&str, u8> = PATHS.iter().map(|p| (*p, 1)).collect();
    let down: BTreeMap<&str, u8> = PATHS.iter().take(3).map(|p| (*p, 0)).collect();
    let (u, d) = setup(dir.path(), &up, &down, &[]);
    let p = compute_patchset(&u, &d, &[]).unwrap();
    assert_eq!(p.entries.len(), PATHS.len());
    let before = tree_hash(&d).unwrap();
    let report = apply_patchset(&p, &d, ApplyMode::DryRun).unwrap();
    assert_eq!(report.changes.len(), PATHS.len());
    assert_eq!(tree_hash(&d).unwrap(), before);
}
