use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use ottr_core::check::{CheckEnv, FixtureProber};
use ottr_core::course::{load_course, LoadOptions};
use ottr_core::hash::tree_hash;
use ottr_core::publish::{build, render_target, BuildError, RenderPlan};
use ottr_core::quiz::{convert_to_coursera, parse_quiz, quiz_bank_json, CourseraQuizBank};
use ottr_core::sync::BorrowError;
use ottr_core::{CourseError, Target};
use sha2::{Digest, Sha256};

fn write(root: &Path, rel: &str, bytes: impl AsRef<[u8]>) {
    let p = root.join(rel);
    std::fs::create_dir_all(p.parent().unwrap()).unwrap();
    std::fs::write(p, bytes).unwrap();
}

/// Serves `files` by URL path; anything else, or everything once
/// `down` is set, is an error status.
struct FixtureServer {
    base: String,
    files: Arc<Mutex<HashMap<String, Vec<u8>>>>,
    down: Arc<Mutex<bool>>,
}

impl FixtureServer {
    fn start(files: HashMap<String, Vec<u8>>) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let base = format!("http://{}", listener.local_addr().unwrap());
        let files = Arc::new(Mutex::new(files));
        let down = Arc::new(Mutex::new(false));
        let (f, d) = (files.clone(), down.clone());
        std::thread::spawn(move || {
            for stream in listener.incoming() {
                let Ok(mut stream) = stream else { continue };
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut request = String::new();
                if reader.read_line(&mut request).is_err() {
                    continue;
                }
                loop {
                    let mut header = String::new();
                    if reader.read_line(&mut header).map_or(true, |n| n == 0) || header == "\r\n" {
                        break;
                    }
                }
                let path = request.split_whitespace().nth(1).unwrap_or("/").to_string();
                let body = if *d.lock().unwrap() {
                    None
                } else {
                    f.lock().unwrap().get(&path).cloned()
                };
                let (status, body) = match body {
                    Some(b) => ("200 OK", b),
                    None if *d.lock().unwrap() => ("503 Service Unavailable", Vec::new()),
                    None => ("404 Not Found", Vec::new()),
                };
                let head = format!("HTTP/1.1 {status}\r\nContent-Length: {}\r\nConnection: close\r\n\r\n", body.len());
                let _ = stream.write_all(head.as_bytes());
                let _ = stream.write_all(&body);
            }
        });
        Self { base, files, down }
    }
}

const SHARED: &str = "# Shared analysis\n\nThis chapter is borrowed.\n\n![A plot of results](img/plot.png)\n\nSee [the welcome](01-welcome.md) and [details](#details).\n\n## Details\n\nMore *text* here.\n";
const PLOT: &[u8] = b"\x89PNG\r\n\x1a\nplot bytes";

fn remote_course(dir: &Path, origin: &str) -> PathBuf {
    let root = dir.join("course");
    write(
        &root,
        "_ottr.yml",
        format!(
            "title: Remote\nchapters:\n  - source: 01-welcome.md\n  - borrow: {{origin: '{origin}', file: 02-shared.md}}\nbase_url: https://courses.test/remote/\n"
        ),
    );
    write(&root, "01-welcome.md", "# Welcome\n\nGo to the [shared analysis](02-shared.md#details).\n");
    write(&root, "dictionary.txt", "");
    root
}

fn plan() -> RenderPlan {
    let mut plan = RenderPlan::new(Target::ALL);
    plan.fixed_timestamp = Some(0);
    plan
}

fn sha(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[test]
fn remote_borrowed_chapter_matches_expected_bundle() {
    let server = FixtureServer::start(HashMap::from([
        ("/lib/02-shared.md".to_string(), SHARED.as_bytes().to_vec()),
        ("/lib/img/plot.png".to_string(), PLOT.to_vec()),
    ]));
    let origin = format!("{}/lib", server.base);
    let dir = tempfile::tempdir().unwrap();
    let root = remote_course(dir.path(), &origin);
    let prober = FixtureProber::default();
    let out = build(&root, &plan(), &LoadOptions::default(), &CheckEnv::new(&prober)).unwrap();
    assert!(out.report.passed(), "{:#?}", out.report.findings);

    let manuscript = root.join("_output/leanpub/manuscript");
    let expected_chapter = "{#02-shared-shared-analysis}\n# Shared analysis\n\nThis chapter is borrowed.\n\n![A plot of results](resources/02-shared/img/plot.png)\n\nSee [the welcome](#01-welcome-welcome) and [details](#02-shared-details).\n\n{#02-shared-details}\n## Details\n\nMore *text* here.\n";
    assert_eq!(std::fs::read_to_string(manuscript.join("02-shared.md")).unwrap(), expected_chapter);
    assert_eq!(
        std::fs::read_to_string(manuscript.join("01-welcome.md")).unwrap(),
        "{#01-welcome-welcome}\n# Welcome\n\nGo to the [shared analysis](#02-shared-details).\n"
    );
    assert_eq!(std::fs::read_to_string(manuscript.join("Book.txt")).unwrap(), "01-welcome.md\n02-shared.md\n");
    assert_eq!(std::fs::read(manuscript.join("resources/02-shared/img/plot.png")).unwrap(), PLOT);

    let site = root.join("_output/site");
    assert_eq!(std::fs::read(site.join("resources/02-shared/img/plot.png")).unwrap(), PLOT);
    let page = std::fs::read_to_string(site.join("02-shared.html")).unwrap();
    assert!(page.contains("<img src=\"resources/02-shared/img/plot.png\" alt=\"A plot of results\" />"));
    assert!(page.contains("<a href=\"01-welcome.html\">the welcome</a>"));
    let welcome = std::fs::read_to_string(site.join("01-welcome.html")).unwrap();
    assert!(welcome.contains("<a href=\"02-shared.html#details\">shared analysis</a>"));

    let embed = std::fs::read_to_string(root.join("_output/coursera/02-shared.html")).unwrap();
    assert!(embed.contains("<iframe src=\"https://courses.test/remote/02-shared.html\""));

    let lock = std::fs::read_to_string(root.join("_ottr.lock")).unwrap();
    assert!(lock.contains(&format!("sha256 {} {origin} 02-shared.md", sha(SHARED.as_bytes()))), "{lock}");
    assert!(lock.contains(&format!("sha256 {} {origin} img/plot.png", sha(PLOT))), "{lock}");
}

#[test]
fn unreachable_origin_uses_pinned_copy_and_changed_origin_is_refused() {
    let server = FixtureServer::start(HashMap::from([
        ("/lib/02-shared.md".to_string(), SHARED.as_bytes().to_vec()),
        ("/lib/img/plot.png".to_string(), PLOT.to_vec()),
    ]));
    let origin = format!("{}/lib", server.base);
    let dir = tempfile::tempdir().unwrap();
    let root = remote_course(dir.path(), &origin);
    let prober = FixtureProber::default();
    build(&root, &plan(), &LoadOptions::default(), &CheckEnv::new(&prober)).unwrap();
    let first = tree_hash(&root.join("_output")).unwrap();

    *server.down.lock().unwrap() = true;
    build(&root, &plan(), &LoadOptions::default(), &CheckEnv::new(&prober)).unwrap();
    assert_eq!(tree_hash(&root.join("_output")).unwrap(), first);

    *server.down.lock().unwrap() = false;
    server
        .files
        .lock()
        .unwrap()
        .insert("/lib/02-shared.md".to_string(), b"# Rewritten upstream\n".to_vec());
    match build(&root, &plan(), &LoadOptions::default(), &CheckEnv::new(&prober)) {
        Err(BuildError::Course(CourseError::Borrow(BorrowError::HashMismatch { file, .. }))) => {
            assert_eq!(file, "02-shared.md")
        }
        Err(e) => panic!("unexpected error {e}"),
        Ok(_) => panic!("changed origin accepted"),
    }
    assert_eq!(tree_hash(&root.join("_output")).unwrap(), first);
}

fn local_course(dir: &Path) -> PathBuf {
    let root = dir.join("course");
    write(
        &root,
        "_ottr.yml",
        "title: Ordered\nchapters: [c-last.md, a-first.md, b-middle.md]\nbase_url: https://courses.test/ordered\ncredits:\n  - {name: Grace Hopper, roles: [Course lead, Content author]}\n  - {name: Alan Turing, roles: [Reviewer]}\n",
    );
    write(&root, "c-last.md", "# Opening\n\nFirst in the manifest.\n\n<!-- quiz: opening -->\n");
    write(&root, "a-first.md", "# Middle\n\nSecond in the manifest.\n\n<!-- quiz: middle -->\n");
    write(&root, "b-middle.md", "# Closing\n\nThird in the manifest.\n");
    write(&root, "quizzes/opening.md", "{quiz, id: opening, attempts: 2}\n? Which chapter opens?\nA) Opening\nb) Closing\n{/quiz}\n");
    write(
        &root,
        "quizzes/middle.md",
        "{quiz, id: middle}\n? Pick both\nA) one\nB) two\nc) three\n\n? Name it\n! Middle\n! middle\n{/quiz}\n",
    );
    write(&root, "dictionary.txt", "");
    root
}

#[test]
fn credits_table_closes_the_final_page_in_manifest_order() {
    let dir = tempfile::tempdir().unwrap();
    let root = local_course(dir.path());
    let course = load_course(&root, &LoadOptions::default()).unwrap();
    let site = render_target(&course, &plan(), Target::Site).unwrap();
    let last = String::from_utf8(site.files["b-middle.html"].clone()).unwrap();
    let rows: Vec<&str> = last.match_indices("<tr><td>").map(|(i, _)| &last[i..]).collect();
    assert_eq!(rows.len(), 2, "{last}");
    for other in ["c-last.html", "a-first.html"] {
        assert!(!String::from_utf8_lossy(&site.files[other]).contains("class=\"credits\""));
    }
    assert!(rows[0].starts_with("<tr><td>Grace Hopper</td><td>Course lead, Content author</td></tr>"));
    assert!(rows[1].starts_with("<tr><td>Alan Turing</td><td>Reviewer</td></tr>"));
}

#[test]
fn quiz_bank_is_exactly_the_unit_conversions() {
    let dir = tempfile::tempdir().unwrap();
    let root = local_course(dir.path());
    let course = load_course(&root, &LoadOptions::default()).unwrap();
    let bundle = render_target(&course, &plan(), Target::Coursera).unwrap();
    let mut entries = Vec::new();
    for f in ["middle.md", "opening.md"] {
        let raw = std::fs::read_to_string(root.join("quizzes").join(f)).unwrap();
        entries.push(convert_to_coursera(&parse_quiz(&raw, f).quiz.unwrap()).unwrap());
    }
    let expected = quiz_bank_json(&CourseraQuizBank { quizzes: entries });
    assert_eq!(String::from_utf8(bundle.files["quiz_bank.json"].clone()).unwrap(), expected);
    let v: serde_json::Value = serde_json::from_str(&expected).unwrap();
    assert_eq!(v["quizzes"].as_array().unwrap().len(), 2);
    assert_eq!(v["quizzes"][0]["questions"][0]["type"], "checkbox");
}

#[test]
fn chapter_order_is_manifest_order_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    let root = local_course(dir.path());
    let course = load_course(&root, &LoadOptions::default()).unwrap();
    let order = ["c-last", "a-first", "b-middle"];
    let positions = |text: &str, needle: &dyn Fn(&str) -> String| -> Vec<usize> {
        order.iter().map(|s| text.find(&needle(s)).unwrap_or_else(|| panic!("{s} missing"))).collect()
    };
    let increasing = |v: Vec<usize>| v.windows(2).all(|w| w[0] < w[1]);

    let site = render_target(&course, &plan(), Target::Site).unwrap();
    for page in ["index.html", "a-first.html"] {
        let text = String::from_utf8(site.files[page].clone()).unwrap();
        let nav = &text[text.find("<ol").unwrap()..];
        assert!(increasing(positions(nav, &|s| format!("href=\"{s}.html\""))), "{page}");
    }
    let middle = String::from_utf8(site.files["a-first.html"].clone()).unwrap();
    assert!(middle.contains("class=\"prev\" href=\"c-last.html\""));
    assert!(middle.contains("class=\"next\" href=\"b-middle.html\""));

    let leanpub = render_target(&course, &plan(), Target::Leanpub).unwrap();
    assert_eq!(leanpub.files["manuscript/Book.txt"], b"c-last.md\na-first.md\nb-middle.md\n");

    let coursera = render_target(&course, &plan(), Target::Coursera).unwrap();
    let index = String::from_utf8(coursera.files["index.html"].clone()).unwrap();
    assert!(increasing(positions(&index, &|s| format!("href=\"{s}.html\""))));
}

#[test]
fn disabling_a_target_leaves_the_others_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let root = local_course(dir.path());
    let prober = FixtureProber::default();
    let env = CheckEnv::new(&prober);
    let all = build(&root, &plan(), &LoadOptions::default(), &env).unwrap();
    let by_target = |bundles: &[ottr_core::TargetBundle], t: Target| bundles.iter().find(|b| b.target == t).cloned();
    for skip in Target::ALL {
        let mut p = plan();
        p.targets.remove(&skip);
        p.output_root = Some(dir.path().join(format!("without-{}", skip.as_str())));
        let some = build(&root, &p, &LoadOptions::default(), &env).unwrap();
        assert_eq!(some.bundles.len(), 2);
        assert!(!p.output_root.as_ref().unwrap().join(skip.as_str()).exists());
        for t in Target::ALL.into_iter().filter(|t| *t != skip) {
            assert_eq!(by_target(&some.bundles, t), by_target(&all.bundles, t), "{t} changed without {skip}");
            assert_eq!(
                tree_hash(&p.output_root.as_ref().unwrap().join(t.as_str())).unwrap(),
                tree_hash(&root.join("_output").join(t.as_str())).unwrap()
            );
        }
    }
}
