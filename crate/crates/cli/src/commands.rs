use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use ottr_core::check::{
    run_checks, summary_table, write_report, CheckEnv, CheckReport, FixtureProber, HttpProber, UrlPolicy, UrlProber,
};
use ottr_core::course::{load_course_with, LoadOptions};
use ottr_core::manifest::{load_manifest, CheckKind, CourseManifest, MANIFEST_FILE};
use ottr_core::markdown::{GoogleSlidesResolver, OfflineSlideResolver, SlideResolver};
use ottr_core::publish::{build as build_course, BuildError, RenderPlan};
use ottr_core::quiz::{convert_to_coursera, parse_quiz, validate_quiz, QuizContext, Severity};
use ottr_core::sync::{apply_patchset, checkout_upstream, compute_patchset_with, ApplyMode, PatchSet, SyncOptions};
use ottr_core::{scaffold_course, Target};

use crate::exit::{CmdResult, Failure, Status};
use crate::{BuildArgs, CheckArgs, ProbeArgs, SyncArgs, TargetArg};

fn course_root(config: &Path) -> Result<PathBuf, Failure> {
    if config.is_dir() {
        return Ok(config.to_path_buf());
    }
    match config.file_name().and_then(|n| n.to_str()) {
        Some(MANIFEST_FILE) => Ok(config
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .unwrap_or(Path::new("."))
            .to_path_buf()),
        _ if !config.exists() => Err(Failure::config(format!("{} does not exist", config.display()))),
        _ => Err(Failure::config(format!(
            "--config must be a course directory or its {MANIFEST_FILE}"
        ))),
    }
}

fn manifest(root: &Path) -> Result<CourseManifest, Failure> {
    let parsed = load_manifest(root).map_err(|e| Failure::from(ottr_core::CourseError::from(e)))?;
    for w in &parsed.warnings {
        log::warn!("{w}");
    }
    Ok(parsed.manifest)
}

fn prober(args: &ProbeArgs) -> Result<Box<dyn UrlProber>, Failure> {
    match &args.url_fixture {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::io(format!("cannot read {}: {e}", path.display())))?;
            let fixture = FixtureProber::parse(&text).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
            Ok(Box::new(fixture))
        }
        None => Ok(Box::new(HttpProber::new(Duration::from_secs(args.url_timeout)))),
    }
}

fn policy(args: &ProbeArgs) -> UrlPolicy {
    UrlPolicy {
        parallelism: args.url_parallelism.max(1),
        retries: args.url_retries,
        timeout: Duration::from_secs(args.url_timeout),
    }
}

fn slide_resolver(root: &Path, slides_dir: &Option<String>) -> Box<dyn SlideResolver> {
    match slides_dir {
        Some(dir) => Box::new(OfflineSlideResolver::new(dir.clone()).rooted_at(root)),
        None => Box::new(GoogleSlidesResolver),
    }
}

fn print_findings(report: &CheckReport) {
    for f in &report.findings {
        match &f.subject {
            Some(s) if !f.detail.contains(s.as_str()) => {
                eprintln!("{}:{}: {}[{}]: {} ({s})", f.path, f.line, f.severity, f.check, f.detail)
            }
            _ => eprintln!("{}:{}: {}[{}]: {}", f.path, f.line, f.severity, f.check, f.detail),
        }
    }
}

pub fn new(dest: &Path, title: &str) -> CmdResult {
    if title.trim().is_empty() {
        return Err(Failure::config("--title must not be empty"));
    }
    let created = scaffold_course(dest, title)?;
    for p in &created {
        println!("created {}", p.display());
    }
    Ok(Status::Success)
}

pub fn build(args: BuildArgs) -> CmdResult {
    let root = course_root(&args.course.config)?;
    let targets: BTreeSet<Target> = if args.target.contains(&TargetArg::All) {
        manifest(&root)?.targets
    } else {
        args.target
            .iter()
            .map(|t| match t {
                TargetArg::Site => Target::Site,
                TargetArg::Leanpub => Target::Leanpub,
                TargetArg::Coursera => Target::Coursera,
                TargetArg::All => unreachable!("handled above"),
            })
            .collect()
    };
    let mut plan = RenderPlan::new(targets);
    plan.output_root = args.out.clone();
    plan.fixed_timestamp = args.timestamp;
    plan.base_url = args.base_url.clone();
    plan.force = args.force;

    let prober = prober(&args.probe)?;
    let mut env = CheckEnv::new(prober.as_ref());
    env.policy = policy(&args.probe);
    let resolver = slide_resolver(&root, &args.slides_dir);
    let load = LoadOptions {
        slide_resolver: resolver.as_ref(),
        save_lockfile: true,
    };
    match build_course(&root, &plan, &load, &env) {
        Ok(outcome) => {
            for (bundle, (target, dir)) in outcome.bundles.iter().zip(&outcome.written) {
                println!("{:<9} {}", target.as_str(), dir.join(&bundle.entrypoint).display());
            }
            println!();
            print!("{}", summary_table(&outcome.report));
            print_findings(&outcome.report);
            Ok(Status::Success)
        }
        Err(BuildError::ChecksFailed(report)) => {
            print!("{}", summary_table(&report));
            print_findings(&report);
            Err(BuildError::ChecksFailed(report).into())
        }
        Err(e) => Err(e.into()),
    }
}

pub fn check(args: CheckArgs) -> CmdResult {
    let root = course_root(&args.course.config)?;
    let mut manifest = manifest(&root)?;
    if !args.only.is_empty() {
        let mut only = BTreeSet::new();
        for name in &args.only {
            only.insert(CheckKind::from_str(name.trim()).map_err(Failure::config)?);
        }
        for c in CheckKind::ALL {
            if !only.contains(&c) {
                manifest.checks.set(c, false);
            }
        }
    }
    let resolver = slide_resolver(&root, &args.slides_dir);
    let load = LoadOptions {
        slide_resolver: resolver.as_ref(),
        save_lockfile: true,
    };
    let course = load_course_with(&root, manifest.clone(), &load)?;
    let prober = prober(&args.probe)?;
    let mut env = CheckEnv::new(prober.as_ref());
    env.policy = policy(&args.probe);
    env.clock = args.timestamp;
    let report = run_checks(&course, &manifest, &env);
    write_report(&root, &report).map_err(|e| Failure::io(format!("cannot write reports: {e}")))?;
    print!("{}", summary_table(&report));
    print_findings(&report);
    Ok(if report.passed() {
        Status::Success
    } else {
        Status::CheckFailures
    })
}

fn read_quiz(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::io(format!("cannot read {}: {e}", path.display())))
}

pub fn quiz_convert(input: &Path) -> CmdResult {
    let raw = read_quiz(input)?;
    let parsed = parse_quiz(&raw, input);
    for d in &parsed.diagnostics {
        eprintln!("{d}");
    }
    let Some(quiz) = parsed.quiz.filter(|_| !parsed.diagnostics.iter().any(|d| d.severity == Severity::Error)) else {
        return Err(Failure::new(Status::CheckFailures, format!("{} is not a valid quiz", input.display())));
    };
    let entry = convert_to_coursera(&quiz)
        .map_err(|e| Failure::new(Status::CheckFailures, format!("quiz `{}`: {}", e.quiz_id, e.reason)))?;
    println!("{}", serde_json::to_string_pretty(&entry).expect("quiz entry serializes"));
    Ok(Status::Success)
}

pub fn quiz_lint(inputs: &[PathBuf]) -> CmdResult {
    let mut parsed = Vec::new();
    for input in inputs {
        let raw = read_quiz(input)?;
        parsed.push((input.clone(), parse_quiz(&raw, input)));
    }
    let ids = parsed.iter().filter_map(|(_, p)| p.id.clone()).collect();
    let ctx = QuizContext::new(parsed.iter().map(|(path, p)| (path, p)), ids);
    let mut errors = 0;
    for (_, p) in &parsed {
        let cross = p.quiz.as_ref().map(|q| validate_quiz(q, &ctx)).unwrap_or_default();
        for d in p.diagnostics.iter().chain(&cross) {
            if d.severity == Severity::Error {
                errors += 1;
            }
            eprintln!("{d}");
        }
    }
    Ok(if errors > 0 {
        Status::CheckFailures
    } else {
        Status::Success
    })
}

fn print_entries(p: &PatchSet) {
    if !p.entries.is_empty() {
        println!("{:<7} PATH", "ACTION");
        for e in &p.entries {
            println!("{:<7} {}", e.action.as_str(), e.path);
        }
    }
    let n = p.entries.len();
    println!("{n} change{}", if n == 1 { "" } else { "s" });
}

pub fn sync(args: SyncArgs) -> CmdResult {
    let root = course_root(&args.course.config)?;
    let manifest = manifest(&root)?;
    let sync_cfg = manifest.sync.clone();
    let mode = if args.apply { ApplyMode::Apply } else { ApplyMode::DryRun };

    let patchset = match &args.patchset {
        Some(path) => {
            if !sync_cfg.as_ref().is_some_and(|s| s.opt_in) {
                return Err(ottr_core::SyncError::OptInDisabled.into());
            }
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::io(format!("cannot read {}: {e}", path.display())))?;
            PatchSet::from_json(&text)?
        }
        None => {
            let upstream = args
                .upstream
                .clone()
                .or_else(|| sync_cfg.as_ref().map(|s| s.upstream.clone()))
                .filter(|u| !u.is_empty())
                .ok_or_else(|| {
                    Failure::config(format!("no upstream template: set `sync.upstream` in {MANIFEST_FILE} or pass --upstream"))
                })?;
            if !sync_cfg.as_ref().is_some_and(|s| s.opt_in) {
                return Err(ottr_core::SyncError::OptInDisabled.into());
            }
            let checkout = checkout_upstream(&upstream, &root)?;
            let exclusions = sync_cfg.map(|s| s.exclusions).unwrap_or_default();
            let opts = SyncOptions {
                label: Some(checkout.label.clone()),
                created_at: None,
            };
            compute_patchset_with(&checkout.path, &root, &exclusions, &opts)?
        }
    };
    if let Some(out) = &args.patchset_out {
        ottr_core::fsutil::write_atomic(out, patchset.to_json().as_bytes())
            .and_then(|_| ottr_core::fsutil::write_atomic(&out.with_extension("diff"), patchset.to_diff().as_bytes()))
            .map_err(|e| Failure::io(format!("cannot write {}: {e}", out.display())))?;
    }
    print_entries(&patchset);
    let report = apply_patchset(&patchset, &root, mode)?;
    if mode == ApplyMode::Apply {
        println!("wrote {} file(s); upstream {}", report.changes.len(), report.upstream_ref);
    }
    Ok(Status::Success)
}
