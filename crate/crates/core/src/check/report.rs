use std::fmt::Write;
use std::io;
use std::path::Path;

use super::{CheckReport, CheckSummary, ReportStatus};
use crate::fsutil::write_atomic;

pub const REPORT_DIR: &str = "reports";

fn stamp(epoch: i64) -> String {
    chrono::DateTime::from_timestamp(epoch, 0)
        .map(|t| t.format("%Y-%m-%dT%H:%M:%SZ").to_string())
        .unwrap_or_else(|| epoch.to_string())
}

fn row_status(s: &CheckSummary) -> &'static str {
    if !s.enabled {
        "SKIPPED"
    } else if s.errors > 0 {
        "FAIL"
    } else {
        "PASS"
    }
}

fn overall(r: &CheckReport) -> &'static str {
    match r.status {
        ReportStatus::Pass => "PASS",
        ReportStatus::Fail => "FAIL",
    }
}

/// Summary table only, as printed by the CLI.
pub fn summary_table(r: &CheckReport) -> String {
    let mut out = String::from("| Check | Errors | Warnings | Status |\n|---|---:|---:|---|\n");
    for s in &r.summary {
        let _ = writeln!(out, "| {} | {} | {} | {} |", s.check, s.errors, s.warnings, row_status(s));
    }
    let _ = writeln!(out, "\nOverall: {}", overall(r));
    out
}

pub fn render_report(r: &CheckReport) -> String {
    let mut out = String::from("# Check report\n\n");
    let _ = writeln!(out, "Started: {}  ", stamp(r.started));
    let _ = writeln!(out, "Finished: {}\n", stamp(r.finished));
    out.push_str(&summary_table(r));
    for s in r.summary.iter().filter(|s| s.errors + s.warnings > 0) {
        let _ = writeln!(out, "\n## {}\n", s.check);
        for f in r.findings.iter().filter(|f| f.check == s.check) {
            let _ = write!(out, "- `{}:{}` {}: {}", f.path, f.line, f.severity, f.detail);
            match &f.subject {
                Some(subject) if !f.detail.contains(subject.as_str()) => {
                    let _ = writeln!(out, " ({subject})");
                }
                _ => out.push('\n'),
            }
        }
    }
    out
}

pub fn report_json(r: &CheckReport) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("report serializes");
    s.push('\n');
    s
}

/// Writes `reports/check_report.md` and `reports/check_report.json`.
pub fn write_report(course_root: &Path, r: &CheckReport) -> io::Result<()> {
    let dir = course_root.join(REPORT_DIR);
    write_atomic(&dir.join("check_report.md"), render_report(r).as_bytes())?;
    write_atomic(&dir.join("check_report.json"), report_json(r).as_bytes())
}
