use std::process::ExitCode;

use ottr_core::course::CourseError;
use ottr_core::lockfile::LockfileError;
use ottr_core::manifest::LoadManifestError;
use ottr_core::publish::{BuildError, RenderError};
use ottr_core::sync::{BorrowError, SyncError};
use ottr_core::ScaffoldError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    CheckFailures = 1,
    Config = 2,
    Io = 3,
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> Self {
        ExitCode::from(s as u8)
    }
}

#[derive(Debug)]
pub struct Failure {
    pub status: Status,
    pub message: String,
}

impl Failure {
    pub fn new(status: Status, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(Status::Config, message)
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::new(Status::Io, message)
    }
}

pub type CmdResult = Result<Status, Failure>;

fn manifest_status(e: &LoadManifestError) -> Status {
    match e {
        LoadManifestError::Io { source, .. } if source.kind() != std::io::ErrorKind::NotFound => Status::Io,
        _ => Status::Config,
    }
}

fn course_status(e: &CourseError) -> Status {
    match e {
        CourseError::Manifest(m) => manifest_status(m),
        CourseError::Read { .. } => Status::Io,
        CourseError::Lockfile(LockfileError::Malformed { .. }) => Status::Config,
        CourseError::Lockfile(LockfileError::Io(_)) => Status::Io,
        CourseError::Borrow(BorrowError::HashMismatch { .. }) => Status::CheckFailures,
        CourseError::Borrow(BorrowError::OriginUnreachable { .. }) => Status::Io,
    }
}

impl From<CourseError> for Failure {
    fn from(e: CourseError) -> Self {
        Failure::new(course_status(&e), e.to_string())
    }
}

impl From<BuildError> for Failure {
    fn from(e: BuildError) -> Self {
        let status = match &e {
            BuildError::Course(c) => course_status(c),
            BuildError::TargetNotEnabled(_) | BuildError::Render(RenderError::MissingBaseUrl) => Status::Config,
            BuildError::ChecksFailed(_) => Status::CheckFailures,
            BuildError::Render(RenderError::Io { .. }) => Status::Io,
        };
        Failure::new(status, e.to_string())
    }
}

impl From<ScaffoldError> for Failure {
    fn from(e: ScaffoldError) -> Self {
        let status = match e {
            ScaffoldError::DestinationNotEmpty(_) => Status::Config,
            ScaffoldError::Io { .. } => Status::Io,
        };
        Failure::new(status, e.to_string())
    }
}

impl From<SyncError> for Failure {
    fn from(e: SyncError) -> Self {
        let status = match &e {
            SyncError::OptInDisabled | SyncError::InvalidPatchset(_) => Status::Config,
            SyncError::Manifest(m) => manifest_status(m),
            SyncError::Lockfile(LockfileError::Malformed { .. }) => Status::Config,
            SyncError::UpstreamUnreachable { .. }
            | SyncError::StaleDownstream { .. }
            | SyncError::BadPatch { .. }
            | SyncError::Lockfile(LockfileError::Io(_))
            | SyncError::Io { .. } => Status::Io,
        };
        Failure::new(status, e.to_string())
    }
}
