//! Template sync and chapter borrowing.

mod borrow;
mod patchset;
mod upstream;

pub use borrow::{fetch_borrowed_chapter, is_url, BorrowError, CACHE_DIR};
pub(crate) use borrow::join_url;
pub use patchset::{
    apply_patchset, compute_patchset, compute_patchset_with, synced_files, ApplyMode, ApplyReport, PatchAction,
    PatchEntry, PatchSet, SyncError, SyncOptions, TEMPLATE_ORIGIN,
};
pub use upstream::{checkout_upstream, UpstreamCheckout};
