//! `![alt](slides://<deck_id>/<slide_id>)` embeds and their resolution to
//! ordinary images.

use std::path::PathBuf;

use super::ast::{ChapterDoc, Inline, ResolverFailure};
use super::{collect_refs, SLIDES_SCHEME};

/// Maps a slide to an image location. Must be callable from several chapter
/// resolutions at once.
pub trait SlideResolver: Sync {
    fn resolve(&self, deck_id: &str, slide_id: &str) -> Result<String, String>;
}

/// Points embeds at the presentation service's PNG export endpoint.
#[derive(Debug, Default, Clone, Copy)]
pub struct GoogleSlidesResolver;

impl SlideResolver for GoogleSlidesResolver {
    fn resolve(&self, deck_id: &str, slide_id: &str) -> Result<String, String> {
        Ok(format!(
            "https://docs.google.com/presentation/d/{deck_id}/export/png?id={deck_id}&pageid={slide_id}"
        ))
    }
}

/// Serves pre-exported slide images from `<prefix>/<deck_id>/<slide_id>.png`.
#[derive(Debug, Clone)]
pub struct OfflineSlideResolver {
    prefix: String,
    dir: PathBuf,
}

impl OfflineSlideResolver {
    pub fn new(prefix: impl Into<String>) -> Self {
        let prefix = prefix.into().trim_end_matches('/').to_string();
        Self {
            dir: PathBuf::from(&prefix),
            prefix,
        }
    }

    /// Checks for image files relative to `base` while still emitting
    /// targets relative to it.
    pub fn rooted_at(mut self, base: impl Into<PathBuf>) -> Self {
        self.dir = base.into().join(&self.prefix);
        self
    }
}

impl SlideResolver for OfflineSlideResolver {
    fn resolve(&self, deck_id: &str, slide_id: &str) -> Result<String, String> {
        let file = self.dir.join(deck_id).join(format!("{slide_id}.png"));
        if file.is_file() {
            Ok(format!("{}/{deck_id}/{slide_id}.png", self.prefix))
        } else {
            Err(format!("no exported image at {}", file.display()))
        }
    }
}

pub(crate) fn parse_slide_uri(target: &str) -> Option<(&str, &str)> {
    let rest = target.strip_prefix(SLIDES_SCHEME)?;
    let (deck, slide) = rest.split_once('/')?;
    let valid = |s: &str| !s.is_empty() && !s.contains(['/', '?', '#']);
    (valid(deck) && valid(slide)).then_some((deck, slide))
}

/// Rewrites every slide embed into an image whose target comes from
/// `resolver`. Embeds the resolver cannot place stay as they are and are
/// listed in `resolve_failures`.
pub fn resolve_slide_embeds(doc: ChapterDoc, resolver: &dyn SlideResolver) -> ChapterDoc {
    if doc.slide_embeds.is_empty() && doc.resolve_failures.is_empty() {
        return doc;
    }
    let mut doc = doc;
    let mut failures = Vec::new();
    super::ast::visit_inlines_mut(&mut doc.blocks, &mut |inlines| {
        rewrite(inlines, resolver, &mut failures);
    });
    doc.resolve_failures = failures;
    let refs = collect_refs(&doc.blocks);
    doc.links = refs.links;
    doc.images = refs.images;
    doc.slide_embeds = refs.slide_embeds;
    doc
}

fn rewrite(inlines: &mut [Inline], resolver: &dyn SlideResolver, failures: &mut Vec<ResolverFailure>) {
    for inline in inlines {
        match inline {
            Inline::Image { target, pos, .. } => {
                let Some((deck, slide)) = parse_slide_uri(target) else {
                    continue;
                };
                match resolver.resolve(deck, slide) {
                    Ok(resolved) => *target = resolved,
                    Err(reason) => failures.push(ResolverFailure {
                        deck_id: deck.to_string(),
                        slide_id: slide.to_string(),
                        line: pos.line,
                        reason,
                    }),
                }
            }
            Inline::Emphasis(c) | Inline::Strong(c) => rewrite(c, resolver, failures),
            Inline::Link { children, .. } => rewrite(children, resolver, failures),
            _ => {}
        }
    }
}
