//! Chapter markdown: a CommonMark-core block/inline parser that keeps source
//! positions, plus slide-embed resolution and the HTML and Markua writers.

pub mod ast;
mod block;
pub mod html;
mod inline;
pub mod markua;
mod slides;
mod slug;

use std::path::Path;

pub use ast::{
    plain_text, Block, BlockNode, ChapterDoc, DocWarning, HeadingRef, ImageRef, Inline, LinkRef,
    Pos, QuizRef, ResolverFailure, SlideEmbed, Span,
};
pub use slides::{resolve_slide_embeds, GoogleSlidesResolver, OfflineSlideResolver, SlideResolver};
pub use slug::{slugify, AnchorSet};

use block::{BlockParser, Line};

pub const SLIDES_SCHEME: &str = "slides://";

/// Parses one chapter. Never fails: malformed constructs degrade to
/// paragraphs and unterminated fences close at end of input with a warning.
pub fn parse_chapter(raw: &str, source_path: impl AsRef<Path>) -> ChapterDoc {
    let source_path = source_path.as_ref();
    let text = normalize_newlines(raw);
    let mut physical: Vec<&str> = text.split('\n').collect();
    if text.ends_with('\n') || text.is_empty() {
        physical.pop();
    }
    let lines: Vec<Line<'_>> = physical
        .iter()
        .enumerate()
        .map(|(i, t)| Line {
            text: t,
            no: i + 1,
            col0: 0,
        })
        .collect();

    let mut parser = BlockParser {
        warnings: Vec::new(),
    };
    let mut blocks = parser.parse(&lines);

    let mut anchors = AnchorSet::default();
    let mut headings = Vec::new();
    assign_anchors(&mut blocks, &mut anchors, &mut headings);

    let title = headings
        .iter()
        .find(|h| h.level == 1)
        .map(|h| h.text.clone())
        .unwrap_or_else(|| {
            source_path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default()
        });

    let refs = collect_refs(&blocks);
    let mut quiz_refs = Vec::new();
    collect_quiz_refs(&blocks, &mut quiz_refs);

    let mut warnings = parser.warnings;
    warnings.extend(refs.warnings);

    ChapterDoc {
        source_path: source_path.to_path_buf(),
        title,
        line_count: lines.len(),
        blocks,
        headings,
        links: refs.links,
        images: refs.images,
        slide_embeds: refs.slide_embeds,
        quiz_refs,
        warnings,
        resolve_failures: Vec::new(),
    }
}

/// CRLF and lone CR become LF.
pub fn normalize_newlines(raw: &str) -> String {
    if !raw.contains('\r') {
        return raw.to_string();
    }
    raw.replace("\r\n", "\n").replace('\r', "\n")
}

fn assign_anchors(blocks: &mut [BlockNode], anchors: &mut AnchorSet, out: &mut Vec<HeadingRef>) {
    for node in blocks {
        let line = node.span.start_line;
        match &mut node.block {
            Block::Heading {
                level,
                content,
                anchor,
            } => {
                let text = plain_text(content);
                *anchor = anchors.unique(&text);
                out.push(HeadingRef {
                    level: *level,
                    text,
                    anchor_id: anchor.clone(),
                    line: first_pos(content).map_or(line, |p| p.line),
                });
            }
            Block::List { items, .. } => {
                for item in items {
                    assign_anchors(item, anchors, out);
                }
            }
            Block::Blockquote(children) => assign_anchors(children, anchors, out),
            _ => {}
        }
    }
}

fn first_pos(inlines: &[Inline]) -> Option<Pos> {
    inlines.iter().find_map(|i| match i {
        Inline::Text { pos, .. }
        | Inline::Code { pos, .. }
        | Inline::Link { pos, .. }
        | Inline::Image { pos, .. }
        | Inline::Autolink { pos, .. } => Some(*pos),
        Inline::Emphasis(c) | Inline::Strong(c) => first_pos(c),
        _ => None,
    })
}

pub(crate) struct Refs {
    pub links: Vec<LinkRef>,
    pub images: Vec<ImageRef>,
    pub slide_embeds: Vec<SlideEmbed>,
    pub warnings: Vec<DocWarning>,
}

pub(crate) fn collect_refs(blocks: &[BlockNode]) -> Refs {
    let mut refs = Refs {
        links: Vec::new(),
        images: Vec::new(),
        slide_embeds: Vec::new(),
        warnings: Vec::new(),
    };
    ast::visit_inlines(blocks, &mut |inlines| collect_inline_refs(inlines, &mut refs));
    refs
}

fn collect_inline_refs(inlines: &[Inline], refs: &mut Refs) {
    for inline in inlines {
        match inline {
            Inline::Link {
                target,
                children,
                pos,
                ..
            } => {
                refs.links.push(LinkRef {
                    target: target.clone(),
                    line: pos.line,
                    column: pos.column,
                });
                collect_inline_refs(children, refs);
            }
            Inline::Autolink { url, pos } => refs.links.push(LinkRef {
                target: url.clone(),
                line: pos.line,
                column: pos.column,
            }),
            Inline::Image { target, alt, pos, .. } => {
                if target.starts_with(SLIDES_SCHEME) {
                    if let Some((deck, slide)) = slides::parse_slide_uri(target) {
                        refs.slide_embeds.push(SlideEmbed {
                            deck_id: deck.to_string(),
                            slide_id: slide.to_string(),
                            alt_text: alt.clone(),
                            line: pos.line,
                            column: pos.column,
                        });
                        continue;
                    }
                    refs.warnings.push(DocWarning {
                        line: pos.line,
                        message: format!("malformed slide embed `{target}`; expected slides://<deck>/<slide>"),
                    });
                }
                refs.images.push(ImageRef {
                    target: target.clone(),
                    alt_text: alt.clone(),
                    line: pos.line,
                    column: pos.column,
                });
            }
            Inline::Emphasis(c) | Inline::Strong(c) => collect_inline_refs(c, refs),
            _ => {}
        }
    }
}

/// Recognizes `<!-- quiz: <id> -->`.
pub fn quiz_marker(html: &str) -> Option<&str> {
    let inner = html.trim().strip_prefix("<!--")?.strip_suffix("-->")?.trim();
    let id = inner.strip_prefix("quiz:")?.trim();
    let valid = !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'));
    valid.then_some(id)
}

fn collect_quiz_refs(blocks: &[BlockNode], out: &mut Vec<QuizRef>) {
    for node in blocks {
        match &node.block {
            Block::Html(raw) => {
                if let Some(id) = quiz_marker(raw) {
                    out.push(QuizRef {
                        quiz_id: id.to_string(),
                        line: node.span.start_line,
                    });
                }
            }
            Block::List { items, .. } => items.iter().for_each(|i| collect_quiz_refs(i, out)),
            Block::Blockquote(c) => collect_quiz_refs(c, out),
            _ => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document() {
        let doc = parse_chapter("# Intro\n\nHello [x](https://a.b).", "01-intro.md");
        assert_eq!(doc.title, "Intro");
        assert_eq!(doc.links.len(), 1);
        assert_eq!(doc.links[0].line, 3);
        assert_eq!(doc.links[0].target, "https://a.b");
    }

    #[test]
    fn heading_prose_image_in_order() {
        let raw = "# Why documentation matters\n\nDocumentation helps users apply tools.\n\n![Figure showing a user reading docs](images/docs.png)\n";
        let doc = parse_chapter(raw, "02.md");
        let kinds: Vec<_> = doc.blocks.iter().map(|b| b.block.kind_name()).collect();
        assert_eq!(kinds, ["heading", "paragraph", "image"]);
        assert_eq!(doc.images[0].alt_text, "Figure showing a user reading docs");
    }

    #[test]
    fn fenced_links_are_not_extracted() {
        let doc = parse_chapter("```\n[x](http://dead.link)\n```\n", "c.md");
        assert!(doc.links.is_empty());
    }

    #[test]
    fn duplicate_headings_dedupe() {
        let doc = parse_chapter("# Setup\n\n## Setup\n", "c.md");
        let ids: Vec<_> = doc.headings.iter().map(|h| h.anchor_id.as_str()).collect();
        assert_eq!(ids, ["setup", "setup-1"]);
    }

    #[test]
    fn crlf_is_normalized_and_title_falls_back_to_stem() {
        let doc = parse_chapter("Some text\r\nmore\r\n", "dir/03-notes.md");
        assert_eq!(doc.title, "03-notes");
        assert_eq!(doc.line_count, 2);
    }

    #[test]
    fn slide_embeds_and_quiz_refs() {
        let raw = "![Pipeline overview](slides://d1/s7)\n\n<!-- quiz: quiz_01 -->\n";
        let doc = parse_chapter(raw, "c.md");
        assert_eq!(doc.slide_embeds.len(), 1);
        assert!(doc.images.is_empty());
        assert_eq!(doc.quiz_refs[0].quiz_id, "quiz_01");
        assert_eq!(doc.quiz_refs[0].line, 3);
    }

    #[test]
    fn resolver_examples() {
        let doc = parse_chapter("![s](slides://d1/s7)\n", "c.md");
        let online = resolve_slide_embeds(doc.clone(), &GoogleSlidesResolver);
        assert_eq!(
            online.images[0].target,
            "https://docs.google.com/presentation/d/d1/export/png?id=d1&pageid=s7"
        );
        assert_eq!(online.images[0].alt_text, "s");
        assert!(online.slide_embeds.is_empty());

        let dir = tempfile::tempdir().unwrap();
        std::fs::create_dir_all(dir.path().join("fixtures/d1")).unwrap();
        std::fs::write(dir.path().join("fixtures/d1/s7.png"), b"png").unwrap();
        let offline = OfflineSlideResolver::new("fixtures").rooted_at(dir.path());
        let resolved = resolve_slide_embeds(doc.clone(), &offline);
        assert_eq!(resolved.images[0].target, "fixtures/d1/s7.png");

        let missing = OfflineSlideResolver::new("nowhere").rooted_at(dir.path());
        let failed = resolve_slide_embeds(doc, &missing);
        assert_eq!(failed.resolve_failures.len(), 1);
        assert_eq!(failed.slide_embeds.len(), 1);
        let again = resolve_slide_embeds(failed.clone(), &missing);
        assert_eq!(again, failed);
    }

    #[test]
    fn zero_embeds_unchanged() {
        let doc = parse_chapter("# A\n\n![x](a.png)\n", "c.md");
        assert_eq!(resolve_slide_embeds(doc.clone(), &GoogleSlidesResolver), doc);
    }

    #[test]
    fn quiz_marker_shapes() {
        assert_eq!(quiz_marker("<!-- quiz: q-1 -->"), Some("q-1"));
        assert_eq!(quiz_marker("<!--quiz:q1-->"), Some("q1"));
        assert_eq!(quiz_marker("<!-- note -->"), None);
    }
}
