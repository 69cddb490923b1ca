use std::path::PathBuf;

use serde::Serialize;

/// A 1-based source position. `column` counts characters, not bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

/// Inclusive range of source lines covered by a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Span {
    pub start_line: usize,
    pub end_line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockNode {
    pub span: Span,
    pub block: Block,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Block {
    Heading {
        level: u8,
        content: Vec<Inline>,
        anchor: String,
    },
    Paragraph(Vec<Inline>),
    /// Fenced or indented code. `text` holds the body byte-exactly (LF separated, no trailing newline).
    Code {
        language: Option<String>,
        fenced: bool,
        text: String,
    },
    List {
        ordered: bool,
        start: u64,
        items: Vec<Vec<BlockNode>>,
    },
    Blockquote(Vec<BlockNode>),
    /// A paragraph whose only content is one image.
    Image(Vec<Inline>),
    Html(String),
    ThematicBreak,
}

impl Block {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Block::Heading { .. } => "heading",
            Block::Paragraph(_) => "paragraph",
            Block::Code { .. } => "fenced_code",
            Block::List { .. } => "list",
            Block::Blockquote(_) => "blockquote",
            Block::Image(_) => "image",
            Block::Html(_) => "html_passthrough",
            Block::ThematicBreak => "thematic_break",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Inline {
    Text { text: String, pos: Pos },
    Code { code: String, pos: Pos },
    Emphasis(Vec<Inline>),
    Strong(Vec<Inline>),
    Link {
        target: String,
        title: Option<String>,
        children: Vec<Inline>,
        pos: Pos,
    },
    Image {
        target: String,
        alt: String,
        title: Option<String>,
        pos: Pos,
    },
    /// `<https://…>` or a bare `https://…` URL in prose.
    Autolink { url: String, pos: Pos },
    Html(String),
    SoftBreak,
    HardBreak,
}

/// Flattens inline content to its visible plain text.
pub fn plain_text(inlines: &[Inline]) -> String {
    let mut out = String::new();
    push_plain(inlines, &mut out);
    out
}

fn push_plain(inlines: &[Inline], out: &mut String) {
    for inline in inlines {
        match inline {
            Inline::Text { text, .. } => out.push_str(text),
            Inline::Code { code, .. } => out.push_str(code),
            Inline::Emphasis(c) | Inline::Strong(c) => push_plain(c, out),
            Inline::Link { children, .. } => push_plain(children, out),
            Inline::Image { alt, .. } => out.push_str(alt),
            Inline::Autolink { url, .. } => out.push_str(url),
            Inline::Html(_) => {}
            Inline::SoftBreak | Inline::HardBreak => out.push(' '),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HeadingRef {
    pub level: u8,
    pub text: String,
    pub anchor_id: String,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkRef {
    pub target: String,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImageRef {
    pub target: String,
    pub alt_text: String,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SlideEmbed {
    pub deck_id: String,
    pub slide_id: String,
    pub alt_text: String,
    pub line: usize,
    pub column: usize,
}

/// `<!-- quiz: <id> -->` marker placing a quiz in a chapter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuizRef {
    pub quiz_id: String,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DocWarning {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResolverFailure {
    pub deck_id: String,
    pub slide_id: String,
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChapterDoc {
    pub source_path: PathBuf,
    pub title: String,
    pub line_count: usize,
    pub blocks: Vec<BlockNode>,
    pub headings: Vec<HeadingRef>,
    pub links: Vec<LinkRef>,
    pub images: Vec<ImageRef>,
    pub slide_embeds: Vec<SlideEmbed>,
    pub quiz_refs: Vec<QuizRef>,
    pub warnings: Vec<DocWarning>,
    pub resolve_failures: Vec<ResolverFailure>,
}

impl ChapterDoc {
    pub fn has_anchor(&self, anchor: &str) -> bool {
        self.headings.iter().any(|h| h.anchor_id == anchor)
    }
}

/// Depth-first visit of every inline sequence outside code blocks.
pub fn visit_inlines<'a>(blocks: &'a [BlockNode], f: &mut dyn FnMut(&'a [Inline])) {
    for node in blocks {
        match &node.block {
            Block::Heading { content, .. } => f(content),
            Block::Paragraph(c) | Block::Image(c) => f(c),
            Block::List { items, .. } => {
                for item in items {
                    visit_inlines(item, f);
                }
            }
            Block::Blockquote(children) => visit_inlines(children, f),
            Block::Code { .. } | Block::Html(_) | Block::ThematicBreak => {}
        }
    }
}

/// Mutable counterpart of [`visit_inlines`].
pub fn visit_inlines_mut(blocks: &mut [BlockNode], f: &mut dyn FnMut(&mut Vec<Inline>)) {
    for node in blocks {
        match &mut node.block {
            Block::Heading { content, .. } => f(content),
            Block::Paragraph(c) | Block::Image(c) => f(c),
            Block::List { items, .. } => {
                for item in items {
                    visit_inlines_mut(item, f);
                }
            }
            Block::Blockquote(children) => visit_inlines_mut(children, f),
            Block::Code { .. } | Block::Html(_) | Block::ThematicBreak => {}
        }
    }
}
