use std::fmt::Write;

use super::ast::{Block, BlockNode, Inline};
use super::quiz_marker;

/// Per-target adjustments applied while writing a chapter.
pub trait RenderHooks {
    fn link_target(&self, target: &str) -> String {
        target.to_string()
    }

    fn image_target(&self, target: &str) -> String {
        target.to_string()
    }

    /// Replacement for a `<!-- quiz: id -->` marker.
    fn quiz(&self, _id: &str) -> Option<String> {
        None
    }

    /// Whether raw HTML blocks and inline tags survive.
    fn keep_html(&self) -> bool {
        true
    }

    /// Explicit id written before a heading, for formats that do not derive one.
    fn heading_id(&self, _anchor: &str) -> Option<String> {
        None
    }
}

pub struct NoHooks;

impl RenderHooks for NoHooks {}

pub fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

pub fn render_html(blocks: &[BlockNode], hooks: &dyn RenderHooks) -> String {
    let mut out = String::new();
    write_blocks(blocks, hooks, &mut out, false);
    out
}

fn write_blocks(blocks: &[BlockNode], hooks: &dyn RenderHooks, out: &mut String, tight: bool) {
    for node in blocks {
        match &node.block {
            Block::Heading {
                level,
                content,
                anchor,
            } => {
                let _ = writeln!(
                    out,
                    "<h{level} id=\"{}\">{}</h{level}>",
                    escape(anchor),
                    inlines(content, hooks)
                );
            }
            Block::Paragraph(content) => {
                if content.is_empty() {
                    continue;
                }
                if tight {
                    out.push_str(&inlines(content, hooks));
                    out.push('\n');
                } else {
                    let _ = writeln!(out, "<p>{}</p>", inlines(content, hooks));
                }
            }
            Block::Image(content) => {
                let _ = writeln!(out, "<p class=\"figure\">{}</p>", inlines(content, hooks));
            }
            Block::Code { language, text, .. } => {
                match language {
                    Some(lang) => {
                        let _ = write!(out, "<pre><code class=\"language-{}\">", escape(lang));
                    }
                    None => out.push_str("<pre><code>"),
                }
                out.push_str(&escape(text));
                if !text.is_empty() {
                    out.push('\n');
                }
                out.push_str("</code></pre>\n");
            }
            Block::List {
                ordered,
                start,
                items,
            } => {
                let tag = if *ordered { "ol" } else { "ul" };
                if *ordered && *start != 1 {
                    let _ = writeln!(out, "<ol start=\"{start}\">");
                } else {
                    let _ = writeln!(out, "<{tag}>");
                }
                for item in items {
                    let single_para = matches!(item.as_slice(), [BlockNode { block: Block::Paragraph(_), .. }]);
                    out.push_str("<li>");
                    if single_para {
                        let mut inner = String::new();
                        write_blocks(item, hooks, &mut inner, true);
                        out.push_str(inner.trim_end());
                    } else {
                        out.push('\n');
                        write_blocks(item, hooks, out, false);
                    }
                    out.push_str("</li>\n");
                }
                let _ = writeln!(out, "</{tag}>");
            }
            Block::Blockquote(children) => {
                out.push_str("<blockquote>\n");
                write_blocks(children, hooks, out, false);
                out.push_str("</blockquote>\n");
            }
            Block::Html(raw) => {
                if let Some(id) = quiz_marker(raw) {
                    if let Some(rendered) = hooks.quiz(id) {
                        out.push_str(&rendered);
                    }
                } else if hooks.keep_html() {
                    out.push_str(raw);
                    out.push('\n');
                }
            }
            Block::ThematicBreak => out.push_str("<hr />\n"),
        }
    }
}

pub fn inlines(content: &[Inline], hooks: &dyn RenderHooks) -> String {
    let mut out = String::new();
    write_inlines(content, hooks, &mut out);
    out
}

fn write_inlines(content: &[Inline], hooks: &dyn RenderHooks, out: &mut String) {
    for inline in content {
        match inline {
            Inline::Text { text, .. } => out.push_str(&escape(text)),
            Inline::Code { code, .. } => {
                let _ = write!(out, "<code>{}</code>", escape(code));
            }
            Inline::Emphasis(c) => {
                out.push_str("<em>");
                write_inlines(c, hooks, out);
                out.push_str("</em>");
            }
            Inline::Strong(c) => {
                out.push_str("<strong>");
                write_inlines(c, hooks, out);
                out.push_str("</strong>");
            }
            Inline::Link {
                target,
                title,
                children,
                ..
            } => {
                let _ = write!(out, "<a href=\"{}\"", escape(&hooks.link_target(target)));
                if let Some(t) = title {
                    let _ = write!(out, " title=\"{}\"", escape(t));
                }
                out.push('>');
                write_inlines(children, hooks, out);
                out.push_str("</a>");
            }
            Inline::Image {
                target, alt, title, ..
            } => {
                let _ = write!(
                    out,
                    "<img src=\"{}\" alt=\"{}\"",
                    escape(&hooks.image_target(target)),
                    escape(alt)
                );
                if let Some(t) = title {
                    let _ = write!(out, " title=\"{}\"", escape(t));
                }
                out.push_str(" />");
            }
            Inline::Autolink { url, .. } => {
                let shown = url.strip_prefix("mailto:").unwrap_or(url);
                let _ = write!(
                    out,
                    "<a href=\"{}\">{}</a>",
                    escape(&hooks.link_target(url)),
                    escape(shown)
                );
            }
            Inline::Html(raw) => {
                if hooks.keep_html() {
                    out.push_str(raw);
                }
            }
            Inline::SoftBreak => out.push('\n'),
            Inline::HardBreak => out.push_str("<br />\n"),
        }
    }
}
