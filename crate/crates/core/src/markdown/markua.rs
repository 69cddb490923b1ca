//! Writes a parsed chapter back out as Markua (Leanpub's markdown dialect).

use super::ast::{Block, BlockNode, Inline};
use super::html::RenderHooks;
use super::quiz_marker;

pub fn render_markua(blocks: &[BlockNode], hooks: &dyn RenderHooks) -> String {
    let mut parts = Vec::new();
    for node in blocks {
        if let Some(text) = block_text(node, hooks) {
            parts.push(text);
        }
    }
    let mut out = parts.join("\n\n");
    if !out.is_empty() {
        out.push('\n');
    }
    out
}

fn block_text(node: &BlockNode, hooks: &dyn RenderHooks) -> Option<String> {
    Some(match &node.block {
        Block::Heading { level, content, anchor } => {
            let heading = format!("{} {}", "#".repeat(*level as usize), inlines(content, hooks));
            match hooks.heading_id(anchor) {
                Some(id) => format!("{{#{id}}}\n{heading}"),
                None => heading,
            }
        }
        Block::Paragraph(content) => {
            if content.is_empty() {
                return None;
            }
            inlines(content, hooks)
        }
        Block::Image(content) => inlines(content, hooks),
        Block::Code { language, text, .. } => {
            let longest = longest_run(text, '`');
            let fence = "`".repeat(longest.max(2) + 1);
            let lang = language.as_deref().unwrap_or("");
            if text.is_empty() {
                format!("{fence}{lang}\n{fence}")
            } else {
                format!("{fence}{lang}\n{text}\n{fence}")
            }
        }
        Block::List {
            ordered,
            start,
            items,
        } => {
            let tight = items.iter().all(|i| i.len() <= 1);
            let rendered: Vec<String> = items
                .iter()
                .enumerate()
                .map(|(n, item)| {
                    let marker = if *ordered {
                        format!("{}. ", start + n as u64)
                    } else {
                        "- ".to_string()
                    };
                    let body = render_markua(item, hooks);
                    indent_item(&marker, body.trim_end())
                })
                .collect();
            rendered.join(if tight { "\n" } else { "\n\n" })
        }
        Block::Blockquote(children) => {
            let body = render_markua(children, hooks);
            body.trim_end()
                .lines()
                .map(|l| if l.is_empty() { ">".to_string() } else { format!("> {l}") })
                .collect::<Vec<_>>()
                .join("\n")
        }
        Block::Html(raw) => {
            if let Some(id) = quiz_marker(raw) {
                return hooks.quiz(id).map(|q| q.trim_end().to_string());
            }
            if !hooks.keep_html() {
                return None;
            }
            raw.clone()
        }
        Block::ThematicBreak => "* * *".to_string(),
    })
}

fn indent_item(marker: &str, body: &str) -> String {
    let pad = " ".repeat(marker.len());
    let mut out = String::new();
    for (i, line) in body.lines().enumerate() {
        if i == 0 {
            out.push_str(marker);
            out.push_str(line);
        } else {
            out.push('\n');
            if !line.is_empty() {
                out.push_str(&pad);
                out.push_str(line);
            }
        }
    }
    if body.is_empty() {
        out.push_str(marker.trim_end());
    }
    out
}

fn longest_run(text: &str, c: char) -> usize {
    let mut best = 0;
    let mut cur = 0;
    for x in text.chars() {
        if x == c {
            cur += 1;
            best = best.max(cur);
        } else {
            cur = 0;
        }
    }
    best
}

fn escape_text(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        if matches!(c, '\\' | '*' | '_' | '`' | '[' | ']' | '<') {
            out.push('\\');
        }
        out.push(c);
    }
    out
}

fn destination(target: &str) -> String {
    if target.contains([' ', '(', ')', '<', '>']) {
        format!("<{target}>")
    } else {
        target.to_string()
    }
}

fn title_part(title: &Option<String>) -> String {
    match title {
        Some(t) => format!(" \"{}\"", t.replace('"', "\\\"")),
        None => String::new(),
    }
}

pub fn inlines(content: &[Inline], hooks: &dyn RenderHooks) -> String {
    let mut out = String::new();
    for inline in content {
        match inline {
            Inline::Text { text, .. } => out.push_str(&escape_text(text)),
            Inline::Code { code, .. } => {
                let ticks = "`".repeat(longest_run(code, '`') + 1);
                let pad = if code.starts_with('`') || code.ends_with('`') {
                    " "
                } else {
                    ""
                };
                out.push_str(&format!("{ticks}{pad}{code}{pad}{ticks}"));
            }
            Inline::Emphasis(c) => out.push_str(&format!("*{}*", inlines(c, hooks))),
            Inline::Strong(c) => out.push_str(&format!("**{}**", inlines(c, hooks))),
            Inline::Link {
                target,
                title,
                children,
                ..
            } => out.push_str(&format!(
                "[{}]({}{})",
                inlines(children, hooks),
                destination(&hooks.link_target(target)),
                title_part(title)
            )),
            Inline::Image {
                target, alt, title, ..
            } => out.push_str(&format!(
                "![{}]({}{})",
                escape_text(alt),
                destination(&hooks.image_target(target)),
                title_part(title)
            )),
            Inline::Autolink { url, .. } => {
                let shown = url.strip_prefix("mailto:").unwrap_or(url);
                out.push_str(&format!("<{shown}>"));
            }
            Inline::Html(raw) => {
                if hooks.keep_html() {
                    out.push_str(raw);
                }
            }
            Inline::SoftBreak => out.push('\n'),
            Inline::HardBreak => out.push_str("\\\n"),
        }
    }
    out
}
