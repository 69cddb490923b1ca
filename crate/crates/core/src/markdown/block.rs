//! Line-oriented block parser. Every input line ends up inside exactly one
//! top-level block span; blank lines attach to the block before them.

use super::ast::{Block, BlockNode, DocWarning, Inline, Span};
use super::inline::{parse_inlines, Segment};

#[derive(Debug, Clone, Copy)]
pub(crate) struct Line<'a> {
    pub text: &'a str,
    pub no: usize,
    pub col0: usize,
}

impl<'a> Line<'a> {
    fn is_blank(&self) -> bool {
        self.text.trim().is_empty()
    }

    fn indent(&self) -> usize {
        indent_width(self.text)
    }

    /// Drops the first `n` characters.
    fn skip_chars(&self, n: usize) -> Line<'a> {
        let byte = self
            .text
            .char_indices()
            .nth(n)
            .map_or(self.text.len(), |(b, _)| b);
        Line {
            text: &self.text[byte..],
            no: self.no,
            col0: self.col0 + n,
        }
    }

    /// Removes up to `width` columns of leading whitespace.
    fn strip_indent(&self, width: usize) -> Line<'a> {
        let mut col = 0;
        let mut n = 0;
        for c in self.text.chars() {
            if col >= width {
                break;
            }
            match c {
                ' ' => col += 1,
                '\t' => col += 4 - col % 4,
                _ => break,
            }
            n += 1;
        }
        self.skip_chars(n)
    }

    fn trim_start(&self) -> Line<'a> {
        let n = self.text.chars().take_while(|c| c.is_whitespace()).count();
        self.skip_chars(n)
    }

    fn segment(&self) -> Segment<'a> {
        Segment {
            text: self.text,
            line: self.no,
            col0: self.col0,
        }
    }
}

fn indent_width(s: &str) -> usize {
    let mut col = 0;
    for c in s.chars() {
        match c {
            ' ' => col += 1,
            '\t' => col += 4 - col % 4,
            _ => break,
        }
    }
    col
}

struct Fence {
    ch: char,
    len: usize,
    indent: usize,
    info: Option<String>,
}

fn fence_open(l: &Line<'_>) -> Option<Fence> {
    let indent = l.indent();
    if indent > 3 {
        return None;
    }
    let t = l.text.trim_start();
    let ch = t.chars().next().filter(|c| matches!(c, '`' | '~'))?;
    let len = t.chars().take_while(|&c| c == ch).count();
    if len < 3 {
        return None;
    }
    let info = t[len..].trim();
    if ch == '`' && info.contains('`') {
        return None;
    }
    let lang = info.split_whitespace().next().map(|s| {
        s.trim_start_matches('{')
            .trim_end_matches('}')
            .trim_end_matches(',')
            .to_string()
    });
    Some(Fence {
        ch,
        len,
        indent,
        info: lang.filter(|s| !s.is_empty()),
    })
}

fn fence_close(l: &Line<'_>, fence: &Fence) -> bool {
    if l.indent() > 3 {
        return false;
    }
    let t = l.text.trim();
    let n = t.chars().take_while(|&c| c == fence.ch).count();
    n >= fence.len && t.chars().count() == n
}

fn atx_heading<'a>(l: &Line<'a>) -> Option<(u8, Line<'a>)> {
    if l.indent() > 3 {
        return None;
    }
    let lead = l.trim_start();
    let hashes = lead.text.chars().take_while(|&c| c == '#').count();
    if !(1..=6).contains(&hashes) {
        return None;
    }
    let rest = &lead.text[hashes..];
    if !rest.is_empty() && !rest.starts_with([' ', '\t']) {
        return None;
    }
    let mut content = lead.skip_chars(hashes).trim_start();
    let mut body = content.text.trim_end();
    let stripped = body.trim_end_matches('#');
    if stripped.is_empty() || stripped.ends_with([' ', '\t']) {
        body = stripped.trim_end();
    }
    content.text = &content.text[..body.len()];
    Some((hashes as u8, content))
}

fn thematic_break(l: &Line<'_>) -> bool {
    if l.indent() > 3 {
        return false;
    }
    let t: String = l.text.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(first) = t.chars().next() else {
        return false;
    };
    matches!(first, '-' | '*' | '_') && t.len() >= 3 && t.chars().all(|c| c == first)
}

fn setext_level(l: &Line<'_>) -> Option<u8> {
    if l.indent() > 3 {
        return None;
    }
    let t = l.text.trim();
    if !t.is_empty() && t.chars().all(|c| c == '=') {
        Some(1)
    } else if !t.is_empty() && t.chars().all(|c| c == '-') {
        Some(2)
    } else {
        None
    }
}

fn blockquote_start(l: &Line<'_>) -> bool {
    l.indent() <= 3 && l.text.trim_start().starts_with('>')
}

fn strip_quote_marker<'a>(l: &Line<'a>) -> Line<'a> {
    let lead = l.trim_start();
    let after = lead.skip_chars(1);
    if after.text.starts_with(' ') {
        after.skip_chars(1)
    } else {
        after
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct ListMarker {
    ordered: bool,
    /// Bullet character, or the delimiter (`.`/`)`) for ordered lists.
    delim: char,
    start: u64,
    /// Column where item content begins.
    content_indent: usize,
    /// Character count of marker plus following spaces (relative to line start).
    content_chars: usize,
    empty: bool,
}

impl ListMarker {
    fn same_list(&self, other: &ListMarker) -> bool {
        self.ordered == other.ordered && self.delim == other.delim
    }
}

fn list_marker(l: &Line<'_>) -> Option<ListMarker> {
    let indent = l.indent();
    if indent > 3 {
        return None;
    }
    let lead_chars = l.text.chars().take_while(|c| c.is_whitespace()).count();
    let t = l.text.trim_start();
    let (ordered, delim, start, marker_len) = match t.chars().next()? {
        c @ ('-' | '+' | '*') => (false, c, 0, 1),
        c if c.is_ascii_digit() => {
            let digits = t.chars().take_while(char::is_ascii_digit).count();
            if digits > 9 {
                return None;
            }
            let d = t[digits..].chars().next()?;
            if !matches!(d, '.' | ')') {
                return None;
            }
            (true, d, t[..digits].parse().ok()?, digits + 1)
        }
        _ => return None,
    };
    let after = &t[marker_len..];
    if !after.is_empty() && !after.starts_with([' ', '\t']) {
        return None;
    }
    let empty = after.trim().is_empty();
    let spaces = after.chars().take_while(|&c| c == ' ').count();
    let spaces = if empty || spaces > 4 || spaces == 0 {
        1.min(after.len())
    } else {
        spaces
    };
    Some(ListMarker {
        ordered,
        delim,
        start,
        content_indent: indent + marker_len + spaces.max(1),
        content_chars: lead_chars + marker_len + spaces,
        empty,
    })
}

fn html_block_start(l: &Line<'_>) -> Option<bool> {
    if l.indent() > 3 {
        return None;
    }
    let t = l.text.trim_start();
    if t.starts_with("<!--") {
        return Some(true);
    }
    let rest = t.strip_prefix('<')?;
    let rest = rest.strip_prefix('/').unwrap_or(rest);
    let name_len = rest
        .chars()
        .take_while(|c| c.is_ascii_alphanumeric() || *c == '-')
        .count();
    if name_len == 0 || !rest.starts_with(|c: char| c.is_ascii_alphabetic()) {
        return None;
    }
    match rest[name_len..].chars().next() {
        None | Some(' ' | '\t' | '>' | '/') => Some(false),
        _ => None,
    }
}

fn interrupts_paragraph(l: &Line<'_>) -> bool {
    fence_open(l).is_some()
        || atx_heading(l).is_some()
        || thematic_break(l)
        || blockquote_start(l)
        || html_block_start(l).is_some()
        || list_marker(l).is_some_and(|m| !m.empty && (!m.ordered || m.start == 1))
}

pub(crate) struct BlockParser {
    pub warnings: Vec<DocWarning>,
}

impl BlockParser {
    pub fn parse(&mut self, lines: &[Line<'_>]) -> Vec<BlockNode> {
        let mut blocks: Vec<BlockNode> = Vec::new();
        let mut i = 0;
        let first_line = lines.first().map(|l| l.no);
        while i < lines.len() {
            if lines[i].is_blank() {
                i += 1;
                continue;
            }
            let (block, mut next) = self.block_at(lines, i);
            let start = if blocks.is_empty() {
                first_line.unwrap_or(lines[i].no)
            } else {
                lines[i].no
            };
            while next < lines.len() && lines[next].is_blank() {
                next += 1;
            }
            blocks.push(BlockNode {
                span: Span {
                    start_line: start,
                    end_line: lines[next - 1].no,
                },
                block,
            });
            i = next;
        }
        if blocks.is_empty() && !lines.is_empty() {
            blocks.push(BlockNode {
                span: Span {
                    start_line: lines[0].no,
                    end_line: lines[lines.len() - 1].no,
                },
                block: Block::Paragraph(Vec::new()),
            });
        }
        blocks
    }

    /// Parses the block starting at the non-blank line `i`; returns it and the
    /// index just past its last line.
    fn block_at(&mut self, lines: &[Line<'_>], i: usize) -> (Block, usize) {
        let l = &lines[i];
        if let Some(fence) = fence_open(l) {
            return self.fenced_code(lines, i, fence);
        }
        if let Some((level, content)) = atx_heading(l) {
            let content = parse_inlines(&[content.segment()]);
            return (
                Block::Heading {
                    level,
                    content,
                    anchor: String::new(),
                },
                i + 1,
            );
        }
        if thematic_break(l) {
            return (Block::ThematicBreak, i + 1);
        }
        if blockquote_start(l) {
            return self.blockquote(lines, i);
        }
        if let Some(marker) = list_marker(l) {
            return self.list(lines, i, marker);
        }
        if l.indent() >= 4 {
            return indented_code(lines, i);
        }
        if let Some(comment) = html_block_start(l) {
            return html_block(lines, i, comment);
        }
        self.paragraph(lines, i)
    }

    fn fenced_code(&mut self, lines: &[Line<'_>], i: usize, fence: Fence) -> (Block, usize) {
        let mut body = Vec::new();
        let mut j = i + 1;
        let mut closed = false;
        while j < lines.len() {
            if fence_close(&lines[j], &fence) {
                closed = true;
                j += 1;
                break;
            }
            body.push(lines[j].strip_indent(fence.indent).text);
            j += 1;
        }
        if !closed {
            self.warnings.push(DocWarning {
                line: lines[i].no,
                message: "unterminated code fence closed at end of file".into(),
            });
        }
        (
            Block::Code {
                language: fence.info,
                fenced: true,
                text: body.join("\n"),
            },
            j,
        )
    }

    fn blockquote(&mut self, lines: &[Line<'_>], i: usize) -> (Block, usize) {
        let mut inner = Vec::new();
        let mut j = i;
        while j < lines.len() {
            let l = &lines[j];
            if blockquote_start(l) {
                inner.push(strip_quote_marker(l));
            } else if !l.is_blank()
                && inner.last().is_some_and(|p: &Line<'_>| !p.is_blank())
                && !interrupts_paragraph(l)
            {
                inner.push(l.trim_start());
            } else {
                break;
            }
            j += 1;
        }
        let children = self.parse(&inner);
        (Block::Blockquote(children), j)
    }

    fn list(&mut self, lines: &[Line<'_>], i: usize, first: ListMarker) -> (Block, usize) {
        let mut items = Vec::new();
        let mut j = i;
        let mut marker = first;
        loop {
            let mut item = vec![lines[j].skip_chars(marker.content_chars)];
            j += 1;
            while j < lines.len() {
                let l = &lines[j];
                if l.is_blank() {
                    let next = (j..lines.len()).find(|&k| !lines[k].is_blank());
                    match next {
                        Some(k) if lines[k].indent() >= marker.content_indent => {
                            item.extend(lines[j..k].iter().map(|b| b.strip_indent(marker.content_indent)));
                            j = k;
                        }
                        _ => break,
                    }
                } else if l.indent() >= marker.content_indent {
                    item.push(l.strip_indent(marker.content_indent));
                    j += 1;
                } else if list_marker(l).is_some() {
                    break;
                } else if item.last().is_some_and(|p| !p.is_blank()) && !interrupts_paragraph(l) {
                    item.push(l.trim_start());
                    j += 1;
                } else {
                    break;
                }
            }
            items.push(self.parse(&item));
            // continue with the next sibling item, possibly after blank lines
            let next = (j..lines.len()).find(|&k| !lines[k].is_blank());
            match next.and_then(|k| list_marker(&lines[k]).map(|m| (k, m))) {
                Some((k, m)) if m.same_list(&first) && !thematic_break(&lines[k]) => {
                    j = k;
                    marker = m;
                }
                _ => break,
            }
        }
        (
            Block::List {
                ordered: first.ordered,
                start: first.start,
                items,
            },
            j,
        )
    }

    fn paragraph(&mut self, lines: &[Line<'_>], i: usize) -> (Block, usize) {
        let mut segs = vec![lines[i].trim_start().segment()];
        let mut j = i + 1;
        while j < lines.len() {
            let l = &lines[j];
            if l.is_blank() {
                break;
            }
            if let Some(level) = setext_level(l) {
                let content = parse_inlines(&segs);
                return (
                    Block::Heading {
                        level,
                        content,
                        anchor: String::new(),
                    },
                    j + 1,
                );
            }
            if interrupts_paragraph(l) {
                break;
            }
            segs.push(l.trim_start().segment());
            j += 1;
        }
        let content = parse_inlines(&segs);
        let significant: Vec<&Inline> = content
            .iter()
            .filter(|n| !matches!(n, Inline::Text { text, .. } if text.trim().is_empty()))
            .filter(|n| !matches!(n, Inline::SoftBreak | Inline::HardBreak))
            .collect();
        if let [Inline::Image { .. }] = significant.as_slice() {
            return (Block::Image(content), j);
        }
        (Block::Paragraph(content), j)
    }
}

fn indented_code(lines: &[Line<'_>], i: usize) -> (Block, usize) {
    let mut j = i;
    let mut last_content = i;
    while j < lines.len() {
        let l = &lines[j];
        if l.is_blank() {
            j += 1;
            continue;
        }
        if l.indent() < 4 {
            break;
        }
        last_content = j;
        j += 1;
    }
    let text = lines[i..=last_content]
        .iter()
        .map(|l| l.strip_indent(4).text)
        .collect::<Vec<_>>()
        .join("\n");
    (
        Block::Code {
            language: None,
            fenced: false,
            text,
        },
        last_content + 1,
    )
}

fn html_block(lines: &[Line<'_>], i: usize, comment: bool) -> (Block, usize) {
    let mut j = i;
    if comment {
        while j < lines.len() {
            let done = lines[j].text.contains("-->");
            j += 1;
            if done {
                break;
            }
        }
    } else {
        while j < lines.len() && !lines[j].is_blank() {
            j += 1;
        }
    }
    let raw = lines[i..j]
        .iter()
        .map(|l| l.text)
        .collect::<Vec<_>>()
        .join("\n");
    (Block::Html(raw), j)
}
