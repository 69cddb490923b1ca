//! Inline-level parsing: emphasis, code spans, links, images, autolinks and
//! raw HTML, each tagged with the source position it started at.

use super::ast::{plain_text, Inline, Pos};

/// One physical line of paragraph-like content, already stripped of any
/// container prefix. `col0` is the 0-based character column of `text[0]`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Segment<'a> {
    pub text: &'a str,
    pub line: usize,
    pub col0: usize,
}

pub(crate) fn parse_inlines(segments: &[Segment<'_>]) -> Vec<Inline> {
    let mut chars = Vec::new();
    let mut pos = Vec::new();
    for (i, seg) in segments.iter().enumerate() {
        if i > 0 {
            let prev = pos.last().copied().unwrap_or(Pos {
                line: seg.line,
                column: 1,
            });
            chars.push('\n');
            pos.push(Pos {
                line: prev.line,
                column: prev.column + 1,
            });
        }
        for (j, c) in seg.text.chars().enumerate() {
            chars.push(c);
            pos.push(Pos {
                line: seg.line,
                column: seg.col0 + j + 1,
            });
        }
    }
    let mut end = chars.len();
    while end > 0 && matches!(chars[end - 1], ' ' | '\t') {
        end -= 1;
    }
    let parser = InlineParser {
        chars: &chars,
        pos: &pos,
    };
    parser.parse(0, end, false)
}

struct InlineParser<'a> {
    chars: &'a [char],
    pos: &'a [Pos],
}

struct LinkTail {
    label_end: usize,
    target: String,
    title: Option<String>,
    next: usize,
}

struct TextBuf {
    text: String,
    pos: Option<Pos>,
}

impl TextBuf {
    fn push(&mut self, c: char, at: Pos) {
        if self.pos.is_none() {
            self.pos = Some(at);
        }
        self.text.push(c);
    }

    fn flush(&mut self, out: &mut Vec<Inline>) {
        if let Some(pos) = self.pos.take() {
            out.push(Inline::Text {
                text: std::mem::take(&mut self.text),
                pos,
            });
        }
    }
}

impl InlineParser<'_> {
    fn at(&self, i: usize, end: usize) -> Option<char> {
        (i < end).then(|| self.chars[i])
    }

    fn parse(&self, start: usize, end: usize, in_link: bool) -> Vec<Inline> {
        let mut out = Vec::new();
        let mut buf = TextBuf {
            text: String::new(),
            pos: None,
        };
        let mut i = start;
        while i < end {
            let c = self.chars[i];
            match c {
                '\\' => match self.at(i + 1, end) {
                    Some('\n') => {
                        buf.flush(&mut out);
                        out.push(Inline::HardBreak);
                        i = self.skip_spaces(i + 2, end);
                        continue;
                    }
                    Some(n) if n.is_ascii_punctuation() => {
                        buf.push(n, self.pos[i]);
                        i += 2;
                        continue;
                    }
                    _ => {}
                },
                '`' => {
                    let run = self.run_len(i, end, '`');
                    if let Some((code, next)) = self.code_span(i, end) {
                        buf.flush(&mut out);
                        out.push(Inline::Code {
                            code,
                            pos: self.pos[i],
                        });
                        i = next;
                    } else {
                        for k in i..i + run {
                            buf.push('`', self.pos[k]);
                        }
                        i += run;
                    }
                    continue;
                }
                '!' if self.at(i + 1, end) == Some('[') => {
                    if let Some(tail) = self.link_tail(i + 1, end) {
                        buf.flush(&mut out);
                        let alt = plain_text(&self.parse(i + 2, tail.label_end, true));
                        out.push(Inline::Image {
                            target: tail.target,
                            alt,
                            title: tail.title,
                            pos: self.pos[i],
                        });
                        i = tail.next;
                        continue;
                    }
                }
                '[' if !in_link => {
                    if let Some(tail) = self.link_tail(i, end) {
                        buf.flush(&mut out);
                        let children = self.parse(i + 1, tail.label_end, true);
                        out.push(Inline::Link {
                            target: tail.target,
                            title: tail.title,
                            children,
                            pos: self.pos[i],
                        });
                        i = tail.next;
                        continue;
                    }
                }
                '<' => {
                    if let Some((node, next)) = self.angle(i, end) {
                        buf.flush(&mut out);
                        out.push(node);
                        i = next;
                        continue;
                    }
                }
                '*' | '_' => {
                    if let Some((node, next)) = self.emphasis(i, end, in_link) {
                        buf.flush(&mut out);
                        out.push(node);
                        i = next;
                        continue;
                    }
                    let run = self.run_len(i, end, c);
                    for k in i..i + run {
                        buf.push(c, self.pos[k]);
                    }
                    i += run;
                    continue;
                }
                '\n' => {
                    let trailing = buf.text.len() - buf.text.trim_end_matches(' ').len();
                    buf.text.truncate(buf.text.len() - trailing);
                    if buf.text.is_empty() {
                        buf.pos = None;
                    }
                    buf.flush(&mut out);
                    out.push(if trailing >= 2 {
                        Inline::HardBreak
                    } else {
                        Inline::SoftBreak
                    });
                    i = self.skip_spaces(i + 1, end);
                    continue;
                }
                'h' if !in_link && self.word_boundary(i, start) => {
                    if let Some((url, next)) = self.bare_url(i, end) {
                        buf.flush(&mut out);
                        out.push(Inline::Autolink {
                            url,
                            pos: self.pos[i],
                        });
                        i = next;
                        continue;
                    }
                }
                _ => {}
            }
            buf.push(c, self.pos[i]);
            i += 1;
        }
        buf.flush(&mut out);
        out
    }

    fn skip_spaces(&self, mut i: usize, end: usize) -> usize {
        while i < end && matches!(self.chars[i], ' ' | '\t') {
            i += 1;
        }
        i
    }

    fn run_len(&self, i: usize, end: usize, c: char) -> usize {
        self.chars[i..end].iter().take_while(|&&x| x == c).count()
    }

    fn word_boundary(&self, i: usize, start: usize) -> bool {
        i == start || !self.chars[i - 1].is_alphanumeric()
    }

    fn code_span(&self, i: usize, end: usize) -> Option<(String, usize)> {
        let n = self.run_len(i, end, '`');
        let mut j = i + n;
        while j < end {
            if self.chars[j] == '`' {
                let m = self.run_len(j, end, '`');
                if m == n {
                    let mut code: String = self.chars[i + n..j]
                        .iter()
                        .map(|&c| if c == '\n' { ' ' } else { c })
                        .collect();
                    if code.len() >= 2
                        && code.starts_with(' ')
                        && code.ends_with(' ')
                        && !code.trim().is_empty()
                    {
                        code = code[1..code.len() - 1].to_string();
                    }
                    return Some((code, j + m));
                }
                j += m;
            } else {
                j += 1;
            }
        }
        None
    }

    /// Parses `[label](target "title")` starting at the `[` at `open`.
    fn link_tail(&self, open: usize, end: usize) -> Option<LinkTail> {
        let mut depth = 0usize;
        let mut k = open;
        let label_end = loop {
            if k >= end {
                return None;
            }
            match self.chars[k] {
                '\\' => k += 1,
                '`' => {
                    if let Some((_, next)) = self.code_span(k, end) {
                        k = next;
                        continue;
                    }
                    k += self.run_len(k, end, '`');
                    continue;
                }
                '[' => depth += 1,
                ']' => {
                    depth -= 1;
                    if depth == 0 {
                        break k;
                    }
                }
                _ => {}
            }
            k += 1;
        };
        if self.at(label_end + 1, end) != Some('(') {
            return None;
        }
        let mut j = self.skip_ws(label_end + 2, end);
        let mut target = String::new();
        if self.at(j, end) == Some('<') {
            j += 1;
            loop {
                match self.at(j, end)? {
                    '>' => {
                        j += 1;
                        break;
                    }
                    '\n' | '<' => return None,
                    '\\' if self.at(j + 1, end).is_some_and(|c| c.is_ascii_punctuation()) => {
                        target.push(self.chars[j + 1]);
                        j += 2;
                    }
                    c => {
                        target.push(c);
                        j += 1;
                    }
                }
            }
        } else {
            let mut parens = 0usize;
            while let Some(c) = self.at(j, end) {
                match c {
                    c if c.is_whitespace() => break,
                    '(' => parens += 1,
                    ')' if parens == 0 => break,
                    ')' => parens -= 1,
                    '\\' if self.at(j + 1, end).is_some_and(|c| c.is_ascii_punctuation()) => {
                        target.push(self.chars[j + 1]);
                        j += 2;
                        continue;
                    }
                    _ => {}
                }
                target.push(c);
                j += 1;
            }
        }
        let after_target = j;
        j = self.skip_ws(j, end);
        let mut title = None;
        if j > after_target || target.is_empty() {
            if let Some(open_q @ ('"' | '\'' | '(')) = self.at(j, end) {
                let close_q = if open_q == '(' { ')' } else { open_q };
                let mut t = String::new();
                j += 1;
                loop {
                    match self.at(j, end)? {
                        c if c == close_q => {
                            j += 1;
                            break;
                        }
                        '\\' if self.at(j + 1, end).is_some_and(|c| c.is_ascii_punctuation()) => {
                            t.push(self.chars[j + 1]);
                            j += 2;
                        }
                        c => {
                            t.push(c);
                            j += 1;
                        }
                    }
                }
                title = Some(t);
                j = self.skip_ws(j, end);
            }
        }
        if self.at(j, end) != Some(')') {
            return None;
        }
        Some(LinkTail {
            label_end,
            target,
            title,
            next: j + 1,
        })
    }

    fn skip_ws(&self, mut i: usize, end: usize) -> usize {
        while i < end && self.chars[i].is_whitespace() {
            i += 1;
        }
        i
    }

    fn angle(&self, i: usize, end: usize) -> Option<(Inline, usize)> {
        let mut j = i + 1;
        while j < end && !matches!(self.chars[j], '>' | '<' | '\n') {
            j += 1;
        }
        let closed = self.at(j, end) == Some('>');
        let inner: String = self.chars[i + 1..j].iter().collect();
        if closed && !inner.contains(char::is_whitespace) {
            if let Some(colon) = inner.find(':') {
                let scheme = &inner[..colon];
                let valid = (2..=32).contains(&scheme.len())
                    && scheme.starts_with(|c: char| c.is_ascii_alphabetic())
                    && scheme
                        .chars()
                        .all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '.' | '-'));
                if valid {
                    return Some((
                        Inline::Autolink {
                            url: inner,
                            pos: self.pos[i],
                        },
                        j + 1,
                    ));
                }
            } else if inner.contains('@') && !inner.starts_with('@') && !inner.ends_with('@') {
                return Some((
                    Inline::Autolink {
                        url: format!("mailto:{inner}"),
                        pos: self.pos[i],
                    },
                    j + 1,
                ));
            }
        }
        // raw inline HTML: tags, closing tags and comments
        let next = self.at(i + 1, end)?;
        if !(next.is_ascii_alphabetic() || matches!(next, '/' | '!' | '?')) {
            return None;
        }
        let mut k = i + 1;
        while k < end && self.chars[k] != '>' {
            k += 1;
        }
        if k >= end {
            return None;
        }
        let raw: String = self.chars[i..=k].iter().collect();
        Some((Inline::Html(raw), k + 1))
    }

    fn emphasis(&self, i: usize, end: usize, in_link: bool) -> Option<(Inline, usize)> {
        let c = self.chars[i];
        let run = self.run_len(i, end, c);
        if c == '_' && i > 0 && self.chars[i - 1].is_alphanumeric() {
            return None;
        }
        let strong = run >= 2;
        let width = if strong { 2 } else { 1 };
        let open_end = i + width;
        if self.at(open_end, end).map_or(true, char::is_whitespace) {
            return None;
        }
        let mut j = open_end;
        while j < end {
            match self.chars[j] {
                '\\' => j += 2,
                '`' => {
                    j = match self.code_span(j, end) {
                        Some((_, next)) => next,
                        None => j + self.run_len(j, end, '`'),
                    };
                }
                x if x == c => {
                    let m = self.run_len(j, end, c);
                    let prev_ok = !self.chars[j - 1].is_whitespace();
                    let after = j + m;
                    let next_ok = c != '_' || self.at(after, end).map_or(true, |n| !n.is_alphanumeric());
                    if prev_ok && next_ok && j > open_end {
                        if strong && m >= 2 {
                            let inner = self.parse(open_end, j, in_link);
                            return Some((Inline::Strong(inner), j + 2));
                        }
                        if !strong && m == 1 {
                            let inner = self.parse(open_end, j, in_link);
                            return Some((Inline::Emphasis(inner), j + 1));
                        }
                    }
                    j += m;
                }
                _ => j += 1,
            }
        }
        None
    }

    fn bare_url(&self, i: usize, end: usize) -> Option<(String, usize)> {
        let rest: String = self.chars[i..end.min(i + 8)].iter().collect();
        let scheme_len = if rest.starts_with("https://") {
            8
        } else if rest.starts_with("http://") {
            7
        } else {
            return None;
        };
        let mut j = i;
        while j < end && !self.chars[j].is_whitespace() && self.chars[j] != '<' {
            j += 1;
        }
        // trailing punctuation is prose, not URL
        loop {
            if j <= i + scheme_len {
                return None;
            }
            let last = self.chars[j - 1];
            if matches!(last, '.' | ',' | ':' | ';' | '!' | '?' | '"' | '\'' | '*' | '_') {
                j -= 1;
            } else if last == ')' {
                let opens = self.chars[i..j].iter().filter(|&&x| x == '(').count();
                let closes = self.chars[i..j].iter().filter(|&&x| x == ')').count();
                if closes > opens {
                    j -= 1;
                } else {
                    break;
                }
            } else {
                break;
            }
        }
        Some((self.chars[i..j].iter().collect(), j))
    }
}
