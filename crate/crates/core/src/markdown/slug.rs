use std::collections::HashSet;

/// Turns heading text into an anchor id.
///
/// Lowercases, keeps alphanumerics, maps whitespace and hyphens to `-`,
/// drops everything else and collapses repeated `-`. Text with nothing left
/// becomes `section`.
pub fn slugify(heading_text: &str) -> String {
    let mut out = String::with_capacity(heading_text.len());
    for c in heading_text.chars() {
        if c.is_alphanumeric() {
            out.extend(c.to_lowercase());
        } else if (c.is_whitespace() || c == '-') && !out.is_empty() && !out.ends_with('-') {
            out.push('-');
        }
    }
    while out.ends_with('-') {
        out.pop();
    }
    if out.is_empty() {
        out.push_str("section");
    }
    out
}

/// Hands out unique anchors in document order: `setup`, `setup-1`, `setup-2`…
#[derive(Debug, Default)]
pub struct AnchorSet {
    used: HashSet<String>,
}

impl AnchorSet {
    pub fn unique(&mut self, text: &str) -> String {
        let base = slugify(text);
        let mut candidate = base.clone();
        let mut n = 0;
        while self.used.contains(&candidate) {
            n += 1;
            candidate = format!("{base}-{n}");
        }
        self.used.insert(candidate.clone());
        candidate
    }
}
