use ottr_core::check::{spell_check, Dictionary};
use ottr_core::markdown::ast::{Block, BlockNode};
use ottr_core::markdown::{parse_chapter, resolve_slide_embeds, slugify, GoogleSlidesResolver, OfflineSlideResolver};
use proptest::prelude::*;

/// Source snippets that each form one or more whole blocks.
fn segment() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("# Heading one".to_string()),
        Just("## Sub heading {#custom}".to_string()),
        Just("Setext title\n============".to_string()),
        Just("Plain prose with a [link](other.md#part) and ![alt text](img.png).".to_string()),
        Just("A paragraph\nthat continues on a second line.".to_string()),
        Just("- item one\n- item two with [link](a.md)\n  - nested".to_string()),
        Just("1. first\n2. second".to_string()),
        Just("> quoted text\n> more quote".to_string()),
        Just("---".to_string()),
        Just("<!-- quiz: q1 -->".to_string()),
        Just("![Slide](slides://deck1/s2)".to_string()),
        Just("    indented code\n    more code".to_string()),
        Just("```r\nx <- 1\n```".to_string()),
        Just("Visit https://example.org/page today.".to_string()),
        "[a-z ]{1,30}".prop_map(|s| format!("Words {s}")),
    ]
}

fn document() -> impl Strategy<Value = String> {
    prop::collection::vec((segment(), 0usize..3), 0..12).prop_map(|parts| {
        let mut out = String::new();
        for (seg, blanks) in parts {
            out.push_str(&seg);
            out.push('\n');
            out.push_str(&"\n".repeat(blanks));
        }
        out
    })
}

/// Text that would be extracted if it were not inside a fence.
fn fenced_payload() -> impl Strategy<Value = String> {
    prop::collection::vec(
        prop_oneof![
            Just("# Not a heading"),
            Just("[hidden link](secret.md)"),
            Just("![hidden image](secret.png)"),
            Just("https://hidden.example/url"),
            Just("zzqxv wrongg speling"),
            Just("<!-- quiz: hidden -->"),
            Just(""),
        ],
        1..6,
    )
    .prop_map(|lines| lines.join("\n"))
}

fn top_spans(blocks: &[BlockNode]) -> Vec<(usize, usize)> {
    blocks.iter().map(|b| (b.span.start_line, b.span.end_line)).collect()
}

fn has_fenced_code(blocks: &[BlockNode]) -> bool {
    blocks.iter().any(|b| match &b.block {
        Block::Code { fenced, .. } => *fenced,
        Block::List { items, .. } => items.iter().any(|i| has_fenced_code(i)),
        Block::Blockquote(c) => has_fenced_code(c),
        _ => false,
    })
}

proptest! {
    #[test]
    fn block_spans_tile_the_document(doc in document()) {
        let parsed = parse_chapter(&doc, "c.md");
        let spans = top_spans(&parsed.blocks);
        let mut next = 1;
        for (start, end) in &spans {
            prop_assert!(start <= end, "inverted span {start}..{end}");
            prop_assert_eq!(*start, next, "gap or overlap before line {} in {:?}", start, spans);
            next = end + 1;
        }
        prop_assert_eq!(next, parsed.line_count + 1, "spans {:?} vs {} lines", spans, parsed.line_count);
    }

    #[test]
    fn fenced_code_is_opaque(
        before in document(),
        payload in fenced_payload(),
        after in document(),
        tilde in any::<bool>(),
    ) {
        let fence = if tilde { "~~~" } else { "```" };
        let plain = format!("{before}\n{after}");
        let fenced = format!("{before}\n{fence}text\n{payload}\n{fence}\n\n{after}");
        let a = parse_chapter(&plain, "c.md");
        let b = parse_chapter(&fenced, "c.md");
        prop_assert!(has_fenced_code(&b.blocks));
        let targets = |d: &ottr_core::ChapterDoc| d.links.iter().map(|l| l.target.clone()).collect::<Vec<_>>();
        prop_assert_eq!(targets(&a), targets(&b));
        prop_assert_eq!(a.images.len(), b.images.len());
        prop_assert_eq!(a.headings.len(), b.headings.len());
        prop_assert_eq!(a.quiz_refs.len(), b.quiz_refs.len());
        prop_assert!(b.links.iter().all(|l| !l.target.contains("secret") && !l.target.contains("hidden")));
        let dict = Dictionary::bundled();
        let project = Dictionary::default();
        let words = |d: &ottr_core::ChapterDoc| {
            spell_check(&[d], dict, &project).into_iter().filter_map(|f| f.subject).collect::<Vec<_>>()
        };
        let found = words(&b);
        prop_assert!(!found.iter().any(|w| w == "zzqxv" || w == "wrongg" || w == "speling"), "{:?}", found);
        prop_assert_eq!(words(&a), found);
    }

    #[test]
    fn slide_resolution_is_idempotent(doc in document(), offline in any::<bool>()) {
        let parsed = parse_chapter(&doc, "c.md");
        let online = GoogleSlidesResolver;
        let local = OfflineSlideResolver::new("slides");
        let resolver: &dyn ottr_core::markdown::SlideResolver = if offline { &local } else { &online };
        let once = resolve_slide_embeds(parsed, resolver);
        let twice = resolve_slide_embeds(once.clone(), resolver);
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn parsing_and_slugs_are_deterministic(doc in document(), title in "\\PC{0,40}") {
        prop_assert_eq!(parse_chapter(&doc, "c.md"), parse_chapter(&doc, "c.md"));
        let slug = slugify(&title);
        prop_assert_eq!(&slug, &slugify(&title));
        prop_assert!(!slug.is_empty());
        prop_assert!(slug.chars().all(|c| c.is_alphanumeric() || c == '-' || c == '_'), "{}", slug);
    }
}

#[test]
fn figure_five_shape() {
    let doc = parse_chapter(
        "# Introduction\n\nThis course teaches reproducible science.\n\n![A pipeline diagram](resources/pipeline.png)\n",
        "01-intro.md",
    );
    let kinds: Vec<&str> = doc
        .blocks
        .iter()
        .map(|b| match b.block {
            Block::Heading { .. } => "heading",
            Block::Paragraph(_) => "paragraph",
            Block::Image(_) => "image",
            _ => "other",
        })
        .collect();
    assert_eq!(kinds, ["heading", "paragraph", "image"]);
}
